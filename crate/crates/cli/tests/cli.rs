use std::path::Path;
use std::process::{Command, Output};

fn lommel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lommel")).args(args).env_remove("LOMMEL_OUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_value_and_exit_codes() {
    let o = lommel(&["eval", "--mu", "0.5", "--nu", "0.5", "--z", "3.14159265358979", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    let want = 2.0 / std::f64::consts::PI.sqrt();
    assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-13);

    let o = lommel(&["eval", "--mu", "0.5", "--nu", "0.5", "--z", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("z must be positive"));

    let o = lommel(&["eval", "--mu", "-1.5", "--nu", "0.5", "--z", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("odd negative integer"));
    assert!(!stderr(&o).contains("panicked"));

    let o = lommel(&["eval", "--mu", "0.5", "--nu", "1.5", "--z", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mu-nu is an odd negative integer"));

    assert_eq!(lommel(&["eval", "--mu", "0.5"]).status.code(), Some(1));
    assert_eq!(lommel(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lommel(&["--help"]).status.code(), Some(0));
}

#[test]
fn eval_methods_agree() {
    let get = |extra: &[&str]| {
        let mut args = vec!["eval", "--mu", "1.5", "--z", "2.5", "--format", "json"];
        args.extend_from_slice(extra);
        json(&lommel(&args))["value"].as_f64().unwrap()
    };
    let series = get(&[]);
    assert!((get(&["--method", "closed-form"]) - series).abs() < 1e-13);
    assert!((get(&["--method", "quadrature"]) - series).abs() < 1e-11);
    assert!((get(&["--precision", "extended"]) - series).abs() < 1e-14);
    let phi = |m: &str| {
        json(&lommel(&["eval", "--mu", "0.7", "--k", "1", "--z", "10", "--method", m, "--format", "json"]))["value"]
            .as_f64()
            .unwrap()
    };
    assert!((phi("series") - phi("quadrature")).abs() < 1e-11);
    let o = lommel(&["eval", "--mu", "0.7", "--z", "2", "--method", "closed-form"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_csv_header_is_fixed() {
    let o = lommel(&["eval", "--mu", "0.5", "--k", "0", "--z", "5", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "quantity,mu,nu,k,derivative,z,value,abs_error_estimate,method,terms_used,cancellation_index,extended"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[6], "-7.5185634785487940e-2");
}

#[test]
fn zeros_table_and_flags() {
    let o = lommel(&["zeros", "--mu", "0.5", "--k", "0", "--zmax", "40", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,zero,residual\n"));
    let zeros: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(zeros.len() >= 6);
    for (i, z) in zeros.iter().enumerate().skip(1).step_by(2) {
        assert!(*z > (i + 1) as f64 * std::f64::consts::PI);
    }
    assert!(stderr(&o).contains("2n pi bound: PASS"));

    let o = lommel(&["zeros", "--mu", "1", "--k", "0", "--zmax", "13", "--format", "json"]);
    let v = json(&o);
    let flags = v["flags"].as_array().unwrap();
    assert_eq!(flags.len(), 2);
    assert_eq!(flags[0]["kind"], "suspected-double-root");
    assert!(stderr(&o).matches("suspected double root").count() == 2);

    let o = lommel(&["zeros", "--mu", "0.5", "--k", "0", "--zmax", "40", "--interlace-with", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["interlacing"]["holds"], true);
    assert!(stderr(&o).contains("interlacing with phi_1: PASS"));

    assert_eq!(lommel(&["zeros", "--mu", "1", "--k", "1", "--zmax", "10"]).status.code(), Some(2));
    assert_eq!(lommel(&["zeros", "--mu", "0.5", "--zmax", "0"]).status.code(), Some(1));
}

#[test]
fn verify_examples() {
    let o = lommel(&["verify", "turan1", "--mu-range=-2.4:-0.6", "--z-range=0.1:50", "--z-step", "0.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("mu,z,margin,certified_sign,flag\n"));
    assert!(!text.contains("violation"));
    assert!(stderr(&o).contains("turan1: PASS"));

    let o = lommel(&["verify", "laguerre", "--mu-range=0.1:0.9", "--k", "0", "--z-step", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["k"], 0);
    assert_eq!(v["counts"]["violation"], 0);

    let o = lommel(&["verify", "eta-identity", "--z-range=0.1:31.4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("eta-identity: PASS"));

    let o = lommel(&["verify", "no-such-thing"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("turan1"));
    assert_eq!(lommel(&["verify", "turan1", "--mu-range", "1"]).status.code(), Some(1));
}

#[test]
fn scan_examples() {
    let o = lommel(&["scan", "conjecture", "--mu-range=0.6:3.0", "--mu-step", "0.4", "--z-range=0.1:50", "--z-step", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["label"], "certified at tolerance");
    for s in v["slices"].as_array().unwrap() {
        let mu = s["mu"].as_f64().unwrap();
        let negative = s["negative"].as_u64().unwrap();
        assert_eq!(negative > 0, mu < 1.5, "mu={mu}");
    }

    let o = lommel(&["scan", "sign-changes", "--target", "eta", "--z-range=0.1:31.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,lo,hi,left,right\n"));
    assert!(text.lines().count() > 9);

    let o = lommel(&["scan", "reversed", "--mu", "0", "--auto-window", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert!(v["window"].as_f64().unwrap() > 0.0);

    let o = lommel(&["scan", "reversed", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(lommel(&["scan", "reversed", "--mu", "0.5", "--auto-window"]).status.code(), Some(2));
}

#[test]
fn reversed_from_saved_zero_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("w.json");
    let o = lommel(&["zeros", "--mu", "-0.5", "--k", "0", "--zmax", "10", "--out", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = lommel(&["scan", "reversed", "--mu", "0", "--zeros", table.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let auto = lommel(&["scan", "reversed", "--mu", "0", "--auto-window", "--format", "json"]);
    assert_eq!(o.stdout, auto.stdout);

    let wrong = dir.path().join("x.json");
    lommel(&["zeros", "--mu", "0.5", "--k", "0", "--zmax", "10", "--out", wrong.to_str().unwrap()]);
    let o = lommel(&["scan", "reversed", "--mu", "0", "--zeros", wrong.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("phi_0"));
}

#[test]
fn output_files_config_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# grid\nmu-range = -2.0:-1.0\nz-range = 0.5:5\nz-step = 0.5\nformat = json\n").unwrap();
    let out = dir.path().join("a.json");
    let o = lommel(&["verify", "turan1", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["grid"]["z_range"][1].as_f64(), Some(5.0));
    assert_eq!(v["grid"]["mu_range"][0].as_f64(), Some(-2.0));

    // Flags override the file.
    let o = lommel(&["verify", "turan1", "--config", cfg.to_str().unwrap(), "--z-range=0.5:2", "--format", "csv"]);
    // Ten slices (-1.5 is skipped) of four points.
    assert_eq!(stdout(&o).lines().count() - 1, 40);

    let o = Command::new(env!("CARGO_BIN_EXE_lommel"))
        .args(["eval", "--mu", "0.5", "--z", "1", "--out", "sub/e.csv"])
        .env("LOMMEL_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(Path::new(&dir.path().join("sub/e.csv")).exists());

    let o = lommel(&["eval", "--mu", "0.5", "--z", "1", "--format", "csv", "--out", "x.json"]);
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(&cfg, "colour = red\n").unwrap();
    let o = lommel(&["eval", "--mu", "0.5", "--z", "1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(lommel(&["eval", "--mu", "0.5", "--z", "1", "--config", "/no/such/file"]).status.code(), Some(1));
}

#[test]
fn failed_check_exits_four() {
    let o = lommel(&["scan", "conjecture", "--mu-range=1.0:1.0", "--z-range=0.1:1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn pretty_uses_six_digits() {
    let o = lommel(&["eval", "--mu", "1.5", "--nu", "0.5", "--z", "3.141592653589793"]);
    let text = stdout(&o);
    assert!(text.contains("value         1.77245\n"), "{text}");
}
