use alloc::vec::Vec;

/// Maps an index range through a function, returning results in index order.
///
/// Grid scans are written against this trait so a threaded implementation can
/// be swapped in without touching the numerics; results must not depend on
/// the implementation.
pub trait GridMap: Sync {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// In-order, single-threaded evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl GridMap for Sequential {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive, built from
/// integer multiples of the step so that repeated runs produce identical
/// values.
pub fn linspace_step(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || hi < lo {
        return Vec::new();
    }
    let count = libm::floor((hi - lo) / step + 1e-9) as usize + 1;
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// Decimal grid `a/scale, (a+1)/scale, ...` where the endpoints are rounded
/// to the given number of decimals. Values such as `-1.5` or `0.5` come out
/// exactly, which matters for the excluded-parameter checks.
pub fn decimal_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    // Pick the smallest power of ten that makes the step integral.
    let mut scale = 1.0;
    while scale < 1e9 && libm::fabs(step * scale - libm::round(step * scale)) > 1e-9 {
        scale *= 10.0;
    }
    let s = libm::round(step * scale);
    let a = libm::ceil(lo * scale - 1e-9);
    let b = libm::floor(hi * scale + 1e-9);
    if !(s > 0.0) || b < a {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut k = a;
    while k <= b {
        out.push(k / scale);
        k += s;
    }
    out
}
