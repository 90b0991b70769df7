use lommel_core::grid::GridMap;
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Grid evaluation on a rayon pool; results come back in index order.
pub struct RayonMap {
    pool: rayon::ThreadPool,
}

impl RayonMap {
    /// `None` uses rayon's default thread count.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        let pool = b.build().map_err(|e| CliError::usage(format!("cannot start thread pool: {e}")))?;
        Ok(RayonMap { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl GridMap for RayonMap {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lommel_core::grid::Sequential;

    #[test]
    fn ordered_like_sequential() {
        let m = RayonMap::new(Some(3)).unwrap();
        assert_eq!(m.threads(), 3);
        let f = |i: usize| (i * i) as f64 / 7.0;
        assert_eq!(m.map(1000, f), Sequential.map(1000, f));
    }
}
