//! Ordered map over independent work items, parallel when the `parallel`
//! feature is on and sequential otherwise.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Jobs {
    Sequential,
    /// Number of worker threads; 0 means the rayon default.
    Parallel(usize),
}

impl Default for Jobs {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Jobs::Parallel(0)
        } else {
            Jobs::Sequential
        }
    }
}

impl Jobs {
    pub fn from_count(k: Option<usize>) -> Jobs {
        match k {
            Some(1) => Jobs::Sequential,
            Some(k) => Jobs::Parallel(k),
            None => Jobs::default(),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && matches!(self, Jobs::Parallel(_))
    }
}

/// Applies `f` to every item; the output order always matches the input.
pub fn map_ordered<T, R, F>(items: &[T], jobs: Jobs, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match jobs {
        Jobs::Sequential => items.iter().map(f).collect(),
        Jobs::Parallel(k) => parallel_map(items, k, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if threads == 0 {
        return items.par_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
        Err(_) => items.par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], _threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}
