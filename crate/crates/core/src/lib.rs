//! Statistics of the EMF exposure generated by a random network of
//! massive-MIMO base stations.

pub mod analytic;
pub mod antenna;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod ppp;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
pub use analytic::ExposureModel;
pub use model::{ConfigDocument, NetworkConfig};

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always follows input order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Runs `f` on a pool of `workers` threads, or the global pool when `None`.
#[cfg(feature = "parallel")]
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R: Send>(_workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    Ok(f())
}
