//! Single switch point between the rayon-backed and sequential execution
//! paths. Everything routed through here must be order-preserving so that
//! results are identical (bit for bit) in both builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fallible order-preserving map over a slice; any error aborts the map.
#[cfg(feature = "parallel")]
pub(crate) fn try_map_slice<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map_slice<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    F: Fn(&T) -> Result<U, E>,
{
    items.iter().map(f).collect()
}
