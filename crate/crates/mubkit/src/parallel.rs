//! Iterator shims that run data-parallel under the `parallel` feature and fall
//! back to plain sequential iterators without it. Call sites are written once;
//! the feature flag decides the execution strategy.
//!
//! Only order-independent reductions (max, all, per-item output slots) go
//! through these shims, so both builds produce bit-identical results.

#[cfg(feature = "parallel")]
pub use rayon::prelude::*;

/// `iter!(collection)` expands to `par_iter()` or `iter()`.
#[macro_export]
macro_rules! iter {
    ($e:expr) => {{
        #[cfg(feature = "parallel")]
        {
            $crate::parallel::IntoParallelRefIterator::par_iter(&$e)
        }
        #[cfg(not(feature = "parallel"))]
        {
            $e.iter()
        }
    }};
}

/// `into_iter!(collection)` expands to `into_par_iter()` or `into_iter()`.
#[macro_export]
macro_rules! into_iter {
    ($e:expr) => {{
        #[cfg(feature = "parallel")]
        {
            $crate::parallel::IntoParallelIterator::into_par_iter($e)
        }
        #[cfg(not(feature = "parallel"))]
        {
            $e.into_iter()
        }
    }};
}

/// Largest value of `f` over `items`; 0.0 for an empty list. The reduction is a
/// plain max, so parallel and sequential builds agree exactly.
pub fn max_over<I, F>(items: Vec<I>, f: F) -> f64
where
    I: Send,
    F: Fn(&I) -> f64 + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items
            .into_par_iter()
            .map(|it| f(&it))
            .reduce(|| 0.0, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(|it| f(&it)).fold(0.0, f64::max)
    }
}

/// Applies `f` to every item, collecting results in input order.
pub fn map_collect<I, O, F>(items: Vec<I>, f: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(&I) -> O + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(|it| f(&it)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(|it| f(&it)).collect()
    }
}
