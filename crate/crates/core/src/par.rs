//! Data-parallel building blocks with a sequential fallback.
//!
//! Everything in the crate that fans out over documents, classes, trees or
//! pairs goes through one of these helpers. With the `parallel` feature
//! (default) they use rayon; without it they are plain iterator loops with
//! identical semantics. Both paths preserve input order, so outputs are
//! byte-identical regardless of feature selection or worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over a slice, collecting results in input order.
#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Map `f` over a slice, collecting results in input order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// Sum in a fixed pairwise order.
///
/// Reductions over values produced by parallel maps must not fold in
/// arrival order, or float results would vary from run to run. Callers
/// collect into an ordered `Vec` first and reduce here; the split points
/// depend only on the length, never on scheduling.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_collect_preserves_order() {
        let xs: Vec<usize> = (0..1000).collect();
        let doubled = map_collect(&xs, |x| x * 2);
        assert_eq!(doubled, (0..1000).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn map_range_matches_sequential() {
        assert_eq!(map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
        assert_eq!(map_range(0, |i| i), Vec::<usize>::new());
    }

    #[test]
    fn pairwise_sum_small_and_large() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.5]), 1.5);
        let xs = vec![0.1; 1000];
        let got = pairwise_sum(&xs);
        assert!((got - 100.0).abs() < 1e-9, "pairwise sum drifted: {got}");
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn pairwise_sum_is_thread_count_independent() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64) * 0.001 + 0.1).collect();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| pairwise_sum(&map_collect(&xs, |x| x.sin())));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| pairwise_sum(&map_collect(&xs, |x| x.sin())));
        assert_eq!(one.to_bits(), four.to_bits());
    }
}
