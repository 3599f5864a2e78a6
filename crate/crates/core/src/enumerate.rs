//! Block-partitioned sums over subset lattices.
//!
//! The submasks of a universe are split into fixed blocks of `2^BLOCK_BITS`
//! consecutive local indices. Blocks may be summed concurrently; block
//! partials are always merged in block order, so results do not depend on
//! the thread count or on the `parallel` feature.

use crate::coalition::{deposit, FixedSizeSubmasks, SubmaskIter};
use crate::numeric::CompensatedSum;
use crate::par;

const BLOCK_BITS: u32 = 12;

fn blocks(universe: u64) -> (usize, u64) {
    let width = universe.count_ones();
    if width <= BLOCK_BITS {
        (1, 1u64 << width)
    } else {
        (1usize << (width - BLOCK_BITS), 1u64 << BLOCK_BITS)
    }
}

fn block_iter(universe: u64, block: usize, block_len: u64) -> impl Iterator<Item = u64> {
    let start = deposit(block as u64 * block_len, universe);
    SubmaskIter::starting_at(universe, start).take(block_len as usize)
}

/// Compensated sum of `f(S)` over every submask `S` of `universe`.
pub(crate) fn sum_submasks<F>(universe: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    let (count, len) = blocks(universe);
    let partials = par::map_indexed(count, |b| {
        block_iter(universe, b, len)
            .map(&f)
            .collect::<CompensatedSum>()
    });
    let mut total = CompensatedSum::new();
    for p in &partials {
        total.merge(p);
    }
    total.value()
}

/// Per-size compensated sums: entry `m` sums `f(S)` over submasks of size `m`.
pub(crate) fn sums_by_size<F>(universe: u64, f: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    let width = universe.count_ones() as usize;
    let (count, len) = blocks(universe);
    let partials = par::map_indexed(count, |b| {
        let mut acc = vec![CompensatedSum::new(); width + 1];
        for s in block_iter(universe, b, len) {
            acc[s.count_ones() as usize].add(f(s));
        }
        acc
    });
    let mut totals = vec![CompensatedSum::new(); width + 1];
    for block in &partials {
        for (t, p) in totals.iter_mut().zip(block) {
            t.merge(p);
        }
    }
    totals.iter().map(CompensatedSum::value).collect()
}

/// Compensated sum of `f(S)` over submasks of `universe` of exactly `size`.
pub(crate) fn sum_fixed_size<F>(universe: u64, size: usize, f: F) -> f64
where
    F: Fn(u64) -> f64,
{
    FixedSizeSubmasks::new(universe, size)
        .map(f)
        .collect::<CompensatedSum>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_sum_matches_plain_sum() {
        let u = ((1u64 << 15) - 1) & !0b100;
        let f = |s: u64| (s % 7) as f64 - 3.0;
        let plain: f64 = SubmaskIter::new(u).map(f).sum();
        assert_eq!(sum_submasks(u, f), plain);
        let by_size = sums_by_size(u, f);
        assert_eq!(by_size.len(), 15);
        assert_eq!(by_size.iter().sum::<f64>(), plain);
    }

    #[test]
    fn fixed_size_of_empty_universe() {
        assert_eq!(sum_fixed_size(0, 0, |_| 2.5), 2.5);
        assert_eq!(sum_fixed_size(0, 1, |_| 2.5), 0.0);
    }
}
