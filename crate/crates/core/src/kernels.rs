//! Discrete derivatives shared by the exact and sampled paths. Each kernel
//! takes a fallible lookup so the sampled estimators and the dense-table
//! enumerators evaluate the same floating-point expressions.

use crate::coalition::SubmaskIter;
use crate::numeric::CompensatedSum;

/// `v(S ∪ {i}) − v(S)`.
pub(crate) fn delta_i<E>(
    v: &mut impl FnMut(u64) -> Result<f64, E>,
    i: usize,
    s: u64,
) -> Result<f64, E> {
    let with = v(s | 1 << i)?;
    let without = v(s)?;
    Ok(with - without)
}

/// `v(S ∪ {i,j}) − v(S ∪ {i}) − v(S ∪ {j}) + v(S)`.
pub(crate) fn delta_ij<E>(
    v: &mut impl FnMut(u64) -> Result<f64, E>,
    i: usize,
    j: usize,
    s: u64,
) -> Result<f64, E> {
    let (bi, bj) = (1u64 << i, 1u64 << j);
    let both = v(s | bi | bj)?;
    let only_i = v(s | bi)?;
    let only_j = v(s | bj)?;
    let none = v(s)?;
    Ok(both - only_i - only_j + none)
}

/// `Σ_{L ⊆ set} (−1)^{|set|−|L|} v(L ∪ context)`.
pub(crate) fn delta_set<E>(
    v: &mut impl FnMut(u64) -> Result<f64, E>,
    set: u64,
    context: u64,
) -> Result<f64, E> {
    let size = set.count_ones();
    let mut acc = CompensatedSum::new();
    for l in SubmaskIter::new(set) {
        let x = v(l | context)?;
        if (size - l.count_ones()).is_multiple_of(2) {
            acc.add(x);
        } else {
            acc.add(-x);
        }
    }
    Ok(acc.value())
}

/// Purified pairwise component: `Σ_{T' ⊆ T} (−1)^{|T|−|T'|} Δ_ij v(T')`.
pub(crate) fn r_t<E>(
    v: &mut impl FnMut(u64) -> Result<f64, E>,
    i: usize,
    j: usize,
    t: u64,
) -> Result<f64, E> {
    let size = t.count_ones();
    let mut acc = CompensatedSum::new();
    for sub in SubmaskIter::new(t) {
        let d = delta_ij(v, i, j, sub)?;
        if (size - sub.count_ones()).is_multiple_of(2) {
            acc.add(d);
        } else {
            acc.add(-d);
        }
    }
    Ok(acc.value())
}
