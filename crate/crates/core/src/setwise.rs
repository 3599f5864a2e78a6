//! Setwise indices: the Grabisch interaction index, coalition significance
//! `B` / `B′`, and the Shapley-Taylor index.
//!
//! The Shapley-Taylor prefix `π^S` is read as the set of players that come
//! before every member of `S` in the ordering `π`. Under a uniform ordering,
//! a fixed `T ⊆ N∖S` with `|T| = t` is exactly that prefix with probability
//! `t!·s·(n−t−1)!/n! = s / (n·C(n−1, t))`: `T` fills the first `t` slots in
//! any order, a member of `S` takes slot `t+1`, the rest is free.

use std::sync::Arc;

use crate::coalition::{full_mask, Coalition, FixedSizeSubmasks, SubmaskIter};
use crate::enumerate::sum_submasks;
use crate::error::{domain, Result};
use crate::game::{infallible, lookup, Game, ValueTable, Values};
use crate::kernels;
use crate::numeric::{binomial_f64, compensated_sum};
use crate::pairwise::SingletonCoalitionGame;
use crate::par;
use crate::shapley::{check_forms, shapley_on, Mode};

/// Largest coalition accepted by the significance routines (2^15 terms).
pub const SIGNIFICANCE_CAP: usize = 15;

fn dset<V: Values + ?Sized>(v: &V, set: u64, context: u64) -> f64 {
    infallible(kernels::delta_set(&mut lookup(v), set, context))
}

/// `Σ_{T ⊆ U∖S} (n−t−s)! t!/(n−s+1)! · Δ_S v(T)` with `n = |U|`.
pub(crate) fn grabisch_on<V: Values + ?Sized>(v: &V, set: u64, universe: u64) -> f64 {
    let n = universe.count_ones() as usize;
    let s = set.count_ones() as usize;
    let weights: Vec<f64> = (0..=n - s)
        .map(|t| 1.0 / ((n - s + 1) as f64 * binomial_f64(n - s, t)))
        .collect();
    sum_submasks(universe & !set, |t| {
        weights[t.count_ones() as usize] * dset(v, set, t)
    })
}

/// `v'(T) = v(T ∪ present)`: the game with `present` always participating.
struct Conditioned<'a> {
    table: &'a ValueTable,
    present: u64,
}

impl Values for Conditioned<'_> {
    fn players(&self) -> usize {
        self.table.n()
    }

    fn value(&self, mask: u64) -> f64 {
        self.table.get(mask | self.present)
    }
}

fn check_set(g: &Game, s: &Coalition) -> Result<()> {
    g.check_coalition(s)?;
    if s.is_empty() {
        return Err(domain("index of the empty coalition is undefined"));
    }
    Ok(())
}

/// Grabisch interaction index `𝓘(S)` over all players.
pub fn grabisch_index(g: &Game, s: &Coalition) -> Result<f64> {
    grabisch_index_within(g, s, &g.full())
}

/// `𝓘(S | R)`: players outside `restrict` never participate.
pub fn grabisch_index_within(g: &Game, s: &Coalition, restrict: &Coalition) -> Result<f64> {
    check_set(g, s)?;
    g.check_coalition(restrict)?;
    if !s.is_subset_of(restrict) {
        return Err(domain(format!(
            "{s} is not inside the restriction {restrict}"
        )));
    }
    let table = g.exact_table()?;
    Ok(grabisch_on(&*table, s.mask(), restrict.mask()))
}

/// Absolute deviations between the two sides of both recursive properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursiveDeviation {
    /// Merged-singleton property.
    pub merged: f64,
    /// Presence/absence property, worst over the members of `S`.
    pub conditioned: f64,
    pub worst_member: usize,
}

impl RecursiveDeviation {
    pub fn max(&self) -> f64 {
        self.merged.max(self.conditioned)
    }
}

pub(crate) fn recursive_on(
    table: &Arc<ValueTable>,
    set: u64,
    universe: u64,
) -> Result<RecursiveDeviation> {
    let lhs = grabisch_on(&**table, set, universe);

    let merged = SingletonCoalitionGame::within(Arc::clone(table), set, universe)?;
    let outside = universe & !set;
    let lower = compensated_sum(
        SubmaskIter::new(set)
            .filter(|&k| k != 0 && k != set)
            .map(|k| grabisch_on(&**table, k, outside | k)),
    );
    let merged_dev = (lhs - (merged.shapley_value() - lower)).abs();

    let mut conditioned = 0.0f64;
    let mut worst_member = set.trailing_zeros() as usize;
    for i in crate::coalition::Bits(set) {
        let bit = 1u64 << i;
        let rest = set & !bit;
        let present = Conditioned {
            table,
            present: bit,
        };
        let with = grabisch_on(&present, rest, universe & !bit);
        let without = grabisch_on(&**table, rest, universe & !bit);
        let dev = (lhs - (with - without)).abs();
        if dev > conditioned {
            conditioned = dev;
            worst_member = i as usize;
        }
    }
    Ok(RecursiveDeviation {
        merged: merged_dev,
        conditioned,
        worst_member,
    })
}

/// Evaluates both sides of the merged-singleton and the presence/absence
/// recursions for `𝓘(S)`.
pub fn grabisch_recursive_check(g: &Game, s: &Coalition) -> Result<RecursiveDeviation> {
    check_set(g, s)?;
    if s.size() < 2 {
        return Err(domain("recursive properties need |S| > 1"));
    }
    let table = g.exact_table()?;
    recursive_on(&table, s.mask(), full_mask(g.n()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceReport {
    pub coalition: Coalition,
    /// Signed aggregate `B([S])`.
    pub b: f64,
    /// Absolute aggregate `B′([S])`.
    pub b_prime: f64,
}

/// Both routes to `B([S])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceForms {
    pub phi_difference: f64,
    pub index_sum: f64,
    pub abs_index_sum: f64,
}

/// Each term `𝓘(S′ | N∖S ∪ S′)` for `S′ ⊆ S`, `|S′| > 1`, ascending mask.
pub(crate) fn significance_terms(table: &ValueTable, set: u64, universe: u64) -> Vec<f64> {
    let outside = universe & !set;
    SubmaskIter::new(set)
        .filter(|k| k.count_ones() > 1)
        .map(|k| grabisch_on(table, k, outside | k))
        .collect()
}

pub(crate) fn significance_forms_on(
    table: &Arc<ValueTable>,
    set: u64,
    universe: u64,
) -> Result<SignificanceForms> {
    let merged = SingletonCoalitionGame::within(Arc::clone(table), set, universe)?;
    let outside = universe & !set;
    let individual = compensated_sum(
        crate::coalition::Bits(set).map(|i| shapley_on(&**table, i as usize, outside | 1 << i)),
    );
    let terms = significance_terms(table, set, universe);
    Ok(SignificanceForms {
        phi_difference: merged.shapley_value() - individual,
        index_sum: compensated_sum(terms.iter().copied()),
        abs_index_sum: compensated_sum(terms.iter().map(|x| x.abs())),
    })
}

fn check_significance_set(g: &Game, s: &Coalition) -> Result<()> {
    check_set(g, s)?;
    if s.size() < 2 {
        return Err(domain("significance needs |S| >= 2"));
    }
    if s.size() > SIGNIFICANCE_CAP {
        return Err(domain(format!(
            "significance refused for |S| = {} above the cap of {SIGNIFICANCE_CAP}; \
             use the sampled estimator",
            s.size()
        )));
    }
    Ok(())
}

pub fn significance_forms(g: &Game, s: &Coalition) -> Result<SignificanceForms> {
    check_significance_set(g, s)?;
    let table = g.exact_table()?;
    significance_forms_on(&table, s.mask(), full_mask(g.n()))
}

/// `B([S])`; both forms are computed and must agree.
pub fn b_value(g: &Game, s: &Coalition) -> Result<f64> {
    Ok(b_significance(g, s)?.b)
}

pub fn b_significance(g: &Game, s: &Coalition) -> Result<SignificanceReport> {
    let forms = significance_forms(g, s)?;
    check_forms(|| format!("B({s})"), forms.phi_difference, forms.index_sum)?;
    Ok(SignificanceReport {
        coalition: *s,
        b: forms.index_sum,
        b_prime: forms.abs_index_sum,
    })
}

fn check_taylor(g: &Game, s: &Coalition, k: usize) -> Result<()> {
    check_set(g, s)?;
    if k == 0 || k > g.n() {
        return Err(domain(format!(
            "Shapley-Taylor order k = {k} outside 1..={}",
            g.n()
        )));
    }
    if s.size() > k {
        return Err(domain(format!("|S| = {} exceeds k = {k}", s.size())));
    }
    Ok(())
}

pub(crate) fn taylor_on<V: Values + ?Sized>(v: &V, set: u64, k: usize, n: usize) -> f64 {
    let s = set.count_ones() as usize;
    if s < k {
        return dset(v, set, 0);
    }
    let weights: Vec<f64> = (0..=n - s).map(|t| prefix_probability(n, s, t)).collect();
    sum_submasks(full_mask(n) & !set, |t| {
        weights[t.count_ones() as usize] * dset(v, set, t)
    })
}

/// Probability that exactly `T` (with `|T| = t`) precedes all of `S` under a
/// uniform ordering of `n` players.
pub fn prefix_probability(n: usize, s: usize, t: usize) -> f64 {
    s as f64 / (n as f64 * binomial_f64(n - 1, t))
}

/// Shapley-Taylor index `𝓘^(k)(S)` for `1 ≤ |S| ≤ k`.
pub fn shapley_taylor(g: &Game, s: &Coalition, k: usize) -> Result<f64> {
    check_taylor(g, s, k)?;
    let table = g.exact_table()?;
    Ok(taylor_on(&*table, s.mask(), k, g.n()))
}

/// Every `𝓘^(k)(S)` with `1 ≤ |S| ≤ k`, ordered by size then mask.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorIndex {
    pub k: usize,
    pub values: Vec<(Coalition, f64)>,
    pub mode: Mode,
}

impl TaylorIndex {
    pub fn total(&self) -> f64 {
        compensated_sum(self.values.iter().map(|(_, x)| *x))
    }
}

pub(crate) fn taylor_sets(n: usize, k: usize) -> Vec<u64> {
    (1..=k)
        .flat_map(|s| FixedSizeSubmasks::new(full_mask(n), s))
        .collect()
}

pub fn taylor_index(g: &Game, k: usize) -> Result<TaylorIndex> {
    if k == 0 || k > g.n() {
        return Err(domain(format!(
            "Shapley-Taylor order k = {k} outside 1..={}",
            g.n()
        )));
    }
    let table = g.exact_table()?;
    let sets = taylor_sets(g.n(), k);
    let values = par::map_indexed(sets.len(), |idx| {
        (
            Coalition::from_raw(g.n(), sets[idx]),
            taylor_on(&*table, sets[idx], k, g.n()),
        )
    });
    Ok(TaylorIndex {
        k,
        values,
        mode: Mode::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::game::build_game;
    use crate::pairwise::interaction;

    fn game(spec: &str) -> Game {
        build_game(&spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn grabisch_examples() {
        let pair = Game::from_table(
            ValueTable::new(2, vec![0.0, 0.0, 0.0, 1.0]).unwrap(),
            "pair",
        );
        assert_eq!(grabisch_index(&pair, &pair.full()).unwrap(), 1.0);
        let maj = game("majority:3,2");
        let s = maj.coalition(&[0, 2]).unwrap();
        assert!(grabisch_index(&maj, &s).unwrap().abs() < 1e-12);
        assert!(grabisch_index(&maj, &maj.empty()).is_err());
    }

    #[test]
    fn grabisch_pair_matches_interaction() {
        let g = game("random:6,5");
        for (i, j) in crate::pairwise::upper_pairs(6) {
            let s = g.coalition(&[i, j]).unwrap();
            let a = grabisch_index(&g, &s).unwrap();
            let b = interaction(&g, i, j).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn recursive_examples() {
        let add = game("additive:1,2,3,4");
        let dev = grabisch_recursive_check(&add, &add.coalition(&[0, 1, 3]).unwrap()).unwrap();
        assert!(dev.max() < 1e-12);
        let maj = game("majority:3,2");
        let dev = grabisch_recursive_check(&maj, &maj.coalition(&[0, 1]).unwrap()).unwrap();
        assert!(dev.max() <= 1e-9);
        let rnd = game("random:6,9");
        let dev = grabisch_recursive_check(&rnd, &rnd.coalition(&[1, 3, 4]).unwrap()).unwrap();
        assert!(dev.max() <= 1e-9, "{dev:?}");
    }

    #[test]
    fn significance_examples() {
        let maj = game("majority:3,2");
        let r = b_significance(&maj, &maj.coalition(&[0, 1]).unwrap()).unwrap();
        assert!(r.b.abs() < 1e-12 && r.b_prime.abs() < 1e-12);
        let pat = game("pattern:4,1100,2");
        let r = b_significance(&pat, &pat.coalition(&[0, 1]).unwrap()).unwrap();
        assert!((r.b - 2.0).abs() < 1e-12 && (r.b_prime - 2.0).abs() < 1e-12);
        let add = game("additive:1,2,3,4");
        let r = b_significance(&add, &add.coalition(&[0, 1, 2]).unwrap()).unwrap();
        assert!(r.b.abs() < 1e-12 && r.b_prime.abs() < 1e-12);
        assert!(b_value(&maj, &maj.coalition(&[0]).unwrap()).is_err());
    }

    #[test]
    fn significance_cap() {
        let g = game("random:16,1");
        assert!(matches!(b_value(&g, &g.full()), Err(Error::Domain(_))));
    }

    #[test]
    fn taylor_majority() {
        let g = game("majority:3,2");
        let pair = g.coalition(&[0, 1]).unwrap();
        assert!((shapley_taylor(&g, &pair, 2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            shapley_taylor(&g, &g.coalition(&[1]).unwrap(), 2).unwrap(),
            0.0
        );
        let idx = taylor_index(&g, 2).unwrap();
        assert_eq!(idx.values.len(), 6);
        assert!((idx.total() - 1.0).abs() < 1e-12);
        assert!(shapley_taylor(&g, &pair, 1).is_err());
        assert!(shapley_taylor(&g, &pair, 4).is_err());
    }

    #[test]
    fn prefix_distribution_sums_to_one() {
        for n in 1..=12usize {
            for s in 1..=n {
                let total: f64 = (0..=n - s)
                    .map(|t| binomial_f64(n - s, t) * prefix_probability(n, s, t))
                    .sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} s={s}");
            }
        }
    }
}
