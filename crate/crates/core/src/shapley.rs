//! Classic Shapley values (subset form) and their per-order decomposition.

use crate::coalition::{full_mask, Coalition};
use crate::enumerate::{sum_fixed_size, sum_submasks, sums_by_size};
use crate::error::{domain, Error, Result};
use crate::game::{infallible, lookup, Game, Values};
use crate::kernels;
use crate::numeric::{binomial_f64, compensated_sum};

/// How a quantity was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyVector {
    pub values: Vec<f64>,
    pub game_id: String,
    pub mode: Mode,
}

impl ShapleyVector {
    pub fn total(&self) -> f64 {
        compensated_sum(self.values.iter().copied())
    }
}

/// `φ^(m)(i|N)` for `m = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderProfile {
    pub player: usize,
    pub values: Vec<f64>,
}

impl OrderProfile {
    pub fn mean(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) / self.values.len() as f64
    }
}

/// Relative agreement test used when two routes must produce the same value.
pub(crate) fn agree(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub(crate) const FORM_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_forms(
    quantity: impl FnOnce() -> String,
    first: f64,
    second: f64,
) -> Result<()> {
    if agree(first, second, FORM_TOLERANCE) {
        Ok(())
    } else {
        Err(Error::FormMismatch {
            quantity: quantity(),
            first,
            second,
        })
    }
}

fn universe_for(g: &Game, i: usize, restrict: Option<&Coalition>) -> Result<u64> {
    g.check_player(i)?;
    let universe = match restrict {
        Some(r) => {
            g.check_coalition(r)?;
            r.mask()
        }
        None => full_mask(g.n()),
    };
    if universe >> i & 1 == 0 {
        return Err(domain(format!("player {i} is outside the restriction")));
    }
    Ok(universe)
}

/// Weighted subset sum over `universe ∖ {i}`; players outside
/// `universe` never join.
pub(crate) fn shapley_on<V: Values + ?Sized>(v: &V, i: usize, universe: u64) -> f64 {
    let n = universe.count_ones() as usize;
    let context = universe & !(1 << i);
    let weights: Vec<f64> = (0..n)
        .map(|s| 1.0 / (n as f64 * binomial_f64(n - 1, s)))
        .collect();
    sum_submasks(context, |s| {
        let d = infallible(kernels::delta_i(&mut lookup(v), i, s));
        weights[s.count_ones() as usize] * d
    })
}

pub(crate) fn shapley_order_on<V: Values + ?Sized>(
    v: &V,
    i: usize,
    m: usize,
    universe: u64,
) -> f64 {
    let context = universe & !(1 << i);
    let k = context.count_ones() as usize;
    let total = sum_fixed_size(context, m, |s| {
        infallible(kernels::delta_i(&mut lookup(v), i, s))
    });
    total / binomial_f64(k, m)
}

pub(crate) fn profile_on<V: Values + ?Sized>(v: &V, i: usize, universe: u64) -> Vec<f64> {
    let context = universe & !(1 << i);
    let k = context.count_ones() as usize;
    sums_by_size(context, |s| {
        infallible(kernels::delta_i(&mut lookup(v), i, s))
    })
    .into_iter()
    .enumerate()
    .map(|(m, total)| total / binomial_f64(k, m))
    .collect()
}

/// Shapley value `φ(i|R)` of player `i` within `restrict` (default: all
/// players).
pub fn shapley_value(g: &Game, i: usize, restrict: Option<&Coalition>) -> Result<f64> {
    let universe = universe_for(g, i, restrict)?;
    let table = g.exact_table()?;
    Ok(shapley_on(&*table, i, universe))
}

/// Shapley values of every player.
pub fn shapley_vector(g: &Game) -> Result<ShapleyVector> {
    let table = g.exact_table()?;
    let full = full_mask(g.n());
    let values = crate::par::map_indexed(g.n(), |i| shapley_on(&*table, i, full));
    Ok(ShapleyVector {
        values,
        game_id: g.label().to_string(),
        mode: Mode::Exact,
    })
}

/// Multi-order Shapley value: mean marginal contribution of `i` over all
/// contexts of exactly `m` players.
pub fn shapley_order(g: &Game, i: usize, m: usize, restrict: Option<&Coalition>) -> Result<f64> {
    let universe = universe_for(g, i, restrict)?;
    let width = universe.count_ones() as usize;
    if m >= width {
        return Err(domain(format!("order {m} out of range 0..={}", width - 1)));
    }
    let table = g.exact_table()?;
    Ok(shapley_order_on(&*table, i, m, universe))
}

/// All orders `φ^(0..n)(i)`; the mean is re-checked against `φ(i)`.
pub fn shapley_profile(g: &Game, i: usize) -> Result<OrderProfile> {
    let universe = universe_for(g, i, None)?;
    let table = g.exact_table()?;
    let profile = OrderProfile {
        player: i,
        values: profile_on(&*table, i, universe),
    };
    let phi = shapley_on(&*table, i, universe);
    check_forms(
        || format!("order decomposition of player {i}"),
        profile.mean(),
        phi,
    )?;
    Ok(profile)
}
