//! Pairwise interactions `I(i,j)`, their order decomposition `I^(m)(i,j)`,
//! and the purified components `R_T(i,j)` / `J^(m)(i,j)`.

use std::sync::Arc;

use crate::coalition::{full_mask, Coalition, SubmaskIter};
use crate::enumerate::{sum_fixed_size, sum_submasks, sums_by_size};
use crate::error::{domain, Result};
use crate::game::{infallible, lookup, Game, ValueTable, Values};
use crate::kernels;
use crate::numeric::{binomial_f64, compensated_sum, CompensatedSum};
use crate::par;
use crate::shapley::{check_forms, profile_on, shapley_on, shapley_order_on};

/// A game in which the members of a coalition always join or leave
/// together, acting as one player `[S]`.
///
/// Masks stay in the base game's index space: the lowest member of `S`
/// stands for `[S]` and the other members never appear on their own.
#[derive(Debug, Clone)]
pub struct SingletonCoalitionGame {
    table: Arc<ValueTable>,
    members: u64,
    representative: usize,
    universe: u64,
}

impl SingletonCoalitionGame {
    pub fn new(g: &Game, members: &Coalition) -> Result<Self> {
        g.check_coalition(members)?;
        Self::within(g.exact_table()?, members.mask(), full_mask(g.n()))
    }

    /// Merges `members` inside the player set `universe`.
    pub(crate) fn within(table: Arc<ValueTable>, members: u64, universe: u64) -> Result<Self> {
        if members == 0 {
            return Err(domain("cannot merge an empty coalition"));
        }
        if members & !universe != 0 {
            return Err(domain("merged coalition leaves the player set"));
        }
        let representative = members.trailing_zeros() as usize;
        Ok(Self {
            table,
            members,
            representative,
            universe: universe & !members | 1 << representative,
        })
    }

    /// Index used for `[S]`.
    pub fn representative(&self) -> usize {
        self.representative
    }

    pub fn members(&self) -> Coalition {
        Coalition::from_raw(self.table.n(), self.members)
    }

    /// `N ∖ S ∪ {[S]}` expressed in base indices.
    pub fn players(&self) -> Coalition {
        Coalition::from_raw(self.table.n(), self.universe)
    }

    pub fn effective_players(&self) -> usize {
        self.universe.count_ones() as usize
    }

    pub fn value(&self, s: &Coalition) -> Result<f64> {
        if s.n() != self.table.n() || s.mask() & !self.universe != 0 {
            return Err(domain(format!(
                "coalition {s} is not over the merged player set"
            )));
        }
        Ok(Values::value(self, s.mask()))
    }

    /// `φ([S] | N ∖ S ∪ {[S]})`.
    pub fn shapley_value(&self) -> f64 {
        shapley_on(self, self.representative, self.universe)
    }

    pub fn shapley_order(&self, m: usize) -> Result<f64> {
        if m >= self.effective_players() {
            return Err(domain(format!(
                "order {m} out of range 0..={}",
                self.effective_players() - 1
            )));
        }
        Ok(shapley_order_on(
            self,
            self.representative,
            m,
            self.universe,
        ))
    }

    pub(crate) fn profile(&self) -> Vec<f64> {
        profile_on(self, self.representative, self.universe)
    }
}

impl Values for SingletonCoalitionGame {
    fn players(&self) -> usize {
        self.table.n()
    }

    fn value(&self, mask: u64) -> f64 {
        if mask >> self.representative & 1 == 1 {
            self.table.get(mask | self.members)
        } else {
            self.table.get(mask & !self.members)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// `I^(m)(i,j)`
    Raw,
    /// `J^(m)(i,j)`
    Purified,
}

impl std::fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpectrumKind::Raw => "raw",
            SpectrumKind::Purified => "purified",
        })
    }
}

/// Values indexed by order `m ∈ 0..=n−2` for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSpectrum {
    pub i: usize,
    pub j: usize,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
}

impl OrderSpectrum {
    pub fn mean(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) / self.values.len() as f64
    }
}

fn check_pair(g: &Game, i: usize, j: usize) -> Result<()> {
    g.check_player(i)?;
    g.check_player(j)?;
    if i == j {
        return Err(domain(format!(
            "interaction needs two distinct players, got ({i}, {j})"
        )));
    }
    Ok(())
}

fn check_order(g: &Game, m: usize) -> Result<()> {
    if m + 2 > g.n() {
        return Err(domain(format!("order {m} out of range 0..={}", g.n() - 2)));
    }
    Ok(())
}

/// Lexicographic upper-triangle pairs `(i, j)` with `i < j`.
pub fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

fn pair_context(i: usize, j: usize, universe: u64) -> u64 {
    universe & !(1 << i | 1 << j)
}

fn dij<V: Values + ?Sized>(v: &V, i: usize, j: usize, s: u64) -> f64 {
    infallible(kernels::delta_ij(&mut lookup(v), i, j, s))
}

fn rt<V: Values + ?Sized>(v: &V, i: usize, j: usize, t: u64) -> f64 {
    infallible(kernels::r_t(&mut lookup(v), i, j, t))
}

/// Closed form `Σ_T (n−t−2)! t!/(n−1)! · Δ_ij v(T)`.
pub(crate) fn interaction_closed_on<V: Values + ?Sized>(
    v: &V,
    i: usize,
    j: usize,
    universe: u64,
) -> f64 {
    let n = universe.count_ones() as usize;
    let weights: Vec<f64> = (0..n - 1)
        .map(|t| 1.0 / ((n - 1) as f64 * binomial_f64(n - 2, t)))
        .collect();
    sum_submasks(pair_context(i, j, universe), |t| {
        weights[t.count_ones() as usize] * dij(v, i, j, t)
    })
}

/// `φ([S_ij] | N_ij) − [φ(i | N∖{j}) + φ(j | N∖{i})]`.
pub(crate) fn interaction_phi_difference(
    table: &Arc<ValueTable>,
    i: usize,
    j: usize,
    universe: u64,
) -> Result<f64> {
    let merged = SingletonCoalitionGame::within(Arc::clone(table), 1 << i | 1 << j, universe)?;
    let alone_i = shapley_on(&**table, i, universe & !(1 << j));
    let alone_j = shapley_on(&**table, j, universe & !(1 << i));
    Ok(merged.shapley_value() - (alone_i + alone_j))
}

pub(crate) fn raw_spectrum_on<V: Values + ?Sized>(
    v: &V,
    i: usize,
    j: usize,
    universe: u64,
) -> Vec<f64> {
    let context = pair_context(i, j, universe);
    let k = context.count_ones() as usize;
    sums_by_size(context, |s| dij(v, i, j, s))
        .into_iter()
        .enumerate()
        .map(|(m, total)| total / binomial_f64(k, m))
        .collect()
}

pub(crate) fn interaction_order_on<V: Values + ?Sized>(
    v: &V,
    i: usize,
    j: usize,
    m: usize,
    universe: u64,
) -> f64 {
    let context = pair_context(i, j, universe);
    let k = context.count_ones() as usize;
    sum_fixed_size(context, m, |s| dij(v, i, j, s)) / binomial_f64(k, m)
}

/// `φ^(m)([S_ij] | N_ij) − [φ^(m)(i | N∖{j}) + φ^(m)(j | N∖{i})]` for all m.
pub(crate) fn raw_spectrum_phi_difference(
    table: &Arc<ValueTable>,
    i: usize,
    j: usize,
    universe: u64,
) -> Result<Vec<f64>> {
    let merged = SingletonCoalitionGame::within(Arc::clone(table), 1 << i | 1 << j, universe)?;
    let joint = merged.profile();
    let alone_i = profile_on(&**table, i, universe & !(1 << j));
    let alone_j = profile_on(&**table, j, universe & !(1 << i));
    Ok((0..joint.len())
        .map(|m| joint[m] - (alone_i[m] + alone_j[m]))
        .collect())
}

pub(crate) fn purified_order_on<V: Values + ?Sized>(
    v: &V,
    i: usize,
    j: usize,
    m: usize,
    universe: u64,
) -> f64 {
    let context = pair_context(i, j, universe);
    let k = context.count_ones() as usize;
    sum_fixed_size(context, m, |t| rt(v, i, j, t)) / binomial_f64(k, m)
}

/// Direct reconstruction `E_{|S|=m}[Σ_{T⊆S} R_T(i,j)]`.
pub(crate) fn order_from_components_on<V: Values + ?Sized>(
    v: &V,
    i: usize,
    j: usize,
    m: usize,
    universe: u64,
) -> f64 {
    let context = pair_context(i, j, universe);
    let k = context.count_ones() as usize;
    let total = sum_fixed_size(context, m, |s| {
        SubmaskIter::new(s)
            .map(|t| rt(v, i, j, t))
            .collect::<CompensatedSum>()
            .value()
    });
    total / binomial_f64(k, m)
}

/// Both routes to `I(i,j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionForms {
    pub closed: f64,
    pub phi_difference: f64,
}

pub fn interaction_forms(g: &Game, i: usize, j: usize) -> Result<InteractionForms> {
    check_pair(g, i, j)?;
    let table = g.exact_table()?;
    let full = full_mask(g.n());
    Ok(InteractionForms {
        closed: interaction_closed_on(&*table, i, j, full),
        phi_difference: interaction_phi_difference(&table, i, j, full)?,
    })
}

/// `I(i,j)`, computed by the closed form and cross-checked against the
/// merged-singleton Shapley difference.
pub fn interaction(g: &Game, i: usize, j: usize) -> Result<f64> {
    let forms = interaction_forms(g, i, j)?;
    check_forms(
        || format!("interaction ({i}, {j})"),
        forms.closed,
        forms.phi_difference,
    )?;
    Ok(forms.closed)
}

/// `I(i,j)` for every pair `i < j`.
pub fn interaction_all_pairs(g: &Game) -> Result<Vec<((usize, usize), f64)>> {
    g.exact_table()?;
    let pairs = upper_pairs(g.n());
    par::try_map_indexed(pairs.len(), |k| {
        let (i, j) = pairs[k];
        interaction(g, i, j).map(|x| ((i, j), x))
    })
}

/// `I^(m)(i,j)`: mean of `Δ_ij v(S)` over contexts of exactly `m` players.
pub fn interaction_order(g: &Game, i: usize, j: usize, m: usize) -> Result<f64> {
    check_pair(g, i, j)?;
    check_order(g, m)?;
    let table = g.exact_table()?;
    Ok(interaction_order_on(&*table, i, j, m, full_mask(g.n())))
}

/// The order-`m` Shapley difference form of `I^(m)(i,j)`.
pub fn interaction_order_phi_difference(g: &Game, i: usize, j: usize, m: usize) -> Result<f64> {
    check_pair(g, i, j)?;
    check_order(g, m)?;
    let table = g.exact_table()?;
    let full = full_mask(g.n());
    let merged = SingletonCoalitionGame::within(Arc::clone(&table), 1 << i | 1 << j, full)?;
    let joint = merged.shapley_order(m)?;
    let alone_i = shapley_order_on(&*table, i, m, full & !(1 << j));
    let alone_j = shapley_order_on(&*table, j, m, full & !(1 << i));
    Ok(joint - (alone_i + alone_j))
}

/// `R_T(i,j) = Σ_{T'⊆T} (−1)^{|T|−|T'|} Δ_ij v(T')`.
pub fn r_t(g: &Game, i: usize, j: usize, t: &Coalition) -> Result<f64> {
    check_pair(g, i, j)?;
    g.check_coalition(t)?;
    if t.contains(i) || t.contains(j) {
        return Err(domain(format!("context {t} contains player {i} or {j}")));
    }
    kernels::r_t(&mut |m| g.value_mask(m), i, j, t.mask())
}

/// `J^(m)(i,j)`: mean of `R_T(i,j)` over `|T| = m`.
pub fn purified_order(g: &Game, i: usize, j: usize, m: usize) -> Result<f64> {
    check_pair(g, i, j)?;
    check_order(g, m)?;
    let table = g.exact_table()?;
    Ok(purified_order_on(&*table, i, j, m, full_mask(g.n())))
}

/// `I^(m)(i,j)` rebuilt from the purified components.
pub fn interaction_order_from_components(g: &Game, i: usize, j: usize, m: usize) -> Result<f64> {
    check_pair(g, i, j)?;
    check_order(g, m)?;
    let table = g.exact_table()?;
    Ok(order_from_components_on(&*table, i, j, m, full_mask(g.n())))
}

/// Inverts `I^(m) = Σ_{p≤m} C(m,p)·J^(p)` order by order.
pub fn purified_from_raw(raw: &OrderSpectrum) -> Result<OrderSpectrum> {
    if raw.kind != SpectrumKind::Raw {
        return Err(domain("purified_from_raw expects a raw spectrum"));
    }
    if raw.values.is_empty() || raw.values.iter().any(|x| !x.is_finite()) {
        return Err(domain("raw spectrum is incomplete"));
    }
    let mut purified: Vec<f64> = Vec::with_capacity(raw.values.len());
    for (m, &im) in raw.values.iter().enumerate() {
        let mut acc = CompensatedSum::new();
        acc.add(im);
        for (p, jp) in purified.iter().enumerate() {
            acc.add(-binomial_f64(m, p) * jp);
        }
        purified.push(acc.value());
    }
    Ok(OrderSpectrum {
        i: raw.i,
        j: raw.j,
        values: purified,
        kind: SpectrumKind::Purified,
    })
}

/// `I^(m) = Σ_{p≤m} C(m,p)·J^(p)`.
pub fn raw_from_purified(purified: &OrderSpectrum) -> Result<OrderSpectrum> {
    if purified.kind != SpectrumKind::Purified {
        return Err(domain("raw_from_purified expects a purified spectrum"));
    }
    let values = (0..purified.values.len())
        .map(|m| compensated_sum((0..=m).map(|p| binomial_f64(m, p) * purified.values[p])))
        .collect();
    Ok(OrderSpectrum {
        i: purified.i,
        j: purified.j,
        values,
        kind: SpectrumKind::Raw,
    })
}

/// Every order at once. The purified kind goes through the raw spectrum and
/// the order recursion rather than summing `R_T` directly.
pub fn spectrum(g: &Game, i: usize, j: usize, kind: SpectrumKind) -> Result<OrderSpectrum> {
    check_pair(g, i, j)?;
    let table = g.exact_table()?;
    let full = full_mask(g.n());
    let raw = OrderSpectrum {
        i,
        j,
        values: raw_spectrum_on(&*table, i, j, full),
        kind: SpectrumKind::Raw,
    };
    check_forms(
        || format!("spectrum mean of ({i}, {j})"),
        raw.mean(),
        interaction_closed_on(&*table, i, j, full),
    )?;
    match kind {
        SpectrumKind::Raw => Ok(raw),
        SpectrumKind::Purified => purified_from_raw(&raw),
    }
}

pub fn spectra_all_pairs(g: &Game, kind: SpectrumKind) -> Result<Vec<OrderSpectrum>> {
    g.exact_table()?;
    let pairs = upper_pairs(g.n());
    par::try_map_indexed(pairs.len(), |k| spectrum(g, pairs[k].0, pairs[k].1, kind))
}
