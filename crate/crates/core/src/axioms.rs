//! Executable checks of every stated property of the indices, runnable
//! against any game small enough for exact enumeration.
//!
//! Dummy checks append a player `d` with `v'(S ∪ {d}) = v'(S) + κ` (κ = 1);
//! symmetry checks average the game with its copy under the swap of players
//! `0` and `n−1`. Linearity checks pair the game with a seeded random
//! partner of the same size.

use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coalition::{full_mask, Coalition, SubmaskIter};
use crate::error::{domain, Error, Result};
use crate::game::{Game, RandomGame, ValueTable};
use crate::numeric::compensated_sum;
use crate::pairwise::{
    interaction_closed_on, interaction_phi_difference, order_from_components_on, purified_from_raw,
    purified_order_on, raw_from_purified, raw_spectrum_on, raw_spectrum_phi_difference,
    upper_pairs, OrderSpectrum, SpectrumKind,
};
use crate::par;
use crate::setwise::{grabisch_on, recursive_on, significance_forms_on, taylor_on, taylor_sets};
use crate::shapley::{profile_on, shapley_on};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest game the suite accepts.
pub const SUITE_MAX_PLAYERS: usize = 12;

/// Above this size the Grabisch recursions are checked on `|S| ≤ 4` only
/// and coalition significance on `|S| ≤ 4`.
const EXHAUSTIVE_SET_PLAYERS: usize = 10;

const DUMMY_KAPPA: f64 = 1.0;
const SCALES: [f64; 2] = [-2.0, 0.5];
const TAYLOR_ORDERS: [usize; 3] = [1, 2, 3];
const SIGNIFICANCE_MAX_SET: usize = 5;

/// Every property, in report order.
pub const PROPERTIES: &[&str] = &[
    "shapley.linearity",
    "shapley.dummy",
    "shapley.symmetry",
    "shapley.efficiency",
    "shapley_order.linearity",
    "shapley_order.dummy",
    "shapley_order.symmetry",
    "shapley_order.decomposition",
    "interaction_order.linearity",
    "interaction_order.dummy",
    "interaction_order.symmetry",
    "interaction_order.marginal_contribution",
    "interaction_order.accumulation",
    "interaction_order.recursive",
    "interaction_order.efficiency",
    "interaction_order.mean_identity",
    "interaction.dual_form",
    "interaction_order.dual_form",
    "purified.reconstruction",
    "purified.round_trip",
    "grabisch.linearity",
    "grabisch.dummy",
    "grabisch.symmetry",
    "grabisch.recursive_merged",
    "grabisch.recursive_conditioned",
    "grabisch.pair_equivalence",
    "significance.dual_form",
    "taylor.linearity",
    "taylor.dummy",
    "taylor.symmetry",
    "taylor.efficiency",
    "taylor.interaction_distribution",
    "taylor.shapley_reduction",
];

#[derive(Debug, Clone)]
pub struct AxiomConfig {
    pub tolerance: f64,
    /// Seed of the random partner game and of the pattern-game selection.
    pub partner_seed: u64,
    /// Property-name prefixes to run; empty runs everything.
    pub scope: Vec<String>,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            partner_seed: 0,
            scope: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRecord {
    pub name: &'static str,
    /// Largest absolute deviation between the two sides of the property.
    pub deviation: f64,
    /// Where `deviation` occurred.
    pub instance: String,
    /// Number of comparisons made; 0 means the property is vacuous for this
    /// game size.
    pub checks: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub game: String,
    pub players: usize,
    pub tolerance: f64,
    pub records: Vec<PropertyRecord>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn record(&self, name: &str) -> Option<&PropertyRecord> {
        self.records.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Default)]
struct Tracker {
    deviation: f64,
    instance: String,
    checks: usize,
}

impl Tracker {
    fn compare(&mut self, left: f64, right: f64, instance: impl FnOnce() -> String) {
        let d = (left - right).abs();
        self.checks += 1;
        if self.checks == 1 || d > self.deviation || (d.is_nan() && !self.deviation.is_nan()) {
            self.deviation = d;
            self.instance = instance();
        }
    }

    fn zero(&mut self, value: f64, instance: impl FnOnce() -> String) {
        self.compare(value, 0.0, instance);
    }
}

/// Per-game pairwise and Shapley quantities.
struct Derived {
    phi: Vec<f64>,
    profiles: Vec<Vec<f64>>,
    /// `raw[i][j]` = `I^(m)(i,j)` for all m; empty on the diagonal.
    raw: Vec<Vec<Vec<f64>>>,
    closed: Vec<Vec<f64>>,
}

impl Derived {
    fn compute(t: &ValueTable) -> Self {
        let n = t.n();
        let full = full_mask(n);
        let phi = par::map_indexed(n, |i| shapley_on(t, i, full));
        let profiles = par::map_indexed(n, |i| profile_on(t, i, full));
        let pairs = upper_pairs(n);
        let upper = par::map_indexed(pairs.len(), |k| {
            let (i, j) = pairs[k];
            (
                raw_spectrum_on(t, i, j, full),
                interaction_closed_on(t, i, j, full),
            )
        });
        let mut raw = vec![vec![Vec::new(); n]; n];
        let mut closed = vec![vec![0.0; n]; n];
        for (&(i, j), (spec, c)) in pairs.iter().zip(upper) {
            raw[j][i] = spec.clone();
            raw[i][j] = spec;
            closed[i][j] = c;
            closed[j][i] = c;
        }
        Self {
            phi,
            profiles,
            raw,
            closed,
        }
    }
}

fn grabisch_all(t: &ValueTable) -> Vec<f64> {
    let n = t.n();
    let full = full_mask(n);
    let mut out = par::map_indexed(1 << n, |s| {
        if s == 0 {
            f64::NAN
        } else {
            grabisch_on(t, s as u64, full)
        }
    });
    out[0] = f64::NAN;
    out
}

/// `(k, sets, values)` for each Shapley-Taylor order up to `min(3, n)`.
type TaylorAll = Vec<(usize, Vec<u64>, Vec<f64>)>;

fn taylor_all(t: &ValueTable) -> TaylorAll {
    let n = t.n();
    TAYLOR_ORDERS
        .iter()
        .filter(|&&k| k <= n)
        .map(|&k| {
            let sets = taylor_sets(n, k);
            let values = par::map_indexed(sets.len(), |x| taylor_on(t, sets[x], k, n));
            (k, sets, values)
        })
        .collect()
}

struct Context {
    n: usize,
    table: Arc<ValueTable>,
    partner: Arc<ValueTable>,
    sum: Arc<ValueTable>,
    scaled: Vec<(f64, Arc<ValueTable>)>,
    dummy: Arc<ValueTable>,
    /// Symmetrized game and its swapped pair, when `n ≥ 2`.
    sym: Option<(Arc<ValueTable>, usize, usize)>,
    partner_seed: u64,

    base_d: OnceLock<Derived>,
    partner_d: OnceLock<Derived>,
    sum_d: OnceLock<Derived>,
    scaled_d: Vec<OnceLock<Derived>>,
    base_g: OnceLock<Vec<f64>>,
    partner_g: OnceLock<Vec<f64>>,
    sum_g: OnceLock<Vec<f64>>,
    scaled_g: Vec<OnceLock<Vec<f64>>>,
    base_t: OnceLock<TaylorAll>,
    partner_t: OnceLock<TaylorAll>,
    sum_t: OnceLock<TaylorAll>,
    scaled_t: Vec<OnceLock<TaylorAll>>,
}

fn set_name(n: usize, mask: u64) -> String {
    Coalition::from_raw(n, mask).to_mask_string()
}

impl Context {
    fn new(table: Arc<ValueTable>, partner_seed: u64) -> Result<Self> {
        let n = table.n();
        let partner_game = RandomGame::new(n, partner_seed)?;
        let partner = Arc::new(ValueTable::from_fn(n, |m| partner_game.value_of(m))?);
        let sum = Arc::new(table.add(&partner)?);
        let scaled = SCALES
            .iter()
            .map(|&c| (c, Arc::new(table.scale(c))))
            .collect();
        let dummy = Arc::new(table.with_dummy(DUMMY_KAPPA)?);
        let sym = if n >= 2 {
            Some((Arc::new(table.symmetrized(0, n - 1)?), 0, n - 1))
        } else {
            None
        };
        Ok(Self {
            n,
            table,
            partner,
            sum,
            scaled,
            dummy,
            sym,
            partner_seed,
            base_d: OnceLock::new(),
            partner_d: OnceLock::new(),
            sum_d: OnceLock::new(),
            scaled_d: SCALES.iter().map(|_| OnceLock::new()).collect(),
            base_g: OnceLock::new(),
            partner_g: OnceLock::new(),
            sum_g: OnceLock::new(),
            scaled_g: SCALES.iter().map(|_| OnceLock::new()).collect(),
            base_t: OnceLock::new(),
            partner_t: OnceLock::new(),
            sum_t: OnceLock::new(),
            scaled_t: SCALES.iter().map(|_| OnceLock::new()).collect(),
        })
    }

    fn full(&self) -> u64 {
        full_mask(self.n)
    }

    fn base(&self) -> &Derived {
        self.base_d.get_or_init(|| Derived::compute(&self.table))
    }
    fn partner(&self) -> &Derived {
        self.partner_d
            .get_or_init(|| Derived::compute(&self.partner))
    }
    fn summed(&self) -> &Derived {
        self.sum_d.get_or_init(|| Derived::compute(&self.sum))
    }
    fn scaled(&self, k: usize) -> &Derived {
        self.scaled_d[k].get_or_init(|| Derived::compute(&self.scaled[k].1))
    }

    fn grabisch_base(&self) -> &[f64] {
        self.base_g.get_or_init(|| grabisch_all(&self.table))
    }
    fn grabisch_partner(&self) -> &[f64] {
        self.partner_g.get_or_init(|| grabisch_all(&self.partner))
    }
    fn grabisch_sum(&self) -> &[f64] {
        self.sum_g.get_or_init(|| grabisch_all(&self.sum))
    }
    fn grabisch_scaled(&self, k: usize) -> &[f64] {
        self.scaled_g[k].get_or_init(|| grabisch_all(&self.scaled[k].1))
    }

    fn taylor_base(&self) -> &[(usize, Vec<u64>, Vec<f64>)] {
        self.base_t.get_or_init(|| taylor_all(&self.table))
    }
    fn taylor_partner(&self) -> &[(usize, Vec<u64>, Vec<f64>)] {
        self.partner_t.get_or_init(|| taylor_all(&self.partner))
    }
    fn taylor_sum(&self) -> &[(usize, Vec<u64>, Vec<f64>)] {
        self.sum_t.get_or_init(|| taylor_all(&self.sum))
    }
    fn taylor_scaled(&self, k: usize) -> &[(usize, Vec<u64>, Vec<f64>)] {
        self.scaled_t[k].get_or_init(|| taylor_all(&self.scaled[k].1))
    }

    fn grand_gain(&self) -> f64 {
        self.table.get(self.full()) - self.table.get(0)
    }

    /// Coalitions used by the Grabisch recursion checks.
    fn recursion_sets(&self) -> Vec<u64> {
        let limit = if self.n <= EXHAUSTIVE_SET_PLAYERS {
            self.n
        } else {
            4
        };
        SubmaskIter::new(self.full())
            .filter(|s| (2..=limit).contains(&(s.count_ones() as usize)))
            .collect()
    }

    fn significance_sets(&self) -> Vec<u64> {
        let limit = if self.n <= EXHAUSTIVE_SET_PLAYERS {
            SIGNIFICANCE_MAX_SET
        } else {
            4
        };
        SubmaskIter::new(self.full())
            .filter(|s| (2..=limit).contains(&(s.count_ones() as usize)))
            .collect()
    }
}

fn check(ctx: &Context, name: &str) -> Result<Tracker> {
    let n = ctx.n;
    let mut tr = Tracker::default();
    match name {
        "shapley.linearity" => {
            let (v, w, u) = (ctx.base(), ctx.partner(), ctx.summed());
            for i in 0..n {
                tr.compare(u.phi[i], v.phi[i] + w.phi[i], || format!("sum, player {i}"));
            }
            for (k, &(c, _)) in ctx.scaled.iter().enumerate() {
                let cv = ctx.scaled(k);
                for i in 0..n {
                    tr.compare(cv.phi[i], c * v.phi[i], || format!("scale {c}, player {i}"));
                }
            }
        }
        "shapley.dummy" => {
            let d = ctx.dummy.n() - 1;
            let phi = shapley_on(&*ctx.dummy, d, full_mask(d + 1));
            tr.compare(phi, DUMMY_KAPPA, || format!("dummy player {d}"));
        }
        "shapley.symmetry" => {
            if let Some((y, a, b)) = &ctx.sym {
                let full = ctx.full();
                tr.compare(
                    shapley_on(&**y, *a, full),
                    shapley_on(&**y, *b, full),
                    || format!("players {a}, {b}"),
                );
            }
        }
        "shapley.efficiency" => {
            let total = compensated_sum(ctx.base().phi.iter().copied());
            tr.compare(total, ctx.grand_gain(), || "sum over all players".into());
        }
        "shapley_order.linearity" => {
            let (v, w, u) = (ctx.base(), ctx.partner(), ctx.summed());
            for i in 0..n {
                for m in 0..n {
                    tr.compare(
                        u.profiles[i][m],
                        v.profiles[i][m] + w.profiles[i][m],
                        || format!("sum, player {i}, order {m}"),
                    );
                }
            }
            for (k, &(c, _)) in ctx.scaled.iter().enumerate() {
                let cv = ctx.scaled(k);
                for i in 0..n {
                    for m in 0..n {
                        tr.compare(cv.profiles[i][m], c * v.profiles[i][m], || {
                            format!("scale {c}, player {i}, order {m}")
                        });
                    }
                }
            }
        }
        "shapley_order.dummy" => {
            let d = ctx.dummy.n() - 1;
            for (m, x) in profile_on(&*ctx.dummy, d, full_mask(d + 1))
                .into_iter()
                .enumerate()
            {
                tr.compare(x, DUMMY_KAPPA, || format!("dummy player {d}, order {m}"));
            }
        }
        "shapley_order.symmetry" => {
            if let Some((y, a, b)) = &ctx.sym {
                let full = ctx.full();
                let pa = profile_on(&**y, *a, full);
                let pb = profile_on(&**y, *b, full);
                for m in 0..n {
                    tr.compare(pa[m], pb[m], || format!("players {a}, {b}, order {m}"));
                }
            }
        }
        "shapley_order.decomposition" => {
            let v = ctx.base();
            for i in 0..n {
                let mean = compensated_sum(v.profiles[i].iter().copied()) / n as f64;
                tr.compare(mean, v.phi[i], || format!("player {i}"));
            }
        }
        "interaction_order.linearity" => {
            let (v, w, u) = (ctx.base(), ctx.partner(), ctx.summed());
            for (i, j) in upper_pairs(n) {
                for m in 0..n - 1 {
                    tr.compare(u.raw[i][j][m], v.raw[i][j][m] + w.raw[i][j][m], || {
                        format!("sum, pair ({i}, {j}), order {m}")
                    });
                }
            }
            for (k, &(c, _)) in ctx.scaled.iter().enumerate() {
                let cv = ctx.scaled(k);
                for (i, j) in upper_pairs(n) {
                    for m in 0..n - 1 {
                        tr.compare(cv.raw[i][j][m], c * v.raw[i][j][m], || {
                            format!("scale {c}, pair ({i}, {j}), order {m}")
                        });
                    }
                }
            }
        }
        "interaction_order.dummy" => {
            let d = ctx.dummy.n() - 1;
            let full = full_mask(d + 1);
            for j in 0..d {
                for (m, x) in raw_spectrum_on(&*ctx.dummy, d, j, full)
                    .into_iter()
                    .enumerate()
                {
                    tr.zero(x, || format!("pair ({d}, {j}), order {m}"));
                }
            }
        }
        "interaction_order.symmetry" => {
            if let Some((y, a, b)) = &ctx.sym {
                let full = ctx.full();
                for k in (0..n).filter(|k| k != a && k != b) {
                    let sa = raw_spectrum_on(&**y, *a, k, full);
                    let sb = raw_spectrum_on(&**y, *b, k, full);
                    for m in 0..n - 1 {
                        tr.compare(sa[m], sb[m], || {
                            format!("players {a}, {b} against {k}, order {m}")
                        });
                    }
                }
            }
        }
        "interaction_order.marginal_contribution" => {
            if n >= 2 {
                let v = ctx.base();
                for i in 0..n {
                    for m in 0..n - 1 {
                        let expected =
                            compensated_sum((0..n).filter(|&j| j != i).map(|j| v.raw[i][j][m]))
                                / (n - 1) as f64;
                        tr.compare(v.profiles[i][m + 1] - v.profiles[i][m], expected, || {
                            format!("player {i}, order {m}")
                        });
                    }
                }
            }
        }
        "interaction_order.accumulation" => {
            if n >= 2 {
                let v = ctx.base();
                for i in 0..n {
                    for m in 0..n {
                        let acc = compensated_sum(
                            (0..n)
                                .filter(|&j| j != i)
                                .flat_map(|j| v.raw[i][j][..m].iter().copied()),
                        ) / (n - 1) as f64;
                        tr.compare(v.profiles[i][m], acc + v.profiles[i][0], || {
                            format!("player {i}, order {m}")
                        });
                    }
                }
            }
        }
        "interaction_order.recursive" => {
            let v = ctx.base();
            for i in 0..n {
                let total = compensated_sum((0..n).filter(|&j| j != i).map(|j| v.closed[i][j]));
                tr.compare(v.profiles[i][n - 1] - v.profiles[i][0], total, || {
                    format!("player {i}")
                });
            }
        }
        "interaction_order.efficiency" => {
            let v = ctx.base();
            let mut terms: Vec<f64> = (0..n).map(|i| v.profiles[i][0]).collect();
            if n >= 2 {
                let denom = (n * (n - 1)) as f64;
                for i in 0..n {
                    for j in (0..n).filter(|&j| j != i) {
                        for k in 0..n - 1 {
                            terms.push((n - 1 - k) as f64 / denom * v.raw[i][j][k]);
                        }
                    }
                }
            }
            tr.compare(compensated_sum(terms), ctx.grand_gain(), || {
                "whole game".into()
            });
        }
        "interaction_order.mean_identity" => {
            let v = ctx.base();
            for (i, j) in upper_pairs(n) {
                let mean = compensated_sum(v.raw[i][j].iter().copied()) / (n - 1) as f64;
                tr.compare(mean, v.closed[i][j], || format!("pair ({i}, {j})"));
            }
        }
        "interaction.dual_form" => {
            let v = ctx.base();
            for (i, j) in upper_pairs(n) {
                let diff = interaction_phi_difference(&ctx.table, i, j, ctx.full())?;
                tr.compare(v.closed[i][j], diff, || format!("pair ({i}, {j})"));
            }
        }
        "interaction_order.dual_form" => {
            let v = ctx.base();
            for (i, j) in upper_pairs(n) {
                let diff = raw_spectrum_phi_difference(&ctx.table, i, j, ctx.full())?;
                for (m, (x, y)) in v.raw[i][j].iter().zip(&diff).enumerate() {
                    tr.compare(*x, *y, || format!("pair ({i}, {j}), order {m}"));
                }
            }
        }
        "purified.reconstruction" => {
            let v = ctx.base();
            let pairs = upper_pairs(n);
            let full = ctx.full();
            let rebuilt = par::map_indexed(pairs.len(), |k| {
                let (i, j) = pairs[k];
                (0..n - 1)
                    .map(|m| order_from_components_on(&*ctx.table, i, j, m, full))
                    .collect::<Vec<_>>()
            });
            for (&(i, j), r) in pairs.iter().zip(&rebuilt) {
                for (m, (x, y)) in r.iter().zip(&v.raw[i][j]).enumerate() {
                    tr.compare(*x, *y, || format!("pair ({i}, {j}), order {m}"));
                }
            }
        }
        "purified.round_trip" => {
            let v = ctx.base();
            let full = ctx.full();
            for (i, j) in upper_pairs(n) {
                let raw = OrderSpectrum {
                    i,
                    j,
                    values: v.raw[i][j].clone(),
                    kind: SpectrumKind::Raw,
                };
                let purified = purified_from_raw(&raw)?;
                for m in 0..n - 1 {
                    let direct = purified_order_on(&*ctx.table, i, j, m, full);
                    tr.compare(purified.values[m], direct, || {
                        format!("pair ({i}, {j}), order {m}, recursion vs direct")
                    });
                }
                let back = raw_from_purified(&purified)?;
                for m in 0..n - 1 {
                    tr.compare(back.values[m], raw.values[m], || {
                        format!("pair ({i}, {j}), order {m}, re-expansion")
                    });
                }
            }
        }
        "grabisch.linearity" => {
            let (v, w, u) = (
                ctx.grabisch_base(),
                ctx.grabisch_partner(),
                ctx.grabisch_sum(),
            );
            for s in 1..v.len() {
                tr.compare(u[s], v[s] + w[s], || {
                    format!("sum, S = {}", set_name(n, s as u64))
                });
            }
            for (k, &(c, _)) in ctx.scaled.iter().enumerate() {
                let cv = ctx.grabisch_scaled(k);
                for s in 1..v.len() {
                    tr.compare(cv[s], c * v[s], || {
                        format!("scale {c}, S = {}", set_name(n, s as u64))
                    });
                }
            }
        }
        "grabisch.dummy" => {
            let nd = ctx.dummy.n();
            let d = 1u64 << (nd - 1);
            let full = full_mask(nd);
            let sets: Vec<u64> = SubmaskIter::new(full & !d).filter(|&s| s != 0).collect();
            let values =
                par::map_indexed(sets.len(), |k| grabisch_on(&*ctx.dummy, sets[k] | d, full));
            for (s, x) in sets.iter().zip(values) {
                tr.zero(x, || format!("S = {}", set_name(nd, s | d)));
            }
        }
        "grabisch.symmetry" => {
            if let Some((y, a, b)) = &ctx.sym {
                let full = ctx.full();
                let rest = full & !(1 << a | 1 << b);
                let sets: Vec<u64> = SubmaskIter::new(rest).collect();
                let values = par::map_indexed(sets.len(), |k| {
                    (
                        grabisch_on(&**y, sets[k] | 1 << a, full),
                        grabisch_on(&**y, sets[k] | 1 << b, full),
                    )
                });
                for (s, (xa, xb)) in sets.iter().zip(values) {
                    tr.compare(xa, xb, || {
                        format!("S = {} with {a} vs {b}", set_name(n, *s))
                    });
                }
            }
        }
        "grabisch.recursive_merged" | "grabisch.recursive_conditioned" => {
            let merged = name == "grabisch.recursive_merged";
            let sets = ctx.recursion_sets();
            let devs = par::try_map_indexed(sets.len(), |k| {
                recursive_on(&ctx.table, sets[k], ctx.full())
            })?;
            for (s, dev) in sets.iter().zip(devs) {
                if merged {
                    tr.zero(dev.merged, || format!("S = {}", set_name(n, *s)));
                } else {
                    tr.zero(dev.conditioned, || {
                        format!("S = {}, member {}", set_name(n, *s), dev.worst_member)
                    });
                }
            }
        }
        "grabisch.pair_equivalence" => {
            let g = ctx.grabisch_base();
            let v = ctx.base();
            for (i, j) in upper_pairs(n) {
                tr.compare(g[(1usize << i) | (1 << j)], v.closed[i][j], || {
                    format!("pair ({i}, {j})")
                });
            }
        }
        "significance.dual_form" => {
            let sets = ctx.significance_sets();
            let forms = par::try_map_indexed(sets.len(), |k| {
                significance_forms_on(&ctx.table, sets[k], ctx.full())
            })?;
            for (s, f) in sets.iter().zip(forms) {
                tr.compare(f.phi_difference, f.index_sum, || {
                    format!("S = {}", set_name(n, *s))
                });
                // B′ ≥ |B| always; any excess counts as deviation
                tr.zero((f.index_sum.abs() - f.abs_index_sum).max(0.0), || {
                    format!("S = {}, |B| exceeds B'", set_name(n, *s))
                });
            }
        }
        "taylor.linearity" => {
            let (v, w, u) = (ctx.taylor_base(), ctx.taylor_partner(), ctx.taylor_sum());
            for ((k, sets, xv), ((_, _, xw), (_, _, xu))) in v.iter().zip(w.iter().zip(u)) {
                for idx in 0..sets.len() {
                    tr.compare(xu[idx], xv[idx] + xw[idx], || {
                        format!("sum, k = {k}, S = {}", set_name(n, sets[idx]))
                    });
                }
            }
            for (sk, &(c, _)) in ctx.scaled.iter().enumerate() {
                for ((k, sets, xv), (_, _, xc)) in v.iter().zip(ctx.taylor_scaled(sk)) {
                    for idx in 0..sets.len() {
                        tr.compare(xc[idx], c * xv[idx], || {
                            format!("scale {c}, k = {k}, S = {}", set_name(n, sets[idx]))
                        });
                    }
                }
            }
        }
        "taylor.dummy" => {
            let nd = ctx.dummy.n();
            let d = 1u64 << (nd - 1);
            for k in TAYLOR_ORDERS.iter().copied().filter(|&k| k <= nd) {
                for s in taylor_sets(nd, k).into_iter().filter(|s| s & d != 0) {
                    let x = taylor_on(&*ctx.dummy, s, k, nd);
                    if s == d {
                        tr.compare(x, DUMMY_KAPPA, || format!("k = {k}, dummy singleton"));
                    } else {
                        tr.zero(x, || format!("k = {k}, S = {}", set_name(nd, s)));
                    }
                }
            }
        }
        "taylor.symmetry" => {
            if let Some((y, a, b)) = &ctx.sym {
                for k in TAYLOR_ORDERS.iter().copied().filter(|&k| k <= n) {
                    tr.compare(
                        taylor_on(&**y, 1 << a, k, n),
                        taylor_on(&**y, 1 << b, k, n),
                        || format!("k = {k}, players {a}, {b}"),
                    );
                }
            }
        }
        "taylor.efficiency" => {
            for (k, _, values) in ctx.taylor_base() {
                tr.compare(
                    compensated_sum(values.iter().copied()),
                    ctx.grand_gain(),
                    || format!("k = {k}"),
                );
            }
        }
        "taylor.interaction_distribution" => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.partner_seed);
            for size in [2usize, 3].into_iter().filter(|&s| s <= n) {
                let pattern = crate::sampling::sample_mask(ctx.full(), size, &mut rng);
                for c in [1.0, -2.0] {
                    let game = ValueTable::from_fn(n, |m| if pattern & !m == 0 { c } else { 0.0 })?;
                    for k in TAYLOR_ORDERS.iter().copied().filter(|&k| k <= n) {
                        for s in SubmaskIter::new(pattern)
                            .filter(|&s| s != 0 && s != pattern && (s.count_ones() as usize) < k)
                        {
                            tr.zero(taylor_on(&game, s, k, n), || {
                                format!(
                                    "T = {}, c = {c}, k = {k}, S = {}",
                                    set_name(n, pattern),
                                    set_name(n, s)
                                )
                            });
                        }
                    }
                }
            }
        }
        "taylor.shapley_reduction" => {
            let v = ctx.base();
            for i in 0..n {
                tr.compare(taylor_on(&*ctx.table, 1 << i, 1, n), v.phi[i], || {
                    format!("player {i}")
                });
            }
        }
        other => return Err(domain(format!("unknown property {other:?}"))),
    }
    Ok(tr)
}

fn selected(scope: &[String]) -> Result<Vec<&'static str>> {
    if scope.is_empty() {
        return Ok(PROPERTIES.to_vec());
    }
    for prefix in scope {
        if !PROPERTIES.iter().any(|p| p.starts_with(prefix.as_str())) {
            return Err(domain(format!("no property matches {prefix:?}")));
        }
    }
    Ok(PROPERTIES
        .iter()
        .copied()
        .filter(|p| scope.iter().any(|prefix| p.starts_with(prefix.as_str())))
        .collect())
}

/// Runs the selected properties against `g`. Refuses games that cannot be
/// enumerated exactly.
pub fn run_axioms(g: &Game, config: &AxiomConfig) -> Result<AxiomReport> {
    let names = selected(&config.scope)?;
    if g.n() > SUITE_MAX_PLAYERS {
        return Err(domain(format!(
            "the axiom suite needs exact enumeration and accepts at most {SUITE_MAX_PLAYERS} \
             players (got {}); every property requires exact mode: {}",
            g.n(),
            names.join(", ")
        )));
    }
    let table = g.exact_table().map_err(|e| match e {
        Error::ExactCap { players, cap } => domain(format!(
            "{players} players exceeds the exact cap {cap}; every property requires exact mode"
        )),
        other => other,
    })?;
    run_on_table(table, g.label(), config, &names)
}

fn run_on_table(
    table: Arc<ValueTable>,
    label: &str,
    config: &AxiomConfig,
    names: &[&'static str],
) -> Result<AxiomReport> {
    let ctx = Context::new(table, config.partner_seed)?;
    let trackers = par::try_map_indexed(names.len(), |k| check(&ctx, names[k]))?;
    let records = names
        .iter()
        .zip(trackers)
        .map(|(&name, tr)| PropertyRecord {
            name,
            pass: tr.deviation <= config.tolerance,
            deviation: tr.deviation,
            instance: tr.instance,
            checks: tr.checks,
        })
        .collect();
    Ok(AxiomReport {
        game: label.to_string(),
        players: ctx.n,
        tolerance: config.tolerance,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build_game;

    fn run(spec: &str) -> AxiomReport {
        let g = build_game(&spec.parse().unwrap()).unwrap();
        run_axioms(&g, &AxiomConfig::default()).unwrap()
    }

    #[test]
    fn every_property_reported_once() {
        let r = run("majority:3,2");
        let names: Vec<&str> = r.records.iter().map(|x| x.name).collect();
        assert_eq!(names, PROPERTIES);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn additive_all_zero_deviation() {
        let r = run("additive:2,3,5,7,11");
        for rec in &r.records {
            assert!(rec.pass, "{rec:?}");
        }
    }

    #[test]
    fn random_seven_passes() {
        let r = run("random:7,42");
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn scope_filters_and_rejects_unknown() {
        let g = build_game(&"majority:4,2".parse().unwrap()).unwrap();
        let config = AxiomConfig {
            scope: vec!["taylor.".into()],
            ..AxiomConfig::default()
        };
        let r = run_axioms(&g, &config).unwrap();
        assert_eq!(r.records.len(), 6);
        let bad = AxiomConfig {
            scope: vec!["nope".into()],
            ..AxiomConfig::default()
        };
        assert!(run_axioms(&g, &bad).is_err());
    }

    #[test]
    fn refuses_large_games() {
        let g = build_game(&"random:13,1".parse().unwrap()).unwrap();
        let err = run_axioms(&g, &AxiomConfig::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("shapley.efficiency"), "{err}");
    }

    #[test]
    fn single_player_is_vacuous_where_needed() {
        let r = run("additive:4");
        assert!(r.passed());
        assert_eq!(r.record("interaction.dual_form").unwrap().checks, 0);
        assert!(r.record("shapley.efficiency").unwrap().checks > 0);
    }
}
