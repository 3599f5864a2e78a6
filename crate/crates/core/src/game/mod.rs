//! Value-function oracles and the memoizing [`Game`] wrapper.

mod exec;
mod spec;
mod synthetic;
mod table_file;

use std::convert::Infallible;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use dashmap::mapref::entry::Entry;
use dashmap::DashMap;

use crate::coalition::{full_mask, Coalition, MAX_PLAYERS};
use crate::error::{config, domain, Error, Result};
use crate::kernels;
use crate::par;

pub use exec::ExecOracle;
pub use spec::{build_game, GameSpec};
pub use synthetic::{Additive, Majority, Pattern, RandomGame};
pub use table_file::{parse_table, read_table, write_table};

/// Default refusal threshold for exact enumeration (2^20 evaluations).
pub const DEFAULT_EXACT_CAP: usize = 20;

/// Hard ceiling for dense tables regardless of overrides.
pub const MAX_TABLE_PLAYERS: usize = 30;

const EVAL_CHUNK: usize = 4096;

/// A black-box value function `v: 2^N → ℝ` over masks of `players()` bits.
pub trait Oracle: Send + Sync {
    fn players(&self) -> usize;

    fn evaluate(&self, mask: u64) -> Result<f64>;

    fn evaluate_batch(&self, masks: &[u64]) -> Result<Vec<f64>> {
        masks.iter().map(|&m| self.evaluate(m)).collect()
    }

    /// Whether callers may profitably issue `evaluate` from many threads.
    fn concurrent(&self) -> bool {
        true
    }
}

/// Infallible dense lookup used by the exact enumerators.
pub trait Values: Sync {
    fn players(&self) -> usize;
    fn value(&self, mask: u64) -> f64;
}

pub(crate) fn lookup<V: Values + ?Sized>(
    v: &V,
) -> impl FnMut(u64) -> std::result::Result<f64, Infallible> + '_ {
    move |m| Ok(v.value(m))
}

pub(crate) fn infallible<T>(r: std::result::Result<T, Infallible>) -> T {
    match r {
        Ok(x) => x,
        Err(never) => match never {},
    }
}

/// Every coalition value of an `n`-player game, indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    n: usize,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_PLAYERS {
            return Err(config(format!(
                "dense tables support 1..={MAX_TABLE_PLAYERS} players, got {n}"
            )));
        }
        if values.len() != 1 << n {
            return Err(config(format!(
                "a {n}-player table needs {} values, got {}",
                1u64 << n,
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(u64) -> f64 + Sync + Send,
    {
        if n == 0 || n > MAX_TABLE_PLAYERS {
            return Err(config(format!(
                "dense tables support 1..={MAX_TABLE_PLAYERS} players, got {n}"
            )));
        }
        let total = 1usize << n;
        let chunks = total.div_ceil(EVAL_CHUNK);
        let parts = par::map_indexed(chunks, |c| {
            let lo = c * EVAL_CHUNK;
            let hi = (lo + EVAL_CHUNK).min(total);
            (lo..hi).map(|m| f(m as u64)).collect::<Vec<_>>()
        });
        Ok(Self {
            n,
            values: parts.concat(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    /// Pointwise sum `u(S) = v(S) + w(S)`.
    pub fn add(&self, other: &ValueTable) -> Result<ValueTable> {
        if self.n != other.n {
            return Err(domain(format!(
                "cannot add games of {} and {} players",
                self.n, other.n
            )));
        }
        Ok(ValueTable {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> ValueTable {
        ValueTable {
            n: self.n,
            values: self.values.iter().map(|x| c * x).collect(),
        }
    }

    /// Appends player `n` with `v'(S ∪ {n}) = v(S) + kappa`.
    pub fn with_dummy(&self, kappa: f64) -> Result<ValueTable> {
        let mut values = self.values.clone();
        values.extend(self.values.iter().map(|x| x + kappa));
        ValueTable::new(self.n + 1, values)
    }

    /// Average of the game and its copy with players `a` and `b` swapped.
    pub fn symmetrized(&self, a: usize, b: usize) -> Result<ValueTable> {
        if a >= self.n || b >= self.n || a == b {
            return Err(domain(format!("invalid symmetrization pair ({a}, {b})")));
        }
        let swap = |m: u64| {
            let (ba, bb) = (m >> a & 1, m >> b & 1);
            if ba == bb {
                m
            } else {
                m ^ (1 << a | 1 << b)
            }
        };
        let values = (0..self.values.len() as u64)
            .map(|m| (self.get(m) + self.get(swap(m))) / 2.0)
            .collect();
        ValueTable::new(self.n, values)
    }

    /// Copy with `v(mask)` shifted by `delta`.
    pub fn perturbed(&self, mask: u64, delta: f64) -> ValueTable {
        let mut out = self.clone();
        out.values[mask as usize] += delta;
        out
    }
}

impl Values for ValueTable {
    fn players(&self) -> usize {
        self.n
    }

    fn value(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }
}

impl Oracle for ValueTable {
    fn players(&self) -> usize {
        self.n
    }

    fn evaluate(&self, mask: u64) -> Result<f64> {
        self.values
            .get(mask as usize)
            .copied()
            .ok_or_else(|| domain(format!("mask {mask:#x} outside the table")))
    }
}

/// A memoized value oracle with an evaluation meter.
///
/// Each distinct coalition is requested from the oracle at most once per
/// concurrent burst and counted once. Exact computations materialize the
/// whole lattice through [`Game::exact_table`].
pub struct Game {
    n: usize,
    label: String,
    oracle: Box<dyn Oracle>,
    memo: DashMap<u64, f64>,
    dense: OnceLock<Arc<ValueTable>>,
    dense_lock: Mutex<()>,
    evaluations: AtomicU64,
    exact_cap: usize,
}

impl std::fmt::Debug for Game {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Game")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("evaluations", &self.eval_count())
            .field("exact_cap", &self.exact_cap)
            .finish()
    }
}

impl Game {
    pub fn new(oracle: impl Oracle + 'static, label: impl Into<String>) -> Result<Self> {
        let n = oracle.players();
        if n == 0 || n > MAX_PLAYERS {
            return Err(config(format!(
                "player count must be in 1..={MAX_PLAYERS}, got {n}"
            )));
        }
        Ok(Self {
            n,
            label: label.into(),
            oracle: Box::new(oracle),
            memo: DashMap::new(),
            dense: OnceLock::new(),
            dense_lock: Mutex::new(()),
            evaluations: AtomicU64::new(0),
            exact_cap: DEFAULT_EXACT_CAP,
        })
    }

    pub fn from_table(table: ValueTable, label: impl Into<String>) -> Self {
        Self::new(table, label).expect("value tables are always within player bounds")
    }

    /// Overrides the exact-mode refusal threshold (still bounded by
    /// [`MAX_TABLE_PLAYERS`]).
    pub fn with_exact_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap.min(MAX_TABLE_PLAYERS);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn exact_cap(&self) -> usize {
        self.exact_cap
    }

    /// Number of distinct coalitions requested from the oracle so far.
    pub fn eval_count(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn full(&self) -> Coalition {
        Coalition::from_raw(self.n, full_mask(self.n))
    }

    pub fn empty(&self) -> Coalition {
        Coalition::from_raw(self.n, 0)
    }

    pub fn coalition(&self, players: &[usize]) -> Result<Coalition> {
        Coalition::from_players(self.n, players)
    }

    pub(crate) fn check_coalition(&self, s: &Coalition) -> Result<()> {
        if s.n() != self.n {
            return Err(domain(format!(
                "coalition over {} players used with a {}-player game",
                s.n(),
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn check_player(&self, p: usize) -> Result<()> {
        if p >= self.n {
            return Err(domain(format!(
                "player {p} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// `v(S)`.
    pub fn evaluate(&self, s: &Coalition) -> Result<f64> {
        self.check_coalition(s)?;
        self.value_mask(s.mask())
    }

    pub fn value_mask(&self, mask: u64) -> Result<f64> {
        if let Some(t) = self.dense.get() {
            return Ok(t.get(mask));
        }
        if let Some(x) = self.memo.get(&mask) {
            return Ok(*x);
        }
        let x = self.oracle.evaluate(mask)?;
        Ok(self.remember(mask, x))
    }

    fn remember(&self, mask: u64, x: f64) -> f64 {
        match self.memo.entry(mask) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                e.insert(x);
                self.evaluations.fetch_add(1, Ordering::Relaxed);
                x
            }
        }
    }

    /// Evaluates many coalitions, batching the cache misses into oracle calls.
    pub fn evaluate_many(&self, masks: &[u64]) -> Result<Vec<f64>> {
        if let Some(t) = self.dense.get() {
            return Ok(masks.iter().map(|&m| t.get(m)).collect());
        }
        let mut misses: Vec<u64> = masks
            .iter()
            .copied()
            .filter(|m| !self.memo.contains_key(m))
            .collect();
        misses.sort_unstable();
        misses.dedup();
        self.fill(&misses)?;
        masks.iter().map(|&m| self.value_mask(m)).collect()
    }

    fn fill(&self, misses: &[u64]) -> Result<()> {
        if misses.is_empty() {
            return Ok(());
        }
        if self.oracle.concurrent() {
            let chunks = misses.len().div_ceil(EVAL_CHUNK);
            par::try_map_indexed(chunks, |c| {
                let part = &misses[c * EVAL_CHUNK..((c + 1) * EVAL_CHUNK).min(misses.len())];
                let values = self.oracle.evaluate_batch(part)?;
                for (&m, x) in part.iter().zip(values) {
                    self.remember(m, x);
                }
                Ok::<(), Error>(())
            })?;
        } else {
            let values = self.oracle.evaluate_batch(misses)?;
            for (&m, x) in misses.iter().zip(values) {
                self.remember(m, x);
            }
        }
        Ok(())
    }

    /// The complete value table, built once and shared. Refuses games above
    /// the exact-mode cap.
    pub fn exact_table(&self) -> Result<Arc<ValueTable>> {
        if self.n > self.exact_cap {
            return Err(Error::ExactCap {
                players: self.n,
                cap: self.exact_cap,
            });
        }
        if let Some(t) = self.dense.get() {
            return Ok(Arc::clone(t));
        }
        let _guard = self.dense_lock.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(t) = self.dense.get() {
            return Ok(Arc::clone(t));
        }
        let all = 1u64 << self.n;
        let misses: Vec<u64> = (0..all).filter(|m| !self.memo.contains_key(m)).collect();
        self.fill(&misses)?;
        let values = (0..all)
            .map(|m| *self.memo.get(&m).expect("filled above"))
            .collect();
        let table = Arc::new(ValueTable::new(self.n, values)?);
        self.memo.clear();
        let _ = self.dense.set(Arc::clone(&table));
        Ok(table)
    }
}

/// `v(S ∪ {i}) − v(S)`.
pub fn delta_i(g: &Game, i: usize, s: &Coalition) -> Result<f64> {
    g.check_coalition(s)?;
    g.check_player(i)?;
    if s.contains(i) {
        return Err(domain(format!("player {i} already in the context {s}")));
    }
    kernels::delta_i(&mut |m| g.value_mask(m), i, s.mask())
}

/// `v(S ∪ {i,j}) − v(S ∪ {i}) − v(S ∪ {j}) + v(S)`.
pub fn delta_ij(g: &Game, i: usize, j: usize, s: &Coalition) -> Result<f64> {
    g.check_coalition(s)?;
    g.check_player(i)?;
    g.check_player(j)?;
    if i == j || s.contains(i) || s.contains(j) {
        return Err(domain(format!(
            "delta_ij needs distinct players outside the context, got ({i}, {j}) with {s}"
        )));
    }
    kernels::delta_ij(&mut |m| g.value_mask(m), i, j, s.mask())
}

/// `Δ_S v(T) = Σ_{L ⊆ S} (−1)^{|S|−|L|} v(L ∪ T)`.
pub fn delta_set(g: &Game, s: &Coalition, t: &Coalition) -> Result<f64> {
    g.check_coalition(s)?;
    g.check_coalition(t)?;
    if s.is_empty() {
        return Err(domain("delta_set needs a nonempty set"));
    }
    if !s.is_disjoint(t) {
        return Err(domain(format!("sets {s} and {t} overlap")));
    }
    kernels::delta_set(&mut |m| g.value_mask(m), s.mask(), t.mask())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn majority3() -> Game {
        build_game(&"majority:3,2".parse().unwrap()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let add = build_game(&"additive:2,3,5".parse().unwrap()).unwrap();
        assert_eq!(add.evaluate(&add.coalition(&[0, 2]).unwrap()).unwrap(), 7.0);
        let maj = majority3();
        assert_eq!(maj.evaluate(&maj.coalition(&[1]).unwrap()).unwrap(), 0.0);
        let pat = build_game(&"pattern:3,110,1".parse().unwrap()).unwrap();
        assert_eq!(pat.evaluate(&pat.full()).unwrap(), 1.0);
    }

    #[test]
    fn memo_counts_misses_only() {
        let g = majority3();
        let s = g.coalition(&[0, 1]).unwrap();
        g.evaluate(&s).unwrap();
        g.evaluate(&s).unwrap();
        assert_eq!(g.eval_count(), 1);
        g.exact_table().unwrap();
        assert_eq!(g.eval_count(), 8);
        g.exact_table().unwrap();
        assert_eq!(g.eval_count(), 8);
    }

    #[test]
    fn delta_examples() {
        let add = build_game(&"additive:2,3,5".parse().unwrap()).unwrap();
        assert_eq!(delta_i(&add, 1, &add.empty()).unwrap(), 3.0);
        let maj = majority3();
        assert_eq!(
            delta_i(&maj, 0, &maj.coalition(&[1]).unwrap()).unwrap(),
            1.0
        );
        assert_eq!(
            delta_i(&maj, 0, &maj.coalition(&[1, 2]).unwrap()).unwrap(),
            0.0
        );
        assert_eq!(delta_ij(&maj, 0, 1, &maj.empty()).unwrap(), 1.0);
        assert_eq!(
            delta_ij(&maj, 0, 1, &maj.coalition(&[2]).unwrap()).unwrap(),
            -1.0
        );
        assert_eq!(delta_set(&maj, &maj.full(), &maj.empty()).unwrap(), -2.0);
        for s in [0u64, 4] {
            let ctx = Coalition::new(3, s).unwrap();
            assert_eq!(delta_ij(&add, 0, 1, &ctx).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_domain_errors() {
        let maj = majority3();
        let s = maj.coalition(&[0]).unwrap();
        assert!(matches!(delta_i(&maj, 0, &s), Err(Error::Domain(_))));
        assert!(matches!(
            delta_ij(&maj, 1, 1, &maj.empty()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(delta_ij(&maj, 0, 1, &s), Err(Error::Domain(_))));
        assert!(matches!(delta_set(&maj, &s, &s), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_cap_refusal_and_override() {
        let g = build_game(&"random:21,1".parse().unwrap()).unwrap();
        assert!(matches!(
            g.exact_table(),
            Err(Error::ExactCap {
                players: 21,
                cap: 20
            })
        ));
        let g = build_game(&"random:3,1".parse().unwrap())
            .unwrap()
            .with_exact_cap(2);
        assert!(g.exact_table().is_err());
    }

    #[test]
    fn table_transforms() {
        let t = ValueTable::new(2, vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        let d = t.with_dummy(1.5).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.get(0b101), 2.5);
        let s = t.symmetrized(0, 1).unwrap();
        assert_eq!(s.get(0b01), s.get(0b10));
        assert_eq!(t.add(&t).unwrap().get(3), 8.0);
        assert_eq!(t.scale(-2.0).get(2), -4.0);
        assert_eq!(t.perturbed(1, 0.5).get(1), 1.5);
    }
}
