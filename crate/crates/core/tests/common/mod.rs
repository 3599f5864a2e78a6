//! Brute-force reference implementations. They enumerate permutations and
//! player lists directly and use factorial weights, sharing no code with
//! the library's submask and binomial machinery.

#![allow(dead_code)]

use itertools::Itertools;
use shapint::{build_game, Game};

pub fn game(spec: &str) -> Game {
    build_game(&spec.parse().unwrap()).unwrap()
}

pub fn fact(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Brute-force view of a game as a function on player lists.
pub struct Brute {
    pub n: usize,
    values: Vec<f64>,
}

impl Brute {
    pub fn new(g: &Game) -> Self {
        let table = g.exact_table().unwrap();
        Self {
            n: g.n(),
            values: table.values().to_vec(),
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let values = (0..1usize << n)
            .map(|mask| {
                let members: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
                f(&members)
            })
            .collect();
        Self { n, values }
    }

    pub fn v(&self, players: &[usize]) -> f64 {
        let mask: usize = players.iter().map(|p| 1usize << p).sum();
        self.values[mask]
    }

    fn others(&self, exclude: &[usize]) -> Vec<usize> {
        (0..self.n).filter(|p| !exclude.contains(p)).collect()
    }

    fn with(list: &[usize], extra: &[usize]) -> Vec<usize> {
        let mut out = list.to_vec();
        out.extend_from_slice(extra);
        out
    }

    /// Σ_{L⊆S} (−1)^{|S|−|L|} v(L ∪ T).
    pub fn delta_set(&self, s: &[usize], t: &[usize]) -> f64 {
        (0..=s.len())
            .flat_map(|l| s.iter().copied().combinations(l))
            .map(|l| {
                let sign = if (s.len() - l.len()).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                sign * self.v(&Self::with(&l, t))
            })
            .sum()
    }

    /// Average marginal contribution over all n! orderings.
    pub fn shapley(&self, i: usize) -> f64 {
        let mut total = 0.0;
        for perm in (0..self.n).permutations(self.n) {
            let pos = perm.iter().position(|&p| p == i).unwrap();
            let before = &perm[..pos];
            total += self.v(&Self::with(before, &[i])) - self.v(before);
        }
        total / fact(self.n)
    }

    /// Shapley value of `i` in the game restricted to `universe`.
    pub fn shapley_within(&self, i: usize, universe: &[usize]) -> f64 {
        let k = universe.len();
        let mut total = 0.0;
        for perm in universe.iter().copied().permutations(k) {
            let pos = perm.iter().position(|&p| p == i).unwrap();
            let before = &perm[..pos];
            total += self.v(&Self::with(before, &[i])) - self.v(before);
        }
        total / fact(k)
    }

    pub fn shapley_order(&self, i: usize, m: usize) -> f64 {
        let ctx: Vec<Vec<usize>> = self.others(&[i]).into_iter().combinations(m).collect();
        ctx.iter()
            .map(|s| self.v(&Self::with(s, &[i])) - self.v(s))
            .sum::<f64>()
            / ctx.len() as f64
    }

    pub fn delta_ij(&self, i: usize, j: usize, s: &[usize]) -> f64 {
        self.v(&Self::with(s, &[i, j]))
            - self.v(&Self::with(s, &[i]))
            - self.v(&Self::with(s, &[j]))
            + self.v(s)
    }

    pub fn interaction_order(&self, i: usize, j: usize, m: usize) -> f64 {
        let ctx: Vec<Vec<usize>> = self.others(&[i, j]).into_iter().combinations(m).collect();
        ctx.iter().map(|s| self.delta_ij(i, j, s)).sum::<f64>() / ctx.len() as f64
    }

    /// Factorial-weighted closed form over all contexts.
    pub fn interaction(&self, i: usize, j: usize) -> f64 {
        let n = self.n;
        let rest = self.others(&[i, j]);
        (0..=rest.len())
            .flat_map(|s| rest.iter().copied().combinations(s))
            .map(|s| fact(n - s.len() - 2) * fact(s.len()) / fact(n - 1) * self.delta_ij(i, j, &s))
            .sum()
    }

    pub fn r_t(&self, i: usize, j: usize, t: &[usize]) -> f64 {
        (0..=t.len())
            .flat_map(|l| t.iter().copied().combinations(l))
            .map(|l| {
                let sign = if (t.len() - l.len()).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                sign * self.delta_ij(i, j, &l)
            })
            .sum()
    }

    pub fn purified_order(&self, i: usize, j: usize, m: usize) -> f64 {
        let ts: Vec<Vec<usize>> = self.others(&[i, j]).into_iter().combinations(m).collect();
        ts.iter().map(|t| self.r_t(i, j, t)).sum::<f64>() / ts.len() as f64
    }

    /// Grabisch index with factorial weights.
    pub fn grabisch(&self, s: &[usize]) -> f64 {
        self.grabisch_within(s, &(0..self.n).collect::<Vec<_>>())
    }

    /// Grabisch index in the game restricted to `universe`.
    pub fn grabisch_within(&self, s: &[usize], universe: &[usize]) -> f64 {
        let n = universe.len();
        let rest: Vec<usize> = universe
            .iter()
            .copied()
            .filter(|p| !s.contains(p))
            .collect();
        (0..=rest.len())
            .flat_map(|t| rest.iter().copied().combinations(t))
            .map(|t| {
                fact(n - t.len() - s.len()) * fact(t.len()) / fact(n - s.len() + 1)
                    * self.delta_set(s, &t)
            })
            .sum()
    }

    /// Shapley-Taylor index by enumerating every ordering; `π^S` is the
    /// set of players placed before the first member of `S`.
    pub fn taylor(&self, s: &[usize], k: usize) -> f64 {
        if s.len() < k {
            return self.delta_set(s, &[]);
        }
        let mut total = 0.0;
        for perm in (0..self.n).permutations(self.n) {
            let first = perm.iter().position(|p| s.contains(p)).unwrap();
            total += self.delta_set(s, &perm[..first]);
        }
        total / fact(self.n)
    }

    /// Shapley value of the merged player `[S]` in the game where `S` acts
    /// as one player, by permutations of the reduced player set.
    pub fn merged_shapley(&self, s: &[usize]) -> f64 {
        let rest = self.others(s);
        let units = rest.len() + 1;
        let mut total = 0.0;
        for perm in (0..units).permutations(units) {
            let pos = perm.iter().position(|&u| u == rest.len()).unwrap();
            let before: Vec<usize> = perm[..pos].iter().map(|&u| rest[u]).collect();
            total += self.v(&Self::with(&before, s)) - self.v(&before);
        }
        total / fact(units)
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[macro_export]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!(
            (a - b).abs() <= $tol,
            "{} = {a} vs {} = {b}",
            stringify!($a),
            stringify!($b)
        );
    }};
    ($a:expr, $b:expr) => {
        $crate::assert_close!($a, $b, 1e-9)
    };
}
