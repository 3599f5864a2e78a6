//! In-process games: additive, majority, pure-interaction patterns and
//! seeded random tables.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalition::{Bits, Coalition};
use crate::error::{config, Result};

use super::Oracle;

/// `v(S) = Σ_{p ∈ S} w_p`, accumulated in ascending player order.
#[derive(Debug, Clone)]
pub struct Additive {
    weights: Vec<f64>,
}

impl Additive {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(config("additive game needs at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(config(format!("additive weight {w} is not finite")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Oracle for Additive {
    fn players(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, mask: u64) -> Result<f64> {
        let mut total = 0.0;
        for p in Bits(mask) {
            total += self.weights[p as usize];
        }
        Ok(total)
    }
}

/// `v(S) = 1` when `|S| ≥ threshold`, else `0`.
#[derive(Debug, Clone)]
pub struct Majority {
    n: usize,
    threshold: usize,
}

impl Majority {
    pub fn new(n: usize, threshold: usize) -> Result<Self> {
        if threshold == 0 || threshold > n {
            return Err(config(format!(
                "majority threshold must be in 1..={n}, got {threshold}"
            )));
        }
        Ok(Self { n, threshold })
    }
}

impl Oracle for Majority {
    fn players(&self) -> usize {
        self.n
    }

    fn evaluate(&self, mask: u64) -> Result<f64> {
        Ok(if mask.count_ones() as usize >= self.threshold {
            1.0
        } else {
            0.0
        })
    }
}

/// Pure interaction `v_T(S) = c·[T ⊆ S]`.
#[derive(Debug, Clone)]
pub struct Pattern {
    pattern: Coalition,
    value: f64,
}

impl Pattern {
    pub fn new(pattern: Coalition, value: f64) -> Result<Self> {
        if pattern.is_empty() {
            return Err(config("pattern game needs a nonempty pattern set"));
        }
        if !value.is_finite() {
            return Err(config(format!("pattern value {value} is not finite")));
        }
        Ok(Self { pattern, value })
    }
}

impl Oracle for Pattern {
    fn players(&self) -> usize {
        self.pattern.n()
    }

    fn evaluate(&self, mask: u64) -> Result<f64> {
        Ok(if self.pattern.mask() & !mask == 0 {
            self.value
        } else {
            0.0
        })
    }
}

/// Independent uniform values on `[−1, 1)` per coalition.
///
/// Generator: ChaCha8 keyed by `seed_from_u64(seed)`, stream = coalition
/// mask, first 64-bit output `x`; value `2·(x >> 11)·2⁻⁵³ − 1`. Each value
/// depends only on `(seed, mask)`, so tables are order independent.
#[derive(Debug, Clone)]
pub struct RandomGame {
    n: usize,
    seed: u64,
    keyed: ChaCha8Rng,
}

impl RandomGame {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > crate::coalition::MAX_PLAYERS {
            return Err(config(format!("random game player count {n} out of range")));
        }
        Ok(Self {
            n,
            seed,
            keyed: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn value_of(&self, mask: u64) -> f64 {
        let mut rng = self.keyed.clone();
        rng.set_stream(mask);
        rng.set_word_pos(0);
        let x = rng.next_u64();
        2.0 * ((x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) - 1.0
    }
}

impl Oracle for RandomGame {
    fn players(&self) -> usize {
        self.n
    }

    fn evaluate(&self, mask: u64) -> Result<f64> {
        Ok(self.value_of(mask))
    }
}
