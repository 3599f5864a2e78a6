//! Coalitions as `n`-bit membership masks and the subset enumerators every
//! exact computation is built on.
//!
//! Mask strings put player 0 in the leftmost character: `"101"` with `n = 3`
//! is the coalition `{0, 2}`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported player count; the full mask of 63 players still fits
/// a `u64` without overflow tricks.
pub const MAX_PLAYERS: usize = 63;

pub fn full_mask(n: usize) -> u64 {
    debug_assert!(n <= MAX_PLAYERS);
    (1u64 << n) - 1
}

/// A subset of the player set `{0, ..., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    n: usize,
    mask: u64,
}

impl Coalition {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(Error::Domain(format!(
                "player count must be in 1..={MAX_PLAYERS}, got {n}"
            )));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::Domain(format!(
                "mask {mask:#x} has bits at positions >= {n}"
            )));
        }
        Ok(Self { n, mask })
    }

    pub(crate) fn from_raw(n: usize, mask: u64) -> Self {
        debug_assert!(mask & !full_mask(n) == 0);
        Self { n, mask }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, full_mask(n.min(MAX_PLAYERS)))
    }

    pub fn from_players(n: usize, players: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &p in players {
            if p >= n {
                return Err(Error::Domain(format!(
                    "player {p} out of range for n = {n}"
                )));
            }
            mask |= 1 << p;
        }
        Self::new(n, mask)
    }

    /// Parses a `'0'/'1'` string; character `p` governs player `p`.
    pub fn from_mask_string(s: &str, n: usize) -> Result<Self> {
        let len = s.chars().count();
        if len != n {
            return Err(Error::Format {
                position: len.min(n),
                reason: format!("expected {n} characters, found {len}"),
            });
        }
        let mut mask = 0u64;
        for (p, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => mask |= 1 << p,
                other => {
                    return Err(Error::Format {
                        position: p,
                        reason: format!("illegal character {other:?}"),
                    })
                }
            }
        }
        Self::new(n, mask)
    }

    pub fn to_mask_string(&self) -> String {
        (0..self.n)
            .map(|p| if self.contains(p) { '1' } else { '0' })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, player: usize) -> bool {
        player < self.n && self.mask >> player & 1 == 1
    }

    pub fn with(&self, player: usize) -> Self {
        assert!(player < self.n, "player {player} out of range");
        Self::from_raw(self.n, self.mask | 1 << player)
    }

    pub fn without(&self, player: usize) -> Self {
        Self::from_raw(self.n, self.mask & !(1 << player))
    }

    pub fn union(&self, other: &Coalition) -> Self {
        Self::from_raw(self.n, self.mask | other.mask)
    }

    pub fn difference(&self, other: &Coalition) -> Self {
        Self::from_raw(self.n, self.mask & !other.mask)
    }

    pub fn is_disjoint(&self, other: &Coalition) -> bool {
        self.mask & other.mask == 0
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn complement(&self) -> Self {
        Self::from_raw(self.n, !self.mask & full_mask(self.n))
    }

    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        Bits(self.mask).map(|b| b as usize)
    }

    /// All subsets in ascending mask order.
    pub fn subsets(&self) -> impl Iterator<Item = Coalition> {
        let n = self.n;
        SubmaskIter::new(self.mask).map(move |m| Coalition::from_raw(n, m))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_mask_string())
    }
}

/// Set-bit positions of a mask, lowest first.
#[derive(Debug, Clone)]
pub struct Bits(pub u64);

impl Iterator for Bits {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Maps the low bits of `local` onto the set bits of `universe`: bit `r` of
/// `local` lands on the `r`-th lowest member of `universe`.
pub fn deposit(local: u64, universe: u64) -> u64 {
    let mut out = 0u64;
    let mut rest = local;
    for bit in Bits(universe) {
        if rest == 0 {
            break;
        }
        if rest & 1 == 1 {
            out |= 1 << bit;
        }
        rest >>= 1;
    }
    out
}

/// Every submask of `universe`, in ascending numeric order, starting at 0.
#[derive(Debug, Clone)]
pub struct SubmaskIter {
    universe: u64,
    next: Option<u64>,
}

impl SubmaskIter {
    pub fn new(universe: u64) -> Self {
        Self::starting_at(universe, 0)
    }

    /// Resumes enumeration at `start`, which must be a submask of `universe`.
    pub fn starting_at(universe: u64, start: u64) -> Self {
        debug_assert!(start & !universe == 0);
        Self {
            universe,
            next: Some(start),
        }
    }
}

impl Iterator for SubmaskIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == self.universe {
            None
        } else {
            Some((cur | !self.universe).wrapping_add(1) & self.universe)
        };
        Some(cur)
    }
}

/// Submasks of `universe` with exactly `size` members, ascending.
#[derive(Debug, Clone)]
pub struct FixedSizeSubmasks {
    universe: u64,
    width: u32,
    local: Option<u64>,
}

impl FixedSizeSubmasks {
    pub fn new(universe: u64, size: usize) -> Self {
        let width = universe.count_ones();
        let local = if size as u32 > width {
            None
        } else {
            Some(if size == 0 { 0 } else { (1u64 << size) - 1 })
        };
        Self {
            universe,
            width,
            local,
        }
    }
}

impl Iterator for FixedSizeSubmasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let x = self.local?;
        let out = deposit(x, self.universe);
        self.local = if x == 0 {
            None
        } else {
            // Gosper's hack: next larger integer with the same popcount.
            let c = x & x.wrapping_neg();
            let r = x + c;
            let nx = (((r ^ x) >> 2) / c) | r;
            if self.width < 64 && nx >> self.width != 0 {
                None
            } else {
                Some(nx)
            }
        };
        Some(out)
    }
}
