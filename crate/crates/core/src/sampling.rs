//! Seeded Monte Carlo estimators for the expectations behind the exact
//! indices.
//!
//! Draws are grouped in chunks of [`CHUNK`] samples. Chunk `c` of stream
//! base `b` uses ChaCha8 keyed by `seed_from_u64(seed)` on stream `b + c`,
//! so every chunk can run on its own worker while the concatenated draw
//! sequence, and hence the [`Estimate`], stays identical to a single-lane
//! run. Plain estimators use stream base 0; stratum `m` of a stratified
//! estimator uses `(m + 1) << 40`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalition::{deposit, full_mask, Bits, Coalition};
use crate::error::{domain, Result};
use crate::game::Game;
use crate::kernels;
use crate::numeric::compensated_sum;
use crate::par;
use crate::setwise::grabisch_on;

/// Draws per independent generator stream.
pub const CHUNK: usize = 4096;

/// Largest purified order the sampler accepts; each draw costs `4·2^m`
/// evaluations.
pub const MAX_SAMPLED_PURIFIED_ORDER: usize = 20;

const STRATUM_SHIFT: u32 = 40;

/// A sampled statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of `mean`: sample standard deviation over `√samples`
    /// for plain estimators, the stratified combination otherwise.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub target: String,
}

/// Uniform subset of `universe` with exactly `m` members.
///
/// Partial Fisher-Yates over the members in ascending order: slot `t`
/// swaps with a uniform index in `t..|universe|`, so exactly `m` bounded
/// draws are consumed.
pub fn sample_fixed_size_subset<R: Rng + ?Sized>(
    universe: &Coalition,
    m: usize,
    rng: &mut R,
) -> Result<Coalition> {
    if m > universe.size() {
        return Err(domain(format!(
            "cannot draw {m} players from a universe of {}",
            universe.size()
        )));
    }
    Ok(Coalition::from_raw(
        universe.n(),
        sample_mask(universe.mask(), m, rng),
    ))
}

pub(crate) fn sample_mask<R: Rng + ?Sized>(universe: u64, m: usize, rng: &mut R) -> u64 {
    let mut members: Vec<u32> = Bits(universe).collect();
    let len = members.len();
    let mut out = 0u64;
    for t in 0..m {
        let k = rng.gen_range(t..len);
        members.swap(t, k);
        out |= 1 << members[t];
    }
    out
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw<F>(samples: usize, seed: u64, stream_base: u64, f: &F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts = par::try_map_indexed(chunks, |c| {
        let mut rng = stream_rng(seed, stream_base + c as u64);
        let count = CHUNK.min(samples - c * CHUNK);
        (0..count)
            .map(|_| f(&mut rng))
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(parts.concat())
}

/// `(mean, sample variance)`; constant draws give their exact value and 0.
fn moments(xs: &[f64]) -> (f64, f64) {
    let first = xs[0];
    if xs.iter().all(|x| x.to_bits() == first.to_bits()) {
        return (first, 0.0);
    }
    let k = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / k;
    let ss = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, ss / (k - 1.0))
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(domain(format!("need at least 2 samples, got {samples}")));
    }
    Ok(())
}

fn plain<F>(target: String, samples: usize, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    check_samples(samples)?;
    let xs = draw(samples, seed, 0, &f)?;
    let (mean, var) = moments(&xs);
    Ok(Estimate {
        mean,
        stderr: (var / samples as f64).sqrt(),
        samples,
        seed,
        target,
    })
}

/// Equal allocation across `strata`, combined as the unweighted mean of
/// per-stratum means.
fn stratified<F>(target: String, strata: usize, samples: usize, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<f64> + Sync,
{
    check_samples(samples)?;
    if samples < 2 * strata {
        return Err(domain(format!(
            "stratified sampling over {strata} orders needs at least {} samples, got {samples}",
            2 * strata
        )));
    }
    let mut means = Vec::with_capacity(strata);
    let mut var_terms = Vec::with_capacity(strata);
    for m in 0..strata {
        let k_m = samples / strata + usize::from(m < samples % strata);
        let xs = draw(
            k_m,
            seed,
            (m as u64 + 1) << STRATUM_SHIFT,
            &|rng: &mut ChaCha8Rng| f(m, rng),
        )?;
        let (mean, var) = moments(&xs);
        means.push(mean);
        var_terms.push(var / k_m as f64);
    }
    let h = strata as f64;
    Ok(Estimate {
        mean: compensated_sum(means) / h,
        stderr: compensated_sum(var_terms).sqrt() / h,
        samples,
        seed,
        target,
    })
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

/// Estimates `φ^(m)(i)` from uniform size-`m` contexts.
pub fn estimate_shapley_order(
    g: &Game,
    i: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    g.check_player(i)?;
    if m >= g.n() {
        return Err(domain(format!("order {m} out of range 0..={}", g.n() - 1)));
    }
    let universe = full_mask(g.n()) & !(1 << i);
    plain(
        format!("shapley_order(i={i},m={m})"),
        samples,
        seed,
        |rng| {
            let s = sample_mask(universe, m, rng);
            kernels::delta_i(&mut |x| g.value_mask(x), i, s)
        },
    )
}

/// Estimates `φ(i) = (1/n)·Σ_m φ^(m)(i)`, stratified over orders or as a
/// mixture (uniform order, then uniform context).
pub fn estimate_shapley(
    g: &Game,
    i: usize,
    samples: usize,
    seed: u64,
    stratify: bool,
) -> Result<Estimate> {
    g.check_player(i)?;
    let n = g.n();
    let universe = full_mask(n) & !(1 << i);
    let target = format!("shapley(i={i})");
    let integrand = |m: usize, rng: &mut ChaCha8Rng| {
        let s = sample_mask(universe, m, rng);
        kernels::delta_i(&mut |x| g.value_mask(x), i, s)
    };
    if stratify {
        stratified(target, n, samples, seed, integrand)
    } else {
        plain(target, samples, seed, |rng| {
            let m = rng.gen_range(0..n);
            integrand(m, rng)
        })
    }
}

pub fn estimate_interaction_order(
    g: &Game,
    i: usize,
    j: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_pair(g, i, j)?;
    if m + 2 > g.n() {
        return Err(domain(format!("order {m} out of range 0..={}", g.n() - 2)));
    }
    let universe = full_mask(g.n()) & !(1 << i | 1 << j);
    plain(
        format!("interaction_order(i={i},j={j},m={m})"),
        samples,
        seed,
        |rng| {
            let s = sample_mask(universe, m, rng);
            kernels::delta_ij(&mut |x| g.value_mask(x), i, j, s)
        },
    )
}

/// Estimates `J^(m)(i,j)`; each draw evaluates `R_T` exactly.
pub fn estimate_purified_order(
    g: &Game,
    i: usize,
    j: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_pair(g, i, j)?;
    if m + 2 > g.n() {
        return Err(domain(format!("order {m} out of range 0..={}", g.n() - 2)));
    }
    if m > MAX_SAMPLED_PURIFIED_ORDER {
        return Err(domain(format!(
            "sampled purified order {m} exceeds {MAX_SAMPLED_PURIFIED_ORDER}"
        )));
    }
    let universe = full_mask(g.n()) & !(1 << i | 1 << j);
    plain(
        format!("purified_order(i={i},j={j},m={m})"),
        samples,
        seed,
        |rng| {
            let t = sample_mask(universe, m, rng);
            kernels::r_t(&mut |x| g.value_mask(x), i, j, t)
        },
    )
}

/// Estimates `I(i,j) = (1/(n−1))·Σ_m I^(m)(i,j)`.
pub fn estimate_interaction(
    g: &Game,
    i: usize,
    j: usize,
    samples: usize,
    seed: u64,
    stratify: bool,
) -> Result<Estimate> {
    check_pair(g, i, j)?;
    let orders = g.n() - 1;
    let universe = full_mask(g.n()) & !(1 << i | 1 << j);
    let target = format!("interaction(i={i},j={j})");
    let integrand = |m: usize, rng: &mut ChaCha8Rng| {
        let s = sample_mask(universe, m, rng);
        kernels::delta_ij(&mut |x| g.value_mask(x), i, j, s)
    };
    if stratify {
        stratified(target, orders, samples, seed, integrand)
    } else {
        plain(target, samples, seed, |rng| {
            let m = rng.gen_range(0..orders);
            integrand(m, rng)
        })
    }
}

/// Players preceding every member of `set` in a uniform random ordering.
/// Builds the ordering slot by slot with bounded uniform draws and stops at
/// the first member of `set`.
fn sample_prefix<R: Rng + ?Sized>(n: usize, set: u64, rng: &mut R) -> u64 {
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut prefix = 0u64;
    for t in 0..n {
        let k = rng.gen_range(t..n);
        order.swap(t, k);
        let p = order[t];
        if set >> p & 1 == 1 {
            break;
        }
        prefix |= 1 << p;
    }
    prefix
}

/// Estimates `𝓘^(k)(S)` by averaging over uniform orderings. For `|S| < k`
/// the integrand does not depend on the ordering and is returned exactly.
pub fn estimate_taylor(
    g: &Game,
    s: &Coalition,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    g.check_coalition(s)?;
    check_samples(samples)?;
    if s.is_empty() || k == 0 || k > g.n() || s.size() > k {
        return Err(domain(format!(
            "Shapley-Taylor needs 1 <= |S| <= k <= n, got |S| = {}, k = {k}",
            s.size()
        )));
    }
    let target = format!("taylor(S={s},k={k})");
    let set = s.mask();
    if s.size() < k {
        let mean = kernels::delta_set(&mut |x| g.value_mask(x), set, 0)?;
        return Ok(Estimate {
            mean,
            stderr: 0.0,
            samples,
            seed,
            target,
        });
    }
    let n = g.n();
    plain(target, samples, seed, |rng| {
        let prefix = sample_prefix(n, set, rng);
        kernels::delta_set(&mut |x| g.value_mask(x), set, prefix)
    })
}

/// Estimates `B′([S])` by sampling index terms `S′ ⊆ S`, `|S′| > 1`,
/// uniformly and scaling by the term count `2^|S| − |S| − 1`. Each term is
/// exact, so the game must admit exact enumeration; the sampling only
/// replaces the sum over terms.
pub fn estimate_significance(
    g: &Game,
    s: &Coalition,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    g.check_coalition(s)?;
    check_samples(samples)?;
    let size = s.size();
    if size < 2 {
        return Err(domain("significance needs |S| >= 2"));
    }
    let table = g.exact_table()?;
    let full = full_mask(g.n());
    let target = format!("significance(S={s})");
    let count = 2f64.powi(size as i32) - size as f64 - 1.0;
    let set = s.mask();
    let outside = full & !set;
    let low = if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    };
    let est = plain(target, samples, seed, |rng| {
        let sub = loop {
            let sub = deposit(rng.next_u64() & low, set);
            if sub.count_ones() > 1 {
                break sub;
            }
        };
        Ok(grabisch_on(&*table, sub, outside | sub).abs())
    })?;
    Ok(Estimate {
        mean: est.mean * count,
        stderr: est.stderr * count,
        ..est
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build_game;

    fn game(spec: &str) -> Game {
        build_game(&spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn subset_extremes() {
        let u = Coalition::new(6, 0b101101).unwrap();
        let mut rng = stream_rng(3, 0);
        assert!(sample_fixed_size_subset(&u, 0, &mut rng)
            .unwrap()
            .is_empty());
        assert_eq!(sample_fixed_size_subset(&u, 4, &mut rng).unwrap(), u);
        assert!(sample_fixed_size_subset(&u, 5, &mut rng).is_err());
    }

    #[test]
    fn additive_estimates_are_exact() {
        let g = game("additive:2,3,5,7");
        let e = estimate_shapley_order(&g, 2, 1, 100, 9).unwrap();
        assert_eq!((e.mean, e.stderr), (5.0, 0.0));
        let e = estimate_interaction(&g, 0, 3, 100, 9, true).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
        let e = estimate_purified_order(&g, 0, 3, 2, 100, 9).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
    }

    #[test]
    fn majority_order_one() {
        let g = game("majority:3,2");
        let e = estimate_interaction_order(&g, 0, 1, 1, 1000, 1).unwrap();
        assert_eq!((e.mean, e.stderr, e.samples), (-1.0, 0.0, 1000));
    }

    #[test]
    fn pattern_pair_interaction() {
        let g = game("pattern:6,011000,3");
        for stratify in [true, false] {
            let e = estimate_interaction(&g, 1, 2, 500, 4, stratify).unwrap();
            assert_eq!((e.mean, e.stderr), (3.0, 0.0));
        }
    }

    #[test]
    fn too_few_samples() {
        let g = game("majority:3,2");
        assert!(estimate_shapley_order(&g, 0, 0, 1, 0).is_err());
        assert!(estimate_interaction(&g, 0, 1, 3, 0, true).is_err());
        assert!(estimate_interaction(&g, 0, 1, 4, 0, true).is_ok());
    }

    #[test]
    fn reproducible() {
        let g = game("random:10,2");
        let a = estimate_interaction_order(&g, 1, 4, 3, 9000, 77).unwrap();
        let b = estimate_interaction_order(&g, 1, 4, 3, 9000, 77).unwrap();
        assert_eq!(a, b);
        let c = estimate_interaction_order(&g, 1, 4, 3, 9000, 78).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn prefix_never_contains_set() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..200 {
            let p = sample_prefix(7, 0b0010100, &mut rng);
            assert_eq!(p & 0b0010100, 0);
        }
    }
}
