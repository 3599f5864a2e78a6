//! Hand-derived witnesses and brute-force cross-checks of every index.

mod common;

use common::{game, Brute};
use itertools::Itertools;
use shapint::game::delta_set;
use shapint::pairwise::{
    interaction, interaction_forms, interaction_order, interaction_order_from_components,
    interaction_order_phi_difference, purified_from_raw, purified_order, r_t, raw_from_purified,
    spectrum,
};
use shapint::setwise::{
    b_significance, grabisch_index, shapley_taylor, significance_forms, taylor_index,
};
use shapint::shapley::{shapley_order, shapley_profile, shapley_value, shapley_vector};
use shapint::{Coalition, SpectrumKind};

const TOL: f64 = 1e-9;

fn random_games() -> impl Iterator<Item = shapint::Game> {
    (0..10u64).map(|seed| game(&format!("random:{},{}", 3 + seed % 4, 100 + seed)))
}

fn set(n: usize, players: &[usize]) -> Coalition {
    Coalition::from_players(n, players).unwrap()
}

#[test]
fn majority_three_witnesses() {
    let g = game("majority:3,2");
    for i in 0..3 {
        assert_close!(shapley_value(&g, i, None).unwrap(), 1.0 / 3.0);
        assert_eq!(shapley_profile(&g, i).unwrap().values, vec![0.0, 1.0, 0.0]);
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert_close!(interaction(&g, i, j).unwrap(), 0.0);
        assert_eq!(
            spectrum(&g, i, j, SpectrumKind::Raw).unwrap().values,
            vec![1.0, -1.0]
        );
        assert_eq!(
            spectrum(&g, i, j, SpectrumKind::Purified).unwrap().values,
            vec![1.0, -2.0]
        );
        assert_close!(grabisch_index(&g, &set(3, &[i, j])).unwrap(), 0.0);
        assert_close!(shapley_taylor(&g, &set(3, &[i, j]), 2).unwrap(), 1.0 / 3.0);
        let b = b_significance(&g, &set(3, &[i, j])).unwrap();
        assert_close!(b.b, 0.0);
        assert_close!(b.b_prime, 0.0);
    }
    assert_close!(taylor_index(&g, 2).unwrap().total(), 1.0);
    assert_eq!(delta_set(&g, &g.full(), &g.empty()).unwrap(), -2.0);
    assert_eq!(r_t(&g, 0, 1, &set(3, &[2])).unwrap(), -2.0);
}

#[test]
fn two_player_unanimity() {
    let g = game("pattern:2,11,1");
    assert_close!(shapley_value(&g, 0, None).unwrap(), 0.5);
    assert_eq!(shapley_profile(&g, 0).unwrap().values, vec![0.0, 1.0]);
    assert_close!(interaction(&g, 0, 1).unwrap(), 1.0);
    assert_close!(grabisch_index(&g, &g.full()).unwrap(), 1.0);
}

#[test]
fn pattern_pair_significance() {
    let g = game("pattern:5,01010,2");
    let b = b_significance(&g, &set(5, &[1, 3])).unwrap();
    assert_close!(b.b, 2.0);
    assert_close!(b.b_prime, 2.0);
}

#[test]
fn pattern_triple_spectra() {
    for n in 3..=8 {
        let mask: String = (0..n).map(|p| if p < 3 { '1' } else { '0' }).collect();
        let g = game(&format!("pattern:{n},{mask},1"));
        let raw = spectrum(&g, 0, 1, SpectrumKind::Raw).unwrap();
        let purified = spectrum(&g, 0, 1, SpectrumKind::Purified).unwrap();
        let brute = Brute::new(&g);
        for m in 0..n - 1 {
            assert_close!(raw.values[m], m as f64 / (n - 2) as f64);
            assert_close!(brute.interaction_order(0, 1, m), raw.values[m]);
            let expected = if m == 1 { 1.0 / (n - 2) as f64 } else { 0.0 };
            assert_close!(purified.values[m], expected);
            assert_close!(brute.purified_order(0, 1, m), expected);
        }
    }
}

#[test]
fn shapley_matches_permutation_average() {
    for g in random_games() {
        let b = Brute::new(&g);
        let phi = shapley_vector(&g).unwrap();
        for i in 0..g.n() {
            assert_close!(phi.values[i], b.shapley(i), TOL);
            for m in 0..g.n() {
                assert_close!(
                    shapley_order(&g, i, m, None).unwrap(),
                    b.shapley_order(i, m),
                    TOL
                );
            }
        }
    }
}

#[test]
fn pairwise_forms_match_brute_force() {
    for g in random_games() {
        let b = Brute::new(&g);
        let n = g.n();
        for (i, j) in (0..n).tuple_combinations() {
            let forms = interaction_forms(&g, i, j).unwrap();
            assert_close!(forms.closed, b.interaction(i, j), TOL);
            assert_close!(forms.phi_difference, b.interaction(i, j), TOL);
            for m in 0..n - 1 {
                let raw = b.interaction_order(i, j, m);
                assert_close!(interaction_order(&g, i, j, m).unwrap(), raw, TOL);
                assert_close!(
                    interaction_order_phi_difference(&g, i, j, m).unwrap(),
                    raw,
                    TOL
                );
                assert_close!(
                    interaction_order_from_components(&g, i, j, m).unwrap(),
                    raw,
                    TOL
                );
                assert_close!(
                    purified_order(&g, i, j, m).unwrap(),
                    b.purified_order(i, j, m),
                    TOL
                );
            }
        }
    }
}

#[test]
fn purified_recursion_round_trip() {
    for g in random_games() {
        for (i, j) in (0..g.n()).tuple_combinations() {
            let raw = spectrum(&g, i, j, SpectrumKind::Raw).unwrap();
            let purified = purified_from_raw(&raw).unwrap();
            for m in 0..g.n() - 1 {
                assert_close!(
                    purified.values[m],
                    purified_order(&g, i, j, m).unwrap(),
                    TOL
                );
            }
            let back = raw_from_purified(&purified).unwrap();
            for (x, y) in back.values.iter().zip(&raw.values) {
                assert_close!(*x, *y, TOL);
            }
        }
    }
}

#[test]
fn grabisch_matches_factorial_form() {
    for g in random_games() {
        let b = Brute::new(&g);
        let n = g.n();
        for size in 1..=n {
            for s in (0..n).combinations(size) {
                assert_close!(
                    grabisch_index(&g, &set(n, &s)).unwrap(),
                    b.grabisch(&s),
                    TOL
                );
            }
        }
        for (i, j) in (0..n).tuple_combinations() {
            assert_close!(
                grabisch_index(&g, &set(n, &[i, j])).unwrap(),
                interaction(&g, i, j).unwrap(),
                TOL
            );
        }
    }
}

#[test]
fn significance_matches_merged_player_and_restricted_indices() {
    for g in random_games() {
        let b = Brute::new(&g);
        let n = g.n();
        for size in 2..=n {
            for s in (0..n).combinations(size) {
                let c = set(n, &s);
                let outside: Vec<usize> = (0..n).filter(|p| !s.contains(p)).collect();
                let individual: f64 = s
                    .iter()
                    .map(|&i| {
                        let mut universe = outside.clone();
                        universe.push(i);
                        b.shapley_within(i, &universe)
                    })
                    .sum();
                let expected_b = b.merged_shapley(&s) - individual;
                let expected_abs: f64 = (2..=size)
                    .flat_map(|k| s.iter().copied().combinations(k))
                    .map(|sub| {
                        let mut universe = outside.clone();
                        universe.extend(&sub);
                        universe.sort_unstable();
                        b.grabisch_within(&sub, &universe).abs()
                    })
                    .sum();
                let forms = significance_forms(&g, &c).unwrap();
                assert_close!(forms.phi_difference, expected_b, TOL);
                assert_close!(forms.index_sum, expected_b, TOL);
                let report = b_significance(&g, &c).unwrap();
                assert_close!(report.b, expected_b, TOL);
                assert_close!(report.b_prime, expected_abs, TOL);
                assert!(report.b_prime + TOL >= report.b.abs());
            }
        }
    }
}

#[test]
fn taylor_matches_permutation_enumeration() {
    for g in random_games() {
        let b = Brute::new(&g);
        let n = g.n();
        for k in 1..=n {
            let index = taylor_index(&g, k).unwrap();
            for (c, x) in &index.values {
                let s: Vec<usize> = c.players().collect();
                assert_close!(*x, b.taylor(&s, k), TOL);
            }
            assert_close!(
                index.total(),
                b.v(&(0..n).collect::<Vec<_>>()) - b.v(&[]),
                TOL
            );
        }
    }
}

#[test]
fn taylor_distributes_pattern_interactions() {
    for n in [5, 6] {
        for t in [vec![0, 2], vec![1, 3, 4]] {
            for c in [1.0, -2.0] {
                let mask: String = (0..n)
                    .map(|p| if t.contains(&p) { '1' } else { '0' })
                    .collect();
                let g = game(&format!("pattern:{n},{mask},{c}"));
                for k in 1..=n {
                    for size in 1..t.len().min(k) {
                        for s in t.iter().copied().combinations(size) {
                            let x = shapley_taylor(&g, &set(n, &s), k).unwrap();
                            assert!(x.abs() <= 1e-12, "n={n} T={t:?} c={c} k={k} S={s:?}: {x}");
                        }
                    }
                }
            }
        }
    }
}
