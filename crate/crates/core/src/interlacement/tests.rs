use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fixtures::{hub_versus_clique, two_crossings};
use super::*;
use crate::centrality::{circulability, default_grid, measure_values, uniform_grid};
use crate::graph::{generate_complete, generate_er, generate_star};
use crate::spectral::ExpmEngine;

fn root_contract(g: &Graph, e: &InterlacementEvent) {
    let engine = ExpmEngine::new(g).unwrap();
    let v = measure_values(&engine, e.measure, e.zeta_star).unwrap();
    let scale = v[e.i].abs().max(1.0);
    assert!(
        (v[e.i] - v[e.j]).abs() < 1e-6 * scale,
        "residual {} at {}",
        v[e.i] - v[e.j],
        e.zeta_star
    );
    assert!(e.bracket.0 <= e.zeta_star && e.zeta_star <= e.bracket.1);
    assert!(e.bracket.1 - e.bracket.0 <= BRACKET_WIDTH);
}

#[test]
fn automorphic_pairs_never_cross() {
    let g = generate_complete(5).unwrap();
    for m in Measure::ALL {
        let d = detect(&g, 0, 3, m, &default_grid()).unwrap();
        assert!(d.events.is_empty() && d.tangencies.is_empty());
    }
    let c6 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
    assert!(detect(&c6, 1, 4, Measure::R, &default_grid()).unwrap().events.is_empty());
    assert!(matches!(finiteness_check(&c6, 1, 4).unwrap(), Finiteness::Undecidable));
}

/// Random small graphs with a pair whose degree order and eigenvector order
/// disagree.
fn opposite_order_pairs(count: usize) -> Vec<(Graph, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    while out.len() < count {
        let g = crate::graph::generate_er_with(
            &mut rng,
            12,
            0.3,
            crate::graph::ErOptions::default(),
        )
        .unwrap();
        let psi = decompose(&g).unwrap().perron();
        let pair = (0..12).flat_map(|i| (0..12).map(move |j| (i, j))).find(|&(i, j)| {
            g.degree(i) > g.degree(j) && psi[i] < psi[j] - 1e-6
        });
        if let Some((i, j)) = pair {
            out.push((g, i, j));
        }
        let _: u8 = rng.random();
    }
    out
}

#[test]
fn sufficient_condition_gives_odd_number_of_crossings() {
    for (g, i, j) in opposite_order_pairs(15) {
        let Finiteness::Bounded { zeta_bar } = finiteness_check(&g, i, j).unwrap() else {
            panic!("expected a bound");
        };
        let top = zeta_bar.max(0.02) + 0.01;
        let grid = uniform_grid(top / 2000.0, top, 2000);
        let d = detect(&g, i, j, Measure::C, &grid).unwrap();
        assert_eq!(d.events.len() % 2, 1, "pair ({i},{j}) zeta_bar={zeta_bar}");
        for e in &d.events {
            root_contract(&g, e);
            assert!(e.zeta_star <= zeta_bar);
            assert_eq!(e.sign_before, 1);
        }
    }
}

#[test]
fn events_change_sign_around_bracket() {
    let (g, i, j) = hub_versus_clique(7, 2, 2.0).unwrap();
    let curve = PairCurve::new(&decompose(&g).unwrap(), i, j, Measure::C).unwrap();
    let d = curve.detect(&default_grid()).unwrap();
    assert_eq!(d.events.len(), 1);
    let e = d.events[0];
    let eps = e.bracket.1 - e.bracket.0;
    assert!(curve.value(e.bracket.0 - eps) > 0.0);
    assert!(curve.value(e.bracket.1 + eps) < 0.0);
    root_contract(&g, &e);
}

#[test]
fn linear_heuristic_examples() {
    assert!((linear_from_counts(2.0, -10.0).unwrap() - 0.3).abs() < 1e-15);
    assert_eq!(linear_from_counts(0.0, -10.0), None);
    assert_eq!(linear_from_counts(2.0, 10.0), None);
    // Equal degrees: the linear term vanishes.
    let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    assert_eq!(heuristic_linear(&p4, 1, 2, Measure::C).unwrap(), None);
    assert_eq!(heuristic_linear(&p4, 0, 3, Measure::R).unwrap(), None);
}

#[test]
fn linear_heuristic_matches_counts_on_unweighted_graph() {
    let (g, i, j) = hub_versus_clique(8, 2, 1.0).unwrap();
    let dk = g.degree(i) as f64 - g.degree(j) as f64;
    let dt = g.triangle_weight(i) - g.triangle_weight(j);
    let via_counts = linear_from_counts(dk, dt).unwrap();
    let via_walks = heuristic_linear(&g, i, j, Measure::C).unwrap().unwrap();
    assert!((via_counts - via_walks).abs() < 1e-12);
}

#[test]
fn linear_heuristic_tracks_weighted_crossings() {
    for (m, delta, s) in [(6, 2, 1.5), (8, 1, 2.0), (10, 2, 3.0)] {
        let (g, i, j) = hub_versus_clique(m, delta, s).unwrap();
        let d = detect(&g, i, j, Measure::C, &default_grid()).unwrap();
        assert_eq!(d.events.len(), 1);
        let h = heuristic_linear(&g, i, j, Measure::C).unwrap().unwrap();
        assert!((h - d.events[0].zeta_star).abs() < 0.05, "m={m} delta={delta} s={s}");
    }
}

#[test]
fn strength_rule_breaks_weight_scaling() {
    // Doubling every weight halves every crossing; the walk rule follows,
    // the strength rule does not.
    let (g1, i, j) = hub_versus_clique(8, 2, 1.0).unwrap();
    let (g2, _, _) = hub_versus_clique(8, 2, 2.0).unwrap();
    let w1 = heuristic_linear(&g1, i, j, Measure::C).unwrap().unwrap();
    let w2 = heuristic_linear(&g2, i, j, Measure::C).unwrap().unwrap();
    assert!((w2 - w1 / 2.0).abs() < 1e-12);
    let s2 = heuristic_linear_with(&g2, i, j, Measure::C, DegreeRule::Strength)
        .unwrap()
        .unwrap();
    assert!((s2 - w1 / 4.0).abs() < 1e-12);
}

#[test]
fn r_linear_heuristic() {
    let (g, i, j) = hub_versus_clique(8, 1, 1.0).unwrap();
    let sc = super::series::series_coefficients(&g, i, j, Measure::R, 3).unwrap();
    if let Some(h) = heuristic_linear(&g, i, j, Measure::R).unwrap() {
        assert!((h - 2.0 * sc.diffs[1] / -sc.diffs[2]).abs() < 1e-12);
        assert!(h > 0.0);
    } else {
        assert!(sc.diffs[1] * sc.diffs[2] >= 0.0);
    }
}

#[test]
fn poly_at_k0_has_one_root() {
    let (g, i, j) = hub_versus_clique(7, 2, 1.0).unwrap();
    let sc = super::series::series_coefficients(&g, i, j, Measure::C, 20).unwrap();
    let k0 = sc.k0.unwrap();
    let p = heuristic_poly(&g, i, j, Measure::C, k0).unwrap();
    assert_eq!(p.k0, k0);
    assert_eq!(p.descartes, 1);
    assert_eq!(p.roots.len(), 1);
    assert!(matches!(
        heuristic_poly(&g, i, j, Measure::C, k0 - 1),
        Err(Error::TruncationBelowSignChange { .. }) | Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn poly_rejects_symmetric_pairs() {
    let g = generate_complete(5).unwrap();
    assert!(matches!(
        heuristic_poly(&g, 0, 1, Measure::C, 6),
        Err(Error::NoSignChange(_))
    ));
}

#[test]
fn poly_roots_track_small_crossings() {
    let mut checked = 0;
    for seed in 0..400 {
        let g = generate_er(12, 0.35, seed, true).unwrap();
        let dec = decompose(&g).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                if i >= j || checked >= 10 {
                    continue;
                }
                let curve = PairCurve::new(&dec, i, j, Measure::C).unwrap();
                let d = curve.detect(&default_grid()).unwrap();
                let Some(first) = d.events.first() else { continue };
                if first.zeta_star > 0.3 {
                    continue;
                }
                let sc = super::series::series_coefficients(&g, i, j, Measure::C, 60).unwrap();
                let Some(k0) = sc.k0 else { continue };
                let p = heuristic_poly(&g, i, j, Measure::C, k0 + 3).unwrap();
                let best = p
                    .roots
                    .iter()
                    .map(|r| (r - first.zeta_star).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 0.05, "seed {seed} pair ({i},{j}): {:?} vs {}", p.roots, first.zeta_star);
                assert!(p.roots.len() <= p.descartes);
                checked += 1;
            }
        }
    }
    assert!(checked >= 3, "only {checked} pairs");
}

#[test]
fn companion_roots() {
    // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
    let r = poly_real_roots(&[6.0, -7.0, 0.0, 1.0]);
    assert_eq!(r.len(), 2);
    assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    assert!(poly_real_roots(&[1.0, 0.0, 1.0]).is_empty());
    assert!(poly_real_roots(&[0.0, 0.0, 2.0]).is_empty());
}

#[test]
fn spectral_derivatives_match_finite_differences() {
    let (g, i, j) = two_crossings(10, 5, 5, 1.0).unwrap();
    let curve = PairCurve::new(&decompose(&g).unwrap(), i, j, Measure::C).unwrap();
    let z = 0.4;
    let h = 1e-4;
    let fd1 = (curve.value(z + h) - curve.value(z - h)) / (2.0 * h);
    let fd2 = (curve.value(z + h) - 2.0 * curve.value(z) + curve.value(z - h)) / (h * h);
    assert!((fd1 - curve.derivative(1, z)).abs() < 1e-6 * curve.derivative(1, z).abs().max(1.0));
    assert!((fd2 - curve.derivative(2, z)).abs() < 1e-4 * curve.derivative(2, z).abs().max(1.0));
    let c = |zeta: f64| {
        let v = circulability(&g, zeta).unwrap();
        v[i] - v[j]
    };
    assert!((c(z) - curve.value(z)).abs() < 1e-10);
}

#[test]
fn shifted_expansion_finds_second_crossing() {
    let (g, i, j) = two_crossings(10, 5, 5, 1.0).unwrap();
    let d = detect(&g, i, j, Measure::C, &uniform_grid(0.005, 3.0, 600)).unwrap();
    assert_eq!(d.events.len(), 2, "{:?}", d.events);
    let next = shifted_expansion(&g, i, j, Measure::C, d.events[0].zeta_star, DEFAULT_SHIFT_ORDER)
        .unwrap()
        .expect("second crossing");
    assert!((next.predicted - d.events[1].zeta_star).abs() < 0.05);
    assert!((next.event.zeta_star - d.events[1].zeta_star).abs() < 1e-7);
    assert_eq!(next.event.method, Method::ShiftedExpansion);
    let after = shifted_expansion(&g, i, j, Measure::C, d.events[1].zeta_star, DEFAULT_SHIFT_ORDER).unwrap();
    assert!(after.is_none());
}

#[test]
fn shifted_expansion_absent_after_single_crossing() {
    let (g, i, j) = hub_versus_clique(7, 2, 2.0).unwrap();
    let d = detect(&g, i, j, Measure::C, &default_grid()).unwrap();
    assert_eq!(d.events.len(), 1);
    let r = shifted_expansion(&g, i, j, Measure::C, d.events[0].zeta_star, DEFAULT_SHIFT_ORDER).unwrap();
    assert!(r.is_none());
}

#[test]
fn finiteness_on_star_and_gap_dependence() {
    let g = generate_star(5).unwrap();
    let Finiteness::Bounded { zeta_bar } = finiteness_check(&g, 0, 1).unwrap() else {
        panic!()
    };
    assert!(zeta_bar < 2.0);
    let d = detect(&g, 0, 1, Measure::C, &uniform_grid(0.01, zeta_bar + 1.0, 300)).unwrap();
    assert!(d.events.is_empty());

    // Same pair geometry, larger spectral gap from a denser clique.
    let bound = |m: usize| {
        let (g, i, j) = hub_versus_clique(m, 2, 1.0).unwrap();
        let gap = decompose(&g).unwrap().gap();
        match finiteness_check(&g, i, j).unwrap() {
            Finiteness::Bounded { zeta_bar } => (gap, zeta_bar),
            Finiteness::Undecidable => panic!(),
        }
    };
    let (gap_small, bar_small) = bound(5);
    let (gap_large, bar_large) = bound(10);
    assert!(gap_large > gap_small);
    assert!(bar_large < bar_small);
}

#[test]
fn monotone_dominance_means_no_events() {
    // Hub of a star dominates a leaf in every walk count.
    let g = generate_star(6).unwrap();
    let sc = super::series::series_coefficients(&g, 0, 2, Measure::C, 60).unwrap();
    assert!(sc.diffs.iter().all(|&d| d >= 0.0));
    assert_eq!(sc.k0, None);
    for m in Measure::ALL {
        assert!(detect(&g, 0, 2, m, &default_grid()).unwrap().events.is_empty());
    }
}

#[test]
fn all_pairs_scan_and_csv() {
    let g = generate_er(30, 0.15, 12, true).unwrap();
    let seq = scan_all_pairs(&g, Measure::C, &default_grid(), Execution::Sequential).unwrap();
    let par = scan_all_pairs(&g, Measure::C, &default_grid(), Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    for e in &seq {
        root_contract(&g, e);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.csv");
    write_events_csv(&seq, g.labels(), &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), seq.len() + 1);
    assert!(text.starts_with("i,j,measure,method,zeta_star,bracket_lo,bracket_hi\n"));
}

#[test]
fn transmissibility_and_risk_pairs() {
    let (g, i, j) = hub_versus_clique(8, 1, 1.5).unwrap();
    for m in [Measure::R, Measure::T] {
        let d = detect(&g, i, j, m, &uniform_grid(0.01, 3.0, 300)).unwrap();
        for e in &d.events {
            root_contract(&g, e);
        }
    }
}

#[test]
fn method_labels() {
    assert_eq!(Method::PolyHeuristic(5).to_string(), "poly-heuristic(5)");
    assert_eq!(Method::GridBisection.to_string(), "grid-bisection");
}
