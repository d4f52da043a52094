use berezin_plancherel::berezin::berezin_admissible;
use berezin_plancherel::geometry::TorusCoord;
use berezin_plancherel::plancherel::{
    calibrate_constant, continuity_probe, decomposition_report, live_labels, reconstruct, support_changes, Budget, Calibration,
    DEFAULT_ALPHA_REF,
};
use berezin_plancherel::quadrature::AxisRule;
use berezin_plancherel::spherical::KAverage;
use berezin_plancherel::symbolic::{SeriesConstants, SupportLabel};
use berezin_plancherel::{ComplexValue, Error};
use proptest::prelude::*;

fn budget(rule: AxisRule) -> Budget {
    Budget::new(KAverage::RankOne { nodes: 64 }, 200, rule)
}

fn calibrated(p: usize, q: usize, rule: AxisRule) -> (SeriesConstants, Calibration) {
    let c = SeriesConstants::new(p, q).unwrap();
    let cal = calibrate_constant(&c, DEFAULT_ALPHA_REF, &budget(rule)).unwrap();
    (c, cal)
}

/// Labels `(m, u)` with `u` non-decreasing and `α < (p+q)/2 − τ − 2u_τ` for every `τ ≤ m`.
fn oracle_support(p: usize, q: usize, alpha: f64) -> Vec<SupportLabel> {
    let h = (p + q) as f64 / 2.0;
    let mut out: Vec<SupportLabel> = vec![(0, vec![])];
    fn extend(prefix: &mut Vec<u64>, m: usize, alpha: f64, h: f64, out: &mut Vec<SupportLabel>) {
        if prefix.len() == m {
            out.push((m, prefix.clone()));
            return;
        }
        let lo = prefix.last().copied().unwrap_or(0);
        let tau = prefix.len() + 1;
        let mut u = lo;
        while alpha < h - tau as f64 - 2.0 * u as f64 {
            prefix.push(u);
            extend(prefix, m, alpha, h, out);
            prefix.pop();
            u += 1;
        }
    }
    for m in 1..=p {
        extend(&mut Vec::new(), m, alpha, h, &mut out);
    }
    out.sort();
    out
}

#[test]
fn calibration_is_stable_and_positive() {
    let c = SeriesConstants::new(1, 3).unwrap();
    let b = budget(AxisRule::GaussLegendre);
    let c6 = calibrate_constant(&c, 6.0, &b).unwrap();
    let c9 = calibrate_constant(&c, 9.0, &b).unwrap();
    assert!(c6.c > 0.0 && c9.c > 0.0);
    assert!((c6.c - c9.c).abs() <= 1e-6 * c9.c, "{} vs {}", c6.c, c9.c);
    assert!((c9.c - 1.0 / (8.0 * std::f64::consts::PI)).abs() < 1e-9);
    assert!(calibrate_constant(&c, 0.5, &b).is_err());
}

#[test]
fn reconstruction_above_the_lines() {
    let (c, cal) = calibrated(1, 3, AxisRule::GaussLegendre);
    let r = reconstruct(&c, 6.0, &TorusCoord::new(vec![0.8]), &cal, &budget(AxisRule::GaussLegendre)).unwrap();
    assert!(r.rel_error <= 1e-3, "{}", r.rel_error);
    assert!(r.within_budget);
    assert_eq!(r.per_component.iter().filter(|x| x.weight != 0.0).count(), 1);

    let r0 = reconstruct(&c, DEFAULT_ALPHA_REF, &TorusCoord::new(vec![0.0]), &cal, &budget(AxisRule::GaussLegendre)).unwrap();
    assert!(r0.within_budget && r0.rel_error < 1e-10);
}

#[test]
fn single_discrete_component_by_monte_carlo() {
    let (c, cal) = calibrated(1, 3, AxisRule::GaussLegendre);
    assert_eq!(live_labels(&c, -1.0).unwrap(), vec![(1, vec![0])]);
    let mc = Budget::new(KAverage::MonteCarlo { samples: 100_000, seed: 11 }, 200, AxisRule::GaussLegendre);
    for t in [0.3, 0.7] {
        let r = reconstruct(&c, -1.0, &TorusCoord::new(vec![t]), &cal, &mc).unwrap();
        assert!((r.lhs - t.cosh()).abs() < 1e-14);
        assert!(r.abs_error <= 3.0 * r.std_error, "t={t}: {} vs {}", r.abs_error, r.std_error);
    }
}

#[test]
fn continuity_across_a_line() {
    let (c, cal) = calibrated(1, 4, AxisRule::GradedGaussLegendre);
    let probe = continuity_probe(&c, 0, &TorusCoord::new(vec![0.5]), &cal, &budget(AxisRule::GradedGaussLegendre)).unwrap();
    assert_eq!(probe.alpha0, 1.5);
    assert!(probe.gaps_shrinking);
    let gap = |d: f64| probe.steps.iter().find(|s| s.delta == d).unwrap().gap;
    assert!(gap(0.01) < gap(0.05));
    for s in &probe.steps {
        assert!(s.below.within_budget && s.above.within_budget);
    }
}

#[test]
fn equal_indices_are_rejected() {
    let c = SeriesConstants::new(2, 2).unwrap();
    assert!(matches!(decomposition_report(&c, 1.0), Err(Error::Degenerate(_))));
    let b = budget(AxisRule::GaussLegendre);
    let cal = Calibration { c: 1.0, alpha_ref: 9.0, integral: 1.0, truncation_bound: 0.0, grid: berezin_plancherel::quadrature::AxisGrid::new(8.0, 16, AxisRule::GaussLegendre).unwrap() };
    assert!(continuity_probe(&c, 0, &TorusCoord::new(vec![0.1, 0.2]), &cal, &b).is_err());
}

#[test]
fn decomposition_examples() {
    let c = SeriesConstants::new(2, 10).unwrap();
    let at = |alpha: f64| decomposition_report(&c, alpha).unwrap();
    let d = at(4.9);
    let labels: Vec<SupportLabel> = d.components.iter().map(|x| (x.m, x.u.clone())).collect();
    assert_eq!(labels, vec![(0, vec![]), (1, vec![0])]);
    assert!((d.components[1].fixed_coordinates[0] - (4.9 - 5.0)).abs() < 1e-14);

    let d = at(2.9);
    let one_one = d.components.iter().find(|x| x.m == 1 && x.u == vec![1]).expect("(1,[1]) present");
    assert!((one_one.fixed_coordinates[0] - (2.9 - 3.0)).abs() < 1e-14);

    // The first all-discrete component appears below (q−p)/2 = 4.
    assert!(at(4.1).components.iter().all(|x| x.m < 2));
    let d = at(3.9);
    let full = d.components.iter().find(|x| x.m == 2).expect("m = 2 present");
    assert_eq!(full.u, vec![0, 0]);
    for (k, s) in full.fixed_coordinates.iter().enumerate() {
        assert!((s - (3.9 - 6.0 + (k + 1) as f64)).abs() < 1e-14);
    }
}

#[test]
fn support_matches_the_rule_and_changes_in_order() {
    for (p, q) in [(1, 3), (1, 6), (2, 5), (2, 8), (2, 10), (3, 7)] {
        for i in 0..40 {
            let alpha = 6.3 - 0.25 * i as f64;
            if (alpha.fract()).abs() < 1e-9 {
                continue;
            }
            let mut got = live_labels(&SeriesConstants::new(p, q).unwrap(), alpha).unwrap();
            got.sort();
            assert_eq!(got, oracle_support(p, q, alpha), "({p},{q}) α={alpha}");
        }
    }
    let c = SeriesConstants::new(2, 8).unwrap();
    let ch = support_changes(&c, &[4.5, 3.5, 2.5, 1.5, 0.5]).unwrap();
    let added: Vec<Vec<SupportLabel>> = ch.iter().map(|x| x.added.clone()).collect();
    assert_eq!(added, vec![vec![(1, vec![0])], vec![(2, vec![0, 0])], vec![(1, vec![1])], vec![(2, vec![0, 1]), (2, vec![1, 1])]]);
    assert!(ch.iter().all(|x| x.removed.is_empty()));
}

#[test]
fn weights_and_densities_positive_when_admissible() {
    let mut checked = 0;
    for (p, q) in [(1, 2), (1, 3), (1, 5), (2, 3), (2, 6), (2, 7)] {
        let c = SeriesConstants::new(p, q).unwrap();
        for i in 0..16 {
            let alpha = -2.35 + 0.5 * i as f64;
            if !berezin_admissible(alpha, p) {
                continue;
            }
            for comp in decomposition_report(&c, alpha).unwrap().components.iter().filter(|x| !x.vanishes) {
                assert!(comp.weight.re > 0.0, "({p},{q}) α={alpha} {:?}", (comp.m, &comp.u));
                let dims = p - comp.m;
                for y in [0.1, 0.9, 2.7] {
                    let s = vec![ComplexValue::new(0.0, y); dims];
                    let s: Vec<ComplexValue> = s.iter().enumerate().map(|(k, v)| v * (1.0 + 0.37 * k as f64)).collect();
                    let v = comp.residual_density.evaluate(ComplexValue::new(alpha, 0.0), &s).unwrap();
                    assert!(v.re > 0.0 && v.im.abs() <= 1e-10 * v.re, "({p},{q}) α={alpha} y={y}: {v}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn every_reconstruction_is_within_budget() {
    let cases: [(usize, usize, AxisRule, &[f64]); 4] = [
        (1, 3, AxisRule::GaussLegendre, &[9.0, 6.0, 2.5, 0.5, -1.0]),
        (1, 4, AxisRule::GradedGaussLegendre, &[5.0, 1.3, 0.7]),
        (1, 5, AxisRule::GradedGaussLegendre, &[7.0, 1.2, 0.4]),
        (1, 6, AxisRule::GradedGaussLegendre, &[8.0, 2.2, 0.6]),
    ];
    for (p, q, rule, alphas) in cases {
        let (c, cal) = calibrated(p, q, rule);
        for &alpha in alphas {
            for t in [0.0, 0.4, 1.0] {
                let r = reconstruct(&c, alpha, &TorusCoord::new(vec![t]), &cal, &budget(rule)).unwrap();
                assert!(r.within_budget, "({p},{q}) α={alpha} t={t}: {} > {}", r.abs_error, r.error_budget);
                assert!(r.rel_error < 1e-8, "({p},{q}) α={alpha} t={t}: {}", r.rel_error);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_grows_as_alpha_decreases(p in 1usize..=3, extra in 0usize..6, a in -3.0f64..8.0, d in 0.05f64..3.0) {
        let q = p + extra;
        let c = SeriesConstants::new(p, q).unwrap();
        let near_int = |x: f64| (x - x.round()).abs() < 1e-6;
        prop_assume!(!near_int(a) && !near_int(a - d));
        let upper = live_labels(&c, a).unwrap();
        let lower = live_labels(&c, a - d).unwrap();
        for l in &upper {
            prop_assert!(lower.contains(l), "{:?} live at {} but not at {}", l, a, a - d);
        }
    }
}
