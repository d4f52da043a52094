use berezin_plancherel::symbolic::{
    component_by_cascade, component_closed_form, enumerate_support, gk_density, gk_density_elementary, int, large_alpha_integrand, rat,
    vanishing_analysis, AffineForm, GammaFactorExpr, SeriesConstants, WeightStatus,
};
use berezin_plancherel::ComplexValue;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

fn imag(ys: &[f64]) -> Vec<ComplexValue> {
    ys.iter().map(|&y| c(0.0, y)).collect()
}

fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

#[test]
fn evaluate_trivial_expressions() {
    assert_eq!(GammaFactorExpr::one(2).evaluate(c(1.3, 0.0), &imag(&[0.2, 0.7])).unwrap(), c(1.0, 0.0));
    let mut e = GammaFactorExpr::one(1);
    e.push_gamma(AffineForm::s(0, 1), 1);
    e.push_gamma(AffineForm::s(0, 1), -1);
    let e = e.normalize();
    assert!(e.gamma_factors.is_empty());
    assert!((e.evaluate(c(0.0, 0.0), &imag(&[0.3])).unwrap() - 1.0).norm() < 1e-15);
}

#[test]
fn gk_density_examples() {
    let c13 = SeriesConstants::new(1, 3).unwrap();
    let v = gk_density(&c13).evaluate(c(0.0, 0.0), &imag(&[0.7])).unwrap();
    assert!((v - 0.49).norm() < 1e-12);
    assert!((gk_density_elementary(&c13, &imag(&[0.7])).unwrap() - 0.49).norm() < 1e-12);

    // p=1, q=2: s·tan(πs) form, y·tanh(πy) on the imaginary axis.
    let c12 = SeriesConstants::new(1, 2).unwrap();
    for y in [0.3, 1.1, 2.5] {
        let g = gk_density(&c12).evaluate(c(0.0, 0.0), &imag(&[y])).unwrap();
        let exact = y * (std::f64::consts::PI * y).tanh();
        assert!((g.re - exact).abs() < 1e-12 * exact && g.im.abs() < 1e-12);
    }
    assert!(gk_density_elementary(&c12, &[c(0.0, 0.0)]).unwrap().norm() < 1e-15);

    // p=q=2: the first product cancels to one.
    let c22 = SeriesConstants::new(2, 2).unwrap();
    assert!(gk_density(&c22).gamma_factors.iter().all(|g| g.form.c0 != int(0) || g.form.c_s.iter().filter(|x| **x != int(0)).count() != 1));

    let c24 = SeriesConstants::new(2, 4).unwrap();
    let s = imag(&[1.0, 2.0]);
    assert!(rel(gk_density(&c24).evaluate(c(0.0, 0.0), &s).unwrap(), gk_density_elementary(&c24, &s).unwrap()) < 1e-10);
}

#[test]
fn large_alpha_integrand_examples() {
    let c13 = SeriesConstants::new(1, 3).unwrap();
    let v = large_alpha_integrand(&c13).evaluate(c(6.0, 0.0), &imag(&[0.5])).unwrap();
    assert!(v.re > 0.0 && v.im.abs() < 1e-12 * v.re);
    let z = large_alpha_integrand(&c13).evaluate(c(0.0, 0.0), &imag(&[0.5])).unwrap();
    assert_eq!(z, c(0.0, 0.0));
}

#[test]
fn substitution_and_residues() {
    // Γ(s₁+s₂) with s₁ ↦ α−2 is Γ(α−2+s₂).
    let mut e = GammaFactorExpr::one(2);
    e.push_gamma(AffineForm::s(0, 2) + AffineForm::s(1, 2), 1);
    let sub = e.substitute(0, &(AffineForm::alpha(1).shift(int(-2)))).unwrap();
    assert_eq!(sub.gamma_factors.len(), 1);
    assert_eq!(sub.gamma_factors[0].form, (AffineForm::alpha(1) + AffineForm::s(0, 1)).shift(int(-2)));

    // (s₁−α+2) with s₁ ↦ α−2 is identically zero.
    let mut p = GammaFactorExpr::one(1);
    p.push_poly((AffineForm::s(0, 1) - AffineForm::alpha(1)).shift(int(2)), 1);
    assert!(p.substitute(0, &AffineForm::alpha(0).shift(int(-2))).unwrap().is_identically_zero());

    // Res_{s=0} Γ(s) = 1.
    let mut g = GammaFactorExpr::one(1);
    g.push_gamma(AffineForm::s(0, 1), 1);
    let r = g.residue_step(0, &AffineForm::zero(0)).unwrap();
    assert!((r.evaluate(c(0.7, 0.0), &[]).unwrap() - 1.0).norm() < 1e-15);

    // Γ(½(α−h+1+s))Γ(½(α−h+1−s)) at s = −(α−h+1): residue 2Γ(α−h+1), against a numeric limit.
    let h = 2;
    let a = AffineForm::alpha(1).shift(int(1 - h));
    let mut e = GammaFactorExpr::one(1);
    e.push_gamma((a.clone() + AffineForm::s(0, 1)) * rat(1, 2), 1);
    e.push_gamma((a.clone() - AffineForm::s(0, 1)) * rat(1, 2), 1);
    let pole = -AffineForm::alpha(0).shift(int(1 - h));
    let res = e.residue_step(0, &pole).unwrap();
    let alpha = 3.7;
    let s0 = -(alpha - h as f64 + 1.0);
    let eps = 1e-6;
    let limit = e.evaluate(c(alpha, 0.0), &[c(s0 + eps, 0.0)]).unwrap() * eps;
    let exact = res.evaluate(c(alpha, 0.0), &[]).unwrap();
    assert!(rel(limit, exact) < 1e-5);
    let two_gamma = 2.0 * berezin_plancherel::gamma_special::gamma_real(alpha - h as f64 + 1.0).unwrap();
    assert!((exact.re - two_gamma).abs() < 1e-12 * two_gamma);
}

#[test]
fn expression_json_round_trip() {
    let c25 = SeriesConstants::new(2, 5).unwrap();
    for e in [large_alpha_integrand(&c25), gk_density(&c25), component_closed_form(&c25, 0.5, 1, &[0]).unwrap().1] {
        let text = serde_json::to_string(&e).unwrap();
        let back: GammaFactorExpr = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, ["const", "two_pow", "pi_pow", "gammas", "polys"]);
    }
    let bad = r#"{"const":"1","two_pow":{"c0":"0","c_alpha":"0","c_s":[]},"pi_pow":0,"gammas":[{"form":{"c0":"1","c_alpha":"0","c_s":[]},"mult":0}],"polys":[]}"#;
    assert!(serde_json::from_str::<GammaFactorExpr>(bad).is_err());
}

#[test]
fn support_examples() {
    let c15 = SeriesConstants::new(1, 5).unwrap();
    assert_eq!(enumerate_support(&c15, 0.5), vec![(0, vec![]), (1, vec![0])]);
    let c13 = SeriesConstants::new(1, 3).unwrap();
    assert_eq!(enumerate_support(&c13, 2.5), vec![(0, vec![])]);
    let c26 = SeriesConstants::new(2, 6).unwrap();
    assert!(enumerate_support(&c26, -1.0).contains(&(2, vec![0, 0])));
}

#[test]
fn component_examples() {
    // m=0 reproduces the large-α integrand.
    let c25 = SeriesConstants::new(2, 5).unwrap();
    let (w, d) = component_closed_form(&c25, 1.7, 0, &[]).unwrap();
    let s = imag(&[0.4, 1.3]);
    let a = c(1.7, 0.0);
    assert!(rel(d.evaluate(a, &s).unwrap() * w, large_alpha_integrand(&c25).evaluate(a, &s).unwrap()) < 1e-12);
    let (wc, dc) = component_by_cascade(&c25, 1.7, 0, &[]).unwrap();
    assert!(rel(dc.evaluate(a, &s).unwrap() * wc, d.evaluate(a, &s).unwrap() * w) < 1e-12);

    // p=2, α=1: E₀ vanishes.
    let c24 = SeriesConstants::new(2, 4).unwrap();
    assert_eq!(component_closed_form(&c24, 1.0, 0, &[]).unwrap().0, 0.0);

    // p=1, q=3, α=−1, m=1: a pure constant.
    let c13 = SeriesConstants::new(1, 3).unwrap();
    let (w, d) = component_by_cascade(&c13, -1.0, 1, &[0]).unwrap();
    assert_eq!(d.nvars(), 0);
    assert!(!d.depends_on_s() && w.is_finite() && w > 0.0);

    // p=1, q=5, α=0.5: cascade and closed form agree at random imaginary points.
    let c15 = SeriesConstants::new(1, 5).unwrap();
    let (wc, _) = component_by_cascade(&c15, 0.5, 1, &[0]).unwrap();
    let (wf, _) = component_closed_form(&c15, 0.5, 1, &[0]).unwrap();
    assert!((wc - wf).abs() < 1e-9 * wf.abs());
}

#[test]
fn vanishing_examples() {
    let c24 = SeriesConstants::new(2, 4).unwrap();
    let r = vanishing_analysis(&c24, 1.0).unwrap();
    for e in &r.entries {
        let expect = e.m >= 1 && e.u[0] == 0;
        assert_eq!(e.status == WeightStatus::Nonzero, expect, "{:?}", (e.m, &e.u));
    }
    let c13 = SeriesConstants::new(1, 3).unwrap();
    let live: Vec<_> = vanishing_analysis(&c13, -1.0).unwrap().entries.into_iter().filter(|e| e.status == WeightStatus::Nonzero).map(|e| (e.m, e.u)).collect();
    assert_eq!(live, vec![(1, vec![0])]);
    let c15 = SeriesConstants::new(1, 15).unwrap();
    assert!(vanishing_analysis(&c15, 5.5).unwrap().entries.iter().all(|e| e.status == WeightStatus::Nonzero));
}

fn pq() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=2).prop_flat_map(|p| (Just(p), p..=6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn substitute_then_evaluate(alpha in 0.5f64..6.0, y1 in -3.0f64..3.0, y2 in -3.0f64..3.0, shift in -3i64..3) {
        let c24 = SeriesConstants::new(2, 4).unwrap();
        let e = large_alpha_integrand(&c24);
        let value = AffineForm::alpha(1).shift(int(shift)) * rat(1, 3) + AffineForm::s(0, 1);
        let sub = e.substitute(0, &value).unwrap();
        let rest = vec![c(y1, y2)];
        let plugged = vec![value.eval(c(alpha, 0.0), &rest), rest[0]];
        let a = e.evaluate(c(alpha, 0.0), &plugged);
        let b = sub.evaluate(c(alpha, 0.0), &rest);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(rel(a, b) < 1e-12);
        }
    }

    #[test]
    fn weyl_symmetry((p, q) in pq(), alpha in 3.0f64..9.0, ys in prop::collection::vec(-4.0f64..4.0, 2), flip in any::<bool>()) {
        let cst = SeriesConstants::new(p, q).unwrap();
        let e = large_alpha_integrand(&cst);
        let s = imag(&ys[..p]);
        let mut t = s.clone();
        t[0] = if flip { -t[0] } else { t[0] };
        t.reverse();
        let a = e.evaluate(c(alpha, 0.0), &s).unwrap();
        let b = e.evaluate(c(alpha, 0.0), &t).unwrap();
        prop_assert!(rel(a, b) < 1e-10);
        // Non-negative real on the imaginary axis.
        prop_assert!(a.re >= 0.0 && a.im.abs() <= 1e-10 * a.re.max(1e-300));
    }

    #[test]
    fn gk_dual_forms((p, q) in pq(), ys in prop::collection::vec(0.05f64..5.0, 2)) {
        let cst = SeriesConstants::new(p, q).unwrap();
        let s = imag(&ys[..p]);
        prop_assume!(p == 1 || (ys[0] - ys[1]).abs() > 1e-3);
        let a = gk_density(&cst).evaluate(c(0.0, 0.0), &s).unwrap();
        let b = gk_density_elementary(&cst, &s).unwrap();
        prop_assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn m0_always_present_and_alone_above_threshold((p, q) in pq(), alpha in -4.0f64..8.0) {
        let cst = SeriesConstants::new(p, q).unwrap();
        let sup = enumerate_support(&cst, alpha);
        prop_assert_eq!(&sup[0], &(0usize, Vec::<u64>::new()));
        if alpha > cst.half_sum_f64() - 1.0 {
            prop_assert_eq!(sup.len(), 1);
        }
    }
}
