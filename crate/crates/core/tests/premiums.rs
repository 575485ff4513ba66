mod common;

use common::{catalog, cfg, spec};
use levy_stein::actuarial::{esscher_closed, gini, wpcp, wpcp_definition_oracle};
use levy_stein::catalog::Family;
use levy_stein::mc::{MCConfig, Method};
use levy_stein::special::gamma;
use levy_stein::testfn::TestFn;

#[test]
fn wpcp_matches_definition_for_every_family() {
    let mc = MCConfig::with_samples(50_000, 61);
    for base in catalog() {
        let mean = base.mean_closed();
        for w in [TestFn::ExpTilt(0.5), TestFn::Affine(5.0, 1.0), TestFn::Const(1.0)] {
            let h = wpcp(&base, w, &mc, &cfg()).unwrap();
            assert_eq!(h.method, Method::Numeric);
            let o = wpcp_definition_oracle(&base, w, &mc).unwrap();
            let se = h.std_error.unwrap().hypot(o.std_error);
            assert!((h.value - o.value).abs() <= 4.0 * se + 1e-9, "{} {w}: {h:?} vs {o:?}", base.name());
            // monotone weights load the premium
            assert!(h.value >= mean - 4.0 * h.std_error.unwrap() - 1e-9, "{} {w}", base.name());
        }
        let net = wpcp(&base, TestFn::Const(1.0), &mc, &cfg()).unwrap();
        assert!((net.value - mean).abs() <= 1e-8 * mean.abs().max(1.0), "{}", base.name());
    }
}

#[test]
fn esscher_closed_matches_numeric_for_every_family() {
    let mc = MCConfig::with_samples(20_000, 62);
    for base in catalog() {
        let k = 0.5;
        let closed = esscher_closed(&base, k).unwrap();
        assert_eq!(closed.method, Method::ClosedForm);
        let num = wpcp(&base, TestFn::ExpTilt(k), &mc, &cfg()).unwrap();
        let tol = 4.0 * num.std_error.unwrap() + 1e-8 * closed.value.abs();
        assert!((closed.value - num.value).abs() <= tol, "{}: {} vs {}", base.name(), closed.value, num.value);
        let small = esscher_closed(&base, 1e-6).unwrap().value;
        let mean = base.mean_closed();
        assert!((small - mean).abs() <= 1e-4 * mean.abs(), "{}", base.name());
    }
}

#[test]
fn gini_methods_agree_for_positive_mean_families() {
    let mc = MCConfig::with_samples(50_000, 63);
    for base in catalog() {
        assert!(base.mean_closed() > 0.0);
        let g = gini(&base, &mc, &cfg()).unwrap();
        assert!(g.z.abs() <= 4.0, "{}: {g:?}", base.name());
        assert!(!g.warnings.is_empty());
        assert_eq!(g.label.is_some(), !base.is_nonnegative(), "{}", base.name());
        if base.is_nonnegative() {
            let v = g.levy_formula.value;
            assert!((0.0..=1.0).contains(&v), "{}: {v}", base.name());
        }
    }
}

#[test]
fn gamma_gini_decreases_with_shape() {
    let mc = MCConfig::with_samples(50_000, 64);
    let mut prev = f64::INFINITY;
    for a in [0.5, 2.0, 8.0] {
        let g = gini(&spec(Family::Gamma { a, b: 1.0 }), &mc, &cfg()).unwrap();
        let closed = gamma(a + 0.5) / (gamma(a + 1.0) * std::f64::consts::PI.sqrt());
        assert!(g.levy_formula.estimate().within(closed, 4.0), "a={a}: {g:?} vs {closed}");
        assert!(g.levy_formula.value < prev);
        prev = g.levy_formula.value;
    }
}
