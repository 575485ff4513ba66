mod common;

use common::{catalog, cfg, cgmy, eta_integral, spec};
use levy_stein::catalog::{Family, VgdAltParams};
use levy_stein::error::Error;
use levy_stein::mc::{run, MCConfig};
use levy_stein::task::round12;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn cf_is_hermitian_and_bounded_on_a_grid() {
    for s in catalog() {
        assert_eq!(s.cf(0.0), Complex64::new(1.0, 0.0));
        for i in 0..200 {
            let t = -20.0 + 40.0 * i as f64 / 199.0;
            let (a, b) = (s.cf(t), s.cf(-t));
            assert!((a - b.conj()).norm() < 1e-14, "{}", s.name());
            assert!(a.norm() <= 1.0 + 1e-14);
        }
    }
}

#[test]
fn sampler_moments_match_cumulants() {
    let mc = MCConfig::with_samples(1_000_000, 21);
    for s in catalog() {
        let (m, v) = (s.cumulant(1, &cfg()).unwrap(), s.cumulant(2, &cfg()).unwrap());
        let sampler = s.sampler();
        let st = run::<2, _>(&mc, |r| {
            let x = sampler.sample(r);
            let d = x - m;
            [x, d * d]
        });
        assert!(st.estimate(0).within(m, 4.0), "{} mean {:?} vs {m}", s.name(), st.estimate(0));
        assert!(st.estimate(1).within(v, 4.0), "{} var {:?} vs {v}", s.name(), st.estimate(1));
    }
}

#[test]
fn cdf_limits_and_monotonicity() {
    for s in catalog() {
        let m = s.mean_closed();
        let sd = s.variance().sqrt();
        let lo = s.cdf(m - 40.0 * sd - 40.0, &cfg()).unwrap();
        let hi = s.cdf(m + 40.0 * sd + 40.0, &cfg()).unwrap();
        assert!(lo < 1e-6 && hi > 1.0 - 1e-6, "{}: {lo} {hi}", s.name());
        let mut prev = 0.0;
        for i in 0..=80 {
            let x = m - 6.0 * sd + 12.0 * sd * i as f64 / 80.0;
            let f = s.cdf(x, &cfg()).unwrap();
            assert!(f >= prev - 1e-9, "{} at {x}", s.name());
            prev = f;
        }
    }
}

#[test]
fn cdf_table_matches_sampler_for_every_family() {
    let mc = MCConfig::with_samples(200_000, 33);
    for s in catalog() {
        let table = s.cdf_table(&cfg()).unwrap();
        let sampler = s.sampler();
        let mut xs: Vec<f64> = (0..mc.n_samples)
            .scan(<levy_stein::mc::McRng as rand::SeedableRng>::seed_from_u64(mc.seed), |r, _| {
                Some(sampler.sample(r))
            })
            .collect();
        let d = table.ks_distance(&mut xs);
        // Kolmogorov 99.99% critical value at n = 2·10⁵ is about 0.0044
        assert!(d < 0.0044, "{}: KS {d}", s.name());
    }
}

#[test]
fn bias_density_normalizes_and_fubini_holds() {
    for s in catalog() {
        let mu = s.measure();
        for k in 1..=3u32 {
            let c = mu.moment(k + 1, &cfg()).unwrap();
            let total = eta_integral(mu, k);
            assert!((total - c).abs() <= 1e-6 * c.abs(), "{} k={k}: {total} vs {c}", s.name());
            match mu.bias(k, &cfg()) {
                Ok(b) => {
                    assert!((b.normalizer - c).abs() <= 1e-12 * c.abs());
                    let norm = total / b.normalizer;
                    assert!((norm - 1.0).abs() < 1e-6, "{} k={k}: {norm}", s.name());
                    for y in [-1.3, -0.2, 0.4, 2.0] {
                        assert!(b.density(y, &cfg()).unwrap() >= 0.0);
                    }
                }
                Err(Error::SignedKernel { k: kk }) => {
                    assert!(mu.is_two_sided() && kk % 2 == 0 && kk == k);
                }
                Err(e) => panic!("{}: {e}", s.name()),
            }
        }
    }
}

#[test]
fn eta_is_monotone_on_the_positive_axis() {
    for s in catalog() {
        let mu = s.measure();
        if !mu.has_pos() {
            continue;
        }
        for k in 1..=3 {
            let vals: Vec<f64> = (1..=100).map(|i| mu.eta(k, 0.05 * i as f64, &cfg()).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[0] >= w[1]), "{} k={k}", s.name());
            assert!(*vals.last().unwrap() >= 0.0);
        }
    }
}

#[test]
fn closed_cumulants_match_quadrature() {
    for s in catalog() {
        for k in 1..=5 {
            let a = s.cumulant_closed(k).unwrap();
            let b = s.cumulant(k, &cfg()).unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300), "{} k={k}: {a} vs {b}", s.name());
        }
    }
}

#[test]
fn atomic_approximation_matches_quadrature() {
    for s in catalog() {
        let mu = s.measure();
        if mu.is_atomic() {
            continue;
        }
        let approx = mu.atomic_approximation(10_000, &cfg()).unwrap();
        for h in [|u: f64| u * u * (-u * u).exp(), |u: f64| u * u / (1.0 + u * u), |u: f64| u * u * u.cos()] {
            let exact = mu.integrate(h, levy_stein::levy::Region::Both, &cfg()).unwrap();
            let a = approx.integrate(h, levy_stein::levy::Region::Both, &cfg()).unwrap();
            assert!((a - exact).abs() <= 1e-3 * exact.abs(), "{}: {a} vs {exact}", s.name());
        }
    }
}

#[test]
fn cgmy_ks_against_inverted_cdf() {
    let s = cgmy();
    let table = s.cdf_table(&cfg()).unwrap();
    let sampler = s.sampler();
    let mut rng = <levy_stein::mc::McRng as rand::SeedableRng>::seed_from_u64(77);
    let mut xs: Vec<f64> = (0..1_000_000).map(|_| sampler.sample(&mut rng)).collect();
    let d = table.ks_distance(&mut xs);
    assert!(d <= 0.005, "KS {d}");
}

fn family_strategy() -> impl Strategy<Value = Family> {
    let pos = 0.2f64..4.0;
    prop_oneof![
        (pos.clone(), pos.clone()).prop_map(|(a, b)| Family::Gamma { a, b }),
        (pos.clone()).prop_map(|lambda| Family::Poisson { lambda }),
        (pos.clone(), pos.clone()).prop_map(|(alpha, lambda)| Family::InverseGaussian { alpha, lambda }),
        (pos.clone(), pos.clone(), pos.clone(), pos.clone()).prop_map(|(ap, lp, am, lm)| Family::Bgd {
            alpha_plus: ap,
            lambda_plus: lp,
            alpha_minus: am,
            lambda_minus: lm,
        }),
        (-1.0f64..1.0, pos.clone(), pos.clone(), pos.clone()).prop_map(|(m, a, lp, lm)| Family::Vgd {
            mu0: m,
            alpha: a,
            lambda_plus: lp,
            lambda_minus: lm,
        }),
        (pos.clone(), 0.0f64..0.95, pos.clone(), pos.clone()).prop_map(|(a, b, lp, lm)| Family::Cgmy {
            alpha: a,
            beta: b,
            lambda_plus: lp,
            lambda_minus: lm,
        }),
        (-1.0f64..1.0, 0.0f64..0.95, pos.clone(), pos.clone(), pos.clone(), pos).prop_map(
            |(mu, beta, ap, lp, am, lm)| Family::Gtsd {
                mu,
                beta,
                alpha_plus: ap,
                lambda_plus: lp,
                alpha_minus: am,
                lambda_minus: lm,
            }
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cf_hermitian_and_bounded(f in family_strategy(), t in -50.0f64..50.0) {
        let s = spec(f);
        let (a, b) = (s.cf(t), s.cf(-t));
        prop_assert!((a - b.conj()).norm() < 1e-13);
        prop_assert!(a.norm() <= 1.0 + 1e-13);
    }

    #[test]
    fn conv_power_semigroup(f in family_strategy(), s in 0.0f64..=1.0, r in 0.0f64..=1.0, t in -10.0f64..10.0) {
        let d = spec(f);
        let twice = d.conv_power(s).unwrap().conv_power(r).unwrap();
        let expected = (s * r * d.log_cf(t)).exp();
        prop_assert!((twice.cf(t) - expected).norm() < 1e-10);
    }

    #[test]
    fn eta_non_increasing(f in family_strategy(), k in 1u32..4, u1 in 0.01f64..5.0, du in 0.0f64..5.0) {
        let mu = spec(f);
        let mu = mu.measure();
        prop_assume!(mu.has_pos());
        let a = mu.eta(k, u1, &cfg()).unwrap();
        let b = mu.eta(k, u1 + du, &cfg()).unwrap();
        prop_assert!(a >= b - 1e-12 * a.abs());
        prop_assert!(b >= 0.0);
    }

    #[test]
    fn vgd_chart_round_trip(mu0 in -2.0f64..2.0, sigma2 in 0.05f64..5.0, r in 0.1f64..6.0, theta in -2.0f64..2.0) {
        let p = VgdAltParams { mu0, sigma2, r, theta };
        let back = VgdAltParams::from_family(&p.to_family().unwrap()).unwrap();
        prop_assert!((back.sigma2 - sigma2).abs() <= 1e-12 * sigma2.max(1.0));
        prop_assert!((back.theta - theta).abs() <= 1e-12 * theta.abs().max(1.0));
        prop_assert!((back.r - r).abs() <= 1e-12 * r);
        prop_assert_eq!(back.mu0, mu0);
    }

    #[test]
    fn rounding_is_idempotent_and_close(x in -1e12f64..1e12) {
        let r = round12(x);
        prop_assert_eq!(round12(r), r);
        prop_assert!((r - x).abs() <= 1e-11 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cdf_non_decreasing(f in family_strategy(), x in -5.0f64..5.0, dx in 0.0f64..3.0) {
        let s = spec(f);
        let a = s.cdf(x, &cfg()).unwrap();
        let b = s.cdf(x + dx, &cfg()).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(a <= b + 1e-8);
    }
}
