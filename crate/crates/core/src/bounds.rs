//! Cacoullos-type variance bounds
//!
//! Var(X)·(E g′(X+Y₁))² ≤ Var g(X) ≤ Var(X)·E g′(X+Y₁)²,
//!
//! with Y₁ the first bias variable, plus Chen's upper bound and the
//! conjugate-posterior instances.

use serde::Serialize;

use crate::catalog::{Family, IddSpec};
use crate::error::{Error, Result};
use crate::identities::{integrability_check, ORACLE_SALT};
use crate::mc::{run, MCConfig, MCEstimate, Method};
use crate::quadrature::{integrate_with_breaks, QuadratureConfig};
use crate::testfn::TestFn;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceBounds {
    pub lower: f64,
    pub upper: f64,
    /// Standard errors of each endpoint on the numeric path.
    pub lower_se: Option<f64>,
    pub upper_se: Option<f64>,
    /// Var g(X), exact on the closed path and by plain Monte Carlo otherwise.
    pub oracle: Option<MCEstimate>,
    pub method: Method,
}

impl VarianceBounds {
    /// Whether the oracle sits inside [lower − k·SE, upper + k·SE].
    pub fn brackets_oracle(&self, k: f64) -> bool {
        let Some(o) = self.oracle else { return true };
        let lo = self.lower - k * self.lower_se.unwrap_or(0.0).hypot(o.std_error);
        let hi = self.upper + k * self.upper_se.unwrap_or(0.0).hypot(o.std_error);
        lo <= o.value && o.value <= hi
    }
}

/// The law of Z = X + Y₁ when it is itself a catalog member.
pub fn shifted_law(base: &IddSpec) -> Option<IddSpec> {
    let family = match *base.family() {
        Family::Gamma { a, b } => Family::Gamma { a: a + 1.0, b },
        Family::Laplace { mu0, delta } => Family::Vgd {
            mu0,
            alpha: 2.0,
            lambda_plus: 1.0 / delta,
            lambda_minus: 1.0 / delta,
        },
        _ => return None,
    };
    IddSpec::new(family).ok()
}

/// Monte Carlo bounds with common random numbers for both endpoints; affine g
/// collapses the bracket to slope²·Var(X) exactly.
pub fn cacoullos_bounds(base: &IddSpec, g: TestFn, mc: &MCConfig, cfg: &QuadratureConfig) -> Result<VarianceBounds> {
    mc.validate()?;
    let var = base.variance();
    if let Some(slope) = g.slope_if_affine() {
        let v = slope * slope * var;
        return Ok(VarianceBounds {
            lower: v,
            upper: v,
            lower_se: None,
            upper_se: None,
            oracle: Some(MCEstimate::exact(v)),
            method: Method::ClosedForm,
        });
    }
    // E g′(X+Y₁)² needs twice the growth of g to be dominated
    let doubled = match g {
        TestFn::ExpTilt(k) => TestFn::ExpTilt(2.0 * k),
        other => other,
    };
    let check = integrability_check(base, 2, &doubled, cfg);
    if !check.passed {
        return Err(Error::DivergentMoment(check.detail));
    }
    let bias = base.measure().bias(1, cfg)?;
    let sampler = base.sampler();
    let st = run::<2, _>(mc, |rng| {
        let x = sampler.sample(rng);
        let d = g.d1(x + bias.sample(rng));
        [d, d * d]
    });
    let m = st.mean(0);
    let lower = st.delta(var * m * m, [2.0 * var * m, 0.0]);
    let upper = st.delta(var * st.mean(1), [0.0, var]);
    let oracle = variance_oracle(base, g, mc);
    if !(lower.value.is_finite() && upper.value.is_finite()) {
        return Err(Error::DivergentMoment(format!("E g′(X+Y₁)² is not finite for {g}")));
    }
    Ok(VarianceBounds {
        lower: lower.value,
        upper: upper.value,
        lower_se: Some(lower.std_error),
        upper_se: Some(upper.std_error),
        oracle: Some(oracle),
        method: Method::Numeric,
    })
}

/// Var g(X) by plain Monte Carlo on a stream independent of `mc.seed`.
pub fn variance_oracle(base: &IddSpec, g: TestFn, mc: &MCConfig) -> MCEstimate {
    let sampler = base.sampler();
    let st = run::<2, _>(&mc.independent(ORACLE_SALT), |rng| {
        let v = g.value(sampler.sample(rng));
        [v, v * v]
    });
    let m = st.mean(0);
    st.delta(st.mean(1) - m * m, [-2.0 * m, 1.0])
}

/// Closed-form bracket for Ga(a, b), where Z = X + Y₁ ~ Ga(a+1, b).
///
/// Available for affine g, g = x² and g = e^{κx} with 2κ < b.
pub fn gamma_bounds_closed(a: f64, b: f64, g: TestFn) -> Result<VarianceBounds> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("gamma bounds need a, b > 0, got a = {a}, b = {b}")));
    }
    let var = a / (b * b);
    let z = a + 1.0;
    let (e1, e2, truth) = match g {
        _ if g.slope_if_affine().is_some() => {
            let s = g.slope_if_affine().unwrap();
            (s, s * s, s * s * var)
        }
        TestFn::Square => {
            let m2 = a * (a + 1.0) / (b * b);
            let m4 = a * (a + 1.0) * (a + 2.0) * (a + 3.0) / b.powi(4);
            (2.0 * z / b, 4.0 * z * (z + 1.0) / (b * b), m4 - m2 * m2)
        }
        TestFn::ExpTilt(k) if 2.0 * k < b => {
            let mgf = |t: f64, shape: f64| (1.0 - t / b).powf(-shape);
            (
                k * mgf(k, z),
                k * k * mgf(2.0 * k, z),
                mgf(2.0 * k, a) - mgf(k, a).powi(2),
            )
        }
        _ => {
            return Err(Error::invalid(format!(
                "closed-form gamma bounds cover affine g, square and exp_tilt(κ) with 2κ < b; got {g}"
            )))
        }
    };
    Ok(VarianceBounds {
        lower: var * e1 * e1,
        upper: var * e2,
        lower_se: None,
        upper_se: None,
        oracle: Some(MCEstimate::exact(truth)),
        method: Method::ClosedForm,
    })
}

/// Chen's bound Var g(X) ≤ E ∫ (g(X+u) − g(X))² ν(du).
pub fn chen_upper_bound(base: &IddSpec, g: TestFn, mc: &MCConfig, cfg: &QuadratureConfig) -> Result<MCEstimate> {
    mc.validate()?;
    let doubled = match g {
        TestFn::ExpTilt(k) => TestFn::ExpTilt(2.0 * k),
        other => other,
    };
    let check = integrability_check(base, 2, &doubled, cfg);
    if !check.passed {
        return Err(Error::DivergentMoment(check.detail));
    }
    let rule = base.measure().density_rule(doubled.growth())?;
    let sampler = base.sampler();
    let st = run::<1, _>(mc, |rng| {
        let x = sampler.sample(rng);
        let gx = g.value(x);
        [rule.apply(|u| {
            let d = g.value(x + u) - gx;
            d * d
        })]
    });
    Ok(st.estimate(0))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be a finite positive number, got {v}")))
    }
}

/// Gamma data with known shape k, Ga(a, b) prior on the rate:
/// the posterior is Ga(nk + a, n x̄ + b).
pub fn posterior_bounds_gamma(k: f64, a: f64, b: f64, n: u64, xbar: f64, g: TestFn) -> Result<VarianceBounds> {
    check_positive("k", k)?;
    check_positive("a", a)?;
    check_positive("b", b)?;
    if n > 0 {
        check_positive("xbar", xbar)?;
    }
    let n = n as f64;
    gamma_bounds_closed(n * k + a, n * xbar + b, g)
}

/// Poisson data, Ga(a, b) prior on the mean: the posterior is Ga(n x̄ + a, n + b).
pub fn posterior_bounds_poisson(a: f64, b: f64, n: u64, xbar: f64, g: TestFn) -> Result<VarianceBounds> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    if !(xbar >= 0.0 && xbar.is_finite()) {
        return Err(Error::invalid(format!("xbar must be a finite nonnegative mean count, got {xbar}")));
    }
    let n = n as f64;
    gamma_bounds_closed(n * xbar + a, n + b, g)
}

/// The candidate closed-form Z density for the two-sided exponential law,
/// c·(z e^{−az}/a on z > 0, z e^{bz}/b on z < 0) with c = a³b³/((a+b)(a²+b²)).
pub fn two_sided_exp_candidate_z_density(a: f64, b: f64, z: f64) -> f64 {
    let c = (a * b).powi(3) / ((a + b) * (a * a + b * b));
    if z > 0.0 {
        c * z * (-a * z).exp() / a
    } else {
        c * z * (b * z).exp() / b
    }
}

/// Outcome of checking a candidate density against ∫ f = 1 and against the
/// density of X + Y₁ computed by convolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCheck {
    pub integral: f64,
    pub min_value: f64,
    pub max_abs_error: f64,
    pub consistent: bool,
    pub note: String,
}

/// Density of Z = X + Y₁ for the two-sided exponential law, by convolution.
pub fn two_sided_exp_z_density(a: f64, b: f64, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let fx = |x: f64| a * b / (a + b) * if x >= 0.0 { (-a * x).exp() } else { (b * x).exp() };
    let f1 = |y: f64| {
        a * a * b * b / (a * a + b * b) * if y >= 0.0 { (-a * y).exp() / a } else { (b * y).exp() / b }
    };
    let span = 60.0 / a.min(b);
    let mut pts = vec![-span + z.min(0.0), 0.0, z, span + z.max(0.0)];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(integrate_with_breaks(|y| fx(z - y) * f1(y), &pts, cfg, "two-sided exponential Z density")?.value)
}

pub fn check_two_sided_exp_z(a: f64, b: f64, cfg: &QuadratureConfig) -> Result<DensityCheck> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let candidate = |z: f64| two_sided_exp_candidate_z_density(a, b, z);
    let span = 80.0 / a.min(b);
    let integral = integrate_with_breaks(candidate, &[-span, 0.0, span], cfg, "candidate Z density")?.value;
    let mut min_value = f64::INFINITY;
    let mut max_abs_error = 0.0f64;
    for i in 0..=200 {
        let z = -10.0 + 0.1 * i as f64;
        let p = candidate(z);
        min_value = min_value.min(p);
        max_abs_error = max_abs_error.max((p - two_sided_exp_z_density(a, b, z, cfg)?).abs());
    }
    let consistent = (integral - 1.0).abs() < 1e-6 && min_value >= 0.0 && max_abs_error < 1e-6;
    let note = if consistent {
        "candidate Z density agrees with the convolution of X and Y₁".to_string()
    } else {
        format!(
            "candidate Z density is not the law of X + Y₁: it integrates to {integral:.6}, takes values down to {min_value:.6}, and deviates from the convolution by up to {max_abs_error:.6}"
        )
    };
    Ok(DensityCheck {
        integral,
        min_value,
        max_abs_error,
        consistent,
        note,
    })
}
