//! Premium principles and the Gini coefficient written through ν.
//!
//! For X = μ₀ + (jumps), E[X w(X)] = μ₀ E w(X) + E ∫ u w(X+u) ν(du), so the
//! weighted premium H_w = E[X w(X)] / E w(X) needs only draws of X and a
//! quadrature rule against ν.

use serde::Serialize;

use crate::catalog::{Family, IddSpec};
use crate::error::{Error, Result};
use crate::identities::{CovarianceKernel, InnerMethod, ORACLE_SALT};
use crate::levy::LevyMeasure;
use crate::mc::{run, MCConfig, MCEstimate, Method};
use crate::quadrature::QuadratureConfig;
use crate::special;
use crate::testfn::TestFn;

/// Largest admissible exponential tilt, as a fraction of the tail rate.
pub const TILT_MARGIN: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Principle {
    Wpcp { weight: TestFn },
    Esscher { kappa: f64 },
    ModifiedVariance,
    Generalized { n: u32, weight: TestFn },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiumReport {
    pub principle: Principle,
    pub value: f64,
    pub method: Method,
    pub std_error: Option<f64>,
    pub n: Option<u64>,
}

impl PremiumReport {
    fn closed(principle: Principle, value: f64) -> Self {
        Self {
            principle,
            value,
            method: Method::ClosedForm,
            std_error: None,
            n: None,
        }
    }

    fn numeric(principle: Principle, e: MCEstimate) -> Self {
        Self {
            principle,
            value: e.value,
            method: Method::Numeric,
            std_error: Some(e.std_error),
            n: Some(e.n),
        }
    }

    pub fn estimate(&self) -> MCEstimate {
        MCEstimate {
            value: self.value,
            std_error: self.std_error.unwrap_or(0.0),
            n: self.n.unwrap_or(0),
        }
    }
}

/// Rejects exponential weights e^{κx} that are not dominated by the Lévy tails
/// with the margin κ ≤ 0.999·λ⁺ (and −κ ≤ 0.999·λ⁻ for κ < 0).
pub fn tilt_guard(base: &IddSpec, kappa: f64) -> Result<()> {
    if !kappa.is_finite() {
        return Err(Error::invalid(format!("tilt κ must be finite, got {kappa}")));
    }
    let LevyMeasure::Continuous { pos, neg } = base.measure() else {
        return Ok(());
    };
    let (side, bound) = if kappa > 0.0 {
        (pos.as_ref(), "λ⁺")
    } else {
        (neg.as_ref(), "λ⁻")
    };
    if let Some(s) = side {
        let limit = TILT_MARGIN * s.decay();
        if kappa.abs() > limit {
            return Err(Error::invalid(format!(
                "{}: tilt |κ| = {} exceeds {TILT_MARGIN}·{bound} = {limit}",
                base.name(),
                kappa.abs()
            )));
        }
    }
    Ok(())
}

fn weight_guard(base: &IddSpec, w: &TestFn) -> Result<()> {
    match *w {
        TestFn::ExpTilt(k) => tilt_guard(base, k),
        _ => Ok(()),
    }
}

/// H_w(X) = (μ₀ E w(X) + E ∫ w(X+u) u ν(du)) / E w(X), ratio SE by the delta method.
pub fn wpcp(base: &IddSpec, w: TestFn, mc: &MCConfig, cfg: &QuadratureConfig) -> Result<PremiumReport> {
    let _ = cfg;
    mc.validate()?;
    weight_guard(base, &w)?;
    let rule = base.measure().density_rule(w.growth())?;
    let sampler = base.sampler();
    let offset = base.offset();
    let st = run::<2, _>(mc, |rng| {
        let x = sampler.sample(rng);
        let wx = w.value(x);
        [offset * wx + rule.apply(|u| w.value(x + u) * u), wx]
    });
    Ok(PremiumReport::numeric(Principle::Wpcp { weight: w }, st.ratio(0, 1)?))
}

/// E[X w(X)] / E[w(X)] by plain sampling, on a stream independent of `mc.seed`.
pub fn wpcp_definition_oracle(base: &IddSpec, w: TestFn, mc: &MCConfig) -> Result<MCEstimate> {
    wpcp_moment_oracle(base, 1, w, mc)
}

fn wpcp_moment_oracle(base: &IddSpec, n: u32, w: TestFn, mc: &MCConfig) -> Result<MCEstimate> {
    mc.validate()?;
    weight_guard(base, &w)?;
    let sampler = base.sampler();
    let st = run::<2, _>(&mc.independent(ORACLE_SALT), |rng| {
        let x = sampler.sample(rng);
        let wx = w.value(x);
        [x.powi(n as i32) * wx, wx]
    });
    st.ratio(0, 1)
}

/// Esscher premium E[X e^{κX}] / E[e^{κX}] = μ₀ + ∫ u e^{κu} ν(du) in closed form.
pub fn esscher_closed(base: &IddSpec, kappa: f64) -> Result<PremiumReport> {
    if !(kappa > 0.0) {
        return Err(Error::invalid(format!("Esscher tilt must satisfy κ > 0, got {kappa}")));
    }
    tilt_guard(base, kappa)?;
    let g = special::gamma;
    let value = match *base.family() {
        Family::Poisson { lambda } => lambda * kappa.exp(),
        Family::Gamma { a, b } => a / (b - kappa),
        Family::InverseGaussian { alpha, lambda } => alpha * std::f64::consts::PI.sqrt() / (lambda - kappa).sqrt(),
        Family::Bgd {
            alpha_plus,
            lambda_plus,
            alpha_minus,
            lambda_minus,
        } => alpha_plus / (lambda_plus - kappa) - alpha_minus / (lambda_minus + kappa),
        Family::Cgmy {
            alpha,
            beta,
            lambda_plus,
            lambda_minus,
        } => alpha * g(1.0 - beta) * ((lambda_plus - kappa).powf(beta - 1.0) - (lambda_minus + kappa).powf(beta - 1.0)),
        _ => base.offset() + base.measure().tilted_mean(kappa, &QuadratureConfig::default())?,
    };
    Ok(PremiumReport::closed(Principle::Esscher { kappa }, value))
}

/// H = E X + Var X / E X, the weight w(x) = x.
pub fn modified_variance(base: &IddSpec) -> Result<PremiumReport> {
    let mean = base.mean_closed();
    if mean == 0.0 {
        return Err(Error::ZeroDenominator(format!("{} has zero mean", base.name())));
    }
    Ok(PremiumReport::closed(Principle::ModifiedVariance, mean + base.variance() / mean))
}

/// H_{xⁿ,w} = E Xⁿ + Cov(Xⁿ, w(X)) / E w(X) with the covariance taken from the
/// identity estimator and E w(X) from the same draws of X_s.
pub fn generalized_wpcp(
    base: &IddSpec,
    n: u32,
    w: TestFn,
    mc: &MCConfig,
    cfg: &QuadratureConfig,
) -> Result<PremiumReport> {
    mc.validate()?;
    weight_guard(base, &w)?;
    let moment = base.raw_moment(n)?;
    let kernel = CovarianceKernel::new(base, n, w, InnerMethod::Auto, cfg)?;
    let st = run::<2, _>(mc, |rng| {
        let (rhs, x) = kernel.draw(rng);
        [rhs, w.value(x)]
    });
    let r = st.ratio(0, 1)?;
    Ok(PremiumReport::numeric(
        Principle::Generalized { n, weight: w },
        MCEstimate {
            value: moment + r.value,
            ..r
        },
    ))
}

/// E[Xⁿ w(X)] / E[w(X)] by plain sampling.
pub fn generalized_wpcp_oracle(base: &IddSpec, n: u32, w: TestFn, mc: &MCConfig) -> Result<MCEstimate> {
    wpcp_moment_oracle(base, n, w, mc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GiniMethod {
    LevyFormula,
    CovarianceOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiniReport {
    pub value: f64,
    pub method: GiniMethod,
    pub std_error: Option<f64>,
    pub n: u64,
}

impl GiniReport {
    pub fn estimate(&self) -> MCEstimate {
        MCEstimate {
            value: self.value,
            std_error: self.std_error.unwrap_or(0.0),
            n: self.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiniComparison {
    pub levy_formula: GiniReport,
    pub covariance_oracle: GiniReport,
    /// Agreement z-score of the two independent estimates.
    pub z: f64,
    /// (2/μ)·Var(X), the shortcut some worked examples report in place of G.
    pub variance_shortcut: f64,
    /// Set for laws with signed support.
    pub label: Option<String>,
    pub warnings: Vec<String>,
}

/// G = (2/μ) E ∫ u (F(X+u) − F(X)) ν(du), cross-checked against the
/// definition (2/μ) Cov(X, F(X)) on an independent stream.
pub fn gini(base: &IddSpec, mc: &MCConfig, cfg: &QuadratureConfig) -> Result<GiniComparison> {
    mc.validate()?;
    let mu = base.mean_closed();
    if !(mu > 0.0) {
        return Err(Error::invalid(format!(
            "the Gini coefficient needs E X > 0, got {mu} for {}",
            base.name()
        )));
    }
    let f = base.cdf_table(cfg)?;
    let rule = base.measure().density_rule(0.0)?;
    let sampler = base.sampler();
    let scale = 2.0 / mu;
    let levy = run::<1, _>(mc, |rng| {
        let x = sampler.sample(rng);
        let fx = f.eval(x);
        [scale * rule.apply(|u| u * (f.eval(x + u) - fx))]
    })
    .estimate(0);
    let oracle_stats = run::<3, _>(&mc.independent(ORACLE_SALT), |rng| {
        let x = sampler.sample(rng);
        let fx = f.eval(x);
        [x * fx, x, fx]
    });
    let cov = oracle_stats.covariance_from_product(0, 1, 2);
    let oracle = MCEstimate {
        value: scale * cov.value,
        std_error: scale * cov.std_error,
        n: cov.n,
    };
    let shortcut = scale * base.variance();
    let mut warnings = vec![format!(
        "the shortcut (2/μ)·Var(X) = {shortcut:.6} differs from the formula value {:.6} by {:.6} (ratio {:.4}); it is not the Gini coefficient",
        levy.value,
        shortcut - levy.value,
        shortcut / levy.value
    )];
    let label = if base.is_nonnegative() {
        let lower = levy.value - 4.0 * levy.std_error;
        let upper = levy.value + 4.0 * levy.std_error;
        if lower > 1.0 || upper < 0.0 {
            warnings.push(format!("Gini estimate {:.6} falls outside [0, 1]", levy.value));
        }
        None
    } else {
        Some("formula value, not a Lorenz-Gini (X takes negative values)".to_string())
    };
    Ok(GiniComparison {
        z: levy.z_versus(&oracle),
        levy_formula: GiniReport {
            value: levy.value,
            method: GiniMethod::LevyFormula,
            std_error: Some(levy.std_error),
            n: levy.n,
        },
        covariance_oracle: GiniReport {
            value: oracle.value,
            method: GiniMethod::CovarianceOracle,
            std_error: Some(oracle.std_error),
            n: oracle.n,
        },
        variance_shortcut: shortcut,
        label,
        warnings,
    })
}
