//! Covariance identities built on the dependent pair (X_s, Y_s), and the
//! Stein residual checks they imply.
//!
//! For X ~ IDD(μ, 0, ν) and f(x) = xⁿ,
//!
//! Cov(Xⁿ, g(X)) = Σ_{k<n} C(n,k) ∫₀¹ E[Y_s^k ∫ g′(X_s + v) η_{n−k}(v) dv] ds,
//!
//! where (X_s, Y_s) = (A + C, B + C) with A, B drawn from the (1−s)-th and C
//! from the s-th convolution power.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{Family, IddSpec, Sampler, VgdAltParams};
use crate::error::{Error, Result};
use crate::levy::{Atom, BiasVariable, LevyMeasure, LevyRule};
use crate::mc::{run, MCConfig, MCEstimate, McRng};
use crate::quadrature::QuadratureConfig;
use crate::special::binomial;
use crate::testfn::TestFn;

/// Seed salt for oracles, so they never share a stream with the estimator they check.
pub const ORACLE_SALT: u64 = 0x0_7ac1e;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SStrategy {
    Fixed(f64),
    /// s ~ U(0,1) per draw, which integrates over s without a grid.
    Uniform,
}

#[derive(Debug, Clone)]
pub struct JointPairSampler {
    sampler: Sampler,
    strategy: SStrategy,
}

impl JointPairSampler {
    pub fn new(base: &IddSpec, strategy: SStrategy) -> Result<Self> {
        if let SStrategy::Fixed(s) = strategy {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::invalid(format!("s must lie in [0, 1], got {s}")));
            }
        }
        Ok(Self {
            sampler: base.sampler(),
            strategy,
        })
    }

    /// One draw of (X_s, Y_s, s).
    pub fn sample_joint<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64, f64) {
        let s = match self.strategy {
            SStrategy::Fixed(s) => s,
            SStrategy::Uniform => rng.random(),
        };
        let a = self.sampler.sample_power(rng, 1.0 - s);
        let b = self.sampler.sample_power(rng, 1.0 - s);
        let c = self.sampler.sample_power(rng, s);
        (a + c, b + c, s)
    }
}

/// How ∫ g′(x + v) η_m(v) dv is evaluated per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMethod {
    /// Atoms: exact sum. One-sided: bias sampler. Two-sided: quadrature.
    #[default]
    Auto,
    /// C_{m+1} g′(x + Y_m) with Y_m drawn from the bias variable.
    BiasSampler,
    /// A fixed quadrature rule against η_m.
    Quadrature,
}

#[derive(Debug, Clone)]
enum Inner {
    Bias { scale: f64, bias: BiasVariable },
    Rule(LevyRule),
    /// Σ a^m · mass · (g(x + a) − g(x)), exact for atomic ν by Fubini.
    Atoms(Vec<Atom>),
}

#[derive(Debug, Clone)]
struct Term {
    coef: f64,
    k: i32,
    inner: Inner,
}

/// The per-sample integrand of the covariance identity for Cov(Xⁿ, g(X)).
#[derive(Debug, Clone)]
pub struct CovarianceKernel {
    pair: JointPairSampler,
    g: TestFn,
    terms: Vec<Term>,
}

impl CovarianceKernel {
    pub fn new(base: &IddSpec, n: u32, g: TestFn, method: InnerMethod, cfg: &QuadratureConfig) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("the covariance identity needs n ≥ 1"));
        }
        let check = integrability_check(base, n, &g, cfg);
        if !check.passed {
            return Err(Error::DivergentMoment(check.detail));
        }
        let measure = base.measure();
        let mut terms = Vec::new();
        for k in 0..n {
            let m = n - k;
            let inner = match (method, measure) {
                (InnerMethod::Auto, LevyMeasure::Atomic { atoms }) => Inner::Atoms(
                    atoms
                        .iter()
                        .map(|a| Atom {
                            location: a.location,
                            mass: a.mass * a.location.powi(m as i32),
                        })
                        .collect(),
                ),
                (InnerMethod::Auto, _) if !measure.is_two_sided() => bias_inner(measure, m, cfg)?,
                (InnerMethod::BiasSampler, _) => bias_inner(measure, m, cfg)?,
                _ => Inner::Rule(measure.eta_rule(m, g.growth(), cfg)?),
            };
            terms.push(Term {
                coef: binomial(n, k),
                k: k as i32,
                inner,
            });
        }
        Ok(Self {
            pair: JointPairSampler::new(base, SStrategy::Uniform)?,
            g,
            terms,
        })
    }

    /// One unbiased draw of the identity's right-hand side, with X_s alongside.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let (x, y, _) = self.pair.sample_joint(rng);
        let g = &self.g;
        let mut total = 0.0;
        for t in &self.terms {
            let inner = match &t.inner {
                Inner::Bias { scale, bias } => scale * g.d1(x + bias.sample(rng)),
                Inner::Rule(rule) => rule.apply(|v| g.d1(x + v)),
                Inner::Atoms(atoms) => {
                    let gx = g.value(x);
                    atoms.iter().map(|a| a.mass * (g.value(x + a.location) - gx)).sum()
                }
            };
            total += t.coef * y.powi(t.k) * inner;
        }
        (total, x)
    }
}

fn bias_inner(measure: &LevyMeasure, m: u32, cfg: &QuadratureConfig) -> Result<Inner> {
    let bias = measure.bias(m, cfg)?;
    Ok(Inner::Bias {
        scale: bias.normalizer,
        bias,
    })
}

/// Result of the numeric integrability pre-check; reported, never asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilityCheck {
    pub passed: bool,
    pub detail: String,
}

/// Checks that E|X|ⁿ is finite and that g's exponential growth is dominated
/// by the tails of ν on both sides.
pub fn integrability_check(base: &IddSpec, n: u32, g: &TestFn, cfg: &QuadratureConfig) -> IntegrabilityCheck {
    let _ = cfg;
    let measure = base.measure();
    let c = g.growth();
    let mut problems = Vec::new();
    if let Err(e) = base.cumulant_closed(n.max(2)) {
        problems.push(format!("moment of order {n} is not finite: {e}"));
    }
    if let LevyMeasure::Continuous { pos, neg } = measure {
        if let Some(p) = pos {
            if c > 0.0 && c >= p.decay() {
                problems.push(format!("{g} grows at rate {c}, not dominated by the positive tail rate {}", p.decay()));
            }
        }
        if let Some(q) = neg {
            if c < 0.0 && -c >= q.decay() {
                problems.push(format!("{g} grows at rate {} to the left, not dominated by the negative tail rate {}", -c, q.decay()));
            }
        }
    }
    if problems.is_empty() {
        IntegrabilityCheck {
            passed: true,
            detail: format!("E|X|^{n} finite and {g} dominated by the Lévy tails"),
        }
    } else {
        IntegrabilityCheck {
            passed: false,
            detail: problems.join("; "),
        }
    }
}

/// Monte Carlo estimate of the identity's right-hand side for Cov(Xⁿ, g(X)).
pub fn cov_identity_rhs(
    base: &IddSpec,
    n: u32,
    g: TestFn,
    mc: &MCConfig,
    cfg: &QuadratureConfig,
) -> Result<MCEstimate> {
    cov_identity_rhs_with(base, n, g, InnerMethod::Auto, mc, cfg)
}

pub fn cov_identity_rhs_with(
    base: &IddSpec,
    n: u32,
    g: TestFn,
    method: InnerMethod,
    mc: &MCConfig,
    cfg: &QuadratureConfig,
) -> Result<MCEstimate> {
    mc.validate()?;
    let kernel = CovarianceKernel::new(base, n, g, method, cfg)?;
    let stats = run::<1, _>(mc, |rng| [kernel.draw(rng).0]);
    finite(stats.estimate(0), "covariance identity")
}

/// Cov(X, g(X)) = Var(X) · E g′(X + Y₁) with X and Y₁ independent.
pub fn cov_first_order(base: &IddSpec, g: TestFn, mc: &MCConfig, cfg: &QuadratureConfig) -> Result<MCEstimate> {
    mc.validate()?;
    let var = base.variance();
    let bias = base.measure().bias(1, cfg)?;
    let sampler = base.sampler();
    let stats = run::<1, _>(mc, |rng| {
        let x = sampler.sample(rng);
        [var * g.d1(x + bias.sample(rng))]
    });
    finite(stats.estimate(0), "first-order covariance identity")
}

/// Brute-force Cov(Xⁿ, g(X)) from iid draws, on a stream independent of `mc.seed`.
pub fn cov_oracle(base: &IddSpec, n: u32, g: TestFn, mc: &MCConfig) -> Result<MCEstimate> {
    mc.validate()?;
    let sampler = base.sampler();
    let stats = run::<3, _>(&mc.independent(ORACLE_SALT), |rng| {
        let x = sampler.sample(rng);
        let (xn, gx) = (x.powi(n as i32), g.value(x));
        [xn * gx, xn, gx]
    });
    finite(stats.covariance_from_product(0, 1, 2), "covariance oracle")
}

/// Exact Cov(Xⁿ, g(X)) from cumulants when g is a polynomial.
pub fn cov_exact(base: &IddSpec, n: u32, g: &TestFn) -> Option<f64> {
    let coeffs = g.polynomial()?;
    let mn = base.raw_moment(n).ok()?;
    let mut total = 0.0;
    for (j, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            let j = j as u32;
            total += c * (base.raw_moment(n + j).ok()? - mn * base.raw_moment(j).ok()?);
        }
    }
    Some(total)
}

/// Both sides of the identity with their agreement z-score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub rhs: MCEstimate,
    pub oracle: MCEstimate,
    pub z: f64,
    pub exact: Option<f64>,
    pub integrability: IntegrabilityCheck,
}

pub fn verify_identity(
    base: &IddSpec,
    n: u32,
    g: TestFn,
    mc: &MCConfig,
    cfg: &QuadratureConfig,
) -> Result<IdentityCheck> {
    let integrability = integrability_check(base, n, &g, cfg);
    let rhs = cov_identity_rhs(base, n, g, mc, cfg)?;
    let oracle = cov_oracle(base, n, g, mc)?;
    Ok(IdentityCheck {
        z: rhs.z_versus(&oracle),
        rhs,
        oracle,
        exact: cov_exact(base, n, &g),
        integrability,
    })
}

fn finite(e: MCEstimate, what: &str) -> Result<MCEstimate> {
    if e.value.is_finite() && e.std_error.is_finite() {
        Ok(e)
    } else {
        Err(Error::DivergentMoment(format!("{what}: sample mean is not finite")))
    }
}

fn residual<F>(spec: &IddSpec, mc: &MCConfig, f: F) -> Result<MCEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    mc.validate()?;
    let sampler = spec.sampler();
    let stats = run::<1, _>(mc, |rng: &mut McRng| [f(sampler.sample(rng))]);
    finite(stats.estimate(0), "Stein residual")
}

/// E[(X − μ₀) g(X) − ∫ u g(X + u) ν(du)] for any catalog law; zero in theory.
pub fn stein_residual_levy(spec: &IddSpec, g: TestFn, mc: &MCConfig, cfg: &QuadratureConfig) -> Result<MCEstimate> {
    let check = integrability_check(spec, 2, &g, cfg);
    if !check.passed {
        return Err(Error::DivergentMoment(check.detail));
    }
    let rule = spec.measure().density_rule(g.growth())?;
    let offset = spec.offset();
    residual(spec, mc, |x| (x - offset) * g.value(x) - rule.apply(|u| u * g.value(x + u)))
}

/// The CGMY Stein residual E[X g(X) − ∫ u g(X + u) ν(du)].
pub fn stein_residual_cgmy(spec: &IddSpec, g: TestFn, mc: &MCConfig, cfg: &QuadratureConfig) -> Result<MCEstimate> {
    if !matches!(spec.family(), Family::Cgmy { .. }) {
        return Err(Error::invalid(format!("expected a cgmy law, got {}", spec.name())));
    }
    stein_residual_levy(spec, g, mc, cfg)
}

/// E[σ²(X−μ₀)g″ + (σ²r + 2θ(X−μ₀))g′ + (rθ − (X−μ₀))g] under VGD₁(μ₀, σ², r, θ).
pub fn stein_residual_vgd(p: &VgdAltParams, g: TestFn, mc: &MCConfig) -> Result<MCEstimate> {
    let spec = IddSpec::new(p.to_family()?)?;
    growth_guard(&spec, &g)?;
    let VgdAltParams { mu0, sigma2, r, theta } = *p;
    residual(&spec, mc, |x| {
        let z = x - mu0;
        sigma2 * z * g.d2(x) + (sigma2 * r + 2.0 * theta * z) * g.d1(x) + (r * theta - z) * g.value(x)
    })
}

/// E[Xg″ + ((α⁺+α⁻) − (λ⁺−λ⁻)X)g′ + ((α⁺λ⁻ − α⁻λ⁺) − λ⁺λ⁻X)g] under BGD.
pub fn stein_residual_bgd(spec: &IddSpec, g: TestFn, mc: &MCConfig) -> Result<MCEstimate> {
    let Family::Bgd {
        alpha_plus: ap,
        lambda_plus: lp,
        alpha_minus: am,
        lambda_minus: lm,
    } = *spec.family()
    else {
        return Err(Error::invalid(format!("expected a bgd law, got {}", spec.name())));
    };
    growth_guard(spec, &g)?;
    residual(spec, mc, |x| {
        x * g.d2(x) + ((ap + am) - (lp - lm) * x) * g.d1(x) + ((ap * lm - am * lp) - lp * lm * x) * g.value(x)
    })
}

fn growth_guard(spec: &IddSpec, g: &TestFn) -> Result<()> {
    // the residual is linear in X times g, so E|X| e^{c X} must be finite
    let check = integrability_check(spec, 1, g, &QuadratureConfig::default());
    if check.passed {
        Ok(())
    } else {
        Err(Error::DivergentMoment(check.detail))
    }
}
