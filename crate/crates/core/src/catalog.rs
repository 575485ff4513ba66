//! The catalog of infinitely divisible families.
//!
//! Every family maps to a Lévy measure plus a drift. Families differ in how
//! the drift is written in their canonical characteristic function; see
//! [`DriftConvention`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::levy::{Atom, LevyMeasure, TemperedStable};
use crate::quadrature::{integrate, integrate_tail, integrate_with_breaks, QuadratureConfig};
use crate::special;

/// Jump-size law of a compound Poisson family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpDist {
    /// Finitely many jump sizes with probabilities summing to one.
    Atoms { atoms: Vec<JumpAtom> },
    /// Ga(shape, rate) jump sizes.
    Gamma { shape: f64, rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpAtom {
    pub location: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Poisson {
        lambda: f64,
    },
    CompoundPoisson {
        rate: f64,
        jumps: JumpDist,
    },
    Gamma {
        a: f64,
        b: f64,
    },
    InverseGaussian {
        alpha: f64,
        lambda: f64,
    },
    Laplace {
        mu0: f64,
        delta: f64,
    },
    TwoSidedExp {
        a: f64,
        b: f64,
    },
    Bgd {
        alpha_plus: f64,
        lambda_plus: f64,
        alpha_minus: f64,
        lambda_minus: f64,
    },
    Vgd {
        mu0: f64,
        alpha: f64,
        lambda_plus: f64,
        lambda_minus: f64,
    },
    Cgmy {
        alpha: f64,
        beta: f64,
        lambda_plus: f64,
        lambda_minus: f64,
    },
    Gtsd {
        mu: f64,
        beta: f64,
        alpha_plus: f64,
        lambda_plus: f64,
        alpha_minus: f64,
        lambda_minus: f64,
    },
}

/// How the drift appears in a family's canonical cf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftConvention {
    /// exp(itμ + ∫(e^{itu} − 1 − itu)ν(du)); μ is the mean.
    Compensated,
    /// exp(itμ₀ + ∫(e^{itu} − 1)ν(du)); μ₀ is an offset and the mean is μ₀ + ∫uν.
    Uncompensated,
}

/// VGD₁(μ₀, σ², r, θ), an alternative chart for VGD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VgdAltParams {
    pub mu0: f64,
    pub sigma2: f64,
    pub r: f64,
    pub theta: f64,
}

impl VgdAltParams {
    /// Solves 1/(λ⁺λ⁻) = σ², 1/λ⁺ − 1/λ⁻ = 2θ, α = r/2.
    pub fn to_family(&self) -> Result<Family> {
        if !(self.sigma2 > 0.0) || !(self.r > 0.0) || !self.theta.is_finite() || !self.mu0.is_finite() {
            return Err(Error::invalid(format!(
                "vgd: need sigma2 > 0, r > 0 and finite mu0, theta; got {self:?}"
            )));
        }
        let root = (self.theta * self.theta + self.sigma2).sqrt();
        // p = 1/λ⁺, q = 1/λ⁻ with pq = σ²; pick the cancellation-free root first
        let (p, q) = if self.theta >= 0.0 {
            let p = self.theta + root;
            (p, self.sigma2 / p)
        } else {
            let q = -self.theta + root;
            (self.sigma2 / q, q)
        };
        Ok(Family::Vgd {
            mu0: self.mu0,
            alpha: self.r / 2.0,
            lambda_plus: 1.0 / p,
            lambda_minus: 1.0 / q,
        })
    }

    pub fn from_family(family: &Family) -> Result<Self> {
        match *family {
            Family::Vgd {
                mu0,
                alpha,
                lambda_plus,
                lambda_minus,
            } => Ok(Self {
                mu0,
                sigma2: 1.0 / (lambda_plus * lambda_minus),
                r: 2.0 * alpha,
                theta: 0.5 * (1.0 / lambda_plus - 1.0 / lambda_minus),
            }),
            Family::Laplace { mu0, delta } => Ok(Self {
                mu0,
                sigma2: delta * delta,
                r: 2.0,
                theta: 0.0,
            }),
            _ => Err(Error::invalid(format!("{} is not a variance-gamma law", family.name()))),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mu0 + self.r * self.theta
    }

    pub fn variance(&self) -> f64 {
        self.r * (self.sigma2 + 2.0 * self.theta * self.theta)
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg()))
    }
}

fn positive(family: &str, name: &str, v: f64) -> Result<()> {
    require(v > 0.0 && v.is_finite(), || format!("{family}: {name} must be a finite positive number, got {v}"))
}

fn finite(family: &str, name: &str, v: f64) -> Result<()> {
    require(v.is_finite(), || format!("{family}: {name} must be finite, got {v}"))
}

fn stability_index(family: &str, beta: f64) -> Result<()> {
    require((0.0..1.0).contains(&beta), || {
        format!("{family}: beta must lie in [0, 1) so that ∫|u|ν(du) < ∞, got {beta}")
    })
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Poisson { .. } => "poisson",
            Family::CompoundPoisson { .. } => "compound_poisson",
            Family::Gamma { .. } => "gamma",
            Family::InverseGaussian { .. } => "inverse_gaussian",
            Family::Laplace { .. } => "laplace",
            Family::TwoSidedExp { .. } => "two_sided_exp",
            Family::Bgd { .. } => "bgd",
            Family::Vgd { .. } => "vgd",
            Family::Cgmy { .. } => "cgmy",
            Family::Gtsd { .. } => "gtsd",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.name();
        match self {
            Family::Poisson { lambda } => positive(n, "lambda", *lambda),
            Family::CompoundPoisson { rate, jumps } => {
                positive(n, "rate", *rate)?;
                match jumps {
                    JumpDist::Atoms { atoms } => {
                        require(!atoms.is_empty(), || format!("{n}: jump atoms must not be empty"))?;
                        for a in atoms {
                            require(a.location != 0.0 && a.location.is_finite(), || {
                                format!("{n}: jump locations must be finite and nonzero, got {}", a.location)
                            })?;
                            positive(n, "jump prob", a.prob)?;
                        }
                        let total: f64 = atoms.iter().map(|a| a.prob).sum();
                        require((total - 1.0).abs() < 1e-9, || {
                            format!("{n}: jump probabilities must sum to 1, got {total}")
                        })
                    }
                    JumpDist::Gamma { shape, rate } => {
                        positive(n, "jump shape", *shape)?;
                        positive(n, "jump rate", *rate)
                    }
                }
            }
            Family::Gamma { a, b } => {
                positive(n, "a", *a)?;
                positive(n, "b", *b)
            }
            Family::InverseGaussian { alpha, lambda } => {
                positive(n, "alpha", *alpha)?;
                positive(n, "lambda", *lambda)
            }
            Family::Laplace { mu0, delta } => {
                finite(n, "mu0", *mu0)?;
                positive(n, "delta", *delta)
            }
            Family::TwoSidedExp { a, b } => {
                positive(n, "a", *a)?;
                positive(n, "b", *b)
            }
            Family::Bgd {
                alpha_plus,
                lambda_plus,
                alpha_minus,
                lambda_minus,
            } => {
                positive(n, "alpha_plus", *alpha_plus)?;
                positive(n, "lambda_plus", *lambda_plus)?;
                positive(n, "alpha_minus", *alpha_minus)?;
                positive(n, "lambda_minus", *lambda_minus)
            }
            Family::Vgd {
                mu0,
                alpha,
                lambda_plus,
                lambda_minus,
            } => {
                finite(n, "mu0", *mu0)?;
                positive(n, "alpha", *alpha)?;
                positive(n, "lambda_plus", *lambda_plus)?;
                positive(n, "lambda_minus", *lambda_minus)
            }
            Family::Cgmy {
                alpha,
                beta,
                lambda_plus,
                lambda_minus,
            } => {
                positive(n, "alpha", *alpha)?;
                stability_index(n, *beta)?;
                positive(n, "lambda_plus", *lambda_plus)?;
                positive(n, "lambda_minus", *lambda_minus)
            }
            Family::Gtsd {
                mu,
                beta,
                alpha_plus,
                lambda_plus,
                alpha_minus,
                lambda_minus,
            } => {
                finite(n, "mu", *mu)?;
                stability_index(n, *beta)?;
                positive(n, "alpha_plus", *alpha_plus)?;
                positive(n, "lambda_plus", *lambda_plus)?;
                positive(n, "alpha_minus", *alpha_minus)?;
                positive(n, "lambda_minus", *lambda_minus)
            }
        }
    }

    pub fn drift_convention(&self) -> DriftConvention {
        match self {
            Family::Gtsd { .. } => DriftConvention::Compensated,
            _ => DriftConvention::Uncompensated,
        }
    }

    /// The drift parameter exactly as it appears in the family's canonical cf.
    pub fn canonical_drift(&self) -> f64 {
        match self {
            Family::Laplace { mu0, .. } | Family::Vgd { mu0, .. } => *mu0,
            Family::Gtsd { mu, .. } => *mu,
            _ => 0.0,
        }
    }

    fn sides(&self) -> (Option<TemperedStable>, Option<TemperedStable>) {
        let ts = TemperedStable::new;
        match *self {
            Family::Gamma { a, b } => (Some(ts(a, 0.0, b)), None),
            Family::InverseGaussian { alpha, lambda } => (Some(ts(alpha, 0.5, lambda)), None),
            Family::Laplace { delta, .. } => (Some(ts(1.0, 0.0, 1.0 / delta)), Some(ts(1.0, 0.0, 1.0 / delta))),
            Family::TwoSidedExp { a, b } => (Some(ts(1.0, 0.0, a)), Some(ts(1.0, 0.0, b))),
            Family::Bgd {
                alpha_plus,
                lambda_plus,
                alpha_minus,
                lambda_minus,
            } => (Some(ts(alpha_plus, 0.0, lambda_plus)), Some(ts(alpha_minus, 0.0, lambda_minus))),
            Family::Vgd {
                alpha,
                lambda_plus,
                lambda_minus,
                ..
            } => (Some(ts(alpha, 0.0, lambda_plus)), Some(ts(alpha, 0.0, lambda_minus))),
            Family::Cgmy {
                alpha,
                beta,
                lambda_plus,
                lambda_minus,
            } => (Some(ts(alpha, beta, lambda_plus)), Some(ts(alpha, beta, lambda_minus))),
            Family::Gtsd {
                beta,
                alpha_plus,
                lambda_plus,
                alpha_minus,
                lambda_minus,
                ..
            } => (Some(ts(alpha_plus, beta, lambda_plus)), Some(ts(alpha_minus, beta, lambda_minus))),
            Family::CompoundPoisson {
                rate,
                jumps: JumpDist::Gamma { shape, rate: theta },
            } => {
                let alpha = rate * (shape * theta.ln() - special::ln_gamma(shape)).exp();
                (Some(ts(alpha, -shape, theta)), None)
            }
            Family::Poisson { .. } | Family::CompoundPoisson { .. } => (None, None),
        }
    }

    fn measure(&self) -> LevyMeasure {
        match self {
            Family::Poisson { lambda } => LevyMeasure::Atomic {
                atoms: vec![Atom {
                    location: 1.0,
                    mass: *lambda,
                }],
            },
            Family::CompoundPoisson {
                rate,
                jumps: JumpDist::Atoms { atoms },
            } => LevyMeasure::Atomic {
                atoms: atoms
                    .iter()
                    .map(|a| Atom {
                        location: a.location,
                        mass: rate * a.prob,
                    })
                    .collect(),
            },
            _ => {
                let (pos, neg) = self.sides();
                LevyMeasure::tempered(pos, neg)
            }
        }
    }

    /// The family whose cf is this family's cf raised to the power s.
    fn power(&self, s: f64) -> Family {
        match self.clone() {
            Family::Poisson { lambda } => Family::Poisson { lambda: s * lambda },
            Family::CompoundPoisson { rate, jumps } => Family::CompoundPoisson { rate: s * rate, jumps },
            Family::Gamma { a, b } => Family::Gamma { a: s * a, b },
            Family::InverseGaussian { alpha, lambda } => Family::InverseGaussian { alpha: s * alpha, lambda },
            Family::Laplace { mu0, delta } => Family::Vgd {
                mu0: s * mu0,
                alpha: s,
                lambda_plus: 1.0 / delta,
                lambda_minus: 1.0 / delta,
            },
            Family::TwoSidedExp { a, b } => Family::Bgd {
                alpha_plus: s,
                lambda_plus: a,
                alpha_minus: s,
                lambda_minus: b,
            },
            Family::Bgd {
                alpha_plus,
                lambda_plus,
                alpha_minus,
                lambda_minus,
            } => Family::Bgd {
                alpha_plus: s * alpha_plus,
                lambda_plus,
                alpha_minus: s * alpha_minus,
                lambda_minus,
            },
            Family::Vgd {
                mu0,
                alpha,
                lambda_plus,
                lambda_minus,
            } => Family::Vgd {
                mu0: s * mu0,
                alpha: s * alpha,
                lambda_plus,
                lambda_minus,
            },
            Family::Cgmy {
                alpha,
                beta,
                lambda_plus,
                lambda_minus,
            } => Family::Cgmy {
                alpha: s * alpha,
                beta,
                lambda_plus,
                lambda_minus,
            },
            Family::Gtsd {
                mu,
                beta,
                alpha_plus,
                lambda_plus,
                alpha_minus,
                lambda_minus,
            } => Family::Gtsd {
                mu: s * mu,
                beta,
                alpha_plus: s * alpha_plus,
                lambda_plus,
                alpha_minus: s * alpha_minus,
                lambda_minus,
            },
        }
    }
}

/// A validated family together with its Lévy triplet (μ, 0, ν).
#[derive(Debug, Clone)]
pub struct IddSpec {
    family: Family,
    measure: LevyMeasure,
    /// Offset μ₀ in X = μ₀ + (uncompensated jumps).
    offset: f64,
}

impl IddSpec {
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        let spec = Self::unchecked(family);
        let functional = spec.measure.levy_functional(&QuadratureConfig::default())?;
        require(functional.is_finite(), || format!("{}: ∫min(1,u²)ν(du) is not finite", spec.family.name()))?;
        Ok(spec)
    }

    fn unchecked(family: Family) -> Self {
        let measure = family.measure();
        let offset = match family.drift_convention() {
            DriftConvention::Uncompensated => family.canonical_drift(),
            DriftConvention::Compensated => {
                let jumps = measure
                    .moment(1, &QuadratureConfig::default())
                    .expect("catalog sides have β < 1");
                family.canonical_drift() - jumps
            }
        };
        Self {
            family,
            measure,
            offset,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn measure(&self) -> &LevyMeasure {
        &self.measure
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    /// The offset μ₀ with X = μ₀ + Σ jumps.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// The compensated drift μ of exp(itμ + ∫(e^{itu} − 1 − itu)ν), equal to E X.
    pub fn drift(&self) -> f64 {
        self.mean_closed()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.offset >= 0.0 && !self.measure.has_neg()
    }

    pub fn is_discrete(&self) -> bool {
        self.measure.is_atomic()
    }

    pub fn levy_density(&self, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Err(Error::invalid("the Lévy density is defined for u ≠ 0"));
        }
        match self.measure {
            LevyMeasure::Atomic { .. } => Err(Error::AtomicMeasure(self.name().to_string())),
            _ => self.measure.density(u),
        }
    }

    pub fn log_cf(&self, t: f64) -> Complex64 {
        let mut z = Complex64::new(0.0, t * self.offset);
        match &self.measure {
            LevyMeasure::Atomic { atoms } => {
                for a in atoms {
                    z += a.mass * (Complex64::new(0.0, t * a.location).exp() - 1.0);
                }
            }
            LevyMeasure::Continuous { .. } => {
                let (pos, neg) = self.family.sides();
                if let Some(p) = pos {
                    z += p.log_cf(t);
                }
                if let Some(n) = neg {
                    z += n.log_cf(-t);
                }
            }
        }
        z
    }

    pub fn cf(&self, t: f64) -> Complex64 {
        self.log_cf(t).exp()
    }

    /// exp(itμ + ∫(e^{itu} − 1 − itu)ν(du)) with the integral done by quadrature.
    pub fn cf_by_quadrature(&self, t: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
        let mu = self.mean_closed();
        let re = self.measure.integrate(|u| (t * u).cos() - 1.0, crate::levy::Region::Both, cfg)?;
        let im = self
            .measure
            .integrate(|u| (t * u).sin() - t * u, crate::levy::Region::Both, cfg)?;
        Ok(Complex64::new(re, t * mu + im).exp())
    }

    /// The law with cf φ^s; s = 0 gives the point mass at zero.
    pub fn conv_power(&self, s: f64) -> Result<IddSpec> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid(format!("convolution power must lie in [0, 1], got {s}")));
        }
        if s == 1.0 {
            return Ok(self.clone());
        }
        Ok(Self::unchecked(self.family.power(s)))
    }

    /// E X from closed-form jump moments.
    pub fn mean_closed(&self) -> f64 {
        self.offset
            + self
                .measure
                .moment(1, &QuadratureConfig::default())
                .expect("catalog sides have β < 1")
    }

    /// E X = μ₀ + ∫u ν(du) with the integral evaluated under `cfg`.
    pub fn mean_levy(&self, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(self.offset + self.measure.moment(1, cfg)?)
    }

    /// C_k by quadrature against ν (the offset enters C_1 only).
    pub fn cumulant(&self, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
        if k == 0 {
            return Err(Error::invalid("cumulants are indexed from 1"));
        }
        let m = self.measure.moment_numeric(k, cfg)?;
        Ok(if k == 1 { self.offset + m } else { m })
    }

    /// C_k from the closed-form jump moments.
    pub fn cumulant_closed(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::invalid("cumulants are indexed from 1"));
        }
        let m = self.measure.moment(k, &QuadratureConfig::default())?;
        Ok(if k == 1 { self.offset + m } else { m })
    }

    pub fn variance(&self) -> f64 {
        self.cumulant_closed(2).expect("second moment exists for every catalog family")
    }

    /// Raw moment E Xⁿ from cumulants: m_n = Σ_{k=1}^{n} C(n−1, k−1) C_k m_{n−k}.
    pub fn raw_moment(&self, n: u32) -> Result<f64> {
        let c: Vec<f64> = (1..=n).map(|k| self.cumulant_closed(k)).collect::<Result<_>>()?;
        let mut m = vec![1.0];
        for j in 1..=n as usize {
            let v = (1..=j)
                .map(|k| special::binomial(j as u32 - 1, k as u32 - 1) * c[k - 1] * m[j - k])
                .sum();
            m.push(v);
        }
        Ok(m[n as usize])
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(self)
    }

    /// F_X(x), using closed forms where they exist, gamma-difference
    /// convolution for bilateral gamma laws and Gil–Pelaez inversion otherwise.
    pub fn cdf(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::invalid("cdf argument is NaN"));
        }
        let v = match self.family {
            Family::Poisson { lambda } => {
                if x < 0.0 {
                    0.0
                } else {
                    special::gamma_q(x.floor() + 1.0, lambda)
                }
            }
            Family::CompoundPoisson {
                rate,
                jumps: JumpDist::Gamma { shape, rate: theta },
            } => compound_gamma_cdf(x, rate, shape, theta),
            Family::CompoundPoisson { .. } => {
                let (support, probs) = self.atomic_support()?;
                let i = support.partition_point(|&s| s <= x);
                probs[..i].iter().sum()
            }
            Family::Gamma { a, b } => special::gamma_p(a, b * x),
            Family::InverseGaussian { alpha, lambda } => {
                let (m, shape) = ig_params(alpha, lambda);
                if x <= 0.0 {
                    0.0
                } else {
                    let r = (shape / x).sqrt();
                    let a = special::std_normal_cdf(r * (x / m - 1.0));
                    let b = (2.0 * shape / m).exp() * special::std_normal_cdf(-r * (x / m + 1.0));
                    if b.is_finite() {
                        a + b
                    } else {
                        a
                    }
                }
            }
            Family::Laplace { mu0, delta } => {
                let z = (x - mu0) / delta;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Family::TwoSidedExp { a, b } => {
                if x < 0.0 {
                    a / (a + b) * (b * x).exp()
                } else {
                    1.0 - b / (a + b) * (-a * x).exp()
                }
            }
            _ => {
                let (pos, neg) = self.family.sides();
                let (p, n) = (pos.unwrap(), neg.unwrap());
                if p.beta == 0.0 && n.beta == 0.0 {
                    gamma_difference_cdf(x - self.offset, p.alpha, p.lambda, n.alpha, n.lambda, cfg)?
                } else {
                    self.gil_pelaez(x, cfg)?
                }
            }
        };
        Ok(v.clamp(0.0, 1.0))
    }

    fn gil_pelaez(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let mut t_max = 1.0;
        while self.cf(t_max).norm() >= 1e-12 {
            t_max *= 2.0;
            if t_max > 1e8 {
                return Err(Error::NonConvergence {
                    what: format!("{} cf decay for Gil–Pelaez truncation", self.name()),
                    achieved: self.cf(t_max).norm(),
                    requested: 1e-12,
                });
            }
        }
        let mean = self.mean_closed();
        let f = |t: f64| {
            if t < 1e-8 {
                return mean - x;
            }
            (Complex64::new(0.0, -t * x).exp() * self.cf(t)).im / t
        };
        let mut breaks = Vec::new();
        let uniform_end = t_max.min(64.0);
        let mut t = 0.0;
        while t < uniform_end {
            breaks.push(t);
            t += 0.5;
        }
        let mut t = uniform_end;
        while t < t_max {
            breaks.push(t);
            t *= 1.25;
        }
        breaks.push(t_max);
        let local = QuadratureConfig {
            max_subdivisions: cfg.max_subdivisions.max(4 * breaks.len()),
            ..*cfg
        };
        let r = integrate_with_breaks(f, &breaks, &local, "Gil–Pelaez inversion")?;
        Ok(0.5 - r.value / std::f64::consts::PI)
    }

    /// Support points and probabilities of an atomic compound Poisson law.
    fn atomic_support(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let LevyMeasure::Atomic { atoms } = &self.measure else {
            return Err(Error::invalid("atomic support requested for a continuous law"));
        };
        let rate: f64 = atoms.iter().map(|a| a.mass).sum();
        let key = |x: f64| (x * 1e9).round() as i64;
        let mut total: BTreeMap<i64, f64> = BTreeMap::new();
        let mut layer: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
        layer.insert(0, (0.0, 1.0));
        let mut pn = (-rate).exp();
        let mut covered = 0.0;
        let mut n = 0u32;
        loop {
            for (k, (_, p)) in &layer {
                *total.entry(*k).or_insert(0.0) += pn * p;
            }
            covered += pn;
            if (1.0 - covered < 1e-15 && n as f64 > rate) || n > 2000 {
                break;
            }
            let mut next: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
            for (x, p) in layer.values() {
                for a in atoms {
                    let y = x + a.location;
                    let e = next.entry(key(y)).or_insert((y, 0.0));
                    e.1 += p * a.mass / rate;
                }
            }
            if next.len() > 500_000 {
                return Err(Error::NonConvergence {
                    what: "compound Poisson support enumeration".into(),
                    achieved: 1.0 - covered,
                    requested: 1e-15,
                });
            }
            layer = next;
            n += 1;
            pn *= rate / n as f64;
        }
        let support = total.keys().map(|k| *k as f64 / 1e9).collect();
        let probs = total.values().copied().collect();
        Ok((support, probs))
    }

    /// Tail rates (λ⁺, λ⁻) bounding how fast the law decays on each side.
    fn tail_rates(&self) -> (f64, f64) {
        let (pos, neg) = self.family.sides();
        (pos.map_or(1.0, |p| p.lambda), neg.map_or(1.0, |n| n.lambda))
    }

    /// The cdf tabulated once for repeated evaluation.
    pub fn cdf_table(&self, cfg: &QuadratureConfig) -> Result<TabulatedCdf> {
        match self.family {
            Family::Poisson { lambda } => {
                let mut support = Vec::new();
                let mut probs = Vec::new();
                let mut p = (-lambda).exp();
                let mut k = 0.0;
                let mut covered = 0.0;
                while covered < 1.0 - 1e-16 && k < lambda + 50.0 * (lambda.sqrt() + 1.0) {
                    support.push(k);
                    probs.push(p);
                    covered += p;
                    k += 1.0;
                    p *= lambda / k;
                }
                return Ok(TabulatedCdf::steps(support, probs));
            }
            Family::CompoundPoisson {
                jumps: JumpDist::Atoms { .. },
                ..
            } => {
                let (support, probs) = self.atomic_support()?;
                return Ok(TabulatedCdf::steps(support, probs));
            }
            _ => {}
        }
        let mean = self.mean_closed();
        let sd = self.variance().sqrt();
        let (lp, lm) = self.tail_rates();
        let hi = mean + (14.0 * sd).max(45.0 / lp);
        let nonneg = self.is_nonnegative();
        let lo = if nonneg { self.offset } else { mean - (14.0 * sd).max(45.0 / lm) };
        let n = crate::levy::TABLE_KNOTS;
        let mut knots: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let cell = (hi - lo) / (n - 1) as f64;
        // geometric refinement where the density may blow up
        let centre = self.offset;
        for j in 1..=120 {
            let d = cell * 0.8f64.powi(j);
            if d < 1e-14 * (1.0 + centre.abs()) {
                break;
            }
            knots.push(centre + d);
            if !nonneg {
                knots.push(centre - d);
            }
        }
        knots.retain(|k| *k >= lo && *k <= hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
        let values: Vec<f64> = knots.par_iter().map(|&x| self.cdf(x, cfg)).collect::<Result<_>>()?;
        let mut running = 0.0f64;
        let values: Vec<f64> = values
            .into_iter()
            .map(|v| {
                running = running.max(v);
                running
            })
            .collect();
        Ok(TabulatedCdf::Smooth {
            lo,
            hi,
            interp: Pchip::new(knots, values),
        })
    }
}

fn ig_params(alpha: f64, lambda: f64) -> (f64, f64) {
    let mean = alpha * (std::f64::consts::PI / lambda).sqrt();
    let shape = 2.0 * std::f64::consts::PI * alpha * alpha;
    (mean, shape)
}

fn compound_gamma_cdf(x: f64, rate: f64, shape: f64, theta: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let mut pn = (-rate).exp();
    let mut total = pn;
    let mut covered = pn;
    let mut n = 0.0;
    while 1.0 - covered > 1e-16 || n < rate {
        n += 1.0;
        pn *= rate / n;
        covered += pn;
        total += pn * special::gamma_p(n * shape, theta * x);
        if n > rate + 60.0 * (rate.sqrt() + 1.0) {
            break;
        }
    }
    total
}

/// P(G₁ − G₂ ≤ y) for independent G₁ ~ Ga(a1, l1), G₂ ~ Ga(a2, l2).
fn gamma_difference_cdf(y: f64, a1: f64, l1: f64, a2: f64, l2: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let f1 = |z: f64| special::gamma_p(a1, l1 * z);
    let lower = (-y).max(0.0);
    if a2 >= 1.0 {
        // ∫_{(−y)⁺}^∞ F₁(y + t) g₂(t) dt
        let log_norm = a2 * l2.ln() - special::ln_gamma(a2);
        let g2 = |t: f64| {
            if t <= 0.0 {
                return if a2 == 1.0 { l2 } else { 0.0 };
            }
            (log_norm + (a2 - 1.0) * t.ln() - l2 * t).exp()
        };
        let span = (a2 / l2).max(1.0 / l2);
        let head = integrate_with_breaks(
            |t| f1(y + t) * g2(t),
            &[lower, lower + 0.25 * span, lower + span, lower + 4.0 * span],
            cfg,
            "gamma-difference cdf",
        )?;
        let tail = integrate_tail(|t| f1(y + t) * g2(t), lower + 4.0 * span, l2, cfg, "gamma-difference cdf")?;
        Ok(head.value + tail.value)
    } else {
        // t = w^{1/a2} removes the t^{a2−1} singularity of the Ga(a2, l2) density.
        let c = (a2 * l2.ln() - special::ln_gamma(a2 + 1.0)).exp();
        let inv = 1.0 / a2;
        let w_lo = lower.powf(a2);
        let w_hi = (60.0 / l2).powf(a2).max(w_lo * 2.0);
        let r = integrate(
            |w| {
                let t = w.powf(inv);
                f1(y + t) * (-l2 * t).exp()
            },
            w_lo,
            w_hi,
            cfg,
            "gamma-difference cdf",
        )?;
        Ok(c * r.value)
    }
}

/// A cdf tabulated for fast repeated evaluation.
#[derive(Debug, Clone)]
pub enum TabulatedCdf {
    /// Exact step function of a discrete law.
    Steps { support: Vec<f64>, cumulative: Vec<f64> },
    /// Monotone cubic interpolant on [lo, hi]; 0 below and 1 above.
    Smooth { lo: f64, hi: f64, interp: Pchip },
}

impl TabulatedCdf {
    fn steps(support: Vec<f64>, probs: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc.min(1.0)
            })
            .collect();
        TabulatedCdf::Steps { support, cumulative }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TabulatedCdf::Steps { support, cumulative } => {
                let i = support.partition_point(|&s| s <= x);
                if i == 0 {
                    0.0
                } else {
                    cumulative[i - 1]
                }
            }
            TabulatedCdf::Smooth { lo, hi, interp } => {
                if x < *lo {
                    0.0
                } else if x > *hi {
                    1.0
                } else {
                    interp.eval(x).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// Kolmogorov–Smirnov distance to the empirical cdf of `samples`.
    pub fn ks_distance(&self, samples: &mut [f64]) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let mut d = 0.0f64;
        let mut i = 0;
        while i < samples.len() {
            let x = samples[i];
            let mut j = i;
            while j < samples.len() && samples[j] == x {
                j += 1;
            }
            let f = self.eval(x);
            let below = i as f64 / n;
            let at = j as f64 / n;
            // left limit, which differs from F(x) at atoms (including the one at 0 of gamma-jump laws)
            let left = self.eval(x - 1e-12 * (1.0 + x.abs()));
            d = d.max((at - f).abs()).max((below - left).abs());
            i = j;
        }
        d
    }
}

/// Small jumps below this size are replaced by a Gaussian in tempered-stable samplers.
pub const SMALL_JUMP_CUTOFF: f64 = 1e-3;

#[derive(Debug, Clone)]
struct JumpSide {
    sign: f64,
    big_rate: f64,
    beta: f64,
    lambda: f64,
    small_mean: f64,
    small_var: f64,
}

impl JumpSide {
    fn new(ts: TemperedStable, sign: f64) -> Self {
        let (a, b, l, e) = (ts.alpha, ts.beta, ts.lambda, SMALL_JUMP_CUTOFF);
        Self {
            sign,
            big_rate: a * l.powf(b) * special::upper_gamma_negative(b, l * e),
            beta: b,
            lambda: l,
            small_mean: a * l.powf(b - 1.0) * special::lower_gamma(1.0 - b, l * e),
            small_var: a * l.powf(b - 2.0) * special::lower_gamma(2.0 - b, l * e),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, s: f64) -> f64 {
        let e = SMALL_JUMP_CUTOFF;
        let n = poisson(rng, s * self.big_rate);
        let mut sum = 0.0;
        for _ in 0..n as u64 {
            // Pareto proposal ∝ u^{−1−β} on (ε, ∞), thinned by e^{−λ(u−ε)}
            loop {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                let jump = e * (1.0 - u).powf(-1.0 / self.beta);
                if v < (-self.lambda * (jump - e)).exp() {
                    sum += jump;
                    break;
                }
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        self.sign * (sum + s * self.small_mean + (s * self.small_var).sqrt() * z)
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Poisson(f64),
    CompoundAtoms { rate: f64, locations: Vec<f64>, cumulative: Vec<f64> },
    CompoundGamma { rate: f64, shape: f64, theta: f64 },
    Gamma { a: f64, b: f64 },
    InverseGaussian { mean: f64, shape: f64 },
    GammaDifference { offset: f64, ap: f64, lp: f64, am: f64, lm: f64 },
    Tempered { offset: f64, sides: Vec<JumpSide> },
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    if mean <= 0.0 {
        0.0
    } else {
        Poisson::new(mean).expect("positive Poisson mean").sample(rng)
    }
}

fn gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> f64 {
    if shape <= 0.0 {
        0.0
    } else {
        Gamma::new(shape, 1.0 / rate).expect("positive gamma parameters").sample(rng)
    }
}

/// Exact sampler for a catalog law and all of its convolution powers.
///
/// Tempered-stable laws with β > 0 simulate jumps above
/// [`SMALL_JUMP_CUTOFF`] exactly and replace the rest by a Gaussian with
/// matching mean and variance.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: SamplerKind,
}

impl Sampler {
    fn new(spec: &IddSpec) -> Self {
        let kind = match &spec.family {
            Family::Poisson { lambda } => SamplerKind::Poisson(*lambda),
            Family::CompoundPoisson {
                rate,
                jumps: JumpDist::Atoms { atoms },
            } => {
                let mut acc = 0.0;
                SamplerKind::CompoundAtoms {
                    rate: *rate,
                    locations: atoms.iter().map(|a| a.location).collect(),
                    cumulative: atoms
                        .iter()
                        .map(|a| {
                            acc += a.prob;
                            acc
                        })
                        .collect(),
                }
            }
            Family::CompoundPoisson {
                rate,
                jumps: JumpDist::Gamma { shape, rate: theta },
            } => SamplerKind::CompoundGamma {
                rate: *rate,
                shape: *shape,
                theta: *theta,
            },
            Family::Gamma { a, b } => SamplerKind::Gamma { a: *a, b: *b },
            Family::InverseGaussian { alpha, lambda } => {
                let (mean, shape) = ig_params(*alpha, *lambda);
                SamplerKind::InverseGaussian { mean, shape }
            }
            _ => {
                let (pos, neg) = spec.family.sides();
                let (p, n) = (pos.unwrap(), neg.unwrap());
                if p.beta == 0.0 && n.beta == 0.0 {
                    SamplerKind::GammaDifference {
                        offset: spec.offset,
                        ap: p.alpha,
                        lp: p.lambda,
                        am: n.alpha,
                        lm: n.lambda,
                    }
                } else {
                    SamplerKind::Tempered {
                        offset: spec.offset,
                        sides: vec![JumpSide::new(p, 1.0), JumpSide::new(n, -1.0)],
                    }
                }
            }
        };
        Self { kind }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_power(rng, 1.0)
    }

    /// A draw from the s-th convolution power, s ∈ [0, 1].
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            SamplerKind::Poisson(l) => poisson(rng, s * l),
            SamplerKind::CompoundAtoms {
                rate,
                locations,
                cumulative,
            } => {
                let n = poisson(rng, s * rate) as u64;
                let mut sum = 0.0;
                for _ in 0..n {
                    let u: f64 = rng.random();
                    let i = cumulative.partition_point(|&c| c < u).min(locations.len() - 1);
                    sum += locations[i];
                }
                sum
            }
            SamplerKind::CompoundGamma { rate, shape, theta } => {
                let n = poisson(rng, s * rate);
                gamma(rng, n * shape, *theta)
            }
            SamplerKind::Gamma { a, b } => gamma(rng, s * a, *b),
            SamplerKind::InverseGaussian { mean, shape } => InverseGaussian::new(s * mean, s * s * shape)
                .expect("positive inverse Gaussian parameters")
                .sample(rng),
            SamplerKind::GammaDifference { offset, ap, lp, am, lm } => {
                s * offset + gamma(rng, s * ap, *lp) - gamma(rng, s * am, *lm)
            }
            SamplerKind::Tempered { offset, sides } => {
                s * offset + sides.iter().map(|side| side.sample(rng, s)).sum::<f64>()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{run, MCConfig};

    fn spec(f: Family) -> IddSpec {
        IddSpec::new(f).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn cgmy() -> IddSpec {
        spec(Family::Cgmy {
            alpha: 1.0,
            beta: 0.5,
            lambda_plus: 2.0,
            lambda_minus: 3.0,
        })
    }

    fn vgd(mu0: f64, alpha: f64, lp: f64, lm: f64) -> IddSpec {
        spec(Family::Vgd {
            mu0,
            alpha,
            lambda_plus: lp,
            lambda_minus: lm,
        })
    }

    fn bgd(ap: f64, lp: f64, am: f64, lm: f64) -> IddSpec {
        spec(Family::Bgd {
            alpha_plus: ap,
            lambda_plus: lp,
            alpha_minus: am,
            lambda_minus: lm,
        })
    }

    #[test]
    fn levy_density_examples() {
        let b = bgd(2.0, 1.5, 1.0, 3.0);
        let u = 0.7;
        assert!((b.levy_density(u).unwrap() - 2.0 / u * (-1.5 * u).exp()).abs() < 1e-15);
        let delta = 0.6;
        let lap = spec(Family::Laplace { mu0: 0.0, delta });
        assert!((lap.levy_density(delta).unwrap() - (-1.0f64).exp() / delta).abs() < 1e-15);
        let g = spec(Family::Gamma { a: 2.0, b: 1.0 });
        assert_eq!(g.levy_density(1e4).unwrap(), 0.0);
        let p = spec(Family::Poisson { lambda: 1.0 });
        assert!(matches!(p.levy_density(1.0), Err(Error::AtomicMeasure(_))));
    }

    #[test]
    fn cf_examples() {
        let l = 2.3;
        let p = spec(Family::Poisson { lambda: l });
        let (a, b) = (1.7, 0.9);
        let g = spec(Family::Gamma { a, b });
        for t in [-3.0, 0.4, 5.0] {
            let exact = (l * (Complex64::new(0.0, t).exp() - 1.0)).exp();
            assert!((p.cf(t) - exact).norm() < 1e-14);
            let exact = Complex64::new(1.0, -t / b).powf(-a);
            assert!((g.cf(t) - exact).norm() < 1e-14);
        }
        assert_eq!(cgmy().cf(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn vgd_cf_matches_rational_form() {
        let (mu0, a, lp, lm) = (0.3, 1.4, 2.0, 0.8);
        let v = vgd(mu0, a, lp, lm);
        for t in [-4.0, 0.5, 2.0] {
            let base = Complex64::new(1.0 + t * t / (lp * lm), -t * (1.0 / lp - 1.0 / lm));
            let exact = Complex64::new(0.0, t * mu0).exp() * base.powf(-a);
            assert!((v.cf(t) - exact).norm() < 1e-13);
        }
    }

    #[test]
    fn cf_consistency_with_quadrature() {
        let c = cfg();
        for s in [
            bgd(2.0, 1.0, 3.0, 2.0),
            vgd(0.5, 1.0, 2.0, 3.0),
            cgmy(),
            spec(Family::Gamma { a: 2.0, b: 3.0 }),
            spec(Family::Gtsd {
                mu: 0.2,
                beta: 0.3,
                alpha_plus: 1.0,
                lambda_plus: 2.0,
                alpha_minus: 0.5,
                lambda_minus: 1.0,
            }),
        ] {
            for i in -10..=10 {
                let t = i as f64;
                let d = (s.cf(t) - s.cf_by_quadrature(t, &c).unwrap()).norm();
                assert!(d < 1e-6, "{} t={t}: {d}", s.name());
            }
        }
    }

    #[test]
    fn conv_power_examples() {
        let g = spec(Family::Gamma { a: 3.0, b: 2.0 }).conv_power(0.5).unwrap();
        assert_eq!(g.family(), &Family::Gamma { a: 1.5, b: 2.0 });
        let p = spec(Family::Poisson { lambda: 4.0 }).conv_power(0.25).unwrap();
        assert_eq!(p.family(), &Family::Poisson { lambda: 1.0 });
        let v = vgd(0.0, 2.0, 1.0, 3.0);
        let vp = v.conv_power(0.3).unwrap();
        for i in -20..=20 {
            let t = i as f64 * 0.5;
            let lhs = vp.cf(t);
            let rhs = (0.3 * v.log_cf(t)).exp();
            assert!((lhs - rhs).norm() < 1e-10);
        }
        assert!(v.conv_power(1.5).is_err());
        let zero = v.conv_power(0.0).unwrap();
        assert!((zero.cf(3.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mean_levy_examples() {
        let c = cfg();
        let (mu0, a, lp, lm) = (0.4, 1.5, 2.0, 3.0);
        let m = vgd(mu0, a, lp, lm).mean_levy(&c).unwrap();
        assert!((m - (mu0 + a / lp - a / lm)).abs() < 1e-14);
        let cg = cgmy().mean_levy(&c).unwrap();
        let g = special::gamma(0.5);
        assert!((cg - (g * 2f64.powf(-0.5) - g * 3f64.powf(-0.5))).abs() < 1e-14);
        assert_eq!(spec(Family::Poisson { lambda: 2.5 }).mean_levy(&c).unwrap(), 2.5);
        let gt = spec(Family::Gtsd {
            mu: 0.7,
            beta: 0.5,
            alpha_plus: 1.0,
            lambda_plus: 2.0,
            alpha_minus: 2.0,
            lambda_minus: 1.0,
        });
        assert!((gt.mean_levy(&c).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn cumulant_examples_and_closed_agreement() {
        let c = cfg();
        assert!((spec(Family::Poisson { lambda: 3.0 }).cumulant(5, &c).unwrap() - 3.0).abs() < 1e-15);
        let (a, lp, lm) = (1.3, 2.0, 0.7);
        let v = vgd(0.0, a, lp, lm);
        let exact = a * (lp * lp + lm * lm) / (lp * lm).powi(2);
        assert!((v.cumulant(2, &c).unwrap() - exact).abs() < 1e-9 * exact);
        assert!((spec(Family::Gamma { a: 2.0, b: 4.0 }).cumulant(1, &c).unwrap() - 0.5).abs() < 1e-10);
        for s in [
            spec(Family::Gamma { a: 2.0, b: 4.0 }),
            spec(Family::Poisson { lambda: 3.0 }),
            v,
            bgd(2.0, 1.0, 3.0, 2.0),
            cgmy(),
            spec(Family::InverseGaussian { alpha: 1.2, lambda: 0.8 }),
        ] {
            for k in 1..=4 {
                let q = s.cumulant(k, &c).unwrap();
                let cl = s.cumulant_closed(k).unwrap();
                assert!((q - cl).abs() <= 1e-8 * cl.abs().max(1e-12), "{} k={k}", s.name());
            }
        }
    }

    #[test]
    fn vgd_alt_params() {
        let f = VgdAltParams {
            mu0: 0.0,
            sigma2: 1.0,
            r: 2.0,
            theta: 0.0,
        }
        .to_family()
        .unwrap();
        assert_eq!(
            f,
            Family::Vgd {
                mu0: 0.0,
                alpha: 1.0,
                lambda_plus: 1.0,
                lambda_minus: 1.0
            }
        );
        let delta = 0.7;
        let lap = VgdAltParams::from_family(&Family::Laplace { mu0: 0.0, delta }).unwrap();
        match lap.to_family().unwrap() {
            Family::Vgd {
                alpha,
                lambda_plus,
                lambda_minus,
                ..
            } => {
                assert_eq!(alpha, 1.0);
                assert!((lambda_plus - 1.0 / delta).abs() < 1e-14 && (lambda_minus - 1.0 / delta).abs() < 1e-14);
            }
            _ => unreachable!(),
        }
        let p = VgdAltParams {
            mu0: 0.5,
            sigma2: 0.25,
            r: 3.0,
            theta: 0.1,
        };
        let back = VgdAltParams::from_family(&p.to_family().unwrap()).unwrap();
        for (a, b) in [(p.mu0, back.mu0), (p.sigma2, back.sigma2), (p.r, back.r), (p.theta, back.theta)] {
            assert!((a - b).abs() < 1e-12);
        }
        let s = spec(p.to_family().unwrap());
        assert!((s.mean_closed() - p.mean()).abs() < 1e-12);
        assert!((s.variance() - p.variance()).abs() < 1e-12);
        assert!(VgdAltParams { sigma2: -1.0, ..p }.to_family().is_err());
    }

    #[test]
    fn validation_names_the_bound() {
        let err = IddSpec::new(Family::Cgmy {
            alpha: 1.0,
            beta: 1.2,
            lambda_plus: 1.0,
            lambda_minus: 1.0,
        })
        .unwrap_err();
        assert!(err.to_string().contains("beta must lie in [0, 1)"), "{err}");
        assert!(IddSpec::new(Family::Gamma { a: 0.0, b: 1.0 }).is_err());
        assert!(IddSpec::new(Family::CompoundPoisson {
            rate: 1.0,
            jumps: JumpDist::Atoms {
                atoms: vec![JumpAtom { location: 1.0, prob: 0.4 }]
            }
        })
        .is_err());
    }

    #[test]
    fn sampler_examples() {
        let mc = MCConfig::with_samples(1_000_000, 17);
        let b = bgd(2.0, 1.0, 3.0, 2.0).sampler();
        assert!(run::<1, _>(&mc, |r| [b.sample(r)]).estimate(0).within(0.5, 4.0));
        let v = vgd(0.0, 1.3, 1.5, 1.5);
        let vs = v.sampler();
        let var = v.variance();
        // standardized third moment of a symmetric law
        let st = run::<1, _>(&mc, |r| [vs.sample(r).powi(3) / var.powf(1.5)]);
        assert!(st.estimate(0).within(0.0, 4.0));
        let c = cgmy();
        let cs = c.sampler();
        let m = c.cumulant(1, &cfg()).unwrap();
        assert!(run::<1, _>(&mc, |r| [cs.sample(r)]).estimate(0).within(m, 4.0));
    }

    #[test]
    fn cdf_examples_and_monotonicity() {
        let c = cfg();
        let lap = spec(Family::Laplace { mu0: 0.0, delta: 1.3 });
        assert!((lap.cdf(0.0, &c).unwrap() - 0.5).abs() < 1e-15);
        let g = spec(Family::Gamma { a: 2.0, b: 1.0 });
        assert!((g.cdf(60.0, &c).unwrap() - 1.0).abs() < 1e-12);
        for s in [cgmy(), bgd(0.6, 1.0, 2.0, 3.0), vgd(0.5, 2.5, 2.0, 1.0)] {
            let xs: Vec<f64> = (-60..=60).map(|i| i as f64 * 0.1).collect();
            let f: Vec<f64> = xs.iter().map(|x| s.cdf(*x, &c).unwrap()).collect();
            assert!(f.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{}", s.name());
            assert!(s.cdf(-60.0, &c).unwrap() < 1e-6);
            assert!(s.cdf(60.0, &c).unwrap() > 1.0 - 1e-6);
        }
    }

    #[test]
    fn gamma_difference_matches_closed_two_sided_exponential() {
        let c = cfg();
        let (a, b) = (1.5, 0.7);
        let tse = spec(Family::TwoSidedExp { a, b });
        let as_bgd = bgd(1.0, a, 1.0, b);
        for i in -30..=30 {
            let x = i as f64 * 0.25;
            let d = (tse.cdf(x, &c).unwrap() - as_bgd.cdf(x, &c).unwrap()).abs();
            assert!(d < 1e-9, "x={x}: {d}");
        }
    }

    #[test]
    fn gil_pelaez_matches_convolution_at_beta_zero_limit() {
        // Laplace through inversion of its own cf versus the closed form
        let c = cfg();
        let g = spec(Family::Gtsd {
            mu: 0.0,
            beta: 0.5,
            alpha_plus: 1.0,
            lambda_plus: 2.0,
            alpha_minus: 1.0,
            lambda_minus: 2.0,
        });
        assert!((g.cdf(0.0, &c).unwrap() - 0.5).abs() < 1e-9);
        let ig = spec(Family::InverseGaussian { alpha: 1.0, lambda: 2.0 });
        let ig_tab = ig.cdf_table(&c).unwrap();
        for x in [0.3, 1.0, 2.5] {
            assert!((ig_tab.eval(x) - ig.cdf(x, &c).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn compound_poisson_cdfs() {
        let c = cfg();
        let cp = spec(Family::CompoundPoisson {
            rate: 2.0,
            jumps: JumpDist::Atoms {
                atoms: vec![JumpAtom { location: 1.0, prob: 1.0 }],
            },
        });
        let p = spec(Family::Poisson { lambda: 2.0 });
        for x in [-0.5, 0.0, 1.0, 2.5, 7.0] {
            assert!((cp.cdf(x, &c).unwrap() - p.cdf(x, &c).unwrap()).abs() < 1e-14);
        }
        // gamma jumps with shape 1: P(X = 0) = e^{−r}
        let cg = spec(Family::CompoundPoisson {
            rate: 1.5,
            jumps: JumpDist::Gamma { shape: 1.0, rate: 2.0 },
        });
        assert!((cg.cdf(0.0, &c).unwrap() - (-1.5f64).exp()).abs() < 1e-15);
        let m = cg.mean_closed();
        assert!((m - 0.75).abs() < 1e-14);
        assert!((cg.variance() - 1.5 * 2.0 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn tabulated_cdf_tracks_direct() {
        let c = cfg();
        let s = cgmy();
        let t = s.cdf_table(&c).unwrap();
        for x in [-2.0, -0.3, 0.0, 0.1, 1.7] {
            assert!((t.eval(x) - s.cdf(x, &c).unwrap()).abs() < 1e-7);
        }
        let p = spec(Family::Poisson { lambda: 2.0 }).cdf_table(&c).unwrap();
        assert_eq!(p.eval(-0.1), 0.0);
        assert!((p.eval(0.0) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn raw_moments_from_cumulants() {
        let p = spec(Family::Poisson { lambda: 2.0 });
        // E X⁴ for Poi(2): λ⁴ + 6λ³ + 7λ² + λ
        assert!((p.raw_moment(4).unwrap() - (16.0 + 48.0 + 28.0 + 2.0)).abs() < 1e-12);
        let g = spec(Family::Gamma { a: 2.0, b: 3.0 });
        assert!((g.raw_moment(3).unwrap() - 2.0 * 3.0 * 4.0 / 27.0).abs() < 1e-14);
    }
}
