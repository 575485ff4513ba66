//! Lévy measures, tail integrals η_k and the bias variables Y_k.
//!
//! Continuous measures are stored as two half-line densities. The positive
//! side is a density ρ⁺ on (0, ∞); the negative side is stored reflected,
//! so ν(du) = ρ⁻(−u) du for u < 0. Every catalog family is tempered stable
//! on each side, `α u^{−1−β} e^{−λu}`, which gives closed forms for moments,
//! tail integrals and bias samplers. Arbitrary densities are accepted too and
//! go through quadrature and tabulated inverse CDFs.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::quadrature::{composite_rule, integrate, integrate_tail, integrate_with_breaks, QuadratureConfig};
use crate::special;

/// Knots used by every tabulated distribution built from a half-line density.
pub const TABLE_KNOTS: usize = 4096;

/// Half-line density `α u^{−1−β} e^{−λu}` on u > 0.
///
/// β may be negative; β = −γ with α = r·θ^γ/Γ(γ) is a compound Poisson
/// process with rate r and Ga(γ, θ) jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperedStable {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl TemperedStable {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Self {
        Self { alpha, beta, lambda }
    }

    pub fn density(&self, u: f64) -> f64 {
        if u <= 0.0 || self.alpha == 0.0 {
            return 0.0;
        }
        self.alpha * u.powf(-1.0 - self.beta) * (-self.lambda * u).exp()
    }

    /// ∫₀^∞ u^p ρ(u) du.
    pub fn moment(&self, p: f64) -> Result<f64> {
        self.tilted_moment(p, 0.0)
    }

    /// ∫₀^∞ u^p e^{κu} ρ(u) du.
    pub fn tilted_moment(&self, p: f64, kappa: f64) -> Result<f64> {
        if p <= self.beta {
            return Err(Error::DivergentMoment(format!(
                "∫u^{p} ν(du) diverges at the origin for β = {}",
                self.beta
            )));
        }
        let rate = self.lambda - kappa;
        if rate <= 0.0 {
            return Err(Error::DivergentMoment(format!(
                "exponential weight {kappa} is not dominated by the tail rate {}",
                self.lambda
            )));
        }
        if self.alpha == 0.0 {
            return Ok(0.0);
        }
        Ok(self.alpha * (special::ln_gamma(p - self.beta) + (self.beta - p) * rate.ln()).exp())
    }

    /// ∫_u^∞ y^k ρ(y) dy for u ≥ 0.
    pub fn tail_moment(&self, k: f64, u: f64) -> f64 {
        if self.alpha == 0.0 {
            return 0.0;
        }
        let s = k - self.beta;
        self.alpha * self.lambda.powf(-s) * special::upper_gamma(s, self.lambda * u.max(0.0))
    }

    /// ∫₀^∞ (e^{itu} − 1) ρ(u) du.
    pub fn log_cf(&self, t: f64) -> Complex64 {
        if self.alpha == 0.0 || t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let z = Complex64::new(self.lambda, -t);
        if self.beta.abs() < 1e-12 {
            -self.alpha * (z / self.lambda).ln()
        } else {
            let g = special::gamma(-self.beta);
            self.alpha * g * (z.powf(self.beta) - self.lambda.powf(self.beta))
        }
    }
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied half-line density with the hints quadrature needs:
/// it must decay at least like `e^{−decay·u}` and blow up at most like
/// `u^{−1−singularity}` near the origin.
#[derive(Clone)]
pub struct CustomDensity {
    pub density: DensityFn,
    pub decay: f64,
    pub singularity: f64,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("decay", &self.decay)
            .field("singularity", &self.singularity)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum HalfLine {
    Tempered(TemperedStable),
    Custom(CustomDensity),
}

impl HalfLine {
    pub fn density(&self, u: f64) -> f64 {
        match self {
            HalfLine::Tempered(t) => t.density(u),
            HalfLine::Custom(c) => {
                if u <= 0.0 {
                    0.0
                } else {
                    (c.density)(u)
                }
            }
        }
    }

    pub fn decay(&self) -> f64 {
        match self {
            HalfLine::Tempered(t) => t.lambda,
            HalfLine::Custom(c) => c.decay,
        }
    }

    pub fn singularity(&self) -> f64 {
        match self {
            HalfLine::Tempered(t) => t.beta,
            HalfLine::Custom(c) => c.singularity,
        }
    }

    fn is_null(&self) -> bool {
        matches!(self, HalfLine::Tempered(t) if t.alpha == 0.0)
    }

    /// ∫₀^∞ h(u) ρ(u) du where h grows at most like e^{growth·u}.
    ///
    /// (0, 1] is mapped through u = t^m, m = 1/(1−β), which removes the
    /// u^{−1−β} singularity for integrands vanishing linearly at the origin.
    pub fn integrate<H: Fn(f64) -> f64>(&self, h: H, growth: f64, cfg: &QuadratureConfig, what: &str) -> Result<f64> {
        if self.is_null() {
            return Ok(0.0);
        }
        let rate = self.decay() - growth;
        if !(rate > 0.0) {
            return Err(Error::DivergentMoment(format!(
                "{what}: integrand growth {growth} is not dominated by tail rate {}",
                self.decay()
            )));
        }
        let m = 1.0 / (1.0 - self.singularity());
        let head = integrate_with_breaks(
            |t| {
                if t <= 0.0 {
                    return 0.0;
                }
                let u = t.powf(m);
                let hv = h(u);
                if hv == 0.0 {
                    0.0
                } else {
                    hv * self.density(u) * m * t.powf(m - 1.0)
                }
            },
            &[0.0, 0.01, 0.1, 0.5, 1.0],
            cfg,
            what,
        )?;
        let tail = integrate_tail(
            |u| {
                let hv = h(u);
                if hv == 0.0 {
                    0.0
                } else {
                    hv * self.density(u)
                }
            },
            1.0,
            rate,
            cfg,
            what,
        )?;
        Ok(head.value + tail.value)
    }

    pub fn moment(&self, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
        match self {
            HalfLine::Tempered(t) => t.moment(p),
            HalfLine::Custom(_) => {
                if p <= self.singularity() {
                    return Err(Error::DivergentMoment(format!("∫u^{p} ν(du) diverges at the origin")));
                }
                self.integrate(|u| u.powf(p), 0.0, cfg, "moment")
            }
        }
    }

    /// ∫_u^∞ y^k ρ(y) dy.
    pub fn tail_moment(&self, k: f64, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
        match self {
            HalfLine::Tempered(t) => Ok(t.tail_moment(k, u)),
            HalfLine::Custom(_) => {
                if u <= 0.0 {
                    return self.moment(k, cfg);
                }
                let f = |y: f64| y.powf(k) * self.density(y);
                let start = u.max(1.0);
                let mut total = integrate_tail(f, start, self.decay(), cfg, "tail integral")?.value;
                if u < 1.0 {
                    total += integrate(f, u, 1.0, cfg, "tail integral")?.value;
                }
                Ok(total)
            }
        }
    }

    /// Cumulative ∫₀^{y_j} t^p ρ(t) dt on an increasing grid, plus the full integral.
    fn cumulative(&self, p: f64, grid: &[f64], cfg: &QuadratureConfig) -> Result<(Vec<f64>, f64)> {
        let f = |t: f64| t.powf(p) * self.density(t);
        let first = integrate(f, 0.0, grid[0], cfg, "cumulative table")?.value;
        let pieces: Result<Vec<f64>> = grid
            .par_windows(2)
            .map(|w| integrate(f, w[0], w[1], cfg, "cumulative table").map(|r| r.value))
            .collect();
        let mut cum = Vec::with_capacity(grid.len());
        let mut acc = first;
        cum.push(acc);
        for piece in pieces? {
            acc += piece;
            cum.push(acc);
        }
        let last = *grid.last().unwrap();
        let rest = integrate_tail(f, last, self.decay(), cfg, "cumulative table")?.value;
        Ok((cum, acc + rest))
    }

    fn table_grid(&self, k: u32) -> Vec<f64> {
        let lo = 1e-9 / self.decay();
        let hi = (40.0 + 5.0 * (k as f64 + 1.0)) / self.decay();
        let n = TABLE_KNOTS;
        let (a, b) = (lo.ln(), hi.ln());
        (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Pos,
    Neg,
    Both,
}

impl Region {
    fn pos(self) -> bool {
        matches!(self, Region::Pos | Region::Both)
    }
    fn neg(self) -> bool {
        matches!(self, Region::Neg | Region::Both)
    }
}

#[derive(Debug, Clone)]
pub enum LevyMeasure {
    Continuous { pos: Option<HalfLine>, neg: Option<HalfLine> },
    Atomic { atoms: Vec<Atom> },
}

impl LevyMeasure {
    pub fn tempered(pos: Option<TemperedStable>, neg: Option<TemperedStable>) -> Self {
        LevyMeasure::Continuous {
            pos: pos.map(HalfLine::Tempered),
            neg: neg.map(HalfLine::Tempered),
        }
    }

    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("an atomic Lévy measure needs at least one atom"));
        }
        for a in &atoms {
            if a.location == 0.0 || !a.location.is_finite() {
                return Err(Error::invalid(format!("atom location must be finite and nonzero, got {}", a.location)));
            }
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(Error::invalid(format!("atom mass must be positive, got {}", a.mass)));
            }
        }
        Ok(LevyMeasure::Atomic { atoms })
    }

    /// Measure with arbitrary half-line densities; `neg` is evaluated at |u|.
    pub fn custom(pos: Option<CustomDensity>, neg: Option<CustomDensity>) -> Result<Self> {
        for c in pos.iter().chain(neg.iter()) {
            if !(c.decay > 0.0) {
                return Err(Error::invalid("custom density needs a positive decay rate"));
            }
            if !(c.singularity < 1.0) {
                return Err(Error::invalid("custom density must satisfy ∫|u| ν(du) < ∞ near 0 (singularity < 1)"));
            }
        }
        Ok(LevyMeasure::Continuous {
            pos: pos.map(HalfLine::Custom),
            neg: neg.map(HalfLine::Custom),
        })
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, LevyMeasure::Atomic { .. })
    }

    pub fn has_pos(&self) -> bool {
        match self {
            LevyMeasure::Continuous { pos, .. } => pos.as_ref().is_some_and(|s| !s.is_null()),
            LevyMeasure::Atomic { atoms } => atoms.iter().any(|a| a.location > 0.0),
        }
    }

    pub fn has_neg(&self) -> bool {
        match self {
            LevyMeasure::Continuous { neg, .. } => neg.as_ref().is_some_and(|s| !s.is_null()),
            LevyMeasure::Atomic { atoms } => atoms.iter().any(|a| a.location < 0.0),
        }
    }

    pub fn is_two_sided(&self) -> bool {
        self.has_pos() && self.has_neg()
    }

    /// Density at u ≠ 0; atomic measures have none.
    pub fn density(&self, u: f64) -> Result<f64> {
        match self {
            LevyMeasure::Atomic { .. } => Err(Error::AtomicMeasure("this measure".into())),
            LevyMeasure::Continuous { pos, neg } => Ok(if u > 0.0 {
                pos.as_ref().map_or(0.0, |s| s.density(u))
            } else if u < 0.0 {
                neg.as_ref().map_or(0.0, |s| s.density(-u))
            } else {
                0.0
            }),
        }
    }

    /// ∫ h dν over the region.
    pub fn integrate<H: Fn(f64) -> f64>(&self, h: H, region: Region, cfg: &QuadratureConfig) -> Result<f64> {
        self.integrate_with_growth(h, region, 0.0, cfg)
    }

    /// As [`integrate`](Self::integrate) for integrands growing like e^{growth·u}.
    pub fn integrate_with_growth<H: Fn(f64) -> f64>(
        &self,
        h: H,
        region: Region,
        growth: f64,
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        match self {
            LevyMeasure::Atomic { atoms } => Ok(atoms
                .iter()
                .filter(|a| (a.location > 0.0 && region.pos()) || (a.location < 0.0 && region.neg()))
                .map(|a| h(a.location) * a.mass)
                .sum()),
            LevyMeasure::Continuous { pos, neg } => {
                let mut total = 0.0;
                if region.pos() {
                    if let Some(s) = pos {
                        total += s.integrate(&h, growth, cfg, "Lévy integral (positive side)")?;
                    }
                }
                if region.neg() {
                    if let Some(s) = neg {
                        total += s.integrate(|u| h(-u), -growth, cfg, "Lévy integral (negative side)")?;
                    }
                }
                Ok(total)
            }
        }
    }

    /// ∫ u^k ν(du), closed form where the sides allow it.
    pub fn moment(&self, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
        match self {
            LevyMeasure::Atomic { atoms } => Ok(atoms.iter().map(|a| a.location.powi(k as i32) * a.mass).sum()),
            LevyMeasure::Continuous { pos, neg } => {
                let mut total = 0.0;
                if let Some(s) = pos {
                    total += s.moment(k as f64, cfg)?;
                }
                if let Some(s) = neg {
                    let m = s.moment(k as f64, cfg)?;
                    total += if k % 2 == 0 { m } else { -m };
                }
                Ok(total)
            }
        }
    }

    /// ∫ u^k ν(du) by quadrature only, the independent check on [`moment`](Self::moment).
    pub fn moment_numeric(&self, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
        if let LevyMeasure::Continuous { pos, neg } = self {
            for s in pos.iter().chain(neg.iter()) {
                if k as f64 <= s.singularity() && !s.is_null() {
                    return Err(Error::DivergentMoment(format!("∫u^{k} ν(du) diverges at the origin")));
                }
            }
        }
        self.integrate(|u| u.powi(k as i32), Region::Both, cfg)
    }

    /// ∫ e^{κu} u ν(du), the jump part of an Esscher-tilted mean.
    pub fn tilted_mean(&self, kappa: f64, cfg: &QuadratureConfig) -> Result<f64> {
        match self {
            LevyMeasure::Continuous {
                pos: pos @ (None | Some(HalfLine::Tempered(_))),
                neg: neg @ (None | Some(HalfLine::Tempered(_))),
            } => {
                let mut total = 0.0;
                if let Some(HalfLine::Tempered(t)) = pos {
                    total += t.tilted_moment(1.0, kappa)?;
                }
                if let Some(HalfLine::Tempered(t)) = neg {
                    total -= t.tilted_moment(1.0, -kappa)?;
                }
                Ok(total)
            }
            _ => self.integrate_with_growth(|u| u * (kappa * u).exp(), Region::Both, kappa, cfg),
        }
    }

    /// ∫ min(1, u²) ν(du), the Lévy integrability functional.
    pub fn levy_functional(&self, cfg: &QuadratureConfig) -> Result<f64> {
        self.integrate(|u| (u * u).min(1.0), Region::Both, cfg)
    }

    /// η_k⁺(u) = ∫_u^∞ y^k ν(dy) for u > 0 and η_k⁻(u) = −∫_{−∞}^u y^k ν(dy) for u < 0.
    pub fn eta(&self, k: u32, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if u == 0.0 || !u.is_finite() {
            return Err(Error::invalid(format!("tail integral needs a finite nonzero argument, got {u}")));
        }
        let ki = k as i32;
        match self {
            LevyMeasure::Atomic { atoms } => Ok(if u > 0.0 {
                atoms
                    .iter()
                    .filter(|a| a.location > u)
                    .map(|a| a.location.powi(ki) * a.mass)
                    .sum()
            } else {
                -atoms
                    .iter()
                    .filter(|a| a.location < u)
                    .map(|a| a.location.powi(ki) * a.mass)
                    .sum::<f64>()
            }),
            LevyMeasure::Continuous { pos, neg } => {
                if u > 0.0 {
                    pos.as_ref().map_or(Ok(0.0), |s| s.tail_moment(k as f64, u, cfg))
                } else {
                    let t = neg.as_ref().map_or(Ok(0.0), |s| s.tail_moment(k as f64, -u, cfg))?;
                    // −∫_{−∞}^u y^k ν(dy) = (−1)^{k+1} ∫_{|u|}^∞ t^k ρ⁻(t) dt
                    Ok(if k % 2 == 0 { -t } else { t })
                }
            }
        }
    }

    /// The bias variable Y_k with density η_k / C_{k+1}.
    pub fn bias(&self, k: u32, cfg: &QuadratureConfig) -> Result<BiasVariable> {
        BiasVariable::build(self, k, false, cfg)
    }

    /// As [`bias`](Self::bias), but continuous sides are always sampled from a
    /// tabulated inverse CDF even when a closed-form sampler exists.
    pub fn bias_tabulated(&self, k: u32, cfg: &QuadratureConfig) -> Result<BiasVariable> {
        BiasVariable::build(self, k, true, cfg)
    }

    /// Fixed rule for ∫ h(u) ν(du), h growing at most like e^{growth·u}.
    pub fn density_rule(&self, growth: f64) -> Result<LevyRule> {
        let mut rule = LevyRule::default();
        match self {
            LevyMeasure::Atomic { atoms } => {
                for a in atoms {
                    rule.push(a.location, a.mass);
                }
            }
            LevyMeasure::Continuous { pos, neg } => {
                for (side, sign) in [(pos, 1.0), (neg, -1.0)] {
                    let Some(side) = side else { continue };
                    if side.is_null() {
                        continue;
                    }
                    let rate = side.decay() - sign * growth;
                    if !(rate > 0.0) {
                        return Err(Error::DivergentMoment(format!(
                            "integrand growth {growth} is not dominated by tail rate {}",
                            side.decay()
                        )));
                    }
                    let m = 1.0 / (1.0 - side.singularity());
                    for (t, w) in composite_rule(&head_breaks(), 10) {
                        let u = t.powf(m);
                        rule.push(sign * u, w * m * t.powf(m - 1.0) * side.density(u));
                    }
                    for (u, w) in composite_rule(&tail_breaks(rate), 8) {
                        rule.push(sign * u, w * side.density(u));
                    }
                }
            }
        }
        Ok(rule)
    }

    /// Fixed rule for ∫ h(v) η_m(v) dv over ℝ, h growing at most like e^{growth·v}.
    pub fn eta_rule(&self, m: u32, growth: f64, cfg: &QuadratureConfig) -> Result<LevyRule> {
        let mut rule = LevyRule::default();
        match self {
            LevyMeasure::Atomic { atoms } => {
                for sign in [1.0, -1.0] {
                    let mut locs: Vec<f64> = atoms
                        .iter()
                        .filter(|a| a.location * sign > 0.0)
                        .map(|a| a.location.abs())
                        .collect();
                    if locs.is_empty() {
                        continue;
                    }
                    locs.sort_by(f64::total_cmp);
                    locs.dedup();
                    let mut breaks = vec![0.0];
                    breaks.extend(locs);
                    for w in breaks.windows(2) {
                        let mid = 0.5 * (w[0] + w[1]);
                        let eta = self.eta(m, sign * mid, cfg)?;
                        for (v, wt) in composite_rule(w, 16) {
                            rule.push(sign * v, wt * eta);
                        }
                    }
                }
            }
            LevyMeasure::Continuous { pos, neg } => {
                for (side, sign) in [(pos, 1.0), (neg, -1.0)] {
                    let Some(side) = side else { continue };
                    if side.is_null() {
                        continue;
                    }
                    let rate = side.decay() - sign * growth;
                    if !(rate > 0.0) {
                        return Err(Error::DivergentMoment(format!(
                            "integrand growth {growth} is not dominated by tail rate {}",
                            side.decay()
                        )));
                    }
                    let pts: Vec<(f64, f64)> = composite_rule(&head_breaks(), 8)
                        .into_iter()
                        .chain(composite_rule(&tail_breaks(rate), 8))
                        .collect();
                    for (v, w) in pts {
                        let eta = self.eta(m, sign * v, cfg)?;
                        rule.push(sign * v, w * eta);
                    }
                }
            }
        }
        Ok(rule)
    }

    /// Replaces each continuous side by `n`-proportional atoms placed at the
    /// midpoint quantiles of the normalized u²ν(du), preserving ∫u²ν exactly.
    pub fn atomic_approximation(&self, n: usize, cfg: &QuadratureConfig) -> Result<LevyMeasure> {
        let LevyMeasure::Continuous { pos, neg } = self else {
            return Ok(self.clone());
        };
        let sides: Vec<(&HalfLine, f64)> = [(pos, 1.0), (neg, -1.0)]
            .into_iter()
            .filter_map(|(s, sign)| s.as_ref().filter(|s| !s.is_null()).map(|s| (s, sign)))
            .collect();
        let c2: Vec<f64> = sides.iter().map(|(s, _)| s.moment(2.0, cfg)).collect::<Result<_>>()?;
        let total: f64 = c2.iter().sum();
        let mut atoms = Vec::with_capacity(n);
        for ((side, sign), c2_side) in sides.iter().zip(&c2) {
            let n_side = ((n as f64 * c2_side / total).round() as usize).max(1);
            let grid = side.table_grid(2);
            let (cum, full) = side.cumulative(2.0, &grid, cfg)?;
            let inverse = monotone_inverse(&grid, &cum, full);
            for j in 0..n_side {
                let q = inverse.eval((j as f64 + 0.5) / n_side as f64);
                atoms.push(Atom {
                    location: sign * q,
                    mass: c2_side / (n_side as f64 * q * q),
                });
            }
        }
        LevyMeasure::atomic(atoms)
    }
}

fn head_breaks() -> Vec<f64> {
    let mut b: Vec<f64> = (0..=12).rev().map(|j| 0.25f64.powi(j)).collect();
    b.insert(0, 0.0);
    b
}

fn tail_breaks(rate: f64) -> Vec<f64> {
    let end = 1.0 + 40.0 / rate;
    let panels = ((end - 1.0).ceil() as usize).clamp(1, 64);
    let width = (end - 1.0) / panels as f64;
    (0..=panels).map(|i| 1.0 + width * i as f64).collect()
}

/// PCHIP inverse of a cumulative table normalized by `total`.
fn monotone_inverse(grid: &[f64], cum: &[f64], total: f64) -> Pchip {
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    for (g, c) in grid.iter().zip(cum) {
        let f = c / total;
        if f > *xs.last().unwrap() + 1e-15 && f < 1.0 {
            xs.push(f);
            ys.push(*g);
        }
    }
    xs.push(1.0);
    ys.push(*grid.last().unwrap());
    Pchip::new(xs, ys)
}

/// Nodes and weights of a fixed quadrature rule over a Lévy measure or tail kernel.
#[derive(Debug, Clone, Default)]
pub struct LevyRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LevyRule {
    fn push(&mut self, node: f64, weight: f64) {
        if weight != 0.0 && weight.is_finite() {
            self.nodes.push(node);
            self.weights.push(weight);
        }
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(u, w)| w * f(*u)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone)]
enum Component {
    /// Y = sign · U · T with T ~ Ga(shape, rate).
    Scaled { gamma: Gamma<f64>, sign: f64 },
    /// Y = U · location.
    Atom { location: f64 },
    /// Y = sign · F⁻¹(U) from a tabulated cdf of |Y|.
    Table { inverse: Pchip, sign: f64 },
}

/// Y_k with density f_k = η_k / C_{k+1}.
///
/// Every side is sampled as Y = U·T with T ∝ |t|^{k+1} ν(dt), which is exact
/// for the Fubini representation ∫h(y)η_k(y)dy = ∫ t^{k+1} E h(Ut) ν(dt).
#[derive(Debug, Clone)]
pub struct BiasVariable {
    pub k: u32,
    pub normalizer: f64,
    measure: LevyMeasure,
    components: Vec<Component>,
    cumulative: Vec<f64>,
}

impl BiasVariable {
    fn build(measure: &LevyMeasure, k: u32, force_table: bool, cfg: &QuadratureConfig) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("bias variables are defined for k ≥ 1"));
        }
        if measure.is_two_sided() && k % 2 == 0 {
            return Err(Error::SignedKernel { k });
        }
        let normalizer = measure.moment(k + 1, cfg)?;
        if normalizer == 0.0 || !normalizer.is_finite() {
            return Err(Error::DivergentMoment(format!("normalizer C_{} = {normalizer}", k + 1)));
        }
        let mut components = Vec::new();
        let mut weights = Vec::new();
        match measure {
            LevyMeasure::Atomic { atoms } => {
                for a in atoms {
                    components.push(Component::Atom { location: a.location });
                    weights.push(a.location.abs().powi(k as i32 + 1) * a.mass);
                }
            }
            LevyMeasure::Continuous { pos, neg } => {
                for (side, sign) in [(pos, 1.0), (neg, -1.0)] {
                    let Some(side) = side else { continue };
                    if side.is_null() {
                        continue;
                    }
                    let w = side.moment(k as f64 + 1.0, cfg)?;
                    let comp = match side {
                        HalfLine::Tempered(t) if !force_table => Component::Scaled {
                            gamma: Gamma::new(k as f64 + 1.0 - t.beta, 1.0 / t.lambda)
                                .map_err(|e| Error::invalid(e.to_string()))?,
                            sign,
                        },
                        _ => Component::Table {
                            inverse: bias_table(side, k, cfg)?,
                            sign,
                        },
                    };
                    components.push(comp);
                    weights.push(w);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(Self {
            k,
            normalizer,
            measure: measure.clone(),
            components,
            cumulative,
        })
    }

    pub fn density(&self, y: f64, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(self.measure.eta(self.k, y, cfg)? / self.normalizer)
    }

    /// E Y_k = C_{k+2} / (2 C_{k+1}).
    pub fn mean(&self, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(self.measure.moment(self.k + 2, cfg)? / (2.0 * self.normalizer))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let pick: f64 = rng.random();
        let idx = self
            .cumulative
            .partition_point(|&c| c < pick)
            .min(self.components.len() - 1);
        let u: f64 = rng.random();
        match &self.components[idx] {
            Component::Scaled { gamma, sign } => sign * u * gamma.sample(rng),
            Component::Atom { location } => u * location,
            Component::Table { inverse, sign } => sign * inverse.eval(u),
        }
    }
}

/// Inverse cdf of |Y_k| on one side: F(y) = (∫₀^y t^{k+1}ρ + y·η_k(y)) / C_{k+1}.
fn bias_table(side: &HalfLine, k: u32, cfg: &QuadratureConfig) -> Result<Pchip> {
    let grid = side.table_grid(k);
    let (a, norm) = side.cumulative(k as f64 + 1.0, &grid, cfg)?;
    let (b, total_k) = side.cumulative(k as f64, &grid, cfg)?;
    let cdf: Vec<f64> = grid
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(y, (a, b))| a + y * (total_k - b).max(0.0))
        .collect();
    Ok(monotone_inverse(&grid, &cdf, norm))
}
