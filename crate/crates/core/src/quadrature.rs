//! Adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre panels.
//!
//! The adaptive routine is a heap-driven G10/K21 scheme in the QUADPACK
//! mould: the interval with the largest error estimate is bisected until
//! the summed estimate meets `max(abs_tol, rel_tol·|I|)` or the subdivision
//! budget runs out. Semi-infinite ranges go through the exponential map
//! `u = a − ln(t)/rate`, which turns an `e^{-rate·u}` tail into a constant.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be strictly positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;
    fn add(self, rhs: Self) -> Self {
        QuadResult {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            subdivisions: self.subdivisions + rhs.subdivisions,
        }
    }
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        error: 0.0,
        subdivisions: 0,
    };
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_723_432_161_230,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let round = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(round);
    }
    Segment {
        a,
        b,
        value,
        error,
        abs: res_abs,
    }
}

/// Adaptive integration over `[a, b]`, seeded with the given interior breakpoints.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
    what: &str,
) -> Result<QuadResult> {
    debug_assert!(points.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let s = kronrod21(&f, w[0], w[1]);
        total += s.value;
        total_err += s.error;
        total_abs += s.abs;
        heap.push(s);
    }
    let mut subdivisions = heap.len();
    let mut frozen_err = 0.0;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NonConvergence {
                what: what.to_string(),
                achieved: f64::INFINITY,
                requested: cfg.abs_tol,
            });
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol || total_err <= 1e3 * f64::EPSILON * total_abs {
            return Ok(QuadResult {
                value: total,
                error: total_err,
                subdivisions,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                what: what.to_string(),
                achieved: total_err,
                requested: tol,
            });
        }
        let Some(worst) = heap.pop() else {
            // Everything left is at round-off resolution.
            return if frozen_err <= 10.0 * tol {
                Ok(QuadResult {
                    value: total,
                    error: total_err,
                    subdivisions,
                })
            } else {
                Err(Error::NonConvergence {
                    what: what.to_string(),
                    achieved: total_err,
                    requested: tol,
                })
            };
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs() {
            frozen_err += worst.error;
            continue;
        }
        let left = kronrod21(&f, worst.a, mid);
        let right = kronrod21(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
    what: &str,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult::ZERO);
    }
    if b < a {
        let r = integrate_with_breaks(f, &[b, a], cfg, what)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    integrate_with_breaks(f, &[a, b], cfg, what)
}

/// ∫_a^∞ f(u) du through u = a − ln(t)/rate, t ∈ (0, 1].
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    rate: f64,
    cfg: &QuadratureConfig,
    what: &str,
) -> Result<QuadResult> {
    let g = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let u = a - t.ln() / rate;
        let v = f(u);
        if v == 0.0 {
            0.0
        } else {
            v / (rate * t)
        }
    };
    integrate_with_breaks(g, &[0.0, 1e-8, 1e-4, 0.05, 0.4, 1.0], cfg, what)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z_old = z;
            z = z_old - p1 / dp;
            if (z - z_old).abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on the panels delimited by `breaks`.
pub fn composite_rule(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let mut out = Vec::with_capacity(order * breaks.len().saturating_sub(1));
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        out.extend(x.iter().zip(&w).map(|(xi, wi)| (c + h * xi, h * wi)));
    }
    out
}
