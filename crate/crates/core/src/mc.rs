//! Deterministic parallel Monte Carlo.
//!
//! Work is cut into fixed-size batches. Batch `i` draws from a ChaCha8
//! generator seeded with `seed` on stream `i`, so the sample set depends
//! only on `(seed, n_samples, batch)` and never on the thread count.
//! Per-batch accumulators are merged in batch order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type McRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x1d_5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MCConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub batch: u64,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: DEFAULT_SEED,
            batch: 16_384,
        }
    }
}

impl MCConfig {
    pub fn with_samples(n_samples: u64, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(Error::invalid(format!(
                "n_samples must be at least 1000, got {}",
                self.n_samples
            )));
        }
        if self.batch == 0 {
            return Err(Error::invalid("batch must be positive"));
        }
        Ok(())
    }

    /// A configuration whose streams are disjoint from `self`'s, for independent oracles.
    pub fn independent(&self, salt: u64) -> Self {
        let mut z = self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        Self {
            seed: z ^ (z >> 31),
            ..*self
        }
    }
}

/// Whether a reported number came from a closed form or from simulation/quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Numeric,
}

/// Point estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

impl MCEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            n: 0,
        }
    }

    /// (value − target)/SE, with a zero-SE exact match reported as 0.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.value - target;
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }

    /// z-score of the difference between two independent estimates.
    pub fn z_versus(&self, other: &MCEstimate) -> f64 {
        let se = self.std_error.hypot(other.std_error);
        let d = self.value - other.value;
        if se > 0.0 {
            d / se
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target).abs() <= k
    }
}

/// Streaming mean and co-moment accumulator over `D` columns.
#[derive(Debug, Clone, Copy)]
pub struct Stats<const D: usize> {
    n: u64,
    mean: [f64; D],
    comoment: [[f64; D]; D],
}

impl<const D: usize> Default for Stats<D> {
    fn default() -> Self {
        Self {
            n: 0,
            mean: [0.0; D],
            comoment: [[0.0; D]; D],
        }
    }
}

impl<const D: usize> Stats<D> {
    pub fn push(&mut self, x: [f64; D]) {
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        let mut delta = [0.0; D];
        for i in 0..D {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] * inv;
        }
        for i in 0..D {
            for j in i..D {
                self.comoment[i][j] += delta[i] * (x[j] - self.mean[j]);
            }
        }
    }

    pub fn merge(&mut self, other: &Stats<D>) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        let mut delta = [0.0; D];
        for i in 0..D {
            delta[i] = other.mean[i] - self.mean[i];
            self.mean[i] += delta[i] * nb / n;
        }
        for i in 0..D {
            for j in i..D {
                self.comoment[i][j] += other.comoment[i][j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    /// Unbiased sample covariance of columns `i` and `j`.
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if self.n < 2 {
            return 0.0;
        }
        self.comoment[a][b] / (self.n - 1) as f64
    }

    pub fn var(&self, i: usize) -> f64 {
        self.cov(i, i)
    }

    pub fn estimate(&self, i: usize) -> MCEstimate {
        MCEstimate {
            value: self.mean[i],
            std_error: (self.var(i).max(0.0) / self.n as f64).sqrt(),
            n: self.n,
        }
    }

    /// Delta-method estimate of a smooth function of the column means.
    pub fn delta(&self, value: f64, grad: [f64; D]) -> MCEstimate {
        let mut v = 0.0;
        for i in 0..D {
            for j in 0..D {
                v += grad[i] * grad[j] * self.cov(i, j);
            }
        }
        MCEstimate {
            value,
            std_error: (v.max(0.0) / self.n as f64).sqrt(),
            n: self.n,
        }
    }

    pub fn linear(&self, coeffs: [f64; D]) -> MCEstimate {
        let value = (0..D).map(|i| coeffs[i] * self.mean[i]).sum();
        self.delta(value, coeffs)
    }

    /// mean(i)/mean(j) with delta-method SE.
    pub fn ratio(&self, i: usize, j: usize) -> Result<MCEstimate> {
        let den = self.mean[j];
        if den == 0.0 || !den.is_finite() {
            return Err(Error::ZeroDenominator(format!("sample mean of column {j} is {den}")));
        }
        let value = self.mean[i] / den;
        let mut grad = [0.0; D];
        grad[i] += 1.0 / den;
        grad[j] -= self.mean[i] / (den * den);
        Ok(self.delta(value, grad))
    }

    /// Covariance of the quantities whose product, first and second factor
    /// sit in columns `ab`, `a`, `b`: mean(ab) − mean(a)·mean(b).
    pub fn covariance_from_product(&self, ab: usize, a: usize, b: usize) -> MCEstimate {
        let (ma, mb) = (self.mean[a], self.mean[b]);
        let mut grad = [0.0; D];
        grad[ab] += 1.0;
        grad[a] -= mb;
        grad[b] -= ma;
        self.delta(self.mean[ab] - ma * mb, grad)
    }
}

/// Runs `draw` `cfg.n_samples` times across deterministic batches.
pub fn run<const D: usize, F>(cfg: &MCConfig, draw: F) -> Stats<D>
where
    F: Fn(&mut McRng) -> [f64; D] + Sync,
{
    let batch = cfg.batch.max(1);
    let n_batches = cfg.n_samples.div_ceil(batch);
    let parts: Vec<Stats<D>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = McRng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let len = batch.min(cfg.n_samples - b * batch);
            let mut s = Stats::<D>::default();
            for _ in 0..len {
                s.push(draw(&mut rng));
            }
            s
        })
        .collect();
    let mut total = Stats::<D>::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<[f64; 2]> = (0..1000).map(|i| [(i as f64).sin(), (i as f64 * 0.3).cos()]).collect();
        let mut whole = Stats::<2>::default();
        xs.iter().for_each(|x| whole.push(*x));
        let mut a = Stats::<2>::default();
        let mut b = Stats::<2>::default();
        xs[..337].iter().for_each(|x| a.push(*x));
        xs[337..].iter().for_each(|x| b.push(*x));
        a.merge(&b);
        assert!((a.mean(0) - whole.mean(0)).abs() < 1e-14);
        assert!((a.cov(0, 1) - whole.cov(0, 1)).abs() < 1e-13);
        assert!((a.var(1) - whole.var(1)).abs() < 1e-13);
    }

    #[test]
    fn uniform_mean_and_se() {
        let cfg = MCConfig::with_samples(200_000, 7);
        let s = run::<1, _>(&cfg, |r| [r.random::<f64>()]);
        let e = s.estimate(0);
        assert_eq!(e.n, 200_000);
        assert!(e.within(0.5, 4.0));
        let expected_se = (1.0f64 / 12.0 / 200_000.0).sqrt();
        assert!((e.std_error / expected_se - 1.0).abs() < 0.01);
    }

    #[test]
    fn bit_identical_for_same_seed() {
        let cfg = MCConfig {
            n_samples: 50_001,
            seed: 99,
            batch: 1000,
        };
        let f = |r: &mut McRng| [r.random::<f64>().ln()];
        let a = run::<1, _>(&cfg, f).estimate(0);
        let b = run::<1, _>(&cfg, f).estimate(0);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = run::<1, _>(&cfg.independent(1), f).estimate(0);
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn ratio_and_covariance_delta() {
        let cfg = MCConfig::with_samples(100_000, 3);
        let s = run::<3, _>(&cfg, |r| {
            let u: f64 = r.random();
            [u * u, u, u]
        });
        // Cov(U,U) = 1/12
        assert!(s.covariance_from_product(0, 1, 2).within(1.0 / 12.0, 4.0));
        let q = s.ratio(0, 1).unwrap();
        // E U² / E U = 2/3
        assert!(q.within(2.0 / 3.0, 4.0));
    }

    #[test]
    fn rejects_small_runs() {
        assert!(MCConfig::with_samples(999, 0).validate().is_err());
    }
}
