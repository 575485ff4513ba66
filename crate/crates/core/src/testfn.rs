//! Named, hand-differentiated test functions g.
//!
//! Only smooth functions of at most polynomial or exponential growth are
//! offered, so every estimator can bound its integrands up front.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TestFn {
    /// g(x) = x
    Id,
    /// g(x) = x²
    Square,
    Sin,
    /// g(x) = e^{−x²}
    Gauss,
    /// g(x) = e^{κx}
    ExpTilt(f64),
    /// g(x) = ln(1 + x²)
    Log1pSq,
    /// g(x) = x e^{−x²}
    XGauss,
    Const(f64),
    /// g(x) = a + b x
    Affine(f64, f64),
}

impl TestFn {
    /// The functions reachable by name from a task file.
    pub const REGISTRY: [&'static str; 6] = ["id", "square", "sin", "gauss", "exp_tilt(κ)", "log1psq"];

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            TestFn::Id => x,
            TestFn::Square => x * x,
            TestFn::Sin => x.sin(),
            TestFn::Gauss => (-x * x).exp(),
            TestFn::ExpTilt(k) => (k * x).exp(),
            TestFn::Log1pSq => x.mul_add(x, 1.0).ln(),
            TestFn::XGauss => x * (-x * x).exp(),
            TestFn::Const(c) => c,
            TestFn::Affine(a, b) => b.mul_add(x, a),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match *self {
            TestFn::Id => 1.0,
            TestFn::Square => 2.0 * x,
            TestFn::Sin => x.cos(),
            TestFn::Gauss => -2.0 * x * (-x * x).exp(),
            TestFn::ExpTilt(k) => k * (k * x).exp(),
            TestFn::Log1pSq => 2.0 * x / x.mul_add(x, 1.0),
            TestFn::XGauss => (1.0 - 2.0 * x * x) * (-x * x).exp(),
            TestFn::Const(_) => 0.0,
            TestFn::Affine(_, b) => b,
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match *self {
            TestFn::Id | TestFn::Const(_) | TestFn::Affine(..) => 0.0,
            TestFn::Square => 2.0,
            TestFn::Sin => -x.sin(),
            TestFn::Gauss => (4.0 * x * x - 2.0) * (-x * x).exp(),
            TestFn::ExpTilt(k) => k * k * (k * x).exp(),
            TestFn::Log1pSq => {
                let q = x.mul_add(x, 1.0);
                2.0 * (1.0 - x * x) / (q * q)
            }
            TestFn::XGauss => (4.0 * x * x * x - 6.0 * x) * (-x * x).exp(),
        }
    }

    /// Exponential growth rate c with |g|, |g′|, |g″| = O(e^{c x}) as x → +∞
    /// and O(e^{c x}) as x → −∞ (so c < 0 means growth to the left).
    pub fn growth(&self) -> f64 {
        match *self {
            TestFn::ExpTilt(k) => k,
            _ => 0.0,
        }
    }

    /// Affine functions make the Cacoullos bracket collapse.
    pub fn slope_if_affine(&self) -> Option<f64> {
        match *self {
            TestFn::Id => Some(1.0),
            TestFn::Const(_) => Some(0.0),
            TestFn::Affine(_, b) => Some(b),
            _ => None,
        }
    }

    /// Coefficients c with g(x) = Σ c_j x^j, when g is a polynomial.
    pub fn polynomial(&self) -> Option<Vec<f64>> {
        match *self {
            TestFn::Id => Some(vec![0.0, 1.0]),
            TestFn::Square => Some(vec![0.0, 0.0, 1.0]),
            TestFn::Const(c) => Some(vec![c]),
            TestFn::Affine(a, b) => Some(vec![a, b]),
            _ => None,
        }
    }
}

impl fmt::Display for TestFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFn::Id => write!(f, "id"),
            TestFn::Square => write!(f, "square"),
            TestFn::Sin => write!(f, "sin"),
            TestFn::Gauss => write!(f, "gauss"),
            TestFn::ExpTilt(k) => write!(f, "exp_tilt({k})"),
            TestFn::Log1pSq => write!(f, "log1psq"),
            TestFn::XGauss => write!(f, "xgauss"),
            TestFn::Const(c) => write!(f, "const({c})"),
            TestFn::Affine(a, b) => write!(f, "affine({a},{b})"),
        }
    }
}

impl FromStr for TestFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "id" => return Ok(TestFn::Id),
            "square" => return Ok(TestFn::Square),
            "sin" => return Ok(TestFn::Sin),
            "gauss" => return Ok(TestFn::Gauss),
            "log1psq" => return Ok(TestFn::Log1pSq),
            _ => {}
        }
        if let Some(arg) = t.strip_prefix("exp_tilt(").and_then(|r| r.strip_suffix(')')) {
            let k: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("exp_tilt needs a numeric κ, got {arg:?}")))?;
            if !k.is_finite() || k == 0.0 {
                return Err(Error::invalid(format!("exp_tilt needs a finite nonzero κ, got {k}")));
            }
            return Ok(TestFn::ExpTilt(k));
        }
        Err(Error::invalid(format!(
            "unknown test function {t:?}; expected one of {}",
            Self::REGISTRY.join(", ")
        )))
    }
}

impl TryFrom<String> for TestFn {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TestFn> for String {
    fn from(g: TestFn) -> String {
        g.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for g in [
            TestFn::Id,
            TestFn::Square,
            TestFn::Sin,
            TestFn::Gauss,
            TestFn::ExpTilt(0.7),
            TestFn::Log1pSq,
            TestFn::XGauss,
            TestFn::Affine(1.0, -2.0),
        ] {
            for x in [-1.3, -0.2, 0.0, 0.45, 2.0] {
                let d1 = (g.value(x + h) - g.value(x - h)) / (2.0 * h);
                let d2 = (g.d1(x + h) - g.d1(x - h)) / (2.0 * h);
                assert!((d1 - g.d1(x)).abs() < 1e-8, "{g} at {x}");
                assert!((d2 - g.d2(x)).abs() < 1e-8, "{g} at {x}");
            }
        }
    }

    #[test]
    fn names_round_trip_and_unknown_rejected() {
        for name in ["id", "square", "sin", "gauss", "exp_tilt(0.5)", "log1psq"] {
            let g: TestFn = name.parse().unwrap();
            assert_eq!(g.to_string(), name);
        }
        assert!("cube".parse::<TestFn>().is_err());
        assert!("exp_tilt(x)".parse::<TestFn>().is_err());
        let g: TestFn = serde_json::from_str("\"exp_tilt(-1)\"").unwrap();
        assert_eq!(g, TestFn::ExpTilt(-1.0));
    }
}
