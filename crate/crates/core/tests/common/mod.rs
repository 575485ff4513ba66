#![allow(dead_code)]

use levy_stein::catalog::{Family, IddSpec, JumpAtom, JumpDist};
use levy_stein::levy::LevyMeasure;
use levy_stein::quadrature::{integrate_tail, integrate_with_breaks, QuadratureConfig};

pub fn spec(f: Family) -> IddSpec {
    IddSpec::new(f).unwrap()
}

pub fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

pub fn cgmy() -> IddSpec {
    spec(Family::Cgmy {
        alpha: 1.0,
        beta: 0.5,
        lambda_plus: 2.0,
        lambda_minus: 3.0,
    })
}

/// One member of every catalog family.
pub fn catalog() -> Vec<IddSpec> {
    vec![
        spec(Family::Poisson { lambda: 2.0 }),
        spec(Family::CompoundPoisson {
            rate: 1.5,
            jumps: JumpDist::Atoms {
                atoms: vec![
                    JumpAtom { location: 1.0, prob: 0.5 },
                    JumpAtom { location: -0.5, prob: 0.3 },
                    JumpAtom { location: 2.0, prob: 0.2 },
                ],
            },
        }),
        spec(Family::CompoundPoisson {
            rate: 2.0,
            jumps: JumpDist::Gamma { shape: 1.5, rate: 2.0 },
        }),
        spec(Family::Gamma { a: 2.0, b: 1.5 }),
        spec(Family::InverseGaussian { alpha: 0.8, lambda: 2.0 }),
        spec(Family::Laplace { mu0: 0.3, delta: 0.7 }),
        spec(Family::TwoSidedExp { a: 2.0, b: 3.0 }),
        spec(Family::Bgd {
            alpha_plus: 2.0,
            lambda_plus: 1.5,
            alpha_minus: 1.0,
            lambda_minus: 3.0,
        }),
        spec(Family::Vgd {
            mu0: 0.2,
            alpha: 1.3,
            lambda_plus: 2.0,
            lambda_minus: 3.0,
        }),
        cgmy(),
        spec(Family::Gtsd {
            mu: 0.5,
            beta: 0.3,
            alpha_plus: 1.0,
            lambda_plus: 2.0,
            alpha_minus: 0.5,
            lambda_minus: 3.0,
        }),
    ]
}

/// ∫_ℝ η_k(u) du, split at the atoms for atomic measures.
pub fn eta_integral(mu: &LevyMeasure, k: u32) -> f64 {
    let c = cfg();
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let f = |u: f64| mu.eta(k, sign * u, &c).unwrap();
        let (has, rate) = match mu {
            LevyMeasure::Atomic { atoms } => (atoms.iter().any(|a| a.location * sign > 0.0), 0.0),
            LevyMeasure::Continuous { pos, neg } => {
                let side = if sign > 0.0 { pos } else { neg };
                (side.is_some(), side.as_ref().map_or(0.0, |s| s.decay()))
            }
        };
        if !has {
            continue;
        }
        match mu {
            LevyMeasure::Atomic { atoms } => {
                let mut pts: Vec<f64> = atoms
                    .iter()
                    .filter(|a| a.location * sign > 0.0)
                    .map(|a| a.location.abs())
                    .collect();
                pts.push(0.0);
                pts.sort_by(f64::total_cmp);
                total += integrate_with_breaks(f, &pts, &c, "eta").unwrap().value;
            }
            LevyMeasure::Continuous { .. } => {
                let head = integrate_with_breaks(f, &[0.0, 1e-6, 1e-3, 0.1, 1.0], &c, "eta").unwrap().value;
                total += head + integrate_tail(f, 1.0, rate, &c, "eta").unwrap().value;
            }
        }
    }
    total
}
