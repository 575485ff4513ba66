//! Task files: parsing, dispatch and report serialization.
//!
//! A task file is a JSON object with keys `distribution`, `task`, `mc`,
//! `quadrature` and `output`. Reports carry `input`, `results`,
//! `diagnostics` and `warnings`, with numbers rounded to 12 significant digits.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::actuarial::{esscher_closed, generalized_wpcp, generalized_wpcp_oracle, gini, modified_variance, wpcp, wpcp_definition_oracle};
use crate::bounds::{cacoullos_bounds, chen_upper_bound, gamma_bounds_closed};
use crate::catalog::{Family, IddSpec, VgdAltParams};
use crate::error::Error;
use crate::identities::{stein_residual_bgd, stein_residual_cgmy, stein_residual_levy, stein_residual_vgd, verify_identity};
use crate::mc::{MCConfig, MCEstimate, Method};
use crate::quadrature::QuadratureConfig;
use crate::testfn::TestFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "principle", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum PremiumSpec {
    Esscher { kappa: f64 },
    Wpcp { w: TestFn },
    ModifiedVariance,
    Generalized { n: u32, w: TestFn },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Cumulants {
        k_max: u32,
    },
    #[serde(alias = "verify-identity")]
    VerifyIdentity {
        n: u32,
        #[serde(alias = "g_name")]
        g: TestFn,
    },
    Bounds {
        #[serde(alias = "g_name")]
        g: TestFn,
    },
    Premium(PremiumSpec),
    Gini,
    Stein {
        #[serde(alias = "g_name")]
        g: TestFn,
    },
}

/// A validated task file.
#[derive(Debug, Clone, Serialize)]
pub struct TaskSpec {
    pub distribution: Family,
    pub task: Task,
    pub mc: MCConfig,
    pub quadrature: QuadratureConfig,
    pub output: Format,
    /// Fields that were absent and took their defaults.
    #[serde(skip)]
    pub defaults_applied: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TaskError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{0}")]
    Other(String),
}

impl TaskError {
    /// 2 for parse or validation failures, 3 for numeric non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            TaskError::Parse(_) | TaskError::Validation(_) => 2,
            TaskError::Numeric(_) => 3,
            TaskError::Other(_) => 1,
        }
    }
}

impl From<Error> for TaskError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } | Error::DivergentMoment(_) => TaskError::Numeric(e.to_string()),
            Error::ZeroDenominator(_) => TaskError::Other(e.to_string()),
            _ => TaskError::Validation(e.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    distribution: Value,
    task: Value,
    #[serde(default)]
    mc: Option<Map<String, Value>>,
    #[serde(default)]
    quadrature: Option<Map<String, Value>>,
    #[serde(default)]
    output: Option<Format>,
}

fn parse_err(section: &str, e: serde_json::Error) -> TaskError {
    TaskError::Parse(format!("{section}: {e}"))
}

/// Parses a distribution object, accepting VGD in either the (α, λ⁺, λ⁻)
/// chart or the (σ², r, θ) chart.
pub fn parse_distribution(v: &Value) -> Result<Family, TaskError> {
    let alt = v.get("family").and_then(Value::as_str) == Some("vgd")
        && v.get("params").is_some_and(|p| p.get("sigma2").is_some());
    let family = if alt {
        let params = v.get("params").cloned().unwrap_or(Value::Null);
        let p: VgdAltParams = serde_json::from_value(params).map_err(|e| parse_err("distribution.params", e))?;
        p.to_family()?
    } else {
        serde_json::from_value(v.clone()).map_err(|e| parse_err("distribution", e))?
    };
    family.validate()?;
    Ok(family)
}

fn section<T: for<'de> Deserialize<'de> + Default>(
    name: &str,
    fields: &[&str],
    raw: Option<Map<String, Value>>,
    defaults: &mut Vec<String>,
) -> Result<T, TaskError> {
    let map = raw.unwrap_or_default();
    for f in fields {
        if !map.contains_key(*f) {
            defaults.push(format!("{name}.{f}"));
        }
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| parse_err(name, e))
}

pub fn parse_spec(text: &str) -> Result<TaskSpec, TaskError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| parse_err("task file", e))?;
    let distribution = parse_distribution(&raw.distribution)?;
    let task: Task = serde_json::from_value(raw.task).map_err(|e| parse_err("task", e))?;
    let mut defaults = Vec::new();
    let mc: MCConfig = section("mc", &["n_samples", "seed", "batch"], raw.mc, &mut defaults)?;
    let quadrature: QuadratureConfig =
        section("quadrature", &["rel_tol", "abs_tol", "max_subdivisions"], raw.quadrature, &mut defaults)?;
    if raw.output.is_none() {
        defaults.push("output".into());
    }
    let spec = TaskSpec {
        distribution,
        task,
        mc,
        quadrature,
        output: raw.output.unwrap_or_default(),
        defaults_applied: defaults,
    };
    spec.validate()?;
    Ok(spec)
}

impl TaskSpec {
    pub fn validate(&self) -> Result<(), TaskError> {
        self.mc.validate()?;
        self.quadrature.validate()?;
        let positive = |name: &str, v: u32| {
            if v == 0 {
                Err(TaskError::Validation(format!("{name} must be at least 1")))
            } else {
                Ok(())
            }
        };
        match self.task {
            Task::Cumulants { k_max } => positive("k_max", k_max),
            Task::VerifyIdentity { n, .. } => positive("n", n),
            Task::Premium(PremiumSpec::Generalized { n, .. }) => positive("n", n),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub metric: String,
    pub value: f64,
    pub std_error: Option<f64>,
    pub method: Method,
    pub n: Option<u64>,
}

impl ResultRow {
    fn closed(metric: impl Into<String>, value: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            std_error: None,
            method: Method::ClosedForm,
            n: None,
        }
    }

    fn numeric(metric: impl Into<String>, e: MCEstimate) -> Self {
        Self {
            metric: metric.into(),
            value: e.value,
            std_error: Some(e.std_error),
            method: Method::Numeric,
            n: (e.n > 0).then_some(e.n),
        }
    }

    /// A derived scalar such as a z-score; no standard error of its own.
    fn statistic(metric: impl Into<String>, value: f64) -> Self {
        Self {
            method: Method::Numeric,
            ..Self::closed(metric, value)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub seed: u64,
    pub n_samples: u64,
    pub batch: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub defaults_applied: Vec<String>,
    pub notes: Vec<String>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub input: Value,
    pub results: Vec<ResultRow>,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn empty(spec: &TaskSpec) -> Self {
        Self {
            input: serde_json::to_value(spec).unwrap_or(Value::Null),
            results: Vec::new(),
            diagnostics: Diagnostics {
                seed: spec.mc.seed,
                n_samples: spec.mc.n_samples,
                batch: spec.mc.batch,
                rel_tol: spec.quadrature.rel_tol,
                abs_tol: spec.quadrature.abs_tol,
                max_subdivisions: spec.quadrature.max_subdivisions,
                defaults_applied: spec.defaults_applied.clone(),
                notes: Vec::new(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            warnings: Vec::new(),
        }
    }
}

pub fn run_task(spec: &TaskSpec) -> Result<Report, TaskError> {
    spec.validate()?;
    let base = IddSpec::new(spec.distribution.clone())?;
    let (mc, q) = (&spec.mc, &spec.quadrature);
    let mut report = Report::empty(spec);
    if !spec.defaults_applied.is_empty() {
        report
            .diagnostics
            .notes
            .push(format!("defaults applied for: {}", spec.defaults_applied.join(", ")));
    }
    let rows = &mut report.results;
    match spec.task {
        Task::Cumulants { k_max } => {
            let mut worst = 0.0f64;
            for k in 1..=k_max {
                let closed = base.cumulant_closed(k)?;
                let numeric = base.cumulant(k, q)?;
                worst = worst.max((closed - numeric).abs() / closed.abs().max(f64::MIN_POSITIVE));
                rows.push(ResultRow::closed(format!("cumulant_{k}"), closed));
                rows.push(ResultRow::statistic(format!("cumulant_{k}_quadrature"), numeric));
            }
            report
                .diagnostics
                .notes
                .push(format!("largest relative gap between closed and quadrature cumulants: {worst:.3e}"));
        }
        Task::VerifyIdentity { n, g } => {
            let check = verify_identity(&base, n, g, mc, q)?;
            rows.push(ResultRow::numeric("identity_rhs", check.rhs));
            rows.push(ResultRow::numeric("oracle", check.oracle));
            rows.push(ResultRow::statistic("z", check.z));
            if let Some(x) = check.exact {
                rows.push(ResultRow::closed("exact", x));
            }
            report.diagnostics.notes.push(format!("integrability: {}", check.integrability.detail));
        }
        Task::Bounds { g } => {
            let b = cacoullos_bounds(&base, g, mc, q)?;
            let tag = |v: f64, se: Option<f64>| ResultRow {
                metric: String::new(),
                value: v,
                std_error: se,
                method: b.method,
                n: (b.method == Method::Numeric).then_some(mc.n_samples),
            };
            rows.push(ResultRow {
                metric: "lower".into(),
                ..tag(b.lower, b.lower_se)
            });
            rows.push(ResultRow {
                metric: "upper".into(),
                ..tag(b.upper, b.upper_se)
            });
            if let Some(o) = b.oracle {
                let row = if o.std_error == 0.0 && o.n == 0 {
                    ResultRow::closed("variance", o.value)
                } else {
                    ResultRow::numeric("variance", o)
                };
                rows.push(row);
            }
            if let Family::Gamma { a, b: rate } = spec.distribution {
                if let Ok(c) = gamma_bounds_closed(a, rate, g) {
                    rows.push(ResultRow::closed("lower_closed", c.lower));
                    rows.push(ResultRow::closed("upper_closed", c.upper));
                }
            }
            rows.push(ResultRow::numeric("chen_upper", chen_upper_bound(&base, g, mc, q)?));
        }
        Task::Premium(p) => match p {
            PremiumSpec::Esscher { kappa } => {
                rows.push(ResultRow::closed("esscher", esscher_closed(&base, kappa)?.value));
                let w = TestFn::ExpTilt(kappa);
                rows.push(ResultRow::numeric("wpcp", wpcp(&base, w, mc, q)?.estimate()));
                rows.push(ResultRow::numeric("definition_oracle", wpcp_definition_oracle(&base, w, mc)?));
            }
            PremiumSpec::Wpcp { w } => {
                rows.push(ResultRow::numeric("wpcp", wpcp(&base, w, mc, q)?.estimate()));
                rows.push(ResultRow::numeric("definition_oracle", wpcp_definition_oracle(&base, w, mc)?));
            }
            PremiumSpec::ModifiedVariance => {
                rows.push(ResultRow::closed("modified_variance", modified_variance(&base)?.value));
            }
            PremiumSpec::Generalized { n, w } => {
                rows.push(ResultRow::numeric("generalized_wpcp", generalized_wpcp(&base, n, w, mc, q)?.estimate()));
                rows.push(ResultRow::numeric("definition_oracle", generalized_wpcp_oracle(&base, n, w, mc)?));
            }
        },
        Task::Gini => {
            let g = gini(&base, mc, q)?;
            rows.push(ResultRow::numeric("gini_levy_formula", g.levy_formula.estimate()));
            rows.push(ResultRow::numeric("gini_covariance_oracle", g.covariance_oracle.estimate()));
            rows.push(ResultRow::statistic("z", g.z));
            rows.push(ResultRow::closed("variance_shortcut", g.variance_shortcut));
            report.warnings.extend(g.warnings);
            if let Some(l) = g.label {
                report.warnings.push(l);
            }
        }
        Task::Stein { g } => {
            let r = match spec.distribution {
                Family::Cgmy { .. } => stein_residual_cgmy(&base, g, mc, q)?,
                Family::Vgd { .. } | Family::Laplace { .. } => {
                    stein_residual_vgd(&VgdAltParams::from_family(&spec.distribution)?, g, mc)?
                }
                Family::Bgd { .. } => stein_residual_bgd(&base, g, mc)?,
                _ => {
                    report
                        .diagnostics
                        .notes
                        .push("no family-specific Stein operator; used the generic Lévy form".into());
                    stein_residual_levy(&base, g, mc, q)?
                }
            };
            rows.push(ResultRow::numeric("stein_residual", r));
            rows.push(ResultRow::statistic("z", r.z_score(0.0)));
        }
    }
    Ok(report)
}

/// x rounded to 12 significant digits; non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| round12(v).to_string()).unwrap_or_default()
}

/// Deterministic serialization of a report.
pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(report).expect("reports are plain data");
            round_value(&mut v);
            let mut out = serde_json::to_vec_pretty(&v).expect("reports are plain data");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["metric", "value", "std_error", "method", "n"])
                .expect("writing to memory");
            for r in &report.results {
                let method = match r.method {
                    Method::ClosedForm => "closed_form",
                    Method::Numeric => "numeric",
                };
                w.write_record([
                    r.metric.clone(),
                    cell(Some(r.value)),
                    cell(r.std_error),
                    method.to_string(),
                    r.n.map(|n| n.to_string()).unwrap_or_default(),
                ])
                .expect("writing to memory");
            }
            w.into_inner().expect("writing to memory")
        }
    }
}
