//! JSON run files for the `solve` command.

use std::path::PathBuf;

use exmex::prelude::*;
use exmex::{FloatOpsFactory, MatchLiteral};
use serde::{Deserialize, Serialize};

use crate::bench::{
    sine_problem, steady_delta_problem, traveling_delta_problem, variable_diffusion_problem,
};
use crate::error::{Error, Result};
use crate::solver::{Problem, SolverConfig, SpaceFn, SpaceTimeFn};

/// A problem taken from the benchmark set or written out as expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemSpec {
    Benchmark {
        benchmark: u8,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        kappa: Option<f64>,
        #[serde(default)]
        omega: Option<f64>,
    },
    /// Expressions in `x` (and `t` for `source` and `exact`).
    Inline {
        velocity: String,
        diffusion: String,
        #[serde(default = "zero")]
        source: String,
        initial: String,
        #[serde(default)]
        exact: Option<String>,
    },
}

fn zero() -> String {
    "0".into()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSpec {
    /// Solution CSV: `x, phi, exact, css, cts`.
    pub solution: Option<PathBuf>,
    /// Step report CSV.
    pub steps: Option<PathBuf>,
    /// Detector trace CSV, written when the chain is active.
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    /// Grid size `I`; benchmarks supply a default.
    #[serde(default)]
    pub nodes: Option<usize>,
    #[serde(default)]
    pub t_final: Option<f64>,
    /// March to a steady state instead of stopping at `t_final`.
    #[serde(default)]
    pub steady: bool,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(flatten)]
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build_problem(&self) -> Result<Problem> {
        let mut problem = match &self.problem {
            ProblemSpec::Benchmark {
                benchmark,
                delta,
                kappa,
                omega,
            } => benchmark_problem(*benchmark, *delta, *kappa, *omega, self.nodes, self.t_final)?,
            ProblemSpec::Inline {
                velocity,
                diffusion,
                source,
                initial,
                exact,
            } => Problem {
                velocity: space_fn(velocity)?,
                diffusion: space_fn(diffusion)?,
                source: space_time_fn(source)?,
                initial: space_fn(initial)?,
                exact: exact.as_deref().map(space_time_fn).transpose()?,
                t_final: self
                    .t_final
                    .ok_or_else(|| Error::Config("inline problems need t_final".into()))?,
                nodes: self
                    .nodes
                    .ok_or_else(|| Error::Config("inline problems need nodes".into()))?,
            },
        };
        if let Some(n) = self.nodes {
            problem.nodes = n;
        }
        if let Some(t) = self.t_final {
            problem.t_final = t;
        }
        Ok(problem)
    }
}

fn benchmark_problem(
    id: u8,
    delta: Option<f64>,
    kappa: Option<f64>,
    omega: Option<f64>,
    nodes: Option<usize>,
    t_final: Option<f64>,
) -> Result<Problem> {
    let n = |d: usize| nodes.unwrap_or(d);
    let t = |d: f64| t_final.unwrap_or(d);
    Ok(match id {
        1 => steady_delta_problem(delta.unwrap_or(0.1), n(25)),
        2 => sine_problem(omega.unwrap_or(3.0), n(25), t(1.0)),
        3 => traveling_delta_problem(delta.unwrap_or(0.01), kappa.unwrap_or(0.0), n(25), t(1.0)),
        4 => traveling_delta_problem(delta.unwrap_or(0.1), kappa.unwrap_or(0.0), n(100), t(1.0)),
        5 => variable_diffusion_problem(n(100), t(1.0)),
        6 => traveling_delta_problem(
            delta.unwrap_or(0.15),
            kappa.unwrap_or(2.7778e-3),
            n(60),
            t(0.5),
        ),
        7 => traveling_delta_problem(
            delta.unwrap_or(0.015),
            kappa.unwrap_or(5.5556e-3),
            n(60),
            t(0.5),
        ),
        _ => {
            return Err(Error::Config(format!(
                "benchmark id must be 1..=7, got {id}"
            )));
        }
    })
}

/// Decimal literals with an optional exponent, such as `2`, `.5` or `1e-4`.
#[derive(Clone, Debug)]
struct SciLiteral;

impl MatchLiteral for SciLiteral {
    fn is_literal(text: &str) -> Option<&str> {
        let b = text.as_bytes();
        let digits = |mut k: usize| {
            while k < b.len() && b[k].is_ascii_digit() {
                k += 1;
            }
            k
        };
        let int_end = digits(0);
        let mut end = int_end;
        if end < b.len() && b[end] == b'.' {
            end = digits(end + 1);
        }
        if end == 0 || (end == 1 && int_end == 0) {
            return None;
        }
        if end < b.len() && (b[end] == b'e' || b[end] == b'E') {
            let sign = end
                + 1
                + (end + 1 < b.len() && (b[end + 1] == b'+' || b[end + 1] == b'-')) as usize;
            let exp_end = digits(sign);
            if exp_end > sign {
                end = exp_end;
            }
        }
        Some(&text[..end])
    }
}

type Expr = FlatEx<f64, FloatOpsFactory<f64>, SciLiteral>;

/// Parses `text` and checks it only uses the allowed variables.
fn parse(text: &str, allowed: &[&str]) -> Result<(Expr, Vec<usize>)> {
    let expr = Expr::parse(text).map_err(|e| Error::Config(format!("'{text}': {e}")))?;
    let slots = expr
        .var_names()
        .iter()
        .map(|v| {
            allowed
                .iter()
                .position(|a| a == v)
                .ok_or_else(|| Error::Config(format!("'{text}': unknown variable '{v}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((expr, slots))
}

fn space_fn(text: &str) -> Result<SpaceFn> {
    let f = space_time_fn_with(text, &["x"])?;
    Ok(Box::new(move |x| f(x, 0.0)))
}

fn space_time_fn(text: &str) -> Result<SpaceTimeFn> {
    space_time_fn_with(text, &["x", "t"])
}

fn space_time_fn_with(text: &str, allowed: &[&str]) -> Result<SpaceTimeFn> {
    let (expr, slots) = parse(text, allowed)?;
    // evaluate once so that malformed operator use fails early
    let probe: Vec<f64> = slots.iter().map(|_| 0.25).collect();
    expr.eval(&probe)
        .map_err(|e| Error::Config(format!("'{text}': {e}")))?;
    Ok(Box::new(move |x, t| {
        let vars: Vec<f64> = slots.iter().map(|&s| if s == 0 { x } else { t }).collect();
        expr.eval(&vars).unwrap_or(f64::NAN)
    }))
}
