//! Method-of-lines integration of `φ_t = -u(x)φ' + κ(x)φ'' + f` on the
//! periodic unit interval, with per-node space and time schemes and the
//! global step `Δt = min_i Δt_i`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cfl::{optimal_cfl_poly, TimeScheme};
use crate::error::{Error, Result};
use crate::mood::{self, DetectorConfig, DetectorOutcome};
use crate::rkdesign::{ButcherTableau, SHARED_C};
use crate::spectral::{
    named_scheme, stencil_at, PhysicalParams, SchemeKind, SpectralCurve, MIN_NODES,
};

pub type SpaceFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `css` value of the centered scheme.
pub const CENTERED: u8 = 0;
/// `css` value of the weak upwind scheme.
pub const WEAK: u8 = 1;
/// `css` value of the strong upwind scheme, only reachable by configuration.
pub const STRONG: u8 = 2;
/// `cts` value of RK₄.
pub const RK4: u8 = 0;
/// `cts` value of RK_D.
pub const RKD: u8 = 1;

pub struct Problem {
    pub velocity: SpaceFn,
    pub diffusion: SpaceFn,
    pub source: SpaceTimeFn,
    pub initial: SpaceFn,
    /// Reference solution, when one is known.
    pub exact: Option<SpaceTimeFn>,
    pub t_final: f64,
    pub nodes: usize,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("t_final", &self.t_final)
            .field("nodes", &self.nodes)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl Problem {
    /// Constant coefficients, no source.
    pub fn constant(u: f64, kappa: f64, initial: SpaceFn, t_final: f64, nodes: usize) -> Self {
        Self {
            velocity: Box::new(move |_| u),
            diffusion: Box::new(move |_| kappa),
            source: Box::new(|_, _| 0.0),
            initial,
            exact: None,
            t_final,
            nodes,
        }
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.nodes as f64
    }

    /// Nodes `x_i = iΔx`, `i = 0..I-1`.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| i as f64 * self.dx()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < MIN_NODES {
            return Err(Error::GridTooSmall {
                min: MIN_NODES,
                got: self.nodes,
            });
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!(
                "t_final must be > 0, got {}",
                self.t_final
            )));
        }
        let gap = ((self.initial)(0.0) - (self.initial)(1.0)).abs();
        if gap > 1e-12 {
            return Err(Error::Config(format!(
                "initial condition is not 1-periodic (gap {gap:e})"
            )));
        }
        let gap = ((self.source)(0.0, 0.0) - (self.source)(1.0, 0.0)).abs();
        // relative to the source magnitude, which can be large for steep data
        let scale = self
            .grid()
            .iter()
            .map(|&x| (self.source)(x, 0.0).abs())
            .fold(1.0, f64::max);
        if gap > 1e-12 * scale {
            return Err(Error::Config(format!(
                "source is not 1-periodic (gap {gap:e})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceChoice {
    Centered,
    Weak,
    Strong,
    /// Centered everywhere, with a posteriori fallback to weak upwind.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeChoice {
    Rk4,
    Rkd,
    /// RK_D below the Péclet threshold of the node's space scheme, RK₄ above.
    Hybrid,
}

/// How the global step is chosen from `Δt_max = min_i Δt_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DtPolicy {
    Max,
    Factor(f64),
    Fixed(f64),
}

impl std::str::FromStr for DtPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |v: &str| -> Result<f64> {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number in dt policy '{s}'")))?;
            if x > 0.0 && x.is_finite() {
                Ok(x)
            } else {
                Err(Error::Config(format!(
                    "dt policy value must be > 0 in '{s}'"
                )))
            }
        };
        if s == "max" {
            Ok(DtPolicy::Max)
        } else if let Some(v) = s.strip_prefix("factor:") {
            Ok(DtPolicy::Factor(num(v)?))
        } else if let Some(v) = s.strip_prefix("fixed:") {
            Ok(DtPolicy::Fixed(num(v)?))
        } else {
            Err(Error::Config(format!(
                "unknown dt policy '{s}' (expected max, factor:<r> or fixed:<v>)"
            )))
        }
    }
}

impl TryFrom<String> for DtPolicy {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DtPolicy> for String {
    fn from(p: DtPolicy) -> String {
        p.to_string()
    }
}

impl fmt::Display for DtPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtPolicy::Max => write!(f, "max"),
            DtPolicy::Factor(r) => write!(f, "factor:{r}"),
            DtPolicy::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

/// Time scheme of nodes kept centered while the detector chain is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenteredTime {
    /// Centered nodes always use RK₄; only cured nodes follow the hybrid rule.
    #[default]
    Rk4Always,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MoodSettings {
    pub enabled: bool,
    pub theta_scd: f64,
    pub theta_sd: f64,
    pub signed_sd: bool,
    pub centered_time: CenteredTime,
}

impl Default for MoodSettings {
    fn default() -> Self {
        let d = DetectorConfig::default();
        Self {
            enabled: false,
            theta_scd: d.theta_scd,
            theta_sd: d.theta_sd,
            signed_sd: d.signed_sd,
            centered_time: CenteredTime::default(),
        }
    }
}

impl MoodSettings {
    pub fn detectors(&self) -> Result<DetectorConfig> {
        let mut cfg = DetectorConfig::new(self.theta_scd, self.theta_sd)?;
        cfg.signed_sd = self.signed_sd;
        Ok(cfg)
    }
}

/// Which spectrum sets the local CFL numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CflSpectrum {
    /// The `I` eigenvalues of the grid operator.
    #[default]
    Discrete,
    /// 1024 samples of the continuous curve.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub space: SpaceChoice,
    pub time: TimeChoice,
    pub dt_policy: DtPolicy,
    pub mood: MoodSettings,
    pub cfl_spectrum: CflSpectrum,
    pub max_steps: usize,
    /// Keep every detector pass in the step reports.
    pub trace_detectors: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            space: SpaceChoice::Centered,
            time: TimeChoice::Rk4,
            dt_policy: DtPolicy::Max,
            mood: MoodSettings::default(),
            cfl_spectrum: CflSpectrum::Discrete,
            max_steps: 10_000_000,
            trace_detectors: false,
        }
    }
}

impl SolverConfig {
    pub fn new(space: SpaceChoice, time: TimeChoice, dt_policy: DtPolicy) -> Self {
        Self {
            space,
            time,
            dt_policy,
            ..Self::default()
        }
    }

    pub fn mood_active(&self) -> bool {
        self.space == SpaceChoice::Adaptive || self.mood.enabled
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub phi: Vec<f64>,
    pub css: Vec<u8>,
    pub cts: Vec<u8>,
    pub pe: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    /// Time at the end of the step.
    pub t: f64,
    pub dt_used: f64,
    pub cured_nodes: Vec<usize>,
    /// One entry per detector pass, kept only when tracing.
    pub detector_trace: Vec<DetectorOutcome>,
    pub recompute_count: usize,
}

/// Hybrid time-scheme rule: RK_D below `Pe = 5` (centered) or `Pe = 15`
/// (weak upwind).
pub fn hybrid_cts(pe: f64, css: u8) -> u8 {
    let threshold = if css == CENTERED { 5.0 } else { 15.0 };
    if pe < threshold {
        RKD
    } else {
        RK4
    }
}

/// Grid data and caches for stepping one problem.
pub struct Solver<'p> {
    problem: &'p Problem,
    config: SolverConfig,
    detectors: DetectorConfig,
    dx: f64,
    x: Vec<f64>,
    params: Vec<PhysicalParams>,
    pe: Vec<f64>,
    /// Stencils indexed by `css` then node.
    stencils: [Vec<[f64; 5]>; 3],
    tableaux: [ButcherTableau; 2],
    cfl_cache: HashMap<(u64, u8, u8), f64>,
    /// Time-independent source samples replacing `problem.source`.
    frozen_source: Option<Vec<f64>>,
}

impl<'p> Solver<'p> {
    pub fn new(problem: &'p Problem, config: SolverConfig) -> Result<Self> {
        problem.validate()?;
        let detectors = config.mood.detectors()?;
        let dx = problem.dx();
        let x = problem.grid();
        let params = x
            .iter()
            .map(|&xi| PhysicalParams::new((problem.velocity)(xi), (problem.diffusion)(xi), dx))
            .collect::<Result<Vec<_>>>()?;
        let pe = params.iter().map(|p| p.peclet().value()).collect();
        let stencil_for = |kind| {
            params
                .iter()
                .map(|&p| named_scheme(kind, p).map(|s| s.coeffs()))
                .collect::<Result<Vec<_>>>()
        };
        let stencils = [
            stencil_for(SchemeKind::Centered)?,
            stencil_for(SchemeKind::WeakUpwind)?,
            stencil_for(SchemeKind::StrongUpwind)?,
        ];
        let tableaux = [ButcherTableau::rk4(), ButcherTableau::rkd()];
        debug_assert_eq!(tableaux[0].c, tableaux[1].c);
        Ok(Self {
            problem,
            config,
            detectors,
            dx,
            x,
            params,
            pe,
            stencils,
            tableaux,
            cfl_cache: HashMap::new(),
            frozen_source: None,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn peclet(&self) -> &[f64] {
        &self.pe
    }

    fn default_css(&self) -> u8 {
        match self.config.space {
            SpaceChoice::Weak => WEAK,
            SpaceChoice::Strong => STRONG,
            SpaceChoice::Centered | SpaceChoice::Adaptive => CENTERED,
        }
    }

    /// Time scheme of node `i` given its space scheme.
    pub fn assign_cts(&self, i: usize, css: u8) -> u8 {
        match self.config.time {
            TimeChoice::Rk4 => RK4,
            TimeChoice::Rkd => RKD,
            TimeChoice::Hybrid => {
                if self.config.mood_active()
                    && css == CENTERED
                    && self.config.mood.centered_time == CenteredTime::Rk4Always
                {
                    RK4
                } else {
                    hybrid_cts(self.pe[i], css)
                }
            }
        }
    }

    pub fn initial_state(&self) -> SolverState {
        let phi = self.x.iter().map(|&x| (self.problem.initial)(x)).collect();
        let css = vec![self.default_css(); self.x.len()];
        let cts = css
            .iter()
            .enumerate()
            .map(|(i, &c)| self.assign_cts(i, c))
            .collect();
        SolverState {
            phi,
            css,
            cts,
            pe: self.pe.clone(),
            t: 0.0,
            dt: 0.0,
            n_steps: 0,
        }
    }

    /// Stable step of node `i` alone: `Ĉ(Pe_i)·Δx/u_i`, or `Ĉ·Δx²/κ_i` when
    /// `u_i = 0`.
    pub fn local_dt(&mut self, i: usize, css: u8, cts: u8) -> Result<f64> {
        let p = self.params[i];
        let pe = p.peclet();
        let key = (pe.value().to_bits(), css, cts);
        let c = match self.cfl_cache.get(&key) {
            Some(&c) => c,
            None => {
                let kind = match css {
                    CENTERED => SchemeKind::Centered,
                    WEAK => SchemeKind::WeakUpwind,
                    _ => SchemeKind::StrongUpwind,
                };
                let (t3, t4) = kind.thetas(pe).expect("named scheme");
                let curve = match self.config.cfl_spectrum {
                    CflSpectrum::Discrete => SpectralCurve::discrete(t3, t4, pe, self.x.len())?,
                    CflSpectrum::Continuous => SpectralCurve::continuous(
                        t3,
                        t4,
                        pe,
                        crate::spectral::DEFAULT_CURVE_SAMPLES,
                    )?,
                };
                let time = if cts == RK4 {
                    TimeScheme::Rk4
                } else {
                    TimeScheme::Rkd
                };
                let c = optimal_cfl_poly(&curve, &time.polynomial())?.c_cfl;
                self.cfl_cache.insert(key, c);
                c
            }
        };
        Ok(c / p.scale())
    }

    /// `min_i Δt_i` for the given maps.
    pub fn max_stable_dt(&mut self, css: &[u8], cts: &[u8]) -> Result<f64> {
        let mut dt = f64::INFINITY;
        for i in 0..css.len() {
            dt = dt.min(self.local_dt(i, css[i], cts[i])?);
        }
        Ok(dt)
    }

    fn policy_dt(&self, dt_max: f64) -> f64 {
        match self.config.dt_policy {
            DtPolicy::Max => dt_max,
            DtPolicy::Factor(r) => r * dt_max,
            DtPolicy::Fixed(v) => v,
        }
    }

    /// One Runge-Kutta step with node-wise tableaux sharing the sub-steps.
    pub fn rk_step(&self, phi: &[f64], css: &[u8], cts: &[u8], t: f64, dt: f64) -> Vec<f64> {
        let n = phi.len();
        let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut stage = phi.to_vec();
        for j in 0..4 {
            if j > 0 {
                for i in 0..n {
                    let a = &self.tableaux[cts[i] as usize].a[j];
                    let mut acc = 0.0;
                    for l in 0..j {
                        acc += a[l] * k[l][i];
                    }
                    stage[i] = phi[i] + dt * acc;
                }
            }
            let ts = t + SHARED_C[j] * dt;
            for i in 0..n {
                let f = match &self.frozen_source {
                    Some(f) => f[i],
                    None => (self.problem.source)(self.x[i], ts),
                };
                k[j][i] = stencil_at(&self.stencils[css[i] as usize][i], &stage, i) + f;
            }
        }
        (0..n)
            .map(|i| {
                let b = &self.tableaux[cts[i] as usize].b;
                phi[i] + dt * (0..4).map(|j| b[j] * k[j][i]).sum::<f64>()
            })
            .collect()
    }

    /// Advances `state` by one step, landing exactly on `t_end` if given.
    pub fn step(&mut self, state: &mut SolverState, t_end: Option<f64>) -> Result<StepReport> {
        let mood_on = self.config.mood_active();
        if mood_on {
            state.css.fill(self.default_css());
        }
        for i in 0..state.css.len() {
            state.cts[i] = self.assign_cts(i, state.css[i]);
        }
        let mut trace = Vec::new();
        let mut recompute_count = 0;
        let mut cured_nodes = Vec::new();
        let horizon = t_end.unwrap_or(f64::INFINITY);
        loop {
            let dt_max = self.max_stable_dt(&state.css, &state.cts)?;
            let mut dt = self.policy_dt(dt_max);
            let remaining = horizon - state.t;
            if dt >= remaining - 1e-12 * horizon.abs().max(1.0) {
                dt = remaining;
            }
            if !(dt >= 1e-14 * horizon.min(1.0).max(1e-300) && dt.is_finite()) {
                return Err(Error::TimeStepUnderflow { dt, t: state.t });
            }
            let candidate = self.rk_step(&state.phi, &state.css, &state.cts, state.t, dt);
            if mood_on {
                let outcome = mood::run_chain(&candidate, &state.css, &self.detectors, self.dx);
                let changed = mood::apply_cure(&mut state.css, &outcome);
                cured_nodes.extend(outcome.cured_indices());
                if self.config.trace_detectors {
                    trace.push(outcome);
                }
                if changed > 0 {
                    for i in 0..state.css.len() {
                        state.cts[i] = self.assign_cts(i, state.css[i]);
                    }
                    recompute_count += 1;
                    continue;
                }
            }
            state.phi = candidate;
            state.t = if dt == remaining {
                horizon
            } else {
                state.t + dt
            };
            state.dt = dt;
            state.n_steps += 1;
            cured_nodes.sort_unstable();
            return Ok(StepReport {
                step: state.n_steps,
                t: state.t,
                dt_used: dt,
                cured_nodes,
                detector_trace: trace,
                recompute_count,
            });
        }
    }
}

/// Integrates from `t = 0` to `t_final`.
pub fn advance(problem: &Problem, config: SolverConfig) -> Result<(SolverState, Vec<StepReport>)> {
    let max_steps = config.max_steps;
    let mut solver = Solver::new(problem, config)?;
    let mut state = solver.initial_state();
    let mut reports = Vec::new();
    while state.t < problem.t_final {
        if state.n_steps >= max_steps {
            return Err(Error::NoConvergence {
                steps: state.n_steps,
                residual: problem.t_final - state.t,
            });
        }
        reports.push(solver.step(&mut state, Some(problem.t_final))?);
    }
    Ok((state, reports))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyResult {
    pub phi: Vec<f64>,
    pub steps: usize,
    pub residual: f64,
}

/// Pseudo-time marching to `E[φ] + f = 0` for a time-independent source.
///
/// The periodic operator annihilates constants, so the discrete mean of the
/// source is removed; the returned field keeps the mean of the initial data.
pub fn steady_solve(
    problem: &Problem,
    config: SolverConfig,
    tol: f64,
    max_steps: usize,
) -> Result<SteadyResult> {
    let f: Vec<f64> = problem
        .grid()
        .iter()
        .map(|&xi| (problem.source)(xi, 0.0))
        .collect();
    let mean_f = f.iter().sum::<f64>() / f.len() as f64;
    let mut solver = Solver::new(problem, config)?;
    solver.frozen_source = Some(f.iter().map(|v| v - mean_f).collect());
    let mut state = solver.initial_state();
    let mut residual = f64::INFINITY;
    while state.n_steps < max_steps {
        let before = state.phi.clone();
        solver.step(&mut state, None)?;
        residual = before
            .iter()
            .zip(&state.phi)
            .map(|(a, b)| (b - a).abs())
            .fold(0.0, f64::max)
            / state.dt;
        if !residual.is_finite() {
            break;
        }
        if residual < tol {
            return Ok(SteadyResult {
                phi: state.phi,
                steps: state.n_steps,
                residual,
            });
        }
    }
    Err(Error::NoConvergence {
        steps: state.n_steps,
        residual,
    })
}

/// `max_i |φ_i - exact(x_i, t)|` on the grid `x_i = i/I`.
pub fn error_inf<F: Fn(f64, f64) -> f64>(phi: &[f64], exact: F, t: f64) -> f64 {
    let dx = 1.0 / phi.len() as f64;
    phi.iter()
        .enumerate()
        .map(|(i, &p)| (p - exact(i as f64 * dx, t)).abs())
        .fold(0.0, |m: f64, e| {
            if m.is_nan() || e.is_nan() {
                f64::NAN
            } else {
                m.max(e)
            }
        })
}

/// Observed order between `(e1, I1)` and `(e2, I2)`; `None` when undefined.
pub fn order_inf(e1: f64, i1: usize, e2: f64, i2: usize) -> Option<f64> {
    if !(e1 > 0.0 && e2 > 0.0) || i1 == i2 || !e1.is_finite() || !e2.is_finite() {
        return None;
    }
    Some((e1 / e2).ln().abs() / (i1 as f64 / i2 as f64).ln().abs())
}

/// Columns `x, phi, exact, css, cts`; `exact` is `NaN` when unknown.
pub fn solution_csv(problem: &Problem, state: &SolverState) -> String {
    let mut out = String::from("x,phi,exact,css,cts\n");
    for (i, x) in problem.grid().iter().enumerate() {
        let exact = problem.exact.as_ref().map_or(f64::NAN, |e| e(*x, state.t));
        out.push_str(&format!(
            "{x},{},{exact},{},{}\n",
            state.phi[i], state.css[i], state.cts[i]
        ));
    }
    out
}

/// Columns `step, t, dt, n_cured, cured_indices` with `;`-joined indices.
pub fn steps_csv(reports: &[StepReport]) -> String {
    let mut out = String::from("step,t,dt,n_cured,cured_indices\n");
    for r in reports {
        let idx: Vec<String> = r.cured_nodes.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.step,
            r.t,
            r.dt_used,
            r.cured_nodes.len(),
            idx.join(";")
        ));
    }
    out
}

/// Detector flags of every checked extremum, one row per node and pass.
pub fn trace_csv(reports: &[StepReport]) -> String {
    let mut out = String::from("step,pass,node,ed,scd,lod,sd,cured\n");
    let b = |v: bool| v as u8;
    for r in reports {
        for (pass, o) in r.detector_trace.iter().enumerate() {
            for i in (0..o.checked.len()).filter(|&i| o.checked[i] && o.ed[i]) {
                out.push_str(&format!(
                    "{},{pass},{i},{},{},{},{},{}\n",
                    r.step,
                    b(o.ed[i]),
                    b(o.scd[i]),
                    b(o.lod[i]),
                    b(o.sd[i]),
                    b(o.cured[i])
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn convected(initial: SpaceFn, nodes: usize) -> Problem {
        Problem::constant(1.0, 0.0, initial, 1.0, nodes)
    }

    #[test]
    fn constant_is_preserved() {
        let problem = Problem::constant(1.0, 0.01, Box::new(|_| 3.5), 0.3, 20);
        for space in [
            SpaceChoice::Centered,
            SpaceChoice::Weak,
            SpaceChoice::Adaptive,
        ] {
            let (state, _) = advance(
                &problem,
                SolverConfig::new(space, TimeChoice::Hybrid, DtPolicy::Max),
            )
            .unwrap();
            assert!(state.phi.iter().all(|&p| (p - 3.5).abs() < 1e-13));
            assert_abs_diff_eq!(state.t, 0.3, epsilon = 1e-15);
        }
    }

    #[test]
    fn one_step_multiplies_fourier_mode_by_transfer_polynomial() {
        let (nodes, k) = (16usize, 3.0);
        let problem = convected(Box::new(move |x| (2.0 * PI * k * x).cos()), nodes);
        let mut solver = Solver::new(&problem, SolverConfig::default()).unwrap();
        let state = solver.initial_state();
        let dt = 0.7 * solver.max_stable_dt(&state.css, &state.cts).unwrap();
        let next = solver.rk_step(&state.phi, &state.css, &state.cts, 0.0, dt);
        // centered fourth order at Pe = ∞: λ = -(i/Δx)(8 sin θ - sin 2θ)/6
        let theta = 2.0 * PI * k / nodes as f64;
        let lambda =
            Complex64::new(0.0, -(8.0 * theta.sin() - (2.0 * theta).sin()) / 6.0) * nodes as f64;
        let z = lambda * dt;
        let r = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        for (j, &v) in next.iter().enumerate() {
            let expected = (r * Complex64::from_polar(1.0, theta * j as f64)).re;
            assert_abs_diff_eq!(v, expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn dt_policy_round_trip() {
        for p in [DtPolicy::Max, DtPolicy::Factor(0.8), DtPolicy::Fixed(1e-3)] {
            assert_eq!(p.to_string().parse::<DtPolicy>().unwrap(), p);
        }
        assert!("factor:-1".parse::<DtPolicy>().is_err());
        assert!("slow".parse::<DtPolicy>().is_err());
        let cfg: SolverConfig = serde_json::from_str(r#"{"dt_policy": "factor:0.8"}"#).unwrap();
        assert_eq!(cfg.dt_policy, DtPolicy::Factor(0.8));
    }

    #[test]
    fn hybrid_rule() {
        assert_eq!(hybrid_cts(3.0, CENTERED), RKD);
        assert_eq!(hybrid_cts(5.0, CENTERED), RK4);
        assert_eq!(hybrid_cts(10.0, WEAK), RKD);
        assert_eq!(hybrid_cts(15.0, WEAK), RK4);
        assert_eq!(hybrid_cts(f64::INFINITY, CENTERED), RK4);
        assert_eq!(hybrid_cts(f64::INFINITY, WEAK), RK4);
    }

    #[test]
    fn error_and_order() {
        let exact = |x: f64, t: f64| (2.0 * PI * (x - t)).sin();
        let phi: Vec<f64> = (0..10)
            .map(|i| exact(i as f64 * (1.0 / 10.0), 0.2))
            .collect();
        assert_eq!(error_inf(&phi, exact, 0.2), 0.0);
        assert!(error_inf(&[f64::NAN, 0.0], |_, _| 0.0, 0.0).is_nan());
        assert_abs_diff_eq!(
            order_inf(1.68e-2, 100, 3.88e-3, 200).unwrap(),
            2.1,
            epsilon = 0.05
        );
        let e = |i: usize| (i as f64).powi(-4);
        assert_abs_diff_eq!(
            order_inf(e(50), 50, e(100), 100).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_eq!(order_inf(0.0, 50, 1e-3, 100), None);
    }

    #[test]
    fn steady_solve_keeps_constant() {
        let problem = Problem::constant(1.0, 0.0, Box::new(|_| 2.0), 1.0, 12);
        let res = steady_solve(&problem, SolverConfig::default(), 1e-10, 10).unwrap();
        assert_eq!(res.steps, 1);
        assert!(res.phi.iter().all(|&p| (p - 2.0).abs() < 1e-14));
    }

    #[test]
    fn local_dt_scales_with_velocity() {
        let slow = Problem::constant(1.0, 0.0, Box::new(|_| 0.0), 1.0, 25);
        let fast = Problem::constant(2.0, 0.0, Box::new(|_| 0.0), 1.0, 25);
        let a = Solver::new(&slow, SolverConfig::default())
            .unwrap()
            .local_dt(0, CENTERED, RK4)
            .unwrap();
        let b = Solver::new(&fast, SolverConfig::default())
            .unwrap()
            .local_dt(0, CENTERED, RK4)
            .unwrap();
        assert_abs_diff_eq!(b, a / 2.0, epsilon = 1e-15);
        // the 25 grid eigenvalues of the centered scheme stay inside |η| ≤ 2√2
        assert!((2.0 / 25.0..2.1 / 25.0).contains(&a), "{a}");
    }

    #[test]
    fn diffusive_local_dt_uses_dx_squared() {
        let problem = Problem::constant(0.0, 0.5, Box::new(|_| 0.0), 1.0, 20);
        let mut solver = Solver::new(&problem, SolverConfig::default()).unwrap();
        let dt = solver.local_dt(0, WEAK, RK4).unwrap();
        // weak upwind at Pe = 0: eigenvalues (κ/Δx²)·2(cos - 1) ∈ [-4κ/Δx², 0]
        let zeta = crate::rkdesign::real_axis_radius(&TimeScheme::Rk4.polynomial());
        assert_abs_diff_eq!(dt, zeta / 4.0 * (0.05 * 0.05) / 0.5, epsilon = 1e-9);
    }

    #[test]
    fn tiny_fixed_step_underflows() {
        let mut problem = Problem::constant(1.0, 0.0, Box::new(|_| 0.0), 1.0, 10);
        problem.t_final = 1.0;
        let cfg = SolverConfig::new(
            SpaceChoice::Centered,
            TimeChoice::Rk4,
            DtPolicy::Fixed(1e-20),
        );
        assert!(matches!(
            advance(&problem, cfg),
            Err(Error::TimeStepUnderflow { .. })
        ));
    }

    #[test]
    fn last_step_lands_on_final_time() {
        let problem = Problem::constant(1.0, 0.0, Box::new(|x| (2.0 * PI * x).sin()), 0.33, 20);
        let (state, reports) = advance(&problem, SolverConfig::default()).unwrap();
        assert_eq!(state.t, 0.33);
        let first = reports[0].dt_used;
        assert!(reports.last().unwrap().dt_used <= first);
    }

    #[test]
    fn tableaux_share_substeps() {
        assert_eq!(ButcherTableau::rk4().c, ButcherTableau::rkd().c);
    }

    #[test]
    fn rejects_bad_problems() {
        let small = Problem::constant(1.0, 0.0, Box::new(|_| 0.0), 1.0, 4);
        assert!(matches!(small.validate(), Err(Error::GridTooSmall { .. })));
        let jump = Problem::constant(1.0, 0.0, Box::new(|x| x), 1.0, 10);
        assert!(jump.validate().is_err());
        let still = Problem::constant(0.0, 0.0, Box::new(|_| 0.0), 1.0, 10);
        assert!(Solver::new(&still, SolverConfig::default()).is_err());
    }
}
