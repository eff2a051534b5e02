//! Five-point conservative stencils for `-u φ' + κ φ''` on a periodic grid and
//! the spectra of the circulant operators they generate.
//!
//! Every scheme of the family is a combination of four base stencils
//! approximating the first to fourth derivatives:
//!
//! ```text
//! E(θ3, θ4, Pe) = -(u/Δx) (E1 - E2/Pe + θ3 E3 + θ4 E4)
//! ```
//!
//! The two limits `Pe = 0` (no convection) and `Pe = +∞` (no diffusion) get
//! their own branches instead of sentinel floats. In the diffusive limit the
//! operator is written as `(κ/Δx²) (E2 - θ3 E3 - θ4 E4)` where the stored
//! `θ3, θ4` are the rescaled parameters `Pe·θ3, Pe·θ4` of the finite branch.
//! This keeps the named schemes continuous as `Pe → 0`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fourth-order first derivative (times Δx).
pub const E1: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
/// Fourth-order second derivative (times Δx²).
pub const E2: [f64; 5] = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
/// Second-order third derivative (times Δx³).
pub const E3: [f64; 5] = [-0.5, 1.0, 0.0, -1.0, 0.5];
/// Second-order fourth derivative (times Δx⁴).
pub const E4: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];

/// Smallest grid a five-point periodic stencil can act on.
pub const MIN_NODES: usize = 5;

/// Default resolution of a continuous spectral curve.
pub const DEFAULT_CURVE_SAMPLES: usize = 1024;

/// Cell Péclet number with its two limits kept explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Peclet {
    /// Pure diffusion (`u = 0`).
    Zero,
    Finite(f64),
    /// Pure convection (`κ = 0`).
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    FinitePe,
    ZeroPe,
    InfinitePe,
}

impl Peclet {
    /// Maps `0` and `+∞` onto the dedicated variants.
    pub fn from_value(pe: f64) -> Result<Self> {
        if pe.is_nan() || pe < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Péclet number must be >= 0, got {pe}"
            )));
        }
        Ok(if pe == 0.0 {
            Peclet::Zero
        } else if pe.is_infinite() {
            Peclet::Infinite
        } else {
            Peclet::Finite(pe)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            Peclet::Zero => 0.0,
            Peclet::Finite(pe) => pe,
            Peclet::Infinite => f64::INFINITY,
        }
    }

    pub fn regime(self) -> Regime {
        match self {
            Peclet::Zero => Regime::ZeroPe,
            Peclet::Finite(_) => Regime::FinitePe,
            Peclet::Infinite => Regime::InfinitePe,
        }
    }
}

impl fmt::Display for Peclet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Peclet::Zero => write!(f, "0"),
            Peclet::Finite(pe) => write!(f, "{pe}"),
            Peclet::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Peclet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Peclet::Infinite),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad Péclet number '{s}'")))?;
                Peclet::from_value(v)
            }
        }
    }
}

/// Convective velocity, diffusion coefficient and grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub u: f64,
    pub kappa: f64,
    pub dx: f64,
}

impl PhysicalParams {
    pub fn new(u: f64, kappa: f64, dx: f64) -> Result<Self> {
        if !(u >= 0.0 && u.is_finite()) || !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "u and kappa must be finite and >= 0 (u = {u}, kappa = {kappa})"
            )));
        }
        if u == 0.0 && kappa == 0.0 {
            return Err(Error::InvalidParams("u and kappa are both zero".into()));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidParams(format!("dx must be > 0, got {dx}")));
        }
        Ok(Self { u, kappa, dx })
    }

    /// Parameters on the uniform grid `Δx = 1/nodes`.
    pub fn on_grid(u: f64, kappa: f64, nodes: usize) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::InvalidParams("grid needs at least one node".into()));
        }
        Self::new(u, kappa, 1.0 / nodes as f64)
    }

    pub fn peclet(&self) -> Peclet {
        if self.u == 0.0 {
            Peclet::Zero
        } else if self.kappa == 0.0 {
            Peclet::Infinite
        } else {
            Peclet::Finite(self.u * self.dx / self.kappa)
        }
    }

    /// Factor turning the normalised curve `ρ` into eigenvalues: `u/Δx`, or
    /// `κ/Δx²` in the diffusive limit.
    pub fn scale(&self) -> f64 {
        match self.peclet() {
            Peclet::Zero => self.kappa / (self.dx * self.dx),
            _ => self.u / self.dx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    Centered,
    WeakUpwind,
    StrongUpwind,
    Custom,
}

impl SchemeKind {
    /// `(θ3, θ4)` of a named scheme in the given regime. `Custom` has none.
    ///
    /// For `Pe = 0` the returned pair is already rescaled by `Pe` (see module
    /// docs), for `Pe = +∞` it is the limit of the finite expressions.
    pub fn thetas(self, pe: Peclet) -> Option<(f64, f64)> {
        let pair = match (self, pe) {
            (SchemeKind::Custom, _) => return None,
            (SchemeKind::Centered, _) => (0.0, 0.0),
            (SchemeKind::WeakUpwind, Peclet::Finite(p)) => (0.0, (p - 1.0) / (12.0 * p)),
            (SchemeKind::WeakUpwind, Peclet::Zero) => (0.0, -1.0 / 12.0),
            (SchemeKind::WeakUpwind, Peclet::Infinite) => (0.0, 1.0 / 12.0),
            (SchemeKind::StrongUpwind, Peclet::Finite(p)) => {
                ((3.0 - p) / (3.0 * p), (3.0 * p - 7.0) / (12.0 * p))
            }
            (SchemeKind::StrongUpwind, Peclet::Zero) => (1.0, -7.0 / 12.0),
            (SchemeKind::StrongUpwind, Peclet::Infinite) => (-1.0 / 3.0, 0.25),
        };
        Some(pair)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchemeKind::Centered => "centered",
            SchemeKind::WeakUpwind => "weak",
            SchemeKind::StrongUpwind => "strong",
            SchemeKind::Custom => "custom",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "centered" | "centred" | "c" => Ok(SchemeKind::Centered),
            "weak" | "weak-upwind" | "w" => Ok(SchemeKind::WeakUpwind),
            "strong" | "strong-upwind" | "s" => Ok(SchemeKind::StrongUpwind),
            _ => Err(Error::InvalidArgument(format!(
                "unknown space scheme '{s}'"
            ))),
        }
    }
}

/// A conservative five-point scheme `(a₋₂, a₋₁, a₀, a₁, a₂)`, scale included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StencilScheme {
    coeffs: [f64; 5],
    theta3: f64,
    theta4: f64,
    params: PhysicalParams,
    kind: SchemeKind,
}

impl StencilScheme {
    pub fn coeffs(&self) -> [f64; 5] {
        self.coeffs
    }

    pub fn theta3(&self) -> f64 {
        self.theta3
    }

    pub fn theta4(&self) -> f64 {
        self.theta4
    }

    pub fn params(&self) -> PhysicalParams {
        self.params
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn peclet(&self) -> Peclet {
        self.params.peclet()
    }

    pub fn scale(&self) -> f64 {
        self.params.scale()
    }

    /// Normalised spectral curve `ρ(s)`; eigenvalues are `scale · ρ(i Δx)`.
    pub fn rho(&self, s: f64) -> Complex64 {
        rho(self.theta3, self.theta4, self.peclet(), s)
    }

    /// Eigenvalue attached to the Fourier mode `(w_i^k)_k`, `w_i = exp(2πi·iΔx)`.
    ///
    /// Evaluated from the closed-form eigenvalues of the four base stencils.
    pub fn eigenvalue(&self, i: usize) -> Complex64 {
        let angle = 2.0 * PI * i as f64 * self.params.dx;
        let [l1, l2, l3, l4] = base_eigenvalues(angle);
        let (t3, t4) = (self.theta3, self.theta4);
        match self.peclet() {
            Peclet::Finite(pe) => -self.scale() * (l1 - l2 / pe + t3 * l3 + t4 * l4),
            Peclet::Infinite => -self.scale() * (l1 + t3 * l3 + t4 * l4),
            Peclet::Zero => self.scale() * (l2 - t3 * l3 - t4 * l4),
        }
    }

    /// `(EΨ)_i = Σ_k a_k ψ_{i+k}` with periodic wrap-around.
    pub fn apply(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; phi.len()];
        self.apply_into(phi, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, phi: &[f64], out: &mut [f64]) -> Result<()> {
        let n = phi.len();
        if n < MIN_NODES {
            return Err(Error::GridTooSmall {
                min: MIN_NODES,
                got: n,
            });
        }
        if out.len() != n {
            return Err(Error::InvalidArgument(format!(
                "output length {} does not match input length {n}",
                out.len()
            )));
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = stencil_at(&self.coeffs, phi, i);
        }
        Ok(())
    }

    /// Dense circulant matrix of the scheme on `nodes` points (row-major).
    pub fn circulant(&self, nodes: usize) -> Result<Vec<Vec<f64>>> {
        if nodes < MIN_NODES {
            return Err(Error::GridTooSmall {
                min: MIN_NODES,
                got: nodes,
            });
        }
        let mut rows = vec![vec![0.0; nodes]; nodes];
        for (i, row) in rows.iter_mut().enumerate() {
            for (k, a) in self.coeffs.iter().enumerate() {
                let j = (i + nodes + k - 2) % nodes;
                row[j] += a;
            }
        }
        Ok(rows)
    }
}

/// Five-point stencil at node `i` with periodic indexing.
#[inline]
pub fn stencil_at(coeffs: &[f64; 5], phi: &[f64], i: usize) -> f64 {
    let n = phi.len();
    let im2 = (i + n - 2) % n;
    let im1 = (i + n - 1) % n;
    let ip1 = (i + 1) % n;
    let ip2 = (i + 2) % n;
    coeffs[0] * phi[im2]
        + coeffs[1] * phi[im1]
        + coeffs[2] * phi[i]
        + coeffs[3] * phi[ip1]
        + coeffs[4] * phi[ip2]
}

/// Eigenvalues of `E1..E4` for the Fourier angle `2π iΔx`.
pub fn base_eigenvalues(angle: f64) -> [Complex64; 4] {
    let (sn, cs) = angle.sin_cos();
    let t = cs - 1.0;
    [
        Complex64::new(0.0, sn * (1.0 - t / 3.0)),
        Complex64::new(t * (2.0 - t / 3.0), 0.0),
        Complex64::new(0.0, 2.0 * sn * t),
        Complex64::new(4.0 * t * t, 0.0),
    ]
}

fn combine(weights: [f64; 4], scale: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (k, o) in out.iter_mut().enumerate() {
        *o = scale
            * (weights[0] * E1[k] + weights[1] * E2[k] + weights[2] * E3[k] + weights[3] * E4[k]);
    }
    out
}

/// Builds `E(θ3, θ4, Pe)` for the Péclet regime implied by `params`.
pub fn build_scheme(theta3: f64, theta4: f64, params: PhysicalParams) -> Result<StencilScheme> {
    build_with_kind(theta3, theta4, params, SchemeKind::Custom)
}

fn build_with_kind(
    theta3: f64,
    theta4: f64,
    params: PhysicalParams,
    kind: SchemeKind,
) -> Result<StencilScheme> {
    let params = PhysicalParams::new(params.u, params.kappa, params.dx)?;
    if !theta3.is_finite() || !theta4.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "theta3/theta4 must be finite (got {theta3}, {theta4})"
        )));
    }
    let scale = params.scale();
    let mut coeffs = match params.peclet() {
        Peclet::Finite(pe) => {
            let (t3, t4) = (theta3, theta4);
            let raw = [
                ((12.0 * t4 - 6.0 * t3 + 1.0) * pe + 1.0) / (12.0 * pe),
                -((12.0 * t4 - 3.0 * t3 + 2.0) * pe + 4.0) / (3.0 * pe),
                (12.0 * t4 * pe + 5.0) / (2.0 * pe),
                -((12.0 * t4 + 3.0 * t3 - 2.0) * pe + 4.0) / (3.0 * pe),
                ((12.0 * t4 + 6.0 * t3 - 1.0) * pe + 1.0) / (12.0 * pe),
            ];
            raw.map(|a| -scale * a)
        }
        Peclet::Infinite => combine([1.0, 0.0, theta3, theta4], -scale),
        Peclet::Zero => combine([0.0, 1.0, -theta3, -theta4], scale),
    };
    // The zero pattern of the upwind schemes is exact by construction; remove
    // the round-off the rational expressions leave behind.
    match kind {
        SchemeKind::WeakUpwind => coeffs[4] = 0.0,
        SchemeKind::StrongUpwind => {
            coeffs[3] = 0.0;
            coeffs[4] = 0.0;
        }
        _ => {}
    }
    Ok(StencilScheme {
        coeffs,
        theta3,
        theta4,
        params,
        kind,
    })
}

/// Centered, weak upwind or strong upwind scheme for the given data.
pub fn named_scheme(kind: SchemeKind, params: PhysicalParams) -> Result<StencilScheme> {
    let params = PhysicalParams::new(params.u, params.kappa, params.dx)?;
    let (t3, t4) = kind.thetas(params.peclet()).ok_or_else(|| {
        Error::InvalidArgument("a custom scheme needs explicit theta3/theta4".into())
    })?;
    build_with_kind(t3, t4, params, kind)
}

/// Normalised spectral curve `ρ(s; θ3, θ4, Pe)`.
pub fn rho(theta3: f64, theta4: f64, pe: Peclet, s: f64) -> Complex64 {
    let (sn, cs) = (2.0 * PI * s).sin_cos();
    let t = cs - 1.0;
    match pe {
        Peclet::Finite(p) => {
            let x = t * (2.0 - t * (1.0 / 3.0 + 4.0 * p * theta4)) / p;
            let y = -sn * (1.0 - t * (1.0 / 3.0 - 2.0 * theta3));
            Complex64::new(x, y)
        }
        Peclet::Infinite => {
            let x = -4.0 * theta4 * t * t;
            let y = -sn * (1.0 - t * (1.0 / 3.0 - 2.0 * theta3));
            Complex64::new(x, y)
        }
        Peclet::Zero => {
            let x = t * (2.0 - t / 3.0) - 4.0 * theta4 * t * t;
            let y = -2.0 * theta3 * sn * t;
            Complex64::new(x, y)
        }
    }
}

/// `s ∈ [0, 1/2]` where `Re ρ` is smallest, when it is interior to the range.
fn extreme_real_parameter(theta4: f64, pe: Peclet) -> Option<f64> {
    // Re ρ = a t + b t² with t = cos(2πs) - 1 ∈ [-2, 0].
    let (a, b) = match pe {
        Peclet::Finite(p) => (2.0 / p, -(1.0 / 3.0 + 4.0 * p * theta4) / p),
        Peclet::Zero => (2.0, -(1.0 / 3.0 + 4.0 * theta4)),
        Peclet::Infinite => (0.0, -4.0 * theta4),
    };
    if b > 0.0 {
        let t = -a / (2.0 * b);
        if t > -2.0 && t < 0.0 {
            return Some((1.0 + t).clamp(-1.0, 1.0).acos() / (2.0 * PI));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub s: f64,
    pub rho: Complex64,
}

/// Sampled spectral curve; `λ(s) = scale · ρ(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    pub regime: Regime,
    pub samples: Vec<CurveSample>,
    pub scale: f64,
}

impl SpectralCurve {
    /// Uniform samples of `s ∈ [0, 1)`, plus the exact points of smallest
    /// real part. `scale` is 1.
    pub fn continuous(theta3: f64, theta4: f64, pe: Peclet, n_samples: usize) -> Result<Self> {
        if n_samples < 64 {
            return Err(Error::InvalidArgument(format!(
                "a continuous curve needs at least 64 samples, got {n_samples}"
            )));
        }
        let mut params: Vec<f64> = (0..n_samples)
            .map(|k| k as f64 / n_samples as f64)
            .collect();
        if n_samples % 2 == 1 {
            params.push(0.5);
        }
        if let Some(s) = extreme_real_parameter(theta4, pe) {
            params.push(s);
            params.push(1.0 - s);
        }
        params.sort_by(|a, b| a.total_cmp(b));
        params.dedup();
        let samples = params
            .into_iter()
            .map(|s| CurveSample {
                s,
                rho: rho(theta3, theta4, pe, s),
            })
            .collect();
        Ok(Self {
            regime: pe.regime(),
            samples,
            scale: 1.0,
        })
    }

    /// The `nodes` eigenvalues of the circulant operator, `s = i/nodes`.
    pub fn discrete(theta3: f64, theta4: f64, pe: Peclet, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::GridTooSmall {
                min: MIN_NODES,
                got: nodes,
            });
        }
        let samples = (1..=nodes)
            .map(|i| {
                let s = i as f64 / nodes as f64;
                CurveSample {
                    s,
                    rho: rho(theta3, theta4, pe, s),
                }
            })
            .collect();
        Ok(Self {
            regime: pe.regime(),
            samples,
            scale: 1.0,
        })
    }

    /// Curve of a named scheme at a given Péclet number.
    pub fn named(kind: SchemeKind, pe: Peclet, sampling: Sampling) -> Result<Self> {
        let (t3, t4) = kind.thetas(pe).ok_or_else(|| {
            Error::InvalidArgument("a custom scheme needs explicit theta3/theta4".into())
        })?;
        match sampling {
            Sampling::Continuous(n) => Self::continuous(t3, t4, pe, n),
            Sampling::Discrete(nodes) => Self::discrete(t3, t4, pe, nodes),
        }
    }

    pub fn lambda(&self, k: usize) -> Complex64 {
        self.samples[k].rho * self.scale
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// How a spectral curve is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sampling {
    /// `n` uniform samples of the continuous curve.
    Continuous(usize),
    /// The exact eigenvalues of a grid with the given number of nodes.
    Discrete(usize),
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Continuous(DEFAULT_CURVE_SAMPLES)
    }
}

/// Continuous curve of `scheme`, scaled by the scheme's `u/Δx` (or `κ/Δx²`).
pub fn spectral_curve(scheme: &StencilScheme, n_samples: usize) -> Result<SpectralCurve> {
    let mut curve =
        SpectralCurve::continuous(scheme.theta3, scheme.theta4, scheme.peclet(), n_samples)?;
    curve.scale = scheme.scale();
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(u: f64, kappa: f64, dx: f64) -> PhysicalParams {
        PhysicalParams::new(u, kappa, dx).unwrap()
    }

    #[test]
    fn centered_pe_one_matches_closed_form() {
        let s = build_scheme(0.0, 0.0, params(1.0, 0.1, 0.1)).unwrap();
        let expected = [1.0 / 6.0, -2.0, 2.5, -2.0 / 3.0, 0.0].map(|a| -10.0 * a);
        for (a, b) in s.coeffs().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn weak_upwind_relation_cancels_last_coefficient() {
        let pe = 3.0;
        let p = params(3.0, 0.1, 0.1);
        assert_abs_diff_eq!(p.peclet().value(), pe, epsilon = 1e-12);
        let s = build_scheme(0.0, (pe - 1.0) / (12.0 * pe), p).unwrap();
        assert!(s.coeffs()[4].abs() < 1e-12);
        // any θ3 with θ4 + θ3/2 = (Pe-1)/(12Pe) also works
        let t3 = 0.37;
        let s = build_scheme(t3, (pe - 1.0) / (12.0 * pe) - t3 / 2.0, p).unwrap();
        assert!(s.coeffs()[4].abs() < 1e-12);
    }

    #[test]
    fn named_schemes_match_closed_forms() {
        let (u, dx) = (2.0, 0.05);
        for pe in [0.3, 1.0, 2.5, 7.0, 40.0] {
            let p = params(u, u * dx / pe, dx);
            let f = -u / dx;
            let w = named_scheme(SchemeKind::WeakUpwind, p).unwrap();
            let ew = [
                1.0 / 6.0,
                -(pe + 1.0) / pe,
                (pe + 4.0) / (2.0 * pe),
                (pe - 3.0) / (3.0 * pe),
                0.0,
            ];
            let st = named_scheme(SchemeKind::StrongUpwind, p).unwrap();
            let es = [
                (pe - 2.0) / (2.0 * pe),
                -(2.0 * pe - 2.0) / pe,
                (3.0 * pe - 2.0) / (2.0 * pe),
                0.0,
                0.0,
            ];
            let c = named_scheme(SchemeKind::Centered, p).unwrap();
            let ec = [
                (1.0 + pe) / (12.0 * pe),
                -(4.0 + 2.0 * pe) / (3.0 * pe),
                5.0 / (2.0 * pe),
                -(4.0 - 2.0 * pe) / (3.0 * pe),
                (1.0 - pe) / (12.0 * pe),
            ];
            for k in 0..5 {
                assert_abs_diff_eq!(w.coeffs()[k], f * ew[k], epsilon = 1e-10);
                assert_abs_diff_eq!(st.coeffs()[k], f * es[k], epsilon = 1e-10);
                assert_abs_diff_eq!(c.coeffs()[k], f * ec[k], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn pure_convection_centered_is_e1() {
        let s = named_scheme(SchemeKind::Centered, params(1.0, 0.0, 0.1)).unwrap();
        assert_eq!(s.peclet(), Peclet::Infinite);
        for (a, e) in s.coeffs().iter().zip(E1) {
            assert_abs_diff_eq!(*a, -10.0 * e, epsilon = 1e-14);
        }
    }

    #[test]
    fn pure_diffusion_limits() {
        let p = params(0.0, 0.5, 0.1);
        let k = 0.5 / 0.01;
        let w = named_scheme(SchemeKind::WeakUpwind, p).unwrap();
        let expected = [0.0, 1.0, -2.0, 1.0, 0.0];
        for (a, e) in w.coeffs().iter().zip(expected) {
            assert_abs_diff_eq!(*a, k * e, epsilon = 1e-12);
        }
        let st = named_scheme(SchemeKind::StrongUpwind, p).unwrap();
        let expected = [1.0, -2.0, 1.0, 0.0, 0.0];
        for (a, e) in st.coeffs().iter().zip(expected) {
            assert_abs_diff_eq!(*a, k * e, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_diffusion_branch_is_the_small_pe_limit() {
        // finite-Pe coefficients scaled by Δx²/κ converge to the Pe = 0 branch
        let dx = 0.1;
        let kappa = 1.0;
        let z = named_scheme(SchemeKind::StrongUpwind, params(0.0, kappa, dx)).unwrap();
        let near = named_scheme(SchemeKind::StrongUpwind, params(1e-9, kappa, dx)).unwrap();
        for (a, b) in z.coeffs().iter().zip(near.coeffs()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-5);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(PhysicalParams::new(0.0, 0.0, 0.1).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(-1.0, 1.0, 0.1).is_err());
        assert!(named_scheme(SchemeKind::Custom, params(1.0, 1.0, 0.1)).is_err());
    }

    #[test]
    fn apply_needs_five_nodes() {
        let s = named_scheme(SchemeKind::Centered, params(1.0, 0.1, 0.25)).unwrap();
        assert!(matches!(
            s.apply(&[1.0, 2.0, 3.0, 4.0]),
            Err(Error::GridTooSmall { min: 5, got: 4 })
        ));
    }

    #[test]
    fn apply_constant_is_zero() {
        let s = named_scheme(SchemeKind::WeakUpwind, params(1.0, 0.01, 0.01)).unwrap();
        let out = s.apply(&[3.5; 100]).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn e1_is_fourth_order_accurate() {
        let err = |n: usize| {
            let dx = 1.0 / n as f64;
            let s = named_scheme(SchemeKind::Centered, params(1.0, 0.0, dx)).unwrap();
            let phi: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 * dx).sin()).collect();
            let out = s.apply(&phi).unwrap();
            (0..n)
                .map(|i| {
                    let exact = -2.0 * PI * (2.0 * PI * i as f64 * dx).cos();
                    (out[i] - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(200), err(400));
        assert!(e2 < 1e-7, "error at I=400: {e2}");
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn eigenvalue_at_last_mode_is_zero_for_finite_pe() {
        let s = named_scheme(SchemeKind::Centered, params(1.0, 0.02, 1.0 / 32.0)).unwrap();
        assert!(s.eigenvalue(32).norm() < 1e-12);
    }

    #[test]
    fn fourth_derivative_eigenvalues_bounded() {
        for i in 0..=200 {
            let l4 = base_eigenvalues(2.0 * PI * i as f64 / 200.0)[3];
            assert!(l4.re >= 0.0 && l4.re <= 16.0 + 1e-12);
            assert_eq!(l4.im, 0.0);
        }
    }

    #[test]
    fn table_points_of_the_centered_curve() {
        let pe = 5.0;
        let c = rho(0.0, 0.0, Peclet::Finite(pe), 0.5);
        assert_abs_diff_eq!(c.re, -16.0 / (3.0 * pe), epsilon = 1e-12);
        assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-12);
        // the point of largest |Im ρ| sits at cos(2πs) = 1 - √6/2
        let s = (1.0 - 6f64.sqrt() / 2.0).acos() / (2.0 * PI);
        let b = rho(0.0, 0.0, Peclet::Finite(pe), s);
        assert_abs_diff_eq!(
            b.re,
            -(2.0 * 6f64.sqrt() + 1.0) / (2.0 * pe),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(b.im.abs(), 1.3722, epsilon = 1e-4);
        let w = rho(0.0, (pe - 1.0) / (12.0 * pe), Peclet::Finite(pe), s);
        assert_abs_diff_eq!(w.re, -0.5 - 6f64.sqrt() / pe, epsilon = 1e-12);
        let wc = rho(0.0, (pe - 1.0) / (12.0 * pe), Peclet::Finite(pe), 0.5);
        assert_abs_diff_eq!(wc.re, -4.0 * (3.0 + pe) / (3.0 * pe), epsilon = 1e-12);
    }

    #[test]
    fn weak_upwind_pure_diffusion_curve_is_real_segment() {
        let curve = SpectralCurve::named(SchemeKind::WeakUpwind, Peclet::Zero, Sampling::default())
            .unwrap();
        for smp in &curve.samples {
            assert_abs_diff_eq!(
                smp.rho.re,
                2.0 * ((2.0 * PI * smp.s).cos() - 1.0),
                epsilon = 1e-12
            );
            assert_eq!(smp.rho.im, 0.0);
            assert!(smp.rho.re >= -4.0 - 1e-12 && smp.rho.re <= 0.0);
        }
    }

    #[test]
    fn centered_pure_convection_curve_is_imaginary() {
        let curve =
            SpectralCurve::named(SchemeKind::Centered, Peclet::Infinite, Sampling::default())
                .unwrap();
        let max_im = curve
            .samples
            .iter()
            .map(|c| {
                assert_eq!(c.rho.re, 0.0);
                c.rho.im.abs()
            })
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(max_im, 1.37, epsilon = 5e-3);
    }

    #[test]
    fn curve_contains_extreme_real_sample() {
        // strong upwind at Pe = 1 has an interior minimum of Re ρ
        let curve = SpectralCurve::named(
            SchemeKind::StrongUpwind,
            Peclet::Finite(1.0),
            Sampling::Continuous(64),
        )
        .unwrap();
        let min_re = curve
            .samples
            .iter()
            .map(|c| c.rho.re)
            .fold(f64::INFINITY, f64::min);
        // Re ρ = t(2 + t), minimum -1 at t = -1
        assert_abs_diff_eq!(min_re, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(SpectralCurve::continuous(0.0, 0.0, Peclet::Infinite, 63).is_err());
        assert!(SpectralCurve::discrete(0.0, 0.0, Peclet::Infinite, 4).is_err());
    }

    #[test]
    fn peclet_parsing() {
        assert_eq!("inf".parse::<Peclet>().unwrap(), Peclet::Infinite);
        assert_eq!("0".parse::<Peclet>().unwrap(), Peclet::Zero);
        assert_eq!("2.5".parse::<Peclet>().unwrap(), Peclet::Finite(2.5));
        assert!("-1".parse::<Peclet>().is_err());
    }
}
