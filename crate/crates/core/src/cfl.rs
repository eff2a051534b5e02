//! Optimal CFL numbers: the largest scaling of a spectral curve that keeps
//! every sample inside a Runge-Kutta stability region.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rkdesign::{ButcherTableau, StabilityPolynomial, StabilityRegion};
use crate::spectral::{Peclet, Sampling, SchemeKind, SpectralCurve};

/// Below this modulus a curve sample is taken to sit at the origin.
const ORIGIN_EPS: f64 = 1e-14;

/// The two time integrators used by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimeScheme {
    Rk4,
    Rkd,
}

impl TimeScheme {
    pub fn polynomial(self) -> StabilityPolynomial {
        match self {
            TimeScheme::Rk4 => StabilityPolynomial::rk4(),
            TimeScheme::Rkd => StabilityPolynomial::rkd(),
        }
    }

    pub fn tableau(self) -> ButcherTableau {
        match self {
            TimeScheme::Rk4 => ButcherTableau::rk4(),
            TimeScheme::Rkd => ButcherTableau::rkd(),
        }
    }
}

impl fmt::Display for TimeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeScheme::Rk4 => "rk4",
            TimeScheme::Rkd => "rkd",
        })
    }
}

impl std::str::FromStr for TimeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rk4" => Ok(TimeScheme::Rk4),
            "rkd" | "rk_d" => Ok(TimeScheme::Rkd),
            other => Err(Error::InvalidArgument(format!(
                "unknown time scheme '{other}' (expected rk4 or rkd)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CflResult {
    pub c_cfl: f64,
    /// `c_cfl` divided by the curve scale: `Ĉ·Δx/u`, or `Ĉ·Δx²/κ` at `Pe = 0`.
    pub dt_max: f64,
    /// Sample achieving the minimum ratio.
    pub limiting_index: usize,
}

/// `Ĉ = min_k |τ_k| / |ρ_k|`, with `τ_k` the boundary point on the ray
/// through `ρ_k`.
pub fn optimal_cfl(curve: &SpectralCurve, region: &StabilityRegion) -> Result<CflResult> {
    if region.radii.iter().all(|&r| r == 0.0) {
        return Err(Error::EmptyRegion);
    }
    optimal_cfl_poly(curve, &region.polynomial)
}

/// Same as [`optimal_cfl`], working from the polynomial directly.
pub fn optimal_cfl_poly(curve: &SpectralCurve, poly: &StabilityPolynomial) -> Result<CflResult> {
    let mut best: Option<(f64, usize)> = None;
    for (k, sample) in curve.samples.iter().enumerate() {
        let modulus = sample.rho.norm();
        if modulus < ORIGIN_EPS {
            continue;
        }
        let ratio = poly.ray_exit(sample.rho) / modulus;
        if best.map_or(true, |(b, _)| ratio < b) {
            best = Some((ratio, k));
        }
        if ratio == 0.0 {
            break;
        }
    }
    let (c_cfl, limiting_index) = best.ok_or(Error::DegenerateCurve)?;
    Ok(CflResult {
        c_cfl,
        dt_max: c_cfl / curve.scale,
        limiting_index,
    })
}

/// `Ĉ` of a named scheme and time integrator at one Péclet number.
pub fn scheme_cfl(
    kind: SchemeKind,
    time: TimeScheme,
    pe: Peclet,
    sampling: Sampling,
) -> Result<f64> {
    let curve = SpectralCurve::named(kind, pe, sampling)?;
    Ok(optimal_cfl_poly(&curve, &time.polynomial())?.c_cfl)
}

/// `(Pe, Ĉ)` pairs over `pe_grid`; `0` and `+∞` use their limit curves.
pub fn cfl_curve(
    kind: SchemeKind,
    time: TimeScheme,
    pe_grid: &[f64],
    sampling: Sampling,
) -> Result<Vec<(f64, f64)>> {
    let poly = time.polynomial();
    pe_grid
        .iter()
        .map(|&v| {
            let pe = Peclet::from_value(v)?;
            let curve = SpectralCurve::named(kind, pe, sampling)?;
            Ok((v, optimal_cfl_poly(&curve, &poly)?.c_cfl))
        })
        .collect()
}

/// Coefficient `k` in `Δt_max = k·Δx²/κ` for pure diffusion.
pub fn diffusive_cfl(kind: SchemeKind, time: TimeScheme) -> Result<f64> {
    scheme_cfl(kind, time, Peclet::Zero, Sampling::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rkdesign::region_boundary;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn continuous(kind: SchemeKind, pe: f64) -> SpectralCurve {
        SpectralCurve::named(kind, Peclet::from_value(pe).unwrap(), Sampling::default()).unwrap()
    }

    #[test]
    fn figure_spot_values_on_discrete_grid() {
        let c = scheme_cfl(
            SchemeKind::Centered,
            TimeScheme::Rk4,
            Peclet::Finite(10.0),
            Sampling::Discrete(25),
        )
        .unwrap();
        assert_abs_diff_eq!(c, 2.0935, epsilon = 0.01);
        let c = scheme_cfl(
            SchemeKind::WeakUpwind,
            TimeScheme::Rkd,
            Peclet::Finite(5.0),
            Sampling::Discrete(25),
        )
        .unwrap();
        assert_abs_diff_eq!(c, 1.7948, epsilon = 0.01);
    }

    #[test]
    fn scaled_curve_halves_cfl() {
        let mut curve = continuous(SchemeKind::WeakUpwind, 5.0);
        let poly = TimeScheme::Rk4.polynomial();
        let base = optimal_cfl_poly(&curve, &poly).unwrap().c_cfl;
        for s in curve.samples.iter_mut() {
            s.rho *= 2.0;
        }
        let doubled = optimal_cfl_poly(&curve, &poly).unwrap().c_cfl;
        assert_abs_diff_eq!(doubled, base / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn returned_cfl_is_stable_and_sharp() {
        for (kind, time, pe) in [
            (SchemeKind::Centered, TimeScheme::Rk4, 10.0),
            (SchemeKind::WeakUpwind, TimeScheme::Rkd, 2.0),
            (SchemeKind::Centered, TimeScheme::Rkd, 0.5),
        ] {
            let curve = continuous(kind, pe);
            let poly = time.polynomial();
            let c = optimal_cfl_poly(&curve, &poly).unwrap().c_cfl;
            let worst = |f: f64| {
                curve
                    .samples
                    .iter()
                    .map(|s| poly.eval(s.rho * f).norm())
                    .fold(0.0, f64::max)
            };
            assert!(worst(c) <= 1.0 + 1e-8);
            assert!(worst(1.05 * c) > 1.0);
        }
    }

    #[test]
    fn centered_rkd_at_pure_convection_is_zero() {
        let c = scheme_cfl(
            SchemeKind::Centered,
            TimeScheme::Rkd,
            Peclet::Infinite,
            Sampling::default(),
        )
        .unwrap();
        assert!(c.abs() < 1e-3);
    }

    #[test]
    fn diffusive_limits() {
        assert_abs_diff_eq!(
            diffusive_cfl(SchemeKind::Centered, TimeScheme::Rk4).unwrap(),
            0.53,
            epsilon = 0.02
        );
        assert_abs_diff_eq!(
            diffusive_cfl(SchemeKind::WeakUpwind, TimeScheme::Rk4).unwrap(),
            0.70,
            epsilon = 0.02
        );
        // Pe = 0 curves are real segments [-16/3, 0] (centered) and [-4, 0] (weak)
        let zeta = crate::rkdesign::real_axis_radius(&TimeScheme::Rkd.polynomial());
        assert_abs_diff_eq!(
            diffusive_cfl(SchemeKind::Centered, TimeScheme::Rkd).unwrap(),
            zeta * 3.0 / 16.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            diffusive_cfl(SchemeKind::WeakUpwind, TimeScheme::Rkd).unwrap(),
            zeta / 4.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn dt_max_uses_curve_scale() {
        let mut curve = SpectralCurve::named(
            SchemeKind::Centered,
            Peclet::Finite(10.0),
            Sampling::Discrete(25),
        )
        .unwrap();
        curve.scale = 25.0;
        let r = optimal_cfl_poly(&curve, &TimeScheme::Rk4.polynomial()).unwrap();
        assert_abs_diff_eq!(r.dt_max, 0.0837, epsilon = 5e-4);
    }

    #[test]
    fn degenerate_curve_rejected() {
        let mut curve = continuous(SchemeKind::Centered, 1.0);
        for s in curve.samples.iter_mut() {
            s.rho = Complex64::new(0.0, 0.0);
        }
        assert_eq!(
            optimal_cfl_poly(&curve, &TimeScheme::Rk4.polynomial()),
            Err(Error::DegenerateCurve)
        );
    }

    #[test]
    fn region_and_polynomial_agree() {
        let curve = continuous(SchemeKind::WeakUpwind, 20.0);
        let region = region_boundary(&TimeScheme::Rkd.polynomial(), 512).unwrap();
        let a = optimal_cfl(&curve, &region).unwrap();
        let b = optimal_cfl_poly(&curve, &region.polynomial).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn time_scheme_parsing() {
        assert_eq!("RK4".parse::<TimeScheme>().unwrap(), TimeScheme::Rk4);
        assert_eq!("rkd".parse::<TimeScheme>().unwrap(), TimeScheme::Rkd);
        assert!("rk3".parse::<TimeScheme>().is_err());
    }
}
