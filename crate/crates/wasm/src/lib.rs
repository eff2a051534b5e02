//! Browser bindings. Curves are returned as flat `[x0, y0, x1, y1, ...]` arrays.

use wasm_bindgen::prelude::*;

use cdscheme::cfl::{cfl_curve as cfl_points, TimeScheme};
use cdscheme::rkdesign::{
    imaginary_axis_radius, real_axis_radius, region_boundary, StabilityPolynomial,
};
use cdscheme::spectral::{Peclet, Sampling, SchemeKind, SpectralCurve};

fn js(e: cdscheme::error::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn sampling(nodes: u32, samples: u32) -> Sampling {
    if nodes > 0 {
        Sampling::Discrete(nodes as usize)
    } else {
        Sampling::Continuous(samples as usize)
    }
}

/// `ρ(s)` of a named scheme; `pe` may be `Infinity`. `nodes > 0` selects the
/// discrete spectrum of that grid instead of `samples` uniform points.
#[wasm_bindgen]
pub fn spectral_curve(
    scheme: &str,
    pe: f64,
    samples: u32,
    nodes: u32,
) -> Result<Vec<f64>, JsError> {
    let kind: SchemeKind = scheme.parse().map_err(js)?;
    let pe = Peclet::from_value(pe).map_err(js)?;
    let curve = SpectralCurve::named(kind, pe, sampling(nodes, samples)).map_err(js)?;
    Ok(curve
        .samples
        .iter()
        .flat_map(|p| [p.rho.re, p.rho.im])
        .collect())
}

/// Boundary of the stability region of `rk4`, `rkd`, `bakker`, ... or `custom:w3,w4`.
#[wasm_bindgen]
pub fn stability_region(poly: &str, rays: u32) -> Result<Vec<f64>, JsError> {
    let poly: StabilityPolynomial = poly.parse().map_err(js)?;
    let region = region_boundary(&poly, rays as usize).map_err(js)?;
    Ok(region.boundary.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// `[real radius, imaginary radius]` of a stability polynomial.
#[wasm_bindgen]
pub fn axis_radii(poly: &str) -> Result<Vec<f64>, JsError> {
    let poly: StabilityPolynomial = poly.parse().map_err(js)?;
    Ok(vec![real_axis_radius(&poly), imaginary_axis_radius(&poly)])
}

/// `(Pe, Ĉ)` on a logarithmic Péclet grid.
#[wasm_bindgen]
pub fn cfl_curve(
    scheme: &str,
    time: &str,
    pe_min: f64,
    pe_max: f64,
    points: u32,
    nodes: u32,
) -> Result<Vec<f64>, JsError> {
    if !(pe_min > 0.0 && pe_max > pe_min && points >= 2) {
        return Err(JsError::new(
            "need 0 < pe_min < pe_max and at least 2 points",
        ));
    }
    let kind: SchemeKind = scheme.parse().map_err(js)?;
    let time: TimeScheme = time.parse().map_err(js)?;
    let (a, b) = (pe_min.ln(), pe_max.ln());
    let grid: Vec<f64> = (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .collect();
    let curve = cfl_points(kind, time, &grid, sampling(nodes, 1024)).map_err(js)?;
    Ok(curve.into_iter().flat_map(|(pe, c)| [pe, c]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_layouts() {
        let curve = spectral_curve("weak", 5.0, 64, 0).unwrap();
        assert_eq!(curve.len() % 2, 0);
        assert!(curve.len() >= 128);
        assert_eq!(spectral_curve("centered", 1.0, 0, 25).unwrap().len(), 50);
        assert_eq!(stability_region("rk4", 360).unwrap().len(), 720);
        let radii = axis_radii("rk4").unwrap();
        assert!((radii[1] - 8f64.sqrt()).abs() < 1e-6);
        let cfl = cfl_curve("centered", "rk4", 0.1, 100.0, 5, 0).unwrap();
        assert_eq!(cfl.len(), 10);
        assert!((cfl[8] - 100.0).abs() < 1e-9);
    }
}
