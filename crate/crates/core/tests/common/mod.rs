#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use cdscheme::solver::Solver;
use cdscheme::spectral::PhysicalParams;

/// Eigenvalues of a dense real matrix given by rows.
pub fn dense_eigenvalues(rows: &[Vec<f64>]) -> Vec<Complex64> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect()
}

/// Largest distance between two spectra after greedy nearest matching.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for za in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, zb)| (k, (za - zb).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("same length");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// `(u, κ, Δx)` on an `nodes`-point grid with the requested Péclet number.
pub fn params_for(pe: f64, nodes: usize) -> PhysicalParams {
    let dx = 1.0 / nodes as f64;
    if pe == 0.0 {
        PhysicalParams::new(0.0, 1.0, dx).unwrap()
    } else if pe.is_infinite() {
        PhysicalParams::new(1.0, 0.0, dx).unwrap()
    } else {
        PhysicalParams::new(1.0, dx / pe, dx).unwrap()
    }
}

/// Matrix of the linear one-step map, assembled by stepping unit vectors.
pub fn one_step_matrix(solver: &Solver<'_>, css: &[u8], cts: &[u8], dt: f64) -> Vec<Vec<f64>> {
    let n = css.len();
    let mut rows = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solver.rk_step(&e, css, cts, 0.0, dt);
        for i in 0..n {
            rows[i][j] = col[i];
        }
    }
    rows
}

pub fn spectral_radius(rows: &[Vec<f64>]) -> f64 {
    dense_eigenvalues(rows)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}
