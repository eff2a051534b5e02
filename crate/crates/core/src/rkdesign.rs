//! Stability polynomials of explicit four-stage Runge-Kutta methods, their
//! stability regions, and Butcher tableaux sharing the sub-steps
//! `c = (0, 1/2, 1/2, 1)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `q(t) > OUTSIDE_EPS` marks a point strictly outside `|R| ≤ 1`. Points where
/// `|R|` only touches 1 (e.g. the interior ripple points of `P4` on the
/// imaginary axis) stay inside the closure.
const OUTSIDE_EPS: f64 = 1e-12;
/// Coefficients of `|R(td)|² - 1` below this are treated as zero when
/// deciding whether a ray enters the region at all.
const TANGENT_EPS: f64 = 1e-13;
/// Marching step along a ray before bisection.
const RAY_STEP: f64 = 5e-3;
const RAY_MAX: f64 = 1e3;

pub const DEFAULT_RAYS: usize = 512;

/// Positivity bounds used to design `R_D`.
pub const RKD_LOWER: f64 = 0.01;
pub const RKD_UPPER: f64 = 0.7;

/// Free coefficients of `R_D`.
pub const RKD_W3: f64 = 603.0 / 6998.0;
pub const RKD_W4: f64 = 15.0 / 3212.0;

/// Perturbed Bakker pair giving a region radial at the origin.
pub const PERTURBED_W3: f64 = 0.0834;
pub const PERTURBED_W4: f64 = 0.0042;

/// `R(z) = 1 + Σ_{k≤p} z^k/k! + Σ_{k>p} w_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPolynomial {
    order: usize,
    /// Coefficients of `z^0 .. z^s`.
    coeffs: Vec<f64>,
}

impl StabilityPolynomial {
    /// Order `p` polynomial with free coefficients `w_{p+1}, .., w_s`.
    pub fn new(order: usize, free: &[f64]) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("order must be >= 1".into()));
        }
        if free.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "free coefficients must be finite".into(),
            ));
        }
        let mut coeffs = Vec::with_capacity(order + free.len() + 1);
        let mut fact = 1.0;
        coeffs.push(1.0);
        for k in 1..=order {
            fact *= k as f64;
            coeffs.push(1.0 / fact);
        }
        coeffs.extend_from_slice(free);
        Ok(Self { order, coeffs })
    }

    /// Second-order four-stage polynomial `R₂₄(z; w3, w4)`.
    pub fn r24(w3: f64, w4: f64) -> Self {
        Self::new(2, &[w3, w4]).expect("finite coefficients")
    }

    pub fn rk2() -> Self {
        Self::new(2, &[]).unwrap()
    }

    pub fn rk3() -> Self {
        Self::new(3, &[]).unwrap()
    }

    pub fn rk4() -> Self {
        Self::new(4, &[]).unwrap()
    }

    /// Largest imaginary-axis segment among first-order four-stage polynomials.
    pub fn p4() -> Self {
        Self::new(1, &[5.0 / 9.0, 4.0 / 27.0, 4.0 / 81.0]).unwrap()
    }

    /// Bakker's Chebyshev-based polynomial, real interval `[-10, 0]`.
    pub fn bakker() -> Self {
        Self::r24(2.0 / 25.0, 1.0 / 250.0)
    }

    pub fn perturbed_bakker() -> Self {
        Self::r24(PERTURBED_W3, PERTURBED_W4)
    }

    /// Positivity-preserving `R_D`.
    pub fn rkd() -> Self {
        Self::r24(RKD_W3, RKD_W4)
    }

    /// `T_s(1 + z/s²)`: first order, optimal real interval `[-2s², 0]`.
    pub fn shifted_chebyshev(stages: usize) -> Result<Self> {
        if stages == 0 {
            return Err(Error::InvalidArgument("stages must be >= 1".into()));
        }
        // Chebyshev coefficients in the variable y, then substitute y = 1 + z/s².
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        for _ in 1..stages {
            let mut next = vec![0.0; cur.len() + 1];
            for (k, c) in cur.iter().enumerate() {
                next[k + 1] += 2.0 * c;
            }
            for (k, c) in prev.iter().enumerate() {
                next[k] -= c;
            }
            prev = cur;
            cur = next;
        }
        let scale = 1.0 / (stages * stages) as f64;
        // (1 + scale·z)^k expanded with binomials
        let mut coeffs = vec![0.0; stages + 1];
        for (k, ck) in cur.iter().enumerate() {
            let mut binom = 1.0;
            for j in 0..=k {
                coeffs[j] += ck * binom * scale.powi(j as i32);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        Ok(Self { order: 1, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn free_coeffs(&self) -> &[f64] {
        &self.coeffs[self.order + 1..]
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative_real(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    /// Coefficients of `q(t) = |R(t d)|² - 1` for a unit direction `d`.
    fn ray_modulus(&self, d: Complex64) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut dp = Vec::with_capacity(n);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            dp.push(acc);
            acc *= d;
        }
        let mut q = vec![0.0; 2 * n - 1];
        for k in 0..n {
            for l in 0..n {
                q[k + l] += self.coeffs[k] * self.coeffs[l] * (dp[k] * dp[l].conj()).re;
            }
        }
        q[0] -= 1.0;
        q
    }

    /// Distance from the origin to the boundary of the origin-connected
    /// stability region along `direction`; 0 if the ray does not enter it.
    pub fn ray_exit(&self, direction: Complex64) -> f64 {
        let norm = direction.norm();
        if norm == 0.0 || !norm.is_finite() {
            return 0.0;
        }
        let q = self.ray_modulus(direction / norm);
        let eval = |t: f64| q.iter().rev().fold(0.0, |acc, &c| acc * t + c);
        // The lowest significant Taylor coefficient tells whether the ray
        // leaves |R| ≤ 1 immediately.
        match q.iter().skip(1).find(|c| c.abs() > TANGENT_EPS) {
            Some(&c) if c > 0.0 => return 0.0,
            None => return 0.0,
            _ => {}
        }
        let mut lo = 0.0;
        let mut hi = RAY_STEP;
        while eval(hi) <= OUTSIDE_EPS {
            lo = hi;
            hi += RAY_STEP;
            if hi > RAY_MAX {
                return RAY_MAX;
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if eval(mid) > OUTSIDE_EPS {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        lo
    }

    /// Real critical points of `R` in `[left, right]`, in increasing order.
    fn critical_points(&self, left: f64, right: f64, samples: usize) -> Vec<f64> {
        let h = (right - left) / samples as f64;
        let mut out = Vec::new();
        let mut x0 = left;
        let mut d0 = self.derivative_real(x0);
        for k in 1..=samples {
            let x1 = left + k as f64 * h;
            let d1 = self.derivative_real(x1);
            if d0 == 0.0 {
                out.push(x0);
            } else if d0 * d1 < 0.0 {
                let (mut a, mut b, mut fa) = (x0, x1, d0);
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    let fm = self.derivative_real(m);
                    if fm * fa <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                    if b - a < 1e-15 * a.abs().max(1.0) {
                        break;
                    }
                }
                out.push(0.5 * (a + b));
            }
            x0 = x1;
            d0 = d1;
        }
        out
    }
}

/// Accepts `rk2`, `rk3`, `rk4`, `p4`, `bakker`, `rkd` or `custom:w3,w4`.
impl std::str::FromStr for StabilityPolynomial {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "rk2" => Self::rk2(),
            "rk3" => Self::rk3(),
            "rk4" => Self::rk4(),
            "p4" => Self::p4(),
            "bakker" => Self::bakker(),
            "rkd" | "rk_d" => Self::rkd(),
            other => {
                let spec = other.strip_prefix("custom:").ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown polynomial '{name}'"))
                })?;
                let parts: Vec<f64> = spec
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidArgument(format!("'{name}': {e}")))?;
                match parts[..] {
                    [w3, w4] => Self::r24(w3, w4),
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "'{name}': expected custom:w3,w4"
                        )))
                    }
                }
            }
        })
    }
}

impl fmt::Display for StabilityPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R(z) = 1")?;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            write!(f, " + {c}·z^{k}")?;
        }
        Ok(())
    }
}

/// Evaluates the transfer polynomial.
pub fn eval_transfer(poly: &StabilityPolynomial, z: Complex64) -> Complex64 {
    poly.eval(z)
}

/// Star-shaped description of the origin-connected stability region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRegion {
    pub polynomial: StabilityPolynomial,
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
    pub boundary: Vec<Complex64>,
}

impl StabilityRegion {
    /// Radius along an arbitrary direction, computed exactly rather than
    /// interpolated from the stored rays.
    pub fn radius_towards(&self, direction: Complex64) -> f64 {
        self.polynomial.ray_exit(direction)
    }
}

/// Boundary of `{|R| < 1}` by radial bisection on `n_rays` equally spaced rays.
pub fn region_boundary(poly: &StabilityPolynomial, n_rays: usize) -> Result<StabilityRegion> {
    if n_rays < 180 {
        return Err(Error::InvalidArgument(format!(
            "need at least 180 rays, got {n_rays}"
        )));
    }
    let mut angles = Vec::with_capacity(n_rays);
    let mut radii = Vec::with_capacity(n_rays);
    let mut boundary = Vec::with_capacity(n_rays);
    for k in 0..n_rays {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n_rays as f64;
        let d = Complex64::from_polar(1.0, theta);
        let r = poly.ray_exit(d);
        angles.push(theta);
        radii.push(r);
        boundary.push(d * r);
    }
    if radii.iter().all(|&r| r == 0.0) {
        return Err(Error::EmptyRegion);
    }
    Ok(StabilityRegion {
        polynomial: poly.clone(),
        angles,
        radii,
        boundary,
    })
}

/// Largest `η` with `[-iη, iη]` inside the closed stability region.
pub fn imaginary_axis_radius(poly: &StabilityPolynomial) -> f64 {
    let up = poly.ray_exit(Complex64::new(0.0, 1.0));
    let down = poly.ray_exit(Complex64::new(0.0, -1.0));
    up.min(down)
}

/// Largest `ζ` with `|R(x)| ≤ 1` on `[-ζ, 0]`.
pub fn real_axis_radius(poly: &StabilityPolynomial) -> f64 {
    poly.ray_exit(Complex64::new(-1.0, 0.0))
}

/// Largest `ζ` such that, on `[-ζ, 0]`, `lower ≤ R ≤ 1` and `R ≤ upper` once
/// `R` has first dropped to `upper`.
///
/// `R(0) = 1`, so the upper bound cannot hold right at the origin; it applies
/// from the first point where the polynomial falls to `upper` onwards.
pub fn positive_interval(poly: &StabilityPolynomial, lower: f64, upper: f64, cap: f64) -> f64 {
    let crit = poly.critical_points(-cap, 0.0, 4096);
    // monotone pieces walked from the origin leftwards
    let mut knots: Vec<f64> = crit.into_iter().rev().filter(|&x| x < 0.0).collect();
    knots.insert(0, 0.0);
    knots.push(-cap);

    let mut descended = upper >= 1.0;
    for w in knots.windows(2) {
        let (right, left) = (w[0], w[1]);
        let r_right = poly.eval_real(right);
        let r_left = poly.eval_real(left);
        let bisect = |level: f64| -> f64 {
            // crossing of R = level inside the monotone piece [left, right]
            let (mut a, mut b) = (left, right);
            let fa = poly.eval_real(a) - level;
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                let fm = poly.eval_real(m) - level;
                if fm * fa > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
                if b - a < 1e-15 * a.abs().max(1.0) {
                    break;
                }
            }
            0.5 * (a + b)
        };
        if r_left < r_right {
            // decreasing towards the left
            if !descended && r_left <= upper {
                descended = true;
            }
            if r_left < lower {
                return -bisect(lower);
            }
        } else {
            let hi = if descended { upper } else { 1.0 };
            if r_left > hi {
                return -bisect(hi);
            }
        }
    }
    cap
}

/// Result of the positivity-constrained design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveDesign {
    pub polynomial: StabilityPolynomial,
    pub zeta: f64,
}

/// Maximises the positivity interval of `R₂₄(·; w3, w4)` over `(w3, w4)`.
///
/// A 200×200 grid over `w3 ∈ [0, 0.2]`, `w4 ∈ [0, 0.02]` seeds a Nelder–Mead
/// refinement. Deterministic.
pub fn optimize_positive_polynomial(lower: f64, upper: f64) -> Result<PositiveDesign> {
    if !(lower >= 0.0 && lower < upper && upper <= 1.0) {
        return Err(Error::Infeasible(format!(
            "need 0 <= lower < upper <= 1, got [{lower}, {upper}]"
        )));
    }
    const CAP: f64 = 40.0;
    let objective = |w: [f64; 2]| -> f64 {
        positive_interval(&StabilityPolynomial::r24(w[0], w[1]), lower, upper, CAP)
    };

    let n = 200;
    let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
    for i in 0..=n {
        for j in 0..=n {
            let w = [0.2 * i as f64 / n as f64, 0.02 * j as f64 / n as f64];
            let z = objective(w);
            if z > best.1 {
                best = (w, z);
            }
        }
    }
    if best.1 <= 0.0 {
        return Err(Error::Infeasible(format!(
            "no (w3, w4) keeps R within [{lower}, {upper}]"
        )));
    }
    let (w, zeta) = nelder_mead_max(objective, best.0, [1e-3, 1e-4], 1e-12, 4000);
    Ok(PositiveDesign {
        polynomial: StabilityPolynomial::r24(w[0], w[1]),
        zeta,
    })
}

/// Nelder–Mead maximisation in two variables.
fn nelder_mead_max<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    // minimise -f
    let mut vals = simplex.map(|p| -f(p));
    let lerp =
        |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = idx.map(|k| simplex[k]);
        vals = idx.map(|k| vals[k]);
        if (vals[2] - vals[0]).abs() <= tol
            && (simplex[2][0] - simplex[0][0]).abs() < 1e-12
            && (simplex[2][1] - simplex[0][1]).abs() < 1e-12
        {
            break;
        }
        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = -f(reflected);
        if fr < vals[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = -f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                vals[2] = fe;
            } else {
                simplex[2] = reflected;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = reflected;
            vals[2] = fr;
        } else {
            let contracted = if fr < vals[2] {
                lerp(centroid, reflected, 0.5)
            } else {
                lerp(centroid, simplex[2], 0.5)
            };
            let fc = -f(contracted);
            if fc < vals[2].min(fr) {
                simplex[2] = contracted;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = lerp(simplex[0], simplex[k], 0.5);
                    vals[k] = -f(simplex[k]);
                }
            }
        }
    }
    let k = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (simplex[k], -vals[k])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RippleVerdict {
    Holds,
    Fails,
    /// `p = s`: no free coefficients, nothing to equioscillate.
    NotApplicable,
}

/// Checks for `s - p + 1` alternating points `-ζ = x₀ < … < x_{s-p} < 0`
/// where `|R| = 1` within `tol`.
pub fn verify_ripple(poly: &StabilityPolynomial, zeta: f64, tol: f64) -> Result<RippleVerdict> {
    if !(zeta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "zeta must be > 0, got {zeta}"
        )));
    }
    let free = poly.stages() - poly.order().min(poly.stages());
    if free == 0 {
        return Ok(RippleVerdict::NotApplicable);
    }
    let needed = free + 1;
    let r0 = poly.eval_real(-zeta);
    if (r0.abs() - 1.0).abs() > tol {
        return Ok(RippleVerdict::Fails);
    }
    let touches: Vec<f64> = poly
        .critical_points(-zeta, 0.0, 4096)
        .into_iter()
        .filter(|&x| x > -zeta && x < 0.0)
        .map(|x| poly.eval_real(x))
        .filter(|r| (r.abs() - 1.0).abs() <= tol)
        .collect();
    let mut count = 1;
    let mut sign = r0.signum();
    for r in touches {
        if r.signum() == -sign {
            count += 1;
            sign = -sign;
        }
    }
    Ok(if count >= needed {
        RippleVerdict::Holds
    } else {
        RippleVerdict::Fails
    })
}

/// Explicit four-stage tableau `(A, b, c)` with its transfer coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButcherTableau {
    pub a: [[f64; 4]; 4],
    pub b: [f64; 4],
    pub c: [f64; 4],
    pub w3: f64,
    pub w4: f64,
}

/// Residuals of the consistency and order conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderResiduals {
    /// `max_i |c_i - Σ_j a_ij|`
    pub row_sum: f64,
    pub b_sum: f64,
    pub bc: f64,
    pub bc2: f64,
    pub bc3: f64,
    pub bac: f64,
    pub ba2c: f64,
}

impl OrderResiduals {
    pub fn max_abs(&self) -> f64 {
        [
            self.row_sum,
            self.b_sum,
            self.bc,
            self.bc2,
            self.bc3,
            self.bac,
            self.ba2c,
        ]
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl ButcherTableau {
    /// Classical RK₄.
    pub fn rk4() -> Self {
        Self {
            a: [
                [0.0, 0.0, 0.0, 0.0],
                [0.5, 0.0, 0.0, 0.0],
                [0.0, 0.5, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
            ],
            b: [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: [0.0, 0.5, 0.5, 1.0],
            w3: 1.0 / 6.0,
            w4: 1.0 / 24.0,
        }
    }

    /// `RK_D` with the rounded rational entries as published.
    pub fn rkd_published() -> Self {
        Self {
            a: [
                [0.0, 0.0, 0.0, 0.0],
                [0.5, 0.0, 0.0, 0.0],
                [334.0 / 861.0, 373.0 / 3328.0, 0.0, 0.0],
                [481.0 / 3310.0, 587.0 / 1655.0, 0.5, 0.0],
            ],
            b: [1.0 / 6.0, 0.4, 4.0 / 15.0, 1.0 / 6.0],
            c: [0.0, 0.5, 0.5, 1.0],
            w3: RKD_W3,
            w4: RKD_W4,
        }
    }

    /// `RK_D` synthesised from `(w3, w4)` with `a43 = 1/2`, `b2 = 0.4`.
    pub fn rkd() -> Self {
        synthesize_tableau(RKD_W3, RKD_W4, SHARED_C, 0.5, Some(0.4))
            .expect("RK_D parameters are regular")
    }

    pub fn residuals(&self) -> OrderResiduals {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let row_sum = (0..4)
            .map(|i| (c[i] - a[i].iter().sum::<f64>()).abs())
            .fold(0.0, f64::max);
        let dot = |u: &[f64; 4], v: &[f64; 4]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
        let matvec = |v: &[f64; 4]| {
            let mut out = [0.0; 4];
            for i in 0..4 {
                out[i] = dot(&a[i], v);
            }
            out
        };
        let c2 = c.map(|x| x * x);
        let c3 = c.map(|x| x * x * x);
        let ac = matvec(c);
        let a2c = matvec(&ac);
        OrderResiduals {
            row_sum,
            b_sum: b.iter().sum::<f64>() - 1.0,
            bc: dot(b, c) - 0.5,
            bc2: dot(b, &c2) - 1.0 / 3.0,
            bc3: dot(b, &c3) - 0.25,
            bac: dot(b, &ac) - self.w3,
            ba2c: dot(b, &a2c) - self.w4,
        }
    }

    /// Transfer polynomial `1 + z b·1 + z² b·c + z³ bᵀAc + z⁴ bᵀA²c`.
    pub fn transfer_coeffs(&self) -> [f64; 5] {
        let mut v = [1.0; 4];
        let mut out = [1.0, 0.0, 0.0, 0.0, 0.0];
        for slot in out.iter_mut().skip(1) {
            *slot = self.b.iter().zip(&v).map(|(x, y)| x * y).sum();
            let mut next = [0.0; 4];
            for i in 0..4 {
                next[i] = self.a[i].iter().zip(&v).map(|(x, y)| x * y).sum();
            }
            v = next;
        }
        out
    }

    /// One step of `y' = λy` from `y = 1`, with `z = λΔt`.
    pub fn scalar_step(&self, z: Complex64) -> Complex64 {
        let mut k = [Complex64::new(0.0, 0.0); 4];
        for j in 0..4 {
            let mut stage = Complex64::new(1.0, 0.0);
            for l in 0..j {
                stage += k[l] * self.a[j][l];
            }
            k[j] = z * stage;
        }
        let mut y = Complex64::new(1.0, 0.0);
        for j in 0..4 {
            y += k[j] * self.b[j];
        }
        y
    }
}

/// Sub-steps shared by RK₄ and RK_D.
pub const SHARED_C: [f64; 4] = [0.0, 0.5, 0.5, 1.0];

/// Builds a four-stage tableau whose transfer polynomial is `R₂₄(·; w3, w4)`,
/// fourth order on `φ' = f(t)`.
///
/// With distinct nonzero sub-steps `b` solves the Vandermonde system; when
/// `c2 = c3` the free weight `b2` comes from `b2_hint` (default 0.4).
pub fn synthesize_tableau(
    w3: f64,
    w4: f64,
    c: [f64; 4],
    a43: f64,
    b2_hint: Option<f64>,
) -> Result<ButcherTableau> {
    if c[0] != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "c1 must be 0, got {}",
            c[0]
        )));
    }
    let [_, c2, c3, c4] = c;
    let eps = 1e-14;
    let det = c2 * (c3 - c2) * (c4 - c3);
    let b = if det.abs() > eps {
        let v = [
            [1.0, 1.0, 1.0, 1.0],
            [0.0, c2, c3, c4],
            [0.0, c2 * c2, c3 * c3, c4 * c4],
            [0.0, c2.powi(3), c3.powi(3), c4.powi(3)],
        ];
        solve4(v, [1.0, 0.5, 1.0 / 3.0, 0.25])?
    } else if (c3 - c2).abs() <= eps && c2.abs() > eps && (c4 * (c4 - c2)).abs() > eps {
        let compat = 0.25 - (c4 + c2) / 3.0 + c4 * c2 / 2.0;
        if compat.abs() > 1e-12 {
            return Err(Error::Singular(format!(
                "c2 = c3 needs 1/4 - (c4+c2)/3 + c4 c2/2 = 0, got {compat:e}"
            )));
        }
        let b2 = b2_hint.unwrap_or(0.4);
        let b4 = (2.0 - 3.0 * c2) / (6.0 * c4 * (c4 - c2));
        let b3 = (3.0 * c4 - 2.0) / (6.0 * c2 * (c4 - c2)) - b2;
        let b1 = (c4 + c2 - 1.0) / (6.0 * c2 * c4);
        [b1, b2, b3, b4]
    } else {
        return Err(Error::Singular(format!(
            "Vandermonde system is singular for c = {c:?} and no degenerate branch applies"
        )));
    };
    let [_, _, b3, b4] = b;
    let denom = b4 * a43 * c2;
    if denom.abs() <= eps {
        return Err(Error::Singular(
            "b4·a43·c2 = 0, cannot solve for a32".into(),
        ));
    }
    let a21 = c2;
    let a32 = w4 / denom;
    let a42 = (w3 - b4 * a43 * c3 - b3 * c2 * a32) / (b4 * c2);
    let a31 = c3 - a32;
    let a41 = c4 - a42 - a43;
    Ok(ButcherTableau {
        a: [
            [0.0, 0.0, 0.0, 0.0],
            [a21, 0.0, 0.0, 0.0],
            [a31, a32, 0.0, 0.0],
            [a41, a42, a43, 0.0],
        ],
        b,
        c,
        w3,
        w4,
    })
}

/// Gaussian elimination with partial pivoting.
fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Result<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() < 1e-14 {
            return Err(Error::Singular("Vandermonde matrix is singular".into()));
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transfer_basics() {
        let rk4 = StabilityPolynomial::rk4();
        assert_eq!(rk4.eval(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(
            rk4.eval(Complex64::new(-1.0, 0.0)).re,
            0.375,
            epsilon = 1e-15
        );
        assert!(
            StabilityPolynomial::bakker()
                .eval(Complex64::new(-10.0, 0.0))
                .norm()
                <= 1.0 + 1e-12
        );
        assert_eq!(
            rk4.coeffs(),
            StabilityPolynomial::r24(1.0 / 6.0, 1.0 / 24.0).coeffs()
        );
    }

    #[test]
    fn leading_coefficients_are_taylor() {
        let p = StabilityPolynomial::new(3, &[0.01]).unwrap();
        assert_eq!(p.coeffs()[..4], [1.0, 1.0, 0.5, 1.0 / 6.0]);
        assert_eq!(p.free_coeffs(), &[0.01]);
        assert!(StabilityPolynomial::new(0, &[]).is_err());
    }

    #[test]
    fn rk4_real_axis_matches_bisection_oracle() {
        // independent 1-D bisection on |R4(-t)| = 1 over [2, 3]
        let r = |t: f64| {
            let x = -t;
            (1.0 + x + x * x / 2.0 + x.powi(3) / 6.0 + x.powi(4) / 24.0).abs() - 1.0
        };
        let (mut a, mut b) = (2.0, 3.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if r(m) > 0.0 {
                b = m
            } else {
                a = m
            }
        }
        let rk4 = StabilityPolynomial::rk4();
        assert_abs_diff_eq!(real_axis_radius(&rk4), a, epsilon = 1e-10);
        assert_abs_diff_eq!(a, 2.785, epsilon = 1e-3);
        assert_eq!(rk4.ray_exit(Complex64::new(1.0, 0.0)), 0.0);
    }

    #[test]
    fn axis_radii() {
        assert_abs_diff_eq!(
            imaginary_axis_radius(&StabilityPolynomial::p4()),
            3.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            imaginary_axis_radius(&StabilityPolynomial::rk4()),
            8f64.sqrt(),
            epsilon = 1e-9
        );
        let euler = StabilityPolynomial::new(1, &[]).unwrap();
        assert_eq!(imaginary_axis_radius(&euler), 0.0);
        assert_abs_diff_eq!(
            real_axis_radius(&StabilityPolynomial::bakker()),
            10.0,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            real_axis_radius(&StabilityPolynomial::perturbed_bakker()),
            11.0,
            epsilon = 0.02
        );
    }

    #[test]
    fn rkd_has_no_imaginary_segment() {
        assert_eq!(imaginary_axis_radius(&StabilityPolynomial::rkd()), 0.0);
    }

    #[test]
    fn rkd_positivity_interval() {
        let z = positive_interval(&StabilityPolynomial::rkd(), RKD_LOWER, RKD_UPPER, 40.0);
        assert_abs_diff_eq!(z, 9.43, epsilon = 0.01);
    }

    #[test]
    fn rkd_values_stay_in_bounds_dense_oracle() {
        let p = StabilityPolynomial::rkd();
        // first drop to 0.7 from the origin
        let mut x_u = 0.0;
        while p.eval_real(x_u) > RKD_UPPER {
            x_u -= 1e-6;
        }
        let n = 100_000;
        for k in 0..=n {
            let x = -9.0 * k as f64 / n as f64;
            let r = p.eval_real(x);
            assert!(r >= RKD_LOWER, "R({x}) = {r}");
            if x <= x_u {
                assert!(r <= RKD_UPPER + 1e-12, "R({x}) = {r}");
            }
        }
    }

    #[test]
    fn region_rejects_few_rays() {
        assert!(region_boundary(&StabilityPolynomial::rk4(), 100).is_err());
    }

    #[test]
    fn region_vertices_on_unit_modulus() {
        for poly in [
            StabilityPolynomial::rk4(),
            StabilityPolynomial::rkd(),
            StabilityPolynomial::bakker(),
        ] {
            let region = region_boundary(&poly, 360).unwrap();
            for z in &region.boundary {
                if z.norm() > 0.0 {
                    assert_abs_diff_eq!(poly.eval(*z).norm(), 1.0, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn chebyshev_polynomial_is_first_order() {
        let p = StabilityPolynomial::shifted_chebyshev(4).unwrap();
        assert_abs_diff_eq!(p.coeff(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.coeff(1), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.eval_real(-32.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(real_axis_radius(&p), 32.0, epsilon = 1e-6);
    }

    #[test]
    fn ripple_verdicts() {
        let cheb = StabilityPolynomial::shifted_chebyshev(4).unwrap();
        assert_eq!(
            verify_ripple(&cheb, 32.0, 1e-6).unwrap(),
            RippleVerdict::Holds
        );
        assert_eq!(
            verify_ripple(&StabilityPolynomial::bakker(), 10.0, 1e-6).unwrap(),
            RippleVerdict::Fails
        );
        let rk4 = StabilityPolynomial::rk4();
        assert_eq!(
            verify_ripple(&rk4, real_axis_radius(&rk4), 1e-6).unwrap(),
            RippleVerdict::NotApplicable
        );
        assert!(verify_ripple(&cheb, 0.0, 1e-6).is_err());
    }

    #[test]
    fn classical_tableau_reproduced() {
        let t = synthesize_tableau(1.0 / 6.0, 1.0 / 24.0, SHARED_C, 1.0, Some(1.0 / 3.0)).unwrap();
        let rk4 = ButcherTableau::rk4();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(t.a[i][j], rk4.a[i][j], epsilon = 1e-15);
            }
            assert_abs_diff_eq!(t.b[i], rk4.b[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn rkd_tableau_matches_published_entries() {
        let t = ButcherTableau::rkd();
        let p = ButcherTableau::rkd_published();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(t.a[i][j], p.a[i][j], epsilon = 1e-3);
            }
            assert_abs_diff_eq!(t.b[i], p.b[i], epsilon = 1e-12);
        }
        assert!(t.residuals().max_abs() < 1e-12);
        assert!(p.residuals().max_abs() < 1e-3);
        assert_eq!(t.c, ButcherTableau::rk4().c);
    }

    #[test]
    fn regular_vandermonde_branch() {
        let c = [0.0, 0.3, 0.6, 1.0];
        let t = synthesize_tableau(0.08, 0.004, c, 0.7, None).unwrap();
        assert!(t.residuals().max_abs() < 1e-12, "{:?}", t.residuals());
    }

    #[test]
    fn singular_configurations_rejected() {
        assert!(matches!(
            synthesize_tableau(0.1, 0.01, [0.0, 0.0, 0.5, 1.0], 1.0, None),
            Err(Error::Singular(_))
        ));
        // c2 = c3 but the compatibility relation fails
        assert!(matches!(
            synthesize_tableau(0.1, 0.01, [0.0, 0.4, 0.4, 1.0], 1.0, None),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            synthesize_tableau(0.1, 0.01, SHARED_C, 0.0, None),
            Err(Error::Singular(_))
        ));
        assert!(synthesize_tableau(0.1, 0.01, [0.1, 0.5, 0.5, 1.0], 1.0, None).is_err());
    }

    #[test]
    fn tableau_transfer_polynomial() {
        let t = ButcherTableau::rkd();
        let coeffs = t.transfer_coeffs();
        let expected = StabilityPolynomial::rkd();
        for k in 0..5 {
            assert_abs_diff_eq!(coeffs[k], expected.coeff(k), epsilon = 1e-14);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            "RK_D".parse::<StabilityPolynomial>().unwrap(),
            StabilityPolynomial::rkd()
        );
        assert_eq!(
            "custom:0.08, 0.004".parse::<StabilityPolynomial>().unwrap(),
            StabilityPolynomial::bakker()
        );
        assert!("custom:1".parse::<StabilityPolynomial>().is_err());
        assert!("rk5".parse::<StabilityPolynomial>().is_err());
    }
}
