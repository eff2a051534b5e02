//! A posteriori detection: the ED → SCD → (LOD ∨ SD) chain run on a
//! candidate solution, flagging centered nodes to recompute with the weak
//! upwind scheme.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User thresholds of the detector chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// SCD: oscillations with `v_i < theta_scd·Δx` are innocuous.
    pub theta_scd: f64,
    /// SD: non-smooth when `min|χ| < theta_sd·max|χ|`.
    pub theta_sd: f64,
    /// SD on signed curvatures, `min χ < theta_sd·max χ`. Kept for
    /// sensitivity runs only.
    #[serde(default)]
    pub signed_sd: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            theta_scd: 1.0,
            theta_sd: 0.25,
            signed_sd: false,
        }
    }
}

impl DetectorConfig {
    pub fn new(theta_scd: f64, theta_sd: f64) -> Result<Self> {
        let cfg = Self {
            theta_scd,
            theta_sd,
            signed_sd: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_scd > 0.0 && self.theta_scd.is_finite()) {
            return Err(Error::Config(format!(
                "theta_scd must be > 0, got {}",
                self.theta_scd
            )));
        }
        if !(0.0..=1.0).contains(&self.theta_sd) {
            return Err(Error::Config(format!(
                "theta_sd must lie in [0, 1], got {}",
                self.theta_sd
            )));
        }
        Ok(())
    }
}

#[inline]
fn at(phi: &[f64], i: usize, offset: isize) -> f64 {
    let n = phi.len() as isize;
    phi[(i as isize + offset).rem_euclid(n) as usize]
}

/// `χ_{i+offset} = (φ_{j+1} - 2φ_j + φ_{j-1})/Δx` with `j = i + offset`.
#[inline]
fn curvature(phi: &[f64], i: usize, offset: isize, dx: f64) -> f64 {
    (at(phi, i, offset + 1) - 2.0 * at(phi, i, offset) + at(phi, i, offset - 1)) / dx
}

/// ED: strict local extremum. A node equal to a neighbour is not an extremum.
pub fn detect_extremum(phi: &[f64], i: usize) -> bool {
    let p = phi[i];
    (p - at(phi, i, 1)) * (p - at(phi, i, -1)) > 0.0
}

/// SCD: true when the jump to either neighbour is too small to matter.
pub fn detect_small_curvature(phi: &[f64], i: usize, theta: f64, dx: f64) -> bool {
    let p = phi[i];
    let v = (p - at(phi, i, 1)).abs().max((p - at(phi, i, -1)).abs()) / dx;
    v < theta * dx
}

/// LOD: the three curvatures around `i` do not share one sign.
pub fn detect_local_oscillation(phi: &[f64], i: usize, dx: f64) -> bool {
    let sign = |v: f64| (v > 0.0) as i8 - (v < 0.0) as i8;
    let s = [-1, 0, 1].map(|o| sign(curvature(phi, i, o, dx)));
    !(s[0] == s[1] && s[1] == s[2])
}

/// SD: the curvature magnitudes around `i` vary too much.
pub fn detect_nonsmooth(phi: &[f64], i: usize, theta: f64, dx: f64) -> bool {
    let m = [-1, 0, 1].map(|o| curvature(phi, i, o, dx).abs());
    let (lo, hi) = min_max(&m);
    lo < theta * hi
}

/// SD variant comparing signed curvatures.
pub fn detect_nonsmooth_signed(phi: &[f64], i: usize, theta: f64, dx: f64) -> bool {
    let m = [-1, 0, 1].map(|o| curvature(phi, i, o, dx));
    let (lo, hi) = min_max(&m);
    lo < theta * hi
}

fn min_max(v: &[f64; 3]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Per-node detector flags from one pass of the chain.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorOutcome {
    /// Nodes that entered the chain (`css = 0`).
    pub checked: Vec<bool>,
    pub ed: Vec<bool>,
    pub scd: Vec<bool>,
    pub lod: Vec<bool>,
    pub sd: Vec<bool>,
    pub cured: Vec<bool>,
}

impl DetectorOutcome {
    pub fn cured_indices(&self) -> Vec<usize> {
        self.cured
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect()
    }

    pub fn n_cured(&self) -> usize {
        self.cured.iter().filter(|&&c| c).count()
    }

    /// `cured ⇒ checked ∧ ed ∧ ¬scd ∧ (lod ∨ sd)` at every node.
    pub fn is_sound(&self) -> bool {
        (0..self.cured.len()).all(|i| {
            !self.cured[i]
                || (self.checked[i] && self.ed[i] && !self.scd[i] && (self.lod[i] || self.sd[i]))
        })
    }
}

/// Runs the chain on every node with `css = 0`; other nodes are left alone.
pub fn run_chain(
    phi_star: &[f64],
    css: &[u8],
    config: &DetectorConfig,
    dx: f64,
) -> DetectorOutcome {
    let n = phi_star.len();
    let mut out = DetectorOutcome {
        checked: vec![false; n],
        ed: vec![false; n],
        scd: vec![false; n],
        lod: vec![false; n],
        sd: vec![false; n],
        cured: vec![false; n],
    };
    for i in 0..n {
        if css[i] != 0 {
            continue;
        }
        out.checked[i] = true;
        out.ed[i] = detect_extremum(phi_star, i);
        out.scd[i] = detect_small_curvature(phi_star, i, config.theta_scd, dx);
        out.lod[i] = detect_local_oscillation(phi_star, i, dx);
        out.sd[i] = if config.signed_sd {
            detect_nonsmooth_signed(phi_star, i, config.theta_sd, dx)
        } else {
            detect_nonsmooth(phi_star, i, config.theta_sd, dx)
        };
        out.cured[i] = out.ed[i] && !out.scd[i] && (out.lod[i] || out.sd[i]);
    }
    out
}

/// Flags cured nodes as weak upwind. Returns how many changed.
pub fn apply_cure(css: &mut [u8], outcome: &DetectorOutcome) -> usize {
    let mut changed = 0;
    for (c, &cured) in css.iter_mut().zip(&outcome.cured) {
        if cured && *c == 0 {
            *c = 1;
            changed += 1;
        }
    }
    changed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn padded(core: &[f64]) -> Vec<f64> {
        // periodic vector whose node 2 sees `core` as its 5-point neighbourhood
        let mut v = core.to_vec();
        v.extend_from_slice(&[core[4]; 3]);
        v
    }

    #[test]
    fn extremum_cases() {
        assert!(detect_extremum(&[0.0, 1.0, 0.0], 1));
        assert!(detect_extremum(&[1.0, 0.0, 1.0], 1));
        assert!(!detect_extremum(&[0.0, 1.0, 2.0], 1));
        assert!(!detect_extremum(&[1.0, 1.0, 0.0], 1));
    }

    #[test]
    fn small_curvature_cases() {
        assert!(detect_small_curvature(&[3.0; 5], 2, 1e-9, 0.1));
        let jump = [0.0, 0.0, 1.0, 1.0, 1.0];
        assert!(!detect_small_curvature(&jump, 2, 1.0, 0.01));
        // v_i = θΔx exactly is not small: jump 0.25 over Δx = 0.5 gives v = 0.5
        let edge = [0.0, 0.0, 0.25, 0.25, 0.25];
        assert!(!detect_small_curvature(&edge, 2, 1.0, 0.5));
        assert!(detect_small_curvature(&edge, 2, 1.0 + 1e-9, 0.5));
    }

    #[test]
    fn local_oscillation_cases() {
        let convex: Vec<f64> = (0..5).map(|k| (k as f64 - 2.0).powi(2)).collect();
        assert!(!detect_local_oscillation(&padded(&convex), 2, 0.1));
        let alt = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        assert!(detect_local_oscillation(&alt, 2, 0.1));
    }

    #[test]
    fn local_oscillation_on_sampled_sine_matches_direct_evaluation() {
        let n = 8;
        let dx = 1.0 / n as f64;
        let phi: Vec<f64> = (0..n)
            .map(|k| (2.0 * std::f64::consts::PI * (k as f64 * dx + 0.1)).sin())
            .collect();
        for i in 0..n {
            let chi = |j: isize| {
                let g = |m: isize| phi[(m).rem_euclid(n as isize) as usize];
                let j = i as isize + j;
                (g(j + 1) - 2.0 * g(j) + g(j - 1)) / dx
            };
            let s: Vec<i32> = [-1, 0, 1].iter().map(|&o| chi(o).signum() as i32).collect();
            let expected = !(s[0] == s[1] && s[1] == s[2]);
            assert_eq!(detect_local_oscillation(&phi, i, dx), expected, "node {i}");
        }
    }

    #[test]
    fn nonsmooth_cases() {
        let convex: Vec<f64> = (0..5).map(|k| (k as f64 - 2.0).powi(2)).collect();
        assert!(!detect_nonsmooth(&padded(&convex), 2, 1.0, 0.1));
        // curvatures 0.1, 1.0, 1.0 (times 1/Δx)
        let phi = [0.0, 0.0, 0.1, 1.2, 3.3];
        let c: Vec<f64> = (1..4)
            .map(|j| phi[j + 1] - 2.0 * phi[j] + phi[j - 1])
            .collect();
        assert!(
            (c[0] - 0.1).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12 && (c[2] - 1.0).abs() < 1e-12
        );
        let v = padded(&phi);
        assert!(detect_nonsmooth(&v, 2, 0.5, 1.0));
        assert!(!detect_nonsmooth(&v, 2, 0.05, 1.0));
    }

    #[test]
    fn monotone_profile_cures_nothing() {
        let phi: Vec<f64> = (0..20).map(|k| (k as f64).powf(1.5)).collect();
        // drop the periodic wrap-around by only inspecting interior nodes
        let out = run_chain(&phi, &vec![0; 20], &DetectorConfig::default(), 0.05);
        assert!((2..18).all(|i| !out.ed[i] && !out.cured[i]));
    }

    #[test]
    fn chain_skips_cured_nodes_and_is_sound() {
        let phi = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let mut css = vec![0u8; 8];
        css[3] = 1;
        let out = run_chain(&phi, &css, &DetectorConfig::default(), 0.125);
        assert!(!out.checked[3] && !out.cured[3]);
        assert!(out.cured[2] && out.is_sound());
        let before = css.clone();
        let changed = apply_cure(&mut css, &out);
        assert_eq!(changed, 7);
        assert!(css.iter().zip(&before).all(|(a, b)| a >= b));
    }

    #[test]
    fn config_validation() {
        assert!(DetectorConfig::new(0.0, 0.5).is_err());
        assert!(DetectorConfig::new(1.0, 1.5).is_err());
        assert!(DetectorConfig::new(1.0, 0.0).is_ok());
    }
}
