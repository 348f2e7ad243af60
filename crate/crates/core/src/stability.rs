//! Linear stability on `u' = λu`, where one step acts on the stage vector
//! as the amplification matrix `M(z) = (I - zR - z²R̂)⁻¹ (D + zA + z²Â)`,
//! `z = λ dt`.

use crate::tableau::MethodTableau;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;
use thiserror::Error;

/// Grid points with `ρ ≤ 1 + STABLE_TOL` are classified stable.
pub const STABLE_TOL: f64 = 1e-12;
/// Tolerance of the sampled A-stability check.
pub const A_STABLE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("I - zR - z^2 Rhat is singular at z = {0}")]
    SingularAmplification(Complex64),
    #[error("eigenvalue iteration did not converge at z = {0}")]
    EigenFailure(Complex64),
    #[error("grid needs at least 2 samples per axis, got {nx} x {ny}")]
    GridTooSmall { nx: usize, ny: usize },
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn amplification(t: &MethodTableau, z: Complex64) -> Result<DMatrix<Complex64>, StabilityError> {
    let s = t.stages();
    let z2 = z * z;
    let lhs = DMatrix::<Complex64>::identity(s, s) - complexify(t.r()) * z - complexify(t.r_hat()) * z2;
    let rhs = complexify(t.d()) + complexify(t.a()) * z + complexify(t.a_hat()) * z2;
    lhs.lu().solve(&rhs).ok_or(StabilityError::SingularAmplification(z))
}

pub fn spectral_radius(t: &MethodTableau, z: Complex64) -> Result<f64, StabilityError> {
    let m = amplification(t, z)?;
    if m.iter().any(|x| !x.is_finite()) {
        return Err(StabilityError::SingularAmplification(z));
    }
    let eig = m
        .schur()
        .eigenvalues()
        .ok_or(StabilityError::EigenFailure(z))?;
    Ok(eig.iter().map(|l| l.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// `[-s, s]²` sampled at 401 × 401 points.
    pub fn default_for(t: &MethodTableau) -> Self {
        let s = t.stages() as f64;
        GridSpec { re_range: (-s, s), im_range: (-s, s), nx: 401, ny: 401 }
    }

    fn coord(range: (f64, f64), n: usize, k: usize) -> f64 {
        range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64
    }

    pub fn re(&self, i: usize) -> f64 {
        Self::coord(self.re_range, self.nx, i)
    }

    pub fn im(&self, j: usize) -> f64 {
        Self::coord(self.im_range, self.ny, j)
    }
}

/// Spectral radii on a rectangular grid, stored with the real index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityGrid {
    pub spec: GridSpec,
    /// `rho[i * ny + j]` at `re(i) + i im(j)`; `inf` at poles.
    pub rho: Vec<f64>,
}

impl StabilityGrid {
    pub fn rho_at(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.spec.ny + j]
    }

    pub fn stable_at(&self, i: usize, j: usize) -> bool {
        self.rho_at(i, j) <= 1.0 + STABLE_TOL
    }

    pub fn stable_fraction(&self) -> f64 {
        self.rho.iter().filter(|r| **r <= 1.0 + STABLE_TOL).count() as f64 / self.rho.len() as f64
    }

    /// Writes `re,im,rho,stable` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im", "rho", "stable"])?;
        for i in 0..self.spec.nx {
            for j in 0..self.spec.ny {
                let rho = self.rho_at(i, j);
                w.write_record([
                    format!("{:.16e}", self.spec.re(i)),
                    format!("{:.16e}", self.spec.im(j)),
                    format!("{rho:.16e}"),
                    self.stable_at(i, j).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn scan_region(t: &MethodTableau, spec: GridSpec) -> Result<StabilityGrid, StabilityError> {
    if spec.nx < 2 || spec.ny < 2 {
        return Err(StabilityError::GridTooSmall { nx: spec.nx, ny: spec.ny });
    }
    let rows: Vec<Vec<f64>> = (0..spec.nx)
        .into_par_iter()
        .map(|i| {
            (0..spec.ny)
                .map(|j| spectral_radius(t, Complex64::new(spec.re(i), spec.im(j))).unwrap_or(f64::INFINITY))
                .collect()
        })
        .collect();
    Ok(StabilityGrid { spec, rho: rows.concat() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AStabilityConfig {
    pub radial: usize,
    pub angular: usize,
    pub axis: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for AStabilityConfig {
    fn default() -> Self {
        AStabilityConfig { radial: 200, angular: 200, axis: 400, r_min: 1e-6, r_max: 1e6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AStabilityReport {
    pub samples: usize,
    pub max_rho: f64,
    pub argmax: Complex64,
    /// Points with `ρ > 1 + A_STABLE_TOL`; poles carry `ρ = inf`.
    pub violations: Vec<(Complex64, f64)>,
}

impl AStabilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(move |k| 10f64.powf(a + (b - a) * k as f64 / (n.max(2) - 1) as f64))
}

/// Samples `ρ(M(z))` over the closed left half plane: a log-radial polar
/// grid and the imaginary axis. Passing is evidence, not proof.
pub fn check_a_stability(t: &MethodTableau, cfg: AStabilityConfig) -> AStabilityReport {
    let mut points: Vec<Complex64> = Vec::with_capacity(cfg.radial * cfg.angular + cfg.axis);
    for r in log_space(cfg.r_min, cfg.r_max, cfg.radial) {
        for k in 0..cfg.angular {
            let theta = PI / 2.0 + PI * k as f64 / (cfg.angular.max(2) - 1) as f64;
            points.push(Complex64::from_polar(r, theta));
        }
    }
    let half = cfg.axis / 2;
    for y in log_space(cfg.r_min, cfg.r_max, half) {
        points.push(Complex64::new(0.0, y));
        points.push(Complex64::new(0.0, -y));
    }
    let rhos: Vec<f64> = points
        .par_iter()
        .map(|&z| spectral_radius(t, z).unwrap_or(f64::INFINITY))
        .collect();

    let mut report = AStabilityReport { samples: points.len(), max_rho: 0.0, argmax: Complex64::new(0.0, 0.0), violations: Vec::new() };
    for (z, rho) in points.into_iter().zip(rhos) {
        if rho > report.max_rho {
            report.max_rho = rho;
            report.argmax = z;
        }
        if rho > 1.0 + A_STABLE_TOL {
            report.violations.push((z, rho));
        }
    }
    report
}

/// Left end of the stability interval on the negative real axis: the
/// first `x < 0` (scanning from 0 down to `lower`) with `ρ(M(x)) > 1`,
/// refined by bisection. `None` when the whole interval is stable.
pub fn real_axis_boundary(t: &MethodTableau, lower: f64) -> Option<f64> {
    let unstable = |x: f64| spectral_radius(t, Complex64::new(x, 0.0)).map_or(true, |r| r > 1.0 + STABLE_TOL);
    let samples = 4000;
    let mut prev = 0.0;
    for k in 1..=samples {
        let x = lower * k as f64 / samples as f64;
        if unstable(x) {
            let (mut good, mut bad) = (prev, x);
            for _ in 0..200 {
                let mid = 0.5 * (good + bad);
                if mid == good || mid == bad {
                    break;
                }
                if unstable(mid) {
                    bad = mid;
                } else {
                    good = mid;
                }
            }
            return Some(good);
        }
        prev = x;
    }
    None
}
