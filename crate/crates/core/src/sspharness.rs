//! Total variation experiments on linear advection `u_t + u_x = 0` over
//! the periodic interval `[-1, 1]`, discretized with first-order upwind
//! differences for both `u_x` and `u_xx = u_tt`.

use crate::postproc::{PostFilter, PostprocError};
use crate::problem::OdeProblem;
use crate::stepper::{SolutionWindow, Stepper, StepperError};
use crate::tableau::{Family, Kind, MethodTableau};
use log::warn;
use rayon::prelude::*;
use std::io::Write;
use thiserror::Error;

/// A run "rises" once its TV grows by more than this.
pub const TV_RISE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SspError {
    #[error(transparent)]
    Stepper(#[from] StepperError),
    #[error(transparent)]
    Postproc(#[from] PostprocError),
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvectionSetup {
    pub n: usize,
    /// CFL number `dt / dx`.
    pub lambda: f64,
    pub steps: usize,
}

impl Default for AdvectionSetup {
    fn default() -> Self {
        AdvectionSetup { n: 200, lambda: 1.0, steps: 10 }
    }
}

impl AdvectionSetup {
    pub fn with_lambda(self, lambda: f64) -> Self {
        AdvectionSetup { lambda, ..self }
    }

    pub fn dx(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn dt(&self) -> f64 {
        self.lambda * self.dx()
    }

    fn validate(&self) -> Result<(), SspError> {
        if self.n < 4 {
            return Err(SspError::InvalidSetup(format!("need at least 4 grid points, got {}", self.n)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(SspError::InvalidSetup(format!("CFL number must be positive, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Initial profile: 0 on `[0, 1/2]`, 1 elsewhere.
pub fn initial_profile(x: f64) -> f64 {
    if (0.0..=0.5).contains(&x) {
        0.0
    } else {
        1.0
    }
}

pub fn grid(n: usize) -> Vec<f64> {
    let dx = 2.0 / n as f64;
    (0..n).map(|j| -1.0 + j as f64 * dx).collect()
}

pub fn step_initial(n: usize) -> Vec<f64> {
    grid(n).into_iter().map(initial_profile).collect()
}

/// Periodic total variation, including the wrap-around difference.
pub fn total_variation(u: &[f64]) -> f64 {
    let n = u.len();
    (0..n).map(|j| (u[(j + 1) % n] - u[j]).abs()).sum()
}

pub fn upwind_f(u: &[f64], dx: f64, out: &mut [f64]) {
    let n = u.len();
    for j in 0..n {
        out[j] = -(u[j] - u[(j + n - 1) % n]) / dx;
    }
}

pub fn upwind_fdot(u: &[f64], dx: f64, out: &mut [f64]) {
    let n = u.len();
    for j in 0..n {
        out[j] = (u[j] - 2.0 * u[(j + n - 1) % n] + u[(j + n - 2) % n]) / (dx * dx);
    }
}

/// The semi-discrete advection system. Its `exact` is the translated
/// initial profile, used to start the extra stages.
#[derive(Debug, Clone)]
pub struct Advection {
    x: Vec<f64>,
    dx: f64,
    profile: fn(f64) -> f64,
}

impl Advection {
    pub fn new(n: usize) -> Self {
        Self::with_profile(n, initial_profile)
    }

    pub fn with_profile(n: usize, profile: fn(f64) -> f64) -> Self {
        Advection { x: grid(n), dx: 2.0 / n as f64, profile }
    }

    pub fn initial(&self) -> Vec<f64> {
        self.x.iter().map(|&x| (self.profile)(x)).collect()
    }
}

fn wrap(x: f64) -> f64 {
    (x + 1.0).rem_euclid(2.0) - 1.0
}

impl OdeProblem for Advection {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        upwind_f(u, self.dx, out)
    }

    fn rhs_dot(&self, u: &[f64], out: &mut [f64]) {
        upwind_fdot(u, self.dx, out)
    }

    fn exact(&self, t: f64) -> Option<Vec<f64>> {
        Some(self.x.iter().map(|&x| (self.profile)(wrap(x - t))).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TvRun {
    /// `TV(uⁿ)` for `n = 0..=steps`.
    pub tv: Vec<f64>,
    pub window: SolutionWindow,
}

impl TvRun {
    /// Largest step-to-step increase, floored at zero.
    pub fn max_rise(&self) -> f64 {
        self.tv.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// `TV(u^N) - TV(u⁰)`.
    pub fn net_rise(&self) -> f64 {
        self.tv[self.tv.len() - 1] - self.tv[0]
    }
}

fn run_with(t: &MethodTableau, setup: &AdvectionSetup, problem: &Advection, window_m: usize) -> Result<TvRun, SspError> {
    setup.validate()?;
    let stepper = Stepper::new(problem, t);
    let mut v = stepper.initialize(0.0, &problem.initial(), setup.dt())?;
    let mut tv = vec![total_variation(v.first())];
    let mut window = SolutionWindow::new(window_m);
    let mut derivs = None;
    for k in 0..setup.steps {
        if k + window_m > setup.steps {
            window.push(v.clone());
        }
        let (next, d) = stepper.step_with(&v, derivs)?;
        tv.push(total_variation(next.first()));
        v = next;
        derivs = Some(d);
    }
    window.push(v);
    Ok(TvRun { tv, window })
}

/// Runs `setup.steps` steps from the square wave, keeping the last
/// `window_m` stage vectors.
pub fn run(t: &MethodTableau, setup: &AdvectionSetup, window_m: usize) -> Result<TvRun, SspError> {
    if t.family() != Family::ExplicitSsp {
        warn!("{} is not an SSP method; TV behaviour is not guaranteed", t.name());
    }
    run_with(t, setup, &Advection::new(setup.n), window_m)
}

pub fn max_tv_rise(t: &MethodTableau, setup: &AdvectionSetup) -> Result<f64, SspError> {
    run(t, setup, 1).map(|r| r.max_rise())
}

/// `TV(uⁿ) - TV(ûⁿ)` at the final step, where `û` filters each spatial
/// point across the time window of the last `m` steps.
pub fn tv_postproc_gap(t: &MethodTableau, setup: &AdvectionSetup, m: usize) -> Result<f64, SspError> {
    tv_postproc_gap_for(t, setup, m, &Advection::new(setup.n))
}

fn tv_postproc_gap_for(t: &MethodTableau, setup: &AdvectionSetup, m: usize, problem: &Advection) -> Result<f64, SspError> {
    if setup.steps + 1 < m {
        return Err(SspError::InvalidSetup(format!("{} steps cannot fill a window of {m}", setup.steps)));
    }
    let run = run_with(t, setup, problem, m)?;
    let filter = PostFilter::for_window(t, &run.window)?;
    let filtered = filter.apply(&run.window)?;
    let raw = run.window.last().expect("window is non-empty").first();
    Ok(total_variation(raw) - total_variation(&filtered.at_final))
}

/// The CFL number above which the run's TV rises by more than
/// [`TV_RISE_TOL`], found by a scan over `(0, upper]` refined by bisection.
/// Runs that blow up count as rising. `None` if no scanned value rises.
pub fn tv_threshold(t: &MethodTableau, setup: &AdvectionSetup, upper: f64) -> Option<f64> {
    let rises = |lambda: f64| match max_tv_rise(t, &setup.with_lambda(lambda)) {
        Ok(r) => r > TV_RISE_TOL,
        Err(_) => true,
    };
    let samples = 500;
    let scan: Vec<f64> = (1..=samples).map(|k| upper * k as f64 / samples as f64).collect();
    let flags: Vec<bool> = scan.par_iter().map(|&l| rises(l)).collect();
    let first = flags.iter().position(|&f| f)?;
    let (mut good, mut bad) = (if first == 0 { 0.0 } else { scan[first - 1] }, scan[first]);
    while bad - good > 1e-10 * bad.max(1.0) {
        let mid = 0.5 * (good + bad);
        if rises(mid) {
            bad = mid;
        } else {
            good = mid;
        }
    }
    Some(bad)
}

/// `n` equally spaced CFL numbers in `(0, top]`.
pub fn lambda_grid(top: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| top * k as f64 / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SspRow {
    pub lambda: f64,
    /// `inf` when the run broke down.
    pub max_tv_rise: f64,
    /// Present for EIS+ methods.
    pub tv_postproc_gap: Option<f64>,
}

/// One row per CFL number. `m` is the post-processing window.
pub fn sweep(t: &MethodTableau, setup: &AdvectionSetup, lambdas: &[f64], m: usize) -> Result<Vec<SspRow>, SspError> {
    let problem = Advection::new(setup.n);
    lambdas
        .par_iter()
        .map(|&lambda| {
            let s = setup.with_lambda(lambda);
            let rise = match run_with(t, &s, &problem, 1) {
                Ok(r) => r.max_rise(),
                Err(SspError::Stepper(StepperError::NonFinite { .. })) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            let gap = if t.kind() == Kind::EisPlus {
                match tv_postproc_gap_for(t, &s, m, &problem) {
                    Ok(g) => Some(g),
                    Err(SspError::Stepper(StepperError::NonFinite { .. })) => Some(f64::NAN),
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            Ok(SspRow { lambda, max_tv_rise: rise, tv_postproc_gap: gap })
        })
        .collect()
}

/// Writes `lambda,max_tv_rise,tv_postproc_gap`; the gap is empty when absent.
pub fn write_csv<W: Write>(rows: &[SspRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "max_tv_rise", "tv_postproc_gap"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.lambda),
            format!("{:.16e}", r.max_tv_rise),
            r.tv_postproc_gap.map(|g| format!("{g:.16e}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One forward Euler step with CFL number `lambda`.
pub fn forward_euler_step(u: &[f64], lambda: f64) -> Vec<f64> {
    let n = u.len();
    (0..n).map(|j| u[j] - lambda * (u[j] - u[(j + n - 1) % n])).collect()
}
