//! Convergence studies: error against a self-certified reference over a
//! range of step sizes, with least-squares slopes on a log-log scale.

use crate::postproc::{PostFilter, PostprocError};
use crate::problem::OdeProblem;
pub use crate::problem::{Dahlquist, VanDerPol};
use crate::stepper::{Stepper, StepperError};
use crate::tableau::{lookup, Kind, MethodTableau};
use rayon::prelude::*;
use std::io::Write;
use thiserror::Error;

/// Reference runs start at `span / 2^REF_START` steps and refine up to
/// `span / 2^REF_MAX`.
const REF_START: u32 = 9;
const REF_MAX: u32 = 14;
const REF_AGREE: f64 = 1e-12;
const REF_REJECT: f64 = 1e-10;
const REFERENCE_METHOD: &str = "eEIS+(4,8)_2";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error(transparent)]
    Stepper(#[from] StepperError),
    #[error(transparent)]
    Postproc(#[from] PostprocError),
    #[error("reference solution did not settle: successive resolutions differ by {disagreement:.3e}")]
    ReferenceUnconverged { disagreement: f64 },
    #[error("only {retained} error values fall inside the fitting window; need at least 3")]
    InsufficientPoints { retained: usize },
    #[error("invalid step list: {0}")]
    InvalidSteps(String),
}

pub fn vdp_problem(a: f64) -> VanDerPol {
    VanDerPol::new(a)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// High-accuracy solution at `tf`, from the eighth-order method at
/// successively halved steps until two resolutions agree to `1e-12`
/// (relative to `max(1, ‖u‖)`).
pub fn reference_solution<P: OdeProblem + ?Sized>(
    problem: &P,
    t0: f64,
    u0: &[f64],
    tf: f64,
) -> Result<Vec<f64>, HarnessError> {
    if tf == t0 {
        return Ok(u0.to_vec());
    }
    let t = lookup(REFERENCE_METHOD).expect("reference method is registered");
    let stepper = Stepper::new(problem, t);
    let span = tf - t0;
    let solve = |k: u32| -> Result<Vec<f64>, HarnessError> {
        let dt = span / 2f64.powi(k as i32);
        Ok(stepper.integrate(t0, u0, tf, dt, 1, false)?.last.first().to_vec())
    };
    let mut coarse = solve(REF_START)?;
    let mut disagreement = f64::INFINITY;
    for k in REF_START + 1..=REF_MAX {
        let fine = solve(k)?;
        disagreement = distance(&fine, &coarse) / norm2(&fine).max(1.0);
        if disagreement <= REF_AGREE {
            return Ok(fine);
        }
        coarse = fine;
    }
    if disagreement <= REF_REJECT {
        Ok(coarse)
    } else {
        Err(HarnessError::ReferenceUnconverged { disagreement })
    }
}

/// Which errors enter the slope fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    /// Errors below this are treated as roundoff.
    pub lo: f64,
    /// Errors above this are treated as pre-asymptotic.
    pub hi: f64,
    /// Number of smallest-`dt` retained points used.
    pub points: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow { lo: 1e-12, hi: 1e-1, points: 6 }
    }
}

/// Step counts `2^k · {1, 5/4, 3/2, 7/4}` for `k = 4..=10`, then 2048.
pub fn default_step_counts() -> Vec<usize> {
    let mut out: Vec<usize> = (4..=10)
        .flat_map(|k| [4usize, 5, 6, 7].map(|q| (q << k) / 4))
        .collect();
    out.push(2048);
    out
}

pub fn dt_list(span: f64, counts: &[usize]) -> Vec<f64> {
    counts.iter().map(|&n| span / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub dt: f64,
    /// `NaN` when the run failed.
    pub raw_error: f64,
    /// `None` for methods without post-processing; `NaN` on failure.
    pub post_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub method: String,
    pub points: Vec<ConvergencePoint>,
    pub slope_raw: f64,
    pub slope_post: Option<f64>,
}

/// Ordinary least-squares slope of `log10 err` against `log10 dt` over the
/// retained points.
pub fn fit_slope(pairs: &[(f64, f64)], window: FitWindow) -> Result<f64, HarnessError> {
    let mut kept: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(dt, e)| dt > 0.0 && e.is_finite() && e >= window.lo && e <= window.hi)
        .collect();
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    kept.truncate(window.points);
    if kept.len() < 3 {
        return Err(HarnessError::InsufficientPoints { retained: kept.len() });
    }
    let n = kept.len() as f64;
    let xs: Vec<f64> = kept.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.1.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[allow(clippy::too_many_arguments)]
fn run_point<P: OdeProblem + ?Sized>(
    t: &MethodTableau,
    problem: &P,
    t0: f64,
    u0: &[f64],
    tf: f64,
    dt: f64,
    m: usize,
    reference: &[f64],
) -> Result<(f64, Option<f64>), HarnessError> {
    let post = t.kind() == Kind::EisPlus;
    let run = Stepper::new(problem, t).integrate(t0, u0, tf, dt, m, post)?;
    let raw = distance(run.last.first(), reference);
    if !post {
        return Ok((raw, None));
    }
    let filter = PostFilter::for_window(t, &run.window)?;
    let filtered = filter.apply(&run.window)?;
    Ok((raw, Some(distance(&filtered.at_final, reference))))
}

/// Errors at `tf` for every step in `dts`. EIS+ methods are also
/// post-processed with a window of `m` steps. Runs that fail (blow-up,
/// Newton failure) are kept as `NaN` and left out of the fit.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study<P: OdeProblem + ?Sized>(
    t: &MethodTableau,
    problem: &P,
    t0: f64,
    u0: &[f64],
    tf: f64,
    dts: &[f64],
    m: usize,
    reference: &[f64],
    window: FitWindow,
) -> Result<ConvergenceResult, HarnessError> {
    if dts.is_empty() {
        return Err(HarnessError::InvalidSteps("no step sizes".into()));
    }
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    if dts.windows(2).any(|w| w[0] == w[1]) {
        return Err(HarnessError::InvalidSteps("repeated step size".into()));
    }
    let post = t.kind() == Kind::EisPlus;
    if post && m * t.stages() < t.truncation_order() + 3 {
        return Err(StepperError::InvalidWindow { m, s: t.stages(), needed: t.truncation_order() + 3 }.into());
    }

    let results: Vec<Result<ConvergencePoint, HarnessError>> = dts
        .par_iter()
        .map(|&dt| match run_point(t, problem, t0, u0, tf, dt, m, reference) {
            Ok((raw_error, post_error)) => Ok(ConvergencePoint { dt, raw_error, post_error }),
            Err(HarnessError::Stepper(
                StepperError::NonFinite { .. }
                | StepperError::NewtonDivergence { .. }
                | StepperError::SingularJacobian { .. },
            )) => Ok(ConvergencePoint { dt, raw_error: f64::NAN, post_error: post.then_some(f64::NAN) }),
            Err(e) => Err(e),
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let raw: Vec<(f64, f64)> = points.iter().map(|p| (p.dt, p.raw_error)).collect();
    let slope_raw = fit_slope(&raw, window)?;
    let slope_post = if post {
        let pp: Vec<(f64, f64)> = points.iter().map(|p| (p.dt, p.post_error.unwrap_or(f64::NAN))).collect();
        Some(fit_slope(&pp, window)?)
    } else {
        None
    };
    Ok(ConvergenceResult { method: t.name().to_string(), points, slope_raw, slope_post })
}

/// Slopes printed for the Van der Pol study, `(raw, post-processed)`. The
/// EIS method's entry is its delivered order.
pub fn published_slopes(name: &str) -> Option<(f64, Option<f64>)> {
    let t = lookup(name)?;
    match t.name() {
        "eEIS+(2,6)_2" => Some((4.7, Some(5.8))),
        "eEIS+(3,7)_2" => Some((5.8, Some(6.6))),
        "eEIS+(4,8)_2" => Some((7.0, Some(7.7))),
        "iEIS+(2,4)_2" => Some((3.0, Some(4.0))),
        "iEIS+(3,5)_2" => Some((3.9, Some(5.0))),
        "eEIS(2,3)_2" => Some((3.0, None)),
        _ => None,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Writes `method,dt,raw_error,post_error` rows.
pub fn write_points_csv<W: Write>(results: &[ConvergenceResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "dt", "raw_error", "post_error"])?;
    for r in results {
        for p in &r.points {
            w.write_record([
                r.method.clone(),
                format!("{:.16e}", p.dt),
                format!("{:.16e}", p.raw_error),
                fmt_opt(p.post_error),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `method,slope_raw,slope_post,paper_raw,paper_post` rows.
pub fn write_summary_csv<W: Write>(results: &[ConvergenceResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "slope_raw", "slope_post", "paper_raw", "paper_post"])?;
    for r in results {
        let published = published_slopes(&r.method);
        w.write_record([
            r.method.clone(),
            format!("{:.16e}", r.slope_raw),
            fmt_opt(r.slope_post),
            fmt_opt(published.map(|p| p.0)),
            fmt_opt(published.and_then(|p| p.1)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
