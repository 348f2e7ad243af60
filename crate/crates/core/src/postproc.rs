//! Post-processing filter for EIS+ solutions.
//!
//! The stacked window `Ṽ` of the last `m` stage vectors carries a leading
//! error `dt^{p+1} τ̃`, where `τ̃` repeats `τ_{p+1}` once per step. The
//! filter `Φ = T diag(0, 1, ..., 1) T⁻¹` with `T = [τ̃, t^{ms-2}, ..., t, 1]`
//! removes that component and keeps every polynomial of degree `ms - 2`.

use crate::stepper::SolutionWindow;
use crate::tableau::MethodTableau;
use log::warn;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Pivot ratio below which `T` counts as singular.
const PIVOT_RATIO_MIN: f64 = 1e-14;
const COND_WARN: f64 = 1e12;
const NORM_WARN: f64 = 1e4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PostprocError {
    #[error("window of {m} steps with {s} stages has {} points; the filter needs {needed}", .m * .s)]
    InsufficientWindow { m: usize, s: usize, needed: usize },
    #[error("filter matrix is singular: {0}")]
    SingularT(String),
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostFilter {
    m: usize,
    s: usize,
    times: Vec<f64>,
    tau_tilde: DVector<f64>,
    phi: DMatrix<f64>,
    cond_t: f64,
    norm_phi: f64,
}

/// Filtered window values.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    /// One row per grid point, one column per solution component.
    pub values: DMatrix<f64>,
    /// Filtered solution at the last step's `c_1 = 0` point.
    pub at_final: Vec<f64>,
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

impl PostFilter {
    /// Builds the filter for the grid `times` (stage times of `m`
    /// consecutive steps, oldest first).
    pub fn build(tableau: &MethodTableau, times: &[f64], m: usize) -> Result<Self, PostprocError> {
        let s = tableau.stages();
        let ms = m * s;
        let needed = tableau.truncation_order() + 3;
        if ms < needed {
            return Err(PostprocError::InsufficientWindow { m, s, needed });
        }
        if times.len() != ms {
            return Err(PostprocError::DimensionMismatch { expected: ms, got: times.len() });
        }
        if let Some(k) = (1..ms).find(|&k| times[k] <= times[k - 1]) {
            return Err(PostprocError::SingularT(format!(
                "grid is not strictly increasing at index {k} ({} after {})",
                times[k],
                times[k - 1]
            )));
        }

        // Map the grid to [-1, 1]; the polynomial space is unchanged.
        let (lo, hi) = (times[0], times[ms - 1]);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let scaled: Vec<f64> = times.iter().map(|t| (t - mid) / half).collect();

        let tau = tableau.tau(tableau.truncation_order() + 1).values;
        let tau_tilde = DVector::from_fn(ms, |k, _| tau[k % s]);
        let t = DMatrix::from_fn(ms, ms, |row, col| {
            if col == 0 {
                tau_tilde[row]
            } else {
                scaled[row].powi((ms - 1 - col) as i32)
            }
        });

        let lu = t.clone().lu();
        let diag = lu.u().diagonal();
        let (dmin, dmax) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x.abs()), hi.max(x.abs())));
        let ratio = if dmax > 0.0 { dmin / dmax } else { 0.0 };
        if ratio.is_nan() || ratio < PIVOT_RATIO_MIN {
            return Err(PostprocError::SingularT(format!("pivot ratio {ratio:.3e}")));
        }
        let t_inv = lu.try_inverse().ok_or_else(|| PostprocError::SingularT("inverse failed".into()))?;

        // T diag(0, 1, ..., 1) T⁻¹ = I - τ̃ (first row of T⁻¹).
        let phi = DMatrix::identity(ms, ms) - &tau_tilde * t_inv.row(0);
        let cond_t = inf_norm(&t) * inf_norm(&t_inv);
        let norm_phi = inf_norm(&phi);
        if cond_t > COND_WARN || norm_phi > NORM_WARN {
            warn!(
                "{}: post-processing filter is ill-conditioned (cond(T) = {cond_t:.3e}, |Phi| = {norm_phi:.3e})",
                tableau.name()
            );
        }
        Ok(PostFilter { m, s, times: times.to_vec(), tau_tilde, phi, cond_t, norm_phi })
    }

    /// Builds the filter on the grid of a full solution window.
    pub fn for_window(tableau: &MethodTableau, window: &SolutionWindow) -> Result<Self, PostprocError> {
        let times = window.times(tableau.abscissas().as_slice());
        Self::build(tableau, &times, window.len())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m * self.s
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn tau_tilde(&self) -> &DVector<f64> {
        &self.tau_tilde
    }

    pub fn cond_t(&self) -> f64 {
        self.cond_t
    }

    pub fn norm_phi(&self) -> f64 {
        self.norm_phi
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.cond_t > COND_WARN || self.norm_phi > NORM_WARN
    }

    /// Row of the last step's `c_1 = 0` point.
    pub fn final_index(&self) -> usize {
        (self.m - 1) * self.s
    }

    /// Filters stacked samples, one column per component.
    pub fn apply_columns(&self, data: &DMatrix<f64>) -> Result<DMatrix<f64>, PostprocError> {
        if data.nrows() != self.len() {
            return Err(PostprocError::DimensionMismatch { expected: self.len(), got: data.nrows() });
        }
        Ok(&self.phi * data)
    }

    /// Filters every component of `window` across its time grid.
    pub fn apply(&self, window: &SolutionWindow) -> Result<Filtered, PostprocError> {
        let blocks: Vec<&Vec<f64>> = window.iter().flat_map(|v| v.values.iter()).collect();
        if blocks.len() != self.len() {
            return Err(PostprocError::DimensionMismatch { expected: self.len(), got: blocks.len() });
        }
        let d = blocks[0].len();
        if let Some(bad) = blocks.iter().find(|b| b.len() != d) {
            return Err(PostprocError::DimensionMismatch { expected: d, got: bad.len() });
        }
        let data = DMatrix::from_fn(self.len(), d, |row, k| blocks[row][k]);
        let values = self.apply_columns(&data)?;
        let at_final = values.row(self.final_index()).iter().copied().collect();
        Ok(Filtered { values, at_final })
    }
}
