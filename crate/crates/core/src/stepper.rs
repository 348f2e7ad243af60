//! Time stepping with a [`MethodTableau`].

use crate::problem::OdeProblem;
use crate::tableau::{Family, MethodTableau};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::VecDeque;
use thiserror::Error;

/// Startup substep counts beyond this are refused.
const MAX_STARTUP_SUBSTEPS: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepperError {
    #[error("non-finite value in stage {stage} of step {step}")]
    NonFinite { step: usize, stage: usize },
    #[error("Newton iteration for stage {stage} did not converge: residual {residual:.3e} after {iterations} iterations")]
    NewtonDivergence { stage: usize, residual: f64, iterations: usize },
    #[error("singular Newton matrix in stage {stage}")]
    SingularJacobian { stage: usize },
    #[error("startup of stage {stage} needs {substeps} substeps (limit {MAX_STARTUP_SUBSTEPS})")]
    StartupFailure { stage: usize, substeps: u64 },
    #[error("window of {m} steps with {s} stages has {} points; post-processing needs {needed}", .m * .s)]
    InvalidWindow { m: usize, s: usize, needed: usize },
    #[error("time span {span} is not an integer multiple of dt = {dt}")]
    InvalidStepCount { span: f64, dt: f64 },
    #[error("dt must be positive and finite, got {0}")]
    InvalidStepSize(f64),
    #[error("state has length {got}, problem dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Stage values of one step: block `j` approximates `u(t_base + c_j dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StageVector {
    pub n: usize,
    pub t_base: f64,
    pub dt: f64,
    pub values: Vec<Vec<f64>>,
}

impl StageVector {
    pub fn stages(&self) -> usize {
        self.values.len()
    }

    /// The `c_1 = 0` block, i.e. the solution at `t_base`.
    pub fn first(&self) -> &[f64] {
        &self.values[0]
    }

    fn check_finite(&self) -> Result<(), StepperError> {
        for (stage, block) in self.values.iter().enumerate() {
            if block.iter().any(|v| !v.is_finite()) {
                return Err(StepperError::NonFinite { step: self.n, stage });
            }
        }
        Ok(())
    }
}

/// The most recent stage vectors, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionWindow {
    capacity: usize,
    entries: VecDeque<StageVector>,
}

impl SolutionWindow {
    pub fn new(capacity: usize) -> Self {
        SolutionWindow { capacity, entries: VecDeque::with_capacity(capacity) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() == self.capacity
    }

    pub fn push(&mut self, v: StageVector) {
        if self.capacity == 0 {
            return;
        }
        if let Some(last) = self.entries.back() {
            debug_assert_eq!(last.n + 1, v.n, "window entries must be consecutive");
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(v);
    }

    pub fn iter(&self) -> impl Iterator<Item = &StageVector> {
        self.entries.iter()
    }

    pub fn last(&self) -> Option<&StageVector> {
        self.entries.back()
    }

    /// Grid times `t_base + c_j dt` of every stored block, oldest first.
    pub fn times(&self, c: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|v| c.iter().map(move |cj| v.t_base + cj * v.dt))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Residual tolerance, relative to `1 + ‖v‖∞ + ‖b‖∞`.
    pub tol: f64,
    pub max_iter: usize,
    /// Solve the stages of an implicit step on the rayon pool.
    pub parallel: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { tol: 1e-13, max_iter: 25, parallel: false }
    }
}

/// `F` and `Ḟ` at every block of a stage vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StageDerivatives {
    pub f: Vec<Vec<f64>>,
    pub fdot: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub last: StageVector,
    pub window: SolutionWindow,
    pub steps: usize,
}

pub struct Stepper<'a, P: OdeProblem + ?Sized> {
    problem: &'a P,
    tableau: &'a MethodTableau,
    newton: NewtonConfig,
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl<'a, P: OdeProblem + ?Sized> Stepper<'a, P> {
    pub fn new(problem: &'a P, tableau: &'a MethodTableau) -> Self {
        Stepper { problem, tableau, newton: NewtonConfig::default() }
    }

    pub fn with_newton(mut self, cfg: NewtonConfig) -> Self {
        self.newton = cfg;
        self
    }

    pub fn tableau(&self) -> &MethodTableau {
        self.tableau
    }

    fn f(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.problem.rhs(u, &mut out);
        out
    }

    fn fdot(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.problem.rhs_dot(u, &mut out);
        out
    }

    pub fn derivatives(&self, v: &StageVector) -> StageDerivatives {
        StageDerivatives {
            f: v.values.iter().map(|b| self.f(b)).collect(),
            fdot: v.values.iter().map(|b| self.fdot(b)).collect(),
        }
    }

    /// One fourth-order two-derivative step.
    fn startup_substep(&self, u: &[f64], h: f64) -> Vec<f64> {
        let f = self.f(u);
        let fd = self.fdot(u);
        let mut mid = u.to_vec();
        axpy(&mut mid, h / 2.0, &f);
        axpy(&mut mid, h * h / 8.0, &fd);
        let fd_mid = self.fdot(&mid);
        let mut out = u.to_vec();
        axpy(&mut out, h, &f);
        axpy(&mut out, h * h / 6.0, &fd);
        axpy(&mut out, h * h / 3.0, &fd_mid);
        out
    }

    /// Builds `V⁰`. Block 1 is `u0`; the others come from the exact solution
    /// when the problem has one, otherwise from a refined fourth-order
    /// two-derivative integration with local error below `dt^{P+2}`.
    pub fn initialize(&self, t0: f64, u0: &[f64], dt: f64) -> Result<StageVector, StepperError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StepperError::InvalidStepSize(dt));
        }
        if u0.len() != self.problem.dim() {
            return Err(StepperError::DimensionMismatch { expected: self.problem.dim(), got: u0.len() });
        }
        let c = self.tableau.abscissas();
        let target = dt.powi(self.tableau.order() as i32 + 2);
        let mut values = Vec::with_capacity(c.len());
        values.push(u0.to_vec());
        for (stage, &cj) in c.iter().enumerate().skip(1) {
            if let Some(exact) = self.problem.exact(t0 + cj * dt) {
                values.push(exact);
                continue;
            }
            if cj == 0.0 {
                values.push(u0.to_vec());
                continue;
            }
            let span = cj * dt;
            let mut n: u64 = 1;
            while (span / n as f64).powi(5) * n as f64 > target {
                n *= 2;
                if n > MAX_STARTUP_SUBSTEPS {
                    return Err(StepperError::StartupFailure { stage, substeps: n });
                }
            }
            let h = span / n as f64;
            let mut u = u0.to_vec();
            for _ in 0..n {
                u = self.startup_substep(&u, h);
            }
            values.push(u);
        }
        let v = StageVector { n: 0, t_base: t0, dt, values };
        v.check_finite()?;
        Ok(v)
    }

    /// `D V` for the rank-one `D`, written as `V_1 + Σ d_j (V_j - V_1)` so
    /// that a row sum off by roundoff does not scale the solution.
    fn d_times(&self, v: &StageVector) -> Vec<f64> {
        let d = self.tableau.d_row();
        let first = &v.values[0];
        let mut out = first.clone();
        for (j, block) in v.values.iter().enumerate().skip(1) {
            for (o, (x, x1)) in out.iter_mut().zip(block.iter().zip(first)) {
                *o += d[j] * (x - x1);
            }
        }
        out
    }

    /// Contribution of step `n` data to stage `i` of step `n+1`.
    fn explicit_part(&self, base: &[f64], derivs: &StageDerivatives, i: usize, dt: f64) -> Vec<f64> {
        let (a, ah) = (self.tableau.a(), self.tableau.a_hat());
        let mut b = base.to_vec();
        for j in 0..self.tableau.stages() {
            if a[(i, j)] != 0.0 {
                axpy(&mut b, dt * a[(i, j)], &derivs.f[j]);
            }
            if ah[(i, j)] != 0.0 {
                axpy(&mut b, dt * dt * ah[(i, j)], &derivs.fdot[j]);
            }
        }
        b
    }

    /// Advances one step. `derivs` may carry `F`, `Ḟ` of `v` from the
    /// previous call; the returned derivatives belong to the new vector.
    pub fn step_with(
        &self,
        v: &StageVector,
        derivs: Option<StageDerivatives>,
    ) -> Result<(StageVector, StageDerivatives), StepperError> {
        let derivs = derivs.unwrap_or_else(|| self.derivatives(v));
        match self.tableau.family() {
            Family::Explicit | Family::ExplicitSsp => self.step_explicit(v, &derivs),
            Family::Implicit => {
                let order: Vec<usize> = (0..self.tableau.stages()).collect();
                self.step_implicit(v, &derivs, &order)
            }
        }
    }

    pub fn step(&self, v: &StageVector) -> Result<StageVector, StepperError> {
        self.step_with(v, None).map(|(next, _)| next)
    }

    fn step_explicit(
        &self,
        v: &StageVector,
        derivs: &StageDerivatives,
    ) -> Result<(StageVector, StageDerivatives), StepperError> {
        let s = self.tableau.stages();
        let dt = v.dt;
        let (r, rh) = (self.tableau.r(), self.tableau.r_hat());
        let base = self.d_times(v);
        let mut values = Vec::with_capacity(s);
        let mut next = StageDerivatives { f: Vec::with_capacity(s), fdot: Vec::with_capacity(s) };
        for i in 0..s {
            let mut stage = self.explicit_part(&base, derivs, i, dt);
            for j in 0..i {
                if r[(i, j)] != 0.0 {
                    axpy(&mut stage, dt * r[(i, j)], &next.f[j]);
                }
                if rh[(i, j)] != 0.0 {
                    axpy(&mut stage, dt * dt * rh[(i, j)], &next.fdot[j]);
                }
            }
            if stage.iter().any(|x| !x.is_finite()) {
                return Err(StepperError::NonFinite { step: v.n + 1, stage: i });
            }
            next.f.push(self.f(&stage));
            next.fdot.push(self.fdot(&stage));
            values.push(stage);
        }
        let out = StageVector { n: v.n + 1, t_base: v.t_base + dt, dt, values };
        Ok((out, next))
    }

    /// Implicit step with diagonal `R`, `R̂`, solving stages in the given
    /// order. Stages share no data, so the order does not affect the result.
    pub fn step_implicit_ordered(&self, v: &StageVector, order: &[usize]) -> Result<StageVector, StepperError> {
        let derivs = self.derivatives(v);
        self.step_implicit(v, &derivs, order).map(|(next, _)| next)
    }

    fn step_implicit(
        &self,
        v: &StageVector,
        derivs: &StageDerivatives,
        order: &[usize],
    ) -> Result<(StageVector, StageDerivatives), StepperError> {
        let s = self.tableau.stages();
        let base = self.d_times(v);
        let solve = |&i: &usize| -> Result<(usize, Vec<f64>), StepperError> {
            let b = self.explicit_part(&base, derivs, i, v.dt);
            // Taylor predictor from the same block one step back.
            let mut guess = v.values[i].clone();
            axpy(&mut guess, v.dt, &derivs.f[i]);
            axpy(&mut guess, v.dt * v.dt / 2.0, &derivs.fdot[i]);
            let x = self.solve_stage(i, &b, guess, v.dt)?;
            Ok((i, x))
        };
        let solved: Vec<_> = if self.newton.parallel {
            order.par_iter().map(solve).collect::<Result<_, _>>()?
        } else {
            order.iter().map(solve).collect::<Result<_, _>>()?
        };
        let mut values = vec![Vec::new(); s];
        for (i, x) in solved {
            values[i] = x;
        }
        let out = StageVector { n: v.n + 1, t_base: v.t_base + v.dt, dt: v.dt, values };
        out.check_finite()?;
        let next = self.derivatives(&out);
        Ok((out, next))
    }

    /// Newton iteration for `x - dt r F(x) - dt² r̂ Ḟ(x) = b`.
    fn solve_stage(&self, stage: usize, b: &[f64], mut x: Vec<f64>, dt: f64) -> Result<Vec<f64>, StepperError> {
        let kr = dt * self.tableau.r()[(stage, stage)];
        let kh = dt * dt * self.tableau.r_hat()[(stage, stage)];
        if kr == 0.0 && kh == 0.0 {
            return Ok(b.to_vec());
        }
        let d = b.len();
        let residual = |x: &[f64]| -> Vec<f64> {
            let f = self.f(x);
            let fd = self.fdot(x);
            (0..d).map(|k| x[k] - kr * f[k] - kh * fd[k] - b[k]).collect()
        };
        let b_norm = max_abs(b);
        let mut g = residual(&x);
        let mut norm = max_abs(&g);
        for iter in 0..=self.newton.max_iter {
            if norm.is_nan() {
                break;
            }
            if norm <= self.newton.tol * (1.0 + max_abs(&x) + b_norm) {
                return Ok(x);
            }
            if iter == self.newton.max_iter {
                break;
            }
            let jac = self.newton_matrix(&x, kr, kh);
            let delta = jac
                .lu()
                .solve(&DVector::from_column_slice(&g))
                .ok_or(StepperError::SingularJacobian { stage })?;
            for (xk, dk) in x.iter_mut().zip(delta.iter()) {
                *xk -= dk;
            }
            g = residual(&x);
            norm = max_abs(&g);
            // An update at roundoff level cannot improve the residual further.
            if max_abs(delta.as_slice()) <= 4.0 * f64::EPSILON * (1.0 + max_abs(&x)) && norm.is_finite() {
                return Ok(x);
            }
        }
        Err(StepperError::NewtonDivergence { stage, residual: norm, iterations: self.newton.max_iter })
    }

    fn newton_matrix(&self, x: &[f64], kr: f64, kh: f64) -> DMatrix<f64> {
        let d = x.len();
        let jf = self.problem.jacobian(x).unwrap_or_else(|| self.fd_jacobian(x, false));
        let jd = self.problem.jacobian_dot(x).unwrap_or_else(|| self.fd_jacobian(x, true));
        DMatrix::identity(d, d) - jf * kr - jd * kh
    }

    /// Central differences with increment `√eps (1 + ‖x‖∞)`.
    fn fd_jacobian(&self, x: &[f64], dot: bool) -> DMatrix<f64> {
        let d = x.len();
        let eps = f64::EPSILON.sqrt() * (1.0 + max_abs(x));
        let eval = |u: &[f64]| if dot { self.fdot(u) } else { self.f(u) };
        let mut jac = DMatrix::zeros(d, d);
        let mut probe = x.to_vec();
        for k in 0..d {
            probe[k] = x[k] + eps;
            let plus = eval(&probe);
            probe[k] = x[k] - eps;
            let minus = eval(&probe);
            probe[k] = x[k];
            for i in 0..d {
                jac[(i, k)] = (plus[i] - minus[i]) / (2.0 * eps);
            }
        }
        jac
    }

    /// Integrates from `t0` to `tf` with a fixed step. The returned `last`
    /// has `t_base = tf`, and `window` keeps the final `window_m` stage
    /// vectors. With `for_postprocessing`, the window must have at least
    /// `p + 3` points.
    pub fn integrate(
        &self,
        t0: f64,
        u0: &[f64],
        tf: f64,
        dt: f64,
        window_m: usize,
        for_postprocessing: bool,
    ) -> Result<Integration, StepperError> {
        let s = self.tableau.stages();
        let needed = self.tableau.truncation_order() + 3;
        if for_postprocessing && window_m * s < needed {
            return Err(StepperError::InvalidWindow { m: window_m, s, needed });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StepperError::InvalidStepSize(dt));
        }
        let span = tf - t0;
        let steps = (span / dt).round();
        if steps < 0.0 || (steps * dt - span).abs() > 1e-9 * span.abs().max(1.0) {
            return Err(StepperError::InvalidStepCount { span, dt });
        }
        let steps = steps as usize;

        let mut window = SolutionWindow::new(window_m);
        let mut v = self.initialize(t0, u0, dt)?;
        let mut derivs = None;
        for k in 1..=steps {
            if k + window_m > steps + 1 {
                window.push(v.clone());
            }
            let (mut next, d) = self.step_with(&v, derivs)?;
            next.t_base = if k == steps { tf } else { t0 + k as f64 * dt };
            v = next;
            derivs = Some(d);
        }
        window.push(v.clone());
        Ok(Integration { last: v, window, steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Dahlquist, VanDerPol};
    use crate::tableau::lookup;
    use approx::assert_relative_eq;

    struct Zero;

    impl OdeProblem for Zero {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _u: &[f64], out: &mut [f64]) {
            out.fill(0.0);
        }
        fn rhs_dot(&self, _u: &[f64], out: &mut [f64]) {
            out.fill(0.0);
        }
    }

    fn stage_vector(values: Vec<Vec<f64>>, dt: f64) -> StageVector {
        StageVector { n: 0, t_base: 0.0, dt, values }
    }

    #[test]
    fn constant_state_is_fixed() {
        for t in crate::tableau::registry() {
            let stepper = Stepper::new(&Zero, t);
            let v = stage_vector(vec![vec![1.5, -2.0]; t.stages()], 0.1);
            let next = stepper.step(&v).unwrap();
            for block in &next.values {
                assert_eq!(block, &vec![1.5, -2.0], "{}", t.name());
            }
        }
    }

    #[test]
    fn zero_rhs_applies_d() {
        let t = lookup("iEIS+(3,5)").unwrap();
        let stepper = Stepper::new(&Zero, t);
        let v = stage_vector(vec![vec![1.0, 0.0], vec![2.0, 1.0], vec![-1.0, 4.0]], 0.1);
        let next = stepper.step(&v).unwrap();
        let d = t.d_row();
        for k in 0..2 {
            let expected: f64 = (0..3).map(|j| d[j] * v.values[j][k]).sum();
            for block in &next.values {
                assert_relative_eq!(block[k], expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn startup_matches_exponential() {
        let t = lookup("eSSP-EIS(2,3)").unwrap();
        let problem = Dahlquist::new(1.0);
        let dt = 1e-2;
        let v = Stepper::new(&problem, t).initialize(0.0, &[1.0], dt).unwrap();
        assert_eq!(v.values[0], vec![1.0]);
        let err = (v.values[1][0] - (2.0 / 3.0 * dt).exp()).abs();
        assert!(err <= dt.powi(t.order() as i32 + 2), "{err:e}");
    }

    #[test]
    fn startup_uses_exact_when_available() {
        let t = lookup("eEIS+(4,8)").unwrap();
        let problem = Dahlquist::new(-0.5).with_exact(1.0);
        let v = Stepper::new(&problem, t).initialize(0.0, &[1.0], 0.1).unwrap();
        for (cj, block) in t.abscissas().iter().zip(&v.values) {
            assert_eq!(block[0], (-0.5 * cj * 0.1f64).exp());
        }
    }

    #[test]
    fn van_der_pol_startup_keeps_initial_block() {
        let t = lookup("eEIS+(2,6)").unwrap();
        let v = Stepper::new(&VanDerPol::default(), t).initialize(0.0, &[2.0, 0.0], 0.05).unwrap();
        assert_eq!(v.values[0], vec![2.0, 0.0]);
    }

    #[test]
    fn stiff_implicit_step_stays_bounded() {
        let t = lookup("iEIS+(2,4)").unwrap();
        let problem = Dahlquist::new(-1e6);
        let stepper = Stepper::new(&problem, t);
        let mut v = stage_vector(vec![vec![1.0]; 2], 1.0);
        // The amplification matrix is non-normal, so allow transient growth.
        for _ in 0..200 {
            v = stepper.step(&v).unwrap();
            assert!(v.values.iter().all(|b| b[0].abs() <= 10.0));
        }
        assert!(v.values.iter().all(|b| b[0].abs() <= 1e-8));
    }

    #[test]
    fn implicit_stage_order_is_irrelevant() {
        let t = lookup("iEIS+(3,5)").unwrap();
        let problem = VanDerPol::default();
        let stepper = Stepper::new(&problem, t);
        let v = stepper.initialize(0.0, &[2.0, 0.0], 0.05).unwrap();
        let forward = stepper.step_implicit_ordered(&v, &[0, 1, 2]).unwrap();
        let backward = stepper.step_implicit_ordered(&v, &[2, 0, 1]).unwrap();
        assert_eq!(forward, backward);
        let parallel = Stepper::new(&problem, t)
            .with_newton(NewtonConfig { parallel: true, ..NewtonConfig::default() })
            .step(&v)
            .unwrap();
        assert_eq!(forward, parallel);
    }

    #[test]
    fn finite_difference_newton_agrees() {
        let t = lookup("iEIS+(2,4)").unwrap();
        let problem = VanDerPol::default();
        let hidden = crate::problem::WithoutJacobian(problem);
        let a = Stepper::new(&problem, t).integrate(0.0, &[2.0, 0.0], 1.0, 0.05, 1, false).unwrap();
        let b = Stepper::new(&hidden, t).integrate(0.0, &[2.0, 0.0], 1.0, 0.05, 1, false).unwrap();
        for k in 0..2 {
            assert_relative_eq!(a.last.first()[k], b.last.first()[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn newton_failure_is_reported() {
        let t = lookup("iEIS+(2,4)").unwrap();
        let problem = VanDerPol::default();
        let stepper = Stepper::new(&problem, t).with_newton(NewtonConfig { max_iter: 0, ..NewtonConfig::default() });
        let v = stepper.initialize(0.0, &[2.0, 0.0], 0.1).unwrap();
        assert!(matches!(stepper.step(&v), Err(StepperError::NewtonDivergence { .. })));
    }

    #[test]
    fn non_finite_values_are_caught() {
        let t = lookup("eEIS(2,3)").unwrap();
        let problem = Dahlquist::new(1e200);
        let stepper = Stepper::new(&problem, t);
        let v = stage_vector(vec![vec![1e200]; 2], 1.0);
        assert!(matches!(stepper.step(&v), Err(StepperError::NonFinite { step: 1, .. })));
    }

    #[test]
    fn integrate_window_and_final_time() {
        let t = lookup("eEIS+(3,7)").unwrap();
        let problem = VanDerPol::default();
        let run = Stepper::new(&problem, t).integrate(0.0, &[2.0, 0.0], 3.0, 0.1, 3, true).unwrap();
        assert_eq!(run.steps, 30);
        assert_eq!(run.last.t_base, 3.0);
        assert_eq!(run.window.len(), 3);
        assert_eq!(run.window.times(t.abscissas().as_slice()).len(), 9);
        let ns: Vec<usize> = run.window.iter().map(|v| v.n).collect();
        assert_eq!(ns, vec![28, 29, 30]);
        assert_eq!(run.window.last().unwrap(), &run.last);
    }

    #[test]
    fn integrate_zero_span() {
        let t = lookup("eEIS+(3,7)").unwrap();
        let run = Stepper::new(&VanDerPol::default(), t).integrate(1.0, &[2.0, 0.0], 1.0, 0.1, 3, false).unwrap();
        assert_eq!(run.steps, 0);
        assert_eq!(run.window.len(), 1);
        assert_eq!(run.last.first(), &[2.0, 0.0]);
    }

    #[test]
    fn integrate_rejects_bad_input() {
        let t = lookup("eEIS+(2,6)").unwrap();
        let p = VanDerPol::default();
        let st = Stepper::new(&p, t);
        assert_eq!(
            st.integrate(0.0, &[2.0, 0.0], 3.0, 0.1, 3, true).unwrap_err(),
            StepperError::InvalidWindow { m: 3, s: 2, needed: 7 }
        );
        assert!(st.integrate(0.0, &[2.0, 0.0], 3.0, 0.1, 4, true).is_ok());
        assert!(matches!(st.integrate(0.0, &[2.0, 0.0], 1.0, 0.3, 4, false), Err(StepperError::InvalidStepCount { .. })));
        assert!(matches!(st.integrate(0.0, &[2.0, 0.0], 1.0, 0.0, 4, false), Err(StepperError::InvalidStepSize(_))));
        assert!(matches!(st.initialize(0.0, &[2.0], 0.1), Err(StepperError::DimensionMismatch { .. })));
    }
}
