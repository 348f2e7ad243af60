//! Autonomous ODE systems `u' = F(u)` with their time derivative
//! `Ḟ(u) = J_F(u) F(u)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// An autonomous system. Callbacks must be pure: implicit stages may be
/// solved concurrently.
pub trait OdeProblem: Sync {
    fn dim(&self) -> usize;

    /// Writes `F(u)` into `out`.
    fn rhs(&self, u: &[f64], out: &mut [f64]);

    /// Writes `Ḟ(u) = J_F(u) F(u)` into `out`.
    fn rhs_dot(&self, u: &[f64], out: &mut [f64]);

    fn jacobian(&self, _u: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Jacobian of `Ḟ`.
    fn jacobian_dot(&self, _u: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    fn exact(&self, _t: f64) -> Option<Vec<f64>> {
        None
    }
}

/// Van der Pol oscillator `(y1, y2)' = (y2, a(1 - y1²) y2 - y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerPol {
    pub a: f64,
}

impl Default for VanDerPol {
    fn default() -> Self {
        VanDerPol { a: 2.0 }
    }
}

impl VanDerPol {
    pub fn new(a: f64) -> Self {
        VanDerPol { a }
    }

    fn f2(&self, y1: f64, y2: f64) -> f64 {
        self.a * (1.0 - y1 * y1) * y2 - y1
    }
}

impl OdeProblem for VanDerPol {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[1];
        out[1] = self.f2(u[0], u[1]);
    }

    fn rhs_dot(&self, u: &[f64], out: &mut [f64]) {
        let (y1, y2, a) = (u[0], u[1], self.a);
        let f2 = self.f2(y1, y2);
        out[0] = f2;
        out[1] = -2.0 * a * y1 * y2 * y2 - y2 + a * (1.0 - y1 * y1) * f2;
    }

    fn jacobian(&self, u: &[f64]) -> Option<DMatrix<f64>> {
        let (y1, y2, a) = (u[0], u[1], self.a);
        Some(DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, -2.0 * a * y1 * y2 - 1.0, a * (1.0 - y1 * y1)],
        ))
    }

    fn jacobian_dot(&self, u: &[f64]) -> Option<DMatrix<f64>> {
        let (y1, y2, a) = (u[0], u[1], self.a);
        let f2 = self.f2(y1, y2);
        let w = 1.0 - y1 * y1;
        let d1 = -2.0 * a * y2 * y2 - 2.0 * a * y1 * f2 + a * w * (-2.0 * a * y1 * y2 - 1.0);
        let d2 = -4.0 * a * y1 * y2 - 1.0 + a * a * w * w;
        Some(DMatrix::from_row_slice(
            2,
            2,
            &[-2.0 * a * y1 * y2 - 1.0, a * w, d1, d2],
        ))
    }
}

/// Scalar test equation `u' = λ u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dahlquist {
    pub lambda: f64,
    exact_u0: Option<f64>,
}

impl Dahlquist {
    pub fn new(lambda: f64) -> Self {
        Dahlquist { lambda, exact_u0: None }
    }

    /// Exposes the closed-form solution `u0 e^{λt}`, starting at `t = 0`.
    pub fn with_exact(mut self, u0: f64) -> Self {
        self.exact_u0 = Some(u0);
        self
    }
}

impl OdeProblem for Dahlquist {
    fn dim(&self) -> usize {
        1
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        out[0] = self.lambda * u[0];
    }

    fn rhs_dot(&self, u: &[f64], out: &mut [f64]) {
        out[0] = self.lambda * self.lambda * u[0];
    }

    fn jacobian(&self, _u: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, self.lambda))
    }

    fn jacobian_dot(&self, _u: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, self.lambda * self.lambda))
    }

    fn exact(&self, t: f64) -> Option<Vec<f64>> {
        self.exact_u0.map(|u0| vec![u0 * (self.lambda * t).exp()])
    }
}

/// `u' = λ u` with complex `λ`, written as a real system on `(Re u, Im u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDahlquist {
    pub lambda: Complex64,
}

impl ComplexDahlquist {
    pub fn new(lambda: Complex64) -> Self {
        ComplexDahlquist { lambda }
    }

    fn mul(k: Complex64, u: &[f64], out: &mut [f64]) {
        let w = k * Complex64::new(u[0], u[1]);
        out[0] = w.re;
        out[1] = w.im;
    }

    fn matrix(k: Complex64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[k.re, -k.im, k.im, k.re])
    }
}

impl OdeProblem for ComplexDahlquist {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        Self::mul(self.lambda, u, out);
    }

    fn rhs_dot(&self, u: &[f64], out: &mut [f64]) {
        Self::mul(self.lambda * self.lambda, u, out);
    }

    fn jacobian(&self, _u: &[f64]) -> Option<DMatrix<f64>> {
        Some(Self::matrix(self.lambda))
    }

    fn jacobian_dot(&self, _u: &[f64]) -> Option<DMatrix<f64>> {
        Some(Self::matrix(self.lambda * self.lambda))
    }
}

/// Hides the Jacobians of the wrapped problem, forcing finite differences.
#[derive(Debug, Clone, Copy)]
pub struct WithoutJacobian<P>(pub P);

impl<P: OdeProblem> OdeProblem for WithoutJacobian<P> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        self.0.rhs(u, out)
    }

    fn rhs_dot(&self, u: &[f64], out: &mut [f64]) {
        self.0.rhs_dot(u, out)
    }

    fn exact(&self, t: f64) -> Option<Vec<f64>> {
        self.0.exact(t)
    }
}
