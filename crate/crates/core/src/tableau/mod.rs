//! Method coefficients, the built-in registry, and order / error-inhibiting
//! condition checks.
//!
//! A method advances the stage vector `V` (one value per abscissa `c_j`) by
//!
//! ```text
//! V+ = D V + dt A F(V) + dt^2 Â F'(V) + dt R F(V+) + dt^2 R̂ F'(V+)
//! ```
//!
//! where `D` is rank one with unit row sums. The truncation error vectors
//! `τ_j` are the Taylor coefficients of the one-step residual of the exact
//! solution; a method has truncation order `p` when `τ_j = 0` for `j <= p`.

mod format;
mod registry;

pub use format::{load_tableau, save_tableau};
pub use registry::{lookup, registry};

use nalgebra::{DMatrix, DVector};
use std::fmt;
use thiserror::Error;

/// Tolerance for order and error-inhibiting residuals.
pub const VERIFY_TOL: f64 = 1e-9;
/// Tolerance for the structural invariants of `D` (row sums, identical rows).
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Largest truncation index probed by [`MethodTableau::order_report`].
const MAX_PROBED_ORDER: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableauError {
    #[error("abscissas are not unique: reduced system has rank {rank} < {needed}")]
    NonUniqueAbscissas { rank: usize, needed: usize },
    #[error("no abscissas satisfy tau_1 = 0 (residual {residual:.3e})")]
    InconsistentAbscissas { residual: f64 },
    #[error("truncation order {observed} is below the declared order {declared}")]
    OrderShortfall { declared: usize, observed: usize },
    #[error("error inhibiting condition(s) violated: {}", .failed.join(", "))]
    EisViolation { failed: Vec<String>, residuals: EisResiduals },
    #[error("parse error on line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("invariant violated ({invariant}): {detail}")]
    InvariantViolation { invariant: String, detail: String },
}

impl TableauError {
    fn invariant(invariant: &str, detail: impl Into<String>) -> Self {
        TableauError::InvariantViolation {
            invariant: invariant.to_string(),
            detail: detail.into(),
        }
    }
}

/// EIS methods gain one order over `p`; EIS+ methods gain two after post-processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Eis,
    EisPlus,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Eis => "EIS",
            Kind::EisPlus => "EIS+",
        }
    }

    /// Delivered order minus truncation order.
    pub fn order_gain(self) -> usize {
        match self {
            Kind::Eis => 1,
            Kind::EisPlus => 2,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Explicit,
    ExplicitSsp,
    Implicit,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Explicit => "explicit",
            Family::ExplicitSsp => "ssp",
            Family::Implicit => "implicit",
        }
    }

    pub fn is_explicit(self) -> bool {
        !matches!(self, Family::Implicit)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Raw coefficient data, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct TableauSpec {
    pub name: String,
    pub d: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub a_hat: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub r_hat: DMatrix<f64>,
    /// Truncation-error order.
    pub p: usize,
    /// Delivered order.
    pub order: usize,
    pub kind: Kind,
    pub family: Family,
    pub ssp_coefficient: Option<f64>,
    /// Leading truncation error vector as printed with the coefficients,
    /// i.e. `p! * τ_{p+1}` (the bracket of the τ formula without its
    /// `1/(j-1)!` prefactor).
    pub stored_tau: Option<DVector<f64>>,
}

/// A validated two-derivative general linear method.
///
/// Immutable after construction; every structural invariant has been
/// checked and the abscissas are available.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodTableau {
    spec: TableauSpec,
    c: DVector<f64>,
    d_row: Vec<f64>,
}

/// Truncation error vector `τ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauVector {
    pub j: usize,
    pub values: DVector<f64>,
}

impl TauVector {
    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub p_observed: usize,
    /// `(j, ‖τ_j‖∞)` for `j = 0..=p_observed + 2`.
    pub residuals: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisResiduals {
    /// `‖D τ_{p+1}‖∞`
    pub con1: f64,
    /// `‖D τ_{p+2}‖∞`
    pub con2: f64,
    /// `‖D (A + R) τ_{p+1}‖∞`
    pub con3: f64,
}

/// Solves `τ_1 = 0` for the abscissas with the normalization `c_1 = 0`.
///
/// `τ_1 = D(c - 1) + (A + R) 1 - c`, so `(I - D) c = (A + R) 1 - 1`. The
/// system loses exactly one rank to the consistency of `D`; the first
/// unknown is pinned to zero and the remaining `s x (s-1)` system is solved
/// in the least-squares sense.
pub fn recover_abscissas(
    d: &DMatrix<f64>,
    a: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<DVector<f64>, TableauError> {
    let s = d.nrows();
    let ones = DVector::from_element(s, 1.0);
    let lhs = DMatrix::identity(s, s) - d;
    let rhs = (a + r) * &ones - &ones;
    if s == 1 {
        let residual = rhs.amax();
        return if residual <= VERIFY_TOL {
            Ok(DVector::zeros(1))
        } else {
            Err(TableauError::InconsistentAbscissas { residual })
        };
    }

    let reduced = lhs.columns(1, s - 1).into_owned();
    let svd = reduced.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank_tol = smax.max(1.0) * 1e-12;
    let rank = svd.singular_values.iter().filter(|&&v| v > rank_tol).count();
    if rank < s - 1 {
        return Err(TableauError::NonUniqueAbscissas { rank, needed: s - 1 });
    }
    let tail = svd
        .solve(&rhs, rank_tol)
        .map_err(|_| TableauError::NonUniqueAbscissas { rank, needed: s - 1 })?;

    let mut c = DVector::zeros(s);
    c.rows_mut(1, s - 1).copy_from(&tail);
    let residual = (&lhs * &c - &rhs).amax();
    if residual > VERIFY_TOL {
        return Err(TableauError::InconsistentAbscissas { residual });
    }
    Ok(c)
}

fn componentwise_pow(v: &DVector<f64>, k: i32) -> DVector<f64> {
    // 0^0 = 1 via powi.
    v.map(|x| x.powi(k))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl MethodTableau {
    /// Validates `spec`, recovering the abscissas from `τ_1 = 0`.
    pub fn from_spec(spec: TableauSpec) -> Result<Self, TableauError> {
        check_shapes(&spec)?;
        check_d(&spec.d)?;
        let c = recover_abscissas(&spec.d, &spec.a, &spec.r)?;
        Self::assemble(spec, c)
    }

    /// Validates `spec` but takes the abscissas as given instead of solving
    /// for them. Useful for examining coefficient sets that do not satisfy
    /// `τ_1 = 0`.
    pub fn with_abscissas(spec: TableauSpec, c: DVector<f64>) -> Result<Self, TableauError> {
        check_shapes(&spec)?;
        check_d(&spec.d)?;
        if c.len() != spec.d.nrows() {
            return Err(TableauError::invariant(
                "shape",
                format!("{} abscissas for {} stages", c.len(), spec.d.nrows()),
            ));
        }
        Self::assemble(spec, c)
    }

    fn assemble(spec: TableauSpec, c: DVector<f64>) -> Result<Self, TableauError> {
        let s = c.len();
        if c[0].abs() > VERIFY_TOL {
            return Err(TableauError::invariant("abscissas", format!("c_1 = {} != 0", c[0])));
        }
        for j in 1..s {
            if c[j] < c[j - 1] - VERIFY_TOL {
                return Err(TableauError::invariant(
                    "abscissas",
                    format!("c is decreasing at stage {}: {} < {}", j + 1, c[j], c[j - 1]),
                ));
            }
        }
        match spec.family {
            Family::Explicit | Family::ExplicitSsp => {
                for (label, m) in [("R", &spec.r), ("Rhat", &spec.r_hat)] {
                    if let Some((i, j)) = first_nonzero(m, |i, j| j >= i) {
                        return Err(TableauError::invariant(
                            "explicit",
                            format!("{label}[{},{}] = {} is not strictly lower", i + 1, j + 1, m[(i, j)]),
                        ));
                    }
                }
            }
            Family::Implicit => {
                for (label, m) in [("R", &spec.r), ("Rhat", &spec.r_hat)] {
                    if let Some((i, j)) = first_nonzero(m, |i, j| i != j) {
                        return Err(TableauError::invariant(
                            "diagonal implicit",
                            format!("{label}[{},{}] = {} is off the diagonal", i + 1, j + 1, m[(i, j)]),
                        ));
                    }
                }
            }
        }
        if let Some(ssp) = spec.ssp_coefficient {
            if !(ssp >= 0.0 && ssp.is_finite()) {
                return Err(TableauError::invariant("ssp coefficient", format!("{ssp} is not a nonnegative number")));
            }
        }
        if spec.order != spec.p + spec.kind.order_gain() {
            return Err(TableauError::invariant(
                "order",
                format!("{} method with p = {} must deliver order {}, not {}", spec.kind, spec.p, spec.p + spec.kind.order_gain(), spec.order),
            ));
        }

        let d_row = spec.d.row(0).iter().copied().collect();
        let tableau = MethodTableau { spec, c, d_row };
        if let Some(stored) = &tableau.spec.stored_tau {
            if stored.len() != s {
                return Err(TableauError::invariant("stored tau", format!("length {} for {s} stages", stored.len())));
            }
            let diff = tableau.stored_tau_mismatch().unwrap_or(0.0);
            if diff > VERIFY_TOL {
                return Err(TableauError::invariant(
                    "stored tau",
                    format!("printed tau_{} differs from the computed one by {diff:.3e}", tableau.spec.p + 1),
                ));
            }
        }
        Ok(tableau)
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.spec.d
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.spec.a
    }

    pub fn a_hat(&self) -> &DMatrix<f64> {
        &self.spec.a_hat
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.spec.r
    }

    pub fn r_hat(&self) -> &DMatrix<f64> {
        &self.spec.r_hat
    }

    pub fn abscissas(&self) -> &DVector<f64> {
        &self.c
    }

    /// The common row of the rank-one matrix `D`.
    pub fn d_row(&self) -> &[f64] {
        &self.d_row
    }

    /// Truncation-error order `p`.
    pub fn truncation_order(&self) -> usize {
        self.spec.p
    }

    /// Delivered order `P`.
    pub fn order(&self) -> usize {
        self.spec.order
    }

    pub fn kind(&self) -> Kind {
        self.spec.kind
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn ssp_coefficient(&self) -> Option<f64> {
        self.spec.ssp_coefficient
    }

    pub fn stored_tau(&self) -> Option<&DVector<f64>> {
        self.spec.stored_tau.as_ref()
    }

    pub fn spec(&self) -> &TableauSpec {
        &self.spec
    }

    pub fn into_spec(self) -> TableauSpec {
        self.spec
    }

    /// Smallest window length usable by the post-processor, but at least
    /// three steps.
    pub fn default_window(&self) -> usize {
        let need = self.spec.p + 3;
        need.div_ceil(self.stages()).max(3)
    }

    /// Truncation error vector `τ_j`.
    pub fn tau(&self, j: usize) -> TauVector {
        let s = self.stages();
        let ones = DVector::from_element(s, 1.0);
        if j == 0 {
            return TauVector { j, values: &self.spec.d * &ones - ones };
        }
        let jf = j as f64;
        let shifted = &self.c - &ones;
        let ji = j as i32;
        let mut bracket = &self.spec.d * componentwise_pow(&shifted, ji) / jf
            + &self.spec.a * componentwise_pow(&shifted, ji - 1)
            + &self.spec.r * componentwise_pow(&self.c, ji - 1)
            - componentwise_pow(&self.c, ji) / jf;
        if j >= 2 {
            bracket += (&self.spec.a_hat * componentwise_pow(&shifted, ji - 2)
                + &self.spec.r_hat * componentwise_pow(&self.c, ji - 2))
                * (jf - 1.0);
        }
        TauVector { j, values: bracket / factorial(j - 1) }
    }

    /// `τ_j` scaled to the normalization used by printed coefficient tables.
    pub fn tau_printed(&self, j: usize) -> DVector<f64> {
        self.tau(j).values * factorial(j.saturating_sub(1))
    }

    /// Max-norm distance between the stored and computed `τ_{p+1}`.
    pub fn stored_tau_mismatch(&self) -> Option<f64> {
        let stored = self.spec.stored_tau.as_ref()?;
        let computed = self.tau_printed(self.spec.p + 1);
        Some((stored - computed).amax())
    }

    pub fn order_report(&self) -> OrderReport {
        let p_observed = (1..=MAX_PROBED_ORDER)
            .find(|&j| self.tau(j).max_abs() > VERIFY_TOL)
            .map_or(MAX_PROBED_ORDER, |j| j - 1);
        let residuals = (0..=p_observed + 2).map(|j| (j, self.tau(j).max_abs())).collect();
        OrderReport { p_observed, residuals }
    }

    /// Checks `τ_j = 0` for every `j` up to the declared order.
    pub fn verify_order(&self) -> Result<OrderReport, TableauError> {
        let report = self.order_report();
        let tau0_ok = self.tau(0).max_abs() <= VERIFY_TOL;
        if !tau0_ok || report.p_observed < self.spec.p {
            let observed = if tau0_ok { report.p_observed } else { 0 };
            return Err(TableauError::OrderShortfall { declared: self.spec.p, observed });
        }
        Ok(report)
    }

    pub fn eis_residuals(&self) -> EisResiduals {
        let p = self.spec.p;
        let d = &self.spec.d;
        let lead = self.tau(p + 1).values;
        let next = self.tau(p + 2).values;
        EisResiduals {
            con1: (d * &lead).amax(),
            con2: (d * next).amax(),
            con3: (d * (&self.spec.a + &self.spec.r) * lead).amax(),
        }
    }

    /// Checks the error inhibiting conditions required by the method kind.
    pub fn verify_eis(&self) -> Result<EisResiduals, TableauError> {
        let res = self.eis_residuals();
        let mut failed = Vec::new();
        if res.con1 > VERIFY_TOL {
            failed.push(format!("D tau_(p+1) = 0 (residual {:.3e})", res.con1));
        }
        if self.spec.kind == Kind::EisPlus {
            if res.con2 > VERIFY_TOL {
                failed.push(format!("D tau_(p+2) = 0 (residual {:.3e})", res.con2));
            }
            if res.con3 > VERIFY_TOL {
                failed.push(format!("D (A+R) tau_(p+1) = 0 (residual {:.3e})", res.con3));
            }
        }
        if failed.is_empty() {
            Ok(res)
        } else {
            Err(TableauError::EisViolation { failed, residuals: res })
        }
    }

    /// Eigenvalues of `D` as `(re, im)` pairs; `{1, 0, ..., 0}` for a
    /// zero-stable method.
    pub fn d_eigenvalues(&self) -> Vec<(f64, f64)> {
        self.spec
            .d
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect()
    }
}

fn first_nonzero(m: &DMatrix<f64>, pick: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if pick(i, j) && m[(i, j)] != 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

fn check_shapes(spec: &TableauSpec) -> Result<(), TableauError> {
    let s = spec.d.nrows();
    if s == 0 {
        return Err(TableauError::invariant("shape", "no stages"));
    }
    for (label, m) in [("D", &spec.d), ("A", &spec.a), ("Ahat", &spec.a_hat), ("R", &spec.r), ("Rhat", &spec.r_hat)] {
        if m.nrows() != s || m.ncols() != s {
            return Err(TableauError::invariant("shape", format!("{label} is {}x{}, expected {s}x{s}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(TableauError::invariant("shape", format!("{label} has non-finite entries")));
        }
    }
    Ok(())
}

fn check_d(d: &DMatrix<f64>) -> Result<(), TableauError> {
    for (i, row) in d.row_iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > STRUCTURE_TOL {
            return Err(TableauError::invariant("consistency", format!("row {} of D sums to {sum}", i + 1)));
        }
    }
    let first = d.row(0);
    for (i, row) in d.row_iter().enumerate().skip(1) {
        let diff = (row - first).amax();
        if diff > STRUCTURE_TOL {
            return Err(TableauError::invariant("rank one", format!("row {} of D differs from row 1 by {diff:.3e}", i + 1)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ssp23() -> &'static MethodTableau {
        lookup("eSSP-EIS(2,3)_2").unwrap()
    }

    /// Two copies of forward Euler stacked into a two-stage method.
    fn doubled_euler() -> TableauSpec {
        TableauSpec {
            name: "doubled-euler".into(),
            d: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]),
            a: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]),
            a_hat: DMatrix::zeros(2, 2),
            r: DMatrix::zeros(2, 2),
            r_hat: DMatrix::zeros(2, 2),
            p: 1,
            order: 2,
            kind: Kind::Eis,
            family: Family::Explicit,
            ssp_coefficient: None,
            stored_tau: None,
        }
    }

    #[test]
    fn abscissas_of_rational_ssp_method() {
        // (I - D) c = (A + R) 1 - 1 with c_1 = 0 reduces to (7/16) c_2 = 7/24.
        let c = ssp23().abscissas();
        assert_eq!(c[0], 0.0);
        assert_abs_diff_eq!(c[1], 2.0 / 3.0, epsilon = 1e-15);
        assert!(ssp23().tau(1).max_abs() < 1e-15);
    }

    #[test]
    fn abscissas_without_solution() {
        let d = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let z = DMatrix::zeros(2, 2);
        let err = recover_abscissas(&d, &z, &z).unwrap_err();
        assert!(matches!(err, TableauError::InconsistentAbscissas { .. }), "{err:?}");
    }

    #[test]
    fn abscissas_non_unique_for_identity() {
        let d = DMatrix::identity(3, 3);
        let z = DMatrix::zeros(3, 3);
        let err = recover_abscissas(&d, &z, &z).unwrap_err();
        assert_eq!(err, TableauError::NonUniqueAbscissas { rank: 0, needed: 2 });
    }

    #[test]
    fn abscissas_follow_a_shift_of_the_row_sums() {
        // The row of D is a left null vector of I - D, so a row-sum shift is
        // solvable only when it is orthogonal to (7, 9). Row 2 then reads
        // (7/16) c_2 = rhs_2.
        let mut shifted = ssp23().spec().clone();
        let delta = 0.07;
        shifted.a[(0, 0)] += -9.0 / 7.0 * delta;
        shifted.a[(1, 0)] += delta;
        let c = recover_abscissas(&shifted.d, &shifted.a, &shifted.r).unwrap();
        assert_abs_diff_eq!(c[1], 2.0 / 3.0 + 16.0 / 7.0 * delta, epsilon = 1e-14);
    }

    #[test]
    fn tau_zero_vanishes_for_consistent_methods() {
        for t in registry() {
            assert!(t.tau(0).max_abs() <= 1e-12, "{}", t.name());
        }
    }

    #[test]
    fn tau_of_doubled_euler_by_hand() {
        let t = MethodTableau::from_spec(doubled_euler()).unwrap();
        assert_eq!(t.abscissas().as_slice(), &[0.0, 0.0]);
        // j = 2: D(c-1)^2/2 + A(c-1) - c^2/2 = 1/2 - 1 = -1/2.
        assert_abs_diff_eq!(t.tau(2).values, DVector::from_element(2, -0.5), epsilon = 1e-15);
        // j = 3: (1/2)[D(c-1)^3/3 + A(c-1)^2] = (1/2)(-1/3 + 1) = 1/3.
        assert_abs_diff_eq!(t.tau(3).values, DVector::from_element(2, 1.0 / 3.0), epsilon = 1e-15);
    }

    #[test]
    fn eis_violation_when_leading_error_is_along_ones() {
        let t = MethodTableau::from_spec(doubled_euler()).unwrap();
        assert_eq!(t.verify_order().unwrap().p_observed, 1);
        match t.verify_eis() {
            Err(TableauError::EisViolation { residuals, failed }) => {
                assert_abs_diff_eq!(residuals.con1, 0.5, epsilon = 1e-15);
                assert_eq!(failed.len(), 1);
            }
            other => panic!("expected EisViolation, got {other:?}"),
        }
    }

    #[test]
    fn perturbed_a_falls_short_of_its_order() {
        let base = ssp23();
        let mut spec = base.spec().clone();
        spec.a[(1, 1)] += 1e-3;
        let t = MethodTableau::with_abscissas(spec, base.abscissas().clone()).unwrap();
        let err = t.verify_order().unwrap_err();
        assert_eq!(err, TableauError::OrderShortfall { declared: 2, observed: 0 });
        assert!(t.tau(1).max_abs() > 5e-4);
    }

    #[test]
    fn tau_is_linear_in_each_coefficient_block() {
        let base = lookup("eEIS+(3,7)_2").unwrap();
        let c = base.abscissas().clone();
        let with = |scale: f64| {
            let mut spec = base.spec().clone();
            spec.a *= scale;
            spec.stored_tau = None;
            MethodTableau::with_abscissas(spec, c.clone()).unwrap()
        };
        for j in 1..8 {
            let t0 = with(0.0).tau(j).values;
            let t1 = with(1.0).tau(j).values;
            let t3 = with(3.0).tau(j).values;
            let contrib = &t1 - &t0;
            assert_abs_diff_eq!(&t3 - &t0, contrib * 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn explicit_family_rejects_upper_entries() {
        let mut spec = ssp23().spec().clone();
        spec.r[(0, 1)] = 0.1;
        let err = MethodTableau::with_abscissas(spec, ssp23().abscissas().clone()).unwrap_err();
        assert!(matches!(err, TableauError::InvariantViolation { ref invariant, .. } if invariant == "explicit"), "{err}");
    }

    #[test]
    fn implicit_family_requires_diagonal_r() {
        let mut spec = lookup("iEIS+(2,4)_2").unwrap().spec().clone();
        spec.r_hat[(1, 0)] = 0.25;
        let err = MethodTableau::from_spec(spec).unwrap_err();
        assert!(matches!(err, TableauError::InvariantViolation { ref invariant, .. } if invariant == "diagonal implicit"), "{err}");
    }

    #[test]
    fn rank_one_and_consistency_are_checked() {
        let mut spec = ssp23().spec().clone();
        spec.d[(1, 0)] = 0.5;
        spec.d[(1, 1)] = 0.5;
        let err = MethodTableau::from_spec(spec).unwrap_err();
        assert!(matches!(err, TableauError::InvariantViolation { ref invariant, .. } if invariant == "rank one"), "{err}");

        let mut spec = ssp23().spec().clone();
        spec.d *= 0.9;
        let err = MethodTableau::from_spec(spec).unwrap_err();
        assert!(matches!(err, TableauError::InvariantViolation { ref invariant, .. } if invariant == "consistency"), "{err}");
    }

    #[test]
    fn default_windows() {
        let m = |n: &str| lookup(n).unwrap().default_window();
        assert_eq!(m("eEIS+(2,6)_2"), 4);
        assert_eq!(m("eEIS+(2,5)_2"), 3);
        assert_eq!(m("eEIS+(3,7)_2"), 3);
        assert_eq!(m("eEIS+(4,8)_2"), 3);
        assert_eq!(m("iEIS+(3,5)_2"), 3);
    }
}
