//! Two-derivative general linear methods with error inhibiting structure.
//!
//! The crate bundles the published EIS and EIS+ coefficient sets, checks
//! their order conditions, integrates ODE systems with them, and provides
//! the post-processing filter that lifts EIS+ solutions by one more order.
//! Stability scans, a total variation harness for the SSP members, and
//! convergence studies on Van der Pol round it out.

pub mod harness;
pub mod postproc;
pub mod problem;
pub mod sspharness;
pub mod stability;
pub mod stepper;
pub mod tableau;

pub use problem::{ComplexDahlquist, Dahlquist, OdeProblem, VanDerPol};
pub use stepper::{NewtonConfig, SolutionWindow, StageVector, Stepper, StepperError};
pub use tableau::{lookup, registry, Family, Kind, MethodTableau, TableauError, TableauSpec};
