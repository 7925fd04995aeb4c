//! Simulation of SU(1,1)–SU(m) interferometer networks for distributed sensing.
//!
//! Two backends share the [`circuit::BosonicState`] interface: an exact
//! Gaussian moment propagator and a truncated Fock-space oracle used to
//! cross-check it.

pub mod circuit;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod interferometer;
pub mod metrology;
pub mod verify;

pub use circuit::{BosonicState, Element};
pub use error::{Error, Result};
pub use fock::{FockState, QfiEstimate};
pub use gaussian::{Bogoliubov, GaussianState, SqueezeParams};
pub use interferometer::{Backend, Distributor, DistributorKind, Pipeline, Scheme, SimState};
pub use metrology::{
    qcrb, saturation_report, Bound, ReportFlag, ReportOptions, SensitivityEstimate, SensitivityReport,
};
