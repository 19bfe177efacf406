//! Self-adjoint absolute-phase, angle and time-like operators as explicit
//! truncated matrices, with numerical checks of their defining identities.
//!
//! * [`phase`]: `|Phi|`, `cos Phi` and cosine-series functions of the phase
//!   in the cosine (`Plus`) and sine (`Minus`) sectors of the number basis,
//!   plus the Susskind–Glogower and Carruthers–Nieto operators.
//! * [`rotator`]: the angle operator of a plane rotator in the `J_z` basis.
//! * [`coherent`]: coherent-state expectation of `|Phi|` and its classical limit.
//! * [`boundary`]: sampled functions and boundary-form identities.
//! * [`quadrature`]: the integration oracle used to validate closed forms.
//! * [`checks`]: the above bundled into residual tables with verdicts.

// Guards of the form `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod checks;
pub mod coherent;
pub mod error;
pub mod linalg;
pub mod phase;
pub mod quadrature;
pub mod rotator;
pub mod table;

pub use error::{Error, Result};
pub use linalg::{
    commutator, eigen_decompose, inner_product, BasisTag, OperatorMatrix, Spectrum, StateVector,
    ToleranceConfig,
};
pub use num_complex::Complex64;
pub use phase::PhaseSector;
pub use table::{ScanTable, Value};
