//! Two-qubit entanglement toolkit: Wootters concurrence, the
//! iso-concurrence decomposable family of states and their Lewenstein-Sanpera
//! decomposition.

// Negated float comparisons reject NaN on purpose; index loops mirror the
// matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod concurrence;
pub mod error;
pub mod icd;
pub mod lsd;
pub mod oracle;
pub mod qmat;
pub mod qstate;

pub use error::{Error, Result};
pub use icd::{ICDParams, RegionKind, RegionLabel};
pub use lsd::{LSDecomposition, OptimalityVerdict};
pub use oracle::OracleReport;
pub use qmat::{CMatrix, CVector, Mat2, Mat4, Tolerances, Vec2, Vec4, C64};
pub use qstate::{DensityMatrix, PureState, WeightedEnsemble};
