//! Geometry of Hermitian operators and density states.
//!
//! Brackets and Kähler tensors on u*(H), Kraus actions, rank strata with
//! their charts and faces, composite systems, and concurrence bounds.

pub mod composite;
pub mod entanglement;
pub mod error;
pub mod hermitian;
pub mod kraus;
pub mod linalg;
pub mod random;
pub mod strata;

pub use error::{Error, Result};
pub use hermitian::{DensityState, HermitianOperator, PureStateVector};
pub use kraus::KrausMap;
