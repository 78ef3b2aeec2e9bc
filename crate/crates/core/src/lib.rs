//! Design of mirror-symmetric spin-chain extensions that pin chosen
//! eigenvalues, and analysis of the resulting encoded state transfer.
//!
//! Algorithms are generic over [`scalar::Real`]; the aliases below fix the
//! scalar for the common cases.

pub mod chain;
pub mod dd;
pub mod error;
pub mod extension;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod transfer;

pub use chain::{ChainSpec, JacobiMatrix, RegionPartition, SpectralDecomposition, Symmetry};
pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision chain.
pub type Chain = ChainSpec<f64>;
/// Double-double chain, for checking ill-conditioned designs.
pub type ChainDd = ChainSpec<DoubleDouble>;
pub type Jacobi = JacobiMatrix<f64>;
pub type JacobiDd = JacobiMatrix<DoubleDouble>;
pub type Decomposition = SpectralDecomposition<f64>;
pub type DecompositionDd = SpectralDecomposition<DoubleDouble>;
pub type State = transfer::SingleExcitationState<f64>;
pub type StateDd = transfer::SingleExcitationState<DoubleDouble>;
