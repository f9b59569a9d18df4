//! Simple unitarizable modules of the quantized function algebras of
//! SU(n+1), Sp(2n) and Spin(2n), realized on tensor powers of the shift
//! space, and their Gelfand-Kirillov dimension.
//!
//! The numeric layer is generic over [`Real`]; the aliases below fix it to
//! `f64`.

pub mod corep;
pub mod error;
pub mod fock;
pub mod gkdim;
pub mod scalar;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SparseVector = fock::SparseVector<f64>;
pub type PathOperator = fock::PathOperator<f64>;
pub type OperatorSum = fock::OperatorSum<f64>;
pub type DenseMatrix = fock::DenseMatrix<f64>;
pub type AlgebraSpec = corep::AlgebraSpec<f64>;
pub type ActionMatrix = corep::ActionMatrix<f64>;
pub type WordAction = corep::WordAction<f64>;
