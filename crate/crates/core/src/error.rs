use thiserror::Error;

use crate::weyl::Family;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rank {rank} is not valid for type {family:?}")]
    InvalidRank { family: Family, rank: usize },
    #[error("generator index {index} out of range 1..={rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("corepresentation index ({k}, {l}) out of range 1..={dim}")]
    EntryOutOfRange { k: usize, l: usize, dim: usize },
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<usize>),
    #[error("invalid normal form: {0}")]
    InvalidNormalForm(String),
    #[error("invalid parabolic subset: {0}")]
    InvalidParabolic(String),
    #[error("deformation parameter q = {0} is not in (0, 1)")]
    InvalidQ(f64),
    #[error("torus coordinate {index} has modulus {modulus}, expected 1")]
    NotUnitModulus { index: usize, modulus: f64 },
    #[error("expected {expected} torus coordinates, got {got}")]
    TorusLength { expected: usize, got: usize },
    #[error("shape mismatch: expected {expected} tensor factors, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("truncation boundary reached at cutoff {cutoff}")]
    TruncationContact { cutoff: usize },
    #[error("rank decision ambiguous: relative residual {residual:e} too close to tolerance {tol:e}")]
    RankAmbiguity { residual: f64, tol: f64 },
    #[error("degree estimation needs at least {needed} points in the window, got {got}")]
    DegenerateWindow { needed: usize, got: usize },
    #[error("quotient mode: {0}")]
    Quotient(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
