//! Exact homological algebra over `F_l` and `Q` for complexes and
//! dg-algebras carrying a Frobenius-type endomorphism: weight gradings,
//! purity, truncations, Massey products, free models and replayable
//! N-formality certificates.

pub mod cli;
pub mod complexes;
pub mod dga;
pub mod error;
pub mod field;
pub mod free_models;
pub mod generators;
pub mod json;
pub mod linalg;
pub mod weights;
pub mod witness;

pub use error::{Error, Result};
pub use field::{Field, FieldConfig, Scalar};
pub use linalg::{Matrix, Polynomial};
