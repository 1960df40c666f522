//! Teleportation witness and fully entangled fraction for bipartite
//! `d x d` quantum states.
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigensolver, Haar sampling.
//! * [`states`]: validated density matrices and the standard state families.
//! * [`fef`]: the fully entangled fraction by exact, optimizer and sampling routes.
//! * [`witness`]: the witness operator, closed-form expectations, local decompositions.
//! * [`cli`]: the `telewit` command-line front end and its file formats.

pub mod cli;
pub mod error;
pub mod fef;
pub mod linalg;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use fef::{FefEstimate, FefMethod, OptimizerConfig};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use states::{DensityMatrix, FamilyParams};
pub use witness::{LocalDecomposition, Verdict, WitnessReport};
