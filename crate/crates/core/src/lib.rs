//! Exact-arithmetic toolkit for nilpotent Zinbiel algebras: family tables,
//! identity checks, invariants, gradations, and isomorphism search.

pub mod algebra;
pub mod deduction;
pub mod error;
pub mod families;
pub mod gradation;
pub mod identities;
pub mod io;
pub mod isomorphism;
pub mod linalg;
pub mod scalar;
pub mod spectra;

pub use algebra::{Algebra, Defect, SparseVec};
pub use deduction::{propagate, PartialTable, Propagation};
pub use error::{Error, Result};
pub use families::{FamilyId, FamilyParams, Kind};
pub use gradation::{graded, GradedAlgebra};
pub use identities::{nonexistence_certificate, Certificate, LinearSystem, Solutions};
pub use isomorphism::{BaseChange, Extension, Fingerprint, IsoOutcome, SearchBounds};
pub use linalg::{Matrix, Subspace, Vector};
pub use scalar::{Rational, Scalar};
pub use spectra::{CharSequence, Strategy};
