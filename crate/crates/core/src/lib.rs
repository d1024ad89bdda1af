//! Norm bounds for minimal vectors of weighted trace-form lattices on
//! cyclotomic CM fields, together with exact enumeration to check them.

pub mod bound;
pub mod embeddings;
pub mod error;
pub mod field;
pub mod interval;
pub mod lattice;
pub mod linalg;
pub mod theta;
pub mod units;

pub use embeddings::{norm_check, sigma, weighted_norm, PrecisionConfig, SigmaImage, Weights};
pub use error::{Error, Result};
pub use field::{make_field, CMField, ExactRational, FieldElement};
pub use interval::RealInterval;
pub use bound::{ideal_bound, norm_gap_verdict, simplex_data, theorem_bound, BoundReport, SimplexData, Verdict};
pub use units::{
    cyclotomic_unit_basis, delta_sets, fundamental_domain, load_unit_basis, DeltaSet, Provenance, UnitBasis,
};
pub use theta::{cusp_extract, psi_truncated, theta_prefix, CuspEstimate, PsiSample, ThetaPrefix};
