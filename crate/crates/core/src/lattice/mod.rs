//! Lattices on `Z[zeta_n]`: Gram matrices, reduction, enumeration and the
//! checks built on them.

pub mod craig;
pub mod enumerate;
pub mod gram;
pub mod hull;
pub mod lll;
pub mod minima;
pub mod set_e;

pub use craig::craig_circulant;
pub use enumerate::{enumerate_all, enumerate_short, Enumeration, ShortVectorSet, DEFAULT_BUDGET};
pub use gram::{gram_matrix, GramMatrix, LatticeNorm};
pub use hull::{hull_check_weights, hull_consistency, HullCheck};
pub use lll::lll_reduce;
pub use minima::minimal_vectors;
pub use set_e::{characteristic_set_e, reduce_to_chamber, CharacteristicSetE};
