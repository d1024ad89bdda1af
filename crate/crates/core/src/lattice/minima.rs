//! Minimal vectors of `(kappa)` under a weighted norm.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::embeddings::{PrecisionConfig, Weights};
use crate::error::Result;
use crate::field::{CMField, FieldElement};
use crate::lattice::enumerate::{enumerate_all, ShortVectorSet};
use crate::lattice::gram::{gram_matrix, GramEntries, GramMatrix};
use crate::lattice::lll::lll_reduce;

/// `kappa * sum_i c_i zeta^i`.
pub fn lattice_element(field: &Arc<CMField>, kappa: Option<&FieldElement>, coords: &[i64]) -> FieldElement {
    let a = FieldElement::from_i64s(field, coords).expect("coordinate count matches degree");
    match kappa {
        Some(k) => k * &a,
        None => a,
    }
}

/// An upper bound on the minimum: the first diagonal entry after LLL.
pub fn automatic_radius(g: &GramMatrix) -> Result<BigRational> {
    let (reduced, _) = lll_reduce(g)?;
    Ok(match reduced.entries() {
        GramEntries::Exact(m) => (0..m.len()).map(|i| m[i][i].clone()).min().unwrap(),
        GramEntries::Interval(m) => (0..m.len())
            .map(|i| m[i][i].hi().to_rational())
            .min()
            .unwrap(),
    })
}

/// Distinct values of `alpha * conj(alpha)` among the given lattice vectors.
fn beta_classes(field: &Arc<CMField>, kappa: Option<&FieldElement>, vs: &[Vec<i64>]) -> usize {
    vs.iter()
        .map(|v| {
            let a = lattice_element(field, kappa, v);
            (&a * &a.conj()).coords().to_vec()
        })
        .collect::<BTreeSet<Vec<BigInt>>>()
        .len()
}

/// All minimal vectors of the weighted norm on `(kappa)`, in the basis `kappa * zeta^i`.
///
/// For interval Grams, vectors whose norms cannot be separated from the
/// minimum are all reported; elements sharing `alpha * conj(alpha)` have equal
/// norm exactly, and a second pass at doubled precision separates the rest
/// where possible.
pub fn minimal_vectors(
    field: &Arc<CMField>,
    w: &Weights,
    kappa: Option<&FieldElement>,
    prec: &PrecisionConfig,
    budget: u64,
) -> Result<ShortVectorSet> {
    let g = gram_matrix(field, w, kappa, prec)?;
    let radius = automatic_radius(&g)?;
    let e = enumerate_all(&g, &radius, budget, prec.bits)?;
    let set = e.minimum().expect("radius is attained by a basis vector");
    if g.is_exact() || beta_classes(field, kappa, &set.vectors) <= 1 {
        return Ok(set);
    }
    let finer = prec.doubled();
    let g2 = gram_matrix(field, w, kappa, &finer)?;
    let mut e2 = e;
    for (v, n) in e2.vectors.iter_mut() {
        *n = g2.norm(v, finer.bits);
    }
    Ok(e2.minimum().expect("nonempty"))
}
