//! The simplex bound on norms of weighted-norm minimizers, and its ideal variant.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::embeddings::{sigma_at, PrecisionConfig};
use crate::error::{Error, Result};
use crate::field::{is_prime, CMField, FieldElement};
use crate::interval::RealInterval;
use crate::linalg::{det_cofactor, det_elimination};
use crate::units::{delta_sets, DeltaSet, Provenance, UnitBasis};

/// How determinants of interval matrices are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetMethod {
    Cofactor,
    Elimination,
}

fn det(m: &[Vec<RealInterval>], bits: u32, method: DetMethod) -> RealInterval {
    match method {
        DetMethod::Cofactor => det_cofactor(m, bits),
        DetMethod::Elimination => {
            det_elimination(m, bits).unwrap_or_else(|| det_cofactor(m, bits))
        }
    }
}

/// Matrices and determinants for one simplex `Delta_s`.
#[derive(Clone, Debug, Serialize)]
pub struct SimplexData {
    pub perm: Vec<usize>,
    #[serde(skip)]
    pub a: Vec<Vec<RealInterval>>,
    #[serde(skip)]
    pub b: Vec<Vec<RealInterval>>,
    #[serde(rename = "detA")]
    pub det_a: RealInterval,
    #[serde(rename = "detB")]
    pub det_b: Vec<RealInterval>,
    pub bound: RealInterval,
}

/// `B_l`: `B` with column `l` (zero-based here) removed.
pub fn minor_b(b: &[Vec<RealInterval>], l: usize) -> Vec<Vec<RealInterval>> {
    b.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|&(c, _)| c != l)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// `|(det A / k)^k prod_l 1 / det B_l|` from the vertex images, at a fixed precision.
pub fn simplex_from_rows(
    perm: Vec<usize>,
    a: Vec<Vec<RealInterval>>,
    bits: u32,
    method: DetMethod,
) -> Result<SimplexData> {
    let k = a.len();
    let b: Vec<Vec<RealInterval>> = (0..k.saturating_sub(1))
        .map(|j| a[j + 1].iter().zip(&a[j]).map(|(x, y)| x - y).collect())
        .collect();
    let det_a = det(&a, bits, method);
    let mut det_b = Vec::with_capacity(k);
    for l in 0..k {
        let d = det(&minor_b(&b, l), bits, method);
        if d.contains_zero() {
            return Err(Error::DegenerateSimplex {
                perm: perm.clone(),
                column: l + 1,
            });
        }
        det_b.push(d);
    }
    let scaled = det_a
        .checked_div(&RealInterval::from_int(k as u64, bits))
        .expect("k is nonzero")
        .powi(k as u32);
    let prod_b = det_b.iter().fold(RealInterval::one(bits), |acc, d| &acc * d);
    let bound = scaled
        .checked_div(&prod_b)
        .expect("minors certified nonzero")
        .abs();
    Ok(SimplexData {
        perm,
        a,
        b,
        det_a,
        det_b,
        bound,
    })
}

fn simplex_at(ds: &DeltaSet, bits: u32, method: DetMethod) -> Result<SimplexData> {
    let a = ds
        .vertices
        .iter()
        .map(|u| Ok(sigma_at(u, bits)?.0))
        .collect::<Result<Vec<_>>>()?;
    simplex_from_rows(ds.perm.clone(), a, bits, method)
}

/// Certified matrices and bound for one simplex.
pub fn simplex_data(ds: &DeltaSet, prec: &PrecisionConfig) -> Result<SimplexData> {
    simplex_data_with(ds, prec, DetMethod::Cofactor)
}

pub fn simplex_data_with(ds: &DeltaSet, prec: &PrecisionConfig, method: DetMethod) -> Result<SimplexData> {
    match simplex_at(ds, prec.bits, method) {
        Ok(s) if prec.accepts(&s.bound) => Ok(s),
        Ok(_) | Err(Error::DegenerateSimplex { .. }) | Err(Error::PrecisionExhausted(_)) => {
            let bits = prec.bits * 2;
            let s = simplex_at(ds, bits, method)?;
            if prec.accepts(&s.bound) {
                Ok(s)
            } else {
                Err(Error::PrecisionExhausted(format!(
                    "simplex {:?}: bound {} too wide at {bits} bits",
                    ds.perm, s.bound
                )))
            }
        }
        Err(e) => Err(e),
    }
}

/// Outcome of comparing the bound with the prime conductor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Certified bound below `p`: every minimizer has norm one.
    AllMinimaAreUnits,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AllMinimaAreUnits => "AllMinimaAreUnits",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Bound for every simplex and their maximum.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub conductor: u64,
    pub k: usize,
    pub basis_provenance: Provenance,
    pub simplices: Vec<SimplexData>,
    pub bound: RealInterval,
    #[serde(serialize_with = "serialize_opt_int")]
    pub ideal_norm: Option<BigInt>,
    pub ideal_bound: Option<RealInterval>,
    pub verdict: Option<Verdict>,
}

fn serialize_opt_int<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_none(),
    }
}

impl BoundReport {
    /// Upper end of the governing bound: the ideal bound if present.
    pub fn effective_bound(&self) -> &RealInterval {
        self.ideal_bound.as_ref().unwrap_or(&self.bound)
    }
}

/// Maximum over all `(k-1)!` simplices.
pub fn theorem_bound(field: &CMField, basis: &UnitBasis, prec: &PrecisionConfig) -> Result<BoundReport> {
    if basis.field().conductor() != field.conductor() {
        return Err(Error::FieldMismatch(field.conductor(), basis.field().conductor()));
    }
    let sets = delta_sets(basis);
    let simplices = sets
        .par_iter()
        .map(|ds| simplex_data(ds, prec))
        .collect::<Result<Vec<_>>>()?;
    let bound = simplices
        .iter()
        .map(|s| s.bound.clone())
        .reduce(|a, b| a.max(&b))
        .expect("at least one simplex");
    let mut report = BoundReport {
        conductor: field.conductor(),
        k: field.half_degree(),
        basis_provenance: basis.provenance(),
        simplices,
        bound,
        ideal_norm: None,
        ideal_bound: None,
        verdict: None,
    };
    if is_prime(field.conductor()) {
        report.verdict = Some(norm_gap_verdict(&report, field.conductor()));
    }
    Ok(report)
}

/// The bound scaled by `N(kappa)`.
pub fn ideal_bound(
    field: &CMField,
    basis: &UnitBasis,
    kappa: &FieldElement,
    prec: &PrecisionConfig,
) -> Result<BoundReport> {
    if kappa.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut report = theorem_bound(field, basis, prec)?;
    let n = kappa.norm();
    report.ideal_bound = Some(report.bound.mul_rational(&BigRational::from_integer(n.clone())));
    report.ideal_norm = Some(n);
    Ok(report)
}

/// Nonzero norms in `Z[zeta_p]` are `1` or at least `p`, so a bound below `p`
/// forces norm one.
pub fn norm_gap_verdict(report: &BoundReport, p: u64) -> Verdict {
    let p = BigRational::from_integer(BigInt::from(p));
    if report.bound.certainly_lt_rational(&p) {
        Verdict::AllMinimaAreUnits
    } else {
        Verdict::Inconclusive
    }
}

/// Re-evaluates `theorem_bound` with both determinant methods at a fixed precision.
pub fn bound_both_ways(ds: &DeltaSet, bits: u32) -> Result<(RealInterval, RealInterval)> {
    let a = simplex_at(ds, bits, DetMethod::Cofactor)?;
    let b = simplex_at(ds, bits, DetMethod::Elimination)?;
    Ok((a.bound, b.bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::units::cyclotomic_unit_basis;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sqrt5() -> RealInterval {
        RealInterval::from_int(5, 256).sqrt().unwrap()
    }

    #[test]
    fn p5_simplex_values() {
        let f = make_field(5).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        let r = theorem_bound(&f, &b, &PrecisionConfig::default()).unwrap();
        assert_eq!(r.simplices.len(), 1);
        let s = &r.simplices[0];
        assert!(s.det_a.abs().overlaps(&sqrt5()));
        let plus = (&RealInterval::one(256) + &sqrt5()).shl(-1);
        let minus = (&RealInterval::one(256) - &sqrt5()).shl(-1);
        // deleting column 1 leaves the second coordinate difference, and vice versa
        assert!(s.det_b[0].overlaps(&minus));
        assert!(s.det_b[1].overlaps(&plus));
        assert!(r.bound.contains_rational(&q(5, 4)));
        assert!(r.bound.width_f64() < 1e-20);
        assert_eq!(r.verdict, Some(Verdict::AllMinimaAreUnits));
    }

    #[test]
    fn p7_values() {
        let f = make_field(7).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        let r = theorem_bound(&f, &b, &PrecisionConfig::default()).unwrap();
        let values: Vec<&RealInterval> = r.simplices.iter().map(|s| &s.bound).collect();
        assert!(values.iter().any(|v| v.contains_rational(&q(49, 27))));
        assert!(values.iter().any(|v| v.contains_rational(&q(56, 27))));
        assert!(r.bound.contains_rational(&q(56, 27)));
        assert!(r.bound.width_f64() < 1e-20);
        assert_eq!(r.verdict, Some(Verdict::AllMinimaAreUnits));
    }

    #[test]
    fn p11_inconclusive() {
        let f = make_field(11).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        let r = theorem_bound(&f, &b, &PrecisionConfig::default()).unwrap();
        assert_eq!(r.simplices.len(), 24);
        assert!(r.bound.certainly_gt_rational(&q(11, 1)));
        assert_eq!(r.verdict, Some(Verdict::Inconclusive));
    }

    #[test]
    fn ideal_examples() {
        let p = PrecisionConfig::default();
        let f = make_field(5).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        let r = ideal_bound(&f, &b, &FieldElement::one(&f), &p).unwrap();
        assert!(r.ideal_bound.unwrap().contains_rational(&q(5, 4)));
        let k = FieldElement::from_i64s(&f, &[1, -1, 0, 0]).unwrap();
        let r = ideal_bound(&f, &b, &(&k * &k), &p).unwrap();
        assert!(r.ideal_bound.unwrap().contains_rational(&q(125, 4)));
        assert_eq!(
            ideal_bound(&f, &b, &FieldElement::zero(&f), &p).unwrap_err(),
            Error::ZeroElement
        );

        let g = make_field(7).unwrap();
        let bg = cyclotomic_unit_basis(&g).unwrap();
        let k = FieldElement::from_i64s(&g, &[1, -1, 0, 0, 0, 0]).unwrap();
        let r = ideal_bound(&g, &bg, &k, &p).unwrap();
        assert!(r.ideal_bound.unwrap().contains_rational(&q(392, 27)));
    }

    #[test]
    fn methods_agree() {
        for n in [5, 7, 11] {
            let f = make_field(n).unwrap();
            let b = cyclotomic_unit_basis(&f).unwrap();
            for ds in delta_sets(&b) {
                let (x, y) = bound_both_ways(&ds, 128).unwrap();
                assert!(x.overlaps(&y), "n={n} perm={:?}", ds.perm);
            }
        }
    }

    #[test]
    fn degenerate_simplex_detected() {
        let one = RealInterval::one(128);
        let a = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
        let err = simplex_from_rows(vec![1], a, 128, DetMethod::Cofactor).unwrap_err();
        assert_eq!(err, Error::DegenerateSimplex { perm: vec![1], column: 1 });
    }

    #[test]
    fn row_order_does_not_change_det_magnitude() {
        let f = make_field(7).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        let ds = &delta_sets(&b)[0];
        let s = simplex_data(ds, &PrecisionConfig::default()).unwrap();
        let mut rows = s.a.clone();
        rows.swap(0, 2);
        let d = det_cofactor(&rows, 128);
        assert!(d.abs().overlaps(&s.det_a.abs()));
    }
}
