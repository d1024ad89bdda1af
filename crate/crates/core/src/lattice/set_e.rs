//! The finite set `E` of elements in the fundamental chamber with bounded norm.
//!
//! Chamber coordinates of a nonzero `e` solve
//! `log Sigma(e) - (log N(e) / k) * 1 = sum_j c_j log Sigma(g_j)` on the first
//! `k - 1` coordinates; `e` lies in the chamber when every `c_j` is in `[0, 1)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::bound::BoundReport;
use crate::embeddings::{sigma_at, FloatEmbeddings, PrecisionConfig, Weights};
use crate::error::{Error, Result};
use crate::field::{CMField, FieldElement, IntJson};
use crate::interval::RealInterval;
use crate::lattice::enumerate::enumerate_fold;
use crate::lattice::gram::gram_matrix;
use crate::linalg::solve_interval;
use crate::units::UnitBasis;

/// Width below which an interval containing an integer is taken to equal it.
const SNAP_WIDTH: f64 = 1e-20;

/// The set `E` together with the data defining the chamber.
#[derive(Clone, Debug)]
pub struct CharacteristicSetE {
    pub elements: Vec<FieldElement>,
    pub log_matrix: Vec<Vec<RealInterval>>,
    pub norm_bound: RealInterval,
    pub radius: f64,
    pub nodes: u64,
    /// Coordinates decided by snapping to an integer endpoint.
    pub snapped: usize,
}

impl CharacteristicSetE {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: &FieldElement) -> bool {
        self.elements.binary_search(e).is_ok()
    }
}

impl Serialize for CharacteristicSetE {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CharacteristicSetE", 2)?;
        st.serialize_field("size", &self.elements.len())?;
        let coords: Vec<Vec<IntJson>> = self
            .elements
            .iter()
            .map(|e| e.coords().iter().map(IntJson).collect())
            .collect();
        st.serialize_field("elements", &coords)?;
        st.end()
    }
}

/// Chamber coordinates `c_1, ..., c_{k-1}` of a nonzero element.
pub fn chamber_coordinates(basis: &UnitBasis, e: &FieldElement, bits: u32) -> Result<Vec<RealInterval>> {
    let r = basis.rank();
    if r == 0 {
        return Ok(Vec::new());
    }
    let k = r + 1;
    let l = basis.log_matrix(bits)?;
    let s = sigma_at(e, bits)?;
    let logs = s
        .values()
        .iter()
        .map(|v| v.ln().ok_or_else(|| Error::PrecisionExhausted("log of sigma".into())))
        .collect::<Result<Vec<_>>>()?;
    let log_n = logs.iter().cloned().sum::<RealInterval>();
    let mean = log_n
        .checked_div(&RealInterval::from_int(k as u64, bits))
        .expect("k nonzero");
    let rhs: Vec<RealInterval> = logs[..r].iter().map(|v| v - &mean).collect();
    let lt: Vec<Vec<RealInterval>> = (0..r).map(|m| (0..r).map(|j| l[j][m].clone()).collect()).collect();
    solve_interval(&lt, &rhs).ok_or_else(|| Error::PrecisionExhausted("chamber coordinates".into()))
}

/// Position of a coordinate relative to `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Inside,
    Outside,
    Undecided,
}

fn classify(c: &RealInterval) -> Side {
    let one = BigRational::from_integer(1.into());
    if c.lo().signum() >= 0 && c.certainly_lt_rational(&one) {
        Side::Inside
    } else if c.hi().signum() < 0 || c.lo().to_rational() >= one {
        Side::Outside
    } else {
        Side::Undecided
    }
}

/// Integer a narrow interval snaps to, if any.
fn snap(c: &RealInterval) -> Option<i64> {
    let z = c.mid_f64().round();
    let zq = BigRational::from_integer(BigInt::from(z as i64));
    (c.width_f64() < SNAP_WIDTH && c.contains_rational(&zq)).then_some(z as i64)
}

/// Membership of `e` in the chamber; second value reports whether snapping was used.
fn in_chamber(basis: &UnitBasis, e: &FieldElement, prec: &PrecisionConfig) -> Result<(bool, bool)> {
    let mut coords = chamber_coordinates(basis, e, prec.bits)?;
    if coords.iter().any(|c| classify(c) == Side::Undecided) {
        coords = chamber_coordinates(basis, e, prec.bits * 2)?;
    }
    let mut snapped = false;
    for c in &coords {
        match classify(c) {
            Side::Inside => {}
            Side::Outside => return Ok((false, snapped)),
            Side::Undecided => match snap(c) {
                Some(0) => snapped = true,
                Some(_) => return Ok((false, true)),
                None => {
                    return Err(Error::PrecisionExhausted(format!(
                        "chamber coordinate {c} of {e} undecided"
                    )))
                }
            },
        }
    }
    Ok((true, snapped))
}

/// `E`: nonzero elements with `N(e) <=` the upper end of the bound whose
/// chamber coordinates lie in `[0, 1)^(k-1)`.
pub fn characteristic_set_e(
    field: &Arc<CMField>,
    basis: &UnitBasis,
    report: &BoundReport,
    prec: &PrecisionConfig,
    budget: u64,
) -> Result<CharacteristicSetE> {
    let k = field.half_degree();
    let r = basis.rank();
    let bound = report.bound.clone();
    let c_hi = bound.hi().to_rational();
    let c_f = bound.hi_f64();

    let log_rows = basis.log_embeddings(prec.bits)?;
    let lf: Vec<Vec<f64>> = log_rows.iter().map(|r| r.iter().map(RealInterval::mid_f64).collect()).collect();
    // sigma_m(e conj e) <= C^(1/k) * exp(sum_j max(0, l_jm)) inside the chamber
    let per_embedding: f64 = (0..k)
        .map(|m| lf.iter().map(|row| row[m].max(0.0)).sum::<f64>().exp())
        .sum();
    let radius = c_f.powf(1.0 / k as f64) * per_embedding * (1.0 + 1e-9);

    let inv = invert_transpose(&lf, r);
    let table = FloatEmbeddings::new(field);
    let g = gram_matrix(field, &Weights::equal(k), None, prec)?;
    let tol = 1e-6;
    let (parts, nodes) = enumerate_fold(
        &g,
        radius,
        budget,
        Vec::new,
        |acc: &mut Vec<Vec<i64>>, x: &[i64]| {
            let mut s = vec![0.0; k];
            table.sigma(x, &mut s);
            let n: f64 = s.iter().product();
            if n > c_f * (1.0 + tol) || n < 0.5 {
                return;
            }
            let logs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
            let mean = n.ln() / k as f64;
            let y: Vec<f64> = logs[..r].iter().map(|v| v - mean).collect();
            for row in &inv {
                let c: f64 = row.iter().zip(&y).map(|(a, b)| a * b).sum();
                if c < -tol || c > 1.0 + tol {
                    return;
                }
            }
            acc.push(x.to_vec());
        },
    )?;
    let candidates: Vec<Vec<i64>> = parts.into_iter().flatten().collect();
    let checked: Vec<Result<Option<(FieldElement, bool)>>> = candidates
        .par_iter()
        .map(|x| {
            let e = FieldElement::from_i64s(field, x)?;
            if BigRational::from_integer(e.norm()) > c_hi {
                return Ok(None);
            }
            let (inside, snapped) = in_chamber(basis, &e, prec)?;
            Ok(inside.then_some((e, snapped)))
        })
        .collect();
    let mut elements = Vec::new();
    let mut snapped = 0;
    for c in checked {
        if let Some((e, s)) = c? {
            snapped += usize::from(s);
            elements.push(e);
        }
    }
    elements.sort();
    Ok(CharacteristicSetE {
        elements,
        log_matrix: basis.log_matrix(prec.bits)?,
        norm_bound: bound,
        radius,
        nodes,
        snapped,
    })
}

/// Rows of `(L^T)^{-1}` for the leading `r x r` block of the log rows.
fn invert_transpose(rows: &[Vec<f64>], r: usize) -> Vec<Vec<f64>> {
    let lt: Vec<Vec<f64>> = (0..r).map(|m| (0..r).map(|j| rows[j][m]).collect()).collect();
    let mut a: Vec<Vec<f64>> = lt
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.extend((0..r).map(|j| f64::from(u8::from(i == j))));
            row
        })
        .collect();
    for col in 0..r {
        let p = (col..r)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, p);
        let piv = a[col][col];
        for v in a[col].iter_mut() {
            *v /= piv;
        }
        for i in 0..r {
            if i != col {
                let f = a[i][col];
                for j in 0..2 * r {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    a.into_iter().map(|row| row[r..].to_vec()).collect()
}

/// `beta = unit * representative` with the representative in the chamber.
#[derive(Clone, Debug)]
pub struct ChamberReduction {
    pub exponents: Vec<i64>,
    pub unit: FieldElement,
    pub representative: FieldElement,
}

/// Moves `beta` into the chamber by multiplying with `prod g_j^(-a_j)`,
/// `a_j = floor(c_j)`.
pub fn reduce_to_chamber(basis: &UnitBasis, beta: &FieldElement, prec: &PrecisionConfig) -> Result<ChamberReduction> {
    if beta.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut coords = chamber_coordinates(basis, beta, prec.bits)?;
    let exps = |coords: &[RealInterval]| -> Option<Vec<i64>> {
        coords
            .iter()
            .map(|c| match snap(c) {
                Some(z) => Some(z),
                None => {
                    let lo = c.lo_f64().floor();
                    (lo == c.hi_f64().floor()).then_some(lo as i64)
                }
            })
            .collect()
    };
    let exponents = match exps(&coords) {
        Some(e) => e,
        None => {
            coords = chamber_coordinates(basis, beta, prec.bits * 2)?;
            exps(&coords).ok_or_else(|| Error::PrecisionExhausted("chamber floor undecided".into()))?
        }
    };
    let field = basis.field();
    let mut unit = FieldElement::one(field);
    for (g, &a) in basis.generators().iter().zip(&exponents) {
        let base = if a >= 0 { g.clone() } else { g.unit_inverse()? };
        unit = &unit * &base.pow(a.unsigned_abs() as u32);
    }
    let representative = beta.exact_divide(&unit)?;
    Ok(ChamberReduction {
        exponents,
        unit,
        representative,
    })
}

/// Checks that `alpha = kappa * unit * e` with `e` in `E`, returning the reduction.
pub fn roundtrip(
    set: &CharacteristicSetE,
    basis: &UnitBasis,
    kappa: Option<&FieldElement>,
    alpha: &FieldElement,
    prec: &PrecisionConfig,
) -> Result<Option<ChamberReduction>> {
    let beta = match kappa {
        Some(k) => alpha.exact_divide(k)?,
        None => alpha.clone(),
    };
    let red = reduce_to_chamber(basis, &beta, prec)?;
    let rebuilt = &red.unit * &red.representative;
    let rebuilt = match kappa {
        Some(k) => k * &rebuilt,
        None => rebuilt,
    };
    Ok((set.contains(&red.representative) && &rebuilt == alpha).then_some(red))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::theorem_bound;
    use crate::field::make_field;
    use crate::lattice::enumerate::DEFAULT_BUDGET;
    use crate::units::cyclotomic_unit_basis;

    fn set_for(p: u64) -> (Arc<CMField>, UnitBasis, CharacteristicSetE) {
        let f = make_field(p).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        let prec = PrecisionConfig::default();
        let r = theorem_bound(&f, &b, &prec).unwrap();
        let e = characteristic_set_e(&f, &b, &r, &prec, DEFAULT_BUDGET).unwrap();
        (f, b, e)
    }

    #[test]
    fn p5_is_torsion() {
        let (f, _, e) = set_for(5);
        assert_eq!(e.size(), 10);
        for j in 0..5 {
            let z = FieldElement::zeta_pow(&f, j);
            assert!(e.contains(&z));
            assert!(e.contains(&-z));
        }
    }

    #[test]
    fn p7_is_torsion() {
        let (_, _, e) = set_for(7);
        assert_eq!(e.size(), 14);
        assert!(e.elements.iter().all(|x| x.is_unit().unwrap()));
    }

    #[test]
    fn reduction_of_units() {
        let (f, b, e) = set_for(7);
        let prec = PrecisionConfig::default();
        let g = &b.generators()[0];
        let h = &b.generators()[1];
        let u = &(&g.pow(3) * &h.unit_inverse().unwrap().pow(2)) * &FieldElement::zeta_pow(&f, 4);
        let red = roundtrip(&e, &b, None, &u, &prec).unwrap().expect("lands in E");
        assert_eq!(red.exponents, vec![3, -2]);
    }
}
