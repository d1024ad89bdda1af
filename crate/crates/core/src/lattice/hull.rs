//! Low-dimensional check that weighted-norm minimizers map to the boundary of
//! the convex hull of the Sigma images.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::embeddings::{sigma_at, PrecisionConfig, Weights};
use crate::error::{Error, Result};
use crate::field::{CMField, FieldElement};
use crate::lattice::enumerate::enumerate_all;
use crate::lattice::gram::gram_matrix;
use crate::lattice::minima::{lattice_element, minimal_vectors};

/// Result of a hull test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HullCheck {
    Consistent,
    Violated,
    Inconclusive,
}

/// A Sigma image: rational midpoints plus a radius bound covering all coordinates.
struct Point {
    mid: Vec<BigRational>,
    rad: BigRational,
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn candidate_normals(p: &Point, others: &[&Point], k: usize) -> Vec<Vec<BigRational>> {
    let diffs: Vec<Vec<BigRational>> = others.iter().map(|q| sub(&q.mid, &p.mid)).collect();
    let mut out = Vec::new();
    match k {
        2 => {
            for d in &diffs {
                let n = vec![-d[1].clone(), d[0].clone()];
                out.push(n.iter().map(|v| -v).collect());
                out.push(n);
            }
        }
        3 => {
            for i in 0..diffs.len() {
                for j in i + 1..diffs.len() {
                    let (a, b) = (&diffs[i], &diffs[j]);
                    let n = vec![
                        &a[1] * &b[2] - &a[2] * &b[1],
                        &a[2] * &b[0] - &a[0] * &b[2],
                        &a[0] * &b[1] - &a[1] * &b[0],
                    ];
                    if n.iter().all(Zero::is_zero) {
                        continue;
                    }
                    out.push(n.iter().map(|v| -v).collect());
                    out.push(n);
                }
            }
        }
        _ => unreachable!("dimension checked by caller"),
    }
    out
}

/// Whether `p` is certified on the hull boundary of `p` and `others`.
///
/// A normal `nu` certifies `p` when `nu . (q - p) >= -slack` for every other
/// point, where `slack` covers the interval radii of both points.
fn on_boundary(p: &Point, others: &[&Point], k: usize) -> HullCheck {
    if others.len() < k - 1 {
        return HullCheck::Consistent;
    }
    let mut violated_everywhere = true;
    for nu in candidate_normals(p, others, k) {
        let l1: BigRational = nu.iter().map(|v| v.abs()).sum();
        let mut ok = true;
        for q in others {
            let val = dot(&nu, &sub(&q.mid, &p.mid));
            let slack = &l1 * (&q.rad + &p.rad);
            if val < -slack.clone() {
                ok = false;
                if val > -(slack * BigRational::from_integer(BigInt::from(1u64 << 20))) {
                    violated_everywhere = false;
                }
                break;
            }
        }
        if ok {
            return HullCheck::Consistent;
        }
    }
    if violated_everywhere {
        HullCheck::Violated
    } else {
        HullCheck::Inconclusive
    }
}

/// Hull test for one weight vector: enumerate all points with weighted norm at
/// most `radius_factor` times the minimum, and test each minimizer.
pub fn hull_check_weights(
    field: &Arc<CMField>,
    w: &Weights,
    radius_factor: u32,
    prec: &PrecisionConfig,
    budget: u64,
) -> Result<HullCheck> {
    let k = field.half_degree();
    if !(2..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("hull check needs k in {{2, 3}}, got {k}")));
    }
    let minima = minimal_vectors(field, w, None, prec, budget)?;
    let mu_hi = minima.mu.to_interval(prec.bits).hi().to_rational();
    let g = gram_matrix(field, w, None, prec)?;
    let all = enumerate_all(&g, &(mu_hi * BigRational::from_integer(radius_factor.into())), budget, prec.bits)?;

    // Sigma depends only on alpha * conj(alpha).
    let mut points: BTreeMap<Vec<BigInt>, Point> = BTreeMap::new();
    let mut key_of = |a: &FieldElement| -> Result<Vec<BigInt>> {
        let beta = a * &a.conj();
        let key = beta.coords().to_vec();
        if !points.contains_key(&key) {
            let s = sigma_at(a, prec.bits)?;
            let mid = s.values().iter().map(|v| v.mid().to_rational()).collect();
            let rad = s.values().iter().map(|v| v.radius().to_rational()).max().unwrap();
            points.insert(key.clone(), Point { mid, rad });
        }
        Ok(key)
    };
    let mut minimizer_keys = Vec::new();
    for v in &minima.vectors {
        minimizer_keys.push(key_of(&lattice_element(field, None, v))?);
    }
    for (v, _) in &all.vectors {
        key_of(&lattice_element(field, None, v))?;
    }
    minimizer_keys.sort();
    minimizer_keys.dedup();

    let mut verdict = HullCheck::Consistent;
    for key in &minimizer_keys {
        let p = &points[key];
        let others: Vec<&Point> = points.iter().filter(|(k2, _)| *k2 != key).map(|(_, q)| q).collect();
        match on_boundary(p, &others, k) {
            HullCheck::Consistent => {}
            HullCheck::Violated => return Ok(HullCheck::Violated),
            HullCheck::Inconclusive => verdict = HullCheck::Inconclusive,
        }
    }
    Ok(verdict)
}

/// Random positive weights with entries `a/b`, `1 <= a, b <= 9`.
pub fn random_weights(rng: &mut impl Rng, k: usize) -> Weights {
    Weights::new(
        (0..k)
            .map(|_| BigRational::new(rng.gen_range(1..=9i64).into(), rng.gen_range(1..=9i64).into()))
            .collect(),
    )
    .expect("positive")
}

/// Runs [`hull_check_weights`] for `trials` seeded random weight vectors.
pub fn hull_consistency(
    field: &Arc<CMField>,
    radius_factor: u32,
    trials: usize,
    seed: u64,
    prec: &PrecisionConfig,
    budget: u64,
) -> Result<HullCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdict = HullCheck::Consistent;
    for _ in 0..trials {
        let w = random_weights(&mut rng, field.half_degree());
        match hull_check_weights(field, &w, radius_factor, prec, budget)? {
            HullCheck::Consistent => {}
            HullCheck::Violated => return Ok(HullCheck::Violated),
            HullCheck::Inconclusive => verdict = HullCheck::Inconclusive,
        }
    }
    Ok(verdict)
}
