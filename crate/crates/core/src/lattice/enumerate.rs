//! Fincke-Pohst enumeration of all lattice vectors below a norm radius.
//!
//! The search runs in floating point on an LLL-reduced basis with a small
//! radius slack; every candidate is then rechecked exactly (or with intervals
//! for interval Grams), so the returned sets are exact.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::gram::{GramMatrix, LatticeNorm};
use crate::lattice::lll::lll_reduce;
use crate::linalg::quadratic_form_decomposition;

/// Default cap on the number of search-tree nodes.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

const FLUSH: u64 = 4096;

struct Search<'a> {
    n: usize,
    d: Vec<f64>,
    mu: Vec<Vec<f64>>,
    t: &'a [Vec<i64>],
    radius: f64,
    budget: u64,
    nodes: &'a AtomicU64,
    abort: &'a AtomicBool,
}

struct Cursor {
    y: Vec<i64>,
    x: Vec<i64>,
    local: u64,
}

impl Search<'_> {
    fn tick(&self, c: &mut Cursor) -> bool {
        c.local += 1;
        if c.local >= FLUSH {
            let total = self.nodes.fetch_add(c.local, Ordering::Relaxed) + c.local;
            c.local = 0;
            if total > self.budget {
                self.abort.store(true, Ordering::Relaxed);
            }
        }
        !self.abort.load(Ordering::Relaxed)
    }

    fn finish(&self, c: &mut Cursor) {
        let total = self.nodes.fetch_add(c.local, Ordering::Relaxed) + c.local;
        c.local = 0;
        if total > self.budget {
            self.abort.store(true, Ordering::Relaxed);
        }
    }

    fn emit<T>(&self, c: &mut Cursor, acc: &mut T, visit: &(impl Fn(&mut T, &[i64]) + Sync)) {
        if c.y.iter().all(|&v| v == 0) {
            return;
        }
        for (i, xi) in c.x.iter_mut().enumerate() {
            *xi = self.t[i].iter().zip(&c.y).map(|(a, b)| a * b).sum();
        }
        visit(acc, &c.x);
    }

    /// Descends from level `i` with `rem` of the radius left.
    fn descend<T>(
        &self,
        i: usize,
        rem: f64,
        c: &mut Cursor,
        acc: &mut T,
        visit: &(impl Fn(&mut T, &[i64]) + Sync),
    ) {
        let center: f64 = -(i + 1..self.n).map(|j| self.mu[i][j] * c.y[j] as f64).sum::<f64>();
        let half = (rem.max(0.0) / self.d[i]).sqrt();
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        for v in lo..=hi {
            if !self.tick(c) {
                return;
            }
            let diff = v as f64 - center;
            let r = rem - self.d[i] * diff * diff;
            if r < 0.0 {
                continue;
            }
            c.y[i] = v;
            if i == 0 {
                self.emit(c, acc, visit);
            } else {
                self.descend(i - 1, r, c, acc, visit);
            }
        }
        c.y[i] = 0;
    }
}

/// Visits every nonzero lattice vector (in original coordinates) whose
/// floating-point norm is at most `radius` plus a small slack. Candidates near
/// the boundary may exceed `radius`; callers recheck exactly.
///
/// Each top-level branch folds into its own accumulator created by `init`;
/// accumulators are returned in branch order together with the node count.
pub fn enumerate_fold<T: Send>(
    g: &GramMatrix,
    radius: f64,
    budget: u64,
    init: impl Fn() -> T + Sync,
    visit: impl Fn(&mut T, &[i64]) + Sync,
) -> Result<(Vec<T>, u64)> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let (reduced, t) = lll_reduce(g)?;
    let (d, mu) = quadratic_form_decomposition(&reduced.to_f64()).ok_or(Error::NotPositiveDefinite)?;
    let n = g.dim();
    let nodes = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let search = Search {
        n,
        d,
        mu,
        t: &t,
        radius: radius * (1.0 + 1e-9) + 1e-9,
        budget,
        nodes: &nodes,
        abort: &abort,
    };
    let top = n - 1;
    let half = (search.radius / search.d[top]).sqrt();
    let span = half.floor() as i64;
    let results: Vec<T> = (-span..=span)
        .into_par_iter()
        .map(|v| {
            let mut acc = init();
            let mut c = Cursor {
                y: vec![0; n],
                x: vec![0; n],
                local: 0,
            };
            if search.tick(&mut c) {
                let r = search.radius - search.d[top] * (v * v) as f64;
                if r >= 0.0 {
                    c.y[top] = v;
                    if top == 0 {
                        search.emit(&mut c, &mut acc, &visit);
                    } else {
                        search.descend(top - 1, r, &mut c, &mut acc, &visit);
                    }
                }
            }
            search.finish(&mut c);
            acc
        })
        .collect();
    if abort.load(Ordering::Relaxed) {
        return Err(Error::NodeBudgetExceeded(budget));
    }
    Ok((results, nodes.load(Ordering::Relaxed)))
}

/// Every nonzero vector with norm at most `radius`, with its norm.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub vectors: Vec<(Vec<i64>, LatticeNorm)>,
    pub radius: BigRational,
    pub nodes: u64,
}

/// True when `norm <= radius` holds (exact) or cannot be excluded (interval).
fn within(norm: &LatticeNorm, radius: &BigRational) -> bool {
    match norm {
        LatticeNorm::Exact(q) => q <= radius,
        LatticeNorm::Interval(i) => !i.certainly_gt_rational(radius),
    }
}

/// All nonzero `v` with `v^T G v <= radius`, sorted lexicographically.
pub fn enumerate_all(g: &GramMatrix, radius: &BigRational, budget: u64, bits: u32) -> Result<Enumeration> {
    if !radius.is_positive() {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let r = radius.to_f64().unwrap_or(f64::INFINITY);
    let (parts, nodes) = enumerate_fold(g, r, budget, Vec::new, |acc: &mut Vec<Vec<i64>>, x| {
        acc.push(x.to_vec())
    })?;
    let mut vectors: Vec<(Vec<i64>, LatticeNorm)> = parts
        .into_par_iter()
        .flatten()
        .filter_map(|x| {
            let norm = g.norm(&x, bits);
            within(&norm, radius).then_some((x, norm))
        })
        .collect();
    vectors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Enumeration {
        vectors,
        radius: radius.clone(),
        nodes,
    })
}

/// Minimum norm `mu` and the vectors attaining it.
#[derive(Clone, Debug)]
pub struct ShortVectorSet {
    pub mu: LatticeNorm,
    pub vectors: Vec<Vec<i64>>,
    pub radius: BigRational,
    pub nodes: u64,
}

impl ShortVectorSet {
    pub fn count(&self) -> usize {
        self.vectors.len()
    }
}

impl Serialize for ShortVectorSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ShortVectorSet", 5)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("count", &self.vectors.len())?;
        st.serialize_field("vectors", &self.vectors)?;
        st.serialize_field("radius", &self.radius.to_string())?;
        st.serialize_field("nodes", &self.nodes)?;
        st.end()
    }
}

impl Enumeration {
    /// Minimum and minimizers. For interval norms the minimum is the enclosure
    /// `[min lo, min hi]` and every vector whose norm may attain it is kept.
    pub fn minimum(&self) -> Option<ShortVectorSet> {
        let first = self.vectors.first()?;
        let (mu, vectors) = match &first.1 {
            LatticeNorm::Exact(_) => {
                let m = self
                    .vectors
                    .iter()
                    .filter_map(|(_, n)| n.as_exact())
                    .min()
                    .cloned()?;
                let vs = self
                    .vectors
                    .iter()
                    .filter(|(_, n)| n.as_exact() == Some(&m))
                    .map(|(v, _)| v.clone())
                    .collect();
                (LatticeNorm::Exact(m), vs)
            }
            LatticeNorm::Interval(_) => {
                let bits = first.1.to_interval(64).prec();
                let ivs: Vec<_> = self.vectors.iter().map(|(_, n)| n.to_interval(bits)).collect();
                let lo = ivs.iter().map(|i| i.lo().clone()).min()?;
                let hi = ivs.iter().map(|i| i.hi().clone()).min()?;
                let vs = self
                    .vectors
                    .iter()
                    .zip(&ivs)
                    .filter(|(_, i)| *i.lo() <= hi)
                    .map(|((v, _), _)| v.clone())
                    .collect();
                (
                    LatticeNorm::Interval(crate::interval::RealInterval::new(lo, hi, bits)),
                    vs,
                )
            }
        };
        Some(ShortVectorSet {
            mu,
            vectors,
            radius: self.radius.clone(),
            nodes: self.nodes,
        })
    }
}

/// Enumerates below `radius` and extracts the minimum.
pub fn enumerate_short(g: &GramMatrix, radius: &BigRational, budget: u64, bits: u32) -> Result<ShortVectorSet> {
    enumerate_all(g, radius, budget, bits)?
        .minimum()
        .ok_or_else(|| Error::InvalidInput(format!("no nonzero vector of norm at most {radius}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn z2_counts() {
        let g = GramMatrix::from_integers(&[vec![1, 0], vec![0, 1]]).unwrap();
        let e = enumerate_all(&g, &q(2), DEFAULT_BUDGET, 128).unwrap();
        assert_eq!(e.vectors.len(), 8);
        let s = e.minimum().unwrap();
        assert_eq!(s.mu, LatticeNorm::Exact(q(1)));
        assert_eq!(s.count(), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let g = GramMatrix::from_integers(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(
            enumerate_all(&g, &q(400), 1000, 128).unwrap_err(),
            Error::NodeBudgetExceeded(1000)
        );
    }

    #[test]
    fn json_shape() {
        let g = GramMatrix::from_integers(&[vec![2, 1], vec![1, 2]]).unwrap();
        let s = enumerate_short(&g, &q(2), DEFAULT_BUDGET, 128).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["mu"], "2");
        assert_eq!(v["count"], 6);
        assert_eq!(v["vectors"].as_array().unwrap().len(), 6);
    }
}
