//! Gram matrices of weighted trace forms on `Z[zeta_n]` and its principal ideals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::embeddings::{complex_embeddings, PrecisionConfig, Weights};
use crate::error::{Error, Result};
use crate::field::{CMField, FieldElement};
use crate::interval::RealInterval;
use crate::linalg::leading_minors_rational;

/// Entries of a Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum GramEntries {
    Exact(Vec<Vec<BigRational>>),
    Interval(Vec<Vec<RealInterval>>),
}

/// Symmetric positive definite Gram matrix, with the scale factor already applied.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    entries: GramEntries,
    scale: BigRational,
}

impl GramMatrix {
    pub fn exact(entries: Vec<Vec<BigRational>>) -> Result<Self> {
        let g = GramMatrix {
            entries: GramEntries::Exact(entries),
            scale: BigRational::one(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_integers(entries: &[Vec<i64>]) -> Result<Self> {
        GramMatrix::exact(
            entries
                .iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn interval(entries: Vec<Vec<RealInterval>>) -> Result<Self> {
        let g = GramMatrix {
            entries: GramEntries::Interval(entries),
            scale: BigRational::one(),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        let square = match &self.entries {
            GramEntries::Exact(m) => m.iter().all(|r| r.len() == n),
            GramEntries::Interval(m) => m.iter().all(|r| r.len() == n),
        };
        if !square || n == 0 {
            return Err(Error::InvalidInput("Gram matrix must be square and nonempty".into()));
        }
        let symmetric = match &self.entries {
            GramEntries::Exact(m) => (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i])),
            GramEntries::Interval(m) => (0..n).all(|i| (0..i).all(|j| m[i][j].overlaps(&m[j][i]))),
        };
        if !symmetric {
            return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
        }
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match &self.entries {
            GramEntries::Exact(m) => m.len(),
            GramEntries::Interval(m) => m.len(),
        }
    }

    pub fn entries(&self) -> &GramEntries {
        &self.entries
    }

    pub fn exact_entries(&self) -> Option<&Vec<Vec<BigRational>>> {
        match &self.entries {
            GramEntries::Exact(m) => Some(m),
            GramEntries::Interval(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, GramEntries::Exact(_))
    }

    /// Factor by which the underlying form has been multiplied.
    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    /// `c * G` for a positive rational `c`.
    pub fn scaled(&self, c: &BigRational) -> GramMatrix {
        assert!(c.is_positive(), "scale must be positive");
        let entries = match &self.entries {
            GramEntries::Exact(m) => {
                GramEntries::Exact(m.iter().map(|r| r.iter().map(|v| v * c).collect()).collect())
            }
            GramEntries::Interval(m) => GramEntries::Interval(
                m.iter().map(|r| r.iter().map(|v| v.mul_rational(c)).collect()).collect(),
            ),
        };
        GramMatrix {
            entries,
            scale: &self.scale * c,
        }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        match &self.entries {
            GramEntries::Exact(m) => m
                .iter()
                .map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
                .collect(),
            GramEntries::Interval(m) => m.iter().map(|r| r.iter().map(|v| v.mid_f64()).collect()).collect(),
        }
    }

    /// Interval version of the entries (exact entries become tight enclosures).
    pub fn to_intervals(&self, bits: u32) -> Vec<Vec<RealInterval>> {
        match &self.entries {
            GramEntries::Exact(m) => m
                .iter()
                .map(|r| r.iter().map(|v| RealInterval::from_rational(v, bits)).collect())
                .collect(),
            GramEntries::Interval(m) => m.clone(),
        }
    }

    fn is_positive_definite(&self) -> bool {
        match &self.entries {
            GramEntries::Exact(m) => leading_minors_rational(m).iter().all(|v| v.is_positive()),
            GramEntries::Interval(m) => interval_ldl(m).is_some(),
        }
    }

    /// Exact `v^T G v`; `None` for interval Grams.
    pub fn norm_exact(&self, v: &[i64]) -> Option<BigRational> {
        let m = self.exact_entries()?;
        let mut acc = BigRational::zero();
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            let mut row = BigRational::zero();
            for (j, &vj) in v.iter().enumerate() {
                if vj != 0 {
                    row += &m[i][j] * BigInt::from(vj);
                }
            }
            acc += row * BigInt::from(vi);
        }
        Some(acc)
    }

    /// Enclosure of `v^T G v`.
    pub fn norm_interval(&self, v: &[i64], bits: u32) -> RealInterval {
        match &self.entries {
            GramEntries::Exact(_) => RealInterval::from_rational(&self.norm_exact(v).unwrap(), bits),
            GramEntries::Interval(m) => {
                let mut acc = RealInterval::zero(bits);
                for (i, &vi) in v.iter().enumerate() {
                    if vi == 0 {
                        continue;
                    }
                    let mut row = RealInterval::zero(bits);
                    for (j, &vj) in v.iter().enumerate() {
                        if vj != 0 {
                            row = &row + &(&m[i][j] * &RealInterval::from_int(vj, bits));
                        }
                    }
                    acc = &acc + &(&row * &RealInterval::from_int(vi, bits));
                }
                acc
            }
        }
    }

    /// Norm of `v` as a [`LatticeNorm`].
    pub fn norm(&self, v: &[i64], bits: u32) -> LatticeNorm {
        match self.norm_exact(v) {
            Some(q) => LatticeNorm::Exact(q),
            None => LatticeNorm::Interval(self.norm_interval(v, bits)),
        }
    }

    /// Congruence transform `T^T G T` for an integer matrix `T`.
    pub fn transform(&self, t: &[Vec<i64>]) -> GramMatrix {
        let n = self.dim();
        let entries = match &self.entries {
            GramEntries::Exact(m) => {
                let mut out = vec![vec![BigRational::zero(); n]; n];
                for a in 0..n {
                    for b in a..n {
                        let mut s = BigRational::zero();
                        for i in 0..n {
                            if t[i][a] == 0 {
                                continue;
                            }
                            for j in 0..n {
                                if t[j][b] != 0 {
                                    s += &m[i][j] * BigInt::from(t[i][a] * t[j][b]);
                                }
                            }
                        }
                        out[a][b] = s.clone();
                        out[b][a] = s;
                    }
                }
                GramEntries::Exact(out)
            }
            GramEntries::Interval(m) => {
                let bits = m[0][0].prec();
                let mut out = vec![vec![RealInterval::zero(bits); n]; n];
                for a in 0..n {
                    for b in a..n {
                        let mut s = RealInterval::zero(bits);
                        for i in 0..n {
                            if t[i][a] == 0 {
                                continue;
                            }
                            for j in 0..n {
                                if t[j][b] != 0 {
                                    let c = RealInterval::from_int(t[i][a] * t[j][b], bits);
                                    s = &s + &(&m[i][j] * &c);
                                }
                            }
                        }
                        out[a][b] = s.clone();
                        out[b][a] = s;
                    }
                }
                GramEntries::Interval(out)
            }
        };
        GramMatrix {
            entries,
            scale: self.scale.clone(),
        }
    }

    /// Certified lower bounds on the Gram-Schmidt squared lengths `b_i^*`.
    pub fn gso_lower_bounds(&self, bits: u32) -> Option<Vec<f64>> {
        let d = interval_ldl(&self.to_intervals(bits))?;
        Some(d.iter().map(|v| v.lo_f64() * (1.0 - 1e-12)).collect())
    }
}

/// Diagonal of the interval `LDL^T` factorization; `None` unless every pivot
/// is certified positive.
pub fn interval_ldl(m: &[Vec<RealInterval>]) -> Option<Vec<RealInterval>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        let p = a[k][k].clone();
        if !p.is_positive() {
            return None;
        }
        for i in k + 1..n {
            let f = a[i][k].checked_div(&p)?;
            for j in k + 1..n {
                let v = &f * &a[k][j];
                a[i][j] = &a[i][j] - &v;
            }
        }
        d.push(p);
    }
    Some(d)
}

/// A lattice norm value: exact for rational Grams, certified otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeNorm {
    Exact(BigRational),
    Interval(RealInterval),
}

impl LatticeNorm {
    pub fn to_interval(&self, bits: u32) -> RealInterval {
        match self {
            LatticeNorm::Exact(q) => RealInterval::from_rational(q, bits),
            LatticeNorm::Interval(i) => i.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            LatticeNorm::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            LatticeNorm::Interval(i) => i.mid_f64(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            LatticeNorm::Exact(q) => Some(q),
            LatticeNorm::Interval(_) => None,
        }
    }
}

impl std::fmt::Display for LatticeNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LatticeNorm::Exact(q) => write!(f, "{q}"),
            LatticeNorm::Interval(i) => write!(f, "{i}"),
        }
    }
}

impl serde::Serialize for LatticeNorm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LatticeNorm::Exact(q) => s.serialize_str(&q.to_string()),
            LatticeNorm::Interval(i) => i.serialize(s),
        }
    }
}

/// Basis `kappa * zeta^i` (or `zeta^i`) of the principal ideal `(kappa)`.
pub fn ideal_basis(field: &std::sync::Arc<CMField>, kappa: Option<&FieldElement>) -> Vec<FieldElement> {
    (0..field.degree() as u64)
        .map(|i| {
            let z = FieldElement::zeta_pow(field, i);
            match kappa {
                Some(k) => k * &z,
                None => z,
            }
        })
        .collect()
}

/// Gram of the weighted norm on `(kappa)` in the basis `kappa * zeta^i`.
///
/// Equal weights `c` give the exact form `c/2 * Tr(b_i conj b_j)`; other weights
/// give interval entries.
pub fn gram_matrix(
    field: &std::sync::Arc<CMField>,
    w: &Weights,
    kappa: Option<&FieldElement>,
    prec: &PrecisionConfig,
) -> Result<GramMatrix> {
    w.check_len(field.half_degree())?;
    if kappa.is_some_and(FieldElement::is_zero) {
        return Err(Error::ZeroElement);
    }
    let basis = ideal_basis(field, kappa);
    match w.common_value() {
        Some(c) => {
            let d = basis.len();
            let half = c / BigRational::from_integer(2.into());
            let conj: Vec<FieldElement> = basis.iter().map(FieldElement::conj).collect();
            let mut m = vec![vec![BigRational::zero(); d]; d];
            for i in 0..d {
                for j in i..d {
                    let t = (&basis[i] * &conj[j]).trace();
                    let v = &half * BigRational::from_integer(t);
                    m[i][j] = v.clone();
                    m[j][i] = v;
                }
            }
            GramMatrix::exact(m)
        }
        None => {
            let bits = prec.bits;
            gram_matrix_real(field, &w.to_intervals(bits), kappa, bits)
        }
    }
}

/// Interval Gram `sum_m x_m Re(b_i(zeta_m) conj(b_j(zeta_m)))` for real weights.
pub fn gram_matrix_real(
    field: &std::sync::Arc<CMField>,
    w: &[RealInterval],
    kappa: Option<&FieldElement>,
    bits: u32,
) -> Result<GramMatrix> {
    if w.len() != field.half_degree() {
        return Err(Error::DimensionMismatch {
            expected: field.half_degree(),
            actual: w.len(),
        });
    }
    let basis = ideal_basis(field, kappa);
    let images: Vec<Vec<(RealInterval, RealInterval)>> =
        basis.iter().map(|b| complex_embeddings(b, bits)).collect();
    let d = basis.len();
    let mut m = vec![vec![RealInterval::zero(bits); d]; d];
    for i in 0..d {
        for j in i..d {
            let mut s = RealInterval::zero(bits);
            for (mi, x) in w.iter().enumerate() {
                let (ri, ii) = &images[i][mi];
                let (rj, ij) = &images[j][mi];
                let re = &(ri * rj) + &(ii * ij);
                s = &s + &(x * &re);
            }
            m[i][j] = s.clone();
            m[j][i] = s;
        }
    }
    GramMatrix::interval(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn o_f_p5_equal_weights() {
        let f = make_field(5).unwrap();
        let g = gram_matrix(&f, &Weights::equal(2), None, &PrecisionConfig::default()).unwrap();
        let m = g.exact_entries().unwrap();
        for i in 0..4 {
            assert_eq!(m[i][i], q(2));
        }
        assert_eq!(g.norm_exact(&[1, 0, 0, 0]), Some(q(2)));
    }

    #[test]
    fn ideal_p5_norm_of_generator() {
        let f = make_field(5).unwrap();
        let k = FieldElement::from_i64s(&f, &[1, -1, 0, 0]).unwrap();
        let g = gram_matrix(&f, &Weights::equal(2), Some(&k), &PrecisionConfig::default()).unwrap();
        assert_eq!(g.norm_exact(&[1, 0, 0, 0]), Some(q(5)));
    }

    #[test]
    fn torsion_norm_is_k() {
        for n in [5u64, 7, 8, 9, 11, 12] {
            let f = make_field(n).unwrap();
            let k = f.half_degree();
            let g = gram_matrix(&f, &Weights::equal(k), None, &PrecisionConfig::default()).unwrap();
            let m = g.exact_entries().unwrap();
            for i in 0..f.degree() {
                assert_eq!(m[i][i], q(k as i64));
                for j in 0..f.degree() {
                    assert!((&m[i][j] * q(2)).is_integer());
                }
            }
        }
    }

    #[test]
    fn interval_gram_matches_exact_for_equal_weights() {
        let f = make_field(7).unwrap();
        let k = FieldElement::from_i64s(&f, &[1, -1, 0, 0, 0, 0]).unwrap();
        let p = PrecisionConfig::default();
        let exact = gram_matrix(&f, &Weights::equal(3), Some(&k), &p).unwrap();
        let real = gram_matrix_real(&f, &Weights::equal(3).to_intervals(128), Some(&k), 128).unwrap();
        let (GramEntries::Exact(a), GramEntries::Interval(b)) = (exact.entries(), real.entries()) else {
            panic!("unexpected entry kinds");
        };
        for i in 0..6 {
            for j in 0..6 {
                assert!(b[i][j].contains_rational(&a[i][j]));
            }
        }
    }

    #[test]
    fn weighted_gram_agrees_with_weighted_norm() {
        let f = make_field(5).unwrap();
        let p = PrecisionConfig::default();
        let w = Weights::parse("3,1").unwrap();
        let g = gram_matrix(&f, &w, None, &p).unwrap();
        let v = [2, -1, 0, 3];
        let a = FieldElement::from_i64s(&f, &v).unwrap();
        let wn = crate::embeddings::weighted_norm(&f, &a, &w, &p).unwrap();
        assert!(g.norm_interval(&v, 128).overlaps(&wn));
    }

    #[test]
    fn rejects_indefinite() {
        assert_eq!(
            GramMatrix::from_integers(&[vec![1, 2], vec![2, 1]]).unwrap_err(),
            Error::NotPositiveDefinite
        );
    }
}
