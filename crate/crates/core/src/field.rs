//! Exact arithmetic in the ring of integers `Z[zeta_n]` of a cyclotomic field.
//!
//! Elements are integer coordinate vectors in the power basis
//! `1, zeta, ..., zeta^(d-1)` with `d = phi(n)`. Products are reduced modulo the
//! cyclotomic polynomial, so every operation stays exact.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{bareiss_det, solve_rational};

/// Exact rational value (numerator and positive denominator kept coprime).
pub type ExactRational = BigRational;

pub(crate) fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

fn trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact quotient of `a` by a monic polynomial `b`; panics on nonzero remainder.
fn poly_div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() <= db {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
    quot
}

/// Cyclotomic polynomial `Phi_n` as little-endian integer coefficients.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    fn build(n: u64, cache: &mut HashMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
        if let Some(p) = cache.get(&n) {
            return p.clone();
        }
        let mut xn1 = vec![BigInt::zero(); n as usize + 1];
        xn1[0] = BigInt::from(-1);
        xn1[n as usize] = BigInt::one();
        let mut q = xn1;
        for m in 1..n {
            if n.is_multiple_of(m) {
                let pm = build(m, cache);
                q = poly_div_monic(&q, &pm);
            }
        }
        trim(&mut q);
        cache.insert(n, q.clone());
        q
    }
    build(n, &mut HashMap::new())
}

/// Power sums `sum_roots root^i` of `Phi_n` for `i = 0..d`, by Newton's identities.
fn newton_power_sums(phi: &[BigInt]) -> Vec<BigInt> {
    let d = phi.len() - 1;
    // phi = x^d + a_{d-1} x^{d-1} + ... + a_0
    let a = |j: usize| phi[j].clone();
    let mut p = vec![BigInt::zero(); d];
    p[0] = BigInt::from(d as u64);
    for m in 1..d {
        let mut s = BigInt::from(m as u64) * a(d - m);
        for i in 1..m {
            s += a(d - i) * &p[m - i];
        }
        p[m] = -s;
    }
    p
}

/// The cyclotomic CM field `Q(zeta_n)` with its precomputed structure.
pub struct CMField {
    conductor: u64,
    degree: usize,
    phi: Vec<BigInt>,
    /// Reduced coordinates of `zeta^e` for `e = 0..n`.
    powers: Vec<Vec<BigInt>>,
    /// Exponents `m` of the embeddings `zeta -> e^{2 pi i m / n}`, ordered by argument.
    embedding_exponents: Vec<u64>,
    /// `Tr_{F/Q}(zeta^i)` for `i = 0..d`.
    power_traces: Vec<BigInt>,
    pub(crate) embedding_cache: Mutex<HashMap<u32, Arc<crate::embeddings::EmbeddingTable>>>,
}

impl fmt::Debug for CMField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CMField")
            .field("conductor", &self.conductor)
            .field("degree", &self.degree)
            .finish()
    }
}

/// Builds `Q(zeta_n)`.
pub fn make_field(n: u64) -> Result<Arc<CMField>> {
    if n < 3 {
        return Err(Error::InvalidConductor {
            n,
            reason: "conductor must be at least 3".into(),
        });
    }
    if n % 4 == 2 {
        return Err(Error::InvalidConductor {
            n,
            reason: format!("Q(zeta_{n}) = Q(zeta_{}); use conductor {}", n / 2, n / 2),
        });
    }
    let d = euler_phi(n) as usize;
    let phi = cyclotomic_polynomial(n);
    debug_assert_eq!(phi.len(), d + 1);

    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![BigInt::zero(); d];
    cur[0] = BigInt::one();
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce
        let top = cur[d - 1].clone();
        for i in (1..d).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigInt::zero();
        if !top.is_zero() {
            for i in 0..d {
                cur[i] -= &top * &phi[i];
            }
        }
    }
    let embedding_exponents = (1..n)
        .filter(|&m| 2 * m < n && m.gcd(&n) == 1)
        .collect::<Vec<_>>();
    debug_assert_eq!(embedding_exponents.len(), d / 2);
    let power_traces = newton_power_sums(&phi);
    Ok(Arc::new(CMField {
        conductor: n,
        degree: d,
        phi,
        powers,
        embedding_exponents,
        power_traces,
        embedding_cache: Mutex::new(HashMap::new()),
    }))
}

impl CMField {
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Degree `d = phi(n)` of the field over `Q`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number `k = d / 2` of real embeddings of the maximal real subfield.
    pub fn half_degree(&self) -> usize {
        self.degree / 2
    }

    pub fn cyclotomic_polynomial(&self) -> &[BigInt] {
        &self.phi
    }

    pub fn embedding_exponents(&self) -> &[u64] {
        &self.embedding_exponents
    }

    /// Number of roots of unity in the field.
    pub fn torsion_order(&self) -> u64 {
        if self.conductor.is_multiple_of(2) {
            self.conductor
        } else {
            2 * self.conductor
        }
    }

    /// `Tr_{F/Q}(zeta^i)` for `0 <= i < d`.
    pub fn power_traces(&self) -> &[BigInt] {
        &self.power_traces
    }

    pub(crate) fn power_coords(&self, e: u64) -> &[BigInt] {
        &self.powers[(e % self.conductor) as usize]
    }
}

/// An element of `Z[zeta_n]` in power-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<CMField>,
    coords: Vec<BigInt>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.conductor == other.field.conductor && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.conductor.hash(state);
        self.coords.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement[n={}]({})", self.field.conductor, self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FieldElement {
    pub fn from_coords(field: &Arc<CMField>, coords: Vec<BigInt>) -> Result<Self> {
        if coords.len() != field.degree {
            return Err(Error::DimensionMismatch {
                expected: field.degree,
                actual: coords.len(),
            });
        }
        Ok(FieldElement {
            field: Arc::clone(field),
            coords,
        })
    }

    pub fn from_i64s(field: &Arc<CMField>, coords: &[i64]) -> Result<Self> {
        FieldElement::from_coords(field, coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Parses the comma-separated coordinate form, e.g. `"3,0,1,1"`.
    pub fn parse(field: &Arc<CMField>, text: &str) -> Result<Self> {
        let coords = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("bad coordinate {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FieldElement::from_coords(field, coords)
    }

    /// Reduces an arbitrary-degree integer polynomial in `zeta`.
    pub fn from_poly(field: &Arc<CMField>, poly: &[BigInt]) -> Self {
        let mut coords = vec![BigInt::zero(); field.degree];
        for (e, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, p) in coords.iter_mut().zip(field.power_coords(e as u64)) {
                *acc += c * p;
            }
        }
        FieldElement {
            field: Arc::clone(field),
            coords,
        }
    }

    pub fn zero(field: &Arc<CMField>) -> Self {
        FieldElement {
            field: Arc::clone(field),
            coords: vec![BigInt::zero(); field.degree],
        }
    }

    pub fn one(field: &Arc<CMField>) -> Self {
        FieldElement::integer(field, 1)
    }

    pub fn integer(field: &Arc<CMField>, c: i64) -> Self {
        let mut e = FieldElement::zero(field);
        e.coords[0] = BigInt::from(c);
        e
    }

    /// `zeta^e`, reduced.
    pub fn zeta_pow(field: &Arc<CMField>, e: u64) -> Self {
        FieldElement {
            field: Arc::clone(field),
            coords: field.power_coords(e).to_vec(),
        }
    }

    pub fn field(&self) -> &Arc<CMField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Coordinates as `i64`, if they all fit.
    pub fn coords_i64(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|c| c.to_i64()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    fn check_same(&self, other: &FieldElement) -> Result<()> {
        if self.field.conductor != other.field.conductor {
            return Err(Error::FieldMismatch(self.field.conductor, other.field.conductor));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.checked_add(&-other)
    }

    /// Exact product reduced modulo `Phi_n`.
    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        let prod = poly_mul(&self.coords, &other.coords);
        Ok(FieldElement::from_poly(&self.field, &prod))
    }

    pub fn scale(&self, c: &BigInt) -> FieldElement {
        FieldElement {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut result = FieldElement::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Image under the automorphism `zeta -> zeta^c` (requires `gcd(c, n) = 1`).
    pub fn automorphism(&self, c: u64) -> FieldElement {
        let n = self.field.conductor;
        debug_assert_eq!(c.gcd(&n), 1);
        let mut coords = vec![BigInt::zero(); self.field.degree];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = (i as u64 * c) % n;
            for (acc, p) in coords.iter_mut().zip(self.field.power_coords(e)) {
                *acc += a * p;
            }
        }
        FieldElement {
            field: Arc::clone(&self.field),
            coords,
        }
    }

    /// Complex conjugation `zeta^j -> zeta^{-j}`.
    pub fn conj(&self) -> FieldElement {
        self.automorphism(self.field.conductor - 1)
    }

    /// Exact absolute trace `Tr_{F/Q}`.
    pub fn trace(&self) -> BigInt {
        self.coords
            .iter()
            .zip(&self.field.power_traces)
            .map(|(a, t)| a * t)
            .sum()
    }

    /// Exact absolute norm `N_{F/Q}`, computed as the resultant of `Phi_n` and
    /// the coordinate polynomial.
    pub fn norm(&self) -> BigInt {
        let mut g = self.coords.clone();
        trim(&mut g);
        if g.len() == 1 {
            return g[0].pow(self.field.degree as u32);
        }
        resultant(&self.field.phi, &g)
    }

    /// [`norm`](Self::norm) as an exact rational.
    pub fn field_norm(&self) -> ExactRational {
        BigRational::from_integer(self.norm())
    }

    /// True iff the element has norm one.
    pub fn is_unit(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.norm().is_one())
    }

    /// Matrix of multiplication by `self`: column `j` holds `self * zeta^j`.
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigInt>> {
        let d = self.field.degree;
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let mut shifted = vec![BigInt::zero(); j];
            shifted.extend(self.coords.iter().cloned());
            cols.push(FieldElement::from_poly(&self.field, &shifted).coords);
        }
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Exact quotient `self / b`; fails if `b` does not divide `self` in `Z[zeta_n]`.
    pub fn exact_divide(&self, b: &FieldElement) -> Result<FieldElement> {
        self.check_same(b)?;
        if b.is_zero() {
            return Err(Error::ZeroElement);
        }
        let m: Vec<Vec<BigRational>> = b
            .multiplication_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let rhs: Vec<BigRational> = self.coords.iter().cloned().map(BigRational::from_integer).collect();
        let x = solve_rational(&m, &rhs).ok_or(Error::ZeroElement)?;
        if x.iter().any(|v| !v.is_integer()) {
            return Err(Error::NotDivisible);
        }
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coords: x.into_iter().map(|v| v.to_integer()).collect(),
        })
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self) -> Result<FieldElement> {
        FieldElement::one(&self.field).exact_divide(self)
    }

    /// Max absolute coordinate.
    pub fn height(&self) -> BigInt {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

/// Serializes an integer as a JSON number when it fits in `i64`, else as a string.
pub struct IntJson<'a>(pub &'a BigInt);

impl serde::Serialize for IntJson<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

/// Resultant `Res(f, g)` via the Sylvester determinant.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut syl = vec![vec![BigInt::zero(); size]; size];
    // rows 0..n: shifted copies of f (highest degree first)
    for r in 0..n {
        for (i, c) in f.iter().rev().enumerate() {
            syl[r][r + i] = c.clone();
        }
    }
    for r in 0..m {
        for (i, c) in g.iter().rev().enumerate() {
            syl[n + r][r + i] = c.clone();
        }
    }
    bareiss_det(&syl)
}

impl Add for &FieldElement {
    type Output = FieldElement;
    /// Panics if the operands live in different fields.
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(f: &Arc<CMField>, c: &[i64]) -> FieldElement {
        FieldElement::from_i64s(f, c).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn make_field_examples() {
        let f5 = make_field(5).unwrap();
        assert_eq!((f5.degree(), f5.half_degree()), (4, 2));
        assert_eq!(f5.cyclotomic_polynomial(), big(&[1, 1, 1, 1, 1]).as_slice());
        let f7 = make_field(7).unwrap();
        assert_eq!((f7.degree(), f7.half_degree()), (6, 3));
        let f4 = make_field(4).unwrap();
        assert_eq!((f4.degree(), f4.half_degree()), (2, 1));
        assert_eq!(f4.cyclotomic_polynomial(), big(&[1, 0, 1]).as_slice());
        assert_eq!(
            make_field(12).unwrap().cyclotomic_polynomial(),
            big(&[1, 0, -1, 0, 1]).as_slice()
        );
    }

    #[test]
    fn make_field_rejects() {
        assert!(matches!(make_field(2), Err(Error::InvalidConductor { .. })));
        match make_field(10) {
            Err(Error::InvalidConductor { reason, .. }) => assert!(reason.contains("conductor 5")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cyclotomic_divides_xn_minus_one() {
        for n in [3u64, 5, 7, 8, 9, 11, 12, 15, 16, 20, 21] {
            let phi = cyclotomic_polynomial(n);
            assert_eq!(phi.len() as u64 - 1, euler_phi(n));
            let mut xn1 = vec![BigInt::zero(); n as usize + 1];
            xn1[0] = BigInt::from(-1);
            xn1[n as usize] = BigInt::one();
            // poly_div_monic asserts an exact division
            let _ = poly_div_monic(&xn1, &phi);
        }
    }

    #[test]
    fn mul_examples() {
        let f = make_field(5).unwrap();
        let a = el(&f, &[1, -1, 0, 0]);
        assert_eq!(&a * &FieldElement::one(&f), a);
        // (1 - z)(1 - z^4) = 3 + z^2 + z^3
        let b = &FieldElement::one(&f) - &FieldElement::zeta_pow(&f, 4);
        assert_eq!((&a * &b).coords(), big(&[3, 0, 1, 1]).as_slice());
        let p = &FieldElement::zeta_pow(&f, 1) * &FieldElement::zeta_pow(&f, 4);
        assert!(p.is_one());
        let g = make_field(7).unwrap();
        assert!(matches!(a.checked_mul(&FieldElement::one(&g)), Err(Error::FieldMismatch(5, 7))));
    }

    #[test]
    fn conj_examples() {
        let f = make_field(5).unwrap();
        assert!(FieldElement::one(&f).conj().is_one());
        let z = FieldElement::zeta_pow(&f, 1);
        assert_eq!(z.conj().coords(), big(&[-1, -1, -1, -1]).as_slice());
    }

    #[test]
    fn norm_examples() {
        let f = make_field(5).unwrap();
        for j in 0..5 {
            assert_eq!(FieldElement::zeta_pow(&f, j).norm(), BigInt::one());
        }
        assert_eq!(el(&f, &[1, -1, 0, 0]).norm(), BigInt::from(5));
        assert_eq!(el(&f, &[3, 0, 0, 0]).norm(), BigInt::from(81));
        assert_eq!(FieldElement::zero(&f).norm(), BigInt::zero());
    }

    #[test]
    fn is_unit_examples() {
        let f = make_field(5).unwrap();
        assert!(FieldElement::zeta_pow(&f, 1).is_unit().unwrap());
        assert!(el(&f, &[1, 1, 0, 0]).is_unit().unwrap());
        assert!(!el(&f, &[1, -1, 0, 0]).is_unit().unwrap());
        assert_eq!(FieldElement::zero(&f).is_unit(), Err(Error::ZeroElement));
    }

    #[test]
    fn exact_divide_examples() {
        let f = make_field(5).unwrap();
        let one_minus = |e: u64| &FieldElement::one(&f) - &FieldElement::zeta_pow(&f, e);
        let q = one_minus(2).exact_divide(&one_minus(1)).unwrap();
        assert_eq!(q.coords(), big(&[1, 1, 0, 0]).as_slice());
        let a = el(&f, &[4, -2, 7, 1]);
        assert_eq!(a.exact_divide(&FieldElement::one(&f)).unwrap(), a);
        assert_eq!(FieldElement::one(&f).exact_divide(&one_minus(1)), Err(Error::NotDivisible));
        assert_eq!(a.exact_divide(&FieldElement::zero(&f)), Err(Error::ZeroElement));

        let g = make_field(7).unwrap();
        let one_minus7 = |e: u64| &FieldElement::one(&g) - &FieldElement::zeta_pow(&g, e);
        let q = one_minus7(3).exact_divide(&one_minus7(1)).unwrap();
        assert_eq!(q.coords(), big(&[1, 1, 1, 0, 0, 0]).as_slice());
    }

    #[test]
    fn parse_and_display() {
        let f = make_field(5).unwrap();
        let a = FieldElement::parse(&f, "3, 0,1,1").unwrap();
        assert_eq!(a.to_string(), "3,0,1,1");
        assert!(matches!(FieldElement::parse(&f, "1,2"), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(FieldElement::parse(&f, "1,x,0,0"), Err(Error::Parse(_))));
    }

    /// Ramanujan sum c_n(i): sum of the i-th powers of the primitive n-th roots.
    fn ramanujan_sum(n: u64, i: u64) -> i64 {
        let mobius = |mut m: u64| -> i64 {
            let mut r = 1;
            let mut p = 2;
            while p * p <= m {
                if m.is_multiple_of(p) {
                    m /= p;
                    if m.is_multiple_of(p) {
                        return 0;
                    }
                    r = -r;
                }
                p += 1;
            }
            if m > 1 {
                r = -r;
            }
            r
        };
        let g = n.gcd(&i);
        (1..=g)
            .filter(|dd| g.is_multiple_of(*dd))
            .map(|dd| mobius(n / dd) * dd as i64)
            .sum()
    }

    #[test]
    fn newton_traces_match_ramanujan_sums() {
        for n in [3u64, 4, 5, 7, 8, 9, 12, 15, 16] {
            let f = make_field(n).unwrap();
            for (i, t) in f.power_traces().iter().enumerate() {
                assert_eq!(*t, BigInt::from(ramanujan_sum(n, i as u64)), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn resultant_matches_multiplication_determinant() {
        let f = make_field(7).unwrap();
        let a = el(&f, &[2, -1, 0, 3, 1, -2]);
        assert_eq!(a.norm(), bareiss_det(&a.multiplication_matrix()));
    }
}
