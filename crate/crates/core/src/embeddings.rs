//! Real embeddings of the maximal real subfield, the Sigma map and weighted norms.
//!
//! Embedding `j` sends `zeta` to `exp(2 pi i m_j / n)` where `m_1 < m_2 < ...`
//! run over the residues coprime to `n` below `n / 2`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{CMField, FieldElement};
use crate::interval::{parse_decimal, RealInterval};

/// Working precision and the accuracy demanded of outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionConfig {
    pub bits: u32,
    pub max_rel_radius: f64,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            bits: 128,
            max_rel_radius: 2f64.powi(-64),
        }
    }
}

impl PrecisionConfig {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < 53 {
            return Err(Error::InvalidInput(format!("precision must be at least 53 bits, got {bits}")));
        }
        Ok(PrecisionConfig {
            bits,
            ..PrecisionConfig::default()
        })
    }

    pub fn doubled(&self) -> Self {
        PrecisionConfig {
            bits: self.bits * 2,
            max_rel_radius: self.max_rel_radius,
        }
    }

    pub fn accepts(&self, x: &RealInterval) -> bool {
        x.relative_radius() <= self.max_rel_radius
    }
}

/// Runs `f` at the configured precision; if `f` fails with a precision error
/// or its output is rejected by `good`, runs once more at doubled precision.
pub fn with_retry<T>(
    prec: &PrecisionConfig,
    what: &str,
    f: impl Fn(u32) -> Result<T>,
    good: impl Fn(&T) -> bool,
) -> Result<T> {
    for bits in [prec.bits, prec.bits * 2] {
        match f(bits) {
            Ok(v) if good(&v) => return Ok(v),
            Ok(_) | Err(Error::PrecisionExhausted(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PrecisionExhausted(format!(
        "{what}: accuracy not reached at {} bits",
        prec.bits * 2
    )))
}

/// Positive rational weights `x_1, ..., x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights(Vec<BigRational>);

impl Weights {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty weight vector".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_positive()) {
            return Err(Error::InvalidInput(format!("weights must be positive, got {v}")));
        }
        Ok(Weights(values))
    }

    /// All weights equal to one.
    pub fn equal(k: usize) -> Self {
        Weights(vec![BigRational::from_integer(BigInt::from(1)); k])
    }

    pub fn from_i64s(values: &[i64]) -> Result<Self> {
        Weights::new(values.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    /// Parses `"1,1"` or `"3/2,1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .map(|s| parse_decimal(s).ok_or_else(|| Error::Parse(format!("bad weight {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Weights::new(values)
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The common value when all weights coincide.
    pub fn common_value(&self) -> Option<&BigRational> {
        let first = &self.0[0];
        self.0.iter().all(|v| v == first).then_some(first)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_intervals(&self, bits: u32) -> Vec<RealInterval> {
        self.0.iter().map(|v| RealInterval::from_rational(v, bits)).collect()
    }

    pub fn check_len(&self, k: usize) -> Result<()> {
        if self.0.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                actual: self.0.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for Weights {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|v| v.to_string()))
    }
}

/// `cos` and `sin` of `2 pi m e / n` for every embedding `m` and every `e < n`.
pub struct EmbeddingTable {
    pub bits: u32,
    pub cos: Vec<Vec<RealInterval>>,
    pub sin: Vec<Vec<RealInterval>>,
}

/// Cached interval table of root-of-unity values at `bits` precision.
pub fn embedding_table(field: &CMField, bits: u32) -> Arc<EmbeddingTable> {
    if let Some(t) = field.embedding_cache.lock().unwrap().get(&bits) {
        return Arc::clone(t);
    }
    let n = field.conductor();
    let wp = bits + 16;
    let two_pi = RealInterval::pi(wp).shl(1);
    let mut cos = Vec::new();
    let mut sin = Vec::new();
    for &m in field.embedding_exponents() {
        let mut c = Vec::with_capacity(n as usize);
        let mut s = Vec::with_capacity(n as usize);
        for e in 0..n {
            let num = (m * e) % n;
            let angle = two_pi.mul_rational(&BigRational::new(num.into(), n.into()));
            c.push(angle.cos().with_prec(bits));
            s.push(angle.sin().with_prec(bits));
        }
        cos.push(c);
        sin.push(s);
    }
    let table = Arc::new(EmbeddingTable { bits, cos, sin });
    field
        .embedding_cache
        .lock()
        .unwrap()
        .insert(bits, Arc::clone(&table));
    table
}

/// Complex values `a(exp(2 pi i m_j / n))` as `(re, im)` interval pairs.
pub fn complex_embeddings(a: &FieldElement, bits: u32) -> Vec<(RealInterval, RealInterval)> {
    let table = embedding_table(a.field(), bits);
    (0..a.field().half_degree())
        .map(|j| {
            let mut re = RealInterval::zero(bits);
            let mut im = RealInterval::zero(bits);
            for (e, c) in a.coords().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let ci = RealInterval::from_int(c.clone(), bits);
                re = &re + &(&ci * &table.cos[j][e]);
                im = &im + &(&ci * &table.sin[j][e]);
            }
            (re, im)
        })
        .collect()
}

/// Evaluates a real element (fixed by conjugation) at the `k` real embeddings.
pub fn real_embeddings(beta: &FieldElement, bits: u32) -> Result<Vec<RealInterval>> {
    complex_embeddings(beta, bits)
        .into_iter()
        .map(|(re, im)| {
            if im.contains_zero() {
                Ok(re)
            } else {
                Err(Error::InvalidInput(format!(
                    "element {beta} is not real: imaginary part {im}"
                )))
            }
        })
        .collect()
}

/// `Sigma(a) = (sigma_1(a conj a), ..., sigma_k(a conj a))`.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct SigmaImage(pub Vec<RealInterval>);

impl SigmaImage {
    pub fn values(&self) -> &[RealInterval] {
        &self.0
    }

    pub fn product(&self) -> RealInterval {
        let bits = self.0[0].prec();
        self.0.iter().fold(RealInterval::one(bits), |acc, v| &acc * v)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(RealInterval::mid_f64).collect()
    }

    fn accurate(&self, prec: &PrecisionConfig) -> bool {
        self.0.iter().all(|v| prec.accepts(v))
    }
}

/// Sigma at a fixed working precision, without the retry policy.
pub fn sigma_at(a: &FieldElement, bits: u32) -> Result<SigmaImage> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let beta = a * &a.conj();
    let values = real_embeddings(&beta, bits)?;
    if values.iter().any(|v| !v.is_positive()) {
        return Err(Error::PrecisionExhausted(format!("sigma({a}) not certified positive")));
    }
    Ok(SigmaImage(values))
}

/// Certified `Sigma(a)`.
pub fn sigma(field: &CMField, a: &FieldElement, prec: &PrecisionConfig) -> Result<SigmaImage> {
    check_field(field, a)?;
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    with_retry(prec, "sigma", |bits| sigma_at(a, bits), |s| s.accurate(prec))
}

fn check_field(field: &CMField, a: &FieldElement) -> Result<()> {
    if field.conductor() != a.field().conductor() {
        return Err(Error::FieldMismatch(field.conductor(), a.field().conductor()));
    }
    Ok(())
}

/// `sum_j x_j sigma_j(a conj a)`; exactly zero for `a = 0`.
pub fn weighted_norm(
    field: &CMField,
    a: &FieldElement,
    w: &Weights,
    prec: &PrecisionConfig,
) -> Result<RealInterval> {
    check_field(field, a)?;
    w.check_len(field.half_degree())?;
    if a.is_zero() {
        return Ok(RealInterval::zero(prec.bits));
    }
    with_retry(
        prec,
        "weighted norm",
        |bits| {
            let s = sigma_at(a, bits)?;
            Ok(s.0
                .iter()
                .zip(w.values())
                .map(|(v, x)| v.mul_rational(x))
                .sum::<RealInterval>())
        },
        |v| prec.accepts(v),
    )
}

/// True iff the product of the Sigma intervals contains the exact norm.
pub fn norm_check(field: &CMField, a: &FieldElement, prec: &PrecisionConfig) -> bool {
    match sigma(field, a, prec) {
        Ok(s) => s
            .product()
            .contains_rational(&BigRational::from_integer(a.norm())),
        Err(_) => false,
    }
}

/// Double-precision `cos`/`sin` table for fast prefilters.
pub struct FloatEmbeddings {
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl FloatEmbeddings {
    pub fn new(field: &CMField) -> Self {
        let n = field.conductor();
        let d = field.degree();
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        for &m in field.embedding_exponents() {
            let angles: Vec<f64> = (0..d as u64)
                .map(|e| 2.0 * std::f64::consts::PI * ((m * e) % n) as f64 / n as f64)
                .collect();
            cos.push(angles.iter().map(|a| a.cos()).collect());
            sin.push(angles.iter().map(|a| a.sin()).collect());
        }
        FloatEmbeddings { cos, sin }
    }

    /// Approximate `sigma_j(a conj a) = |a(zeta_j)|^2` from integer coordinates.
    pub fn sigma(&self, coords: &[i64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (e, &c) in coords.iter().enumerate() {
                if c != 0 {
                    re += c as f64 * self.cos[j][e];
                    im += c as f64 * self.sin[j][e];
                }
            }
            *o = re * re + im * im;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sigma_of_one_and_torsion() {
        let f = make_field(5).unwrap();
        let p = PrecisionConfig::default();
        for j in 0..5 {
            let s = sigma(&f, &FieldElement::zeta_pow(&f, j), &p).unwrap();
            for v in s.values() {
                assert!(v.contains_rational(&q(1, 1)));
            }
        }
    }

    #[test]
    fn sigma_of_one_plus_zeta() {
        let f = make_field(5).unwrap();
        let p = PrecisionConfig::default();
        let a = FieldElement::from_i64s(&f, &[1, 1, 0, 0]).unwrap();
        let s = sigma(&f, &a, &p).unwrap();
        let sqrt5 = RealInterval::from_int(5, 200).sqrt().unwrap();
        let plus = (&RealInterval::from_int(3, 200) + &sqrt5).shl(-1);
        let minus = (&RealInterval::from_int(3, 200) - &sqrt5).shl(-1);
        assert!(s.values()[0].overlaps(&plus));
        assert!(s.values()[1].overlaps(&minus));
        assert!((s.values()[0].mid_f64() - 2.618034).abs() < 1e-6);
    }

    #[test]
    fn weighted_norm_examples() {
        let f = make_field(5).unwrap();
        let p = PrecisionConfig::default();
        let w = Weights::equal(2);
        let z = weighted_norm(&f, &FieldElement::zero(&f), &w, &p).unwrap();
        assert!(z.lo().is_zero() && z.hi().is_zero());
        let t = weighted_norm(&f, &FieldElement::zeta_pow(&f, 3), &w, &p).unwrap();
        assert!(t.contains_rational(&q(2, 1)));
        let a = FieldElement::from_i64s(&f, &[1, -1, 0, 0]).unwrap();
        assert!(weighted_norm(&f, &a, &w, &p).unwrap().contains_rational(&q(5, 1)));
        assert!(matches!(
            weighted_norm(&f, &a, &Weights::equal(3), &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn norm_check_examples() {
        let p = PrecisionConfig::default();
        let f = make_field(5).unwrap();
        assert!(norm_check(&f, &FieldElement::from_i64s(&f, &[1, -1, 0, 0]).unwrap(), &p));
        assert!(norm_check(&f, &FieldElement::one(&f), &p));
        let g = make_field(7).unwrap();
        assert!(norm_check(&g, &FieldElement::from_i64s(&g, &[1, 1, 1, 0, 0, 0]).unwrap(), &p));
    }

    #[test]
    fn sigma_rejects_zero() {
        let f = make_field(5).unwrap();
        assert_eq!(
            sigma(&f, &FieldElement::zero(&f), &PrecisionConfig::default()).unwrap_err(),
            Error::ZeroElement
        );
    }

    #[test]
    fn weights_parse() {
        let w = Weights::parse("3/2,1").unwrap();
        assert_eq!(w.values(), &[q(3, 2), q(1, 1)]);
        assert_eq!(w.to_string(), "3/2,1");
        assert!(Weights::parse("1,0").is_err());
        assert!(Weights::parse("1,-2").is_err());
        assert!(Weights::parse("a").is_err());
        assert_eq!(Weights::parse("0.5").unwrap().values(), &[q(1, 2)]);
    }

    #[test]
    fn float_table_agrees() {
        let f = make_field(7).unwrap();
        let t = FloatEmbeddings::new(&f);
        let a = FieldElement::from_i64s(&f, &[2, -1, 0, 3, 0, 1]).unwrap();
        let mut out = vec![0.0; 3];
        t.sigma(&a.coords_i64().unwrap(), &mut out);
        let s = sigma(&f, &a, &PrecisionConfig::default()).unwrap();
        for (x, y) in out.iter().zip(s.to_f64()) {
            assert!((x - y).abs() < 1e-9 * y.max(1.0));
        }
    }

    #[test]
    fn precision_floor() {
        assert!(PrecisionConfig::new(32).is_err());
        assert_eq!(PrecisionConfig::new(256).unwrap().bits, 256);
    }
}
