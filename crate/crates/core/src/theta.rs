//! Theta-series prefixes and the truncated psi function on imaginary rays.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::embeddings::{PrecisionConfig, Weights};
use crate::error::{Error, Result};
use crate::field::CMField;
use crate::interval::RealInterval;
use crate::lattice::enumerate::enumerate_all;
use crate::lattice::gram::{gram_matrix, gram_matrix_real, GramMatrix, LatticeNorm};
use crate::lattice::lll::lll_reduce;
use crate::lattice::minima::{automatic_radius, minimal_vectors};

/// Counts `N(m)` of lattice vectors of norm `m`, for `m` up to a cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaPrefix {
    pub scale: BigRational,
    pub coefficients: Vec<(BigRational, u64)>,
}

impl ThetaPrefix {
    pub fn count(&self, m: &BigRational) -> u64 {
        self.coefficients
            .iter()
            .find(|(n, _)| n == m)
            .map_or(0, |(_, c)| *c)
    }
}

impl Serialize for ThetaPrefix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ThetaPrefix", 2)?;
        st.serialize_field("scale", &self.scale.to_string())?;
        let rows: Vec<(String, u64)> = self
            .coefficients
            .iter()
            .map(|(m, c)| (m.to_string(), *c))
            .collect();
        st.serialize_field("coefficients", &rows)?;
        st.end()
    }
}

/// Exact theta coefficients up to `max_norm` for a rational Gram.
pub fn theta_prefix(g: &GramMatrix, max_norm: &BigRational, budget: u64) -> Result<ThetaPrefix> {
    if !g.is_exact() {
        return Err(Error::InvalidInput("theta prefix needs an exact Gram matrix".into()));
    }
    let mut counts: BTreeMap<BigRational, u64> = BTreeMap::new();
    counts.insert(BigRational::from_integer(0.into()), 1);
    if max_norm.is_positive() {
        let e = enumerate_all(g, max_norm, budget, 64)?;
        for (_, n) in &e.vectors {
            let m = n.as_exact().expect("exact Gram").clone();
            *counts.entry(m).or_default() += 1;
        }
    }
    Ok(ThetaPrefix {
        scale: g.scale().clone(),
        coefficients: counts.into_iter().collect(),
    })
}

/// `psi(t i x_1, ..., t i x_k) = sum_alpha exp(-t pi <alpha, alpha>)`, truncated
/// at norm `radius`, with a certified bound on the omitted tail.
#[derive(Clone, Debug, Serialize)]
pub struct PsiSample {
    #[serde(serialize_with = "as_string")]
    pub t: BigRational,
    pub weights: Vec<String>,
    #[serde(serialize_with = "as_string")]
    pub radius: BigRational,
    /// `1 + ` the truncated sum.
    pub value: RealInterval,
    /// Enclosure `[0, T]` of the omitted tail.
    pub tail: RealInterval,
    /// The truncated sum without the `alpha = 0` term.
    #[serde(skip)]
    pub excess: RealInterval,
    #[serde(skip)]
    pub terms: usize,
}

fn as_string<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl PsiSample {
    /// Enclosure of `psi - 1` including the tail.
    pub fn excess_with_tail(&self) -> RealInterval {
        &self.excess + &self.tail
    }
}

/// Upper bound on the number of lattice points of norm at most `s`, from lower
/// bounds `b` on the Gram-Schmidt squared lengths.
fn count_bound(b: &[f64], s: f64) -> f64 {
    b.iter().map(|bi| 1.0 + 2.0 * (s / bi).sqrt()).product()
}

/// `ln` of the tail bound `Nmax(R + h) e^{-t pi R} / (1 - rho)`, `h = 1/(t pi)`,
/// `rho = e^{-1} (1 + h/R)^{d/2}`; requires `R >= d h`.
fn log_tail_bound(b: &[f64], tpi: f64, r: f64) -> f64 {
    let d = b.len() as f64;
    let h = 1.0 / tpi;
    let rho = (-1.0f64).exp() * (1.0 + h / r).powf(d / 2.0);
    count_bound(b, r + h).ln() - tpi * r - (1.0 - rho).ln()
}

/// Certified version of [`log_tail_bound`], exponentiated.
fn tail_interval(b: &[f64], t: &BigRational, r: &BigRational, bits: u32) -> RealInterval {
    let pi = RealInterval::pi(bits);
    let tpi = &pi.mul_rational(t);
    let rr = RealInterval::from_rational(r, bits);
    let h = RealInterval::one(bits).checked_div(tpi).expect("t > 0");
    let s = &rr + &h;
    let mut nmax = RealInterval::one(bits);
    for bi in b {
        let bi = RealInterval::from_f64(*bi, bits);
        let term = &RealInterval::one(bits) + &(s.checked_div(&bi).expect("b > 0").sqrt().expect("positive")).shl(1);
        nmax = &nmax * &term;
    }
    let d = b.len() as u32;
    let ratio = &RealInterval::one(bits) + &h.checked_div(&rr).expect("R > 0");
    // (1 + h/R)^{d/2} = sqrt((1 + h/R)^d)
    let growth = ratio.powi(d).sqrt().expect("positive");
    let rho = &growth * &(-&RealInterval::one(bits)).exp();
    let denom = &RealInterval::one(bits) - &rho;
    let decay = (-&(tpi * &rr)).exp();
    let hi = (&nmax * &decay).checked_div(&denom).expect("rho < 1");
    RealInterval::new(crate::interval::Dyadic::zero(), hi.hi().clone(), bits)
}

/// Truncated psi for the form with Gram `g`.
pub fn psi_from_gram(
    g: &GramMatrix,
    weight_labels: Vec<String>,
    t: &BigRational,
    prec: &PrecisionConfig,
    budget: u64,
) -> Result<PsiSample> {
    if !t.is_positive() {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let bits = prec.bits;
    let (reduced, _) = lll_reduce(g)?;
    let b = reduced.gso_lower_bounds(bits).ok_or(Error::NotPositiveDefinite)?;
    let d = b.len() as f64;
    let tpi = t.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI;
    let mu_up = automatic_radius(g)?.to_f64().unwrap_or(f64::NAN);
    let target = -40.0 * std::f64::consts::LN_2 - tpi * mu_up;
    let mut r = mu_up.max(d / tpi);
    while log_tail_bound(&b, tpi, r) > target {
        r *= 1.05;
        if !r.is_finite() {
            return Err(Error::InvalidInput("tail bound cannot be met".into()));
        }
    }
    let radius = BigRational::from_float(r).expect("finite radius");
    let e = enumerate_all(g, &radius, budget, bits)?;
    let pi = RealInterval::pi(bits);
    let tpi_i = pi.mul_rational(t);
    let mut excess = RealInterval::zero(bits);
    let mut grouped: BTreeMap<BigRational, u64> = BTreeMap::new();
    for (_, n) in &e.vectors {
        match n {
            LatticeNorm::Exact(m) => *grouped.entry(m.clone()).or_default() += 1,
            LatticeNorm::Interval(i) => {
                excess = &excess + &(-&(&tpi_i * i)).exp();
            }
        }
    }
    for (m, c) in grouped {
        let term = (-&tpi_i.mul_rational(&m)).exp();
        excess = &excess + &term.mul_rational(&BigRational::from_integer(c.into()));
    }
    let tail = tail_interval(&b, t, &radius, bits);
    Ok(PsiSample {
        t: t.clone(),
        weights: weight_labels,
        radius,
        value: &RealInterval::one(bits) + &excess,
        tail,
        excess,
        terms: e.vectors.len(),
    })
}

/// Truncated psi on `O_F` at rational weights.
pub fn psi_truncated(
    field: &Arc<CMField>,
    w: &Weights,
    t: &BigRational,
    prec: &PrecisionConfig,
    budget: u64,
) -> Result<PsiSample> {
    let g = gram_matrix(field, w, None, prec)?;
    psi_from_gram(&g, w.values().iter().map(|v| v.to_string()).collect(), t, prec, budget)
}

/// Truncated psi on `O_F` at real (interval) weights.
pub fn psi_real_weights(
    field: &Arc<CMField>,
    w: &[RealInterval],
    t: &BigRational,
    prec: &PrecisionConfig,
    budget: u64,
) -> Result<PsiSample> {
    let g = gram_matrix_real(field, w, None, prec.bits)?;
    psi_from_gram(&g, w.iter().map(|v| v.to_string()).collect(), t, prec, budget)
}

/// `mu` and `n` read off the cusp behaviour `psi(t) = 1 + n e^{-t pi mu} + ...`.
#[derive(Clone, Debug, Serialize)]
pub struct CuspEstimate {
    pub mu: RealInterval,
    pub count: u64,
    #[serde(serialize_with = "as_string")]
    pub t: BigRational,
}

/// Estimates `(mu, n)` from psi at `t, 2t, 3t`, doubling `t` until the two
/// slope estimates agree, then checks the result against enumeration.
pub fn cusp_extract(field: &Arc<CMField>, w: &Weights, prec: &PrecisionConfig, budget: u64) -> Result<CuspEstimate> {
    let g = gram_matrix(field, w, None, prec)?;
    let labels: Vec<String> = w.values().iter().map(|v| v.to_string()).collect();
    let lambda = automatic_radius(&g)?;
    let bits = prec.bits;
    let pi = RealInterval::pi(bits);
    let mut t = BigRational::new(4.into(), 1.into()) / &lambda;
    let mut found = None;
    for _ in 0..12 {
        let s: Vec<RealInterval> = (1..=3)
            .map(|j| {
                let tj = &t * BigRational::from_integer(j.into());
                psi_from_gram(&g, labels.clone(), &tj, prec, budget).map(|p| p.excess_with_tail())
            })
            .collect::<Result<_>>()?;
        let logs: Vec<RealInterval> = s
            .iter()
            .map(|v| v.ln().ok_or_else(|| Error::PrecisionExhausted("log of psi - 1".into())))
            .collect::<Result<_>>()?;
        let step = pi.mul_rational(&t);
        let mu_a = (&logs[0] - &logs[1]).checked_div(&step).expect("t > 0");
        let mu_b = (&logs[1] - &logs[2]).checked_div(&step).expect("t > 0");
        let err = 2.0 * (mu_a.mid_f64() - mu_b.mid_f64()).abs() + mu_b.radius().to_f64();
        let mu = mu_b.widen(&crate::interval::Dyadic::from_rational(
            &BigRational::from_float(err).expect("finite"),
            64,
            crate::interval::Round::Up,
        ));
        let t3 = &t * BigRational::from_integer(3.into());
        let n_est = &s[2] * &(&pi.mul_rational(&t3) * &mu_b).exp();
        let n = n_est.mid_f64().round();
        let mu_mid = mu_b.mid_f64();
        let t3f = t3.to_f64().unwrap_or(f64::NAN);
        if err <= 1e-9 * mu_mid.abs().max(1.0)
            && err * std::f64::consts::PI * t3f < 1e-3
            && (n_est.mid_f64() - n).abs() < 1e-3
            && n >= 1.0
        {
            found = Some(CuspEstimate {
                mu,
                count: n as u64,
                t: t.clone(),
            });
            break;
        }
        t *= BigRational::from_integer(2.into());
    }
    let est = found.ok_or_else(|| Error::PrecisionExhausted("cusp estimates did not settle".into()))?;
    let truth = minimal_vectors(field, w, None, prec, budget)?;
    let mu_true = truth.mu.to_interval(bits);
    if !est.mu.overlaps(&mu_true) || est.count != truth.count() as u64 {
        return Err(Error::CuspMismatch(format!(
            "cusp gives mu {} n {}, enumeration gives mu {} n {}",
            est.mu,
            est.count,
            mu_true,
            truth.count()
        )));
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::lattice::craig::craig_circulant;
    use crate::lattice::enumerate::DEFAULT_BUDGET;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn z5_prefix() {
        let g = craig_circulant(4, 0).unwrap();
        let t = theta_prefix(&g, &q(3, 1), DEFAULT_BUDGET).unwrap();
        let counts: Vec<u64> = (0..=3).map(|m| t.count(&q(m, 1))).collect();
        assert_eq!(counts, vec![1, 10, 40, 80]);
    }

    #[test]
    fn scaled_a4_ideal() {
        let f = make_field(5).unwrap();
        let k = crate::field::FieldElement::from_i64s(&f, &[1, -1, 0, 0]).unwrap();
        let g = gram_matrix(&f, &Weights::equal(2), Some(&k), &PrecisionConfig::default())
            .unwrap()
            .scaled(&q(2, 5));
        let t = theta_prefix(&g, &q(2, 1), DEFAULT_BUDGET).unwrap();
        assert_eq!(t.coefficients, vec![(q(0, 1), 1), (q(2, 1), 20)]);
        assert_eq!(t.scale, q(2, 5));
    }

    #[test]
    fn psi_large_t() {
        let f = make_field(5).unwrap();
        let p = psi_truncated(&f, &Weights::equal(2), &q(10, 1), &PrecisionConfig::default(), DEFAULT_BUDGET)
            .unwrap();
        let lead = 10.0 * (-20.0 * std::f64::consts::PI).exp();
        assert!((p.excess.mid_f64() / lead - 1.0).abs() < 1e-6);
        assert!(p.tail.hi_f64() < 1e-12 * lead);
    }

    #[test]
    fn psi_exceeds_one() {
        let f = make_field(7).unwrap();
        let p = psi_truncated(&f, &Weights::equal(3), &q(1, 1), &PrecisionConfig::default(), DEFAULT_BUDGET)
            .unwrap();
        assert!(p.value.certainly_gt_rational(&q(1, 1)));
    }

    #[test]
    fn cusp_p5() {
        let f = make_field(5).unwrap();
        let c = cusp_extract(&f, &Weights::equal(2), &PrecisionConfig::default(), DEFAULT_BUDGET).unwrap();
        assert!(c.mu.contains_rational(&q(2, 1)));
        assert_eq!(c.count, 10);
    }
}
