//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! Every irrational quantity in the crate (embeddings, logarithms, determinants,
//! theta sums) is carried as a [`RealInterval`] whose endpoints are exact dyadic
//! numbers `m * 2^e`. Each operation computes the exact endpoint results and then
//! rounds the lower end down and the upper end up to the working precision, so
//! the true value is always enclosed.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Rounding direction for a single endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// Exact dyadic rational `mantissa * 2^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    /// Builds `mantissa * 2^exponent`, normalized to an odd mantissa so that
    /// structural equality is value equality.
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        match mantissa.trailing_zeros() {
            None => Dyadic {
                mantissa,
                exponent: 0,
            },
            Some(0) => Dyadic { mantissa, exponent },
            Some(tz) => Dyadic {
                mantissa: mantissa >> tz as usize,
                exponent: exponent + tz as i64,
            },
        }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic::new(self.mantissa.abs(), self.exponent)
    }

    /// Multiplies by `2^shift` exactly.
    pub fn shl(&self, shift: i64) -> Self {
        Dyadic::new(self.mantissa.clone(), self.exponent + shift)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.exponent.min(b.exponent);
        let ma = &a.mantissa << (a.exponent - e) as usize;
        let mb = &b.mantissa << (b.exponent - e) as usize;
        (ma, mb, e)
    }

    pub fn add_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (ma, mb, e) = Dyadic::aligned(self, other);
        Dyadic::new(ma + mb, e)
    }

    pub fn sub_exact(&self, other: &Dyadic) -> Dyadic {
        self.add_exact(&-other)
    }

    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// `floor(log2 |x|)` for nonzero `x`.
    pub fn log2_floor(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.bits() as i64 - 1 + self.exponent
    }

    /// Rounds to at most `prec` significant bits in the given direction.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = (bits - prec as u64) as usize;
        let m = shift_right_round(&self.mantissa, shift, dir);
        Dyadic::new(m, self.exponent + shift as i64)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    /// Directed rounding of an exact rational to `prec` bits.
    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let num = q.numer();
        let den = q.denom();
        let shift = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (n, d) = if shift >= 0 {
            (num << shift as usize, den.clone())
        } else {
            (num.clone(), den << (-shift) as usize)
        };
        let m = div_round(&n, &d, dir);
        Dyadic::new(m, -shift).round(prec, dir)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits() as i64;
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            ((&self.mantissa >> s as usize).to_f64().unwrap_or(0.0), self.exponent + s)
        } else {
            (self.mantissa.to_f64().unwrap_or(0.0), self.exponent)
        };
        ldexp(m, e)
    }

    /// Scientific decimal representation with `digits` significant digits,
    /// rounded in the given direction.
    pub fn to_decimal(&self, digits: usize, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let q = self.to_rational();
        // Initial guess of the decimal exponent; corrected below.
        let mut e10 = ((self.log2_floor() as f64) * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let a = digits as i64 - 1 - e10;
            let scaled = if a >= 0 {
                &q * BigRational::from_integer(BigInt::from(10u32).pow(a as u32))
            } else {
                &q / BigRational::from_integer(BigInt::from(10u32).pow((-a) as u32))
            };
            let r = match dir {
                Round::Down => scaled.floor().to_integer(),
                Round::Up => scaled.ceil().to_integer(),
            };
            let s = r.abs().to_string();
            if s.len() > digits {
                e10 += 1;
                continue;
            }
            if s.len() < digits {
                e10 -= 1;
                continue;
            }
            let sign = if r.is_negative() { "-" } else { "" };
            let (head, tail) = s.split_at(1);
            return if tail.is_empty() {
                format!("{sign}{head}e{e10}")
            } else {
                format!("{sign}{head}.{tail}e{e10}")
            };
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (ma, mb, _) = Dyadic::aligned(self, other);
        ma.cmp(&mb)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-&self.mantissa, self.exponent)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-self.mantissa, self.exponent)
    }
}

fn ldexp(m: f64, e: i64) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

fn shift_right_round(m: &BigInt, shift: usize, dir: Round) -> BigInt {
    // `>>` on BigInt rounds toward negative infinity.
    match dir {
        Round::Down => m >> shift,
        Round::Up => -((-m) >> shift),
    }
}

fn div_round(n: &BigInt, d: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => n.div_floor(d),
        Round::Up => -((-n).div_floor(d)),
    }
}

fn div_dyadic(x: &Dyadic, y: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    let shift = (prec as i64 + 2 + y.bits() as i64 - x.bits() as i64).max(0);
    let n = &x.mantissa << shift as usize;
    let q = div_round(&n, &y.mantissa, dir);
    Dyadic::new(q, x.exponent - shift - y.exponent).round(prec, dir)
}

fn sqrt_dyadic(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    let mut t = (2 * prec as i64 + 4 - x.bits() as i64).max(0);
    if (x.exponent - t).rem_euclid(2) != 0 {
        t += 1;
    }
    let m = &x.mantissa << t as usize;
    let mut r = m.sqrt();
    if dir == Round::Up && &r * &r != m {
        r += 1;
    }
    Dyadic::new(r, (x.exponent - t) / 2).round(prec, dir)
}

/// Closed real interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl RealInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RealInterval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }

    pub fn point(d: Dyadic, prec: u32) -> Self {
        RealInterval::new(d.clone(), d, prec)
    }

    pub fn zero(prec: u32) -> Self {
        RealInterval::point(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        RealInterval::from_int(1, prec)
    }

    pub fn from_int(v: impl Into<BigInt>, prec: u32) -> Self {
        RealInterval::point(Dyadic::from_int(v), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        RealInterval {
            lo: Dyadic::from_rational(q, prec, Round::Down),
            hi: Dyadic::from_rational(q, prec, Round::Up),
            prec,
        }
    }

    /// Parses two decimal strings (as produced by serialization) into an
    /// enclosing interval.
    pub fn from_decimal_strs(lo: &str, hi: &str, prec: u32) -> Option<Self> {
        let lo = parse_decimal(lo)?;
        let hi = parse_decimal(hi)?;
        if lo > hi {
            return None;
        }
        Some(RealInterval {
            lo: Dyadic::from_rational(&lo, prec, Round::Down),
            hi: Dyadic::from_rational(&hi, prec, Round::Up),
            prec,
        })
    }

    /// Interval enclosing a double (exactly representable, so a point).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        let q = BigRational::from_float(v).expect("finite float");
        RealInterval::from_rational(&q, prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        RealInterval::new(self.lo.clone(), self.hi.clone(), prec)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add_exact(&self.hi).shl(-1)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Exact half-width.
    pub fn radius(&self) -> Dyadic {
        self.hi.sub_exact(&self.lo).shl(-1)
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub_exact(&self.lo)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    /// Half-width relative to the smallest magnitude in the interval; infinite
    /// when the interval touches zero.
    pub fn relative_radius(&self) -> f64 {
        let mag = self.mag_lower();
        if mag.is_zero() {
            return f64::INFINITY;
        }
        self.radius().to_f64() / mag.to_f64()
    }

    /// Lower bound on `|x|` over the interval.
    pub fn mag_lower(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else if self.lo.signum() > 0 {
            self.lo.clone()
        } else {
            self.hi.abs()
        }
    }

    /// Upper bound on `|x|` over the interval.
    pub fn mag_upper(&self) -> Dyadic {
        std::cmp::max(self.lo.abs(), self.hi.abs())
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let lo = self.lo.to_rational();
        let hi = self.hi.to_rational();
        &lo <= q && q <= &hi
    }

    pub fn contains_interval(&self, other: &RealInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &RealInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    /// Certified `self < other`.
    pub fn certainly_lt(&self, other: &RealInterval) -> bool {
        self.hi < other.lo
    }

    /// Certified `self < q`.
    pub fn certainly_lt_rational(&self, q: &BigRational) -> bool {
        &self.hi.to_rational() < q
    }

    /// Certified `self > q`.
    pub fn certainly_gt_rational(&self, q: &BigRational) -> bool {
        &self.lo.to_rational() > q
    }

    pub fn hull(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
            prec: self.prec.max(other.prec),
        }
    }

    /// Enclosure of `max(x, y)` for `x` in self and `y` in other.
    pub fn max(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            lo: std::cmp::max(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
            prec: self.prec.max(other.prec),
        }
    }

    /// Enclosure of `min(x, y)`.
    pub fn min(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::min(&self.hi, &other.hi).clone(),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn abs(&self) -> RealInterval {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            -self
        } else {
            RealInterval {
                lo: Dyadic::zero(),
                hi: self.mag_upper(),
                prec: self.prec,
            }
        }
    }

    /// Widens the interval symmetrically by `r >= 0`.
    pub fn widen(&self, r: &Dyadic) -> RealInterval {
        RealInterval::new(self.lo.sub_exact(r), self.hi.add_exact(r), self.prec)
    }

    /// Multiplies by `2^shift` exactly.
    pub fn shl(&self, shift: i64) -> RealInterval {
        RealInterval {
            lo: self.lo.shl(shift),
            hi: self.hi.shl(shift),
            prec: self.prec,
        }
    }

    pub fn sqr(&self) -> RealInterval {
        let a = self.abs();
        RealInterval::new(a.lo.mul_exact(&a.lo), a.hi.mul_exact(&a.hi), self.prec)
    }

    pub fn powi(&self, n: u32) -> RealInterval {
        let mut result = RealInterval::one(self.prec);
        let mut base = self.clone();
        let mut e = n;
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

    pub fn mul_rational(&self, q: &BigRational) -> RealInterval {
        self * &RealInterval::from_rational(q, self.prec)
    }

    /// Reciprocal; `None` when the interval contains zero.
    pub fn recip(&self) -> Option<RealInterval> {
        RealInterval::one(self.prec).checked_div(self)
    }

    /// Quotient; `None` when the divisor contains zero.
    pub fn checked_div(&self, other: &RealInterval) -> Option<RealInterval> {
        if other.contains_zero() {
            return None;
        }
        let prec = self.prec.max(other.prec);
        let xs = [&self.lo, &self.hi];
        let ys = [&other.lo, &other.hi];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for x in xs {
            for y in ys {
                let d = div_dyadic(x, y, prec, Round::Down);
                let u = div_dyadic(x, y, prec, Round::Up);
                lo = Some(match lo {
                    Some(l) if l <= d => l,
                    _ => d,
                });
                hi = Some(match hi {
                    Some(h) if h >= u => h,
                    _ => u,
                });
            }
        }
        Some(RealInterval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            prec,
        })
    }

    /// Square root; `None` for intervals reaching below zero.
    pub fn sqrt(&self) -> Option<RealInterval> {
        if self.lo.signum() < 0 {
            return None;
        }
        Some(RealInterval {
            lo: sqrt_dyadic(&self.lo, self.prec, Round::Down),
            hi: sqrt_dyadic(&self.hi, self.prec, Round::Up),
            prec: self.prec,
        })
    }

    /// Enclosure of `e^x`.
    pub fn exp(&self) -> RealInterval {
        let prec = self.prec;
        let mid = self.mid();
        let rad = self.radius();
        let s = if mid.is_zero() {
            0
        } else {
            (mid.log2_floor() + 2).max(0)
        };
        let wp = prec + 32 + s as u32;
        let y = RealInterval::point(mid.shl(-s), wp);
        let mut sum = RealInterval::one(wp);
        let mut term = RealInterval::one(wp);
        let eps = Dyadic::new(BigInt::one(), -(wp as i64) - 8);
        let mut i: u64 = 1;
        loop {
            term = (&term * &y).checked_div(&RealInterval::from_int(i, wp)).unwrap();
            sum = &sum + &term;
            if term.mag_upper() < eps {
                break;
            }
            i += 1;
        }
        // |y| <= 1/2: remainder after the last added term is below twice the next term.
        let next = (&term * &y).checked_div(&RealInterval::from_int(i + 1, wp)).unwrap();
        let r = next.mag_upper().shl(1);
        let mut result = sum.widen(&r);
        for _ in 0..s {
            result = result.sqr();
        }
        if !rad.is_zero() {
            // e^{[-r, r]} lies in [1 - r, 1 + 2r] for r <= 1.
            let one = Dyadic::from_int(1);
            let factor = if rad <= one {
                RealInterval::new(one.sub_exact(&rad), one.add_exact(&rad.shl(1)), wp)
            } else {
                let neg = RealInterval::point(-&rad, wp).exp();
                let pos = RealInterval::point(rad.clone(), wp).exp();
                neg.hull(&pos)
            };
            result = &result * &factor;
        }
        result.with_prec(prec)
    }

    /// Enclosure of `ln x`; `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<RealInterval> {
        if !self.is_positive() {
            return None;
        }
        let prec = self.prec;
        let wp = prec + 32;
        let mid = self.mid();
        // mid = f * 2^(b - 1) with f in [1, 2).
        let b = mid.log2_floor() + 1;
        let f = RealInterval::point(mid.shl(-(b - 1)), wp);
        let one = RealInterval::one(wp);
        let z = (&f - &one).checked_div(&(&f + &one)).unwrap();
        let ln_f = atanh_series(&z, wp).shl(1);
        let ln2 = ln2(wp);
        let mut result = &ln_f + &(&ln2 * &RealInterval::from_int(b - 1, wp));
        let rad = self.radius();
        if !rad.is_zero() {
            let slope = div_dyadic(&rad, &self.lo, wp, Round::Up);
            result = result.widen(&slope);
        }
        Some(result.with_prec(prec))
    }

    /// Enclosure of `cos x`. Intended for moderate arguments (|x| below ~100).
    pub fn cos(&self) -> RealInterval {
        self.trig(true)
    }

    /// Enclosure of `sin x`. Intended for moderate arguments (|x| below ~100).
    pub fn sin(&self) -> RealInterval {
        self.trig(false)
    }

    fn trig(&self, cosine: bool) -> RealInterval {
        let prec = self.prec;
        let mid = self.mid();
        let extra = if mid.is_zero() {
            0
        } else {
            (mid.to_f64().abs() * 1.5) as u32 + 2
        };
        let wp = prec + 32 + extra;
        let y = RealInterval::point(mid, wp);
        let y2 = y.sqr();
        let (mut term, mut n) = if cosine {
            (RealInterval::one(wp), 0u64)
        } else {
            (y.clone(), 1u64)
        };
        let mut sum = term.clone();
        let eps = Dyadic::new(BigInt::one(), -(wp as i64) - 8);
        let ymag = y.mag_upper().to_f64();
        loop {
            let denom = RealInterval::from_int((n + 1) * (n + 2), wp);
            term = -&(&term * &y2).checked_div(&denom).unwrap();
            n += 2;
            if term.mag_upper() < eps && (n as f64) > ymag {
                // Lagrange remainder: bounded by the magnitude of this unused term.
                sum = sum.widen(&term.mag_upper());
                break;
            }
            sum = &sum + &term;
        }
        // Lipschitz constant 1.
        sum.widen(&self.radius()).with_prec(prec)
    }

    /// Enclosure of pi.
    pub fn pi(prec: u32) -> RealInterval {
        cached_constant(&PI_CACHE, prec, |wp| {
            let a = atan_inv(5, wp);
            let b = atan_inv(239, wp);
            &a.mul_rational(&BigRational::from_integer(16.into()))
                - &b.mul_rational(&BigRational::from_integer(4.into()))
        })
    }
}

static PI_CACHE: OnceLock<Mutex<HashMap<u32, RealInterval>>> = OnceLock::new();
static LN2_CACHE: OnceLock<Mutex<HashMap<u32, RealInterval>>> = OnceLock::new();

fn cached_constant(
    cache: &'static OnceLock<Mutex<HashMap<u32, RealInterval>>>,
    prec: u32,
    compute: impl Fn(u32) -> RealInterval,
) -> RealInterval {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = compute(prec + 16).with_prec(prec);
    map.lock().unwrap().insert(prec, v.clone());
    v
}

fn ln2(prec: u32) -> RealInterval {
    cached_constant(&LN2_CACHE, prec, |wp| {
        let third = RealInterval::from_rational(&BigRational::new(1.into(), 3.into()), wp);
        atanh_series(&third, wp).shl(1)
    })
}

/// `atanh z` for |z| <= 1/3 by its power series.
fn atanh_series(z: &RealInterval, wp: u32) -> RealInterval {
    let z2 = z.sqr();
    let mut power = z.clone();
    let mut sum = z.clone();
    let eps = Dyadic::new(BigInt::one(), -(wp as i64) - 8);
    let mut k: u64 = 1;
    loop {
        power = &power * &z2;
        let term = power.checked_div(&RealInterval::from_int(2 * k + 1, wp)).unwrap();
        if term.mag_upper() < eps {
            // Tail <= term / (1 - z^2) <= 9/8 term; use 2 * term.
            return sum.widen(&term.mag_upper().shl(1));
        }
        sum = &sum + &term;
        k += 1;
    }
}

/// `atan(1/m)` for integer m >= 2 by the alternating series.
fn atan_inv(m: u64, wp: u32) -> RealInterval {
    let z = RealInterval::from_rational(&BigRational::new(1.into(), m.into()), wp);
    let z2 = z.sqr();
    let mut power = z.clone();
    let mut sum = z.clone();
    let eps = Dyadic::new(BigInt::one(), -(wp as i64) - 8);
    let mut k: u64 = 1;
    loop {
        power = &power * &z2;
        let term = power.checked_div(&RealInterval::from_int(2 * k + 1, wp)).unwrap();
        if term.mag_upper() < eps {
            return sum.widen(&term.mag_upper());
        }
        if k % 2 == 1 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
        k += 1;
    }
}

/// Parses a decimal literal such as `-1.25e-3`, `7`, or `3/2` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = exp - frac_part.len() as i64 - 1;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Number of decimal digits that determine a `prec`-bit endpoint.
pub fn decimal_digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(decimal_digits(self.prec));
        write!(
            f,
            "[{}, {}]",
            self.lo.to_decimal(digits, Round::Down),
            self.hi.to_decimal(digits, Round::Up)
        )
    }
}

impl Serialize for RealInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let digits = decimal_digits(self.prec);
        let mut st = serializer.serialize_struct("RealInterval", 2)?;
        st.serialize_field("lo", &self.lo.to_decimal(digits, Round::Down))?;
        st.serialize_field("hi", &self.hi.to_decimal(digits, Round::Up))?;
        st.end()
    }
}

impl Neg for &RealInterval {
    type Output = RealInterval;
    fn neg(self) -> RealInterval {
        RealInterval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }
}

impl Neg for RealInterval {
    type Output = RealInterval;
    fn neg(self) -> RealInterval {
        -&self
    }
}

impl Add for &RealInterval {
    type Output = RealInterval;
    fn add(self, rhs: &RealInterval) -> RealInterval {
        let prec = self.prec.max(rhs.prec);
        RealInterval {
            lo: self.lo.add_exact(&rhs.lo).round(prec, Round::Down),
            hi: self.hi.add_exact(&rhs.hi).round(prec, Round::Up),
            prec,
        }
    }
}

impl Sub for &RealInterval {
    type Output = RealInterval;
    fn sub(self, rhs: &RealInterval) -> RealInterval {
        let prec = self.prec.max(rhs.prec);
        RealInterval {
            lo: self.lo.sub_exact(&rhs.hi).round(prec, Round::Down),
            hi: self.hi.sub_exact(&rhs.lo).round(prec, Round::Up),
            prec,
        }
    }
}

impl Mul for &RealInterval {
    type Output = RealInterval;
    fn mul(self, rhs: &RealInterval) -> RealInterval {
        let prec = self.prec.max(rhs.prec);
        let (lo, hi) = if self.lo.signum() >= 0 && rhs.lo.signum() >= 0 {
            (self.lo.mul_exact(&rhs.lo), self.hi.mul_exact(&rhs.hi))
        } else {
            let p = [
                self.lo.mul_exact(&rhs.lo),
                self.lo.mul_exact(&rhs.hi),
                self.hi.mul_exact(&rhs.lo),
                self.hi.mul_exact(&rhs.hi),
            ];
            let lo = p.iter().min().unwrap().clone();
            let hi = p.iter().max().unwrap().clone();
            (lo, hi)
        };
        RealInterval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for RealInterval {
            type Output = RealInterval;
            fn $method(self, rhs: RealInterval) -> RealInterval {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RealInterval> for RealInterval {
            type Output = RealInterval;
            fn $method(self, rhs: &RealInterval) -> RealInterval {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for RealInterval {
    fn sum<I: Iterator<Item = RealInterval>>(iter: I) -> RealInterval {
        let mut acc: Option<RealInterval> = None;
        for x in iter {
            acc = Some(match acc {
                Some(a) => &a + &x,
                None => x,
            });
        }
        acc.unwrap_or_else(|| RealInterval::zero(64))
    }
}
