//! Small dense linear algebra: exact (integer / rational) and interval routines.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::interval::RealInterval;

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solves `m x = rhs` over the rationals. `None` if `m` is singular.
pub fn solve_rational(m: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut().skip(col) {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Leading principal minors of a rational matrix, all of them.
pub fn leading_minors_rational(m: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let p = a[k][k].clone();
        det = &det * &p;
        out.push(det.clone());
        if p.is_zero() {
            // Remaining minors are determined by a singular leading block.
            while out.len() < n {
                out.push(BigRational::zero());
            }
            return out;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &a[k][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    out
}

/// Determinant by cofactor (Laplace) expansion along the first row.
pub fn det_cofactor(m: &[Vec<RealInterval>], prec: u32) -> RealInterval {
    let n = m.len();
    match n {
        0 => RealInterval::one(prec),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = RealInterval::zero(prec);
            for j in 0..n {
                let minor: Vec<Vec<RealInterval>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * &det_cofactor(&minor, prec);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Determinant by Gaussian elimination with partial pivoting on the interval
/// of largest certified magnitude. `None` if no pivot excludes zero.
pub fn det_elimination(m: &[Vec<RealInterval>], prec: u32) -> Option<RealInterval> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = RealInterval::one(prec);
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&r| !a[r][k].contains_zero())
            .max_by(|&x, &y| a[x][k].mag_lower().cmp(&a[y][k].mag_lower()))?;
        if pivot != k {
            a.swap(pivot, k);
            det = -det;
        }
        let p = a[k][k].clone();
        det = &det * &p;
        for i in k + 1..n {
            let f = a[i][k].checked_div(&p)?;
            for j in k..n {
                let v = &a[k][j] * &f;
                a[i][j] = &a[i][j] - &v;
            }
        }
    }
    Some(det)
}

/// Solves `m x = rhs` with interval Gaussian elimination. `None` when a pivot
/// cannot be certified nonzero.
pub fn solve_interval(m: &[Vec<RealInterval>], rhs: &[RealInterval]) -> Option<Vec<RealInterval>> {
    let n = m.len();
    let mut a: Vec<Vec<RealInterval>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&r| !a[r][k].contains_zero())
            .max_by(|&x, &y| a[x][k].mag_lower().cmp(&a[y][k].mag_lower()))?;
        a.swap(pivot, k);
        let p = a[k][k].clone();
        for i in k + 1..n {
            let f = a[i][k].checked_div(&p)?;
            for j in k..=n {
                let v = &a[k][j] * &f;
                a[i][j] = &a[i][j] - &v;
            }
        }
    }
    let mut x: Vec<Option<RealInterval>> = vec![None; n];
    for i in (0..n).rev() {
        let mut s = a[i][n].clone();
        for j in i + 1..n {
            s = &s - &(&a[i][j] * x[j].as_ref().unwrap());
        }
        x[i] = Some(s.checked_div(&a[i][i])?);
    }
    Some(x.into_iter().map(Option::unwrap).collect())
}

/// Cholesky-style decomposition `q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2`
/// in floating point. Returns `(d, mu)` or `None` if a pivot is not positive.
pub fn quadratic_form_decomposition(g: &[Vec<f64>]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = g.len();
    let mut q = g.to_vec();
    for i in 0..n {
        if q[i][i] <= 0.0 || !q[i][i].is_finite() {
            return None;
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let d = (0..n).map(|i| q[i][i]).collect();
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            mu[i][j] = q[i][j];
        }
    }
    Some((d, mu))
}

/// Integer determinant sign helper for small i64 matrices (used on unimodular transforms).
pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    let big: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    bareiss_det(&big)
}
