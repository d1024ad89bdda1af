//! LLL reduction of a Gram matrix, with an exact integer transform.
//!
//! The Gram-Schmidt data are floating point and recomputed from the current
//! transform after every change, so rounding never accumulates. The transform
//! itself is exact, and the reduced Gram is recomputed from it exactly.

use crate::error::Result;
use crate::lattice::gram::GramMatrix;
use crate::linalg::quadratic_form_decomposition;

pub const DELTA: f64 = 0.99;

const MAX_STEPS: usize = 200_000;

fn current_gram(g: &[Vec<f64>], t: &[Vec<i64>]) -> Vec<Vec<f64>> {
    let n = g.len();
    let mut tmp = vec![vec![0.0; n]; n];
    for i in 0..n {
        for b in 0..n {
            tmp[i][b] = (0..n).map(|j| g[i][j] * t[j][b] as f64).sum();
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            out[a][b] = (0..n).map(|i| t[i][a] as f64 * tmp[i][b]).sum();
        }
    }
    out
}

/// Gram-Schmidt coefficients `mu[i][j]` (`j < i`) and squared lengths.
fn gso(gc: &[Vec<f64>]) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = gc.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut r = vec![vec![0.0; n]; n];
    let mut bstar = vec![0.0; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = gc[i][j];
            for l in 0..j {
                s -= mu[j][l] * r[i][l];
            }
            r[i][j] = s;
            if j < i {
                mu[i][j] = s / bstar[j];
            }
        }
        bstar[i] = r[i][i];
        if !(bstar[i] > 0.0) {
            return None;
        }
    }
    Some((mu, bstar))
}

fn column_op(t: &mut [Vec<i64>], k: usize, j: usize, q: i64) -> bool {
    for row in t.iter_mut() {
        match q.checked_mul(row[j]).and_then(|v| row[k].checked_sub(v)) {
            Some(v) => row[k] = v,
            None => return false,
        }
    }
    true
}

/// LLL-reduces `g` with `delta = 0.99`. Returns the reduced Gram `T^T G T` and
/// the unimodular transform `T` (columns are the new basis vectors in old
/// coordinates).
pub fn lll_reduce(g: &GramMatrix) -> Result<(GramMatrix, Vec<Vec<i64>>)> {
    let n = g.dim();
    let gf = g.to_f64();
    let identity: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut t = identity.clone();
    let mut k = 1;
    let mut steps = 0;
    while k < n && steps < MAX_STEPS {
        steps += 1;
        let Some((mu, _)) = gso(&current_gram(&gf, &t)) else {
            break;
        };
        let mut changed = false;
        for j in (0..k).rev() {
            if mu[k][j].abs() <= 0.5 + 1e-9 {
                continue;
            }
            let q = mu[k][j].round();
            if q.abs() < 1e15 {
                let snapshot = t.clone();
                if !column_op(&mut t, k, j, q as i64) {
                    t = snapshot;
                    continue;
                }
                changed = true;
                break;
            }
        }
        if changed {
            continue;
        }
        let (mu, bstar) = gso(&current_gram(&gf, &t)).expect("checked above");
        if bstar[k] >= (DELTA - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            for row in t.iter_mut() {
                row.swap(k, k - 1);
            }
            k = (k - 1).max(1);
        }
    }
    if quadratic_form_decomposition(&current_gram(&gf, &t)).is_none() {
        t = identity;
    }
    Ok((g.transform(&t), t))
}
