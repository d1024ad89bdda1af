//! Craig's lattices `A_n^(r)` as images of `Z^(n+1)` under `(1 - T)^r`.

use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::lattice::gram::GramMatrix;

/// Coefficients of `(1 - T)^r` applied to `e_0` in `Z^(n+1)`, with `T` the cyclic shift.
fn difference_vector(len: usize, r: u32) -> Vec<i64> {
    let mut v = vec![0i64; len];
    v[0] = 1;
    for _ in 0..r {
        let prev = v.clone();
        for i in 0..len {
            v[i] = prev[i] - prev[(i + len - 1) % len];
        }
    }
    v
}

/// Integer generator vectors of `A_n^(r)` inside `Z^(n+1)`.
///
/// For `r >= 1` these are `(1 - T)^r e_j`, `j = 0..n-1`, spanning a lattice of
/// rank `n`. For `r = 0` the lattice is all of `Z^(n+1)`.
pub fn craig_generators(n_ambient: usize, r: u32) -> Vec<Vec<i64>> {
    let len = n_ambient + 1;
    if r == 0 {
        return (0..len).map(|i| (0..len).map(|j| i64::from(i == j)).collect()).collect();
    }
    let base = difference_vector(len, r);
    (0..n_ambient)
        .map(|j| (0..len).map(|i| base[(i + len - j) % len]).collect())
        .collect()
}

/// Gram of `A_n^(r)` under the standard inner product of `R^(n+1)`.
pub fn craig_circulant(n_ambient: usize, r: u32) -> Result<GramMatrix> {
    let p = n_ambient as u64 + 1;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let gens = craig_generators(n_ambient, r);
    let gram: Vec<Vec<i64>> = gens
        .iter()
        .map(|a| gens.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect();
    GramMatrix::from_integers(&gram)
}
