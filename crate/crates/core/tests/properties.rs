//! Property tests for the algebraic, analytic and enumeration invariants.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cmlattice::bound::{bound_both_ways, simplex_data};
use cmlattice::embeddings::sigma_at;
use cmlattice::lattice::enumerate::{enumerate_all, enumerate_short};
use cmlattice::lattice::gram::gram_matrix;
use cmlattice::lattice::set_e::{characteristic_set_e, roundtrip};
use cmlattice::lattice::{minimal_vectors, GramMatrix, DEFAULT_BUDGET};
use cmlattice::theta::psi_real_weights;
use cmlattice::{
    cyclotomic_unit_basis, delta_sets, fundamental_domain, make_field, norm_check, psi_truncated, theorem_bound,
    theta_prefix, weighted_norm, CMField, DeltaSet, FieldElement, PrecisionConfig, RealInterval, UnitBasis, Weights,
};

const CONDUCTORS: [u64; 6] = [5, 7, 8, 9, 12, 15];

fn field(n: u64) -> Arc<CMField> {
    make_field(n).unwrap()
}

fn element(f: &Arc<CMField>, coords: &[i64]) -> FieldElement {
    FieldElement::from_i64s(f, &coords[..f.degree()]).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, 8)
}

fn nonzero_coords() -> impl Strategy<Value = Vec<i64>> {
    coords().prop_filter("nonzero", |c| c[..4].iter().any(|&v| v != 0))
}

/// `zeta^t * prod g_j^(e_j)`.
fn unit_from(basis: &UnitBasis, t: u64, exps: &[i64]) -> FieldElement {
    let f = basis.field();
    let mut u = FieldElement::zeta_pow(f, t);
    for (g, &e) in basis.generators().iter().zip(exps) {
        let base = if e >= 0 { g.clone() } else { g.unit_inverse().unwrap() };
        u = &u * &base.pow(e.unsigned_abs() as u32);
    }
    u
}

fn weights_strategy(k: usize) -> impl Strategy<Value = Weights> {
    prop::collection::vec((1i64..=9, 1i64..=9), k).prop_map(|v| {
        Weights::new(v.into_iter().map(|(a, b)| BigRational::new(a.into(), b.into())).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_multiplicative(ni in 0..CONDUCTORS.len(), a in coords(), b in coords()) {
        let f = field(CONDUCTORS[ni]);
        let (a, b) = (element(&f, &a), element(&f, &b));
        prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn conj_is_an_involutive_homomorphism(ni in 0..CONDUCTORS.len(), a in coords(), b in coords()) {
        let f = field(CONDUCTORS[ni]);
        let (a, b) = (element(&f, &a), element(&f, &b));
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        let r = &a * &a.conj();
        prop_assert_eq!(r.conj(), r);
    }

    #[test]
    fn cyclotomic_units_have_norm_one(pi in 0..3usize, t in 0u64..30, exps in prop::collection::vec(-3i64..=3, 4)) {
        let f = field([5, 7, 11][pi]);
        let basis = cyclotomic_unit_basis(&f).unwrap();
        let u = unit_from(&basis, t, &exps);
        prop_assert_eq!(u.norm(), BigInt::one());
        prop_assert!(u.is_unit().unwrap());
    }

    #[test]
    fn exact_divide_inverts_multiplication(ni in 0..CONDUCTORS.len(), a in coords(), b in nonzero_coords()) {
        let f = field(CONDUCTORS[ni]);
        let (a, b) = (element(&f, &a), element(&f, &b));
        prop_assert_eq!((&a * &b).exact_divide(&b).unwrap(), a);
    }

    #[test]
    fn sigma_is_multiplicative(pi in 0..2usize, a in nonzero_coords(), t in 0u64..14, exps in prop::collection::vec(-2i64..=2, 2)) {
        let f = field([5, 7][pi]);
        let basis = cyclotomic_unit_basis(&f).unwrap();
        let u = unit_from(&basis, t, &exps);
        let a = element(&f, &a);
        let lhs = sigma_at(&(&u * &a), 128).unwrap();
        let (su, sa) = (sigma_at(&u, 128).unwrap(), sigma_at(&a, 128).unwrap());
        for j in 0..f.half_degree() {
            prop_assert!(lhs.values()[j].overlaps(&(&su.values()[j] * &sa.values()[j])));
        }
    }

    #[test]
    fn weighted_norm_is_positive(pi in 0..3usize, a in nonzero_coords(), w in weights_strategy(2)) {
        let f = field([5, 8, 12][pi]);
        let a = element(&f, &a);
        let v = weighted_norm(&f, &a, &w, &PrecisionConfig::default()).unwrap();
        prop_assert!(v.is_positive());
    }

    #[test]
    fn equal_weight_norm_dominates_geometric_mean(ni in 0..CONDUCTORS.len(), a in nonzero_coords()) {
        let f = field(CONDUCTORS[ni]);
        let k = f.half_degree();
        let a = element(&f, &a);
        let v = weighted_norm(&f, &a, &Weights::equal(k), &PrecisionConfig::default()).unwrap();
        let n = RealInterval::from_int(a.norm(), 128);
        let root = n.ln().unwrap().mul_rational(&BigRational::new(1.into(), (k as i64).into())).exp();
        let rhs = root.mul_rational(&BigRational::from_integer((k as i64).into()));
        prop_assert!(!v.certainly_lt(&rhs), "{} < {}", v, rhs);
    }

    #[test]
    fn bound_is_invariant_under_unit_multiplication(pi in 0..2usize, t in 0u64..14, exps in prop::collection::vec(-2i64..=2, 2)) {
        let f = field([5, 7][pi]);
        let basis = cyclotomic_unit_basis(&f).unwrap();
        let w = unit_from(&basis, t, &exps);
        let prec = PrecisionConfig::default();
        for ds in delta_sets(&basis) {
            let moved = DeltaSet { perm: ds.perm.clone(), vertices: ds.vertices.iter().map(|u| &w * u).collect() };
            let a = simplex_data(&ds, &prec).unwrap().bound;
            let b = simplex_data(&moved, &prec).unwrap().bound;
            prop_assert!(a.overlaps(&b), "{} vs {}", a, b);
            prop_assert!(a.is_positive());
        }
    }

    #[test]
    fn fincke_pohst_matches_box_search(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=5);
        let b: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { rng.gen_range(1..=3) } else if j > i { rng.gen_range(-2..=2) } else { 0 }).collect())
            .collect();
        let g: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|l| b[l][i] * b[l][j]).sum()).collect())
            .collect();
        let radius = rng.gen_range(1..=10i64);
        let gm = GramMatrix::from_integers(&g).unwrap();
        let fp: Vec<Vec<i64>> = enumerate_all(&gm, &BigRational::from_integer(radius.into()), DEFAULT_BUDGET, 64)
            .unwrap().vectors.into_iter().map(|(v, _)| v).collect();
        let mut naive = box_search(&g, radius);
        naive.sort();
        prop_assert_eq!(fp, naive);
    }

    #[test]
    fn minima_are_invariant_under_unit_multiples_of_the_generator(
        pi in 0..2usize, kc in nonzero_coords(), t in 0u64..14, exps in prop::collection::vec(-2i64..=2, 2), w in weights_strategy(3)
    ) {
        let f = field([5, 7][pi]);
        let k = f.half_degree();
        let w = Weights::new(w.values()[..k].to_vec()).unwrap();
        let basis = cyclotomic_unit_basis(&f).unwrap();
        let u = unit_from(&basis, t, &exps);
        let kappa = element(&f, &kc.iter().map(|c| c.clamp(&-2, &2)).copied().collect::<Vec<_>>());
        prop_assume!(!kappa.is_zero());
        let prec = PrecisionConfig::default();
        let a = minimal_vectors(&f, &w, Some(&kappa), &prec, DEFAULT_BUDGET).unwrap();
        let b = minimal_vectors(&f, &w, Some(&(&kappa * &u)), &prec, DEFAULT_BUDGET).unwrap();
        prop_assert!(a.mu.to_interval(128).overlaps(&b.mu.to_interval(128)));
        prop_assert_eq!(a.count(), b.count());
        let set: BTreeSet<Vec<i64>> = a.vectors.iter().cloned().collect();
        for v in &a.vectors {
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            prop_assert!(set.contains(&neg));
        }
    }

    #[test]
    fn psi_decreases_towards_one(pi in 0..2usize, w in prop::collection::vec(1i64..=8, 3)) {
        let f = field([5, 7][pi]);
        let w = Weights::new(w[..f.half_degree()].iter().map(|&a| BigRational::new(a.into(), 2.into())).collect()).unwrap();
        let prec = PrecisionConfig::default();
        let ts = [BigRational::new(1.into(), 2.into()), BigRational::one(), BigRational::new(3.into(), 2.into())];
        let vals: Vec<RealInterval> = ts
            .iter()
            .map(|t| psi_truncated(&f, &w, t, &prec, DEFAULT_BUDGET).unwrap())
            .map(|s| &s.value + &s.tail)
            .collect();
        prop_assert!(vals[1].certainly_lt(&vals[0]));
        prop_assert!(vals[2].certainly_lt(&vals[1]));
        prop_assert!(vals[2].certainly_gt_rational(&BigRational::one()));
    }
}

/// All nonzero `x` with `x^T G x <= radius`, by scanning the box
/// `|x_i| <= sqrt(radius * (G^-1)_ii)`.
fn box_search(g: &[Vec<i64>], radius: i64) -> Vec<Vec<i64>> {
    let n = g.len();
    let gq: Vec<Vec<BigRational>> = g
        .iter()
        .map(|row| row.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect();
    let bounds: Vec<i64> = (0..n)
        .map(|i| {
            let mut e = vec![BigRational::zero(); n];
            e[i] = BigRational::one();
            let inv = cmlattice::linalg::solve_rational(&gq, &e).unwrap();
            let cap = &inv[i] * BigRational::from_integer(radius.into());
            let mut b = 0i64;
            while BigRational::from_integer(((b + 1) * (b + 1)).into()) <= cap {
                b += 1;
            }
            b
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    'outer: loop {
        let norm: i64 = (0..n).map(|i| (0..n).map(|j| x[i] * g[i][j] * x[j]).sum::<i64>()).sum();
        if norm <= radius && x.iter().any(|&v| v != 0) {
            out.push(x.clone());
        }
        for i in 0..n {
            if x[i] < bounds[i] {
                x[i] += 1;
                continue 'outer;
            }
            x[i] = -bounds[i];
        }
        return out;
    }
}

#[test]
fn norm_check_on_a_thousand_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let prec = PrecisionConfig::default();
    let fields: Vec<Arc<CMField>> = CONDUCTORS.iter().map(|&n| field(n)).collect();
    let mut checked = 0;
    while checked < 1000 {
        let f = &fields[checked % fields.len()];
        let c: Vec<i64> = (0..f.degree()).map(|_| rng.gen_range(-10..=10)).collect();
        let a = FieldElement::from_i64s(f, &c).unwrap();
        if a.is_zero() {
            continue;
        }
        assert!(norm_check(f, &a, &prec), "norm check failed for {a} in Q(zeta_{})", f.conductor());
        checked += 1;
    }
}

#[test]
fn delta_set_vertices_lie_on_the_hyperboloid() {
    for p in [5u64, 7, 11, 13] {
        let f = field(p);
        let basis = cyclotomic_unit_basis(&f).unwrap();
        let sets = delta_sets(&basis);
        let fact: usize = (1..basis.rank()).product::<usize>().max(1) * basis.rank().max(1);
        assert_eq!(sets.len(), fact, "p = {p}");
        let mut union = BTreeSet::new();
        for ds in &sets {
            for u in &ds.vertices {
                assert_eq!(u.norm(), BigInt::one());
                assert!(sigma_at(u, 128).unwrap().product().contains_rational(&BigRational::one()));
                union.insert(u.clone());
            }
        }
        let domain: BTreeSet<FieldElement> = fundamental_domain(&basis).into_iter().collect();
        assert_eq!(union, domain, "p = {p}");
    }
}

#[test]
fn p5_generator_hits_the_golden_vertex() {
    let f = field(5);
    let basis = cyclotomic_unit_basis(&f).unwrap();
    let s = sigma_at(&basis.generators()[0], 256).unwrap();
    let root5 = RealInterval::from_int(5, 256).sqrt().unwrap();
    let three = RealInterval::from_int(3, 256);
    let expected = [(&three + &root5).shl(-1), (&three - &root5).shl(-1)];
    for (v, e) in s.values().iter().zip(&expected) {
        assert!(v.overlaps(e), "{v} vs {e}");
    }
}

#[test]
fn determinant_methods_agree() {
    for p in [5u64, 7, 11] {
        let f = field(p);
        let basis = cyclotomic_unit_basis(&f).unwrap();
        for ds in delta_sets(&basis) {
            let (a, b) = bound_both_ways(&ds, 128).unwrap();
            assert!(a.overlaps(&b), "p {p} perm {:?}: {a} vs {b}", ds.perm);
        }
    }
}

#[test]
fn enumerate_short_finds_root_systems() {
    // A_2 and D_4 Grams: minimum 2 with 6 and 24 vectors
    let a2 = GramMatrix::from_integers(&[vec![2, -1], vec![-1, 2]]).unwrap();
    let s = enumerate_short(&a2, &BigRational::from_integer(3.into()), DEFAULT_BUDGET, 64).unwrap();
    assert_eq!(s.count(), 6);
    let d4 = GramMatrix::from_integers(&[
        vec![2, -1, 0, 0],
        vec![-1, 2, -1, -1],
        vec![0, -1, 2, 0],
        vec![0, -1, 0, 2],
    ])
    .unwrap();
    let s = enumerate_short(&d4, &BigRational::from_integer(2.into()), DEFAULT_BUDGET, 64).unwrap();
    assert_eq!(s.count(), 24);
}

#[test]
fn o_f_minima_map_into_e() {
    let prec = PrecisionConfig::default();
    for p in [5u64, 7] {
        let f = field(p);
        let basis = cyclotomic_unit_basis(&f).unwrap();
        let report = theorem_bound(&f, &basis, &prec).unwrap();
        let e = characteristic_set_e(&f, &basis, &report, &prec, DEFAULT_BUDGET).unwrap();
        let set = minimal_vectors(&f, &Weights::equal(f.half_degree()), None, &prec, DEFAULT_BUDGET).unwrap();
        for v in &set.vectors {
            let alpha = FieldElement::from_i64s(&f, v).unwrap();
            let red = roundtrip(&e, &basis, None, &alpha, &prec).unwrap();
            assert!(red.is_some(), "p {p}: {alpha} not recovered from E");
        }
    }
}

/// Truncated theta sum `sum exp(-t pi m) N(m)` over an exact theta prefix.
fn theta_sum(g: &GramMatrix, t: &BigRational, max: &BigRational) -> RealInterval {
    let th = theta_prefix(g, max, DEFAULT_BUDGET).unwrap();
    let tpi = RealInterval::pi(128).mul_rational(t);
    th.coefficients
        .iter()
        .map(|(m, c)| (&tpi.mul_rational(m) * &RealInterval::from_int(-1, 128)).exp().mul_rational(&BigRational::from_integer((*c).into())))
        .sum()
}

#[test]
fn psi_on_the_diagonal_is_theta_of_o_f() {
    let prec = PrecisionConfig::default();
    let t = BigRational::from_integer(1.into());
    for p in [5u64, 7] {
        let f = field(p);
        let w = Weights::equal(f.half_degree());
        let psi = psi_truncated(&f, &w, &t, &prec, DEFAULT_BUDGET).unwrap();
        let g = gram_matrix(&f, &w, None, &prec).unwrap();
        let theta = theta_sum(&g, &t, &psi.radius);
        let slack = psi.tail.hi_f64() + 1e-30;
        assert!((psi.value.mid_f64() - theta.mid_f64()).abs() <= slack + 1e-15, "p {p}");
        assert!(psi.value.overlaps(&theta), "p {p}: {} vs {}", psi.value, theta);
    }
}

#[test]
fn psi_at_ideal_weights_is_theta_of_the_ideal() {
    let prec = PrecisionConfig::default();
    let t = BigRational::from_integer(1.into());
    let f = field(5);
    let kappa = FieldElement::from_i64s(&f, &[1, -1, 0, 0]).unwrap();
    let x = sigma_at(&kappa, 128).unwrap().0;
    let psi = psi_real_weights(&f, &x, &t, &prec, DEFAULT_BUDGET).unwrap();
    let g = gram_matrix(&f, &Weights::equal(2), Some(&kappa), &prec).unwrap();
    let theta_radius = &psi.radius * BigRational::from_integer(2.into());
    let theta = theta_sum(&g, &t, &theta_radius);
    let psi_full = &psi.value + &psi.tail;
    assert!(psi_full.overlaps(&theta), "{psi_full} vs {theta}");
}
