//! Unit bases modulo torsion and the simplices `Delta_s` built from them.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::embeddings::{sigma_at, PrecisionConfig};
use crate::error::{Error, Result};
use crate::field::{is_prime, CMField, FieldElement};
use crate::interval::{Dyadic, RealInterval};
use crate::linalg::det_elimination;

/// Where a unit basis came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BuiltinCyclotomic,
    UserSupplied,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::BuiltinCyclotomic => "builtin-cyclotomic",
            Provenance::UserSupplied => "user-supplied",
        })
    }
}

/// Choice of cyclotomic unit generators for a prime conductor `p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CyclotomicUnits {
    /// `1 + zeta^c = (1 - zeta^(2c)) / (1 - zeta^c)` for `c = 1, ..., k-1`.
    #[default]
    Conjugates,
    /// `(1 - zeta^a) / (1 - zeta)` for `a = 2, ..., k`.
    Standard,
}

/// Generators `g_1, ..., g_{k-1}` of a finite-index subgroup of the units
/// modulo torsion.
#[derive(Clone, Debug)]
pub struct UnitBasis {
    field: Arc<CMField>,
    generators: Vec<FieldElement>,
    torsion: u64,
    provenance: Provenance,
}

impl UnitBasis {
    /// Validates count, unit status and multiplicative independence.
    pub fn new(
        field: &Arc<CMField>,
        generators: Vec<FieldElement>,
        torsion: u64,
        provenance: Provenance,
    ) -> Result<Self> {
        let k = field.half_degree();
        if generators.len() + 1 != k {
            return Err(Error::BasisCount {
                expected: k - 1,
                actual: generators.len(),
            });
        }
        for (index, g) in generators.iter().enumerate() {
            if g.field().conductor() != field.conductor() {
                return Err(Error::FieldMismatch(field.conductor(), g.field().conductor()));
            }
            if g.is_zero() || !g.is_unit()? {
                return Err(Error::NonUnit {
                    index: index + 1,
                    norm: g.norm().to_string(),
                });
            }
        }
        let basis = UnitBasis {
            field: Arc::clone(field),
            generators,
            torsion,
            provenance,
        };
        basis.check_independent(&PrecisionConfig::default())?;
        Ok(basis)
    }

    pub fn field(&self) -> &Arc<CMField> {
        &self.field
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `k - 1`.
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Full `(k-1) x k` matrix of `log sigma_m(g_j conj g_j)`.
    pub fn log_embeddings(&self, bits: u32) -> Result<Vec<Vec<RealInterval>>> {
        self.generators
            .iter()
            .map(|g| {
                sigma_at(g, bits)?
                    .values()
                    .iter()
                    .map(|v| {
                        v.ln().ok_or_else(|| {
                            Error::PrecisionExhausted(format!("log of sigma({g}) not certified"))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Square matrix `L` of the first `k - 1` log coordinates.
    pub fn log_matrix(&self, bits: u32) -> Result<Vec<Vec<RealInterval>>> {
        let r = self.rank();
        Ok(self
            .log_embeddings(bits)?
            .into_iter()
            .map(|row| row.into_iter().take(r).collect())
            .collect())
    }

    fn check_independent(&self, prec: &PrecisionConfig) -> Result<()> {
        if self.rank() == 0 {
            return Ok(());
        }
        let margin = Dyadic::new(1.into(), -20);
        for bits in [prec.bits, prec.bits * 2] {
            let l = match self.log_matrix(bits) {
                Ok(l) => l,
                Err(Error::PrecisionExhausted(_)) => continue,
                Err(e) => return Err(e),
            };
            match det_elimination(&l, bits) {
                Some(det) if det.mag_lower() > margin => return Ok(()),
                Some(det) if det.mag_upper() < margin => {
                    return Err(Error::DependentUnits(format!("log-embedding determinant {det}")))
                }
                None => {
                    return Err(Error::DependentUnits(
                        "log-embedding matrix is singular".into(),
                    ))
                }
                Some(_) => continue,
            }
        }
        Err(Error::DependentUnits(
            "log-embedding determinant not separated from zero".into(),
        ))
    }
}

/// Builtin cyclotomic units for a prime conductor, using the default generator family.
pub fn cyclotomic_unit_basis(field: &Arc<CMField>) -> Result<UnitBasis> {
    cyclotomic_unit_basis_with(field, CyclotomicUnits::default())
}

pub fn cyclotomic_unit_basis_with(field: &Arc<CMField>, kind: CyclotomicUnits) -> Result<UnitBasis> {
    let p = field.conductor();
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let k = field.half_degree() as u64;
    let one = FieldElement::one(field);
    let one_minus = |e: u64| &one - &FieldElement::zeta_pow(field, e);
    let generators = match kind {
        CyclotomicUnits::Conjugates => (1..k).map(|c| &one + &FieldElement::zeta_pow(field, c)).collect(),
        CyclotomicUnits::Standard => (2..=k)
            .map(|a| one_minus(a).exact_divide(&one_minus(1)))
            .collect::<Result<Vec<_>>>()?,
    };
    UnitBasis::new(field, generators, 2 * p, Provenance::BuiltinCyclotomic)
}

/// Parses a unit-basis file: `torsion <t>` then one generator per line.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_unit_basis(field: &Arc<CMField>, text: &str) -> Result<UnitBasis> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty unit-basis file".into()))?;
    let torsion = header
        .strip_prefix("torsion")
        .and_then(|t| t.trim().parse::<u64>().ok())
        .ok_or_else(|| Error::Parse(format!("expected `torsion <t>`, got {header:?}")))?;
    let generators = lines
        .map(|l| FieldElement::parse(field, l))
        .collect::<Result<Vec<_>>>()?;
    UnitBasis::new(field, generators, torsion, Provenance::UserSupplied)
}

pub fn load_unit_basis(field: &Arc<CMField>, path: &Path) -> Result<UnitBasis> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_unit_basis(field, &text)
}

/// The chain `1, g_{s(1)}, g_{s(1)} g_{s(2)}, ...` for one permutation `s`.
#[derive(Clone, Debug)]
pub struct DeltaSet {
    /// One-based permutation of `1..k-1`.
    pub perm: Vec<usize>,
    pub vertices: Vec<FieldElement>,
}

/// Lexicographic successor, in place. Returns false after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All `(k-1)!` chains in lexicographic order of the permutation.
pub fn delta_sets(basis: &UnitBasis) -> Vec<DeltaSet> {
    let mut perm: Vec<usize> = (1..=basis.rank()).collect();
    let mut out = Vec::new();
    loop {
        let mut vertices = vec![FieldElement::one(&basis.field)];
        for &s in &perm {
            let next = vertices.last().unwrap() * &basis.generators[s - 1];
            vertices.push(next);
        }
        out.push(DeltaSet {
            perm: perm.clone(),
            vertices,
        });
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

/// The `2^(k-1)` products `prod g_j^(a_j)`, `a_j in {0, 1}`, indexed by the bit pattern of `a`.
pub fn fundamental_domain(basis: &UnitBasis) -> Vec<FieldElement> {
    let r = basis.rank();
    let mut out: Vec<FieldElement> = vec![FieldElement::one(&basis.field)];
    for j in 0..r {
        let extra: Vec<FieldElement> = out.iter().map(|u| u * &basis.generators[j]).collect();
        out.extend(extra);
    }
    debug_assert_eq!(out.iter().collect::<BTreeSet<_>>().len(), 1 << r);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn el(f: &Arc<CMField>, c: &[i64]) -> FieldElement {
        FieldElement::from_i64s(f, c).unwrap()
    }

    #[test]
    fn builtin_p5() {
        let f = make_field(5).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        assert_eq!(b.generators(), &[el(&f, &[1, 1, 0, 0])]);
        assert_eq!(b.torsion_order(), 10);
        assert_eq!(b.provenance(), Provenance::BuiltinCyclotomic);
    }

    #[test]
    fn builtin_p7_both_families() {
        let f = make_field(7).unwrap();
        let std = cyclotomic_unit_basis_with(&f, CyclotomicUnits::Standard).unwrap();
        assert_eq!(
            std.generators(),
            &[el(&f, &[1, 1, 0, 0, 0, 0]), el(&f, &[1, 1, 1, 0, 0, 0])]
        );
        assert_eq!(std.torsion_order(), 14);
        let conj = cyclotomic_unit_basis(&f).unwrap();
        assert_eq!(
            conj.generators(),
            &[el(&f, &[1, 1, 0, 0, 0, 0]), el(&f, &[1, 0, 1, 0, 0, 0])]
        );
    }

    #[test]
    fn builtin_p11_count() {
        let f = make_field(11).unwrap();
        for kind in [CyclotomicUnits::Standard, CyclotomicUnits::Conjugates] {
            let b = cyclotomic_unit_basis_with(&f, kind).unwrap();
            assert_eq!(b.rank(), 4);
            assert_eq!(b.torsion_order(), 22);
        }
    }

    #[test]
    fn builtin_rejects_composite() {
        let f = make_field(9).unwrap();
        assert_eq!(cyclotomic_unit_basis(&f).unwrap_err(), Error::NotPrime(9));
    }

    #[test]
    fn file_parsing() {
        let f = make_field(5).unwrap();
        let b = parse_unit_basis(&f, "torsion 10\n1,1,0,0\n").unwrap();
        assert_eq!(b.provenance(), Provenance::UserSupplied);
        assert_eq!(b.generators(), cyclotomic_unit_basis(&f).unwrap().generators());

        assert!(matches!(
            parse_unit_basis(&f, "torsion 10\n0,1,0,0\n"),
            Err(Error::DependentUnits(_))
        ));
        assert!(matches!(
            parse_unit_basis(&f, "torsion 10\n1,1,0,0\n1,0,1,0\n"),
            Err(Error::BasisCount { expected: 1, actual: 2 })
        ));
        assert!(matches!(
            parse_unit_basis(&f, "torsion 10\n1,-1,0,0\n"),
            Err(Error::NonUnit { index: 1, .. })
        ));
        assert!(matches!(parse_unit_basis(&f, "1,1,0,0\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn dependent_pair_rejected() {
        let f = make_field(7).unwrap();
        let g = el(&f, &[1, 1, 0, 0, 0, 0]);
        let g2 = &g * &g;
        let text = format!("torsion 14\n{g}\n{g2}\n");
        assert!(matches!(parse_unit_basis(&f, &text), Err(Error::DependentUnits(_))));
    }

    #[test]
    fn delta_set_counts() {
        let f = make_field(5).unwrap();
        let d = delta_sets(&cyclotomic_unit_basis(&f).unwrap());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].vertices.len(), 2);

        let f = make_field(7).unwrap();
        let b = cyclotomic_unit_basis(&f).unwrap();
        let d = delta_sets(&b);
        assert_eq!(d.len(), 2);
        let g = b.generators();
        let g12 = &g[0] * &g[1];
        assert_eq!(d[0].vertices, vec![FieldElement::one(&f), g[0].clone(), g12.clone()]);
        assert_eq!(d[1].vertices, vec![FieldElement::one(&f), g[1].clone(), g12]);
        assert_eq!(d[1].perm, vec![2, 1]);

        let f = make_field(11).unwrap();
        assert_eq!(delta_sets(&cyclotomic_unit_basis(&f).unwrap()).len(), 24);
    }

    #[test]
    fn fundamental_domain_sizes() {
        for (p, size) in [(5, 2), (7, 4), (11, 16)] {
            let f = make_field(p).unwrap();
            let b = cyclotomic_unit_basis(&f).unwrap();
            let fd = fundamental_domain(&b);
            assert_eq!(fd.len(), size);
            let from_sets: BTreeSet<FieldElement> =
                delta_sets(&b).into_iter().flat_map(|d| d.vertices).collect();
            assert_eq!(from_sets, fd.iter().cloned().collect::<BTreeSet<_>>());
        }
    }

    #[test]
    fn permutations_in_order() {
        let mut p = vec![1, 2, 3];
        let mut all = vec![p.clone()];
        while next_permutation(&mut p) {
            all.push(p.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![1, 3, 2]);
        assert_eq!(all[5], vec![3, 2, 1]);
    }
}
