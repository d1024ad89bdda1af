use std::fmt;
use std::sync::Arc;

use anyhow::{Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

use cmlattice::bound::ideal_bound;
use cmlattice::field::{is_prime, IntJson};
use cmlattice::lattice::craig::craig_circulant;
use cmlattice::lattice::gram::gram_matrix;
use cmlattice::lattice::{characteristic_set_e, hull_consistency, minimal_vectors, HullCheck};
use cmlattice::units::{cyclotomic_unit_basis_with, CyclotomicUnits};
use cmlattice::{
    cusp_extract, load_unit_basis, make_field, psi_truncated, theorem_bound, theta_prefix,
    BoundReport, CMField, FieldElement, PrecisionConfig, UnitBasis, Verdict, Weights,
};

use crate::{exit, BasisKind, Cli, Command, Global, PsiArgs, ThetaArgs, VerifyArgs};

/// A configuration problem detected before any computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Validated settings shared by all commands.
struct RunConfig {
    field: Option<Arc<CMField>>,
    prec: PrecisionConfig,
    budget: u64,
    json: bool,
}

impl RunConfig {
    fn new(g: &Global) -> Result<Self> {
        let prec = match PrecisionConfig::new(g.bits) {
            Ok(p) => p,
            Err(e) => return usage(e.to_string()),
        };
        let field = g.cyclotomic.map(make_field).transpose()?;
        Ok(RunConfig {
            field,
            prec,
            budget: g.budget,
            json: g.json,
        })
    }

    fn field(&self) -> Result<&Arc<CMField>> {
        match &self.field {
            Some(f) => Ok(f),
            None => usage("this command needs --cyclotomic N"),
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    let cfg = RunConfig::new(&cli.global)?;
    let g = &cli.global;
    match &cli.command {
        Command::Bound => cmd_bound(&cfg, g),
        Command::Minima => cmd_minima(&cfg, g),
        Command::VerifyCraig(a) => cmd_verify_craig(&cfg, g, a),
        Command::SetE => cmd_set_e(&cfg, g),
        Command::Theta(a) => cmd_theta(&cfg, g, a),
        Command::Psi(a) => cmd_psi(&cfg, g, a),
    }
}

fn emit_json(command: &str, body: &impl Serialize) -> Result<()> {
    let mut obj = Map::new();
    obj.insert("schema".into(), json!("1"));
    obj.insert("command".into(), json!(command));
    match serde_json::to_value(body)? {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    println!("{}", serde_json::to_string_pretty(&Value::Object(obj))?);
    Ok(())
}

fn parse_rational(flag: &str, s: &str) -> Result<BigRational> {
    match s.trim().parse::<BigRational>() {
        Ok(q) => Ok(q),
        Err(_) => usage(format!("{flag}: expected a rational like 3 or 3/2, got {s:?}")),
    }
}

fn unit_basis(field: &Arc<CMField>, g: &Global) -> Result<UnitBasis> {
    if let Some(path) = &g.units {
        return load_unit_basis(field, path).with_context(|| format!("loading {}", path.display()));
    }
    let n = field.conductor();
    if !is_prime(n) {
        return usage(format!(
            "conductor {n} is not prime; the builtin unit basis covers prime conductors only, \
             so a non-prime conductor needs --units FILE"
        ));
    }
    let kind = match g.basis {
        BasisKind::Conjugates => CyclotomicUnits::Conjugates,
        BasisKind::Standard => CyclotomicUnits::Standard,
    };
    Ok(cyclotomic_unit_basis_with(field, kind)?)
}

fn weights(field: &CMField, g: &Global) -> Result<Weights> {
    let k = field.half_degree();
    let w = match &g.weights {
        Some(s) => Weights::parse(s)?,
        None => Weights::equal(k),
    };
    w.check_len(k)?;
    Ok(w)
}

/// `(1 - zeta)^r`.
fn craig_generator(field: &Arc<CMField>, r: u32) -> FieldElement {
    (&FieldElement::one(field) - &FieldElement::zeta_pow(field, 1)).pow(r)
}

fn ideal_generator(field: &Arc<CMField>, g: &Global) -> Result<Option<FieldElement>> {
    if let Some(r) = g.ideal_exp {
        return Ok(Some(craig_generator(field, r)));
    }
    match &g.ideal_gen {
        Some(s) => {
            let k = FieldElement::parse(field, s)?;
            if k.is_zero() {
                return usage("--ideal-gen must be nonzero");
            }
            Ok(Some(k))
        }
        None => Ok(None),
    }
}

fn cmd_bound(cfg: &RunConfig, g: &Global) -> Result<u8> {
    let field = cfg.field()?;
    let basis = unit_basis(field, g)?;
    let report = match ideal_generator(field, g)? {
        Some(k) => ideal_bound(field, &basis, &k, &cfg.prec)?,
        None => theorem_bound(field, &basis, &cfg.prec)?,
    };
    if cfg.json {
        emit_json("bound", &report)?;
    } else {
        print_bound(&report);
    }
    Ok(exit::OK)
}

fn print_bound(r: &BoundReport) {
    println!("conductor {}  k {}  basis {}", r.conductor, r.k, r.basis_provenance);
    for s in &r.simplices {
        let det_b: Vec<String> = s.det_b.iter().map(|d| format!("{d:.25}")).collect();
        println!("simplex {:?}", s.perm);
        println!("  det A  {:.25}", s.det_a);
        println!("  det B  {}", det_b.join("  "));
        println!("  bound  {:.25}", s.bound);
    }
    println!("bound    {:.25}", r.bound);
    if let (Some(n), Some(b)) = (&r.ideal_norm, &r.ideal_bound) {
        println!("ideal norm {n}  ideal bound {b:.25}");
    }
    if let Some(v) = r.verdict {
        println!("verdict  {v}");
    }
}

#[derive(Serialize)]
struct MinimaOutput<'a> {
    conductor: u64,
    weights: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ideal_generator: Option<Vec<IntJson<'a>>>,
    #[serde(flatten)]
    set: &'a cmlattice::lattice::ShortVectorSet,
    /// Every minimizer is `kappa * u` with `u` a unit.
    all_unit_multiples: bool,
}

fn cmd_minima(cfg: &RunConfig, g: &Global) -> Result<u8> {
    let field = cfg.field()?;
    let w = weights(field, g)?;
    let kappa = ideal_generator(field, g)?;
    let set = minimal_vectors(field, &w, kappa.as_ref(), &cfg.prec, cfg.budget)?;
    let all_units = set
        .vectors
        .iter()
        .map(|v| FieldElement::from_i64s(field, v)?.is_unit())
        .collect::<cmlattice::Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    if cfg.json {
        let out = MinimaOutput {
            conductor: field.conductor(),
            weights: w.to_string(),
            ideal_generator: kappa.as_ref().map(|k| k.coords().iter().map(IntJson).collect()),
            set: &set,
            all_unit_multiples: all_units,
        };
        emit_json("minima", &out)?;
    } else {
        println!("conductor {}  weights {}", field.conductor(), w);
        if let Some(k) = &kappa {
            println!("ideal generator {k}");
        }
        println!("mu {}  count {}  nodes {}", set.mu, set.count(), set.nodes);
        for v in &set.vectors {
            let coords: Vec<String> = v.iter().map(i64::to_string).collect();
            println!("  {}", coords.join(","));
        }
        println!("all minimizers are unit multiples: {all_units}");
    }
    Ok(exit::OK)
}

fn parse_range(s: &str) -> Result<Vec<u32>> {
    let parse = |t: &str| t.trim().parse::<u32>().ok();
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a), parse(b.trim_start_matches('='))),
        None => (parse(s), parse(s)),
    };
    match (a, b) {
        (Some(a), Some(b)) if a <= b => Ok((a..=b).collect()),
        _ => usage(format!("-r: expected `a..b` with a <= b, got {s:?}")),
    }
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "UPPERCASE")]
enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Serialize)]
struct CraigRow {
    r: u32,
    ideal_bound: cmlattice::RealInterval,
    verdict: Verdict,
    mu: cmlattice::lattice::LatticeNorm,
    count: usize,
    factorization: bool,
    theta_agrees: bool,
    status: Status,
}

#[derive(Serialize)]
struct CraigReport {
    p: u64,
    bound: cmlattice::RealInterval,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    hull: Option<HullCheck>,
    rows: Vec<CraigRow>,
}

fn cmd_verify_craig(cfg: &RunConfig, g: &Global, a: &VerifyArgs) -> Result<u8> {
    if !is_prime(a.p) || a.p < 5 {
        return usage(format!("-p: expected a prime at least 5, got {}", a.p));
    }
    let rs = parse_range(&a.r)?;
    let max_norm = parse_rational("--max-norm", &a.max_norm)?;
    let field = make_field(a.p)?;
    let basis = unit_basis(&field, g)?;
    let report = theorem_bound(&field, &basis, &cfg.prec)?;
    let verdict = report.verdict.expect("prime conductor");
    let k = field.half_degree();
    let w = Weights::equal(k);
    let hull = if (2..=3).contains(&k) && a.hull_trials > 0 {
        Some(hull_consistency(&field, 3, a.hull_trials, g.seed, &cfg.prec, cfg.budget)?)
    } else {
        None
    };
    let scale = BigRational::new(BigInt::from(2), BigInt::from(a.p));
    let mut rows = Vec::new();
    for &r in &rs {
        let kappa = craig_generator(&field, r);
        let norm = BigRational::from_integer(kappa.norm());
        let ideal_bound = report.bound.mul_rational(&norm);
        let set = minimal_vectors(&field, &w, Some(&kappa), &cfg.prec, cfg.budget)?;
        let mut factorization = true;
        for v in &set.vectors {
            let u = FieldElement::from_i64s(&field, v)?;
            let alpha = &kappa * &u;
            let ok = alpha.exact_divide(&kappa).is_ok_and(|q| q == u) && u.norm() == BigInt::from(1);
            factorization &= ok;
        }
        let circ = theta_prefix(&craig_circulant(a.p as usize - 1, r)?, &max_norm, cfg.budget)?;
        let ideal_gram = gram_matrix(&field, &w, Some(&kappa), &cfg.prec)?.scaled(&scale);
        let ideal = theta_prefix(&ideal_gram, &max_norm, cfg.budget)?;
        let theta_agrees = circ.coefficients == ideal.coefficients;
        let status = match verdict {
            _ if !theta_agrees => Status::Fail,
            Verdict::AllMinimaAreUnits if factorization => Status::Pass,
            Verdict::AllMinimaAreUnits => Status::Fail,
            Verdict::Inconclusive => Status::Inconclusive,
        };
        rows.push(CraigRow {
            r,
            ideal_bound,
            verdict,
            mu: set.mu.clone(),
            count: set.count(),
            factorization,
            theta_agrees,
            status,
        });
    }
    let hull_violated = hull == Some(HullCheck::Violated);
    let failed = hull_violated || rows.iter().any(|r| r.status == Status::Fail);
    let out = CraigReport {
        p: a.p,
        bound: report.bound.clone(),
        verdict,
        hull,
        rows,
    };
    if cfg.json {
        emit_json("verify-craig", &out)?;
    } else {
        println!("p {}  bound {:.20}  verdict {}", out.p, out.bound, out.verdict);
        if let Some(h) = out.hull {
            println!("hull check ({} weight vectors, seed {}): {h:?}", a.hull_trials, g.seed);
        }
        for row in &out.rows {
            println!(
                "r={} {}  mu {}  count {}  factors as (1-zeta)^r*unit: {}  theta agrees: {}",
                row.r, row.status, row.mu, row.count, row.factorization, row.theta_agrees
            );
        }
    }
    Ok(if failed { exit::VERIFY_FAIL } else { exit::OK })
}

fn cmd_set_e(cfg: &RunConfig, g: &Global) -> Result<u8> {
    let field = cfg.field()?;
    let basis = unit_basis(field, g)?;
    let report = theorem_bound(field, &basis, &cfg.prec)?;
    let set = characteristic_set_e(field, &basis, &report, &cfg.prec, cfg.budget)?;
    if cfg.json {
        emit_json("set-e", &set)?;
    } else {
        println!("conductor {}  |E| = {}", field.conductor(), set.size());
        for e in &set.elements {
            println!("  {e}  (norm {})", e.norm());
        }
    }
    Ok(exit::OK)
}

fn cmd_theta(cfg: &RunConfig, g: &Global, a: &ThetaArgs) -> Result<u8> {
    let max_norm = parse_rational("--max-norm", &a.max_norm)?;
    let gram = match &a.circulant {
        Some(arg) => {
            let parts: Vec<Option<u64>> = arg.split(',').map(|t| t.trim().parse().ok()).collect();
            let [Some(n), Some(r)] = parts[..] else {
                return usage(format!("--circulant: expected `n,r`, got {arg:?}"));
            };
            craig_circulant(n as usize, r as u32)?
        }
        None => {
            let field = cfg.field()?;
            let w = weights(field, g)?;
            if w.common_value().is_none() {
                return usage("theta needs equal weights for an exact Gram matrix");
            }
            let kappa = ideal_generator(field, g)?;
            gram_matrix(field, &w, kappa.as_ref(), &cfg.prec)?
        }
    };
    let gram = match &a.scale {
        Some(s) => {
            let c = parse_rational("--scale", s)?;
            if c <= BigRational::from_integer(0.into()) {
                return usage("--scale must be positive");
            }
            gram.scaled(&c)
        }
        None => gram,
    };
    let theta = theta_prefix(&gram, &max_norm, cfg.budget)?;
    if cfg.json {
        emit_json("theta", &theta)?;
    } else {
        println!("scale {}", theta.scale);
        for (m, c) in &theta.coefficients {
            println!("  {m:>8}  {c}");
        }
    }
    Ok(exit::OK)
}

fn cmd_psi(cfg: &RunConfig, g: &Global, a: &PsiArgs) -> Result<u8> {
    let field = cfg.field()?;
    let w = weights(field, g)?;
    if a.cusp {
        let est = cusp_extract(field, &w, &cfg.prec, cfg.budget)?;
        if cfg.json {
            emit_json("psi", &est)?;
        } else {
            println!("mu {:.20}  n {}  (t = {})", est.mu, est.count, est.t);
        }
        return Ok(exit::OK);
    }
    let t = parse_rational("--t", &a.t)?;
    if t <= BigRational::from_integer(0.into()) {
        return usage("--t must be positive");
    }
    let s = psi_truncated(field, &w, &t, &cfg.prec, cfg.budget)?;
    if cfg.json {
        emit_json("psi", &s)?;
    } else {
        println!("t {}  weights {}  radius {}", s.t, w, s.radius);
        println!("psi  {:.30}", s.value);
        println!("tail {:.30}", s.tail);
    }
    Ok(exit::OK)
}
