//! Scenario files, the end-to-end pipeline, reports and suites.

use crate::algebra::{AlgebraCtx, AlgebraError, Host};
use crate::arith::{make_tower, pow_u64, ArithError, CycloValue, QmodZ};
use crate::extension::{ExtError, ExtendedChar, Xi};
use crate::inner_form::hasse_invariant;
use crate::strata::{StrataError, Stratum};
use crate::symplectic::{commutator_pairing, formula_pairing, SympError};
use crate::trace::{associate, pi_diag, standard_samples, trace_table, InducedChar, Sample, TraceError, ViaConjugation};
use crate::transfer::{twist_exponent, TransferError, TransferredChar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(_) => 2,
            CliError::Precision(_) => 3,
            CliError::Config(_) | CliError::Io(_) => 4,
        }
    }
}

fn arith_err(e: &ArithError) -> CliError {
    match e {
        ArithError::Precision { .. } | ArithError::EnlargeField => CliError::Precision(e.to_string()),
        ArithError::BadPrime(_) | ArithError::BadDegree | ArithError::BadPrecision | ArithError::Reducible => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Math(e.to_string()),
    }
}

fn algebra_err(e: &AlgebraError) -> CliError {
    match e {
        AlgebraError::Arith(a) => arith_err(a),
        AlgebraError::PrecisionFloor(..) => CliError::Precision(e.to_string()),
        AlgebraError::NotPPower(_) | AlgebraError::NotEisenstein => CliError::Config(e.to_string()),
        _ => CliError::Math(e.to_string()),
    }
}

fn strata_err(e: &StrataError) -> CliError {
    match e {
        StrataError::Algebra(a) => algebra_err(a),
        StrataError::NotMinimal(_) | StrataError::BadPrime => CliError::Config(e.to_string()),
        _ => CliError::Math(e.to_string()),
    }
}

fn symp_err(e: &SympError) -> CliError {
    match e {
        SympError::Strata(s) => strata_err(s),
        SympError::Algebra(a) => algebra_err(a),
        _ => CliError::Math(e.to_string()),
    }
}

fn ext_err(e: &ExtError) -> CliError {
    match e {
        ExtError::Strata(s) => strata_err(s),
        ExtError::Symp(s) => symp_err(s),
        ExtError::Algebra(a) => algebra_err(a),
        ExtError::InconsistentXi => CliError::Config(e.to_string()),
        _ => CliError::Math(e.to_string()),
    }
}

fn transfer_err(e: &TransferError) -> CliError {
    match e {
        TransferError::Algebra(a) => algebra_err(a),
        TransferError::Arith(a) => arith_err(a),
        TransferError::Strata(s) => strata_err(s),
        TransferError::Ext(x) => ext_err(x),
        TransferError::NoSolution(_) | TransferError::Stalled(_) => CliError::Precision(e.to_string()),
        _ => CliError::Math(e.to_string()),
    }
}

fn trace_err(e: &TraceError) -> CliError {
    match e {
        TraceError::Algebra(a) => algebra_err(a),
        TraceError::Arith(a) => arith_err(a),
        TraceError::Ext(x) => ext_err(x),
        TraceError::Transfer(t) => transfer_err(t),
        _ => CliError::Math(e.to_string()),
    }
}

// ---- scenario files ----

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// A control is expected to fail; its verdict never fails a suite.
    #[serde(default)]
    pub control: bool,
    pub field: FieldSection,
    pub stratum: StratumSection,
    pub inner: InnerSection,
    pub character: CharSection,
    #[serde(default)]
    pub sampling: SamplingSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub p: u64,
    pub n: usize,
    pub precision: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSection {
    /// `[a_0, ..., a_{n-1}]` of `x^n + a_{n-1} x^{n-1} + ... + a_0`.
    pub minpoly: Vec<i64>,
    pub level: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSection {
    pub m: usize,
    pub z: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSection {
    pub xi_varpi: String,
    pub xi_mu: String,
    #[serde(default = "zero_string")]
    pub lambda_k_offset: String,
    /// Added to `xi(varpi)` on the `B` side only.
    pub corrupt_varpi: Option<String>,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_cap")]
    pub coset_cap: usize,
}

fn default_pairs() -> usize {
    8
}

fn default_cap() -> usize {
    200_000
}

impl Default for SamplingSection {
    fn default() -> Self {
        SamplingSection { seed: 0, pairs: default_pairs(), coset_cap: default_cap() }
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub precision: Option<u32>,
    pub seed: Option<u64>,
    pub pairs: Option<usize>,
    pub enumerate_lagrangians: bool,
}

fn rational(field: &str, s: &str) -> Result<QmodZ, CliError> {
    let q = QmodZ::parse(s).ok_or_else(|| CliError::Config(format!("{field}: cannot parse {s:?}")))?;
    let canonical = if q.is_zero() { s.trim() == "0" } else { s.trim() == q.to_string() };
    if !canonical {
        return Err(CliError::Config(format!("{field}: {s:?} is not in lowest terms in [0, 1); write {q}")));
    }
    Ok(q)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Validated scenario with overrides applied.
#[derive(Clone, Debug)]
pub struct Plan {
    pub sc: Scenario,
    pub prec: u32,
    pub xi: Xi,
    pub offset: QmodZ,
    pub corrupt: Option<QmodZ>,
    pub enumerate: bool,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn plan(&self, opts: &Options) -> Result<Plan, CliError> {
        let mut sc = self.clone();
        let (p, n, l) = (sc.field.p, sc.field.n, sc.stratum.level);
        if p == 2 || !is_prime(p) {
            return Err(CliError::Config(format!("p = {p} is not an odd prime")));
        }
        if n < 2 || (1..8).map(|r| pow_u64(p, r)).all(|q| q != n as u64) {
            return Err(CliError::Config(format!("n = {n} is not a positive power of p")));
        }
        if gcd(l as u64, n as u64) != 1 {
            return Err(CliError::Config(format!("gcd(l, n) = gcd({l}, {n}) != 1")));
        }
        if sc.stratum.minpoly.len() != n {
            return Err(CliError::Config(format!("minpoly needs {n} coefficients")));
        }
        let (m, z) = (sc.inner.m, sc.inner.z);
        if m == 0 || n % m != 0 {
            return Err(CliError::Config(format!("m = {m} does not divide n = {n}")));
        }
        if gcd(z.rem_euclid(n as i64) as u64, n as u64) != 1 {
            return Err(CliError::Config(format!("z = {z} is not a unit mod {n}")));
        }
        if let Some(v) = opts.precision {
            sc.field.precision = Some(v);
        }
        let prec = sc.field.precision.unwrap_or(l + 3);
        if prec < l + 3 {
            return Err(CliError::Config(format!("precision {prec} is below l + 3 = {}", l + 3)));
        }
        sc.field.precision = Some(prec);
        if let Some(s) = opts.seed {
            sc.sampling.seed = s;
        }
        if let Some(k) = opts.pairs {
            sc.sampling.pairs = k;
        }
        if sc.sampling.pairs == 0 {
            return Err(CliError::Config("pairs must be positive".into()));
        }
        let ch = &sc.character;
        let xi = Xi { at_varpi: rational("xi_varpi", &ch.xi_varpi)?, at_mu: rational("xi_mu", &ch.xi_mu)? };
        let offset = rational("lambda_k_offset", &ch.lambda_k_offset)?;
        let corrupt = ch.corrupt_varpi.as_deref().map(|s| rational("corrupt_varpi", s)).transpose()?;
        if corrupt.is_some_and(|c| c.is_zero()) {
            return Err(CliError::Config("corrupt_varpi must be nonzero".into()));
        }
        Ok(Plan { sc, prec, xi, offset, corrupt, enumerate: opts.enumerate_lagrangians })
    }
}

// ---- reports ----

#[derive(Clone, Debug, Serialize)]
pub struct Normalization {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Gate {
    pub name: String,
    pub module: String,
    /// Only hard gates enter the verdict.
    pub hard: bool,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    precision: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianStats {
    pub dim: usize,
    /// `None` unless enumeration was requested.
    pub total: Option<usize>,
    pub stable: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub label: String,
    pub charpoly: Vec<i64>,
    pub val_det: u32,
    pub field: u64,
    pub tr_g: CycloValue,
    pub tr_h: CycloValue,
    pub fixed_g: usize,
    pub fixed_h: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cosets {
    pub g: usize,
    pub h: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub normalizations: Vec<Normalization>,
    pub gates: Vec<Gate>,
    pub lagrangian: LagrangianStats,
    pub cosets: Cosets,
    pub trace_rows: Vec<Row>,
    pub verdict: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else if self.gates.iter().any(|g| g.hard && !g.passed && g.precision) {
            3
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn gate(name: &str, module: &str, hard: bool, passed: bool, detail: String) -> Gate {
    Gate { name: name.into(), module: module.into(), hard, passed, detail, precision: false }
}

fn norm(key: &str, value: String) -> Normalization {
    Normalization { key: key.into(), value }
}

/// The standard samples, then `Pi diag(1, .., u)` for seeded random units `u`.
pub fn sample_pool(ca: &AlgebraCtx, k: usize, seed: u64) -> Vec<Sample> {
    let p = ca.p() as i64;
    let mut out: Vec<Sample> = standard_samples(ca).into_iter().take(k).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < k {
        let u: i64 = rng.gen_range(2..p * p * p);
        if u % p == 0 {
            continue;
        }
        let u = if rng.gen_bool(0.5) { -u } else { u };
        out.push(Sample { label: format!("Pi*d({u})"), g: pi_diag(ca, u), radicand: u * p });
    }
    out
}

pub fn run_plan(plan: &Plan) -> Result<Report, CliError> {
    let sc = &plan.sc;
    let (p, n, l, prec) = (sc.field.p, sc.field.n, sc.stratum.level, plan.prec);
    let (m, z) = (sc.inner.m, sc.inner.z);
    let cap = sc.sampling.coset_cap;

    let ta = Arc::new(make_tower(p, 1, prec).map_err(|e| arith_err(&e))?);
    let ca = AlgebraCtx::new(n, ta.clone()).map_err(|e| algebra_err(&e))?;
    let ha = Host::split(ca.clone());
    let st = Stratum::from_eisenstein(ha, &sc.stratum.minpoly, l).map_err(|e| strata_err(&e))?;
    let lam = ExtendedChar::new(st.clone(), plan.xi.clone()).map_err(|e| ext_err(&e))?;
    let space = &lam.space;
    let d = space.dim();
    let mut gates = vec![gate("minimality", "strata", true, true, format!("gcd({l}, {n}) = 1"))];

    let alt = space.is_alternating();
    let nondeg = d == 0 || space.is_nondegenerate();
    let parity = if l % 2 == 1 { d == 0 } else { d > 0 };
    gates.push(gate(
        "nondegeneracy",
        "symplectic",
        true,
        alt && nondeg && parity,
        format!("dim {d}, alternating {alt}, nondegenerate {nondeg}"),
    ));
    let w = &lam.lagrangian;
    let lag_ok = 2 * w.len() == d && space.is_isotropic(w) && space.is_stable(w);
    gates.push(gate("lagrangian", "symplectic", true, lag_ok, format!("chosen W of dim {} stable under Ad(varpi_E)", w.len())));

    let (mut same, mut flipped) = (0, 0);
    for x in &space.basis {
        for y in &space.basis {
            let a = commutator_pairing(&st, x, y).map_err(|e| symp_err(&e))?;
            let b = formula_pairing(&st, x, y);
            same += (a == b) as usize;
            flipped += (a == -b) as usize;
        }
    }
    gates.push(gate(
        "pairing_formula",
        "symplectic",
        false,
        same == d * d,
        format!("{same}/{} basis pairs equal psi_beta(1 - xy + yx), {flipped} equal its negative", d * d),
    ));

    let mut lagrangian = LagrangianStats { dim: d, total: None, stable: None };
    if plan.enumerate {
        match space.enumerate_lagrangians() {
            Ok(all) => {
                let stable = all.iter().filter(|w| space.is_stable(w) && space.is_graded(w)).count();
                lagrangian.total = Some(all.len());
                lagrangian.stable = Some(stable);
                gates.push(gate("uniqueness", "symplectic", true, stable == 1, format!("{stable} of {} Lagrangians stable and graded", all.len())));
            }
            Err(e) => gates.push(gate("uniqueness", "symplectic", true, false, e.to_string())),
        }
    }

    let kn = Arc::new(make_tower(p, n, prec).map_err(|e| arith_err(&e))?);
    let hb = Host::inner(AlgebraCtx::new(n, kn).map_err(|e| algebra_err(&e))?, m, z).map_err(|e| algebra_err(&e))?;
    let tc = TransferredChar::new(&st, &plan.xi, &hb, plan.offset).map_err(|e| transfer_err(&e))?;
    let residual = tc.conj.residual();
    let mut g = gate(
        "solver_residual",
        "transfer",
        true,
        residual + 1 >= prec,
        format!("y Pi^m tau(y)^-1 = gamma modulo p^{residual}, degrees {:?}", tc.conj.sol.degrees),
    );
    g.precision = true;
    gates.push(g);

    let lb = &tc.lambda_b;
    let cb = &hb.ctx;
    let mut rng = ChaCha8Rng::seed_from_u64(sc.sampling.seed);
    let mut agree = 0;
    let trials = 20;
    for i in 0..trials {
        let x = lb.st.random_in(&lb.i1, &mut rng);
        let h = cb.mul(&cb.pow(&lb.st.varpi, i % n as u32), &x);
        let a = tc.standard(&h).map_err(|e| transfer_err(&e))?;
        let b = tc.via_conjugation(&h).map_err(|e| transfer_err(&e))?;
        agree += (a == b) as usize;
    }
    gates.push(gate(
        "kappa_routes",
        "transfer",
        true,
        agree == trials as usize,
        format!("standard form equals Ad(y) route on {agree}/{trials} seeded elements"),
    ));

    let pool = sample_pool(&ca, sc.sampling.pairs, sc.sampling.seed);
    let mut pairs = vec![];
    let mut failed = vec![];
    for s in &pool {
        match associate(s, &ta, &hb) {
            Ok(pr) => pairs.push(pr),
            Err(TraceError::Transfer(TransferError::NotInB)) | Err(TraceError::Charpoly { .. }) => failed.push(s.label.clone()),
            Err(e) => return Err(trace_err(&e)),
        }
    }
    let classes: std::collections::BTreeSet<u32> = pairs.iter().map(|p| p.val_det % n as u32).collect();
    let fields: std::collections::BTreeSet<u64> = pairs.iter().map(|p| p.field).collect();
    gates.push(gate(
        "associates",
        "trace",
        true,
        failed.is_empty(),
        format!(
            "{} pairs with equal characteristic polynomials, {} val_det classes, {} fields{}",
            pairs.len(),
            classes.len(),
            fields.len(),
            if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
        ),
    ));

    let delta = plan.corrupt.unwrap_or(QmodZ::new(1, p));
    let bad = Xi { at_varpi: plan.xi.at_varpi + delta, at_mu: plan.xi.at_mu };
    let corrupted = lb.with_xi(bad);
    let via = ViaConjugation(&tc);
    let kappa: &dyn InducedChar = if plan.corrupt.is_some() { &corrupted } else { &via };
    let table = trace_table(&lam, kappa, &pairs, cap).map_err(|e| trace_err(&e))?;
    let control = if plan.corrupt.is_some() {
        table.clone()
    } else {
        trace_table(&lam, &corrupted, &pairs, cap).map_err(|e| trace_err(&e))?
    };
    let broken: Vec<&str> = control.iter().filter(|r| !r.equal).map(|r| r.label.as_str()).collect();
    gates.push(gate(
        "negative_control",
        "trace",
        true,
        !broken.is_empty(),
        format!("xi(varpi) shifted by {delta} on B: {} of {} rows unequal", broken.len(), control.len()),
    ));
    let cosets = Cosets {
        g: crate::trace::coset_reps(lam.group(), cap).map_err(|e| trace_err(&e))?.reps.len(),
        h: crate::trace::coset_reps(kappa.group(), cap).map_err(|e| trace_err(&e))?.reps.len(),
    };

    let trace_rows: Vec<Row> = table
        .into_iter()
        .map(|r| Row {
            label: r.label,
            charpoly: r.charpoly,
            val_det: r.val_det,
            field: r.field,
            tr_g: r.tr_g,
            tr_h: r.tr_h,
            fixed_g: r.fixed_g,
            fixed_h: r.fixed_h,
            equal: r.equal,
        })
        .collect();

    let zt = twist_exponent(z, n, n);
    let mut normalizations = vec![
        norm("psi_F", "psi(x) = exp(2 pi i x / p) on Z_p, extended through Q_p/Z_p".into()),
        norm("psi_K", "psi_F(Tr(c x)) with c fixed by Tr(c) = 1 on the tower basis".into()),
        norm("order_A", format!("standard minimal hereditary order in M_{n}(Q_{p}), Pi the standard prime element")),
        norm("order_B", format!("B = M_{m}(D) realized over K_{n}, Hasse invariant {}, tau = sigma^{zt}", hasse_invariant(n, m, z))),
        norm("minimality", "gcd(l, n) = 1".into()),
        norm("lagrangian", "first scalar-stable, Ad(varpi_E)-stable Lagrangian in the greedy search order".into()),
        norm("lambda_K", format!("norm-compatible extension of xi, shifted by {} on mu_K", plan.offset)),
        norm("gamma", "varpi_E^m c with N(c) = (varpi_E^n / p)^-m".into()),
        norm("field_key", format!("unit part of the radicand modulo n-th powers in (Z/{})^x, up to sign", p * p)),
    ];
    if m == n {
        normalizations.push(norm("split", "m = n: B is split, kappa is lambda transported by y".into()));
    }
    if let Some(c) = plan.corrupt {
        normalizations.push(norm("control", format!("kappa uses xi(varpi) + {c}")));
    }

    let passed = gates.iter().all(|g| !g.hard || g.passed) && !trace_rows.is_empty() && trace_rows.iter().all(|r| r.equal);
    Ok(Report {
        scenario: sc.clone(),
        normalizations,
        gates,
        lagrangian,
        cosets,
        trace_rows,
        verdict: if passed { "PASS" } else { "FAIL" }.into(),
    })
}

pub fn run_scenario(sc: &Scenario, opts: &Options) -> Result<Report, CliError> {
    run_plan(&sc.plan(opts)?)
}

// ---- suites ----

pub struct SuiteEntry {
    pub path: PathBuf,
    pub control: bool,
    pub result: Result<Report, CliError>,
}

impl SuiteEntry {
    pub fn exit_code(&self) -> i32 {
        match &self.result {
            Ok(r) => r.exit_code(),
            Err(e) => e.exit_code(),
        }
    }
}

/// Scenario files (`*.toml`) of a directory, sorted by name.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rd = std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    out.sort();
    Ok(out)
}

pub fn run_suite(dir: &Path, opts: &Options) -> Result<Vec<SuiteEntry>, CliError> {
    let files = scenario_files(dir)?;
    Ok(files
        .par_iter()
        .map(|path| match Scenario::load(path) {
            Ok(sc) => SuiteEntry { path: path.clone(), control: sc.control, result: run_scenario(&sc, opts) },
            Err(e) => SuiteEntry { path: path.clone(), control: false, result: Err(e) },
        })
        .collect())
}

/// Worst exit code over non-control entries; config errors dominate.
pub fn suite_exit(entries: &[SuiteEntry]) -> i32 {
    let codes: Vec<i32> = entries.iter().filter(|e| !e.control || e.result.is_err()).map(|e| e.exit_code()).collect();
    [4, 3, 2].into_iter().find(|c| codes.contains(c)).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADLINE: &str = r#"
name = "t"
[field]
p = 3
n = 3
[stratum]
minpoly = [3, 0, 0]
level = 2
[inner]
m = 1
z = 1
[character]
xi_varpi = "1/9"
xi_mu = "1/2"
"#;

    #[test]
    fn parses_and_defaults() {
        let sc = Scenario::parse(HEADLINE).unwrap();
        let plan = sc.plan(&Options::default()).unwrap();
        assert_eq!(plan.prec, 5);
        assert_eq!(plan.sc.sampling.pairs, 8);
        assert_eq!(plan.xi.at_varpi, QmodZ::new(1, 9));
    }

    #[test]
    fn config_errors() {
        let bad = |from: &str, to: &str| {
            let sc = Scenario::parse(&HEADLINE.replace(from, to));
            sc.and_then(|s| s.plan(&Options::default()).map(|_| ())).unwrap_err().exit_code()
        };
        assert_eq!(bad("level = 2", "level = 3"), 4);
        assert_eq!(bad("\"1/9\"", "\"2/18\""), 4);
        assert_eq!(bad("m = 1", "m = 2"), 4);
        assert_eq!(bad("p = 3", "p = 4"), 4);
        assert_eq!(bad("name", "nom"), 4);
        let sc = Scenario::parse(HEADLINE).unwrap();
        let low = Options { precision: Some(4), ..Default::default() };
        assert_eq!(sc.plan(&low).unwrap_err().exit_code(), 4);
    }

    #[test]
    fn headline_passes_and_is_deterministic() {
        let sc = Scenario::parse(HEADLINE).unwrap();
        let a = run_scenario(&sc, &Options::default()).unwrap();
        assert!(a.passed(), "{}", a.to_json());
        let b = run_scenario(&sc, &Options::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn control_fails_on_rows_only() {
        let text = HEADLINE.replace("xi_mu = \"1/2\"", "xi_mu = \"1/2\"\ncorrupt_varpi = \"1/3\"");
        let r = run_scenario(&Scenario::parse(&text).unwrap(), &Options::default()).unwrap();
        assert!(!r.passed());
        assert_eq!(r.exit_code(), 2);
        assert!(r.gates.iter().all(|g| !g.hard || g.passed));
    }
}
