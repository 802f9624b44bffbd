//! One PASS/FAIL line per acceptance criterion. Equalities are exact (tolerance
//! zero); each criterion also has a wall-clock budget. Set ACCEPTANCE_STRICT=1
//! to turn any FAIL into a nonzero exit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};
use wildjl::algebra::{AlgebraCtx, Host, MatElt};
use wildjl::arith::{cyclo_add, cyclo_eq, cyclo_mul, lcm, make_tower, CycloValue, FieldTower, QmodZ};
use wildjl::cli::{run_scenario, Options, Scenario};
use wildjl::extension::{ExtendedChar, Xi};
use wildjl::inner_form::{hasse_invariant, InnerForm};
use wildjl::strata::Stratum;
use wildjl::symplectic::{commutator_pairing, formula_pairing, lagrangian_count, SympSpace};
use wildjl::trace::{associate, coset_reps, induced_trace, standard_samples, trace_table, Pair, ViaConjugation};
use wildjl::transfer::{solve_frobenius, TransferredChar, MAX_DEGREE};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn xi0() -> Xi {
    Xi { at_varpi: QmodZ::new(1, 9), at_mu: QmodZ::new(1, 2) }
}

fn tower(f: usize, prec: u32) -> Arc<FieldTower> {
    Arc::new(make_tower(3, f, prec).unwrap())
}

fn stratum(f: usize, coeffs: &[i64], l: u32, prec: u32) -> Stratum {
    let h = Host::split(AlgebraCtx::new(3, tower(f, prec)).unwrap());
    Stratum::from_eisenstein(h, coeffs, l).unwrap()
}

fn inner_host(prec: u32, m: usize, z: i64) -> Host {
    Host::inner(AlgebraCtx::new(3, tower(3, prec)).unwrap(), m, z).unwrap()
}

/// The pairing space of `(p, n, l) = (3, 3, 2)` over `K_3`, where it has dimension 6.
fn pairing_stratum() -> Stratum {
    stratum(3, &[-3, 0, 0], 2, 5)
}

fn headline_pairs(st: &Stratum, hb: &Host) -> Vec<Pair> {
    let ta = st.host.ctx.tower.clone();
    standard_samples(&st.host.ctx).iter().map(|s| associate(s, &ta, hb).unwrap()).collect()
}

fn c1() -> Outcome {
    let st = pairing_stratum();
    let c = &st.host.ctx;
    let basis: Vec<MatElt> = st.j1.generators().iter().map(|g| st.host.from_coords(g)).collect();
    let one = c.identity();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut xs = vec![];
    for x in &basis {
        for y in &basis {
            xs.push((x.clone(), y.clone()));
        }
    }
    let nb = xs.len();
    for _ in 0..200 {
        xs.push((c.sub(&st.random_in(&st.j1, &mut rng), &one), c.sub(&st.random_in(&st.j1, &mut rng), &one)));
    }
    let (mut same, mut neg) = (0, 0);
    for (x, y) in &xs {
        let a = commutator_pairing(&st, x, y).unwrap();
        let b = formula_pairing(&st, x, y);
        same += (a == b) as usize;
        neg += (a == -b) as usize;
    }
    ok(same == xs.len(), format!("{same}/{} equal ({nb} basis pairs + 200 random); {neg} equal the negative", xs.len()))
}

fn c2() -> Outcome {
    let sp = SympSpace::build(&pairing_stratum()).unwrap();
    let odd = SympSpace::build(&stratum(3, &[-3, 0, 0], 1, 5)).unwrap();
    let pass = sp.dim() == 6 && sp.is_alternating() && sp.is_nondegenerate() && odd.dim() == 0;
    ok(pass, format!("dim {}, alternating {}, nondegenerate {}, odd-l dim {}", sp.dim(), sp.is_alternating(), sp.is_nondegenerate(), odd.dim()))
}

fn c3() -> Outcome {
    let sp = SympSpace::build(&pairing_stratum()).unwrap();
    let all = sp.enumerate_lagrangians().unwrap();
    let closed = lagrangian_count(3, 3) as usize;
    let stable = all.iter().filter(|w| sp.is_stable(w) && sp.is_graded(w)).count();
    let klin = all.iter().filter(|w| sp.is_scalar_stable(w)).count();
    let kstable = all.iter().filter(|w| sp.is_scalar_stable(w) && sp.is_stable(w)).count();
    println!("INFO criterion 3: {kstable} of the {klin} K-linear Lagrangians are stable");
    ok(all.len() == 1120 && closed == 1120 && stable == 1, format!("total {} (closed form {closed}), stable and graded {stable}", all.len()))
}

fn c4() -> Outcome {
    let st = stratum(1, &[3, 0, 0], 2, 5);
    let hb = inner_host(5, 1, 1);
    let tc = TransferredChar::new(&st, &xi0(), &hb, QmodZ::ZERO).unwrap();
    let lb = &tc.lambda_b;
    let cb = &hb.ctx;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut hom, mut stab, mut routes) = (0, 0, 0);
    let trials = 100usize;
    for i in 0..trials as u32 {
        let g = lb.st.random_in(&lb.i1, &mut rng);
        let h = lb.st.random_in(&lb.i1, &mut rng);
        let (a, b) = (lb.iota_theta(&g).unwrap(), lb.iota_theta(&h).unwrap());
        hom += (lb.iota_theta(&cb.mul(&g, &h)).unwrap() == a + b) as usize;
        stab += (lb.iota_theta(&lb.st.ad_varpi(&g).unwrap()).unwrap() == a) as usize;
        let e = cb.scale_int(&cb.mul(&cb.pow(&lb.st.varpi, i % 3), &g), if i % 2 == 0 { 1 } else { -1 });
        routes += (tc.standard(&e).unwrap() == tc.via_conjugation(&e).unwrap()) as usize;
    }
    ok(
        hom == trials && stab == trials && routes == trials,
        format!("homomorphism {hom}/{trials}, Ad(varpi) {stab}/{trials}, standard = Ad(y) route {routes}/{trials}"),
    )
}

fn c5() -> Outcome {
    let prec = 5;
    let kn = tower(3, prec);
    let ck = AlgebraCtx::new(3, kn.clone()).unwrap();
    let host = Host::split(ck.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = wildjl::arith::pow_u64(3, prec);
    let random_unit = |rng: &mut ChaCha8Rng| loop {
        let v: Vec<u64> = (0..host.ncoords()).map(|_| rng.gen_range(0..q)).collect();
        let u = host.from_coords(&v);
        if ck.inv_unit(&u).is_ok() {
            return u;
        }
    };
    let mut solved = 0;
    let mut errors = std::collections::BTreeMap::new();
    for _ in 0..20 {
        let u = random_unit(&mut rng);
        match solve_frobenius(&u, &kn, 1, 1, MAX_DEGREE) {
            Ok(s) if s.residual + 1 >= prec => solved += 1,
            Ok(s) => *errors.entry(format!("residual {}", s.residual)).or_insert(0) += 1,
            Err(e) => *errors.entry(e.to_string()).or_insert(0) += 1,
        }
    }
    // units of the form t phi(t)^{-1} are the solvable ones at this degree
    let mut lang = 0;
    for _ in 0..20 {
        let t0 = random_unit(&mut rng);
        let u = lang_image(&ck, &t0);
        if let Ok(s) = solve_frobenius(&u, &kn, 1, 1, MAX_DEGREE) {
            lang += (s.residual + 1 >= prec) as usize;
        }
    }
    println!("INFO criterion 5: {lang}/20 units of the form t phi(t)^-1 solved with residual >= {}", prec - 1);
    ok(solved == 20, format!("{solved}/20 generic units solved; failures {errors:?}"))
}

/// `t phi(t)^{-1}` for `phi(X) = Pi sigma(X) Pi^{n-1} / p`.
fn lang_image(ck: &AlgebraCtx, t: &MatElt) -> MatElt {
    let pi = ck.standard_prime();
    let phi = ck.div_p_pow(&ck.mul(&ck.mul(&pi, &ck.frob(t, 1)), &ck.pow(&pi, 2)), 1).unwrap();
    ck.mul(t, &ck.inv_unit(&phi).unwrap())
}

fn c6() -> Outcome {
    let mut bad = vec![];
    for n in [3usize, 9] {
        for m in (1..=n).filter(|m| n % m == 0) {
            for z in (1..n as i64).filter(|z| z % 3 != 0) {
                let want = QmodZ::new(-(z as i128), (n / m) as u64);
                if hasse_invariant(n, m, z) != want {
                    bad.push(format!("({n},{m},{z})"));
                }
            }
        }
    }
    let mut dims = vec![];
    for (n, m, z, prec) in [(3usize, 1usize, 1i64, 3u32), (3, 3, 1, 3), (9, 3, 1, 3)] {
        match InnerForm::build_fresh(3, n, m, z, prec) {
            Ok(b) => dims.push((n, b.dim())),
            Err(e) => {
                bad.push(format!("build ({n},{m},{z}): {e}"));
                dims.push((n, 0));
            }
        }
    }
    let dim_ok = dims.iter().all(|(n, d)| *d == n * n);
    ok(bad.is_empty() && dim_ok, format!("invariant mismatches {bad:?}; dims {dims:?}"))
}

fn scenario(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    Scenario::load(&path).unwrap()
}

fn c7() -> Outcome {
    let opts = Options::default();
    let head = run_scenario(&scenario("01_headline.toml"), &opts).unwrap();
    let split = run_scenario(&scenario("02_split.toml"), &opts).unwrap();
    let control = run_scenario(&scenario("03_control.toml"), &opts).unwrap();
    let rows = &head.trace_rows;
    let vd: std::collections::BTreeSet<u32> = rows.iter().map(|r| r.val_det).collect();
    let fields: std::collections::BTreeSet<u64> = rows.iter().map(|r| r.field).collect();
    let labels: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    let all_eq = rows.iter().all(|r| r.equal);
    let nonzero = rows.iter().filter(|r| !r.tr_g.is_zero()).count();
    let ctl_fails = control.trace_rows.iter().any(|r| !r.equal);
    let pass = labels.len() >= 5 && vd.len() >= 2 && fields.len() >= 2 && all_eq && head.passed() && split.passed() && ctl_fails && !control.passed();
    ok(
        pass,
        format!(
            "{} pairs, {} val_det classes, {} fields, all equal {all_eq} ({nonzero} nonzero); split {}; control {} with {}/{} rows unequal",
            labels.len(),
            vd.len(),
            fields.len(),
            head.verdict,
            control.verdict,
            control.trace_rows.iter().filter(|r| !r.equal).count(),
            control.trace_rows.len()
        ),
    )
}

fn c8() -> Outcome {
    let st = stratum(1, &[3, 0, 0], 2, 5);
    let hb = inner_host(5, 1, 1);
    let lam = ExtendedChar::new(st.clone(), xi0()).unwrap();
    let pairs = headline_pairs(&st, &hb);
    let offsets = [QmodZ::ZERO, QmodZ::new(1, 13)];
    let tables: Vec<_> = offsets
        .iter()
        .map(|&o| {
            let tc = TransferredChar::new(&st, &xi0(), &hb, o).unwrap();
            trace_table(&lam, &ViaConjugation(&tc), &pairs, 100_000).unwrap()
        })
        .collect();
    let lk_differ = {
        let a = TransferredChar::new(&st, &xi0(), &hb, offsets[0]).unwrap();
        let b = TransferredChar::new(&st, &xi0(), &hb, offsets[1]).unwrap();
        a.lambda_k.xi != b.lambda_k.xi
    };
    let same = tables[0].iter().zip(&tables[1]).all(|(a, b)| cyclo_eq(&a.tr_h, &b.tr_h).unwrap());
    ok(same && lk_differ, format!("offsets 0 and 1/13 on mu_K (distinct lambda_K: {lk_differ}): tables identical {same} on {} pairs", pairs.len()))
}

fn root_of_unity(e: QmodZ, m: u64) -> CycloValue {
    CycloValue::from_exps(&[e], m).unwrap()
}

fn c9() -> Outcome {
    let n = 3u64;
    let st = stratum(1, &[3, 0, 0], 2, 5);
    let hb = inner_host(5, 1, 1);
    let pairs = headline_pairs(&st, &hb);
    let lam = ExtendedChar::new(st.clone(), xi0()).unwrap();
    let cs = coset_reps(&lam, 100_000).unwrap();
    // traces of the unramified twists, each computed from its own character
    let twists: Vec<ExtendedChar> = (0..n)
        .map(|j| lam.with_xi(Xi { at_varpi: xi0().at_varpi + QmodZ::new(j as i128, n), at_mu: xi0().at_mu }))
        .collect();
    let mut support_ok = true;
    let mut seen = vec![];
    for pr in &pairs {
        let trs: Vec<CycloValue> = twists.iter().map(|t| induced_trace(t, &cs, &pr.sample.g).unwrap().value).collect();
        let m = trs.iter().fold(n, |a, t| lcm(a, t.modulus));
        let mut acc = CycloValue::zero(m);
        for (j, t) in trs.iter().enumerate() {
            let chi = root_of_unity(QmodZ::new(-(j as i128), n), m);
            acc = cyclo_add(&acc, &cyclo_mul(&chi, &t.lift(m).unwrap()).unwrap()).unwrap();
        }
        let phi = acc.div_exact(n as i64).unwrap();
        let expect_zero = pr.val_det % n as u32 != 1;
        let good = if expect_zero { phi.is_zero() } else { !phi.is_zero() && cyclo_eq(&phi, &trs[0]).unwrap() };
        support_ok &= good;
        seen.push(format!("{}:{}", pr.val_det, if phi.is_zero() { "0" } else { "*" }));
    }
    let other = lam.with_xi(Xi { at_varpi: QmodZ::new(2, 9), at_mu: xi0().at_mu });
    let separated = pairs
        .iter()
        .filter(|pr| {
            let a = induced_trace(&lam, &cs, &pr.sample.g).unwrap().value;
            let b = induced_trace(&other, &cs, &pr.sample.g).unwrap().value;
            !cyclo_eq(&a, &b).unwrap()
        })
        .count();
    ok(
        support_ok && separated > 0,
        format!("Phi by val_det [{}]; xi(varpi) 1/9 vs 2/9 differ on {separated}/{} samples", seen.join(" "), pairs.len()),
    )
}

/// Name, budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 pairing oracle", 10, c1),
        ("2 nondegeneracy and alternation", 1, c2),
        ("3 Lagrangian uniqueness", 300, c3),
        ("4 standard-form coherence", 60, c4),
        ("5 solver correctness", 60, c5),
        ("6 Hasse invariants and dimensions", 120, c6),
        ("7 headline character identity", 900, c7),
        ("8 choice robustness", 900, c8),
        ("9 twist filter and separation", 120, c9),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let t = Instant::now();
        let out = f();
        let el = t.elapsed();
        let in_time = el <= Duration::from_secs(budget);
        let pass = out.pass && in_time;
        failed += !pass as usize;
        println!(
            "{} criterion {name}: {} [{:.2?} of {budget}s{}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            el,
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{failed} criteria failed");
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
