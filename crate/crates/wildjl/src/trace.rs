//! Induced characters on elliptic elements: coset enumeration, exact traces,
//! associated pairs across `A` and `B`, and the unramified twist filter.

use crate::algebra::{AlgebraCtx, AlgebraError, MatElt};
use crate::arith::{cyclo_add, cyclo_eq, cyclo_mul, lcm, pow_u64, ArithError, CycloValue, FieldTower, QmodZ};
use crate::extension::{ExtError, ExtendedChar};
use crate::transfer::{Conjugation, TransferError, TransferredChar};
use crate::algebra::Host;
use rayon::prelude::*;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error("coset enumeration exceeded the cap of {0}")]
    TooMany(usize),
    #[error("associate has characteristic polynomial {got:?}, expected {want:?}")]
    Charpoly { got: Vec<i64>, want: Vec<i64> },
}

/// A character of `E^x I^1` inside the normalizer of the standard order.
pub trait InducedChar: Sync {
    /// Group structure: membership, `I^1` and the host.
    fn group(&self) -> &ExtendedChar;
    fn value(&self, g: &MatElt) -> Result<QmodZ, TraceError>;
}

impl InducedChar for ExtendedChar {
    fn group(&self) -> &ExtendedChar {
        self
    }
    fn value(&self, g: &MatElt) -> Result<QmodZ, TraceError> {
        Ok(self.eval(g)?)
    }
}

/// `kappa = lambda_K . Ad(y)` on the group of the standard form over `B`.
pub struct ViaConjugation<'a>(pub &'a TransferredChar);

impl InducedChar for ViaConjugation<'_> {
    fn group(&self) -> &ExtendedChar {
        &self.0.lambda_b
    }
    fn value(&self, g: &MatElt) -> Result<QmodZ, TraceError> {
        Ok(self.0.via_conjugation(g)?)
    }
}

/// Representatives of `K/I`: torus classes mod `mu_F` times `U^1/I^1`.
#[derive(Clone, Debug)]
pub struct Cosets {
    pub reps: Vec<MatElt>,
    pub torus: usize,
    pub unipotent: usize,
    /// `U^depth` lies in `I^1`.
    pub depth: u32,
}

/// Least `k` with `U^k` inside `I^1`.
pub fn i1_depth(ext: &ExtendedChar) -> u32 {
    let h = &ext.st.host;
    (1..).find(|&k| h.radical(k, ext.i1.depth).is_subset(&ext.i1)).unwrap()
}

pub fn coset_reps(ext: &ExtendedChar, cap: usize) -> Result<Cosets, TraceError> {
    let h = &ext.st.host;
    let c = &h.ctx;
    let depth = i1_depth(ext);
    let gens: Vec<MatElt> = (1..depth)
        .flat_map(|k| h.radical_basis(k))
        .map(|v| c.add(&c.identity(), &h.from_coords(&v)))
        .collect();
    let mut unip = vec![c.identity()];
    let mut next = 0;
    while next < unip.len() {
        let x = unip[next].clone();
        next += 1;
        for g in &gens {
            let y = c.mul(g, &x);
            let known = unip.iter().any(|r| c.inv_unit(r).map(|ri| ext.in_i1(&c.mul(&ri, &y))).unwrap_or(false));
            if !known {
                unip.push(y);
                if unip.len() > cap {
                    return Err(TraceError::TooMany(cap));
                }
            }
        }
    }
    let torus = h.torus_units();
    let reps: Vec<MatElt> = torus.iter().flat_map(|t| unip.iter().map(move |u| c.mul(t, u))).collect();
    if reps.len() > cap {
        return Err(TraceError::TooMany(cap));
    }
    Ok(Cosets { torus: torus.len(), unipotent: unip.len(), reps, depth })
}

/// Values `chi(x^{-1} g x)` over the cosets fixed by `g`.
pub fn fixed_values(ch: &dyn InducedChar, cosets: &Cosets, g: &MatElt) -> Result<Vec<QmodZ>, TraceError> {
    let ext = ch.group();
    let c = &ext.st.host.ctx;
    let vals: Vec<Option<QmodZ>> = cosets
        .reps
        .par_iter()
        .map(|x| {
            let y = c.mul(&c.mul(&c.inv_unit(x)?, g), x);
            if ext.in_group(&y) {
                Ok(Some(ch.value(&y)?))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_, TraceError>>()?;
    Ok(vals.into_iter().flatten().collect())
}

pub fn to_cyclo(vals: &[QmodZ]) -> Result<CycloValue, TraceError> {
    let m = vals.iter().fold(1, |a, v| lcm(a, v.den));
    Ok(CycloValue::from_exps(vals, m)?)
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub value: CycloValue,
    pub fixed: usize,
}

pub fn induced_trace(ch: &dyn InducedChar, cosets: &Cosets, g: &MatElt) -> Result<Trace, TraceError> {
    let vals = fixed_values(ch, cosets, g)?;
    Ok(Trace { value: to_cyclo(&vals)?, fixed: vals.len() })
}

/// Exhaustive oracle over all of `a^x / U^depth`: each coset of `I` is met
/// `mult` times, so the sum is `mult` times the trace.
#[derive(Clone, Debug)]
pub struct BruteForce {
    pub total: usize,
    pub fixed: usize,
    pub mult: usize,
    pub sum: CycloValue,
}

pub fn brute_force_trace(ch: &dyn InducedChar, g: &MatElt, cap: usize) -> Result<BruteForce, TraceError> {
    let ext = ch.group();
    let h = &ext.st.host;
    let c = &h.ctx;
    let p = h.p();
    let w = h.width();
    let n = h.n();
    let depth = i1_depth(ext);
    let deep = h.radical(depth, ext.i1.depth);
    let mult = (p - 1) as usize * pow_u64(p, deep.index_log() - ext.i1.index_log()) as usize;
    // digit-0 residues that give units
    let units: Vec<Vec<u64>> = (0..pow_u64(p, w as u32))
        .map(|code| digits(code, p, w))
        .filter(|v| {
            let mut co = vec![0u64; h.ncoords()];
            co[..w].copy_from_slice(v);
            let x = h.from_coords(&co);
            (0..n).all(|i| c.tower.valuation(x.at(i, i)) == 0)
        })
        .collect();
    let free = w * (depth as usize - 1);
    let per = pow_u64(p, free as u32) as usize;
    let total = units.len() * per;
    if total > cap {
        return Err(TraceError::TooMany(cap));
    }
    let vals: Vec<Option<QmodZ>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut co = vec![0u64; h.ncoords()];
            co[..w].copy_from_slice(&units[idx / per]);
            let rest = digits((idx % per) as u64, p, free);
            for (lvl, chunk) in rest.chunks(w).enumerate() {
                let k = lvl as u32 + 1;
                let j = k as usize % n;
                let scale = pow_u64(p, k / n as u32);
                for (i, d) in chunk.iter().enumerate() {
                    let slot = &mut co[j * w + i];
                    *slot = (*slot + d * scale) % pow_u64(p, h.cprec());
                }
            }
            let x = h.from_coords(&co);
            let y = c.mul(&c.mul(&c.inv_unit(&x)?, g), &x);
            if ext.in_group(&y) {
                Ok(Some(ch.value(&y)?))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_, TraceError>>()?;
    let vals: Vec<QmodZ> = vals.into_iter().flatten().collect();
    Ok(BruteForce { total, fixed: vals.len(), mult, sum: to_cyclo(&vals)? })
}

fn digits(mut code: u64, p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

pub fn scale_cyclo(v: &CycloValue, k: i64) -> CycloValue {
    CycloValue { modulus: v.modulus, coeffs: v.coeffs.iter().map(|c| c * k).collect() }
}

/// Test elements of `A`: `(label, element, pure generator a with F[g] = F(a^{1/n}))`.
#[derive(Clone, Debug)]
pub struct Sample {
    pub label: String,
    pub g: MatElt,
    pub radicand: i64,
}

/// Elements `u Pi^j` with `gcd(j, n) = 1`, across several pure fields.
pub fn standard_samples(ca: &AlgebraCtx) -> Vec<Sample> {
    let p = ca.p() as i64;
    let pi = ca.standard_prime();
    let diag = |u: i64| pi_diag(ca, u);
    let mut out = vec![];
    let mut push = |label: &str, g: MatElt, a: i64| out.push(Sample { label: label.into(), g, radicand: a });
    push("Pi", pi.clone(), p);
    push("Pi^2", ca.pow(&pi, 2), p);
    push("-Pi", ca.scale_int(&pi, -1), -p);
    push("Pi(1+Pi)", ca.mul(&pi, &ca.add(&ca.identity(), &pi)), p);
    push("Pi*d(2)", diag(2), 2 * p);
    push("(Pi*d(2))^2", ca.pow(&diag(2), 2), 2 * p);
    push("Pi*d(4)", diag(4), 4 * p);
    push("-(Pi*d(4))^2", ca.scale_int(&ca.pow(&diag(4), 2), -1), 4 * p);
    out
}

/// `Pi diag(1, ..., 1, u)`, of characteristic polynomial `x^n - u p`.
pub fn pi_diag(ca: &AlgebraCtx, u: i64) -> MatElt {
    let n = ca.n;
    let mut d = vec![0i64; n * n];
    for i in 0..n {
        d[i * n + i] = if i == n - 1 { u } else { 1 };
    }
    ca.mul(&ca.standard_prime(), &ca.from_ints(&d))
}

/// Class of `F(a^{1/n})` for `v_p(a) = 1`: the unit part of `a` modulo `n`-th
/// powers, in `(Z/p^2)^x` for `n = p`, taken up to `mu_F`.
pub fn field_key(a: i64, p: u64, n: usize) -> u64 {
    let q = (p * p) as i64;
    let u = (a / p as i64).rem_euclid(q) as u64;
    let q = q as u64;
    (1..q)
        .filter(|&r| r % p != 0)
        .filter(|&r| !(pow_u64_mod(r, n as u64, q) * u).is_multiple_of(q))
        .map(|r| pow_u64_mod(r, n as u64, q) * u % q)
        .min()
        .unwrap_or(u)
}

fn pow_u64_mod(b: u64, e: u64, m: u64) -> u64 {
    crate::arith::pow_mod(b, e as u128, m)
}

/// Integer coefficients of a characteristic polynomial known modulo `p^prec`,
/// in the symmetric range.
pub fn int_charpoly(c: &AlgebraCtx, g: &MatElt) -> Vec<i64> {
    let q = pow_u64(c.p(), g.prec);
    c.charpoly(g).iter().map(|a| symmetric(a[0] % q, q)).collect()
}

fn symmetric(x: u64, q: u64) -> i64 {
    if x > q / 2 {
        x as i64 - q as i64
    } else {
        x as i64
    }
}

/// One associated pair `(g, h)`.
#[derive(Clone, Debug)]
pub struct Pair {
    pub sample: Sample,
    pub h: MatElt,
    pub val_det: u32,
    pub charpoly: Vec<i64>,
    pub field: u64,
}

/// `h = t^{-1} g t` in `B` from the solver, with the reduced characteristic
/// polynomial checked against that of `g`.
pub fn associate(sample: &Sample, t_a: &Arc<FieldTower>, host_b: &Host) -> Result<Pair, TraceError> {
    let ca = AlgebraCtx::new(sample.g.n, t_a.clone())?;
    let conj = Conjugation::for_elliptic(&sample.g, t_a, host_b)?;
    let h = conj.to_b(&sample.g)?;
    let want = int_charpoly(&ca, &sample.g);
    let cb = &host_b.ctx;
    let q = pow_u64(cb.p(), h.prec.min(sample.g.prec));
    let cp = cb.charpoly(&h);
    let got: Vec<i64> = cp.iter().map(|a| symmetric(a[0] % q, q)).collect();
    let rational = cp.iter().all(|a| a[1..].iter().all(|v| v % q == 0));
    let agree = got.iter().zip(&want).all(|(x, y)| (x - y).rem_euclid(q as i64) == 0);
    if !rational || !agree {
        return Err(TraceError::Charpoly { got, want });
    }
    let val_det = ca.tower.valuation(&ca.det(&sample.g));
    Ok(Pair {
        field: field_key(sample.radicand, ca.p(), ca.n),
        sample: sample.clone(),
        h,
        val_det,
        charpoly: want,
    })
}

#[derive(Clone, Debug)]
pub struct TraceRow {
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

pub fn trace_table(lam: &dyn InducedChar, kappa: &dyn InducedChar, pairs: &[Pair], cap: usize) -> Result<Vec<TraceRow>, TraceError> {
    let cg = coset_reps(lam.group(), cap)?;
    let ch = coset_reps(kappa.group(), cap)?;
    pairs
        .iter()
        .map(|pr| {
            let tg = induced_trace(lam, &cg, &pr.sample.g)?;
            let th = induced_trace(kappa, &ch, &pr.h)?;
            Ok(TraceRow {
                label: pr.sample.label.clone(),
                charpoly: pr.charpoly.clone(),
                val_det: pr.val_det,
                field: pr.field,
                equal: cyclo_eq(&tg.value, &th.value)?,
                tr_g: tg.value,
                tr_h: th.value,
                fixed_g: tg.fixed,
                fixed_h: th.fixed,
            })
        })
        .collect()
}

/// `n^{-1} sum_j zeta_n^{j (v - v0)} tr`: the average over unramified
/// characters of order dividing `n`.
pub fn twist_filter(tr: &CycloValue, val_det: u32, v0: u32, n: usize) -> Result<CycloValue, TraceError> {
    let m = lcm(tr.modulus, n as u64);
    let base = tr.lift(m)?;
    let shift = val_det as i64 - v0 as i64;
    let mut acc = CycloValue::zero(m);
    for j in 0..n as i64 {
        let chi = CycloValue::from_exps(&[QmodZ::new((j * shift) as i128, n as u64)], m)?;
        acc = cyclo_add(&acc, &cyclo_mul(&chi, &base)?)?;
    }
    acc.div_exact(n as i64).ok_or(TraceError::Arith(ArithError::ModulusMismatch(m, n as u64)))
}
