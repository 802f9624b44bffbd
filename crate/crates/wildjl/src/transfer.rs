//! Transfer of strata from `A = M_n(F)` to an inner form `B`: solving the
//! twisted Frobenius equation `u = t phi(t)^{-1}`, the resulting conjugation
//! `y`, and the two routes to the transferred character.

use crate::algebra::{map_entries, AlgebraCtx, AlgebraError, Host, HostKind, MatElt};
use crate::arith::{gcd_usize, make_tower, ArithError, Embedding, FieldTower, QmodZ};
use crate::extension::{extend_xi, ExtError, ExtendedChar, Xi};
use crate::strata::{StrataError, Stratum};
use crate::symplectic::{canon, SympSpace};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error("no solution in residue degree up to {0}")]
    NoSolution(usize),
    #[error("element is not a unit of the standard order")]
    NotUnit,
    #[error("level {0} did not improve")]
    Stalled(u32),
    #[error("conjugate does not lie in B")]
    NotInB,
    #[error("element has no conjugate of valuation {0}")]
    Valuation(i64),
}

/// Largest residue degree the solver will move to.
pub const MAX_DEGREE: usize = 54;

/// Least positive `z' = z mod n` prime to `f`.
pub fn twist_exponent(z: i64, n: usize, f: usize) -> i64 {
    let mut zz = z.rem_euclid(n as i64);
    while gcd_usize(zz as usize, f) != 1 {
        zz += n as i64;
    }
    zz
}

/// A solution `t` of `t = u phi(t)` over `K'`, with `K_n -> K'`.
#[derive(Clone, Debug)]
pub struct FrobeniusSolution {
    pub ctx: AlgebraCtx,
    pub emb: Embedding,
    pub host: Host,
    pub t: MatElt,
    pub t_inv: MatElt,
    /// `v_p(t - u phi(t))`.
    pub residual: u32,
    /// Residue degrees tried, in order.
    pub degrees: Vec<usize>,
}

/// Where the solver stopped: finished, or needing a degree-`k` extension
/// before level `level` (level 0 is the torus step).
enum Attempt {
    Done(MatElt),
    Enlarge { k: usize, level: u32, partial: Option<MatElt> },
}

/// Solve `t phi(t)^{-1} = u` with `phi = Ad(Pi^m) sigma^z`, where `u` is a unit
/// of the standard order of `M_n(K)`. Enlargements continue from the level
/// reached; the degree never exceeds `max_degree`.
pub fn solve_frobenius(u: &MatElt, base: &Arc<FieldTower>, m: usize, z: i64, max_degree: usize) -> Result<FrobeniusSolution, TransferError> {
    let n = u.n;
    let mut tower = base.clone();
    let mut emb = Embedding::identity(base.clone())?;
    let mut degrees = vec![base.f];
    let mut partial: Option<MatElt> = None;
    let mut level = 0;
    loop {
        let ctx = AlgebraCtx::new(n, tower.clone())?;
        let host = Host::inner(ctx.clone(), m, z)?;
        let ub = map_entries(u, |a| emb.map(a));
        match attempt(&host, &ub, z, partial.take(), level, max_degree)? {
            Attempt::Done(t) => {
                let c = &ctx;
                let t_inv = c.inv_unit(&t)?;
                let diff = c.sub(&c.mul(&ub, &host.phi(&t)?), &t);
                let residual = c.valuation(&diff).min(base.prec - 1);
                return Ok(FrobeniusSolution { ctx, emb, host, t, t_inv, residual, degrees });
            }
            Attempt::Enlarge { k, level: lv, partial: pt } => {
                let big = Arc::new(make_tower(base.p, tower.f * k, base.prec)?);
                let step = Embedding::new(tower.clone(), big.clone())?;
                partial = pt.map(|x| map_entries(&x, |a| step.map(a)));
                emb = emb.then(&step)?;
                tower = big;
                level = lv;
                degrees.push(tower.f);
            }
        }
    }
}

fn enlarge(f: usize, n: usize, d: usize, z: i64, max: usize, ok: impl Fn(usize, i64) -> bool) -> Result<usize, TransferError> {
    (2..=max / f)
        .find(|&k| ok(f * k, twist_exponent(z, n, f * k) * d as i64))
        .ok_or(TransferError::NoSolution(max))
}

fn attempt(host: &Host, u: &MatElt, z: i64, partial: Option<MatElt>, start: u32, max: usize) -> Result<Attempt, TransferError> {
    let (m, zz, d) = match &host.kind {
        HostKind::Inner { m, z, d, .. } => (*m, *z, *d),
        HostKind::Split => unreachable!(),
    };
    let c = &host.ctx;
    let t = &*c.tower;
    let n = c.n;
    let e = zz * d as i64;
    let split = Host::split(c.clone());

    let mut sol = match partial {
        Some(x) => x,
        None => {
            // torus: w_i = v_i tau(w_{i+m})
            let v: Vec<Vec<u64>> = (0..n).map(|i| t.residue(u.at(i, i))).collect();
            let vinv: Vec<Vec<u64>> = v.iter().map(|a| t.res_inv(a)).collect::<Option<_>>().ok_or(TransferError::NotUnit)?;
            let mut w = vec![vec![]; n];
            for r in 0..m {
                let mut pr = t.residue(&t.one());
                for s in 0..d {
                    pr = t.res_mul(&pr, &t.res_frob(&v[r + s * m], s as i64 * zz));
                }
                let x = t.res_inv(&pr).ok_or(TransferError::NotUnit)?;
                w[r] = match t.hilbert90_mult(&x, e) {
                    Ok(y) => y,
                    Err(_) => {
                        let k = enlarge(t.f, n, d, z, max, |big, e| t.mult_solvable_in(&x, big, e))?;
                        return Ok(Attempt::Enlarge { k, level: 0, partial: None });
                    }
                };
                for s in 1..d {
                    let i = r + (s - 1) * m;
                    w[i + m] = t.res_frob(&t.res_mul(&w[i], &vinv[i]), -zz);
                }
            }
            c.diag(&w.iter().map(|a| t.teichmuller(a)).collect::<Vec<_>>())
        }
    };

    // unipotent levels: Z_i - tau(Z_{i+m}) = X_i
    let mut k = start.max(1);
    loop {
        let cur = c.mul(&c.mul(&c.inv_unit(&sol)?, u), &host.phi(&sol)?);
        let co = known_coords(&split, &c.sub(&cur, &c.identity()))?;
        match split.level(&co) {
            None => break,
            Some(lv) if lv < k => return Err(TransferError::Stalled(lv)),
            Some(lv) => k = lv,
        }
        let res = split.level_residue(&co, k);
        let mut xs: Vec<Vec<u64>> = res.chunks(t.f).map(|x| x.to_vec()).collect();
        let (j, v) = (k as usize % n, k / n as u32);
        let known = |i: usize| v + 1 < cur.prec || (v + 1 == cur.prec && i + j < n);
        let mut zs = vec![vec![]; n];
        for r in 0..m {
            let mut s_r = t.zero();
            for s in 0..d {
                s_r = t.add(&s_r, &t.res_frob(&xs[r + s * m], s as i64 * zz));
            }
            // an entry beyond the known precision is free: choose it to kill S_r
            if let Some(s0) = (0..d).find(|&s| !known(r + s * m)) {
                let i0 = r + s0 * m;
                xs[i0] = t.residue(&t.sub(&xs[i0], &t.res_frob(&s_r, -(s0 as i64) * zz)));
                s_r = t.zero();
            }
            let x = t.residue(&t.neg(&s_r));
            zs[r] = match t.hilbert90_add(&x, e) {
                Ok(y) => y,
                Err(_) => {
                    let k2 = enlarge(t.f, n, d, z, max, |big, e| t.add_solvable_in(&x, big, e))?;
                    return Ok(Attempt::Enlarge { k: k2, level: k, partial: Some(sol) });
                }
            };
            for s in 1..d {
                let i = r + (s - 1) * m;
                zs[i + m] = t.residue(&t.res_frob(&t.sub(&zs[i], &xs[i]), -zz));
            }
        }
        let flat: Vec<u64> = zs.concat();
        let step = c.add(&c.identity(), &split.from_coords(&split.level_lift(&flat, k)));
        sol = c.mul(&sol, &step);
    }
    Ok(Attempt::Done(sol))
}

/// Split coordinates of `x`, each reduced to the precision it is known to:
/// entries that wrap past the diagonal lose one digit to the division by `p`.
fn known_coords(split: &Host, x: &MatElt) -> Result<Vec<u64>, TransferError> {
    let n = split.n();
    let f = split.tower().f;
    let p = split.p();
    let mut co = split.coords(x)?;
    let w = split.width();
    for (idx, v) in co.iter_mut().enumerate() {
        let (j, i) = (idx / w, (idx % w) / f);
        let known = if i + j >= n { x.prec.saturating_sub(1) } else { x.prec };
        *v %= crate::arith::pow_u64(p, known.min(split.cprec()));
    }
    Ok(co)
}

/// An element `y = t` over `K'` with `y^{-1} F[g] y` inside `B`, together with
/// the projection back to `K_n`.
#[derive(Clone, Debug)]
pub struct Conjugation {
    pub sol: FrobeniusSolution,
    /// `M_n(F) -> M_n(K')`.
    pub from_a: Embedding,
    /// `B` on `K_n`.
    pub host_b: Host,
    pub gamma: MatElt,
}

impl Conjugation {
    /// Solve for `y` with `y Pi^m tau(y)^{-1} = gamma`, `gamma` over `K_n`
    /// of determinant valuation `m`.
    pub fn for_gamma(gamma: MatElt, t_a: &Arc<FieldTower>, host_b: &Host) -> Result<Conjugation, TransferError> {
        let (m, z) = inner_params(host_b);
        let kn = host_b.ctx.tower.clone();
        let ck = &host_b.ctx;
        let pi = ck.standard_prime();
        let u = ck.div_p_pow(&ck.mul(&gamma, &ck.pow(&pi, (ck.n - m) as u32)), 1)?;
        let sol = solve_frobenius(&u, &kn, m, z, MAX_DEGREE)?;
        let from_a = Embedding::new(t_a.clone(), sol.ctx.tower.clone())?;
        Ok(Conjugation { sol, from_a, host_b: host_b.clone(), gamma })
    }

    /// `gamma = varpi^m c` with `c` in `(EK)^x` of norm `(varpi^n/p)^{-m}`,
    /// which makes the twisted cocycle exact over `K_n`.
    pub fn for_uniformizer(varpi: &MatElt, t_a: &Arc<FieldTower>, host_b: &Host) -> Result<Conjugation, TransferError> {
        let (m, _) = inner_params(host_b);
        let ck = &host_b.ctx;
        let up = Embedding::new(t_a.clone(), ck.tower.clone())?;
        let vk = map_entries(varpi, |a| up.map(a));
        let c = norm_correction(ck, &vk, m)?;
        let gamma = ck.mul(&ck.pow(&vk, m as u32), &c);
        Conjugation::for_gamma(gamma, t_a, host_b)
    }

    /// Adapted to `F[g]` for `g` generating a totally ramified field.
    pub fn for_elliptic(g: &MatElt, t_a: &Arc<FieldTower>, host_b: &Host) -> Result<Conjugation, TransferError> {
        let ca = AlgebraCtx::new(g.n, t_a.clone())?;
        let varpi = power_of_valuation(&ca, g, 1)?;
        Conjugation::for_uniformizer(&varpi, t_a, host_b)
    }

    pub fn residual(&self) -> u32 {
        self.sol.residual
    }

    /// `y^{-1} g y` over `K'`.
    pub fn conj_big(&self, g: &MatElt) -> MatElt {
        let c = &self.sol.ctx;
        let gb = map_entries(g, |a| self.from_a.map(a));
        c.mul(&c.mul(&self.sol.t_inv, &gb), &self.sol.t)
    }

    /// `y^{-1} g y`, as an element of `B` on `K_n`.
    pub fn to_b(&self, g: &MatElt) -> Result<MatElt, TransferError> {
        let h = self.conj_big(g);
        self.project(&h)
    }

    pub fn project(&self, h: &MatElt) -> Result<MatElt, TransferError> {
        // y solves its equation only modulo p^residual
        let mut out = self.host_b.ctx.zero();
        out.prec = h.prec.min(self.sol.residual);
        for (o, a) in out.e.iter_mut().zip(&h.e) {
            *o = self.sol.emb.project(a).map_err(|_| TransferError::NotInB)?;
        }
        if !self.host_b.is_member(&out) {
            return Err(TransferError::NotInB);
        }
        Ok(out)
    }

    /// `y h y^{-1}` over `K'` for `h` in `B`.
    pub fn from_b(&self, h: &MatElt) -> MatElt {
        let c = &self.sol.ctx;
        let hb = map_entries(h, |a| self.sol.emb.map(a));
        c.mul(&c.mul(&self.sol.t, &hb), &self.sol.t_inv)
    }
}

/// `g^k p^j` with `v_p(det) = target`, `k` in `[0, n)`.
pub fn power_of_valuation(c: &AlgebraCtx, g: &MatElt, target: i64) -> Result<MatElt, TransferError> {
    let n = c.n as i64;
    let a = c.tower.valuation(&c.det(g)) as i64;
    let k = (0..n).find(|k| (target - k * a).rem_euclid(n) == 0).ok_or(TransferError::Valuation(target))?;
    let j = (target - k * a) / n;
    let gk = c.pow(g, k as u32);
    if j >= 0 {
        Ok(c.scale_int(&gk, c.p_pow(j as u32) as i64))
    } else {
        let r = c.div_p_pow(&gk, (-j) as u32)?;
        Ok(r)
    }
}

/// The character of `B` attached to a stratum of `A`, computed both in standard
/// form on `B` and through `Ad(y)` from `M_n(K')`.
#[derive(Clone, Debug)]
pub struct TransferredChar {
    pub conj: Conjugation,
    /// Standard form on `B`.
    pub lambda_b: ExtendedChar,
    /// `lambda_K` on `M_n(K')`.
    pub lambda_k: ExtendedChar,
}

impl TransferredChar {
    /// `st` is a stratum of `A`; `offset` selects the extension of `xi` to `mu_K`.
    pub fn new(st: &Stratum, xi: &Xi, host_b: &Host, offset: QmodZ) -> Result<TransferredChar, TransferError> {
        let t_a = st.host.ctx.tower.clone();
        let conj = Conjugation::for_uniformizer(&st.varpi, &t_a, host_b)?;
        let varpi_b = conj.to_b(&st.varpi)?;
        let st_b = Stratum::new(host_b.clone(), varpi_b, st.l)?;
        let lambda_b = ExtendedChar::new(st_b, xi.clone())?;

        let host_k = Host::split(conj.sol.ctx.clone());
        let varpi_k = map_entries(&st.varpi, |a| conj.from_a.map(a));
        let st_k = Stratum::new(host_k, varpi_k, st.l)?;
        let space_k = SympSpace::build(&st_k).map_err(ExtError::from)?;
        // K-span of y W_B y^{-1}
        let ck = &st_k.host.ctx;
        let mut rows = vec![];
        for w in &lambda_b.lagrangian {
            let x = lambda_b.space.quotient.lift(w);
            let xb = lambda_b.st.host.from_coords(&x);
            let xk = conj.from_b(&xb);
            for s in st_k.host.scalar_basis() {
                let v = st_k.host.coords(&ck.scale(&xk, &s))?;
                rows.push(space_k.quotient.coords(&v)?);
            }
        }
        let lag = canon(&rows, st.host.p());
        let xi_k = extend_xi(xi, &ck.tower, offset)?;
        let lambda_k = ExtendedChar::with_lagrangian(st_k, space_k, lag, xi_k)?;
        Ok(TransferredChar { conj, lambda_b, lambda_k })
    }

    pub fn standard(&self, h: &MatElt) -> Result<QmodZ, TransferError> {
        Ok(self.lambda_b.eval(h)?)
    }

    /// `kappa_y(h) = lambda_K(y h y^{-1})`.
    pub fn via_conjugation(&self, h: &MatElt) -> Result<QmodZ, TransferError> {
        Ok(self.lambda_k.eval(&self.conj.from_b(h))?)
    }
}

fn inner_params(host_b: &Host) -> (usize, i64) {
    match &host_b.kind {
        HostKind::Inner { m, z, .. } => (*m, *z),
        HostKind::Split => (host_b.n(), 1),
    }
}

/// `c` in `O_K[varpi]^x` with `prod_s sigma^s(c) = (varpi^n/p)^{-m}`, built one
/// `varpi`-adic digit at a time through the residue norm and trace.
pub fn norm_correction(ck: &AlgebraCtx, varpi: &MatElt, m: usize) -> Result<MatElt, TransferError> {
    let t = &*ck.tower;
    let n = ck.n;
    let p = t.p;
    let eps = ck.div_p_pow(&ck.pow(varpi, n as u32), 1)?;
    let target = ck.pow(&ck.inv_unit(&eps)?, m as u32);
    let norm = |c: &MatElt| (0..t.f).fold(ck.identity(), |acc, s| ck.mul(&acc, &ck.frob(c, s as i64)));
    let t0 = t.residue(target.at(0, 0));
    let q = crate::arith::pow_u64(p, t.f as u32);
    let a0 = t
        .residues()
        .into_iter()
        .find(|a| t.res_pow(a, ((q - 1) / (p - 1)) as u128) == t0)
        .ok_or(TransferError::NotUnit)?;
    let mut c = ck.scalar(&t.teichmuller(&a0));
    c.prec = varpi.prec;
    let tinv = ck.inv_unit(&target)?;
    let e0_inv = crate::arith::inv_mod(t.residue(eps.at(0, 0))[0], p).ok_or(TransferError::NotUnit)?;
    let top = n as u32 * (varpi.prec - 1);
    for k in 1..top {
        let delta = ck.sub(&ck.mul(&norm(&c), &tinv), &ck.identity());
        // residue of delta * varpi^{-k}
        let up = (k as usize).div_ceil(n) as u32;
        let y = ck.div_p_pow(&ck.mul(&delta, &ck.pow(varpi, up * n as u32 - k)), up)?;
        let d = t.residue(y.at(0, 0))[0] * crate::arith::pow_mod(e0_inv, up as u128, p) % p;
        if d == 0 {
            continue;
        }
        let b = t.scale(t.ell_unit(), (p - d) % p);
        let step = ck.add(&ck.identity(), &ck.scale(&ck.pow(varpi, k), &b));
        c = ck.mul(&c, &step);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraCtx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(host: &Host, rng: &mut impl Rng) -> MatElt {
        let c = &host.ctx;
        let t = &c.tower;
        let q = c.p_pow(host.cprec());
        let co: Vec<u64> = (0..host.ncoords()).map(|_| rng.gen_range(0..q)).collect();
        let mut x = host.from_coords(&co);
        for i in 0..c.n {
            let mut a = x.e[i * c.n + i].clone();
            while t.res_inv(&t.residue(&a)).is_none() {
                a = t.add(&a, &t.from_int(rng.gen_range(1..t.p as i64)));
            }
            x.e[i * c.n + i] = a;
        }
        x
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]
        #[test]
        fn lang_image_is_solved_in_place(seed in 0u64..1_000_000, z in 1i64..3) {
            let kn = Arc::new(make_tower(3, 3, 5).unwrap());
            let ctx = AlgebraCtx::new(3, kn.clone()).unwrap();
            let split = Host::split(ctx.clone());
            let hb = Host::inner(ctx.clone(), 1, z).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t0 = random_unit(&split, &mut rng);
            let u = ctx.mul(&t0, &ctx.inv_unit(&hb.phi(&t0).unwrap()).unwrap());
            let s = solve_frobenius(&u, &kn, 1, z, MAX_DEGREE).unwrap();
            proptest::prop_assert_eq!(&s.degrees, &vec![3]);
            proptest::prop_assert!(s.residual >= 4, "residual {}", s.residual);
            // u = t phi(t)^{-1} modulo p^residual, checked directly
            let c = &s.ctx;
            let hk = Host::inner(c.clone(), 1, z).unwrap();
            let ub = map_entries(&u, |a| s.emb.map(a));
            let rhs = c.mul(&s.t, &c.inv_unit(&hk.phi(&s.t).unwrap()).unwrap());
            let q = c.p_pow(s.residual);
            let diff = c.sub(&ub, &rhs);
            proptest::prop_assert!(diff.e.iter().all(|x| x.iter().all(|v| v % q == 0)));
        }
    }

    #[test]
    fn norm_obstruction_enlarges() {
        let kn = Arc::new(make_tower(3, 3, 5).unwrap());
        let ctx = AlgebraCtx::new(3, kn.clone()).unwrap();
        let u = ctx.scale_int(&ctx.identity(), -1);
        let s = solve_frobenius(&u, &kn, 1, 1, MAX_DEGREE).unwrap();
        assert_eq!(s.degrees, vec![3, 6]);
        assert!(s.residual >= 4);
        let split = Host::split(ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let generic = random_unit(&split, &mut rng);
        assert!(matches!(solve_frobenius(&generic, &kn, 1, 1, 18), Err(TransferError::NoSolution(18))));
    }

    #[test]
    fn associates_without_enlargement() {
        let ta = Arc::new(make_tower(3, 1, 5).unwrap());
        let ca = AlgebraCtx::new(3, ta.clone()).unwrap();
        let pi = ca.standard_prime();
        let kn = Arc::new(make_tower(3, 3, 5).unwrap());
        for (m, z) in [(1, 1), (1, 2), (3, 1)] {
            let hb = Host::inner(AlgebraCtx::new(3, kn.clone()).unwrap(), m, z).unwrap();
            for g in [ca.mul(&pi, &ca.from_ints(&[1, 0, 0, 0, 1, 0, 0, 0, 2])), ca.scale_int(&pi, -1)] {
                let conj = Conjugation::for_elliptic(&g, &ta, &hb).unwrap();
                assert_eq!(conj.sol.degrees, vec![3]);
                assert!(conj.residual() >= 4);
                let h = conj.to_b(&g).unwrap();
                let cp = hb.ctx.charpoly(&h);
                let want = ca.charpoly(&g);
                for (a, b) in cp.iter().zip(&want) {
                    assert_eq!(a[0] % 81, b[0] % 81);
                    assert!(a[1..].iter().all(|v| v % 81 == 0));
                }
            }
        }
    }

    #[test]
    fn eisenstein_lands_in_b() {
        let ta = Arc::new(make_tower(3, 1, 5).unwrap());
        let ha = Host::split(AlgebraCtx::new(3, ta.clone()).unwrap());
        let st = Stratum::from_eisenstein(ha, &[-3, 0, 0], 2).unwrap();
        let kn = Arc::new(make_tower(3, 3, 5).unwrap());
        let hb = Host::inner(AlgebraCtx::new(3, kn).unwrap(), 1, 1).unwrap();
        let conj = Conjugation::for_uniformizer(&st.varpi, &ta, &hb).unwrap();
        assert!(conj.residual() >= 4);
        let vb = conj.to_b(&st.varpi).unwrap();
        let cb = &hb.ctx;
        let cube = cb.pow(&vb, 3);
        assert!(cb.eq_mod(&cube, &cb.scale_int(&cb.identity(), 3)));
    }

    #[test]
    fn both_routes_agree() {
        let ta = Arc::new(make_tower(3, 1, 5).unwrap());
        let ha = Host::split(AlgebraCtx::new(3, ta).unwrap());
        let st = Stratum::from_eisenstein(ha, &[3, 0, 0], 2).unwrap();
        let kn = Arc::new(make_tower(3, 3, 5).unwrap());
        let hb = Host::inner(AlgebraCtx::new(3, kn).unwrap(), 1, 1).unwrap();
        let xi = Xi { at_varpi: QmodZ::new(1, 9), at_mu: QmodZ::new(1, 2) };
        let tc = TransferredChar::new(&st, &xi, &hb, QmodZ::ZERO).unwrap();
        let lb = &tc.lambda_b;
        let cb = &hb.ctx;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..10 {
            let x = lb.st.random_in(&lb.i1, &mut rng);
            let g = cb.mul(&cb.pow(&lb.st.varpi, i % 3), &cb.scale_int(&x, if i % 2 == 0 { 1 } else { -1 }));
            assert_eq!(tc.standard(&g).unwrap(), tc.via_conjugation(&g).unwrap());
        }
    }
}
