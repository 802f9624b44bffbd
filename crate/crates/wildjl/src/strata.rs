//! Minimal simple strata, their filtration lattices and simple characters.

use crate::algebra::{AlgebraError, Host, Lattice, MatElt, Scaled};
use crate::arith::{pow_u64, solve_mod_p, QmodZ};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("gcd(l, n) = {0}: stratum is not minimal")]
    NotMinimal(u64),
    #[error("prime element does not have valuation 1 or does not normalize the order")]
    BadPrime,
    #[error("beta^-1 a differs from p^l")]
    Depth,
    #[error("psi_beta is not a character on the units of E")]
    WellDefined,
    #[error("element is not in the group")]
    NotInGroup,
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub host: Host,
    pub l: u32,
    /// Prime element of `E`.
    pub varpi: MatElt,
    pub varpi_inv: Scaled,
    /// `varpi^n / p`, a unit of `E`.
    pub unit: MatElt,
    pub unit_inv: MatElt,
    pub beta: Scaled,
    pub depth: u32,
    pub h1: Lattice,
    pub j1: Lattice,
    /// Level residues of `s * varpi^k` for the scalar basis `s`, `k = 0..=l+n`.
    e_res: Vec<Vec<Vec<u64>>>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Drop common factors of `p` from a scaled element.
pub fn reduce_scaled(host: &Host, mut s: Scaled) -> Scaled {
    while s.shift > 0 {
        match host.ctx.div_p_pow(&s.m, 1) {
            Ok(m) => {
                s.m = m;
                s.shift -= 1;
            }
            Err(_) => break,
        }
    }
    s
}

impl Stratum {
    /// Companion matrix of an Eisenstein polynomial `x^n + a_{n-1} x^{n-1} + ... + a_0`.
    pub fn from_eisenstein(host: Host, coeffs: &[i64], l: u32) -> Result<Stratum, StrataError> {
        let varpi = host.ctx.companion(coeffs)?;
        Stratum::new(host, varpi, l)
    }

    pub fn new(host: Host, varpi: MatElt, l: u32) -> Result<Stratum, StrataError> {
        let n = host.n();
        let c = &host.ctx;
        let g = gcd(l as u64, n as u64);
        if g != 1 || l == 0 {
            return Err(StrataError::NotMinimal(g));
        }
        let ok = host.coords(&varpi).is_ok()
            && host.level(&host.coords(&varpi)?) == Some(1)
            && host.in_normalizer(&varpi)?;
        if !ok {
            return Err(StrataError::BadPrime);
        }
        let unit = c.div_p_pow(&c.pow(&varpi, n as u32), 1)?;
        let unit_inv = c.inv_unit(&unit)?;
        let varpi_inv = Scaled { shift: 1, m: c.mul(&c.pow(&varpi, n as u32 - 1), &unit_inv) };
        let beta = reduce_scaled(&host, c.inv_scaled(&c.pow(&varpi, l))?);
        let s = l / 2;
        let depth = (s + 1).div_ceil(n as u32) + 1;
        let mut pe = vec![];
        for k in 1..=n as u32 {
            let vk = c.pow(&varpi, k);
            for sc in host.scalar_basis() {
                pe.push(host.coords(&c.scale(&vk, &sc))?);
            }
        }
        let with_radical = |k: u32| {
            let mut g = pe.clone();
            g.extend(host.radical_basis(k));
            Lattice::from_generators(host.p(), host.ncoords(), depth, &g)
        };
        let h1 = with_radical(s + 1);
        let j1 = with_radical(l.div_ceil(2));
        let mut e_res = vec![];
        for k in 0..=(l + n as u32) {
            let vk = c.pow(&varpi, k);
            let res: Vec<Vec<u64>> = host
                .scalar_basis()
                .iter()
                .map(|sc| Ok(host.level_residue(&host.coords(&c.scale(&vk, sc))?, k)))
                .collect::<Result<_, AlgebraError>>()?;
            e_res.push(res);
        }
        let st = Stratum { host, l, varpi, varpi_inv, unit, unit_inv, beta, depth, h1, j1, e_res };
        if !st.depth_check()? {
            return Err(StrataError::Depth);
        }
        st.self_test()?;
        Ok(st)
    }

    fn depth_check(&self) -> Result<bool, AlgebraError> {
        let c = &self.host.ctx;
        let vl = c.pow(&self.varpi, self.l);
        let gens: Vec<MatElt> = self.host.order_basis().iter().map(|b| c.mul(&vl, b)).collect();
        let d = self.depth + self.l.div_ceil(self.host.n() as u32);
        Ok(self.host.lattice_of(&gens, d)?.same(&self.host.radical(self.l, d)))
    }

    /// `psi_beta` is a character of `U^1_E` exactly when `tr(beta p_E^2)` lies
    /// in `p_F`.
    fn self_test(&self) -> Result<(), StrataError> {
        let c = &self.host.ctx;
        for k in 2..2 + self.n() as u32 {
            let vk = c.pow(&self.varpi, k);
            for sc in self.host.scalar_basis() {
                if !self.psi_beta_additive(&c.scale(&vk, &sc)).is_zero() {
                    return Err(StrataError::WellDefined);
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.host.n()
    }

    pub fn s(&self) -> u32 {
        self.l / 2
    }

    pub fn jumps(&self) -> Vec<u32> {
        if self.l.is_multiple_of(2) && !self.h1.same(&self.j1) {
            vec![self.l]
        } else {
            vec![]
        }
    }

    /// Exponent of `psi(tr(beta (g - 1)))`.
    pub fn psi_beta(&self, g: &MatElt) -> QmodZ {
        let c = &self.host.ctx;
        let x = c.sub(g, &c.identity());
        self.psi_beta_additive(&x)
    }

    /// Exponent of `psi(tr(beta x))`.
    pub fn psi_beta_additive(&self, x: &MatElt) -> QmodZ {
        let c = &self.host.ctx;
        let t = &c.tower;
        let tr = c.trace(&c.mul(&self.beta.m, x));
        t.psi_scaled(t.ell(&tr), self.beta.shift)
    }

    /// `Ad(varpi)(x) = varpi x varpi^{-1}`.
    pub fn ad_varpi(&self, x: &MatElt) -> Result<MatElt, AlgebraError> {
        let c = &self.host.ctx;
        c.div_p_pow(&c.mul(&c.mul(&self.varpi, x), &self.varpi_inv.m), self.varpi_inv.shift)
    }

    pub fn ad_varpi_inv(&self, x: &MatElt) -> Result<MatElt, AlgebraError> {
        let c = &self.host.ctx;
        c.div_p_pow(&c.mul(&c.mul(&self.varpi_inv.m, x), &self.varpi), self.varpi_inv.shift)
    }

    /// Write `g = e * r` with `e` in `U^1_E` and `r - 1` of level above `upto`.
    pub fn peel(&self, g: &MatElt, upto: u32) -> Result<(MatElt, MatElt), StrataError> {
        let c = &self.host.ctx;
        let p = self.host.p();
        let mut acc = c.identity();
        let mut r = g.clone();
        let scal = self.host.scalar_basis();
        for k in 1..=upto {
            let x = self.host.coords(&c.sub(&r, &c.identity()))?;
            match self.host.level(&x) {
                Some(v) if v < k => return Err(StrataError::NotInGroup),
                None => break,
                _ => {}
            }
            let res = self.host.level_residue(&x, k);
            if res.iter().all(|&v| v == 0) {
                continue;
            }
            let cols = &self.e_res[k as usize];
            let a: Vec<Vec<u64>> = (0..res.len()).map(|i| cols.iter().map(|col| col[i]).collect()).collect();
            let coef = solve_mod_p(&a, &res, p).ok_or(StrataError::NotInGroup)?;
            let vk = c.pow(&self.varpi, k);
            let mut e = c.identity();
            for (a, sc) in coef.iter().zip(&scal) {
                e = c.add(&e, &c.scale(&c.scale(&vk, sc), &c.tower.from_int(*a as i64)));
            }
            r = c.mul(&c.inv_unit(&e)?, &r);
            acc = c.mul(&acc, &e);
        }
        Ok((acc, r))
    }

    pub fn in_h1(&self, g: &MatElt) -> bool {
        let c = &self.host.ctx;
        match self.host.coords(&c.sub(g, &c.identity())) {
            Ok(x) => self.h1.contains(&x),
            Err(_) => false,
        }
    }

    pub fn in_j1(&self, g: &MatElt) -> bool {
        let c = &self.host.ctx;
        match self.host.coords(&c.sub(g, &c.identity())) {
            Ok(x) => self.j1.contains(&x),
            Err(_) => false,
        }
    }

    /// The simple character: `psi_beta` on both factors of `g = e r`,
    /// `e` in `U^1_E`, `r` in `U^{s+1}`.
    pub fn theta(&self, g: &MatElt) -> Result<QmodZ, StrataError> {
        if !self.in_h1(g) {
            return Err(StrataError::NotInGroup);
        }
        let (e, r) = self.peel(g, self.s())?;
        let c = &self.host.ctx;
        match self.host.level(&self.host.coords(&c.sub(&r, &c.identity()))?) {
            Some(v) if v <= self.s() => return Err(StrataError::NotInGroup),
            _ => {}
        }
        Ok(self.psi_beta(&e) + self.psi_beta(&r))
    }

    /// Condition on `H^{l/2}`: `theta` agrees with `psi_beta` on generators of
    /// `H^s = 1 + (p_E^s + p^{s+1})`; vacuous for odd `l`.
    pub fn is_adapted(&self, theta: impl Fn(&MatElt) -> Result<QmodZ, StrataError>) -> Result<bool, StrataError> {
        if self.l % 2 == 1 {
            return Ok(true);
        }
        let c = &self.host.ctx;
        let s = self.s();
        let mut gens = vec![];
        for k in s..s + self.n() as u32 {
            for sc in self.host.scalar_basis() {
                gens.push(c.scale(&c.pow(&self.varpi, k), &sc));
            }
        }
        gens.extend(self.host.radical_basis(s + 1).iter().map(|v| self.host.from_coords(v)));
        for x in gens {
            let g = c.add(&c.identity(), &x);
            if theta(&g)? != self.psi_beta(&g) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Random element of `1 + L` for a lattice `L` of level at least one.
    pub fn random_in(&self, l: &Lattice, rng: &mut impl Rng) -> MatElt {
        let h = &self.host;
        let q = pow_u64(h.p(), h.cprec());
        let pd = pow_u64(h.p(), l.depth);
        let mut v = vec![0u64; h.ncoords()];
        for g in l.generators() {
            let r = rng.gen_range(0..q);
            for (x, y) in v.iter_mut().zip(&g) {
                *x = (*x + r * y) % q;
            }
        }
        for x in v.iter_mut() {
            *x = (*x + pd * rng.gen_range(0..q) % q) % q;
        }
        h.ctx.add(&h.ctx.identity(), &h.from_coords(&v))
    }

    /// `(a, g varpi^{-a})` with `a = v(det g)`, computed without losing more
    /// than `ceil(a/n)` digits.
    pub fn strip_varpi(&self, g: &MatElt) -> Result<(i64, MatElt), StrataError> {
        let c = &self.host.ctx;
        let n = self.n() as i64;
        let det = c.det(g);
        let a = c.tower.valuation(&det) as i64;
        if a as u32 >= g.prec {
            return Err(StrataError::NotInGroup);
        }
        let r = (-a).rem_euclid(n);
        let t = (a + r) / n;
        let mut x = c.mul(g, &c.pow(&self.varpi, r as u32));
        if t > 0 {
            x = c.mul(&x, &c.pow(&self.unit_inv, t as u32));
            x = c.div_p_pow(&x, t as u32)?;
        } else if t < 0 {
            x = c.mul(&x, &c.pow(&self.unit, (-t) as u32));
            x = c.scale_int(&x, pow_u64(self.host.p(), (-t) as u32) as i64);
        }
        Ok((a, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{quotient_basis, AlgebraCtx};
    use crate::arith::make_tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn host(f: usize, prec: u32) -> Host {
        Host::split(AlgebraCtx::new(3, Arc::new(make_tower(3, f, prec).unwrap())).unwrap())
    }

    #[test]
    fn filtration_dims() {
        let s1 = Stratum::from_eisenstein(host(1, 5), &[-3, 0, 0], 1).unwrap();
        assert!(s1.h1.same(&s1.j1));
        assert!(s1.jumps().is_empty());
        let s2 = Stratum::from_eisenstein(host(1, 5), &[-3, 0, 0], 2).unwrap();
        assert_eq!(quotient_basis(&s2.j1, &s2.h1).unwrap().dim(), 2);
        assert_eq!(s2.jumps(), vec![2]);
        let k2 = Stratum::from_eisenstein(host(3, 5), &[-3, 0, 0], 2).unwrap();
        assert_eq!(quotient_basis(&k2.j1, &k2.h1).unwrap().dim(), 6);
        let s4 = Stratum::from_eisenstein(host(1, 6), &[-3, 0, 0], 4).unwrap();
        assert_eq!(s4.jumps(), vec![4]);
        assert_eq!(
            Stratum::from_eisenstein(host(1, 6), &[3, 3, 0], 4).unwrap_err(),
            StrataError::WellDefined
        );
        assert!(Stratum::from_eisenstein(host(1, 5), &[-3, 0, 0], 3).is_err());
        assert!(Stratum::from_eisenstein(host(1, 5), &[-9, 0, 0], 1).is_err());
    }

    #[test]
    fn theta_is_a_character() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (coeffs, l, prec) in [([-3i64, 0, 0], 2u32, 5u32), ([-3, 0, 0], 4, 6), ([-3, 0, 0], 1, 5)] {
            let st = Stratum::from_eisenstein(host(1, prec), &coeffs, l).unwrap();
            let c = &st.host.ctx;
            for _ in 0..100 {
                let g = st.random_in(&st.h1, &mut rng);
                let h = st.random_in(&st.h1, &mut rng);
                let gh = c.mul(&g, &h);
                assert_eq!(st.theta(&gh).unwrap(), st.theta(&g).unwrap() + st.theta(&h).unwrap());
                let conj = st.ad_varpi(&g).unwrap();
                assert_eq!(st.theta(&conj).unwrap(), st.theta(&g).unwrap());
            }
            assert!(st.is_adapted(|g| st.theta(g)).unwrap());
        }
    }

    #[test]
    fn strip_varpi_powers() {
        let st = Stratum::from_eisenstein(host(1, 6), &[-3, 0, 0], 2).unwrap();
        let c = &st.host.ctx;
        for k in 1..5 {
            let g = c.mul(&c.pow(&st.varpi, k), &c.from_ints(&[1, 3, 0, 0, 1, 0, 0, 0, 1]));
            let (a, u) = st.strip_varpi(&g).unwrap();
            assert_eq!(a, k as i64);
            assert_eq!(c.tower.valuation(&c.det(&u)), 0);
        }
    }
}
