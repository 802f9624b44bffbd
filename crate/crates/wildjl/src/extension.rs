//! The standard extension of a simple character to `I^1` and the characters
//! `xi (.) theta` of `E^x I^1`.

use crate::algebra::{AlgebraError, HostKind, Lattice, MatElt};
use crate::arith::{prime_factors, FieldTower, QmodZ};
use crate::strata::{StrataError, Stratum};
use crate::symplectic::{SympError, SympSpace, Subspace};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Symp(#[from] SympError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("element is not in E^x I^1")]
    NotInI,
    #[error("xi is inconsistent on the roots of unity of the base field")]
    InconsistentXi,
}

/// Residue generator of `mu` for the scalars of a host: the least primitive
/// root mod `p` when `f = 1`, else the first primitive element of `F_{p^f}`
/// in the tower's residue order.
pub fn mu_generator(t: &FieldTower, f: usize) -> Vec<u64> {
    let q = crate::arith::pow_u64(t.p, f as u32) - 1;
    let primes = prime_factors(q);
    let one = t.residue(&t.one());
    (1..)
        .map(|code: u64| {
            let mut a = vec![0u64; t.f];
            let mut k = code;
            for x in a.iter_mut().take(f.max(1)) {
                *x = k % t.p;
                k /= t.p;
            }
            a
        })
        .find(|a| primes.iter().all(|&r| t.res_pow(a, (q / r) as u128) != one))
        .expect("primitive element")
}

/// Discrete logarithm of `x` to the base `g` of order `order`, by
/// Pohlig-Hellman with exhaustive search in each prime-order step.
pub fn dlog(t: &FieldTower, g: &[u64], x: &[u64], order: u64) -> Option<u64> {
    let one = t.residue(&t.one());
    let x = t.residue(x);
    if t.res_pow(&x, order as u128) != one {
        return None;
    }
    let mut result: u128 = 0;
    let mut modulus: u128 = 1;
    let mut fs = prime_factors(order);
    fs.dedup();
    for r in fs {
        let mut e = 0;
        let mut rest = order;
        while rest.is_multiple_of(r) {
            rest /= r;
            e += 1;
        }
        let re = (order / rest) as u128;
        let gr = t.res_pow(g, rest as u128);
        let xr = t.res_pow(&x, rest as u128);
        let gamma = t.res_pow(&gr, re / r as u128);
        let mut k: u128 = 0;
        let mut rk: u128 = 1;
        for _ in 0..e {
            let ginv = t.res_pow(&gr, re - k % re);
            let h = t.res_pow(&t.res_mul(&ginv, &xr), re / (rk * r as u128));
            let mut y = one.clone();
            let mut d = None;
            for cand in 0..r {
                if y == h {
                    d = Some(cand as u128);
                    break;
                }
                y = t.res_mul(&y, &gamma);
            }
            k += d? * rk;
            rk *= r as u128;
        }
        // combine x = k mod re with result mod modulus
        let mut cand = result;
        while cand % re != k % re {
            cand += modulus;
        }
        result = cand;
        modulus *= re;
    }
    Some((result % order as u128) as u64)
}

/// A character of `E^x`, by its value at `varpi_E` and at the Teichmuller
/// lift of the `mu` generator; its restriction to `U^1_E` is that of `theta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Xi {
    pub at_varpi: QmodZ,
    pub at_mu: QmodZ,
}

#[derive(Clone, Debug)]
pub struct ExtendedChar {
    pub st: Stratum,
    pub space: SympSpace,
    pub lagrangian: Subspace,
    pub i1: Lattice,
    pub xi: Xi,
    mu_gen: Vec<u64>,
    mu_order: u64,
    scalar_f: usize,
}

impl ExtendedChar {
    pub fn new(st: Stratum, xi: Xi) -> Result<ExtendedChar, ExtError> {
        let space = SympSpace::build(&st)?;
        let lagrangian = space.find_stable_lagrangian()?;
        ExtendedChar::with_lagrangian(st, space, lagrangian, xi)
    }

    pub fn with_lagrangian(st: Stratum, space: SympSpace, lagrangian: Subspace, xi: Xi) -> Result<Self, ExtError> {
        let i1 = space.lift(&st, &lagrangian);
        let t = st.host.tower();
        let scalar_f = match st.host.kind {
            HostKind::Split => t.f,
            HostKind::Inner { .. } => 1,
        };
        let mu_gen = mu_generator(t, scalar_f);
        let mu_order = crate::arith::pow_u64(t.p, scalar_f as u32) - 1;
        if xi.at_mu.mul_int(mu_order as i128) != QmodZ::ZERO {
            return Err(ExtError::InconsistentXi);
        }
        Ok(ExtendedChar { st, space, lagrangian, i1, xi, mu_gen, mu_order, scalar_f })
    }

    pub fn with_xi(&self, xi: Xi) -> ExtendedChar {
        ExtendedChar { xi, ..self.clone() }
    }

    pub fn in_i1(&self, g: &MatElt) -> bool {
        let c = &self.st.host.ctx;
        match self.st.host.coords(&c.sub(g, &c.identity())) {
            Ok(x) => self.i1.contains(&x),
            Err(_) => false,
        }
    }

    /// `iota theta` on `I^1`: `theta` for odd `l`; for `l = 2s`, the `U^1_E`
    /// part below level `s` is peeled off and the rest `1 + x` contributes
    /// `psi_beta(1 + x - x^2/2)`.
    pub fn iota_theta(&self, g: &MatElt) -> Result<QmodZ, ExtError> {
        if !self.in_i1(g) {
            return Err(ExtError::NotInI);
        }
        let st = &self.st;
        if st.l % 2 == 1 {
            return Ok(st.theta(g)?);
        }
        let c = &st.host.ctx;
        let (e, r) = st.peel(g, st.s() - 1)?;
        let x = c.sub(&r, &c.identity());
        let half = c.tower.inv(&c.tower.from_int(2)).map_err(AlgebraError::from)?;
        let y = c.sub(&x, &c.scale(&c.mul(&x, &x), &half));
        Ok(st.psi_beta(&e) + st.psi_beta_additive(&y))
    }

    /// `g = varpi^a omega(zeta) g2` with `g2` in `I^1`.
    pub fn factor(&self, g: &MatElt) -> Result<(i64, Vec<u64>, MatElt), ExtError> {
        let st = &self.st;
        let c = &st.host.ctx;
        let t = &c.tower;
        let (a, g1) = st.strip_varpi(g).map_err(|_| ExtError::NotInI)?;
        let zeta = t.residue(g1.at(0, 0));
        if t.is_zero(&zeta) || (0..st.n()).any(|i| t.residue(g1.at(i, i)) != zeta) {
            return Err(ExtError::NotInI);
        }
        if self.scalar_f == 1 && zeta[1..].iter().any(|&v| v != 0) {
            return Err(ExtError::NotInI);
        }
        let w = t.teichmuller(&zeta);
        let wi = t.inv(&w).map_err(AlgebraError::from)?;
        let g2 = c.scale(&g1, &wi);
        if !self.in_i1(&g2) {
            return Err(ExtError::NotInI);
        }
        Ok((a, zeta, g2))
    }

    pub fn eval(&self, g: &MatElt) -> Result<QmodZ, ExtError> {
        let (a, zeta, g2) = self.factor(g)?;
        let t = self.st.host.tower();
        let k = dlog(t, &self.mu_gen, &zeta, self.mu_order).ok_or(ExtError::NotInI)?;
        Ok(self.xi.at_varpi.mul_int(a as i128) + self.xi.at_mu.mul_int(k as i128) + self.iota_theta(&g2)?)
    }

    pub fn in_group(&self, g: &MatElt) -> bool {
        self.factor(g).is_ok()
    }

    pub fn mu_generator(&self) -> &[u64] {
        &self.mu_gen
    }
}

/// The norm-compatible extension of `xi` to `(KE)^x`, shifted on `mu_K` by
/// `offset` (which must vanish on `mu_F`).
pub fn extend_xi(xi: &Xi, t_k: &FieldTower, offset: QmodZ) -> Result<Xi, ExtError> {
    let f = t_k.f;
    let gk = mu_generator(t_k, f);
    let gf = mu_generator(t_k, 1);
    let qk = crate::arith::pow_u64(t_k.p, f as u32) - 1;
    let idx = qk / (t_k.p - 1);
    let norm = t_k.res_pow(&gk, idx as u128);
    let e = dlog(t_k, &gf, &norm, t_k.p - 1).ok_or(ExtError::InconsistentXi)?;
    let at_mu = xi.at_mu.mul_int(e as i128) + offset;
    if offset.mul_int(idx as i128) != QmodZ::ZERO {
        return Err(ExtError::InconsistentXi);
    }
    Ok(Xi { at_varpi: xi.at_varpi, at_mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraCtx, Host};
    use crate::arith::make_tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn lambda(f: usize, l: u32, prec: u32) -> ExtendedChar {
        let h = Host::split(AlgebraCtx::new(3, Arc::new(make_tower(3, f, prec).unwrap())).unwrap());
        let st = Stratum::from_eisenstein(h, &[-3, 0, 0], l).unwrap();
        ExtendedChar::new(st, Xi { at_varpi: QmodZ::new(1, 9), at_mu: QmodZ::new(1, 2) }).unwrap()
    }

    #[test]
    fn iota_theta_is_a_stable_character() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (l, prec) in [(2, 5), (4, 6), (1, 5)] {
            let lam = lambda(1, l, prec);
            let c = &lam.st.host.ctx;
            for _ in 0..100 {
                let g = lam.st.random_in(&lam.i1, &mut rng);
                let h = lam.st.random_in(&lam.i1, &mut rng);
                let gh = c.mul(&g, &h);
                let (a, b, ab) = (lam.iota_theta(&g).unwrap(), lam.iota_theta(&h).unwrap(), lam.iota_theta(&gh).unwrap());
                assert_eq!(ab, a + b, "l = {l}");
                assert_eq!(lam.iota_theta(&lam.st.ad_varpi(&g).unwrap()).unwrap(), a, "l = {l}");
                let k = lam.st.random_in(&lam.st.h1, &mut rng);
                assert_eq!(lam.iota_theta(&k).unwrap(), lam.st.theta(&k).unwrap());
            }
        }
    }

    #[test]
    fn eval_on_e() {
        let lam = lambda(1, 2, 6);
        let c = &lam.st.host.ctx;
        assert_eq!(lam.eval(&c.identity()).unwrap(), QmodZ::ZERO);
        assert_eq!(lam.eval(&lam.st.varpi).unwrap(), QmodZ::new(1, 9));
        assert_eq!(lam.eval(&c.scale_int(&c.identity(), -1)).unwrap(), QmodZ::new(1, 2));
        let v2 = c.pow(&lam.st.varpi, 2);
        assert_eq!(lam.eval(&v2).unwrap(), QmodZ::new(2, 9));
        assert!(lam.eval(&c.from_ints(&[1, 1, 0, 0, 1, 0, 0, 0, 1])).is_err());
    }

    #[test]
    fn dlog_matches_powers() {
        let t = make_tower(3, 6, 2).unwrap();
        let g = mu_generator(&t, 6);
        let mut y = t.residue(&t.one());
        for k in 0..728u64 {
            if k % 37 == 0 {
                assert_eq!(dlog(&t, &g, &y, 728), Some(k));
            }
            y = t.res_mul(&y, &g);
        }
        let f = mu_generator(&t, 1);
        assert_eq!(dlog(&t, &f, &t.from_int(2), 2), Some(1));
    }

    #[test]
    fn norm_compatible_xi() {
        let t = make_tower(3, 3, 4).unwrap();
        let xi = Xi { at_varpi: QmodZ::new(1, 9), at_mu: QmodZ::new(1, 2) };
        let k = extend_xi(&xi, &t, QmodZ::ZERO).unwrap();
        assert_eq!(k.at_mu.mul_int(13), QmodZ::new(1, 2));
        assert!(extend_xi(&xi, &t, QmodZ::new(1, 13)).is_ok());
        assert!(extend_xi(&xi, &t, QmodZ::new(1, 2)).is_err());
    }
}
