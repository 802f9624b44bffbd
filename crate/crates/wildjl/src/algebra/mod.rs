//! `M_n` over an unramified tower, the standard minimal order, its radical
//! and prime element, and lattices in digit coordinates.

mod host;
mod lattice;

pub use host::{Host, HostKind, SubBasis};
pub use lattice::{quotient_basis, Lattice, QuotientMap};

use crate::arith::{pow_u64, ArithError, FieldTower};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("degree {0} is not a power of p")]
    NotPPower(usize),
    #[error("matrix is not invertible over the integers")]
    NotUnit,
    #[error("element is not in the order")]
    NotInOrder,
    #[error("element is not in the algebra")]
    NotInAlgebra,
    #[error("precision fell to {0}, below the floor {1}")]
    PrecisionFloor(u32, u32),
    #[error("lattice containment violated")]
    Containment,
    #[error("companion element does not normalize the order")]
    NotNormalizing,
    #[error("polynomial is not of Eisenstein type")]
    NotEisenstein,
}

/// Square matrix with entries in a tower, known modulo `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatElt {
    pub n: usize,
    pub prec: u32,
    pub e: Vec<Vec<u64>>,
}

impl MatElt {
    pub fn at(&self, i: usize, j: usize) -> &[u64] {
        &self.e[i * self.n + j]
    }
}

/// `p^{-shift} * m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaled {
    pub shift: u32,
    pub m: MatElt,
}

#[derive(Clone, Debug)]
pub struct AlgebraCtx {
    pub n: usize,
    pub tower: Arc<FieldTower>,
}

impl AlgebraCtx {
    pub fn new(n: usize, tower: Arc<FieldTower>) -> Result<Self, AlgebraError> {
        let mut k = n;
        while k > 1 && (k as u64).is_multiple_of(tower.p) {
            k /= tower.p as usize;
        }
        if k != 1 || n == 1 {
            return Err(AlgebraError::NotPPower(n));
        }
        Ok(AlgebraCtx { n, tower })
    }

    pub fn p(&self) -> u64 {
        self.tower.p
    }

    pub fn zero(&self) -> MatElt {
        MatElt { n: self.n, prec: self.tower.prec, e: vec![self.tower.zero(); self.n * self.n] }
    }

    pub fn scalar(&self, c: &[u64]) -> MatElt {
        let mut m = self.zero();
        for i in 0..self.n {
            m.e[i * self.n + i] = c.to_vec();
        }
        m
    }

    pub fn identity(&self) -> MatElt {
        self.scalar(&self.tower.one())
    }

    pub fn from_ints(&self, v: &[i64]) -> MatElt {
        let mut m = self.zero();
        for (k, &x) in v.iter().enumerate() {
            m.e[k] = self.tower.from_int(x);
        }
        m
    }

    pub fn diag(&self, d: &[Vec<u64>]) -> MatElt {
        let mut m = self.zero();
        for (i, x) in d.iter().enumerate() {
            m.e[i * self.n + i] = x.clone();
        }
        m
    }

    pub fn add(&self, a: &MatElt, b: &MatElt) -> MatElt {
        MatElt {
            n: self.n,
            prec: a.prec.min(b.prec),
            e: a.e.iter().zip(&b.e).map(|(x, y)| self.tower.add(x, y)).collect(),
        }
    }

    pub fn sub(&self, a: &MatElt, b: &MatElt) -> MatElt {
        MatElt {
            n: self.n,
            prec: a.prec.min(b.prec),
            e: a.e.iter().zip(&b.e).map(|(x, y)| self.tower.sub(x, y)).collect(),
        }
    }

    pub fn neg(&self, a: &MatElt) -> MatElt {
        MatElt { n: self.n, prec: a.prec, e: a.e.iter().map(|x| self.tower.neg(x)).collect() }
    }

    pub fn scale(&self, a: &MatElt, c: &[u64]) -> MatElt {
        MatElt { n: self.n, prec: a.prec, e: a.e.iter().map(|x| self.tower.mul(x, c)).collect() }
    }

    pub fn scale_int(&self, a: &MatElt, k: i64) -> MatElt {
        self.scale(a, &self.tower.from_int(k))
    }

    pub fn mul(&self, a: &MatElt, b: &MatElt) -> MatElt {
        let n = self.n;
        let t = &self.tower;
        let mut out = self.zero();
        out.prec = a.prec.min(b.prec);
        for i in 0..n {
            for k in 0..n {
                let x = &a.e[i * n + k];
                if t.is_zero(x) {
                    continue;
                }
                for j in 0..n {
                    let y = &b.e[k * n + j];
                    if t.is_zero(y) {
                        continue;
                    }
                    let s = t.add(&out.e[i * n + j], &t.mul(x, y));
                    out.e[i * n + j] = s;
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &MatElt, k: u32) -> MatElt {
        let mut r = self.identity();
        r.prec = a.prec;
        for _ in 0..k {
            r = self.mul(&r, a);
        }
        r
    }

    /// Matrix commutator `x^{-1} y^{-1} x y` of two units.
    pub fn group_commutator(&self, x: &MatElt, y: &MatElt) -> Result<MatElt, AlgebraError> {
        let xi = self.inv_unit(x)?;
        let yi = self.inv_unit(y)?;
        Ok(self.mul(&self.mul(&xi, &yi), &self.mul(x, y)))
    }

    pub fn valuation(&self, a: &MatElt) -> u32 {
        a.e.iter().map(|x| self.tower.valuation(x)).min().unwrap_or(self.tower.prec).min(a.prec)
    }

    /// Exact division by `p^k`; fails if some entry is not divisible.
    pub fn div_p_pow(&self, a: &MatElt, k: u32) -> Result<MatElt, AlgebraError> {
        let mut m = a.clone();
        for _ in 0..k {
            if self.valuation(&m) < 1 {
                return Err(AlgebraError::NotInOrder);
            }
            m = MatElt { n: self.n, prec: m.prec - 1, e: m.e.iter().map(|x| self.tower.div_p(x)).collect() };
        }
        Ok(m)
    }

    /// Equality modulo the smaller of the two tracked precisions.
    pub fn eq_mod(&self, a: &MatElt, b: &MatElt) -> bool {
        let d = self.sub(a, b);
        self.valuation(&d) >= d.prec
    }

    pub fn check_floor(&self, a: &MatElt, floor: u32) -> Result<(), AlgebraError> {
        if a.prec < floor {
            Err(AlgebraError::PrecisionFloor(a.prec, floor))
        } else {
            Ok(())
        }
    }

    pub fn frob(&self, a: &MatElt, k: i64) -> MatElt {
        MatElt { n: self.n, prec: a.prec, e: a.e.iter().map(|x| self.tower.frob(x, k)).collect() }
    }

    pub fn trace(&self, a: &MatElt) -> Vec<u64> {
        (0..self.n).fold(self.tower.zero(), |s, i| self.tower.add(&s, a.at(i, i)))
    }

    /// Coefficients of `det(tI - a)`, leading coefficient first (Berkowitz).
    pub fn charpoly(&self, a: &MatElt) -> Vec<Vec<u64>> {
        let t = &self.tower;
        let n = self.n;
        let mut poly: Vec<Vec<u64>> = vec![t.one()];
        for k in 0..n {
            // leading (k+1)x(k+1) block: [[A, c], [r, akk]]
            let akk = a.at(k, k).to_vec();
            let mut col: Vec<Vec<u64>> = vec![t.one(), t.neg(&akk)];
            let c: Vec<Vec<u64>> = (0..k).map(|i| a.at(i, k).to_vec()).collect();
            let r: Vec<Vec<u64>> = (0..k).map(|j| a.at(k, j).to_vec()).collect();
            let mut v = c.clone();
            for _ in 0..k {
                let rv = r.iter().zip(&v).fold(t.zero(), |s, (x, y)| t.add(&s, &t.mul(x, y)));
                col.push(t.neg(&rv));
                v = (0..k)
                    .map(|i| (0..k).fold(t.zero(), |s, j| t.add(&s, &t.mul(a.at(i, j), &v[j]))))
                    .collect();
            }
            let mut next = vec![t.zero(); k + 2];
            for (i, ni) in next.iter_mut().enumerate() {
                for (j, pj) in poly.iter().enumerate() {
                    if i >= j && i - j < col.len() {
                        *ni = t.add(ni, &t.mul(&col[i - j], pj));
                    }
                }
            }
            poly = next;
        }
        poly
    }

    pub fn det(&self, a: &MatElt) -> Vec<u64> {
        let cp = self.charpoly(a);
        let c = cp[self.n].clone();
        if self.n % 2 == 1 { self.tower.neg(&c) } else { c }
    }

    /// Inverse in `GL_n` of the integers.
    pub fn inv_unit(&self, a: &MatElt) -> Result<MatElt, AlgebraError> {
        let n = self.n;
        let t = &self.tower;
        let mut m = a.clone();
        let mut inv = self.identity();
        inv.prec = a.prec;
        for c in 0..n {
            let piv = (c..n).find(|&i| t.valuation(m.at(i, c)) == 0).ok_or(AlgebraError::NotUnit)?;
            for j in 0..n {
                m.e.swap(c * n + j, piv * n + j);
                inv.e.swap(c * n + j, piv * n + j);
            }
            let iv = t.inv(m.at(c, c))?;
            for j in 0..n {
                m.e[c * n + j] = t.mul(&m.e[c * n + j], &iv);
                inv.e[c * n + j] = t.mul(&inv.e[c * n + j], &iv);
            }
            for i in 0..n {
                if i == c || t.is_zero(m.at(i, c)) {
                    continue;
                }
                let f = m.at(i, c).to_vec();
                for j in 0..n {
                    m.e[i * n + j] = t.sub(&m.e[i * n + j], &t.mul(&f, &m.e[c * n + j]));
                    inv.e[i * n + j] = t.sub(&inv.e[i * n + j], &t.mul(&f, &inv.e[c * n + j]));
                }
            }
        }
        Ok(inv)
    }

    /// `a^{-1} = p^{-shift} m` through Cayley-Hamilton.
    pub fn inv_scaled(&self, a: &MatElt) -> Result<Scaled, AlgebraError> {
        let t = &self.tower;
        let cp = self.charpoly(a);
        let n = self.n;
        // adj(a) = (-1)^{n+1} (a^{n-1} + c1 a^{n-2} + ... + c_{n-1})
        let mut acc = self.identity();
        acc.prec = a.prec;
        for ci in cp.iter().take(n).skip(1) {
            acc = self.add(&self.mul(&acc, a), &self.scalar(ci));
        }
        let adj = if n.is_multiple_of(2) { self.neg(&acc) } else { acc };
        let det = self.det(a);
        let v = t.valuation(&det);
        if v >= a.prec {
            return Err(AlgebraError::NotUnit);
        }
        let mut u = det;
        for _ in 0..v {
            u = t.div_p(&u);
        }
        let ui = t.inv(&u)?;
        let mut m = self.scale(&adj, &ui);
        m.prec = a.prec.saturating_sub(v);
        Ok(Scaled { shift: v, m })
    }

    /// `v_a(x) = min (n v_p(x_ij) + j - i)`; `None` for zero.
    pub fn v_order(&self, a: &MatElt) -> Option<i64> {
        let n = self.n;
        let mut best: Option<i64> = None;
        for i in 0..n {
            for j in 0..n {
                let v = self.tower.valuation(a.at(i, j));
                if v >= a.prec {
                    continue;
                }
                let w = n as i64 * v as i64 + j as i64 - i as i64;
                best = Some(best.map_or(w, |b: i64| b.min(w)));
            }
        }
        best
    }

    pub fn in_order(&self, a: &MatElt) -> bool {
        self.v_order(a).is_none_or(|v| v >= 0)
    }

    /// The prime element with `x_{i,i+1} = 1` and `x_{n,1} = p`.
    pub fn standard_prime(&self) -> MatElt {
        let n = self.n;
        let mut m = self.zero();
        for i in 0..n - 1 {
            m.e[i * n + i + 1] = self.tower.one();
        }
        m.e[(n - 1) * n] = self.tower.from_int(self.p() as i64);
        m
    }

    /// Companion matrix of a monic polynomial `x^n + a_{n-1} x^{n-1} + ... + a_0`
    /// (coefficients `a_0..a_{n-1}`), with ones on the superdiagonal.
    pub fn companion(&self, coeffs: &[i64]) -> Result<MatElt, AlgebraError> {
        let n = self.n;
        let p = self.p() as i64;
        if coeffs.len() != n || coeffs.iter().any(|c| c % p != 0) || (coeffs[0] / p) % p == 0 {
            return Err(AlgebraError::NotEisenstein);
        }
        let mut m = self.zero();
        for i in 0..n - 1 {
            m.e[i * n + i + 1] = self.tower.one();
        }
        for (k, &c) in coeffs.iter().enumerate() {
            m.e[(n - 1) * n + k] = self.tower.from_int(-c);
        }
        Ok(m)
    }

    pub fn p_pow(&self, k: u32) -> u64 {
        pow_u64(self.p(), k)
    }
}

/// Entrywise map, e.g. scalar extension through a tower embedding.
pub fn map_entries(a: &MatElt, f: impl Fn(&[u64]) -> Vec<u64>) -> MatElt {
    MatElt { n: a.n, prec: a.prec, e: a.e.iter().map(|x| f(x)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_tower;
    use proptest::prelude::*;

    fn ctx() -> AlgebraCtx {
        AlgebraCtx::new(3, Arc::new(make_tower(3, 1, 6).unwrap())).unwrap()
    }

    #[test]
    fn prime_cubes_to_p() {
        let c = ctx();
        let pi = c.standard_prime();
        assert_eq!(c.pow(&pi, 3), c.scale_int(&c.identity(), 3));
        assert_eq!(c.tower.valuation(&c.det(&pi)), 1);
        assert_eq!(c.v_order(&pi), Some(1));
        let cp = c.charpoly(&pi);
        assert_eq!(cp, vec![vec![1], vec![0], vec![0], c.tower.from_int(-3)]);
    }

    #[test]
    fn identity_charpoly() {
        let c = ctx();
        let cp = c.charpoly(&c.identity());
        // (t-1)^3
        assert_eq!(cp, vec![vec![1], c.tower.from_int(-3), vec![3], c.tower.from_int(-1)]);
        assert_eq!(c.trace(&c.identity()), vec![3]);
        assert_eq!(c.det(&c.identity()), vec![1]);
    }

    #[test]
    fn scaled_inverse_of_prime() {
        let c = ctx();
        let pi = c.standard_prime();
        let s = c.inv_scaled(&pi).unwrap();
        assert_eq!(s.shift, 1);
        let prod = c.mul(&pi, &s.m);
        assert!(c.eq_mod(&prod, &c.scale_int(&c.identity(), 3)));
    }

    #[test]
    fn companion_of_eisenstein() {
        let c = ctx();
        let g = c.companion(&[-3, 0, 0]).unwrap();
        assert_eq!(g, c.standard_prime());
        assert!(c.companion(&[-9, 0, 0]).is_err());
        let g = c.companion(&[3, 3, 0]).unwrap();
        assert_eq!(c.v_order(&g), Some(1));
        assert_eq!(c.charpoly(&g), vec![vec![1], vec![0], vec![3], vec![3]]);
    }

    fn arb_mat() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-40i64..40, 9)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn trace_conjugation_invariant(g in arb_mat(), u in arb_mat()) {
            let c = ctx();
            let g = c.from_ints(&g);
            let u = c.from_ints(&u);
            if let Ok(ui) = c.inv_unit(&u) {
                let h = c.mul(&c.mul(&u, &g), &ui);
                prop_assert_eq!(c.trace(&h), c.trace(&g));
                prop_assert_eq!(c.charpoly(&h), c.charpoly(&g));
            }
        }

        #[test]
        fn unit_inverse(u in arb_mat()) {
            let c = ctx();
            let u = c.from_ints(&u);
            if let Ok(ui) = c.inv_unit(&u) {
                prop_assert_eq!(c.mul(&u, &ui), c.identity());
            }
        }
    }
}
