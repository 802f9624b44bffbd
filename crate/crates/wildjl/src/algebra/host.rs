use super::{AlgebraCtx, AlgebraError, Lattice, MatElt};
use crate::arith::{inv_matrix_mod, mul_mod, pow_u64, rref_mod_p, FieldTower};

/// A `Z_p`-basis of a fixed subring of the tower, with coordinates.
#[derive(Clone, Debug)]
pub struct SubBasis {
    pub elems: Vec<Vec<u64>>,
    rows: Vec<usize>,
    inv: Vec<Vec<u64>>,
}

impl SubBasis {
    pub fn new(t: &FieldTower, elems: Vec<Vec<u64>>) -> Result<SubBasis, AlgebraError> {
        let res: Vec<Vec<u64>> = elems.iter().map(|e| t.residue(e)).collect();
        let (_, rows) = rref_mod_p(&res, t.p);
        if rows.len() != elems.len() {
            return Err(AlgebraError::NotUnit);
        }
        let sq: Vec<Vec<u64>> = rows.iter().map(|&r| elems.iter().map(|e| e[r]).collect()).collect();
        let inv = inv_matrix_mod(&sq, t.modulus, t.p).ok_or(AlgebraError::NotUnit)?;
        Ok(SubBasis { elems, rows, inv })
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn coords(&self, t: &FieldTower, a: &[u64]) -> Vec<u64> {
        let m = t.modulus;
        self.inv
            .iter()
            .map(|row| row.iter().zip(&self.rows).fold(0, |s, (&c, &r)| (s + mul_mod(c, a[r], m)) % m))
            .collect()
    }

    pub fn combine(&self, t: &FieldTower, c: &[u64]) -> Vec<u64> {
        let mut out = t.zero();
        for (x, e) in c.iter().zip(&self.elems) {
            out = t.add(&out, &t.scale(e, *x));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum HostKind {
    /// `M_n` over the whole tower.
    Split,
    /// Fixed points of `x -> Pi^m sigma^z(x) Pi^{-m}`; `sub` spans the ring
    /// fixed by `sigma^{zd}`.
    Inner { m: usize, z: i64, d: usize, sub: SubBasis },
}

/// An algebra together with its standard minimal order, in digit coordinates:
/// `X = sum_j D_j Pi^j` with `D_j` diagonal, `D_j[i] = X[i][i+j]`, or
/// `X[i][i+j-n] / p` when the index wraps.
#[derive(Clone, Debug)]
pub struct Host {
    pub ctx: AlgebraCtx,
    pub kind: HostKind,
}

impl Host {
    pub fn split(ctx: AlgebraCtx) -> Host {
        Host { ctx, kind: HostKind::Split }
    }

    /// `z` is replaced by the least positive representative of its class mod
    /// `n` that is prime to the tower degree.
    pub fn inner(ctx: AlgebraCtx, m: usize, z: i64) -> Result<Host, AlgebraError> {
        let n = ctx.n;
        let f = ctx.tower.f;
        if m == 0 || !n.is_multiple_of(m) || !f.is_multiple_of(n) || gcd(z.rem_euclid(n as i64) as usize, n) != 1 {
            return Err(AlgebraError::NotInAlgebra);
        }
        let d = n / m;
        let mut zz = z.rem_euclid(n as i64);
        while gcd(zz as usize, f) != 1 {
            zz += n as i64;
        }
        let k = (zz as usize * d) % f;
        let sub = SubBasis::new(&ctx.tower, ctx.tower.fixed_subring_basis(k))?;
        if sub.dim() != gcd(k, f) {
            return Err(AlgebraError::NotInAlgebra);
        }
        Ok(Host { ctx, kind: HostKind::Inner { m, z: zz, d, sub } })
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn tower(&self) -> &FieldTower {
        &self.ctx.tower
    }

    /// Coordinates are exact modulo `p^cprec`.
    pub fn cprec(&self) -> u32 {
        self.ctx.tower.prec - 1
    }

    /// Number of `Z_p`-coordinates per digit.
    pub fn width(&self) -> usize {
        match &self.kind {
            HostKind::Split => self.n() * self.ctx.tower.f,
            HostKind::Inner { m, sub, .. } => m * sub.dim(),
        }
    }

    pub fn ncoords(&self) -> usize {
        self.n() * self.width()
    }

    pub fn is_split(&self) -> bool {
        matches!(self.kind, HostKind::Split)
    }

    /// Digit `j` of `x`; `None` if a wrapped entry is not divisible by `p`.
    pub fn digit(&self, x: &MatElt, j: usize) -> Option<Vec<Vec<u64>>> {
        let (n, t) = (self.n(), &self.ctx.tower);
        (0..n)
            .map(|i| {
                if i + j < n {
                    Some(x.at(i, i + j).to_vec())
                } else {
                    let e = x.at(i, i + j - n);
                    (t.valuation(e) >= 1).then(|| t.div_p(e))
                }
            })
            .collect()
    }

    fn sigma_pow(&self, a: &[u64], t: i64) -> Vec<u64> {
        match &self.kind {
            HostKind::Split => a.to_vec(),
            HostKind::Inner { z, .. } => self.ctx.tower.frob(a, -t * z),
        }
    }

    pub fn coords(&self, x: &MatElt) -> Result<Vec<u64>, AlgebraError> {
        let t = &self.ctx.tower;
        let q = pow_u64(t.p, self.cprec());
        let qc = pow_u64(t.p, self.cprec().min(x.prec.saturating_sub(1)));
        let mut out = Vec::with_capacity(self.ncoords());
        for j in 0..self.n() {
            let dj = self.digit(x, j).ok_or(AlgebraError::NotInOrder)?;
            match &self.kind {
                HostKind::Split => {
                    for a in &dj {
                        out.extend(a.iter().map(|c| c % q));
                    }
                }
                HostKind::Inner { m, d, sub, .. } => {
                    for r in 0..*m {
                        let c = sub.coords(t, &dj[r]);
                        let a = sub.combine(t, &c);
                        for s in 0..*d {
                            let want = self.sigma_pow(&a, s as i64);
                            if want.iter().zip(&dj[r + s * m]).any(|(u, v)| u % qc != v % qc) {
                                return Err(AlgebraError::NotInAlgebra);
                            }
                        }
                        out.extend(c.iter().map(|v| v % q));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn from_coords(&self, c: &[u64]) -> MatElt {
        let (n, t) = (self.n(), &self.ctx.tower);
        let w = self.width();
        let mut x = self.ctx.zero();
        for j in 0..n {
            let block = &c[j * w..(j + 1) * w];
            let dj: Vec<Vec<u64>> = match &self.kind {
                HostKind::Split => block.chunks(t.f).map(|a| t.elt(a.to_vec()).coeffs).collect(),
                HostKind::Inner { m, d, sub, .. } => {
                    let mut dj = vec![t.zero(); n];
                    for r in 0..*m {
                        let a = sub.combine(t, &block[r * sub.dim()..(r + 1) * sub.dim()]);
                        for s in 0..*d {
                            dj[r + s * m] = self.sigma_pow(&a, s as i64);
                        }
                    }
                    dj
                }
            };
            for (i, a) in dj.into_iter().enumerate() {
                if i + j < n {
                    x.e[i * n + i + j] = a;
                } else {
                    x.e[i * n + i + j - n] = t.scale(&a, t.p);
                }
            }
        }
        x
    }

    /// Unit coordinate vector `k` as a matrix.
    pub fn basis_elt(&self, k: usize) -> MatElt {
        let mut c = vec![0u64; self.ncoords()];
        c[k] = 1;
        self.from_coords(&c)
    }

    /// `Z_p`-basis of the order.
    pub fn order_basis(&self) -> Vec<MatElt> {
        (0..self.ncoords()).map(|k| self.basis_elt(k)).collect()
    }

    /// Exponent of `p` on digit `j` in `p^k`-th power of the radical.
    pub fn digit_exp(&self, k: u32, j: usize) -> u32 {
        let n = self.n() as i64;
        let e = (k as i64 - j as i64 + n - 1).div_euclid(n);
        e.max(0) as u32
    }

    /// `Z_p`-basis of the `k`-th power of the radical.
    pub fn radical_basis(&self, k: u32) -> Vec<Vec<u64>> {
        let w = self.width();
        (0..self.ncoords())
            .map(|i| {
                let mut c = vec![0u64; self.ncoords()];
                c[i] = pow_u64(self.p(), self.digit_exp(k, i / w));
                c
            })
            .collect()
    }

    pub fn radical(&self, k: u32, depth: u32) -> Lattice {
        Lattice::from_generators(self.p(), self.ncoords(), depth, &self.radical_basis(k))
    }

    pub fn lattice_of(&self, gens: &[MatElt], depth: u32) -> Result<Lattice, AlgebraError> {
        let cs = gens.iter().map(|g| self.coords(g)).collect::<Result<Vec<_>, _>>()?;
        Ok(Lattice::from_generators(self.p(), self.ncoords(), depth, &cs))
    }

    /// Valuation for the radical filtration, `None` at zero.
    pub fn level(&self, c: &[u64]) -> Option<u32> {
        let w = self.width();
        let p = self.p();
        let cap = self.cprec();
        c.iter()
            .enumerate()
            .filter(|(_, v)| **v % pow_u64(p, cap) != 0)
            .map(|(i, &v)| crate::arith::val_p(v, p, cap) * self.n() as u32 + (i / w) as u32)
            .min()
    }

    /// Residue of `x` in the `k`-th graded piece (an `F_p`-vector of length
    /// `width`); the caller guarantees `x` lies in the `k`-th radical power.
    pub fn level_residue(&self, c: &[u64], k: u32) -> Vec<u64> {
        let w = self.width();
        let j = k as usize % self.n();
        let e = pow_u64(self.p(), k / self.n() as u32);
        c[j * w..(j + 1) * w].iter().map(|v| (v / e) % self.p()).collect()
    }

    /// Coordinates of a lift of the residue `r` at level `k`.
    pub fn level_lift(&self, r: &[u64], k: u32) -> Vec<u64> {
        let w = self.width();
        let j = k as usize % self.n();
        let e = pow_u64(self.p(), k / self.n() as u32);
        let mut c = vec![0u64; self.ncoords()];
        for (i, v) in r.iter().enumerate() {
            c[j * w + i] = v * e;
        }
        c
    }

    /// Scalars spanning the coefficient ring over `Z_p`, as tower elements.
    pub fn scalar_basis(&self) -> Vec<Vec<u64>> {
        let t = &self.ctx.tower;
        match &self.kind {
            HostKind::Split => (0..t.f)
                .map(|i| {
                    let mut e = t.zero();
                    e[i] = 1;
                    e
                })
                .collect(),
            HostKind::Inner { .. } => vec![t.one()],
        }
    }

    pub fn phi(&self, x: &MatElt) -> Result<MatElt, AlgebraError> {
        match &self.kind {
            HostKind::Split => Ok(x.clone()),
            HostKind::Inner { m, z, .. } => {
                let c = &self.ctx;
                let pi = c.standard_prime();
                let a = c.pow(&pi, *m as u32);
                let b = c.pow(&pi, (c.n - m) as u32);
                let y = c.mul(&c.mul(&a, &c.frob(x, *z)), &b);
                c.div_p_pow(&y, 1)
            }
        }
    }

    pub fn is_member(&self, x: &MatElt) -> bool {
        match self.phi(x) {
            Ok(y) => {
                let q = pow_u64(self.p(), x.prec.saturating_sub(1));
                y.e.iter().zip(&x.e).all(|(a, b)| a.iter().zip(b).all(|(u, v)| u % q == v % q))
            }
            Err(_) => false,
        }
    }

    /// Digit-0 Teichmuller units, one per class modulo `F_p^x` scalars.
    pub fn torus_units(&self) -> Vec<MatElt> {
        let t = &self.ctx.tower;
        let p = self.p();
        let w = self.width();
        let total = pow_u64(p, w as u32);
        let mut out = vec![];
        for code in 0..total {
            let mut v = vec![0u64; w];
            let mut k = code;
            for x in v.iter_mut() {
                *x = k % p;
                k /= p;
            }
            let canon = (1..p).map(|s| v.iter().map(|x| x * s % p).collect::<Vec<u64>>()).min().unwrap();
            if canon != v {
                continue;
            }
            let mut c = vec![0u64; self.ncoords()];
            c[..w].copy_from_slice(&v);
            let x = self.from_coords(&c);
            let diag: Vec<Vec<u64>> = (0..self.n()).map(|i| x.at(i, i).to_vec()).collect();
            if diag.iter().any(|a| t.valuation(a) > 0) {
                continue;
            }
            out.push(self.ctx.diag(&diag.iter().map(|a| t.teichmuller(a)).collect::<Vec<_>>()));
        }
        out
    }

    /// Whether `g` normalizes the order: `g b g^{-1}` stays integral for a basis.
    pub fn in_normalizer(&self, g: &MatElt) -> Result<bool, AlgebraError> {
        let c = &self.ctx;
        let gi = c.inv_scaled(g)?;
        for b in self.order_basis() {
            let y = c.mul(&c.mul(g, &b), &gi.m);
            let Ok(y) = c.div_p_pow(&y, gi.shift) else { return Ok(false) };
            if self.coords(&y).is_err() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quotient_basis;
    use crate::arith::make_tower;
    use std::sync::Arc;

    fn host(f: usize) -> Host {
        Host::split(AlgebraCtx::new(3, Arc::new(make_tower(3, f, 5).unwrap())).unwrap())
    }

    #[test]
    fn coords_round_trip() {
        let h = host(1);
        let pi = h.ctx.standard_prime();
        let c = h.coords(&pi).unwrap();
        assert_eq!(h.from_coords(&c), pi);
        let bad = h.ctx.from_ints(&[1, 0, 0, 1, 1, 0, 0, 0, 1]);
        assert!(h.coords(&bad).is_err());
    }

    #[test]
    fn radical_chain() {
        let h = host(1);
        let a = h.radical(0, 3);
        let p1 = h.radical(1, 3);
        assert_eq!(quotient_basis(&a, &p1).unwrap().dim(), 3);
        for k in 0..6 {
            let q = quotient_basis(&h.radical(k, 4), &h.radical(k + 1, 4)).unwrap();
            assert_eq!(q.dim(), 3);
        }
        let three_a: Vec<Vec<u64>> = h.radical_basis(0).iter().map(|v| v.iter().map(|x| 3 * x).collect()).collect();
        assert!(Lattice::from_generators(3, 9, 3, &three_a).same(&h.radical(3, 3)));
    }

    #[test]
    fn pi_shifts_radical() {
        let h = host(1);
        let pi = h.ctx.standard_prime();
        for k in 0..6u32 {
            let gens: Vec<MatElt> = h.radical_basis(k).iter().map(|c| h.ctx.mul(&pi, &h.from_coords(c))).collect();
            let l = h.lattice_of(&gens, 4).unwrap();
            assert!(l.same(&h.radical(k + 1, 4)), "k = {k}");
        }
    }

    #[test]
    fn normalizer() {
        let h = host(1);
        let c = &h.ctx;
        assert!(h.in_normalizer(&c.standard_prime()).unwrap());
        assert!(h.in_normalizer(&c.from_ints(&[1, 2, 1, 3, 2, 0, 6, 3, 1])).unwrap());
        assert!(!h.in_normalizer(&c.from_ints(&[1, 0, 0, 0, 1, 0, 0, 0, 3])).unwrap());
    }

    #[test]
    fn torus_counts() {
        assert_eq!(host(1).torus_units().len(), 4);
        let ctx = AlgebraCtx::new(3, Arc::new(make_tower(3, 3, 4).unwrap())).unwrap();
        let b = Host::inner(ctx, 1, 1).unwrap();
        assert_eq!(b.torus_units().len(), 13);
    }

    #[test]
    fn inner_digits() {
        let ctx = AlgebraCtx::new(3, Arc::new(make_tower(3, 3, 4).unwrap())).unwrap();
        let b = Host::inner(ctx.clone(), 1, 1).unwrap();
        assert_eq!(b.ncoords(), 9);
        for k in 0..9 {
            let x = b.basis_elt(k);
            assert!(b.is_member(&x));
            assert_eq!(b.coords(&x).unwrap()[k], 1);
        }
        let pi = ctx.standard_prime();
        assert!(b.is_member(&pi));
        assert!(b.in_normalizer(&pi).unwrap());
        let mut e = ctx.zero();
        e.e[0] = ctx.tower.one();
        assert!(!b.is_member(&e));
        assert!(b.coords(&e).is_err());
    }
}
