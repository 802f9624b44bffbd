use super::fp::{inv_mod, is_prime, mul_mod, nullspace_mod_p, pow_u64, rref_mod_p, val_p, FpPoly};
use super::qz::QmodZ;
use super::ArithError;
use std::sync::Arc;

/// Unramified extension `K/Q_p` of degree `f`, truncated at `p^prec`, in the
/// power basis of a monic lift of an irreducible polynomial over `F_p`.
#[derive(Debug)]
pub struct FieldTower {
    pub p: u64,
    pub f: usize,
    pub prec: u32,
    pub modulus: u64,
    pub defining_poly: Vec<u64>,
    /// Column `j` is `sigma(x^j)`.
    pub frobenius_matrix: Vec<Vec<u64>>,
    frob_pows: Vec<Vec<Vec<u64>>>,
    trace_vec: Vec<u64>,
    ell_unit: Vec<u64>,
    res_poly: FpPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedElement {
    pub coeffs: Vec<u64>,
}

impl TruncatedElement {
    pub fn val(&self, t: &FieldTower) -> Option<u32> {
        let v = t.valuation(&self.coeffs);
        (v < t.prec).then_some(v)
    }
}

pub fn make_tower(p: u64, f: usize, prec: u32) -> Result<FieldTower, ArithError> {
    if p == 2 || !is_prime(p) {
        return Err(ArithError::BadPrime(p));
    }
    if f == 0 {
        return Err(ArithError::BadDegree);
    }
    let mut k: u64 = 0;
    loop {
        let mut c = vec![0u64; f + 1];
        let mut r = k;
        for ci in c.iter_mut().take(f) {
            *ci = r % p;
            r /= p;
        }
        c[f] = 1;
        k += 1;
        if c[0] == 0 && f > 1 {
            continue;
        }
        if FpPoly::new(p, c.clone()).is_irreducible() {
            return FieldTower::with_poly(p, c, prec);
        }
    }
}

impl FieldTower {
    pub fn with_poly(p: u64, poly: Vec<u64>, prec: u32) -> Result<FieldTower, ArithError> {
        if p == 2 || !is_prime(p) {
            return Err(ArithError::BadPrime(p));
        }
        if prec == 0 {
            return Err(ArithError::BadPrecision);
        }
        let f = poly.len() - 1;
        if f == 0 || poly[f] != 1 {
            return Err(ArithError::BadDegree);
        }
        let res_poly = FpPoly::new(p, poly.clone());
        if !res_poly.is_irreducible() {
            return Err(ArithError::Reducible);
        }
        let modulus = pow_u64(p, prec);
        assert!(modulus < (1u64 << 62), "precision too large for u64 storage");
        let mut t = FieldTower {
            p,
            f,
            prec,
            modulus,
            defining_poly: poly.iter().map(|&c| c % modulus).collect(),
            frobenius_matrix: vec![],
            frob_pows: vec![],
            trace_vec: vec![],
            ell_unit: vec![],
            res_poly,
        };
        t.init_frobenius();
        t.init_trace();
        Ok(t)
    }

    fn init_frobenius(&mut self) {
        let f = self.f;
        let mut xe = self.zero();
        if f > 1 {
            xe[1] = 1;
        } else {
            xe[0] = 0;
        }
        let r = if f == 1 {
            self.one()
        } else {
            let mut r = self.pow(&xe, self.p as u128);
            let dp: Vec<u64> = (1..=f).map(|i| self.defining_poly[i] * i as u64 % self.modulus).collect();
            for _ in 0..(2 * self.prec + 2) {
                let pv = self.eval_poly(&self.defining_poly, &r);
                let dv = self.eval_poly(&dp, &r);
                let corr = self.mul(&pv, &self.inv(&dv).expect("separable"));
                r = self.sub(&r, &corr);
            }
            r
        };
        let mut cols = vec![self.one()];
        for j in 1..f {
            let next = self.mul(&cols[j - 1], &r);
            cols.push(next);
        }
        self.frobenius_matrix = cols;
        let mut pows = vec![(0..f).map(|j| {
            let mut e = self.zero();
            e[j] = 1;
            e
        }).collect::<Vec<_>>()];
        for k in 1..f {
            let prev = &pows[k - 1];
            let next: Vec<Vec<u64>> = prev.iter().map(|col| self.frob_once(col)).collect();
            pows.push(next);
        }
        self.frob_pows = pows;
    }

    fn init_trace(&mut self) {
        let f = self.f;
        self.trace_vec = (0..f)
            .map(|j| {
                let mut e = self.zero();
                e[j] = 1;
                let mut s = 0u64;
                for k in 0..f {
                    s = (s + self.frob(&e, k as i64)[0]) % self.modulus;
                }
                s
            })
            .collect();
        let j = (0..f).find(|&j| !self.trace_vec[j].is_multiple_of(self.p)).expect("trace is surjective");
        let inv = inv_mod(self.trace_vec[j], self.modulus).unwrap();
        let mut c = self.zero();
        c[j] = inv;
        self.ell_unit = c;
    }

    fn eval_poly(&self, poly: &[u64], r: &[u64]) -> Vec<u64> {
        let mut acc = self.zero();
        for &c in poly.iter().rev() {
            acc = self.mul(&acc, r);
            acc[0] = (acc[0] + c) % self.modulus;
        }
        acc
    }

    fn frob_once(&self, a: &[u64]) -> Vec<u64> {
        let mut out = self.zero();
        for (j, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(&self.frobenius_matrix[j]) {
                *o = (*o + mul_mod(c, m, self.modulus)) % self.modulus;
            }
        }
        out
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.f]
    }

    pub fn one(&self) -> Vec<u64> {
        self.from_int(1)
    }

    pub fn from_int(&self, k: i64) -> Vec<u64> {
        let mut e = self.zero();
        e[0] = k.rem_euclid(self.modulus as i64) as u64;
        e
    }

    pub fn elt(&self, coeffs: Vec<u64>) -> TruncatedElement {
        TruncatedElement { coeffs: coeffs.into_iter().map(|c| c % self.modulus).collect() }
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.modulus).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + self.modulus - y) % self.modulus).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| (self.modulus - x) % self.modulus).collect()
    }

    pub fn scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter().map(|&x| mul_mod(x, k % self.modulus, self.modulus)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = self.f;
        let m = self.modulus;
        if f == 1 {
            return vec![mul_mod(a[0], b[0], m)];
        }
        let mut prod = vec![0u128; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % m as u128;
            }
        }
        let mut r: Vec<u64> = prod.iter().map(|&x| x as u64).collect();
        for i in (f..2 * f - 1).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            r[i] = 0;
            for j in 0..f {
                let t = mul_mod(c, self.defining_poly[j], m);
                r[i - f + j] = (r[i - f + j] + m - t) % m;
            }
        }
        r.truncate(f);
        r
    }

    pub fn pow(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut r = self.one();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Minimum `p`-adic valuation of the coefficients (`prec` for zero).
    pub fn valuation(&self, a: &[u64]) -> u32 {
        a.iter().map(|&c| val_p(c, self.p, self.prec)).min().unwrap_or(self.prec)
    }

    /// Exact division by `p`; the top digit of the result is unknown and set to 0.
    pub fn div_p(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&c| c / self.p).collect()
    }

    pub fn residue(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&c| c % self.p).collect()
    }

    pub fn inv(&self, a: &[u64]) -> Result<Vec<u64>, ArithError> {
        let r = FpPoly::new(self.p, self.residue(a));
        let ri = r.invmod(&self.res_poly).ok_or(ArithError::NotUnit)?;
        let mut b = self.zero();
        for (i, &c) in ri.c.iter().enumerate() {
            b[i] = c;
        }
        let two = self.from_int(2);
        let mut good = 1;
        while good < self.prec {
            b = self.mul(&b, &self.sub(&two, &self.mul(a, &b)));
            good *= 2;
        }
        Ok(b)
    }

    /// `sigma^k(a)`, `k` taken mod `f`.
    pub fn frob(&self, a: &[u64], k: i64) -> Vec<u64> {
        let k = k.rem_euclid(self.f as i64) as usize;
        if k == 0 {
            return a.to_vec();
        }
        let cols = &self.frob_pows[k];
        let mut out = self.zero();
        for (j, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(&cols[j]) {
                *o = (*o + mul_mod(c, m, self.modulus)) % self.modulus;
            }
        }
        out
    }

    /// Teichmuller representative with the same residue as `a`.
    pub fn teichmuller(&self, a: &[u64]) -> Vec<u64> {
        if self.valuation(a) > 0 {
            return self.zero();
        }
        let mut b = a.to_vec();
        for _ in 0..=self.prec {
            b = self.frob(&self.pow(&b, self.p as u128), -1);
        }
        b
    }

    /// `Tr_{K/Q_p}(a)` as a residue mod `p^prec`.
    pub fn trace(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.trace_vec).fold(0, |s, (&x, &t)| (s + mul_mod(x, t, self.modulus)) % self.modulus)
    }

    /// The level-one linear form used for `psi^K`: `Tr(c a)` with `Tr(c) = 1`,
    /// so that it restricts to the identity on `Q_p`.
    pub fn ell(&self, a: &[u64]) -> u64 {
        self.trace(&self.mul(&self.ell_unit, a))
    }

    pub fn ell_unit(&self) -> &[u64] {
        &self.ell_unit
    }

    /// Exponent of `psi(p^{-e} v)` for `v` in `Z/p^prec`.
    pub fn psi_scaled(&self, v: u64, e: u32) -> QmodZ {
        let d = pow_u64(self.p, e + 1);
        QmodZ::new((v % d) as i128, d)
    }

    // ---- residue field F_{p^f} ----

    pub fn res_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let r = FpPoly::new(self.p, a.to_vec()).mulmod(&FpPoly::new(self.p, b.to_vec()), &self.res_poly);
        self.pad(r)
    }

    pub fn res_inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        FpPoly::new(self.p, a.to_vec()).invmod(&self.res_poly).map(|r| self.pad(r))
    }

    pub fn res_frob(&self, a: &[u64], k: i64) -> Vec<u64> {
        self.residue(&self.frob(a, k))
    }

    pub fn res_pow(&self, a: &[u64], e: u128) -> Vec<u64> {
        self.pad(FpPoly::new(self.p, a.to_vec()).powmod(e, &self.res_poly))
    }

    fn pad(&self, r: FpPoly) -> Vec<u64> {
        let mut v = r.c;
        v.resize(self.f, 0);
        v
    }

    fn frob_res_matrix(&self, k: i64) -> Vec<Vec<u64>> {
        let k = k.rem_euclid(self.f as i64) as usize;
        // rows i, columns j
        (0..self.f).map(|i| (0..self.f).map(|j| self.frob_pows[k][j][i] % self.p).collect()).collect()
    }

    /// All residue-field elements, in a fixed order (small fields only).
    pub fn residues(&self) -> Vec<Vec<u64>> {
        let total = pow_u64(self.p, self.f as u32);
        (0..total)
            .map(|mut k| {
                (0..self.f)
                    .map(|_| {
                        let d = k % self.p;
                        k /= self.p;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    /// Solve `sigma^e(y) = x y` in `F_{p^f}`, `y != 0`.
    pub fn hilbert90_mult(&self, x: &[u64], e: i64) -> Result<Vec<u64>, ArithError> {
        let s = self.frob_res_matrix(e);
        let mx: Vec<Vec<u64>> = (0..self.f)
            .map(|j| {
                let mut ej = vec![0u64; self.f];
                ej[j] = 1;
                self.res_mul(x, &ej)
            })
            .collect();
        let a: Vec<Vec<u64>> = (0..self.f)
            .map(|i| (0..self.f).map(|j| (s[i][j] + self.p - mx[j][i]) % self.p).collect())
            .collect();
        nullspace_mod_p(&a, self.f, self.p).into_iter().next().ok_or(ArithError::EnlargeField)
    }

    /// Solve `sigma^e(y) - y = x` in `F_{p^f}`.
    pub fn hilbert90_add(&self, x: &[u64], e: i64) -> Result<Vec<u64>, ArithError> {
        let s = self.frob_res_matrix(e);
        let a: Vec<Vec<u64>> = (0..self.f)
            .map(|i| (0..self.f).map(|j| (s[i][j] + self.p - u64::from(i == j)) % self.p).collect())
            .collect();
        super::fp::solve_mod_p(&a, &self.residue(x), self.p).ok_or(ArithError::EnlargeField)
    }

    /// Whether `sigma^e(y) = x y` becomes solvable in the degree-`big` extension,
    /// for `x` in this residue field.
    pub fn mult_solvable_in(&self, x: &[u64], big: usize, e: i64) -> bool {
        let g = gcd_usize(e.rem_euclid(big as i64) as usize, big);
        let m = pow_u64(self.p, self.f as u32) as u128 - 1;
        let pg = pow_mod_u128(self.p as u128, g as u128, m);
        let mut term = 1u128 % m;
        let mut ex = 0u128;
        for _ in 0..big / g {
            ex = (ex + term) % m;
            term = term * pg % m;
        }
        let n = self.res_pow(x, ex);
        n.iter().enumerate().all(|(i, &c)| c == u64::from(i == 0))
    }

    /// Whether `sigma^e(y) - y = x` becomes solvable in the degree-`big` extension.
    pub fn add_solvable_in(&self, x: &[u64], big: usize, e: i64) -> bool {
        let g = gcd_usize(e.rem_euclid(big as i64) as usize, big);
        let mut s = vec![0u64; self.f];
        let mut t = self.residue(x);
        for _ in 0..big / g {
            s = s.iter().zip(&t).map(|(a, b)| (a + b) % self.p).collect();
            t = self.res_frob(&t, g as i64);
        }
        s.iter().all(|&c| c == 0)
    }

    /// A `Z_p`-basis of the ring of integers of the fixed field of `sigma^k`.
    pub fn fixed_subring_basis(&self, k: usize) -> Vec<Vec<u64>> {
        let g = gcd_usize(k % self.f, self.f);
        let mut out: Vec<Vec<u64>> = vec![];
        for j in 0..self.f {
            let mut e = self.zero();
            e[j] = 1;
            let mut t = self.zero();
            for i in 0..self.f / g {
                t = self.add(&t, &self.frob(&e, (i * g) as i64));
            }
            let mut rows: Vec<Vec<u64>> = out.iter().map(|v| self.residue(v)).collect();
            rows.push(self.residue(&t));
            if rref_mod_p(&rows, self.p).1.len() == rows.len() {
                out.push(t);
            }
            if out.len() == g {
                break;
            }
        }
        out
    }
}

pub fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd_usize(b, a % b) }
}

fn pow_mod_u128(mut a: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u128(r, a, m);
        }
        a = mulmod_u128(a, a, m);
        e >>= 1;
    }
    r
}

fn mulmod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (mut a, mut b, mut r) = (a % m, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = (r + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    r
}

/// Square matrix inverse over `Z/p^N` with unit determinant.
pub fn inv_matrix_mod(m: &[Vec<u64>], modulus: u64, p: u64) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.to_vec();
    let mut inv: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| !a[i][c].is_multiple_of(p))?;
        a.swap(c, piv);
        inv.swap(c, piv);
        let iv = inv_mod(a[c][c], modulus)?;
        for j in 0..n {
            a[c][j] = mul_mod(a[c][j], iv, modulus);
            inv[c][j] = mul_mod(inv[c][j], iv, modulus);
        }
        for i in 0..n {
            if i != c && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] = (a[i][j] + modulus - mul_mod(f, a[c][j], modulus)) % modulus;
                    inv[i][j] = (inv[i][j] + modulus - mul_mod(f, inv[c][j], modulus)) % modulus;
                }
            }
        }
    }
    Some(inv)
}

/// A field embedding `src -> dst` of unramified towers.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub src: Arc<FieldTower>,
    pub dst: Arc<FieldTower>,
    images: Vec<Vec<u64>>,
    rows: Vec<usize>,
    sub_inv: Vec<Vec<u64>>,
}

impl Embedding {
    pub fn new(src: Arc<FieldTower>, dst: Arc<FieldTower>) -> Result<Self, ArithError> {
        if src.p != dst.p || src.prec != dst.prec || !dst.f.is_multiple_of(src.f) {
            return Err(ArithError::TowerMismatch);
        }
        let p = dst.p;
        let a = src.f;
        let fix: Vec<Vec<u64>> = {
            let s = dst.frob_res_matrix(a as i64);
            let rows: Vec<Vec<u64>> = (0..dst.f)
                .map(|i| (0..dst.f).map(|j| (s[i][j] + p - u64::from(i == j)) % p).collect())
                .collect();
            nullspace_mod_p(&rows, dst.f, p)
        };
        let spoly: Vec<u64> = src.defining_poly.iter().map(|c| c % p).collect();
        let total = pow_u64(p, a as u32);
        let mut root = None;
        for k in 1..total {
            let mut r = vec![0u64; dst.f];
            let mut kk = k;
            for b in &fix {
                let d = kk % p;
                kk /= p;
                for (x, y) in r.iter_mut().zip(b) {
                    *x = (*x + d * y) % p;
                }
            }
            let mut acc = vec![0u64; dst.f];
            for &c in spoly.iter().rev() {
                acc = dst.res_mul(&acc, &r);
                acc[0] = (acc[0] + c) % p;
            }
            if acc.iter().all(|&c| c == 0) {
                root = Some(r);
                break;
            }
        }
        let r = match (root, a) {
            (Some(r), _) => r,
            (None, 1) => dst.zero(),
            _ => return Err(ArithError::TowerMismatch),
        };
        Embedding::from_root(src, dst, r)
    }

    /// The embedding sending the generator of `src` to a root near `r`.
    fn from_root(src: Arc<FieldTower>, dst: Arc<FieldTower>, mut r: Vec<u64>) -> Result<Self, ArithError> {
        let p = dst.p;
        let a = src.f;
        let dpoly: Vec<u64> = (1..=a).map(|i| src.defining_poly[i] * i as u64 % dst.modulus).collect();
        for _ in 0..(2 * dst.prec + 2) {
            let pv = dst.eval_poly(&src.defining_poly, &r);
            let dv = dst.eval_poly(&dpoly, &r);
            r = dst.sub(&r, &dst.mul(&pv, &dst.inv(&dv)?));
        }
        let mut images = vec![dst.one()];
        for j in 1..a {
            let next = dst.mul(&images[j - 1], &r);
            images.push(next);
        }
        let cols: Vec<Vec<u64>> = (0..dst.f).map(|i| images.iter().map(|im| im[i] % p).collect()).collect();
        let (_, rows) = rref_mod_p(&transpose(&cols), p);
        let sub: Vec<Vec<u64>> = rows.iter().map(|&i| images.iter().map(|im| im[i]).collect()).collect();
        let sub_inv = inv_matrix_mod(&sub, dst.modulus, p).ok_or(ArithError::TowerMismatch)?;
        Ok(Embedding { src, dst, images, rows, sub_inv })
    }

    pub fn identity(t: Arc<FieldTower>) -> Result<Self, ArithError> {
        let mut g = t.zero();
        if t.f > 1 {
            g[1] = 1;
        }
        Embedding::from_root(t.clone(), t, g)
    }

    /// `next . self`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding, ArithError> {
        if self.dst.f != next.src.f || self.dst.defining_poly != next.src.defining_poly {
            return Err(ArithError::TowerMismatch);
        }
        let r = match self.images.get(1) {
            Some(g) => next.map(g),
            None => next.dst.zero(),
        };
        Embedding::from_root(self.src.clone(), next.dst.clone(), r)
    }

    pub fn map(&self, a: &[u64]) -> Vec<u64> {
        let d = &self.dst;
        let mut out = d.zero();
        for (c, im) in a.iter().zip(&self.images) {
            out = d.add(&out, &d.scale(im, *c));
        }
        out
    }

    pub fn project(&self, y: &[u64]) -> Result<Vec<u64>, ArithError> {
        let m = self.dst.modulus;
        let c: Vec<u64> = self
            .sub_inv
            .iter()
            .map(|row| row.iter().zip(&self.rows).fold(0, |s, (&r, &i)| (s + mul_mod(r, y[i], m)) % m))
            .collect();
        if self.map(&c) != y {
            return Err(ArithError::NotInSubfield);
        }
        Ok(c)
    }
}

fn transpose(m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}
