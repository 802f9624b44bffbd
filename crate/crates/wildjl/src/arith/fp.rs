pub fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("p-power overflows u64")
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u128, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// `v_p(x)` capped at `cap` (used for zero).
pub fn val_p(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x.is_multiple_of(p) && v < cap {
        x /= p;
        v += 1;
    }
    v
}

/// Dense polynomial over `F_p`, lowest coefficient first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + self.p - b) % self.p
            })
            .collect();
        FpPoly::new(self.p, c)
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::new(self.p, vec![]);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % self.p;
            }
        }
        FpPoly::new(self.p, c)
    }

    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        let p = self.p;
        let dd = d.deg().expect("division by zero polynomial");
        let lead_inv = inv_mod(d.c[dd], p).unwrap();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (FpPoly::new(p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let coef = r[i] * lead_inv % p;
            if coef == 0 {
                continue;
            }
            q[i - dd] = coef;
            for j in 0..=dd {
                r[i - dd + j] = (r[i - dd + j] + p * p - coef * d.c[j] % p) % p;
            }
        }
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).1
    }

    pub fn mulmod(&self, o: &FpPoly, m: &FpPoly) -> FpPoly {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, mut e: u128, m: &FpPoly) -> FpPoly {
        let mut r = FpPoly::new(self.p, vec![1]).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(&b, m);
            }
            b = b.mulmod(&b, m);
            e >>= 1;
        }
        r
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(d) = a.deg() {
            let li = inv_mod(a.c[d], a.p).unwrap();
            a = FpPoly::new(a.p, a.c.iter().map(|&x| x * li % a.p).collect());
        }
        a
    }

    /// Inverse of `self` modulo `m`, when coprime.
    pub fn invmod(&self, m: &FpPoly) -> Option<FpPoly> {
        let p = self.p;
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut t0, mut t1) = (FpPoly::new(p, vec![]), FpPoly::new(p, vec![1]));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
            let t2 = t0.sub(&q.mul(&t1));
            t0 = t1;
            t1 = t2;
        }
        if r0.deg() != Some(0) {
            return None;
        }
        let li = inv_mod(r0.c[0], p).unwrap();
        Some(FpPoly::new(p, t0.c.iter().map(|&x| x * li % p).collect()).rem(m))
    }

    /// `x^(p^k) mod self`.
    pub fn frob_x(&self, k: usize) -> FpPoly {
        let mut r = FpPoly::x(self.p).rem(self);
        for _ in 0..k {
            r = r.powmod(self.p as u128, self);
        }
        r
    }

    /// Rabin's test.
    pub fn is_irreducible(&self) -> bool {
        let f = match self.deg() {
            None | Some(0) => return false,
            Some(f) => f,
        };
        let x = FpPoly::x(self.p);
        if self.frob_x(f).sub(&x).rem(self) != FpPoly::new(self.p, vec![]) {
            return false;
        }
        for r in prime_factors(f as u64) {
            let k = f / r as usize;
            let g = self.frob_x(k).sub(&x).gcd(self);
            if g.deg() != Some(0) {
                return false;
            }
        }
        true
    }
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == vec![n]
}

/// Row reduction over `F_p`; returns (rref rows, pivot columns).
pub fn rref_mod_p(rows: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(m[r][c], p).unwrap();
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..ncols {
                    m[i][j] = (m[i][j] + p * p - f * m[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Basis of `{v : A v = 0}` over `F_p`, with `A` given by rows.
pub fn nullspace_mod_p(a: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let (r, piv) = if a.is_empty() { (vec![], vec![]) } else { rref_mod_p(a, p) };
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (row, &pc) in r.iter().zip(&piv) {
                v[pc] = (p - row[f]) % p;
            }
            v
        })
        .collect()
}

/// Solve `A x = b` over `F_p` (A by rows); `None` if inconsistent.
pub fn solve_mod_p(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<u64>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    let (r, piv) = rref_mod_p(&aug, p);
    if piv.contains(&ncols) {
        return None;
    }
    let mut x = vec![0u64; ncols];
    for (row, &pc) in r.iter().zip(&piv) {
        x[pc] = row[ncols];
    }
    Some(x)
}

/// Kernel of `A` over `Z/q` (`q` a power of `p`) when every pivot can be taken
/// to be a unit; `None` if some column only has non-unit entries left.
pub fn unit_pivot_kernel(a: &[Vec<u64>], ncols: usize, q: u64, p: u64) -> Option<Vec<Vec<u64>>> {
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % q).collect()).collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_multiple_of(p)) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(m[r][c], q)?;
        for x in m[r].iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let (lo, hi) = if i < r { let (a, b) = m.split_at_mut(r); (&mut a[i], &b[0]) } else { let (a, b) = m.split_at_mut(i); (&mut b[0], &a[r]) };
                for (x, &y) in lo.iter_mut().zip(hi.iter()) {
                    *x = (*x + q - mul_mod(f, y, q)) % q;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| row.iter().any(|&x| x != 0)) {
        return None;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    Some(
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; ncols];
                v[f] = 1;
                for (row, &pc) in m.iter().zip(&pivots) {
                    v[pc] = (q - row[f]) % q;
                }
                v
            })
            .collect(),
    )
}

/// Valuations of the elementary divisors of `A` over `Z/q`, `q = p^cap`;
/// zero divisors are reported as `cap`.
pub fn elementary_divisor_vals(a: &[Vec<u64>], q: u64, p: u64, cap: u32) -> Vec<u32> {
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % q).collect()).collect();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![];
    let mut used_r = vec![false; rows];
    let mut used_c = vec![false; cols];
    for _ in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in (0..rows).filter(|&i| !used_r[i]) {
            for j in (0..cols).filter(|&j| !used_c[j]) {
                if m[i][j] != 0 {
                    let v = val_p(m[i][j], p, cap);
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        used_r[pi] = true;
        used_c[pj] = true;
        out.push(v);
        let pv = pow_u64(p, v);
        let unit = inv_mod(m[pi][pj] / pv, q).unwrap();
        let prow = m[pi].clone();
        for i in (0..rows).filter(|&i| !used_r[i]) {
            if m[i][pj] != 0 {
                let f = mul_mod(m[i][pj] / pv, unit, q);
                for (x, &y) in m[i].iter_mut().zip(&prow) {
                    *x = (*x + q - mul_mod(f, y, q)) % q;
                }
            }
        }
        for i in 0..rows {
            m[i][pj] = 0;
        }
    }
    while out.len() < rows.min(cols) {
        out.push(cap);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_pow() {
        assert_eq!(inv_mod(2, 81), Some(41));
        assert_eq!(inv_mod(3, 81), None);
        assert_eq!(pow_mod(2, 6, 9), 1);
    }

    #[test]
    fn irreducibility_small() {
        assert!(FpPoly::new(3, vec![1, 0, 1]).is_irreducible());
        assert!(!FpPoly::new(3, vec![2, 0, 1]).is_irreducible());
        assert!(FpPoly::new(3, vec![1, 2, 0, 1]).is_irreducible());
        // x^4 + 1 = (x^2 + x + 2)(x^2 + 2x + 2) over F_3
        assert!(!FpPoly::new(3, vec![1, 0, 0, 0, 1]).is_irreducible());
    }

    #[test]
    fn nullspace_dimension() {
        let a = vec![vec![1, 1, 1]];
        let ns = nullspace_mod_p(&a, 3, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(v.iter().sum::<u64>() % 3, 0);
        }
    }
}
