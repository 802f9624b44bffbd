use super::AlgebraError;
use crate::arith::{inv_mod, mul_mod, pow_u64, rref_mod_p, val_p};

/// Full-rank `Z_p`-lattice `L` with `p^depth Z_p^dim ⊆ L ⊆ Z_p^dim`, stored as
/// the Howell form of its image in `(Z/p^depth)^dim`: pivots are `p^e`, entries
/// above a pivot are reduced below `p^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub p: u64,
    pub dim: usize,
    pub depth: u32,
    /// `(pivot column, pivot exponent, row)`.
    pub rows: Vec<(usize, u32, Vec<u64>)>,
}

impl Lattice {
    pub fn from_generators(p: u64, dim: usize, depth: u32, gens: &[Vec<u64>]) -> Lattice {
        let q = pow_u64(p, depth);
        let mut pool: Vec<Vec<u64>> =
            gens.iter().map(|g| g.iter().map(|x| x % q).collect::<Vec<u64>>()).filter(|g| g.iter().any(|&x| x != 0)).collect();
        let mut rows: Vec<(usize, u32, Vec<u64>)> = vec![];
        for col in 0..dim {
            let best = pool
                .iter()
                .enumerate()
                .filter(|(_, g)| g[col] != 0)
                .min_by_key(|(_, g)| val_p(g[col], p, depth))
                .map(|(i, _)| i);
            let Some(bi) = best else { continue };
            let mut r = pool.swap_remove(bi);
            let v = val_p(r[col], p, depth);
            let pv = pow_u64(p, v);
            let unit = r[col] / pv;
            let ui = inv_mod(unit, q).expect("unit part");
            for x in r.iter_mut() {
                *x = mul_mod(*x, ui, q);
            }
            for g in pool.iter_mut() {
                if g[col] != 0 {
                    let f = g[col] / pv;
                    for (x, &y) in g.iter_mut().zip(&r) {
                        *x = (*x + q - mul_mod(f, y, q)) % q;
                    }
                }
            }
            let k = pow_u64(p, depth - v);
            let extra: Vec<u64> = r.iter().map(|&x| mul_mod(x, k, q)).collect();
            pool.push(extra);
            pool.retain(|g| g.iter().any(|&x| x != 0));
            rows.push((col, v, r));
        }
        for k in 0..rows.len() {
            let (ck, vk, rk) = (rows[k].0, rows[k].1, rows[k].2.clone());
            let pk = pow_u64(p, vk);
            for i in 0..k {
                let f = rows[i].2[ck] / pk;
                if f != 0 {
                    for (x, &y) in rows[i].2.iter_mut().zip(&rk) {
                        *x = (*x + q - mul_mod(f, y, q)) % q;
                    }
                }
            }
        }
        Lattice { p, dim, depth, rows }
    }

    pub fn whole(p: u64, dim: usize, depth: u32) -> Lattice {
        let gens: Vec<Vec<u64>> = (0..dim).map(|i| unit_vec(dim, i)).collect();
        Lattice::from_generators(p, dim, depth, &gens)
    }

    /// `Z_p`-basis as integer vectors (missing pivots contribute `p^depth e_i`).
    pub fn basis(&self) -> Vec<(usize, u32, Vec<u64>)> {
        let mut out = vec![];
        let mut it = self.rows.iter().peekable();
        for c in 0..self.dim {
            match it.peek() {
                Some((col, _, _)) if *col == c => out.push(it.next().unwrap().clone()),
                _ => {
                    let mut e = vec![0u64; self.dim];
                    e[c] = pow_u64(self.p, self.depth);
                    out.push((c, self.depth, e));
                }
            }
        }
        out
    }

    pub fn generators(&self) -> Vec<Vec<u64>> {
        self.basis().into_iter().map(|(_, _, r)| r).collect()
    }

    pub fn with_depth(&self, depth: u32) -> Lattice {
        assert!(depth >= self.depth);
        Lattice::from_generators(self.p, self.dim, depth, &self.generators())
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let q = pow_u64(self.p, self.depth);
        let mut v: Vec<u64> = v.iter().map(|x| x % q).collect();
        for (c, e, r) in &self.rows {
            let pe = pow_u64(self.p, *e);
            if !v[*c].is_multiple_of(pe) {
                return false;
            }
            let f = v[*c] / pe;
            for (x, &y) in v.iter_mut().zip(r) {
                *x = (*x + q - mul_mod(f, y, q)) % q;
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn is_subset(&self, other: &Lattice) -> bool {
        let d = self.depth.max(other.depth);
        let a = if self.depth < d { self.with_depth(d) } else { self.clone() };
        let b = if other.depth < d { other.with_depth(d) } else { other.clone() };
        a.generators().iter().all(|g| b.contains(g))
    }

    pub fn same(&self, other: &Lattice) -> bool {
        let d = self.depth.max(other.depth);
        let a = if self.depth < d { self.with_depth(d) } else { self.clone() };
        let b = if other.depth < d { other.with_depth(d) } else { other.clone() };
        a == b
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let d = self.depth.max(other.depth);
        let mut g = self.generators();
        g.extend(other.generators());
        Lattice::from_generators(self.p, self.dim, d, &g)
    }

    /// `log_p [Z_p^dim : L]`.
    pub fn index_log(&self) -> u32 {
        self.basis().iter().map(|(_, e, _)| *e).sum()
    }
}

fn unit_vec(dim: usize, i: usize) -> Vec<u64> {
    let mut e = vec![0u64; dim];
    e[i] = 1;
    e
}

/// The `F_p`-space `L1/L2` for `p L1 ⊆ L2 ⊆ L1`.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub p: u64,
    depth: u32,
    l1_basis: Vec<(usize, u32, Vec<u64>)>,
    w_rref: Vec<Vec<u64>>,
    w_pivots: Vec<usize>,
    complement: Vec<usize>,
    /// Lattice vectors whose classes form a basis of the quotient.
    pub reps: Vec<Vec<u64>>,
}

impl QuotientMap {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    fn solve(&self, v: &[u64]) -> Option<Vec<u64>> {
        let q = pow_u64(self.p, self.depth);
        let mut v: Vec<u64> = v.iter().map(|x| x % q).collect();
        let mut a = vec![0u64; self.l1_basis.len()];
        for (k, (c, e, r)) in self.l1_basis.iter().enumerate() {
            let pe = pow_u64(self.p, *e);
            if !v[*c].is_multiple_of(pe) {
                return None;
            }
            let f = v[*c] / pe;
            a[k] = f % self.p;
            for (x, &y) in v.iter_mut().zip(r) {
                *x = (*x + q - mul_mod(f, y, q)) % q;
            }
        }
        v.iter().all(|&x| x == 0).then_some(a)
    }

    /// Coordinates of the class of `v` in the basis `reps`.
    pub fn coords(&self, v: &[u64]) -> Result<Vec<u64>, AlgebraError> {
        let p = self.p;
        let mut a = self.solve(v).ok_or(AlgebraError::Containment)?;
        for (row, &pc) in self.w_rref.iter().zip(&self.w_pivots) {
            let f = a[pc];
            if f != 0 {
                for (x, &y) in a.iter_mut().zip(row) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        Ok(self.complement.iter().map(|&c| a[c]).collect())
    }

    /// A lattice vector with the given quotient coordinates.
    pub fn lift(&self, c: &[u64]) -> Vec<u64> {
        let q = pow_u64(self.p, self.depth);
        let dim = self.l1_basis[0].2.len();
        let mut v = vec![0u64; dim];
        for (ci, r) in c.iter().zip(&self.reps) {
            for (x, &y) in v.iter_mut().zip(r) {
                *x = (*x + mul_mod(*ci, y, q)) % q;
            }
        }
        v
    }
}

pub fn quotient_basis(l1: &Lattice, l2: &Lattice) -> Result<QuotientMap, AlgebraError> {
    let d = l1.depth.max(l2.depth) + 1;
    let a = l1.with_depth(d);
    let b = l2.with_depth(d);
    if !b.is_subset(&a) {
        return Err(AlgebraError::Containment);
    }
    let q = pow_u64(l1.p, d);
    let pa: Vec<Vec<u64>> = a.generators().iter().map(|g| g.iter().map(|&x| mul_mod(x, l1.p, q)).collect()).collect();
    if !pa.iter().all(|g| b.contains(g)) {
        return Err(AlgebraError::Containment);
    }
    let mut qm = QuotientMap {
        p: l1.p,
        depth: d,
        l1_basis: a.basis(),
        w_rref: vec![],
        w_pivots: vec![],
        complement: vec![],
        reps: vec![],
    };
    let w: Vec<Vec<u64>> = b.generators().iter().map(|g| qm.solve(g).expect("contained")).collect();
    let (rr, piv) = rref_mod_p(&w, l1.p);
    qm.complement = (0..qm.l1_basis.len()).filter(|c| !piv.contains(c)).collect();
    qm.reps = qm.complement.iter().map(|&c| qm.l1_basis[c].2.clone()).collect();
    qm.w_rref = rr;
    qm.w_pivots = piv;
    Ok(qm)
}
