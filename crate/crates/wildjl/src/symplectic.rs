//! The symplectic space `J^1/H^1`, its pairing, and its Lagrangians.

use crate::algebra::{quotient_basis, AlgebraError, Lattice, MatElt, QuotientMap};
use crate::arith::{nullspace_mod_p, rref_mod_p, QmodZ};
use crate::strata::{StrataError, Stratum};
use rayon::prelude::*;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SympError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("pairing value {0} is not p-torsion")]
    NotPTorsion(QmodZ),
    #[error("no stable Lagrangian found")]
    NotFound,
    #[error("enumeration limited to dimension 6 over F_3 or 4 over F_5")]
    TooLarge,
}

/// Subspace of `F_p^d` in reduced row echelon form.
pub type Subspace = Vec<Vec<u64>>;

#[derive(Clone, Debug)]
pub struct SympSpace {
    pub p: u64,
    pub quotient: QuotientMap,
    /// Matrix representatives of the basis.
    pub basis: Vec<MatElt>,
    pub gram: Vec<Vec<u64>>,
    /// `Ad(varpi_E)` as a matrix acting on column coordinate vectors.
    pub ad_e: Vec<Vec<u64>>,
    /// Multiplication by the non-trivial scalar basis elements.
    pub scalars: Vec<Vec<Vec<u64>>>,
    /// `(k, basis indices)` per graded piece `U^k`.
    pub grading: Vec<(u32, Vec<usize>)>,
}

impl SympSpace {
    pub fn build(st: &Stratum) -> Result<SympSpace, SympError> {
        let host = &st.host;
        let c = &host.ctx;
        let p = host.p();
        let quotient = quotient_basis(&st.j1, &st.h1)?;
        let basis: Vec<MatElt> = quotient.reps.iter().map(|v| host.from_coords(v)).collect();
        let d = basis.len();
        let mut gram = vec![vec![0u64; d]; d];
        for i in 0..d {
            for j in 0..d {
                gram[i][j] = to_fp(commutator_pairing(st, &basis[i], &basis[j])?, p)?;
            }
        }
        let image = |f: &dyn Fn(&MatElt) -> Result<MatElt, AlgebraError>| -> Result<Vec<Vec<u64>>, SympError> {
            let cols: Vec<Vec<u64>> = basis
                .iter()
                .map(|x| Ok(quotient.coords(&host.coords(&f(x)?)?)?))
                .collect::<Result<_, SympError>>()?;
            Ok((0..d).map(|i| cols.iter().map(|col| col[i]).collect()).collect())
        };
        let ad_e = image(&|x| st.ad_varpi(x))?;
        let mut scalars = vec![];
        for sc in host.scalar_basis().iter().skip(1) {
            scalars.push(image(&|x| Ok(c.scale(x, sc)))?);
        }
        let grading = if d == 0 { vec![] } else { vec![(st.s(), (0..d).collect())] };
        Ok(SympSpace { p, quotient, basis, gram, ad_e, scalars, grading })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pair(&self, u: &[u64], v: &[u64]) -> u64 {
        let p = self.p;
        let mut s = 0;
        for (i, &a) in u.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in v.iter().enumerate() {
                s = (s + a * b % p * self.gram[i][j]) % p;
            }
        }
        s
    }

    pub fn is_alternating(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| self.gram[i][i] == 0 && (0..d).all(|j| (self.gram[i][j] + self.gram[j][i]).is_multiple_of(self.p)))
    }

    pub fn is_nondegenerate(&self) -> bool {
        rref_mod_p(&self.gram, self.p).1.len() == self.dim()
    }

    /// `adE^T gram adE = gram`.
    pub fn ad_e_preserves_form(&self) -> bool {
        let d = self.dim();
        let cols: Vec<Vec<u64>> = (0..d).map(|j| (0..d).map(|i| self.ad_e[i][j]).collect()).collect();
        (0..d).all(|i| (0..d).all(|j| self.pair(&cols[i], &cols[j]) == self.gram[i][j]))
    }

    fn apply(&self, m: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
        m.iter().map(|row| row.iter().zip(v).fold(0, |s, (a, b)| (s + a * b) % self.p)).collect()
    }

    pub fn is_isotropic(&self, w: &Subspace) -> bool {
        w.iter().all(|u| w.iter().all(|v| self.pair(u, v) == 0))
    }

    pub fn is_stable_under(&self, m: &[Vec<u64>], w: &Subspace) -> bool {
        w.iter().all(|v| contains(w, &self.apply(m, v), self.p))
    }

    pub fn is_stable(&self, w: &Subspace) -> bool {
        self.is_stable_under(&self.ad_e, w)
    }

    pub fn is_scalar_stable(&self, w: &Subspace) -> bool {
        self.scalars.iter().all(|m| self.is_stable_under(m, w))
    }

    /// Sum of intersections with the graded pieces equals `w`.
    pub fn is_graded(&self, w: &Subspace) -> bool {
        if w.is_empty() {
            return true;
        }
        let d = self.dim();
        let total: usize = self
            .grading
            .iter()
            .map(|(_, idx)| {
                // combinations of the rows of w vanishing off the piece
                let off: Vec<Vec<u64>> = (0..d).filter(|i| !idx.contains(i)).map(|i| w.iter().map(|r| r[i]).collect()).collect();
                if off.is_empty() { w.len() } else { nullspace_mod_p(&off, w.len(), self.p).len() }
            })
            .sum();
        total == w.len()
    }

    fn perp(&self, w: &Subspace) -> Subspace {
        let d = self.dim();
        let eqs: Vec<Vec<u64>> = w.iter().map(|u| (0..d).map(|j| self.pair(u, &unit(d, j))).collect()).collect();
        let ns = if eqs.is_empty() { (0..d).map(|j| unit(d, j)).collect() } else { nullspace_mod_p(&eqs, d, self.p) };
        canon(&ns, self.p)
    }

    /// Greedy construction: repeatedly adjoin the span (under the scalar
    /// operators) of an `adE`-fixed vector of `w^perp / w`.
    pub fn find_stable_lagrangian(&self) -> Result<Subspace, SympError> {
        let d = self.dim();
        let p = self.p;
        let mut w: Subspace = vec![];
        while 2 * w.len() < d {
            let up = self.perp(&w);
            // (A - 1) u, reduced modulo w, for each basis vector u of w^perp
            let moved: Vec<Vec<u64>> = up
                .iter()
                .map(|u| {
                    let au = self.apply(&self.ad_e, u);
                    reduce(&w, &au.iter().zip(u).map(|(a, b)| (a + p - b) % p).collect::<Vec<_>>(), p)
                })
                .collect();
            let eqs: Vec<Vec<u64>> = (0..d).map(|i| moved.iter().map(|m| m[i]).collect()).collect();
            let ker = nullspace_mod_p(&eqs, up.len(), p);
            let v = ker
                .iter()
                .map(|c| {
                    let mut v = vec![0u64; d];
                    for (ci, u) in c.iter().zip(&up) {
                        for (x, y) in v.iter_mut().zip(u) {
                            *x = (*x + ci * y) % p;
                        }
                    }
                    v
                })
                .find(|v| reduce(&w, v, p).iter().any(|&x| x != 0))
                .ok_or(SympError::NotFound)?;
            let mut rows = w.clone();
            rows.push(v.clone());
            for m in &self.scalars {
                rows.push(self.apply(m, &v));
            }
            w = canon(&rows, p);
            if !self.is_isotropic(&w) {
                return Err(SympError::NotFound);
            }
        }
        Ok(w)
    }

    /// All maximal isotropic subspaces, by level-wise extension with
    /// canonical-form deduplication.
    pub fn enumerate_lagrangians(&self) -> Result<Vec<Subspace>, SympError> {
        let d = self.dim();
        if (self.p == 3 && d > 6) || (self.p == 5 && d > 4) || self.p > 5 && d > 2 {
            return Err(SympError::TooLarge);
        }
        let p = self.p;
        let mut level: BTreeSet<Subspace> = BTreeSet::new();
        level.insert(vec![]);
        for _ in 0..d / 2 {
            let cur: Vec<Subspace> = level.into_iter().collect();
            let next: Vec<BTreeSet<Subspace>> = cur
                .par_iter()
                .map(|w| {
                    let up = self.perp(w);
                    let mut out = BTreeSet::new();
                    let k = up.len();
                    let total = crate::arith::pow_u64(p, k as u32);
                    for code in 1..total {
                        let mut v = vec![0u64; d];
                        let mut c = code;
                        for u in &up {
                            let a = c % p;
                            c /= p;
                            for (x, y) in v.iter_mut().zip(u) {
                                *x = (*x + a * y) % p;
                            }
                        }
                        if reduce(w, &v, p).iter().all(|&x| x == 0) {
                            continue;
                        }
                        let mut rows = w.clone();
                        rows.push(v);
                        out.insert(canon(&rows, p));
                    }
                    out
                })
                .collect();
            level = next.into_iter().flatten().collect();
        }
        Ok(level.into_iter().collect())
    }

    /// The lattice `H^1 + lifts(w)`.
    pub fn lift(&self, st: &Stratum, w: &Subspace) -> Lattice {
        let mut gens = st.h1.generators();
        gens.extend(w.iter().map(|v| self.quotient.lift(v)));
        Lattice::from_generators(st.h1.p, st.h1.dim, st.h1.depth, &gens)
    }
}

/// `prod_{i=1..k} (p^i + 1)`, the number of Lagrangians in a `2k`-dimensional
/// symplectic `F_p`-space.
pub fn lagrangian_count(p: u64, k: u32) -> u64 {
    (1..=k).map(|i| crate::arith::pow_u64(p, i) + 1).product()
}

/// `theta([1+x, 1+y])` with `[a, b] = a^{-1} b^{-1} a b`.
pub fn commutator_pairing(st: &Stratum, x: &MatElt, y: &MatElt) -> Result<QmodZ, SympError> {
    let c = &st.host.ctx;
    let a = c.add(&c.identity(), x);
    let b = c.add(&c.identity(), y);
    let k = c.group_commutator(&a, &b)?;
    Ok(st.theta(&k)?)
}

/// `psi_beta(1 - xy + yx)`.
pub fn formula_pairing(st: &Stratum, x: &MatElt, y: &MatElt) -> QmodZ {
    let c = &st.host.ctx;
    st.psi_beta_additive(&c.sub(&c.mul(y, x), &c.mul(x, y)))
}

fn to_fp(v: QmodZ, p: u64) -> Result<u64, SympError> {
    if !p.is_multiple_of(v.den) {
        return Err(SympError::NotPTorsion(v));
    }
    Ok(v.num * (p / v.den) % p)
}

fn unit(d: usize, j: usize) -> Vec<u64> {
    let mut e = vec![0u64; d];
    e[j] = 1;
    e
}

pub fn canon(rows: &[Vec<u64>], p: u64) -> Subspace {
    if rows.is_empty() {
        return vec![];
    }
    rref_mod_p(rows, p).0
}

/// Reduce `v` modulo the row space of an RREF subspace.
fn reduce(w: &Subspace, v: &[u64], p: u64) -> Vec<u64> {
    let mut v = v.to_vec();
    for row in w {
        let pc = row.iter().position(|&x| x != 0).unwrap();
        let f = v[pc];
        if f != 0 {
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x + p * p - f * y % p) % p;
            }
        }
    }
    v
}

fn contains(w: &Subspace, v: &[u64], p: u64) -> bool {
    reduce(w, v, p).iter().all(|&x| x == 0)
}
