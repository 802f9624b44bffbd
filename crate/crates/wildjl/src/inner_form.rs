//! Inner forms of `M_n(Q_p)` as fixed points of a Frobenius-twisted
//! conjugation in `M_n(K)`, `K` unramified of degree `n`.

use crate::algebra::{AlgebraCtx, AlgebraError, Host, HostKind, Lattice, MatElt};
use crate::arith::{elementary_divisor_vals, make_tower, pow_u64, unit_pivot_kernel, QmodZ};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InnerFormError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("fixed-point system is rank deficient at this precision")]
    RankDeficient,
    #[error("fixed-point solution disagrees with the digit basis")]
    BasisMismatch,
    #[error("center has dimension {0}")]
    Center(usize),
}

pub fn hasse_invariant(n: usize, m: usize, z: i64) -> QmodZ {
    let d = (n / m) as u64;
    QmodZ::new(-(z as i128), d)
}

#[derive(Clone, Debug)]
pub struct InnerForm {
    pub m: usize,
    pub z: i64,
    pub d: usize,
    /// The order `b` inside `B`, in digit coordinates.
    pub host: Host,
    /// `M_n(K)` with its standard order.
    pub host_k: Host,
    /// `Z_p`-basis of `b` returned by the fixed-point solver.
    pub solved: Vec<MatElt>,
    pub hasse: QmodZ,
}

impl InnerForm {
    pub fn build(ctx_k: AlgebraCtx, m: usize, z: i64) -> Result<InnerForm, InnerFormError> {
        let host = Host::inner(ctx_k.clone(), m, z)?;
        let host_k = Host::split(ctx_k);
        let (d, zz) = match &host.kind {
            HostKind::Inner { d, z, .. } => (*d, *z),
            HostKind::Split => unreachable!(),
        };
        let solved = solve_fixed_points(&host, &host_k)?;
        let n = host.n();
        if solved.len() != n * n * (host.tower().f / n) {
            return Err(InnerFormError::RankDeficient);
        }
        let depth = host.cprec() - 1;
        let a = host_k.lattice_of(&solved, depth)?;
        let b = host_k.lattice_of(&host.order_basis(), depth)?;
        if !a.same(&b) {
            return Err(InnerFormError::BasisMismatch);
        }
        let c = center_dim(&host, &host_k)?;
        if c != 1 {
            return Err(InnerFormError::Center(c));
        }
        Ok(InnerForm { m, z: zz, d, hasse: hasse_invariant(n, m, z), host, host_k, solved })
    }

    pub fn build_fresh(p: u64, n: usize, m: usize, z: i64, prec: u32) -> Result<InnerForm, InnerFormError> {
        let tower = make_tower(p, n, prec).map_err(AlgebraError::from)?;
        InnerForm::build(AlgebraCtx::new(n, Arc::new(tower))?, m, z)
    }

    pub fn dim(&self) -> usize {
        self.solved.len()
    }

    /// Reduced characteristic polynomial; its coefficients are checked to be
    /// Frobenius-fixed and returned as integers mod `p^prec`.
    pub fn reduced_charpoly(&self, x: &MatElt) -> Option<Vec<u64>> {
        let c = &self.host.ctx;
        let t = &c.tower;
        let q = pow_u64(t.p, x.prec);
        let cp = c.charpoly(x);
        let mut out = vec![];
        for a in &cp {
            let s = t.frob(a, 1);
            if a.iter().zip(&s).any(|(u, v)| u % q != v % q) || a[1..].iter().any(|u| u % q != 0) {
                return None;
            }
            out.push(a[0] % q);
        }
        Some(out)
    }

    /// `q^k` for the radical `q` of `b`.
    pub fn radical(&self, k: u32, depth: u32) -> Lattice {
        self.host.radical(k, depth)
    }
}

/// Solve `phi(x) = x` on the order of `M_n(K)`, one digit block at a time
/// (`phi` preserves digits), with `phi` applied as a matrix operator.
fn solve_fixed_points(host: &Host, host_k: &Host) -> Result<Vec<MatElt>, InnerFormError> {
    let p = host.p();
    let prec = host.cprec() - 1;
    let q = pow_u64(p, prec);
    let w = host_k.width();
    let nc = host_k.ncoords();
    let mut out = vec![];
    for j in 0..host.n() {
        let cols: Vec<Vec<u64>> = (j * w..(j + 1) * w)
            .map(|k| {
                let x = host_k.basis_elt(k);
                let y = host.phi(&x)?;
                let c = host_k.coords(&y)?;
                Ok((0..w).map(|i| (c[j * w + i] + q - u64::from(i + j * w == k)) % q).collect())
            })
            .collect::<Result<_, AlgebraError>>()?;
        let rows: Vec<Vec<u64>> = (0..w).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        let ker = unit_pivot_kernel(&rows, w, q, p).ok_or(InnerFormError::RankDeficient)?;
        for v in ker {
            let mut c = vec![0u64; nc];
            c[j * w..(j + 1) * w].copy_from_slice(&v);
            let mut x = host_k.from_coords(&c);
            x.prec = prec;
            out.push(x);
        }
    }
    Ok(out)
}

/// Dimension over `Q_p` of the centralizer in `B` of `Pi` and the digit-0 part,
/// which generate `B`.
fn center_dim(host: &Host, host_k: &Host) -> Result<usize, InnerFormError> {
    let c = &host.ctx;
    let p = host.p();
    let cap = host.cprec() - 1;
    let q = pow_u64(p, cap);
    let mut gens = vec![c.standard_prime()];
    gens.extend((0..host.width()).map(|k| host.basis_elt(k)));
    let basis = host.order_basis();
    let rows: Vec<Vec<u64>> = basis
        .iter()
        .map(|b| {
            let mut row = vec![];
            for g in &gens {
                let cm = c.sub(&c.mul(b, g), &c.mul(g, b));
                row.extend(host_k.coords(&cm)?.into_iter().map(|x| x % q));
            }
            Ok(row)
        })
        .collect::<Result<_, AlgebraError>>()?;
    let ed = elementary_divisor_vals(&rows, q, p, cap);
    Ok(ed.iter().filter(|&&v| v >= cap).count() + basis.len().saturating_sub(ed.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quotient_basis;

    #[test]
    fn hasse_values() {
        assert_eq!(hasse_invariant(3, 3, 1), QmodZ::ZERO);
        assert_eq!(hasse_invariant(3, 1, 1), QmodZ::new(2, 3));
        assert_eq!(hasse_invariant(9, 3, 1), QmodZ::new(2, 3));
        assert_eq!(hasse_invariant(9, 1, 2), QmodZ::new(7, 9));
    }

    #[test]
    fn division_algebra_order() {
        let b = InnerForm::build_fresh(3, 3, 1, 1, 5).unwrap();
        assert_eq!(b.dim(), 9);
        let depth = 3;
        let q1 = b.radical(1, depth);
        let pi = b.host.ctx.standard_prime();
        let shifted: Vec<MatElt> = b.host.order_basis().iter().map(|x| b.host.ctx.mul(&pi, x)).collect();
        assert!(b.host.lattice_of(&shifted, depth).unwrap().same(&q1));
        assert_eq!(quotient_basis(&b.radical(0, depth), &q1).unwrap().dim(), 3);
        let det = b.host.ctx.det(&pi);
        assert_eq!(b.host.tower().valuation(&det), 1);
        for x in &b.solved {
            assert!(b.host.is_member(x));
            assert!(b.reduced_charpoly(x).is_some());
        }
    }

    #[test]
    fn split_inner_form() {
        let b = InnerForm::build_fresh(3, 3, 3, 2, 4).unwrap();
        assert_eq!(b.dim(), 9);
        assert!(b.hasse.is_zero());
    }
}
