//! Truncated arithmetic in unramified extensions of `Q_p`, residue-field
//! cohomology solvers, and exact root-of-unity values.

mod cyclo;
mod fp;
mod qz;
mod tower;

pub use cyclo::{cyclo_add, cyclo_eq, cyclo_from_exp, cyclo_mul, CycloValue};
pub use fp::{elementary_divisor_vals, prime_factors, unit_pivot_kernel, inv_mod, is_prime, mul_mod, nullspace_mod_p, pow_mod, pow_u64, rref_mod_p, solve_mod_p, val_p, FpPoly};
pub use qz::{lcm, QmodZ};
pub use tower::{gcd_usize, inv_matrix_mod, make_tower, Embedding, FieldTower, TruncatedElement};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("degree must be at least 1")]
    BadDegree,
    #[error("precision must be at least 1")]
    BadPrecision,
    #[error("defining polynomial is reducible mod p")]
    Reducible,
    #[error("element is not a unit")]
    NotUnit,
    #[error("no solution in the current residue field; enlarge the field")]
    EnlargeField,
    #[error("insufficient precision: need {need}, have {have}")]
    Precision { need: u32, have: u32 },
    #[error("cyclotomic modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("element does not lie in the embedded subfield")]
    NotInSubfield,
    #[error("tower mismatch")]
    TowerMismatch,
}

/// `psi(x) = e(x/p)` on integral `x`; the exponent only sees `x mod p`.
pub fn psi_level_one(x: &TruncatedElement, tower: &FieldTower) -> Result<QmodZ, ArithError> {
    if tower.prec < 1 {
        return Err(ArithError::Precision { need: 1, have: tower.prec });
    }
    Ok(tower.psi_scaled(tower.ell(&x.coeffs), 0))
}
