use super::qz::QmodZ;
use super::ArithError;
use serde::{Deserialize, Serialize};

/// Element of `Z[zeta_M]` in the basis `zeta^j`, `0 <= j < phi(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloValue {
    pub modulus: u64,
    pub coeffs: Vec<i64>,
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

fn poly_divexact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i64; a.len() - db];
    for i in (db..a.len()).rev() {
        let c = r[i] / b[db];
        q[i - db] = c;
        for j in 0..=db {
            r[i - db + j] -= c * b[j];
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m) {
        if d < m {
            num = poly_divexact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

impl CycloValue {
    pub fn zero(modulus: u64) -> Self {
        let phi = cyclotomic_poly(modulus).len() - 1;
        CycloValue { modulus, coeffs: vec![0; phi] }
    }

    /// Reduces a vector indexed by exponents mod `modulus`.
    pub fn from_powers(modulus: u64, counts: &[i64]) -> Self {
        let phi = cyclotomic_poly(modulus);
        let d = phi.len() - 1;
        let mut r = counts.to_vec();
        for i in (d..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            for j in 0..=d {
                r[i - d + j] -= c * phi[j];
            }
        }
        r.resize(d, 0);
        CycloValue { modulus, coeffs: r }
    }

    /// `sum_i zeta^{e_i}` for a list of exponents.
    pub fn from_exps(exps: &[QmodZ], modulus: u64) -> Result<Self, ArithError> {
        let mut counts = vec![0i64; modulus as usize];
        for e in exps {
            if !modulus.is_multiple_of(e.den) {
                return Err(ArithError::ModulusMismatch(modulus, e.den));
            }
            counts[(e.num * (modulus / e.den)) as usize] += 1;
        }
        Ok(Self::from_powers(modulus, &counts))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Exact division of every coefficient; `None` if some is not divisible.
    pub fn div_exact(&self, k: i64) -> Option<Self> {
        if self.coeffs.iter().any(|c| c % k != 0) {
            return None;
        }
        Some(CycloValue { modulus: self.modulus, coeffs: self.coeffs.iter().map(|c| c / k).collect() })
    }

    /// Re-expresses the value in `Z[zeta_M']` for `M | M'`.
    pub fn lift(&self, new_mod: u64) -> Result<Self, ArithError> {
        if !new_mod.is_multiple_of(self.modulus) {
            return Err(ArithError::ModulusMismatch(new_mod, self.modulus));
        }
        let s = (new_mod / self.modulus) as usize;
        let mut counts = vec![0i64; new_mod as usize];
        for (j, &c) in self.coeffs.iter().enumerate() {
            counts[j * s] += c;
        }
        Ok(Self::from_powers(new_mod, &counts))
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let t = 2.0 * std::f64::consts::PI / self.modulus as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, &c)| {
            (re + c as f64 * (t * j as f64).cos(), im + c as f64 * (t * j as f64).sin())
        })
    }
}

pub fn cyclo_from_exp(e: QmodZ, modulus: u64) -> Result<CycloValue, ArithError> {
    CycloValue::from_exps(&[e], modulus)
}

pub fn cyclo_add(a: &CycloValue, b: &CycloValue) -> Result<CycloValue, ArithError> {
    if a.modulus != b.modulus {
        return Err(ArithError::ModulusMismatch(a.modulus, b.modulus));
    }
    Ok(CycloValue { modulus: a.modulus, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() })
}

pub fn cyclo_mul(a: &CycloValue, b: &CycloValue) -> Result<CycloValue, ArithError> {
    if a.modulus != b.modulus {
        return Err(ArithError::ModulusMismatch(a.modulus, b.modulus));
    }
    let mut counts = vec![0i64; a.coeffs.len() + b.coeffs.len()];
    for (i, &x) in a.coeffs.iter().enumerate() {
        for (j, &y) in b.coeffs.iter().enumerate() {
            counts[i + j] += x * y;
        }
    }
    Ok(CycloValue::from_powers(a.modulus, &counts))
}

pub fn cyclo_eq(a: &CycloValue, b: &CycloValue) -> Result<bool, ArithError> {
    if a.modulus != b.modulus {
        let m = super::qz::lcm(a.modulus, b.modulus);
        return Ok(a.lift(m)?.coeffs == b.lift(m)?.coeffs);
    }
    Ok(a.coeffs == b.coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
    }

    #[test]
    fn sum_of_roots_vanishes() {
        let exps: Vec<QmodZ> = (0..3).map(|k| QmodZ::new(k, 3)).collect();
        assert!(CycloValue::from_exps(&exps, 3).unwrap().is_zero());
        let exps: Vec<QmodZ> = (0..9).map(|k| QmodZ::new(k, 9)).collect();
        assert!(CycloValue::from_exps(&exps, 18).unwrap().is_zero());
    }

    #[test]
    fn products_and_sums() {
        let a = cyclo_from_exp(QmodZ::new(1, 9), 9).unwrap();
        let b = cyclo_from_exp(QmodZ::new(2, 9), 9).unwrap();
        let c = cyclo_from_exp(QmodZ::new(3, 9), 9).unwrap();
        assert!(cyclo_eq(&cyclo_mul(&a, &b).unwrap(), &c).unwrap());
        let all = CycloValue::from_exps(&[QmodZ::ZERO, QmodZ::new(1, 3), QmodZ::new(2, 3)], 3).unwrap();
        let z = cyclo_from_exp(QmodZ::new(1, 3), 3).unwrap();
        assert!(cyclo_eq(&cyclo_add(&all, &z).unwrap(), &z).unwrap());
        assert!(cyclo_add(&a, &z).is_err());
    }

    proptest! {
        #[test]
        fn float_smoke(ks in proptest::collection::vec(0i128..36, 1..20)) {
            let exps: Vec<QmodZ> = ks.iter().map(|&k| QmodZ::new(k, 36)).collect();
            let v = CycloValue::from_exps(&exps, 36).unwrap();
            let (re, im) = v.to_complex();
            let t = 2.0 * std::f64::consts::PI / 36.0;
            let (fr, fi) = ks.iter().fold((0.0, 0.0), |(a, b), &k| (a + (t * k as f64).cos(), b + (t * k as f64).sin()));
            prop_assert!((re - fr).abs() < 1e-9 && (im - fi).abs() < 1e-9);
            let l = v.lift(72).unwrap();
            let (lr, li) = l.to_complex();
            prop_assert!((lr - fr).abs() < 1e-9 && (li - fi).abs() < 1e-9);
        }
    }
}
