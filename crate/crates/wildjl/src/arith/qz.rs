use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Neg, Sub};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// A class in `Q/Z`, kept as `num/den` with `0 <= num < den` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QmodZ {
    pub num: u64,
    pub den: u64,
}

impl QmodZ {
    pub const ZERO: QmodZ = QmodZ { num: 0, den: 1 };

    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0);
        let n = num.rem_euclid(den as i128) as u64;
        let g = gcd(n, den);
        QmodZ { num: n / g, den: den / g }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn mul_int(self, k: i128) -> Self {
        QmodZ::new(self.num as i128 * k, self.den)
    }

    /// Parses `a/b` or an integer.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((a, b)) => {
                let a: i128 = a.trim().parse().ok()?;
                let b: u64 = b.trim().parse().ok()?;
                (b > 0).then(|| QmodZ::new(a, b))
            }
            None => s.parse::<i128>().ok().map(|a| QmodZ::new(a, 1)),
        }
    }
}

impl Add for QmodZ {
    type Output = QmodZ;
    fn add(self, o: QmodZ) -> QmodZ {
        let d = lcm(self.den, o.den);
        QmodZ::new((self.num * (d / self.den) + o.num * (d / o.den)) as i128, d)
    }
}

impl Neg for QmodZ {
    type Output = QmodZ;
    fn neg(self) -> QmodZ {
        QmodZ::new(-(self.num as i128), self.den)
    }
}

impl Sub for QmodZ {
    type Output = QmodZ;
    fn sub(self, o: QmodZ) -> QmodZ {
        self + (-o)
    }
}

impl std::iter::Sum for QmodZ {
    fn sum<I: Iterator<Item = QmodZ>>(it: I) -> QmodZ {
        it.fold(QmodZ::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical() {
        assert_eq!(QmodZ::new(4, 6), QmodZ { num: 2, den: 3 });
        assert_eq!(QmodZ::new(-1, 3), QmodZ { num: 2, den: 3 });
        assert_eq!(QmodZ::new(3, 3), QmodZ::ZERO);
        assert_eq!(QmodZ::new(1, 3) + QmodZ::new(1, 6), QmodZ::new(1, 2));
        assert_eq!(QmodZ::parse("-2/9"), Some(QmodZ::new(7, 9)));
    }
}
