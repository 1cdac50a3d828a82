use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Exact rational `num / 2^shift`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    num: i128,
    shift: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, shift: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, shift: 0 };

    pub fn new(num: i128, shift: u32) -> Self {
        let mut d = Dyadic { num, shift };
        d.normalize();
        d
    }

    /// `2^exp`; panics if a positive `exp` would overflow.
    pub fn pow2(exp: i32) -> Self {
        if exp >= 0 {
            Dyadic::new(1i128.checked_shl(exp as u32).expect("2^exp overflows"), 0)
        } else {
            Dyadic::new(1, exp.unsigned_abs())
        }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn half(self) -> Self {
        Dyadic::new(self.num, self.shift + 1)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / libm::pow(2.0, self.shift as f64)
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.shift = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.shift);
        self.num >>= tz;
        self.shift -= tz;
    }

    fn aligned(self, other: Self) -> (i128, i128, u32) {
        let s = self.shift.max(other.shift);
        let a = self
            .num
            .checked_shl(s - self.shift)
            .expect("dyadic overflow");
        let b = other
            .num
            .checked_shl(s - other.shift)
            .expect("dyadic overflow");
        (a, b, s)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, s) = self.aligned(rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), s)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-self.num, self.shift)
    }
}

impl core::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, Add::add)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

/// Exact decimal expansion; every dyadic has a finite one.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num < 0 {
            f.write_str("-")?;
        }
        let mag = self.num.unsigned_abs();
        let int = mag >> self.shift;
        write!(f, "{int}")?;
        let mask = (1u128 << self.shift) - 1;
        let mut frac = mag & mask;
        if frac != 0 {
            f.write_str(".")?;
            while frac != 0 {
                frac *= 10;
                write!(f, "{}", frac >> self.shift)?;
                frac &= mask;
            }
        }
        Ok(())
    }
}
