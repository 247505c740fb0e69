//! Multiplicative characters modulo `2^m`, `m >= 3`.
//!
//! `(Z/2^m)^*` is generated by `-1` and `5`, so a character is fixed by
//! `chi(-1) = s` and `chi(5) = e(c / 2^(m-2))` with `1 <= c <= 2^(m-2)`.

use std::fmt;

use serde::Serialize;

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result, MAX_MODULUS_EXP};
use crate::ring2adic::dlog5;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Character {
    m: u32,
    c: u64,
    s: i8,
}

/// Smallest modulus `2^exponent` the character factors through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conductor {
    pub exponent: u32,
    /// The induced character at the conductor, when the conductor is at least 8.
    pub induced: Option<Character>,
}

pub(crate) fn check_modulus(m: u32) -> Result<()> {
    if m < 3 {
        Err(Error::ModulusTooSmall(m))
    } else if m > MAX_MODULUS_EXP {
        Err(Error::WidthCapExceeded(m))
    } else {
        Ok(())
    }
}

impl Character {
    pub fn new(m: u32, c: u64, s: i64) -> Result<Self> {
        check_modulus(m)?;
        let order = 1u64 << (m - 2);
        if c == 0 || c > order {
            return Err(Error::CharacterParamOutOfRange { m, c });
        }
        let s = match s {
            1 => 1,
            -1 => -1,
            other => return Err(Error::InvalidSign(other)),
        };
        Ok(Self { m, c, s })
    }

    /// Like [`Character::new`] but reduces any `c` into `[1, 2^(m-2)]`.
    pub fn from_exponent(m: u32, c: u64, s: i64) -> Result<Self> {
        check_modulus(m)?;
        let order = 1u64 << (m - 2);
        let c = match c % order {
            0 => order,
            r => r,
        };
        Self::new(m, c, s)
    }

    /// The principal character `chi_0`.
    pub fn principal(m: u32) -> Result<Self> {
        check_modulus(m)?;
        Self::new(m, 1 << (m - 2), 1)
    }

    /// The character induced by the nontrivial character mod 4.
    pub fn chi4(m: u32) -> Result<Self> {
        check_modulus(m)?;
        Self::new(m, 1 << (m - 2), -1)
    }

    pub fn modulus_exp(&self) -> u32 {
        self.m
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    /// `chi(-1)`.
    pub fn sign(&self) -> i8 {
        self.s
    }

    fn order(&self) -> u64 {
        1 << (self.m - 2)
    }

    pub fn is_principal(&self) -> bool {
        self.c == self.order() && self.s == 1
    }

    pub fn is_chi4(&self) -> bool {
        self.c == self.order() && self.s == -1
    }

    pub fn is_primitive(&self) -> bool {
        self.c & 1 == 1
    }

    /// Exponent `j` with `chi(x) = zeta_{2^r}^j`, or `None` for even `x`.
    ///
    /// Requires `r >= m - 2`.
    #[inline]
    pub fn exponent(&self, x: u64, r: u32) -> Option<i64> {
        if x & 1 == 0 {
            return None;
        }
        debug_assert!(r >= self.m - 2);
        let (eps, gamma) = dlog5(x, self.m).expect("odd residue, valid modulus");
        Some(self.exponent_from_log(eps, gamma, r))
    }

    /// Exponent of `chi((-1)^eps 5^gamma)` in `Z[zeta_{2^r}]`.
    #[inline]
    pub fn exponent_from_log(&self, eps: u8, gamma: u64, r: u32) -> i64 {
        let base = (self.c.wrapping_mul(gamma) & (self.order() - 1)) << (r - (self.m - 2));
        let sign = if eps == 1 && self.s == -1 {
            1u64 << (r - 1)
        } else {
            0
        };
        ((base + sign) & ((1u64 << r) - 1)) as i64
    }

    /// `chi(x)` as an element of `Z[zeta_{2^r}]`; zero for even `x`.
    pub fn eval(&self, x: u64, r: u32) -> Result<CycInt> {
        if r < (self.m - 2).max(3) {
            return Err(Error::RingTooSmall(r));
        }
        Ok(match self.exponent(x, r) {
            Some(j) => CycInt::root_of_unity(r, j),
            None => CycInt::zero(r),
        })
    }

    pub fn conductor(&self) -> Conductor {
        if self.c == self.order() {
            return Conductor {
                exponent: if self.s == 1 { 0 } else { 2 },
                induced: None,
            };
        }
        let exponent = self.m - self.c.trailing_zeros();
        Conductor {
            exponent,
            induced: Some(
                self.restrict(exponent)
                    .expect("conductor is at least 3 here"),
            ),
        }
    }

    /// The character modulo `2^target` that this one is induced from.
    pub fn restrict(&self, target: u32) -> Result<Self> {
        check_modulus(target)?;
        let conductor = self.conductor_exponent();
        if target > self.m || conductor > target {
            return Err(Error::NotInducible {
                conductor,
                target,
            });
        }
        let c = self.c >> (self.m - target);
        Self::new(target, c, self.s as i64)
    }

    fn conductor_exponent(&self) -> u32 {
        match (self.c == self.order(), self.s) {
            (true, 1) => 0,
            (true, _) => 2,
            _ => self.m - self.c.trailing_zeros(),
        }
    }

    pub fn conj(&self) -> Self {
        Self::from_exponent(self.m, self.order() - self.c, self.s as i64)
            .expect("parameters stay in range")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::CharacterModulusMismatch {
                left: self.m,
                right: other.m,
            });
        }
        Self::from_exponent(self.m, self.c + other.c, (self.s * other.s) as i64)
    }

    pub fn pow(&self, k: u64) -> Self {
        let c = (self.c % self.order()).wrapping_mul(k % self.order());
        let s = if k % 2 == 1 { self.s } else { 1 };
        Self::from_exponent(self.m, c, s as i64).expect("parameters stay in range")
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi(m={}, c={}, s={:+})", self.m, self.c, self.s)
    }
}
