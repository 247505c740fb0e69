//! Arithmetic in `Z/2^w`.
//!
//! Reduction modulo a power of two is a bit mask, so every product here is a
//! wrapping machine multiply followed by a mask. `u64` covers widths up to 64;
//! [`compute_r`] needs `w + i` bits and works in `u128`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[inline]
pub fn mask(w: u32) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}

fn check_width(w: u32) -> Result<()> {
    if (1..=64).contains(&w) {
        Ok(())
    } else {
        Err(Error::InvalidWidth(w))
    }
}

/// A residue modulo `2^w`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue2w {
    value: u64,
    w: u32,
}

impl Residue2w {
    pub fn new(value: u64, w: u32) -> Result<Self> {
        check_width(w)?;
        Ok(Self {
            value: value & mask(w),
            w,
        })
    }

    /// Reduces a signed integer into `[0, 2^w)`.
    pub fn from_signed(value: i64, w: u32) -> Result<Self> {
        Self::new(value as u64, w)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn width(self) -> u32 {
        self.w
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_odd(self) -> bool {
        self.value & 1 == 1
    }

    pub fn pow(self, e: u64) -> Self {
        Self {
            value: pow_mod2w(self.value, e, self.w),
            w: self.w,
        }
    }

    pub fn inv(self) -> Result<Self> {
        Ok(Self {
            value: inv_mod2w(self.value, self.w)?,
            w: self.w,
        })
    }

    /// The same residue viewed at a smaller width.
    pub fn truncate(self, w: u32) -> Self {
        debug_assert!(w >= 1 && w <= self.w);
        Self {
            value: self.value & mask(w),
            w,
        }
    }

    fn same_width(self, other: Self) -> u32 {
        assert_eq!(self.w, other.w, "residue widths differ");
        self.w
    }
}

impl fmt::Debug for Residue2w {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{})", self.value, self.w)
    }
}

impl Add for Residue2w {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let w = self.same_width(rhs);
        Self {
            value: self.value.wrapping_add(rhs.value) & mask(w),
            w,
        }
    }
}

impl Sub for Residue2w {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let w = self.same_width(rhs);
        Self {
            value: self.value.wrapping_sub(rhs.value) & mask(w),
            w,
        }
    }
}

impl Mul for Residue2w {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let w = self.same_width(rhs);
        Self {
            value: self.value.wrapping_mul(rhs.value) & mask(w),
            w,
        }
    }
}

impl Neg for Residue2w {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.value.wrapping_neg() & mask(self.w),
            w: self.w,
        }
    }
}

/// Largest `e` with `2^e | x`.
pub fn v2(x: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::ZeroValuation);
    }
    Ok(x.trailing_zeros())
}

/// Splits `x = 2^e * odd`.
pub fn split_odd(x: u64) -> Result<(u32, u64)> {
    let e = v2(x)?;
    Ok((e, x >> e))
}

/// Inverse of an odd residue modulo `2^w`.
pub fn inv_mod2w(y: u64, w: u32) -> Result<u64> {
    check_width(w)?;
    if y & 1 == 0 {
        return Err(Error::NotOdd(y));
    }
    // y*y = 1 mod 8, so y is its own inverse to 3 bits; each Newton step
    // doubles the number of correct bits.
    let mut z = y;
    for _ in 0..5 {
        z = z.wrapping_mul(2u64.wrapping_sub(y.wrapping_mul(z)));
    }
    Ok(z & mask(w))
}

pub fn pow_mod2w(b: u64, mut e: u64, w: u32) -> u64 {
    let m = mask(w);
    let mut base = b & m;
    let mut acc = 1u64 & m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.wrapping_mul(base) & m;
        }
        base = base.wrapping_mul(base) & m;
        e >>= 1;
    }
    acc
}

/// `R_i mod 2^w`, the odd integer with `5^(2^(i-2)) = 1 + R_i 2^i`.
pub fn compute_r(i: u32, w: u32) -> Result<u64> {
    if i < 2 {
        return Err(Error::InvalidRIndex(i));
    }
    check_width(w)?;
    let bits = w + i;
    if bits > 128 {
        return Err(Error::InvalidWidth(bits));
    }
    let m: u128 = if bits == 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    };
    let mut p: u128 = 5;
    for _ in 0..i - 2 {
        p = p.wrapping_mul(p) & m;
    }
    Ok((((p.wrapping_sub(1)) & m) >> i) as u64 & mask(w))
}

/// Writes an odd `x` as `(-1)^eps * 5^gamma mod 2^m` with `0 <= gamma < 2^(m-2)`.
///
/// Returns `(eps, gamma)`; `eps == 0` exactly when `x = 1 mod 4`.
pub fn dlog5(x: u64, m: u32) -> Result<(u8, u64)> {
    if m < 3 {
        return Err(Error::ModulusTooSmall(m));
    }
    check_width(m)?;
    let mk = mask(m);
    let x = x & mk;
    if x & 1 == 0 {
        return Err(Error::NotOdd(x));
    }
    let (eps, mut z) = if x & 3 == 1 {
        (0u8, x)
    } else {
        (1u8, x.wrapping_neg() & mk)
    };

    // Invariant at step j: z = 1 mod 2^(j+2). Bit j+2 of z decides bit j of
    // gamma, and multiplying by 5^(-2^j) clears it.
    let mut inv5 = inv_mod2w(5, m)?;
    let mut gamma = 0u64;
    for j in 0..m - 2 {
        if (z >> (j + 2)) & 1 == 1 {
            gamma |= 1 << j;
            z = z.wrapping_mul(inv5) & mk;
        }
        inv5 = inv5.wrapping_mul(inv5) & mk;
    }
    debug_assert_eq!(z, 1);
    Ok((eps, gamma))
}

/// Jacobi symbol `(2/h)` for odd `h`.
pub fn jacobi2(h: i64) -> Result<i8> {
    if h & 1 == 0 {
        return Err(Error::NotOdd(h as u64));
    }
    Ok(match h.rem_euclid(8) {
        1 | 7 => 1,
        _ => -1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(v2(8), Ok(3));
        assert_eq!(v2(12), Ok(2));
        assert_eq!(v2(1), Ok(0));
        assert_eq!(v2(0), Err(Error::ZeroValuation));
        assert_eq!(split_odd(40), Ok((3, 5)));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv_mod2w(3, 5), Ok(11));
        assert_eq!(inv_mod2w(1, 10), Ok(1));
        assert_eq!(inv_mod2w(5, 4), Ok(13));
        assert_eq!(inv_mod2w(6, 4), Err(Error::NotOdd(6)));
        assert_eq!(inv_mod2w(3, 0), Err(Error::InvalidWidth(0)));
    }

    #[test]
    fn inverse_exhaustive_small_widths() {
        for w in 1..=12 {
            for y in (1..1u64 << w).step_by(2) {
                let z = inv_mod2w(y, w).unwrap();
                assert_eq!(y * z & mask(w), 1, "y={y} w={w}");
            }
        }
        let z = inv_mod2w(0x1234_5678_9abc_def1, 64).unwrap();
        assert_eq!(z.wrapping_mul(0x1234_5678_9abc_def1), 1);
    }

    #[test]
    fn pow_examples() {
        assert_eq!(pow_mod2w(5, 2, 5), 25);
        assert_eq!(pow_mod2w(5, 0, 8), 1);
        assert_eq!(pow_mod2w(3, 2, 3), 1);
        assert_eq!(pow_mod2w(7, 0, 1), 1);
    }

    #[test]
    fn r_examples() {
        assert_eq!(compute_r(2, 8), Ok(1));
        assert_eq!(compute_r(3, 8), Ok(3));
        assert_eq!(compute_r(4, 4), Ok(7));
        assert_eq!(compute_r(4, 8), Ok(39));
        assert_eq!(compute_r(1, 8), Err(Error::InvalidRIndex(1)));
    }

    #[test]
    fn r_is_odd_and_three_mod_four() {
        for i in 2..=60 {
            assert_eq!(compute_r(i, 40).unwrap() & 1, 1);
            if i >= 3 {
                assert_eq!(compute_r(i, 2).unwrap(), 3, "i={i}");
            }
        }
    }

    #[test]
    fn r_recurrence() {
        let w = 48;
        for i in 2..=62 {
            let ri = compute_r(i, w).unwrap();
            let next = compute_r(i + 1, w).unwrap();
            let shift = i - 1;
            let rhs = if shift >= 64 {
                ri
            } else {
                ri.wrapping_add(ri.wrapping_mul(ri).wrapping_shl(shift))
            } & mask(w);
            assert_eq!(next, rhs, "i={i}");
        }
    }

    #[test]
    fn dlog_examples() {
        assert_eq!(dlog5(25, 5), Ok((0, 2)));
        assert_eq!(dlog5(7, 5), Ok((1, 2)));
        assert_eq!(dlog5(1, 9), Ok((0, 0)));
        assert_eq!(dlog5(4, 5), Err(Error::NotOdd(4)));
        assert_eq!(dlog5(3, 2), Err(Error::ModulusTooSmall(2)));
    }

    #[test]
    fn dlog_round_trip_exhaustive() {
        for m in 3..=16 {
            let mk = mask(m);
            for x in (1..1u64 << m).step_by(2) {
                let (eps, gamma) = dlog5(x, m).unwrap();
                assert!(gamma < 1 << (m - 2));
                assert_eq!(eps == 0, x & 3 == 1);
                let mut y = pow_mod2w(5, gamma, m);
                if eps == 1 {
                    y = y.wrapping_neg() & mk;
                }
                assert_eq!(y, x, "m={m}");
            }
        }
    }

    #[test]
    fn jacobi2_values() {
        assert_eq!(jacobi2(1), Ok(1));
        assert_eq!(jacobi2(3), Ok(-1));
        assert_eq!(jacobi2(5), Ok(-1));
        assert_eq!(jacobi2(7), Ok(1));
        assert_eq!(jacobi2(-1), Ok(1));
        assert!(jacobi2(4).is_err());
        for h in (-101i64..101).step_by(2) {
            assert_eq!(jacobi2(h), jacobi2(h + 8));
            let sq = (h * h - 1) / 8;
            assert_eq!(jacobi2(h).unwrap(), if sq % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn residue_ops() {
        let a = Residue2w::new(3, 5).unwrap();
        assert_eq!(a.inv().unwrap().value(), 11);
        assert_eq!((a * a.inv().unwrap()).value(), 1);
        assert_eq!((-a).value(), 29);
        assert_eq!((a - Residue2w::new(4, 5).unwrap()).value(), 31);
        assert_eq!(Residue2w::from_signed(-1, 4).unwrap().value(), 15);
        assert_eq!(a.pow(2).truncate(3).value(), 1);
    }
}
