//! Exact elements of `Z[zeta]`, `zeta = exp(2 pi i / 2^r)`.
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(2^(r-1) - 1)`
//! with the relation `zeta^(2^(r-1)) = -1`. The representation is unique, so
//! equality of values is equality of coefficient vectors.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::coeffs::Coeffs;
use crate::error::{Error, Result};

/// Ring in which every sum modulo `2^m` is represented: large enough for the
/// character values (order `2^(m-2)`) and for `omega`, `sqrt 2` (order 8).
pub fn ring_exponent_for(m: u32) -> u32 {
    m.saturating_sub(2).max(3)
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycInt {
    #[serde(rename = "ring_exponent")]
    r: u32,
    coeffs: Coeffs,
}

impl CycInt {
    pub fn zero(r: u32) -> Self {
        assert!(r >= 1, "ring exponent must be at least 1");
        Self {
            r,
            coeffs: Coeffs::zeroed(1usize << (r - 1)),
        }
    }

    pub fn from_int(r: u32, n: i64) -> Self {
        let mut z = Self::zero(r);
        z.coeffs[0] = n;
        z
    }

    pub fn one(r: u32) -> Self {
        Self::from_int(r, 1)
    }

    /// `zeta_{2^r}^j`.
    pub fn root_of_unity(r: u32, j: i64) -> Self {
        let mut z = Self::zero(r);
        z.add_root(j, 1);
        z
    }

    /// `coef_0 zeta^j_0 + coef_1 zeta^j_1 + ...`
    pub fn from_terms(r: u32, terms: &[(i64, i64)]) -> Self {
        let mut z = Self::zero(r);
        for &(j, c) in terms {
            z.add_root(j, c);
        }
        z
    }

    /// `zeta_8 - zeta_8^3`, whose square is 2.
    pub fn sqrt2(r: u32) -> Result<Self> {
        if r < 3 {
            return Err(Error::RingTooSmall(r));
        }
        let q = 1i64 << (r - 3);
        Ok(Self::from_terms(r, &[(q, 1), (3 * q, -1)]))
    }

    /// Builds an element from raw power-basis coefficients.
    pub fn from_coeffs(r: u32, coeffs: Vec<i64>) -> Result<Self> {
        if r == 0 || coeffs.len() != 1usize << (r - 1) {
            return Err(Error::Precondition("coefficient count must be 2^(r-1)"));
        }
        Ok(Self {
            r,
            coeffs: coeffs.into(),
        })
    }

    pub fn ring_exponent(&self) -> u32 {
        self.r
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    /// Adds `coef * zeta^j` in place. Constant time.
    #[inline]
    pub fn add_root(&mut self, j: i64, coef: i64) {
        let order = 1i64 << self.r;
        let half = order >> 1;
        let j = j.rem_euclid(order);
        if j >= half {
            self.coeffs[(j - half) as usize] -= coef;
        } else {
            self.coeffs[j as usize] += coef;
        }
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if self.r != other.r {
            return Err(Error::RingMismatch {
                left: self.r,
                right: other.r,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a + b)
            .collect::<Vec<_>>();
        Ok(Self {
            r: self.r,
            coeffs: coeffs.into(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let lhs = self.support();
        let rhs = other.support();
        let mut out = Self::zero(self.r);
        for &(i, a) in &lhs {
            for &(j, b) in &rhs {
                out.add_root(i + j, a * b);
            }
        }
        Ok(out)
    }

    /// Nonzero `(index, coefficient)` pairs.
    fn support(&self) -> Vec<(i64, i64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j as i64, c))
            .collect()
    }

    pub fn scale(&self, factor: i64) -> Self {
        Self {
            r: self.r,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect::<Vec<_>>().into(),
        }
    }

    /// Embeds into `Z[zeta_{2^r_new}]`, sending `zeta_{2^r}` to `zeta_{2^r_new}^(2^(r_new - r))`.
    pub fn lift(&self, r_new: u32) -> Result<Self> {
        if r_new < self.r {
            return Err(Error::InvalidLift {
                from: self.r,
                to: r_new,
            });
        }
        let shift = r_new - self.r;
        let mut out = Self::zero(r_new);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                out.coeffs[j << shift] = c;
            }
        }
        Ok(out)
    }

    /// Complex conjugation, `zeta -> zeta^-1`.
    pub fn conj(&self) -> Self {
        let half = self.coeffs.len();
        let mut out = Self::zero(self.r);
        out.coeffs[0] = self.coeffs[0];
        for j in 1..half {
            out.coeffs[half - j] = -self.coeffs[j];
        }
        out
    }

    /// `a * conj(a)`.
    pub fn norm(&self) -> Self {
        self.checked_mul(&self.conj())
            .expect("conjugate lives in the same ring")
    }

    /// Floating-point value, for display only.
    pub fn approx_complex(&self) -> (f64, f64) {
        let order = (1u64 << self.r) as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let theta = 2.0 * PI * j as f64 / order;
                re += c as f64 * theta.cos();
                im += c as f64 * theta.sin();
            }
        }
        (re, im)
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt(r={}, {})", self.r, self)
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (j, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => write!(f, "z^{j}")?,
                _ => write!(f, "{a}*z^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.scale(-1)
    }
}

impl Neg for CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        -&self
    }
}

// Operators panic on mismatched rings; use the `checked_*` forms when the
// ring exponents are not known to agree.
impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.checked_add(rhs).unwrap()
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.checked_sub(rhs).unwrap()
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.checked_mul(rhs).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zeta8(j: i64) -> CycInt {
        CycInt::root_of_unity(3, j)
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(zeta8(2).coeffs(), &[0, 0, 1, 0]);
        assert_eq!(zeta8(6).coeffs(), &[0, 0, -1, 0]);
        assert_eq!(CycInt::root_of_unity(1, 1).coeffs(), &[-1]);
        assert_eq!(zeta8(-1), zeta8(7));
        assert_eq!(zeta8(8), CycInt::one(3));
    }

    #[test]
    fn ring_basics() {
        assert!((&zeta8(1) + &-zeta8(1)).is_zero());
        assert_eq!(&zeta8(1) * &zeta8(7), CycInt::one(3));
        let s = CycInt::sqrt2(3).unwrap();
        assert_eq!(&s * &s, CycInt::from_int(3, 2));
        assert_eq!(
            zeta8(1).checked_add(&CycInt::one(4)),
            Err(Error::RingMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn sqrt2_embeddings() {
        assert_eq!(CycInt::sqrt2(3).unwrap().coeffs(), &[0, 1, 0, -1]);
        let s4 = CycInt::sqrt2(4).unwrap();
        assert_eq!(s4.coeffs(), &[0, 0, 1, 0, 0, 0, -1, 0]);
        assert_eq!(&s4 * &s4, CycInt::from_int(4, 2));
        assert_eq!(CycInt::sqrt2(2), Err(Error::RingTooSmall(2)));
        for r in 3..=10 {
            let s = CycInt::sqrt2(r).unwrap();
            assert_eq!(s.lift(r + 1).unwrap(), CycInt::sqrt2(r + 1).unwrap());
        }
    }

    #[test]
    fn lifting() {
        let i4 = CycInt::root_of_unity(2, 1);
        assert_eq!(i4.lift(3).unwrap(), zeta8(2));
        assert_eq!(CycInt::from_int(2, 5).lift(7).unwrap(), CycInt::from_int(7, 5));
        let a = CycInt::from_terms(3, &[(1, 2), (3, -5)]);
        assert_eq!(a.lift(4).unwrap().lift(6).unwrap(), a.lift(6).unwrap());
        assert_eq!(
            a.lift(2),
            Err(Error::InvalidLift { from: 3, to: 2 })
        );
    }

    #[test]
    fn conjugation() {
        assert_eq!(zeta8(1).conj(), -zeta8(3));
        assert_eq!(zeta8(1).conj(), zeta8(7));
        assert_eq!(CycInt::from_int(5, 9).conj(), CycInt::from_int(5, 9));
        assert_eq!(&zeta8(3) * &zeta8(3).conj(), CycInt::one(3));
    }

    #[test]
    fn approximation() {
        let (re, im) = CycInt::from_int(3, 2).approx_complex();
        assert_eq!((re, im), (2.0, 0.0));
        let (re, im) = CycInt::root_of_unity(2, 1).approx_complex();
        assert!(re.abs() < 1e-12 && (im - 1.0).abs() < 1e-12);
        let (re, im) = CycInt::sqrt2(3).unwrap().approx_complex();
        assert!((re - std::f64::consts::SQRT_2).abs() < 1e-12 && im.abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(zeta8(5)).unwrap();
        assert_eq!(v, serde_json::json!({"ring_exponent": 3, "coeffs": [0, -1, 0, 0]}));
        let back: CycInt = serde_json::from_value(v).unwrap();
        assert_eq!(back, zeta8(5));
    }

    #[test]
    fn display() {
        assert_eq!(CycInt::from_terms(3, &[(0, 2), (1, -1), (3, 4)]).to_string(), "2 - z^1 + 4*z^3");
        assert_eq!(CycInt::zero(3).to_string(), "0");
    }

    fn arb(r: u32) -> impl Strategy<Value = CycInt> {
        prop::collection::vec(-50i64..50, 1usize << (r - 1))
            .prop_map(move |c| CycInt::from_coeffs(r, c).unwrap())
    }

    proptest! {
        #[test]
        fn distinct_sequences_differ(a in arb(4), b in arb(4)) {
            prop_assume!(a.coeffs() != b.coeffs());
            prop_assert!(!(&a - &b).is_zero());
        }

        #[test]
        fn ring_axioms(a in arb(4), b in arb(4), c in arb(4)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn conj_is_involutive_homomorphism(a in arb(5), b in arb(5)) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        }

        #[test]
        fn norm_is_real_nonnegative(a in arb(5)) {
            let (re, im) = a.norm().approx_complex();
            prop_assert!(im.abs() < 1e-9);
            prop_assert!(re > -1e-9);
        }

        #[test]
        fn lift_is_a_homomorphism(a in arb(3), b in arb(3)) {
            prop_assert_eq!((&a * &b).lift(5).unwrap(), &a.lift(5).unwrap() * &b.lift(5).unwrap());
        }
    }
}
