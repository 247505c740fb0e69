use std::fmt;

use serde::Serialize;

use crate::characters::{check_modulus, Character};
use crate::error::{Error, Result};
use crate::ring2adic::mask;

/// Parameters `(m, A, B, k)` of `sum_{x mod 2^m} chi1(x) chi2(A x^k + B)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SumInstance {
    m: u32,
    a: u64,
    b: u64,
    k: u64,
}

impl SumInstance {
    /// `A` and `B` are reduced modulo `2^m`.
    pub fn new(m: u32, a: u64, b: u64, k: u64) -> Result<Self> {
        check_modulus(m)?;
        if k == 0 {
            return Err(Error::ZeroPower);
        }
        Ok(Self {
            m,
            a: a & mask(m),
            b: b & mask(m),
            k,
        })
    }

    pub fn from_signed(m: u32, a: i64, b: i64, k: u64) -> Result<Self> {
        Self::new(m, a as u64, b as u64, k)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn modulus_mask(&self) -> u64 {
        mask(self.m)
    }

    /// `A x^k + B mod 2^m`.
    pub fn poly(&self, x: u64) -> u64 {
        let mk = mask(self.m);
        let xk = crate::ring2adic::pow_mod2w(x, self.k, self.m);
        self.a.wrapping_mul(xk).wrapping_add(self.b) & mk
    }

    /// The same instance with `A` replaced by `-A`.
    pub fn negate_a(&self) -> Self {
        Self {
            a: self.a.wrapping_neg() & mask(self.m),
            ..*self
        }
    }
}

impl fmt::Debug for SumInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(m={}, A={}, B={}, k={})",
            self.m, self.a, self.b, self.k
        )
    }
}

/// An instance together with its two characters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SumProblem {
    pub instance: SumInstance,
    pub chi1: Character,
    pub chi2: Character,
}

impl SumProblem {
    pub fn new(instance: SumInstance, chi1: Character, chi2: Character) -> Result<Self> {
        for chi in [&chi1, &chi2] {
            if chi.modulus_exp() != instance.m() {
                return Err(Error::CharacterModulusMismatch {
                    left: instance.m(),
                    right: chi.modulus_exp(),
                });
            }
        }
        Ok(Self {
            instance,
            chi1,
            chi2,
        })
    }

    /// Builds a problem from the flat `(m, A, B, k, c1, s1, c2, s2)` tuple.
    #[allow(clippy::too_many_arguments)]
    pub fn from_params(
        m: u32,
        a: i64,
        b: i64,
        k: u64,
        c1: u64,
        s1: i64,
        c2: u64,
        s2: i64,
    ) -> Result<Self> {
        Self::new(
            SumInstance::from_signed(m, a, b, k)?,
            Character::new(m, c1, s1)?,
            Character::new(m, c2, s2)?,
        )
    }

    pub fn m(&self) -> u32 {
        self.instance.m()
    }

    pub fn params(&self) -> ProblemParams {
        ProblemParams {
            m: self.instance.m(),
            a: self.instance.a(),
            b: self.instance.b(),
            k: self.instance.k(),
            c1: self.chi1.c(),
            s1: self.chi1.sign(),
            c2: self.chi2.c(),
            s2: self.chi2.sign(),
        }
    }
}

impl fmt::Debug for SumProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params();
        write!(
            f,
            "(m={}, A={}, B={}, k={}, c1={}, s1={}, c2={}, s2={})",
            p.m, p.a, p.b, p.k, p.c1, p.s1, p.c2, p.s2
        )
    }
}

impl Serialize for SumProblem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.params().serialize(serializer)
    }
}

/// Flat parameter tuple as it appears in JSON and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ProblemParams {
    pub m: u32,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "B")]
    pub b: u64,
    pub k: u64,
    pub c1: u64,
    pub s1: i8,
    pub c2: u64,
    pub s2: i8,
}
