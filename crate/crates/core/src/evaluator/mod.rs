//! Closed-form evaluation of `S = sum_{x mod 2^m} chi1(x) chi2(A x^k + B)`.
//!
//! Evaluation runs in three stages:
//!
//! 1. [`normalize`] disposes of the degenerate inputs: same-parity `A, B`
//!    (the sum vanishes), odd `A` with even `B` (substitute `x -> x^-1`),
//!    and imprimitive `chi2` (either the sum vanishes or the modulus is
//!    reduced to the larger conductor).
//! 2. [`derive`] splits `A = 2^n A1`, `k = 2^t k1` and classifies the instance
//!    by `m - n` relative to `t`.
//! 3. The regime evaluators produce an exact value in `Z[zeta_{2^r}]`,
//!    `r = max(m - 2, 3)`. The large regime solves the characteristic
//!    congruence `C(x0) = 0 mod 2^(floor((m+n)/2) + t)` and reads the answer
//!    off one solution `x0`.
//!
//! Every path costs `O(poly(m))` word operations, independent of `2^m`.

mod characteristic;
mod normalize;
mod regimes;

use std::fmt;

use serde::Serialize;

pub use characteristic::{c_eval, solve_characteristic, CharSolutionSet, CharacteristicPoly};
pub use normalize::{normalize, Normalized};
pub use regimes::{evaluate_large, evaluate_large_at, evaluate_small, evaluate_tiny};

use crate::cyclotomic::{ring_exponent_for, CycInt};
use crate::error::{Error, Result};
use crate::instance::{SumInstance, SumProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseTag {
    ZeroParity,
    ZeroImprimitive,
    ZeroCondition,
    LargeEven,
    LargeOdd,
    MidRange,
    EdgeT3,
    EdgeT2,
    Tiny,
    Reduced,
}

impl CaseTag {
    pub const ALL: [CaseTag; 10] = [
        CaseTag::ZeroParity,
        CaseTag::ZeroImprimitive,
        CaseTag::ZeroCondition,
        CaseTag::LargeEven,
        CaseTag::LargeOdd,
        CaseTag::MidRange,
        CaseTag::EdgeT3,
        CaseTag::EdgeT2,
        CaseTag::Tiny,
        CaseTag::Reduced,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::ZeroParity => "ZeroParity",
            CaseTag::ZeroImprimitive => "ZeroImprimitive",
            CaseTag::ZeroCondition => "ZeroCondition",
            CaseTag::LargeEven => "LargeEven",
            CaseTag::LargeOdd => "LargeOdd",
            CaseTag::MidRange => "MidRange",
            CaseTag::EdgeT3 => "EdgeT3",
            CaseTag::EdgeT2 => "EdgeT2",
            CaseTag::Tiny => "Tiny",
            CaseTag::Reduced => "Reduced",
        }
    }

    pub fn is_zero_case(self) -> bool {
        matches!(
            self,
            CaseTag::ZeroParity | CaseTag::ZeroImprimitive | CaseTag::ZeroCondition
        )
    }

    pub fn is_large(self) -> bool {
        matches!(self, CaseTag::LargeEven | CaseTag::LargeOdd)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Position of `m - n` relative to `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `m - n < t + 2`, including `A = 0 mod 2^m`.
    Tiny,
    /// `m - n = t + 2`.
    EdgeT2,
    /// `m - n = t + 3`.
    EdgeT3,
    /// `t + 3 < m - n <= 2t + 4`.
    MidRange,
    /// `m - n > 2t + 4`.
    Large,
}

/// Quantities derived from `(m, A, k)` for even `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedParams {
    pub m: u32,
    /// `v2(A)`; equal to `m` when `A = 0 mod 2^m`.
    pub n: u32,
    /// Odd part of `A`.
    pub a1: u64,
    pub t: u32,
    pub k1: u64,
    /// Index `N` of the `R_N R_{N+n}^-1` factor in `C(x)`; `None` in the tiny regime.
    pub big_n: Option<u32>,
    /// `floor((m + n) / 2) + t`, the modulus exponent of the characteristic congruence.
    pub m_exp: u32,
    pub regime: Regime,
}

impl DerivedParams {
    /// `m - n`.
    pub fn gap(&self) -> u32 {
        self.m - self.n
    }

    /// `c1 / 2^(n+t)` when this is an integer.
    pub fn c3(&self, c1: u64) -> Option<u64> {
        let shift = self.n + self.t;
        if shift >= 64 || c1 & ((1u64 << shift) - 1) != 0 {
            None
        } else {
            Some(c1 >> shift)
        }
    }
}

/// Derives `n, A1, t, k1, N` and the regime. Requires `A` even and `B` odd.
pub fn derive(inst: &SumInstance) -> Result<DerivedParams> {
    if inst.a() & 1 == 1 || inst.b() & 1 == 0 {
        return Err(Error::Precondition("derive needs A even and B odd"));
    }
    let m = inst.m();
    let (n, a1) = if inst.a() == 0 {
        (m, 1)
    } else {
        let n = inst.a().trailing_zeros();
        (n, inst.a() >> n)
    };
    let t = inst.k().trailing_zeros();
    let k1 = inst.k() >> t;
    let gap = m - n;
    let regime = if gap < t + 2 {
        Regime::Tiny
    } else if gap == t + 2 {
        Regime::EdgeT2
    } else if gap == t + 3 {
        Regime::EdgeT3
    } else if gap <= 2 * t + 4 {
        Regime::MidRange
    } else {
        Regime::Large
    };
    let big_n = match regime {
        Regime::Tiny => None,
        Regime::Large => Some(gap.div_ceil(2)),
        _ => Some(t + 2),
    };
    Ok(DerivedParams {
        m,
        n,
        a1,
        t,
        k1,
        big_n,
        m_exp: (m + n) / 2 + t,
        regime,
    })
}

/// Structured closed-form result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForm {
    /// A `Zero*` tag exactly when the value is zero.
    pub case: CaseTag,
    /// Exact value in `Z[zeta_{2^r}]`, `r = max(m - 2, 3)`.
    pub value: CycInt,
    /// `|S| = 2^(magnitude_halves / 2)`; `None` when the value is zero.
    pub magnitude_halves: Option<u32>,
    pub x0: Option<u64>,
    pub lambda_parity: Option<u8>,
    /// `h mod 8`.
    pub h: Option<u8>,
    /// Multiplicity factor from modulus reduction, as a power of two.
    pub scale_log2: u32,
}

impl ClosedForm {
    pub(crate) fn zero(case: CaseTag, m: u32) -> Self {
        Self::plain(case, CycInt::zero(ring_exponent_for(m)), None)
    }

    pub(crate) fn plain(case: CaseTag, value: CycInt, magnitude_halves: Option<u32>) -> Self {
        Self {
            case,
            value,
            magnitude_halves,
            x0: None,
            lambda_parity: None,
            h: None,
            scale_log2: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude_halves.is_none()
    }
}

#[derive(Serialize)]
struct Approx {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ClosedFormJson<'a> {
    case: CaseTag,
    magnitude_halves: Option<u32>,
    x0: Option<u64>,
    lambda_parity: Option<u8>,
    h: Option<u8>,
    scale_log2: u32,
    value: &'a CycInt,
    approx: Approx,
}

impl Serialize for ClosedForm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = self.value.approx_complex();
        ClosedFormJson {
            case: self.case,
            magnitude_halves: self.magnitude_halves,
            x0: self.x0,
            lambda_parity: self.lambda_parity,
            h: self.h,
            scale_log2: self.scale_log2,
            value: &self.value,
            approx: Approx { re, im },
        }
        .serialize(serializer)
    }
}

/// Closed-form value of the sum for any well-formed problem.
pub fn evaluate(p: &SumProblem) -> Result<ClosedForm> {
    let m = p.m();
    match normalize(p)? {
        Normalized::Zero(case) => Ok(ClosedForm::zero(case, m)),
        Normalized::Standard(q) => {
            let params = derive(&q.instance)?;
            match params.regime {
                Regime::Tiny => evaluate_tiny(&q, &params),
                Regime::Large => evaluate_large(&q, &params),
                _ => evaluate_small(&q, &params),
            }
        }
        Normalized::Reduced { problem, scale_log2 } => {
            let inner = evaluate(&problem)?;
            if inner.is_zero() {
                return Ok(ClosedForm::zero(inner.case, m));
            }
            let value = inner
                .value
                .scale(1i64 << scale_log2)
                .lift(ring_exponent_for(m))?;
            Ok(ClosedForm {
                case: CaseTag::Reduced,
                value,
                magnitude_halves: inner.magnitude_halves.map(|h| h + 2 * scale_log2),
                scale_log2: inner.scale_log2 + scale_log2,
                ..inner
            })
        }
        Normalized::Direct { problem, scale_log2 } => {
            // Both characters factor through 4, and so does the summand.
            let r = ring_exponent_for(m);
            let mut value = CycInt::zero(r);
            for x in [1u64, 3] {
                let y = problem.instance.poly(x);
                if let (Some(e1), Some(e2)) =
                    (problem.chi1.exponent(x, r), problem.chi2.exponent(y, r))
                {
                    value.add_root(e1 + e2, 1i64 << scale_log2);
                }
            }
            if value.is_zero() {
                return Ok(ClosedForm::zero(CaseTag::ZeroCondition, m));
            }
            let magnitude_halves = power_of_two_norm(&value);
            Ok(ClosedForm {
                scale_log2,
                ..ClosedForm::plain(CaseTag::Reduced, value, magnitude_halves)
            })
        }
    }
}

/// `Some(e)` when `value * conj(value) = 2^e`.
fn power_of_two_norm(value: &CycInt) -> Option<u32> {
    let n = value.norm().as_integer()?;
    (n > 0 && n.count_ones() == 1).then(|| n.trailing_zeros())
}
