//! Per-regime closed forms. All functions expect a normalized problem:
//! `A` even, `B` odd, `chi2` primitive.

use crate::cyclotomic::{ring_exponent_for, CycInt};
use crate::error::{Error, Result};
use crate::instance::SumProblem;
use crate::ring2adic::jacobi2;

use super::characteristic::{solve_characteristic, CharacteristicPoly};
use super::{CaseTag, ClosedForm, DerivedParams, Regime};

fn check_normalized(p: &SumProblem) -> Result<()> {
    let inst = &p.instance;
    if inst.a() & 1 == 1 || inst.b() & 1 == 0 || !p.chi2.is_primitive() {
        return Err(Error::Precondition(
            "regime evaluators need A even, B odd and chi2 primitive",
        ));
    }
    Ok(())
}

/// Exponent of `chi2(A x^k + B)` in `Z[zeta_{2^r}]`.
fn chi2_exponent(p: &SumProblem, x: u64, r: u32) -> i64 {
    let y = p.instance.poly(x);
    p.chi2.exponent(y, r).expect("A x^k + B is odd")
}

/// The necessary conditions shared by every regime with `m - n >= t + 2`:
/// `c1 = 2^(n+t) c3` with `c3` odd, and `chi1(-1) = 1` when `k` is even.
/// Returns `c3` when they hold.
fn nonvanishing_c3(p: &SumProblem, params: &DerivedParams) -> Option<u64> {
    let c3 = params.c3(p.chi1.c()).filter(|c3| c3 & 1 == 1)?;
    if params.t > 0 && p.chi1.sign() == -1 {
        return None;
    }
    Some(c3)
}

/// `m - n < t + 2`: the summand is `chi1(x) chi2(A + B)` for odd `x`.
pub fn evaluate_tiny(p: &SumProblem, params: &DerivedParams) -> Result<ClosedForm> {
    check_normalized(p)?;
    if params.regime != Regime::Tiny {
        return Err(Error::Precondition("not in the tiny regime"));
    }
    let m = p.m();
    if !p.chi1.is_principal() {
        return Ok(ClosedForm::zero(CaseTag::ZeroCondition, m));
    }
    let r = ring_exponent_for(m);
    let value = CycInt::from_terms(r, &[(chi2_exponent(p, 1, r), 1i64 << (m - 1))]);
    Ok(ClosedForm::plain(CaseTag::Tiny, value, Some(2 * (m - 1))))
}

/// `t + 2 <= m - n <= 2t + 4`.
pub fn evaluate_small(p: &SumProblem, params: &DerivedParams) -> Result<ClosedForm> {
    check_normalized(p)?;
    let m = p.m();
    let case = match params.regime {
        Regime::EdgeT2 => CaseTag::EdgeT2,
        Regime::EdgeT3 => CaseTag::EdgeT3,
        Regime::MidRange => CaseTag::MidRange,
        _ => return Err(Error::Precondition("not in the small regimes")),
    };
    if nonvanishing_c3(p, params).is_none() {
        return Ok(ClosedForm::zero(CaseTag::ZeroCondition, m));
    }

    let r = ring_exponent_for(m);
    let k_even = params.t > 0;
    let s1 = p.chi1.sign();
    let half_turn = 1i64 << (r - 1);
    let at_plus = chi2_exponent(p, 1, r);
    // chi2(-A + B); x = -1 gives A(-1)^k + B, which is -A + B for odd k.
    let at_minus = || chi2_exponent(p, p.instance.modulus_mask(), r);
    let with_sign = |j: i64| if s1 == -1 { j + half_turn } else { j };

    let single = |j: i64, e: u32| {
        ClosedForm::plain(case, CycInt::from_terms(r, &[(j, 1i64 << e)]), Some(2 * e))
    };

    match params.regime {
        Regime::EdgeT2 => {
            let hit = if k_even {
                p.chi1.is_principal()
            } else {
                p.chi1.is_chi4()
            };
            Ok(if hit {
                single(at_plus, m - 1)
            } else {
                ClosedForm::zero(CaseTag::ZeroCondition, m)
            })
        }
        Regime::EdgeT3 => {
            // The shared conditions force c1 = 2^(m-3), i.e. chi1(5) = -1.
            if k_even {
                Ok(single(at_plus, m - 1))
            } else {
                // chi2(-A + B) / chi2(A + B) = +-i, so |S| = 2^(m-2) sqrt 2.
                let coef = 1i64 << (m - 2);
                let value = CycInt::from_terms(r, &[(at_plus, coef), (with_sign(at_minus()), coef)]);
                Ok(ClosedForm::plain(case, value, Some(2 * m - 3)))
            }
        }
        _ => {
            let poly = CharacteristicPoly::new(p, params, m - 2)?;
            let at_one = poly.eval(1) == 0;
            let at_minus_one = !k_even && poly.eval(p.instance.modulus_mask()) == 0;
            if at_one && at_minus_one {
                return Err(Error::Internal(format!(
                    "C(1) and C(-1) both vanish mod 2^{} for {p:?}",
                    m - 2
                )));
            }
            Ok(match (at_one, at_minus_one, k_even) {
                (true, _, true) => single(at_plus, m - 1),
                (true, _, false) => single(at_plus, m - 2),
                (false, true, _) => single(with_sign(at_minus()), m - 2),
                _ => ClosedForm::zero(CaseTag::ZeroCondition, m),
            })
        }
    }
}

/// `m - n > 2t + 4`.
pub fn evaluate_large(p: &SumProblem, params: &DerivedParams) -> Result<ClosedForm> {
    check_normalized(p)?;
    if params.regime != Regime::Large {
        return Err(Error::Precondition("not in the large regime"));
    }
    let m = p.m();
    if nonvanishing_c3(p, params).is_none() {
        return Ok(ClosedForm::zero(CaseTag::ZeroCondition, m));
    }
    let solutions = solve_characteristic(p, params)?;
    match solutions.smallest() {
        Some(x0) => evaluate_large_at(p, params, x0),
        None => Ok(ClosedForm::zero(CaseTag::ZeroCondition, m)),
    }
}

/// Large-regime value read off a specific solution `x0` of the
/// characteristic congruence.
pub fn evaluate_large_at(p: &SumProblem, params: &DerivedParams, x0: u64) -> Result<ClosedForm> {
    check_normalized(p)?;
    if params.regime != Regime::Large {
        return Err(Error::Precondition("not in the large regime"));
    }
    let c3 = nonvanishing_c3(p, params)
        .ok_or(Error::Precondition("the sum vanishes; no representative applies"))?;
    let w = params.m_exp;
    // C(x0) mod 2^(w+1) = lambda 2^w; only the parity of lambda is used.
    let c_x0 = CharacteristicPoly::new(p, params, w + 1)?.eval(x0);
    if x0 & 1 == 0 || x0 >> w != 0 || c_x0 & ((1u64 << w) - 1) != 0 {
        return Err(Error::Precondition("x0 is not an odd solution of C(x) = 0"));
    }

    let m = p.m();
    let r = ring_exponent_for(m);
    let j = p.chi1.exponent(x0, r).expect("x0 is odd") + chi2_exponent(p, x0, r);
    let e = w + params.t.min(1);
    let coef = 1i64 << e;

    if params.gap() % 2 == 0 {
        return Ok(ClosedForm {
            x0: Some(x0),
            ..ClosedForm::plain(
                CaseTag::LargeEven,
                CycInt::from_terms(r, &[(j, coef)]),
                Some(2 * e),
            )
        });
    }

    let lambda = ((c_x0 >> w) & 1) as u8;
    let h = (2 * lambda as u64)
        .wrapping_add(params.k1.wrapping_sub(1))
        .wrapping_add(((1u64 << params.n) - 1).wrapping_mul(c3))
        & 7;
    if h & 1 == 0 {
        return Err(Error::Internal(format!("h = {h} is even for {p:?}")));
    }
    // 1 + i^h = sqrt2 omega^h (2/h), and sqrt2 omega^h = zeta_8^(h+1) - zeta_8^(h+3).
    let sign = jacobi2(h as i64)? as i64;
    let eighth = 1i64 << (r - 3);
    let h = h as i64;
    let value = CycInt::from_terms(
        r,
        &[
            (j + (h + 1) * eighth, sign * coef),
            (j + (h + 3) * eighth, -sign * coef),
        ],
    );
    Ok(ClosedForm {
        x0: Some(x0),
        lambda_parity: Some(lambda),
        h: Some(h as u8),
        ..ClosedForm::plain(CaseTag::LargeOdd, value, Some(2 * e + 1))
    })
}
