use crate::error::Result;
use crate::instance::{SumInstance, SumProblem};

use super::CaseTag;

/// Outcome of reducing a problem to the standing hypotheses
/// (`A` even, `B` odd, `chi2` primitive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    /// The sum vanishes identically.
    Zero(CaseTag),
    /// Hypotheses hold; evaluate directly.
    Standard(SumProblem),
    /// Both characters factor through `2^m'`, `3 <= m' < m`. The original sum
    /// is `2^scale_log2` times the sum of `problem` (defined mod `2^m'`).
    Reduced {
        problem: SumProblem,
        scale_log2: u32,
    },
    /// Both characters factor through 4. The sum is `2^scale_log2` times the
    /// sum of `problem` over `x in {1, 3}`.
    Direct {
        problem: SumProblem,
        scale_log2: u32,
    },
}

pub fn normalize(p: &SumProblem) -> Result<Normalized> {
    let inst = p.instance;
    let m = inst.m();
    if inst.a() & 1 == inst.b() & 1 {
        return Ok(Normalized::Zero(CaseTag::ZeroParity));
    }

    // x -> x^-1 turns chi1(x) chi2(A x^k + B) into
    // conj(chi1 chi2^k)(x) chi2(B x^k + A).
    let q = if inst.a() & 1 == 1 {
        let chi1 = p.chi1.mul(&p.chi2.pow(inst.k()))?.conj();
        let swapped = SumInstance::new(m, inst.b(), inst.a(), inst.k())?;
        SumProblem::new(swapped, chi1, p.chi2)?
    } else {
        *p
    };

    if q.chi2.is_primitive() {
        return Ok(Normalized::Standard(q));
    }
    if q.chi1.is_primitive() {
        return Ok(Normalized::Zero(CaseTag::ZeroImprimitive));
    }

    let target = q
        .chi1
        .conductor()
        .exponent
        .max(q.chi2.conductor().exponent);
    if target < 3 {
        return Ok(Normalized::Direct {
            problem: q,
            scale_log2: m - 2,
        });
    }
    let mask = (1u64 << target) - 1;
    let reduced = SumProblem::new(
        SumInstance::new(target, q.instance.a() & mask, q.instance.b() & mask, inst.k())?,
        q.chi1.restrict(target)?,
        q.chi2.restrict(target)?,
    )?;
    Ok(Normalized::Reduced {
        problem: reduced,
        scale_log2: m - target,
    })
}
