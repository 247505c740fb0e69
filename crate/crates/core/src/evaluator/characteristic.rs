//! The characteristic polynomial
//! `C(x) = c1 (A x^k + B) + c2 A k x^k R_N R_{N+n}^-1`
//! and the solver for `C(x) = 0 mod 2^(floor((m+n)/2) + t)` over odd `x`.

use crate::error::{Error, Result};
use crate::instance::SumProblem;
use crate::ring2adic::{compute_r, inv_mod2w, mask, pow_mod2w};

use super::{DerivedParams, Regime};

/// `x -> lead * x^k + constant mod 2^w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacteristicPoly {
    w: u32,
    k: u64,
    lead: u64,
    constant: u64,
}

/// `R_N R_{N+n}^-1 mod 2^w`.
fn r_ratio(big_n: u32, n: u32, w: u32) -> Result<u64> {
    let num = compute_r(big_n, w)?;
    let den = compute_r(big_n + n, w)?;
    Ok(num.wrapping_mul(inv_mod2w(den, w)?) & mask(w))
}

impl CharacteristicPoly {
    /// `C(x) mod 2^w` for the given problem.
    pub fn new(p: &SumProblem, params: &DerivedParams, w: u32) -> Result<Self> {
        let big_n = params
            .big_n
            .ok_or(Error::Precondition("C(x) is undefined in the tiny regime"))?;
        let rho = r_ratio(big_n, params.n, w)?;
        let inst = &p.instance;
        let (a, k) = (inst.a(), inst.k());
        let c1 = p.chi1.c();
        let c2 = p.chi2.c();
        let lead = c1
            .wrapping_mul(a)
            .wrapping_add(c2.wrapping_mul(a).wrapping_mul(k).wrapping_mul(rho));
        Ok(Self {
            w,
            k,
            lead: lead & mask(w),
            constant: c1.wrapping_mul(inst.b()) & mask(w),
        })
    }

    /// `C(x) / 2^(n+t) mod 2^w`, assuming `c1 = 2^(n+t) c3`.
    fn reduced(p: &SumProblem, params: &DerivedParams, c3: u64, w: u32) -> Result<Self> {
        let big_n = params
            .big_n
            .ok_or(Error::Precondition("C(x) is undefined in the tiny regime"))?;
        let rho = r_ratio(big_n, params.n, w)?;
        let inst = &p.instance;
        let lead = c3.wrapping_mul(inst.a()).wrapping_add(
            p.chi2
                .c()
                .wrapping_mul(params.a1)
                .wrapping_mul(params.k1)
                .wrapping_mul(rho),
        );
        Ok(Self {
            w,
            k: inst.k(),
            lead: lead & mask(w),
            constant: c3.wrapping_mul(inst.b()) & mask(w),
        })
    }

    pub fn width(&self) -> u32 {
        self.w
    }

    pub fn eval(&self, x: u64) -> u64 {
        let xk = pow_mod2w(x, self.k, self.w);
        self.lead.wrapping_mul(xk).wrapping_add(self.constant) & mask(self.w)
    }
}

/// `C(x) mod 2^w`.
pub fn c_eval(p: &SumProblem, params: &DerivedParams, x: u64, w: u32) -> Result<u64> {
    if x & 1 == 0 {
        return Err(Error::NotOdd(x));
    }
    Ok(CharacteristicPoly::new(p, params, w)?.eval(x))
}

/// All odd `x < 2^w` with `C(x) = 0 mod 2^w`, `w = floor((m+n)/2) + t`.
///
/// Since `C = 2^(n+t) D` with `D` a polynomial in `x`, the set is every lift
/// of the odd roots of `D` modulo `2^L`, `L = w - n - t`. Only those roots
/// are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSolutionSet {
    w: u32,
    base_width: u32,
    base: Vec<u64>,
}

impl CharSolutionSet {
    pub fn width(&self) -> u32 {
        self.w
    }

    /// Width at which the solutions are determined.
    pub fn base_width(&self) -> u32 {
        self.base_width
    }

    /// Sorted roots modulo `2^base_width`.
    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn len(&self) -> u64 {
        (self.base.len() as u64) << (self.w - self.base_width)
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn smallest(&self) -> Option<u64> {
        self.base.first().copied()
    }

    pub fn contains(&self, x: u64) -> bool {
        x < 1u64 << self.w && self.base.binary_search(&(x & mask(self.base_width))).is_ok()
    }

    /// Solutions in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let lifts = 1u64 << (self.w - self.base_width);
        (0..lifts).flat_map(move |i| self.base.iter().map(move |&s| s + (i << self.base_width)))
    }
}

/// Solves the characteristic congruence by lifting odd roots one bit at a time.
///
/// Requires the large regime and `c1 = 2^(n+t) c3` with `c3` odd.
pub fn solve_characteristic(p: &SumProblem, params: &DerivedParams) -> Result<CharSolutionSet> {
    if params.regime != Regime::Large {
        return Err(Error::Precondition("solver applies to the large regime only"));
    }
    let c3 = match params.c3(p.chi1.c()) {
        Some(c3) if c3 & 1 == 1 => c3,
        _ => return Err(Error::Precondition("c1 must be 2^(n+t) times an odd number")),
    };
    let w = params.m_exp;
    let base_width = w - params.n - params.t;
    let poly = CharacteristicPoly::reduced(p, params, c3, base_width)?;

    let cap_exp = (params.n + 2 * params.t + 6).min(40);
    let mut frontier: Vec<u64> = if poly.eval(1) & 1 == 0 { vec![1] } else { vec![] };
    for j in 1..base_width {
        let bit = 1u64 << j;
        let modulus = mask(j + 1);
        frontier = frontier
            .iter()
            .flat_map(|&x| [x, x + bit])
            .filter(|&x| poly.eval(x) & modulus == 0)
            .collect();
        if frontier.len() as u64 > 1u64 << cap_exp {
            return Err(Error::Internal(format!(
                "solution frontier of {} exceeds 2^{cap_exp} at bit {j}",
                frontier.len()
            )));
        }
    }
    frontier.sort_unstable();
    Ok(CharSolutionSet {
        w,
        base_width,
        base: frontier,
    })
}
