//! Instance generation and parallel verification of the closed form against
//! the oracle.
//!
//! Every instance is evaluated independently and sampled instances draw from
//! their own ChaCha stream (`seed`, index), so reports do not depend on the
//! number of worker threads.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{check_modulus, Character};
use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::evaluator::{evaluate, CaseTag, ClosedForm};
use crate::instance::{ProblemParams, SumInstance, SumProblem};
use crate::oracle::brute_force;

pub const DEFAULT_KS: [u64; 7] = [1, 2, 3, 4, 6, 8, 12];

/// Full grid: every character pair, every `A`, every (or every odd) `B`, and
/// the listed `k`, for each `m` in range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub m_min: u32,
    pub m_max: u32,
    pub ks: Vec<u64>,
    pub odd_b_only: bool,
}

impl Grid {
    pub fn new(m_min: u32, m_max: u32, ks: Vec<u64>, odd_b_only: bool) -> Result<Self> {
        check_modulus(m_min)?;
        check_modulus(m_max)?;
        if m_min > m_max {
            return Err(Error::Precondition("m-min exceeds m-max"));
        }
        if ks.is_empty() || ks.contains(&0) {
            return Err(Error::ZeroPower);
        }
        Ok(Self {
            m_min,
            m_max,
            ks,
            odd_b_only,
        })
    }

    fn per_m(&self, m: u32) -> u64 {
        let chars = 1u64 << (m - 1);
        let bs = if self.odd_b_only { 1u64 << (m - 1) } else { 1u64 << m };
        chars * chars * (1u64 << m) * bs * self.ks.len() as u64
    }

    pub fn len(&self) -> u64 {
        (self.m_min..=self.m_max).map(|m| self.per_m(m)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th instance in (m, c1, s1, c2, s2, A, B, k) lexicographic order.
    pub fn get(&self, mut i: u64) -> Option<SumProblem> {
        for m in self.m_min..=self.m_max {
            let size = self.per_m(m);
            if i >= size {
                i -= size;
                continue;
            }
            let nk = self.ks.len() as u64;
            let k = self.ks[(i % nk) as usize];
            i /= nk;
            let nb = if self.odd_b_only { 1u64 << (m - 1) } else { 1u64 << m };
            let b = if self.odd_b_only { 2 * (i % nb) + 1 } else { i % nb };
            i /= nb;
            let a = i % (1u64 << m);
            i >>= m;
            let q = 1u64 << (m - 2);
            let (s2, c2) = (i % 2, i / 2 % q + 1);
            i /= 2 * q;
            let (s1, c1) = (i % 2, i / 2 % q + 1);
            let sign = |s: u64| if s == 0 { 1 } else { -1 };
            let inst = SumInstance::new(m, a, b, k).ok()?;
            let chi1 = Character::new(m, c1, sign(s1)).ok()?;
            let chi2 = Character::new(m, c2, sign(s2)).ok()?;
            return SumProblem::new(inst, chi1, chi2).ok();
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = SumProblem> + '_ {
        (0..self.len()).map_while(|i| self.get(i))
    }
}

/// Seeded instance generator over `m in [m_min, m_max]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sampler {
    pub m_min: u32,
    pub m_max: u32,
    pub seed: u64,
}

const MAX_ATTEMPTS: usize = 512;

impl Sampler {
    pub fn new(m_min: u32, m_max: u32, seed: u64) -> Result<Self> {
        check_modulus(m_min)?;
        check_modulus(m_max)?;
        if m_min > m_max {
            return Err(Error::Precondition("m-min exceeds m-max"));
        }
        Ok(Self { m_min, m_max, seed })
    }

    fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Instance `index`: even indices are uniform, odd indices cycle through
    /// the case tags with a sampler biased towards that tag.
    pub fn get(&self, index: u64) -> SumProblem {
        if index % 2 == 0 {
            self.uniform(index)
        } else {
            let tag = CaseTag::ALL[(index / 2 % CaseTag::ALL.len() as u64) as usize];
            self.targeted(index, tag)
        }
    }

    /// Parameters drawn uniformly.
    pub fn uniform(&self, index: u64) -> SumProblem {
        let mut rng = self.rng(index);
        let m = rng.gen_range(self.m_min..=self.m_max);
        let modulus = 1u64 << m;
        let k = rng.gen_range(1..=16);
        build(
            m,
            rng.gen_range(0..modulus),
            rng.gen_range(0..modulus),
            k,
            random_char(&mut rng, m),
            random_char(&mut rng, m),
        )
    }

    /// An instance whose closed form carries `tag`, found by rejection from a
    /// distribution concentrated on that case. Falls back to the last
    /// candidate when the tag is unreachable in range.
    pub fn targeted(&self, index: u64, tag: CaseTag) -> SumProblem {
        let mut rng = self.rng(index);
        let mut last = None;
        for _ in 0..MAX_ATTEMPTS {
            let m = rng.gen_range(self.m_min..=self.m_max);
            let Some(p) = biased(&mut rng, m, tag) else {
                continue;
            };
            if evaluate(&p).is_ok_and(|cf| cf.case == tag) {
                return p;
            }
            last = Some(p);
        }
        last.unwrap_or_else(|| self.uniform(index))
    }
}

fn build(m: u32, a: u64, b: u64, k: u64, (c1, s1): (u64, i64), (c2, s2): (u64, i64)) -> SumProblem {
    let inst = SumInstance::new(m, a, b, k).expect("k >= 1 and m in range");
    SumProblem::new(
        inst,
        Character::new(m, c1, s1).expect("c in range"),
        Character::new(m, c2, s2).expect("c in range"),
    )
    .expect("same modulus")
}

fn random_sign(rng: &mut ChaCha8Rng) -> i64 {
    if rng.gen::<bool>() {
        1
    } else {
        -1
    }
}

fn random_char(rng: &mut ChaCha8Rng, m: u32) -> (u64, i64) {
    (rng.gen_range(1..=1u64 << (m - 2)), random_sign(rng))
}

// Odd c for a primitive character, even for an imprimitive one.
fn char_with_parity(rng: &mut ChaCha8Rng, m: u32, odd: bool) -> (u64, i64) {
    let half = 1u64 << (m - 3);
    let c = 2 * rng.gen_range(0..half) + if odd { 1 } else { 2 };
    (c, random_sign(rng))
}

// (A, B) of opposite parity, in either order.
fn opposite_parity(rng: &mut ChaCha8Rng, m: u32) -> (u64, u64) {
    let modulus = 1u64 << m;
    let even = rng.gen_range(0..modulus) & !1;
    let odd = rng.gen_range(0..modulus) | 1;
    if rng.gen_ratio(3, 4) {
        (even, odd)
    } else {
        (odd, even)
    }
}

// One candidate concentrated on `tag`; None when the shape does not fit m.
fn biased(rng: &mut ChaCha8Rng, m: u32, tag: CaseTag) -> Option<SumProblem> {
    let modulus = 1u64 << m;
    let k_any = rng.gen_range(1..=16);
    match tag {
        CaseTag::ZeroParity => {
            let a = rng.gen_range(0..modulus);
            let b = (rng.gen_range(0..modulus) & !1) | (a & 1);
            Some(build(m, a, b, k_any, random_char(rng, m), random_char(rng, m)))
        }
        CaseTag::ZeroImprimitive => {
            let (a, b) = opposite_parity(rng, m);
            let chi1 = char_with_parity(rng, m, true);
            let chi2 = char_with_parity(rng, m, false);
            Some(build(m, a, b, k_any, chi1, chi2))
        }
        CaseTag::Reduced => {
            let (a, b) = opposite_parity(rng, m);
            let chi1 = char_with_parity(rng, m, false);
            let chi2 = char_with_parity(rng, m, false);
            Some(build(m, a, b, k_any, chi1, chi2))
        }
        _ => structured(rng, m, tag),
    }
}

// A even of prescribed valuation, B odd, chi2 primitive, and chi1 meeting the
// nonvanishing conditions unless the target is ZeroCondition.
fn structured(rng: &mut ChaCha8Rng, m: u32, tag: CaseTag) -> Option<SumProblem> {
    let modulus = 1u64 << m;
    let t = rng.gen_range(0..=3u32);
    // Gaps d = m - n with 1 <= n <= m - 1.
    let gaps: Vec<u32> = (1..m)
        .filter(|&d| match tag {
            CaseTag::LargeEven => d > 2 * t + 4 && d % 2 == 0,
            CaseTag::LargeOdd => d > 2 * t + 4 && d % 2 == 1,
            CaseTag::MidRange => d > t + 3 && d <= 2 * t + 4,
            CaseTag::EdgeT3 => d == t + 3,
            CaseTag::EdgeT2 => d == t + 2,
            CaseTag::Tiny => d < t + 2,
            _ => d >= t + 2,
        })
        .collect();
    let tiny_zero_a = tag == CaseTag::Tiny && rng.gen_ratio(1, 4);
    if gaps.is_empty() && !tiny_zero_a {
        return None;
    }
    let k1 = 2 * rng.gen_range(0..8u64) + 1;
    let k = k1 << t;
    let a = if tiny_zero_a {
        0
    } else {
        let n = m - gaps[rng.gen_range(0..gaps.len())];
        ((2 * rng.gen_range(0..modulus) + 1) << n) & (modulus - 1)
    };
    let b = rng.gen_range(0..modulus) | 1;
    let chi2 = char_with_parity(rng, m, true);
    let chi1 = if tag == CaseTag::ZeroCondition || tag == CaseTag::Tiny {
        let (c1, s1) = random_char(rng, m);
        // Break the sign condition often enough to matter.
        let s1 = if k % 2 == 0 && rng.gen_ratio(1, 2) { -1 } else { s1 };
        (c1, s1)
    } else {
        let n = if a == 0 { m } else { a.trailing_zeros() };
        let q = 1u64 << (m - 2);
        let c1 = (2 * rng.gen_range(0..q) + 1)
            .checked_shl(n + t)
            .map_or(0, |c| c & (q - 1));
        let c1 = if c1 == 0 { q } else { c1 };
        let s1 = if k % 2 == 0 { 1 } else { random_sign(rng) };
        (c1, s1)
    };
    Some(build(m, a, b, k, chi1, chi2))
}

/// Closed form versus oracle for one instance.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub params: ProblemParams,
    pub closed: Result<ClosedForm>,
    pub oracle: CycInt,
    pub closed_time: Duration,
    pub oracle_time: Duration,
}

impl Outcome {
    pub fn run(p: &SumProblem) -> Self {
        let start = Instant::now();
        let closed = evaluate(p);
        let closed_time = start.elapsed();
        let start = Instant::now();
        let oracle = brute_force(p);
        let oracle_time = start.elapsed();
        Self {
            params: p.params(),
            closed,
            oracle,
            closed_time,
            oracle_time,
        }
    }

    pub fn case(&self) -> Option<CaseTag> {
        self.closed.as_ref().ok().map(|cf| cf.case)
    }

    /// Exact value agreement and a correct reported magnitude.
    pub fn is_match(&self) -> bool {
        match &self.closed {
            Ok(cf) => cf.value == self.oracle && magnitude_consistent(cf),
            Err(_) => false,
        }
    }
}

/// `S conj(S) = 2^magnitude_halves` for nonzero values, no magnitude for zero.
pub fn magnitude_consistent(cf: &ClosedForm) -> bool {
    match cf.magnitude_halves {
        None => cf.value.is_zero(),
        Some(h) if h < 63 => {
            let r = cf.value.ring_exponent();
            cf.value.norm() == CycInt::from_int(r, 1i64 << h)
        }
        Some(_) => false,
    }
}

/// Aggregated results of a sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub seed: Option<u64>,
    pub instances_checked: u64,
    /// Sorted parameter tuples of instances that disagree.
    pub mismatches: Vec<ProblemParams>,
    pub case_counts: BTreeMap<CaseTag, u64>,
    pub wall_time_closed_s: f64,
    pub wall_time_brute_s: f64,
    pub wall_time_total_s: f64,
}

impl RunReport {
    fn single(o: &Outcome) -> Self {
        let mut r = RunReport {
            instances_checked: 1,
            wall_time_closed_s: o.closed_time.as_secs_f64(),
            wall_time_brute_s: o.oracle_time.as_secs_f64(),
            ..Default::default()
        };
        if let Some(tag) = o.case() {
            r.case_counts.insert(tag, 1);
        }
        if !o.is_match() {
            r.mismatches.push(o.params);
        }
        r
    }

    /// Associative and order-insensitive once mismatches are sorted.
    pub fn merge(mut self, other: Self) -> Self {
        self.instances_checked += other.instances_checked;
        self.mismatches.extend(other.mismatches);
        for (tag, n) in other.case_counts {
            *self.case_counts.entry(tag).or_default() += n;
        }
        self.wall_time_closed_s += other.wall_time_closed_s;
        self.wall_time_brute_s += other.wall_time_brute_s;
        self
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn count(&self, tag: CaseTag) -> u64 {
        self.case_counts.get(&tag).copied().unwrap_or(0)
    }
}

/// Checks `count` instances produced by `make`, in parallel on the current pool.
pub fn check_indexed<F>(count: u64, make: F) -> RunReport
where
    F: Fn(u64) -> Option<SumProblem> + Sync,
{
    let start = Instant::now();
    let mut report = (0..count)
        .into_par_iter()
        .filter_map(&make)
        .map(|p| RunReport::single(&Outcome::run(&p)))
        .reduce(RunReport::default, RunReport::merge);
    report.mismatches.sort_unstable();
    report.wall_time_total_s = start.elapsed().as_secs_f64();
    report
}

pub fn check_grid(grid: &Grid) -> RunReport {
    check_indexed(grid.len(), |i| grid.get(i))
}

pub fn check_samples(sampler: &Sampler, samples: u64) -> RunReport {
    let mut report = check_indexed(samples, |i| Some(sampler.get(i)));
    report.seed = Some(sampler.seed);
    report
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Precondition("jobs must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Internal(e.to_string())),
    }
}

/// One CSV row per grid instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
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
    pub case: String,
    pub magnitude_halves: Option<u32>,
    #[serde(rename = "match")]
    pub matched: bool,
    pub re: f64,
    pub im: f64,
}

impl GridRow {
    pub fn from_outcome(o: &Outcome) -> Self {
        let p = o.params;
        let (case, magnitude_halves, (re, im)) = match &o.closed {
            Ok(cf) => (
                cf.case.to_string(),
                cf.magnitude_halves,
                cf.value.approx_complex(),
            ),
            Err(e) => (format!("error: {e}"), None, o.oracle.approx_complex()),
        };
        Self {
            m: p.m,
            a: p.a,
            b: p.b,
            k: p.k,
            c1: p.c1,
            s1: p.s1,
            c2: p.c2,
            s2: p.s2,
            case,
            magnitude_halves,
            matched: o.is_match(),
            re,
            im,
        }
    }
}

/// Grid rows in grid order.
pub fn grid_rows(grid: &Grid) -> Vec<GridRow> {
    (0..grid.len())
        .into_par_iter()
        .filter_map(|i| grid.get(i))
        .map(|p| GridRow::from_outcome(&Outcome::run(&p)))
        .collect()
}
