//! Threshold calculus for separating union-closed families.
//!
//! The rational parts (`f_m`, its minimisation, convexity, the frequency
//! fraction) are generic over [`Scalar`] and run exactly with
//! [`Exact`](crate::Exact) or approximately with `f64`/`f32`. Anything
//! involving logarithms needs [`num_traits::Float`].
//!
//! Inequalities near equality are compared with [`TOLERANCE`]; an integer `n`
//! fits under a real threshold `t` iff `n <= floor(t + TOLERANCE)`.

use std::fmt::Debug;
use std::ops::RangeInclusive;

use num_traits::{Float, FromPrimitive, Num};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::{frankl_witnesses, frequency_profile, SetFamily};
use crate::witness::{falgas_ravry_chain, require_analyzable};

pub const TOLERANCE: f64 = 1e-9;

/// Largest `m` covered by the external small-universe result.
pub const SMALL_M_LIMIT: u64 = 12;

/// Number of sample points in [`maxmin_check`]'s real-`k` grid.
pub const GRID_POINTS: usize = 20_000;

pub trait Scalar: Clone + PartialOrd + Num + FromPrimitive + Debug {}

impl<T: Clone + PartialOrd + Num + FromPrimitive + Debug> Scalar for T {}

fn lift<T: Scalar>(v: u64) -> T {
    T::from_u64(v).expect("scalar type cannot represent integer")
}

fn pow2<T: Scalar>(e: u32) -> T {
    num_traits::pow(lift::<T>(2), e as usize)
}

/// `ceil(log2 m)` for `m >= 1`.
pub fn ceil_log2(m: u64) -> u32 {
    debug_assert!(m >= 1);
    64 - (m - 1).leading_zeros()
}

/// `f_m(k) = 2^(k-1) + m/(k-2) - k - 3`, defined for `k >= 3`.
pub fn f_m<T: Scalar>(m: u64, k: u32) -> Result<T> {
    if m < 1 {
        return Err(Error::Domain(format!("f_m needs m >= 1, got {m}")));
    }
    if k <= 2 {
        return Err(Error::Domain(format!(
            "f_m(k) has a pole at k = 2; got k = {k}"
        )));
    }
    Ok(pow2::<T>(k - 1) + lift::<T>(m) / lift::<T>(k as u64 - 2) - lift::<T>(k as u64 + 3))
}

/// Integer `k` scanned when minimising `f_m`: `3 ..= ceil(log2 m) + 2`,
/// never empty.
pub fn k_range(m: u64) -> RangeInclusive<u32> {
    3..=(ceil_log2(m.max(1)) + 2).max(3)
}

pub fn f_values<T: Scalar>(m: u64) -> Result<Vec<(u32, T)>> {
    k_range(m).map(|k| Ok((k, f_m::<T>(m, k)?))).collect()
}

/// Smallest `f_m(k)` over [`k_range`], ties going to the smaller `k`.
pub fn min_f<T: Scalar>(m: u64) -> Result<(u32, T)> {
    let values = f_values::<T>(m)?;
    Ok(argmin(&values))
}

fn argmin<T: Scalar>(values: &[(u32, T)]) -> (u32, T) {
    let mut best = values[0].clone();
    for (k, v) in &values[1..] {
        if *v < best.1 {
            best = (*k, v.clone());
        }
    }
    best
}

/// `f(k-1) + f(k+1) >= 2 f(k) - tol` at every interior point of a run of
/// consecutive `k`.
pub fn is_discretely_convex<T: Scalar>(values: &[(u32, T)], tol: T) -> bool {
    values.windows(3).all(|w| {
        let two = lift::<T>(2);
        w[0].1.clone() + w[2].1.clone() + tol.clone() >= two * w[1].1.clone()
    })
}

/// Whether `k` lies in `[5, ceil(log2 m)]`, where the minimiser is claimed
/// to sit for `m >= 13`.
pub fn argmin_in_claimed_interval(m: u64, k: u32) -> bool {
    (5..=ceil_log2(m)).contains(&k)
}

/// `(c - 2) / (2(c - 1))`, the guaranteed frequency fraction for ratio `c > 2`.
pub fn hu_fraction<T: Scalar>(c: T) -> Result<T> {
    let two = lift::<T>(2);
    if c <= two {
        return Err(Error::Domain(format!(
            "frequency fraction needs c > 2, got {c:?}"
        )));
    }
    Ok((c.clone() - two.clone()) / (two * (c - T::one())))
}

fn flift<T: Float + FromPrimitive>(v: u64) -> T {
    T::from_u64(v).expect("float conversion")
}

/// `log2 m - log2 log2 m`, positive for all `m >= 2`.
pub fn log_gap<T: Float + FromPrimitive>(m: u64) -> Result<T> {
    if m <= 1 {
        return Err(Error::Domain(format!(
            "log2 log2 m is undefined for m = {m}; need m >= 2"
        )));
    }
    let l = flift::<T>(m).log2();
    Ok(l - l.log2())
}

/// `2(m + m / (log2 m - log2 log2 m))`.
pub fn closed_form_threshold<T: Float + FromPrimitive>(m: u64) -> Result<T> {
    let mf = flift::<T>(m);
    let two = flift::<T>(2);
    Ok(two * (mf + mf / log_gap::<T>(m)?))
}

/// `k' = log2 m - log2 log2 m + 2`.
pub fn k_prime<T: Float + FromPrimitive>(m: u64) -> Result<T> {
    Ok(log_gap::<T>(m)? + flift::<T>(2))
}

/// Whether `n <= floor(t + TOLERANCE)`.
pub fn fits_under(n: u64, t: f64) -> bool {
    (n as f64) <= (t + TOLERANCE).floor()
}

/// `m/(k'-2) <= 2^(k'-1)` at the real substitution point `k'`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KPrimeCheck<T> {
    pub m: u64,
    pub k_prime: T,
    /// `m / (k' - 2)`.
    pub lhs: T,
    /// `2^(k' - 1)`.
    pub rhs: T,
    pub holds: bool,
}

pub fn kprime_check<T: Float + FromPrimitive>(m: u64) -> Result<KPrimeCheck<T>> {
    let kp = k_prime::<T>(m)?;
    let two = flift::<T>(2);
    let lhs = flift::<T>(m) / (kp - two);
    let rhs = two.powf(kp - T::one());
    let tol = T::from_f64(TOLERANCE).unwrap();
    Ok(KPrimeCheck {
        m,
        k_prime: kp,
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    })
}

/// The max-min step and the final substitution, evaluated numerically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxMinCheck<T> {
    pub m: u64,
    pub k_star: u32,
    pub min_f: T,
    /// `max_k' min(2^(k'-1), m/(k'-2))` over the sample grid.
    pub grid_max: T,
    pub grid_argmax: T,
    /// `min_f >= grid_max`.
    pub maxmin_holds: bool,
    /// `m / (log2 m - log2 log2 m)`.
    pub final_rhs: T,
    /// `min_f >= final_rhs`.
    pub final_holds: bool,
}

pub fn maxmin_check<T: Float + FromPrimitive + Debug>(m: u64) -> Result<MaxMinCheck<T>> {
    let (k_star, min_f) = min_f::<T>(m)?;
    let two = flift::<T>(2);
    let three = flift::<T>(3);
    let mf = flift::<T>(m);
    let hi = mf.log2() + two;
    let steps = flift::<T>(GRID_POINTS as u64 - 1);
    let mut grid_max = T::neg_infinity();
    let mut grid_argmax = three;
    for s in 0..GRID_POINTS {
        let kp = three + (hi - three) * flift::<T>(s as u64) / steps;
        let v = two.powf(kp - T::one()).min(mf / (kp - two));
        if v > grid_max {
            grid_max = v;
            grid_argmax = kp;
        }
    }
    let final_rhs = mf / log_gap::<T>(m)?;
    let tol = T::from_f64(TOLERANCE).unwrap();
    Ok(MaxMinCheck {
        m,
        k_star,
        min_f,
        grid_max,
        grid_argmax,
        maxmin_holds: min_f + tol >= grid_max,
        final_rhs,
        final_holds: min_f + tol >= final_rhs,
    })
}

/// Why (or whether) a family is known to satisfy the conjecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `m <= 12`; relies on the external small-universe result.
    CoveredBySmallM,
    /// `n <= 2m`.
    CoveredByLemma,
    /// `n <= 2(m + m/(log2 m - log2 log2 m))`.
    CoveredByTheorem,
    NotCovered,
}

impl Verdict {
    pub fn is_covered(self) -> bool {
        self != Verdict::NotCovered
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CoveredBySmallM => "covered-by-small-m",
            Verdict::CoveredByLemma => "covered-by-lemma",
            Verdict::CoveredByTheorem => "covered-by-theorem",
            Verdict::NotCovered => "not-covered",
        }
    }
}

pub fn verdict_for(m: u64, n: u64) -> Verdict {
    if m <= SMALL_M_LIMIT {
        Verdict::CoveredBySmallM
    } else if n <= 2 * m {
        Verdict::CoveredByLemma
    } else if closed_form_threshold::<f64>(m).is_ok_and(|t| fits_under(n, t)) {
        Verdict::CoveredByTheorem
    } else {
        Verdict::NotCovered
    }
}

/// Everything the threshold calculus says about one `m` (and optionally `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub m: u64,
    pub n: Option<u64>,
    pub f_values: Vec<(u32, T)>,
    pub k_star: u32,
    pub min_f: T,
    pub convex: bool,
    pub argmin_in_claimed_interval: bool,
    /// `2(m + min_f)`.
    pub ieq1_threshold: T,
    pub k_prime: Option<T>,
    pub closed_form_threshold: Option<T>,
    pub verdict: Option<Verdict>,
    /// Set when a family was supplied.
    pub frankl_witnesses: Option<Vec<u32>>,
    /// A covered family without a Frankl witness.
    pub alarm: bool,
    pub notes: Vec<String>,
}

fn build_report<T: Float + FromPrimitive + Debug>(
    m: u64,
    n: Option<u64>,
) -> Result<BoundReport<T>> {
    let f_values = f_values::<T>(m)?;
    let (k_star, min_f) = argmin(&f_values);
    let two = flift::<T>(2);
    let mut notes = Vec::new();
    if m <= SMALL_M_LIMIT {
        notes.push(format!(
            "m <= {SMALL_M_LIMIT}: the conjecture is taken from the known small-universe result, not re-proved here"
        ));
    }
    if m == 2 {
        notes.push("m = 2: log2 m - log2 log2 m = 1 exactly; outside the regime m >= 3".into());
    }
    Ok(BoundReport {
        m,
        n,
        convex: is_discretely_convex(&f_values, T::from_f64(TOLERANCE).unwrap()),
        argmin_in_claimed_interval: argmin_in_claimed_interval(m, k_star),
        ieq1_threshold: two * (flift::<T>(m) + min_f),
        k_prime: k_prime::<T>(m).ok(),
        closed_form_threshold: closed_form_threshold::<T>(m).ok(),
        verdict: n.map(|n| verdict_for(m, n)),
        f_values,
        k_star,
        min_f,
        frankl_witnesses: None,
        alarm: false,
        notes,
    })
}

/// Bound report for a bare `m`; `m <= 1` is a domain error.
pub fn bound_report<T: Float + FromPrimitive + Debug>(
    m: u64,
    n: Option<u64>,
) -> Result<BoundReport<T>> {
    log_gap::<T>(m)?;
    build_report(m, n)
}

/// `n <= 2m`, backed by the chain witness: when it holds, the most frequent
/// element must lie in at least `m >= n/2` members.
pub fn lemma_bound(f: &SetFamily) -> Result<bool> {
    require_analyzable(f)?;
    let m = f.universe_size();
    let n = f.len();
    if n > 2 * m {
        return Ok(false);
    }
    let chain = falgas_ravry_chain(f)?;
    let top = *chain.order.last().expect("m >= 1");
    let freq = frequency_profile(f).freq[top as usize];
    if freq < m || 2 * freq < n {
        return Err(Error::Contradiction(format!(
            "n = {n} <= 2m = {} but the most frequent element {top} has frequency {freq}",
            2 * m
        )));
    }
    Ok(true)
}

/// Verdict for a concrete family, cross-checked against its Frankl witnesses.
pub fn applicability(f: &SetFamily) -> Result<BoundReport<f64>> {
    require_analyzable(f)?;
    let m = f.universe_size() as u64;
    let n = f.len() as u64;
    let mut report = build_report::<f64>(m, Some(n))?;
    let witnesses = frankl_witnesses(f)?;
    let covered = report.verdict.is_some_and(Verdict::is_covered);
    if covered && witnesses.is_empty() {
        report.alarm = true;
        report
            .notes
            .push("potential counterexample: covered family without a Frankl witness".into());
    }
    report.frankl_witnesses = Some(witnesses);
    Ok(report)
}

/// Rounds to 12 significant digits for rendering.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Serialize)]
struct FValue {
    k: u32,
    f: f64,
}

#[derive(Serialize)]
struct BoundReportRepr<'a> {
    m: u64,
    n: Option<u64>,
    f_values: Vec<FValue>,
    k_star: u32,
    min_f: f64,
    convex: bool,
    argmin_in_claimed_interval: bool,
    ieq1_threshold: f64,
    k_prime: Option<f64>,
    closed_form_threshold: Option<f64>,
    verdict: Option<Verdict>,
    frankl_witnesses: &'a Option<Vec<u32>>,
    alarm: bool,
    notes: &'a [String],
}

impl<T: Float> Serialize for BoundReport<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = |x: T| sig12(x.to_f64().unwrap_or(f64::NAN));
        BoundReportRepr {
            m: self.m,
            n: self.n,
            f_values: self
                .f_values
                .iter()
                .map(|&(k, f)| FValue { k, f: r(f) })
                .collect(),
            k_star: self.k_star,
            min_f: r(self.min_f),
            convex: self.convex,
            argmin_in_claimed_interval: self.argmin_in_claimed_interval,
            ieq1_threshold: r(self.ieq1_threshold),
            k_prime: self.k_prime.map(r),
            closed_form_threshold: self.closed_form_threshold.map(r),
            verdict: self.verdict,
            frankl_witnesses: &self.frankl_witnesses,
            alarm: self.alarm,
            notes: &self.notes,
        }
        .serialize(s)
    }
}
