//! Witness constructions on separating union-closed families.
//!
//! Elements are labeled `x_1, .., x_m` by increasing frequency (ties by id),
//! see [`frequency_profile`]. All masks in the reports use the original
//! element ids; label positions are 1-based to match that numbering.
//!
//! Every construction that involves a choice picks the smallest mask among
//! the candidates, so reports are reproducible bit for bit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{
    frequency_profile, require_separating, require_union_closed, FrequencyProfile, SetFamily,
};
use crate::mask::{self, as_id_lists, as_ids, bit, card, elements, is_subset, submasks, Mask};

/// Checks the shared preconditions of the chain and transversal constructions.
pub fn require_analyzable(f: &SetFamily) -> Result<()> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    f.require_validated()?;
    if f.universe_size() == 0 {
        return Err(Error::Domain("family has an empty universe".into()));
    }
    require_union_closed(f)?;
    require_separating(f)
}

/// Element of `set` with the highest label, if `set` is non-empty.
fn top_element(set: Mask, rank: &[u32]) -> Option<u32> {
    elements(set).max_by_key(|&x| rank[x as usize])
}

/// Mask of the labels `x_{from+1}, .., x_m`.
fn tail(order: &[u32], from: usize) -> Mask {
    order[from..].iter().fold(0, |acc, &x| acc | bit(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    /// Label positions, `i < j`.
    pub i: usize,
    pub j: usize,
    /// Member with `x_i` absent and `x_j` present.
    #[serde(with = "as_ids")]
    pub set: Mask,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainWitness {
    /// `order[i - 1]` is `x_i`.
    pub order: Vec<u32>,
    /// `X_0, .., X_{m-1}`.
    #[serde(with = "as_id_lists")]
    pub chain: Vec<Mask>,
    /// `X_m`, the empty union; only present when the empty set is a member.
    pub last: Option<Vec<u32>>,
    pub pair_witnesses: Vec<PairWitness>,
    /// `M_0, .., M_m`.
    #[serde(with = "as_id_lists")]
    pub m_sets: Vec<Mask>,
    pub notes: Vec<String>,
}

const M_SET_RULE: &str = "M_i is the union of the members that do NOT contain x_i (M_0 = U)";

/// `M_0 = U` and `M_i` = union of the members not containing `x_i`.
pub fn m_sets(f: &SetFamily) -> Result<Vec<Mask>> {
    f.require_validated()?;
    let profile = frequency_profile(f);
    Ok(m_sets_with(f, &profile))
}

fn m_sets_with(f: &SetFamily, profile: &FrequencyProfile) -> Vec<Mask> {
    let mut out = Vec::with_capacity(profile.order.len() + 1);
    out.push(f.union());
    for &x in &profile.order {
        out.push(
            f.members()
                .iter()
                .filter(|&&a| !mask::contains(a, x))
                .fold(0, |acc, &a| acc | a),
        );
    }
    out
}

/// The chain `X_0 ⊋ .. ` built from pairwise separating members.
pub fn falgas_ravry_chain(f: &SetFamily) -> Result<ChainWitness> {
    require_analyzable(f)?;
    let profile = frequency_profile(f);
    let order = &profile.order;
    let m = order.len();

    let mut pair_witnesses = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    let mut chain = Vec::with_capacity(m);
    chain.push(f.union());
    for i in 1..m {
        let xi = order[i - 1];
        let mut acc = 0;
        for j in i + 1..=m {
            let xj = order[j - 1];
            let set = f
                .members()
                .iter()
                .copied()
                .find(|&a| !mask::contains(a, xi) && mask::contains(a, xj))
                .ok_or_else(|| {
                    Error::Contradiction(format!(
                        "no member contains x_{j} = {xj} but not x_{i} = {xi}"
                    ))
                })?;
            acc |= set;
            pair_witnesses.push(PairWitness { i, j, set });
        }
        chain.push(acc);
    }

    let mut notes = vec![M_SET_RULE.to_string()];
    let last = if f.contains_empty_set() {
        Some(Vec::new())
    } else {
        notes.push("X_m omitted: it is the empty union and the empty set is not a member".into());
        None
    };

    Ok(ChainWitness {
        order: order.clone(),
        chain,
        last,
        pair_witnesses,
        m_sets: m_sets_with(f, &profile),
        notes,
    })
}

impl ChainWitness {
    /// Names of the chain invariants that fail on `f`; empty when all hold.
    pub fn violations(&self, f: &SetFamily) -> Vec<String> {
        let mut bad = Vec::new();
        let order = &self.order;
        let m = order.len();
        let profile = frequency_profile(f);
        let mut fail = |name: &str, i: usize| bad.push(format!("{name} (i = {i})"));

        if self.chain.len() != m || self.m_sets.len() != m + 1 {
            fail("chain/M lengths", m);
            return bad;
        }
        if self.chain[0] != f.union() {
            fail("X_0 = U", 0);
        }
        if self.m_sets[0] != f.union() {
            fail("M_0 = U", 0);
        }
        for (i, &xs) in self.chain.iter().enumerate() {
            if !f.contains(xs) {
                fail("X_i is a member", i);
            }
            if i >= 1 && mask::contains(xs, order[i - 1]) {
                fail("x_i not in X_i", i);
            }
            if !is_subset(tail(order, i), xs) {
                fail("{x_(i+1)..x_m} in X_i", i);
            }
            if !is_subset(xs, self.m_sets[i]) {
                fail("X_i in M_i", i);
            }
        }
        for (i, &ms) in self.m_sets.iter().enumerate() {
            if i >= 1 && mask::contains(ms, order[i - 1]) {
                fail("x_i not in M_i", i);
            }
            if !is_subset(tail(order, i.min(m)), ms) {
                fail("{x_(i+1)..x_m} in M_i", i);
            }
        }
        for w in &self.pair_witnesses {
            let ok = w.i < w.j
                && w.j <= m
                && f.contains(w.set)
                && !mask::contains(w.set, order[w.i - 1])
                && mask::contains(w.set, order[w.j - 1]);
            if !ok {
                fail("X_ij separates x_i from x_j", w.i);
            }
        }
        if self.pair_witnesses.len() != m * m.saturating_sub(1) / 2 {
            fail("one X_ij per pair", m);
        }
        let mut sorted = self.chain.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.chain.len() {
            fail("X_0..X_(m-1) pairwise distinct", m);
        }
        // The most frequent element lies in every X_i, i < m.
        if m >= 1 && profile.freq[order[m - 1] as usize] < m {
            fail("freq(x_m) >= m", m);
        }
        bad
    }
}

/// Ũ: elements that are the highest-labeled element of some non-empty member.
pub fn max_index_elements(f: &SetFamily) -> Result<Mask> {
    f.require_validated()?;
    let rank = frequency_profile(f).ranks();
    Ok(tilde_u_with(f, &rank))
}

fn tilde_u_with(f: &SetFamily, rank: &[u32]) -> Mask {
    f.members()
        .iter()
        .filter_map(|&a| top_element(a, rank))
        .fold(0, |acc, x| acc | bit(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementSet {
    pub element: u32,
    #[serde(with = "as_ids")]
    pub set: Mask,
}

/// `A_i` for each `x_i ∈ Ũ`, listed in label order.
pub fn a_sets(f: &SetFamily) -> Result<Vec<ElementSet>> {
    f.require_validated()?;
    let profile = frequency_profile(f);
    Ok(a_sets_with(f, &profile))
}

fn a_sets_with(f: &SetFamily, profile: &FrequencyProfile) -> Vec<ElementSet> {
    let rank = profile.ranks();
    let mut by_top = vec![0 as Mask; profile.order.len()];
    let mut present = vec![false; profile.order.len()];
    for &a in f.members() {
        if let Some(t) = top_element(a, &rank) {
            by_top[t as usize] |= a;
            present[t as usize] = true;
        }
    }
    profile
        .order
        .iter()
        .filter(|&&x| present[x as usize])
        .map(|&x| ElementSet {
            element: x,
            set: by_top[x as usize],
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternSet {
    /// `B ⊆ Û`.
    #[serde(with = "as_ids")]
    pub pattern: Mask,
    /// `P_B`, a member with `P_B ∩ Û = B`.
    #[serde(with = "as_ids")]
    pub set: Mask,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransversalReport {
    #[serde(with = "as_ids")]
    pub tilde_u: Mask,
    pub a_sets: Vec<ElementSet>,
    #[serde(with = "as_ids")]
    pub u_hat: Mask,
    pub k: u32,
    pub singleton_witnesses: Vec<ElementSet>,
    /// Non-empty patterns in ascending mask order.
    pub pb_family: Vec<PatternSet>,
    /// Whether the empty set is a member, i.e. whether `P_∅` exists.
    pub empty_pattern_member: bool,
    pub full_sets_not_in_p: usize,
}

fn is_transversal(f: &SetFamily, u: Mask) -> bool {
    f.members().iter().all(|&a| a == 0 || a & u != 0)
}

/// Û: an inclusion-minimal subset of Ũ meeting every non-empty member,
/// with the singleton witnesses and the `P_B` family it induces.
pub fn minimal_transversal(f: &SetFamily) -> Result<TransversalReport> {
    require_analyzable(f)?;
    let profile = frequency_profile(f);
    let rank = profile.ranks();
    let tilde_u = tilde_u_with(f, &rank);
    if let Some(&a) = f.members().iter().find(|&&a| a != 0 && a & tilde_u == 0) {
        return Err(Error::Contradiction(format!(
            "member {} misses Ũ = {}",
            mask::show(a),
            mask::show(tilde_u)
        )));
    }

    let mut u_hat = tilde_u;
    for x in elements(tilde_u) {
        let smaller = u_hat & !bit(x);
        if is_transversal(f, smaller) {
            u_hat = smaller;
        }
    }

    let mut singleton_witnesses = Vec::new();
    for x in elements(u_hat) {
        let set = f
            .members()
            .iter()
            .copied()
            .find(|&a| a & u_hat == bit(x))
            .ok_or_else(|| {
                Error::Contradiction(format!(
                    "no member meets Û = {} exactly in {{{x}}}",
                    mask::show(u_hat)
                ))
            })?;
        singleton_witnesses.push(ElementSet { element: x, set });
    }

    let witness_of = |x: u32| {
        singleton_witnesses
            .iter()
            .find(|w| w.element == x)
            .map(|w| w.set)
            .unwrap_or(0)
    };
    let pb_family: Vec<PatternSet> = submasks(u_hat)
        .map(|b| PatternSet {
            pattern: b,
            set: elements(b).fold(0, |acc, x| acc | witness_of(x)),
        })
        .collect();

    let full_p = pb_family.last().map(|p| p.set).unwrap_or(0);
    let full_sets_not_in_p = f
        .members()
        .iter()
        .filter(|&&a| is_subset(u_hat, a) && a != full_p)
        .count();

    Ok(TransversalReport {
        tilde_u,
        a_sets: a_sets_with(f, &profile),
        u_hat,
        k: card(u_hat),
        singleton_witnesses,
        pb_family,
        empty_pattern_member: f.contains_empty_set(),
        full_sets_not_in_p,
    })
}

impl TransversalReport {
    /// Names of the transversal/P-family invariants that fail on `f`.
    pub fn violations(&self, f: &SetFamily) -> Vec<String> {
        let mut bad = Vec::new();
        let u = self.u_hat;
        if !is_subset(u, self.tilde_u) {
            bad.push("Û ⊆ Ũ".into());
        }
        if card(u) != self.k {
            bad.push("k = |Û|".into());
        }
        if !is_transversal(f, u) {
            bad.push("Û meets every non-empty member".into());
        }
        for x in elements(u) {
            if is_transversal(f, u & !bit(x)) {
                bad.push(format!("Û minimal (dropping {x} keeps a transversal)"));
            }
        }
        if self.singleton_witnesses.len() != self.k as usize {
            bad.push("one singleton witness per element of Û".into());
        }
        for w in &self.singleton_witnesses {
            if !f.contains(w.set) || w.set & u != bit(w.element) || !mask::contains(u, w.element) {
                bad.push(format!("singleton witness for {}", w.element));
            }
        }
        let expected_patterns = (1u64 << self.k) - 1;
        if self.pb_family.len() as u64 != expected_patterns {
            bad.push("P_B for every non-empty B ⊆ Û".into());
        }
        for p in &self.pb_family {
            if !is_subset(p.pattern, u) || p.pattern == 0 {
                bad.push(format!("pattern {} ⊆ Û", mask::show(p.pattern)));
            }
            if !f.contains(p.set) {
                bad.push(format!("P_{} is a member", mask::show(p.pattern)));
            }
            if p.set & u != p.pattern {
                bad.push(format!("P_B ∩ Û = B for B = {}", mask::show(p.pattern)));
            }
        }
        let mut sets: Vec<Mask> = self.pb_family.iter().map(|p| p.set).collect();
        if self.empty_pattern_member {
            sets.push(0);
        }
        let total = sets.len();
        sets.sort_unstable();
        sets.dedup();
        if sets.len() != total {
            bad.push("P_B pairwise distinct".into());
        }
        // Each x in Û lies in half of the 2^k patterns.
        if self.k >= 1 {
            for x in elements(u) {
                let hits = self
                    .pb_family
                    .iter()
                    .filter(|p| mask::contains(p.pattern, x))
                    .count() as u64;
                if hits != 1u64 << (self.k - 1) {
                    bad.push(format!("{x} lies in 2^(k-1) patterns"));
                }
            }
        }
        for a in &self.a_sets {
            if !mask::contains(a.set, a.element) || !mask::contains(self.tilde_u, a.element) {
                bad.push(format!("x_i ∈ A_i for {}", a.element));
            }
        }
        bad
    }
}

/// `A_i ⊆ M_j` for `j > i` and `x_i ∈ M_j` for every `j < m`, `j ≠ i`,
/// for each `x_i ∈ Ũ`. Returns failing `(i, j)` label pairs.
pub fn cross_containment_violations(
    chain: &ChainWitness,
    transversal: &TransversalReport,
) -> Vec<(usize, usize)> {
    let m = chain.order.len();
    let mut position = vec![0usize; m];
    for (p, &x) in chain.order.iter().enumerate() {
        position[x as usize] = p + 1;
    }
    let mut bad = Vec::new();
    for a in &transversal.a_sets {
        let i = position[a.element as usize];
        for j in 0..m {
            if j == i {
                continue;
            }
            let mj = chain.m_sets[j];
            if !mask::contains(mj, a.element) || (j > i && !is_subset(a.set, mj)) {
                bad.push((i, j));
            }
        }
    }
    bad
}

/// Per-observation flags for the four facts feeding the counting bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bullets {
    /// Every element of Û has frequency at most `m + c`.
    pub frequency_cap: bool,
    /// The P family carries exactly `k·2^(k-1)` incidences with Û.
    pub p_incidences: bool,
    /// At least `m - k` members outside P contain all of Û.
    pub full_sets: bool,
    /// Every remaining non-empty member meets Û.
    pub remaining_touch: bool,
}

impl Bullets {
    pub fn all(&self) -> bool {
        self.frequency_cap && self.p_incidences && self.full_sets && self.remaining_touch
    }

    /// Names of the failed observations.
    pub fn failed(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.frequency_cap {
            out.push("frequency_cap");
        }
        if !self.p_incidences {
            out.push("p_incidences");
        }
        if !self.full_sets {
            out.push("full_sets");
        }
        if !self.remaining_touch {
            out.push("remaining_touch");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountingAudit {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    /// Maximum frequency minus `m`.
    pub c: i64,
    /// Sum of the frequencies of the elements of Û.
    pub incidence_total: u64,
    /// `k(m + c)`.
    pub incidence_upper: i128,
    /// `2^k` when the empty set is a member, `2^k - 1` otherwise.
    pub p_family_size: u64,
    pub p_incidences: u64,
    pub full_extra: u64,
    pub other_nonempty: u64,
    /// `k(m+c) + (2^k - k·2^(k-1)) + (m-k)(1-k)`.
    pub rhs: i128,
    pub bullets_ok: Bullets,
    /// `incidence_total >= p_incidences + k·full_extra + other_nonempty`.
    pub decomposition_ok: bool,
    /// `n <= rhs`.
    pub inequality_holds: bool,
}

/// `k(m+c) + (2^k - k·2^(k-1)) + (m-k)(1-k)`.
pub fn counting_rhs(m: i128, k: u32, c: i128) -> i128 {
    let k_ = k as i128;
    let pow = 1i128 << k;
    let half = if k == 0 { 0 } else { k_ << (k - 1) };
    k_ * (m + c) + (pow - half) + (m - k_) * (1 - k_)
}

/// Re-derives the counting bound on `f` from its actual member sets.
/// Discrepancies are reported in the result, never raised.
pub fn counting_audit(f: &SetFamily) -> Result<CountingAudit> {
    let tr = minimal_transversal(f)?;
    Ok(counting_audit_with(f, &tr))
}

pub fn counting_audit_with(f: &SetFamily, tr: &TransversalReport) -> CountingAudit {
    let profile = frequency_profile(f);
    let m = f.universe_size();
    let n = f.len();
    let k = tr.k;
    let u = tr.u_hat;
    let c = profile.max_frequency() as i64 - m as i64;

    let incidence_total: u64 = elements(u).map(|x| profile.freq[x as usize] as u64).sum();
    let incidence_upper = k as i128 * (m as i128 + c as i128);

    let mut p_sets: Vec<Mask> = tr.pb_family.iter().map(|p| p.set).collect();
    p_sets.sort_unstable();
    let in_p = |a: Mask| a == 0 || p_sets.binary_search(&a).is_ok();

    let mut p_incidences = 0u64;
    let mut full_extra = 0u64;
    let mut other_nonempty = 0u64;
    let mut remaining_touch = true;
    for &a in f.members() {
        if in_p(a) {
            p_incidences += card(a & u) as u64;
        } else if is_subset(u, a) {
            full_extra += 1;
        } else {
            other_nonempty += 1;
            if a & u == 0 {
                remaining_touch = false;
            }
        }
    }
    let p_family_size = tr.pb_family.len() as u64 + tr.empty_pattern_member as u64;

    let expected_p_incidences = if k == 0 { 0 } else { (k as u64) << (k - 1) };
    let bullets_ok = Bullets {
        frequency_cap: elements(u).all(|x| profile.freq[x as usize] as i64 <= m as i64 + c),
        p_incidences: p_incidences == expected_p_incidences,
        full_sets: full_extra as i64 >= m as i64 - k as i64,
        remaining_touch,
    };
    let rhs = counting_rhs(m as i128, k, c as i128);

    CountingAudit {
        m,
        n,
        k,
        c,
        incidence_total,
        incidence_upper,
        p_family_size,
        p_incidences,
        full_extra,
        other_nonempty,
        rhs,
        bullets_ok,
        decomposition_ok: incidence_total >= p_incidences + k as u64 * full_extra + other_nonempty,
        inequality_holds: n as i128 <= rhs,
    }
}

impl CountingAudit {
    /// Names of audit checks that fail, including the bullets.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .bullets_ok
            .failed()
            .into_iter()
            .map(String::from)
            .collect();
        if (self.incidence_total as i128) > self.incidence_upper {
            out.push("incidence_total <= k(m+c)".into());
        }
        if !self.decomposition_ok {
            out.push("incidence decomposition".into());
        }
        if !self.inequality_holds {
            out.push("n <= rhs".into());
        }
        out
    }
}
