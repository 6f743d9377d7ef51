//! Corpus generation and corpus-wide verification.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{applicability, lemma_bound};
use crate::error::{Error, Result};
use crate::family::{
    frankl_witnesses, is_separating, separating_quotient, union_closure, union_violation, SetFamily,
};
use crate::mask::{full_mask, Mask};
use crate::witness::{
    counting_audit_with, cross_containment_violations, falgas_ravry_chain, minimal_transversal,
};

pub const EXHAUSTIVE_CAP: usize = 4;
pub const GENERATOR_CAP: usize = 6;
pub const CANONICAL_CAP: usize = 8;

/// SplitMix64 (Steele, Lea & Flood; public-domain reference by S. Vigna).
///
/// `state += 0x9e3779b97f4a7c15`, then the output is mixed with two
/// xor-shift-multiply rounds. This is the only randomness the crate uses.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every subfamily of the power set; `m <= 4`.
    Exhaustive,
    /// Closures grown one generator at a time, one representative per
    /// isomorphism class; `m <= 6`.
    Generators,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Filter {
    #[default]
    All,
    /// Universe equals the union of the members.
    Validated,
    /// Validated and separating.
    Separating,
}

impl Filter {
    fn keep(self, f: &SetFamily) -> bool {
        match self {
            Filter::All => true,
            Filter::Validated => f.is_validated(),
            Filter::Separating => f.is_validated() && is_separating(f),
        }
    }
}

/// Union-closed families over `{0, .., m-1}` (universe padded to `m`).
///
/// Exhaustive mode walks subfamily indices `0 .. 2^(2^m)` in order; bit `s`
/// of the index selects the set with mask `s`. Generator mode yields
/// canonical forms in ascending order.
pub fn enumerate_union_closed(
    m: usize,
    mode: Mode,
    filter: Filter,
) -> Result<Box<dyn Iterator<Item = SetFamily> + Send>> {
    match mode {
        Mode::Exhaustive => {
            if m > EXHAUSTIVE_CAP {
                return Err(Error::Capacity {
                    what: "exhaustive enumeration",
                    cap: EXHAUSTIVE_CAP,
                    m,
                });
            }
            let sets = 1u64 << m;
            let total = 1u64 << sets;
            Ok(Box::new((0..total).filter_map(move |idx| {
                if !index_is_union_closed(idx, sets) {
                    return None;
                }
                let f =
                    SetFamily::padded(m, (0..sets).filter(|s| idx >> s & 1 == 1)).expect("m <= 4");
                filter.keep(&f).then_some(f)
            })))
        }
        Mode::Generators => {
            if m > GENERATOR_CAP {
                return Err(Error::Capacity {
                    what: "generator enumeration",
                    cap: GENERATOR_CAP,
                    m,
                });
            }
            let all = generator_classes(m);
            Ok(Box::new(all.into_iter().filter(move |f| filter.keep(f))))
        }
    }
}

/// Union-closedness of the subfamily encoded by `idx` (bit `s` = mask `s`).
fn index_is_union_closed(idx: u64, sets: u64) -> bool {
    let mut rest = idx;
    while rest != 0 {
        let a = rest.trailing_zeros() as u64;
        rest &= rest - 1;
        let mut others = rest;
        while others != 0 {
            let b = others.trailing_zeros() as u64;
            others &= others - 1;
            debug_assert!((a | b) < sets);
            if idx >> (a | b) & 1 == 0 {
                return false;
            }
        }
    }
    true
}

/// All permutations of `0..m` in Heap's-algorithm order.
fn permutations(m: usize) -> Vec<Vec<u32>> {
    let mut p: Vec<u32> = (0..m as u32).collect();
    let mut out = vec![p.clone()];
    let mut c = vec![0usize; m];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `tables[p][s]` is mask `s` relabeled by permutation `p`.
fn relabel_tables(m: usize) -> Vec<Vec<Mask>> {
    permutations(m)
        .into_iter()
        .map(|perm| {
            (0..1u64 << m)
                .map(|s| crate::mask::elements(s).fold(0, |acc, x| acc | 1 << perm[x as usize]))
                .collect()
        })
        .collect()
}

fn canonical_with(f: &SetFamily, tables: &[Vec<Mask>]) -> SetFamily {
    let mut best: Option<Vec<Mask>> = None;
    let mut buf = Vec::with_capacity(f.len());
    for t in tables {
        buf.clear();
        buf.extend(f.members().iter().map(|&a| t[a as usize]));
        buf.sort_unstable();
        if best.as_ref().is_none_or(|b| buf < *b) {
            best = Some(buf.clone());
        }
    }
    SetFamily::padded(f.universe_size(), best.unwrap_or_default()).expect("same universe")
}

/// Lexicographically smallest sorted member list over all relabelings of the
/// universe. Equal for two families iff they are isomorphic.
pub fn canonical_form(f: &SetFamily) -> Result<SetFamily> {
    let m = f.universe_size();
    if m > CANONICAL_CAP {
        return Err(Error::Capacity {
            what: "canonical form",
            cap: CANONICAL_CAP,
            m,
        });
    }
    Ok(canonical_with(f, &relabel_tables(m)))
}

fn generator_classes(m: usize) -> Vec<SetFamily> {
    let tables = relabel_tables(m);
    let start = SetFamily::padded(m, []).expect("m <= 6");
    let mut seen: HashSet<SetFamily> = HashSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for s in 0..1u64 << m {
                if f.contains(s) {
                    continue;
                }
                let grown =
                    SetFamily::padded(m, f.members().iter().copied().chain([s])).expect("m <= 6");
                let c = canonical_with(&union_closure(&grown), &tables);
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    let mut all: Vec<SetFamily> = seen.into_iter().collect();
    all.sort_by(|a, b| a.members().cmp(b.members()));
    all
}

/// Separating union-closed family from `generators` seeded random sets.
///
/// Draws `generators` non-empty masks `next_u64() & full_mask(m)` from
/// [`SplitMix64`] seeded with `seed` (redrawing zeros), closes under union,
/// then takes the separating quotient.
pub fn random_family(m: usize, generators: usize, seed: u64) -> Result<SetFamily> {
    if m > crate::mask::MAX_UNIVERSE {
        return Err(Error::Capacity {
            what: "random family",
            cap: crate::mask::MAX_UNIVERSE,
            m,
        });
    }
    let mut rng = SplitMix64::new(seed);
    let full = full_mask(m);
    let mut gens = Vec::with_capacity(generators);
    if full != 0 {
        while gens.len() < generators {
            let s = rng.next_u64() & full;
            if s != 0 {
                gens.push(s);
            }
        }
    }
    let closed = union_closure(&SetFamily::padded(m, gens)?);
    Ok(separating_quotient(&closed).0)
}

/// `count` random families; family `i` uses the `i`-th output of a
/// [`SplitMix64`] stream seeded with `seed` as its own seed.
pub fn random_corpus(
    m: usize,
    generators: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<SetFamily>> {
    let mut seeds = SplitMix64::new(seed);
    (0..count)
        .map(|_| random_family(m, generators, seeds.next_u64()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub family: SetFamily,
    pub name: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub total_families: usize,
    pub union_closed_count: usize,
    pub separating_count: usize,
    pub frankl_violations: Vec<SetFamily>,
    pub invariant_failures: Vec<Finding>,
    pub audit_failures: Vec<Finding>,
    /// Families refused before verification, with the reason.
    pub rejected: Vec<Finding>,
}

impl CorpusReport {
    pub fn failure_count(&self) -> usize {
        self.frankl_violations.len()
            + self.invariant_failures.len()
            + self.audit_failures.len()
            + self.rejected.len()
    }

    pub fn is_clean(&self) -> bool {
        self.failure_count() == 0
    }

    /// Appends `other`; merging is associative.
    pub fn merge(&mut self, other: CorpusReport) {
        self.total_families += other.total_families;
        self.union_closed_count += other.union_closed_count;
        self.separating_count += other.separating_count;
        self.frankl_violations.extend(other.frankl_violations);
        self.invariant_failures.extend(other.invariant_failures);
        self.audit_failures.extend(other.audit_failures);
        self.rejected.extend(other.rejected);
    }
}

/// Runs every check on one family.
pub fn verify_family(f: &SetFamily) -> CorpusReport {
    let mut r = CorpusReport {
        total_families: 1,
        ..Default::default()
    };
    let finding = |name: String| Finding {
        family: f.clone(),
        name,
    };
    if f.is_empty() {
        r.rejected.push(finding("empty family".into()));
        return r;
    }
    if let Err(e) = f.require_validated() {
        r.rejected.push(finding(e.to_string()));
        return r;
    }
    if f.universe_size() == 0 {
        r.rejected.push(finding("empty universe".into()));
        return r;
    }
    if let Some((left, right)) = union_violation(f) {
        r.rejected
            .push(finding(Error::NotUnionClosed { left, right }.to_string()));
        return r;
    }
    r.union_closed_count = 1;

    match frankl_witnesses(f) {
        Ok(w) if !w.is_empty() => {}
        _ => r.frankl_violations.push(f.clone()),
    }
    if !is_separating(f) {
        return r;
    }
    r.separating_count = 1;

    let mut invariant = |name: String| r.invariant_failures.push(finding(name));
    let chain = match falgas_ravry_chain(f) {
        Ok(c) => c,
        Err(e) => {
            invariant(format!("chain construction: {e}"));
            return r;
        }
    };
    for v in chain.violations(f) {
        invariant(format!("chain: {v}"));
    }
    let transversal = match minimal_transversal(f) {
        Ok(t) => t,
        Err(e) => {
            invariant(format!("transversal construction: {e}"));
            return r;
        }
    };
    for v in transversal.violations(f) {
        invariant(format!("transversal: {v}"));
    }
    for (i, j) in cross_containment_violations(&chain, &transversal) {
        invariant(format!("A_i ⊆ M_j / x_i ∈ M_j (i = {i}, j = {j})"));
    }
    match lemma_bound(f) {
        Ok(within) => {
            if within != (f.len() <= 2 * f.universe_size()) {
                invariant("lemma bound consistency".into());
            }
        }
        Err(e) => invariant(format!("lemma bound: {e}")),
    }
    match applicability(f) {
        Ok(rep) if rep.alarm => invariant("applicability: covered family without witness".into()),
        Ok(_) => {}
        Err(e) => invariant(format!("applicability: {e}")),
    }

    let audit = counting_audit_with(f, &transversal);
    for name in audit.failures() {
        r.audit_failures.push(finding(name));
    }
    r
}

/// Verifies every family; work is split across threads, results are
/// merged in input order.
pub fn corpus_verify<I: IntoIterator<Item = SetFamily>>(corpus: I) -> CorpusReport {
    let families: Vec<SetFamily> = corpus.into_iter().collect();
    let parts: Vec<CorpusReport> = families.par_iter().map(verify_family).collect();
    parts
        .into_iter()
        .fold(CorpusReport::default(), |mut acc, p| {
            acc.merge(p);
            acc
        })
}

/// All validated union-closed families with `1 <= m <= max_m` from the
/// exhaustive enumeration.
pub fn exhaustive_corpus(max_m: usize) -> Result<Vec<SetFamily>> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        out.extend(enumerate_union_closed(
            m,
            Mode::Exhaustive,
            Filter::Validated,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{is_union_closed, make_family};

    #[test]
    fn splitmix_reference_values() {
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(r.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(r.next_u64(), 0x06c4_5d18_8009_454f);
    }

    #[test]
    fn heap_permutations() {
        let p = permutations(4);
        assert_eq!(p.len(), 24);
        let uniq: HashSet<_> = p.iter().collect();
        assert_eq!(uniq.len(), 24);
        assert_eq!(permutations(0), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn caps() {
        assert!(matches!(
            enumerate_union_closed(5, Mode::Exhaustive, Filter::All),
            Err(Error::Capacity { cap: 4, .. })
        ));
        assert!(matches!(
            enumerate_union_closed(7, Mode::Generators, Filter::All),
            Err(Error::Capacity { cap: 6, .. })
        ));
        let nine = SetFamily::padded(9, [1]).unwrap();
        assert!(matches!(
            canonical_form(&nine),
            Err(Error::Capacity { cap: 8, .. })
        ));
    }

    #[test]
    fn small_counts() {
        assert_eq!(
            enumerate_union_closed(1, Mode::Exhaustive, Filter::All)
                .unwrap()
                .count(),
            4
        );
        assert_eq!(
            enumerate_union_closed(2, Mode::Exhaustive, Filter::All)
                .unwrap()
                .count(),
            14
        );
    }

    #[test]
    fn canonical_examples() {
        let a = make_family([vec![0u32], vec![0, 1]]).unwrap();
        let b = make_family([vec![1u32], vec![0, 1]]).unwrap();
        let ca = canonical_form(&a).unwrap();
        assert_eq!(ca, canonical_form(&b).unwrap());
        assert_eq!(canonical_form(&ca).unwrap(), ca);

        let chain = make_family([vec![2u32], vec![1, 2], vec![0, 1, 2]]).unwrap();
        let c = canonical_form(&chain).unwrap();
        assert_eq!(c.members(), &[0b001, 0b011, 0b111]);
    }

    #[test]
    fn random_family_contract() {
        let f = random_family(16, 10, 42).unwrap();
        assert_eq!(f, random_family(16, 10, 42).unwrap());
        assert!(is_union_closed(&f) && is_separating(&f) && f.is_validated());
        assert!(random_family(0, 5, 1).unwrap().is_empty());
        let wide = random_family(64, 3, 9).unwrap();
        assert!(is_union_closed(&wide) && is_separating(&wide));
    }

    #[test]
    fn rejection_reasons() {
        let bad = make_family([vec![0u32], vec![1]]).unwrap();
        let r = corpus_verify([bad]);
        assert_eq!(r.rejected.len(), 1);
        assert!(
            r.rejected[0].name.contains("{0} ∪ {1}"),
            "{}",
            r.rejected[0].name
        );
        assert_eq!(r.union_closed_count, 0);

        let padded = SetFamily::padded(3, [1, 3]).unwrap();
        assert!(corpus_verify([padded]).rejected[0]
            .name
            .contains("not covered"));
        assert_eq!(
            corpus_verify([SetFamily::padded(1, []).unwrap()])
                .rejected
                .len(),
            1
        );
    }

    #[test]
    fn small_exhaustive_corpus_is_clean() {
        let r = corpus_verify(exhaustive_corpus(3).unwrap());
        assert!(r.is_clean(), "{r:?}");
        assert_eq!(r.separating_count, 2 + 6 + 70);
    }

    #[test]
    fn merge_is_associative() {
        let fams = exhaustive_corpus(2).unwrap();
        let parts: Vec<_> = fams.iter().map(verify_family).collect();
        let mut left = parts[0].clone();
        let mut tail = parts[1].clone();
        tail.merge(parts[2].clone());
        left.merge(tail);
        let mut right = parts[0].clone();
        right.merge(parts[1].clone());
        right.merge(parts[2].clone());
        assert_eq!(left, right);
    }
}
