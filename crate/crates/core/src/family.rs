//! Set families over universes of at most 64 elements.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{self, bit, elements, full_mask, Mask, MAX_UNIVERSE};

/// A finite family of subsets of `{0, .., universe_size - 1}`.
///
/// Members are deduplicated and kept in ascending numeric mask order, which is
/// also the serialized order. The empty set may be a member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct SetFamily {
    universe_size: usize,
    members: Vec<Mask>,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    universe_size: usize,
    members: Vec<Vec<u32>>,
}

impl From<SetFamily> for FamilyRepr {
    fn from(f: SetFamily) -> Self {
        FamilyRepr {
            universe_size: f.universe_size,
            members: f.members.iter().map(|&m| elements(m).collect()).collect(),
        }
    }
}

impl TryFrom<FamilyRepr> for SetFamily {
    type Error = Error;

    fn try_from(r: FamilyRepr) -> Result<Self> {
        let masks = r
            .members
            .into_iter()
            .map(mask::from_elements)
            .collect::<Result<Vec<_>>>()?;
        SetFamily::padded(r.universe_size, masks)
    }
}

impl SetFamily {
    /// Family from raw masks; the universe is `1 + max element used`.
    pub fn from_masks<I: IntoIterator<Item = Mask>>(masks: I) -> Self {
        let mut members: Vec<Mask> = masks.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let union = members.iter().fold(0, |a, &b| a | b);
        let universe_size = 64 - union.leading_zeros() as usize;
        SetFamily {
            universe_size,
            members,
        }
    }

    /// Family over an explicit universe, which may contain elements that no
    /// member uses.
    pub fn padded<I: IntoIterator<Item = Mask>>(universe_size: usize, masks: I) -> Result<Self> {
        if universe_size > MAX_UNIVERSE {
            return Err(Error::Capacity {
                what: "set family universe",
                cap: MAX_UNIVERSE,
                m: universe_size,
            });
        }
        let mut f = SetFamily::from_masks(masks);
        if f.universe_size > universe_size {
            let stray = f.union() & !full_mask(universe_size);
            return Err(Error::Domain(format!(
                "member element {} outside universe of size {universe_size}",
                stray.trailing_zeros()
            )));
        }
        f.universe_size = universe_size;
        Ok(f)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    /// Members in canonical ascending mask order.
    pub fn members(&self) -> &[Mask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, set: Mask) -> bool {
        self.members.binary_search(&set).is_ok()
    }

    pub fn contains_empty_set(&self) -> bool {
        self.members.first() == Some(&0)
    }

    /// U(f), the union of all members.
    pub fn union(&self) -> Mask {
        self.members.iter().fold(0, |a, &b| a | b)
    }

    /// True when every element slot is used by some member.
    pub fn is_validated(&self) -> bool {
        self.union() == full_mask(self.universe_size)
    }

    pub fn require_validated(&self) -> Result<()> {
        let missing = full_mask(self.universe_size) & !self.union();
        if missing == 0 {
            Ok(())
        } else {
            Err(Error::NotValidated {
                universe_size: self.universe_size,
                missing,
            })
        }
    }

    /// Members as sorted element-id lists.
    pub fn to_id_lists(&self) -> Vec<Vec<u32>> {
        self.members
            .iter()
            .map(|&m| elements(m).collect())
            .collect()
    }

    /// Applies `perm` (old id -> new id) to every member.
    pub fn relabel(&self, perm: &[u32]) -> SetFamily {
        debug_assert_eq!(perm.len(), self.universe_size);
        let mut members: Vec<Mask> = self
            .members
            .iter()
            .map(|&m| elements(m).fold(0, |acc, x| acc | bit(perm[x as usize])))
            .collect();
        members.sort_unstable();
        SetFamily {
            universe_size: self.universe_size,
            members,
        }
    }
}

/// Builds a family from element-id lists; duplicates collapse.
pub fn make_family<I, S>(sets: I) -> Result<SetFamily>
where
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = u32>,
{
    let masks = sets
        .into_iter()
        .map(mask::from_elements)
        .collect::<Result<Vec<_>>>()?;
    Ok(SetFamily::from_masks(masks))
}

/// A pair of members whose union is missing, if any.
pub fn union_violation(f: &SetFamily) -> Option<(Mask, Mask)> {
    let ms = f.members();
    for (i, &a) in ms.iter().enumerate() {
        for &b in &ms[i + 1..] {
            let u = a | b;
            if u != a && u != b && !f.contains(u) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn is_union_closed(f: &SetFamily) -> bool {
    union_violation(f).is_none()
}

pub fn require_union_closed(f: &SetFamily) -> Result<()> {
    match union_violation(f) {
        None => Ok(()),
        Some((left, right)) => Err(Error::NotUnionClosed { left, right }),
    }
}

/// Smallest union-closed family containing `f`, over the same universe.
pub fn union_closure(f: &SetFamily) -> SetFamily {
    let mut seen: HashSet<Mask> = f.members().iter().copied().collect();
    let mut all: Vec<Mask> = f.members().to_vec();
    let mut i = 0;
    while i < all.len() {
        let a = all[i];
        for j in 0..i {
            let u = a | all[j];
            if seen.insert(u) {
                all.push(u);
            }
        }
        i += 1;
    }
    all.sort_unstable();
    SetFamily {
        universe_size: f.universe_size(),
        members: all,
    }
}

/// Element frequencies and the increasing-frequency labeling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    /// `freq[x]` is the number of members containing `x`.
    pub freq: Vec<usize>,
    /// `order[i - 1]` is the element labeled `x_i`.
    pub order: Vec<u32>,
}

impl FrequencyProfile {
    /// Position of each element in `order` (0-based, so `x_{rank+1}`).
    pub fn ranks(&self) -> Vec<u32> {
        let mut rank = vec![0; self.order.len()];
        for (pos, &x) in self.order.iter().enumerate() {
            rank[x as usize] = pos as u32;
        }
        rank
    }

    pub fn max_frequency(&self) -> usize {
        self.freq.iter().copied().max().unwrap_or(0)
    }
}

pub fn frequency_profile(f: &SetFamily) -> FrequencyProfile {
    let m = f.universe_size();
    let mut freq = vec![0usize; m];
    for &a in f.members() {
        for x in elements(a) {
            freq[x as usize] += 1;
        }
    }
    let mut order: Vec<u32> = (0..m as u32).collect();
    order.sort_by_key(|&x| (freq[x as usize], x));
    FrequencyProfile { freq, order }
}

/// Elements lying in at least half of the members.
pub fn frankl_witnesses(f: &SetFamily) -> Result<Vec<u32>> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = f.len();
    let profile = frequency_profile(f);
    Ok((0..f.universe_size() as u32)
        .filter(|&x| 2 * profile.freq[x as usize] >= n)
        .collect())
}

/// Column `x` of the incidence matrix as a bitset over member indices.
fn columns(f: &SetFamily) -> Vec<Vec<u64>> {
    let words = f.len().div_ceil(64);
    let mut cols = vec![vec![0u64; words]; f.universe_size()];
    for (idx, &a) in f.members().iter().enumerate() {
        for x in elements(a) {
            cols[x as usize][idx / 64] |= 1 << (idx % 64);
        }
    }
    cols
}

/// Column classes of the elements of U(f), ordered by their lowest element.
fn column_classes(f: &SetFamily) -> Vec<Vec<u32>> {
    let union = f.union();
    let cols = columns(f);
    let mut index: HashMap<&[u64], usize> = HashMap::new();
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for x in elements(union) {
        let key = cols[x as usize].as_slice();
        match index.get(key) {
            Some(&c) => classes[c].push(x),
            None => {
                index.insert(key, classes.len());
                classes.push(vec![x]);
            }
        }
    }
    classes
}

/// Two distinct elements of U(f) contained in exactly the same members.
pub fn unseparated_pair(f: &SetFamily) -> Option<(u32, u32)> {
    column_classes(f)
        .into_iter()
        .find(|c| c.len() > 1)
        .map(|c| (c[0], c[1]))
}

pub fn is_separating(f: &SetFamily) -> bool {
    unseparated_pair(f).is_none()
}

pub fn require_separating(f: &SetFamily) -> Result<()> {
    match unseparated_pair(f) {
        None => Ok(()),
        Some((x, y)) => Err(Error::Unseparated(x, y)),
    }
}

/// Merges elements with identical membership columns.
///
/// Class `c` (ordered by lowest element) becomes element `c`. Elements in no
/// member are dropped, so the result is always validated. Member count and
/// union-closedness are preserved.
pub fn separating_quotient(f: &SetFamily) -> (SetFamily, Vec<Vec<u32>>) {
    let classes = column_classes(f);
    let mut target = [u32::MAX; MAX_UNIVERSE];
    for (c, class) in classes.iter().enumerate() {
        for &x in class {
            target[x as usize] = c as u32;
        }
    }
    let mut members: Vec<Mask> = f
        .members()
        .iter()
        .map(|&a| elements(a).fold(0, |acc, x| acc | bit(target[x as usize])))
        .collect();
    members.sort_unstable();
    // Distinct members stay distinct: their columns-restricted rows differ.
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
    let quotient = SetFamily {
        universe_size: classes.len(),
        members,
    };
    (quotient, classes)
}

/// Renames elements so that id order is increasing-frequency order.
///
/// Returns the relabeled family and the permutation applied (`perm[old] = new`).
pub fn relabel_by_frequency(f: &SetFamily) -> (SetFamily, Vec<u32>) {
    let profile = frequency_profile(f);
    let perm = profile.ranks();
    (f.relabel(&perm), perm)
}
