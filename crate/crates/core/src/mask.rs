//! Single-word element sets.
//!
//! A member set over a universe of at most 64 elements is one `u64`; bit `x`
//! is set iff element `x` belongs to the set.

use std::fmt::Write;

use crate::error::{Error, Result};

pub type Mask = u64;

/// Largest supported universe.
pub const MAX_UNIVERSE: usize = 64;

/// Mask with the low `m` bits set.
#[inline]
pub fn full_mask(m: usize) -> Mask {
    debug_assert!(m <= MAX_UNIVERSE);
    if m >= 64 {
        !0
    } else {
        (1u64 << m) - 1
    }
}

#[inline]
pub fn bit(x: u32) -> Mask {
    1u64 << x
}

#[inline]
pub fn contains(mask: Mask, x: u32) -> bool {
    mask >> x & 1 == 1
}

#[inline]
pub fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

#[inline]
pub fn card(mask: Mask) -> u32 {
    mask.count_ones()
}

/// Element ids of `mask` in ascending order.
pub fn elements(mask: Mask) -> Elements {
    Elements(mask)
}

#[derive(Clone, Copy, Debug)]
pub struct Elements(Mask);

impl Iterator for Elements {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

pub fn from_elements<I: IntoIterator<Item = u32>>(ids: I) -> Result<Mask> {
    ids.into_iter().try_fold(0, |acc, x| {
        if (x as usize) < MAX_UNIVERSE {
            Ok(acc | bit(x))
        } else {
            Err(Error::ElementCapacity(x as u64))
        }
    })
}

/// Non-empty submasks of `mask`, in ascending numeric order.
pub fn submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    // Enumerates by carrying through the gaps of `mask`.
    let mut cur: Mask = 0;
    let mut done = mask == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        cur = cur.wrapping_sub(mask) & mask;
        if cur == mask {
            done = true;
        }
        Some(cur)
    })
}

/// `{0,2,5}` style rendering, `{}` for the empty set.
pub fn show(mask: Mask) -> String {
    let mut s = String::from("{");
    for (i, x) in elements(mask).enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{x}").unwrap();
    }
    s.push('}');
    s
}

/// Serde adapter: a mask as a sorted array of element ids.
pub mod as_ids {
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use super::{elements, from_elements, Mask};

    pub fn serialize<S: Serializer>(mask: &Mask, s: S) -> Result<S::Ok, S::Error> {
        elements(*mask).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mask, D::Error> {
        let ids = Vec::<u32>::deserialize(d)?;
        from_elements(ids).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Mask>`.
pub mod as_id_lists {
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use super::{elements, from_elements, Mask};

    pub fn serialize<S: Serializer>(masks: &[Mask], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(masks.len()))?;
        for &m in masks {
            seq.serialize_element(&elements(m).collect::<Vec<_>>())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mask>, D::Error> {
        let lists = Vec::<Vec<u32>>::deserialize(d)?;
        lists
            .into_iter()
            .map(|ids| from_elements(ids).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submask_enumeration() {
        let subs: Vec<_> = submasks(0b1010).collect();
        assert_eq!(subs, vec![0b0010, 0b1000, 0b1010]);
        assert_eq!(submasks(0).count(), 0);
        assert_eq!(submasks(full_mask(10)).count(), 1023);
    }

    #[test]
    fn capacity() {
        assert_eq!(full_mask(64), u64::MAX);
        assert_eq!(from_elements([63]).unwrap(), 1 << 63);
        assert_eq!(from_elements([64]), Err(Error::ElementCapacity(64)));
    }

    #[test]
    fn rendering() {
        assert_eq!(show(0), "{}");
        assert_eq!(show(0b101), "{0,2}");
    }
}
