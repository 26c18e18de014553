//! Canonical families of subsets of a small universe.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bitset::{self, bit, bits, is_subset, size};
use crate::error::{Error, Result};

/// A duplicate-free collection of subsets of `0..universe`, kept sorted by
/// the integer value of the bitmask.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SetFamily {
    universe: usize,
    sets: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    universe: usize,
    sets: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn new<I: IntoIterator<Item = u64>>(universe: usize, sets: I) -> Self {
        let mut sets: Vec<u64> = sets.into_iter().collect();
        sets.sort_unstable();
        sets.dedup();
        debug_assert!(sets.iter().all(|&s| is_subset(s, bitset::full(universe))));
        SetFamily { universe, sets }
    }

    pub fn empty(universe: usize) -> Self {
        SetFamily { universe, sets: Vec::new() }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.sets.iter().copied()
    }

    pub fn contains(&self, s: u64) -> bool {
        self.sets.binary_search(&s).is_ok()
    }

    pub fn to_hash_set(&self) -> HashSet<u64> {
        self.sets.iter().copied().collect()
    }

    /// Members of the given cardinality.
    pub fn of_size(&self, k: usize) -> SetFamily {
        SetFamily::new(self.universe, self.iter().filter(|&s| size(s) == k))
    }

    pub fn max_size(&self) -> usize {
        self.iter().map(size).max().unwrap_or(0)
    }

    /// Inclusion-minimal members.
    pub fn minimal(&self) -> SetFamily {
        SetFamily::new(self.universe, minimal_sets(self.sets.clone()))
    }

    /// Inclusion-maximal members.
    pub fn maximal(&self) -> SetFamily {
        let mut by_size = self.sets.clone();
        by_size.sort_by_key(|&s| std::cmp::Reverse(size(s)));
        let mut kept: Vec<u64> = Vec::new();
        for s in by_size {
            if !kept.iter().any(|&k| is_subset(s, k)) {
                kept.push(s);
            }
        }
        SetFamily::new(self.universe, kept)
    }

    pub fn is_downward_closed(&self) -> bool {
        let set = self.to_hash_set();
        self.iter()
            .all(|s| bits(s).all(|i| set.contains(&(s & !bit(i)))))
    }

    /// All subsets of all members.
    pub fn downward_closure(&self) -> SetFamily {
        let mut out: HashSet<u64> = HashSet::new();
        for s in self.maximal().iter() {
            if out.contains(&s) {
                continue;
            }
            for sub in bitset::submasks(s) {
                out.insert(sub);
            }
        }
        SetFamily::new(self.universe, out)
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Members of `self` that are not in `other`.
    pub fn difference(&self, other: &SetFamily) -> SetFamily {
        SetFamily::new(self.universe, self.iter().filter(|&s| !other.contains(s)))
    }

    /// Relabel every member through `map` into a universe of size `universe`.
    pub fn remap(&self, map: &[usize], universe: usize) -> SetFamily {
        SetFamily::new(universe, self.iter().map(|s| bitset::remap(s, map)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FamilyJson {
            universe: self.universe,
            sets: self.iter().map(bitset::to_indices).collect(),
        })
        .expect("family serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<SetFamily> {
        let raw: FamilyJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Format(e.to_string()))?;
        if raw.universe > 64 {
            return Err(Error::TooLarge(format!("universe {} > 64", raw.universe)));
        }
        let mut sets = Vec::with_capacity(raw.sets.len());
        for s in raw.sets {
            if let Some(&bad) = s.iter().find(|&&i| i >= raw.universe) {
                return Err(Error::Format(format!("index {bad} outside universe")));
            }
            sets.push(bitset::from_indices(s));
        }
        Ok(SetFamily::new(raw.universe, sets))
    }
}

/// Inclusion-minimal elements of a list of sets (duplicates removed).
pub fn minimal_sets(mut sets: Vec<u64>) -> Vec<u64> {
    // small sets probe their submasks, large ones scan what was kept
    const PROBE: usize = 12;
    sets.sort_unstable_by_key(|&s| (size(s), s));
    sets.dedup();
    let mut kept: Vec<u64> = Vec::with_capacity(sets.len());
    let mut index: HashSet<u64> = HashSet::with_capacity(sets.len());
    for s in sets {
        let covered = if size(s) <= PROBE {
            bitset::submasks(s).any(|t| index.contains(&t))
        } else {
            kept.iter().any(|&k| is_subset(k, s))
        };
        if !covered {
            kept.push(s);
            index.insert(s);
        }
    }
    kept.sort_unstable();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_dedup() {
        let f = SetFamily::new(4, [0b11, 0b1, 0b11, 0]);
        assert_eq!(f.sets(), &[0, 0b1, 0b11]);
        assert!(f.contains(0b1));
        assert!(!f.contains(0b10));
    }

    #[test]
    fn antichains() {
        let f = SetFamily::new(4, [0b0011, 0b0111, 0b0001, 0b1000]);
        assert_eq!(f.minimal().sets(), &[0b0001, 0b1000]);
        assert_eq!(f.maximal().sets(), &[0b0111, 0b1000]);
    }

    #[test]
    fn closure_is_downward_closed() {
        let f = SetFamily::new(5, [0b10110, 0b00011]).downward_closure();
        assert!(f.is_downward_closed());
        assert_eq!(f.len(), 8 + 4 - 2);
    }

    #[test]
    fn json_shape() {
        let f = SetFamily::new(3, [0b101, 0b010]);
        let v = f.to_json();
        assert_eq!(v.to_string(), r#"{"sets":[[1],[0,2]],"universe":3}"#);
        assert_eq!(SetFamily::from_json(&v).unwrap(), f);
        let bad = serde_json::json!({"universe": 2, "sets": [[3]]});
        assert!(SetFamily::from_json(&bad).is_err());
    }
}
