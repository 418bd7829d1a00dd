//! Ground sets, bitmask subsets and tuples of subsets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set. Lifted ground sets (k·n) share the limit.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    labels: Arc<[String]>,
}

impl GroundSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("ground set must be nonempty".into()));
        }
        if labels.len() > MAX_ELEMENTS {
            return Err(Error::InvalidInput(format!(
                "ground set of size {} exceeds {MAX_ELEMENTS}",
                labels.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate label {l:?}")));
            }
        }
        Ok(GroundSet { labels: labels.into() })
    }

    /// Ground set labelled `0..n`.
    pub fn indexed(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect()).expect("1 <= n <= 64")
    }

    pub fn from_labels(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    /// Subset from labels.
    pub fn subset(&self, labels: &[&str]) -> Result<Subset> {
        let mut s = Subset::EMPTY;
        for l in labels {
            let v = self
                .index_of(l)
                .ok_or_else(|| Error::DomainMismatch(format!("unknown label {l:?}")))?;
            s = s.with(v);
        }
        Ok(s)
    }

    pub fn check(&self, s: Subset) -> Result<()> {
        if s.fits(self.len()) {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "subset {s:?} has elements beyond a ground set of size {}",
                self.len()
            )))
        }
    }

    pub fn format_subset(&self, s: Subset) -> String {
        let names: Vec<&str> = s.iter().map(|v| self.label(v)).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroundSet{:?}", &*self.labels)
    }
}

/// A subset of a ground set of at most 64 elements, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        if n >= 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Subset {
        Subset(1u64 << v)
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Subset {
        it.into_iter().fold(Subset::EMPTY, |s, v| s.with(v))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn with(self, v: usize) -> Subset {
        Subset(self.0 | 1u64 << v)
    }

    pub fn without(self, v: usize) -> Subset {
        Subset(self.0 & !(1u64 << v))
    }

    pub fn union(self, o: Subset) -> Subset {
        Subset(self.0 | o.0)
    }

    pub fn intersection(self, o: Subset) -> Subset {
        Subset(self.0 & o.0)
    }

    pub fn difference(self, o: Subset) -> Subset {
        Subset(self.0 & !o.0)
    }

    pub fn is_subset_of(self, o: Subset) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Subset) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(Subset::full(n))
    }

    pub fn min_element(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> SubmaskIter {
        SubmaskIter { mask: self.0, next: Some(0) }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl From<Subset> for Vec<usize> {
    fn from(s: Subset) -> Self {
        s.iter().collect()
    }
}

impl TryFrom<Vec<usize>> for Subset {
    type Error = String;
    fn try_from(v: Vec<usize>) -> std::result::Result<Self, String> {
        if let Some(&bad) = v.iter().find(|&&x| x >= MAX_ELEMENTS) {
            return Err(format!("element index {bad} out of range"));
        }
        Ok(Subset::from_iter(v))
    }
}

pub struct SubsetIter(u64);

impl Iterator for SubsetIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

pub struct SubmaskIter {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for SubmaskIter {
    type Item = Subset;
    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        // Next submask in increasing numeric order.
        self.next = if cur == self.mask { None } else { Some(((cur | !self.mask).wrapping_add(1)) & self.mask) };
        Some(Subset(cur))
    }
}

/// Iterates every subset of `{0..n-1}` in bitmask order.
pub fn all_subsets(n: usize) -> SubmaskIter {
    Subset::full(n).subsets()
}

/// A k-tuple of subsets of one ground set.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetTuple(pub Vec<Subset>);

impl SetTuple {
    pub fn empty(k: usize) -> SetTuple {
        SetTuple(vec![Subset::EMPTY; k])
    }

    pub fn new(parts: Vec<Subset>) -> SetTuple {
        SetTuple(parts)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn part(&self, i: usize) -> Subset {
        self.0[i]
    }

    pub fn parts(&self) -> &[Subset] {
        &self.0
    }

    pub fn union(&self) -> Subset {
        self.0.iter().fold(Subset::EMPTY, |a, &s| a.union(s))
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = Subset::EMPTY;
        for &s in &self.0 {
            if !seen.is_disjoint(s) {
                return false;
            }
            seen = seen.union(s);
        }
        true
    }

    pub fn total_len(&self) -> usize {
        self.0.iter().map(|s| s.len()).sum()
    }

    pub fn componentwise_union(&self, o: &SetTuple) -> SetTuple {
        SetTuple(self.0.iter().zip(&o.0).map(|(a, b)| a.union(*b)).collect())
    }

    pub fn componentwise_intersection(&self, o: &SetTuple) -> SetTuple {
        SetTuple(self.0.iter().zip(&o.0).map(|(a, b)| a.intersection(*b)).collect())
    }

    pub fn with(&self, i: usize, v: usize) -> SetTuple {
        let mut t = self.clone();
        t.0[i] = t.0[i].with(v);
        t
    }
}

impl fmt::Debug for SetTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}
