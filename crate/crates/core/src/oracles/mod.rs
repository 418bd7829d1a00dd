//! Set-function and tuple-function oracles.

mod constructors;
mod validate;

pub use constructors::*;
pub use validate::*;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::{GroundSet, SetTuple, Subset};

const MEMO_LIMIT: usize = 1 << 20;

/// Claimed properties of an oracle. Validators check them; nothing assumes them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub nonnegative: bool,
    pub monotone: bool,
    pub normalized: bool,
}

impl Flags {
    pub const NONE: Flags = Flags { nonnegative: false, monotone: false, normalized: false };
    pub const ALL: Flags = Flags { nonnegative: true, monotone: true, normalized: true };

    pub fn and(self, o: Flags) -> Flags {
        Flags {
            nonnegative: self.nonnegative && o.nonnegative,
            monotone: self.monotone && o.monotone,
            normalized: self.normalized && o.normalized,
        }
    }
}

type SetFn = dyn Fn(Subset) -> Rational + Send + Sync;

struct Memo {
    table: Mutex<HashMap<u64, Rational>>,
}

impl Memo {
    fn new() -> Arc<Memo> {
        Arc::new(Memo { table: Mutex::new(HashMap::new()) })
    }

    fn get_or(&self, key: u64, compute: impl FnOnce() -> Rational) -> Rational {
        if let Some(v) = self.table.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = compute();
        let mut t = self.table.lock().unwrap();
        if t.len() < MEMO_LIMIT {
            t.insert(key, v.clone());
        }
        v
    }
}

/// A set function f: 2^V → ℚ with claimed flags.
#[derive(Clone)]
pub struct SubmodularOracle {
    ground: GroundSet,
    name: Arc<str>,
    flags: Flags,
    eval: Arc<SetFn>,
    memo: Arc<Memo>,
}

impl fmt::Debug for SubmodularOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubmodularOracle({}, n={}, {:?})", self.name, self.ground.len(), self.flags)
    }
}

impl SubmodularOracle {
    pub fn new(
        ground: GroundSet,
        name: impl Into<String>,
        flags: Flags,
        eval: impl Fn(Subset) -> Rational + Send + Sync + 'static,
    ) -> Self {
        SubmodularOracle {
            ground,
            name: name.into().into(),
            flags,
            eval: Arc::new(eval),
            memo: Memo::new(),
        }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    /// Same function over a ground set of equal size with different labels.
    pub fn relabel(mut self, ground: GroundSet) -> Result<Self> {
        if ground.len() != self.n() {
            return Err(Error::ArityMismatch { expected: self.n(), got: ground.len() });
        }
        self.ground = ground;
        Ok(self)
    }

    pub fn evaluate(&self, s: Subset) -> Result<Rational> {
        self.ground.check(s)?;
        Ok(self.value(s))
    }

    /// Unchecked evaluation for callers that built `s` over this ground set.
    pub fn value(&self, s: Subset) -> Rational {
        debug_assert!(s.fits(self.n()));
        self.memo.get_or(s.bits(), || (self.eval)(s))
    }

    /// Evaluation that bypasses the memo, for one-shot exhaustive scans.
    pub fn value_uncached(&self, s: Subset) -> Rational {
        (self.eval)(s)
    }

    pub fn marginal(&self, s: Subset, v: usize) -> Result<Rational> {
        self.ground.check(s)?;
        if v >= self.n() {
            return Err(Error::DomainMismatch(format!("element {v} outside ground set")));
        }
        if s.contains(v) {
            return Err(Error::Precondition(format!("element {} already in S", self.ground.label(v))));
        }
        Ok(self.value(s.with(v)) - self.value(s))
    }

    /// Values of every subset, indexed by bitmask.
    pub fn value_table(&self, cap: usize) -> Result<Vec<Rational>> {
        crate::error::cap_check("ground set size", self.n() as u64, cap as u64)?;
        Ok(crate::subset::all_subsets(self.n()).map(|s| (self.eval)(s)).collect())
    }

    /// f restricted to `keep`, re-indexed onto `0..|keep|` in ascending order.
    pub fn restrict(&self, keep: Subset) -> Result<SubmodularOracle> {
        self.ground.check(keep)?;
        let elems: Vec<usize> = keep.iter().collect();
        let labels = elems.iter().map(|&v| self.ground.label(v).to_string()).collect();
        let ground = GroundSet::new(labels)?;
        let parent = self.clone();
        let map = elems.clone();
        Ok(SubmodularOracle::new(ground, format!("{}|restricted", self.name), self.flags, move |s| {
            parent.value(Subset::from_iter(s.iter().map(|j| map[j])))
        }))
    }

    /// f(S) − Σ_{v∈S} w(v); the result is submodular whenever f is.
    pub fn minus_modular(&self, w: Vec<Rational>) -> SubmodularOracle {
        let parent = self.clone();
        let flags = Flags { normalized: self.flags.normalized, ..Flags::NONE };
        SubmodularOracle::new(self.ground.clone(), format!("{}-modular", self.name), flags, move |s| {
            let mut v = parent.value(s);
            for e in s.iter() {
                v -= &w[e];
            }
            v
        })
    }

    pub fn sum(parts: &[SubmodularOracle]) -> Result<SubmodularOracle> {
        let first = parts.first().ok_or_else(|| Error::InvalidInput("empty sum".into()))?;
        if parts.iter().any(|p| p.ground != first.ground) {
            return Err(Error::DomainMismatch("summands on different ground sets".into()));
        }
        let flags = parts.iter().fold(Flags::ALL, |a, p| a.and(p.flags));
        let parts = parts.to_vec();
        Ok(SubmodularOracle::new(first.ground.clone(), "sum", flags, move |s| {
            parts.iter().fold(Rational::zero(), |acc, p| acc + p.value(s))
        }))
    }
}

type TupleFn = dyn Fn(&SetTuple) -> Rational + Send + Sync;

/// A tuple function g: (2^V)^k → ℚ, defined on all tuples, disjoint or not.
#[derive(Clone)]
pub struct MultivariateOracle {
    ground: GroundSet,
    k: usize,
    name: Arc<str>,
    flags: Flags,
    eval: Arc<TupleFn>,
    memo: Arc<Memo>,
}

impl fmt::Debug for MultivariateOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultivariateOracle({}, n={}, k={}, {:?})", self.name, self.ground.len(), self.k, self.flags)
    }
}

impl MultivariateOracle {
    pub fn new(
        ground: GroundSet,
        k: usize,
        name: impl Into<String>,
        flags: Flags,
        eval: impl Fn(&SetTuple) -> Rational + Send + Sync + 'static,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("at least one agent required".into()));
        }
        if k * ground.len() > crate::subset::MAX_ELEMENTS {
            return Err(Error::InvalidInput(format!(
                "k·n = {} exceeds {}",
                k * ground.len(),
                crate::subset::MAX_ELEMENTS
            )));
        }
        Ok(MultivariateOracle { ground, k, name: name.into().into(), flags, eval: Arc::new(eval), memo: Memo::new() })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn evaluate_tuple(&self, t: &SetTuple) -> Result<Rational> {
        if t.k() != self.k {
            return Err(Error::ArityMismatch { expected: self.k, got: t.k() });
        }
        for &s in t.parts() {
            self.ground.check(s)?;
        }
        Ok(self.value(t))
    }

    pub fn value(&self, t: &SetTuple) -> Rational {
        let n = self.n();
        let key = t.parts().iter().enumerate().fold(0u64, |acc, (i, s)| acc | s.bits() << (i * n));
        self.memo.get_or(key, || (self.eval)(t))
    }

    pub fn sum(parts: &[MultivariateOracle]) -> Result<MultivariateOracle> {
        let first = parts.first().ok_or_else(|| Error::InvalidInput("empty sum".into()))?;
        if parts.iter().any(|p| p.ground != first.ground || p.k != first.k) {
            return Err(Error::DomainMismatch("summands disagree on ground set or k".into()));
        }
        let flags = parts.iter().fold(Flags::ALL, |a, p| a.and(p.flags));
        let parts = parts.to_vec();
        MultivariateOracle::new(first.ground.clone(), first.k, "sum", flags, move |t| {
            parts.iter().fold(Rational::zero(), |acc, p| acc + p.value(t))
        })
    }
}
