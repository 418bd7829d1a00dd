use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{MultivariateOracle, SubmodularOracle};
use crate::rational::Rational;
use crate::subset::SetTuple;

/// k pairwise-disjoint subsets with their cost or value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiAgentSolution {
    pub tuple: SetTuple,
    /// Present when the objective is a sum of per-agent functions.
    #[serde(with = "per_agent_serde")]
    pub per_agent: Option<Vec<Rational>>,
    #[serde(with = "crate::rational::serde_str")]
    pub total: Rational,
}

mod per_agent_serde {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|xs| xs.iter().map(crate::rational::format).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        let v = Option::<Vec<String>>::deserialize(d)?;
        v.map(|xs| {
            xs.iter()
                .map(|x| crate::rational::parse(x).ok_or_else(|| serde::de::Error::custom("malformed rational")))
                .collect()
        })
        .transpose()
    }
}

impl MultiAgentSolution {
    pub fn from_agents(tuple: SetTuple, fs: &[SubmodularOracle]) -> Result<Self> {
        if tuple.k() != fs.len() {
            return Err(Error::ArityMismatch { expected: fs.len(), got: tuple.k() });
        }
        let per: Vec<Rational> = fs.iter().zip(tuple.parts()).map(|(f, &s)| f.value(s)).collect();
        let total = per.iter().fold(Rational::zero(), |a, b| a + b);
        Ok(MultiAgentSolution { tuple, per_agent: Some(per), total })
    }

    pub fn from_multivariate(tuple: SetTuple, g: &MultivariateOracle) -> Result<Self> {
        let total = g.evaluate_tuple(&tuple)?;
        Ok(MultiAgentSolution { tuple, per_agent: None, total })
    }

    pub fn is_disjoint(&self) -> bool {
        self.tuple.is_disjoint()
    }
}

/// Keeps each element only in the lowest-index agent that holds it.
pub fn disjointify(tuple: &SetTuple) -> SetTuple {
    let mut taken = crate::subset::Subset::EMPTY;
    SetTuple::new(
        tuple
            .parts()
            .iter()
            .map(|&s| {
                let kept = s.difference(taken);
                taken = taken.union(s);
                kept
            })
            .collect(),
    )
}
