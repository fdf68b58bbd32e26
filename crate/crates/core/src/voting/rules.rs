use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use super::{Candidate, Profile, Vote};
use crate::error::{Error, Result};

/// A resolute-by-tiebreak voting correspondence from the positional family.
///
/// Implementations provide the per-rank score vector; cowinners and the
/// outcome-equivalence key of a ballot have default definitions.
pub trait VotingRule: Send + Sync + fmt::Debug {
    /// Registry name, e.g. `plurality`.
    fn name(&self) -> &str;

    /// Points awarded for ranks 1..=m, non-increasing.
    fn score_vector(&self, m: usize) -> Vec<i64>;

    /// Scenario-file form of this rule (`plurality`, `positional 3 1 0`).
    fn describe(&self) -> String {
        self.name().to_string()
    }

    /// Rejects rules that do not fit an election with `m` candidates.
    fn check(&self, m: usize) -> Result<()> {
        let s = self.score_vector(m);
        if s.len() != m {
            return Err(Error::domain(format!(
                "rule `{}` has {} scores for {m} candidates",
                self.name(),
                s.len()
            )));
        }
        if s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain(format!(
                "rule `{}` scores must be non-increasing",
                self.name()
            )));
        }
        Ok(())
    }

    fn scores(&self, p: &Profile) -> Vec<i64> {
        let weights = self.score_vector(p.candidates());
        let mut totals = vec![0i64; p.candidates()];
        for v in p.votes() {
            for (rank, c) in v.ranking().iter().enumerate() {
                totals[c.0] += weights[rank];
            }
        }
        totals
    }

    fn cowinners(&self, p: &Profile) -> Vec<Candidate> {
        let totals = self.scores(p);
        let best = *totals.iter().max().expect("at least one candidate");
        totals
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == best)
            .map(|(i, _)| Candidate(i))
            .collect()
    }

    /// Two ballots with equal keys give the same outcome in every completion
    /// of the other votes.
    fn ballot_key(&self, v: &Vote) -> Vec<Candidate> {
        v.ranking().to_vec()
    }
}

/// One point for the top candidate.
#[derive(Debug, Clone, Copy, Default)]
pub struct Plurality;

impl VotingRule for Plurality {
    fn name(&self) -> &str {
        "plurality"
    }

    fn score_vector(&self, m: usize) -> Vec<i64> {
        let mut s = vec![0; m];
        if m > 0 {
            s[0] = 1;
        }
        s
    }

    fn ballot_key(&self, v: &Vote) -> Vec<Candidate> {
        vec![v.top()]
    }
}

/// `m - 1` points for the top candidate down to 0 for the last.
#[derive(Debug, Clone, Copy, Default)]
pub struct Borda;

impl VotingRule for Borda {
    fn name(&self) -> &str {
        "borda"
    }

    fn score_vector(&self, m: usize) -> Vec<i64> {
        (0..m as i64).rev().collect()
    }
}

/// An explicit score vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Positional {
    weights: Vec<i64>,
}

impl Positional {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("positional rule needs a score vector"));
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("positional scores must be non-increasing"));
        }
        Ok(Positional { weights })
    }
}

impl VotingRule for Positional {
    fn name(&self) -> &str {
        "positional"
    }

    fn score_vector(&self, _m: usize) -> Vec<i64> {
        self.weights.clone()
    }

    fn describe(&self) -> String {
        format!("positional {}", self.weights.iter().join(" "))
    }
}

/// Builds a rule from its scenario-file parameters.
pub type RuleFactory = fn(&[i64]) -> Result<Arc<dyn VotingRule>>;

/// Voting rules selectable by name.
#[derive(Clone)]
pub struct RuleRegistry {
    factories: BTreeMap<String, RuleFactory>,
}

impl fmt::Debug for RuleRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

fn no_params(name: &str, params: &[i64]) -> Result<()> {
    if params.is_empty() {
        Ok(())
    } else {
        Err(Error::domain(format!("rule `{name}` takes no parameters")))
    }
}

impl Default for RuleRegistry {
    fn default() -> Self {
        let mut r = RuleRegistry {
            factories: BTreeMap::new(),
        };
        r.register("plurality", |p| {
            no_params("plurality", p)?;
            Ok(Arc::new(Plurality))
        });
        r.register("borda", |p| {
            no_params("borda", p)?;
            Ok(Arc::new(Borda))
        });
        r.register("positional", |p| Ok(Arc::new(Positional::new(p.to_vec())?)));
        r
    }
}

impl RuleRegistry {
    pub fn register(&mut self, name: &str, factory: RuleFactory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, params: &[i64]) -> Result<Arc<dyn VotingRule>> {
        let factory = self.factories.get(name).ok_or_else(|| {
            Error::domain(format!(
                "unknown voting rule `{name}` (known: {})",
                self.names().join(", ")
            ))
        })?;
        factory(params)
    }

    /// Parses `name [int ...]`.
    pub fn parse(&self, text: &str) -> Result<Arc<dyn VotingRule>> {
        let mut words = text.split_whitespace();
        let name = words
            .next()
            .ok_or_else(|| Error::domain("empty rule description"))?;
        let params = words
            .map(|w| {
                w.parse::<i64>()
                    .map_err(|_| Error::domain(format!("rule parameter `{w}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.build(name, &params)
    }
}
