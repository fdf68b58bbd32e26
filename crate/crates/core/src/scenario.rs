//! Line-oriented scenario files describing an election and a knowledge
//! profile.
//!
//! ```text
//! # comment
//! candidates: a b c d
//! voters: 2
//! rule: plurality
//! tiebreak: b a c d
//! state t: 1: a c b d ; 2: d c b a
//! state u: 1: d c b a ; 2: d c b a
//! partition 1: t | u
//! partition 2: t u
//! point: t
//! ```
//!
//! Instead of `state` lines, `partial <voter>: x>y ...` lines give strict
//! pairwise constraints; the model then has one state per completion and
//! identity partitions. Omitted partitions default to the identity, an
//! omitted point to the first state.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;

use crate::epistemic::{
    expand_partial_profile, render_partition, KnowledgeProfile, Partition, PartialOrderSpec, ProfileModel,
};
use crate::error::{Error, Limits, Result};
use crate::logic::Vocabulary;
use crate::voting::{Candidate, CandidateSet, Election, Profile, RuleRegistry, TieBreak, Vote, Voter};

/// A loaded, validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub election: Election,
    pub model: ProfileModel,
    pub point: usize,
    /// Present when the states were generated from partial orders.
    pub partial: Option<PartialOrderSpec>,
}

impl Scenario {
    pub fn knowledge_profile(&self) -> KnowledgeProfile {
        KnowledgeProfile::new(self.model.clone(), self.point).expect("point validated at load")
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary {
            candidates: self.election.candidates.clone(),
            voters: self.election.voters,
            states: self.model.names().to_vec(),
        }
    }

    /// Moves the point to the named state.
    pub fn with_point(mut self, name: &str) -> Result<Self> {
        self.point = self.model.state(name)?;
        Ok(self)
    }

    /// Serializes back to the scenario grammar.
    pub fn to_text(&self) -> String {
        let e = &self.election;
        let cs = &e.candidates;
        let mut out = String::new();
        out.push_str(&format!("candidates: {}\n", cs.names().join(" ")));
        out.push_str(&format!("voters: {}\n", e.voters));
        out.push_str(&format!("rule: {}\n", e.rule.describe()));
        out.push_str(&format!("tiebreak: {}\n", cs.render_vote(e.tiebreak.order(), " ")));
        match &self.partial {
            Some(spec) => {
                for (i, pairs) in spec.constraints.iter().enumerate() {
                    let body = pairs
                        .iter()
                        .map(|&(x, y)| format!("{}>{}", cs.name(x), cs.name(y)))
                        .join(" ");
                    out.push_str(&format!("partial {}: {body}\n", i + 1).replace(": \n", ":\n"));
                }
            }
            None => {
                for s in self.model.states() {
                    let votes = self
                        .model
                        .profile(s)
                        .votes()
                        .iter()
                        .enumerate()
                        .map(|(i, v)| format!("{}: {}", i + 1, cs.render_vote(v, " ")))
                        .join(" ; ");
                    out.push_str(&format!("state {}: {votes}\n", self.model.name(s)));
                }
                for (i, p) in self.model.partitions().iter().enumerate() {
                    out.push_str(&format!("partition {}: {}\n", i + 1, render_partition(&self.model, p)));
                }
            }
        }
        out.push_str(&format!("point: {}\n", self.model.name(self.point)));
        out
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn invalid(line: usize, message: impl Into<String>) -> Error {
    Error::Validation {
        line,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn check_name(line: usize, kind: &str, name: &str) -> Result<()> {
    if !is_identifier(name) {
        return Err(invalid(line, format!("{kind} name `{name}` is not an identifier")));
    }
    if crate::logic::is_reserved(name) {
        return Err(invalid(line, format!("{kind} name `{name}` is reserved")));
    }
    Ok(())
}

#[derive(Debug)]
enum Directive {
    Candidates(Vec<String>),
    Voters(usize),
    Rule(String),
    TieBreak(String),
    State(String, Vec<(usize, String)>),
    Partition(usize, Vec<Vec<String>>),
    Point(String),
    Partial(usize, Vec<(String, String)>),
}

fn parse_voter_number(line: usize, column: usize, text: &str) -> Result<usize> {
    match text.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(syntax(line, column, format!("expected a voter number, found `{}`", text.trim()))),
    }
}

fn parse_line(line: usize, raw: &str) -> Result<Option<Directive>> {
    let text = raw.split('#').next().unwrap_or("");
    if text.trim().is_empty() {
        return Ok(None);
    }
    let indent = text.len() - text.trim_start().len();
    let Some(colon) = text.find(':') else {
        return Err(syntax(line, indent + 1, "expected `keyword: value`"));
    };
    let head: Vec<&str> = text[..colon].split_whitespace().collect();
    let body = &text[colon + 1..];
    let body_col = colon + 2;
    let words = || body.split_whitespace().map(String::from).collect::<Vec<_>>();
    let d = match head.as_slice() {
        ["candidates"] => Directive::Candidates(words()),
        ["voters"] => Directive::Voters(parse_voter_number(line, body_col, body)?),
        ["rule"] => Directive::Rule(body.trim().to_string()),
        ["tiebreak"] => Directive::TieBreak(body.trim().to_string()),
        ["point"] => Directive::Point(body.trim().to_string()),
        ["state", name] => {
            let mut votes = Vec::new();
            let mut offset = body_col;
            for part in body.split(';') {
                let Some(c) = part.find(':') else {
                    return Err(syntax(line, offset, "expected `voter: ranking`"));
                };
                let voter = parse_voter_number(line, offset, &part[..c])?;
                votes.push((voter, part[c + 1..].trim().to_string()));
                offset += part.len() + 1;
            }
            Directive::State(name.to_string(), votes)
        }
        ["partition", voter] => {
            let voter = parse_voter_number(line, indent + 1, voter)?;
            let blocks = body
                .split('|')
                .map(|b| b.split_whitespace().map(String::from).collect())
                .collect();
            Directive::Partition(voter, blocks)
        }
        ["partial", voter] => {
            let voter = parse_voter_number(line, indent + 1, voter)?;
            let mut pairs = Vec::new();
            for w in body.split_whitespace() {
                let Some((x, y)) = w.split_once('>') else {
                    return Err(syntax(line, body_col, format!("expected `x>y`, found `{w}`")));
                };
                pairs.push((x.to_string(), y.to_string()));
            }
            Directive::Partial(voter, pairs)
        }
        _ => {
            return Err(syntax(
                line,
                indent + 1,
                format!("unknown directive `{}`", text[..colon].trim()),
            ))
        }
    };
    Ok(Some(d))
}

/// Loads a scenario with the default rule registry and limits.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    load_scenario_with(text, &RuleRegistry::default(), Limits::default())
}

pub fn load_scenario_with(text: &str, rules: &RuleRegistry, limits: Limits) -> Result<Scenario> {
    let mut directives = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        if let Some(d) = parse_line(k + 1, raw)? {
            directives.push((k + 1, d));
        }
    }
    let last_line = text.lines().count().max(1);
    let single = |pick: fn(&Directive) -> bool, what: &str| -> Result<Option<(usize, &Directive)>> {
        let mut found = directives.iter().filter(|(_, d)| pick(d));
        let first = found.next();
        if let Some((l, _)) = found.next() {
            return Err(invalid(*l, format!("duplicate `{what}` line")));
        }
        Ok(first.map(|(l, d)| (*l, d)))
    };

    let (cand_line, names) = match single(|d| matches!(d, Directive::Candidates(_)), "candidates")? {
        Some((l, Directive::Candidates(n))) => (l, n),
        _ => return Err(invalid(last_line, "missing `candidates` line")),
    };
    for n in names {
        check_name(cand_line, "candidate", n)?;
    }
    let candidates = CandidateSet::new(names).map_err(|e| invalid(cand_line, e.to_string()))?;
    let voters = match single(|d| matches!(d, Directive::Voters(_)), "voters")? {
        Some((_, Directive::Voters(n))) => *n,
        _ => return Err(invalid(last_line, "missing `voters` line")),
    };
    let (rule_line, rule) = match single(|d| matches!(d, Directive::Rule(_)), "rule")? {
        Some((l, Directive::Rule(r))) => (l, rules.parse(r).map_err(|e| invalid(l, e.to_string()))?),
        _ => return Err(invalid(last_line, "missing `rule` line")),
    };
    let tiebreak = match single(|d| matches!(d, Directive::TieBreak(_)), "tiebreak")? {
        Some((l, Directive::TieBreak(t))) => {
            TieBreak::new(candidates.parse_vote(t).map_err(|e| invalid(l, format!("tiebreak: {e}")))?)
        }
        _ => return Err(invalid(last_line, "missing `tiebreak` line")),
    };
    let election = Election::new(candidates.clone(), voters, rule, tiebreak)
        .map_err(|e| invalid(rule_line, e.to_string()))?
        .with_limits(limits);

    let check_voter = |l: usize, n: usize| -> Result<Voter> {
        if n > voters {
            return Err(invalid(l, format!("voter {n} out of range 1..{voters}")));
        }
        Ok(Voter::from_index(n - 1))
    };

    let states: Vec<(usize, &String, &Vec<(usize, String)>)> = directives
        .iter()
        .filter_map(|(l, d)| match d {
            Directive::State(n, v) => Some((*l, n, v)),
            _ => None,
        })
        .collect();
    let partials: Vec<(usize, usize, &Vec<(String, String)>)> = directives
        .iter()
        .filter_map(|(l, d)| match d {
            Directive::Partial(i, p) => Some((*l, *i, p)),
            _ => None,
        })
        .collect();
    let partitions: Vec<(usize, usize, &Vec<Vec<String>>)> = directives
        .iter()
        .filter_map(|(l, d)| match d {
            Directive::Partition(i, b) => Some((*l, *i, b)),
            _ => None,
        })
        .collect();

    let (model, partial) = if !partials.is_empty() {
        if let Some((l, ..)) = states.first() {
            return Err(invalid(*l, "`state` lines cannot be mixed with `partial` lines"));
        }
        if let Some((l, ..)) = partitions.first() {
            return Err(invalid(*l, "partial profiles use identity partitions; remove `partition` lines"));
        }
        let mut constraints: Vec<Option<Vec<(Candidate, Candidate)>>> = vec![None; voters];
        for (l, n, pairs) in &partials {
            let i = check_voter(*l, *n)?;
            if constraints[i.index()].is_some() {
                return Err(invalid(*l, format!("duplicate `partial` line for voter {n}")));
            }
            let pairs = pairs
                .iter()
                .map(|(x, y)| {
                    let x = candidates.lookup(x).map_err(|e| invalid(*l, e.to_string()))?;
                    let y = candidates.lookup(y).map_err(|e| invalid(*l, e.to_string()))?;
                    if x == y {
                        return Err(invalid(*l, "a constraint cannot relate a candidate to itself"));
                    }
                    Ok((x, y))
                })
                .collect::<Result<Vec<_>>>()?;
            constraints[i.index()] = Some(pairs);
        }
        let spec = PartialOrderSpec::new(constraints.into_iter().map(Option::unwrap_or_default).collect());
        let line = partials[0].0;
        let model = expand_partial_profile(&spec, &candidates, &limits).map_err(|e| match e {
            Error::Resource { .. } => e,
            other => invalid(line, other.to_string()),
        })?;
        (model, Some(spec))
    } else {
        if states.is_empty() {
            return Err(invalid(last_line, "no `state` or `partial` lines"));
        }
        let mut names = Vec::new();
        let mut index = BTreeMap::new();
        let mut valuation = Vec::new();
        for (l, name, votes) in &states {
            check_name(*l, "state", name)?;
            if index.insert(name.as_str(), names.len()).is_some() {
                return Err(invalid(*l, format!("duplicate state `{name}`")));
            }
            let mut slot: Vec<Option<Vote>> = vec![None; voters];
            for (n, ranking) in votes.iter() {
                let i = check_voter(*l, *n)?;
                if slot[i.index()].is_some() {
                    return Err(invalid(*l, format!("voter {n} ranked twice in state `{name}`")));
                }
                let v = candidates
                    .parse_vote(ranking)
                    .map_err(|e| invalid(*l, format!("voter {n} in state `{name}`: {e}")))?;
                slot[i.index()] = Some(v);
            }
            let votes = slot
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| invalid(*l, format!("state `{name}` has no ranking for voter {}", i + 1))))
                .collect::<Result<Vec<_>>>()?;
            valuation.push(Profile::new(votes).map_err(|e| invalid(*l, e.to_string()))?);
            names.push(name.to_string());
        }
        if names.len() > limits.max_states {
            return Err(Error::resource("scenario states", names.len() as u128, limits.max_states as u128));
        }
        let len = names.len();
        let mut parts: Vec<Option<Partition>> = vec![None; voters];
        for (l, n, blocks) in &partitions {
            let i = check_voter(*l, *n)?;
            if parts[i.index()].is_some() {
                return Err(invalid(*l, format!("duplicate partition for voter {n}")));
            }
            let mut idx_blocks = Vec::new();
            for b in blocks.iter() {
                if b.is_empty() {
                    return Err(invalid(*l, "empty partition block"));
                }
                idx_blocks.push(
                    b.iter()
                        .map(|s| {
                            index
                                .get(s.as_str())
                                .copied()
                                .ok_or_else(|| invalid(*l, format!("unknown state `{s}` in partition")))
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            let mut seen = vec![false; len];
            for &s in idx_blocks.iter().flatten() {
                if std::mem::replace(&mut seen[s], true) {
                    return Err(invalid(*l, format!("partition for voter {n}: state `{}` is in two blocks", names[s])));
                }
            }
            if let Some(s) = seen.iter().position(|&x| !x) {
                return Err(invalid(*l, format!("partition for voter {n} omits state `{}`", names[s])));
            }
            let p = Partition::new(idx_blocks, len).map_err(|e| invalid(*l, e.to_string()))?;
            parts[i.index()] = Some(p);
        }
        let partitions = parts
            .into_iter()
            .map(|p| p.unwrap_or_else(|| Partition::identity(len)))
            .collect();
        (
            ProfileModel::new(names, partitions, valuation).map_err(|e| invalid(states[0].0, e.to_string()))?,
            None,
        )
    };

    let point = match single(|d| matches!(d, Directive::Point(_)), "point")? {
        Some((l, Directive::Point(p))) => model
            .state(p)
            .map_err(|_| invalid(l, format!("point `{p}` is not a state")))?,
        _ => 0,
    };

    Ok(Scenario {
        election,
        model,
        point,
        partial,
    })
}

/// Replaces the voting rule, e.g. from a command-line override.
pub fn with_rule(mut scenario: Scenario, rule: Arc<dyn crate::voting::VotingRule>) -> Result<Scenario> {
    let e = &scenario.election;
    scenario.election =
        Election::new(e.candidates.clone(), e.voters, rule, e.tiebreak.clone())?.with_limits(e.limits);
    Ok(scenario)
}
