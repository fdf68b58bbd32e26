//! Imperative updates: public announcement and public assignment of
//! declared votes, with a preservation experiment for knowledge of
//! manipulation.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;

use crate::epistemic::KnowledgeProfile;
use crate::error::{Error, Result};
use crate::logic::{render, render_assignments, Assignment, DeclaredBallots, EvalContext, Formula};
use crate::manipulation::{classify, ManipulationReport};
use crate::voting::{Candidate, Election, Vote, Voter};

/// Restricts the model to the states where `f` holds. Fails when `f` is
/// false at the point.
pub fn announce(
    ctx: &EvalContext<'_>,
    kp: &KnowledgeProfile,
    declared: &DeclaredBallots,
    f: &Formula,
) -> Result<(KnowledgeProfile, DeclaredBallots)> {
    if !ctx.holds(&kp.model, declared, kp.point, f)? {
        return Err(Error::AnnouncementFailed {
            point: kp.point_name().to_string(),
        });
    }
    let keep = ctx.truth_set(&kp.model, declared, f)?;
    let model = kp.model.restrict(&keep)?;
    let point = keep.binary_search(&kp.point).expect("point survives");
    Ok((KnowledgeProfile::new(model, point)?, declared.restrict(&keep)))
}

/// Applies a simultaneous assignment batch.
pub fn assign(
    ctx: &EvalContext<'_>,
    kp: &KnowledgeProfile,
    declared: &DeclaredBallots,
    batch: &[Assignment],
) -> Result<DeclaredBallots> {
    ctx.apply_assignments(&kp.model, declared, batch)
}

/// `x >>_i y := true` for each pair ranked by `vote`, and `:= false` for the
/// reversed pairs, so that a later declaration replaces an earlier one.
pub fn declare_vote_batch(i: Voter, vote: &Vote) -> Vec<Assignment> {
    let mut batch = Vec::new();
    for (x, y) in vote.pairs() {
        batch.push(Assignment::Pair {
            better: x,
            voter: i,
            worse: y,
            value: Arc::new(Formula::True),
        });
    }
    for (x, y) in vote.pairs() {
        batch.push(Assignment::Pair {
            better: y,
            voter: i,
            worse: x,
            value: Arc::new(Formula::False),
        });
    }
    batch
}

/// `x >>_i y := x >_i y` for every ordered pair of distinct candidates.
pub fn declare_truthful_batch(i: Voter, m: usize) -> Vec<Assignment> {
    (0..m)
        .cartesian_product(0..m)
        .filter(|(x, y)| x != y)
        .map(|(x, y)| {
            let (x, y) = (Candidate(x), Candidate(y));
            Assignment::Pair {
                better: x,
                voter: i,
                worse: y,
                value: Arc::new(Formula::Pref(x, i, y)),
            }
        })
        .collect()
}

/// Winner of the declared profile at `s`, when every voter has declared a
/// complete ballot there.
pub fn declared_winner(election: &Election, declared: &DeclaredBallots, s: usize) -> Option<Candidate> {
    declared
        .declared_profile(s, election.m())
        .map(|p| election.winner(&p))
}

/// Transcript line of an announcement.
pub fn announce_trace(f: &Formula, ctx: &EvalContext<'_>, after: &KnowledgeProfile) -> String {
    format!(
        "announce {} | states: {}",
        render(f, &ctx.election.candidates),
        after.model.names().join(" ")
    )
}

/// Transcript line of an assignment batch.
pub fn assign_trace(batch: &[Assignment], ctx: &EvalContext<'_>) -> String {
    format!("assign {}", render_assignments(batch, &ctx.election.candidates))
}

/// Knowledge of manipulation before and after an announcement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationReport {
    pub voter: Voter,
    pub formula: Formula,
    pub before: ManipulationReport,
    pub after: ManipulationReport,
    pub states_before: Vec<String>,
    pub states_after: Vec<String>,
}

impl PreservationReport {
    /// De dicto and de re knowledge survive, de re with every witness kept.
    pub fn preserves_knowledge(&self) -> bool {
        (!self.before.de_dicto || self.after.de_dicto)
            && (!self.before.de_re || self.after.de_re)
            && self.before.de_re_witnesses.is_subset(&self.after.de_re_witnesses)
    }

    /// Weak de re knowledge held before the announcement but not after.
    pub fn loses_weak_de_re(&self) -> bool {
        self.before.de_re_weak && !self.after.de_re_weak
    }

    pub fn loses_considers_possible(&self) -> bool {
        self.before.considers_possible && !self.after.considers_possible
    }

    pub fn survivors(&self) -> BTreeSet<&str> {
        self.states_after.iter().map(String::as_str).collect()
    }
}

/// Classifies `i`, announces `f`, classifies again.
pub fn preservation_experiment(
    ctx: &EvalContext<'_>,
    kp: &KnowledgeProfile,
    declared: &DeclaredBallots,
    i: Voter,
    f: &Formula,
) -> Result<PreservationReport> {
    let before = classify(kp, i, ctx.election)?;
    let (after_kp, _) = announce(ctx, kp, declared, f)?;
    let after = classify(&after_kp, i, ctx.election)?;
    Ok(PreservationReport {
        voter: i,
        formula: f.clone(),
        before,
        after,
        states_before: kp.model.names().to_vec(),
        states_after: after_kp.model.names().to_vec(),
    })
}
