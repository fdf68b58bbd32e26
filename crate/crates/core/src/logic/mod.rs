//! Epistemic formulas over knowledge profiles: syntax, concrete grammar,
//! printing and model checking.
//!
//! The language has preference atoms `a >_i b`, declared-vote atoms
//! `a >>_i b`, Boolean connectives, individual (`K_i`), common (`C_G`) and
//! distributed (`D_G`) knowledge, public announcements `[! φ] ψ`, public
//! assignments `[a >>_i b := φ, ...] ψ`, and a few derived atoms (winner,
//! profile/vote descriptions, outcome comparison between profiles).

mod eval;
mod parse;
mod print;

pub use eval::{eval, eval_at_states, valid_on_model, DeclaredBallots, EvalContext, NamedProfiles};
pub(crate) use parse::is_reserved;
pub use parse::{parse_assignments, parse_formula, Vocabulary};
pub use print::{render, render_assignments};

use std::sync::Arc;

use crate::voting::{Candidate, Election, Profile, Vote, Voter};

/// A profile referenced by a formula: the valuation of a named state or an
/// inline literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProfileTerm {
    State(String),
    Literal(Arc<Profile>),
}

impl From<Profile> for ProfileTerm {
    fn from(p: Profile) -> Self {
        ProfileTerm::Literal(Arc::new(p))
    }
}

/// One entry of a simultaneous assignment batch.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Assignment {
    /// `x >>_i y := φ`
    Pair {
        better: Candidate,
        voter: Voter,
        worse: Candidate,
        value: Arc<Formula>,
    },
    /// `decl(i, s)`: every pair of `i`'s vote in the referenced profile
    /// becomes declared everywhere.
    Declare { voter: Voter, source: ProfileTerm },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// `x >_i y`: voter `i` truly prefers `x` to `y`.
    Pref(Candidate, Voter, Candidate),
    /// `x >>_i y`: voter `i` has declared `x` above `y`.
    Decl(Candidate, Voter, Candidate),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Know(Voter, Arc<Formula>),
    Common(Vec<Voter>, Arc<Formula>),
    Distrib(Vec<Voter>, Arc<Formula>),
    Announce(Arc<Formula>, Arc<Formula>),
    Assign(Vec<Assignment>, Arc<Formula>),
    /// The winner of `left` is strictly preferred to the winner of `right`
    /// by voter `voter`'s vote in `anchor` (in `left` when absent).
    /// Independent of the evaluation state.
    OutcomePref {
        voter: Voter,
        left: ProfileTerm,
        right: ProfileTerm,
        anchor: Option<ProfileTerm>,
    },
    /// The winner at the current state is this candidate.
    Win(Candidate),
    /// The current state's profile is the referenced one.
    ProfileIs(ProfileTerm),
    /// Voter `i`'s current vote equals her vote in the referenced profile.
    VoteIs(Voter, ProfileTerm),
}

type F = Arc<Formula>;

impl Formula {
    pub fn not(f: impl Into<F>) -> Formula {
        Formula::Not(f.into())
    }

    pub fn and(a: impl Into<F>, b: impl Into<F>) -> Formula {
        Formula::And(a.into(), b.into())
    }

    pub fn or(a: impl Into<F>, b: impl Into<F>) -> Formula {
        Formula::Or(a.into(), b.into())
    }

    pub fn imp(a: impl Into<F>, b: impl Into<F>) -> Formula {
        Formula::Imp(a.into(), b.into())
    }

    pub fn iff(a: impl Into<F>, b: impl Into<F>) -> Formula {
        Formula::Iff(a.into(), b.into())
    }

    pub fn know(i: Voter, f: impl Into<F>) -> Formula {
        Formula::Know(i, f.into())
    }

    /// `¬K_i¬φ`: voter `i` considers `φ` possible.
    pub fn possible(i: Voter, f: impl Into<F>) -> Formula {
        Formula::not(Formula::know(i, Formula::not(f)))
    }

    pub fn common(group: &[Voter], f: impl Into<F>) -> Formula {
        Formula::Common(canonical_group(group), f.into())
    }

    pub fn distrib(group: &[Voter], f: impl Into<F>) -> Formula {
        Formula::Distrib(canonical_group(group), f.into())
    }

    pub fn announce(premise: impl Into<F>, body: impl Into<F>) -> Formula {
        Formula::Announce(premise.into(), body.into())
    }

    pub fn outcome_pref(voter: Voter, left: impl Into<ProfileTerm>, right: impl Into<ProfileTerm>) -> Formula {
        Formula::OutcomePref {
            voter,
            left: left.into(),
            right: right.into(),
            anchor: None,
        }
    }

    pub fn outcome_pref_by(
        voter: Voter,
        left: impl Into<ProfileTerm>,
        right: impl Into<ProfileTerm>,
        anchor: impl Into<ProfileTerm>,
    ) -> Formula {
        Formula::OutcomePref {
            voter,
            left: left.into(),
            right: right.into(),
            anchor: Some(anchor.into()),
        }
    }

    /// Balanced conjunction; `True` when empty.
    pub fn conjunction(parts: Vec<F>) -> Formula {
        balanced(parts, Formula::True, Formula::And)
    }

    /// Balanced disjunction; `False` when empty.
    pub fn disjunction(parts: Vec<F>) -> Formula {
        balanced(parts, Formula::False, Formula::Or)
    }

    /// Node count, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + match self {
            Formula::True
            | Formula::False
            | Formula::Pref(..)
            | Formula::Decl(..)
            | Formula::OutcomePref { .. }
            | Formula::Win(_)
            | Formula::ProfileIs(_)
            | Formula::VoteIs(..) => 0,
            Formula::Not(f) | Formula::Know(_, f) | Formula::Common(_, f) | Formula::Distrib(_, f) => {
                f.size()
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Imp(a, b)
            | Formula::Iff(a, b)
            | Formula::Announce(a, b) => a.size() + b.size(),
            Formula::Assign(items, body) => {
                body.size()
                    + items
                        .iter()
                        .map(|it| match it {
                            Assignment::Pair { value, .. } => value.size(),
                            Assignment::Declare { .. } => 1,
                        })
                        .sum::<usize>()
            }
        }
    }

    /// Whether the formula mentions no epistemic or dynamic operator.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Know(..)
            | Formula::Common(..)
            | Formula::Distrib(..)
            | Formula::Announce(..)
            | Formula::Assign(..) => false,
            Formula::Not(f) => f.is_propositional(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            _ => true,
        }
    }
}

fn canonical_group(group: &[Voter]) -> Vec<Voter> {
    let mut g = group.to_vec();
    g.sort();
    g.dedup();
    g
}

fn balanced(mut parts: Vec<F>, empty: Formula, join: fn(F, F) -> Formula) -> Formula {
    fn build(parts: &mut [F], join: fn(F, F) -> Formula) -> F {
        if parts.len() == 1 {
            return parts[0].clone();
        }
        let mid = parts.len() / 2;
        let (l, r) = parts.split_at_mut(mid);
        Arc::new(join(build(l, join), build(r, join)))
    }
    match parts.len() {
        0 => empty,
        1 => Arc::try_unwrap(parts.pop().unwrap()).unwrap_or_else(|a| (*a).clone()),
        _ => Arc::try_unwrap(build(&mut parts, join)).unwrap_or_else(|a| (*a).clone()),
    }
}

/// Literal for voter `i`'s comparison of `x` and `y` in `v`: the atom or its
/// negation.
fn pref_literal(v: &Vote, x: Candidate, i: Voter, y: Candidate) -> F {
    let atom = Formula::Pref(x, i, y);
    Arc::new(if v.prefers(x, y) { atom } else { Formula::not(atom) })
}

/// The description of voter `i`'s vote: every ordered pair of distinct
/// candidates as an atom or a negated atom.
pub fn vote_formula(i: Voter, v: &Vote) -> Formula {
    let m = v.len();
    let mut parts = Vec::with_capacity(m * m.saturating_sub(1));
    for x in 0..m {
        for y in 0..m {
            if x != y {
                parts.push(pref_literal(v, Candidate(x), i, Candidate(y)));
            }
        }
    }
    Formula::conjunction(parts)
}

/// The description of a whole profile.
pub fn profile_formula(p: &Profile) -> Formula {
    Formula::conjunction(
        p.voter_ids()
            .map(|i| Arc::new(vote_formula(i, p.vote(i))))
            .collect(),
    )
}

/// Description-level sentence for "`p` and `q` agree on every voter but `i`":
/// for each other voter and pair, the truth value in `p` is equivalent to
/// the truth value in `q`.
pub fn differ_formula(i: Voter, p: &Profile, q: &Profile) -> Formula {
    let constant = |b: bool| Arc::new(if b { Formula::True } else { Formula::False });
    let m = p.candidates();
    let mut parts = Vec::new();
    for j in p.voter_ids().filter(|&j| j != i) {
        for x in 0..m {
            for y in 0..m {
                if x != y {
                    let (x, y) = (Candidate(x), Candidate(y));
                    parts.push(Arc::new(Formula::Iff(
                        constant(p.vote(j).prefers(x, y)),
                        constant(q.vote(j).prefers(x, y)),
                    )));
                }
            }
        }
    }
    Formula::conjunction(parts)
}

/// `win(x)` spelled out as the disjunction of the descriptions of every
/// profile whose winner is `x`.
pub fn win_expansion(x: Candidate, election: &Election) -> crate::Result<Formula> {
    let profiles = crate::voting::all_profiles(election.voters, election.m(), &election.limits)?;
    Ok(Formula::disjunction(
        profiles
            .iter()
            .filter(|p| election.winner(p) == x)
            .map(|p| Arc::new(profile_formula(p)))
            .collect(),
    ))
}
