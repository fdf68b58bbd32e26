use std::collections::{BTreeMap, BTreeSet};

use super::{Assignment, Formula, ProfileTerm};
use crate::epistemic::{GroupMode, KnowledgeProfile, ProfileModel};
use crate::error::{Error, Result};
use crate::voting::{Candidate, Election, Profile, Vote, Voter};

/// Profiles addressable by state name, independent of later restrictions of
/// the model.
pub type NamedProfiles = BTreeMap<String, Profile>;

/// The declared-vote relation `≫_i` at each state, as a set of ordered pairs
/// per voter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredBallots {
    pairs: Vec<Vec<BTreeSet<(Candidate, Candidate)>>>,
}

impl DeclaredBallots {
    /// Nothing declared anywhere.
    pub fn empty(states: usize, voters: usize) -> Self {
        DeclaredBallots {
            pairs: vec![vec![BTreeSet::new(); voters]; states],
        }
    }

    /// Every voter has declared her true vote at every state.
    pub fn truthful(model: &ProfileModel) -> Self {
        DeclaredBallots {
            pairs: model
                .valuation()
                .iter()
                .map(|p| p.votes().iter().map(|v| v.pairs().collect()).collect())
                .collect(),
        }
    }

    pub fn states(&self) -> usize {
        self.pairs.len()
    }

    pub fn get(&self, s: usize, i: Voter) -> &BTreeSet<(Candidate, Candidate)> {
        &self.pairs[s][i.index()]
    }

    pub fn set(&mut self, s: usize, i: Voter, pairs: BTreeSet<(Candidate, Candidate)>) {
        self.pairs[s][i.index()] = pairs;
    }

    /// Replaces `i`'s declaration at `s` with the pairs of `v`.
    pub fn set_vote(&mut self, s: usize, i: Voter, v: &Vote) {
        self.pairs[s][i.index()] = v.pairs().collect();
    }

    pub fn restrict(&self, keep: &[usize]) -> Self {
        DeclaredBallots {
            pairs: keep.iter().map(|&s| self.pairs[s].clone()).collect(),
        }
    }

    /// The ballot `i` has declared at `s`, when the declared pairs form a
    /// complete strict linear order over `m` candidates.
    pub fn declared_vote(&self, s: usize, i: Voter, m: usize) -> Option<Vote> {
        let pairs = self.get(s, i);
        if pairs.len() != m * m.saturating_sub(1) / 2 {
            return None;
        }
        let mut wins = vec![0usize; m];
        for &(x, y) in pairs {
            if x == y || x.0 >= m || y.0 >= m {
                return None;
            }
            wins[x.0] += 1;
        }
        let mut ranking: Vec<Candidate> = (0..m).map(Candidate).collect();
        ranking.sort_by_key(|c| std::cmp::Reverse(wins[c.0]));
        let vote = Vote::new(ranking, m).ok()?;
        let consistent = vote.pairs().all(|p| pairs.contains(&p));
        consistent.then_some(vote)
    }

    /// The declared profile at `s` when every voter has declared a full ballot.
    pub fn declared_profile(&self, s: usize, m: usize) -> Option<Profile> {
        let votes = (0..self.pairs[s].len())
            .map(|i| self.declared_vote(s, Voter::from_index(i), m))
            .collect::<Option<Vec<_>>>()?;
        Profile::new(votes).ok()
    }
}

/// Fixed parameters of model checking: the election computing winners and
/// the profiles that state names refer to.
#[derive(Debug, Clone)]
pub struct EvalContext<'a> {
    pub election: &'a Election,
    pub named: NamedProfiles,
}

impl<'a> EvalContext<'a> {
    /// Names resolve to the states of `model`.
    pub fn new(election: &'a Election, model: &ProfileModel) -> Self {
        EvalContext {
            election,
            named: model
                .states()
                .map(|s| (model.name(s).to_string(), model.profile(s).clone()))
                .collect(),
        }
    }

    fn resolve<'t>(&'t self, model: &'t ProfileModel, term: &'t ProfileTerm) -> Result<&'t Profile> {
        let p = match term {
            ProfileTerm::Literal(p) => &**p,
            ProfileTerm::State(name) => match self.named.get(name) {
                Some(p) => p,
                None => model.profile(model.state(name)?),
            },
        };
        self.election.check_profile(p)?;
        Ok(p)
    }

    fn check_voter(&self, i: Voter) -> Result<()> {
        self.election.check_voter(i)
    }

    fn check_candidate(&self, c: Candidate) -> Result<()> {
        if c.0 >= self.election.m() {
            return Err(Error::domain(format!("candidate index {} out of range", c.0)));
        }
        Ok(())
    }

    /// Truth of `f` at state `s`.
    pub fn holds(&self, model: &ProfileModel, declared: &DeclaredBallots, s: usize, f: &Formula) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Pref(x, i, y) => {
                self.check_voter(*i)?;
                self.check_candidate(*x)?;
                self.check_candidate(*y)?;
                model.profile(s).vote(*i).prefers(*x, *y)
            }
            Formula::Decl(x, i, y) => {
                self.check_voter(*i)?;
                declared.get(s, *i).contains(&(*x, *y))
            }
            Formula::Not(g) => !self.holds(model, declared, s, g)?,
            Formula::And(a, b) => self.holds(model, declared, s, a)? && self.holds(model, declared, s, b)?,
            Formula::Or(a, b) => self.holds(model, declared, s, a)? || self.holds(model, declared, s, b)?,
            Formula::Imp(a, b) => !self.holds(model, declared, s, a)? || self.holds(model, declared, s, b)?,
            Formula::Iff(a, b) => self.holds(model, declared, s, a)? == self.holds(model, declared, s, b)?,
            Formula::Know(i, g) => {
                let block = model.eq_class(*i, s)?;
                self.all(model, declared, block, g)?
            }
            Formula::Common(group, g) | Formula::Distrib(group, g) => {
                let mode = if matches!(f, Formula::Common(..)) {
                    GroupMode::Common
                } else {
                    GroupMode::Distributed
                };
                let part = model.group_partition(group, mode)?;
                self.all(model, declared, part.block_of(s), g)?
            }
            Formula::Announce(premise, body) => {
                if !self.holds(model, declared, s, premise)? {
                    true
                } else {
                    let keep = self.truth_set(model, declared, premise)?;
                    let inner = model.restrict(&keep)?;
                    let inner_declared = declared.restrict(&keep);
                    let point = keep.binary_search(&s).expect("point satisfies the premise");
                    self.holds(&inner, &inner_declared, point, body)?
                }
            }
            Formula::Assign(items, body) => {
                let updated = self.apply_assignments(model, declared, items)?;
                self.holds(model, &updated, s, body)?
            }
            Formula::OutcomePref {
                voter,
                left,
                right,
                anchor,
            } => {
                self.check_voter(*voter)?;
                let l = self.resolve(model, left)?;
                let r = self.resolve(model, right)?;
                let reference = match anchor {
                    Some(a) => self.resolve(model, a)?,
                    None => l,
                };
                reference
                    .vote(*voter)
                    .prefers(self.election.winner(l), self.election.winner(r))
            }
            Formula::Win(x) => {
                self.check_candidate(*x)?;
                self.election.winner(model.profile(s)) == *x
            }
            Formula::ProfileIs(t) => model.profile(s) == self.resolve(model, t)?,
            Formula::VoteIs(i, t) => {
                self.check_voter(*i)?;
                model.profile(s).vote(*i) == self.resolve(model, t)?.vote(*i)
            }
        })
    }

    fn all(&self, model: &ProfileModel, declared: &DeclaredBallots, states: &[usize], f: &Formula) -> Result<bool> {
        for &t in states {
            if !self.holds(model, declared, t, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The states of `model` where `f` holds, in increasing order.
    pub fn truth_set(&self, model: &ProfileModel, declared: &DeclaredBallots, f: &Formula) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for s in model.states() {
            if self.holds(model, declared, s, f)? {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Applies a simultaneous assignment batch: every right-hand side is
    /// evaluated before any atom changes, and later items override earlier
    /// ones on the same atom.
    pub fn apply_assignments(
        &self,
        model: &ProfileModel,
        declared: &DeclaredBallots,
        items: &[Assignment],
    ) -> Result<DeclaredBallots> {
        enum Planned {
            Pair(Candidate, Voter, Candidate, Vec<usize>),
            Declare(Voter, Vote),
        }
        let mut plan = Vec::with_capacity(items.len());
        for item in items {
            plan.push(match item {
                Assignment::Pair {
                    better,
                    voter,
                    worse,
                    value,
                } => {
                    self.check_voter(*voter)?;
                    self.check_candidate(*better)?;
                    self.check_candidate(*worse)?;
                    Planned::Pair(*better, *voter, *worse, self.truth_set(model, declared, value)?)
                }
                Assignment::Declare { voter, source } => {
                    self.check_voter(*voter)?;
                    Planned::Declare(*voter, self.resolve(model, source)?.vote(*voter).clone())
                }
            });
        }
        let mut next = declared.clone();
        for p in plan {
            match p {
                Planned::Pair(x, i, y, truth) => {
                    for s in model.states() {
                        let mut set = next.get(s, i).clone();
                        if truth.binary_search(&s).is_ok() {
                            set.insert((x, y));
                        } else {
                            set.remove(&(x, y));
                        }
                        next.set(s, i, set);
                    }
                }
                Planned::Declare(i, v) => {
                    for s in model.states() {
                        next.set_vote(s, i, &v);
                    }
                }
            }
        }
        Ok(next)
    }
}

/// Truth of `f` at the point of `kp`.
pub fn eval(ctx: &EvalContext<'_>, kp: &KnowledgeProfile, declared: &DeclaredBallots, f: &Formula) -> Result<bool> {
    ctx.holds(&kp.model, declared, kp.point, f)
}

/// Truth of `f` at every state of `model`.
pub fn eval_at_states(
    ctx: &EvalContext<'_>,
    model: &ProfileModel,
    declared: &DeclaredBallots,
    f: &Formula,
) -> Result<Vec<bool>> {
    model.states().map(|s| ctx.holds(model, declared, s, f)).collect()
}

/// Whether `f` holds at every state of `model`.
pub fn valid_on_model(
    ctx: &EvalContext<'_>,
    model: &ProfileModel,
    declared: &DeclaredBallots,
    f: &Formula,
) -> Result<bool> {
    ctx.all(model, declared, &model.states().collect::<Vec<_>>(), f)
}
