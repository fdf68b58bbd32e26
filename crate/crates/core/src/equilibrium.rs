//! Conditional votes and risk-averse (maximin) conditional equilibria.

use itertools::Itertools;

use crate::epistemic::ProfileModel;
use crate::error::{Error, Result};
use crate::voting::{Candidate, Election, Profile, Vote, Voter};

/// One ballot per block of a voter's partition, in block order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConditionalVote {
    pub ballots: Vec<Vote>,
}

/// One conditional vote per voter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConditionalProfile {
    pub votes: Vec<ConditionalVote>,
}

impl ConditionalProfile {
    /// Checks the shape against the model's partitions.
    pub fn new(model: &ProfileModel, votes: Vec<ConditionalVote>) -> Result<Self> {
        if votes.len() != model.voters() {
            return Err(Error::domain(format!(
                "expected {} conditional votes, got {}",
                model.voters(),
                votes.len()
            )));
        }
        for (i, cv) in votes.iter().enumerate() {
            let blocks = model.partitions()[i].blocks().len();
            if cv.ballots.len() != blocks {
                return Err(Error::domain(format!(
                    "voter {} has {blocks} classes but {} ballots",
                    i + 1,
                    cv.ballots.len()
                )));
            }
        }
        Ok(ConditionalProfile { votes })
    }

    /// Every voter casts the same ballot everywhere.
    pub fn unconditional(model: &ProfileModel, ballots: &[Vote]) -> Result<Self> {
        let votes = model
            .partitions()
            .iter()
            .zip(ballots)
            .map(|(p, b)| ConditionalVote {
                ballots: vec![b.clone(); p.blocks().len()],
            })
            .collect();
        ConditionalProfile::new(model, votes)
    }

    pub fn ballot(&self, model: &ProfileModel, i: Voter, s: usize) -> &Vote {
        &self.votes[i.index()].ballots[model.partition(i).block_index(s)]
    }

    /// The ballots cast at state `s`.
    pub fn declared_at(&self, model: &ProfileModel, s: usize) -> Profile {
        Profile::new(
            (0..self.votes.len())
                .map(|i| self.ballot(model, Voter::from_index(i), s).clone())
                .collect(),
        )
        .expect("conditional profile has at least one voter")
    }

    fn with_ballot(&self, i: Voter, block: usize, b: Vote) -> ConditionalProfile {
        let mut next = self.clone();
        next.votes[i.index()].ballots[block] = b;
        next
    }

    /// Compact label of a voter's conditional vote: ballot labels
    /// concatenated in block order.
    pub fn label(&self, election: &Election, i: Voter) -> String {
        join_labels(self.votes[i.index()].ballots.iter().map(|b| election.ballot_label(b)))
    }
}

fn join_labels(labels: impl Iterator<Item = String>) -> String {
    let labels: Vec<String> = labels.collect();
    if labels.iter().all(|l| l.chars().count() == 1) {
        labels.concat()
    } else {
        labels.join("/")
    }
}

/// Winner at `s` when every voter plays her ballot for her class of `s`.
pub fn outcome_at(model: &ProfileModel, election: &Election, cp: &ConditionalProfile, s: usize) -> Candidate {
    election.winner(&cp.declared_at(model, s))
}

/// Voter `i`'s truthful vote on a block, which must be constant there.
pub fn class_preference(model: &ProfileModel, i: Voter, block: usize) -> Result<&Vote> {
    let states = model
        .partition(i)
        .blocks()
        .get(block)
        .ok_or_else(|| Error::domain(format!("voter {i} has no class {block}")))?;
    model.constant_vote(i, states).ok_or_else(|| {
        Error::Precondition(format!(
            "voter {i}'s preference is not constant on class {{{}}}",
            states.iter().map(|&s| model.name(s)).join(" ")
        ))
    })
}

/// The worst outcome for voter `i` over one of her classes.
pub fn maximin_value(
    model: &ProfileModel,
    election: &Election,
    cp: &ConditionalProfile,
    i: Voter,
    block: usize,
) -> Result<Candidate> {
    let pref = class_preference(model, i, block)?;
    let states = &model.partition(i).blocks()[block];
    Ok(pref
        .worst_of(states.iter().map(|&s| outcome_at(model, election, cp, s)))
        .expect("blocks are nonempty"))
}

/// A class-local deviation that strictly raises the deviator's worst outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub voter: Voter,
    pub block: usize,
    pub ballot: Vote,
    pub from: Candidate,
    pub to: Candidate,
}

/// The first ballot (in the given order) improving `i`'s maximin value on
/// `block`, if any.
pub fn find_local_improvement(
    model: &ProfileModel,
    election: &Election,
    cp: &ConditionalProfile,
    i: Voter,
    block: usize,
    ballots: &[Vote],
) -> Result<Option<Deviation>> {
    let pref = class_preference(model, i, block)?;
    let current = maximin_value(model, election, cp, i, block)?;
    for b in ballots {
        let alt = cp.with_ballot(i, block, b.clone());
        let value = maximin_value(model, election, &alt, i, block)?;
        if pref.prefers(value, current) {
            return Ok(Some(Deviation {
                voter: i,
                block,
                ballot: b.clone(),
                from: current,
                to: value,
            }));
        }
    }
    Ok(None)
}

pub fn has_local_improvement(
    model: &ProfileModel,
    election: &Election,
    cp: &ConditionalProfile,
    i: Voter,
    block: usize,
) -> Result<bool> {
    let ballots = election.reduced_ballots()?;
    Ok(find_local_improvement(model, election, cp, i, block, &ballots)?.is_some())
}

/// The first improving deviation over all voters and classes.
pub fn find_deviation(
    model: &ProfileModel,
    election: &Election,
    cp: &ConditionalProfile,
    ballots: &[Vote],
) -> Result<Option<Deviation>> {
    for i in election.voter_ids() {
        for block in 0..model.partition(i).blocks().len() {
            if let Some(d) = find_local_improvement(model, election, cp, i, block, ballots)? {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

pub fn is_conditional_equilibrium(model: &ProfileModel, election: &Election, cp: &ConditionalProfile) -> Result<bool> {
    check_knows_preferences(model, election)?;
    let ballots = election.reduced_ballots()?;
    Ok(find_deviation(model, election, cp, &ballots)?.is_none())
}

fn check_knows_preferences(model: &ProfileModel, election: &Election) -> Result<()> {
    for i in election.voter_ids() {
        for block in 0..model.partition(i).blocks().len() {
            class_preference(model, i, block)?;
        }
    }
    Ok(())
}

/// Why a class of an equilibrium admits no improvement: its current worst
/// outcome and the best worst outcome any deviation reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCertificate {
    pub voter: Voter,
    pub block: usize,
    pub value: Candidate,
    pub best_deviation: Candidate,
}

pub fn certificates(
    model: &ProfileModel,
    election: &Election,
    cp: &ConditionalProfile,
) -> Result<Vec<ClassCertificate>> {
    let ballots = election.reduced_ballots()?;
    let mut out = Vec::new();
    for i in election.voter_ids() {
        for block in 0..model.partition(i).blocks().len() {
            let pref = class_preference(model, i, block)?;
            let value = maximin_value(model, election, cp, i, block)?;
            let mut best = value;
            for b in &ballots {
                let v = maximin_value(model, election, &cp.with_ballot(i, block, b.clone()), i, block)?;
                if pref.prefers(v, best) {
                    best = v;
                }
            }
            out.push(ClassCertificate {
                voter: i,
                block,
                value,
                best_deviation: best,
            });
        }
    }
    Ok(out)
}

/// Every conditional equilibrium, ordered by voter then class then ballot.
///
/// With `reduce_ballots`, ballots are quotiented by the rule's outcome
/// equivalence (the top candidate under plurality), both for strategies and
/// for deviations.
pub fn enumerate_equilibria(
    model: &ProfileModel,
    election: &Election,
    reduce_ballots: bool,
) -> Result<Vec<ConditionalProfile>> {
    check_knows_preferences(model, election)?;
    let ballots = if reduce_ballots {
        election.reduced_ballots()?
    } else {
        crate::voting::all_votes(election.m(), &election.limits)?
    };
    let slots: Vec<(Voter, usize)> = election
        .voter_ids()
        .flat_map(|i| (0..model.partition(i).blocks().len()).map(move |b| (i, b)))
        .collect();
    let size = (ballots.len() as u128)
        .checked_pow(slots.len() as u32)
        .unwrap_or(u128::MAX);
    if size > election.limits.max_search {
        return Err(Error::resource(
            "enumerating conditional profiles",
            size,
            election.limits.max_search,
        ));
    }
    let mut found = Vec::new();
    for choice in slots.iter().map(|_| 0..ballots.len()).multi_cartesian_product() {
        let mut votes: Vec<ConditionalVote> = model
            .partitions()
            .iter()
            .map(|p| ConditionalVote {
                ballots: Vec::with_capacity(p.blocks().len()),
            })
            .collect();
        for (&(i, _), &b) in slots.iter().zip(&choice) {
            votes[i.index()].ballots.push(ballots[b].clone());
        }
        let cp = ConditionalProfile { votes };
        if find_deviation(model, election, &cp, &ballots)?.is_none() {
            found.push(cp);
        }
    }
    Ok(found)
}

/// What a game-matrix cell shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixView {
    /// Each voter's worst outcome per class, voter 1's classes first.
    Maximin,
    /// The outcome at every state, in state order.
    Outcomes,
    /// Each voter's ranked payoff of her worst outcome per class.
    Payoffs,
}

impl std::str::FromStr for MatrixView {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maximin" => Ok(MatrixView::Maximin),
            "outcomes" => Ok(MatrixView::Outcomes),
            "payoffs" => Ok(MatrixView::Payoffs),
            _ => Err(Error::domain(format!(
                "unknown matrix view `{s}` (known: maximin, outcomes, payoffs)"
            ))),
        }
    }
}

/// The two-voter conditional game as a table of cell strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<String>>,
}

impl GameMatrix {
    /// Tab-separated: a corner label, the column ballots, then one line per
    /// row ballot.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("1\\2\t{}\n", self.columns.join("\t"));
        for (r, row) in self.rows.iter().zip(&self.cells) {
            out.push_str(&format!("{r}\t{}\n", row.join("\t")));
        }
        out
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<&str> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        Some(&self.cells[r][c])
    }
}

fn conditional_strategies(model: &ProfileModel, i: Voter, ballots: &[Vote]) -> Vec<ConditionalVote> {
    (0..model.partition(i).blocks().len())
        .map(|_| ballots.iter().cloned())
        .multi_cartesian_product()
        .map(|ballots| ConditionalVote { ballots })
        .collect()
}

/// Rows are voter 1's conditional strategies over reduced ballots, columns
/// voter 2's.
pub fn game_matrix(model: &ProfileModel, election: &Election, view: MatrixView) -> Result<GameMatrix> {
    if election.voters != 2 {
        return Err(Error::domain(format!(
            "a game matrix needs exactly two voters, the election has {}",
            election.voters
        )));
    }
    if view != MatrixView::Outcomes {
        check_knows_preferences(model, election)?;
    }
    let ballots = election.reduced_ballots()?;
    let (v1, v2) = (Voter::from_index(0), Voter::from_index(1));
    let rows = conditional_strategies(model, v1, &ballots);
    let cols = conditional_strategies(model, v2, &ballots);
    let label = |cv: &ConditionalVote| join_labels(cv.ballots.iter().map(|b| election.ballot_label(b)));
    let mut cells = Vec::with_capacity(rows.len());
    for r in &rows {
        let mut line = Vec::with_capacity(cols.len());
        for c in &cols {
            let cp = ConditionalProfile {
                votes: vec![r.clone(), c.clone()],
            };
            let cell = match view {
                MatrixView::Outcomes => model
                    .states()
                    .map(|s| election.candidates.name(outcome_at(model, election, &cp, s)).to_string())
                    .collect::<String>(),
                MatrixView::Maximin | MatrixView::Payoffs => {
                    let mut parts = String::new();
                    for i in [v1, v2] {
                        for block in 0..model.partition(i).blocks().len() {
                            let w = maximin_value(model, election, &cp, i, block)?;
                            if view == MatrixView::Maximin {
                                parts.push_str(election.candidates.name(w));
                            } else {
                                let pref = class_preference(model, i, block)?;
                                parts.push_str(&pref.rank_payoff(w).to_string());
                            }
                        }
                    }
                    parts
                }
            };
            line.push(cell);
        }
        cells.push(line);
    }
    Ok(GameMatrix {
        rows: rows.iter().map(label).collect(),
        columns: cols.iter().map(label).collect(),
        cells,
    })
}

/// Renders a conditional profile as `voter: class -> ballot` clauses, e.g.
/// `1: {t} a, {u} d; 2: {t u} b`.
pub fn render_conditional(model: &ProfileModel, election: &Election, cp: &ConditionalProfile) -> String {
    cp.votes
        .iter()
        .enumerate()
        .map(|(i, cv)| {
            let blocks = model.partitions()[i].blocks();
            let parts = blocks
                .iter()
                .zip(&cv.ballots)
                .map(|(b, v)| {
                    format!(
                        "{{{}}} {}",
                        b.iter().map(|&s| model.name(s)).join(" "),
                        election.ballot_label(v)
                    )
                })
                .join(", ");
            format!("{}: {parts}", i + 1)
        })
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epistemic::Partition;
    use crate::voting::{CandidateSet, Plurality, TieBreak};
    use std::sync::Arc;

    fn example4() -> (ProfileModel, Election) {
        let cs = CandidateSet::new(&["a", "b", "c", "d"]).unwrap();
        let v = |s| cs.parse_vote(s).unwrap();
        let p = Profile::new(vec![v("a c b d"), v("d c b a")]).unwrap();
        let q = Profile::new(vec![v("d c b a"), v("d c b a")]).unwrap();
        let model = ProfileModel::new(
            vec!["t".into(), "u".into()],
            vec![Partition::identity(2), Partition::universal(2)],
            vec![p, q],
        )
        .unwrap();
        let tb = TieBreak::new(v("b a c d"));
        (model, Election::new(cs, 2, Arc::new(Plurality), tb).unwrap())
    }

    fn cp(model: &ProfileModel, e: &Election, one: [&str; 2], two: &str) -> ConditionalProfile {
        let v = |s| e.candidates.parse_vote(s).unwrap();
        ConditionalProfile::new(
            model,
            vec![
                ConditionalVote {
                    ballots: vec![v(one[0]), v(one[1])],
                },
                ConditionalVote { ballots: vec![v(two)] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn maximin_of_voter_two() {
        let (m, e) = example4();
        let bad = cp(&m, &e, ["a b c d", "d c b a"], "d c b a");
        assert_eq!(maximin_value(&m, &e, &bad, Voter::from_index(1), 0).unwrap(), Candidate(0));
        assert!(has_local_improvement(&m, &e, &bad, Voter::from_index(1), 0).unwrap());
        let good = cp(&m, &e, ["a b c d", "d c b a"], "b a c d");
        assert_eq!(maximin_value(&m, &e, &good, Voter::from_index(1), 0).unwrap(), Candidate(1));
        assert!(is_conditional_equilibrium(&m, &e, &good).unwrap());
        assert!(!is_conditional_equilibrium(&m, &e, &bad).unwrap());
    }

    #[test]
    fn unknown_preference_is_a_precondition_error() {
        let (m, e) = example4();
        let blind = ProfileModel::new(
            m.names().to_vec(),
            vec![Partition::universal(2), Partition::universal(2)],
            m.valuation().to_vec(),
        )
        .unwrap();
        let v = e.candidates.parse_vote("a b c d").unwrap();
        let cp = ConditionalProfile::unconditional(&blind, &[v.clone(), v]).unwrap();
        assert!(matches!(
            maximin_value(&blind, &e, &cp, Voter::from_index(0), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn matrix_cells() {
        let (m, e) = example4();
        let g = game_matrix(&m, &e, MatrixView::Maximin).unwrap();
        assert_eq!(g.rows.len(), 16);
        assert_eq!(g.columns, vec!["a", "b", "c", "d"]);
        assert_eq!(g.cell("ad", "d"), Some("ada"));
        assert_eq!(g.cell("ab", "a"), Some("aba"));
        let o = game_matrix(&m, &e, MatrixView::Outcomes).unwrap();
        assert_eq!(o.cell("ad", "d"), Some("ad"));
    }

    #[test]
    fn search_cap_is_enforced() {
        let (m, mut e) = example4();
        e.limits.max_search = 10;
        assert!(matches!(enumerate_equilibria(&m, &e, true), Err(Error::Resource { .. })));
    }
}
