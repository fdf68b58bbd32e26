//! Candidates, votes, profiles and positional voting rules, together with
//! the full-knowledge notions of manipulation and equilibrium.

mod rules;

pub use rules::{Borda, Plurality, Positional, RuleFactory, RuleRegistry, VotingRule};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Limits, Result};

/// Index of a candidate in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate(pub usize);

impl Candidate {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A voter, stored zero-based and displayed one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Voter(usize);

impl Voter {
    pub fn from_index(index: usize) -> Self {
        Voter(index)
    }

    /// Builds a voter from its one-based number. Zero is rejected.
    pub fn from_number(number: usize) -> Result<Self> {
        if number == 0 {
            return Err(Error::domain("voters are numbered from 1"));
        }
        Ok(Voter(number - 1))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for Voter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// The named candidates of an election.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    names: Vec<String>,
    lookup: HashMap<String, Candidate>,
}

impl CandidateSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::domain("an election needs at least one candidate"));
        }
        let mut lookup = HashMap::new();
        let mut owned = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref().to_string();
            if lookup.insert(name.clone(), Candidate(i)).is_some() {
                return Err(Error::domain(format!("duplicate candidate `{name}`")));
            }
            owned.push(name);
        }
        Ok(CandidateSet {
            names: owned,
            lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, c: Candidate) -> &str {
        &self.names[c.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<Candidate> {
        self.lookup.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<Candidate> {
        self.get(name)
            .ok_or_else(|| Error::domain(format!("unknown candidate `{name}`")))
    }

    pub fn iter(&self) -> impl Iterator<Item = Candidate> + '_ {
        (0..self.names.len()).map(Candidate)
    }

    /// Parses a whitespace separated ranking such as `"a c b d"`.
    pub fn parse_vote(&self, text: &str) -> Result<Vote> {
        let ranking = text
            .split_whitespace()
            .map(|t| self.lookup(t))
            .collect::<Result<Vec<_>>>()?;
        Vote::new(ranking, self.len())
    }

    /// Candidate names joined with `sep`, most preferred first.
    pub fn render_vote(&self, vote: &Vote, sep: &str) -> String {
        vote.ranking().iter().map(|&c| self.name(c)).join(sep)
    }

    /// Compact rendering used for ballots in tables: names are concatenated
    /// when every name is a single character.
    pub fn render_compact(&self, candidates: &[Candidate]) -> String {
        let sep = if self.names.iter().all(|n| n.chars().count() == 1) {
            ""
        } else {
            "."
        };
        candidates.iter().map(|&c| self.name(c)).join(sep)
    }
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct VoteData {
    ranking: Vec<Candidate>,
    position: Vec<usize>,
}

/// A linear order over the candidates, most preferred first.
///
/// Cloning is cheap: the ranking is shared.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vote(Arc<VoteData>);

impl Vote {
    /// Validates that `ranking` is a permutation of `0..m`.
    pub fn new(ranking: Vec<Candidate>, m: usize) -> Result<Self> {
        if ranking.len() != m {
            return Err(Error::domain(format!(
                "a vote must rank all {m} candidates, got {}",
                ranking.len()
            )));
        }
        let mut position = vec![usize::MAX; m];
        for (rank, c) in ranking.iter().enumerate() {
            if c.0 >= m {
                return Err(Error::domain(format!("candidate index {} out of range", c.0)));
            }
            if position[c.0] != usize::MAX {
                return Err(Error::domain(format!(
                    "candidate index {} appears twice in a vote",
                    c.0
                )));
            }
            position[c.0] = rank;
        }
        Ok(Vote(Arc::new(VoteData { ranking, position })))
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        Vote::new(indices.iter().map(|&i| Candidate(i)).collect(), indices.len())
    }

    pub fn len(&self) -> usize {
        self.0.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[Candidate] {
        &self.0.ranking
    }

    pub fn top(&self) -> Candidate {
        self.0.ranking[0]
    }

    /// Zero-based position of `c`, 0 being the top.
    pub fn position(&self, c: Candidate) -> usize {
        self.0.position[c.0]
    }

    /// Strict preference: `x` is ranked above `y`.
    pub fn prefers(&self, x: Candidate, y: Candidate) -> bool {
        self.position(x) < self.position(y)
    }

    /// Ranked payoff of `x`: `m - rank`, so the top scores `m - 1`.
    pub fn rank_payoff(&self, x: Candidate) -> usize {
        self.len() - 1 - self.position(x)
    }

    /// The least preferred of `candidates` (None when empty).
    pub fn worst_of(&self, candidates: impl IntoIterator<Item = Candidate>) -> Option<Candidate> {
        candidates.into_iter().max_by_key(|&c| self.position(c))
    }

    /// The most preferred of `candidates` (None when empty).
    pub fn best_of(&self, candidates: impl IntoIterator<Item = Candidate>) -> Option<Candidate> {
        candidates.into_iter().min_by_key(|&c| self.position(c))
    }

    /// Every ordered pair `(x, y)` with `x` ranked above `y`.
    pub fn pairs(&self) -> impl Iterator<Item = (Candidate, Candidate)> + '_ {
        self.0
            .ranking
            .iter()
            .enumerate()
            .flat_map(move |(k, &x)| self.0.ranking[k + 1..].iter().map(move |&y| (x, y)))
    }
}

impl fmt::Debug for Vote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vote{:?}", self.0.ranking.iter().map(|c| c.0).collect::<Vec<_>>())
    }
}

/// All m! ballots in lexicographic order of candidate indices.
pub fn all_votes(m: usize, limits: &Limits) -> Result<Vec<Vote>> {
    if m > limits.max_ballot_candidates {
        return Err(Error::resource(
            format!("enumerating all ballots over {m} candidates"),
            factorial(m),
            factorial(limits.max_ballot_candidates),
        ));
    }
    Ok((0..m)
        .permutations(m)
        .map(|p| Vote::from_indices(&p).expect("permutation is a valid vote"))
        .collect())
}

pub(crate) fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

/// One vote per voter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    votes: Vec<Vote>,
}

impl Profile {
    pub fn new(votes: Vec<Vote>) -> Result<Self> {
        if votes.is_empty() {
            return Err(Error::domain("a profile needs at least one voter"));
        }
        let m = votes[0].len();
        if votes.iter().any(|v| v.len() != m) {
            return Err(Error::domain("all votes of a profile must rank the same candidates"));
        }
        Ok(Profile { votes })
    }

    pub fn voters(&self) -> usize {
        self.votes.len()
    }

    pub fn candidates(&self) -> usize {
        self.votes[0].len()
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn vote(&self, i: Voter) -> &Vote {
        &self.votes[i.index()]
    }

    /// `P[≻_i / v]`: the profile with voter `i`'s vote replaced.
    pub fn with_vote(&self, i: Voter, v: Vote) -> Profile {
        let mut votes = self.votes.clone();
        votes[i.index()] = v;
        Profile { votes }
    }

    pub fn voter_ids(&self) -> impl Iterator<Item = Voter> {
        (0..self.votes.len()).map(Voter)
    }
}

/// True iff `p` and `q` agree on every voter other than `i`.
pub fn differ_only_in(i: Voter, p: &Profile, q: &Profile) -> bool {
    p.voters() == q.voters()
        && p
            .voter_ids()
            .filter(|&j| j != i)
            .all(|j| p.vote(j) == q.vote(j))
}

/// All (m!)^n profiles, voter 1 varying slowest.
pub fn all_profiles(n: usize, m: usize, limits: &Limits) -> Result<Vec<Profile>> {
    let ballots = all_votes(m, limits)?;
    let count = (ballots.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > limits.max_formula_profiles {
        return Err(Error::resource(
            format!("enumerating all profiles of {n} voters over {m} candidates"),
            count,
            limits.max_formula_profiles,
        ));
    }
    Ok((0..n)
        .map(|_| ballots.iter().cloned())
        .multi_cartesian_product()
        .map(|votes| Profile { votes })
        .collect())
}

/// Exogenous linear order used to pick a winner among cowinners.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TieBreak(Vote);

impl TieBreak {
    pub fn new(order: Vote) -> Self {
        TieBreak(order)
    }

    pub fn order(&self) -> &Vote {
        &self.0
    }

    /// The tie-break-maximal element of a nonempty set.
    pub fn pick(&self, cowinners: &[Candidate]) -> Candidate {
        self.0
            .best_of(cowinners.iter().copied())
            .expect("cowinner set is never empty")
    }
}

/// Everything needed to compute outcomes: the candidates, the number of
/// voters, a voting rule and a tie-break.
#[derive(Debug, Clone)]
pub struct Election {
    pub candidates: CandidateSet,
    pub voters: usize,
    pub rule: Arc<dyn VotingRule>,
    pub tiebreak: TieBreak,
    pub limits: Limits,
}

impl Election {
    pub fn new(
        candidates: CandidateSet,
        voters: usize,
        rule: Arc<dyn VotingRule>,
        tiebreak: TieBreak,
    ) -> Result<Self> {
        if voters == 0 {
            return Err(Error::domain("an election needs at least one voter"));
        }
        if tiebreak.order().len() != candidates.len() {
            return Err(Error::domain("tie-break must rank every candidate"));
        }
        rule.check(candidates.len())?;
        Ok(Election {
            candidates,
            voters,
            rule,
            tiebreak,
            limits: Limits::default(),
        })
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn m(&self) -> usize {
        self.candidates.len()
    }

    pub fn voter_ids(&self) -> impl Iterator<Item = Voter> {
        (0..self.voters).map(Voter)
    }

    pub fn check_voter(&self, i: Voter) -> Result<()> {
        if i.index() >= self.voters {
            return Err(Error::domain(format!(
                "voter {i} out of range 1..{}",
                self.voters
            )));
        }
        Ok(())
    }

    pub fn check_profile(&self, p: &Profile) -> Result<()> {
        if p.voters() != self.voters || p.candidates() != self.m() {
            return Err(Error::domain(format!(
                "profile shape {}x{} does not match election {}x{}",
                p.voters(),
                p.candidates(),
                self.voters,
                self.m()
            )));
        }
        Ok(())
    }

    pub fn scores(&self, p: &Profile) -> Vec<i64> {
        self.rule.scores(p)
    }

    /// The nonempty set of tied top scorers, in declaration order.
    pub fn cowinners(&self, p: &Profile) -> Vec<Candidate> {
        self.rule.cowinners(p)
    }

    pub fn winner(&self, p: &Profile) -> Candidate {
        self.tiebreak.pick(&self.cowinners(p))
    }

    /// Whether `ballot` is a successful manipulation of `p` by voter `i`.
    pub fn successful_manipulation(&self, p: &Profile, i: Voter, ballot: &Vote) -> bool {
        let truthful = p.vote(i);
        let before = self.winner(p);
        let after = self.winner(&p.with_vote(i, ballot.clone()));
        truthful.prefers(after, before)
    }

    /// Every successful manipulation of `p` by `i`, in ballot order.
    pub fn find_manipulations(&self, p: &Profile, i: Voter) -> Result<Vec<Vote>> {
        self.check_voter(i)?;
        let ballots = all_votes(self.m(), &self.limits)?;
        Ok(ballots
            .into_iter()
            .filter(|b| self.successful_manipulation(p, i, b))
            .collect())
    }

    /// Nash stability of `declared` with respect to the `truthful` preferences:
    /// no voter can reach an outcome she strictly prefers by changing only her
    /// own ballot.
    pub fn is_equilibrium(&self, truthful: &Profile, declared: &Profile) -> Result<bool> {
        self.check_profile(truthful)?;
        self.check_profile(declared)?;
        let ballots = all_votes(self.m(), &self.limits)?;
        let current = self.winner(declared);
        for i in self.voter_ids() {
            let pref = truthful.vote(i);
            for b in &ballots {
                let w = self.winner(&declared.with_vote(i, b.clone()));
                if pref.prefers(w, current) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Representative ballots, one per outcome-equivalence class of the rule
    /// (top candidate for plurality; every ballot otherwise).
    pub fn reduced_ballots(&self) -> Result<Vec<Vote>> {
        let all = all_votes(self.m(), &self.limits)?;
        let mut seen = std::collections::HashSet::new();
        Ok(all
            .into_iter()
            .filter(|v| seen.insert(self.rule.ballot_key(v)))
            .collect())
    }

    /// Label for a ballot: its equivalence key rendered compactly.
    pub fn ballot_label(&self, v: &Vote) -> String {
        self.candidates.render_compact(&self.rule.ballot_key(v))
    }
}
