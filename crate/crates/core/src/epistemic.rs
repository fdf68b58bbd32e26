//! Profile models: states carrying profiles, one indistinguishability
//! partition per voter, and the derived group and chair relations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;

use crate::error::{Error, Limits, Result};
use crate::voting::{all_votes, Candidate, CandidateSet, Election, Profile, Vote, Voter};

/// A partition of the states `0..len`, stored as sorted blocks ordered by
/// their least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Validates that `blocks` are nonempty, disjoint and cover `0..len`.
    pub fn new(blocks: Vec<Vec<usize>>, len: usize) -> Result<Self> {
        let mut block_of = vec![usize::MAX; len];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::domain("partition blocks must be nonempty"));
            }
            for &s in block {
                if s >= len {
                    return Err(Error::domain(format!("state index {s} out of range")));
                }
                if block_of[s] != usize::MAX {
                    return Err(Error::domain(format!("state index {s} is in two blocks")));
                }
                block_of[s] = b;
            }
        }
        if let Some(s) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::domain(format!("state index {s} is in no block")));
        }
        Ok(Self::from_labels(&block_of))
    }

    /// Groups states by an arbitrary label; equal labels share a block.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut ids: HashMap<&L, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (s, l) in labels.iter().enumerate() {
            let b = *ids.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(s);
            block_of.push(b);
        }
        Partition { blocks, block_of }
    }

    pub fn identity(len: usize) -> Self {
        Partition {
            blocks: (0..len).map(|s| vec![s]).collect(),
            block_of: (0..len).collect(),
        }
    }

    pub fn universal(len: usize) -> Self {
        Partition {
            blocks: if len == 0 { vec![] } else { vec![(0..len).collect()] },
            block_of: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_index(&self, s: usize) -> usize {
        self.block_of[s]
    }

    pub fn block_of(&self, s: usize) -> &[usize] {
        &self.blocks[self.block_of[s]]
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&s| other.block_of[s] == other.block_of[b[0]]))
    }

    /// The partition induced on the kept states, renumbered in order.
    pub fn restrict(&self, keep: &[usize]) -> Partition {
        let labels: Vec<usize> = keep.iter().map(|&s| self.block_of[s]).collect();
        Partition::from_labels(&labels)
    }
}

/// Whether a group relation is the common or the distributed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupMode {
    Common,
    Distributed,
}

/// States, per-voter partitions and a profile at each state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileModel {
    names: Vec<String>,
    partitions: Vec<Partition>,
    valuation: Vec<Profile>,
}

impl ProfileModel {
    pub fn new(names: Vec<String>, partitions: Vec<Partition>, valuation: Vec<Profile>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::domain("a profile model needs at least one state"));
        }
        if names.len() != valuation.len() {
            return Err(Error::domain("every state needs a profile"));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(Error::domain(format!("duplicate state `{n}`")));
            }
        }
        let (n, m) = (valuation[0].voters(), valuation[0].candidates());
        if valuation.iter().any(|p| p.voters() != n || p.candidates() != m) {
            return Err(Error::domain("all profiles of a model must have the same shape"));
        }
        if partitions.len() != n {
            return Err(Error::domain(format!(
                "expected one partition per voter ({n}), got {}",
                partitions.len()
            )));
        }
        if partitions.iter().any(|p| p.len() != names.len()) {
            return Err(Error::domain("every partition must cover all states"));
        }
        Ok(ProfileModel {
            names,
            partitions,
            valuation,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn voters(&self) -> usize {
        self.partitions.len()
    }

    pub fn states(&self) -> std::ops::Range<usize> {
        0..self.names.len()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::domain(format!("unknown state `{name}`")))
    }

    pub fn profile(&self, s: usize) -> &Profile {
        &self.valuation[s]
    }

    pub fn valuation(&self) -> &[Profile] {
        &self.valuation
    }

    pub fn partition(&self, i: Voter) -> &Partition {
        &self.partitions[i.index()]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    fn check_voter(&self, i: Voter) -> Result<()> {
        if i.index() >= self.voters() {
            return Err(Error::domain(format!("unknown voter {i}")));
        }
        Ok(())
    }

    /// The block of `i`'s partition containing `s`.
    pub fn eq_class(&self, i: Voter, s: usize) -> Result<&[usize]> {
        self.check_voter(i)?;
        if s >= self.len() {
            return Err(Error::domain(format!("unknown state index {s}")));
        }
        Ok(self.partitions[i.index()].block_of(s))
    }

    /// Common knowledge: the finest partition coarser than every member's.
    /// Distributed knowledge: the blockwise intersection.
    pub fn group_partition(&self, group: &[Voter], mode: GroupMode) -> Result<Partition> {
        if group.is_empty() {
            return Err(Error::domain("a group must contain at least one voter"));
        }
        for &i in group {
            self.check_voter(i)?;
        }
        Ok(match mode {
            GroupMode::Distributed => {
                let labels: Vec<Vec<usize>> = self
                    .states()
                    .map(|s| group.iter().map(|&i| self.partition(i).block_index(s)).collect())
                    .collect();
                Partition::from_labels(&labels)
            }
            GroupMode::Common => {
                let mut parent: Vec<usize> = self.states().collect();
                fn find(parent: &mut [usize], x: usize) -> usize {
                    let mut root = x;
                    while parent[root] != root {
                        root = parent[root];
                    }
                    let mut x = x;
                    while parent[x] != root {
                        let next = parent[x];
                        parent[x] = root;
                        x = next;
                    }
                    root
                }
                for &i in group {
                    for block in self.partition(i).blocks() {
                        for &s in &block[1..] {
                            let (a, b) = (find(&mut parent, block[0]), find(&mut parent, s));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                            }
                        }
                    }
                }
                let labels: Vec<usize> = self.states().map(|s| find(&mut parent, s)).collect();
                Partition::from_labels(&labels)
            }
        })
    }

    /// The chair's relation: every state is indistinguishable from every other.
    pub fn chair_partition(&self) -> Partition {
        Partition::universal(self.len())
    }

    /// Whether `i`'s own vote is constant on each of `i`'s blocks.
    pub fn knows_own_vote(&self, i: Voter) -> Result<bool> {
        self.check_voter(i)?;
        Ok(self.partition(i).blocks().iter().all(|b| {
            b.iter()
                .all(|&t| self.valuation[t].vote(i) == self.valuation[b[0]].vote(i))
        }))
    }

    /// `i`'s vote on a block when it is constant there.
    pub fn constant_vote(&self, i: Voter, block: &[usize]) -> Option<&Vote> {
        let v = self.valuation[block[0]].vote(i);
        block
            .iter()
            .all(|&t| self.valuation[t].vote(i) == v)
            .then_some(v)
    }

    /// The submodel on `keep` (state indices in increasing order).
    pub fn restrict(&self, keep: &[usize]) -> Result<ProfileModel> {
        if keep.is_empty() {
            return Err(Error::domain("restriction would leave no states"));
        }
        Ok(ProfileModel {
            names: keep.iter().map(|&s| self.names[s].clone()).collect(),
            partitions: self.partitions.iter().map(|p| p.restrict(keep)).collect(),
            valuation: keep.iter().map(|&s| self.valuation[s].clone()).collect(),
        })
    }

    /// `s ≻ t` iff `reference` strictly prefers the winner at `s` to the
    /// winner at `t`. Returned as the set of related `(s, t)` index pairs.
    pub fn induced_preference(&self, election: &Election, reference: &Vote) -> BTreeSet<(usize, usize)> {
        let winners: Vec<Candidate> = self.valuation.iter().map(|p| election.winner(p)).collect();
        self.states()
            .cartesian_product(self.states())
            .filter(|&(s, t)| reference.prefers(winners[s], winners[t]))
            .collect()
    }

    /// [`Self::induced_preference`] anchored at `i`'s vote in state `s`.
    pub fn induced_preference_at(
        &self,
        election: &Election,
        i: Voter,
        s: usize,
    ) -> Result<BTreeSet<(usize, usize)>> {
        self.check_voter(i)?;
        Ok(self.induced_preference(election, self.profile(s).vote(i)))
    }

    /// Possible or necessary winners over the chair's single block, in
    /// declaration order.
    pub fn possible_necessary_winners(
        &self,
        election: &Election,
        mode: WinnerMode,
        basis: WinnerBasis,
    ) -> BTreeSet<Candidate> {
        let per_state: Vec<BTreeSet<Candidate>> = self
            .valuation
            .iter()
            .map(|p| match basis {
                WinnerBasis::Winner => [election.winner(p)].into_iter().collect(),
                WinnerBasis::Cowinner => election.cowinners(p).into_iter().collect(),
            })
            .collect();
        match mode {
            WinnerMode::Possible => per_state.iter().flatten().copied().collect(),
            WinnerMode::Necessary => {
                let mut it = per_state.into_iter();
                let first = it.next().unwrap_or_default();
                it.fold(first, |acc, s| acc.intersection(&s).copied().collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WinnerMode {
    Possible,
    Necessary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WinnerBasis {
    Winner,
    Cowinner,
}

/// A profile model with a designated actual state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeProfile {
    pub model: ProfileModel,
    pub point: usize,
}

impl KnowledgeProfile {
    pub fn new(model: ProfileModel, point: usize) -> Result<Self> {
        if point >= model.len() {
            return Err(Error::domain(format!("point index {point} is not a state")));
        }
        Ok(KnowledgeProfile { model, point })
    }

    pub fn point_name(&self) -> &str {
        self.model.name(self.point)
    }

    pub fn profile(&self) -> &Profile {
        self.model.profile(self.point)
    }
}

/// Per voter, a set of strict pairwise constraints `x ≻ y`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialOrderSpec {
    pub constraints: Vec<Vec<(Candidate, Candidate)>>,
}

impl PartialOrderSpec {
    pub fn new(constraints: Vec<Vec<(Candidate, Candidate)>>) -> Self {
        PartialOrderSpec { constraints }
    }

    /// Checks that every voter's constraints have an irreflexive transitive closure.
    pub fn check_acyclic(&self, m: usize) -> Result<()> {
        for (i, pairs) in self.constraints.iter().enumerate() {
            let mut reach = vec![vec![false; m]; m];
            for &(x, y) in pairs {
                if x.0 >= m || y.0 >= m {
                    return Err(Error::domain("constraint mentions an unknown candidate"));
                }
                reach[x.0][y.0] = true;
            }
            for k in 0..m {
                for a in 0..m {
                    if reach[a][k] {
                        let via = reach[k].clone();
                        for (b, r) in via.into_iter().enumerate() {
                            reach[a][b] |= r;
                        }
                    }
                }
            }
            if (0..m).any(|a| reach[a][a]) {
                return Err(Error::domain(format!(
                    "constraints for voter {} are cyclic",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// All linear orders satisfying voter `i`'s constraints.
    pub fn linear_extensions(&self, i: usize, m: usize, limits: &Limits) -> Result<Vec<Vote>> {
        let pairs = &self.constraints[i];
        Ok(all_votes(m, limits)?
            .into_iter()
            .filter(|v| pairs.iter().all(|&(x, y)| v.prefers(x, y)))
            .collect())
    }
}

/// Name of an expanded state: each voter's ranking compactly rendered,
/// voters separated by `_`.
pub fn completion_name(candidates: &CandidateSet, p: &Profile) -> String {
    p.votes()
        .iter()
        .map(|v| candidates.render_compact(v.ranking()))
        .join("_")
}

/// One state per completion of the partial profile, identity access for
/// every voter.
pub fn expand_partial_profile(
    spec: &PartialOrderSpec,
    candidates: &CandidateSet,
    limits: &Limits,
) -> Result<ProfileModel> {
    let m = candidates.len();
    if spec.constraints.is_empty() {
        return Err(Error::domain("a partial profile needs at least one voter"));
    }
    spec.check_acyclic(m)?;
    let extensions = (0..spec.constraints.len())
        .map(|i| spec.linear_extensions(i, m, limits))
        .collect::<Result<Vec<_>>>()?;
    let count = extensions
        .iter()
        .try_fold(1u128, |acc, e| acc.checked_mul(e.len() as u128))
        .unwrap_or(u128::MAX);
    if count > limits.max_states as u128 {
        return Err(Error::resource(
            "expanding a partial profile",
            count,
            limits.max_states as u128,
        ));
    }
    let profiles: Vec<Profile> = extensions
        .into_iter()
        .map(|e| e.into_iter())
        .multi_cartesian_product()
        .map(Profile::new)
        .collect::<Result<_>>()?;
    let names = profiles.iter().map(|p| completion_name(candidates, p)).collect();
    let len = profiles.len();
    ProfileModel::new(
        names,
        vec![Partition::identity(len); spec.constraints.len()],
        profiles,
    )
}

/// Labels used when rendering partitions: `s t | u`.
pub fn render_partition(model: &ProfileModel, p: &Partition) -> String {
    p.blocks()
        .iter()
        .map(|b| b.iter().map(|&s| model.name(s)).join(" "))
        .join(" | ")
}

/// Groups states by their profile; handy for reports.
pub fn states_by_profile(model: &ProfileModel) -> BTreeMap<&Profile, Vec<usize>> {
    let mut map: BTreeMap<&Profile, Vec<usize>> = BTreeMap::new();
    for s in model.states() {
        map.entry(model.profile(s)).or_default().push(s);
    }
    map
}
