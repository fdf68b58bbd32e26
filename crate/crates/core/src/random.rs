//! Seeded generators for random elections, models and formulas.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::epistemic::{KnowledgeProfile, Partition, ProfileModel};
use crate::logic::{Assignment, Formula, ProfileTerm, Vocabulary};
use crate::voting::{Borda, Candidate, CandidateSet, Election, Plurality, Profile, TieBreak, Vote, VotingRule, Voter};

pub use rand_chacha::ChaCha8Rng as SeededRng;

/// A reproducible generator for the given seed.
pub fn rng(seed: u64) -> SeededRng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Candidate names `a`, `b`, ... (then `c10`, `c11`, ... beyond 26).
pub fn candidate_names(m: usize) -> Vec<String> {
    (0..m)
        .map(|k| {
            if k < 26 {
                ((b'a' + k as u8) as char).to_string()
            } else {
                format!("c{k}")
            }
        })
        .collect()
}

pub fn random_vote<R: Rng>(rng: &mut R, m: usize) -> Vote {
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(rng);
    Vote::from_indices(&idx).expect("shuffle is a permutation")
}

pub fn random_profile<R: Rng>(rng: &mut R, n: usize, m: usize) -> Profile {
    Profile::new((0..n).map(|_| random_vote(rng, m)).collect()).expect("n >= 1")
}

/// Plurality or Borda with a random tie-break.
pub fn random_election<R: Rng>(rng: &mut R, n: usize, m: usize) -> Election {
    let rule: Arc<dyn VotingRule> = if rng.gen_bool(0.5) {
        Arc::new(Plurality)
    } else {
        Arc::new(Borda)
    };
    let cs = CandidateSet::new(&candidate_names(m)).expect("distinct names");
    Election::new(cs, n, rule, TieBreak::new(random_vote(rng, m))).expect("valid election")
}

pub fn random_partition<R: Rng>(rng: &mut R, len: usize) -> Partition {
    let labels: Vec<usize> = (0..len).map(|_| rng.gen_range(0..len)).collect();
    Partition::from_labels(&labels)
}

/// States `s0`, `s1`, ... with random profiles and partitions. Profiles are
/// drawn from a small pool so that states often share a profile.
pub fn random_model<R: Rng>(rng: &mut R, n: usize, m: usize, states: usize) -> ProfileModel {
    let pool: Vec<Profile> = (0..states.max(1)).map(|_| random_profile(rng, n, m)).collect();
    let valuation = (0..states)
        .map(|_| pool.choose(rng).expect("pool is nonempty").clone())
        .collect();
    ProfileModel::new(
        (0..states).map(|k| format!("s{k}")).collect(),
        (0..n).map(|_| random_partition(rng, states)).collect(),
        valuation,
    )
    .expect("generated model is valid")
}

/// Bounds for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    pub max_states: usize,
    pub max_voters: usize,
    pub candidates: usize,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            max_states: 4,
            max_voters: 3,
            candidates: 3,
        }
    }
}

/// A random election and pointed model within the shape.
pub fn random_instance<R: Rng>(rng: &mut R, shape: InstanceShape) -> (Election, KnowledgeProfile) {
    let n = rng.gen_range(1..=shape.max_voters);
    let states = rng.gen_range(1..=shape.max_states);
    let election = random_election(rng, n, shape.candidates);
    let model = random_model(rng, n, shape.candidates, states);
    let point = rng.gen_range(0..states);
    (election, KnowledgeProfile::new(model, point).expect("point in range"))
}

fn random_voter<R: Rng>(rng: &mut R, v: &Vocabulary) -> Voter {
    Voter::from_index(rng.gen_range(0..v.voters))
}

fn random_candidate<R: Rng>(rng: &mut R, v: &Vocabulary) -> Candidate {
    Candidate(rng.gen_range(0..v.candidates.len()))
}

fn random_term<R: Rng>(rng: &mut R, v: &Vocabulary) -> ProfileTerm {
    if !v.states.is_empty() && rng.gen_bool(0.6) {
        ProfileTerm::State(v.states.choose(rng).expect("nonempty").clone())
    } else {
        ProfileTerm::Literal(Arc::new(random_profile(rng, v.voters, v.candidates.len())))
    }
}

fn random_group<R: Rng>(rng: &mut R, v: &Vocabulary) -> Vec<Voter> {
    let k = rng.gen_range(1..=v.voters);
    (0..k).map(|_| random_voter(rng, v)).collect()
}

fn random_atom<R: Rng>(rng: &mut R, v: &Vocabulary, static_only: bool) -> Formula {
    let mut pick = rng.gen_range(0..if static_only { 8 } else { 9 });
    if static_only && pick >= 4 {
        pick += 1;
    }
    match pick {
        0 | 1 => Formula::Pref(random_candidate(rng, v), random_voter(rng, v), random_candidate(rng, v)),
        2 => Formula::True,
        3 => Formula::False,
        4 => Formula::Decl(random_candidate(rng, v), random_voter(rng, v), random_candidate(rng, v)),
        5 => Formula::Win(random_candidate(rng, v)),
        6 => Formula::ProfileIs(random_term(rng, v)),
        7 => Formula::VoteIs(random_voter(rng, v), random_term(rng, v)),
        _ => Formula::OutcomePref {
            voter: random_voter(rng, v),
            left: random_term(rng, v),
            right: random_term(rng, v),
            anchor: rng.gen_bool(0.5).then(|| random_term(rng, v)),
        },
    }
}

/// A formula of depth at most `depth` over every constructor of the
/// language.
pub fn random_formula<R: Rng>(rng: &mut R, v: &Vocabulary, depth: usize) -> Formula {
    formula_with(rng, v, depth, false)
}

/// A formula of depth at most `depth` without announcements, assignments
/// or declared-vote atoms.
pub fn random_static_formula<R: Rng>(rng: &mut R, v: &Vocabulary, depth: usize) -> Formula {
    formula_with(rng, v, depth, true)
}

fn formula_with<R: Rng>(rng: &mut R, v: &Vocabulary, depth: usize, static_only: bool) -> Formula {
    if depth <= 1 || rng.gen_bool(0.2) {
        return random_atom(rng, v, static_only);
    }
    let d = depth - 1;
    let sub = |rng: &mut R| Arc::new(formula_with(rng, v, d, static_only));
    let choices = if static_only { 8 } else { 10 };
    match rng.gen_range(0..choices) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Imp(sub(rng), sub(rng)),
        4 => Formula::Iff(sub(rng), sub(rng)),
        5 => Formula::Know(random_voter(rng, v), sub(rng)),
        6 => {
            let g = random_group(rng, v);
            Formula::common(&g, sub(rng))
        }
        7 => {
            let g = random_group(rng, v);
            Formula::distrib(&g, sub(rng))
        }
        8 => Formula::Announce(sub(rng), sub(rng)),
        _ => {
            let items = (0..rng.gen_range(1..=2))
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        Assignment::Pair {
                            better: random_candidate(rng, v),
                            voter: random_voter(rng, v),
                            worse: random_candidate(rng, v),
                            value: sub(rng),
                        }
                    } else {
                        Assignment::Declare {
                            voter: random_voter(rng, v),
                            source: random_term(rng, v),
                        }
                    }
                })
                .collect();
            Formula::Assign(items, sub(rng))
        }
    }
}

/// Depth of a formula: atoms have depth 1.
pub fn depth(f: &Formula) -> usize {
    1 + match f {
        Formula::Not(g) | Formula::Know(_, g) | Formula::Common(_, g) | Formula::Distrib(_, g) => depth(g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::Announce(a, b) => {
            depth(a).max(depth(b))
        }
        Formula::Assign(items, body) => items
            .iter()
            .map(|it| match it {
                Assignment::Pair { value, .. } => depth(value),
                Assignment::Declare { .. } => 0,
            })
            .max()
            .unwrap_or(0)
            .max(depth(body)),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_reproducible() {
        let shape = InstanceShape::default();
        let a = random_instance(&mut rng(7), shape);
        let b = random_instance(&mut rng(7), shape);
        assert_eq!(a.1, b.1);
        assert_eq!(a.0.tiebreak, b.0.tiebreak);
    }

    #[test]
    fn formulas_respect_depth() {
        let v = Vocabulary {
            candidates: CandidateSet::new(&candidate_names(3)).unwrap(),
            voters: 2,
            states: vec!["s0".into()],
        };
        let mut r = rng(1);
        for _ in 0..200 {
            assert!(depth(&random_formula(&mut r, &v, 6)) <= 6);
        }
    }
}
