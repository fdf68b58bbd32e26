use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use stratvote::epistemic::{
    expand_partial_profile, GroupMode, Partition, PartialOrderSpec, ProfileModel, WinnerBasis, WinnerMode,
};
use stratvote::random::{candidate_names, random_instance, random_vote, rng, InstanceShape};
use stratvote::voting::{Candidate, CandidateSet, Voter};
use stratvote::Limits;

fn is_partition(p: &Partition) -> bool {
    let mut seen = vec![false; p.len()];
    for b in p.blocks() {
        for &s in b {
            if seen[s] {
                return false;
            }
            seen[s] = true;
        }
    }
    seen.into_iter().all(|x| x)
}

fn block_set(p: &Partition, s: usize) -> BTreeSet<usize> {
    p.block_of(s).iter().copied().collect()
}

fn shape() -> InstanceShape {
    InstanceShape {
        max_states: 6,
        max_voters: 3,
        candidates: 3,
    }
}

proptest! {
    #[test]
    fn group_partitions_sit_between_members(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, kp) = random_instance(&mut r, shape());
        let m = &kp.model;
        let group: Vec<Voter> = (0..m.voters()).filter(|_| r.gen_bool(0.7)).map(Voter::from_index).collect();
        prop_assume!(!group.is_empty());
        let common = m.group_partition(&group, GroupMode::Common).unwrap();
        let distributed = m.group_partition(&group, GroupMode::Distributed).unwrap();
        prop_assert!(is_partition(&common));
        prop_assert!(is_partition(&distributed));
        for &i in &group {
            prop_assert!(m.partition(i).refines(&common));
            prop_assert!(distributed.refines(m.partition(i)));
            for s in m.states() {
                prop_assert!(block_set(&common, s).is_superset(&block_set(m.partition(i), s)));
            }
        }
    }

    #[test]
    fn singleton_groups_are_the_member(seed in any::<u64>()) {
        let (_, kp) = random_instance(&mut rng(seed), shape());
        let m = &kp.model;
        for i in (0..m.voters()).map(Voter::from_index) {
            for mode in [GroupMode::Common, GroupMode::Distributed] {
                let g = m.group_partition(&[i], mode).unwrap();
                for s in m.states() {
                    prop_assert_eq!(block_set(&g, s), block_set(m.partition(i), s));
                }
            }
        }
    }

    #[test]
    fn expansions_know_their_own_votes(seed in any::<u64>(), n in 1usize..3, m in 2usize..5) {
        let mut r = rng(seed);
        let constraints = (0..n)
            .map(|_| {
                let v = random_vote(&mut r, m);
                v.pairs().filter(|_| r.gen_bool(0.5)).collect::<Vec<_>>()
            })
            .collect();
        let cs = CandidateSet::new(&candidate_names(m)).unwrap();
        let model = expand_partial_profile(&PartialOrderSpec::new(constraints), &cs, &Limits::default()).unwrap();
        for i in 0..n {
            prop_assert!(model.knows_own_vote(Voter::from_index(i)).unwrap());
        }
        let names: BTreeSet<&String> = model.names().iter().collect();
        prop_assert_eq!(names.len(), model.len());
    }

    #[test]
    fn induced_preference_is_a_strict_weak_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, kp) = random_instance(&mut r, shape());
        let m = &kp.model;
        let reference = random_vote(&mut r, 3);
        let rel = m.induced_preference(&e, &reference);
        let winners: Vec<Candidate> = m.states().map(|s| e.winner(m.profile(s))).collect();
        for s in m.states() {
            prop_assert!(!rel.contains(&(s, s)));
            for t in m.states() {
                let incomparable = !rel.contains(&(s, t)) && !rel.contains(&(t, s));
                prop_assert_eq!(incomparable, winners[s] == winners[t]);
                for u in m.states() {
                    if rel.contains(&(s, t)) && rel.contains(&(t, u)) {
                        prop_assert!(rel.contains(&(s, u)));
                    }
                }
            }
        }
    }

    #[test]
    fn possible_winners_are_the_winner_image(seed in any::<u64>()) {
        let (e, kp) = random_instance(&mut rng(seed), shape());
        let m = &kp.model;
        let image: BTreeSet<Candidate> = m.states().map(|s| e.winner(m.profile(s))).collect();
        prop_assert_eq!(m.possible_necessary_winners(&e, WinnerMode::Possible, WinnerBasis::Winner), image.clone());
        let necessary = m.possible_necessary_winners(&e, WinnerMode::Necessary, WinnerBasis::Winner);
        prop_assert!(necessary.len() <= 1);
        prop_assert!(necessary.is_subset(&image));
    }
}

#[test]
fn chair_sees_one_block() {
    let p = ProfileModel::new(
        vec!["s".into(), "t".into()],
        vec![Partition::identity(2)],
        vec![
            stratvote::random::random_profile(&mut rng(1), 1, 3),
            stratvote::random::random_profile(&mut rng(2), 1, 3),
        ],
    )
    .unwrap();
    assert_eq!(p.chair_partition().blocks().len(), 1);
}

#[test]
fn invalid_models_are_rejected() {
    let prof = stratvote::random::random_profile(&mut rng(3), 2, 3);
    assert!(ProfileModel::new(vec!["s".into(), "s".into()], vec![Partition::identity(2); 2], vec![prof.clone(); 2]).is_err());
    assert!(ProfileModel::new(vec!["s".into()], vec![Partition::identity(1)], vec![prof.clone()]).is_err());
    assert!(Partition::new(vec![vec![0]], 2).is_err());
    assert!(Partition::new(vec![vec![0, 1], vec![1]], 2).is_err());
}

#[test]
fn cyclic_partial_orders_are_rejected() {
    let cs = CandidateSet::new(&["a", "b", "c"]).unwrap();
    let (a, b, c) = (Candidate(0), Candidate(1), Candidate(2));
    let spec = PartialOrderSpec::new(vec![vec![(a, b), (b, c), (c, a)]]);
    assert!(expand_partial_profile(&spec, &cs, &Limits::default()).is_err());
}
