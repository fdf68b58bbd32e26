use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use stratvote::builtin::load_builtin;
use stratvote::epistemic::{Partition, ProfileModel};
use stratvote::equilibrium::{
    enumerate_equilibria, find_deviation, game_matrix, is_conditional_equilibrium, maximin_value, outcome_at,
    ConditionalProfile, ConditionalVote, MatrixView,
};
use stratvote::random::{random_profile, random_vote, rng};
use stratvote::voting::{all_votes, CandidateSet, Election, Plurality, TieBreak, Voter};
use stratvote::{Error, Limits};

/// Two plurality voters over three candidates on a random model where
/// every voter knows her own vote.
fn knowing_model(seed: u64) -> (Election, ProfileModel) {
    let mut r = rng(seed);
    let cs = CandidateSet::new(&["a", "b", "c"]).unwrap();
    let e = Election::new(cs, 2, Arc::new(Plurality), TieBreak::new(random_vote(&mut r, 3))).unwrap();
    let states = r.gen_range(1..=3);
    let mut valuation: Vec<_> = (0..states).map(|_| random_profile(&mut r, 2, 3)).collect();
    let partitions: Vec<Partition> = (0..2)
        .map(|_| Partition::from_labels(&(0..states).map(|_| r.gen_range(0..2)).collect::<Vec<_>>()))
        .collect();
    for (i, p) in partitions.iter().enumerate() {
        for block in p.blocks() {
            let v = valuation[block[0]].vote(Voter::from_index(i)).clone();
            for &s in block {
                valuation[s] = valuation[s].with_vote(Voter::from_index(i), v.clone());
            }
        }
    }
    let names = (0..states).map(|k| format!("s{k}")).collect();
    (e, ProfileModel::new(names, partitions, valuation).unwrap())
}

fn tops(model: &ProfileModel, cp: &ConditionalProfile) -> Vec<Vec<usize>> {
    (0..model.voters())
        .map(|i| cp.votes[i].ballots.iter().map(|b| b.top().index()).collect())
        .collect()
}

proptest! {
    #[test]
    fn reduction_keeps_the_projected_set(seed in any::<u64>()) {
        let (e, model) = knowing_model(seed);
        prop_assume!((0..2).map(|i| model.partition(Voter::from_index(i)).blocks().len()).sum::<usize>() <= 3);
        let full: BTreeSet<_> = enumerate_equilibria(&model, &e, false).unwrap().iter().map(|cp| tops(&model, cp)).collect();
        let reduced: BTreeSet<_> = enumerate_equilibria(&model, &e, true).unwrap().iter().map(|cp| tops(&model, cp)).collect();
        prop_assert_eq!(full, reduced);
    }

    #[test]
    fn enumeration_agrees_with_the_check(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, model) = knowing_model(seed);
        let found = enumerate_equilibria(&model, &e, true).unwrap();
        for cp in &found {
            prop_assert!(is_conditional_equilibrium(&model, &e, cp).unwrap());
        }
        let ballots = e.reduced_ballots().unwrap();
        let random_cp = ConditionalProfile::new(
            &model,
            (0..2)
                .map(|i| ConditionalVote {
                    ballots: (0..model.partition(Voter::from_index(i)).blocks().len())
                        .map(|_| ballots.choose(&mut r).unwrap().clone())
                        .collect(),
                })
                .collect(),
        )
        .unwrap();
        if !found.contains(&random_cp) {
            let d = find_deviation(&model, &e, &random_cp, &ballots).unwrap().expect("rejected profiles have a deviation");
            let pref = model.profile(model.partition(d.voter).blocks()[d.block][0]).vote(d.voter);
            prop_assert!(pref.prefers(d.to, d.from));
            prop_assert_eq!(maximin_value(&model, &e, &random_cp, d.voter, d.block).unwrap(), d.from);
        }
    }

    #[test]
    fn outcome_equivalent_ballots_are_interchangeable(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, model) = knowing_model(seed);
        let all = all_votes(3, &Limits::default()).unwrap();
        let votes: Vec<ConditionalVote> = (0..2)
            .map(|i| ConditionalVote {
                ballots: (0..model.partition(Voter::from_index(i)).blocks().len())
                    .map(|_| all.choose(&mut r).unwrap().clone())
                    .collect(),
            })
            .collect();
        let cp = ConditionalProfile::new(&model, votes.clone()).unwrap();
        let i = r.gen_range(0..2);
        let block = r.gen_range(0..votes[i].ballots.len());
        let top = votes[i].ballots[block].top();
        let mut swapped = votes;
        swapped[i].ballots[block] = all.iter().filter(|b| b.top() == top).collect::<Vec<_>>().choose(&mut r).map(|b| (*b).clone()).unwrap();
        let other = ConditionalProfile::new(&model, swapped).unwrap();
        for s in model.states() {
            prop_assert_eq!(outcome_at(&model, &e, &cp, s), outcome_at(&model, &e, &other, s));
        }
        prop_assert_eq!(
            is_conditional_equilibrium(&model, &e, &cp).unwrap(),
            is_conditional_equilibrium(&model, &e, &other).unwrap()
        );
    }
}

#[test]
fn table1_rows_and_equilibria() {
    let sc = load_builtin("table1").unwrap();
    let m = game_matrix(&sc.model, &sc.election, MatrixView::Maximin).unwrap();
    assert_eq!(m.rows.len(), 16);
    assert_eq!(m.columns, ["a", "b", "c", "d"]);
    assert_eq!(m.cell("ad", "b"), Some("bbb"));
    assert_eq!(m.cell("bd", "b"), Some("bbb"));
    assert_eq!(m.cell("dd", "d"), Some("ddd"));
    let tsv = m.to_tsv();
    assert!(tsv.starts_with("1\\2\ta\tb\tc\td\naa\t"));
    let found = enumerate_equilibria(&sc.model, &sc.election, true).unwrap();
    let labels: BTreeSet<String> = found
        .iter()
        .map(|cp| format!("{},{}", cp.label(&sc.election, Voter::from_index(0)), cp.label(&sc.election, Voter::from_index(1))))
        .collect();
    assert!(labels.contains("ad,b") && labels.contains("bd,b"));
}

#[test]
fn unknown_preferences_are_a_precondition_error() {
    let sc = stratvote::scenario::load_scenario(
        "candidates: a b\nvoters: 2\nrule: plurality\ntiebreak: a b\n\
         state s: 1: a b ; 2: a b\nstate t: 1: b a ; 2: a b\npartition 1: s t\n",
    )
    .unwrap();
    assert!(matches!(enumerate_equilibria(&sc.model, &sc.election, true), Err(Error::Precondition(_))));
}

#[test]
fn matrices_need_two_voters() {
    let sc = load_builtin("ex2").unwrap();
    assert!(game_matrix(&sc.model, &sc.election, MatrixView::Outcomes).is_err());
}
