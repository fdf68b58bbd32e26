use std::sync::Arc;

use proptest::prelude::*;
use stratvote::random::{random_election, random_profile, random_vote, rng};
use stratvote::voting::{
    all_votes, Borda, Candidate, CandidateSet, Election, Plurality, Profile, RuleRegistry, TieBreak, Vote, Voter,
};
use stratvote::{Error, Limits};

fn instance(seed: u64, n: usize, m: usize) -> (Election, Profile) {
    let mut r = rng(seed);
    let e = random_election(&mut r, n, m);
    let p = random_profile(&mut r, n, m);
    (e, p)
}

proptest! {
    #[test]
    fn exactly_one_direction_of_preference(seed in any::<u64>(), m in 2usize..6) {
        let v = random_vote(&mut rng(seed), m);
        for x in 0..m {
            for y in 0..m {
                if x != y {
                    let (x, y) = (Candidate(x), Candidate(y));
                    prop_assert!(v.prefers(x, y) ^ v.prefers(y, x));
                }
            }
        }
    }

    #[test]
    fn score_total_is_fixed(seed in any::<u64>(), n in 1usize..5, m in 2usize..6) {
        let (e, p) = instance(seed, n, m);
        let total: i64 = e.scores(&p).iter().sum();
        let per_ballot: i64 = e.rule.score_vector(m).iter().sum();
        prop_assert_eq!(total, n as i64 * per_ballot);
        if e.rule.name() == "borda" {
            prop_assert_eq!(total, (n * m * (m - 1) / 2) as i64);
        }
    }

    #[test]
    fn winner_is_the_tie_maximal_cowinner(seed in any::<u64>(), n in 1usize..5, m in 2usize..6) {
        let (e, p) = instance(seed, n, m);
        let cw = e.cowinners(&p);
        let w = e.winner(&p);
        prop_assert!(cw.contains(&w));
        for c in cw {
            prop_assert!(c == w || e.tiebreak.order().prefers(w, c));
        }
    }

    #[test]
    fn truthful_ballot_never_manipulates(seed in any::<u64>(), n in 1usize..4, m in 2usize..5) {
        let (e, p) = instance(seed, n, m);
        for i in p.voter_ids() {
            prop_assert!(!e.successful_manipulation(&p, i, p.vote(i)));
        }
    }

    #[test]
    fn find_manipulations_matches_pointwise(seed in any::<u64>(), n in 1usize..4, m in 2usize..5) {
        let (e, p) = instance(seed, n, m);
        let i = Voter::from_index(seed as usize % n);
        let found = e.find_manipulations(&p, i).unwrap();
        for b in all_votes(m, &Limits::default()).unwrap() {
            prop_assert_eq!(found.contains(&b), e.successful_manipulation(&p, i, &b));
        }
    }

    #[test]
    fn plurality_ballots_with_equal_tops_are_equivalent(seed in any::<u64>(), n in 2usize..4, m in 2usize..5) {
        let mut r = rng(seed);
        let tb = TieBreak::new(random_vote(&mut r, m));
        let names: Vec<String> = (0..m).map(|k| format!("c{k}")).collect();
        let e = Election::new(CandidateSet::new(&names).unwrap(), n, Arc::new(Plurality), tb).unwrap();
        let p = random_profile(&mut r, n, m);
        let ballots = all_votes(m, &Limits::default()).unwrap();
        let i = Voter::from_index(0);
        for a in &ballots {
            for b in ballots.iter().filter(|b| b.top() == a.top()) {
                prop_assert_eq!(e.winner(&p.with_vote(i, a.clone())), e.winner(&p.with_vote(i, b.clone())));
            }
        }
    }
}

fn votes(cs: &CandidateSet, texts: &[&str]) -> Profile {
    Profile::new(texts.iter().map(|t| cs.parse_vote(t).unwrap()).collect()).unwrap()
}

#[test]
fn borda_cowinners_of_the_three_voter_profiles() {
    let cs = CandidateSet::new(&["a", "b", "c", "d"]).unwrap();
    let tb = TieBreak::new(cs.parse_vote("b c d a").unwrap());
    let e = Election::new(cs.clone(), 3, Arc::new(Borda), tb).unwrap();
    let p = votes(&cs, &["c b a d", "d a c b", "b d c a"]);
    let q = p.with_vote(Voter::from_index(0), cs.parse_vote("c d b a").unwrap());
    let names = |v: Vec<Candidate>| v.into_iter().map(|c| cs.name(c).to_string()).collect::<Vec<_>>();
    assert_eq!(names(e.cowinners(&p)), ["b", "c", "d"]);
    assert_eq!(e.scores(&p), vec![3, 5, 5, 5]);
    assert_eq!(names(e.cowinners(&q)), ["d"]);
}

#[test]
fn plurality_tie_goes_to_the_tie_order() {
    let cs = CandidateSet::new(&["a", "b", "c", "d"]).unwrap();
    let tb = TieBreak::new(cs.parse_vote("b a c d").unwrap());
    let e = Election::new(cs.clone(), 2, Arc::new(Plurality), tb).unwrap();
    let p = votes(&cs, &["a c b d", "d c b a"]);
    assert_eq!(cs.name(e.winner(&p)), "a");
    let declared = votes(&cs, &["a c b d", "b c d a"]);
    assert!(e.is_equilibrium(&p, &declared).unwrap());
}

#[test]
fn rule_registry_and_validation() {
    let reg = RuleRegistry::default();
    assert_eq!(reg.parse("positional 2 1 0").unwrap().score_vector(3), vec![2, 1, 0]);
    assert!(matches!(reg.parse("approval"), Err(Error::Domain(_))));
    assert!(reg.parse("plurality 1").is_err());
    let cs = CandidateSet::new(&["a", "b"]).unwrap();
    assert!(cs.parse_vote("a a").is_err());
    assert!(cs.parse_vote("a").is_err());
    assert!(Vote::from_indices(&[0, 2]).is_err());
    assert!(CandidateSet::new(&["a", "a"]).is_err());
}

#[test]
fn vote_enumeration_respects_the_limit() {
    let limits = Limits {
        max_ballot_candidates: 3,
        ..Limits::default()
    };
    assert_eq!(all_votes(3, &limits).unwrap().len(), 6);
    assert!(matches!(all_votes(4, &limits), Err(Error::Resource { .. })));
}
