use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use stratvote::dynamics::announce;
use stratvote::epistemic::{KnowledgeProfile, ProfileModel};
use stratvote::logic::{
    parse_formula, render, win_expansion, DeclaredBallots, EvalContext, Formula, ProfileTerm, Vocabulary,
};
use stratvote::random::{
    candidate_names, random_formula, random_instance, random_profile, random_static_formula, rng, InstanceShape,
};
use stratvote::voting::{Candidate, CandidateSet, Election, Voter};
use stratvote::Error;

fn vocab(e: &Election, m: &ProfileModel) -> Vocabulary {
    Vocabulary {
        candidates: e.candidates.clone(),
        voters: e.voters,
        states: m.names().to_vec(),
    }
}

fn setup(seed: u64) -> (Election, KnowledgeProfile, Formula) {
    let mut r = rng(seed);
    let (e, kp) = random_instance(&mut r, InstanceShape::default());
    let f = random_static_formula(&mut r, &vocab(&e, &kp.model), 4);
    (e, kp, f)
}

fn holds_everywhere(ctx: &EvalContext<'_>, m: &ProfileModel, f: &Formula) -> Vec<bool> {
    let d = DeclaredBallots::empty(m.len(), m.voters());
    m.states().map(|s| ctx.holds(m, &d, s, f).unwrap()).collect()
}

proptest! {
    #[test]
    fn knowledge_is_factive_and_introspective(seed in any::<u64>()) {
        let (e, kp, f) = setup(seed);
        let m = &kp.model;
        let ctx = EvalContext::new(&e, m);
        for i in (0..e.voters).map(Voter::from_index) {
            let k = Formula::know(i, f.clone());
            let kk = Formula::know(i, k.clone());
            let neg = Formula::imp(Formula::not(k.clone()), Formula::know(i, Formula::not(k.clone())));
            let facts = holds_everywhere(&ctx, m, &Formula::imp(k.clone(), f.clone()));
            let positive = holds_everywhere(&ctx, m, &Formula::imp(k.clone(), kk));
            let negative = holds_everywhere(&ctx, m, &neg);
            prop_assert!(facts.iter().chain(&positive).chain(&negative).all(|&b| b));
        }
    }

    #[test]
    fn singleton_group_operators_are_knowledge(seed in any::<u64>()) {
        let (e, kp, f) = setup(seed);
        let m = &kp.model;
        let ctx = EvalContext::new(&e, m);
        for i in (0..e.voters).map(Voter::from_index) {
            let k = holds_everywhere(&ctx, m, &Formula::know(i, f.clone()));
            prop_assert_eq!(&holds_everywhere(&ctx, m, &Formula::common(&[i], f.clone())), &k);
            prop_assert_eq!(&holds_everywhere(&ctx, m, &Formula::distrib(&[i], f.clone())), &k);
        }
    }

    #[test]
    fn announced_facts_become_known(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, kp) = random_instance(&mut r, InstanceShape::default());
        let here = kp.profile().clone();
        let mut parts: Vec<Arc<Formula>> = vec![Arc::new(Formula::Win(e.winner(&here)))];
        for _ in 0..r.gen_range(0..4) {
            let i = Voter::from_index(r.gen_range(0..e.voters));
            let (x, y) = (Candidate(r.gen_range(0..3)), Candidate(r.gen_range(0..3)));
            let atom = Formula::Pref(x, i, y);
            parts.push(Arc::new(if here.vote(i).prefers(x, y) { atom } else { Formula::not(atom) }));
        }
        let f = Formula::conjunction(parts);
        prop_assert!(f.is_propositional());
        let ctx = EvalContext::new(&e, &kp.model);
        let d = DeclaredBallots::empty(kp.model.len(), kp.model.voters());
        let (after, d2) = announce(&ctx, &kp, &d, &f).unwrap();
        prop_assert!(after.model.len() <= kp.model.len());
        for i in (0..e.voters).map(Voter::from_index) {
            prop_assert!(ctx.holds(&after.model, &d2, after.point, &Formula::know(i, f.clone())).unwrap());
        }
    }

    #[test]
    fn announcement_shrinks_and_valid_announcements_change_nothing(seed in any::<u64>()) {
        let (e, kp, f) = setup(seed);
        let ctx = EvalContext::new(&e, &kp.model);
        let d = DeclaredBallots::empty(kp.model.len(), kp.model.voters());
        match announce(&ctx, &kp, &d, &f) {
            Ok((after, _)) => {
                prop_assert!(after.model.len() <= kp.model.len());
                prop_assert!(after.model.names().iter().all(|n| kp.model.names().contains(n)));
                prop_assert_eq!(after.point_name(), kp.point_name());
            }
            Err(Error::AnnouncementFailed { .. }) => {}
            Err(other) => prop_assert!(false, "{other}"),
        }
        let valid = Formula::or(f.clone(), Formula::not(f.clone()));
        let (same, _) = announce(&ctx, &kp, &d, &valid).unwrap();
        prop_assert_eq!(same, kp);
    }

    #[test]
    fn false_premises_make_announcements_true(seed in any::<u64>()) {
        let (e, kp, f) = setup(seed);
        let ctx = EvalContext::new(&e, &kp.model);
        let m = &kp.model;
        let premise = holds_everywhere(&ctx, m, &f);
        let boxed = holds_everywhere(&ctx, m, &Formula::announce(f.clone(), Formula::False));
        for (p, b) in premise.iter().zip(&boxed) {
            prop_assert_eq!(*b, !*p);
        }
    }

    #[test]
    fn outcome_preferences_ignore_the_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, kp) = random_instance(&mut r, InstanceShape::default());
        let m = &kp.model;
        let ctx = EvalContext::new(&e, m);
        let lit = |r: &mut _| ProfileTerm::Literal(Arc::new(random_profile(r, e.voters, 3)));
        let i = Voter::from_index(r.gen_range(0..e.voters));
        let f = Formula::OutcomePref {
            voter: i,
            left: lit(&mut r),
            right: ProfileTerm::State(m.name(r.gen_range(0..m.len())).to_string()),
            anchor: if r.gen_bool(0.5) { Some(lit(&mut r)) } else { None },
        };
        let v = holds_everywhere(&ctx, m, &f);
        prop_assert!(v.iter().all(|&b| b == v[0]));
    }

    #[test]
    fn win_atoms_match_their_expansion(seed in any::<u64>()) {
        let (e, kp, _) = setup(seed);
        let m = &kp.model;
        let ctx = EvalContext::new(&e, m);
        for x in 0..3 {
            let x = Candidate(x);
            let expansion = win_expansion(x, &e).unwrap();
            prop_assert_eq!(holds_everywhere(&ctx, m, &Formula::Win(x)), holds_everywhere(&ctx, m, &expansion));
        }
    }

    #[test]
    fn parse_inverts_print(seed in any::<u64>(), n in 1usize..4, m in 2usize..5) {
        let mut r = rng(seed);
        let v = Vocabulary {
            candidates: CandidateSet::new(&candidate_names(m)).unwrap(),
            voters: n,
            states: vec!["s".into(), "t".into()],
        };
        let f = random_formula(&mut r, &v, 6);
        let text = render(&f, &v.candidates);
        prop_assert_eq!(parse_formula(&text, &v).unwrap(), f);
    }
}

fn ex1() -> Vocabulary {
    Vocabulary {
        candidates: CandidateSet::new(&["a", "b", "c", "d"]).unwrap(),
        voters: 2,
        states: vec!["s".into(), "t".into(), "u".into()],
    }
}

#[test]
fn syntax_errors_carry_positions() {
    let v = ex1();
    for (text, line, column) in [("K1 a >_1", 1, 9), ("a >_3 b", 1, 5), ("prof(x)", 1, 6), ("a >_1 b &", 1, 10)] {
        match parse_formula(text, &v) {
            Err(Error::Syntax { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn equivalent_spellings_parse_alike() {
    let v = ex1();
    assert_eq!(parse_formula("K 2 a >_1 d", &v).unwrap(), parse_formula("K2 a >_1 d", &v).unwrap());
    assert_eq!(
        parse_formula("C {2 1 2} win(a)", &v).unwrap(),
        parse_formula("C {1 2} win(a)", &v).unwrap()
    );
    assert_eq!(
        parse_formula("a >_1 b -> b >_1 c -> c >_1 d", &v).unwrap(),
        parse_formula("a >_1 b -> (b >_1 c -> c >_1 d)", &v).unwrap()
    );
}
