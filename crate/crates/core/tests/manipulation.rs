use proptest::prelude::*;
use rand::Rng;
use stratvote::epistemic::{KnowledgeProfile, Partition, ProfileModel};
use stratvote::manipulation::{classify, formulas_agree, ClassScan, NotionRegistry};
use stratvote::random::{random_election, random_instance, random_profile, rng, InstanceShape};
use stratvote::scenario::load_scenario;
use stratvote::voting::Voter;
use stratvote::Error;

proptest! {
    #[test]
    fn notions_form_a_chain(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, kp) = random_instance(&mut r, InstanceShape::default());
        let i = Voter::from_index(r.gen_range(0..e.voters));
        let rep = classify(&kp, i, &e).unwrap();
        prop_assert!(!rep.de_re || rep.de_dicto);
        prop_assert!(!rep.de_dicto || rep.considers_possible);
        prop_assert!(!rep.actual || rep.considers_possible);
        prop_assert!(!rep.de_re || rep.de_re_weak);
        prop_assert!(rep.de_re_witnesses.is_subset(&rep.de_re_weak_witnesses));
        prop_assert_eq!(rep.de_re, !rep.de_re_witnesses.is_empty());
    }

    #[test]
    fn singleton_classes_collapse_to_actual(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let e = random_election(&mut r, n, 3);
        let states = r.gen_range(1..=3);
        let valuation = (0..states).map(|_| random_profile(&mut r, n, 3)).collect();
        let model = ProfileModel::new(
            (0..states).map(|k| format!("s{k}")).collect(),
            vec![Partition::identity(states); n],
            valuation,
        )
        .unwrap();
        let kp = KnowledgeProfile::new(model, r.gen_range(0..states)).unwrap();
        let i = Voter::from_index(r.gen_range(0..n));
        let rep = classify(&kp, i, &e).unwrap();
        for name in NotionRegistry::default().names() {
            prop_assert_eq!(rep.flag(name), Some(rep.actual), "{}", name);
        }
    }

    #[test]
    fn witnesses_succeed_everywhere_in_the_class(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, kp) = random_instance(&mut r, InstanceShape::default());
        let i = Voter::from_index(r.gen_range(0..e.voters));
        let scan = ClassScan::new(&kp, i, &e).unwrap();
        for w in scan.de_re_witnesses() {
            for &s in &scan.class {
                prop_assert!(e.successful_manipulation(kp.model.profile(s), i, &w));
            }
        }
    }

    #[test]
    fn classifier_matches_defining_formulas(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, kp) = random_instance(&mut r, InstanceShape { max_states: 3, max_voters: 2, candidates: 3 });
        let i = Voter::from_index(r.gen_range(0..e.voters));
        prop_assert!(formulas_agree(&kp, i, &e).unwrap());
    }
}

const TWO_STATES: &str = "\
candidates: a b c
voters: 3
rule: plurality
tiebreak: a b c
state s: 1: c b a ; 2: b a c ; 3: a b c
state t: 1: c b a ; 2: b c a ; 3: a c b
partition 1: s t
point: s
";

#[test]
fn de_re_with_a_shared_ballot() {
    let sc = load_scenario(TWO_STATES).unwrap();
    let kp = sc.knowledge_profile();
    let one = Voter::from_index(0);
    let rep = classify(&kp, one, &sc.election).unwrap();
    assert!(rep.actual && rep.de_dicto && rep.de_re);
    let text = rep.render(&sc.election.candidates);
    assert!(text.contains("de_re=true"), "{text}");
    assert!(text.contains("witnesses=b>a>c b>c>a"), "{text}");
}

#[test]
fn ex2_has_de_dicto_without_de_re() {
    let sc = stratvote::builtin::load_builtin("ex2").unwrap();
    let rep = classify(&sc.knowledge_profile(), Voter::from_index(0), &sc.election).unwrap();
    assert!(rep.de_dicto);
    assert!(!rep.de_re);
    assert!(!rep.de_re_weak);
}

#[test]
fn unknown_notions_and_voters_are_domain_errors() {
    let sc = load_scenario(TWO_STATES).unwrap();
    assert!(matches!(NotionRegistry::default().get("de_facto"), Err(Error::Domain(_))));
    assert!(classify(&sc.knowledge_profile(), Voter::from_index(5), &sc.election).is_err());
}
