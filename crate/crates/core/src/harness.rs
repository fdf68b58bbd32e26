//! Seeded randomized experiments: classifier against defining formulas,
//! preservation of knowledge of manipulation under announcements, and
//! conditional equilibria of singleton models against Nash equilibria.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rand::Rng;

use crate::dynamics::preservation_experiment;
use crate::epistemic::{KnowledgeProfile, Partition, ProfileModel};
use crate::equilibrium::{enumerate_equilibria, ConditionalProfile};
use crate::error::{Error, Result};
use crate::logic::{
    parse_formula, profile_formula, render, DeclaredBallots, EvalContext, Formula, Vocabulary,
};
use crate::manipulation::{compare_notions, NotionComparison, NotionRegistry};
use crate::random::{random_election, random_instance, random_profile, random_static_formula, rng, InstanceShape};
use crate::scenario::Scenario;
use crate::voting::{all_votes, Election, Profile, Voter};

/// Renders an instance in the scenario grammar.
pub fn describe(election: &Election, kp: &KnowledgeProfile) -> String {
    Scenario {
        election: election.clone(),
        model: kp.model.clone(),
        point: kp.point,
        partial: None,
    }
    .to_text()
}

fn vocabulary(election: &Election, model: &ProfileModel) -> Vocabulary {
    Vocabulary {
        candidates: election.candidates.clone(),
        voters: election.voters,
        states: model.names().to_vec(),
    }
}

/// A disagreement between a classifier and a defining formula.
#[derive(Debug, Clone)]
pub struct Disagreement {
    pub trial: usize,
    pub voter: Voter,
    pub comparisons: Vec<NotionComparison>,
    pub instance: String,
}

#[derive(Debug, Clone, Default)]
pub struct DefinabilityReport {
    pub trials: usize,
    pub checks: usize,
    pub disagreements: Vec<Disagreement>,
}

impl DefinabilityReport {
    pub fn agreement(&self) -> f64 {
        if self.trials == 0 {
            return 1.0;
        }
        1.0 - self.disagreements.len() as f64 / self.trials as f64
    }
}

impl fmt::Display for DefinabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "definability: {} instances, {} notion checks, {} disagreements",
            self.trials,
            self.checks,
            self.disagreements.len()
        )?;
        for d in &self.disagreements {
            writeln!(f, "trial {} voter {}:", d.trial, d.voter)?;
            for c in &d.comparisons {
                writeln!(f, "  {} classifier={} formula={}", c.notion, c.classifier, c.formula)?;
            }
            write!(f, "{}", d.instance)?;
        }
        Ok(())
    }
}

/// Compares every knowledge notion's classifier with its defining formula
/// on random instances within `shape`.
pub fn definability(seed: u64, trials: usize, shape: InstanceShape) -> Result<DefinabilityReport> {
    let mut r = rng(seed);
    let registry = NotionRegistry::default();
    let mut report = DefinabilityReport::default();
    for trial in 0..trials {
        let (election, kp) = random_instance(&mut r, shape);
        let voter = Voter::from_index(r.gen_range(0..election.voters));
        let comparisons = compare_notions(&kp, voter, &election, &registry)?;
        report.trials += 1;
        report.checks += comparisons.len();
        if comparisons.iter().any(|c| c.classifier != c.formula) {
            report.disagreements.push(Disagreement {
                trial,
                voter,
                comparisons,
                instance: describe(&election, &kp),
            });
        }
    }
    Ok(report)
}

/// An announcement that changed a voter's knowledge of manipulation.
#[derive(Debug, Clone)]
pub struct PreservationWitness {
    pub trial: usize,
    pub voter: Voter,
    pub announcement: String,
    pub states_after: Vec<String>,
    pub instance: String,
}

impl fmt::Display for PreservationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "trial {} voter {}: announce {} | states: {}",
            self.trial,
            self.voter,
            self.announcement,
            self.states_after.join(" ")
        )?;
        write!(f, "{}", self.instance)
    }
}

#[derive(Debug, Clone, Default)]
pub struct PreservationStats {
    pub trials: usize,
    /// Trials whose random formula was false at the point and was replaced
    /// by a disjunction of state descriptions.
    pub fallbacks: usize,
    pub violations: Vec<PreservationWitness>,
    pub weak_loss: Option<PreservationWitness>,
    pub considers_possible_loss: Option<PreservationWitness>,
}

impl fmt::Display for PreservationStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "preservation: {} trials ({} state-set announcements), {} violations",
            self.trials,
            self.fallbacks,
            self.violations.len()
        )?;
        for v in &self.violations {
            write!(f, "violation {v}")?;
        }
        match &self.weak_loss {
            Some(w) => write!(f, "weak de re lost: {w}")?,
            None => writeln!(f, "weak de re lost: none found")?,
        }
        match &self.considers_possible_loss {
            Some(w) => write!(f, "considers possible lost: {w}"),
            None => writeln!(f, "considers possible lost: none found"),
        }
    }
}

/// Disjunction of the profile descriptions of a random set of states that
/// contains the point.
fn state_set_announcement<R: Rng>(r: &mut R, kp: &KnowledgeProfile) -> Formula {
    let mut keep: BTreeSet<&Profile> = BTreeSet::new();
    keep.insert(kp.profile());
    for s in kp.model.states() {
        if r.gen_bool(0.5) {
            keep.insert(kp.model.profile(s));
        }
    }
    Formula::disjunction(keep.into_iter().map(|p| profile_formula(p).into()).collect())
}

/// Announces random formulas true at the point and compares a random
/// voter's knowledge of manipulation before and after.
pub fn preservation(seed: u64, trials: usize, shape: InstanceShape) -> Result<PreservationStats> {
    let mut r = rng(seed);
    let mut stats = PreservationStats::default();
    for trial in 0..trials {
        let (election, kp) = random_instance(&mut r, shape);
        let voter = Voter::from_index(r.gen_range(0..election.voters));
        let ctx = EvalContext::new(&election, &kp.model);
        let declared = DeclaredBallots::empty(kp.model.len(), kp.model.voters());
        let vocab = vocabulary(&election, &kp.model);
        let candidate = random_static_formula(&mut r, &vocab, 4);
        let f = if ctx.holds(&kp.model, &declared, kp.point, &candidate)? {
            candidate
        } else {
            stats.fallbacks += 1;
            state_set_announcement(&mut r, &kp)
        };
        let rep = preservation_experiment(&ctx, &kp, &declared, voter, &f)?;
        stats.trials += 1;
        let witness = || PreservationWitness {
            trial,
            voter,
            announcement: render(&f, &election.candidates),
            states_after: rep.states_after.clone(),
            instance: describe(&election, &kp),
        };
        if !rep.preserves_knowledge() {
            stats.violations.push(witness());
        }
        if stats.weak_loss.is_none() && rep.loses_weak_de_re() {
            stats.weak_loss = Some(witness());
        }
        if stats.considers_possible_loss.is_none() && rep.loses_considers_possible() {
            stats.considers_possible_loss = Some(witness());
        }
    }
    Ok(stats)
}

/// Searches two-state plurality models for an announcement after which a
/// voter loses weak de re knowledge of manipulation.
pub fn weak_counterexample(seed: u64, attempts: usize) -> Result<Option<PreservationWitness>> {
    let mut r = rng(seed);
    for trial in 0..attempts {
        let n = r.gen_range(2..=3);
        let mut election = random_election(&mut r, n, 3);
        while election.rule.name() != "plurality" {
            election = random_election(&mut r, n, 3);
        }
        let profiles = [random_profile(&mut r, n, 3), random_profile(&mut r, n, 3)];
        let voter = Voter::from_index(r.gen_range(0..n));
        let mut partitions = vec![Partition::identity(2); n];
        partitions[voter.index()] = Partition::universal(2);
        let model = ProfileModel::new(vec!["s".into(), "t".into()], partitions, profiles.to_vec())?;
        let kp = KnowledgeProfile::new(model, 0)?;
        let ctx = EvalContext::new(&election, &kp.model);
        let declared = DeclaredBallots::empty(2, n);
        let f = profile_formula(&profiles[0]);
        let rep = preservation_experiment(&ctx, &kp, &declared, voter, &f)?;
        if rep.loses_weak_de_re() {
            return Ok(Some(PreservationWitness {
                trial,
                voter,
                announcement: render(&f, &election.candidates),
                states_after: rep.states_after.clone(),
                instance: describe(&election, &kp),
            }));
        }
    }
    Ok(None)
}

/// A profile whose conditional equilibria and Nash equilibria differ.
#[derive(Debug, Clone)]
pub struct NashMismatch {
    pub trial: usize,
    pub conditional: Vec<String>,
    pub nash: Vec<String>,
    pub instance: String,
}

#[derive(Debug, Clone, Default)]
pub struct NashReport {
    pub trials: usize,
    pub equilibria: usize,
    pub mismatches: Vec<NashMismatch>,
}

impl fmt::Display for NashReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "nash: {} profiles, {} equilibria in total, {} mismatches",
            self.trials,
            self.equilibria,
            self.mismatches.len()
        )?;
        for m in &self.mismatches {
            writeln!(f, "trial {}: conditional {:?} nash {:?}", m.trial, m.conditional, m.nash)?;
            write!(f, "{}", m.instance)?;
        }
        Ok(())
    }
}

/// Wraps random two-voter, three-candidate profiles as one-state models and
/// compares their conditional equilibria with the Nash equilibria found by
/// brute force over declared profiles.
pub fn nash(seed: u64, trials: usize) -> Result<NashReport> {
    let mut r = rng(seed);
    let mut report = NashReport::default();
    for trial in 0..trials {
        let election = random_election(&mut r, 2, 3);
        let truthful = random_profile(&mut r, 2, 3);
        let model = ProfileModel::new(vec!["s".into()], vec![Partition::identity(1); 2], vec![truthful.clone()])?;
        let label = |p: &Profile| {
            p.votes()
                .iter()
                .map(|v| election.candidates.render_vote(v, ""))
                .join(",")
        };
        let conditional: Vec<String> = enumerate_equilibria(&model, &election, false)?
            .iter()
            .map(|cp: &ConditionalProfile| label(&cp.declared_at(&model, 0)))
            .sorted()
            .collect();
        let ballots = all_votes(3, &election.limits)?;
        let mut nash = Vec::new();
        for (x, y) in ballots.iter().cartesian_product(&ballots) {
            let declared = Profile::new(vec![x.clone(), y.clone()])?;
            if election.is_equilibrium(&truthful, &declared)? {
                nash.push(label(&declared));
            }
        }
        nash.sort();
        report.trials += 1;
        report.equilibria += nash.len();
        if conditional != nash {
            let kp = KnowledgeProfile::new(model, 0)?;
            report.mismatches.push(NashMismatch {
                trial,
                conditional,
                nash,
                instance: describe(&election, &kp),
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct RoundTripReport {
    pub trials: usize,
    pub failures: Vec<String>,
}

impl fmt::Display for RoundTripReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "roundtrip: {} formulas, {} failures", self.trials, self.failures.len())?;
        for x in &self.failures {
            writeln!(f, "  {x}")?;
        }
        Ok(())
    }
}

/// Prints random formulas of depth at most 6 and parses them back.
pub fn roundtrip(seed: u64, trials: usize) -> Result<RoundTripReport> {
    let mut r = rng(seed);
    let mut report = RoundTripReport::default();
    let names = ["s", "t", "u"];
    for _ in 0..trials {
        let n = r.gen_range(1..=3);
        let m = r.gen_range(2..=4);
        let vocab = Vocabulary {
            candidates: crate::voting::CandidateSet::new(&crate::random::candidate_names(m))?,
            voters: n,
            states: names[..r.gen_range(0..=3)].iter().map(|s| s.to_string()).collect(),
        };
        let f = crate::random::random_formula(&mut r, &vocab, 6);
        let text = render(&f, &vocab.candidates);
        report.trials += 1;
        match parse_formula(&text, &vocab) {
            Ok(g) if g == f => {}
            Ok(_) => report.failures.push(format!("{text}: parsed to a different formula")),
            Err(e) => report.failures.push(format!("{text}: {e}")),
        }
    }
    Ok(report)
}

/// Names accepted by [`run`].
pub const KINDS: &[&str] = &["definability", "preservation", "weak", "nash", "roundtrip"];

/// Runs a named harness and renders its report. The second value is
/// whether the run found what it checks for.
pub fn run(kind: &str, seed: u64, trials: usize) -> Result<(String, bool)> {
    let shape = InstanceShape::default();
    match kind {
        "definability" => {
            let rep = definability(seed, trials, shape)?;
            Ok((rep.to_string(), rep.disagreements.is_empty()))
        }
        "preservation" => {
            let rep = preservation(seed, trials, shape)?;
            Ok((rep.to_string(), rep.violations.is_empty()))
        }
        "weak" => match weak_counterexample(seed, trials)? {
            Some(w) => Ok((format!("weak de re lost: {w}"), true)),
            None => Ok(("weak de re lost: none found\n".to_string(), false)),
        },
        "nash" => {
            let rep = nash(seed, trials)?;
            Ok((rep.to_string(), rep.mismatches.is_empty()))
        }
        "roundtrip" => {
            let rep = roundtrip(seed, trials)?;
            Ok((rep.to_string(), rep.failures.is_empty()))
        }
        other => Err(Error::Domain(format!(
            "unknown harness `{other}` (known: {})",
            KINDS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_are_clean() {
        assert!(definability(1, 20, InstanceShape::default()).unwrap().disagreements.is_empty());
        assert!(preservation(1, 20, InstanceShape::default()).unwrap().violations.is_empty());
        assert!(nash(1, 10).unwrap().mismatches.is_empty());
        assert!(roundtrip(1, 200).unwrap().failures.is_empty());
    }

    #[test]
    fn unknown_kind_is_a_domain_error() {
        assert!(matches!(run("nope", 0, 1), Err(Error::Domain(_))));
    }
}
