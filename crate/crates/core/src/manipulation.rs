//! Knowledge of manipulation: the direct classifier over a voter's
//! equivalence class, and the equivalent defining formulas.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;

use crate::epistemic::KnowledgeProfile;
use crate::error::{Error, Result};
use crate::logic::{profile_formula, DeclaredBallots, EvalContext, Formula, ProfileTerm};
use crate::voting::{all_profiles, all_votes, CandidateSet, Election, Profile, Vote, Voter};

/// How a replacement ballot changes the outcome of one profile for the
/// voter, judged by her truthful vote in that profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effect {
    Better,
    Same,
    Worse,
}

/// The effect of every ballot at every state of a voter's class.
#[derive(Debug, Clone)]
pub struct ClassScan {
    pub voter: Voter,
    /// States of the class, increasing.
    pub class: Vec<usize>,
    /// Position of the point inside `class`.
    pub point: usize,
    pub ballots: Vec<Vote>,
    /// `effects[k][b]`: ballot `b` at state `class[k]`.
    pub effects: Vec<Vec<Effect>>,
}

impl ClassScan {
    pub fn new(kp: &KnowledgeProfile, i: Voter, election: &Election) -> Result<Self> {
        election.check_voter(i)?;
        let class = kp.model.eq_class(i, kp.point)?.to_vec();
        let ballots = all_votes(election.m(), &election.limits)?;
        let effects = class
            .iter()
            .map(|&t| {
                let p = kp.model.profile(t);
                let truthful = p.vote(i);
                let before = election.winner(p);
                ballots
                    .iter()
                    .map(|b| {
                        let after = election.winner(&p.with_vote(i, b.clone()));
                        if truthful.prefers(after, before) {
                            Effect::Better
                        } else if after == before {
                            Effect::Same
                        } else {
                            Effect::Worse
                        }
                    })
                    .collect()
            })
            .collect();
        let point = class.iter().position(|&t| t == kp.point).expect("class contains the point");
        Ok(ClassScan {
            voter: i,
            class,
            point,
            ballots,
            effects,
        })
    }

    /// Some ballot strictly improves the outcome at the `k`-th class state.
    pub fn manipulable_at(&self, k: usize) -> bool {
        self.effects[k].contains(&Effect::Better)
    }

    /// Ballot `b` strictly improves the outcome at every state of the class.
    pub fn successful_everywhere(&self, b: usize) -> bool {
        self.effects.iter().all(|row| row[b] == Effect::Better)
    }

    /// Ballot `b` never worsens the outcome and strictly improves it somewhere.
    pub fn weakly_successful(&self, b: usize) -> bool {
        self.effects.iter().all(|row| row[b] != Effect::Worse)
            && self.effects.iter().any(|row| row[b] == Effect::Better)
    }

    pub fn de_re_witnesses(&self) -> BTreeSet<Vote> {
        (0..self.ballots.len())
            .filter(|&b| self.successful_everywhere(b))
            .map(|b| self.ballots[b].clone())
            .collect()
    }

    pub fn weak_witnesses(&self) -> BTreeSet<Vote> {
        (0..self.ballots.len())
            .filter(|&b| self.weakly_successful(b))
            .map(|b| self.ballots[b].clone())
            .collect()
    }
}

/// The profiles, descriptions and outcome atoms from which the defining
/// formulas are assembled, for one voter of one election.
pub struct Definitions<'a> {
    pub voter: Voter,
    pub election: &'a Election,
    profiles: Vec<Arc<Profile>>,
    descr: Vec<Arc<Formula>>,
    ballots: Vec<Vote>,
    deviations: OnceLock<Vec<Vec<Arc<Profile>>>>,
    better: OnceLock<Vec<Vec<Arc<Formula>>>>,
    worse: OnceLock<Vec<Vec<Arc<Formula>>>>,
    actual_core: OnceLock<Arc<Formula>>,
}

impl fmt::Debug for Definitions<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Definitions")
            .field("voter", &self.voter)
            .field("profiles", &self.profiles.len())
            .finish()
    }
}

impl<'a> Definitions<'a> {
    /// Enumerates all (m!)^n profiles, failing with a resource error above
    /// the election's formula budget.
    pub fn new(election: &'a Election, voter: Voter) -> Result<Self> {
        election.check_voter(voter)?;
        let profiles: Vec<Arc<Profile>> = all_profiles(election.voters, election.m(), &election.limits)?
            .into_iter()
            .map(Arc::new)
            .collect();
        let descr = profiles.iter().map(|p| Arc::new(profile_formula(p))).collect();
        Ok(Definitions {
            voter,
            election,
            profiles,
            descr,
            ballots: all_votes(election.m(), &election.limits)?,
            deviations: OnceLock::new(),
            better: OnceLock::new(),
            worse: OnceLock::new(),
            actual_core: OnceLock::new(),
        })
    }

    fn deviations(&self) -> &[Vec<Arc<Profile>>] {
        self.deviations.get_or_init(|| {
            self.profiles
                .iter()
                .map(|p| {
                    self.ballots
                        .iter()
                        .map(|b| Arc::new(p.with_vote(self.voter, b.clone())))
                        .collect()
                })
                .collect()
        })
    }

    fn outcome_atoms(&self, improving: bool) -> Vec<Vec<Arc<Formula>>> {
        let devs = self.deviations();
        self.profiles
            .iter()
            .zip(devs)
            .map(|(p, row)| {
                row.iter()
                    .map(|q| {
                        let (l, r) = if improving { (q, p) } else { (p, q) };
                        Arc::new(Formula::OutcomePref {
                            voter: self.voter,
                            left: ProfileTerm::Literal(l.clone()),
                            right: ProfileTerm::Literal(r.clone()),
                            anchor: Some(ProfileTerm::Literal(p.clone())),
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// `better[k][b]`: ballot `b` improves on profile `k` for the voter.
    fn better(&self) -> &[Vec<Arc<Formula>>] {
        self.better.get_or_init(|| self.outcome_atoms(true))
    }

    /// `worse[k][b]`: ballot `b` worsens profile `k` for the voter.
    fn worse(&self) -> &[Vec<Arc<Formula>>] {
        self.worse.get_or_init(|| self.outcome_atoms(false))
    }

    /// `⋁_P (P ∧ φ)` for a formula independent of `P`.
    fn at_some_profile(&self, f: Arc<Formula>) -> Formula {
        Formula::disjunction(
            self.descr
                .iter()
                .map(|d| Arc::new(Formula::And(d.clone(), f.clone())))
                .collect(),
        )
    }

    /// `⋁_P (P ∧ ⋁_v' P[v'] ≻_i P)`: the voter can manipulate the current profile.
    pub fn actual_core(&self) -> Arc<Formula> {
        self.actual_core
            .get_or_init(|| {
                let better = self.better();
                Arc::new(Formula::disjunction(
                    self.descr
                        .iter()
                        .zip(better)
                        .map(|(d, row)| {
                            Arc::new(Formula::And(d.clone(), Arc::new(Formula::disjunction(row.clone()))))
                        })
                        .collect(),
                ))
            })
            .clone()
    }

    /// `⋁_P'' (P'' ∧ atom(P'', b))` for ballot `b`.
    fn per_profile(&self, atoms: &[Vec<Arc<Formula>>], b: usize, negate: bool) -> Arc<Formula> {
        Arc::new(Formula::disjunction(
            self.descr
                .iter()
                .zip(atoms)
                .map(|(d, row)| {
                    let atom = if negate {
                        Arc::new(Formula::Not(row[b].clone()))
                    } else {
                        row[b].clone()
                    };
                    Arc::new(Formula::And(d.clone(), atom))
                })
                .collect(),
        ))
    }

    pub fn actual(&self) -> Formula {
        (*self.actual_core()).clone()
    }

    pub fn considers_possible(&self) -> Formula {
        Formula::possible(self.voter, self.actual_core())
    }

    pub fn de_dicto(&self) -> Formula {
        self.at_some_profile(Arc::new(Formula::know(self.voter, self.actual_core())))
    }

    pub fn de_re(&self) -> Formula {
        let better = self.better();
        let per_ballot = (0..self.ballots.len())
            .map(|b| Arc::new(Formula::know(self.voter, self.per_profile(better, b, false))))
            .collect();
        self.at_some_profile(Arc::new(Formula::disjunction(per_ballot)))
    }

    pub fn de_re_weak(&self) -> Formula {
        let (better, worse) = (self.better(), self.worse());
        let per_ballot = (0..self.ballots.len())
            .map(|b| {
                let never_worse = Formula::know(self.voter, self.per_profile(worse, b, true));
                let sometimes_better = Formula::possible(self.voter, self.per_profile(better, b, false));
                Arc::new(Formula::and(never_worse, sometimes_better))
            })
            .collect();
        self.at_some_profile(Arc::new(Formula::disjunction(per_ballot)))
    }
}

/// One notion of (knowledge of) manipulation: a direct test over the class
/// scan and a defining formula.
pub trait KnowledgeNotion: Send + Sync {
    fn name(&self) -> &str;
    fn holds(&self, scan: &ClassScan) -> bool;
    fn defining_formula(&self, defs: &Definitions<'_>) -> Formula;
}

struct Actual;
struct ConsidersPossible;
struct DeDicto;
struct DeRe;
struct DeReWeak;

impl KnowledgeNotion for Actual {
    fn name(&self) -> &str {
        "actual"
    }
    fn holds(&self, scan: &ClassScan) -> bool {
        scan.manipulable_at(scan.point)
    }
    fn defining_formula(&self, defs: &Definitions<'_>) -> Formula {
        defs.actual()
    }
}

impl KnowledgeNotion for ConsidersPossible {
    fn name(&self) -> &str {
        "considers_possible"
    }
    fn holds(&self, scan: &ClassScan) -> bool {
        (0..scan.class.len()).any(|k| scan.manipulable_at(k))
    }
    fn defining_formula(&self, defs: &Definitions<'_>) -> Formula {
        defs.considers_possible()
    }
}

impl KnowledgeNotion for DeDicto {
    fn name(&self) -> &str {
        "de_dicto"
    }
    fn holds(&self, scan: &ClassScan) -> bool {
        (0..scan.class.len()).all(|k| scan.manipulable_at(k))
    }
    fn defining_formula(&self, defs: &Definitions<'_>) -> Formula {
        defs.de_dicto()
    }
}

impl KnowledgeNotion for DeRe {
    fn name(&self) -> &str {
        "de_re"
    }
    fn holds(&self, scan: &ClassScan) -> bool {
        (0..scan.ballots.len()).any(|b| scan.successful_everywhere(b))
    }
    fn defining_formula(&self, defs: &Definitions<'_>) -> Formula {
        defs.de_re()
    }
}

impl KnowledgeNotion for DeReWeak {
    fn name(&self) -> &str {
        "de_re_weak"
    }
    fn holds(&self, scan: &ClassScan) -> bool {
        (0..scan.ballots.len()).any(|b| scan.weakly_successful(b))
    }
    fn defining_formula(&self, defs: &Definitions<'_>) -> Formula {
        defs.de_re_weak()
    }
}

/// Notions selectable by name, in report order.
pub struct NotionRegistry {
    notions: Vec<Box<dyn KnowledgeNotion>>,
}

impl fmt::Debug for NotionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl Default for NotionRegistry {
    fn default() -> Self {
        let mut r = NotionRegistry { notions: Vec::new() };
        r.register(Box::new(Actual));
        r.register(Box::new(ConsidersPossible));
        r.register(Box::new(DeDicto));
        r.register(Box::new(DeRe));
        r.register(Box::new(DeReWeak));
        r
    }
}

impl NotionRegistry {
    /// Adds a notion, replacing any notion of the same name.
    pub fn register(&mut self, notion: Box<dyn KnowledgeNotion>) {
        self.notions.retain(|n| n.name() != notion.name());
        self.notions.push(notion);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.notions.iter().map(|n| n.name())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn KnowledgeNotion> {
        self.notions.iter().map(|n| n.as_ref())
    }

    pub fn get(&self, name: &str) -> Result<&dyn KnowledgeNotion> {
        self.iter().find(|n| n.name() == name).ok_or_else(|| {
            Error::domain(format!(
                "unknown notion `{name}` (known: {})",
                self.names().join(", ")
            ))
        })
    }
}

/// All five flags plus the exact witness sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationReport {
    pub actual: bool,
    pub considers_possible: bool,
    pub de_dicto: bool,
    pub de_re: bool,
    pub de_re_weak: bool,
    pub de_re_witnesses: BTreeSet<Vote>,
    pub de_re_weak_witnesses: BTreeSet<Vote>,
}

impl ManipulationReport {
    pub fn from_scan(scan: &ClassScan) -> Self {
        let de_re_witnesses = scan.de_re_witnesses();
        let de_re_weak_witnesses = scan.weak_witnesses();
        ManipulationReport {
            actual: Actual.holds(scan),
            considers_possible: ConsidersPossible.holds(scan),
            de_dicto: DeDicto.holds(scan),
            de_re: !de_re_witnesses.is_empty(),
            de_re_weak: !de_re_weak_witnesses.is_empty(),
            de_re_witnesses,
            de_re_weak_witnesses,
        }
    }

    /// Flag value by notion name.
    pub fn flag(&self, name: &str) -> Option<bool> {
        Some(match name {
            "actual" => self.actual,
            "considers_possible" => self.considers_possible,
            "de_dicto" => self.de_dicto,
            "de_re" => self.de_re,
            "de_re_weak" => self.de_re_weak,
            _ => return None,
        })
    }

    /// `flag=value` lines followed by the witness lines; ballots written as
    /// `a>b>c` and sorted.
    pub fn render(&self, candidates: &CandidateSet) -> String {
        let ballots = |set: &BTreeSet<Vote>| {
            set.iter()
                .map(|v| candidates.render_vote(v, ">"))
                .sorted()
                .join(" ")
        };
        let mut out = String::new();
        for (name, value) in [
            ("actual", self.actual),
            ("considers_possible", self.considers_possible),
            ("de_dicto", self.de_dicto),
            ("de_re", self.de_re),
            ("de_re_weak", self.de_re_weak),
        ] {
            out.push_str(&format!("{name}={value}\n"));
        }
        out.push_str(&format!("witnesses={}\n", ballots(&self.de_re_witnesses)));
        out.push_str(&format!("weak_witnesses={}\n", ballots(&self.de_re_weak_witnesses)));
        out
    }
}

/// Classifies voter `i`'s knowledge of manipulation at the point.
pub fn classify(kp: &KnowledgeProfile, i: Voter, election: &Election) -> Result<ManipulationReport> {
    Ok(ManipulationReport::from_scan(&ClassScan::new(kp, i, election)?))
}

/// The defining formula of a named notion for voter `i`.
pub fn defining_formula(notion: &str, i: Voter, election: &Election) -> Result<Formula> {
    let registry = NotionRegistry::default();
    let notion = registry.get(notion)?;
    Ok(notion.defining_formula(&Definitions::new(election, i)?))
}

/// One notion's classifier verdict next to its formula's truth value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotionComparison {
    pub notion: String,
    pub classifier: bool,
    pub formula: bool,
}

/// Evaluates every registered notion both ways at the point.
pub fn compare_notions(
    kp: &KnowledgeProfile,
    i: Voter,
    election: &Election,
    registry: &NotionRegistry,
) -> Result<Vec<NotionComparison>> {
    let scan = ClassScan::new(kp, i, election)?;
    let defs = Definitions::new(election, i)?;
    let ctx = EvalContext::new(election, &kp.model);
    let declared = DeclaredBallots::empty(kp.model.len(), kp.model.voters());
    registry
        .iter()
        .map(|n| {
            let f = n.defining_formula(&defs);
            Ok(NotionComparison {
                notion: n.name().to_string(),
                classifier: n.holds(&scan),
                formula: ctx.holds(&kp.model, &declared, kp.point, &f)?,
            })
        })
        .collect()
}

/// Whether every notion's defining formula agrees with the classifier.
pub fn formulas_agree(kp: &KnowledgeProfile, i: Voter, election: &Election) -> Result<bool> {
    Ok(compare_notions(kp, i, election, &NotionRegistry::default())?
        .iter()
        .all(|c| c.classifier == c.formula))
}
