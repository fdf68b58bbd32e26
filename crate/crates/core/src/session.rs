//! A stateful session over one scenario: queries, announcements and vote
//! declarations, with a transcript of updates.

use std::fmt::Write as _;

use itertools::Itertools;

use crate::dynamics::{announce, announce_trace, assign, assign_trace, declare_truthful_batch, declare_vote_batch, declared_winner};
use crate::epistemic::{render_partition, KnowledgeProfile, WinnerBasis, WinnerMode};
use crate::equilibrium::{certificates, enumerate_equilibria, game_matrix, render_conditional, MatrixView};
use crate::error::{Error, Result};
use crate::logic::{parse_assignments, parse_formula, DeclaredBallots, EvalContext, Vocabulary};
use crate::manipulation::{classify, compare_notions, NotionRegistry};
use crate::scenario::Scenario;
use crate::voting::Voter;

/// How a voter declares a ballot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Truthful,
    Ballot(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Eval(String),
    Valid(String),
    Classify { voter: usize },
    Definability { voter: usize },
    Equilibria { reduce_ballots: bool, certificates: bool },
    Matrix { view: MatrixView },
    Winners { mode: WinnerMode, basis: WinnerBasis },
    Announce(String),
    Declare { voter: usize, how: Declaration },
    Assign(String),
    Point(String),
    Show,
    Reset,
    Transcript,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

impl Command {
    /// Parses one command line; arguments may be quoted.
    pub fn parse(line: &str) -> Result<Command> {
        let words = shlex::split(line).ok_or_else(|| usage("unbalanced quotes"))?;
        let (name, args) = words.split_first().ok_or_else(|| usage("empty command"))?;
        let rest = || -> Result<String> {
            if args.is_empty() {
                return Err(usage(format!("`{name}` needs an argument")));
            }
            Ok(args.join(" "))
        };
        let has = |flag: &str| args.iter().any(|a| a == flag);
        let value_of = |flag: &str| -> Result<Option<&String>> {
            match args.iter().position(|a| a == flag) {
                Some(k) => args
                    .get(k + 1)
                    .map(Some)
                    .ok_or_else(|| usage(format!("`{flag}` needs a value"))),
                None => Ok(None),
            }
        };
        let only = |allowed: &[&str]| -> Result<()> {
            let mut k = 0;
            while k < args.len() {
                let a = args[k].as_str();
                if !allowed.contains(&a) {
                    return Err(usage(format!("unexpected argument `{a}` for `{name}`")));
                }
                k += if a == "--voter" || a == "--view" || a == "--vote" { 2 } else { 1 };
            }
            Ok(())
        };
        let voter = || -> Result<usize> {
            let v = value_of("--voter")?.ok_or_else(|| usage(format!("`{name}` needs --voter")))?;
            v.parse().map_err(|_| usage(format!("`{v}` is not a voter number")))
        };
        Ok(match name.as_str() {
            "eval" => Command::Eval(rest()?),
            "valid" => Command::Valid(rest()?),
            "announce" => Command::Announce(rest()?),
            "assign" => Command::Assign(rest()?),
            "classify" => {
                only(&["--voter"])?;
                Command::Classify { voter: voter()? }
            }
            "definability" => {
                only(&["--voter"])?;
                Command::Definability { voter: voter()? }
            }
            "equilibria" => {
                only(&["--reduce-ballots", "--certificates"])?;
                Command::Equilibria {
                    reduce_ballots: has("--reduce-ballots"),
                    certificates: has("--certificates"),
                }
            }
            "matrix" => {
                only(&["--view"])?;
                let view = match value_of("--view")? {
                    Some(v) => v.parse()?,
                    None => MatrixView::Maximin,
                };
                Command::Matrix { view }
            }
            "winners" => {
                only(&["--possible", "--necessary", "--cowinner"])?;
                let mode = match (has("--possible"), has("--necessary")) {
                    (true, false) => WinnerMode::Possible,
                    (false, true) => WinnerMode::Necessary,
                    _ => return Err(usage("`winners` needs exactly one of --possible, --necessary")),
                };
                let basis = if has("--cowinner") {
                    WinnerBasis::Cowinner
                } else {
                    WinnerBasis::Winner
                };
                Command::Winners { mode, basis }
            }
            "declare" => {
                let (v, flags) = args
                    .split_first()
                    .ok_or_else(|| usage("`declare` needs a voter"))?;
                let voter = v
                    .parse()
                    .map_err(|_| usage(format!("`{v}` is not a voter number")))?;
                let how = match flags {
                    [t] if t == "--truthful" => Declaration::Truthful,
                    [f, ballot] if f == "--vote" => Declaration::Ballot(ballot.clone()),
                    _ => return Err(usage("`declare` needs --truthful or --vote \"ballot\"")),
                };
                Command::Declare { voter, how }
            }
            "point" => Command::Point(rest()?),
            "show" => Command::Show,
            "reset" => Command::Reset,
            "transcript" => Command::Transcript,
            other => return Err(usage(format!("unknown command `{other}`"))),
        })
    }
}

/// Output of one command. `verdict` is set by commands that answer a
/// yes/no question (a formula's truth, a nonempty result).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub text: String,
    pub verdict: Option<bool>,
}

impl Response {
    fn plain(text: String) -> Self {
        Response { text, verdict: None }
    }

    fn verdict(text: String, verdict: bool) -> Self {
        Response {
            text,
            verdict: Some(verdict),
        }
    }

    /// 0 on success, 1 when a requested verdict is false or empty.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Some(false) => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    scenario: Scenario,
    kp: KnowledgeProfile,
    declared: DeclaredBallots,
    transcript: Vec<String>,
}

impl Session {
    pub fn new(scenario: Scenario) -> Self {
        let kp = scenario.knowledge_profile();
        let declared = DeclaredBallots::empty(kp.model.len(), kp.model.voters());
        Session {
            scenario,
            kp,
            declared,
            transcript: Vec::new(),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn knowledge_profile(&self) -> &KnowledgeProfile {
        &self.kp
    }

    pub fn declared(&self) -> &DeclaredBallots {
        &self.declared
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    fn ctx(&self) -> EvalContext<'_> {
        EvalContext::new(&self.scenario.election, &self.scenario.model)
    }

    /// Formulas may name any state of the original scenario.
    fn vocabulary(&self) -> Vocabulary {
        self.scenario.vocabulary()
    }

    fn voter(&self, n: usize) -> Result<Voter> {
        let v = Voter::from_number(n)?;
        self.scenario.election.check_voter(v)?;
        Ok(v)
    }

    pub fn run(&mut self, cmd: &Command) -> Result<Response> {
        let election = &self.scenario.election;
        let model = &self.kp.model;
        Ok(match cmd {
            Command::Eval(text) => {
                let f = parse_formula(text, &self.vocabulary())?;
                let v = self.ctx().holds(model, &self.declared, self.kp.point, &f)?;
                Response::verdict(format!("{v}\n"), v)
            }
            Command::Valid(text) => {
                let f = parse_formula(text, &self.vocabulary())?;
                let ctx = self.ctx();
                let truth = ctx.truth_set(model, &self.declared, &f)?;
                let v = truth.len() == model.len();
                let mut out = format!("{v}\n");
                if !v {
                    let failing = model.states().filter(|s| !truth.contains(s)).map(|s| model.name(s)).join(" ");
                    let _ = writeln!(out, "fails at: {failing}");
                }
                Response::verdict(out, v)
            }
            Command::Classify { voter } => {
                let i = self.voter(*voter)?;
                Response::plain(classify(&self.kp, i, election)?.render(&election.candidates))
            }
            Command::Definability { voter } => {
                let i = self.voter(*voter)?;
                let rows = compare_notions(&self.kp, i, election, &NotionRegistry::default())?;
                let mut out = String::new();
                for r in &rows {
                    let _ = writeln!(out, "{} classifier={} formula={}", r.notion, r.classifier, r.formula);
                }
                let agree = rows.iter().all(|r| r.classifier == r.formula);
                let _ = writeln!(out, "agree={agree}");
                Response::verdict(out, agree)
            }
            Command::Equilibria {
                reduce_ballots,
                certificates: certs,
            } => {
                let found = enumerate_equilibria(model, election, *reduce_ballots)?;
                let mut out = String::new();
                for cp in &found {
                    let _ = writeln!(out, "{}", render_conditional(model, election, cp));
                    if *certs {
                        for c in certificates(model, election, cp)? {
                            let block = &model.partition(c.voter).blocks()[c.block];
                            let _ = writeln!(
                                out,
                                "  voter {} {{{}}}: worst {}, best deviation {}",
                                c.voter,
                                block.iter().map(|&s| model.name(s)).join(" "),
                                election.candidates.name(c.value),
                                election.candidates.name(c.best_deviation)
                            );
                        }
                    }
                }
                let _ = writeln!(out, "{} equilibria", found.len());
                Response::verdict(out, !found.is_empty())
            }
            Command::Matrix { view } => Response::plain(game_matrix(model, election, *view)?.to_tsv()),
            Command::Winners { mode, basis } => {
                let set = model.possible_necessary_winners(election, *mode, *basis);
                let names = set.iter().map(|&c| election.candidates.name(c)).join(" ");
                Response::verdict(format!("{names}\n"), !set.is_empty())
            }
            Command::Announce(text) => {
                let f = parse_formula(text, &self.vocabulary())?;
                let ctx = self.ctx();
                let (kp, declared) = announce(&ctx, &self.kp, &self.declared, &f)?;
                let line = announce_trace(&f, &ctx, &kp);
                self.kp = kp;
                self.declared = declared;
                self.transcript.push(line.clone());
                Response::plain(format!("{line}\n"))
            }
            Command::Declare { voter, how } => {
                let i = self.voter(*voter)?;
                let batch = match how {
                    Declaration::Truthful => declare_truthful_batch(i, election.m()),
                    Declaration::Ballot(b) => declare_vote_batch(i, &election.candidates.parse_vote(b)?),
                };
                self.apply(&batch)?
            }
            Command::Assign(text) => {
                let batch = parse_assignments(text, &self.vocabulary())?;
                self.apply(&batch)?
            }
            Command::Point(name) => {
                self.kp.point = self.kp.model.state(name)?;
                Response::plain(format!("point: {name}\n"))
            }
            Command::Show => Response::plain(self.show()),
            Command::Reset => {
                *self = Session::new(self.scenario.clone());
                Response::plain("reset\n".to_string())
            }
            Command::Transcript => Response::plain(self.transcript.iter().map(|l| format!("{l}\n")).collect()),
        })
    }

    fn apply(&mut self, batch: &[crate::logic::Assignment]) -> Result<Response> {
        let ctx = self.ctx();
        let declared = assign(&ctx, &self.kp, &self.declared, batch)?;
        let line = assign_trace(batch, &ctx);
        let winner = match declared_winner(ctx.election, &declared, self.kp.point) {
            Some(w) => ctx.election.candidates.name(w).to_string(),
            None => "undefined".to_string(),
        };
        self.declared = declared;
        self.transcript.push(line.clone());
        Ok(Response::plain(format!(
            "{line}\ndeclared winner at {}: {winner}\n",
            self.kp.point_name()
        )))
    }

    /// The current model, point and declared ballots.
    pub fn show(&self) -> String {
        let e = &self.scenario.election;
        let m = &self.kp.model;
        let mut out = String::new();
        let _ = writeln!(out, "rule: {}", e.rule.describe());
        let _ = writeln!(out, "tiebreak: {}", e.candidates.render_vote(e.tiebreak.order(), " "));
        for s in m.states() {
            let p = m.profile(s);
            let votes = p
                .votes()
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{}: {}", i + 1, e.candidates.render_vote(v, " ")))
                .join(" ; ");
            let winner = e.candidates.name(e.winner(p));
            let declared = match declared_winner(e, &self.declared, s) {
                Some(w) => e.candidates.name(w).to_string(),
                None => "undefined".to_string(),
            };
            let _ = writeln!(
                out,
                "state {}: {votes}  winner={winner} declared_winner={declared}",
                m.name(s)
            );
        }
        for (i, p) in m.partitions().iter().enumerate() {
            let _ = writeln!(out, "partition {}: {}", i + 1, render_partition(m, p));
        }
        let _ = writeln!(out, "point: {}", self.kp.point_name());
        out
    }
}
