use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use stratvote::builtin::{self, EXAMPLES};
use stratvote::equilibrium::MatrixView;
use stratvote::epistemic::{WinnerBasis, WinnerMode};
use stratvote::scenario::{load_scenario, with_rule, Scenario};
use stratvote::session::{Command, Declaration, Session};
use stratvote::voting::RuleRegistry;
use stratvote::{harness, Error};

/// Model checker for strategic voting under incomplete knowledge.
#[derive(Parser, Debug)]
#[command(name = "stratvote", version)]
struct Cli {
    #[command(flatten)]
    source: Source,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Source {
    /// Scenario file
    #[arg(long, global = true, conflicts_with = "builtin")]
    scenario: Option<PathBuf>,

    /// Bundled scenario (see `list`)
    #[arg(long, global = true)]
    builtin: Option<String>,

    /// Evaluate at this state instead of the scenario's point
    #[arg(long, global = true)]
    point: Option<String>,

    /// Override the voting rule, e.g. "borda" or "positional 2 1 0"
    #[arg(long, global = true)]
    rule: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Truth value of a formula at the point
    Eval { formula: String },
    /// Whether a formula holds at every state
    Valid { formula: String },
    /// Knowledge-of-manipulation flags and witnesses for a voter
    Classify {
        #[arg(long)]
        voter: usize,
    },
    /// Classifier verdicts next to defining-formula truth values
    Definability {
        #[arg(long)]
        voter: usize,
    },
    /// All conditional equilibria
    Equilibria {
        /// Quotient ballots by outcome equivalence
        #[arg(long)]
        reduce_ballots: bool,
        /// Print the worst outcome and best deviation per class
        #[arg(long)]
        certificates: bool,
    },
    /// Two-voter game matrix as TSV
    Matrix {
        #[arg(long, default_value = "maximin", value_parser = ["maximin", "outcomes", "payoffs"])]
        view: String,
    },
    /// Possible or necessary winners over the whole model
    #[command(group(ArgGroup::new("mode").required(true).args(["possible", "necessary"])))]
    Winners {
        #[arg(long)]
        possible: bool,
        #[arg(long)]
        necessary: bool,
        /// Count cowinners instead of tie-broken winners
        #[arg(long)]
        cowinner: bool,
    },
    /// Announce a formula and show the remaining model
    Announce { formula: String },
    /// Declare a voter's ballot in every state
    #[command(group(ArgGroup::new("how").required(true).args(["truthful", "vote"])))]
    Declare {
        voter: usize,
        #[arg(long)]
        truthful: bool,
        #[arg(long)]
        vote: Option<String>,
    },
    /// Apply an assignment batch, e.g. "a >>_1 b := true"
    Assign { batch: String },
    /// Print the model
    Show,
    /// Read commands from standard input, one per line
    Repl,
    /// Run a bundled example's script
    Example { name: String },
    /// List bundled examples
    List,
    /// Run a seeded randomized experiment
    Harness {
        #[arg(value_parser = harness::KINDS.to_vec())]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

fn load(source: &Source) -> Result<Scenario, Error> {
    let mut scenario = match (&source.scenario, &source.builtin) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
            load_scenario(&text)?
        }
        (None, Some(name)) => builtin::load_builtin(name)?,
        (None, None) => return Err(Error::Domain("give --scenario FILE or --builtin NAME".into())),
    };
    if let Some(rule) = &source.rule {
        scenario = with_rule(scenario, RuleRegistry::default().parse(rule)?)?;
    }
    if let Some(point) = &source.point {
        scenario = scenario.with_point(point)?;
    }
    Ok(scenario)
}

fn session_command(cmd: Cmd) -> Result<Command, Cmd> {
    Ok(match cmd {
        Cmd::Eval { formula } => Command::Eval(formula),
        Cmd::Valid { formula } => Command::Valid(formula),
        Cmd::Classify { voter } => Command::Classify { voter },
        Cmd::Definability { voter } => Command::Definability { voter },
        Cmd::Equilibria {
            reduce_ballots,
            certificates,
        } => Command::Equilibria {
            reduce_ballots,
            certificates,
        },
        Cmd::Matrix { view } => Command::Matrix {
            view: view.parse::<MatrixView>().expect("validated by clap"),
        },
        Cmd::Winners {
            possible, cowinner, ..
        } => Command::Winners {
            mode: if possible { WinnerMode::Possible } else { WinnerMode::Necessary },
            basis: if cowinner { WinnerBasis::Cowinner } else { WinnerBasis::Winner },
        },
        Cmd::Announce { formula } => Command::Announce(formula),
        Cmd::Declare { voter, vote, .. } => Command::Declare {
            voter,
            how: vote.map_or(Declaration::Truthful, Declaration::Ballot),
        },
        Cmd::Assign { batch } => Command::Assign(batch),
        Cmd::Show => Command::Show,
        other => return Err(other),
    })
}

fn repl(source: &Source) -> Result<i32, Error> {
    let mut session = Session::new(load(source)?);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut status = 0;
    for line in io::stdin().lock().lines() {
        let line = line.map_err(|e| Error::Domain(format!("reading input: {e}")))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "quit" || line == "exit" {
            break;
        }
        match Command::parse(line).and_then(|c| session.run(&c)) {
            Ok(r) => {
                let _ = out.write_all(r.text.as_bytes());
            }
            Err(e) => {
                let _ = writeln!(out, "error: {e}");
                status = 2;
            }
        }
    }
    Ok(status)
}

fn run(cli: Cli) -> Result<i32, Error> {
    let cmd = match session_command(cli.command) {
        Ok(cmd) => {
            let response = Session::new(load(&cli.source)?).run(&cmd)?;
            print!("{}", response.text);
            return Ok(response.exit_code());
        }
        Err(other) => other,
    };
    match cmd {
        Cmd::Repl => repl(&cli.source),
        Cmd::Example { name } => {
            print!("{}", builtin::run_example(&name)?);
            Ok(0)
        }
        Cmd::List => {
            for ex in EXAMPLES {
                println!("{}\t{}", ex.name, ex.title);
            }
            Ok(0)
        }
        Cmd::Harness { kind, seed, trials } => {
            let (text, ok) = harness::run(&kind, seed, trials)?;
            print!("{text}");
            Ok(if ok { 0 } else { 1 })
        }
        _ => unreachable!("session commands handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
