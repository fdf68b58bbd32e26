//! Bundled scenarios with short demonstration scripts.

use crate::error::{Error, Result};
use crate::scenario::{load_scenario, Scenario};
use crate::session::{Command, Session};

#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub name: &'static str,
    pub title: &'static str,
    pub scenario: &'static str,
    /// Session commands, one per line.
    pub script: &'static [&'static str],
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "ex1",
        title: "three-state knowledge profile",
        scenario: include_str!("../scenarios/ex1.scn"),
        script: &[
            "eval \"K2 a >_1 d\"",
            "point t",
            "eval \"K2 a >_1 d\"",
            "valid \"(a >_1 c & c >_1 b & b >_1 d -> K1 (a >_1 c & c >_1 b & b >_1 d)) & (d >_1 c & c >_1 b & b >_1 a -> K1 (d >_1 c & c >_1 b & b >_1 a)) & (d >_2 c & c >_2 b & b >_2 a -> K2 (d >_2 c & c >_2 b & b >_2 a))\"",
            "eval \"C {1 2} d >_2 a\"",
            "eval \"D {1 2} a >_1 d\"",
        ],
    },
    Example {
        name: "ex2",
        title: "Borda, knowledge de dicto without de re",
        scenario: include_str!("../scenarios/ex2.scn"),
        script: &["classify --voter 1", "definability --voter 1"],
    },
    Example {
        name: "ex3",
        title: "plurality game under full knowledge",
        scenario: include_str!("../scenarios/ex3.scn"),
        script: &[
            "matrix --view outcomes",
            "matrix --view payoffs",
            "equilibria --reduce-ballots",
        ],
    },
    Example {
        name: "ex4",
        title: "conditional equilibria with two states",
        scenario: include_str!("../scenarios/ex4.scn"),
        script: &["equilibria --reduce-ballots --certificates"],
    },
    Example {
        name: "ex5",
        title: "conditional equilibria with three states",
        scenario: include_str!("../scenarios/ex5.scn"),
        script: &["equilibria --reduce-ballots"],
    },
    Example {
        name: "ex6",
        title: "announcing preferences",
        scenario: include_str!("../scenarios/ex6.scn"),
        script: &[
            "eval \"~K2 a >_1 c & [! a >_1 c] K2 a >_1 c\"",
            "announce \"prof(t)\"",
            "equilibria --reduce-ballots",
            "reset",
            "point u",
            "equilibria --reduce-ballots",
            "announce \"vote(1, u)\"",
            "equilibria --reduce-ballots",
            "transcript",
        ],
    },
    Example {
        name: "ex7",
        title: "declaring a ballot",
        scenario: include_str!("../scenarios/ex7.scn"),
        script: &[
            "eval \"a >>_1 b\"",
            "declare 1 --vote \"a b c\"",
            "valid \"a >>_1 b & b >>_1 c & a >>_1 c\"",
        ],
    },
    Example {
        name: "ex8",
        title: "declaring votes in the two-state model",
        scenario: include_str!("../scenarios/ex8.scn"),
        script: &[
            "declare 2 --truthful",
            "valid \"d >>_2 a & d >>_2 b & d >>_2 c\"",
            "declare 1 --vote \"a c b d\"",
            "show",
        ],
    },
    Example {
        name: "ex9",
        title: "partial profile and possible winners",
        scenario: include_str!("../scenarios/ex9.scn"),
        script: &["show", "winners --possible", "winners --necessary", "winners --possible --cowinner"],
    },
    Example {
        name: "table1",
        title: "the 16x4 conditional game matrix",
        scenario: include_str!("../scenarios/table1.scn"),
        script: &["matrix"],
    },
];

/// Formulas over the `ex1` vocabulary, one per line, in printed form.
pub const FORMULA_CORPUS: &str = include_str!("../scenarios/formulas.txt");

pub fn corpus_formulas() -> impl Iterator<Item = &'static str> {
    FORMULA_CORPUS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn example(name: &str) -> Result<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name).ok_or_else(|| {
        Error::Domain(format!(
            "unknown example `{name}` (known: {})",
            EXAMPLES.iter().map(|e| e.name).collect::<Vec<_>>().join(", ")
        ))
    })
}

pub fn load_builtin(name: &str) -> Result<Scenario> {
    load_scenario(example(name)?.scenario)
}

/// Runs an example's script, echoing each command before its output.
pub fn run_example(name: &str) -> Result<String> {
    let ex = example(name)?;
    let mut session = Session::new(load_scenario(ex.scenario)?);
    let mut out = format!("# {}: {}\n", ex.name, ex.title);
    for line in ex.script {
        out.push_str(&format!("> {line}\n"));
        let response = session.run(&Command::parse(line)?)?;
        out.push_str(&response.text);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_loads_and_runs() {
        for ex in EXAMPLES {
            load_scenario(ex.scenario).unwrap_or_else(|e| panic!("{}: {e}", ex.name));
            if ex.name != "ex2" {
                run_example(ex.name).unwrap_or_else(|e| panic!("{}: {e}", ex.name));
            }
        }
    }

    #[test]
    fn corpus_parses() {
        let vocab = load_builtin("ex1").unwrap().vocabulary();
        for f in corpus_formulas() {
            crate::logic::parse_formula(f, &vocab).unwrap_or_else(|e| panic!("{f}: {e}"));
        }
    }
}
