use itertools::Itertools;

use super::{Assignment, Formula, ProfileTerm};
use crate::voting::CandidateSet;

const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Renders a formula in the concrete syntax accepted by
/// [`super::parse_formula`], with the minimum parentheses.
pub fn render(f: &Formula, candidates: &CandidateSet) -> String {
    let mut out = String::new();
    Printer { candidates }.formula(f, IFF, &mut out);
    out
}

/// Renders an assignment batch without the surrounding brackets.
pub fn render_assignments(items: &[Assignment], candidates: &CandidateSet) -> String {
    let mut out = String::new();
    Printer { candidates }.assignments(items, &mut out);
    out
}

struct Printer<'a> {
    candidates: &'a CandidateSet,
}

impl Printer<'_> {
    fn profile(&self, t: &ProfileTerm) -> String {
        match t {
            ProfileTerm::State(s) => s.clone(),
            ProfileTerm::Literal(p) => format!(
                "<{}>",
                p.votes()
                    .iter()
                    .map(|v| self.candidates.render_vote(v, " "))
                    .join(" | ")
            ),
        }
    }

    fn assignments(&self, items: &[Assignment], out: &mut String) {
        for (k, item) in items.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            match item {
                Assignment::Pair {
                    better,
                    voter,
                    worse,
                    value,
                } => {
                    out.push_str(&format!(
                        "{} >>_{} {} := ",
                        self.candidates.name(*better),
                        voter,
                        self.candidates.name(*worse)
                    ));
                    self.formula(value, IFF, out);
                }
                Assignment::Declare { voter, source } => {
                    out.push_str(&format!("decl({voter}, {})", self.profile(source)));
                }
            }
        }
    }

    fn binary(&self, a: &Formula, b: &Formula, op: &str, prec: u8, min: u8, lmin: u8, rmin: u8, out: &mut String) {
        let paren = prec < min;
        if paren {
            out.push('(');
        }
        self.formula(a, lmin, out);
        out.push_str(op);
        self.formula(b, rmin, out);
        if paren {
            out.push(')');
        }
    }

    fn formula(&self, f: &Formula, min: u8, out: &mut String) {
        let name = |c| self.candidates.name(c);
        match f {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Pref(x, i, y) => out.push_str(&format!("{} >_{} {}", name(*x), i, name(*y))),
            Formula::Decl(x, i, y) => out.push_str(&format!("{} >>_{} {}", name(*x), i, name(*y))),
            Formula::Win(x) => out.push_str(&format!("win({})", name(*x))),
            Formula::ProfileIs(p) => out.push_str(&format!("prof({})", self.profile(p))),
            Formula::VoteIs(i, p) => out.push_str(&format!("vote({i}, {})", self.profile(p))),
            Formula::OutcomePref {
                voter,
                left,
                right,
                anchor,
            } => {
                out.push_str(&format!(
                    "opref({voter}, {}, {}",
                    self.profile(left),
                    self.profile(right)
                ));
                if let Some(r) = anchor {
                    out.push_str(&format!(", {}", self.profile(r)));
                }
                out.push(')');
            }
            Formula::Not(g) => {
                out.push('~');
                self.formula(g, UNARY, out);
            }
            Formula::Know(i, g) => {
                out.push_str(&format!("K{i} "));
                self.formula(g, UNARY, out);
            }
            Formula::Common(g, body) | Formula::Distrib(g, body) => {
                let op = if matches!(f, Formula::Common(..)) { "C" } else { "D" };
                out.push_str(&format!("{op} {{{}}} ", g.iter().join(" ")));
                self.formula(body, UNARY, out);
            }
            Formula::Announce(p, body) => {
                out.push_str("[! ");
                self.formula(p, IFF, out);
                out.push_str("] ");
                self.formula(body, UNARY, out);
            }
            Formula::Assign(items, body) => {
                out.push('[');
                self.assignments(items, out);
                out.push_str("] ");
                self.formula(body, UNARY, out);
            }
            Formula::And(a, b) => self.binary(a, b, " & ", AND, min, AND, UNARY, out),
            Formula::Or(a, b) => self.binary(a, b, " | ", OR, min, OR, AND, out),
            Formula::Imp(a, b) => self.binary(a, b, " -> ", IMP, min, OR, IMP, out),
            Formula::Iff(a, b) => self.binary(a, b, " <-> ", IFF, min, IFF, IMP, out),
        }
    }
}
