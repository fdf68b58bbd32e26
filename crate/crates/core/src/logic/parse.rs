//! Recursive-descent parser for the formula grammar:
//!
//! ```text
//! formula := iff
//! iff     := imp { "<->" imp }
//! imp     := or [ "->" imp ]
//! or      := and { "|" and }
//! and     := unary { "&" unary }
//! unary   := "~" unary | "K" INT unary | "C" "{" INT+ "}" unary | "D" "{" INT+ "}" unary
//!          | "[" "!" formula "]" unary | "[" assignlist "]" unary | primary
//! primary := "(" formula ")" | "true" | "false" | CAND ">_" INT CAND | CAND ">>_" INT CAND
//!          | "win" "(" CAND ")" | "prof" "(" PROF ")" | "vote" "(" INT "," PROF ")"
//!          | "opref" "(" INT "," PROF "," PROF [ "," PROF ] ")"
//! assignlist := assign { "," assign }
//! assign  := CAND ">>_" INT CAND ":=" formula | "decl" "(" INT "," PROF ")"
//! PROF    := STATE | "<" CAND+ { "|" CAND+ } ">"
//! ```

use std::sync::Arc;

use super::{Assignment, Formula, ProfileTerm};
use crate::error::{Error, Result};
use crate::voting::{Candidate, CandidateSet, Profile, Vote, Voter};

/// Names a formula may refer to.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub candidates: CandidateSet,
    pub voters: usize,
    pub states: Vec<String>,
}

/// Words that cannot name a candidate or a state.
pub(crate) fn is_reserved(word: &str) -> bool {
    matches!(
        word,
        "true" | "false" | "win" | "prof" | "vote" | "opref" | "decl" | "K" | "C" | "D"
    ) || know_voter(word).is_some()
}

fn know_voter(word: &str) -> Option<usize> {
    let digits = word.strip_prefix('K')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Bang,
    Comma,
    Gets,
    PrefRel,
    DeclRel,
    LAngle,
    RAngle,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", symbol(other)),
        }
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::Tilde => "~",
        Tok::Amp => "&",
        Tok::Pipe => "|",
        Tok::Arrow => "->",
        Tok::DoubleArrow => "<->",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Bang => "!",
        Tok::Comma => ",",
        Tok::Gets => ":=",
        Tok::PrefRel => ">_",
        Tok::DeclRel => ">>_",
        Tok::LAngle => "<",
        Tok::RAngle => ">",
        _ => "?",
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let starts = |i: usize, s: &str| {
        let s: Vec<char> = s.chars().collect();
        chars.len() >= i + s.len() && chars[i..i + s.len()] == s[..]
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (tok, width) = if starts(i, "<->") {
            (Tok::DoubleArrow, 3)
        } else if starts(i, ">>_") {
            (Tok::DeclRel, 3)
        } else if starts(i, ">_") {
            (Tok::PrefRel, 2)
        } else if starts(i, "->") {
            (Tok::Arrow, 2)
        } else if starts(i, ":=") {
            (Tok::Gets, 2)
        } else if c.is_ascii_digit() {
            let len = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            let s: String = chars[i..i + len].iter().collect();
            let n = s.parse().map_err(|_| Error::Syntax {
                line,
                column: col,
                message: format!("integer `{s}` is too large"),
            })?;
            (Tok::Int(n), len)
        } else if is_ident_start(c) {
            let len = chars[i..].iter().take_while(|&&c| is_ident_char(c)).count();
            (Tok::Ident(chars[i..i + len].iter().collect()), len)
        } else {
            let t = match c {
                '~' => Tok::Tilde,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '!' => Tok::Bang,
                ',' => Tok::Comma,
                '<' => Tok::LAngle,
                '>' => Tok::RAngle,
                _ => {
                    return Err(Error::Syntax {
                        line,
                        column: col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            (t, 1)
        };
        out.push(Token {
            tok,
            line,
            column: col,
        });
        i += width;
        col += width;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vocab: &'a Vocabulary,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let t = &self.tokens[self.pos];
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == want {
            self.next();
            true
        } else {
            false
        }
    }

    fn voter(&mut self) -> Result<Voter> {
        match self.peek().clone() {
            Tok::Int(n) => {
                if n == 0 || n > self.vocab.voters {
                    return Err(self.error_here(format!(
                        "unknown voter {n} (voters are 1..{})",
                        self.vocab.voters
                    )));
                }
                self.next();
                Ok(Voter::from_index(n - 1))
            }
            other => Err(self.error_here(format!("expected a voter number, found {}", other.describe()))),
        }
    }

    fn candidate(&mut self) -> Result<Candidate> {
        match self.peek().clone() {
            Tok::Ident(name) => match self.vocab.candidates.get(&name) {
                Some(c) => {
                    self.next();
                    Ok(c)
                }
                None => Err(self.error_here(format!("unknown candidate `{name}`"))),
            },
            other => Err(self.error_here(format!("expected a candidate, found {}", other.describe()))),
        }
    }

    fn profile_term(&mut self) -> Result<ProfileTerm> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if !self.vocab.states.contains(&name) {
                    return Err(self.error_here(format!("unknown state `{name}`")));
                }
                self.next();
                Ok(ProfileTerm::State(name))
            }
            Tok::LAngle => {
                self.next();
                let m = self.vocab.candidates.len();
                let mut votes = Vec::new();
                loop {
                    let mut ranking = Vec::new();
                    while let Tok::Ident(_) = self.peek() {
                        ranking.push(self.candidate()?);
                    }
                    let vote = Vote::new(ranking, m).map_err(|e| self.error_here(e.to_string()))?;
                    votes.push(vote);
                    if !self.eat(&Tok::Pipe) {
                        break;
                    }
                }
                if votes.len() != self.vocab.voters {
                    return Err(self.error_here(format!(
                        "profile literal has {} votes, expected {}",
                        votes.len(),
                        self.vocab.voters
                    )));
                }
                self.expect(Tok::RAngle)?;
                Ok(ProfileTerm::Literal(Arc::new(Profile::new(votes)?)))
            }
            other => Err(self.error_here(format!(
                "expected a state name or profile literal, found {}",
                other.describe()
            ))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.imp()?;
        while self.eat(&Tok::DoubleArrow) {
            let right = self.imp()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if self.eat(&Tok::Arrow) {
            let right = self.imp()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while self.eat(&Tok::Pipe) {
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.eat(&Tok::Amp) {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn group(&mut self) -> Result<Vec<Voter>> {
        self.expect(Tok::LBrace)?;
        let mut g = vec![self.voter()?];
        while let Tok::Int(_) = self.peek() {
            g.push(self.voter()?);
        }
        self.expect(Tok::RBrace)?;
        g.sort();
        g.dedup();
        Ok(g)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBracket => {
                self.next();
                if self.eat(&Tok::Bang) {
                    let premise = self.formula()?;
                    self.expect(Tok::RBracket)?;
                    let body = self.unary()?;
                    Ok(Formula::announce(premise, body))
                } else {
                    let items = self.assignments()?;
                    self.expect(Tok::RBracket)?;
                    let body = self.unary()?;
                    Ok(Formula::Assign(items, Arc::new(body)))
                }
            }
            Tok::Ident(word) => {
                let is_candidate_atom = matches!(self.peek_at(1), Tok::PrefRel | Tok::DeclRel);
                if !is_candidate_atom {
                    if let Some(n) = know_voter(&word) {
                        self.next();
                        if n == 0 || n > self.vocab.voters {
                            return Err(self.error_here(format!("unknown voter {n}")));
                        }
                        let body = self.unary()?;
                        return Ok(Formula::know(Voter::from_index(n - 1), body));
                    }
                    if word == "K" && matches!(self.peek_at(1), Tok::Int(_)) {
                        self.next();
                        let i = self.voter()?;
                        let body = self.unary()?;
                        return Ok(Formula::know(i, body));
                    }
                    if (word == "C" || word == "D") && *self.peek_at(1) == Tok::LBrace {
                        self.next();
                        let g = self.group()?;
                        let body = self.unary()?;
                        return Ok(if word == "C" {
                            Formula::Common(g, Arc::new(body))
                        } else {
                            Formula::Distrib(g, Arc::new(body))
                        });
                    }
                }
                self.primary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(word) => match (word.as_str(), self.peek_at(1)) {
                ("true", _) => {
                    self.next();
                    Ok(Formula::True)
                }
                ("false", _) => {
                    self.next();
                    Ok(Formula::False)
                }
                ("win", Tok::LParen) => {
                    self.next();
                    self.next();
                    let c = self.candidate()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::Win(c))
                }
                ("prof", Tok::LParen) => {
                    self.next();
                    self.next();
                    let p = self.profile_term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::ProfileIs(p))
                }
                ("vote", Tok::LParen) => {
                    self.next();
                    self.next();
                    let i = self.voter()?;
                    self.expect(Tok::Comma)?;
                    let p = self.profile_term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::VoteIs(i, p))
                }
                ("opref", Tok::LParen) => {
                    self.next();
                    self.next();
                    let voter = self.voter()?;
                    self.expect(Tok::Comma)?;
                    let left = self.profile_term()?;
                    self.expect(Tok::Comma)?;
                    let right = self.profile_term()?;
                    let anchor = if self.eat(&Tok::Comma) {
                        Some(self.profile_term()?)
                    } else {
                        None
                    };
                    self.expect(Tok::RParen)?;
                    Ok(Formula::OutcomePref {
                        voter,
                        left,
                        right,
                        anchor,
                    })
                }
                _ => {
                    let x = self.candidate()?;
                    let declared = match self.peek() {
                        Tok::PrefRel => false,
                        Tok::DeclRel => true,
                        other => {
                            return Err(self.error_here(format!(
                                "expected `>_` or `>>_` after candidate, found {}",
                                other.describe()
                            )))
                        }
                    };
                    self.next();
                    let i = self.voter()?;
                    let y = self.candidate()?;
                    Ok(if declared {
                        Formula::Decl(x, i, y)
                    } else {
                        Formula::Pref(x, i, y)
                    })
                }
            },
            other => Err(self.error_here(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn assignments(&mut self) -> Result<Vec<Assignment>> {
        let mut items = vec![self.assignment()?];
        while self.eat(&Tok::Comma) {
            items.push(self.assignment()?);
        }
        Ok(items)
    }

    fn assignment(&mut self) -> Result<Assignment> {
        if let (Tok::Ident(w), Tok::LParen) = (self.peek().clone(), self.peek_at(1)) {
            if w == "decl" {
                self.next();
                self.next();
                let voter = self.voter()?;
                self.expect(Tok::Comma)?;
                let source = self.profile_term()?;
                self.expect(Tok::RParen)?;
                return Ok(Assignment::Declare { voter, source });
            }
        }
        let better = self.candidate()?;
        self.expect(Tok::DeclRel)?;
        let voter = self.voter()?;
        let worse = self.candidate()?;
        self.expect(Tok::Gets)?;
        let value = self.formula()?;
        Ok(Assignment::Pair {
            better,
            voter,
            worse,
            value: Arc::new(value),
        })
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error_here(format!("unexpected {}", self.peek().describe())))
        }
    }
}

/// Parses a formula against the given vocabulary.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        vocab,
    };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a bare assignment list such as `a >>_1 b := true, decl(2, t)`.
pub fn parse_assignments(text: &str, vocab: &Vocabulary) -> Result<Vec<Assignment>> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        vocab,
    };
    let items = p.assignments()?;
    p.finish()?;
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary {
            candidates: CandidateSet::new(&["a", "b", "c", "d"]).unwrap(),
            voters: 2,
            states: vec!["s".into(), "t".into(), "u".into()],
        }
    }

    fn v(n: usize) -> Voter {
        Voter::from_index(n - 1)
    }

    const A: Candidate = Candidate(0);
    const C: Candidate = Candidate(2);
    const D: Candidate = Candidate(3);

    #[test]
    fn know_of_parenthesised_atom() {
        let f = parse_formula("K2 (a >_1 d)", &vocab()).unwrap();
        assert_eq!(f, Formula::know(v(2), Formula::Pref(A, v(1), D)));
        let g = parse_formula("K 2 a >_1 d", &vocab()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn announcement_binds_tighter_than_conjunction() {
        let f = parse_formula("~K2 a >_1 c & [! a >_1 c] K2 a >_1 c", &vocab()).unwrap();
        let atom = Formula::Pref(A, v(1), C);
        let expected = Formula::and(
            Formula::not(Formula::know(v(2), atom.clone())),
            Formula::announce(atom.clone(), Formula::know(v(2), atom)),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let p = |s| parse_formula(s, &vocab()).unwrap();
        let (x, y, z) = (
            Formula::Pref(A, v(1), C),
            Formula::Pref(C, v(1), D),
            Formula::Pref(A, v(2), D),
        );
        assert_eq!(
            p("a >_1 c -> c >_1 d -> a >_2 d"),
            Formula::imp(x.clone(), Formula::imp(y.clone(), z.clone()))
        );
        assert_eq!(
            p("a >_1 c | c >_1 d & a >_2 d"),
            Formula::or(x.clone(), Formula::and(y.clone(), z.clone()))
        );
        assert_eq!(
            p("a >_1 c <-> c >_1 d <-> a >_2 d"),
            Formula::iff(Formula::iff(x, y), z)
        );
    }

    #[test]
    fn group_and_dynamic_operators() {
        let f = parse_formula("C {2 1} D {1} [a >>_1 b := true, decl(2, t)] a >>_2 b", &vocab()).unwrap();
        match f {
            Formula::Common(g, body) => {
                assert_eq!(g, vec![v(1), v(2)]);
                assert!(matches!(&*body, Formula::Distrib(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn profile_terms() {
        let f = parse_formula("opref(1, s, <a b c d | d c b a>, t)", &vocab()).unwrap();
        match f {
            Formula::OutcomePref { right, anchor, .. } => {
                assert!(matches!(right, ProfileTerm::Literal(_)));
                assert_eq!(anchor, Some(ProfileTerm::State("t".into())));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("prof(<a b c d>)", &vocab()).is_err());
        assert!(parse_formula("prof(<a b c | d c b a>)", &vocab()).is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_formula("K1 a >_1", &vocab()) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 9)),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse_formula("a >_3 b", &vocab()).is_err());
        assert!(parse_formula("a >_1 e", &vocab()).is_err());
        assert!(parse_formula("prof(w)", &vocab()).is_err());
        assert!(parse_formula("a >_1 b )", &vocab()).is_err());
        assert!(parse_formula("a $ b", &vocab()).is_err());
    }

    #[test]
    fn reserved_words() {
        assert!(is_reserved("K12"));
        assert!(is_reserved("win"));
        assert!(!is_reserved("Kx"));
        assert!(!is_reserved("a"));
    }
}
