//! Formulas of the permission language: propositions, negation, disjunction
//! and the four agent-indexed modalities.
//!
//! Conjunction, implication and the constants are sugar. They desugar
//! canonically at construction time:
//!
//! | sugar    | core form                      |
//! |----------|--------------------------------|
//! | `φ & ψ`  | `!(!φ \| !ψ)`                  |
//! | `φ -> ψ` | `!φ \| ψ`                      |
//! | `true`   | `__top \| !__top`              |
//! | `false`  | `!(__top \| !__top)`           |
//!
//! Concrete syntax (tightest first): modal prefix and `!`, then `&`, `|`,
//! and `->` (right associative).
//!
//! ```text
//! formula := impl
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | modal
//! modal   := ("WA"|"WE"|"SE"|"SA") "[" ident "]" unary | atom
//! atom    := ident | "true" | "false" | "(" formula ")"
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AgentId, RESERVED_PROPOSITION};

/// The four permission modalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Modality {
    /// Some permitted action admits the body.
    WA,
    /// Some permitted action ensures the body.
    WE,
    /// Every action that ensures the body is permitted.
    SE,
    /// Every action that admits the body is permitted.
    SA,
}

impl Modality {
    pub const ALL: [Modality; 4] = [Modality::WA, Modality::WE, Modality::SE, Modality::SA];

    pub fn keyword(self) -> &'static str {
        match self {
            Modality::WA => "WA",
            Modality::WE => "WE",
            Modality::SE => "SE",
            Modality::SA => "SA",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Modality> {
        match s {
            "WA" => Some(Modality::WA),
            "WE" => Some(Modality::WE),
            "SE" => Some(Modality::SE),
            "SA" => Some(Modality::SA),
            _ => None,
        }
    }

    /// The three modalities other than `self`.
    pub fn others(self) -> Vec<Modality> {
        Modality::ALL.into_iter().filter(|&m| m != self).collect()
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl std::str::FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Modality::from_keyword(&s.to_ascii_uppercase())
            .ok_or_else(|| format!("unknown modality `{s}` (expected WA, WE, SE or SA)"))
    }
}

/// A formula in core (desugared) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Prop(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Modal(Modality, AgentId, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)] // builder style, alongside `or`/`and`
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Formula) -> Formula {
        self.not().or(other.not()).not()
    }

    pub fn implies(self, other: Formula) -> Formula {
        self.not().or(other)
    }

    pub fn top() -> Formula {
        let p = Formula::prop(RESERVED_PROPOSITION);
        p.clone().or(p.not())
    }

    pub fn bottom() -> Formula {
        Formula::top().not()
    }

    pub fn modal(kind: Modality, agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::Modal(kind, agent.into(), Box::new(body))
    }

    pub fn wa(agent: &str, body: Formula) -> Formula {
        Formula::modal(Modality::WA, agent, body)
    }

    pub fn we(agent: &str, body: Formula) -> Formula {
        Formula::modal(Modality::WE, agent, body)
    }

    pub fn se(agent: &str, body: Formula) -> Formula {
        Formula::modal(Modality::SE, agent, body)
    }

    pub fn sa(agent: &str, body: Formula) -> Formula {
        Formula::modal(Modality::SA, agent, body)
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bottom)
    }

    /// Node count of the core tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Prop(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::Or(l, r) => 1 + l.size() + r.size(),
            Formula::Modal(_, _, f) => 1 + f.size(),
        }
    }

    /// Nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Prop(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::Or(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Modal(_, _, f) => 1 + f.modal_depth(),
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Or(l, r)
            if matches!(&**l, Formula::Prop(p) if p == RESERVED_PROPOSITION)
            && matches!(&**r, Formula::Not(n) if matches!(&**n, Formula::Prop(p) if p == RESERVED_PROPOSITION)))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Not(f) if f.is_top())
    }

    /// `Some((φ, ψ))` when the formula is `φ & ψ` in core form.
    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match &**inner {
                Formula::Or(l, r) => match (&**l, &**r) {
                    (Formula::Not(a), Formula::Not(b)) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `Some((φ, ψ))` when the formula is `φ -> ψ`, i.e. `!φ | ψ`.
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Or(l, r) => match &**l {
                Formula::Not(a) => Some((a, r)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Agents mentioned by modal operators, in first-occurrence order.
    pub fn agents(&self) -> Vec<AgentId> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Modal(_, a, _) = f {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        });
        out
    }

    /// Propositions mentioned, excluding the reserved constant carrier.
    pub fn propositions(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Prop(p) = f {
                if p != RESERVED_PROPOSITION && !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
        out
    }

    pub fn uses_modality(&self, kind: Modality) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(f, Formula::Modal(k, _, _) if *k == kind) {
                found = true;
            }
        });
        found
    }

    fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        match self {
            Formula::Prop(_) => {}
            Formula::Not(x) | Formula::Modal(_, _, x) => x.visit(f),
            Formula::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Parse failure with byte offset and the tokens that would have been accepted.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: found {found}, expected {}", expected.join(" or "))]
pub struct ParseError {
    pub position: usize,
    pub found: String,
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    LBrack,
    RBrack,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Tok::Arrow));
                    i += 2;
                    continue;
                }
                return Err(ParseError {
                    position: i,
                    found: "`-`".into(),
                    expected: vec!["`->`".into()],
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_owned())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: i,
                    found: format!("`{ch}`"),
                    expected: vec!["a formula token".into()],
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            position: self.offset(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Ident(word) => {
                if let Some(kind) = Modality::from_keyword(&word) {
                    self.bump();
                    self.expect(Tok::LBrack, "`[`")?;
                    let agent = match self.bump() {
                        Tok::Ident(a) => a,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error(&["agent name"]));
                        }
                    };
                    self.expect(Tok::RBrack, "`]`")?;
                    let body = self.unary()?;
                    return Ok(Formula::modal(kind, agent, body));
                }
                if matches!(self.toks.get(self.pos + 1), Some((_, Tok::LBrack))) {
                    // `XY[a]` with an unrecognised keyword.
                    return Err(ParseError {
                        position: self.offset(),
                        found: format!("`{word}`"),
                        expected: vec!["modality WA, WE, SE or SA".into()],
                    });
                }
                self.atom()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(word) => {
                let at = self.offset();
                self.bump();
                match word.as_str() {
                    "true" => Ok(Formula::top()),
                    "false" => Ok(Formula::bottom()),
                    w if w == RESERVED_PROPOSITION => Err(ParseError {
                        position: at,
                        found: format!("reserved name `{w}`"),
                        expected: vec!["proposition".into()],
                    }),
                    _ => Ok(Formula::Prop(word)),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(&["proposition", "`true`", "`false`", "`(`", "`!`", "modality"])),
        }
    }
}

/// Parses concrete syntax into a core formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`&`", "`|`", "`->`", "end of input"]));
    }
    Ok(f)
}

// Precedence levels for printing.
const IMP: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

/// Renders a formula with minimal parentheses; `parse(print(φ)) == φ`.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, IMP, &mut out);
    out
}

fn level(f: &Formula) -> u8 {
    if f.is_top() || f.is_bottom() {
        return UNARY;
    }
    if f.as_and().is_some() {
        return AND;
    }
    match f {
        Formula::Or(..) => OR,
        _ => UNARY,
    }
}

fn write_formula(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write_formula(f, IMP, out);
        out.push(')');
        return;
    }
    if f.is_top() {
        out.push_str("true");
        return;
    }
    if f.is_bottom() {
        out.push_str("false");
        return;
    }
    if let Some((l, r)) = f.as_and() {
        // Left-associative: the right operand needs strictly tighter binding.
        write_formula(l, AND, out);
        out.push_str(" & ");
        write_formula(r, UNARY, out);
        return;
    }
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::Not(x) => {
            out.push('!');
            write_formula(x, UNARY, out);
        }
        Formula::Or(l, r) => {
            write_formula(l, OR, out);
            out.push_str(" | ");
            write_formula(r, AND, out);
        }
        Formula::Modal(kind, agent, body) => {
            out.push_str(kind.keyword());
            out.push('[');
            out.push_str(agent.as_str());
            out.push_str("] ");
            write_formula(body, UNARY, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str) -> Formula {
        Formula::prop(name)
    }

    #[test]
    fn modal_base_case() {
        assert_eq!(parse("WA[a] p").unwrap(), Formula::wa("a", p("p")));
    }

    #[test]
    fn precedence_exercise() {
        let got = parse("WE[a] (p | !q) -> SA[b] false").unwrap();
        let want = Formula::we("a", p("p").or(p("q").not())).implies(Formula::sa("b", Formula::bottom()));
        assert_eq!(got, want);
    }

    #[test]
    fn wa_distribution_axiom_shape() {
        let got = parse("WA[a](p | q) -> WA[a]p | WA[a]q").unwrap();
        let want = Formula::wa("a", p("p").or(p("q"))).implies(Formula::wa("a", p("p")).or(Formula::wa("a", p("q"))));
        assert_eq!(got, want);
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(parse("p -> q -> r").unwrap(), p("p").implies(p("q").implies(p("r"))));
    }

    #[test]
    fn conjunction_binds_tighter_than_disjunction() {
        assert_eq!(parse("p | q & r").unwrap(), p("p").or(p("q").and(p("r"))));
    }

    #[test]
    fn printing_examples() {
        assert_eq!(print(&Formula::wa("a", p("p"))), "WA[a] p");
        assert_eq!(print(&p("p").not().or(p("q"))), "!p | q");
        assert_eq!(print(&Formula::se("b", Formula::wa("a", p("p")))), "SE[b] WA[a] p");
        assert_eq!(print(&Formula::top()), "true");
        assert_eq!(print(&Formula::bottom()), "false");
        assert_eq!(print(&p("p").and(p("q")).and(p("r"))), "p & q & r");
        assert_eq!(print(&p("p").and(p("q").and(p("r")))), "p & (q & r)");
        assert_eq!(print(&p("p").or(p("q").or(p("r")))), "p | (q | r)");
        assert_eq!(print(&Formula::wa("a", p("p").or(p("q")))), "WA[a] (p | q)");
        assert_eq!(print(&p("p").or(p("q")).not()), "!(p | q)");
    }

    #[test]
    fn sizes() {
        assert_eq!(p("p").size(), 1);
        assert_eq!(p("p").not().size(), 2);
        assert_eq!(p("p").or(p("q")).size(), 3);
        assert_eq!(Formula::wa("a", p("p")).size(), 2);
        assert_eq!(Formula::top().size(), 4);
    }

    #[test]
    fn syntax_errors_carry_position_and_expectations() {
        let err = parse("p |").unwrap_err();
        assert_eq!(err.position, 3);
        assert!(err.expected.iter().any(|e| e == "proposition"));

        let err = parse("WA[a p").unwrap_err();
        assert_eq!(err.expected, vec!["`]`".to_owned()]);

        let err = parse("(p").unwrap_err();
        assert_eq!(err.expected, vec!["`)`".to_owned()]);

        let err = parse("p q").unwrap_err();
        assert_eq!(err.position, 2);
    }

    #[test]
    fn unknown_modality_keyword() {
        let err = parse("XY[a] p").unwrap_err();
        assert_eq!(err.position, 0);
        assert!(err.expected[0].contains("modality"));
    }

    #[test]
    fn reserved_name_rejected() {
        assert!(parse("__top").is_err());
    }

    #[test]
    fn top_and_bottom_round_trip() {
        for text in ["true", "false", "!true", "true -> false", "WE[a] true", "!!false"] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&print(&f)).unwrap(), f, "{text}");
        }
    }

    #[test]
    fn conjunction_and_disjunction_of_lists() {
        assert_eq!(Formula::conjunction(vec![]), Formula::top());
        assert_eq!(Formula::disjunction(vec![]), Formula::bottom());
        assert_eq!(Formula::conjunction(vec![p("p")]), p("p"));
        assert_eq!(
            Formula::disjunction(vec![p("p"), p("q"), p("r")]),
            p("p").or(p("q")).or(p("r"))
        );
    }
}
