//! Symbolic relation algebra over the formal sum families `S(A,B,C,D)`
//! (mod-14) and `R(A,B,C,D)` (mod-10).
//!
//! A [`SymbolicCombination`] is a finite sum `sum coeff * S(tuple)` with
//! Laurent-polynomial coefficients in `x`, `y`, `q`. The registered
//! fundamental relations (each identically zero as a series identity)
//! come in three groups, with affine-in-(A,B,C,D) monomial exponents:
//!
//! * hat relations `nh1..nh4` for the S family, one parameter step each,
//!   e.g. `nh1 = S(A,B,C,D) - S(A+2,B,C,D) - x^2 q^(4+A) S(A+8,B+12,C+8,D+4)`;
//! * final relations `n1..n4` (with `n2 = nh2`), two parameter steps, e.g.
//!   `n1 = S - x^2 q^(4+A)(1+q^2) S(A+8,B+12,C+8,D+4) - S(A+4,B,C,D)
//!    + x^4 q^(18+2A) S(A+16,B+24,C+16,D+8)`;
//! * mod-10 relations `m1..m4` for the R family, e.g.
//!   `m1 = R(A,B,C,D) - R(A+2,B,C,D) - y q^(2+A) R(A+4,B+6,C+4,D+2)`.
//!
//! A [`Certificate`] is a formal linear combination of instantiated
//! relations; [`expand`] collects it into a [`SymbolicCombination`], and
//! [`numeric_check`] substitutes the truncated quadruple-sum evaluation
//! for every symbol and tests vanishing. Certificates parse from a text
//! grammar (`coef * name(a,b,c,d)` terms joined by `+`/`-`, `#` comments)
//! and round-trip through the printer.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{exact_div, LaurentPoly, Monomial};
use crate::multisum::{evaluate, mod10_spec, mod14_spec, MultisumSpec};
use crate::qseries::{CheckReport, TruncatedSeries};
use crate::shiftrec::ScalarRecurrence;

/// The two sum families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    S,
    R,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::S => "S",
            Family::R => "R",
        })
    }
}

/// The base multisum specification of a family member.
pub fn base_spec(family: Family, tuple: [i64; 4]) -> Result<MultisumSpec> {
    match family {
        Family::S => mod14_spec(&tuple),
        Family::R => mod10_spec(&tuple),
    }
}

/// A finite formal sum `sum coeff * Family(tuple)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicCombination {
    terms: BTreeMap<(Family, [i64; 4]), LaurentPoly>,
}

impl SymbolicCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn singleton(family: Family, tuple: [i64; 4], coeff: LaurentPoly) -> Self {
        let mut out = Self::zero();
        out.add_term(family, tuple, &coeff);
        out
    }

    pub fn add_term(&mut self, family: Family, tuple: [i64; 4], coeff: &LaurentPoly) {
        if coeff.is_zero() {
            return;
        }
        let key = (family, tuple);
        let entry = self.terms.entry(key).or_insert_with(LaurentPoly::zero);
        *entry = entry.add(coeff);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((family, tuple), coeff) in &other.terms {
            out.add_term(*family, *tuple, coeff);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &LaurentPoly) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.mul(factor)))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Family, [i64; 4]), &LaurentPoly)> {
        self.terms.iter()
    }

    /// `Some(unit)` when `self = unit * other` for a single monomial, the
    /// identity monomial meaning exact equality; `None` otherwise.
    pub fn unit_multiple_of(&self, other: &Self) -> Option<Monomial> {
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let mut unit: Option<Monomial> = None;
        for ((ka, ca), (kb, cb)) in self.terms.iter().zip(other.terms.iter()) {
            if ka != kb {
                return None;
            }
            let ratio = exact_div(ca, cb).ok()?.as_monomial()?;
            match &unit {
                None => unit = Some(ratio),
                Some(u) => {
                    if *u != ratio {
                        return None;
                    }
                }
            }
        }
        unit
    }
}

impl fmt::Display for SymbolicCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for ((family, t), coeff) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({coeff})*{family}({},{},{},{})", t[0], t[1], t[2], t[3])?;
        }
        Ok(())
    }
}

/// One template term: `coeff * x^xe * y^ye * q^(qc + qlin . args)` applied
/// to the tuple `args + delta`.
struct TemplateTerm {
    coeff: i64,
    xe: i64,
    ye: i64,
    qc: i64,
    qlin: [i64; 4],
    delta: [i64; 4],
}

const Z: [i64; 4] = [0, 0, 0, 0];

fn template(name: &str) -> Option<(Family, Vec<TemplateTerm>)> {
    let t = |coeff, xe, ye, qc, qlin, delta| TemplateTerm { coeff, xe, ye, qc, qlin, delta };
    let head = t(1, 0, 0, 0, Z, Z);
    let body = match name {
        "n1" => vec![
            head,
            t(-1, 2, 0, 4, [1, 0, 0, 0], [8, 12, 8, 4]),
            t(-1, 2, 0, 6, [1, 0, 0, 0], [8, 12, 8, 4]),
            t(-1, 0, 0, 0, Z, [4, 0, 0, 0]),
            t(1, 4, 0, 18, [2, 0, 0, 0], [16, 24, 16, 8]),
        ],
        "n2" | "nh2" => vec![
            head,
            t(-1, 0, 0, 0, Z, [0, 2, 0, 0]),
            t(-1, 3, 0, 12, [0, 1, 0, 0], [12, 24, 16, 8]),
        ],
        "n3" => vec![
            head,
            t(-1, 2, 0, 6, [0, 0, 1, 0], [8, 16, 12, 6]),
            t(-1, 0, 0, 0, Z, [0, 0, 2, 0]),
            t(-1, 2, 0, 7, [0, 0, 1, 0], [8, 16, 12, 6]),
            t(1, 4, 0, 25, [0, 0, 2, 0], [16, 32, 24, 12]),
        ],
        "n4" => vec![
            head,
            t(-1, 1, 0, 2, [0, 0, 0, 1], [4, 8, 6, 4]),
            t(-1, 0, 0, 0, Z, [0, 0, 0, 2]),
            t(-1, 1, 0, 3, [0, 0, 0, 1], [4, 8, 6, 4]),
            t(1, 2, 0, 9, [0, 0, 0, 2], [8, 16, 12, 8]),
        ],
        "nh1" => vec![
            head,
            t(-1, 0, 0, 0, Z, [2, 0, 0, 0]),
            t(-1, 2, 0, 4, [1, 0, 0, 0], [8, 12, 8, 4]),
        ],
        "nh3" => vec![
            head,
            t(-1, 0, 0, 0, Z, [0, 0, 1, 0]),
            t(-1, 2, 0, 6, [0, 0, 1, 0], [8, 16, 12, 6]),
        ],
        "nh4" => vec![
            head,
            t(-1, 0, 0, 0, Z, [0, 0, 0, 1]),
            t(-1, 1, 0, 2, [0, 0, 0, 1], [4, 8, 6, 4]),
        ],
        "m1" => vec![
            head,
            t(-1, 0, 0, 0, Z, [2, 0, 0, 0]),
            t(-1, 0, 1, 2, [1, 0, 0, 0], [4, 6, 4, 2]),
        ],
        "m2" => vec![
            head,
            t(-1, 0, 0, 0, Z, [0, 2, 0, 0]),
            t(-1, 2, 1, 6, [0, 1, 0, 0], [6, 12, 8, 4]),
        ],
        "m3" => vec![
            head,
            t(-1, 0, 0, 0, Z, [0, 0, 1, 0]),
            t(-1, 1, 1, 3, [0, 0, 1, 0], [4, 8, 6, 3]),
        ],
        "m4" => vec![
            head,
            t(-1, 0, 0, 0, Z, [0, 0, 0, 1]),
            t(-1, 1, 0, 1, [0, 0, 0, 1], [2, 4, 3, 2]),
        ],
        _ => return None,
    };
    let family = if name.starts_with('m') { Family::R } else { Family::S };
    Some((family, body))
}

/// Names of every registered relation.
pub fn relation_names() -> &'static [&'static str] {
    &["n1", "n2", "n3", "n4", "nh1", "nh2", "nh3", "nh4", "m1", "m2", "m3", "m4"]
}

/// Instantiate a registered relation at an integer tuple. The result is
/// identically zero as a series identity.
pub fn relation(name: &str, a: i64, b: i64, c: i64, d: i64) -> Result<SymbolicCombination> {
    let (family, terms) =
        template(name).ok_or_else(|| Error::UnknownLabel(format!("relation {name}")))?;
    let args = [a, b, c, d];
    let mut out = SymbolicCombination::zero();
    for term in terms {
        let qe = term.qc + term.qlin.iter().zip(&args).map(|(l, v)| l * v).sum::<i64>();
        let coeff = LaurentPoly::from_terms(&[(term.coeff, term.xe, term.ye, qe)]);
        let tuple = [
            args[0] + term.delta[0],
            args[1] + term.delta[1],
            args[2] + term.delta[2],
            args[3] + term.delta[3],
        ];
        out.add_term(family, tuple, &coeff);
    }
    Ok(out)
}

/// A formal linear combination of instantiated relations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    terms: Vec<(LaurentPoly, String, [i64; 4])>,
}

impl Certificate {
    pub fn new(terms: Vec<(LaurentPoly, String, [i64; 4])>) -> Result<Self> {
        for (_, name, _) in &terms {
            if template(name).is_none() {
                return Err(Error::UnknownLabel(format!("relation {name}")));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(LaurentPoly, String, [i64; 4])] {
        &self.terms
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }
}

/// `sum coeff * relation(name, tuple)`, fully collected.
pub fn expand(cert: &Certificate) -> Result<SymbolicCombination> {
    let mut out = SymbolicCombination::zero();
    for (coeff, name, t) in &cert.terms {
        let rel = relation(name, t[0], t[1], t[2], t[3])?;
        out = out.add(&rel.scale(coeff));
    }
    Ok(out)
}

/// Substitute the truncated evaluation of each symbol and test vanishing
/// through `q^order` (exclusive).
pub fn numeric_check(comb: &SymbolicCombination, order: i64) -> Result<CheckReport> {
    let mut residual = TruncatedSeries::exact_zero();
    let mut instances = 0u64;
    for ((family, tuple), coeff) in comb.terms() {
        let spec = base_spec(*family, *tuple)?;
        let value = evaluate(&spec, order)?;
        residual = residual.add(&value.mul_poly(coeff));
        instances += 1;
    }
    let first_failure = residual
        .valuation()
        .map(|(num, den)| format!("residual has nonzero coefficient at q^({num}/{den})"));
    Ok(CheckReport {
        label: "symbolic combination".into(),
        order,
        instances,
        first_failure,
    })
}

/// The recurrence `sum_j c_j(x,q) F(x q^(s j)) = 0` rewritten over the
/// family symbols: term `j` pairs `c_j` with the tuple
/// `base + s j * (x-weights)` (shifting `x -> x q^t` adds `t * xw` to the
/// parameters).
pub fn recurrence_combination(
    rec: &ScalarRecurrence,
    family: Family,
    base: [i64; 4],
) -> Result<SymbolicCombination> {
    let spec = base_spec(family, base)?;
    let xw = spec.xweights();
    let mut out = SymbolicCombination::zero();
    for (j, c) in rec.coeffs().iter().enumerate() {
        let t = rec.step() * j as i64;
        let tuple = [
            base[0] + t * xw[0],
            base[1] + t * xw[1],
            base[2] + t * xw[2],
            base[3] + t * xw[3],
        ];
        out.add_term(family, tuple, c);
    }
    Ok(out)
}

/// The three-copy certificate assembling the first final relation from
/// copies of the first hat relation:
/// `nh1(A,B,C,D) + nh1(A+2,B,C,D) - x^2 q^(6+A) nh1(A+8,B+12,C+8,D+4)`.
pub fn three_copy_certificate(a: i64, b: i64, c: i64, d: i64) -> Certificate {
    Certificate::new(vec![
        (LaurentPoly::one(), "nh1".into(), [a, b, c, d]),
        (LaurentPoly::one(), "nh1".into(), [a + 2, b, c, d]),
        (
            LaurentPoly::from_terms(&[(-1, 2, 0, 6 + a)]),
            "nh1".into(),
            [a + 8, b + 12, c + 8, d + 4],
        ),
    ])
    .expect("built-in certificate is valid")
}

/// The nine-term mod-10 certificate whose expansion is
/// `R(0,0,0,0) - R(0,2,1,1) - x q R(0,4,2,2)`.
pub fn nine_term_certificate() -> Certificate {
    let one = LaurentPoly::one();
    let neg = LaurentPoly::int(-1);
    let xq = LaurentPoly::from_terms(&[(1, 1, 0, 1)]);
    let neg_xq = xq.neg();
    let neg_y = LaurentPoly::from_terms(&[(-1, 0, 1, 0)]);
    Certificate::new(vec![
        (neg.clone(), "m1".into(), [-2, 0, 0, 0]),
        (one.clone(), "m1".into(), [-2, 0, 0, 1]),
        (neg_xq.clone(), "m1".into(), [0, 4, 2, 2]),
        (xq.clone(), "m1".into(), [0, 4, 3, 2]),
        (one.clone(), "m2".into(), [0, 0, 0, 1]),
        (one, "m3".into(), [0, 2, 0, 1]),
        (neg_xq, "m3".into(), [2, 4, 2, 2]),
        (LaurentPoly::one(), "m4".into(), [-2, 0, 0, 0]),
        (neg_y, "m4".into(), [2, 6, 4, 2]),
    ])
    .expect("built-in certificate is valid")
}

/// The target of the nine-term certificate.
pub fn nine_term_target() -> SymbolicCombination {
    let mut out = SymbolicCombination::zero();
    out.add_term(Family::R, [0, 0, 0, 0], &LaurentPoly::one());
    out.add_term(Family::R, [0, 2, 1, 1], &LaurentPoly::int(-1));
    out.add_term(Family::R, [0, 4, 2, 2], &LaurentPoly::from_terms(&[(-1, 1, 0, 1)]));
    out
}

// ---------------------------------------------------------------------
// certificate text format
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(i64),
    Word(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Comma,
}

struct Lexer {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
    /// Words recognized as call heads (`name(a,b,c,d)`); everything else
    /// must be a variable or a registered name, depending on context.
    is_name: fn(&str) -> bool,
}

fn lex(text: &str, is_name: fn(&str) -> bool) -> Result<Lexer> {
    let mut tokens = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let bytes: Vec<char> = line.chars().collect();
        let mut i = 0usize;
        while i < bytes.len() {
            let ch = bytes[i];
            let col = i + 1;
            let ln = lineno + 1;
            match ch {
                ' ' | '\t' | '\r' => {
                    i += 1;
                }
                '+' => {
                    tokens.push((Token::Plus, ln, col));
                    i += 1;
                }
                '-' => {
                    tokens.push((Token::Minus, ln, col));
                    i += 1;
                }
                '*' => {
                    tokens.push((Token::Star, ln, col));
                    i += 1;
                }
                '^' => {
                    tokens.push((Token::Caret, ln, col));
                    i += 1;
                }
                '/' => {
                    tokens.push((Token::Slash, ln, col));
                    i += 1;
                }
                '(' => {
                    tokens.push((Token::LParen, ln, col));
                    i += 1;
                }
                ')' => {
                    tokens.push((Token::RParen, ln, col));
                    i += 1;
                }
                ',' => {
                    tokens.push((Token::Comma, ln, col));
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = bytes[start..i].iter().collect();
                    let v = s.parse::<i64>().map_err(|_| Error::Parse {
                        line: ln,
                        col,
                        msg: format!("integer {s} out of range"),
                    })?;
                    tokens.push((Token::Int(v), ln, col));
                }
                'a'..='z' | 'A'..='Z' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                        i += 1;
                    }
                    let s: String = bytes[start..i].iter().collect();
                    tokens.push((Token::Word(s), ln, col));
                }
                other => {
                    return Err(Error::Parse {
                        line: ln,
                        col,
                        msg: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
    }
    Ok(Lexer { tokens, pos: 0, is_name })
}

impl Lexer {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _, _)| t)
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.pos + 1).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((1, 1))
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::Parse { line, col, msg: msg.into() }
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<()> {
        match self.next() {
            Some(ref t) if t == want => Ok(()),
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other.is_some()));
                Err(self.error(format!("expected {what}")))
            }
        }
    }
}

/// Integer exponent after `^`: `3`, `-3`, `(3)`, `(-3)`, `(n/1)`.
fn parse_exponent(lx: &mut Lexer) -> Result<i64> {
    let negate = |v: i64, neg: bool| if neg { -v } else { v };
    match lx.next() {
        Some(Token::Int(v)) => Ok(v),
        Some(Token::Minus) => match lx.next() {
            Some(Token::Int(v)) => Ok(-v),
            _ => Err(lx.error("expected integer exponent")),
        },
        Some(Token::LParen) => {
            let neg = if lx.peek() == Some(&Token::Minus) {
                lx.next();
                true
            } else {
                false
            };
            let num = match lx.next() {
                Some(Token::Int(v)) => v,
                _ => return Err(lx.error("expected integer exponent")),
            };
            if lx.peek() == Some(&Token::Slash) {
                lx.next();
                match lx.next() {
                    Some(Token::Int(1)) => {}
                    _ => {
                        return Err(lx.error("fractional exponents are not allowed in certificates"))
                    }
                }
            }
            lx.expect(&Token::RParen, "closing parenthesis in exponent")?;
            Ok(negate(num, neg))
        }
        _ => Err(lx.error("expected exponent")),
    }
}

fn var_poly(name: &str, exp: i64) -> Option<LaurentPoly> {
    let t = match name {
        "x" => (1, exp, 0, 0),
        "y" => (1, 0, exp, 0),
        "q" => (1, 0, 0, exp),
        _ => return None,
    };
    Some(LaurentPoly::from_terms(&[t]))
}

/// A multiplicative factor of a coefficient.
fn parse_factor(lx: &mut Lexer) -> Result<LaurentPoly> {
    match lx.next() {
        Some(Token::Int(v)) => Ok(LaurentPoly::int(v)),
        Some(Token::Word(w)) => {
            let exp = if lx.peek() == Some(&Token::Caret) {
                lx.next();
                parse_exponent(lx)?
            } else {
                1
            };
            var_poly(&w, exp).ok_or_else(|| lx.error(format!("unknown variable {w}")))
        }
        Some(Token::LParen) => {
            let inner = parse_sum(lx)?;
            lx.expect(&Token::RParen, "closing parenthesis")?;
            Ok(inner)
        }
        _ => Err(lx.error("expected coefficient factor")),
    }
}

fn parse_product(lx: &mut Lexer) -> Result<LaurentPoly> {
    let mut acc = parse_factor(lx)?;
    while lx.peek() == Some(&Token::Star) {
        // a star followed by a call name belongs to the term parser
        if let Some(Token::Word(w)) = lx.peek2() {
            if (lx.is_name)(w) {
                break;
            }
        }
        lx.next();
        acc = acc.mul(&parse_factor(lx)?);
    }
    Ok(acc)
}

/// Sum expression inside parentheses.
fn parse_sum(lx: &mut Lexer) -> Result<LaurentPoly> {
    let mut negate = false;
    match lx.peek() {
        Some(Token::Minus) => {
            negate = true;
            lx.next();
        }
        Some(Token::Plus) => {
            lx.next();
        }
        _ => {}
    }
    let mut acc = parse_product(lx)?;
    if negate {
        acc = acc.neg();
    }
    loop {
        match lx.peek() {
            Some(Token::Plus) => {
                lx.next();
                acc = acc.add(&parse_product(lx)?);
            }
            Some(Token::Minus) => {
                lx.next();
                acc = acc.sub(&parse_product(lx)?);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_int(lx: &mut Lexer) -> Result<i64> {
    match lx.next() {
        Some(Token::Int(v)) => Ok(v),
        Some(Token::Minus) => match lx.next() {
            Some(Token::Int(v)) => Ok(-v),
            _ => Err(lx.error("expected integer")),
        },
        _ => Err(lx.error("expected integer")),
    }
}

/// One call term: `[coef *] name(a,b,c,d)`.
fn parse_term(lx: &mut Lexer) -> Result<(LaurentPoly, String, [i64; 4])> {
    let mut coeff = LaurentPoly::one();
    loop {
        match lx.peek() {
            Some(Token::Word(w)) if (lx.is_name)(w) => {
                let name = match lx.next() {
                    Some(Token::Word(w)) => w,
                    _ => unreachable!(),
                };
                lx.expect(&Token::LParen, "opening parenthesis after relation name")?;
                let a = parse_int(lx)?;
                lx.expect(&Token::Comma, "comma")?;
                let b = parse_int(lx)?;
                lx.expect(&Token::Comma, "comma")?;
                let c = parse_int(lx)?;
                lx.expect(&Token::Comma, "comma")?;
                let d = parse_int(lx)?;
                lx.expect(&Token::RParen, "closing parenthesis")?;
                return Ok((coeff, name, [a, b, c, d]));
            }
            Some(_) => {
                let factor = parse_factor(lx)?;
                coeff = coeff.mul(&factor);
                match lx.peek() {
                    Some(Token::Star) => {
                        lx.next();
                    }
                    Some(Token::Word(w)) if (lx.is_name)(w) => {}
                    _ => return Err(lx.error("expected * or a call name")),
                }
            }
            None => return Err(lx.error("expected a term")),
        }
    }
}

/// Signed sum of call terms; shared by the certificate and combination
/// parsers.
fn parse_signed_terms(lx: &mut Lexer) -> Result<Vec<(LaurentPoly, String, [i64; 4])>> {
    let mut terms = Vec::new();
    if lx.peek().is_none() {
        return Ok(terms);
    }
    let mut negate = match lx.peek() {
        Some(Token::Minus) => {
            lx.next();
            true
        }
        Some(Token::Plus) => {
            lx.next();
            false
        }
        _ => false,
    };
    loop {
        let (coeff, name, tuple) = parse_term(lx)?;
        let coeff = if negate { coeff.neg() } else { coeff };
        terms.push((coeff, name, tuple));
        match lx.next() {
            None => return Ok(terms),
            Some(Token::Plus) => negate = false,
            Some(Token::Minus) => negate = true,
            Some(_) => {
                lx.pos -= 1;
                return Err(lx.error("expected + or - between terms"));
            }
        }
    }
}

/// Parse the documented certificate grammar: a signed sum of
/// `coef * name(a,b,c,d)` terms; `#` starts a line comment.
pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut lx = lex(text, |w| template(w).is_some())?;
    let terms = parse_signed_terms(&mut lx)?;
    Ok(Certificate { terms })
}

/// Parse a symbolic combination over the family symbols themselves:
/// a signed sum of `coef * S(a,b,c,d)` / `coef * R(a,b,c,d)` terms in the
/// same coefficient grammar as certificates. Used for target expressions.
pub fn parse_combination(text: &str) -> Result<SymbolicCombination> {
    let mut lx = lex(text, |w| w == "S" || w == "R")?;
    let terms = parse_signed_terms(&mut lx)?;
    let mut out = SymbolicCombination::zero();
    for (coeff, name, tuple) in terms {
        let family = if name == "S" { Family::S } else { Family::R };
        out.add_term(family, tuple, &coeff);
    }
    Ok(out)
}

/// Render a certificate in the grammar accepted by [`parse_certificate`].
pub fn print_certificate(cert: &Certificate) -> String {
    let mut out = String::new();
    for (i, (coeff, name, t)) in cert.terms.iter().enumerate() {
        let (sign_str, mag) = match coeff.as_monomial() {
            Some(m) if m.coeff.sign() == num_bigint::Sign::Minus => {
                let mut pos = m;
                pos.coeff = -pos.coeff;
                (true, Some(pos))
            }
            Some(m) => (false, Some(m)),
            None => (false, None),
        };
        if i == 0 {
            if sign_str {
                out.push('-');
            }
        } else if sign_str {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        match mag {
            Some(m) if m.is_one() => {}
            Some(m) => {
                let poly = monomial_poly(&m);
                out.push_str(&format!("{poly}*"));
            }
            None => {
                out.push_str(&format!("({coeff})*"));
            }
        }
        out.push_str(&format!("{name}({},{},{},{})", t[0], t[1], t[2], t[3]));
    }
    out
}

fn monomial_poly(m: &Monomial) -> LaurentPoly {
    LaurentPoly::one().mul_monomial(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hat_relation_instantiates_at_zero() {
        let r = relation("nh1", 0, 0, 0, 0).unwrap();
        let mut expect = SymbolicCombination::zero();
        expect.add_term(Family::S, [0, 0, 0, 0], &LaurentPoly::one());
        expect.add_term(Family::S, [2, 0, 0, 0], &LaurentPoly::int(-1));
        expect.add_term(Family::S, [8, 12, 8, 4], &LaurentPoly::from_terms(&[(-1, 2, 0, 4)]));
        assert_eq!(r, expect);
    }

    #[test]
    fn final_relation_collects_shared_tuples() {
        // n4 has five template terms but four distinct symbols: the two
        // x q^(2+D) and x q^(3+D) pieces share a tuple
        let r = relation("n4", 0, 0, 0, 0).unwrap();
        assert_eq!(r.len(), 4);
        let coeff = r
            .terms()
            .find(|((_, t), _)| *t == [4, 8, 6, 4])
            .map(|(_, c)| c.clone())
            .unwrap();
        assert_eq!(coeff, LaurentPoly::from_terms(&[(-1, 1, 0, 2), (-1, 1, 0, 3)]));
    }

    #[test]
    fn mod_ten_relation_instantiates() {
        let r = relation("m2", 0, 0, 0, 0).unwrap();
        let mut expect = SymbolicCombination::zero();
        expect.add_term(Family::R, [0, 0, 0, 0], &LaurentPoly::one());
        expect.add_term(Family::R, [0, 2, 0, 0], &LaurentPoly::int(-1));
        expect.add_term(Family::R, [6, 12, 8, 4], &LaurentPoly::from_terms(&[(-1, 2, 1, 6)]));
        assert_eq!(r, expect);
    }

    #[test]
    fn unknown_relation_is_rejected(){
        assert!(relation("n9", 0, 0, 0, 0).is_err());
    }

    #[test]
    fn three_copy_certificate_expands_to_the_final_relation() {
        for (a, b, c, d) in [(0i64, 0, 0, 0), (2, -4, 1, 3), (-8, 5, -2, 0)] {
            let cert = three_copy_certificate(a, b, c, d);
            let expanded = expand(&cert).unwrap();
            let target = relation("n1", a, b, c, d).unwrap();
            assert!(
                expanded.sub(&target).is_zero(),
                "difference at ({a},{b},{c},{d}): {}",
                expanded.sub(&target)
            );
        }
    }

    #[test]
    fn nine_term_certificate_expands_to_its_target() {
        let expanded = expand(&nine_term_certificate()).unwrap();
        let target = nine_term_target();
        assert!(
            expanded.sub(&target).is_zero(),
            "difference: {}",
            expanded.sub(&target)
        );
    }

    #[test]
    fn empty_certificate_expands_to_zero() {
        let cert = Certificate::new(vec![]).unwrap();
        assert!(expand(&cert).unwrap().is_zero());
    }

    #[test]
    fn expand_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let names = relation_names();
        for _ in 0..5 {
            let mut rand_cert = |n: usize| {
                let terms: Vec<(LaurentPoly, String, [i64; 4])> = (0..n)
                    .map(|_| {
                        let name = names[rng.random_range(0..names.len())].to_string();
                        let coeff = LaurentPoly::from_terms(&[(
                            rng.random_range(-3..=3i64),
                            rng.random_range(0..=2),
                            0,
                            rng.random_range(-2..=4),
                        )]);
                        let tuple = [
                            rng.random_range(-4..=4),
                            rng.random_range(-4..=4),
                            rng.random_range(-4..=4),
                            rng.random_range(-4..=4),
                        ];
                        (coeff, name, tuple)
                    })
                    .collect();
                Certificate::new(terms).unwrap()
            };
            let c1 = rand_cert(3);
            let c2 = rand_cert(2);
            let joint = expand(&c1.concat(&c2)).unwrap();
            let split = expand(&c1).unwrap().add(&expand(&c2).unwrap());
            assert_eq!(joint, split);
        }
    }

    #[test]
    fn relations_vanish_numerically_at_sampled_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in relation_names() {
            for _ in 0..2 {
                let t: [i64; 4] = [
                    rng.random_range(-6..=6),
                    rng.random_range(-6..=6),
                    rng.random_range(-6..=6),
                    rng.random_range(-6..=6),
                ];
                let comb = relation(name, t[0], t[1], t[2], t[3]).unwrap();
                let report = numeric_check(&comb, 25).unwrap();
                assert!(
                    report.passed(),
                    "{name} at {t:?}: {:?}",
                    report.first_failure
                );
            }
        }
    }

    #[test]
    fn recurrence_combination_vanishes_numerically() {
        let comb = recurrence_combination(
            &crate::shiftrec::rec_f7(),
            Family::S,
            [0, 0, 0, 0],
        )
        .unwrap();
        // tuples step by (4,6,4,2)
        assert!(comb.terms().any(|((_, t), _)| *t == [4, 6, 4, 2]));
        assert!(comb.terms().any(|((_, t), _)| *t == [20, 30, 20, 10]));
        let report = numeric_check(&comb, 40).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure);
    }

    #[test]
    fn wrong_sign_is_detected_numerically() {
        let mut comb = relation("m1", 0, 0, 0, 0).unwrap();
        comb.add_term(Family::R, [2, 0, 0, 0], &LaurentPoly::int(2));
        let report = numeric_check(&comb, 20).unwrap();
        assert!(!report.passed());
        assert!(report.first_failure.unwrap().contains("q^("));
    }

    #[test]
    fn parse_basic_certificate() {
        let cert = parse_certificate("-m1(-2,0,0,0)+m1(-2,0,0,1)").unwrap();
        assert_eq!(cert.terms().len(), 2);
        assert_eq!(cert.terms()[0].0, LaurentPoly::int(-1));
        assert_eq!(cert.terms()[0].1, "m1");
        assert_eq!(cert.terms()[0].2, [-2, 0, 0, 1 - 1]);
        assert_eq!(cert.terms()[1].0, LaurentPoly::one());
        assert_eq!(cert.terms()[1].2, [-2, 0, 0, 1]);
    }

    #[test]
    fn parse_monomial_coefficients() {
        let cert = parse_certificate("-x*q*m1(0,4,2,2) - y*m4(2,6,4,2)").unwrap();
        assert_eq!(cert.terms()[0].0, LaurentPoly::from_terms(&[(-1, 1, 0, 1)]));
        assert_eq!(cert.terms()[1].0, LaurentPoly::from_terms(&[(-1, 0, 1, 0)]));
    }

    #[test]
    fn parse_polynomial_coefficient_and_comments() {
        let text = "# leading remark\n(1+q^2)*nh1(0,0,0,0) # trailing\n - 3*q^(-2)*x^2*n2(1,1,1,1)";
        let cert = parse_certificate(text).unwrap();
        assert_eq!(
            cert.terms()[0].0,
            LaurentPoly::from_terms(&[(1, 0, 0, 0), (1, 0, 0, 2)])
        );
        assert_eq!(
            cert.terms()[1].0,
            LaurentPoly::from_terms(&[(-3, 2, 0, -2)])
        );
    }

    #[test]
    fn whitespace_variants_parse_identically() {
        let a = parse_certificate("-x*q*m1(0,4,2,2)+m2(0,0,0,1)").unwrap();
        let b = parse_certificate("  - x * q * m1( 0, 4, 2, 2 )\n + m2(0,0,0,1) ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_certificate("m1(0,0,0)") {
            Err(Error::Parse { line, col, .. }) => {
                assert_eq!(line, 1);
                assert!(col >= 8);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_certificate("z1(0,0,0,0)").is_err());
        assert!(parse_certificate("m1(0,0,0,0) m2(0,0,0,0)").is_err());
    }

    #[test]
    fn printer_round_trips() {
        let certs = [
            nine_term_certificate(),
            three_copy_certificate(0, 0, 0, 0),
            three_copy_certificate(-2, 4, 1, 3),
            parse_certificate("(1+q^2-q^(-1))*n3(0,0,0,0)").unwrap(),
        ];
        for cert in certs {
            let text = print_certificate(&cert);
            let reparsed = parse_certificate(&text).unwrap();
            assert_eq!(reparsed, cert, "round trip through {text:?}");
        }
    }

    #[test]
    fn combination_parser_and_display_round_trip() {
        let target = parse_combination("R(0,0,0,0) - R(0,2,1,1) - x*q*R(0,4,2,2)").unwrap();
        assert_eq!(target, nine_term_target());
        let mixed = parse_combination("q^2*S(-8,-12,-8,-4) - 2*R(1,1,1,1) + (1+q)*S(0,0,0,0)").unwrap();
        assert_eq!(mixed.len(), 3);
        let reparsed = parse_combination(&mixed.to_string()).unwrap();
        assert_eq!(reparsed, mixed);
        assert!(parse_combination("S(1,2,3)").is_err());
        assert!(parse_combination("T(1,2,3,4)").is_err());
    }

    #[test]
    fn unit_multiple_detection() {
        let a = relation("n3", 0, 0, 0, 0).unwrap();
        let m = Monomial::new(3, 1, 0, 2);
        let b = a.scale(&LaurentPoly::from_terms(&[(3, 1, 0, 2)]));
        assert_eq!(b.unit_multiple_of(&a), Some(m));
        assert!(a.unit_multiple_of(&a).unwrap().is_one());
        let c = a.add(&SymbolicCombination::singleton(
            Family::S,
            [1, 1, 1, 1],
            LaurentPoly::one(),
        ));
        assert!(c.unit_multiple_of(&a).is_none());
    }
}
