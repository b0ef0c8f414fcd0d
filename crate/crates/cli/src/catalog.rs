//! Identity catalog loader.
//!
//! Catalog files (`*.cat`) are line-oriented UTF-8 text; `#` starts a
//! comment. Each entry begins with `[identity]` followed by `key = value`
//! lines:
//!
//! * `id`      — unique identifier (required)
//! * `status`  — `theorem` or `conjecture-in-paper` (required)
//! * `note`    — free text (optional)
//! * `product` — product-side expression (required), grammar below
//!
//! and exactly one sum-side form:
//!
//! * `sum` — a combination literal over the quadruple-sum family symbols,
//!   e.g. `S(0,-2,-2,-1) - S(0,0,0,0) + S(2,2,1,0)`, evaluated at
//!   `x = y = 1`; or
//! * `matrix`/`denoms`/`linear` — integer arrays describing the multisum
//!   `sum_m q^(m^T B m / 2 + linear . m) / prod_i (q^{d_i}; q^{d_i})_{m_i}`
//!   with `matrix = [[...], ...]`, `denoms = [d1, ...]`,
//!   `linear = [a1, ...]` (`linear` may be omitted for all-zero offsets).
//!
//! Product grammar:
//!
//! ```text
//! expr   := factor (('*' | '/') factor)*
//! factor := '1' | '(' expr ')' | func '(' modulus ';' e1 ',' e2, ... ')'
//! func   := 'poch' | 'npoch' | 'theta'
//! ```
//!
//! `poch(m; e...)` is the product of `(q^e; q^m)_inf` over the listed
//! exponents, `npoch(m; e...)` the same with `-q^e` arguments, and
//! `theta(m; e...)` the product of `theta(q^e; q^m)`.

use std::fmt;
use std::fs;
use std::path::Path;

use qfold::certify::{parse_combination, Family, SymbolicCombination};
use qfold::exactalg::Var;
use qfold::folding::QuadraticForm;
use qfold::multisum::{evaluate, mod10_spec, mod14_spec, MultisumSpec};
use qfold::qseries::{multi_theta, pochhammer, TruncatedSeries};
use qfold::{Error, Monomial, Result};

/// Claim status recorded in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Theorem,
    ConjectureInPaper,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Theorem => "theorem",
            Status::ConjectureInPaper => "conjecture-in-paper",
        })
    }
}

impl std::str::FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem" => Ok(Status::Theorem),
            "conjecture-in-paper" => Ok(Status::ConjectureInPaper),
            other => Err(Error::UnknownLabel(format!("status {other}"))),
        }
    }
}

/// Sum side of a catalog identity.
#[derive(Debug, Clone)]
pub enum SumSide {
    /// Direct multisum specification.
    Spec(MultisumSpec),
    /// Linear combination of quadruple-sum family members, taken at
    /// `x = y = 1`.
    Combination(SymbolicCombination),
}

/// One product-side factor.
#[derive(Debug, Clone, PartialEq, Eq)]
enum ProductFunc {
    /// `(c q^e; q^m)_inf` for each listed exponent, `c = 1` or `-1`.
    Poch { sign: i64, modulus: i64, exponents: Vec<i64> },
    /// `theta(q^e; q^m)` for each listed exponent.
    Theta { modulus: i64, exponents: Vec<i64> },
    One,
}

/// A product expression: factors multiplied or divided left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductExpr {
    factors: Vec<(ProductFunc, bool)>, // (factor, inverted)
}

impl ProductExpr {
    pub fn evaluate(&self, order: i64) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::exact_one().truncate_to(order);
        for (func, inverted) in &self.factors {
            let value = match func {
                ProductFunc::One => continue,
                ProductFunc::Poch { sign, modulus, exponents } => {
                    let base = Monomial::q_pow_int(1, *modulus);
                    let mut prod = TruncatedSeries::exact_one().truncate_to(order);
                    for &e in exponents {
                        let f = pochhammer(&Monomial::q_pow_int(*sign, e), &base, None, order)?;
                        prod = prod.mul(&f);
                    }
                    prod
                }
                ProductFunc::Theta { modulus, exponents } => {
                    let base = Monomial::q_pow_int(1, *modulus);
                    let args: Vec<Monomial> =
                        exponents.iter().map(|&e| Monomial::q_pow_int(1, e)).collect();
                    multi_theta(&args, &base, order)?
                }
            };
            acc = if *inverted { acc.mul(&value.invert()?) } else { acc.mul(&value) };
        }
        Ok(acc)
    }
}

/// One catalog identity.
#[derive(Debug, Clone)]
pub struct IdentityEntry {
    pub id: String,
    pub status: Status,
    pub note: String,
    pub sum: SumSide,
    pub product: ProductExpr,
}

impl IdentityEntry {
    pub fn eval_sum(&self, order: i64) -> Result<TruncatedSeries> {
        match &self.sum {
            SumSide::Spec(spec) => evaluate(spec, order),
            SumSide::Combination(comb) => {
                let mut acc = TruncatedSeries::exact_zero();
                for ((family, tuple), coeff) in comb.terms() {
                    let spec = match family {
                        Family::S => mod14_spec(tuple)?,
                        Family::R => mod10_spec(tuple)?,
                    };
                    acc = acc.add(&evaluate(&spec, order)?.mul_poly(coeff));
                }
                Ok(acc.substitute_one(Var::X).substitute_one(Var::Y))
            }
        }
    }

    pub fn eval_product(&self, order: i64) -> Result<TruncatedSeries> {
        self.product.evaluate(order)
    }

    /// Exact comparison of both sides through `q^order` (exclusive).
    pub fn check(&self, order: i64) -> Result<IdentityReport> {
        let sum = self.eval_sum(order)?;
        let product = self.eval_product(order)?;
        let first_mismatch = sum
            .first_mismatch(&product)
            .map(|(num, den)| if den == 1 { format!("q^{num}") } else { format!("q^({num}/{den})") });
        Ok(IdentityReport {
            id: self.id.clone(),
            status: self.status,
            note: self.note.clone(),
            order,
            first_mismatch,
        })
    }
}

/// Outcome of checking one identity.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub id: String,
    pub status: Status,
    pub note: String,
    pub order: i64,
    pub first_mismatch: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

// ---------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------

fn parse_error(file: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col: 1, msg: format!("{file}: {}", msg.into()) }
}

/// `[a, b, c]` with integer entries.
fn parse_int_list(s: &str) -> Option<Vec<i64>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return Some(Vec::new());
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<i64>().ok())
        .collect()
}

/// `[[a, b], [c, d]]` with integer entries.
fn parse_int_matrix(s: &str) -> Option<Vec<Vec<i64>>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    let mut rows = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ']' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    rows.push(parse_int_list(&inner[start?..=i])?);
                    start = None;
                }
            }
            ',' | ' ' | '\t' if depth == 0 => {}
            _ if depth >= 1 => {}
            _ => return None,
        }
    }
    if depth != 0 {
        return None;
    }
    Some(rows)
}

/// Product expression parser (grammar in the module docs).
fn parse_product_expr(text: &str) -> Option<ProductExpr> {
    struct P<'a> {
        chars: &'a [u8],
        pos: usize,
    }
    impl P<'_> {
        fn skip_ws(&mut self) {
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }
        fn peek(&mut self) -> Option<u8> {
            self.skip_ws();
            self.chars.get(self.pos).copied()
        }
        fn eat(&mut self, ch: u8) -> bool {
            if self.peek() == Some(ch) {
                self.pos += 1;
                true
            } else {
                false
            }
        }
        fn int(&mut self) -> Option<i64> {
            self.skip_ws();
            let start = self.pos;
            if self.chars.get(self.pos) == Some(&b'-') {
                self.pos += 1;
            }
            while self.chars.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            if self.pos == start || (self.pos == start + 1 && self.chars[start] == b'-') {
                self.pos = start;
                return None;
            }
            std::str::from_utf8(&self.chars[start..self.pos]).ok()?.parse().ok()
        }
        fn word(&mut self) -> Option<&str> {
            self.skip_ws();
            let start = self.pos;
            while self.chars.get(self.pos).is_some_and(u8::is_ascii_alphabetic) {
                self.pos += 1;
            }
            if self.pos == start {
                return None;
            }
            std::str::from_utf8(&self.chars[start..self.pos]).ok()
        }
        fn factor(&mut self) -> Option<(Vec<(ProductFunc, bool)>, ())> {
            if self.eat(b'(') {
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return None;
                }
                return Some((inner.factors, ()));
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let v = self.int()?;
                if v != 1 {
                    return None;
                }
                return Some((vec![(ProductFunc::One, false)], ()));
            }
            let name = self.word()?.to_string();
            if !self.eat(b'(') {
                return None;
            }
            let modulus = self.int()?;
            if !self.eat(b';') {
                return None;
            }
            let mut exponents = vec![self.int()?];
            while self.eat(b',') {
                exponents.push(self.int()?);
            }
            if !self.eat(b')') {
                return None;
            }
            let func = match name.as_str() {
                "poch" => ProductFunc::Poch { sign: 1, modulus, exponents },
                "npoch" => ProductFunc::Poch { sign: -1, modulus, exponents },
                "theta" => ProductFunc::Theta { modulus, exponents },
                _ => return None,
            };
            Some((vec![(func, false)], ()))
        }
        fn expr(&mut self) -> Option<ProductExpr> {
            let (mut factors, ()) = self.factor()?;
            loop {
                if self.eat(b'*') {
                    let (more, ()) = self.factor()?;
                    factors.extend(more);
                } else if self.eat(b'/') {
                    let (more, ()) = self.factor()?;
                    factors.extend(more.into_iter().map(|(f, inv)| (f, !inv)));
                } else {
                    return Some(ProductExpr { factors });
                }
            }
        }
    }
    let mut p = P { chars: text.as_bytes(), pos: 0 };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return None;
    }
    Some(expr)
}

#[derive(Default)]
struct PendingEntry {
    id: Option<String>,
    status: Option<Status>,
    note: String,
    sum: Option<String>,
    matrix: Option<Vec<Vec<i64>>>,
    denoms: Option<Vec<i64>>,
    linear: Option<Vec<i64>>,
    product: Option<String>,
    start_line: usize,
}

fn finish_entry(file: &str, pending: PendingEntry) -> Result<IdentityEntry> {
    let line = pending.start_line;
    let id = pending
        .id
        .ok_or_else(|| parse_error(file, line, "entry missing `id`"))?;
    let status = pending
        .status
        .ok_or_else(|| parse_error(file, line, format!("entry {id} missing `status`")))?;
    let product_text = pending
        .product
        .ok_or_else(|| parse_error(file, line, format!("entry {id} missing `product`")))?;
    let product = parse_product_expr(&product_text)
        .ok_or_else(|| parse_error(file, line, format!("entry {id}: bad product expression")))?;
    let sum = match (pending.sum, pending.matrix) {
        (Some(text), None) => {
            if pending.denoms.is_some() || pending.linear.is_some() {
                return Err(parse_error(
                    file,
                    line,
                    format!("entry {id}: `sum` excludes `denoms`/`linear`"),
                ));
            }
            SumSide::Combination(parse_combination(&text)?)
        }
        (None, Some(matrix)) => {
            let d = matrix.len();
            let denoms = pending
                .denoms
                .ok_or_else(|| parse_error(file, line, format!("entry {id} missing `denoms`")))?;
            let linear = pending.linear.unwrap_or_else(|| vec![0; d]);
            let form = QuadraticForm::from_integer_matrix(&matrix)?.with_integer_linear(&linear)?;
            SumSide::Spec(MultisumSpec::new(form, vec![0; d], None, denoms)?)
        }
        (Some(_), Some(_)) => {
            return Err(parse_error(
                file,
                line,
                format!("entry {id}: give `sum` or `matrix`, not both"),
            ))
        }
        (None, None) => {
            return Err(parse_error(file, line, format!("entry {id}: missing sum side")))
        }
    };
    Ok(IdentityEntry { id, status, note: pending.note, sum, product })
}

/// Parse one catalog file.
pub fn parse_catalog_file(file: &str, text: &str) -> Result<Vec<IdentityEntry>> {
    let mut entries = Vec::new();
    let mut pending: Option<PendingEntry> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "[identity]" {
            if let Some(p) = pending.take() {
                entries.push(finish_entry(file, p)?);
            }
            pending = Some(PendingEntry { start_line: lineno, ..PendingEntry::default() });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_error(file, lineno, format!("expected `key = value`, got `{line}`")));
        };
        let key = key.trim();
        let value = value.trim();
        let entry = pending
            .as_mut()
            .ok_or_else(|| parse_error(file, lineno, "field before [identity] header"))?;
        match key {
            "id" => entry.id = Some(value.to_string()),
            "status" => entry.status = Some(value.parse()?),
            "note" => entry.note = value.to_string(),
            "sum" => entry.sum = Some(value.to_string()),
            "product" => entry.product = Some(value.to_string()),
            "matrix" => {
                entry.matrix = Some(parse_int_matrix(value).ok_or_else(|| {
                    parse_error(file, lineno, format!("bad matrix literal `{value}`"))
                })?)
            }
            "denoms" => {
                entry.denoms = Some(parse_int_list(value).ok_or_else(|| {
                    parse_error(file, lineno, format!("bad list literal `{value}`"))
                })?)
            }
            "linear" => {
                entry.linear = Some(parse_int_list(value).ok_or_else(|| {
                    parse_error(file, lineno, format!("bad list literal `{value}`"))
                })?)
            }
            other => {
                return Err(parse_error(file, lineno, format!("unknown key `{other}`")));
            }
        }
    }
    if let Some(p) = pending.take() {
        entries.push(finish_entry(file, p)?);
    }
    Ok(entries)
}

/// Load every `*.cat` file in `dir` (sorted by file name); entry order
/// within a file is preserved and ids must be globally unique.
pub fn load_dir(dir: &Path) -> Result<Vec<IdentityEntry>> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::Precondition(format!("cannot read catalog dir {}: {e}", dir.display())))?
        .filter_map(|r| r.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "cat"))
        .collect();
    files.sort();
    let mut entries = Vec::new();
    for path in files {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
        entries.extend(parse_catalog_file(&name, &text)?);
    }
    let mut seen = std::collections::BTreeSet::new();
    for entry in &entries {
        if !seen.insert(entry.id.clone()) {
            return Err(Error::Precondition(format!("duplicate catalog id {}", entry.id)));
        }
    }
    Ok(entries)
}
