//! Sparse Laurent polynomials in `x`, `y`, `q` with exact integer
//! coefficients and fractional `q`-exponents on a common denominator.
//!
//! Terms are keyed by the exponent triple `(e_x, e_y, e_q)` where `e_q` is
//! stored scaled: a key `(a, b, e)` in a polynomial with denominator `D`
//! represents `x^a * y^b * q^(e/D)`. Keys are ordered lexicographically,
//! which fixes the canonical term order used for printing (descending) and
//! for sign normalisation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent triple `(e_x, e_y, scaled e_q)`.
pub type Key = (i64, i64, i64);

/// The three variables a [`LaurentPoly`] may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Q,
}

/// A single signed term `coeff * x^a * y^b * q^(q_num/q_den)`.
///
/// Monomials are the only admissible substitution targets and product
/// arguments; exponents may be negative and the `q`-exponent may be a
/// reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: BigInt,
    pub x_exp: i64,
    pub y_exp: i64,
    /// Numerator of the q-exponent.
    pub q_num: i64,
    /// Denominator of the q-exponent, always >= 1.
    pub q_den: i64,
}

impl Monomial {
    /// `c * q^e` with integer exponent.
    pub fn q_pow_int(c: i64, e: i64) -> Self {
        Monomial { coeff: BigInt::from(c), x_exp: 0, y_exp: 0, q_num: e, q_den: 1 }
    }

    /// `q^(num/den)` with a fractional exponent.
    pub fn q_pow_frac(num: i64, den: i64) -> Self {
        assert!(den > 0, "q-exponent denominator must be positive");
        let g = num.gcd(&den).max(1);
        Monomial { coeff: BigInt::one(), x_exp: 0, y_exp: 0, q_num: num / g, q_den: den / g }
    }

    /// General monomial `c * x^a * y^b * q^e` with integer exponents.
    pub fn new(c: i64, x_exp: i64, y_exp: i64, q_exp: i64) -> Self {
        Monomial { coeff: BigInt::from(c), x_exp, y_exp, q_num: q_exp, q_den: 1 }
    }

    /// The constant monomial `1`.
    pub fn one() -> Self {
        Monomial::q_pow_int(1, 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.x_exp == 0 && self.y_exp == 0 && self.q_num == 0
    }

    /// Product of two monomials (exponents add, coefficients multiply).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let den = (self.q_den / self.q_den.gcd(&other.q_den)) * other.q_den;
        let num = self.q_num * (den / self.q_den) + other.q_num * (den / other.q_den);
        let g = num.gcd(&den).max(1);
        Monomial {
            coeff: &self.coeff * &other.coeff,
            x_exp: self.x_exp + other.x_exp,
            y_exp: self.y_exp + other.y_exp,
            q_num: num / g,
            q_den: den / g,
        }
    }

    /// `self^k` for integer `k`; requires coefficient `±1` when `k < 0`.
    pub fn pow(&self, k: i64) -> Result<Monomial> {
        let coeff = if k >= 0 {
            num_traits::pow::pow(self.coeff.clone(), k as usize)
        } else if self.coeff.is_one() {
            BigInt::one()
        } else if (-&self.coeff).is_one() {
            if k % 2 == 0 { BigInt::one() } else { -BigInt::one() }
        } else {
            return Err(Error::Precondition(format!(
                "cannot raise coefficient {} to negative power",
                self.coeff
            )));
        };
        let g = (self.q_num * k).gcd(&self.q_den).max(1);
        Ok(Monomial {
            coeff,
            x_exp: self.x_exp * k,
            y_exp: self.y_exp * k,
            q_num: self.q_num * k / g,
            q_den: self.q_den / g,
        })
    }

    /// Multiplicative inverse; requires coefficient `±1`.
    pub fn inverse(&self) -> Result<Monomial> {
        self.pow(-1)
    }

    /// The q-valuation as a reduced fraction `(num, den)`.
    pub fn q_valuation(&self) -> (i64, i64) {
        (self.q_num, self.q_den)
    }

    /// True if the q-exponent is strictly positive.
    pub fn q_positive(&self) -> bool {
        self.q_num > 0
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", LaurentPoly::from(self.clone()))
    }
}

/// Sparse Laurent polynomial in `x`, `y`, `q` over the integers, with the
/// `q`-exponent grid refined to multiples of `1/denom`.
///
/// Invariants: `denom >= 1` and minimal (the gcd of `denom` and every stored
/// q-exponent is 1 unless the polynomial is q-free, in which case
/// `denom == 1`); no zero coefficients are stored. Equality of values is
/// therefore plain structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    denom: i64,
    terms: BTreeMap<Key, BigInt>,
}

impl LaurentPoly {
    // ----------------------------------------------------------------
    // constructors
    // ----------------------------------------------------------------

    pub fn zero() -> Self {
        LaurentPoly { denom: 1, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        LaurentPoly::int(1)
    }

    /// Constant polynomial.
    pub fn int(c: i64) -> Self {
        LaurentPoly::constant(BigInt::from(c))
    }

    /// Constant polynomial from a big integer.
    pub fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0, 0), c);
        }
        LaurentPoly { denom: 1, terms }
    }

    /// `c * x^a * q^e` — the most common builder in recurrence coefficients.
    pub fn xq(c: i64, x_exp: i64, q_exp: i64) -> Self {
        LaurentPoly::from(Monomial::new(c, x_exp, 0, q_exp))
    }

    /// `q^e` with integer exponent.
    pub fn q_pow(e: i64) -> Self {
        LaurentPoly::from(Monomial::q_pow_int(1, e))
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => LaurentPoly::from(Monomial::new(1, 1, 0, 0)),
            Var::Y => LaurentPoly::from(Monomial::new(1, 0, 1, 0)),
            Var::Q => LaurentPoly::q_pow(1),
        }
    }

    /// Build from raw `(x, y, q)` integer-exponent terms.
    pub fn from_terms(terms: &[(i64, i64, i64, i64)]) -> Self {
        let mut p = LaurentPoly::zero();
        for &(c, ex, ey, eq) in terms {
            p.add_term_raw(BigInt::from(c), (ex, ey, eq), 1);
        }
        p.reduce();
        p
    }

    /// Build a q-free polynomial from `(x, y) -> coefficient` entries.
    pub(crate) fn from_xy_terms(terms: impl IntoIterator<Item = ((i64, i64), BigInt)>) -> Self {
        let mut p = LaurentPoly::zero();
        for ((ex, ey), c) in terms {
            p.add_term_raw(c, (ex, ey, 0), 1);
        }
        p
    }

    // ----------------------------------------------------------------
    // inspection
    // ----------------------------------------------------------------

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.get(&(0, 0, 0)).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|k| *k == (0, 0, 0))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// The constant term (coefficient of `x^0 y^0 q^0`).
    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&(0, 0, 0)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// View as a single monomial, if possible.
    pub fn as_monomial(&self) -> Option<Monomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&(ex, ey, eq), c) = self.terms.iter().next().unwrap();
        let g = eq.gcd(&self.denom).max(1);
        Some(Monomial { coeff: c.clone(), x_exp: ex, y_exp: ey, q_num: eq / g, q_den: self.denom / g })
    }

    /// Denominator of the q-exponent grid (always minimal).
    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in ascending canonical order as `((e_x, e_y, e_q), c)`
    /// with `e_q` scaled by [`Self::denom`].
    pub fn terms(&self) -> impl Iterator<Item = (&Key, &BigInt)> {
        self.terms.iter()
    }

    /// Smallest and largest `x`-exponent, if nonzero.
    pub fn x_range(&self) -> Option<(i64, i64)> {
        let mut range: Option<(i64, i64)> = None;
        for (ex, _, _) in self.terms.keys() {
            range = Some(match range {
                None => (*ex, *ex),
                Some((lo, hi)) => (lo.min(*ex), hi.max(*ex)),
            });
        }
        range
    }

    /// Minimal q-exponent as a reduced fraction, if nonzero.
    pub fn q_valuation(&self) -> Option<(i64, i64)> {
        self.terms
            .keys()
            .map(|&(_, _, eq)| eq)
            .min()
            .map(|e| {
                let g = e.gcd(&self.denom).max(1);
                (e / g, self.denom / g)
            })
    }

    /// Minimal q-exponent scaled to a given denominator.
    pub fn q_valuation_scaled(&self, denom: i64) -> Option<i64> {
        self.q_valuation().map(|(n, d)| {
            debug_assert_eq!(denom % d, 0);
            n * (denom / d)
        })
    }

    /// Split into `x`-homogeneous layers: map `x`-degree -> polynomial in
    /// `y, q` (the `x` exponent is removed from the keys).
    pub fn split_x_degrees(&self) -> BTreeMap<i64, LaurentPoly> {
        let mut layers: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&(ex, ey, eq), c) in &self.terms {
            layers
                .entry(ex)
                .or_insert_with(|| LaurentPoly { denom: self.denom, terms: BTreeMap::new() })
                .terms
                .insert((0, ey, eq), c.clone());
        }
        for p in layers.values_mut() {
            p.reduce();
        }
        layers
    }

    // ----------------------------------------------------------------
    // arithmetic
    // ----------------------------------------------------------------

    fn add_term_raw(&mut self, c: BigInt, key: Key, key_denom: i64) {
        if c.is_zero() {
            return;
        }
        let lcm = self.denom.lcm(&key_denom);
        if lcm != self.denom {
            self.rescale_keys(lcm);
        }
        let key = (key.0, key.1, key.2 * (lcm / key_denom));
        let entry = self.terms.entry(key).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn rescale_keys(&mut self, new_denom: i64) {
        debug_assert_eq!(new_denom % self.denom, 0);
        let f = new_denom / self.denom;
        if f == 1 {
            return;
        }
        let old = std::mem::take(&mut self.terms);
        for ((ex, ey, eq), c) in old {
            self.terms.insert((ex, ey, eq * f), c);
        }
        self.denom = new_denom;
    }

    /// Restore the minimal-denominator invariant.
    fn reduce(&mut self) {
        if self.denom == 1 {
            return;
        }
        let mut g = self.denom;
        for (_, _, eq) in self.terms.keys() {
            g = g.gcd(eq);
            if g == 1 {
                return;
            }
        }
        let old = std::mem::take(&mut self.terms);
        for ((ex, ey, eq), c) in old {
            self.terms.insert((ex, ey, eq / g), c);
        }
        self.denom /= g;
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&key, c) in &other.terms {
            out.add_term_raw(c.clone(), key, other.denom);
        }
        out.reduce();
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&key, c) in &other.terms {
            out.add_term_raw(-c.clone(), key, other.denom);
        }
        out.reduce();
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            denom: self.denom,
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let lcm = self.denom.lcm(&other.denom);
        let (fa, fb) = (lcm / self.denom, lcm / other.denom);
        let mut out = LaurentPoly { denom: lcm, terms: BTreeMap::new() };
        for (&(ax, ay, aq), ac) in &self.terms {
            for (&(bx, by, bq), bc) in &other.terms {
                let key = (ax + bx, ay + by, aq * fa + bq * fb);
                let entry = out.terms.entry(key).or_insert_with(BigInt::zero);
                *entry += ac * bc;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out.reduce();
        out
    }

    pub fn mul_int(&self, c: i64) -> LaurentPoly {
        self.mul_bigint(&BigInt::from(c))
    }

    pub fn mul_bigint(&self, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            denom: self.denom,
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    /// Multiply by a monomial (cheap exponent shift).
    pub fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        if m.coeff.is_zero() || self.is_zero() {
            return LaurentPoly::zero();
        }
        let lcm = self.denom.lcm(&m.q_den);
        let shift = m.q_num * (lcm / m.q_den);
        let f = lcm / self.denom;
        let mut out = LaurentPoly { denom: lcm, terms: BTreeMap::new() };
        for (&(ex, ey, eq), c) in &self.terms {
            out.terms
                .insert((ex + m.x_exp, ey + m.y_exp, eq * f + shift), c * &m.coeff);
        }
        out.reduce();
        out
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    // ----------------------------------------------------------------
    // substitution and specialisation
    // ----------------------------------------------------------------

    /// Substitute a variable by a monomial: `x -> x*q^2`, `q -> q^(1/4)`, ...
    ///
    /// The replacement must be a single monomial with coefficient `±1`.
    /// For `Var::Q` the replacement must be a pure power of `q` (no `x`/`y`),
    /// and a `-1` coefficient is only admissible when every resulting
    /// exponent is an integer.
    pub fn substitute(&self, var: Var, replacement: &Monomial) -> Result<LaurentPoly> {
        if !(replacement.coeff.is_one() || (-&replacement.coeff).is_one()) {
            return Err(Error::NotMonomial(format!(
                "replacement coefficient must be ±1, got {}",
                replacement.coeff
            )));
        }
        if matches!(var, Var::Q) && (replacement.x_exp != 0 || replacement.y_exp != 0) {
            return Err(Error::Precondition(
                "substitution for q must be a pure power of q".into(),
            ));
        }
        let negative = (-&replacement.coeff).is_one();
        let mut out = LaurentPoly::zero();
        for (&(ex, ey, eq), c) in &self.terms {
            // exponent of the substituted variable in this term
            let e = match var {
                Var::X => ex,
                Var::Y => ey,
                Var::Q => eq, // scaled by self.denom
            };
            // the term with the substituted variable removed
            let (rx, ry, rq, rq_den) = match var {
                Var::X => (0, ey, eq, self.denom),
                Var::Y => (ex, 0, eq, self.denom),
                Var::Q => (ex, ey, 0, 1),
            };
            // replacement^e; for Var::Q the exponent e is scaled, so the
            // new q-exponent is (e/denom) * (q_num/q_den), handled as a fraction.
            let (rep_q_num, rep_q_den) = (replacement.q_num, replacement.q_den);
            let (add_q_num, add_q_den, sign_exp) = match var {
                Var::X | Var::Y => (rep_q_num * e, rep_q_den, e),
                Var::Q => (rep_q_num * e, rep_q_den * self.denom, {
                    // sign only admissible for integer exponents
                    if negative && (eq % self.denom != 0) {
                        return Err(Error::IncompatibleDenominator {
                            num: eq,
                            den: self.denom,
                            denom: replacement.q_den,
                        });
                    }
                    eq / self.denom.max(1)
                }),
            };
            let g = add_q_num.gcd(&add_q_den).max(1);
            let (add_q_num, add_q_den) = (add_q_num / g, add_q_den / g);
            let new_den = rq_den.lcm(&add_q_den);
            let new_q = rq * (new_den / rq_den) + add_q_num * (new_den / add_q_den);
            let (nx, ny) = match var {
                Var::X => (replacement.x_exp * e + rx, replacement.y_exp * e + ry),
                Var::Y => (replacement.x_exp * e + rx, replacement.y_exp * e + ry),
                Var::Q => (rx, ry),
            };
            let mut coeff = c.clone();
            if negative && sign_exp % 2 != 0 {
                coeff = -coeff;
            }
            out.add_term_raw(coeff, (nx, ny, new_q), new_den);
        }
        out.reduce();
        Ok(out)
    }

    /// Set a variable to 1 (merge terms along that exponent).
    pub fn set_var_one(&self, var: Var) -> LaurentPoly {
        let mut out = LaurentPoly { denom: self.denom, terms: BTreeMap::new() };
        for (&(ex, ey, eq), c) in &self.terms {
            let key = match var {
                Var::X => (0, ey, eq),
                Var::Y => (ex, 0, eq),
                Var::Q => (ex, ey, 0),
            };
            let entry = out.terms.entry(key).or_insert_with(BigInt::zero);
            *entry += c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out.reduce();
        out
    }

    // ----------------------------------------------------------------
    // content and normalisation
    // ----------------------------------------------------------------

    /// Positive gcd of all coefficients (0 for the zero polynomial).
    pub fn integer_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// The content monomial: integer content times the componentwise minimal
    /// exponents. Dividing by it yields a primitive true polynomial with a
    /// term of exponent zero in at least one variable.
    pub fn monomial_content(&self) -> Monomial {
        if self.is_zero() {
            return Monomial::one();
        }
        let mut min_x = i64::MAX;
        let mut min_y = i64::MAX;
        let mut min_q = i64::MAX;
        for &(ex, ey, eq) in self.terms.keys() {
            min_x = min_x.min(ex);
            min_y = min_y.min(ey);
            min_q = min_q.min(eq);
        }
        let g = min_q.gcd(&self.denom).max(1);
        Monomial {
            coeff: self.integer_content(),
            x_exp: min_x,
            y_exp: min_y,
            q_num: min_q / g,
            q_den: self.denom / g,
        }
    }

    /// Divide out the content monomial and normalise the sign so the leading
    /// term (largest in canonical order) has a positive coefficient.
    /// Returns `(content, primitive)` with `self = content * primitive` up to
    /// the extracted sign.
    pub fn extract_content(&self) -> (Monomial, LaurentPoly) {
        if self.is_zero() {
            return (Monomial::one(), LaurentPoly::zero());
        }
        let mut content = self.monomial_content();
        let inv = content.inverse_unchecked();
        let mut prim = LaurentPoly {
            denom: self.denom.lcm(&inv.q_den),
            terms: BTreeMap::new(),
        };
        let f = prim.denom / self.denom;
        let shift = inv.q_num * (prim.denom / inv.q_den);
        for (&(ex, ey, eq), c) in &self.terms {
            let q = c.div_floor(&content.coeff);
            debug_assert!((&q * &content.coeff - c).is_zero());
            prim.terms
                .insert((ex + inv.x_exp, ey + inv.y_exp, eq * f + shift), q);
        }
        prim.reduce();
        if let Some((_, lead)) = prim.terms.iter().next_back() {
            if lead.is_negative() {
                prim = prim.neg();
                content.coeff = -content.coeff;
            }
        }
        (content, prim)
    }

    /// Exact division by a monomial with unit coefficient handled via
    /// reciprocal exponents; division of coefficients must be exact.
    pub fn div_monomial(&self, m: &Monomial) -> Result<LaurentPoly> {
        if m.coeff.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = Monomial {
            coeff: BigInt::one(),
            x_exp: -m.x_exp,
            y_exp: -m.y_exp,
            q_num: -m.q_num,
            q_den: m.q_den,
        };
        let shifted = self.mul_monomial(&inv);
        if m.coeff.is_one() {
            return Ok(shifted);
        }
        let mut out = LaurentPoly { denom: shifted.denom, terms: BTreeMap::new() };
        for (&k, c) in &shifted.terms {
            let (q, r) = c.div_rem(&m.coeff);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            out.terms.insert(k, q);
        }
        Ok(out)
    }
}

impl Monomial {
    /// Reciprocal of the exponents only (coefficient untouched); helper for
    /// content extraction where the coefficient is divided separately.
    fn inverse_unchecked(&self) -> Monomial {
        Monomial {
            coeff: BigInt::one(),
            x_exp: -self.x_exp,
            y_exp: -self.y_exp,
            q_num: -self.q_num,
            q_den: self.q_den,
        }
    }
}

impl From<Monomial> for LaurentPoly {
    fn from(m: Monomial) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term_raw(m.coeff.clone(), (m.x_exp, m.y_exp, m.q_num), m.q_den);
        p.reduce();
        p
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(self)
    }
}

// --------------------------------------------------------------------
// printing
// --------------------------------------------------------------------

fn write_exp(out: &mut String, var: &str, num: i64, den: i64) {
    out.push_str(var);
    if num == den {
        return;
    }
    out.push('^');
    if den == 1 {
        if num >= 0 {
            out.push_str(&num.to_string());
        } else {
            out.push_str(&format!("({num})"));
        }
    } else {
        out.push_str(&format!("({num}/{den})"));
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical descending-order rendering, e.g. `-q^5*x - q^4*x - 1` and
    /// `q^(3/4)*x^2` for fractional exponents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(ex, ey, eq), c) in self.terms.iter().rev() {
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = String::new();
            if eq != 0 {
                let g = eq.gcd(&self.denom).max(1);
                write_exp(&mut factors, "q", eq / g, self.denom / g);
            }
            if ex != 0 {
                if !factors.is_empty() {
                    factors.push('*');
                }
                write_exp(&mut factors, "x", ex, 1);
            }
            if ey != 0 {
                if !factors.is_empty() {
                    factors.push('*');
                }
                write_exp(&mut factors, "y", ey, 1);
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{factors}")?;
            } else {
                write!(f, "{mag}*{factors}")?;
            }
        }
        Ok(())
    }
}
