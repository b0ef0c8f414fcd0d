//! Truncated q-series with Laurent-polynomial coefficients.
//!
//! A [`TruncatedSeries`] keeps its coefficients on the exponent grid
//! `1/denom`: the entry at scaled key `k` is the coefficient of
//! `q^(k/denom)`, a Laurent polynomial in `x` and `y` only. The `order`
//! field is the scaled exclusive bound of certified exponents — every
//! exponent below it has its exact coefficient stored (absence means zero).
//! Exactly known series (polynomials) carry an infinite sentinel order.
//!
//! Arithmetic propagates the bound pessimistically, so a result never claims
//! precision its inputs cannot support: sums take the minimum order,
//! products combine each factor's order with the other's valuation (and the
//! product of the two orders' uncertainties), and inversion demands unit
//! constant term at valuation zero.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{LaurentPoly, Monomial, Var};

/// Sentinel order for exactly known series: effectively infinite, but far
/// enough from `i64::MAX` that order arithmetic cannot overflow.
const EXACT: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    denom: i64,
    /// Scaled exclusive order bound; `>= EXACT` means exact.
    order: i64,
    /// Scaled q-exponent -> coefficient (a Laurent polynomial in x, y).
    coeffs: BTreeMap<i64, LaurentPoly>,
}

fn order_plus(order: i64, val: Option<i64>) -> i64 {
    if order >= EXACT {
        return EXACT;
    }
    match val {
        None => EXACT,
        Some(v) => order + v,
    }
}

impl TruncatedSeries {
    /// The zero series certified below `q^order` (integer exponent units).
    pub fn zero(denom: i64, order: i64) -> Self {
        assert!(denom >= 1, "denominator must be positive");
        Self { denom, order: order.saturating_mul(denom).min(EXACT), coeffs: BTreeMap::new() }
    }

    /// The exact zero series.
    pub fn exact_zero() -> Self {
        Self { denom: 1, order: EXACT, coeffs: BTreeMap::new() }
    }

    /// The exact constant 1.
    pub fn exact_one() -> Self {
        Self::exact(&LaurentPoly::one())
    }

    /// A polynomial, known exactly.
    pub fn exact(p: &LaurentPoly) -> Self {
        let denom = p.denom();
        let mut coeffs: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&(ex, ey, eq), c) in p.terms() {
            let m = Monomial { coeff: c.clone(), x_exp: ex, y_exp: ey, q_num: 0, q_den: 1 };
            let entry = coeffs.entry(eq).or_insert_with(LaurentPoly::zero);
            *entry = entry.add(&LaurentPoly::from(m));
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self { denom, order: EXACT, coeffs }
    }

    /// Bulk constructor from already-scaled parts (scaled exclusive order).
    pub(crate) fn from_parts(
        denom: i64,
        order: i64,
        mut coeffs: BTreeMap<i64, LaurentPoly>,
    ) -> Self {
        assert!(denom >= 1, "denominator must be positive");
        let bound = order.min(EXACT);
        coeffs.retain(|&k, c| k < bound && !c.is_zero());
        Self { denom, order: bound, coeffs }
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Scaled exclusive order bound, or `None` for exact series.
    pub fn order_scaled(&self) -> Option<i64> {
        if self.order >= EXACT {
            None
        } else {
            Some(self.order)
        }
    }

    pub fn is_exact(&self) -> bool {
        self.order >= EXACT
    }

    /// Least stored exponent as a reduced fraction `(num, den)`.
    pub fn valuation(&self) -> Option<(i64, i64)> {
        self.coeffs.keys().next().map(|&k| reduce_frac(k, self.denom))
    }

    fn valuation_scaled(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// All certified coefficients are zero.
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Iterate `(scaled exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &LaurentPoly)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    /// Coefficient of `q^(num/den)`. `None` when the exponent lies at or
    /// beyond the certified order; otherwise the exact coefficient (zero for
    /// exponents off the grid).
    pub fn coeff(&self, num: i64, den: i64) -> Option<LaurentPoly> {
        assert!(den >= 1, "exponent denominator must be positive");
        // Compare num/den < order/denom without overflow risk at our sizes.
        if self.order < EXACT && num * self.denom >= self.order * den {
            return None;
        }
        if (num * self.denom) % den != 0 {
            return Some(LaurentPoly::zero());
        }
        let key = num * self.denom / den;
        Some(self.coeffs.get(&key).cloned().unwrap_or_else(LaurentPoly::zero))
    }

    /// Coefficient of `q^e` for integer `e`; `None` beyond the order.
    pub fn coeff_int(&self, e: i64) -> Option<LaurentPoly> {
        self.coeff(e, 1)
    }

    /// Reassemble an exact series into a single Laurent polynomial.
    pub fn as_poly(&self) -> Option<LaurentPoly> {
        if !self.is_exact() {
            return None;
        }
        let mut out = LaurentPoly::zero();
        for (&k, c) in &self.coeffs {
            let m = Monomial { coeff: BigInt::one(), x_exp: 0, y_exp: 0, q_num: k, q_den: self.denom };
            out = out.add(&c.mul_monomial(&m));
        }
        Some(out)
    }

    /// Pass to the grid `1/new_denom` (a multiple of the current one).
    fn rescaled(&self, new_denom: i64) -> Self {
        debug_assert_eq!(new_denom % self.denom, 0);
        let f = new_denom / self.denom;
        if f == 1 {
            return self.clone();
        }
        Self {
            denom: new_denom,
            order: if self.order >= EXACT { EXACT } else { self.order * f },
            coeffs: self.coeffs.iter().map(|(&k, c)| (k * f, c.clone())).collect(),
        }
    }

    /// Truncate to integer order `order` (certified strictly below `q^order`).
    pub fn truncate_to(&self, order: i64) -> Self {
        self.truncate_scaled(order.saturating_mul(self.denom).min(EXACT))
    }

    fn truncate_scaled(&self, order_scaled: i64) -> Self {
        let order = self.order.min(order_scaled);
        let mut coeffs = self.coeffs.clone();
        if order < EXACT {
            coeffs = coeffs.into_iter().filter(|&(k, _)| k < order).collect();
        }
        Self { denom: self.denom, order, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let denom = self.denom.lcm(&other.denom);
        let a = self.rescaled(denom);
        let b = other.rescaled(denom);
        let order = a.order.min(b.order);
        let mut coeffs = a.coeffs;
        for (k, c) in b.coeffs {
            let entry = coeffs.entry(k).or_insert_with(LaurentPoly::zero);
            *entry = entry.add(&c);
        }
        if order < EXACT {
            coeffs.retain(|&k, c| k < order && !c.is_zero());
        } else {
            coeffs.retain(|_, c| !c.is_zero());
        }
        Self { denom, order, coeffs }
    }

    pub fn neg(&self) -> Self {
        Self {
            denom: self.denom,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(&k, c)| (k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let denom = self.denom.lcm(&other.denom);
        let a = self.rescaled(denom);
        let b = other.rescaled(denom);
        // Certified order of the product: each factor's uncertainty enters
        // multiplied by the other factor (bounded below by its valuation),
        // and the two uncertainties multiply.
        let c1 = order_plus(a.order, b.valuation_scaled());
        let c2 = order_plus(b.order, a.valuation_scaled());
        let c3 = if a.order >= EXACT || b.order >= EXACT { EXACT } else { a.order + b.order };
        let order = c1.min(c2).min(c3);
        let mut coeffs: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&ka, ca) in &a.coeffs {
            for (&kb, cb) in &b.coeffs {
                let k = ka + kb;
                if k >= order {
                    continue;
                }
                let entry = coeffs.entry(k).or_insert_with(LaurentPoly::zero);
                *entry = entry.add(&ca.mul(cb));
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self { denom, order, coeffs }
    }

    /// Multiply by a polynomial (which may involve q).
    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        self.mul(&Self::exact(p))
    }

    /// Multiply by a single monomial: exponent shift plus coefficient scale.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        if m.coeff.is_zero() {
            let order = order_plus(self.order, Some(0));
            return Self { denom: self.denom, order: order.min(EXACT), coeffs: BTreeMap::new() };
        }
        let denom = self.denom.lcm(&m.q_den);
        let a = self.rescaled(denom);
        let shift = m.q_num * (denom / m.q_den);
        let xy = Monomial { coeff: m.coeff.clone(), x_exp: m.x_exp, y_exp: m.y_exp, q_num: 0, q_den: 1 };
        Self {
            denom,
            order: if a.order >= EXACT { EXACT } else { a.order + shift },
            coeffs: a
                .coeffs
                .iter()
                .map(|(&k, c)| (k + shift, c.mul_monomial(&xy)))
                .collect(),
        }
    }

    pub fn mul_int(&self, c: i64) -> Self {
        self.mul_monomial(&Monomial::new(c, 0, 0, 0))
    }

    /// Multiplicative inverse at the series' own truncation order.
    ///
    /// Requires a finite order (truncate exact series first), valuation 0,
    /// and constant term exactly `+1` or `-1` with no x/y part.
    pub fn invert(&self) -> Result<Self> {
        if self.order >= EXACT {
            return Err(Error::Precondition(
                "series inversion needs a finite truncation order; truncate first".into(),
            ));
        }
        if self.order <= 0 {
            return Err(Error::Precondition("series inversion at non-positive order".into()));
        }
        if let Some((num, _)) = self.valuation() {
            if num < 0 {
                return Err(Error::NotInvertible("negative q-valuation".into()));
            }
        }
        let c0 = self.coeffs.get(&0).cloned().unwrap_or_else(LaurentPoly::zero);
        let sign = match c0.as_monomial() {
            Some(m) if m.is_one() => BigInt::one(),
            Some(m)
                if m.x_exp == 0
                    && m.y_exp == 0
                    && m.q_num == 0
                    && m.coeff == -BigInt::one() =>
            {
                -BigInt::one()
            }
            _ => {
                return Err(Error::NotInvertible(format!(
                    "constant term {c0} is not +1 or -1"
                )))
            }
        };
        let n = self.order as usize;
        let mut a: Vec<LaurentPoly> = vec![LaurentPoly::zero(); n];
        for (&k, c) in &self.coeffs {
            a[k as usize] = c.clone();
        }
        let mut b: Vec<LaurentPoly> = vec![LaurentPoly::zero(); n];
        b[0] = LaurentPoly::constant(sign.clone());
        for k in 1..n {
            let mut s = LaurentPoly::zero();
            for j in 1..=k {
                if !a[j].is_zero() && !b[k - j].is_zero() {
                    s = s.add(&a[j].mul(&b[k - j]));
                }
            }
            if !s.is_zero() {
                b[k] = s.mul_bigint(&(-sign.clone()));
            }
        }
        let coeffs = b
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64, c))
            .collect();
        Ok(Self { denom: self.denom, order: self.order, coeffs })
    }

    /// Substitute `x -> m` where `m = c * x * q^t` with `c = +-1` and
    /// `t >= 0`. Requires every stored coefficient to be polynomial in `x`
    /// (no negative x-exponents), so that the certified order is preserved.
    pub fn substitute_x(&self, m: &Monomial) -> Result<Self> {
        self.substitute_affine(Var::X, m)
    }

    /// Substitute `y -> m` where `m = c * y * q^t`, same contract as
    /// [`TruncatedSeries::substitute_x`].
    pub fn substitute_y(&self, m: &Monomial) -> Result<Self> {
        self.substitute_affine(Var::Y, m)
    }

    fn substitute_affine(&self, var: Var, m: &Monomial) -> Result<Self> {
        let shape_ok = match var {
            Var::X => m.x_exp == 1 && m.y_exp == 0,
            Var::Y => m.y_exp == 1 && m.x_exp == 0,
            Var::Q => false,
        };
        if !shape_ok || !(m.coeff == BigInt::one() || m.coeff == -BigInt::one()) {
            return Err(Error::NotMonomial(format!(
                "substitution must be by +-{var:?}*q^t, got {m:?}"
            )));
        }
        if m.q_num < 0 {
            return Err(Error::ValuationOrder(
                "substitution by a negative q-shift loses truncation order; \
                 shift the identity to forward form instead"
                    .into(),
            ));
        }
        let denom = self.denom.lcm(&m.q_den);
        let a = self.rescaled(denom);
        let mut coeffs: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&k, c) in &a.coeffs {
            let negative = c.terms().any(|(&(ex, ey, _), _)| match var {
                Var::X => ex < 0,
                Var::Y => ey < 0,
                Var::Q => false,
            });
            if negative {
                return Err(Error::ValuationOrder(
                    "substitution with a q-shift requires nonnegative exponents \
                     in the substituted variable"
                        .into(),
                ));
            }
            let image = c.substitute(var, m)?;
            // The image may involve q; fold it back onto the grid.
            for (&(ex, ey, eq), cc) in image.terms() {
                debug_assert_eq!(denom % image.denom(), 0);
                let shift = eq * (denom / image.denom());
                let key = k + shift;
                if a.order < EXACT && key >= a.order {
                    continue;
                }
                let mono = Monomial { coeff: cc.clone(), x_exp: ex, y_exp: ey, q_num: 0, q_den: 1 };
                let entry = coeffs.entry(key).or_insert_with(LaurentPoly::zero);
                *entry = entry.add(&LaurentPoly::from(mono));
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self { denom, order: a.order, coeffs })
    }

    /// Set a variable to 1 in every coefficient.
    pub fn substitute_one(&self, var: Var) -> Self {
        let mut coeffs: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            let v = c.set_var_one(var);
            if !v.is_zero() {
                coeffs.insert(k, v);
            }
        }
        Self { denom: self.denom, order: self.order, coeffs }
    }

    /// Drop coefficient terms whose x-degree exceeds `max` (useful when two
    /// series are only comparable on a window of x-degrees).
    pub fn restrict_x(&self, max: i64) -> Self {
        self.restrict(Var::X, max)
    }

    /// Drop coefficient terms whose y-degree exceeds `max`.
    pub fn restrict_y(&self, max: i64) -> Self {
        self.restrict(Var::Y, max)
    }

    fn restrict(&self, var: Var, max: i64) -> Self {
        let mut coeffs: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            let mut kept = LaurentPoly::zero();
            for (&(ex, ey, eq), cc) in c.terms() {
                let deg = match var {
                    Var::X => ex,
                    Var::Y => ey,
                    Var::Q => eq,
                };
                if deg <= max {
                    let m = Monomial { coeff: cc.clone(), x_exp: ex, y_exp: ey, q_num: eq, q_den: c.denom() };
                    kept = kept.add(&LaurentPoly::from(m));
                }
            }
            if !kept.is_zero() {
                coeffs.insert(k, kept);
            }
        }
        Self { denom: self.denom, order: self.order, coeffs }
    }

    /// First exponent (reduced fraction) where the two series' certified
    /// coefficients differ, restricted to the range both certify. `None`
    /// means full agreement on the common range.
    pub fn first_mismatch(&self, other: &Self) -> Option<(i64, i64)> {
        let denom = self.denom.lcm(&other.denom);
        let a = self.rescaled(denom);
        let b = other.rescaled(denom);
        let bound = a.order.min(b.order);
        let keys: std::collections::BTreeSet<i64> = a
            .coeffs
            .keys()
            .chain(b.coeffs.keys())
            .copied()
            .filter(|&k| k < bound)
            .collect();
        for k in keys {
            let ca = a.coeffs.get(&k);
            let cb = b.coeffs.get(&k);
            let equal = match (ca, cb) {
                (None, None) => true,
                (Some(c), None) | (None, Some(c)) => c.is_zero(),
                (Some(x), Some(y)) => x == y,
            };
            if !equal {
                return Some(reduce_frac(k, denom));
            }
        }
        None
    }

    /// Agreement on the full common certified range.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// The smaller of the two certified orders, in scaled units of the
    /// common grid, together with that grid. `None` when both are exact.
    pub fn common_order(&self, other: &Self) -> (i64, Option<i64>) {
        let denom = self.denom.lcm(&other.denom);
        let oa = if self.order >= EXACT { EXACT } else { self.order * (denom / self.denom) };
        let ob = if other.order >= EXACT { EXACT } else { other.order * (denom / other.denom) };
        let o = oa.min(ob);
        (denom, if o >= EXACT { None } else { Some(o) })
    }
}

fn reduce_frac(num: i64, den: i64) -> (i64, i64) {
    debug_assert!(den >= 1);
    if num == 0 {
        return (0, 1);
    }
    let g = num.abs().gcd(&den);
    (num / g, den / g)
}
