//! Exact polynomial division and multivariate gcd.
//!
//! * [`exact_div`] — division known (or required) to be exact; used by the
//!   fraction-free elimination steps, where Bareiss' theorem guarantees
//!   divisibility, and as a divisibility test elsewhere.
//! * [`poly_gcd`] — gcd in the Laurent ring `Z[x^±, y^±, q^(±1/D)]` via the
//!   subresultant polynomial remainder sequence, recursing through the
//!   variables in the order `x`, `y`, `q`. Monomials are units here, so the
//!   result is normalised: anchored at exponent zero, positive leading
//!   coefficient, integer content equal to the gcd of the integer contents.
//!
//! Degrees stay small in this crate (matrix entries of difference systems),
//! so a dense univariate view per recursion level is plenty.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::poly::{LaurentPoly, Monomial, Var};

/// Dense univariate view: index = exponent of the main variable, entries are
/// polynomials in the remaining variables.
type UPoly = Vec<LaurentPoly>;

fn trim(p: &mut UPoly) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn deg(p: &UPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

fn lc(p: &UPoly) -> &LaurentPoly {
    p.last().expect("leading coefficient of zero polynomial")
}

/// Does `p` mention `var` with more than one distinct exponent (or any
/// nonzero exponent)?
fn varies_in(p: &LaurentPoly, var: Var) -> bool {
    let mut seen: Option<i64> = None;
    for (&(ex, ey, eq), _) in p.terms() {
        let e = match var {
            Var::X => ex,
            Var::Y => ey,
            Var::Q => eq,
        };
        match seen {
            None => seen = Some(e),
            Some(s) if s != e => return true,
            _ => {}
        }
    }
    matches!(seen, Some(s) if s != 0)
}

/// Split `p` into a dense univariate polynomial in `var`. For `Var::Q` the
/// exponent grid is `1/q_denom`, which must be a multiple of `p`'s own
/// denominator. Exponents along `var` must be nonnegative (true polynomials).
fn split_by(p: &LaurentPoly, var: Var, q_denom: i64) -> UPoly {
    let scale = match var {
        Var::Q => {
            debug_assert_eq!(q_denom % p.denom(), 0);
            q_denom / p.denom()
        }
        _ => 1,
    };
    let mut parts: Vec<LaurentPoly> = Vec::new();
    for (&(ex, ey, eq), c) in p.terms() {
        let (e, rest) = match var {
            Var::X => (ex, Monomial { coeff: c.clone(), x_exp: 0, y_exp: ey, q_num: eq, q_den: p.denom() }),
            Var::Y => (ey, Monomial { coeff: c.clone(), x_exp: ex, y_exp: 0, q_num: eq, q_den: p.denom() }),
            Var::Q => (eq * scale, Monomial { coeff: c.clone(), x_exp: ex, y_exp: ey, q_num: 0, q_den: 1 }),
        };
        debug_assert!(e >= 0, "split_by requires nonnegative exponents in the main variable");
        let e = e as usize;
        if parts.len() <= e {
            parts.resize_with(e + 1, LaurentPoly::zero);
        }
        parts[e] = parts[e].add(&LaurentPoly::from(rest));
    }
    trim(&mut parts);
    parts
}

/// Reassemble a univariate view into a [`LaurentPoly`].
fn assemble(parts: &UPoly, var: Var, q_denom: i64) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for (e, c) in parts.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let m = match var {
            Var::X => Monomial::new(1, e as i64, 0, 0),
            Var::Y => Monomial::new(1, 0, e as i64, 0),
            Var::Q => Monomial { coeff: BigInt::one(), x_exp: 0, y_exp: 0, q_num: e as i64, q_den: q_denom },
        };
        out = out.add(&c.mul_monomial(&m));
    }
    out
}

fn upoly_mul_coeff(p: &UPoly, c: &LaurentPoly) -> UPoly {
    let mut out: UPoly = p.iter().map(|a| a.mul(c)).collect();
    trim(&mut out);
    out
}

fn upoly_sub(a: &UPoly, b: &UPoly) -> UPoly {
    let mut out = a.clone();
    if out.len() < b.len() {
        out.resize_with(b.len(), LaurentPoly::zero);
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = out[i].sub(c);
    }
    trim(&mut out);
    out
}

/// `b * main^shift * c`.
fn upoly_shift_mul(b: &UPoly, shift: usize, c: &LaurentPoly) -> UPoly {
    let mut out: UPoly = vec![LaurentPoly::zero(); shift];
    out.extend(b.iter().map(|a| a.mul(c)));
    trim(&mut out);
    out
}

/// Pseudo-remainder `prem(a, b) = lc(b)^(deg a - deg b + 1) * a  mod  b`.
fn pseudo_rem(a: &UPoly, b: &UPoly) -> UPoly {
    let db = deg(b).expect("pseudo_rem by zero");
    let da = match deg(a) {
        None => return Vec::new(),
        Some(d) => d,
    };
    debug_assert!(da >= db);
    let lb = lc(b).clone();
    let mut r = a.clone();
    let mut steps = (da - db + 1) as i64;
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let lr = lc(&r).clone();
        r = upoly_sub(&upoly_mul_coeff(&r, &lb), &upoly_shift_mul(b, dr - db, &lr));
        steps -= 1;
    }
    for _ in 0..steps {
        r = upoly_mul_coeff(&r, &lb);
    }
    r
}

/// Divide every coefficient exactly by `d`.
fn upoly_div_coeff(p: &UPoly, d: &LaurentPoly) -> Result<UPoly> {
    p.iter().map(|c| exact_div(c, d)).collect()
}

/// gcd of a list of polynomials (zero entries skipped).
fn gcd_list(list: &[LaurentPoly]) -> LaurentPoly {
    let mut g = LaurentPoly::zero();
    for p in list {
        if p.is_zero() {
            continue;
        }
        g = if g.is_zero() { normalize_unit(p) } else { poly_gcd(&g, p) };
        if g.is_one() {
            break;
        }
    }
    g
}

/// Strip unit monomial factors and fix the sign: `p = unit * result` with the
/// result anchored at exponent zero and positive leading coefficient. The
/// integer content is kept.
fn normalize_unit(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return LaurentPoly::zero();
    }
    let (content, prim) = p.extract_content();
    prim.mul_bigint(&content.coeff.abs())
}

/// Recursive gcd of two true polynomials (no negative exponents; integer
/// contents arbitrary).
fn gcd_rec(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize_unit(b);
    }
    if b.is_zero() {
        return normalize_unit(a);
    }
    // Find the first variable either argument varies in.
    let var = [Var::X, Var::Y, Var::Q]
        .into_iter()
        .find(|&v| varies_in(a, v) || varies_in(b, v));
    let var = match var {
        None => {
            // Both are constants.
            return LaurentPoly::constant(a.constant_term().gcd(&b.constant_term()));
        }
        Some(v) => v,
    };
    let q_denom = a.denom().lcm(&b.denom());
    let ua = split_by(a, var, q_denom);
    let ub = split_by(b, var, q_denom);
    let cont_a = gcd_list(&ua);
    let cont_b = gcd_list(&ub);
    let cont = gcd_rec(&cont_a, &cont_b);
    let pa = upoly_div_coeff(&ua, &cont_a).expect("content division is exact");
    let pb = upoly_div_coeff(&ub, &cont_b).expect("content division is exact");

    let (mut big, mut small) = if deg(&pa) >= deg(&pb) { (pa, pb) } else { (pb, pa) };
    let mut g = LaurentPoly::one();
    let mut h = LaurentPoly::one();
    let result = loop {
        let da = deg(&big).unwrap();
        let db = match deg(&small) {
            None => break big,
            Some(d) => d,
        };
        if db == 0 {
            // Nonzero constant in the main variable: primitive parts coprime.
            break vec![LaurentPoly::one()];
        }
        let d = (da - db) as u32;
        let r = pseudo_rem(&big, &small);
        let divisor = g.mul(&h.pow(d));
        big = small;
        small = if r.is_empty() {
            Vec::new()
        } else {
            upoly_div_coeff(&r, &divisor).expect("subresultant division is exact")
        };
        g = lc(&big).clone();
        // h = h^(1-d) * g^d
        h = if d == 0 {
            h
        } else {
            exact_div(&g.pow(d), &h.pow(d - 1)).expect("subresultant h-update is exact")
        };
    };
    // Primitive part of the result, times the content gcd.
    let res_cont = gcd_list(&result);
    let prim = upoly_div_coeff(&result, &res_cont).expect("content division is exact");
    let out = assemble(&prim, var, q_denom).mul(&cont);
    normalize_unit(&out)
}

/// Gcd in the Laurent ring, canonical up to nothing: anchored at exponent
/// zero, positive leading coefficient (in the canonical term order), integer
/// part equal to the gcd of the integer contents. `poly_gcd(0, 0) = 0`.
pub fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize_unit(b);
    }
    if b.is_zero() {
        return normalize_unit(a);
    }
    let (ca, pa) = a.extract_content();
    let (cb, pb) = b.extract_content();
    let g0 = ca.coeff.abs().gcd(&cb.coeff.abs());
    let core = gcd_rec(&pa, &pb);
    // core is primitive; attach the integer gcd.
    core.mul_bigint(&g0)
}

/// Exact division `a / b`; fails with [`Error::InexactDivision`] when `b`
/// does not divide `a`. Works over the full Laurent ring.
pub fn exact_div(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if a.is_zero() {
        return Ok(LaurentPoly::zero());
    }
    if let Some(m) = b.as_monomial() {
        return a.div_monomial(&m);
    }
    let (ca, pa) = a.extract_content();
    let (cb, pb) = b.extract_content();
    // Integer parts must divide (Gauss); exponent parts are units.
    let (qi, ri) = ca.coeff.div_rem(&cb.coeff);
    if !ri.is_zero() {
        return Err(Error::InexactDivision);
    }
    let var = [Var::X, Var::Y, Var::Q]
        .into_iter()
        .find(|&v| varies_in(&pb, v))
        .expect("non-monomial polynomial varies in some variable");
    let q_denom = pa.denom().lcm(&pb.denom());
    let ua = split_by(&pa, var, q_denom);
    let ub = split_by(&pb, var, q_denom);
    let db = deg(&ub).unwrap();
    let mut rem = ua;
    let mut quot: UPoly = Vec::new();
    while let Some(dr) = deg(&rem) {
        if dr < db {
            break;
        }
        let t = exact_div(lc(&rem), lc(&ub))?;
        if quot.len() <= dr - db {
            quot.resize_with(dr - db + 1, LaurentPoly::zero);
        }
        quot[dr - db] = t.clone();
        rem = upoly_sub(&rem, &upoly_shift_mul(&ub, dr - db, &t));
    }
    if !rem.is_empty() {
        return Err(Error::InexactDivision);
    }
    let content = Monomial {
        coeff: qi,
        x_exp: ca.x_exp - cb.x_exp,
        y_exp: ca.y_exp - cb.y_exp,
        q_num: ca.q_num * cb.q_den - cb.q_num * ca.q_den,
        q_den: ca.q_den * cb.q_den,
    };
    Ok(assemble(&quot, var, q_denom).mul_monomial(&content))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::LaurentPoly as P;

    fn xq(c: i64, x: i64, q: i64) -> P {
        P::xq(c, x, q)
    }

    #[test]
    fn exact_div_recovers_factor() {
        // (x + q)(x - q) / (x + q) = x - q
        let a = xq(1, 1, 0).add(&xq(1, 0, 1));
        let b = xq(1, 1, 0).sub(&xq(1, 0, 1));
        let prod = a.mul(&b);
        assert_eq!(exact_div(&prod, &a).unwrap(), b);
        assert_eq!(exact_div(&prod, &b).unwrap(), a);
    }

    #[test]
    fn exact_div_detects_remainder() {
        let a = xq(1, 2, 0).add(&xq(1, 0, 0)); // x^2 + 1
        let b = xq(1, 1, 0).add(&xq(1, 0, 1)); // x + q
        assert!(matches!(exact_div(&a, &b), Err(Error::InexactDivision)));
    }

    #[test]
    fn exact_div_handles_laurent_units() {
        // (q^-2 * (x + 1)) / (q^-1) = q^-1 * (x + 1)
        let a = xq(1, 1, -2).add(&xq(1, 0, -2));
        let b = xq(1, 0, -1);
        let q = exact_div(&a, &b).unwrap();
        assert_eq!(q, xq(1, 1, -1).add(&xq(1, 0, -1)));
    }

    #[test]
    fn gcd_of_products_with_common_factor() {
        let g = xq(1, 1, 0).add(&xq(1, 0, 1)); // x + q
        let a = g.mul(&xq(1, 1, 0).sub(&xq(1, 0, 0)));
        let b = g.mul(&xq(1, 0, 2).add(&xq(1, 0, 0)));
        let got = poly_gcd(&a, &b);
        assert_eq!(got, g);
    }

    #[test]
    fn gcd_includes_integer_content_but_not_units() {
        // gcd(6x, 4x^2) = 2 (x is a unit in the Laurent ring)
        let a = xq(6, 1, 0);
        let b = xq(4, 2, 0);
        assert_eq!(poly_gcd(&a, &b), P::int(2));
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = xq(1, 1, 0).add(&xq(1, 0, 0)); // x + 1
        let b = xq(1, 1, 0).sub(&xq(1, 0, 0)); // x - 1
        assert_eq!(poly_gcd(&a, &b), P::one());
    }

    #[test]
    fn gcd_handles_three_variables() {
        // common factor mixing x, y, q
        let g = P::from_terms(&[(1, 1, 1, 0), (1, 0, 0, 1)]); // x*y + q
        let a = g.mul(&P::from_terms(&[(1, 1, 0, 0), (2, 0, 0, 0)]));
        let b = g.mul(&P::from_terms(&[(1, 0, 1, 2), (-1, 0, 0, 0)]));
        assert_eq!(poly_gcd(&a, &b), g);
    }

    #[test]
    fn gcd_with_fractional_exponents() {
        use crate::exactalg::poly::Monomial;
        // common factor q^(1/2) + 1 on the half-integer grid
        let g = P::from(Monomial::q_pow_frac(1, 2)).add(&P::one());
        let a = g.mul(&P::from(Monomial::q_pow_frac(1, 2)).sub(&P::one()));
        let b = g.mul(&g);
        assert_eq!(poly_gcd(&a, &b), g);
    }

    #[test]
    fn pseudo_division_sign_conventions() {
        // gcd of a poly with its negation is the (positive) poly itself
        let a = xq(-1, 1, 0).add(&xq(-1, 0, 0)); // -(x + 1)
        let got = poly_gcd(&a, &a.neg());
        assert_eq!(got, xq(1, 1, 0).add(&xq(1, 0, 0)));
    }
}
