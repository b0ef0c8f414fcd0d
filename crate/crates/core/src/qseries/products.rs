//! The classical q-product toolkit: Pochhammer symbols
//! `(a;b)_n = prod_{0<=t<n} (1 - a b^t)`, theta functions
//! `theta(a;b) = (a;b)_inf (b/a;b)_inf`, congruence (residue-class)
//! products, bilateral theta sums, and a small product-expression type
//! ([`ProductSpec`]) used by the identity catalog.
//!
//! Infinite products are truncated exactly: factors are multiplied in until
//! the remaining ones can no longer touch any certified coefficient. Factors
//! with nonpositive q-valuation are fine as long as the base has positive
//! valuation (only finitely many such factors exist), which is what makes
//! theta quasi-periodicity testable.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactalg::{LaurentPoly, Monomial};

use super::series::TruncatedSeries;

fn scaled_q_valuation(m: &Monomial, denom: i64) -> i64 {
    debug_assert_eq!(denom % m.q_den, 0);
    m.q_num * (denom / m.q_den)
}

/// `(a; base)_n`, exact for finite `n`; for `n = None` (infinite) the result
/// is truncated strictly below `q^order` (integer exponent units).
pub fn pochhammer(
    a: &Monomial,
    base: &Monomial,
    n: Option<u64>,
    order: i64,
) -> Result<TruncatedSeries> {
    let denom = num_integer::lcm(a.q_den, base.q_den);
    if let Some(n) = n {
        let mut p = TruncatedSeries::exact_one();
        for t in 0..n {
            let f = a.mul(&base.pow(t as i64)?);
            let factor = LaurentPoly::one().sub(&LaurentPoly::from(f));
            p = p.mul(&TruncatedSeries::exact(&factor));
        }
        return Ok(p);
    }
    if !base.q_positive() {
        return Err(Error::DivergentProduct(format!(
            "infinite Pochhammer product needs a base with positive q-valuation, got base {}",
            LaurentPoly::from(base.clone())
        )));
    }
    let va = scaled_q_valuation(a, denom);
    let vb = scaled_q_valuation(base, denom);
    // Total negative valuation contributed by the finitely many factors with
    // q-valuation below zero; the working order carries that as headroom
    // (rounded up to whole q-exponents).
    let mut neg_total = 0i64;
    let mut t = 0i64;
    while va + t * vb < 0 {
        neg_total += -(va + t * vb);
        t += 1;
    }
    let work_int = order + (neg_total + denom - 1) / denom;
    let mut p = TruncatedSeries::exact_one().truncate_to(work_int);
    if denom > 1 {
        // Put the accumulator on the common grid up front.
        let grid = Monomial { coeff: BigInt::one(), x_exp: 0, y_exp: 0, q_num: 0, q_den: denom };
        p = p.mul_monomial(&grid);
    }
    let work_order = work_int.saturating_mul(denom);
    let mut val_p = 0i64;
    let mut t = 0i64;
    loop {
        let vt = va + t * vb;
        if vt + val_p >= work_order {
            break;
        }
        let f = a.mul(&base.pow(t)?);
        let factor = LaurentPoly::one().sub(&LaurentPoly::from(f));
        if factor.is_zero() {
            // A factor (1 - 1): the whole product is exactly zero.
            return Ok(TruncatedSeries::exact_zero());
        }
        p = p.mul(&TruncatedSeries::exact(&factor));
        val_p += vt.min(0);
        t += 1;
    }
    Ok(p.truncate_to(order))
}

/// `theta(a; base) = (a; base)_inf * (base/a; base)_inf`, truncated below
/// `q^order`. Requires positive q-valuation for `a` and `base` and unit
/// (+-1) coefficients. Values of `a` at or above the base valuation are
/// legal; they produce finitely many negative-valuation factors in the
/// second half, so quasi-periodicity can be exercised directly.
pub fn theta(a: &Monomial, base: &Monomial, order: i64) -> Result<TruncatedSeries> {
    let unit = |c: &BigInt| c == &BigInt::one() || c == &(-BigInt::one());
    if !unit(&a.coeff) || !unit(&base.coeff) {
        return Err(Error::Precondition(format!(
            "theta arguments need unit coefficients, got {} and {}",
            LaurentPoly::from(a.clone()),
            LaurentPoly::from(base.clone())
        )));
    }
    if !a.q_positive() {
        return Err(Error::Precondition(format!(
            "theta argument must have positive q-valuation, got {}",
            LaurentPoly::from(a.clone())
        )));
    }
    if !base.q_positive() {
        return Err(Error::DivergentProduct(format!(
            "theta base must have positive q-valuation, got {}",
            LaurentPoly::from(base.clone())
        )));
    }
    let b_over_a = base.mul(&a.inverse()?);
    let first = pochhammer(a, base, None, order)?;
    let second = pochhammer(&b_over_a, base, None, order)?;
    Ok(first.mul(&second))
}

/// `theta(a_1, ..., a_r; base)`: the product of the single-argument thetas.
pub fn multi_theta(args: &[Monomial], base: &Monomial, order: i64) -> Result<TruncatedSeries> {
    let mut p = TruncatedSeries::exact_one();
    for a in args {
        p = p.mul(&theta(a, base, order)?);
    }
    Ok(p)
}

/// Truncation of `prod_{r in residues, t >= 0} (1 - q^(r + t*modulus))^(-1)`:
/// the generating function for partitions into parts from the given residue
/// classes. Repeated residues multiply. Residues must lie in `1..modulus`.
pub fn product_from_residues(
    modulus: i64,
    residues: &[i64],
    order: i64,
) -> Result<TruncatedSeries> {
    if modulus < 1 {
        return Err(Error::Precondition(format!("modulus {modulus} must be positive")));
    }
    for &r in residues {
        if r < 1 || r >= modulus {
            return Err(Error::Precondition(format!(
                "residue {r} outside 1..{modulus}"
            )));
        }
    }
    let mut denom_product = TruncatedSeries::exact_one();
    for &r in residues {
        let p = pochhammer(&Monomial::q_pow_int(1, r), &Monomial::q_pow_int(1, modulus), None, order)?;
        denom_product = denom_product.mul(&p);
    }
    denom_product.truncate_to(order).invert()
}

/// `sum_{n in Z} q^((quad*n^2 + lin*n)/den)` truncated below `q^order`
/// (integer units). Requires `quad > 0`; enumeration by increasing `|n|`
/// stops once both directions exceed the bound past the parabola's vertex.
pub fn bilateral_sum(quad: i64, lin: i64, den: i64, order: i64) -> Result<TruncatedSeries> {
    if quad <= 0 {
        return Err(Error::Precondition(format!(
            "bilateral sum needs a positive quadratic coefficient, got {quad}"
        )));
    }
    if den < 1 {
        return Err(Error::Precondition(format!("exponent denominator {den} must be positive")));
    }
    let order_scaled = order.saturating_mul(den);
    let mut total = TruncatedSeries::zero(den, order);
    let vertex = lin.abs() / (2 * quad) + 1;
    let mut n = 0i64;
    loop {
        let candidates = if n == 0 { vec![0] } else { vec![n, -n] };
        let mut hit = false;
        for s in candidates {
            let e = quad * s * s + lin * s;
            if e < order_scaled {
                hit = true;
                let m = Monomial { coeff: BigInt::one(), x_exp: 0, y_exp: 0, q_num: e, q_den: den };
                total = total.add(&TruncatedSeries::exact(&LaurentPoly::from(m)));
            }
        }
        if !hit && n >= vertex {
            break;
        }
        n += 1;
    }
    Ok(total)
}

/// One factor `(arg; base)_count ^ exponent` of a product expression.
#[derive(Debug, Clone)]
pub struct ProductFactor {
    pub arg: Monomial,
    pub base: Monomial,
    /// `None` means the infinite product.
    pub count: Option<u64>,
    /// Signed power; negative factors divide.
    pub exponent: i64,
}

/// A product of Pochhammer factors, e.g. the product side of an identity.
#[derive(Debug, Clone, Default)]
pub struct ProductSpec {
    pub factors: Vec<ProductFactor>,
}

impl ProductSpec {
    /// `prod_r (q^r; q^modulus)_inf^(-1)` over the residue list.
    pub fn reciprocal_residues(modulus: i64, residues: &[i64]) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::Precondition(format!("modulus {modulus} must be positive")));
        }
        let mut factors = Vec::new();
        for &r in residues {
            if r < 1 || r >= modulus {
                return Err(Error::Precondition(format!("residue {r} outside 1..{modulus}")));
            }
            factors.push(ProductFactor {
                arg: Monomial::q_pow_int(1, r),
                base: Monomial::q_pow_int(1, modulus),
                count: None,
                exponent: -1,
            });
        }
        Ok(Self { factors })
    }

    /// Evaluate the product, truncated below `q^order`.
    pub fn evaluate(&self, order: i64) -> Result<TruncatedSeries> {
        let mut num = TruncatedSeries::exact_one();
        let mut den = TruncatedSeries::exact_one();
        for f in &self.factors {
            if f.exponent == 0 {
                continue;
            }
            let p = pochhammer(&f.arg, &f.base, f.count, order)?;
            let target = if f.exponent > 0 { &mut num } else { &mut den };
            for _ in 0..f.exponent.unsigned_abs() {
                *target = target.mul(&p);
            }
        }
        if den.is_exact() && den.as_poly().map(|p| p.is_one()).unwrap_or(false) {
            return Ok(num);
        }
        Ok(num.mul(&den.truncate_to(order).invert()?))
    }
}

impl fmt::Display for ProductFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}; {})_{}",
            LaurentPoly::from(self.arg.clone()),
            LaurentPoly::from(self.base.clone()),
            match self.count {
                None => "inf".to_string(),
                Some(n) => n.to_string(),
            }
        )?;
        if self.exponent != 1 {
            write!(f, "^{}", self.exponent)?;
        }
        Ok(())
    }
}

impl fmt::Display for ProductSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Var;

    fn q() -> Monomial {
        Monomial::q_pow_int(1, 1)
    }

    fn qp(e: i64) -> Monomial {
        Monomial::q_pow_int(1, e)
    }

    fn coeffs_of(s: &TruncatedSeries, upto: i64) -> Vec<i64> {
        (0..upto)
            .map(|e| {
                let c = s.coeff_int(e).expect("within order");
                if c.is_zero() {
                    0
                } else {
                    let m = c.as_monomial().expect("constant coefficient");
                    assert_eq!((m.x_exp, m.y_exp), (0, 0));
                    i64::try_from(&m.coeff).unwrap()
                }
            })
            .collect()
    }

    #[test]
    fn finite_pochhammer_two_factors() {
        // (q; q)_2 = (1-q)(1-q^2) = 1 - q - q^2 + q^3
        let p = pochhammer(&q(), &q(), Some(2), 10).unwrap();
        let expect = LaurentPoly::from_terms(&[(1, 0, 0, 0), (-1, 0, 0, 1), (-1, 0, 0, 2), (1, 0, 0, 3)]);
        assert_eq!(p.as_poly().unwrap(), expect);
    }

    #[test]
    fn empty_pochhammer_is_one() {
        let p = pochhammer(&Monomial::new(3, 1, 0, 2), &q(), Some(0), 5).unwrap();
        assert!(p.as_poly().unwrap().is_one());
    }

    #[test]
    fn euler_product_matches_pentagonal_numbers() {
        // (q; q)_inf = sum_k (-1)^k q^(k(3k-1)/2), both directions of k
        let p = pochhammer(&q(), &q(), None, 30).unwrap();
        let mut expect = TruncatedSeries::zero(1, 30);
        let mut k = 0i64;
        loop {
            let mut touched = false;
            for s in [k, -k] {
                let e = s * (3 * s - 1) / 2;
                if e < 30 {
                    touched = true;
                    let sign = if s.rem_euclid(2) == 0 { 1 } else { -1 };
                    expect = expect.add(&TruncatedSeries::exact(&LaurentPoly::xq(sign, 0, e)));
                }
                if s == 0 {
                    break;
                }
            }
            if !touched && k > 0 {
                break;
            }
            k += 1;
        }
        assert_eq!(p.first_mismatch(&expect), None);
        assert_eq!(coeffs_of(&p, 8), vec![1, -1, -1, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn divergent_product_is_rejected() {
        let err = pochhammer(&q(), &Monomial::one(), None, 10);
        assert!(matches!(err, Err(Error::DivergentProduct(_))));
    }

    #[test]
    fn product_containing_a_unit_factor_vanishes() {
        // (q^-1; q)_inf contains the factor (1 - q^-1 * q) = 0
        let p = pochhammer(&Monomial::q_pow_int(1, -1), &q(), None, 10).unwrap();
        assert!(p.is_exact() && p.is_known_zero());
    }

    #[test]
    fn theta_small_expansion() {
        // theta(q; q^5) = (q;q^5)(q^4;q^5) = 1 - q - q^4 + q^5 + ...
        let t = theta(&q(), &qp(5), 6).unwrap();
        assert_eq!(coeffs_of(&t, 6), vec![1, -1, 0, 0, -1, 1]);
    }

    #[test]
    fn theta_constant_term_is_one() {
        let t = theta(&q(), &qp(5), 3).unwrap();
        assert!(t.coeff_int(0).unwrap().is_one());
    }

    #[test]
    fn multi_theta_agrees_with_product_spec() {
        let args = [qp(2), qp(3), qp(4)];
        let m = multi_theta(&args, &qp(14), 40).unwrap();
        let mut factors = Vec::new();
        for r in [2i64, 3, 4] {
            factors.push(ProductFactor { arg: qp(r), base: qp(14), count: None, exponent: 1 });
            factors.push(ProductFactor { arg: qp(14 - r), base: qp(14), count: None, exponent: 1 });
        }
        let spec = ProductSpec { factors };
        let s = spec.evaluate(40).unwrap();
        assert_eq!(m.first_mismatch(&s), None);
    }

    #[test]
    fn theta_quasi_periodicity() {
        // theta(a*b; b) = -a^(-1) * theta(a; b) with a = q^2, b = q^5
        let lhs = theta(&qp(7), &qp(5), 20).unwrap();
        let rhs = theta(&qp(2), &qp(5), 20)
            .unwrap()
            .mul_monomial(&Monomial::q_pow_int(-1, -2));
        assert_eq!(lhs.first_mismatch(&rhs), None);
    }

    #[test]
    fn theta_symmetry_under_base_reflection() {
        // theta(b/a; b) = theta(a; b)
        let lhs = theta(&qp(3), &qp(5), 25).unwrap();
        let rhs = theta(&qp(2), &qp(5), 25).unwrap();
        assert_eq!(lhs.first_mismatch(&rhs), None);
    }

    #[test]
    fn theta_rejects_nonpositive_valuation() {
        assert!(theta(&Monomial::one(), &qp(5), 5).is_err());
        assert!(theta(&Monomial::new(1, 1, 0, 0), &qp(5), 5).is_err());
    }

    #[test]
    fn rogers_ramanujan_residue_product() {
        let s = product_from_residues(5, &[1, 4], 6).unwrap();
        assert_eq!(coeffs_of(&s, 6), vec![1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn mod_fourteen_residue_product_counts_small_partitions() {
        let s = product_from_residues(14, &[2, 3, 4, 10, 11, 12], 10).unwrap();
        assert!(s.coeff_int(3).unwrap().is_one(), "only {{3}} partitions 3");
        // 4 = {4} or {2,2}
        assert_eq!(coeffs_of(&s, 5)[4], 2);
    }

    #[test]
    fn empty_residue_set_gives_one() {
        let s = product_from_residues(14, &[], 8).unwrap();
        assert!(s.agrees_with(&TruncatedSeries::exact_one()));
        assert!(s.coeff_int(5).unwrap().is_zero());
    }

    #[test]
    fn residue_products_match_brute_force_counts() {
        // partitions of n into parts congruent to 1 or 4 mod 5, n <= 15
        let order = 16;
        let s = product_from_residues(5, &[1, 4], order).unwrap();
        let parts: Vec<i64> = (1..order).filter(|p| p % 5 == 1 || p % 5 == 4).collect();
        let mut count = vec![0i64; order as usize];
        count[0] = 1;
        for &p in &parts {
            for n in p..order {
                count[n as usize] += count[(n - p) as usize];
            }
        }
        assert_eq!(coeffs_of(&s, order), count);
    }

    #[test]
    fn residue_validation() {
        assert!(product_from_residues(5, &[0], 5).is_err());
        assert!(product_from_residues(5, &[5], 5).is_err());
    }

    #[test]
    fn bilateral_sum_hits_every_lattice_point() {
        // sum q^(2n^2 + n): exponents 0, 1, 3, 10, 6, 21, 15, ...
        let s = bilateral_sum(2, 1, 1, 20).unwrap();
        let mut expect = vec![0i64; 20];
        for n in -10i64..=10 {
            let e = 2 * n * n + n;
            if (0..20).contains(&e) {
                expect[e as usize] += 1;
            }
        }
        assert_eq!(coeffs_of(&s, 20), expect);
    }

    #[test]
    fn pochhammer_with_x_argument_has_polynomial_coefficients() {
        // (x q; q)_inf: coefficient of q^2 is -x + x^2... check via recurrence
        // (xq; q)_inf = (1 - xq)(xq^2; q)_inf i.e. substitution x -> xq.
        let p = pochhammer(&Monomial::new(1, 1, 0, 1), &q(), None, 12).unwrap();
        let shifted = p.substitute_x(&Monomial::new(1, 1, 0, 1)).unwrap();
        let factor = LaurentPoly::one().sub(&LaurentPoly::xq(1, 1, 1));
        let rhs = shifted.mul(&TruncatedSeries::exact(&factor));
        assert_eq!(p.first_mismatch(&rhs), None);
        let c2 = p.coeff_int(2).unwrap();
        assert!(!c2.is_zero() && c2.set_var_one(Var::X).is_zero() == false);
    }
}
