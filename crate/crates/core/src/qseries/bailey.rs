//! Bailey pairs and the Jacobi-triple-product finale, as truncation checks.
//!
//! A Bailey pair relative to `a` is a pair of sequences with
//! `beta_n = sum_{r=0..n} alpha_r / ((q;q)_{n-r} (aq;q)_{n+r})`. The two
//! built-in pairs live on the half-integer exponent grid:
//!
//! * `F(1)`, relative to `a = 1`: `alpha_0 = 1`,
//!   `alpha_n = q^(n^2)(q^(-n/2) + q^(n/2))`,
//!   `beta_n = 1/((q;q)_n (q^(1/2);q)_n)`;
//! * `F(2)`, relative to `a = q`:
//!   `alpha_n = q^(n^2 + n/2) (1 + q^(n + 1/2)) / (1 + q^(1/2))`,
//!   `beta_n = 1/((q;q)_n (q^(3/2);q)_n)`.
//!
//! [`jtp_check`] verifies
//! `(1/(q^4;q^4)_inf) * sum_{n in Z} q^((k+1)n^2 + n)` against its triple
//! product closed form `(-q^k, -q^(k+2), q^(2k+2); q^(2k+2))_inf / (q^4;q^4)_inf`.

use crate::error::{Error, Result};
use crate::exactalg::{LaurentPoly, Monomial};

use super::products::{bilateral_sum, pochhammer};
use super::series::TruncatedSeries;

type SeqGen = Box<dyn Fn(u64, i64) -> Result<TruncatedSeries> + Send + Sync>;

/// A Bailey pair given by closed-form term generators `(n, order) -> series`.
pub struct BaileyPair {
    pub label: String,
    /// The pair's parameter `a` (a monomial, e.g. 1 or q).
    pub a: Monomial,
    alpha: SeqGen,
    beta: SeqGen,
}

impl BaileyPair {
    pub fn new(label: impl Into<String>, a: Monomial, alpha: SeqGen, beta: SeqGen) -> Self {
        Self { label: label.into(), a, alpha, beta }
    }

    pub fn alpha(&self, n: u64, order: i64) -> Result<TruncatedSeries> {
        (self.alpha)(n, order)
    }

    pub fn beta(&self, n: u64, order: i64) -> Result<TruncatedSeries> {
        (self.beta)(n, order)
    }
}

fn q() -> Monomial {
    Monomial::q_pow_int(1, 1)
}

/// `1 / ((q;q)_n (c;q)_n)` truncated below `q^order`.
fn reciprocal_double_pochhammer(c: &Monomial, n: u64, order: i64) -> Result<TruncatedSeries> {
    let p = pochhammer(&q(), &q(), Some(n), order)?
        .mul(&pochhammer(c, &q(), Some(n), order)?);
    p.truncate_to(order).invert()
}

/// Slater's pair F(1), relative to `a = 1`.
pub fn slater_f1() -> BaileyPair {
    let alpha: SeqGen = Box::new(|n, _order| {
        if n == 0 {
            return Ok(TruncatedSeries::exact_one());
        }
        let n = n as i64;
        // q^(n^2 - n/2) + q^(n^2 + n/2) on the half-integer grid
        let lo = LaurentPoly::from(Monomial::q_pow_frac(2 * n * n - n, 2));
        let hi = LaurentPoly::from(Monomial::q_pow_frac(2 * n * n + n, 2));
        Ok(TruncatedSeries::exact(&lo.add(&hi)))
    });
    let beta: SeqGen =
        Box::new(|n, order| reciprocal_double_pochhammer(&Monomial::q_pow_frac(1, 2), n, order));
    BaileyPair::new("F(1)", Monomial::one(), alpha, beta)
}

/// Slater's pair F(2), relative to `a = q`.
pub fn slater_f2() -> BaileyPair {
    let alpha: SeqGen = Box::new(|n, order| {
        if n == 0 {
            return Ok(TruncatedSeries::exact_one());
        }
        let n = n as i64;
        // q^(n^2 + n/2) (1 + q^(n + 1/2)) / (1 + q^(1/2))
        let num = LaurentPoly::from(Monomial::q_pow_frac(2 * n * n + n, 2))
            .add(&LaurentPoly::from(Monomial::q_pow_frac(2 * n * n + 3 * n + 1, 2)));
        let den = LaurentPoly::one().add(&LaurentPoly::from(Monomial::q_pow_frac(1, 2)));
        let den_inv = TruncatedSeries::exact(&den).truncate_to(order).invert()?;
        Ok(den_inv.mul(&TruncatedSeries::exact(&num)))
    });
    let beta: SeqGen =
        Box::new(|n, order| reciprocal_double_pochhammer(&Monomial::q_pow_frac(3, 2), n, order));
    BaileyPair::new("F(2)", q(), alpha, beta)
}

/// Outcome of a family of truncated checks: how many instances ran and the
/// first failure, if any.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub label: String,
    pub order: i64,
    pub instances: u64,
    pub first_failure: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Verify the defining relation
/// `beta_n = sum_{r=0..n} alpha_r / ((q;q)_{n-r} (aq;q)_{n+r})`
/// as a truncated-series identity for every `n <= max_n`.
pub fn bailey_pair_check(pair: &BaileyPair, max_n: u64, order: i64) -> Result<CheckReport> {
    let aq = pair.a.mul(&q());
    let mut report = CheckReport {
        label: pair.label.clone(),
        order,
        instances: 0,
        first_failure: None,
    };
    for n in 0..=max_n {
        let lhs = pair.beta(n, order)?;
        let mut rhs = TruncatedSeries::zero(1, order);
        for r in 0..=n {
            let d1 = pochhammer(&q(), &q(), Some(n - r), order)?;
            let d2 = pochhammer(&aq, &q(), Some(n + r), order)?;
            let inv = d1.mul(&d2).truncate_to(order).invert()?;
            rhs = rhs.add(&pair.alpha(r, order)?.mul(&inv));
        }
        report.instances += 1;
        if let Some((num, den)) = lhs.first_mismatch(&rhs) {
            report.first_failure = Some(format!(
                "n = {n}: sides differ at q^({num}/{den})"
            ));
            break;
        }
    }
    Ok(report)
}

/// Verify `(1/(q^4;q^4)_inf) * sum_{n in Z} q^((k+1)n^2 + n)` against
/// `(-q^k, -q^(k+2), q^(2k+2); q^(2k+2))_inf / (q^4;q^4)_inf` below `q^order`.
pub fn jtp_check(k: i64, order: i64) -> Result<CheckReport> {
    if k < 1 {
        return Err(Error::Precondition(format!("triple-product parameter k = {k} must be >= 1")));
    }
    let euler4_inv = pochhammer(&Monomial::q_pow_int(1, 4), &Monomial::q_pow_int(1, 4), None, order)?
        .truncate_to(order)
        .invert()?;
    let lhs = bilateral_sum(k + 1, 1, 1, order)?.mul(&euler4_inv);
    let base = Monomial::q_pow_int(1, 2 * k + 2);
    let rhs = pochhammer(&Monomial::q_pow_int(-1, k), &base, None, order)?
        .mul(&pochhammer(&Monomial::q_pow_int(-1, k + 2), &base, None, order)?)
        .mul(&pochhammer(&base, &base, None, order)?)
        .mul(&euler4_inv);
    let mut report = CheckReport {
        label: format!("triple product k = {k}"),
        order,
        instances: 1,
        first_failure: None,
    };
    if let Some((num, den)) = lhs.first_mismatch(&rhs) {
        report.first_failure = Some(format!("sides differ at q^({num}/{den})"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_base_case_beta_equals_alpha() {
        let pair = slater_f1();
        let a0 = pair.alpha(0, 10).unwrap();
        let b0 = pair.beta(0, 10).unwrap();
        assert_eq!(a0.first_mismatch(&b0), None);
        assert!(a0.coeff_int(0).unwrap().is_one());
    }

    #[test]
    fn f1_defining_relation_small() {
        let report = bailey_pair_check(&slater_f1(), 6, 30).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure);
        assert_eq!(report.instances, 7);
    }

    #[test]
    fn f2_defining_relation_small() {
        let report = bailey_pair_check(&slater_f2(), 6, 30).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure);
    }

    #[test]
    fn perturbed_pair_fails_at_the_perturbed_index() {
        // F(1) with alpha_1 doubled must fail at n = 1.
        let base = slater_f1();
        let alpha: SeqGen = Box::new(move |n, order| {
            let a = slater_f1().alpha(n, order)?;
            Ok(if n == 1 { a.mul_int(2) } else { a })
        });
        let beta: SeqGen = Box::new(|n, order| slater_f1().beta(n, order));
        let pair = BaileyPair::new("F(1) perturbed", base.a.clone(), alpha, beta);
        let report = bailey_pair_check(&pair, 6, 30).unwrap();
        assert!(!report.passed());
        assert!(report.first_failure.as_deref().unwrap().starts_with("n = 1"));
    }

    #[test]
    fn triple_product_small_orders() {
        for k in 1..=3 {
            let report = jtp_check(k, 40).unwrap();
            assert!(report.passed(), "k = {k}: {:?}", report.first_failure);
        }
    }

    #[test]
    fn triple_product_rejects_bad_parameter() {
        assert!(jtp_check(0, 10).is_err());
    }
}
