//! Rational functions `num/den` over the Laurent polynomial ring, kept in a
//! normal form: numerator and denominator coprime, the denominator anchored
//! at exponent zero with positive leading coefficient. Monomials are units,
//! so exponent factors of the denominator migrate into the numerator.

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};

use super::gcd::{exact_div, poly_gcd};
use super::poly::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    /// Build `num/den`, normalising. Fails on a zero denominator.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self { num, den: LaurentPoly::one() });
        }
        let g = poly_gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                exact_div(&num, &g).expect("gcd divides numerator"),
                exact_div(&den, &g).expect("gcd divides denominator"),
            )
        };
        // Move the denominator's unit monomial (exponents only) into the
        // numerator, keep its integer content where it is.
        let mut unit = den.monomial_content();
        unit.coeff = One::one();
        if !unit.is_one() {
            den = den.div_monomial(&unit).expect("own monomial content divides");
            num = num.mul_monomial(&unit.inverse()?);
        }
        // Positive leading coefficient on the denominator.
        let (c, _) = den.extract_content();
        if c.coeff.sign() == num_bigint::Sign::Minus {
            num = num.neg();
            den = den.neg();
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self { num: p, den: LaurentPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Polynomial content, if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("denominator product is nonzero")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.num);
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("denominator product is nonzero")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }
}

impl From<LaurentPoly> for RationalFunction {
    fn from(p: LaurentPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.num_terms() > 1 {
            write!(f, "({})/({})", self.num, self.den)
        } else {
            write!(f, "{}/({})", self.num, self.den)
        }
    }
}
