//! Deterministic textual reports for truncated series.
//!
//! A series report has one line per q-exponent in ascending order,
//! `q^e : <coefficient polynomial in x, y>`, followed by a digest line
//! carrying the truncation order, the valuation, and a content hash so
//! regression tests can pin a whole expansion with a single string.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::qseries::TruncatedSeries;

/// Format a (possibly fractional, possibly negative) q-exponent the same
/// way polynomial display does: `5`, `(-2)`, `(3/4)`.
fn format_exponent(num: i64, den: i64) -> String {
    if den == 1 {
        if num < 0 {
            format!("({num})")
        } else {
            format!("{num}")
        }
    } else {
        format!("({num}/{den})")
    }
}

fn reduced(scaled: i64, denom: i64) -> (i64, i64) {
    let g = num_integer::gcd(scaled.abs(), denom).max(1);
    (scaled / g, denom / g)
}

/// The coefficient lines of a report, without the digest.
pub fn series_lines(series: &TruncatedSeries) -> String {
    let denom = series.denom();
    let mut out = String::new();
    for (scaled, coeff) in series.terms() {
        let (num, den) = reduced(scaled, denom);
        let _ = writeln!(out, "q^{} : {coeff}", format_exponent(num, den));
    }
    out
}

/// Hex SHA-256 of the coefficient lines, truncated to 16 characters.
pub fn series_digest(series: &TruncatedSeries) -> String {
    let hash = Sha256::digest(series_lines(series).as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in hash.iter().take(8) {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

/// Full report: coefficient lines plus a trailing digest line of the form
/// `# order <order>; valuation <v>; digest <hash>`.
pub fn series_report(series: &TruncatedSeries) -> String {
    let mut out = series_lines(series);
    let order = match series.order_scaled() {
        None => "exact".to_string(),
        Some(scaled) => {
            let (num, den) = reduced(scaled, series.denom());
            format!("q^{}", format_exponent(num, den))
        }
    };
    let valuation = match series.valuation() {
        None => "none".to_string(),
        Some((num, den)) => format!("q^{}", format_exponent(num, den)),
    };
    let _ = writeln!(
        out,
        "# order {order}; valuation {valuation}; digest {}",
        series_digest(series)
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::pochhammer;
    use crate::LaurentPoly;

    #[test]
    fn report_lists_exponents_ascending() {
        // 1/(q;q)_inf through q^5: partition numbers 1,1,2,3,5,7
        let q = crate::Monomial::q_pow_int(1, 1);
        let series = pochhammer(&q, &q, None, 6).unwrap().invert().unwrap();
        let report = series_report(&series);
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(
            lines[..6],
            [
                "q^0 : 1",
                "q^1 : 1",
                "q^2 : 2",
                "q^3 : 3",
                "q^4 : 5",
                "q^5 : 7"
            ]
        );
        assert!(lines[6].starts_with("# order q^6; valuation q^0; digest "));
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn report_handles_fractional_and_negative_exponents() {
        let half = TruncatedSeries::exact(&LaurentPoly::one())
            .mul_monomial(&crate::Monomial::q_pow_frac(1, 2));
        let shifted = half.add(&TruncatedSeries::exact(&LaurentPoly::from_terms(&[(
            3, 1, 0, -2,
        )])));
        let report = series_report(&shifted);
        assert!(report.contains("q^(-2) : 3*x\n"));
        assert!(report.contains("q^(1/2) : 1\n"));
        assert!(report.contains("# order exact;"));
    }

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        let a = TruncatedSeries::exact(&LaurentPoly::from_terms(&[(1, 0, 0, 0), (2, 0, 0, 3)]));
        let b = TruncatedSeries::exact(&LaurentPoly::from_terms(&[(1, 0, 0, 0), (3, 0, 0, 3)]));
        assert_eq!(series_digest(&a), series_digest(&a));
        assert_ne!(series_digest(&a), series_digest(&b));
        assert_eq!(series_digest(&a).len(), 16);
        assert!(series_digest(&a).chars().all(|c| c.is_ascii_hexdigit()));
    }

    #[test]
    fn zero_series_report_is_just_the_digest_line() {
        let report = series_report(&TruncatedSeries::zero(1, 4));
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].starts_with("# order q^4; valuation none; digest "));
    }
}
