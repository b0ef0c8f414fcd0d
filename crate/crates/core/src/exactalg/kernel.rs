//! Fraction-free linear algebra over the Laurent polynomial ring: Bareiss
//! determinants and right-kernel bases.
//!
//! Kernel vectors are produced with polynomial entries even when the natural
//! answer lives over the fraction field: for each free column the vector is
//! assembled from Cramer minors of the pivot submatrix, then stripped of
//! common (unit and integer) content. Every returned vector is verified
//! against the original matrix.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::gcd::{exact_div, poly_gcd};
use super::poly::{LaurentPoly, Monomial};
use super::ratfun::RationalFunction;

/// Determinant of a square matrix by fraction-free Gaussian elimination
/// (Bareiss). Every interior division is exact.
pub fn bareiss_det(matrix: &[Vec<LaurentPoly>]) -> Result<LaurentPoly> {
    let n = matrix.len();
    for row in matrix {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "determinant of a {}x{} block",
                n,
                row.len()
            )));
        }
    }
    if n == 0 {
        return Ok(LaurentPoly::one());
    }
    let mut m = matrix.to_vec();
    let mut sign = false;
    let mut prev = LaurentPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                None => return Ok(LaurentPoly::zero()),
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
            }
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let t = pivot.mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = exact_div(&t, &prev).expect("Bareiss division is exact");
            }
            m[i][k] = LaurentPoly::zero();
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

/// Echelon data from a fraction-free elimination pass.
struct Echelon {
    /// (row, column) of each pivot, in elimination order.
    pivots: Vec<(usize, usize)>,
    /// Columns without a pivot.
    free_cols: Vec<usize>,
}

fn echelon(matrix: &[Vec<LaurentPoly>], rows: usize, cols: usize) -> Echelon {
    let mut m = matrix.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut free_cols: Vec<usize> = Vec::new();
    let mut prev = LaurentPoly::one();
    let mut rank = 0usize;
    for c in 0..cols {
        let pivot_row = (rank..rows).find(|&r| !m[r][c].is_zero());
        let r = match pivot_row {
            None => {
                free_cols.push(c);
                continue;
            }
            Some(r) => r,
        };
        m.swap(rank, r);
        let pivot = m[rank][c].clone();
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let t = pivot.mul(&m[i][j]).sub(&m[i][c].mul(&m[rank][j]));
                m[i][j] = exact_div(&t, &prev).expect("Bareiss division is exact");
            }
            m[i][c] = LaurentPoly::zero();
        }
        prev = pivot;
        // Track which ORIGINAL row landed here: we only need the set of
        // pivot rows, so record positions in the original matrix instead.
        pivots.push((rank, c));
        rank += 1;
    }
    Echelon { pivots, free_cols }
}

/// Identify a row subset of the original matrix realising the rank: rerun the
/// column-pivot search but keep original row indices.
fn pivot_rows(matrix: &[Vec<LaurentPoly>], pivot_cols: &[usize]) -> Vec<usize> {
    let rows = matrix.len();
    let mut m = matrix.to_vec();
    let mut used: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..rows).collect();
    let mut prev = LaurentPoly::one();
    let mut rank = 0usize;
    for &c in pivot_cols {
        let r = (rank..rows)
            .find(|&r| !m[r][c].is_zero())
            .expect("pivot column has a pivot");
        m.swap(rank, r);
        order.swap(rank, r);
        used.push(order[rank]);
        let pivot = m[rank][c].clone();
        let cols = m[0].len();
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let t = pivot.mul(&m[i][j]).sub(&m[i][c].mul(&m[rank][j]));
                m[i][j] = exact_div(&t, &prev).expect("Bareiss division is exact");
            }
            m[i][c] = LaurentPoly::zero();
        }
        prev = pivot;
        rank += 1;
    }
    used
}

/// Divide a vector by the common content of its entries — the integer gcd,
/// any shared unit monomial, and the full polynomial gcd (row clearing and
/// Cramer minors introduce spurious common factors) — and orient it so the
/// first nonzero entry has positive leading coefficient.
fn strip_vector_content(v: &mut [LaurentPoly]) {
    let mut g = LaurentPoly::zero();
    for p in v.iter() {
        g = poly_gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for p in v.iter_mut() {
            *p = exact_div(p, &g).expect("vector gcd divides every entry");
        }
    }
    strip_vector_units(v);
}

/// The unit-monomial and sign part of the normalisation.
fn strip_vector_units(v: &mut [LaurentPoly]) {
    let mut int_gcd = num_bigint::BigInt::zero();
    let mut unit: Option<Monomial> = None;
    for p in v.iter() {
        if p.is_zero() {
            continue;
        }
        let c = p.monomial_content();
        int_gcd = int_gcd.gcd(&c.coeff.abs());
        unit = Some(match unit {
            None => Monomial {
                coeff: One::one(),
                x_exp: c.x_exp,
                y_exp: c.y_exp,
                q_num: c.q_num,
                q_den: c.q_den,
            },
            Some(u) => {
                // Componentwise min of exponents (q parts on a common grid).
                let den = u.q_den.lcm(&c.q_den);
                Monomial {
                    coeff: One::one(),
                    x_exp: u.x_exp.min(c.x_exp),
                    y_exp: u.y_exp.min(c.y_exp),
                    q_num: (u.q_num * (den / u.q_den)).min(c.q_num * (den / c.q_den)),
                    q_den: den,
                }
            }
        });
    }
    let (int_gcd, unit) = match unit {
        None => return,
        Some(u) => (int_gcd, u),
    };
    let mut divisor = unit;
    divisor.coeff = int_gcd;
    if !divisor.is_one() {
        for p in v.iter_mut() {
            *p = p.div_monomial(&divisor).expect("common content divides");
        }
    }
    let flip = v
        .iter()
        .find(|p| !p.is_zero())
        .map(|p| p.extract_content().0.coeff.is_negative())
        .unwrap_or(false);
    if flip {
        for p in v.iter_mut() {
            *p = p.neg();
        }
    }
}

/// Basis of the right kernel `{v : M v = 0}` of a matrix over the Laurent
/// polynomial ring, one content-stripped polynomial vector per free column.
/// Empty result means trivial kernel.
pub fn fraction_free_kernel(matrix: &[Vec<LaurentPoly>]) -> Result<Vec<Vec<LaurentPoly>>> {
    let rows = matrix.len();
    if rows == 0 {
        return Err(Error::DimensionMismatch("kernel of an empty matrix".into()));
    }
    let cols = matrix[0].len();
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix".into()));
    }
    let ech = echelon(matrix, rows, cols);
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let prows = pivot_rows(matrix, &pivot_cols);
    let r = pivot_cols.len();
    let mut basis: Vec<Vec<LaurentPoly>> = Vec::new();
    for &f in &ech.free_cols {
        // Pivot block B (r x r) and the free column restricted to pivot rows.
        let block: Vec<Vec<LaurentPoly>> = prows
            .iter()
            .map(|&i| pivot_cols.iter().map(|&j| matrix[i][j].clone()).collect())
            .collect();
        let rhs: Vec<LaurentPoly> = prows.iter().map(|&i| matrix[i][f].clone()).collect();
        let mut v = vec![LaurentPoly::zero(); cols];
        // v[f] = det(B); v[pivot_col_i] = det(B with column i replaced by -rhs).
        v[f] = bareiss_det(&block)?;
        for (i, &pc) in pivot_cols.iter().enumerate() {
            let mut bi = block.clone();
            for (row, cell) in bi.iter_mut().enumerate() {
                cell[i] = rhs[row].neg();
            }
            v[pc] = bareiss_det(&bi)?;
        }
        strip_vector_content(&mut v);
        // Verify against the full original matrix.
        for row in matrix {
            let mut acc = LaurentPoly::zero();
            for (j, p) in row.iter().enumerate() {
                if !v[j].is_zero() {
                    acc = acc.add(&p.mul(&v[j]));
                }
            }
            if !acc.is_zero() {
                return Err(Error::Precondition(
                    "kernel candidate failed verification".into(),
                ));
            }
        }
        basis.push(v);
    }
    let _ = r;
    Ok(basis)
}

/// Kernel of a matrix with rational-function entries: each row is cleared to
/// polynomials (multiplying a row by a nonzero scalar preserves the kernel),
/// then [`fraction_free_kernel`] finishes the job.
pub fn ratfun_kernel(matrix: &[Vec<RationalFunction>]) -> Result<Vec<Vec<LaurentPoly>>> {
    let cleared: Vec<Vec<LaurentPoly>> = matrix
        .iter()
        .map(|row| {
            let mut scale = LaurentPoly::one();
            for e in row {
                if !e.den().is_one() {
                    scale = scale.mul(e.den());
                }
            }
            row.iter()
                .map(|e| {
                    let full = e.num().mul(&scale);
                    exact_div(&full, e.den()).expect("row denominator divides the row scale")
                })
                .collect()
        })
        .collect();
    fraction_free_kernel(&cleared)
}
