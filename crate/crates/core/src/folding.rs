//! Cartan matrices of the simply-laced types, diagram automorphisms, and
//! orbit folding.
//!
//! Node numbering (1-based in documentation, 0-based in code):
//!
//! * `A_n`: a path `1 - 2 - ... - n`.
//! * `D_n`: a path `1 - 2 - ... - (n-2)` with both `n-1` and `n` attached to
//!   node `n-2` (the fork).
//! * `E_6`: a path `1 - 3 - 4 - 5 - 6` with node `2` attached to node `4`
//!   (Bourbaki numbering).
//!
//! Folding an automorphism `nu` of order `k` produces the `d x d` matrix
//! with entries `sum_{t=0..k-1} A(rep_i, nu^t(rep_j))`, one row per orbit —
//! equivalently `k<beta_i, beta_j>` for the averaged simple roots
//! `beta_j = (1/k) sum_t nu^t alpha_(rep_j)`. The row order follows the
//! orbit representatives handed to [`fold`]; [`catalog_folding`] pins the
//! orders that match the conventional displays (the order-3 folding of `D_4`
//! lists the fixed central node first; the order-2 folding of `E_6` lists
//! the orbits `{1,6}, {3,5}, {4}, {2}`).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CartanType {
    A,
    D,
    E,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A => write!(f, "A"),
            CartanType::D => write!(f, "D"),
            CartanType::E => write!(f, "E"),
        }
    }
}

/// A Cartan matrix of type A, D or E: symmetric, 2 on the diagonal,
/// `0/-1` off it, positive definite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplyLacedCartan {
    ctype: CartanType,
    rank: usize,
    matrix: Vec<Vec<i64>>,
}

impl SimplyLacedCartan {
    pub fn ctype(&self) -> CartanType {
        self.ctype
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    /// Exact determinant.
    pub fn det(&self) -> BigInt {
        int_det(&self.matrix)
    }
}

/// The standard Cartan matrix for the given type and rank.
pub fn cartan(ctype: CartanType, rank: usize) -> Result<SimplyLacedCartan> {
    let edges: Vec<(usize, usize)> = match ctype {
        CartanType::A => {
            if rank < 1 {
                return Err(Error::Precondition("type A needs rank >= 1".into()));
            }
            (0..rank.saturating_sub(1)).map(|i| (i, i + 1)).collect()
        }
        CartanType::D => {
            if rank < 3 {
                return Err(Error::Precondition("type D needs rank >= 3".into()));
            }
            let mut e: Vec<(usize, usize)> = (0..rank - 3).map(|i| (i, i + 1)).collect();
            e.push((rank - 3, rank - 2));
            e.push((rank - 3, rank - 1));
            e
        }
        CartanType::E => {
            if !(6..=8).contains(&rank) {
                return Err(Error::Precondition(format!(
                    "type E needs rank 6, 7 or 8, got {rank}"
                )));
            }
            // Bourbaki: path 1-3-4-5-...-n, node 2 attached to node 4.
            let mut e = vec![(0, 2), (1, 3)];
            for i in 2..rank - 1 {
                e.push((i, i + 1));
            }
            e
        }
    };
    let mut matrix = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        matrix[i][i] = 2;
    }
    for (i, j) in edges {
        matrix[i][j] = -1;
        matrix[j][i] = -1;
    }
    Ok(SimplyLacedCartan { ctype, rank, matrix })
}

/// A permutation of the nodes preserving the Cartan matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramAutomorphism {
    perm: Vec<usize>,
    order: usize,
}

impl DiagramAutomorphism {
    /// Build from a 0-based permutation vector (`perm[i]` is the image of
    /// node `i`). The order is computed; structure preservation is checked
    /// against a specific Cartan matrix by [`fold`].
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::NotDiagramAutomorphism(format!(
                    "not a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        // Order = lcm of cycle lengths.
        let mut order = 1usize;
        let mut visited = vec![false; n];
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0usize;
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                i = perm[i];
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        Ok(Self { perm, order })
    }

    pub fn identity(rank: usize) -> Self {
        Self { perm: (0..rank).collect(), order: 1 }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// Orbits as sorted node lists, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.perm.len();
        let mut visited = vec![false; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                orbit.push(i);
                i = self.perm[i];
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }
}

/// The result of folding: parent data, orbit structure, and the folded
/// matrix `A[nu]`.
#[derive(Debug, Clone)]
pub struct FoldedCartan {
    pub parent: SimplyLacedCartan,
    pub nu: DiagramAutomorphism,
    /// Orbit representatives, in row order.
    pub reps: Vec<usize>,
    /// Orbit length for each representative.
    pub orbit_lengths: Vec<usize>,
    folded: Vec<Vec<i64>>,
}

impl FoldedCartan {
    /// Number of orbits (the folded dimension).
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.folded
    }
}

/// Fold `cartan` along `nu`, one row per orbit, ordered by least orbit
/// element. Rejects permutations that do not preserve the matrix.
pub fn fold(cartan: &SimplyLacedCartan, nu: &DiagramAutomorphism) -> Result<FoldedCartan> {
    let reps: Vec<usize> = nu.orbits().iter().map(|o| o[0]).collect();
    fold_with_order(cartan, nu, &reps)
}

/// Fold with an explicit row order given by orbit representatives (one node
/// from each orbit, in the desired order).
pub fn fold_with_order(
    cartan: &SimplyLacedCartan,
    nu: &DiagramAutomorphism,
    reps: &[usize],
) -> Result<FoldedCartan> {
    let n = cartan.rank();
    if nu.perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "automorphism on {} nodes applied to rank {n}",
            nu.perm.len()
        )));
    }
    for i in 0..n {
        for j in 0..n {
            if cartan.entry(nu.apply(i), nu.apply(j)) != cartan.entry(i, j) {
                return Err(Error::NotDiagramAutomorphism(format!(
                    "permutation does not preserve the matrix at ({i}, {j})"
                )));
            }
        }
    }
    let orbits = nu.orbits();
    if reps.len() != orbits.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} representatives for {} orbits",
            reps.len(),
            orbits.len()
        )));
    }
    let mut lengths = Vec::with_capacity(reps.len());
    let mut covered = vec![false; orbits.len()];
    for &r in reps {
        let idx = orbits
            .iter()
            .position(|o| o.contains(&r))
            .ok_or_else(|| Error::Precondition(format!("node {r} out of range")))?;
        if covered[idx] {
            return Err(Error::Precondition(format!(
                "two representatives name the orbit of node {r}"
            )));
        }
        covered[idx] = true;
        lengths.push(orbits[idx].len());
    }
    let k = nu.order();
    let d = reps.len();
    let mut folded = vec![vec![0i64; d]; d];
    for (bi, &ri) in reps.iter().enumerate() {
        for (bj, &rj) in reps.iter().enumerate() {
            let mut sum = 0i64;
            let mut col = rj;
            for _ in 0..k {
                sum += cartan.entry(ri, col);
                col = nu.apply(col);
            }
            folded[bi][bj] = sum;
        }
    }
    for i in 0..d {
        for j in 0..d {
            if folded[i][j] != folded[j][i] {
                return Err(Error::Precondition("folded matrix not symmetric".into()));
            }
        }
    }
    if !is_positive_definite_int(&folded) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(FoldedCartan {
        parent: cartan.clone(),
        nu: nu.clone(),
        reps: reps.to_vec(),
        orbit_lengths: lengths,
        folded,
    })
}

/// The tadpole matrix `T_n`: a path with diagonal 2 except the last entry,
///  which is 1. Coincides with the order-2 folding of `A_(2n)`.
pub fn tadpole(n: usize) -> Result<Vec<Vec<i64>>> {
    if n < 1 {
        return Err(Error::Precondition("tadpole size must be >= 1".into()));
    }
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        m[i][i] = if i + 1 == n { 1 } else { 2 };
        if i + 1 < n {
            m[i][i + 1] = -1;
            m[i + 1][i] = -1;
        }
    }
    Ok(m)
}

/// `c * M^(-1)` when that matrix is integral; otherwise reports the minimal
/// positive `c` that works.
pub fn scaled_inverse(matrix: &[Vec<i64>], c: i64) -> Result<Vec<Vec<i64>>> {
    let inv = rational_inverse(matrix)?;
    let mut minimal = BigInt::one();
    for row in &inv {
        for e in row {
            minimal = num_integer::lcm(minimal.clone(), e.denom().clone());
        }
    }
    let c_big = BigInt::from(c);
    if (&c_big % &minimal) != BigInt::zero() {
        return Err(Error::NonIntegralInverse {
            given: c,
            minimal: i64::try_from(minimal)
                .map_err(|_| Error::Precondition("minimal multiplier exceeds i64".into()))?,
        });
    }
    let mut out = vec![vec![0i64; inv.len()]; inv.len()];
    for (i, row) in inv.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let v = e * BigRational::from_integer(c_big.clone());
            debug_assert!(v.is_integer());
            out[i][j] = i64::try_from(v.to_integer()).map_err(|_| {
                Error::Precondition("scaled inverse entry exceeds i64".into())
            })?;
        }
    }
    Ok(out)
}

/// A rational quadratic-plus-linear exponent function
/// `E(m) = m^T B m / 2 + b . m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    matrix: Vec<Vec<BigRational>>,
    linear: Vec<BigRational>,
}

impl QuadraticForm {
    pub fn new(matrix: Vec<Vec<BigRational>>, linear: Vec<BigRational>) -> Result<Self> {
        let d = matrix.len();
        if linear.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "quadratic form with {}x? matrix and {}-vector",
                d,
                linear.len()
            )));
        }
        for i in 0..d {
            for j in 0..d {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::Precondition(format!(
                        "form matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { matrix, linear })
    }

    /// Form with integer matrix and zero linear part.
    pub fn from_integer_matrix(matrix: &[Vec<i64>]) -> Result<Self> {
        let m = matrix
            .iter()
            .map(|r| r.iter().map(|&e| BigRational::from_integer(e.into())).collect())
            .collect();
        let linear = vec![BigRational::zero(); matrix.len()];
        Self::new(m, linear)
    }

    /// Replace the linear part.
    pub fn with_integer_linear(mut self, linear: &[i64]) -> Result<Self> {
        if linear.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "linear part of length {} for dimension {}",
                linear.len(),
                self.dim()
            )));
        }
        self.linear = linear.iter().map(|&e| BigRational::from_integer(e.into())).collect();
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<BigRational>] {
        &self.matrix
    }

    pub fn linear(&self) -> &[BigRational] {
        &self.linear
    }

    /// `E(m) = m^T B m / 2 + b . m`, exactly.
    pub fn evaluate(&self, m: &[BigInt]) -> Result<BigRational> {
        if m.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {} in form of dimension {}",
                m.len(),
                self.dim()
            )));
        }
        let mut quad = BigRational::zero();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                quad += e * BigRational::from_integer(&m[i] * &m[j]);
            }
        }
        let mut total = quad / BigRational::from_integer(2.into());
        for (b, mi) in self.linear.iter().zip(m) {
            total += b * BigRational::from_integer(mi.clone());
        }
        Ok(total)
    }

    /// Convenience for small points.
    pub fn evaluate_i64(&self, m: &[i64]) -> Result<BigRational> {
        let big: Vec<BigInt> = m.iter().map(|&v| BigInt::from(v)).collect();
        self.evaluate(&big)
    }

    /// Exact positive-definiteness of the quadratic part (leading principal
    /// minors all positive).
    pub fn is_positive_definite(&self) -> bool {
        rational_leading_minors_positive(&self.matrix)
    }

    /// The coefficient of `m_i m_j` (with `i <= j`) in the expanded
    /// quadratic part, plus linear coefficients: returns (quadratic map,
    /// linear vector) where the quadratic map lists `(i, j) -> coefficient`.
    pub fn expand_coefficients(&self) -> (Vec<((usize, usize), BigRational)>, Vec<BigRational>) {
        let d = self.dim();
        let mut quad = Vec::new();
        let half = BigRational::new(BigInt::one(), 2.into());
        for i in 0..d {
            for j in i..d {
                let c = if i == j {
                    &self.matrix[i][i] * &half
                } else {
                    self.matrix[i][j].clone()
                };
                if !c.is_zero() {
                    quad.push(((i, j), c));
                }
            }
        }
        (quad, self.linear.clone())
    }
}

impl fmt::Display for QuadraticForm {
    /// Render `E(m)` as a polynomial in `m1..md`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (quad, linear) = self.expand_coefficients();
        let mut wrote = false;
        let mut write_term = |f: &mut fmt::Formatter<'_>,
                              c: &BigRational,
                              label: String|
         -> fmt::Result {
            if c.is_zero() {
                return Ok(());
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if wrote {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            wrote = true;
            if mag.is_one() && !label.is_empty() {
                write!(f, "{label}")
            } else if label.is_empty() {
                write!(f, "{mag}")
            } else {
                write!(f, "{mag}*{label}")
            }
        };
        for ((i, j), c) in &quad {
            let label = if i == j {
                format!("m{}^2", i + 1)
            } else {
                format!("m{}*m{}", i + 1, j + 1)
            };
            write_term(f, c, label)?;
        }
        for (i, c) in linear.iter().enumerate() {
            write_term(f, c, format!("m{}", i + 1))?;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Report of a sum-of-squares rewrite check: the residual form
/// `m^T B m / 2 + b . m - sum_i (U m)_i^2`, which is zero exactly when the
/// rewrite holds.
#[derive(Debug, Clone)]
pub struct RewriteReport {
    pub residual: QuadraticForm,
}

impl RewriteReport {
    pub fn ok(&self) -> bool {
        let (quad, linear) = self.residual.expand_coefficients();
        quad.is_empty() && linear.iter().all(|c| c.is_zero())
    }
}

/// Check the exact polynomial identity
/// `m^T B m / 2 + b . m = sum_i ((U m)_i)^2` for the substitution matrix `U`
/// (rows of `U` are the new variables expressed in the old ones).
pub fn rewrite_check(form: &QuadraticForm, u: &[Vec<i64>]) -> Result<RewriteReport> {
    let d = form.dim();
    if u.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "substitution rows must have length {d}"
        )));
    }
    // sum_i (Um)_i^2 = m^T (U^T U) m, so the residual quadratic matrix is
    // B - 2 U^T U; the linear part is untouched.
    let rows = u.len();
    let mut residual = form.matrix().to_vec();
    for a in 0..d {
        for b in 0..d {
            let mut dot = 0i64;
            for r in u.iter().take(rows) {
                dot += r[a] * r[b];
            }
            residual[a][b] -= BigRational::from_integer((2 * dot).into());
        }
    }
    Ok(RewriteReport {
        residual: QuadraticForm::new(residual, form.linear().to_vec())?,
    })
}

/// Foldings referenced by catalog label:
/// `A2n^2(n)`, `A2n-1^2(n)`, `Dn^2(n)`, `D4^3`, `E6^2`.
pub fn catalog_folding(label: &str) -> Result<FoldedCartan> {
    let parse_n = |s: &str, prefix: &str| -> Result<usize> {
        let inner = s
            .strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))?;
        inner
            .parse::<usize>()
            .map_err(|_| Error::UnknownLabel(s.to_string()))
    };
    if label == "D4^3" {
        let c = cartan(CartanType::D, 4)?;
        // center node (0-based 1) fixed; tips 0 -> 2 -> 3 -> 0
        let nu = DiagramAutomorphism::new(vec![2, 1, 3, 0])?;
        return fold_with_order(&c, &nu, &[1, 0]);
    }
    if label == "E6^2" {
        let c = cartan(CartanType::E, 6)?;
        // 1<->6, 3<->5, 2 and 4 fixed (1-based); row order {1,6},{3,5},{4},{2}
        let nu = DiagramAutomorphism::new(vec![5, 1, 4, 3, 2, 0])?;
        return fold_with_order(&c, &nu, &[0, 2, 3, 1]);
    }
    if label.starts_with("A2n^2") {
        let n = parse_n(label, "A2n^2")?;
        if n < 1 {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let c = cartan(CartanType::A, 2 * n)?;
        let nu = DiagramAutomorphism::new((0..2 * n).rev().collect())?;
        let reps: Vec<usize> = (0..n).collect();
        return fold_with_order(&c, &nu, &reps);
    }
    if label.starts_with("A2n-1^2") {
        let n = parse_n(label, "A2n-1^2")?;
        if n < 2 {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let c = cartan(CartanType::A, 2 * n - 1)?;
        let nu = DiagramAutomorphism::new((0..2 * n - 1).rev().collect())?;
        let reps: Vec<usize> = (0..n).collect();
        return fold_with_order(&c, &nu, &reps);
    }
    if label.starts_with("Dn^2") {
        let n = parse_n(label, "Dn^2")?;
        if n < 3 {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let c = cartan(CartanType::D, n)?;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(n - 2, n - 1);
        let nu = DiagramAutomorphism::new(perm)?;
        let reps: Vec<usize> = (0..n - 1).collect();
        return fold_with_order(&c, &nu, &reps);
    }
    Err(Error::UnknownLabel(label.to_string()))
}

// ---------------------------------------------------------------------------
// exact integer/rational matrix helpers

/// Fraction-free integer determinant (Bareiss).
fn int_det(matrix: &[Vec<i64>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&e| BigInt::from(e)).collect())
        .collect();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                None => return BigInt::zero(),
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
            }
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &pivot * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

fn is_positive_definite_int(matrix: &[Vec<i64>]) -> bool {
    (1..=matrix.len()).all(|k| {
        let minor: Vec<Vec<i64>> = matrix[..k].iter().map(|r| r[..k].to_vec()).collect();
        int_det(&minor) > BigInt::zero()
    })
}

fn rational_leading_minors_positive(matrix: &[Vec<BigRational>]) -> bool {
    // Scale to integers by the lcm of denominators; positive-definiteness is
    // invariant under positive scaling.
    let mut scale = BigInt::one();
    for row in matrix {
        for e in row {
            scale = num_integer::lcm(scale.clone(), e.denom().clone());
        }
    }
    let int: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| (e * BigRational::from_integer(scale.clone())).to_integer())
                .collect()
        })
        .collect();
    (1..=int.len()).all(|k| {
        let sub: Vec<Vec<BigInt>> = int[..k].iter().map(|r| r[..k].to_vec()).collect();
        big_det(&sub) > BigInt::zero()
    })
}

/// Bareiss determinant over `BigInt` input.
fn big_det(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = matrix.to_vec();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                None => return BigInt::zero(),
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
            }
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &pivot * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Exact inverse of an integer matrix, as rationals (Gauss-Jordan).
fn rational_inverse(matrix: &[Vec<i64>]) -> Result<Vec<Vec<BigRational>>> {
    let a: Vec<Vec<BigRational>> = matrix
        .iter()
        .map(|r| r.iter().map(|&e| BigRational::from_integer(e.into())).collect())
        .collect();
    invert_rational(&a)
}

/// Exact inverse of a rational matrix (Gauss-Jordan).
pub(crate) fn invert_rational(matrix: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    let mut a: Vec<Vec<BigRational>> = matrix.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::NotInvertible("singular matrix".into()))?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &pivot;
            inv[col][j] /= &pivot;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &a[col][j] * &f;
                a[r][j] -= t;
                let t = &inv[col][j] * &f;
                inv[r][j] -= t;
            }
        }
    }
    Ok(inv)
}
