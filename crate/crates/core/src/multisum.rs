//! Exact evaluation of positive-definite lattice multisums
//!
//! ```text
//!   sum_{m in N^d}  x^(xw . m) y^(yw . m) q^(E(m))
//!                   / ((q^(b_1); q^(b_1))_(m_1) ... (q^(b_d); q^(b_d))_(m_d))
//! ```
//!
//! with `E(m) = m^T B m / 2 + b . m` for a rational symmetric positive
//! definite `B`. Enumeration is depth-first over the lattice; at each
//! prefix the exact real minimum of `E` over all nonnegative extensions is
//! computed by solving the KKT conditions on the faces of the orthant
//! (rational linear algebra, submatrix inverses cached), and the branch is
//! pruned when that minimum reaches the target order. Per-coordinate caps
//! come from the bounding ellipsoid `E(m) >= (m_i - c_i)^2 / (2 (B^-1)_ii)
//! + E_min`. Reciprocal Pochhammer factors are maintained incrementally as
//! a dense coefficient vector (multiplying by `1/(1 - q^s)` is one in-place
//! prefix pass), so every lattice term is expanded exactly once.
//!
//! The module also provides the two quadruple-sum families used throughout:
//! the mod-14 family (quadratic part `4i^2 + 12ij + 8ik + 4il + 12j^2 +
//! 16jk + 8jl + 6k^2 + 6kl + 2l^2`, x-weights `(2,3,2,1)`) and the mod-10
//! family (half of that form, x-weights `(0,2,1,1)`, y-weights
//! `(1,1,1,0)`), each with per-variable denominators
//! `(q^2;q^2), (q^2;q^2), (q;q), (q;q)` and a four-entry linear offset.
//!
//! [`recursion_check`] verifies, for a folded Cartan matrix, the functional
//! equation of its multigraded sum
//!
//! ```text
//!   chi(x_1..x_d) = chi(.., q^(k/l_i) x_i, ..)
//!                   + x_i q^(B_ii/2) chi(x_1 q^(B_1i), .., x_d q^(B_di))
//! ```
//!
//! by evaluating all three sums independently and comparing them
//! coefficient-by-coefficient over the full multivariate grading.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{LaurentPoly, Var};
use crate::folding::{invert_rational, FoldedCartan, QuadraticForm};
use crate::qseries::TruncatedSeries;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// A lattice multisum: quadratic-plus-linear exponent, monomial weights,
/// and per-variable Pochhammer base exponents.
#[derive(Debug, Clone)]
pub struct MultisumSpec {
    form: QuadraticForm,
    xweights: Vec<i64>,
    yweights: Option<Vec<i64>>,
    denoms: Vec<i64>,
}

impl MultisumSpec {
    pub fn new(
        form: QuadraticForm,
        xweights: Vec<i64>,
        yweights: Option<Vec<i64>>,
        denoms: Vec<i64>,
    ) -> Result<Self> {
        let d = form.dim();
        if xweights.len() != d
            || denoms.len() != d
            || yweights.as_ref().is_some_and(|w| w.len() != d)
        {
            return Err(Error::DimensionMismatch(format!(
                "spec dimensions disagree: form {d}, xweights {}, denoms {}",
                xweights.len(),
                denoms.len()
            )));
        }
        if denoms.iter().any(|&b| b < 1) {
            return Err(Error::Precondition("Pochhammer bases must be >= 1".into()));
        }
        if !form.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { form, xweights, yweights, denoms })
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn xweights(&self) -> &[i64] {
        &self.xweights
    }

    pub fn yweights(&self) -> Option<&[i64]> {
        self.yweights.as_deref()
    }

    pub fn denoms(&self) -> &[i64] {
        &self.denoms
    }

    /// Same quadratic part and weights, new integer linear offsets.
    pub fn with_offsets(&self, offsets: &[i64]) -> Result<Self> {
        let form = QuadraticForm::new(self.form.matrix().to_vec(), self.form.linear().to_vec())?
            .with_integer_linear(offsets)?;
        Ok(Self {
            form,
            xweights: self.xweights.clone(),
            yweights: self.yweights.clone(),
            denoms: self.denoms.clone(),
        })
    }
}

/// Quadratic matrix of the mod-14 quadruple-sum family.
pub const MOD14_MATRIX: [[i64; 4]; 4] =
    [[8, 12, 8, 4], [12, 24, 16, 8], [8, 16, 12, 6], [4, 8, 6, 4]];

/// Quadratic matrix of the mod-10 quadruple-sum family.
pub const MOD10_MATRIX: [[i64; 4]; 4] =
    [[4, 6, 4, 2], [6, 12, 8, 4], [4, 8, 6, 3], [2, 4, 3, 2]];

fn family_spec(
    matrix: &[[i64; 4]; 4],
    offsets: &[i64],
    xweights: [i64; 4],
    yweights: Option<[i64; 4]>,
) -> Result<MultisumSpec> {
    let rows: Vec<Vec<i64>> = matrix.iter().map(|r| r.to_vec()).collect();
    let form = QuadraticForm::from_integer_matrix(&rows)?.with_integer_linear(offsets)?;
    MultisumSpec::new(form, xweights.to_vec(), yweights.map(|w| w.to_vec()), vec![2, 2, 1, 1])
}

/// The mod-14 quadruple sum with linear offsets `(A, B, C, D)`:
/// `sum x^(2i+3j+2k+l) q^(Q(i,j,k,l) + Ai+Bj+Ck+Dl) /
///  ((q^2;q^2)_i (q^2;q^2)_j (q;q)_k (q;q)_l)`.
pub fn mod14_spec(offsets: &[i64]) -> Result<MultisumSpec> {
    family_spec(&MOD14_MATRIX, offsets, [2, 3, 2, 1], None)
}

/// The mod-10 quadruple sum with linear offsets `(A, B, C, D)`:
/// `sum x^(2j+k+l) y^(i+j+k) q^(Q(i,j,k,l)/1 + Ai+Bj+Ck+Dl) /
///  ((q^2;q^2)_i (q^2;q^2)_j (q;q)_k (q;q)_l)` with half the mod-14 form.
pub fn mod10_spec(offsets: &[i64]) -> Result<MultisumSpec> {
    family_spec(&MOD10_MATRIX, offsets, [0, 2, 1, 1], Some([1, 1, 1, 0]))
}

/// A declared shift `v -> v * q^step` (v one of x, y) whose effect on the
/// linear offsets is `delta`.
#[derive(Debug, Clone)]
pub struct ShiftRule {
    pub var: Var,
    pub step: i64,
    pub delta: Vec<i64>,
}

/// Apply a shift rule after verifying it symbolically on the general term:
/// substituting `v -> v q^step` multiplies the lattice term by
/// `q^(step * (w . m))`, so the offset delta must equal `step * w`.
pub fn shift(spec: &MultisumSpec, rule: &ShiftRule) -> Result<MultisumSpec> {
    let weights: &[i64] = match rule.var {
        Var::X => &spec.xweights,
        Var::Y => spec
            .yweights
            .as_deref()
            .ok_or_else(|| Error::Precondition("spec has no y-weights to shift".into()))?,
        Var::Q => return Err(Error::Precondition("shift variable must be x or y".into())),
    };
    if rule.delta.len() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "shift delta of length {} for dimension {}",
            rule.delta.len(),
            spec.dim()
        )));
    }
    for (t, (&d, &w)) in rule.delta.iter().zip(weights).enumerate() {
        if d != rule.step * w {
            return Err(Error::InconsistentShift(format!(
                "slot {}: declared offset delta {} but the general term gains q^({}*m_{}), \
                 expected {}",
                t + 1,
                d,
                rule.step * w,
                t + 1,
                rule.step * w
            )));
        }
    }
    let mut linear = spec.form.linear().to_vec();
    for (l, &d) in linear.iter_mut().zip(&rule.delta) {
        *l += rat(d);
    }
    let form = QuadraticForm::new(spec.form.matrix().to_vec(), linear)?;
    Ok(MultisumSpec {
        form,
        xweights: spec.xweights.clone(),
        yweights: spec.yweights.clone(),
        denoms: spec.denoms.clone(),
    })
}

/// Multiply the exponent function (quadratic and linear parts) by a
/// positive rational factor, keeping weights and denominators.
pub fn scale_form(spec: &MultisumSpec, factor: &BigRational) -> Result<MultisumSpec> {
    if !factor.is_positive() {
        return Err(Error::Precondition(format!(
            "form scale factor must be positive, got {factor}"
        )));
    }
    let matrix = spec
        .form
        .matrix()
        .iter()
        .map(|r| r.iter().map(|e| e * factor).collect())
        .collect();
    let linear = spec.form.linear().iter().map(|e| e * factor).collect();
    let form = QuadraticForm::new(matrix, linear)?;
    Ok(MultisumSpec {
        form,
        xweights: spec.xweights.clone(),
        yweights: spec.yweights.clone(),
        denoms: spec.denoms.clone(),
    })
}

// ---------------------------------------------------------------------------
// lattice enumeration

/// Depth-first enumerator visiting every lattice point with
/// `E(m) + offset < order`, carrying the dense reciprocal Pochhammer
/// expansion of the prefix.
struct LatticeSum {
    d: usize,
    b: Vec<Vec<BigRational>>,
    lin: Vec<BigRational>,
    offset: BigRational,
    bases: Vec<i64>,
    order: BigRational,
    caps: Vec<i64>,
    work: usize,
    inv_cache: HashMap<u64, Vec<Vec<BigRational>>>,
    /// Monomial-degree pruning: (weights, bound, per-level suffix-nonneg).
    bounds: Vec<(Vec<i64>, i64, Vec<bool>)>,
}

impl LatticeSum {
    fn new(
        b: Vec<Vec<BigRational>>,
        lin: Vec<BigRational>,
        offset: BigRational,
        bases: Vec<i64>,
        order: i64,
        degree_bounds: Vec<(Vec<i64>, i64)>,
    ) -> Result<Self> {
        let d = b.len();
        let binv = invert_rational(&b)?;
        // Unconstrained minimum and center: E(m) + offset >=
        // (m_i - c_i)^2 / (2 binv_ii) + unc_min with c = -binv . lin.
        let center: Vec<BigRational> = (0..d)
            .map(|i| -(0..d).map(|j| &binv[i][j] * &lin[j]).sum::<BigRational>())
            .collect();
        let mut unc_min = offset.clone();
        for i in 0..d {
            unc_min += half() * &lin[i] * &center[i];
        }
        let order_rat = rat(order);
        let mut caps = Vec::with_capacity(d);
        for i in 0..d {
            let rho = rat(2) * &binv[i][i] * (&order_rat - &unc_min);
            if !rho.is_positive() {
                caps.push(-1);
                continue;
            }
            let root = rho.ceil().to_integer().sqrt();
            let cap = center[i].floor().to_integer()
                + root
                + BigInt::from(2);
            caps.push(i64::try_from(cap).map_err(|_| {
                Error::Precondition("lattice cap exceeds i64".into())
            })?);
        }
        let mut ls = Self {
            d,
            b,
            lin,
            offset,
            bases,
            order: order_rat.clone(),
            caps,
            work: 0,
            inv_cache: HashMap::new(),
            bounds: degree_bounds
                .into_iter()
                .map(|(w, bound)| {
                    let mut nonneg = vec![true; d + 1];
                    for p in (0..d).rev() {
                        nonneg[p] = nonneg[p + 1] && w[p] >= 0;
                    }
                    (w, bound, nonneg)
                })
                .collect(),
        };
        // Reciprocal expansions are needed up to exponent
        // order - floor(min E over the orthant).
        let orthant_min = ls.prefix_min(0, &[])?;
        let span = (&order_rat - orthant_min).ceil().to_integer().max(BigInt::zero());
        ls.work = usize::try_from(span)
            .map_err(|_| Error::Precondition("working order exceeds usize".into()))?
            + 2;
        Ok(ls)
    }

    /// Exact minimum of `E + offset` over real extensions of the prefix
    /// `m[0..p]` with nonnegative coordinates (KKT on orthant faces); falls
    /// back to a valid lower bound if no face certifies.
    fn prefix_min(&mut self, p: usize, m: &[i64]) -> Result<BigRational> {
        let mut cst = self.offset.clone();
        for i in 0..p {
            for j in 0..p {
                cst += half() * &self.b[i][j] * rat(m[i]) * rat(m[j]);
            }
            cst += &self.lin[i] * rat(m[i]);
        }
        if p == self.d {
            return Ok(cst);
        }
        let f = self.d - p;
        let c: Vec<BigRational> = (p..self.d)
            .map(|j| {
                let mut v = self.lin[j].clone();
                for i in 0..p {
                    v += &self.b[j][i] * rat(m[i]);
                }
                v
            })
            .collect();
        let mut fallback: Option<BigRational> = None;
        for mask in 0..(1u64 << f) {
            if mask == 0 {
                if c.iter().all(|cj| !cj.is_negative()) {
                    return Ok(cst);
                }
                continue;
            }
            let members: Vec<usize> = (0..f).filter(|t| mask & (1 << t) != 0).collect();
            let global_mask = members.iter().fold(0u64, |acc, &t| acc | (1 << (p + t)));
            if !self.inv_cache.contains_key(&global_mask) {
                let sub: Vec<Vec<BigRational>> = members
                    .iter()
                    .map(|&r| members.iter().map(|&s| self.b[p + r][p + s].clone()).collect())
                    .collect();
                self.inv_cache.insert(global_mask, invert_rational(&sub)?);
            }
            let inv = &self.inv_cache[&global_mask];
            let v: Vec<BigRational> = (0..members.len())
                .map(|r| {
                    -(0..members.len())
                        .map(|s| &inv[r][s] * &c[members[s]])
                        .sum::<BigRational>()
                })
                .collect();
            let value = &cst
                + half()
                    * members
                        .iter()
                        .enumerate()
                        .map(|(r, &t)| &c[t] * &v[r])
                        .sum::<BigRational>();
            let feasible = v.iter().all(|e| !e.is_negative());
            if feasible {
                let kkt = (0..f)
                    .filter(|t| !members.contains(t))
                    .all(|t| {
                        let mut g = c[t].clone();
                        for (r, &s) in members.iter().enumerate() {
                            g += &self.b[p + t][p + s] * &v[r];
                        }
                        !g.is_negative()
                    });
                if kkt {
                    return Ok(value);
                }
            }
            fallback = Some(match fallback {
                None => value,
                Some(best) => best.min(value),
            });
        }
        Ok(match fallback {
            None => cst,
            Some(best) => best.min(cst),
        })
    }

    fn degree_pruned(&self, p: usize, m: &[i64]) -> bool {
        self.bounds.iter().any(|(w, bound, nonneg)| {
            if !nonneg[p] {
                return false;
            }
            let partial: i64 = (0..p).map(|i| w[i] * m[i]).sum();
            partial > *bound
        })
    }

    fn apply_geom(recip: &mut [BigInt], step: usize) {
        for e in step..recip.len() {
            let (left, right) = recip.split_at_mut(e);
            right[0] += &left[e - step];
        }
    }

    fn undo_geom(recip: &mut [BigInt], step: usize) {
        for e in (step..recip.len()).rev() {
            let (left, right) = recip.split_at_mut(e);
            right[0] -= &left[e - step];
        }
    }

    fn run(
        &mut self,
        visit: &mut dyn FnMut(&[i64], &BigRational, &[BigInt]),
    ) -> Result<()> {
        let mut m = vec![0i64; self.d];
        let mut recip = vec![BigInt::zero(); self.work];
        recip[0] = BigInt::one();
        self.dfs(0, &mut m, &mut recip, visit)
    }

    fn dfs(
        &mut self,
        level: usize,
        m: &mut Vec<i64>,
        recip: &mut Vec<BigInt>,
        visit: &mut dyn FnMut(&[i64], &BigRational, &[BigInt]),
    ) -> Result<()> {
        if level == self.d {
            let e = self.prefix_min(self.d, m)?;
            visit(m, &e, recip);
            return Ok(());
        }
        let cap = self.caps[level];
        let mut applied = 0i64;
        for t in 0..=cap {
            m[level] = t;
            if t > 0 {
                let step = usize::try_from(self.bases[level] * t)
                    .map_err(|_| Error::Precondition("Pochhammer step overflow".into()))?;
                Self::apply_geom(recip, step);
                applied = t;
            }
            if self.degree_pruned(level + 1, m) {
                continue;
            }
            if self.prefix_min(level + 1, m)? >= self.order {
                continue;
            }
            self.dfs(level + 1, m, recip, visit)?;
        }
        for t in (1..=applied).rev() {
            let step = usize::try_from(self.bases[level] * t)
                .map_err(|_| Error::Precondition("Pochhammer step overflow".into()))?;
            Self::undo_geom(recip, step);
        }
        m[level] = 0;
        Ok(())
    }
}

/// Exponent grid denominator implied by the form: every `E(m)` is a
/// multiple of `1/grid`.
fn exponent_grid(form: &QuadraticForm, offset: &BigRational) -> Result<i64> {
    let mut g = BigInt::one();
    let d = form.dim();
    for i in 0..d {
        let diag = &form.matrix()[i][i] * half();
        g = g.lcm(diag.denom());
        g = g.lcm(form.linear()[i].denom());
        for j in i + 1..d {
            g = g.lcm(form.matrix()[i][j].denom());
        }
    }
    g = g.lcm(offset.denom());
    i64::try_from(g).map_err(|_| Error::Precondition("exponent grid exceeds i64".into()))
}

/// Evaluate the multisum exactly below `q^order` (integer exponent units;
/// negative linear offsets may produce negative exponents, which are kept).
pub fn evaluate(spec: &MultisumSpec, order: i64) -> Result<TruncatedSeries> {
    evaluate_bounded(spec, order, None, None)
}

/// Evaluate with optional caps on the x- and y-degree of retained terms.
pub fn evaluate_bounded(
    spec: &MultisumSpec,
    order: i64,
    x_bound: Option<i64>,
    y_bound: Option<i64>,
) -> Result<TruncatedSeries> {
    let zero = BigRational::zero();
    let grid = exponent_grid(&spec.form, &zero)?;
    let order_sc = order
        .checked_mul(grid)
        .ok_or_else(|| Error::Precondition("order times grid overflows".into()))?;
    let mut degree_bounds = Vec::new();
    if let Some(xb) = x_bound {
        degree_bounds.push((spec.xweights.clone(), xb));
    }
    if let Some(yb) = y_bound {
        let yw = spec
            .yweights
            .clone()
            .ok_or_else(|| Error::Precondition("y-bound given but spec has no y-weights".into()))?;
        degree_bounds.push((yw, yb));
    }
    let mut ls = LatticeSum::new(
        spec.form.matrix().to_vec(),
        spec.form.linear().to_vec(),
        zero,
        spec.denoms.clone(),
        order,
        degree_bounds,
    )?;
    let mut acc: BTreeMap<i64, BTreeMap<(i64, i64), BigInt>> = BTreeMap::new();
    let grid_rat = rat(grid);
    ls.run(&mut |m, e, recip| {
        let xdeg: i64 = spec.xweights.iter().zip(m).map(|(w, v)| w * v).sum();
        let ydeg: i64 = spec
            .yweights
            .as_ref()
            .map(|yw| yw.iter().zip(m).map(|(w, v)| w * v).sum())
            .unwrap_or(0);
        if x_bound.is_some_and(|b| xdeg > b) || y_bound.is_some_and(|b| ydeg > b) {
            return;
        }
        let e_scaled = e * &grid_rat;
        assert!(e_scaled.is_integer(), "exponent off the computed grid");
        let e_sc = i64::try_from(e_scaled.to_integer()).expect("scaled exponent fits i64");
        for (j, c) in recip.iter().enumerate() {
            let key = e_sc + (j as i64) * grid;
            if key >= order_sc {
                break;
            }
            if c.is_zero() {
                continue;
            }
            let entry = acc
                .entry(key)
                .or_default()
                .entry((xdeg, ydeg))
                .or_insert_with(BigInt::zero);
            *entry += c;
        }
    })?;
    let coeffs: BTreeMap<i64, LaurentPoly> = acc
        .into_iter()
        .map(|(k, xy)| (k, LaurentPoly::from_xy_terms(xy)))
        .collect();
    Ok(TruncatedSeries::from_parts(grid, order_sc, coeffs))
}

// ---------------------------------------------------------------------------
// folding recursion check

/// Outcome of [`recursion_check`]: the variable index checked, the order,
/// and the first coefficient mismatch if any.
#[derive(Debug, Clone)]
pub struct RecursionReport {
    pub index: usize,
    pub order: i64,
    pub first_failure: Option<String>,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

type ChiMap = BTreeMap<Vec<i64>, BTreeMap<i64, BigInt>>;

/// Evaluate `sum_m prod_t x_t^(m_t + shift) q^(E(m) + offset) / poch(m)` as
/// a map from x-exponent vector to scaled q-coefficients, complete below
/// `order`.
fn chi_map(
    b: &[Vec<BigRational>],
    lin: &[BigRational],
    offset: &BigRational,
    bases: &[i64],
    order: i64,
    grid: i64,
    xshift: Option<usize>,
) -> Result<ChiMap> {
    let mut ls = LatticeSum::new(
        b.to_vec(),
        lin.to_vec(),
        offset.clone(),
        bases.to_vec(),
        order,
        Vec::new(),
    )?;
    let order_sc = order * grid;
    let grid_rat = rat(grid);
    let mut out: ChiMap = BTreeMap::new();
    ls.run(&mut |m, e, recip| {
        let mut key: Vec<i64> = m.to_vec();
        if let Some(i) = xshift {
            key[i] += 1;
        }
        let e_scaled = e * &grid_rat;
        assert!(e_scaled.is_integer(), "exponent off the computed grid");
        let e_sc = i64::try_from(e_scaled.to_integer()).expect("scaled exponent fits i64");
        let slot = out.entry(key).or_default();
        for (j, c) in recip.iter().enumerate() {
            let qk = e_sc + (j as i64) * grid;
            if qk >= order_sc {
                break;
            }
            if c.is_zero() {
                continue;
            }
            let entry = slot.entry(qk).or_insert_with(BigInt::zero);
            *entry += c;
        }
    })?;
    for slot in out.values_mut() {
        slot.retain(|_, c| !c.is_zero());
    }
    out.retain(|_, slot| !slot.is_empty());
    Ok(out)
}

/// Verify the folding functional equation for variable `index` (1-based):
/// the full sum equals the `q^(k/l_i) x_i` substitution plus the
/// `x_i q^(B_ii/2)`-weighted shifted sum. All three sides are enumerated
/// independently.
pub fn recursion_check(
    folded: &FoldedCartan,
    index: usize,
    order: i64,
) -> Result<RecursionReport> {
    let d = folded.dim();
    if index == 0 || index > d {
        return Err(Error::DimensionMismatch(format!(
            "recursion index {index} out of range 1..={d}"
        )));
    }
    let i = index - 1;
    let a = folded.matrix();
    let k = folded.nu.order() as i64;
    let mut bases = Vec::with_capacity(d);
    for &l in &folded.orbit_lengths {
        let l = l as i64;
        if k % l != 0 {
            return Err(Error::Precondition(format!(
                "orbit length {l} does not divide automorphism order {k}"
            )));
        }
        bases.push(k / l);
    }
    let b_rat: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|&e| rat(e)).collect())
        .collect();
    let zero_lin = vec![BigRational::zero(); d];
    let offset2 = rat(a[i][i]) * half();
    // Common exponent grid covering all three sums.
    let base_form = QuadraticForm::new(b_rat.clone(), zero_lin.clone())?;
    let grid = exponent_grid(&base_form, &offset2)?;

    let lhs = chi_map(&b_rat, &zero_lin, &BigRational::zero(), &bases, order, grid, None)?;
    let mut lin1 = zero_lin.clone();
    lin1[i] = rat(bases[i]);
    let r1 = chi_map(&b_rat, &lin1, &BigRational::zero(), &bases, order, grid, None)?;
    let lin2: Vec<BigRational> = (0..d).map(|t| rat(a[t][i])).collect();
    let r2 = chi_map(&b_rat, &lin2, &offset2, &bases, order, grid, Some(i))?;

    let mut rhs = r1;
    for (key, slot) in r2 {
        let dst = rhs.entry(key).or_default();
        for (qk, c) in slot {
            let entry = dst.entry(qk).or_insert_with(BigInt::zero);
            *entry += c;
        }
    }
    for slot in rhs.values_mut() {
        slot.retain(|_, c| !c.is_zero());
    }
    rhs.retain(|_, slot| !slot.is_empty());

    // Find the first mismatch over the union of x-vectors.
    let mut failure: Option<(i64, Vec<i64>, String)> = None;
    let keys: std::collections::BTreeSet<&Vec<i64>> = lhs.keys().chain(rhs.keys()).collect();
    let empty = BTreeMap::new();
    for key in keys {
        let l = lhs.get(key).unwrap_or(&empty);
        let r = rhs.get(key).unwrap_or(&empty);
        let qs: std::collections::BTreeSet<&i64> = l.keys().chain(r.keys()).collect();
        for &qk in qs {
            let lc = l.get(&qk).cloned().unwrap_or_else(BigInt::zero);
            let rc = r.get(&qk).cloned().unwrap_or_else(BigInt::zero);
            if lc != rc {
                let better = failure
                    .as_ref()
                    .map(|(bq, bk, _)| (qk, key) < (*bq, bk))
                    .unwrap_or(true);
                if better {
                    let g = qk.gcd(&grid);
                    failure = Some((
                        qk,
                        key.clone(),
                        format!(
                            "x = {:?}: sides differ at q^({}/{}): {lc} vs {rc}",
                            key,
                            qk / g,
                            grid / g
                        ),
                    ));
                }
                break;
            }
        }
    }
    Ok(RecursionReport {
        index,
        order,
        first_failure: failure.map(|(_, _, msg)| msg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Monomial;
    use crate::folding::catalog_folding;

    fn series_coeff_at_x1(s: &TruncatedSeries, e: i64) -> BigInt {
        s.substitute_one(Var::X)
            .substitute_one(Var::Y)
            .coeff_int(e)
            .map(|p| p.constant_term())
            .unwrap_or_else(BigInt::zero)
    }

    #[test]
    fn one_dimensional_unit_form_counts_partitions_into_distinct_gaps() {
        // sum q^(m^2) x^m / (q;q)_m: coefficients at x=1 are 1,1,1,1,2,2
        let form = QuadraticForm::from_integer_matrix(&[vec![2]]).unwrap();
        let spec = MultisumSpec::new(form, vec![1], None, vec![1]).unwrap();
        let s = evaluate(&spec, 6).unwrap();
        let expect = [1, 1, 1, 1, 2, 2];
        for (e, &c) in expect.iter().enumerate() {
            assert_eq!(series_coeff_at_x1(&s, e as i64), BigInt::from(c), "q^{e}");
        }
    }

    #[test]
    fn empty_lattice_point_contributes_one_and_no_linear_term() {
        let spec = mod14_spec(&[0, 0, 0, 0]).unwrap();
        let s = evaluate(&spec, 10).unwrap();
        assert_eq!(series_coeff_at_x1(&s, 0), BigInt::one());
        assert_eq!(series_coeff_at_x1(&s, 1), BigInt::zero());
    }

    #[test]
    fn evaluation_matches_naive_box_enumeration() {
        // random-ish positive definite forms via B = U^T U with triangular U
        let us = [
            vec![vec![1i64, 0], vec![1, 2]],
            vec![vec![2i64, 0], vec![-1, 1]],
            vec![vec![1i64, 0, 0], vec![1, 1, 0], vec![0, -1, 2]],
        ];
        let lins: [&[i64]; 3] = [&[0, -2], &[1, 0], &[-1, 0, 1]];
        for (u, lin) in us.iter().zip(lins) {
            let d = u.len();
            let mut b = vec![vec![0i64; d]; d];
            for i in 0..d {
                for j in 0..d {
                    b[i][j] = (0..d).map(|r| u[r][i] * u[r][j]).sum::<i64>() * 2;
                }
            }
            let form = QuadraticForm::from_integer_matrix(&b)
                .unwrap()
                .with_integer_linear(lin)
                .unwrap();
            let denoms: Vec<i64> = (0..d).map(|i| 1 + (i as i64 % 2)).collect();
            let xw: Vec<i64> = (0..d as i64).map(|i| i % 3).collect();
            let spec = MultisumSpec::new(form.clone(), xw.clone(), None, denoms.clone()).unwrap();
            let order = 25;
            let fast = evaluate(&spec, order).unwrap();
            // naive box
            let mut naive = TruncatedSeries::zero(1, order);
            let mut m = vec![0i64; d];
            loop {
                let e = form
                    .evaluate(&m.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>())
                    .unwrap();
                if e.is_integer() && e.to_integer() < BigInt::from(order) {
                    let mut term = TruncatedSeries::exact_one().truncate_to(order);
                    for (i, &mi) in m.iter().enumerate() {
                        let p = crate::qseries::pochhammer(
                            &Monomial::q_pow_int(1, denoms[i]),
                            &Monomial::q_pow_int(1, denoms[i]),
                            Some(mi as u64),
                            order,
                        )
                        .unwrap();
                        term = term.mul(&p.truncate_to(order).invert().unwrap());
                    }
                    let xdeg: i64 = xw.iter().zip(&m).map(|(w, v)| w * v).sum();
                    let mono = Monomial {
                        coeff: BigInt::one(),
                        x_exp: xdeg,
                        y_exp: 0,
                        q_num: i64::try_from(e.to_integer()).unwrap(),
                        q_den: 1,
                    };
                    naive = naive.add(&term.mul_monomial(&mono));
                }
                // increment box counter 0..=12 per coordinate
                let mut carry = true;
                for slot in m.iter_mut() {
                    if !carry {
                        break;
                    }
                    *slot += 1;
                    if *slot > 12 {
                        *slot = 0;
                    } else {
                        carry = false;
                    }
                }
                if carry {
                    break;
                }
            }
            assert!(
                fast.agrees_with(&naive),
                "mismatch at {:?}",
                fast.first_mismatch(&naive)
            );
        }
    }

    #[test]
    fn negative_offsets_produce_negative_valuation() {
        let spec = mod14_spec(&[-8, -12, -8, -4]).unwrap();
        let s = evaluate(&spec, 20).unwrap();
        assert_eq!(s.valuation(), Some((-4, 1)));
    }

    #[test]
    fn x_degree_bound_matches_restriction() {
        let spec = mod14_spec(&[0, 0, 0, 0]).unwrap();
        let full = evaluate(&spec, 20).unwrap().restrict_x(4);
        let bounded = evaluate_bounded(&spec, 20, Some(4), None).unwrap();
        assert!(full.agrees_with(&bounded), "{:?}", full.first_mismatch(&bounded));
    }

    #[test]
    fn x_shift_rule_matches_substitution() {
        let spec = mod14_spec(&[0, 0, 0, 0]).unwrap();
        let rule = ShiftRule { var: Var::X, step: 1, delta: vec![2, 3, 2, 1] };
        let shifted = shift(&spec, &rule).unwrap();
        let direct = evaluate(&shifted, 25).unwrap();
        let substituted = evaluate(&spec, 25)
            .unwrap()
            .substitute_x(&Monomial::new(1, 1, 0, 1))
            .unwrap();
        assert!(
            direct.agrees_with(&substituted),
            "{:?}",
            direct.first_mismatch(&substituted)
        );
    }

    #[test]
    fn y_shift_rule_matches_substitution() {
        let spec = mod10_spec(&[0, 0, 0, 0]).unwrap();
        let rule = ShiftRule { var: Var::Y, step: 1, delta: vec![1, 1, 1, 0] };
        let shifted = shift(&spec, &rule).unwrap();
        let direct = evaluate(&shifted, 20).unwrap();
        let substituted = evaluate(&spec, 20)
            .unwrap()
            .substitute_y(&Monomial { coeff: BigInt::one(), x_exp: 0, y_exp: 1, q_num: 1, q_den: 1 })
            .unwrap();
        assert!(
            direct.agrees_with(&substituted),
            "{:?}",
            direct.first_mismatch(&substituted)
        );
    }

    #[test]
    fn inconsistent_shift_rule_is_rejected_with_residual() {
        let spec = mod14_spec(&[0, 0, 0, 0]).unwrap();
        let rule = ShiftRule { var: Var::X, step: 1, delta: vec![2, 3, 2, 0] };
        match shift(&spec, &rule) {
            Err(Error::InconsistentShift(msg)) => {
                assert!(msg.contains("slot 4"), "got {msg}");
            }
            other => panic!("expected InconsistentShift, got {other:?}"),
        }
    }

    #[test]
    fn identity_shift_is_identity() {
        let spec = mod14_spec(&[1, 2, 3, 4]).unwrap();
        let rule = ShiftRule { var: Var::X, step: 0, delta: vec![0, 0, 0, 0] };
        let shifted = shift(&spec, &rule).unwrap();
        assert_eq!(shifted.form().linear(), spec.form().linear());
    }

    #[test]
    fn doubling_the_half_form_gives_the_full_form() {
        let r = mod10_spec(&[0, 0, 0, 0]).unwrap();
        let doubled = scale_form(&r, &rat(2)).unwrap();
        let s = mod14_spec(&[0, 0, 0, 0]).unwrap();
        assert_eq!(doubled.form().matrix(), s.form().matrix());
        assert_eq!(doubled.denoms(), r.denoms());
        // order-3 folding: doubling the scaled-inverse form gives the
        // doubled-coefficient quadratic 2m1^2 + 6m1m2 + 6m2^2
        let d4 = catalog_folding("D4^3").unwrap();
        let b = crate::folding::scaled_inverse(d4.matrix(), 3).unwrap();
        let form = QuadraticForm::from_integer_matrix(&b).unwrap();
        let spec = MultisumSpec::new(form, vec![1, 1], None, vec![1, 3]).unwrap();
        let doubled = scale_form(&spec, &rat(2)).unwrap();
        let (quad, _) = doubled.form().expand_coefficients();
        let coeffs: Vec<i64> = quad
            .iter()
            .map(|(_, c)| i64::try_from(c.to_integer()).unwrap())
            .collect();
        assert_eq!(coeffs, vec![2, 6, 6]);
    }

    #[test]
    fn scale_form_rejects_nonpositive_factor() {
        let spec = mod14_spec(&[0, 0, 0, 0]).unwrap();
        assert!(scale_form(&spec, &rat(0)).is_err());
        assert!(scale_form(&spec, &rat(-2)).is_err());
    }

    #[test]
    fn peeling_relation_holds_for_the_mod14_family() {
        // S(A,B,C,D) - S(A+2,B,C,D) - x^2 q^(4+A) S(A+8,B+12,C+8,D+4) = 0
        for offsets in [[0i64, 0, 0, 0], [2, 2, 1, 0], [-2, 0, 0, 1]] {
            let [a, b, c, d] = offsets;
            let s0 = evaluate(&mod14_spec(&offsets).unwrap(), 40).unwrap();
            let s1 = evaluate(&mod14_spec(&[a + 2, b, c, d]).unwrap(), 40).unwrap();
            let s2 = evaluate(&mod14_spec(&[a + 8, b + 12, c + 8, d + 4]).unwrap(), 40).unwrap();
            let shifted = s2.mul_monomial(&Monomial::new(1, 2, 0, 4 + a));
            let residual = s0.sub(&s1).sub(&shifted);
            assert!(residual.is_known_zero(), "offsets {offsets:?}");
        }
    }

    #[test]
    fn peeling_relation_holds_for_the_mod10_family() {
        // R(A,B,C,D) - R(A+2,B,C,D) - y q^(2+A) R(A+4,B+6,C+4,D+2) = 0
        let s0 = evaluate(&mod10_spec(&[0, 0, 0, 0]).unwrap(), 40).unwrap();
        let s1 = evaluate(&mod10_spec(&[2, 0, 0, 0]).unwrap(), 40).unwrap();
        let s2 = evaluate(&mod10_spec(&[4, 6, 4, 2]).unwrap(), 40).unwrap();
        let shifted = s2.mul_monomial(&Monomial {
            coeff: BigInt::one(),
            x_exp: 0,
            y_exp: 1,
            q_num: 2,
            q_den: 1,
        });
        let residual = s0.sub(&s1).sub(&shifted);
        assert!(residual.is_known_zero());
    }

    #[test]
    fn folding_recursions_pass() {
        let d4 = catalog_folding("D4^3").unwrap();
        for i in 1..=2 {
            let rep = recursion_check(&d4, i, 40).unwrap();
            assert!(rep.passed(), "order-3 folding i={i}: {:?}", rep.first_failure);
        }
        let e6 = catalog_folding("E6^2").unwrap();
        for i in 1..=4 {
            let rep = recursion_check(&e6, i, 30).unwrap();
            assert!(rep.passed(), "order-2 folding i={i}: {:?}", rep.first_failure);
        }
        // one-variable tadpole: the classical single-variable functional
        // equation, on the half-integer grid
        let t1 = catalog_folding("A2n^2(1)").unwrap();
        let rep = recursion_check(&t1, 1, 40).unwrap();
        assert!(rep.passed(), "tadpole: {:?}", rep.first_failure);
    }

    #[test]
    fn recursion_check_rejects_out_of_range_index() {
        let d4 = catalog_folding("D4^3").unwrap();
        assert!(recursion_check(&d4, 0, 10).is_err());
        assert!(recursion_check(&d4, 3, 10).is_err());
    }
}
