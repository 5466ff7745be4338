//! The coefficient polytope over a vector family and its vertex machinery.
//!
//! For a family `V` of `n` vectors in `R^d`, a target sum `T` and a
//! cardinality `c`, the polytope is
//!
//! ```text
//! P = { a in [0,1]^V : sum a(v) v = T,  sum a(v) = c,
//!       a = 1 on fixed_ones,  a = 0 on fixed_zeros }
//! ```
//!
//! It is cut out by `d + 1` equations and box constraints, so at a vertex
//! at most `d + 1` coefficients are strictly between 0 and 1. Descent to a
//! vertex repeatedly moves along a kernel direction of the fractional
//! columns until a coordinate hits a bound; the gamma refinement then
//! pushes one more fractional coordinate to a bound while keeping the
//! weighted sum fixed and never increasing the coefficient total.

use crate::numerics::{kernel_vector, solve_standard_form, Matrix, StandardFormOutcome};
use crate::{linf, Error};

/// Coordinates this close to 0 or 1 are clamped to the bound.
pub const CLAMP_TOL: f64 = 1e-9;
/// Constraint residuals must stay below this throughout descent.
pub const RESIDUAL_TOL: f64 = 1e-7;

/// The feasible set of fractional selections described above.
#[derive(Debug, Clone)]
pub struct CoefficientPolytope {
    vectors: Vec<Vec<f64>>,
    target_sum: Vec<f64>,
    cardinality: f64,
    fixed_ones: Vec<usize>,
    fixed_zeros: Vec<usize>,
}

/// A coefficient vector `a in [0,1]^V`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Self {
        CoefficientVector { values }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Partition of a vertex into ones, strictly fractional, and zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexDecomposition {
    pub ones: Vec<usize>,
    /// Fractional indices with their coefficients, in input order.
    pub fractional: Vec<(usize, f64)>,
    pub zeros: Vec<usize>,
}

impl VertexDecomposition {
    pub fn fractional_indices(&self) -> Vec<usize> {
        self.fractional.iter().map(|&(i, _)| i).collect()
    }
}

/// Result of pushing a vertex with `d + 1` fractional coordinates along a
/// kernel direction of those vectors until one coordinate hits a bound.
#[derive(Debug, Clone)]
pub struct GammaRefinement {
    pub gamma: CoefficientVector,
    /// Kernel direction over the family (zero off the fractional set),
    /// oriented so its total is nonpositive.
    pub beta: Vec<f64>,
    /// The maximal step taken.
    pub t: f64,
    /// Index whose coefficient reached a bound.
    pub v_star: usize,
    /// The bound reached: 0 or 1.
    pub v_star_value: u8,
    /// Remaining fractional candidates, `Q \ {v_star}`.
    pub q_star: Vec<usize>,
}

impl CoefficientPolytope {
    pub fn new(
        vectors: Vec<Vec<f64>>,
        target_sum: Vec<f64>,
        cardinality: f64,
        fixed_ones: Vec<usize>,
        fixed_zeros: Vec<usize>,
    ) -> Result<Self, Error> {
        let n = vectors.len();
        let d = vectors.first().map_or(target_sum.len(), Vec::len);
        if target_sum.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: target_sum.len() });
        }
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidInput("ragged vector family".into()));
        }
        if fixed_ones.iter().any(|i| fixed_zeros.contains(i)) {
            return Err(Error::InvalidInput("fixed_ones and fixed_zeros overlap".into()));
        }
        if fixed_ones.iter().chain(&fixed_zeros).any(|&i| i >= n) {
            return Err(Error::InvalidInput("fixed index out of range".into()));
        }
        if cardinality < fixed_ones.len() as f64 - CLAMP_TOL
            || cardinality > (n - fixed_zeros.len()) as f64 + CLAMP_TOL
        {
            return Err(Error::Infeasible);
        }
        Ok(CoefficientPolytope { vectors, target_sum, cardinality, fixed_ones, fixed_zeros })
    }

    /// Polytope `P(V, k)` with target sum zero and no fixed indices.
    pub fn sum_zero(vectors: Vec<Vec<f64>>, k: usize) -> Result<Self, Error> {
        let d = vectors.first().map_or(0, Vec::len);
        CoefficientPolytope::new(vectors, vec![0.0; d], k as f64, vec![], vec![])
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.target_sum.len()
    }

    pub fn cardinality(&self) -> f64 {
        self.cardinality
    }

    pub fn target_sum(&self) -> &[f64] {
        &self.target_sum
    }

    pub fn fixed_ones(&self) -> &[usize] {
        &self.fixed_ones
    }

    fn is_fixed(&self, i: usize) -> bool {
        self.fixed_ones.contains(&i) || self.fixed_zeros.contains(&i)
    }

    /// Max-norm residual of the two equality constraints at `a`.
    pub fn residual(&self, alpha: &CoefficientVector) -> f64 {
        let mut sum = vec![0.0; self.dim()];
        for (ai, v) in alpha.values.iter().zip(&self.vectors) {
            for (sj, vj) in sum.iter_mut().zip(v) {
                *sj += ai * vj;
            }
        }
        for (sj, tj) in sum.iter_mut().zip(&self.target_sum) {
            *sj -= tj;
        }
        linf(&sum).max((alpha.total() - self.cardinality).abs())
    }

    /// Whether `a` satisfies all constraints within `tol`.
    pub fn contains(&self, alpha: &CoefficientVector, tol: f64) -> bool {
        if alpha.values.len() != self.len() {
            return false;
        }
        if alpha.values.iter().any(|&v| !(-tol..=1.0 + tol).contains(&v)) {
            return false;
        }
        if self.fixed_ones.iter().any(|&i| (alpha.values[i] - 1.0).abs() > tol) {
            return false;
        }
        if self.fixed_zeros.iter().any(|&i| alpha.values[i].abs() > tol) {
            return false;
        }
        self.residual(alpha) <= tol
    }
}

/// Finds a point of `P`.
///
/// Tries, in order: the interpolation `a = hint + t (1 - hint)` with `t`
/// chosen to meet the cardinality, the uniform point `c/n` when the target
/// is the matching multiple of `s(V)`, and finally a phase-1 LP. Returns
/// [`Error::Infeasible`] when the polytope is empty.
pub fn feasible_start(
    p: &CoefficientPolytope,
    hint: Option<&CoefficientVector>,
) -> Result<CoefficientVector, Error> {
    let n = p.len();

    if let Some(gamma) = hint {
        if gamma.values.len() == n {
            let h = gamma.total();
            if (n as f64 - h).abs() > CLAMP_TOL {
                let t = (p.cardinality - h) / (n as f64 - h);
                if (-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&t) {
                    let values: Vec<f64> =
                        gamma.values.iter().map(|&g| (g + t * (1.0 - g)).clamp(0.0, 1.0)).collect();
                    let alpha = CoefficientVector::new(values);
                    if p.contains(&alpha, RESIDUAL_TOL) {
                        return Ok(alpha);
                    }
                }
            }
        }
    }

    if p.fixed_ones.is_empty() && p.fixed_zeros.is_empty() && n > 0 {
        let u = p.cardinality / n as f64;
        let mut scaled = vec![0.0; p.dim()];
        for v in &p.vectors {
            for (sj, vj) in scaled.iter_mut().zip(v) {
                *sj += u * vj;
            }
        }
        let diff: Vec<f64> =
            scaled.iter().zip(&p.target_sum).map(|(a, b)| a - b).collect();
        if linf(&diff) <= RESIDUAL_TOL {
            return Ok(CoefficientVector::new(vec![u; n]));
        }
    }

    phase1_start(p)
}

/// Phase-1 LP: free coordinates plus slacks for the upper bounds.
fn phase1_start(p: &CoefficientPolytope) -> Result<CoefficientVector, Error> {
    let n = p.len();
    let d = p.dim();
    let free: Vec<usize> = (0..n).filter(|&i| !p.is_fixed(i)).collect();
    let nf = free.len();

    let mut rhs = p.target_sum.clone();
    for &i in &p.fixed_ones {
        for (rj, vj) in rhs.iter_mut().zip(&p.vectors[i]) {
            *rj -= vj;
        }
    }
    let card_rhs = p.cardinality - p.fixed_ones.len() as f64;

    if nf == 0 {
        // Fully pinned: feasible iff the fixed part already meets the target.
        let alpha = pinned_vector(p);
        return if p.contains(&alpha, RESIDUAL_TOL) { Ok(alpha) } else { Err(Error::Infeasible) };
    }

    // Columns: alpha_f (nf), slack_f (nf). Rows: d sum rows, 1 cardinality
    // row, nf box rows (alpha_f + slack_f = 1).
    let rows = d + 1 + nf;
    let cols = 2 * nf;
    let mut a = Matrix::zeros(rows, cols);
    let mut b = vec![0.0; rows];
    for (r, rv) in rhs.iter().enumerate() {
        for (j, &i) in free.iter().enumerate() {
            a[(r, j)] = p.vectors[i][r];
        }
        b[r] = *rv;
    }
    for j in 0..nf {
        a[(d, j)] = 1.0;
    }
    b[d] = card_rhs;
    for j in 0..nf {
        a[(d + 1 + j, j)] = 1.0;
        a[(d + 1 + j, nf + j)] = 1.0;
        b[d + 1 + j] = 1.0;
    }

    match solve_standard_form(&a, &b, &vec![0.0; cols]) {
        StandardFormOutcome::Optimal { x, .. } => {
            let mut alpha = pinned_vector(p);
            for (j, &i) in free.iter().enumerate() {
                alpha.values[i] = x[j].clamp(0.0, 1.0);
            }
            if p.contains(&alpha, RESIDUAL_TOL) {
                Ok(alpha)
            } else {
                Err(Error::Infeasible)
            }
        }
        _ => Err(Error::Infeasible),
    }
}

fn pinned_vector(p: &CoefficientPolytope) -> CoefficientVector {
    let mut values = vec![0.0; p.len()];
    for &i in &p.fixed_ones {
        values[i] = 1.0;
    }
    CoefficientVector::new(values)
}

fn clamp_near_bounds(values: &mut [f64]) {
    for v in values {
        if v.abs() <= CLAMP_TOL {
            *v = 0.0;
        } else if (*v - 1.0).abs() <= CLAMP_TOL {
            *v = 1.0;
        }
    }
}

/// Descends a point of `P` to a vertex.
///
/// While the columns `(v_i; 1)` over the fractional support are linearly
/// dependent, moves along a kernel direction until a coordinate reaches a
/// bound, preferring whichever direction hits a bound sooner. Fixed
/// indices never move. Terminates because every move retires at least one
/// fractional coordinate.
pub fn descend_to_vertex(
    p: &CoefficientPolytope,
    alpha: &CoefficientVector,
) -> CoefficientVector {
    let n = p.len();
    assert_eq!(alpha.values.len(), n);
    let mut values = alpha.values.clone();
    clamp_near_bounds(&mut values);

    for _round in 0..=n {
        let free: Vec<usize> = (0..n)
            .filter(|&i| !p.is_fixed(i) && values[i] > 0.0 && values[i] < 1.0)
            .collect();
        if free.is_empty() {
            break;
        }
        let mut cols = Vec::with_capacity(free.len());
        for &i in &free {
            let mut col = p.vectors[i].clone();
            col.push(1.0);
            cols.push(col);
        }
        let m = Matrix::from_columns(&cols);
        let Some(beta) = kernel_vector(&m) else {
            break; // columns independent: this is a vertex
        };

        // Largest step in each direction before a coordinate leaves [0,1].
        let step = |sign: f64| -> f64 {
            let mut t = f64::INFINITY;
            for (j, &i) in free.iter().enumerate() {
                let b = sign * beta[j];
                if b > 0.0 {
                    t = t.min((1.0 - values[i]) / b);
                } else if b < 0.0 {
                    t = t.min(values[i] / -b);
                }
            }
            t
        };
        let t_pos = step(1.0);
        let t_neg = step(-1.0);
        let (t, sign) = if t_pos <= t_neg { (t_pos, 1.0) } else { (t_neg, -1.0) };
        assert!(t.is_finite() && t > 0.0, "kernel direction must move some coordinate");

        for (j, &i) in free.iter().enumerate() {
            values[i] += sign * t * beta[j];
        }
        clamp_near_bounds(&mut values);
        debug_assert!(
            p.residual(&CoefficientVector::new(values.clone())) <= RESIDUAL_TOL,
            "descent drifted off the constraint set"
        );
    }

    CoefficientVector::new(values)
}

/// Splits a (clamped) coefficient vector into ones, fractional, zeros.
pub fn decompose(alpha: &CoefficientVector) -> VertexDecomposition {
    let mut ones = Vec::new();
    let mut fractional = Vec::new();
    let mut zeros = Vec::new();
    for (i, &v) in alpha.values.iter().enumerate() {
        if v >= 1.0 - CLAMP_TOL {
            ones.push(i);
        } else if v <= CLAMP_TOL {
            zeros.push(i);
        } else {
            fractional.push((i, v));
        }
    }
    VertexDecomposition { ones, fractional, zeros }
}

/// Applies the refinement step to a vertex with exactly `d + 1`
/// fractional coordinates.
///
/// The `d + 1` fractional vectors are dependent, so they carry a kernel
/// direction `beta`; oriented to have nonpositive total and followed as
/// far as the box allows, it parks one more coordinate at a bound while
/// keeping the weighted sum equal to the target.
pub fn gamma_refine(
    p: &CoefficientPolytope,
    alpha: &CoefficientVector,
    decomp: &VertexDecomposition,
) -> Result<GammaRefinement, Error> {
    let d = p.dim();
    let q: Vec<usize> = decomp.fractional_indices();
    if q.len() != d + 1 {
        return Err(Error::InvalidInput(format!(
            "gamma refinement needs d+1 = {} fractional coordinates, got {}",
            d + 1,
            q.len()
        )));
    }

    let cols: Vec<Vec<f64>> = q.iter().map(|&i| p.vectors[i].clone()).collect();
    let m = Matrix::from_columns(&cols);
    let Some(mut beta_q) = kernel_vector(&m) else {
        return Err(Error::Degenerate("no kernel direction among d+1 vectors".into()));
    };
    if beta_q.iter().sum::<f64>() > 0.0 {
        for b in &mut beta_q {
            *b = -*b;
        }
    }

    let mut t = f64::INFINITY;
    let mut v_star = usize::MAX;
    let mut v_star_value = 0u8;
    for (j, &i) in q.iter().enumerate() {
        let b = beta_q[j];
        let (cand, value) = if b > 0.0 {
            ((1.0 - alpha.values[i]) / b, 1u8)
        } else if b < 0.0 {
            (alpha.values[i] / -b, 0u8)
        } else {
            continue;
        };
        if cand < t {
            t = cand;
            v_star = i;
            v_star_value = value;
        }
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Degenerate("no positive step to a bound".into()));
    }

    let mut values = alpha.values.clone();
    let mut beta = vec![0.0; p.len()];
    for (j, &i) in q.iter().enumerate() {
        values[i] += t * beta_q[j];
        beta[i] = beta_q[j];
    }
    clamp_near_bounds(&mut values);
    values[v_star] = f64::from(v_star_value);

    let q_star: Vec<usize> = q.iter().copied().filter(|&i| i != v_star).collect();
    Ok(GammaRefinement {
        gamma: CoefficientVector::new(values),
        beta,
        t,
        v_star,
        v_star_value,
        q_star,
    })
}
