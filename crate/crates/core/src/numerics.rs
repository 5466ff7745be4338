//! Dense linear algebra and a minimal equality-form LP solver.
//!
//! Everything here works in plain `f64` on small, well-scaled systems.
//! Rank decisions use a tolerance relative to the largest pivot, and the
//! simplex method pivots by Bland's rule so that degenerate inputs cannot
//! cycle and identical inputs always produce identical output.

use crate::Error;

/// Relative rank tolerance for Gaussian elimination.
pub const RANK_TOL: f64 = 1e-9;
/// Pivot / reduced-cost tolerance inside the simplex method.
const SIMPLEX_TOL: f64 = 1e-9;
/// A phase-1 objective above this value means the system is infeasible.
const FEAS_TOL: f64 = 1e-7;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count must be rows*cols");
        assert!(entries.iter().all(|x| x.is_finite()), "entries must be finite");
        Matrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![0.0; rows * cols] }
    }

    /// Builds a matrix whose j-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// A non-trivial solution of `M x = 0`, if the columns of `M` are
/// linearly dependent.
///
/// The returned vector is scaled so that its largest-magnitude entry is
/// exactly 1; `None` means the columns are independent at the rank
/// tolerance. The choice of kernel direction is deterministic: the first
/// non-pivot column (in input order) gets coefficient 1.
pub fn kernel_vector(m: &Matrix) -> Option<Vec<f64>> {
    let (rows, cols) = (m.rows, m.cols);
    if cols == 0 {
        return None;
    }

    let scale = m.entries.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let tol = RANK_TOL * scale.max(1e-300);

    // Row echelon form with partial pivoting; track pivot columns.
    let mut a = m.clone();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let mut best = row;
        for r in row + 1..rows {
            if a[(r, col)].abs() > a[(best, col)].abs() {
                best = r;
            }
        }
        if a[(best, col)].abs() <= tol {
            continue; // free column
        }
        if best != row {
            for j in 0..cols {
                let tmp = a[(row, j)];
                a[(row, j)] = a[(best, j)];
                a[(best, j)] = tmp;
            }
        }
        let p = a[(row, col)];
        for r in row + 1..rows {
            let f = a[(r, col)] / p;
            if f != 0.0 {
                for j in col..cols {
                    a[(r, j)] -= f * a[(row, j)];
                }
            }
        }
        pivot_cols.push(col);
        pivot_rows.push(row);
        row += 1;
    }

    if pivot_cols.len() == cols {
        return None;
    }

    let free = (0..cols).find(|c| !pivot_cols.contains(c)).expect("free column exists");
    let mut beta = vec![0.0; cols];
    beta[free] = 1.0;
    // Back-substitute the pivot variables against the echelon form.
    for idx in (0..pivot_cols.len()).rev() {
        let (r, c) = (pivot_rows[idx], pivot_cols[idx]);
        let mut s = 0.0;
        for j in c + 1..cols {
            s += a[(r, j)] * beta[j];
        }
        beta[c] = -s / a[(r, c)];
    }

    // Normalize so the largest-magnitude entry is exactly 1.
    let imax = (0..cols)
        .max_by(|&i, &j| beta[i].abs().partial_cmp(&beta[j].abs()).unwrap())
        .unwrap();
    let div = beta[imax];
    for b in &mut beta {
        *b /= div;
    }
    Some(beta)
}

/// Outcome of a linear program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution of a minimum-ℓ1-combination program.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Signed coefficients, one per column of the input matrix.
    pub coefficients: Vec<f64>,
    /// Sum of the absolute coefficients at the optimum.
    pub objective: f64,
    pub status: LpStatus,
}

/// Minimizes `sum_i |a_i|` subject to `A a = x`.
///
/// Solved as the split-variable standard-form program `a = p - q`,
/// `p, q >= 0`, objective `sum(p + q)`, with two-phase simplex and
/// Bland's pivoting rule.
pub fn min_l1_combination(a: &Matrix, x: &[f64]) -> Result<LpSolution, Error> {
    if x.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: x.len() });
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("right-hand side must be finite".into()));
    }
    let m = a.rows();
    let n = a.cols();

    // Columns: p_0..p_{n-1}, q_0..q_{n-1}.
    let mut cons = Matrix::zeros(m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            cons[(i, j)] = a[(i, j)];
            cons[(i, n + j)] = -a[(i, j)];
        }
    }
    let cost = vec![1.0; 2 * n];

    let out = solve_standard_form(&cons, x, &cost);
    Ok(match out {
        StandardFormOutcome::Optimal { x: split, objective } => {
            let coefficients: Vec<f64> = (0..n).map(|j| split[j] - split[n + j]).collect();
            LpSolution { coefficients, objective, status: LpStatus::Optimal }
        }
        StandardFormOutcome::Infeasible => {
            LpSolution { coefficients: vec![0.0; n], objective: 0.0, status: LpStatus::Infeasible }
        }
        StandardFormOutcome::Unbounded => {
            LpSolution { coefficients: vec![0.0; n], objective: 0.0, status: LpStatus::Unbounded }
        }
    })
}

/// Result of [`solve_standard_form`].
#[derive(Debug, Clone, PartialEq)]
pub enum StandardFormOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Minimizes `c . x` subject to `A x = b`, `x >= 0`.
///
/// Dense two-phase tableau simplex. Entering variable: smallest index
/// with a negative reduced cost; leaving variable: smallest ratio, ties
/// by smallest basic index (Bland's rule on both ends).
pub fn solve_standard_form(a: &Matrix, b: &[f64], c: &[f64]) -> StandardFormOutcome {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);

    // Tableau layout: n structural columns, m artificial columns, rhs.
    let width = n + m + 1;
    let mut t = vec![vec![0.0_f64; width]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[(i, j)];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let mut phase_cost = vec![0.0_f64; n + m];
    for j in n..n + m {
        phase_cost[j] = 1.0;
    }
    if run_simplex(&mut t, &mut basis, &phase_cost, n + m) == SimplexRun::Unbounded {
        // Cannot happen: the phase-1 objective is bounded below by zero.
        return StandardFormOutcome::Unbounded;
    }
    let phase1_obj: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= n)
        .map(|(i, _)| t[i][width - 1])
        .sum();
    if phase1_obj > FEAS_TOL {
        return StandardFormOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > SIMPLEX_TOL) {
                pivot(&mut t, &mut basis, i, j);
            }
            // A row with no structural pivot is redundant; its basic
            // artificial stays at value ~0 and never re-enters.
        }
    }

    // Phase 2 over the structural columns only.
    let mut cost2 = vec![0.0_f64; n + m];
    cost2[..n].copy_from_slice(c);
    if run_simplex(&mut t, &mut basis, &cost2, n) == SimplexRun::Unbounded {
        return StandardFormOutcome::Unbounded;
    }

    let mut x = vec![0.0_f64; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    StandardFormOutcome::Optimal { x, objective }
}

#[derive(Debug, PartialEq, Eq)]
enum SimplexRun {
    Optimal,
    Unbounded,
}

/// Runs Bland-rule simplex iterations in place. Only the first
/// `active_cols` columns are eligible to enter the basis.
fn run_simplex(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], active_cols: usize) -> SimplexRun {
    let m = t.len();
    let width = t[0].len();
    loop {
        // Reduced costs: c_j - c_B . B^{-1} A_j, computed from the tableau.
        let mut entering = None;
        for j in 0..active_cols {
            if basis.contains(&j) {
                continue;
            }
            let mut red = cost[j];
            for i in 0..m {
                red -= cost[basis[i]] * t[i][j];
            }
            if red < -SIMPLEX_TOL {
                entering = Some(j);
                break; // Bland: first eligible index
            }
        }
        let Some(j) = entering else { return SimplexRun::Optimal };

        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][j] > SIMPLEX_TOL {
                let ratio = t[i][width - 1] / t[i][j];
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - SIMPLEX_TOL
                            || (ratio < lr + SIMPLEX_TOL && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leaving else { return SimplexRun::Unbounded };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let width = t[0].len();
    let p = t[row][col];
    for v in &mut t[row] {
        *v /= p;
    }
    for i in 0..t.len() {
        if i != row {
            let f = t[i][col];
            if f != 0.0 {
                for j in 0..width {
                    t[i][j] -= f * t[row][j];
                }
            }
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn residual_inf(m: &Matrix, beta: &[f64]) -> f64 {
        m.mul_vec(beta).iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
    }

    #[test]
    fn kernel_of_identity_is_none() {
        let m = Matrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(kernel_vector(&m), None);
    }

    #[test]
    fn kernel_of_single_row() {
        let m = Matrix::new(1, 2, vec![1.0, 1.0]);
        let beta = kernel_vector(&m).unwrap();
        assert_eq!(beta, vec![1.0, -1.0]);
        assert!(residual_inf(&m, &beta) <= 1e-8);
    }

    #[test]
    fn kernel_of_two_by_three() {
        let m = Matrix::new(2, 3, vec![1.0, 1.0, 1.0, 0.0, 1.0, 2.0]);
        let beta = kernel_vector(&m).unwrap();
        assert!(residual_inf(&m, &beta) <= 1e-8);
        // Proportional to (1, -2, 1).
        let ratio = beta[0] / 1.0;
        assert!((beta[1] - ratio * -2.0).abs() <= 1e-9);
        assert!((beta[2] - ratio * 1.0).abs() <= 1e-9);
        let maxmag = beta.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
        assert!((maxmag - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn kernel_of_zero_columns_is_none() {
        let m = Matrix::zeros(3, 0);
        assert_eq!(kernel_vector(&m), None);
    }

    #[test]
    fn lp_identity_gives_l1_norm() {
        let a = Matrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]);
        let sol = min_l1_combination(&a, &[3.0, -4.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 7.0).abs() <= 1e-9);
    }

    #[test]
    fn lp_prefers_combined_column() {
        // Columns e1, e2, (-1,-1); x = (1,1) is -1 times the third column.
        let a = Matrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]);
        let sol = min_l1_combination(&a, &[1.0, 1.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() <= 1e-9);
        assert!((sol.coefficients[2] + 1.0).abs() <= 1e-9);
    }

    #[test]
    fn lp_zero_target_is_zero() {
        let a = Matrix::from_columns(&[vec![1.0, 2.0], vec![0.5, -1.0]]);
        let sol = min_l1_combination(&a, &[0.0, 0.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.objective.abs() <= 1e-9);
    }

    #[test]
    fn lp_detects_infeasible_target() {
        // Single column spans a line; x off the line is unreachable.
        let a = Matrix::from_columns(&[vec![1.0, 0.0]]);
        let sol = min_l1_combination(&a, &[0.0, 1.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    /// Solves the square-ish system `cols * a = x` by elimination,
    /// independent of the simplex path. Returns None if inconsistent.
    fn solve_exact(cols: &[&[f64]], x: &[f64]) -> Option<Vec<f64>> {
        let d = x.len();
        let k = cols.len();
        let mut aug = vec![vec![0.0_f64; k + 1]; d];
        for i in 0..d {
            for (j, col) in cols.iter().enumerate() {
                aug[i][j] = col[i];
            }
            aug[i][k] = x[i];
        }
        let mut piv_rows = Vec::new();
        let mut r = 0;
        for c in 0..k {
            let best = (r..d).max_by(|&a_, &b_| {
                aug[a_][c].abs().partial_cmp(&aug[b_][c].abs()).unwrap()
            })?;
            if aug[best][c].abs() <= 1e-10 {
                return None; // dependent columns: skip this support
            }
            aug.swap(r, best);
            for rr in 0..d {
                if rr != r {
                    let f = aug[rr][c] / aug[r][c];
                    for cc in 0..=k {
                        aug[rr][cc] -= f * aug[r][cc];
                    }
                }
            }
            piv_rows.push(r);
            r += 1;
        }
        // Consistency of the remaining rows.
        for rr in r..d {
            if aug[rr][k].abs() > 1e-8 {
                return None;
            }
        }
        let mut a = vec![0.0; k];
        for (j, &pr) in piv_rows.iter().enumerate() {
            a[j] = aug[pr][k] / aug[pr][j];
        }
        Some(a)
    }

    /// Brute-force minimum of sum |a| over all independent column supports.
    fn enumerate_min_l1(a: &Matrix, x: &[f64]) -> Option<f64> {
        let d = a.rows();
        let m = a.cols();
        let cols: Vec<Vec<f64>> = (0..m).map(|j| (0..d).map(|i| a[(i, j)]).collect()).collect();
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << m) {
            let support: Vec<&[f64]> =
                (0..m).filter(|j| mask >> j & 1 == 1).map(|j| cols[j].as_slice()).collect();
            if support.len() > d {
                continue;
            }
            if let Some(sol) = solve_exact(&support, x) {
                let obj: f64 = sol.iter().map(|v| v.abs()).sum();
                if best.is_none_or(|b| obj < b) {
                    best = Some(obj);
                }
            }
        }
        best
    }

    #[test]
    fn lp_matches_basic_solution_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..250 {
            let d = rng.random_range(1..=4);
            let m = rng.random_range(1..=6);
            let mut a = Matrix::zeros(d, m);
            for i in 0..d {
                for j in 0..m {
                    a[(i, j)] = rng.random_range(-2.0..2.0);
                }
            }
            // Reachable target: random combination of the columns.
            let coeffs: Vec<f64> = (0..m).map(|_| rng.random_range(-1.5..1.5)).collect();
            let x = a.mul_vec(&coeffs);
            let sol = min_l1_combination(&a, &x).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal, "reachable target must be feasible");
            let brute = enumerate_min_l1(&a, &x).expect("enumeration finds a solution");
            assert!(
                (sol.objective - brute).abs() <= 1e-8,
                "lp {} vs enumeration {}",
                sol.objective,
                brute
            );
            let reached = a.mul_vec(&sol.coefficients);
            for (ri, xi) in reached.iter().zip(&x) {
                assert!((ri - xi).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn lp_is_deterministic() {
        let a = Matrix::from_columns(&[
            vec![1.0, 0.3, -0.2],
            vec![-0.5, 1.1, 0.0],
            vec![0.2, 0.2, 0.9],
            vec![-1.0, 0.4, 0.4],
        ]);
        let x = vec![0.3, -0.7, 0.25];
        let s1 = min_l1_combination(&a, &x).unwrap();
        let s2 = min_l1_combination(&a, &x).unwrap();
        assert_eq!(s1, s2);
        let bits1: Vec<u64> = s1.coefficients.iter().map(|v| v.to_bits()).collect();
        let bits2: Vec<u64> = s2.coefficients.iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits1, bits2);
    }

    proptest! {
        #[test]
        fn kernel_residual_is_small(rows in 1usize..5, cols in 1usize..7, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let entries: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-3.0..3.0)).collect();
            let m = Matrix::new(rows, cols, entries);
            if let Some(beta) = kernel_vector(&m) {
                let maxmag = beta.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
                prop_assert!((maxmag - 1.0).abs() <= 1e-12);
                prop_assert!(residual_inf(&m, &beta) <= 1e-8);
            } else {
                prop_assert!(cols <= rows);
            }
        }
    }
}
