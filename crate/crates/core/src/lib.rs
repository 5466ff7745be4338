//! Constructive selection of fixed-size subsets with small vector sums.
//!
//! Given a finite family `V` of vectors in the unit ball of a norm with
//! `s(V) = 0` and a cardinality `k`, this crate finds a `k`-element subset
//! whose sum has provably small norm. The machinery is built from a
//! coefficient polytope over the family: descending an interior point to a
//! vertex leaves at most `d + 1` fractional coefficients, and rounding or
//! reordering those few vectors yields the selection together with an
//! explicit certificate.
//!
//! The crate ships three pipelines (norm-independent, Euclidean, and
//! max-norm), subset chains that walk from the empty set to `V` one element
//! at a time, generators for the sharp instance families, and brute-force
//! oracles that certify results at desk scale.

pub mod euclidean;
pub mod instances;
pub mod maxnorm;
pub mod norms;
pub mod numerics;
pub mod polytope;
pub mod report;
pub mod selection;

pub use euclidean::{beck_round, select_subset_l2, steinitz_order_l2, L2Selection, Ordering, RoundingMethod, RoundingResult};
pub use instances::{
    gen_l1_lower, gen_l1_lower_k, gen_random_sumzero, gen_simplex_l2, gen_theorem2,
    oracle_min_subset, verify_lower_bound_small_k, Instance, OracleResult,
};
pub use maxnorm::{
    build_chain_linf, order_zero_sum_linf, select_subset_linf, spencer_round,
    steinitz_order_linf, Chain, ChainStage, LinfConstants, LinfSelection, SpencerRounding,
};
pub use norms::{dual_pairing, NormSpec};
pub use numerics::{kernel_vector, min_l1_combination, LpSolution, LpStatus, Matrix};
pub use polytope::{
    decompose, descend_to_vertex, feasible_start, gamma_refine, CoefficientPolytope,
    CoefficientVector, GammaRefinement, VertexDecomposition,
};
pub use selection::{
    helly_subset, select_subset, select_subset_targeted, GeneralSelection, HellySelection,
    SelectionTrace, SubsetSelection,
};

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The requested polytope or linear system has no point.
    #[error("infeasible: the constraint set is empty")]
    Infeasible,
    /// A polytopal norm was evaluated at a point outside the span of its
    /// generators.
    #[error("point is not representable by the norm generators")]
    Unrepresentable,
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    /// An enumeration guard tripped.
    #[error("enumeration too large: {combinations} subsets exceeds the {limit} limit")]
    TooLarge { combinations: u128, limit: u128 },
}

/// Sum of the vectors at `indices`.
pub(crate) fn sum_at(vectors: &[Vec<f64>], indices: &[usize]) -> Vec<f64> {
    let d = vectors.first().map_or(0, Vec::len);
    let mut s = vec![0.0; d];
    for &i in indices {
        for (sj, vj) in s.iter_mut().zip(&vectors[i]) {
            *sj += vj;
        }
    }
    s
}

/// Sum of all vectors in the family.
pub(crate) fn total_sum(vectors: &[Vec<f64>]) -> Vec<f64> {
    let all: Vec<usize> = (0..vectors.len()).collect();
    sum_at(vectors, &all)
}

pub(crate) fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
}
