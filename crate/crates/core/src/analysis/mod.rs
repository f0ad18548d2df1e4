//! Comparison of search strategies: Pareto optimality counts, hypervolume,
//! non-parametric tests and win-tie-loss tabulation.

pub mod hypervolume;
pub mod pareto;
pub mod stats;
pub mod wtl;

use thiserror::Error;

pub use hypervolume::{hypervolume, reference_point, HvMode, Normalizer, ReferencePoint};
pub use pareto::{count_optimal_by_strategy, pareto_front, pareto_front_oriented};
pub use stats::{
    dunn_posthoc, kruskal_wallis, spearman, vargha_delaney_a12, wilcoxon_signed_rank, Alternative, DunnComparison,
    EffectClass, EffectSize, TestResult,
};
pub use wtl::{win_tie_loss, Bucket, TieRule, WinTieLoss};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("expected {expected} values per point, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("point {index} {point:?} lies beyond the reference point {reference:?}")]
    BeyondReference {
        index: usize,
        point: Vec<f64>,
        reference: Vec<f64>,
    },
    #[error("no data")]
    Empty,
    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("undefined: {0}")]
    Undefined(String),
}
