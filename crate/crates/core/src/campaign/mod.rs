//! Campaign orchestration: configuration, seeded strategy × repetition runs
//! with resumable checkpoints, the cross-prompt generalisation experiment,
//! and report generation.

pub mod config;
pub mod generalisation;
pub mod report;
pub mod run;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::evaluation::EvalError;
use crate::search::runlog::RunLogError;
use crate::search::SearchError;

pub use config::{AnalysisOptions, CampaignConfig, EvaluatorConfig, GeneralisationConfig, PoolPaths, PromptDataset};
pub use generalisation::{generalisation_experiment, tabulate, Entry, GeneralisationResult, PromptRow, WtlRow};
pub use report::{analyze, analyze_campaign, write_report, AnalysisReport, StrategyResults};
pub use run::{run_campaign, run_path, run_seed, CampaignSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EVALUATOR: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("evaluator: {0}")]
    Eval(#[from] EvalError),
    #[error("search: {0}")]
    Search(SearchError),
    #[error("{path}: {source}")]
    RunLog { path: PathBuf, source: RunLogError },
    #[error("analysis: {0}")]
    Analysis(#[from] AnalysisError),
    /// The campaign stopped part-way; completed runs are on disk and a
    /// rerun resumes after them.
    #[error("campaign interrupted after {completed} of {total} runs: {source}")]
    Interrupted {
        completed: usize,
        total: usize,
        source: Box<CampaignError>,
    },
}

impl From<SearchError> for CampaignError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Eval(e) => CampaignError::Eval(e),
            SearchError::Config(msg) => CampaignError::Config(msg),
            other => CampaignError::Search(other),
        }
    }
}

impl CampaignError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CampaignError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            CampaignError::Config(_) => EXIT_CONFIG,
            CampaignError::Eval(_) => EXIT_EVALUATOR,
            CampaignError::Interrupted { completed, source, .. } => match **source {
                CampaignError::Eval(_) if *completed == 0 => EXIT_EVALUATOR,
                CampaignError::Config(_) => EXIT_CONFIG,
                _ => EXIT_PARTIAL,
            },
            _ => EXIT_FAILURE,
        }
    }
}

/// Writes `contents` to `path` through a temporary file and a rename, so a
/// reader never sees a half-written file.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CampaignError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CampaignError::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| CampaignError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CampaignError::io(path, e))
}
