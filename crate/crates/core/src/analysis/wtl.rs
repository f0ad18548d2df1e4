//! Win-tie-loss tabulation of paired comparisons across prompts.

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// How a tie is decided when a candidate does not win outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Strictly better in at least half (rounded up) of the objectives.
    #[default]
    StrictlyBetter,
    /// No worse in at least half (rounded up) of the objectives.
    NonWorse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Win,
    Tie,
    Loss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WinTieLoss {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

impl WinTieLoss {
    pub fn total(&self) -> usize {
        self.wins + self.ties + self.losses
    }

    pub fn add(&mut self, bucket: Bucket) {
        match bucket {
            Bucket::Win => self.wins += 1,
            Bucket::Tie => self.ties += 1,
            Bucket::Loss => self.losses += 1,
        }
    }
}

/// Classifies one comparison. Both vectors are in minimization orientation.
pub fn classify(candidate: &[f64], baseline: &[f64], rule: TieRule) -> Result<Bucket, AnalysisError> {
    if candidate.len() != baseline.len() {
        return Err(AnalysisError::Arity {
            expected: baseline.len(),
            got: candidate.len(),
        });
    }
    if candidate.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let k = candidate.len();
    let better = candidate.iter().zip(baseline).filter(|(c, b)| c < b).count();
    if better == k {
        return Ok(Bucket::Win);
    }
    let counted = match rule {
        TieRule::StrictlyBetter => better,
        TieRule::NonWorse => candidate.iter().zip(baseline).filter(|(c, b)| c <= b).count(),
    };
    Ok(if counted >= k.div_ceil(2) {
        Bucket::Tie
    } else {
        Bucket::Loss
    })
}

/// Tallies paired comparisons, one per prompt.
pub fn win_tie_loss(pairs: &[(Vec<f64>, Vec<f64>)], rule: TieRule) -> Result<WinTieLoss, AnalysisError> {
    let mut out = WinTieLoss::default();
    for (candidate, baseline) in pairs {
        out.add(classify(candidate, baseline, rule)?);
    }
    Ok(out)
}
