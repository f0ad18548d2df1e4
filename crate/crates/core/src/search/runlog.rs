//! Replayable trace of one search run, persisted as JSONL: a header line,
//! one line per generation, and a trailer carrying the final front.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{SearchConfig, Strategy};
use crate::genotype::Individual;
use crate::objectives::FitnessVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluated {
    pub individual: Individual,
    pub fitness: FitnessVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSnapshot {
    pub generation_index: usize,
    pub population: Vec<Evaluated>,
    pub new_evaluations: usize,
    pub front_ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub strategy: Strategy,
    pub config: SearchConfig,
    pub snapshots: Vec<GenerationSnapshot>,
    /// Non-dominated, genotype-unique members of the final population.
    pub final_front: Vec<Evaluated>,
    pub total_evaluations: usize,
}

#[derive(Debug, Error)]
pub enum RunLogError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("run log is missing its {0}")]
    Missing(&'static str),
    #[error("line {0}: unexpected record")]
    Unexpected(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header {
        strategy: Strategy,
        seed: u64,
        config: SearchConfig,
    },
    Generation(GenerationSnapshot),
    FinalFront {
        total_evaluations: usize,
        front: Vec<Evaluated>,
    },
}

impl RunLog {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn final_generation(&self) -> usize {
        self.snapshots.last().map_or(0, |s| s.generation_index)
    }

    pub fn final_population(&self) -> &[Evaluated] {
        self.snapshots.last().map_or(&[], |s| &s.population)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &Line| {
            out.push_str(&serde_json::to_string(line).expect("run log serializes"));
            out.push('\n');
        };
        push(&Line::Header {
            strategy: self.strategy,
            seed: self.config.seed,
            config: self.config.clone(),
        });
        for snap in &self.snapshots {
            push(&Line::Generation(snap.clone()));
        }
        push(&Line::FinalFront {
            total_evaluations: self.total_evaluations,
            front: self.final_front.clone(),
        });
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, RunLogError> {
        let mut header = None;
        let mut snapshots = Vec::new();
        let mut trailer = None;
        for (i, raw) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let line: Line = serde_json::from_str(raw).map_err(|source| RunLogError::Json { line: i + 1, source })?;
            match line {
                Line::Header { strategy, config, .. } if header.is_none() => header = Some((strategy, config)),
                Line::Generation(s) if header.is_some() && trailer.is_none() => snapshots.push(s),
                Line::FinalFront {
                    total_evaluations,
                    front,
                } if header.is_some() && trailer.is_none() => trailer = Some((total_evaluations, front)),
                _ => return Err(RunLogError::Unexpected(i + 1)),
            }
        }
        let (strategy, config) = header.ok_or(RunLogError::Missing("header"))?;
        let (total_evaluations, final_front) = trailer.ok_or(RunLogError::Missing("final front"))?;
        Ok(Self {
            strategy,
            config,
            snapshots,
            final_front,
            total_evaluations,
        })
    }
}
