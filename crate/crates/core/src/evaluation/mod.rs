//! Evaluators turn an individual into a batch of per-image records.
//!
//! Three pieces live here: the [`Evaluator`] contract with its synthetic
//! and bridge implementations, the genotype-keyed [`EvaluationCache`], and
//! [`EvaluationSession`], which renders prompts, derives request seeds and
//! routes calls through the cache for one search run.

mod cache;
mod client;
pub mod conformance;
pub mod protocol;
pub mod stub;
pub mod synthetic;

use thiserror::Error;

pub use cache::{CacheKey, EvaluationCache};
pub use client::{BridgeClient, Endpoint};
pub use protocol::{EvaluationRequest, EvaluationResponse};
pub use synthetic::{synthetic_evaluate, SyntheticEvaluator, SyntheticLandscape};

use crate::derive_seed;
use crate::genotype::{GenotypeError, Individual, KeywordPools, SearchBounds};
use crate::objectives::{EvaluationBatch, ImageRecord, ObjectiveError};

pub const DEFAULT_IMAGES_PER_INDIVIDUAL: u32 = 20;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("evaluator unavailable: {0}")]
    Unavailable(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("evaluator timed out")]
    Timeout,
    #[error("evaluator rejected request: {0}")]
    Rejected(String),
    #[error(transparent)]
    Genotype(#[from] GenotypeError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Anything that can answer an evaluation request.
pub trait Evaluator {
    fn evaluate(&mut self, request: &EvaluationRequest) -> Result<Vec<ImageRecord>, EvalError>;
}

impl<E: Evaluator + ?Sized> Evaluator for &mut E {
    fn evaluate(&mut self, request: &EvaluationRequest) -> Result<Vec<ImageRecord>, EvalError> {
        (**self).evaluate(request)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Box<E> {
    fn evaluate(&mut self, request: &EvaluationRequest) -> Result<Vec<ImageRecord>, EvalError> {
        (**self).evaluate(request)
    }
}

/// Request seeds stay below 2^53 so they survive JSON number handling on
/// the bridge side.
const SEED_MASK: u64 = (1 << 53) - 1;

/// Seed of the images generated for a genotype within a run.
pub fn request_seed(run_seed: u64, genotype_key: &str, base_prompt: &str) -> u64 {
    derive_seed!(run_seed, genotype_key, base_prompt) & SEED_MASK
}

/// Evaluation state for one run: prompt rendering, seeds, caching and
/// call accounting.
pub struct EvaluationSession<'a> {
    evaluator: &'a mut dyn Evaluator,
    cache: Option<&'a EvaluationCache>,
    pub pools: &'a KeywordPools,
    pub bounds: &'a SearchBounds,
    pub base_prompt: String,
    pub images: u32,
    pub run_seed: u64,
    next_request_id: u64,
    evaluator_calls: usize,
}

impl<'a> EvaluationSession<'a> {
    pub fn new(
        evaluator: &'a mut dyn Evaluator,
        pools: &'a KeywordPools,
        bounds: &'a SearchBounds,
        base_prompt: impl Into<String>,
        images: u32,
        run_seed: u64,
    ) -> Self {
        Self {
            evaluator,
            cache: None,
            pools,
            bounds,
            base_prompt: base_prompt.into(),
            images,
            run_seed,
            next_request_id: 1,
            evaluator_calls: 0,
        }
    }

    pub fn with_cache(mut self, cache: &'a EvaluationCache) -> Self {
        self.cache = Some(cache);
        self
    }

    /// Number of requests actually sent to the evaluator.
    pub fn evaluator_calls(&self) -> usize {
        self.evaluator_calls
    }

    pub fn build_request(&mut self, ind: &Individual) -> Result<EvaluationRequest, EvalError> {
        let prompts = ind.render_prompts(&self.base_prompt, self.pools)?;
        let request_id = self.next_request_id;
        self.next_request_id += 1;
        Ok(EvaluationRequest {
            request_id,
            positive_prompt: prompts.positive_prompt,
            negative_prompt: prompts.negative_prompt,
            guidance_scale: ind.guidance_scale(),
            inference_steps: ind.inference_steps,
            image_count: self.images,
            seed: request_seed(self.run_seed, &ind.canonical_key(), &self.base_prompt),
        })
    }

    fn call(&mut self, ind: &Individual) -> Result<EvaluationBatch, EvalError> {
        let request = self.build_request(ind)?;
        self.evaluator_calls += 1;
        let records = self.evaluator.evaluate(&request)?;
        if records.len() != request.image_count as usize {
            return Err(EvalError::Protocol(format!(
                "expected {} records, got {}",
                request.image_count,
                records.len()
            )));
        }
        Ok(EvaluationBatch::new(ind.canonical_key(), records)?)
    }

    /// Evaluates `ind`, reusing a cached batch when one exists. Individuals
    /// are validated against the bounds and pools first.
    pub fn evaluate(&mut self, ind: &Individual) -> Result<(EvaluationBatch, bool), EvalError> {
        ind.validate(self.bounds, self.pools)?;
        match self.cache {
            Some(cache) => {
                let key = CacheKey {
                    genotype: ind.canonical_key(),
                    base_prompt: self.base_prompt.clone(),
                    run_seed: self.run_seed,
                };
                cache.get_or_evaluate(key, || self.call(ind))
            }
            None => Ok((self.call(ind)?, false)),
        }
    }
}
