use std::collections::HashMap;
use std::sync::Mutex;

use super::EvalError;
use crate::objectives::EvaluationBatch;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub genotype: String,
    pub base_prompt: String,
    pub run_seed: u64,
}

/// Genotype-keyed store of evaluation batches. Failed evaluations are never
/// stored.
#[derive(Debug, Default)]
pub struct EvaluationCache {
    entries: Mutex<HashMap<CacheKey, EvaluationBatch>>,
}

impl EvaluationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached batch, or runs `evaluate` and stores its result.
    /// The flag reports whether the batch came from the cache.
    pub fn get_or_evaluate<F>(&self, key: CacheKey, evaluate: F) -> Result<(EvaluationBatch, bool), EvalError>
    where
        F: FnOnce() -> Result<EvaluationBatch, EvalError>,
    {
        if let Some(hit) = self.entries.lock().unwrap().get(&key) {
            return Ok((hit.clone(), true));
        }
        // the lock is not held across the evaluator call
        let batch = evaluate()?;
        self.entries.lock().unwrap().insert(key, batch.clone());
        Ok((batch, false))
    }
}
