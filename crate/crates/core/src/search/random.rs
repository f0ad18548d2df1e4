use std::collections::HashSet;

use super::variation;
use super::{GenerationSnapshot, RunContext, RunLog, SearchConfig, SearchError, Strategy};
use crate::evaluation::{EvaluationCache, Evaluator};
use crate::genotype::{Individual, KeywordPools};
use crate::seed;

const MAX_REDRAWS: usize = 100;

/// Random search: `evals_per_iter` fresh individuals per iteration; the
/// front is taken over everything evaluated. Repeated genotypes are redrawn
/// up to 100 times before being accepted.
pub fn run_random_search(
    cfg: &SearchConfig,
    evals_per_iter: usize,
    iterations: usize,
    pools: &KeywordPools,
    evaluator: &mut dyn Evaluator,
) -> Result<RunLog, SearchError> {
    cfg.validate()?;
    if evals_per_iter == 0 {
        return Err(SearchError::Config("evals_per_iter must be at least 1".into()));
    }
    let spec = cfg.objective_spec.clone();
    let mut rng = seed::rng(crate::derive_seed!(cfg.seed, "random-search"));
    let cache = EvaluationCache::new();
    let mut ctx = RunContext::new(cfg, pools, evaluator, &cache, &cfg.base_prompt);

    let mut seen = HashSet::new();
    let mut archive = Vec::new();
    let mut snapshots = Vec::with_capacity(iterations);
    for iteration in 0..iterations {
        let mut batch = Vec::with_capacity(evals_per_iter);
        for _ in 0..evals_per_iter {
            let mut ind = Individual::new_random(&mut rng, &cfg.bounds, pools);
            for _ in 0..MAX_REDRAWS {
                if !seen.contains(&ind.canonical_key()) {
                    break;
                }
                ind = Individual::new_random(&mut rng, &cfg.bounds, pools);
            }
            seen.insert(ind.canonical_key());
            batch.push(ind);
        }
        let (evaluated, fresh) = ctx.evaluate_all(batch)?;
        archive.extend(evaluated.iter().cloned());
        snapshots.push(GenerationSnapshot {
            generation_index: iteration,
            front_ranks: variation::front_ranks(&evaluated, &spec),
            new_evaluations: fresh,
            population: evaluated,
        });
    }

    Ok(RunLog {
        strategy: Strategy::RandomSearch,
        config: cfg.clone(),
        final_front: variation::final_front(&archive, &spec),
        snapshots,
        total_evaluations: ctx.total_evaluations,
    })
}
