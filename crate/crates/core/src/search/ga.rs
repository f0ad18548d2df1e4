//! Single-objective GA: same variation pipeline as NSGA-II, with
//! tournament selection on the scalar objective for both parents and
//! survivors.

use rand::seq::index;
use rand::Rng;

use super::variation::{self, oriented};
use super::{Evaluated, GenerationSnapshot, RunContext, RunLog, SearchConfig, SearchError, Strategy};
use crate::evaluation::{EvaluationCache, Evaluator};
use crate::genotype::KeywordPools;
use crate::seed;

fn scalar(population: &[Evaluated], cfg: &SearchConfig) -> Vec<f64> {
    oriented(population, &cfg.objective_spec)
        .into_iter()
        .map(|v| v[0])
        .collect()
}

/// Best (lowest oriented value) of `k` draws with replacement.
fn tournament<R: Rng>(rng: &mut R, values: &[f64], k: usize) -> usize {
    let mut best = rng.gen_range(0..values.len());
    for _ in 1..k {
        let c = rng.gen_range(0..values.len());
        if values[c] < values[best] {
            best = c;
        }
    }
    best
}

/// Picks `mu` survivors by repeated tournaments without replacement: each
/// winner leaves the candidate pool.
fn tournament_survivors<R: Rng>(rng: &mut R, values: &[f64], mu: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..values.len()).collect();
    let mut survivors = Vec::with_capacity(mu);
    while survivors.len() < mu && !pool.is_empty() {
        let size = k.min(pool.len());
        let picks = index::sample(rng, pool.len(), size);
        let winner_slot = picks
            .iter()
            .min_by(|&a, &b| values[pool[a]].total_cmp(&values[pool[b]]).then(pool[a].cmp(&pool[b])))
            .expect("non-empty tournament");
        survivors.push(pool.remove(winner_slot));
    }
    survivors
}

pub fn run_single_objective_ga(
    cfg: &SearchConfig,
    pools: &KeywordPools,
    evaluator: &mut dyn Evaluator,
) -> Result<RunLog, SearchError> {
    cfg.validate()?;
    if cfg.objective_spec.len() != 1 {
        return Err(SearchError::Config(format!(
            "single-objective GA needs exactly one objective, got {}",
            cfg.objective_spec.len()
        )));
    }
    let spec = cfg.objective_spec.clone();
    let mut rng = seed::rng(crate::derive_seed!(cfg.seed, "ga"));
    let cache = EvaluationCache::new();
    let mut ctx = RunContext::new(cfg, pools, evaluator, &cache, &cfg.base_prompt);

    let initial = variation::initial_population(&mut rng, cfg, pools);
    let (mut population, fresh) = ctx.evaluate_all(initial)?;
    let mut snapshots = vec![GenerationSnapshot {
        generation_index: 0,
        front_ranks: variation::front_ranks(&population, &spec),
        new_evaluations: fresh,
        population: population.clone(),
    }];

    for generation in 1..=cfg.generations {
        let values = scalar(&population, cfg);
        let children = variation::offspring(&mut rng, cfg, pools, &population, |rng| {
            tournament(rng, &values, cfg.tournament_size)
        });
        let (evaluated, fresh) = ctx.evaluate_all(children)?;
        let mut merged = population;
        merged.extend(evaluated);
        let merged_values = scalar(&merged, cfg);
        let keep = tournament_survivors(&mut rng, &merged_values, cfg.population_size, cfg.tournament_size);
        population = keep.into_iter().map(|i| merged[i].clone()).collect();
        snapshots.push(GenerationSnapshot {
            generation_index: generation,
            front_ranks: variation::front_ranks(&population, &spec),
            new_evaluations: fresh,
            population: population.clone(),
        });
    }

    Ok(RunLog {
        strategy: Strategy::GaSingle,
        config: cfg.clone(),
        final_front: variation::final_front(&population, &spec),
        snapshots,
        total_evaluations: ctx.total_evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survivors_are_distinct_and_keep_the_best() {
        let values: Vec<f64> = (0..35).map(|i| f64::from(i) * 0.1).collect();
        let mut rng = seed::rng(1);
        let keep = tournament_survivors(&mut rng, &values, 30, 5);
        let mut sorted = keep.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 30);
        assert!(keep.contains(&0));
    }

    #[test]
    fn tournament_of_whole_population_picks_best_often() {
        let values = [3.0, 1.0, 2.0];
        let mut rng = seed::rng(2);
        let wins = (0..1000).filter(|_| tournament(&mut rng, &values, 5) == 1).count();
        assert!(wins > 800);
    }
}
