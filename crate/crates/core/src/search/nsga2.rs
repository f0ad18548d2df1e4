//! NSGA-II with (mu + lambda) elitist replacement.

use std::cmp::Ordering;

use rand::Rng;

use super::dominance::{crowding_distance, non_dominated_sort};
use super::variation::{self, oriented};
use super::{Evaluated, GenerationSnapshot, RunContext, RunLog, SearchConfig, SearchError, Strategy};
use crate::evaluation::{EvaluationCache, Evaluator};
use crate::genotype::KeywordPools;
use crate::objectives::ObjectiveSpec;
use crate::seed;

/// Rank and crowding distance of every population member.
pub(crate) fn rank_and_crowding(points: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    let mut rank = vec![0; points.len()];
    let mut crowding = vec![0.0; points.len()];
    for (r, front) in non_dominated_sort(points).iter().enumerate() {
        let members: Vec<Vec<f64>> = front.iter().map(|&i| points[i].clone()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&members)) {
            rank[i] = r;
            crowding[i] = d;
        }
    }
    (rank, crowding)
}

/// Crowded-comparison: lower rank first, then larger crowding distance.
fn crowded_cmp(rank: &[usize], crowding: &[f64], a: usize, b: usize) -> Ordering {
    rank[a].cmp(&rank[b]).then_with(|| crowding[b].total_cmp(&crowding[a]))
}

/// Keeps `mu` members: whole fronts while they fit, then the most
/// crowding-distant members of the splitting front.
pub(crate) fn environmental_selection(points: &[Vec<f64>], mu: usize) -> Vec<usize> {
    let mut survivors = Vec::with_capacity(mu);
    for front in non_dominated_sort(points) {
        if survivors.len() + front.len() <= mu {
            survivors.extend(front);
            continue;
        }
        let members: Vec<Vec<f64>> = front.iter().map(|&i| points[i].clone()).collect();
        let distance = crowding_distance(&members);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| distance[b].total_cmp(&distance[a]).then(a.cmp(&b)));
        survivors.extend(order.into_iter().take(mu - survivors.len()).map(|k| front[k]));
        break;
    }
    survivors
}

fn snapshot(
    generation_index: usize,
    population: Vec<Evaluated>,
    fresh: usize,
    spec: &ObjectiveSpec,
) -> GenerationSnapshot {
    GenerationSnapshot {
        generation_index,
        front_ranks: variation::front_ranks(&population, spec),
        new_evaluations: fresh,
        population,
    }
}

/// Runs NSGA-II for `cfg.generations` generations after the initial one.
pub fn run_nsga2(
    cfg: &SearchConfig,
    pools: &KeywordPools,
    evaluator: &mut dyn Evaluator,
) -> Result<RunLog, SearchError> {
    cfg.validate()?;
    let spec = cfg.objective_spec.clone();
    let mut rng = seed::rng(crate::derive_seed!(cfg.seed, "nsga2"));
    let cache = EvaluationCache::new();
    let mut ctx = RunContext::new(cfg, pools, evaluator, &cache, &cfg.base_prompt);

    let initial = variation::initial_population(&mut rng, cfg, pools);
    let (mut population, fresh) = ctx.evaluate_all(initial)?;
    let mut snapshots = vec![snapshot(0, population.clone(), fresh, &spec)];

    for generation in 1..=cfg.generations {
        let points = oriented(&population, &spec);
        let (rank, crowding) = rank_and_crowding(&points);
        let n = population.len();
        let children = variation::offspring(&mut rng, cfg, pools, &population, |rng| {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if crowded_cmp(&rank, &crowding, b, a) == Ordering::Less {
                b
            } else {
                a
            }
        });
        let (evaluated, fresh) = ctx.evaluate_all(children)?;
        let mut merged = population;
        merged.extend(evaluated);
        let keep = environmental_selection(&oriented(&merged, &spec), cfg.population_size);
        population = keep.into_iter().map(|i| merged[i].clone()).collect();
        snapshots.push(snapshot(generation, population.clone(), fresh, &spec));
    }

    Ok(RunLog {
        strategy: Strategy::SustainDiffusion,
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
    fn truncation_prefers_rank_then_spread() {
        let pts = vec![
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.5, 0.5],
            vec![0.45, 0.55],
            vec![2.0, 2.0],
        ];
        let keep = environmental_selection(&pts, 3);
        assert_eq!(keep.len(), 3);
        assert!(keep.contains(&0) && keep.contains(&1));
        assert!(!keep.contains(&4));
    }
}
