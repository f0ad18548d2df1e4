use std::collections::HashSet;

use rand::Rng;

use super::dominance::{non_dominated_sort, ranks};
use super::{Evaluated, SearchConfig};
use crate::genotype::{crossover_single_point, mutate, Individual, KeywordPools, GENE_COUNT};
use crate::objectives::ObjectiveSpec;

const DRAWS_PER_SLOT: usize = 100;

/// Random initial population without repeated genotypes. Gives up on
/// uniqueness only when the space is too small to fill the population.
pub fn initial_population<R: Rng>(rng: &mut R, cfg: &SearchConfig, pools: &KeywordPools) -> Vec<Individual> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(cfg.population_size);
    let mut attempts = 0;
    while out.len() < cfg.population_size {
        let ind = Individual::new_random(rng, &cfg.bounds, pools);
        attempts += 1;
        if seen.insert(ind.canonical_key()) || attempts > DRAWS_PER_SLOT * cfg.population_size {
            out.push(ind);
        }
    }
    out
}

/// Produces `cfg.selection_rate` offspring. Each pair of parents comes
/// from `select`, is crossed with probability `crossover_prob` at a random
/// interior cut, and each child is mutated with probability `mutation_prob`.
pub fn offspring<R: Rng, F>(
    rng: &mut R,
    cfg: &SearchConfig,
    pools: &KeywordPools,
    population: &[Evaluated],
    mut select: F,
) -> Vec<Individual>
where
    F: FnMut(&mut R) -> usize,
{
    let mut children = Vec::with_capacity(cfg.selection_rate);
    while children.len() < cfg.selection_rate {
        let a = &population[select(rng)].individual;
        let b = &population[select(rng)].individual;
        let (c1, c2) = if rng.gen_bool(cfg.crossover_prob) {
            // a cut after the last gene would copy the parents
            let cut = rng.gen_range(0..GENE_COUNT - 1);
            crossover_single_point(a, b, cut)
        } else {
            (a.clone(), b.clone())
        };
        for child in [c1, c2] {
            if children.len() == cfg.selection_rate {
                break;
            }
            let child = if rng.gen_bool(cfg.mutation_prob) {
                mutate(&child, rng, cfg.inner_mutation_prob, &cfg.bounds, pools)
            } else {
                child
            };
            children.push(child);
        }
    }
    children
}

pub fn oriented(population: &[Evaluated], spec: &ObjectiveSpec) -> Vec<Vec<f64>> {
    population
        .iter()
        .map(|e| spec.orient_values(&e.fitness.values))
        .collect()
}

pub fn front_ranks(population: &[Evaluated], spec: &ObjectiveSpec) -> Vec<usize> {
    ranks(&oriented(population, spec))
}

/// Non-dominated members, first occurrence of each genotype only.
pub fn final_front(population: &[Evaluated], spec: &ObjectiveSpec) -> Vec<Evaluated> {
    let points = oriented(population, spec);
    let Some(first) = non_dominated_sort(&points).into_iter().next() else {
        return Vec::new();
    };
    let mut seen = HashSet::new();
    first
        .into_iter()
        .filter(|&i| seen.insert(population[i].individual.canonical_key()))
        .map(|i| population[i].clone())
        .collect()
}
