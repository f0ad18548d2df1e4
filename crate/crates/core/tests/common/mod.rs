//! Independent reference implementations used by the integration tests.
//! Each one is written from the definition, trading speed for clarity.

#![allow(dead_code)]

use rand::Rng;
use sdtune::evaluation::{SyntheticEvaluator, SyntheticLandscape};
use sdtune::genotype::KeywordPools;
use sdtune::objectives::{Metrics, Objective, ObjectiveSpec};
use sdtune::search::{run_strategy, RunLog, SearchConfig, Strategy};

/// Pareto dominance for minimization, from the definition.
pub fn oracle_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Non-dominated rank as the length of the longest chain of dominators:
/// rank 0 has no dominator, otherwise 1 + the largest dominator rank.
pub fn oracle_ranks(points: &[Vec<f64>]) -> Vec<usize> {
    fn rank(i: usize, points: &[Vec<f64>], memo: &mut [Option<usize>]) -> usize {
        if let Some(r) = memo[i] {
            return r;
        }
        let mut r = 0;
        for j in 0..points.len() {
            if oracle_dominates(&points[j], &points[i]) {
                r = r.max(rank(j, points, memo) + 1);
            }
        }
        memo[i] = Some(r);
        r
    }
    let mut memo = vec![None; points.len()];
    (0..points.len()).map(|i| rank(i, points, &mut memo)).collect()
}

/// Indices with no dominator, ascending.
pub fn oracle_front(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| oracle_dominates(q, &points[i])))
        .collect()
}

/// Random point cloud; on a coarse grid half the time so ties and duplicate
/// points are common.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, d: usize) -> Vec<Vec<f64>> {
    let grid = rng.gen_bool(0.5);
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    if grid {
                        f64::from(rng.gen_range(0..5u8))
                    } else {
                        rng.gen::<f64>()
                    }
                })
                .collect()
        })
        .collect()
}

/// Mutually non-dominated points: samples on the positive unit sphere.
pub fn random_front<R: Rng>(rng: &mut R, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| 1.0 - x / norm).collect()
        })
        .collect()
}

/// Monte-Carlo hypervolume: uniform samples in the box spanned by the ideal
/// point and the reference. Returns (estimate, standard error).
pub fn monte_carlo_hypervolume<R: Rng>(
    rng: &mut R,
    front: &[Vec<f64>],
    reference: &[f64],
    samples: usize,
) -> (f64, f64) {
    let d = reference.len();
    let lower: Vec<f64> = (0..d)
        .map(|k| front.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let box_volume: f64 = (0..d).map(|k| reference[k] - lower[k]).product();
    let mut hits = 0usize;
    let mut x = vec![0.0; d];
    for _ in 0..samples {
        for k in 0..d {
            x[k] = rng.gen_range(lower[k]..reference[k]);
        }
        if front.iter().any(|p| p.iter().zip(&x).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (box_volume * p, box_volume * (p * (1.0 - p) / samples as f64).sqrt())
}

/// 1-based average ranks by counting.
pub fn oracle_average_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let less = values.iter().filter(|x| *x < v).count() as f64;
            let equal = values.iter().filter(|x| *x == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Wilcoxon signed-rank p-values (greater, less) by enumerating all 2^n
/// sign assignments of the non-zero differences.
pub fn enumerate_wilcoxon(a: &[f64], b: &[f64]) -> (f64, f64) {
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = oracle_average_ranks(&abs);
    let observed: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = diffs.len();
    let (mut ge, mut le) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w >= observed - 1e-9 {
            ge += 1;
        }
        if w <= observed + 1e-9 {
            le += 1;
        }
    }
    let all = (1u64 << n) as f64;
    (ge as f64 / all, le as f64 / all)
}

/// Win-tie-loss bucket from the definition: 2 = win (strictly better in
/// every objective), 1 = tie (strictly better in at least half, rounded
/// up), 0 = loss. Minimization orientation.
pub fn oracle_bucket(candidate: &[f64], baseline: &[f64]) -> u8 {
    let better = candidate.iter().zip(baseline).filter(|(c, b)| c < b).count();
    if better == candidate.len() {
        2
    } else if 2 * better >= candidate.len() {
        1
    } else {
        0
    }
}

/// Seeds of one family of ten repetitions.
pub fn family_seeds(family: u64) -> Vec<u64> {
    (0..10).map(|s| family * 1000 + s).collect()
}

/// One run of `strategy` on the default synthetic landscape.
pub fn synthetic_run(strategy: Strategy, seed: u64, ga_objective: Objective) -> RunLog {
    let cfg = SearchConfig {
        seed,
        ..SearchConfig::default()
    };
    let pools = KeywordPools::default();
    let mut evaluator = SyntheticEvaluator::new(SyntheticLandscape::default());
    run_strategy(strategy, &cfg, ga_objective, &pools, &mut evaluator).expect("synthetic run succeeds")
}

/// Final front of a run oriented for minimization under `spec`.
pub fn oriented_front(log: &RunLog, spec: &ObjectiveSpec) -> Vec<Vec<f64>> {
    log.final_front
        .iter()
        .map(|e| spec.orient(&e.fitness.metrics))
        .collect()
}

pub fn metrics(values: [f64; 6]) -> Metrics {
    Metrics {
        image_quality: values[0],
        gender_bias: values[1],
        ethnic_bias: values[2],
        cpu_energy: values[3],
        gpu_energy: values[4],
        duration: values[5],
    }
}
