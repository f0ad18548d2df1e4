//! Search strategies and the run logs they produce.

pub mod dominance;
mod ga;
mod nsga2;
mod random;
pub mod runlog;
mod variation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dominance::{crowding_distance, dominates, fast_non_dominated_sort, non_dominated_sort};
pub use ga::run_single_objective_ga;
pub use nsga2::run_nsga2;
pub use random::run_random_search;
pub use runlog::{Evaluated, GenerationSnapshot, RunLog};

use crate::evaluation::{EvalError, EvaluationCache, EvaluationSession, Evaluator};
use crate::genotype::{Individual, KeywordPools, SearchBounds};
use crate::objectives::{fitness_vector, Objective, ObjectiveSpec};

/// Sentence appended to the base prompt by the fairness-prompt baseline.
pub const FAIR_PROMPT_SUFFIX: &str = "such that it fairly represents different genders and ethnicities";

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid search config: {0}")]
    Config(String),
    #[error("fitness vector has {got} values, objective spec has {expected}")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    SustainDiffusion,
    RandomSearch,
    #[serde(rename = "GA_Single")]
    GaSingle,
    #[serde(rename = "Ablation_Q")]
    AblationQ,
    #[serde(rename = "Ablation_QB")]
    AblationQB,
    #[serde(rename = "Ablation_QE")]
    AblationQE,
    NoPromptEng,
    SD3Default,
    FairPrompt,
}

impl Strategy {
    pub const ALL: [Strategy; 9] = [
        Strategy::SustainDiffusion,
        Strategy::RandomSearch,
        Strategy::GaSingle,
        Strategy::AblationQ,
        Strategy::AblationQB,
        Strategy::AblationQE,
        Strategy::NoPromptEng,
        Strategy::SD3Default,
        Strategy::FairPrompt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::SustainDiffusion => "SustainDiffusion",
            Strategy::RandomSearch => "RandomSearch",
            Strategy::GaSingle => "GA_Single",
            Strategy::AblationQ => "Ablation_Q",
            Strategy::AblationQB => "Ablation_QB",
            Strategy::AblationQE => "Ablation_QE",
            Strategy::NoPromptEng => "NoPromptEng",
            Strategy::SD3Default => "SD3Default",
            Strategy::FairPrompt => "FairPrompt",
        }
    }

    /// Objectives the strategy searches over. `ga_objective` applies to the
    /// single-objective GA only.
    pub fn objective_spec(self, ga_objective: Objective) -> ObjectiveSpec {
        use Objective::*;
        match self {
            Strategy::GaSingle => ObjectiveSpec::single(ga_objective),
            Strategy::AblationQ => ObjectiveSpec::single(ImageQuality),
            Strategy::AblationQB => ObjectiveSpec::new(vec![ImageQuality, GenderBias, EthnicBias]).unwrap(),
            Strategy::AblationQE => ObjectiveSpec::new(vec![ImageQuality, CpuEnergy]).unwrap(),
            _ => ObjectiveSpec::sustain_diffusion(),
        }
    }

    pub fn bounds(self, base: &SearchBounds) -> SearchBounds {
        match self {
            Strategy::NoPromptEng => SearchBounds {
                pos_count_max: 0,
                neg_count_max: 0,
                weight_min: 0,
                weight_max: 0,
                ..base.clone()
            },
            _ => base.clone(),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub inner_mutation_prob: f64,
    /// Offspring admitted into the (parents + offspring) pool per generation.
    pub selection_rate: usize,
    pub tournament_size: usize,
    pub objective_spec: ObjectiveSpec,
    pub seed: u64,
    pub images_per_individual: u32,
    pub base_prompt: String,
    pub bounds: SearchBounds,
    pub use_cache: bool,
    pub evals_per_iteration: usize,
    pub iterations: usize,
}

pub const DEFAULT_BASE_PROMPT: &str = "Photo portrait of a Software Engineer that codes";

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            generations: 25,
            crossover_prob: 0.8,
            mutation_prob: 0.2,
            inner_mutation_prob: 0.2,
            selection_rate: 5,
            tournament_size: 5,
            objective_spec: ObjectiveSpec::sustain_diffusion(),
            seed: 0,
            images_per_individual: 20,
            base_prompt: DEFAULT_BASE_PROMPT.to_string(),
            bounds: SearchBounds::default(),
            use_cache: true,
            evals_per_iteration: 4,
            iterations: 25,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let err = |m: &str| Err(SearchError::Config(m.to_string()));
        for p in [self.crossover_prob, self.mutation_prob, self.inner_mutation_prob] {
            if !(0.0..=1.0).contains(&p) {
                return err("probabilities must lie in [0, 1]");
            }
        }
        if self.population_size < 2 {
            return err("population_size must be at least 2");
        }
        if self.selection_rate == 0 || self.tournament_size == 0 {
            return err("selection_rate and tournament_size must be positive");
        }
        if self.images_per_individual == 0 {
            return err("images_per_individual must be positive");
        }
        if self.evals_per_iteration == 0 {
            return err("evals_per_iteration must be positive");
        }
        if self.base_prompt.trim().is_empty() {
            return err("base_prompt must not be empty");
        }
        self.bounds.validate().map_err(|e| SearchError::Config(e.to_string()))
    }
}

/// Shared evaluation plumbing for every strategy.
pub(crate) struct RunContext<'a> {
    pub session: EvaluationSession<'a>,
    pub spec: ObjectiveSpec,
    pub total_evaluations: usize,
}

impl<'a> RunContext<'a> {
    pub fn new(
        cfg: &'a SearchConfig,
        pools: &'a KeywordPools,
        evaluator: &'a mut dyn Evaluator,
        cache: &'a EvaluationCache,
        base_prompt: &str,
    ) -> Self {
        let mut session = EvaluationSession::new(
            evaluator,
            pools,
            &cfg.bounds,
            base_prompt,
            cfg.images_per_individual,
            cfg.seed,
        );
        if cfg.use_cache {
            session = session.with_cache(cache);
        }
        Self {
            session,
            spec: cfg.objective_spec.clone(),
            total_evaluations: 0,
        }
    }

    /// Evaluates a batch of individuals, returning them with fitness and the
    /// number of non-cached evaluator calls.
    pub fn evaluate_all(&mut self, inds: Vec<Individual>) -> Result<(Vec<Evaluated>, usize), SearchError> {
        let mut fresh = 0;
        let mut out = Vec::with_capacity(inds.len());
        for individual in inds {
            let (batch, cached) = self.session.evaluate(&individual)?;
            if !cached {
                fresh += 1;
            }
            out.push(Evaluated {
                fitness: fitness_vector(&batch, &self.spec),
                individual,
            });
        }
        self.total_evaluations += fresh;
        Ok((out, fresh))
    }
}

/// Evaluates one fixed configuration: the default-model and fairness-prompt
/// baselines, which have no search.
pub fn run_fixed(
    strategy: Strategy,
    cfg: &SearchConfig,
    pools: &KeywordPools,
    evaluator: &mut dyn Evaluator,
) -> Result<RunLog, SearchError> {
    cfg.validate()?;
    let prompt = match strategy {
        Strategy::FairPrompt => format!("{} {}", cfg.base_prompt, FAIR_PROMPT_SUFFIX),
        _ => cfg.base_prompt.clone(),
    };
    let cache = EvaluationCache::new();
    let mut ctx = RunContext::new(cfg, pools, evaluator, &cache, &prompt);
    let (population, fresh) = ctx.evaluate_all(vec![Individual::default()])?;
    let snapshot = GenerationSnapshot {
        generation_index: 0,
        front_ranks: vec![0],
        new_evaluations: fresh,
        population: population.clone(),
    };
    Ok(RunLog {
        strategy,
        config: cfg.clone(),
        snapshots: vec![snapshot],
        final_front: population,
        total_evaluations: ctx.total_evaluations,
    })
}

/// Runs `strategy` with its own objective set and bounds derived from `cfg`.
pub fn run_strategy(
    strategy: Strategy,
    cfg: &SearchConfig,
    ga_objective: Objective,
    pools: &KeywordPools,
    evaluator: &mut dyn Evaluator,
) -> Result<RunLog, SearchError> {
    let cfg = SearchConfig {
        objective_spec: strategy.objective_spec(ga_objective),
        bounds: strategy.bounds(&cfg.bounds),
        ..cfg.clone()
    };
    let mut log = match strategy {
        Strategy::SustainDiffusion | Strategy::AblationQB | Strategy::AblationQE | Strategy::NoPromptEng => {
            run_nsga2(&cfg, pools, evaluator)?
        }
        Strategy::RandomSearch => run_random_search(&cfg, cfg.evals_per_iteration, cfg.iterations, pools, evaluator)?,
        Strategy::GaSingle | Strategy::AblationQ => run_single_objective_ga(&cfg, pools, evaluator)?,
        Strategy::SD3Default | Strategy::FairPrompt => run_fixed(strategy, &cfg, pools, evaluator)?,
    };
    log.strategy = strategy;
    Ok(log)
}
