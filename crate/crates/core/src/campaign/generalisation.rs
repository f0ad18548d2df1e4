//! Cross-prompt generalisation: for each task prompt, a randomly drawn
//! individual from the candidate strategy's pooled final fronts is
//! evaluated next to each baseline, and the outcomes are bucketed into
//! win-tie-loss counts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{GeneralisationConfig, PromptDataset};
use super::run::{read_run, run_path};
use super::{CampaignConfig, CampaignError};
use crate::analysis::{win_tie_loss, AnalysisError, TieRule, WinTieLoss};
use crate::evaluation::{EvaluationSession, Evaluator};
use crate::genotype::{Individual, KeywordPools, SearchBounds};
use crate::objectives::{Metrics, Objective, ObjectiveSpec};
use crate::search::{Evaluated, Strategy, FAIR_PROMPT_SUFFIX};

pub const GENERALISATION_FILE: &str = "generalisation.json";

/// Where a drawn individual came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontSource {
    pub rep: usize,
    pub front_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<FrontSource>,
    pub individual: Individual,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRow {
    pub prompt_index: usize,
    pub prompt: String,
    pub candidate: Entry,
    pub baselines: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WtlRow {
    pub baseline: Strategy,
    pub objectives: ObjectiveSpec,
    pub counts: WinTieLoss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralisationResult {
    pub candidate: Strategy,
    pub seed: u64,
    pub images: u32,
    pub tie_rule: TieRule,
    pub rows: Vec<PromptRow>,
    /// One row per baseline with every table objective, then one per
    /// baseline with image quality removed.
    pub tables: Vec<WtlRow>,
}

/// Win-tie-loss of the candidate against every baseline over `rows`.
pub fn tabulate(rows: &[PromptRow], spec: &ObjectiveSpec, rule: TieRule) -> Result<Vec<WtlRow>, AnalysisError> {
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    first
        .baselines
        .iter()
        .enumerate()
        .map(|(b, entry)| {
            let pairs: Vec<(Vec<f64>, Vec<f64>)> = rows
                .iter()
                .map(|row| {
                    let base = row.baselines.get(b).ok_or(AnalysisError::Arity {
                        expected: first.baselines.len(),
                        got: row.baselines.len(),
                    })?;
                    Ok((spec.orient(&row.candidate.metrics), spec.orient(&base.metrics)))
                })
                .collect::<Result<_, AnalysisError>>()?;
            Ok(WtlRow {
                baseline: entry.strategy,
                objectives: spec.clone(),
                counts: win_tie_loss(&pairs, rule)?,
            })
        })
        .collect()
}

/// Both passes: every objective of `spec`, then `spec` without image quality.
pub fn tabulate_both(rows: &[PromptRow], spec: &ObjectiveSpec, rule: TieRule) -> Result<Vec<WtlRow>, AnalysisError> {
    let mut tables = tabulate(rows, spec, rule)?;
    if let Ok(reduced) = spec.without(Objective::ImageQuality) {
        if reduced.len() < spec.len() {
            tables.extend(tabulate(rows, &reduced, rule)?);
        }
    }
    Ok(tables)
}

/// Pooled individuals a strategy can contribute, with provenance.
pub type FrontPool = Vec<(FrontSource, Evaluated)>;

pub fn pool_fronts(runs: &[(usize, Vec<Evaluated>)]) -> FrontPool {
    runs.iter()
        .flat_map(|(rep, front)| {
            front
                .iter()
                .enumerate()
                .map(move |(front_index, e)| (FrontSource { rep: *rep, front_index }, e.clone()))
        })
        .collect()
}

/// Inputs of the generalisation experiment, independent of campaign files.
pub struct Experiment<'a> {
    pub candidate: Strategy,
    pub candidate_pool: &'a FrontPool,
    /// Baselines in output order; search baselines carry their own pool.
    pub baselines: Vec<(Strategy, Option<&'a FrontPool>)>,
    pub prompts: &'a PromptDataset,
    pub pools: &'a KeywordPools,
    pub bounds: &'a SearchBounds,
    pub images: u32,
    pub seed: u64,
    pub spec: ObjectiveSpec,
    pub tie_rule: TieRule,
}

fn draw<R: Rng>(
    rng: &mut R,
    strategy: Strategy,
    pool: &FrontPool,
) -> Result<(Option<FrontSource>, Individual), CampaignError> {
    if pool.is_empty() {
        return Err(CampaignError::Config(format!(
            "no front individuals available for {strategy}"
        )));
    }
    let (source, e) = &pool[rng.gen_range(0..pool.len())];
    Ok((Some(*source), e.individual.clone()))
}

/// Runs the experiment. Candidate and baselines for one prompt share the
/// run seed, so their image seeds are paired.
pub fn generalisation_experiment(
    exp: &Experiment<'_>,
    evaluator: &mut dyn Evaluator,
) -> Result<GeneralisationResult, CampaignError> {
    let mut rng = crate::seed::rng(crate::derive_seed!(exp.seed, "generalisation-draws"));
    let mut rows = Vec::with_capacity(exp.prompts.len());
    for (prompt_index, prompt) in exp.prompts.prompts.iter().enumerate() {
        let run_seed = crate::derive_seed!(exp.seed, "generalisation", prompt_index);
        let mut evaluate = |strategy: Strategy, source: Option<FrontSource>, individual: Individual| {
            let base = match strategy {
                Strategy::FairPrompt => format!("{prompt} {FAIR_PROMPT_SUFFIX}"),
                _ => prompt.clone(),
            };
            let mut session =
                EvaluationSession::new(&mut *evaluator, exp.pools, exp.bounds, base, exp.images, run_seed);
            let (batch, _) = session.evaluate(&individual)?;
            Ok::<_, CampaignError>(Entry {
                strategy,
                source,
                metrics: Metrics::from_batch(&batch),
                individual,
            })
        };
        let (source, individual) = draw(&mut rng, exp.candidate, exp.candidate_pool)?;
        let candidate = evaluate(exp.candidate, source, individual)?;
        let mut baselines = Vec::with_capacity(exp.baselines.len());
        for &(strategy, pool) in &exp.baselines {
            let (source, individual) = match pool {
                Some(pool) => draw(&mut rng, strategy, pool)?,
                None => (None, Individual::default()),
            };
            baselines.push(evaluate(strategy, source, individual)?);
        }
        rows.push(PromptRow {
            prompt_index,
            prompt: prompt.clone(),
            candidate,
            baselines,
        });
    }
    let tables = tabulate_both(&rows, &exp.spec, exp.tie_rule)?;
    Ok(GeneralisationResult {
        candidate: exp.candidate,
        seed: exp.seed,
        images: exp.images,
        tie_rule: exp.tie_rule,
        rows,
        tables,
    })
}

fn load_pool(cfg: &CampaignConfig, strategy: Strategy) -> Result<FrontPool, CampaignError> {
    let mut runs = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let path = run_path(&cfg.output_dir, strategy, rep);
        let log =
            read_run(&path).ok_or_else(|| CampaignError::Config(format!("missing run log {}", path.display())))?;
        runs.push((rep, log.final_front));
    }
    Ok(pool_fronts(&runs))
}

pub(crate) fn run_for_campaign(
    cfg: &CampaignConfig,
    gen_cfg: &GeneralisationConfig,
    pools: &KeywordPools,
    evaluator: &mut dyn Evaluator,
) -> Result<GeneralisationResult, CampaignError> {
    let candidate_pool = load_pool(cfg, gen_cfg.candidate)?;
    let mut baseline_pools = Vec::new();
    for &b in &gen_cfg.baselines {
        let fixed = matches!(b, Strategy::SD3Default | Strategy::FairPrompt);
        baseline_pools.push((b, if fixed { None } else { Some(load_pool(cfg, b)?) }));
    }
    let prompts = cfg.prompts()?;
    let exp = Experiment {
        candidate: gen_cfg.candidate,
        candidate_pool: &candidate_pool,
        baselines: baseline_pools.iter().map(|(s, p)| (*s, p.as_ref())).collect(),
        prompts: &prompts,
        pools,
        bounds: &cfg.search.bounds,
        images: cfg.search.images_per_individual,
        seed: cfg.campaign_seed,
        spec: cfg.analysis.table_objectives.clone(),
        tie_rule: cfg.analysis.tie_rule,
    };
    generalisation_experiment(&exp, evaluator)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(strategy: Strategy, m: [f64; 6]) -> Entry {
        Entry {
            strategy,
            source: None,
            individual: Individual::default(),
            metrics: Metrics {
                image_quality: m[0],
                gender_bias: m[1],
                ethnic_bias: m[2],
                cpu_energy: m[3],
                gpu_energy: m[4],
                duration: m[5],
            },
        }
    }

    #[test]
    fn identical_outputs_are_losses() {
        let m = [0.8, 0.5, 0.5, 1e-4, 3e-4, 20.0];
        let rows: Vec<PromptRow> = (0..4)
            .map(|i| PromptRow {
                prompt_index: i,
                prompt: format!("p{i}"),
                candidate: entry(Strategy::SustainDiffusion, m),
                baselines: vec![entry(Strategy::SD3Default, m)],
            })
            .collect();
        let t = tabulate_both(&rows, &ObjectiveSpec::all_tracked(), TieRule::StrictlyBetter).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|r| r.counts
            == WinTieLoss {
                wins: 0,
                ties: 0,
                losses: 4
            }));
        assert_eq!(t[1].objectives.len(), 5);
    }
}
