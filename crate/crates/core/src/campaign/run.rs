use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::config::MANIFEST;
use super::generalisation::{self, GENERALISATION_FILE};
use super::{write_atomic, CampaignConfig, CampaignError, EvaluatorConfig};
use crate::evaluation::{Evaluator, SyntheticEvaluator};
use crate::genotype::KeywordPools;
use crate::search::{run_strategy, RunLog, Strategy};

/// Seed of repetition `rep` of `strategy`.
pub fn run_seed(campaign_seed: u64, strategy: Strategy, rep: usize) -> u64 {
    crate::derive_seed!(campaign_seed, strategy.name(), rep)
}

/// Location of a run's log inside a campaign directory.
pub fn run_path(dir: &Path, strategy: Strategy, rep: usize) -> PathBuf {
    dir.join("runs")
        .join(strategy.name())
        .join(format!("rep_{rep:02}.jsonl"))
}

/// Reads a run log; `None` when it is absent or incomplete.
pub fn read_run(path: &Path) -> Option<RunLog> {
    let text = std::fs::read_to_string(path).ok()?;
    RunLog::from_jsonl(&text).ok()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignSummary {
    /// Runs executed by this invocation.
    pub executed: usize,
    /// Runs found complete on disk and skipped.
    pub resumed: usize,
    pub total: usize,
    pub generalisation: bool,
}

struct Job {
    strategy: Strategy,
    rep: usize,
    path: PathBuf,
}

fn execute(
    cfg: &CampaignConfig,
    pools: &KeywordPools,
    job: &Job,
    evaluator: &mut dyn Evaluator,
) -> Result<(), CampaignError> {
    let search = cfg.run_search_config(run_seed(cfg.campaign_seed, job.strategy, job.rep));
    let log = run_strategy(job.strategy, &search, cfg.ga_objective, pools, evaluator)?;
    write_atomic(&job.path, log.to_jsonl().as_bytes())
}

/// Writes the manifest, or checks that an existing one describes the same
/// campaign.
fn prepare(cfg: &CampaignConfig) -> Result<(), CampaignError> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CampaignError::io(dir, e))?;
    let manifest = dir.join(MANIFEST);
    let wanted = cfg.manifest_json();
    match std::fs::read_to_string(&manifest) {
        Ok(existing) if existing == wanted => Ok(()),
        Ok(_) => Err(CampaignError::Config(format!(
            "{} belongs to a different campaign; use a fresh output_dir",
            dir.display()
        ))),
        Err(_) => write_atomic(&manifest, wanted.as_bytes()),
    }
}

/// Runs every (strategy, repetition) that has no complete log yet, then the
/// generalisation experiment when configured. Progress lines go to `log`.
pub fn run_campaign(cfg: &CampaignConfig, log: &(dyn Fn(&str) + Sync)) -> Result<CampaignSummary, CampaignError> {
    cfg.validate()?;
    prepare(cfg)?;
    let pools = cfg.pools()?;

    let mut summary = CampaignSummary::default();
    let mut pending = Vec::new();
    for &strategy in &cfg.strategies {
        for rep in 0..cfg.repetitions {
            summary.total += 1;
            let path = run_path(&cfg.output_dir, strategy, rep);
            if read_run(&path).is_some() {
                summary.resumed += 1;
            } else {
                pending.push(Job { strategy, rep, path });
            }
        }
    }
    if summary.resumed > 0 {
        log(&format!(
            "resuming: {} of {} runs already complete",
            summary.resumed, summary.total
        ));
    }

    let interrupted = |done: usize, source: CampaignError| CampaignError::Interrupted {
        completed: summary.resumed + done,
        total: summary.total,
        source: Box::new(source),
    };

    match &cfg.evaluator {
        EvaluatorConfig::Synthetic { landscape } if cfg.parallel => {
            let next = AtomicUsize::new(0);
            let done = AtomicUsize::new(0);
            let failure: Mutex<Option<CampaignError>> = Mutex::new(None);
            let workers = std::thread::available_parallelism()
                .map_or(1, |n| n.get())
                .min(pending.len().max(1));
            std::thread::scope(|scope| {
                for _ in 0..workers {
                    scope.spawn(|| {
                        let mut evaluator = SyntheticEvaluator::new(landscape.clone());
                        loop {
                            let i = next.fetch_add(1, Ordering::SeqCst);
                            if i >= pending.len() || failure.lock().unwrap().is_some() {
                                break;
                            }
                            let job = &pending[i];
                            match execute(cfg, &pools, job, &mut evaluator) {
                                Ok(()) => {
                                    done.fetch_add(1, Ordering::SeqCst);
                                    log(&format!("{} rep {:02} done", job.strategy, job.rep));
                                }
                                Err(e) => {
                                    failure.lock().unwrap().get_or_insert(e);
                                    break;
                                }
                            }
                        }
                    });
                }
            });
            summary.executed = done.into_inner();
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(interrupted(summary.executed, e));
            }
        }
        evaluator_cfg => {
            if !pending.is_empty() {
                let mut evaluator = evaluator_cfg.connect().map_err(|e| interrupted(0, e))?;
                for job in &pending {
                    execute(cfg, &pools, job, evaluator.as_mut()).map_err(|e| interrupted(summary.executed, e))?;
                    summary.executed += 1;
                    log(&format!("{} rep {:02} done", job.strategy, job.rep));
                }
            }
        }
    }

    if let Some(gen_cfg) = &cfg.generalisation {
        let path = cfg.output_dir.join(GENERALISATION_FILE);
        if !path.exists() {
            let mut evaluator = cfg.evaluator.connect().map_err(|e| interrupted(summary.executed, e))?;
            let result = generalisation::run_for_campaign(cfg, gen_cfg, &pools, evaluator.as_mut())
                .map_err(|e| interrupted(summary.executed, e))?;
            let mut text = serde_json::to_string_pretty(&result).expect("result serializes");
            text.push('\n');
            write_atomic(&path, text.as_bytes())?;
            log("generalisation experiment done");
        }
        summary.generalisation = true;
    }
    Ok(summary)
}
