//! Statistics over a campaign's run logs and their rendering as CSV and
//! JSON tables. Everything here is a pure function of the logs, so a report
//! regenerated from the same logs is byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::AnalysisOptions;
use super::generalisation::{GeneralisationResult, WtlRow, GENERALISATION_FILE};
use super::run::{read_run, run_path};
use super::{write_atomic, CampaignConfig, CampaignError};
use crate::analysis::{
    count_optimal_by_strategy, dunn_posthoc, hypervolume, kruskal_wallis, reference_point, spearman,
    vargha_delaney_a12, wilcoxon_signed_rank, Alternative, AnalysisError, EffectSize, HvMode, Normalizer, TestResult,
};
use crate::objectives::{Objective, ObjectiveSpec};
use crate::search::{RunLog, Strategy};

pub const REPORT_DIR: &str = "reports";

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub rep: usize,
    pub log: RunLog,
}

/// All available runs of one strategy under a display label.
#[derive(Debug, Clone)]
pub struct StrategyResults {
    pub label: String,
    pub runs: Vec<RunRecord>,
}

impl StrategyResults {
    fn run(&self, rep: usize) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.rep == rep)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingRun {
    pub strategy: String,
    pub rep: usize,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub strategy: String,
    pub rep: usize,
    pub seed: u64,
    pub final_generation: usize,
    pub front_size: usize,
    pub total_evaluations: usize,
    /// Mean over the final front, one value per table objective.
    pub front_means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub against: String,
    pub pairs: usize,
    /// One-sided: `against` improves on this strategy. Absent with fewer
    /// than five paired runs.
    pub wilcoxon: Option<TestResult>,
    /// Probability that a run of `against` beats a run of this strategy.
    pub a12_reference_better: EffectSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveRow {
    pub strategy: String,
    pub objective: Objective,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub comparison: Option<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub strategy: String,
    pub rep: usize,
    pub generation: usize,
    pub front_index: usize,
    pub genotype: String,
    /// Raw values of the front objectives.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoSummary {
    pub objectives: ObjectiveSpec,
    pub global_front_size: usize,
    pub counts: Vec<(String, usize)>,
    pub front: Vec<FrontMember>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvRun {
    pub strategy: String,
    pub rep: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvComparison {
    pub strategy: String,
    pub against: String,
    pub pairs: usize,
    /// One-sided: the reference's hypervolume is greater.
    pub wilcoxon: Option<TestResult>,
    pub a12_reference_better: EffectSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypervolumeSummary {
    pub mode: HvMode,
    pub objectives: ObjectiveSpec,
    pub epsilon: f64,
    /// In the space the volumes are measured in (scaled in normalized mode).
    pub reference: Vec<f64>,
    pub normalizer: Option<Normalizer>,
    pub runs: Vec<HvRun>,
    pub comparisons: Vec<HvComparison>,
}

/// Run-to-run variability of one strategy on one objective: Kruskal-Wallis
/// over the runs' final fronts, and Dunn's pairwise test when it is
/// significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariabilityRow {
    pub strategy: String,
    pub objective: Objective,
    pub kruskal_wallis: TestResult,
    pub dunn_significant_pairs: usize,
    pub dunn_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub first: Objective,
    pub second: Objective,
    pub points: usize,
    /// Absent when either objective is constant.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub options: AnalysisOptions,
    pub reference: Option<String>,
    pub strategies: Vec<String>,
    pub missing: Vec<MissingRun>,
    pub runs: Vec<RunSummary>,
    pub objectives: Vec<ObjectiveRow>,
    pub pareto: ParetoSummary,
    pub hypervolume: HypervolumeSummary,
    pub variability: Vec<VariabilityRow>,
    pub correlations: Vec<CorrelationRow>,
    pub win_tie_loss: Option<Vec<WtlRow>>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn front_mean(log: &RunLog, objective: Objective) -> Option<f64> {
    if log.final_front.is_empty() {
        return None;
    }
    let values: Vec<f64> = log
        .final_front
        .iter()
        .map(|e| e.fitness.metrics.get(objective))
        .collect();
    Some(mean(&values))
}

/// Orientation (minimization) of one objective value.
fn orient(objective: Objective, value: f64) -> f64 {
    ObjectiveSpec::single(objective).orient_values(&[value])[0]
}

/// Values of `label`'s runs paired by repetition with the reference's.
fn paired<F: Fn(&RunRecord) -> Option<f64>>(
    a: &StrategyResults,
    b: &StrategyResults,
    value: F,
) -> (Vec<f64>, Vec<f64>) {
    let mut xa = Vec::new();
    let mut xb = Vec::new();
    for ra in &a.runs {
        if let Some(rb) = b.run(ra.rep) {
            if let (Some(va), Some(vb)) = (value(ra), value(rb)) {
                xa.push(va);
                xb.push(vb);
            }
        }
    }
    (xa, xb)
}

fn wilcoxon_or_none(
    a: &[f64],
    b: &[f64],
    alt: Alternative,
    threshold: f64,
) -> Result<Option<TestResult>, AnalysisError> {
    match wilcoxon_signed_rank(a, b, alt) {
        Ok(r) => Ok(Some(r.at_threshold(threshold))),
        Err(AnalysisError::TooFewSamples { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn objective_rows(
    results: &[StrategyResults],
    reference: Option<&StrategyResults>,
    options: &AnalysisOptions,
) -> Result<Vec<ObjectiveRow>, AnalysisError> {
    let threshold = options.corrected_threshold();
    let mut rows = Vec::new();
    for s in results {
        for &objective in options.table_objectives.objectives() {
            let values: Vec<f64> = s.runs.iter().filter_map(|r| front_mean(&r.log, objective)).collect();
            if values.is_empty() {
                continue;
            }
            let comparison = match reference {
                Some(reference) if reference.label != s.label => {
                    let (mine, theirs) = paired(s, reference, |r| front_mean(&r.log, objective));
                    if mine.is_empty() {
                        None
                    } else {
                        let om: Vec<f64> = mine.iter().map(|v| orient(objective, *v)).collect();
                        let ot: Vec<f64> = theirs.iter().map(|v| orient(objective, *v)).collect();
                        Some(Comparison {
                            against: reference.label.clone(),
                            pairs: mine.len(),
                            // oriented for minimization, so "other > reference" means the reference improves
                            wilcoxon: wilcoxon_or_none(&om, &ot, Alternative::Greater, threshold)?,
                            a12_reference_better: vargha_delaney_a12(&om, &ot)?,
                        })
                    }
                }
                _ => None,
            };
            rows.push(ObjectiveRow {
                strategy: s.label.clone(),
                objective,
                runs: values.len(),
                mean: mean(&values),
                std: sample_std(&values),
                comparison,
            });
        }
    }
    Ok(rows)
}

fn pareto_summary(results: &[StrategyResults], spec: &ObjectiveSpec) -> Result<ParetoSummary, AnalysisError> {
    let mut labelled: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut origin: Vec<FrontMember> = Vec::new();
    for (si, s) in results.iter().enumerate() {
        for run in &s.runs {
            for (front_index, e) in run.log.final_front.iter().enumerate() {
                labelled.push((si, spec.orient(&e.fitness.metrics)));
                origin.push(FrontMember {
                    strategy: s.label.clone(),
                    rep: run.rep,
                    generation: run.log.final_generation(),
                    front_index,
                    genotype: e.individual.canonical_key(),
                    values: spec.objectives().iter().map(|o| e.fitness.metrics.get(*o)).collect(),
                });
            }
        }
    }
    let points: Vec<Vec<f64>> = labelled.iter().map(|(_, p)| p.clone()).collect();
    let members = crate::analysis::pareto_front_oriented(&points)?;
    let by_index = count_optimal_by_strategy(&labelled)?;
    let counts = results
        .iter()
        .enumerate()
        .map(|(si, s)| (s.label.clone(), by_index.get(&si).copied().unwrap_or(0)))
        .collect();
    Ok(ParetoSummary {
        objectives: spec.clone(),
        global_front_size: members.len(),
        counts,
        front: members.into_iter().map(|i| origin[i].clone()).collect(),
    })
}

fn hypervolume_summary(
    results: &[StrategyResults],
    reference: Option<&StrategyResults>,
    options: &AnalysisOptions,
) -> Result<HypervolumeSummary, AnalysisError> {
    let spec = &options.front_objectives;
    let mut keys = Vec::new();
    let mut fronts: Vec<Vec<Vec<f64>>> = Vec::new();
    for s in results {
        for run in &s.runs {
            keys.push((s.label.clone(), run.rep));
            fronts.push(
                run.log
                    .final_front
                    .iter()
                    .map(|e| spec.orient(&e.fitness.metrics))
                    .collect(),
            );
        }
    }
    let normalizer = match options.hv_mode {
        HvMode::Raw => None,
        HvMode::Normalized => {
            let n = Normalizer::fit(&fronts)?;
            fronts = fronts.iter().map(|f| n.apply_all(f)).collect();
            Some(n)
        }
    };
    let ref_point = reference_point(&fronts, options.epsilon)?;
    let mut runs = Vec::with_capacity(fronts.len());
    for ((strategy, rep), front) in keys.into_iter().zip(&fronts) {
        runs.push(HvRun {
            strategy,
            rep,
            value: hypervolume(front, &ref_point)?,
        });
    }
    let lookup = |label: &str, rep: usize| {
        runs.iter()
            .find(|r| r.strategy == label && r.rep == rep)
            .map(|r| r.value)
    };
    let mut comparisons = Vec::new();
    if let Some(reference) = reference {
        for s in results.iter().filter(|s| s.label != reference.label) {
            let mut ref_values = Vec::new();
            let mut own = Vec::new();
            for run in &s.runs {
                if let (Some(a), Some(b)) = (lookup(&reference.label, run.rep), lookup(&s.label, run.rep)) {
                    ref_values.push(a);
                    own.push(b);
                }
            }
            if own.is_empty() {
                continue;
            }
            comparisons.push(HvComparison {
                strategy: s.label.clone(),
                against: reference.label.clone(),
                pairs: own.len(),
                wilcoxon: wilcoxon_or_none(&ref_values, &own, Alternative::Greater, options.alpha)?,
                a12_reference_better: vargha_delaney_a12(&ref_values, &own)?,
            });
        }
    }
    Ok(HypervolumeSummary {
        mode: options.hv_mode,
        objectives: spec.clone(),
        epsilon: options.epsilon,
        reference: ref_point.0,
        normalizer,
        runs,
        comparisons,
    })
}

fn variability_rows(
    results: &[StrategyResults],
    options: &AnalysisOptions,
) -> Result<Vec<VariabilityRow>, AnalysisError> {
    let mut rows = Vec::new();
    for s in results.iter().filter(|s| s.runs.len() >= 2) {
        for &objective in options.table_objectives.objectives() {
            let groups: Vec<Vec<f64>> = s
                .runs
                .iter()
                .map(|r| {
                    r.log
                        .final_front
                        .iter()
                        .map(|e| e.fitness.metrics.get(objective))
                        .collect::<Vec<f64>>()
                })
                .filter(|g| !g.is_empty())
                .collect();
            if groups.len() < 2 {
                continue;
            }
            let kw = kruskal_wallis(&groups)?.at_threshold(options.alpha);
            let dunn_pairs = groups.len() * (groups.len() - 1) / 2;
            let dunn_significant_pairs = if kw.significant {
                dunn_posthoc(&groups)?.iter().filter(|c| c.significant).count()
            } else {
                0
            };
            rows.push(VariabilityRow {
                strategy: s.label.clone(),
                objective,
                kruskal_wallis: kw,
                dunn_significant_pairs,
                dunn_pairs,
            });
        }
    }
    Ok(rows)
}

fn correlation_rows(results: &[StrategyResults], spec: &ObjectiveSpec) -> Result<Vec<CorrelationRow>, AnalysisError> {
    let metrics: Vec<_> = results
        .iter()
        .flat_map(|s| s.runs.iter())
        .flat_map(|r| r.log.final_front.iter().map(|e| e.fitness.metrics))
        .collect();
    let objectives = spec.objectives();
    let mut rows = Vec::new();
    for (i, &first) in objectives.iter().enumerate() {
        for &second in &objectives[i + 1..] {
            let x: Vec<f64> = metrics.iter().map(|m| m.get(first)).collect();
            let y: Vec<f64> = metrics.iter().map(|m| m.get(second)).collect();
            let rho = match spearman(&x, &y) {
                Ok(r) => Some(r),
                Err(AnalysisError::Undefined(_) | AnalysisError::TooFewSamples { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(CorrelationRow {
                first,
                second,
                points: metrics.len(),
                rho,
            });
        }
    }
    Ok(rows)
}

/// Computes every table for `results`. `reference` names the label the
/// others are compared against; comparisons are skipped when it is absent.
pub fn analyze(
    results: &[StrategyResults],
    reference: Option<&str>,
    options: &AnalysisOptions,
    missing: Vec<MissingRun>,
    win_tie_loss: Option<Vec<WtlRow>>,
) -> Result<AnalysisReport, AnalysisError> {
    let results: Vec<StrategyResults> = results.iter().filter(|s| !s.runs.is_empty()).cloned().collect();
    if results.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let reference = reference.and_then(|label| results.iter().find(|s| s.label == label));
    let runs = results
        .iter()
        .flat_map(|s| {
            s.runs.iter().map(|r| RunSummary {
                strategy: s.label.clone(),
                rep: r.rep,
                seed: r.log.seed(),
                final_generation: r.log.final_generation(),
                front_size: r.log.final_front.len(),
                total_evaluations: r.log.total_evaluations,
                front_means: options
                    .table_objectives
                    .objectives()
                    .iter()
                    .map(|o| front_mean(&r.log, *o).unwrap_or(f64::NAN))
                    .collect(),
            })
        })
        .collect();
    Ok(AnalysisReport {
        options: options.clone(),
        reference: reference.map(|r| r.label.clone()),
        strategies: results.iter().map(|s| s.label.clone()).collect(),
        missing,
        runs,
        objectives: objective_rows(&results, reference, options)?,
        pareto: pareto_summary(&results, &options.front_objectives)?,
        hypervolume: hypervolume_summary(&results, reference, options)?,
        variability: variability_rows(&results, options)?,
        correlations: correlation_rows(&results, &options.table_objectives)?,
        win_tie_loss,
    })
}

/// Loads the available runs of a campaign directory, listing missing ones.
pub fn load_campaign(dir: &Path) -> Result<(CampaignConfig, Vec<StrategyResults>, Vec<MissingRun>), CampaignError> {
    let cfg = CampaignConfig::load_manifest(dir)?;
    let mut results = Vec::new();
    let mut missing = Vec::new();
    for &strategy in &cfg.strategies {
        let mut runs = Vec::new();
        for rep in 0..cfg.repetitions {
            let path = run_path(dir, strategy, rep);
            match read_run(&path) {
                Some(log) => runs.push(RunRecord { rep, log }),
                None => missing.push(MissingRun {
                    strategy: strategy.name().to_string(),
                    rep,
                    path: path.strip_prefix(dir).unwrap_or(&path).display().to_string(),
                }),
            }
        }
        results.push(StrategyResults {
            label: strategy.name().to_string(),
            runs,
        });
    }
    Ok((cfg, results, missing))
}

pub fn analyze_campaign(dir: &Path) -> Result<AnalysisReport, CampaignError> {
    let (cfg, results, missing) = load_campaign(dir)?;
    let wtl = match std::fs::read_to_string(dir.join(GENERALISATION_FILE)) {
        Ok(text) => {
            let g: GeneralisationResult = serde_json::from_str(&text)
                .map_err(|e| CampaignError::Config(format!("{GENERALISATION_FILE}: {e}")))?;
            Some(g.tables)
        }
        Err(_) => None,
    };
    let reference = Strategy::name(cfg.analysis.reference_strategy);
    Ok(analyze(&results, Some(reference), &cfg.analysis, missing, wtl)?)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn effect_name(e: &EffectSize) -> &'static str {
    match e.class {
        crate::analysis::EffectClass::Small => "small",
        crate::analysis::EffectClass::Medium => "medium",
        crate::analysis::EffectClass::Large => "large",
    }
}

impl AnalysisReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("strategy,rep,seed,final_generation,front_size,total_evaluations");
        for o in self.options.table_objectives.objectives() {
            write!(out, ",{}", o.name()).unwrap();
        }
        out.push('\n');
        for r in &self.runs {
            write!(
                out,
                "{},{},{},{},{},{}",
                r.strategy, r.rep, r.seed, r.final_generation, r.front_size, r.total_evaluations
            )
            .unwrap();
            for v in &r.front_means {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn objectives_csv(&self) -> String {
        let compare = self.objectives.iter().any(|r| r.comparison.is_some());
        let mut out = String::from("strategy,objective,runs,mean,std");
        if compare {
            out.push_str(
                ",against,pairs,wilcoxon_statistic,wilcoxon_p,threshold,significant,a12_reference_better,effect",
            );
        }
        out.push('\n');
        for r in &self.objectives {
            write!(
                out,
                "{},{},{},{},{}",
                r.strategy,
                r.objective.name(),
                r.runs,
                r.mean,
                r.std
            )
            .unwrap();
            if compare {
                match &r.comparison {
                    Some(c) => {
                        let w = c.wilcoxon.as_ref();
                        write!(
                            out,
                            ",{},{},{},{},{},{},{},{}",
                            c.against,
                            c.pairs,
                            opt(w.map(|w| w.statistic)),
                            opt(w.map(|w| w.p_value)),
                            opt(w.map(|w| w.threshold)),
                            opt(w.map(|w| w.significant)),
                            c.a12_reference_better.value,
                            effect_name(&c.a12_reference_better)
                        )
                        .unwrap();
                    }
                    None => out.push_str(",,,,,,,,"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn pareto_counts_csv(&self) -> String {
        let mut out = String::from("strategy,count\n");
        for (label, count) in &self.pareto.counts {
            writeln!(out, "{label},{count}").unwrap();
        }
        out
    }

    pub fn pareto_front_csv(&self) -> String {
        let mut out = String::from("strategy,rep,generation,front_index");
        for o in self.pareto.objectives.objectives() {
            write!(out, ",{}", o.name()).unwrap();
        }
        out.push_str(",genotype\n");
        for m in &self.pareto.front {
            write!(out, "{},{},{},{}", m.strategy, m.rep, m.generation, m.front_index).unwrap();
            for v in &m.values {
                write!(out, ",{v}").unwrap();
            }
            writeln!(out, ",{}", csv_field(&m.genotype)).unwrap();
        }
        out
    }

    pub fn hypervolume_csv(&self) -> String {
        let mut out = String::from("strategy,rep,hypervolume\n");
        for r in &self.hypervolume.runs {
            writeln!(out, "{},{},{}", r.strategy, r.rep, r.value).unwrap();
        }
        out
    }

    pub fn variability_csv(&self) -> String {
        let mut out = String::from(
            "strategy,objective,kruskal_h,p_value,significant,degenerate,dunn_significant_pairs,dunn_pairs\n",
        );
        for r in &self.variability {
            let kw = &r.kruskal_wallis;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.strategy,
                r.objective.name(),
                kw.statistic,
                kw.p_value,
                kw.significant,
                kw.degenerate,
                r.dunn_significant_pairs,
                r.dunn_pairs
            )
            .unwrap();
        }
        out
    }

    pub fn spearman_csv(&self) -> String {
        let mut out = String::from("first,second,points,rho\n");
        for r in &self.correlations {
            writeln!(
                out,
                "{},{},{},{}",
                r.first.name(),
                r.second.name(),
                r.points,
                opt(r.rho)
            )
            .unwrap();
        }
        out
    }

    pub fn win_tie_loss_csv(&self) -> Option<String> {
        let rows = self.win_tie_loss.as_ref()?;
        let mut out = String::from("baseline,objectives,wins,ties,losses,total\n");
        for r in rows {
            let names: Vec<&str> = r.objectives.objectives().iter().map(|o| o.name()).collect();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.baseline,
                names.join(" "),
                r.counts.wins,
                r.counts.ties,
                r.counts.losses,
                r.counts.total()
            )
            .unwrap();
        }
        Some(out)
    }

    /// Compact human-readable summary.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "strategies: {}", self.strategies.join(", ")).unwrap();
        if !self.missing.is_empty() {
            writeln!(out, "missing runs: {}", self.missing.len()).unwrap();
        }
        let names: Vec<&str> = self.pareto.objectives.objectives().iter().map(|o| o.name()).collect();
        writeln!(
            out,
            "pareto front over [{}]: {} members",
            names.join(", "),
            self.pareto.global_front_size
        )
        .unwrap();
        for (label, count) in &self.pareto.counts {
            writeln!(out, "  {label:<18} {count}").unwrap();
        }
        writeln!(
            out,
            "hypervolume ({:?} mode), mean per strategy:",
            self.hypervolume.mode
        )
        .unwrap();
        for label in &self.strategies {
            let v: Vec<f64> = self
                .hypervolume
                .runs
                .iter()
                .filter(|r| &r.strategy == label)
                .map(|r| r.value)
                .collect();
            writeln!(out, "  {label:<18} {:.6}", mean(&v)).unwrap();
        }
        for c in &self.hypervolume.comparisons {
            let p = c
                .wilcoxon
                .as_ref()
                .map_or("n/a".to_string(), |w| format!("{:.4}", w.p_value));
            writeln!(
                out,
                "  {} > {}: p = {p}, A12 = {:.2} ({})",
                c.against,
                c.strategy,
                c.a12_reference_better.value,
                effect_name(&c.a12_reference_better)
            )
            .unwrap();
        }
        if let Some(rows) = &self.win_tie_loss {
            writeln!(out, "win-tie-loss:").unwrap();
            for r in rows {
                writeln!(
                    out,
                    "  vs {:<12} ({} objectives) {}/{}/{}",
                    r.baseline,
                    r.objectives.len(),
                    r.counts.wins,
                    r.counts.ties,
                    r.counts.losses
                )
                .unwrap();
            }
        }
        out
    }
}

/// Writes every table into `out_dir`, returning the written paths.
pub fn write_report(report: &AnalysisReport, out_dir: &Path) -> Result<Vec<PathBuf>, CampaignError> {
    let mut files: Vec<(&str, String)> = vec![
        ("runs.csv", report.runs_csv()),
        ("objectives.csv", report.objectives_csv()),
        ("pareto_counts.csv", report.pareto_counts_csv()),
        ("pareto_front.csv", report.pareto_front_csv()),
        ("hypervolume.csv", report.hypervolume_csv()),
        ("variability.csv", report.variability_csv()),
        ("spearman.csv", report.spearman_csv()),
    ];
    if let Some(wtl) = report.win_tie_loss_csv() {
        files.push(("win_tie_loss.csv", wtl));
    }
    let mut hv = serde_json::to_string_pretty(&report.hypervolume).expect("serializes");
    hv.push('\n');
    files.push(("hypervolume.json", hv));
    files.push(("report.json", report.to_json()));

    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = out_dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
