use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::CampaignError;
use crate::analysis::{HvMode, TieRule};
use crate::evaluation::{BridgeClient, Endpoint, Evaluator, SyntheticEvaluator, SyntheticLandscape};
use crate::genotype::KeywordPools;
use crate::objectives::{Objective, ObjectiveSpec};
use crate::search::{SearchConfig, Strategy, DEFAULT_BASE_PROMPT};

const BUNDLED_PROMPTS: &str = include_str!("../../data/prompts.txt");

/// Name of the resolved config written into every campaign directory.
pub const MANIFEST: &str = "campaign.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluatorConfig {
    Synthetic {
        #[serde(default)]
        landscape: SyntheticLandscape,
    },
    /// External evaluator speaking the line protocol, e.g.
    /// `tcp://127.0.0.1:7000` or `cmd:python -m bridge --mode stub`.
    Bridge {
        endpoint: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timeout_s: Option<f64>,
    },
}

impl Default for EvaluatorConfig {
    fn default() -> Self {
        EvaluatorConfig::Synthetic {
            landscape: SyntheticLandscape::default(),
        }
    }
}

impl EvaluatorConfig {
    pub fn is_synthetic(&self) -> bool {
        matches!(self, EvaluatorConfig::Synthetic { .. })
    }

    pub fn connect(&self) -> Result<Box<dyn Evaluator + Send>, CampaignError> {
        match self {
            EvaluatorConfig::Synthetic { landscape } => Ok(Box::new(SyntheticEvaluator::new(landscape.clone()))),
            EvaluatorConfig::Bridge { endpoint, timeout_s } => {
                let endpoint: Endpoint = endpoint
                    .parse()
                    .map_err(|e: crate::evaluation::EvalError| CampaignError::Config(e.to_string()))?;
                let timeout = timeout_s.map(Duration::from_secs_f64);
                Ok(Box::new(BridgeClient::connect(&endpoint, timeout)?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub hv_mode: HvMode,
    /// Objectives for hypervolume and Pareto-front counting.
    pub front_objectives: ObjectiveSpec,
    /// Objectives summarised per strategy and used for win-tie-loss.
    pub table_objectives: ObjectiveSpec,
    pub epsilon: f64,
    pub tie_rule: TieRule,
    /// Strategy every other strategy is compared against.
    pub reference_strategy: Strategy,
    /// Family-wise level, split evenly over the table objectives.
    pub alpha: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            hv_mode: HvMode::Raw,
            front_objectives: ObjectiveSpec::sustain_diffusion(),
            table_objectives: ObjectiveSpec::all_tracked(),
            epsilon: crate::analysis::hypervolume::DEFAULT_EPSILON,
            tie_rule: TieRule::StrictlyBetter,
            reference_strategy: Strategy::SustainDiffusion,
            alpha: 0.05,
        }
    }
}

impl AnalysisOptions {
    /// Bonferroni threshold for per-objective comparisons (0.05 / 6 by default).
    pub fn corrected_threshold(&self) -> f64 {
        self.alpha / self.table_objectives.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneralisationConfig {
    /// Strategy whose pooled final fronts supply the candidate individuals.
    pub candidate: Strategy,
    pub baselines: Vec<Strategy>,
}

impl Default for GeneralisationConfig {
    fn default() -> Self {
        Self {
            candidate: Strategy::SustainDiffusion,
            baselines: vec![Strategy::SD3Default, Strategy::FairPrompt],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolPaths {
    pub positive: PathBuf,
    pub negative: PathBuf,
}

fn default_repetitions() -> usize {
    10
}

fn default_base_prompt() -> String {
    DEFAULT_BASE_PROMPT.to_string()
}

fn default_ga_objective() -> Objective {
    Objective::CpuEnergy
}

/// A campaign: every listed strategy run `repetitions` times. The search
/// section's `seed`, `base_prompt` and `objective_spec` are set per run by
/// the campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub campaign_seed: u64,
    #[serde(default = "default_base_prompt")]
    pub base_prompt: String,
    /// One prompt per line; used by the generalisation experiment. The
    /// bundled 56-prompt dataset is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_dataset: Option<PathBuf>,
    #[serde(default)]
    pub evaluator: EvaluatorConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default = "default_ga_objective")]
    pub ga_objective: Objective,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyword_pools: Option<PoolPaths>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generalisation: Option<GeneralisationConfig>,
    /// Run repetitions on several threads; synthetic evaluator only.
    #[serde(default)]
    pub parallel: bool,
    #[serde(default)]
    pub output_dir: PathBuf,
}

impl CampaignConfig {
    /// A synthetic campaign with default settings.
    pub fn new(strategies: Vec<Strategy>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            strategies,
            repetitions: default_repetitions(),
            campaign_seed: 0,
            base_prompt: default_base_prompt(),
            prompt_dataset: None,
            evaluator: EvaluatorConfig::default(),
            search: SearchConfig::default(),
            ga_objective: default_ga_objective(),
            analysis: AnalysisOptions::default(),
            keyword_pools: None,
            generalisation: None,
            parallel: false,
            output_dir: output_dir.into(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CampaignError> {
        serde_json::from_str(text).map_err(|e| CampaignError::Config(e.to_string()))
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CampaignError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CampaignError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        if cfg.output_dir.as_os_str().is_empty() {
            return Err(CampaignError::Config("output_dir is required".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads the manifest of an existing campaign directory.
    pub fn load_manifest(dir: &Path) -> Result<Self, CampaignError> {
        let path = dir.join(MANIFEST);
        let text =
            std::fs::read_to_string(&path).map_err(|e| CampaignError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.output_dir = dir.to_path_buf();
        Ok(cfg)
    }

    /// The manifest text: this config with the output directory left out,
    /// so identical campaigns in different places have identical manifests.
    pub fn manifest_json(&self) -> String {
        let mut copy = self.clone();
        copy.output_dir = PathBuf::new();
        let mut text = serde_json::to_string_pretty(&copy).expect("config serializes");
        text.push('\n');
        text
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.prompt_dataset.as_mut() {
            join(p);
        }
        if let Some(pools) = self.keyword_pools.as_mut() {
            join(&mut pools.positive);
            join(&mut pools.negative);
        }
        join(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        let bad = |msg: String| Err(CampaignError::Config(msg));
        if self.strategies.is_empty() {
            return bad("no strategies listed".into());
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if self.strategies[..i].contains(s) {
                return bad(format!("strategy {s} listed twice"));
            }
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.base_prompt.trim().is_empty() {
            return bad("base_prompt is empty".into());
        }
        if self.parallel && !self.evaluator.is_synthetic() {
            return bad("parallel runs require the synthetic evaluator".into());
        }
        if !(self.analysis.epsilon.is_finite() && self.analysis.epsilon > 0.0) {
            return bad("analysis.epsilon must be positive".into());
        }
        if !(self.analysis.alpha > 0.0 && self.analysis.alpha < 1.0) {
            return bad("analysis.alpha must lie in (0, 1)".into());
        }
        if let EvaluatorConfig::Bridge { endpoint, timeout_s } = &self.evaluator {
            endpoint
                .parse::<crate::evaluation::Endpoint>()
                .map_err(|e| CampaignError::Config(e.to_string()))?;
            if timeout_s.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
                return bad("evaluator.timeout_s must be positive".into());
            }
        }
        if let Some(g) = &self.generalisation {
            if !self.strategies.contains(&g.candidate) {
                return bad(format!(
                    "generalisation candidate {} is not among the strategies",
                    g.candidate
                ));
            }
            if g.baselines.is_empty() {
                return bad("generalisation needs at least one baseline".into());
            }
            for b in &g.baselines {
                let fixed = matches!(b, Strategy::SD3Default | Strategy::FairPrompt);
                if !fixed && !self.strategies.contains(b) {
                    return bad(format!(
                        "generalisation baseline {b} is neither fixed nor among the strategies"
                    ));
                }
            }
        }
        self.run_search_config(0).validate()?;
        self.pools()?;
        self.prompts()?;
        Ok(())
    }

    /// Search settings for one run.
    pub fn run_search_config(&self, seed: u64) -> SearchConfig {
        SearchConfig {
            seed,
            base_prompt: self.base_prompt.clone(),
            ..self.search.clone()
        }
    }

    pub fn pools(&self) -> Result<KeywordPools, CampaignError> {
        match &self.keyword_pools {
            None => Ok(KeywordPools::default()),
            Some(p) => {
                KeywordPools::from_files(&p.positive, &p.negative).map_err(|e| CampaignError::Config(e.to_string()))
            }
        }
    }

    pub fn prompts(&self) -> Result<PromptDataset, CampaignError> {
        match &self.prompt_dataset {
            None => PromptDataset::parse(BUNDLED_PROMPTS),
            Some(p) => PromptDataset::load(p),
        }
    }
}

/// Task prompts for the generalisation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptDataset {
    pub prompts: Vec<String>,
}

impl PromptDataset {
    /// One prompt per line; blank lines and `#` comments are skipped.
    /// Empty or duplicated datasets are rejected.
    pub fn parse(text: &str) -> Result<Self, CampaignError> {
        let prompts: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect();
        if prompts.is_empty() {
            return Err(CampaignError::Config("prompt dataset is empty".into()));
        }
        for (i, p) in prompts.iter().enumerate() {
            if prompts[..i].contains(p) {
                return Err(CampaignError::Config(format!("prompt dataset repeats {p:?}")));
            }
        }
        Ok(Self { prompts })
    }

    pub fn load(path: &Path) -> Result<Self, CampaignError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CampaignError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_PROMPTS).expect("bundled prompts are valid")
    }

    pub fn len(&self) -> usize {
        self.prompts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prompts.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_minimal_json() {
        let cfg = CampaignConfig::from_json(r#"{"strategies":["SustainDiffusion","RandomSearch"],"output_dir":"out"}"#)
            .unwrap();
        assert_eq!(cfg.repetitions, 10);
        assert!(cfg.evaluator.is_synthetic());
        assert_eq!(cfg.analysis.corrected_threshold(), 0.05 / 6.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejections() {
        let parse = |s: &str| CampaignConfig::from_json(s).and_then(|c| c.validate().map(|_| c));
        assert!(parse(r#"{"strategies":[],"output_dir":"o"}"#).is_err());
        assert!(parse(r#"{"strategies":["SustainDiffusion"],"repetitions":0}"#).is_err());
        assert!(parse(r#"{"strategies":["Nope"]}"#).is_err());
        assert!(parse(r#"{"strategies":["SD3Default"],"unknown":1}"#).is_err());
        assert!(parse(r#"{"strategies":["SD3Default"],"parallel":true,"evaluator":{"kind":"bridge","endpoint":"tcp://127.0.0.1:1"}}"#).is_err());
        assert!(parse(r#"{"strategies":["SD3Default"],"generalisation":{}}"#).is_err());
        assert!(parse(r#"{"strategies":["SD3Default"],"prompt_dataset":"/nonexistent/prompts.txt"}"#).is_err());
    }

    #[test]
    fn bundled_prompts() {
        let d = PromptDataset::bundled();
        assert_eq!(d.len(), 56);
        assert!(d
            .prompts
            .iter()
            .all(|p| p.starts_with("Photo portrait of a Software Engineer that ")));
        assert!(PromptDataset::parse("a\nb\na\n").is_err());
        assert!(PromptDataset::parse("# only a comment\n\n").is_err());
    }
}
