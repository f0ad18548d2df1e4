//! Search-space individuals: diffusion hyperparameters, sampled keyword
//! subsets and a uniform prompt weight, plus their rendering into a
//! positive/negative prompt pair.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_POSITIVE_POOL: &str = include_str!("../data/positive_keywords.txt");
const DEFAULT_NEGATIVE_POOL: &str = include_str!("../data/negative_keywords.txt");

#[derive(Debug, Error)]
pub enum GenotypeError {
    #[error("invalid search bounds: {0}")]
    Bounds(String),
    #[error("invalid keyword pool: {0}")]
    Pool(String),
    #[error("invalid individual: {0}")]
    Individual(String),
    #[error("base prompt must not be empty")]
    EmptyBasePrompt,
    #[error("cannot read keyword pool {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Ranges explored by the search. Guidance is kept in integer tenths so the
/// 0.1 grid is exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub guidance_min_tenths: u32,
    pub guidance_max_tenths: u32,
    pub guidance_step_tenths: u32,
    pub steps_min: u32,
    pub steps_max: u32,
    pub steps_step: u32,
    pub pos_count_max: usize,
    pub neg_count_max: usize,
    pub weight_min: u32,
    pub weight_max: u32,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            guidance_min_tenths: 0,
            guidance_max_tenths: 200,
            guidance_step_tenths: 1,
            steps_min: 25,
            steps_max: 80,
            steps_step: 1,
            pos_count_max: 20,
            neg_count_max: 25,
            weight_min: 0,
            weight_max: 5,
        }
    }
}

impl SearchBounds {
    /// Hyperparameters only: no keywords and no weighting.
    pub fn without_prompt_engineering() -> Self {
        Self {
            pos_count_max: 0,
            neg_count_max: 0,
            weight_min: 0,
            weight_max: 0,
            ..Self::default()
        }
    }

    pub fn guidance_min(&self) -> f64 {
        f64::from(self.guidance_min_tenths) / 10.0
    }

    pub fn guidance_max(&self) -> f64 {
        f64::from(self.guidance_max_tenths) / 10.0
    }

    pub fn validate(&self) -> Result<(), GenotypeError> {
        let err = |m: &str| Err(GenotypeError::Bounds(m.to_string()));
        if self.guidance_min_tenths > self.guidance_max_tenths {
            return err("guidance min exceeds max");
        }
        if self.guidance_step_tenths == 0 || self.steps_step == 0 {
            return err("grid steps must be positive");
        }
        if self.steps_min == 0 || self.steps_min > self.steps_max {
            return err("inference steps must be positive with min <= max");
        }
        if self.weight_min > self.weight_max {
            return err("weight min exceeds max");
        }
        Ok(())
    }

    fn on_grid(value: u32, min: u32, max: u32, step: u32) -> bool {
        value >= min && value <= max && (value - min).is_multiple_of(step)
    }

    fn sample_grid<R: Rng + ?Sized>(rng: &mut R, min: u32, max: u32, step: u32) -> u32 {
        let slots = (max - min) / step;
        min + step * rng.gen_range(0..=slots)
    }
}

/// Ordered keyword pools. Bias-shifting keywords may appear in both pools.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordPools {
    positive: Vec<String>,
    negative: Vec<String>,
}

impl Default for KeywordPools {
    fn default() -> Self {
        Self::new(parse_pool(DEFAULT_POSITIVE_POOL), parse_pool(DEFAULT_NEGATIVE_POOL))
            .expect("bundled keyword pools are valid")
    }
}

/// Parses the pool file format: one keyword per line, `#` comments,
/// trailing whitespace stripped, blank lines skipped.
pub fn parse_pool(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

impl KeywordPools {
    pub fn new(positive: Vec<String>, negative: Vec<String>) -> Result<Self, GenotypeError> {
        for (name, pool) in [("positive", &positive), ("negative", &negative)] {
            if pool.is_empty() {
                return Err(GenotypeError::Pool(format!("{name} pool is empty")));
            }
            let mut seen = BTreeSet::new();
            for kw in pool {
                if kw.trim().is_empty() {
                    return Err(GenotypeError::Pool(format!("{name} pool contains a blank keyword")));
                }
                if !seen.insert(kw.as_str()) {
                    return Err(GenotypeError::Pool(format!(
                        "{name} pool contains duplicate keyword {kw:?}"
                    )));
                }
            }
        }
        Ok(Self { positive, negative })
    }

    pub fn from_files(positive: &Path, negative: &Path) -> Result<Self, GenotypeError> {
        let read = |p: &Path| {
            fs::read_to_string(p).map_err(|source| GenotypeError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        Self::new(parse_pool(&read(positive)?), parse_pool(&read(negative)?))
    }

    pub fn positive(&self) -> &[String] {
        &self.positive
    }

    pub fn negative(&self) -> &[String] {
        &self.negative
    }
}

/// The genes of an individual, in single-point crossover order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gene {
    Guidance,
    Steps,
    PositiveKeywords,
    NegativeKeywords,
    Weight,
}

impl Gene {
    pub const ALL: [Gene; 5] = [
        Gene::Guidance,
        Gene::Steps,
        Gene::PositiveKeywords,
        Gene::NegativeKeywords,
        Gene::Weight,
    ];
}

pub const GENE_COUNT: usize = Gene::ALL.len();

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Individual {
    pub guidance_tenths: u32,
    pub inference_steps: u32,
    pub positive_keywords: BTreeSet<String>,
    pub negative_keywords: BTreeSet<String>,
    pub weight: u32,
}

/// Default hyperparameters of the model: guidance 7.0, 50 steps, no prompt
/// engineering.
impl Default for Individual {
    fn default() -> Self {
        Self {
            guidance_tenths: 70,
            inference_steps: 50,
            positive_keywords: BTreeSet::new(),
            negative_keywords: BTreeSet::new(),
            weight: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPair {
    pub positive_prompt: String,
    pub negative_prompt: String,
}

impl Individual {
    pub fn guidance_scale(&self) -> f64 {
        f64::from(self.guidance_tenths) / 10.0
    }

    /// Samples a fresh individual: counts first, then that many distinct
    /// keywords. A keyword drawn into both sets stays positive.
    pub fn new_random<R: Rng + ?Sized>(rng: &mut R, bounds: &SearchBounds, pools: &KeywordPools) -> Self {
        let guidance_tenths = SearchBounds::sample_grid(
            rng,
            bounds.guidance_min_tenths,
            bounds.guidance_max_tenths,
            bounds.guidance_step_tenths,
        );
        let inference_steps = SearchBounds::sample_grid(rng, bounds.steps_min, bounds.steps_max, bounds.steps_step);
        let positive_keywords = sample_keywords(rng, pools.positive(), bounds.pos_count_max);
        let negative_keywords = sample_keywords(rng, pools.negative(), bounds.neg_count_max);
        let weight = rng.gen_range(bounds.weight_min..=bounds.weight_max);
        let mut ind = Self {
            guidance_tenths,
            inference_steps,
            positive_keywords,
            negative_keywords,
            weight,
        };
        ind.repair();
        ind
    }

    /// Drops from the negative set any keyword also present in the positive set.
    pub fn repair(&mut self) {
        let positive = &self.positive_keywords;
        self.negative_keywords.retain(|k| !positive.contains(k));
    }

    pub fn validate(&self, bounds: &SearchBounds, pools: &KeywordPools) -> Result<(), GenotypeError> {
        let err = |m: String| Err(GenotypeError::Individual(m));
        if !SearchBounds::on_grid(
            self.guidance_tenths,
            bounds.guidance_min_tenths,
            bounds.guidance_max_tenths,
            bounds.guidance_step_tenths,
        ) {
            return err(format!("guidance {} off grid", self.guidance_scale()));
        }
        if !SearchBounds::on_grid(
            self.inference_steps,
            bounds.steps_min,
            bounds.steps_max,
            bounds.steps_step,
        ) {
            return err(format!("inference steps {} out of range", self.inference_steps));
        }
        if self.positive_keywords.len() > bounds.pos_count_max {
            return err(format!("{} positive keywords", self.positive_keywords.len()));
        }
        if self.negative_keywords.len() > bounds.neg_count_max {
            return err(format!("{} negative keywords", self.negative_keywords.len()));
        }
        if self.weight < bounds.weight_min || self.weight > bounds.weight_max {
            return err(format!("weight {} out of range", self.weight));
        }
        if let Some(k) = self.positive_keywords.intersection(&self.negative_keywords).next() {
            return err(format!("keyword {k:?} in both sets"));
        }
        if let Some(k) = self.positive_keywords.iter().find(|k| !pools.positive().contains(k)) {
            return err(format!("keyword {k:?} not in positive pool"));
        }
        if let Some(k) = self.negative_keywords.iter().find(|k| !pools.negative().contains(k)) {
            return err(format!("keyword {k:?} not in negative pool"));
        }
        Ok(())
    }

    /// Injective string key over genotypes; keyword sets are order-free.
    pub fn canonical_key(&self) -> String {
        serde_json::to_string(&(
            self.guidance_tenths,
            self.inference_steps,
            self.weight,
            &self.positive_keywords,
            &self.negative_keywords,
        ))
        .expect("plain data serializes")
    }

    /// Positive prompt is the base prompt followed by each weighted positive
    /// keyword; the negative prompt lists the weighted negative keywords.
    /// Keywords appear in pool order.
    pub fn render_prompts(&self, base_prompt: &str, pools: &KeywordPools) -> Result<PromptPair, GenotypeError> {
        if base_prompt.trim().is_empty() {
            return Err(GenotypeError::EmptyBasePrompt);
        }
        let suffix = "+".repeat(self.weight as usize);
        let weighted = |set: &BTreeSet<String>, pool: &[String]| -> Vec<String> {
            let mut ordered: Vec<&String> = pool.iter().filter(|k| set.contains(*k)).collect();
            ordered.extend(set.iter().filter(|k| !pool.contains(k)));
            ordered.into_iter().map(|k| format!("{k}{suffix}")).collect()
        };
        let mut positive = vec![base_prompt.to_string()];
        positive.extend(weighted(&self.positive_keywords, pools.positive()));
        Ok(PromptPair {
            positive_prompt: positive.join(", "),
            negative_prompt: weighted(&self.negative_keywords, pools.negative()).join(", "),
        })
    }

    fn copy_gene(&mut self, from: &Individual, gene: Gene) {
        match gene {
            Gene::Guidance => self.guidance_tenths = from.guidance_tenths,
            Gene::Steps => self.inference_steps = from.inference_steps,
            Gene::PositiveKeywords => self.positive_keywords = from.positive_keywords.clone(),
            Gene::NegativeKeywords => self.negative_keywords = from.negative_keywords.clone(),
            Gene::Weight => self.weight = from.weight,
        }
    }
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "guidance={:.1} steps={} weight={} +{} -{}",
            self.guidance_scale(),
            self.inference_steps,
            self.weight,
            self.positive_keywords.len(),
            self.negative_keywords.len()
        )
    }
}

fn sample_keywords<R: Rng + ?Sized>(rng: &mut R, pool: &[String], max: usize) -> BTreeSet<String> {
    let upper = max.min(pool.len());
    let count = rng.gen_range(0..=upper);
    index::sample(rng, pool.len(), count)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

/// Single-point crossover: the first child takes genes `0..=cut` from `a`
/// and the rest from `b`; the second child the opposite.
pub fn crossover_single_point(a: &Individual, b: &Individual, cut: usize) -> (Individual, Individual) {
    assert!(cut < GENE_COUNT, "crossover cut {cut} out of range");
    let mut first = a.clone();
    let mut second = b.clone();
    for gene in &Gene::ALL[cut + 1..] {
        first.copy_gene(b, *gene);
        second.copy_gene(a, *gene);
    }
    first.repair();
    second.repair();
    (first, second)
}

/// Random-reset mutation: each gene is replaced, with probability
/// `inner_p`, by the corresponding gene of a freshly sampled individual.
pub fn mutate<R: Rng + ?Sized>(
    ind: &Individual,
    rng: &mut R,
    inner_p: f64,
    bounds: &SearchBounds,
    pools: &KeywordPools,
) -> Individual {
    mutate_with_mask(ind, rng, inner_p, bounds, pools).0
}

pub(crate) fn mutate_with_mask<R: Rng + ?Sized>(
    ind: &Individual,
    rng: &mut R,
    inner_p: f64,
    bounds: &SearchBounds,
    pools: &KeywordPools,
) -> (Individual, [bool; GENE_COUNT]) {
    let fresh = Individual::new_random(rng, bounds, pools);
    let mut out = ind.clone();
    let mut mask = [false; GENE_COUNT];
    for (i, gene) in Gene::ALL.iter().enumerate() {
        if rng.gen_bool(inner_p) {
            out.copy_gene(&fresh, *gene);
            mask[i] = true;
        }
    }
    out.repair();
    (out, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn pools(pos: &[&str], neg: &[&str]) -> KeywordPools {
        KeywordPools::new(
            pos.iter().map(|s| s.to_string()).collect(),
            neg.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn default_bounds_match_table() {
        let b = SearchBounds::default();
        assert_eq!((b.guidance_min(), b.guidance_max()), (0.0, 20.0));
        assert_eq!((b.steps_min, b.steps_max), (25, 80));
        assert_eq!((b.pos_count_max, b.neg_count_max), (20, 25));
        assert_eq!((b.weight_min, b.weight_max), (0, 5));
        b.validate().unwrap();
    }

    #[test]
    fn bundled_pools() {
        let p = KeywordPools::default();
        assert_eq!(p.positive().len(), 20);
        assert_eq!(p.negative().len(), 25);
        assert!(p.positive().iter().any(|k| k == "ambitious"));
        assert!(p.negative().iter().any(|k| k == "ambitious"));
    }

    #[test]
    fn pool_validation() {
        assert!(KeywordPools::new(vec![], vec!["a".into()]).is_err());
        assert!(KeywordPools::new(vec!["a".into(), "a".into()], vec!["b".into()]).is_err());
        assert!(KeywordPools::new(vec!["  ".into()], vec!["b".into()]).is_err());
        assert_eq!(
            parse_pool("# header\nphotograph  \n\nphotoreal\n"),
            vec!["photograph", "photoreal"]
        );
    }

    #[test]
    fn random_individual_in_range() {
        let mut rng = seed::rng(0);
        let ind = Individual::new_random(&mut rng, &SearchBounds::default(), &KeywordPools::default());
        assert!(ind.guidance_tenths <= 200);
        assert!((25..=80).contains(&ind.inference_steps));
    }

    #[test]
    fn shared_keyword_never_in_both_sets() {
        let p = pools(&["photograph"], &["photograph"]);
        let b = SearchBounds::default();
        let mut rng = seed::rng(1);
        let mut positive_hits = 0;
        for _ in 0..2000 {
            let ind = Individual::new_random(&mut rng, &b, &p);
            assert!(ind.positive_keywords.is_disjoint(&ind.negative_keywords));
            positive_hits += ind.positive_keywords.len();
        }
        assert!(positive_hits > 0);
    }

    #[test]
    fn guidance_always_on_grid() {
        let b = SearchBounds::default();
        let p = KeywordPools::default();
        let mut rng = seed::rng(7);
        for _ in 0..10_000 {
            let ind = Individual::new_random(&mut rng, &b, &p);
            let g = ind.guidance_scale();
            assert_eq!((g * 10.0).round() / 10.0, g);
            ind.validate(&b, &p).unwrap();
        }
    }

    #[test]
    fn render_examples() {
        let p = pools(
            &["photograph", "photoreal", "award-winning"],
            &["illustration", "drawing"],
        );
        let ind = Individual {
            weight: 2,
            positive_keywords: set(&["photoreal"]),
            ..Individual::default()
        };
        let pair = ind.render_prompts("a cat", &p).unwrap();
        assert_eq!(pair.positive_prompt, "a cat, photoreal++");
        assert_eq!(pair.negative_prompt, "");

        let bare = Individual {
            weight: 4,
            ..Individual::default()
        };
        let pair = bare.render_prompts("a cat", &p).unwrap();
        assert_eq!(
            (pair.positive_prompt.as_str(), pair.negative_prompt.as_str()),
            ("a cat", "")
        );

        let ind = Individual {
            weight: 0,
            positive_keywords: set(&["award-winning", "photograph"]),
            negative_keywords: set(&["drawing"]),
            ..Individual::default()
        };
        let pair = ind.render_prompts("p", &p).unwrap();
        assert_eq!(pair.positive_prompt, "p, photograph, award-winning");
        assert_eq!(pair.negative_prompt, "drawing");

        assert!(matches!(
            ind.render_prompts("", &p),
            Err(GenotypeError::EmptyBasePrompt)
        ));
    }

    #[test]
    fn canonical_key_semantics() {
        let mut a = Individual::default();
        a.positive_keywords.insert("b".into());
        a.positive_keywords.insert("a".into());
        let mut b = Individual::default();
        b.positive_keywords.insert("a".into());
        b.positive_keywords.insert("b".into());
        assert_eq!(a.canonical_key(), b.canonical_key());

        let w0 = Individual {
            weight: 0,
            ..Individual::default()
        };
        let w1 = Individual {
            weight: 1,
            ..Individual::default()
        };
        assert_ne!(w0.canonical_key(), w1.canonical_key());
    }

    #[test]
    fn canonical_keys_distinct_for_distinct_individuals() {
        let b = SearchBounds::default();
        let p = KeywordPools::default();
        let mut rng = seed::rng(11);
        let mut inds: Vec<Individual> = Vec::new();
        while inds.len() < 1000 {
            let ind = Individual::new_random(&mut rng, &b, &p);
            if !inds.contains(&ind) {
                inds.push(ind);
            }
        }
        let keys: Vec<String> = inds.iter().map(Individual::canonical_key).collect();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                assert_ne!(keys[i], keys[j]);
            }
        }
    }

    #[test]
    fn crossover_cases() {
        let a = Individual {
            weight: 1,
            ..Individual::default()
        };
        let b = Individual {
            weight: 4,
            ..Individual::default()
        };
        let (c1, c2) = crossover_single_point(&a, &b, GENE_COUNT - 1);
        assert_eq!((c1, c2), (a.clone(), b.clone()));

        let (c1, c2) = crossover_single_point(&a, &b, 1);
        assert_eq!(c1, Individual { weight: 4, ..a.clone() });
        assert_eq!(c2, Individual { weight: 1, ..b.clone() });

        // k positive in a, negative in b; cut after the positive set
        let a = Individual {
            positive_keywords: set(&["k"]),
            ..Individual::default()
        };
        let b = Individual {
            negative_keywords: set(&["k", "z"]),
            ..Individual::default()
        };
        let (c1, _) = crossover_single_point(&a, &b, 2);
        assert!(c1.positive_keywords.contains("k"));
        assert_eq!(c1.negative_keywords, set(&["z"]));
    }

    #[test]
    fn mutation_extremes() {
        let b = SearchBounds::default();
        let p = KeywordPools::default();
        let mut rng = seed::rng(3);
        let ind = Individual::new_random(&mut rng, &b, &p);
        assert_eq!(mutate(&ind, &mut rng, 0.0, &b, &p), ind);

        // inner_p = 1 returns the fresh individual: replay the same stream
        let mut r1 = seed::rng(99);
        let mut r2 = seed::rng(99);
        let fresh = Individual::new_random(&mut r1, &b, &p);
        assert_eq!(mutate(&ind, &mut r2, 1.0, &b, &p), fresh);
    }

    #[test]
    fn mutation_frequency_per_gene() {
        let b = SearchBounds::default();
        let p = KeywordPools::default();
        let mut rng = seed::rng(5);
        let ind = Individual::default();
        let trials = 100_000;
        let mut counts = [0usize; GENE_COUNT];
        for _ in 0..trials {
            let (_, mask) = mutate_with_mask(&ind, &mut rng, 0.2, &b, &p);
            for (c, m) in counts.iter_mut().zip(mask) {
                *c += usize::from(m);
            }
        }
        for c in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.2).abs() <= 0.01, "frequency {freq}");
        }
    }
}
