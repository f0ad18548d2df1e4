//! Non-parametric statistics for comparing runs: Wilcoxon signed-rank,
//! Vargha-Delaney A12, Kruskal-Wallis H, Dunn's post-hoc test and Spearman
//! correlation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::AnalysisError;

pub const DEFAULT_ALPHA: f64 = 0.05;
/// Largest sample size for which Wilcoxon p-values are computed exactly.
pub const WILCOXON_EXACT_MAX: usize = 20;
pub const WILCOXON_MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    Greater,
    Less,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectClass {
    Small,
    Medium,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    pub value: f64,
    pub class: EffectClass,
}

impl EffectSize {
    pub fn a12(value: f64) -> Self {
        let class = if value >= 0.72 {
            EffectClass::Large
        } else if value >= 0.64 {
            EffectClass::Medium
        } else {
            EffectClass::Small
        };
        Self { value, class }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub threshold: f64,
    pub significant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect_size: Option<EffectSize>,
    /// Set when the test degenerates (e.g. all paired differences zero).
    pub degenerate: bool,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            // an empty f64 sum is -0.0
            statistic: statistic + 0.0,
            p_value,
            threshold: DEFAULT_ALPHA,
            significant: p_value < DEFAULT_ALPHA,
            effect_size: None,
            degenerate: false,
        }
    }

    /// Re-evaluates significance against `threshold` (e.g. 0.05 / 6).
    pub fn at_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.significant = self.p_value < threshold;
        self
    }

    pub fn with_effect(mut self, effect: EffectSize) -> Self {
        self.effect_size = Some(effect);
        self
    }
}

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Sizes of the groups of tied values.
fn tie_groups(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        groups.push(j - i + 1);
        i = j + 1;
    }
    groups
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid normal")
}

/// Wilcoxon signed-rank test on the paired differences `a - b`. Zero
/// differences are dropped. With at most 20 non-zero differences the null
/// distribution is computed exactly over every sign assignment (by counting
/// sums of doubled ranks); above that a tie-corrected normal approximation
/// is used. The statistic is the positive-rank sum W+.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alternative: Alternative) -> Result<TestResult, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < WILCOXON_MIN_PAIRS {
        return Err(AnalysisError::TooFewSamples {
            needed: WILCOXON_MIN_PAIRS,
            got: a.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        let mut r = TestResult::new(0.0, 1.0);
        r.degenerate = true;
        return Ok(r);
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let (p_greater, p_less) = if n <= WILCOXON_EXACT_MAX {
        // average ranks are multiples of 1/2, so doubled ranks are integers
        let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0u64; total + 1];
        counts[0] = 1;
        for &r in &doubled {
            for s in (r..=total).rev() {
                counts[s] += counts[s - r];
            }
        }
        let observed = (w_plus * 2.0).round() as usize;
        let all = (1u64 << n) as f64;
        let ge: u64 = counts[observed..].iter().sum();
        let le: u64 = counts[..=observed].iter().sum();
        (ge as f64 / all, le as f64 / all)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = tie_groups(&abs).iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term).sqrt();
        let normal = standard_normal();
        let upper = 1.0 - normal.cdf((w_plus - mean - 0.5) / sd);
        let lower = normal.cdf((w_plus - mean + 0.5) / sd);
        (upper, lower)
    };
    let p = match alternative {
        Alternative::Greater => p_greater,
        Alternative::Less => p_less,
        Alternative::TwoSided => (2.0 * p_greater.min(p_less)).min(1.0),
    };
    Ok(TestResult::new(w_plus, p))
}

/// Probability that a value drawn from `a` exceeds one drawn from `b`,
/// ties counting one half.
pub fn vargha_delaney_a12(a: &[f64], b: &[f64]) -> Result<EffectSize, AnalysisError> {
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut score = 0.0;
    for x in a {
        for y in b {
            if x > y {
                score += 1.0;
            } else if x == y {
                score += 0.5;
            }
        }
    }
    Ok(EffectSize::a12(score / (a.len() * b.len()) as f64))
}

fn check_groups(groups: &[Vec<f64>]) -> Result<(), AnalysisError> {
    if groups.len() < 2 {
        return Err(AnalysisError::TooFewSamples {
            needed: 2,
            got: groups.len(),
        });
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(AnalysisError::Empty);
    }
    Ok(())
}

struct PooledRanks {
    mean_ranks: Vec<f64>,
    sizes: Vec<usize>,
    total: usize,
    /// Sum of t^3 - t over tie groups.
    tie_sum: f64,
}

fn pooled_ranks(groups: &[Vec<f64>]) -> PooledRanks {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let ranks = average_ranks(&pooled);
    let mut offset = 0;
    let mut mean_ranks = Vec::with_capacity(groups.len());
    for g in groups {
        let sum: f64 = ranks[offset..offset + g.len()].iter().sum();
        mean_ranks.push(sum / g.len() as f64);
        offset += g.len();
    }
    PooledRanks {
        mean_ranks,
        sizes: groups.iter().map(Vec::len).collect(),
        total: pooled.len(),
        tie_sum: tie_groups(&pooled).iter().map(|&t| (t * t * t - t) as f64).sum(),
    }
}

/// Kruskal-Wallis H with tie correction; p from the chi-square
/// distribution with k - 1 degrees of freedom.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<TestResult, AnalysisError> {
    check_groups(groups)?;
    let pr = pooled_ranks(groups);
    let n = pr.total as f64;
    let correction = 1.0 - pr.tie_sum / (n * n * n - n);
    if correction <= 0.0 {
        // every value identical
        let mut r = TestResult::new(0.0, 1.0);
        r.degenerate = true;
        return Ok(r);
    }
    let sum: f64 = pr
        .mean_ranks
        .iter()
        .zip(&pr.sizes)
        .map(|(m, &s)| s as f64 * m * m)
        .sum();
    let h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
    let h = h.max(0.0);
    let chi = ChiSquared::new((groups.len() - 1) as f64).expect("positive degrees of freedom");
    Ok(TestResult::new(h, chi.sf(h)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DunnComparison {
    pub first: usize,
    pub second: usize,
    pub z: f64,
    pub p_raw: f64,
    /// Bonferroni-adjusted, clamped to 1.
    pub p_adjusted: f64,
    pub significant: bool,
}

/// Dunn's pairwise comparisons of mean ranks with tie correction and
/// Bonferroni adjustment over the k(k-1)/2 pairs. Meant to follow a
/// significant Kruskal-Wallis test; that is not checked here.
pub fn dunn_posthoc(groups: &[Vec<f64>]) -> Result<Vec<DunnComparison>, AnalysisError> {
    check_groups(groups)?;
    let pr = pooled_ranks(groups);
    let n = pr.total as f64;
    let k = groups.len();
    let pairs = (k * (k - 1) / 2) as f64;
    let variance_base = n * (n + 1.0) / 12.0 - pr.tie_sum / (12.0 * (n - 1.0).max(1.0));
    let normal = standard_normal();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let se = (variance_base * (1.0 / pr.sizes[i] as f64 + 1.0 / pr.sizes[j] as f64)).sqrt();
            let diff = pr.mean_ranks[i] - pr.mean_ranks[j];
            let (z, p_raw) = if se > 0.0 {
                let z = diff / se;
                (z, (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0))
            } else {
                (0.0, 1.0)
            };
            let p_adjusted = (p_raw * pairs).min(1.0);
            out.push(DunnComparison {
                first: i,
                second: j,
                z,
                p_raw,
                p_adjusted,
                significant: p_adjusted < DEFAULT_ALPHA,
            });
        }
    }
    Ok(out)
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(AnalysisError::TooFewSamples {
            needed: 3,
            got: x.len(),
        });
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::Undefined("zero rank variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
