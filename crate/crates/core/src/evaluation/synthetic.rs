//! Deterministic stand-in for the diffusion/detector/VQA stack.
//!
//! Quality peaks sharply at one guidance value, decays exponentially away
//! from it, and gains from more steps and a few
//! quality keywords, minus a penalty once the prompt carries more keywords
//! than the model can attend to. Every bias-shifting keyword moves the
//! gender and ethnicity skews by its own signed amount (scaled by the prompt
//! weight, reversed and halved in the negative prompt), so fair output needs
//! a particular mix of keywords rather than many of them. Energy and
//! duration are affine in the number of steps with bounded noise.
//!
//! All randomness for image `i` comes from a generator keyed by
//! `(landscape.seed, request.seed, i)`, so the landscape is a pure function
//! of `(landscape, request)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::protocol::{EvaluationRequest, EvaluationResponse};
use super::{EvalError, Evaluator};
use crate::derive_seed;
use crate::objectives::{Ethnicity, Gender, ImageRecord};
use crate::seed;

const STEPS_LOW: f64 = 25.0;
const STEPS_HIGH: f64 = 80.0;
const QUALITY_KEYWORD_SATURATION: f64 = 3.0;

/// (keyword, gender shift, ethnicity shift). Positive gender shifts favour
/// male images, positive ethnicity shifts favour the majority class.
const DEFAULT_BIAS_SHIFTS: [(&str, f64, f64); 7] = [
    ("ambitious", 0.2, -0.2),
    ("intelligent", -0.3, -0.5),
    ("supportive", -0.7, -0.1),
    ("confident", 0.2, -0.2),
    ("compassionate", -0.8, -0.2),
    ("creative", -0.4, -0.3),
    ("determined", 0.1, -0.4),
];

const DEFAULT_QUALITY_KEYWORDS: [&str; 13] = [
    "photograph",
    "photoreal",
    "award-winning",
    "high resolution",
    "sharp focus",
    "professional lighting",
    "highly detailed",
    "8k",
    "studio portrait",
    "realistic",
    "natural skin texture",
    "cinematic lighting",
    "bokeh",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasShift {
    pub gender: f64,
    pub ethnicity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticLandscape {
    pub quality_peak_guidance: f64,
    /// Guidance distance over which the peak term falls by a factor e.
    pub quality_width: f64,
    /// Quality with guidance far from the peak, minimum steps and no keywords.
    pub quality_floor: f64,
    pub peak_gain: f64,
    /// Gain going from the minimum to the maximum number of steps.
    pub steps_gain: f64,
    pub quality_keyword_gain: f64,
    /// Gain from quality-degrading terms placed in the negative prompt.
    pub negative_keyword_gain: f64,
    /// Keywords (both prompts together) before quality starts to drop.
    pub keyword_budget: usize,
    /// Quality lost per keyword beyond the budget.
    pub keyword_penalty: f64,
    /// Quality lost per unit of prompt weight.
    pub weight_penalty: f64,
    /// CPU kWh per denoising step.
    pub energy_per_step: f64,
    pub gpu_energy_ratio: f64,
    pub seconds_per_step: f64,
    pub bias_shifts: BTreeMap<String, BiasShift>,
    pub quality_keywords: BTreeSet<String>,
    /// Half-width of the uniform per-image quality noise.
    pub noise_amplitude: f64,
    /// Relative half-width of the per-image energy/duration noise.
    pub energy_noise: f64,
    /// P(male) - P(female) with no bias keywords present.
    pub base_gender_skew: f64,
    /// Extra probability mass on the majority ethnicity with no bias keywords.
    pub base_ethnic_skew: f64,
    /// Skew amplification per unit of prompt weight.
    pub weight_gain: f64,
    pub unknown_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticLandscape {
    fn default() -> Self {
        Self {
            quality_peak_guidance: 7.0,
            quality_width: 1.5,
            quality_floor: 0.25,
            peak_gain: 0.55,
            steps_gain: 0.08,
            quality_keyword_gain: 0.08,
            negative_keyword_gain: 0.04,
            keyword_budget: 8,
            keyword_penalty: 0.008,
            weight_penalty: 0.01,
            energy_per_step: 4e-6,
            gpu_energy_ratio: 2.5,
            seconds_per_step: 0.45,
            bias_shifts: DEFAULT_BIAS_SHIFTS
                .iter()
                .map(|&(k, gender, ethnicity)| (k.to_string(), BiasShift { gender, ethnicity }))
                .collect(),
            quality_keywords: DEFAULT_QUALITY_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            noise_amplitude: 0.01,
            energy_noise: 0.01,
            base_gender_skew: 0.9,
            base_ethnic_skew: 0.8,
            weight_gain: 0.3,
            unknown_rate: 0.02,
            seed: 0,
        }
    }
}

/// Keyword content recovered from a rendered prompt pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PromptFeatures {
    pub positive_bias: usize,
    pub negative_bias: usize,
    pub positive_quality: usize,
    pub positive_other: usize,
    pub negative_other: usize,
    pub weight: usize,
    /// Summed shifts: positive-prompt keywords minus half the negative ones.
    pub gender_shift: f64,
    pub ethnic_shift: f64,
}

impl PromptFeatures {
    pub fn keyword_count(&self) -> usize {
        self.positive_bias + self.negative_bias + self.positive_quality + self.positive_other + self.negative_other
    }
}

fn tokens(prompt: &str) -> impl Iterator<Item = (&str, usize)> {
    prompt.split(',').map(str::trim).filter(|t| !t.is_empty()).map(|t| {
        let bare = t.trim_end_matches('+');
        (bare, t.len() - bare.len())
    })
}

impl SyntheticLandscape {
    /// Parses landscape parameters; omitted fields keep their defaults.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn features(&self, req: &EvaluationRequest) -> PromptFeatures {
        let mut f = PromptFeatures::default();
        // the first segment of the positive prompt is the base prompt
        for (kw, plus) in tokens(&req.positive_prompt).skip(1) {
            f.weight = f.weight.max(plus);
            if let Some(shift) = self.bias_shifts.get(kw) {
                f.positive_bias += 1;
                f.gender_shift += shift.gender;
                f.ethnic_shift += shift.ethnicity;
            } else if self.quality_keywords.contains(kw) {
                f.positive_quality += 1;
            } else {
                f.positive_other += 1;
            }
        }
        for (kw, plus) in tokens(&req.negative_prompt) {
            f.weight = f.weight.max(plus);
            if let Some(shift) = self.bias_shifts.get(kw) {
                f.negative_bias += 1;
                f.gender_shift -= 0.5 * shift.gender;
                f.ethnic_shift -= 0.5 * shift.ethnicity;
            } else {
                f.negative_other += 1;
            }
        }
        f
    }

    /// Expected per-image quality, before noise.
    pub fn expected_quality(&self, req: &EvaluationRequest) -> f64 {
        let f = self.features(req);
        let z = (req.guidance_scale - self.quality_peak_guidance) / self.quality_width;
        let peak = (-z.abs()).exp();
        let steps = ((f64::from(req.inference_steps) - STEPS_LOW) / (STEPS_HIGH - STEPS_LOW)).clamp(0.0, 1.0);
        let pos = (f.positive_quality as f64).min(QUALITY_KEYWORD_SATURATION) / QUALITY_KEYWORD_SATURATION;
        let neg = (f.negative_other as f64).min(QUALITY_KEYWORD_SATURATION) / QUALITY_KEYWORD_SATURATION;
        let excess = f.keyword_count().saturating_sub(self.keyword_budget) as f64;
        let q = self.quality_floor
            + self.peak_gain * peak
            + self.steps_gain * steps
            + self.quality_keyword_gain * pos
            + self.negative_keyword_gain * neg
            - self.keyword_penalty * excess
            - self.weight_penalty * f.weight as f64;
        q.clamp(0.0, 1.0)
    }

    fn amplification(&self, f: &PromptFeatures) -> f64 {
        1.0 + self.weight_gain * f.weight as f64
    }

    /// Expected P(male) - P(female).
    pub fn gender_skew(&self, req: &EvaluationRequest) -> f64 {
        let f = self.features(req);
        (self.base_gender_skew + self.amplification(&f) * f.gender_shift).clamp(-1.0, 1.0)
    }

    /// Signed extra mass on one ethnicity: the majority class when positive,
    /// an over-corrected minority class when negative.
    pub fn ethnic_skew(&self, req: &EvaluationRequest) -> f64 {
        let f = self.features(req);
        (self.base_ethnic_skew + self.amplification(&f) * f.ethnic_shift).clamp(-1.0, 1.0)
    }

    fn image(&self, req: &EvaluationRequest, index: u32, quality: f64, gskew: f64, eskew: f64) -> ImageRecord {
        let mut rng = seed::rng(derive_seed!(self.seed, req.seed, index));
        let noise = |rng: &mut rand_chacha::ChaCha8Rng, amp: f64| {
            if amp > 0.0 {
                rng.gen_range(-amp..=amp)
            } else {
                0.0
            }
        };
        let quality = (quality + noise(&mut rng, self.noise_amplitude)).clamp(0.0, 1.0);

        let gender = if rng.gen_bool(self.unknown_rate) {
            Gender::Unknown
        } else if rng.gen_bool((0.5 + gskew / 2.0).clamp(0.0, 1.0)) {
            Gender::Male
        } else {
            Gender::Female
        };

        let ethnicity = if rng.gen_bool(self.unknown_rate) {
            Ethnicity::Unknown
        } else {
            let favoured = if eskew >= 0.0 {
                Ethnicity::White
            } else {
                Ethnicity::Black
            };
            let mass = eskew.abs();
            let u: f64 = rng.gen();
            if u < mass {
                favoured
            } else {
                let slot = (((u - mass) / (1.0 - mass)) * 4.0) as usize;
                Ethnicity::CLASSES[slot.min(3)]
            }
        };

        let steps = f64::from(req.inference_steps);
        let cpu = self.energy_per_step * (steps + 2.5) * (1.0 + noise(&mut rng, self.energy_noise));
        let gpu =
            self.gpu_energy_ratio * self.energy_per_step * (steps + 4.0) * (1.0 + noise(&mut rng, self.energy_noise));
        let duration = (self.seconds_per_step * steps + 1.5) * (1.0 + noise(&mut rng, self.energy_noise));

        ImageRecord {
            quality,
            gender,
            ethnicity,
            cpu_kwh: cpu,
            gpu_kwh: gpu,
            duration_s: duration,
        }
    }
}

/// Evaluates a request against the landscape.
pub fn synthetic_evaluate(landscape: &SyntheticLandscape, req: &EvaluationRequest) -> EvaluationResponse {
    if let Err(msg) = req.validate() {
        return EvaluationResponse {
            request_id: req.request_id,
            outcome: Err(msg),
        };
    }
    let quality = landscape.expected_quality(req);
    let gskew = landscape.gender_skew(req);
    let eskew = landscape.ethnic_skew(req);
    let records = (0..req.image_count)
        .map(|i| landscape.image(req, i, quality, gskew, eskew))
        .collect();
    EvaluationResponse {
        request_id: req.request_id,
        outcome: Ok(records),
    }
}

#[derive(Debug, Clone, Default)]
pub struct SyntheticEvaluator {
    pub landscape: SyntheticLandscape,
}

impl SyntheticEvaluator {
    pub fn new(landscape: SyntheticLandscape) -> Self {
        Self { landscape }
    }
}

impl Evaluator for SyntheticEvaluator {
    fn evaluate(&mut self, request: &EvaluationRequest) -> Result<Vec<ImageRecord>, EvalError> {
        synthetic_evaluate(&self.landscape, request)
            .outcome
            .map_err(EvalError::Rejected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(guidance: f64, steps: u32, positive: &str, negative: &str, seed: u64) -> EvaluationRequest {
        EvaluationRequest {
            request_id: 1,
            positive_prompt: positive.into(),
            negative_prompt: negative.into(),
            guidance_scale: guidance,
            inference_steps: steps,
            image_count: 20,
            seed,
        }
    }

    #[test]
    fn deterministic() {
        let l = SyntheticLandscape::default();
        let r = request(6.0, 40, "base, photograph++, ambitious++", "drawing++", 3);
        assert_eq!(synthetic_evaluate(&l, &r), synthetic_evaluate(&l, &r));
    }

    #[test]
    fn feature_parsing() {
        let l = SyntheticLandscape::default();
        let r = request(
            7.0,
            50,
            "a cat, photograph+++, ambitious+++",
            "drawing+++, supportive+++",
            1,
        );
        assert_eq!(
            l.features(&r),
            PromptFeatures {
                positive_bias: 1,
                negative_bias: 1,
                positive_quality: 1,
                positive_other: 0,
                negative_other: 1,
                weight: 3,
                gender_shift: 0.2 + 0.5 * 0.7,
                ethnic_shift: -0.2 + 0.5 * 0.1,
            }
        );
    }

    #[test]
    fn noise_off_ignores_seed_for_quality() {
        let l = SyntheticLandscape {
            noise_amplitude: 0.0,
            ..SyntheticLandscape::default()
        };
        let q = |seed| -> Vec<f64> {
            synthetic_evaluate(&l, &request(5.0, 30, "base", "", seed))
                .outcome
                .unwrap()
                .iter()
                .map(|r| r.quality)
                .collect()
        };
        assert_eq!(q(1), q(2));
    }

    #[test]
    fn energy_grows_with_steps() {
        let l = SyntheticLandscape::default();
        for seed in 0..50 {
            let lo = synthetic_evaluate(&l, &request(7.0, 25, "b", "", seed))
                .outcome
                .unwrap();
            let hi = synthetic_evaluate(&l, &request(7.0, 80, "b", "", seed))
                .outcome
                .unwrap();
            let med = |v: &[ImageRecord]| crate::objectives::median(&v.iter().map(|r| r.cpu_kwh).collect::<Vec<_>>());
            assert!(med(&hi) >= med(&lo));
        }
    }

    #[test]
    fn zero_bias_keywords_give_max_skew() {
        let l = SyntheticLandscape {
            unknown_rate: 0.0,
            ..SyntheticLandscape::default()
        };
        let mut male = 0usize;
        let mut total = 0usize;
        for seed in 0..500u64 {
            for r in synthetic_evaluate(&l, &request(7.0, 50, "base", "", seed))
                .outcome
                .unwrap()
            {
                total += 1;
                male += usize::from(r.gender == Gender::Male);
            }
        }
        let p = male as f64 / total as f64;
        let expected = 0.5 + l.base_gender_skew / 2.0;
        let sigma = (expected * (1.0 - expected) / total as f64).sqrt();
        assert_eq!(total, 10_000);
        assert!((p - expected).abs() <= 3.0 * sigma, "p_male {p} vs {expected}");
    }

    #[test]
    fn invalid_request_is_rejected() {
        let l = SyntheticLandscape::default();
        let mut r = request(7.0, 50, "b", "", 0);
        r.image_count = 0;
        assert!(synthetic_evaluate(&l, &r).outcome.is_err());
    }
}
