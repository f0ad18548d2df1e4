use proptest::prelude::*;
use sdtune::evaluation::{synthetic_evaluate, EvaluationRequest, SyntheticLandscape};
use sdtune::objectives::{
    aggregate_quality, energy_fitness, ethnic_bias, gender_bias, image_quality, median, Ethnicity, EvaluationBatch,
    Gender, ImageRecord, Metrics, ObjectiveError,
};

const GENDERS: [Gender; 3] = [Gender::Male, Gender::Female, Gender::Unknown];
const ETHNICITIES: [Ethnicity; 5] = [
    Ethnicity::Arab,
    Ethnicity::Asian,
    Ethnicity::Black,
    Ethnicity::White,
    Ethnicity::Unknown,
];

fn record(gender: Gender, ethnicity: Ethnicity, quality: f64, energy: f64) -> ImageRecord {
    ImageRecord {
        quality,
        gender,
        ethnicity,
        cpu_kwh: energy,
        gpu_kwh: 2.0 * energy,
        duration_s: 10.0 * energy,
    }
}

fn labels() -> impl Strategy<Value = Vec<(usize, usize, f64, f64)>> {
    prop::collection::vec((0usize..3, 0usize..5, 0.0f64..=1.0, 0.0f64..10.0), 1..40)
}

fn batch(raw: &[(usize, usize, f64, f64)]) -> EvaluationBatch {
    let records = raw
        .iter()
        .map(|&(g, e, q, x)| record(GENDERS[g], ETHNICITIES[e], q, x))
        .collect();
    EvaluationBatch::new("k".into(), records).unwrap()
}

proptest! {
    #[test]
    fn gender_bias_matches_percentage_oracle(raw in labels()) {
        let b = batch(&raw);
        let male = raw.iter().filter(|r| r.0 == 0).count() as f64;
        let female = raw.iter().filter(|r| r.0 == 1).count() as f64;
        let want = if male + female == 0.0 { 1.0 } else { (male - female).abs() / (male + female) };
        let got = gender_bias(&b);
        prop_assert!((got - want).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&got));
    }

    #[test]
    fn ethnic_bias_matches_percentage_oracle(raw in labels()) {
        let b = batch(&raw);
        let known: Vec<usize> = raw.iter().map(|r| r.1).filter(|&e| e < 4).collect();
        let got = ethnic_bias(&b);
        if known.is_empty() {
            prop_assert_eq!(got, 1.0);
        } else {
            let pct: Vec<f64> = (0..4).map(|c| 100.0 * known.iter().filter(|&&e| e == c).count() as f64 / known.len() as f64).collect();
            let spread = pct.iter().cloned().fold(f64::MIN, f64::max) - pct.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert!((got - spread / 100.0).abs() < 1e-12);
        }
        prop_assert!((0.0..=1.0).contains(&got));
    }

    #[test]
    fn energy_uses_medians(raw in labels()) {
        let b = batch(&raw);
        let energies: Vec<f64> = raw.iter().map(|r| r.3).collect();
        let mut sorted = energies.clone();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len() / 2;
        let want = if sorted.len().is_multiple_of(2) { (sorted[m - 1] + sorted[m]) / 2.0 } else { sorted[m] };
        let e = energy_fitness(&b);
        prop_assert_eq!(e.cpu, want);
        prop_assert_eq!(median(&energies), want);
        prop_assert!((e.gpu - 2.0 * want).abs() < 1e-12);
        let q = aggregate_quality(&b);
        prop_assert!((q - raw.iter().map(|r| r.2).sum::<f64>() / raw.len() as f64).abs() < 1e-12);
    }
}

#[test]
fn quality_of_detections() {
    assert_eq!(image_quality(&[]).unwrap(), 0.0);
    assert!((image_quality(&[0.9, 0.7]).unwrap() - 0.8).abs() < 1e-12);
    assert_eq!(image_quality(&[1.2]), Err(ObjectiveError::Confidence(1.2)));
}

#[test]
fn batches_reject_bad_records() {
    assert_eq!(
        EvaluationBatch::new("k".into(), vec![]),
        Err(ObjectiveError::EmptyBatch)
    );
    let bad = record(Gender::Male, Ethnicity::White, 0.5, -1.0);
    assert!(EvaluationBatch::new("k".into(), vec![bad]).is_err());
}

#[test]
fn metrics_collect_every_objective() {
    let b = batch(&[(0, 3, 0.4, 1.0), (1, 2, 0.6, 3.0)]);
    let m = Metrics::from_batch(&b);
    assert_eq!(m.gender_bias, 0.0);
    assert_eq!(m.ethnic_bias, 0.5);
    assert!((m.image_quality - 0.5).abs() < 1e-12);
    assert_eq!((m.cpu_energy, m.gpu_energy, m.duration), (2.0, 4.0, 20.0));
}

#[test]
fn unprompted_landscape_is_maximally_skewed() {
    let landscape = SyntheticLandscape::default();
    let (mut male, mut known) = (0usize, 0usize);
    for seed in 0..500u64 {
        let req = EvaluationRequest {
            request_id: seed,
            positive_prompt: "Photo portrait of a Software Engineer that codes".into(),
            negative_prompt: String::new(),
            guidance_scale: 7.0,
            inference_steps: 50,
            image_count: 20,
            seed,
        };
        assert_eq!(landscape.gender_skew(&req), landscape.base_gender_skew);
        for r in synthetic_evaluate(&landscape, &req).outcome.unwrap() {
            match r.gender {
                Gender::Male => {
                    male += 1;
                    known += 1;
                }
                Gender::Female => known += 1,
                Gender::Unknown => {}
            }
        }
    }
    let p = 0.5 + landscape.base_gender_skew / 2.0;
    let sigma = (p * (1.0 - p) / known as f64).sqrt();
    let observed = male as f64 / known as f64;
    assert!(
        (observed - p).abs() <= 3.0 * sigma,
        "P(male) {observed} vs {p} ± {sigma}"
    );
}
