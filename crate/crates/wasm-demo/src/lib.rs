//! Browser bindings for three small views of the search engine: the bias
//! scores of a labelled image batch, the Pareto front and hypervolume of a
//! hand-placed 2-D point set, and a seeded NSGA-II vs random search race on
//! the synthetic landscape.
//!
//! Results are returned as JSON strings so the page needs no generated
//! TypeScript glue beyond the wasm-bindgen loader.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sdtune::analysis::{hypervolume, pareto_front_oriented, reference_point};
use sdtune::evaluation::{SyntheticEvaluator, SyntheticLandscape};
use sdtune::genotype::KeywordPools;
use sdtune::objectives::{ethnic_bias, gender_bias, Ethnicity, EvaluationBatch, Gender, ImageRecord, Objective};
use sdtune::search::{run_strategy, RunLog, SearchConfig, Strategy};

#[derive(Serialize)]
struct BiasScores {
    gender_bias: f64,
    ethnic_bias: f64,
    images: usize,
}

fn record(gender: Gender, ethnicity: Ethnicity) -> ImageRecord {
    ImageRecord {
        quality: 0.0,
        gender,
        ethnicity,
        cpu_kwh: 0.0,
        gpu_kwh: 0.0,
        duration_s: 0.0,
    }
}

/// Gender and ethnic bias of a batch described by label counts. Gender
/// labels and ethnicity labels are paired up in order; the shorter list is
/// padded with unknown labels.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn bias_scores(
    male: u32,
    female: u32,
    gender_unknown: u32,
    arab: u32,
    asian: u32,
    black: u32,
    white: u32,
    ethnicity_unknown: u32,
) -> Result<String, JsError> {
    bias_json(
        [male, female, gender_unknown],
        [arab, asian, black, white, ethnicity_unknown],
    )
    .map_err(|e| JsError::new(&e))
}

fn bias_json(genders: [u32; 3], ethnicities: [u32; 5]) -> Result<String, String> {
    let genders: Vec<Gender> = [Gender::Male, Gender::Female, Gender::Unknown]
        .iter()
        .zip(genders)
        .flat_map(|(&g, n)| std::iter::repeat_n(g, n as usize))
        .collect();
    let ethnicities: Vec<Ethnicity> = [
        Ethnicity::Arab,
        Ethnicity::Asian,
        Ethnicity::Black,
        Ethnicity::White,
        Ethnicity::Unknown,
    ]
    .iter()
    .zip(ethnicities)
    .flat_map(|(&e, n)| std::iter::repeat_n(e, n as usize))
    .collect();
    let len = genders.len().max(ethnicities.len());
    let records = (0..len)
        .map(|i| {
            record(
                genders.get(i).copied().unwrap_or(Gender::Unknown),
                ethnicities.get(i).copied().unwrap_or(Ethnicity::Unknown),
            )
        })
        .collect();
    let batch = EvaluationBatch::new("demo".into(), records).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&BiasScores {
        gender_bias: gender_bias(&batch),
        ethnic_bias: ethnic_bias(&batch),
        images: len,
    })
    .expect("serializes"))
}

#[derive(Serialize)]
struct FrontView {
    front: Vec<usize>,
    reference: Vec<f64>,
    hypervolume: f64,
}

/// Non-dominated subset and hypervolume of `points_json`, a JSON array of
/// `[x, y]` pairs, both minimized. The reference point is the worst value
/// per axis plus `epsilon`.
#[wasm_bindgen]
pub fn front_hypervolume(points_json: &str, epsilon: f64) -> Result<String, JsError> {
    front_json(points_json, epsilon).map_err(|e| JsError::new(&e))
}

fn front_json(points_json: &str, epsilon: f64) -> Result<String, String> {
    let points: Vec<Vec<f64>> = serde_json::from_str(points_json).map_err(|e| e.to_string())?;
    if points.iter().any(|p| p.len() != 2) {
        return Err("every point needs exactly two coordinates".into());
    }
    let err = |e: sdtune::analysis::AnalysisError| e.to_string();
    let front = pareto_front_oriented(&points).map_err(err)?;
    let reference = reference_point(std::slice::from_ref(&points), epsilon).map_err(err)?;
    let members: Vec<Vec<f64>> = front.iter().map(|&i| points[i].clone()).collect();
    let hypervolume = hypervolume(&members, &reference).map_err(err)?;
    Ok(serde_json::to_string(&FrontView {
        front,
        reference: reference.0,
        hypervolume,
    })
    .expect("serializes"))
}

#[derive(Serialize)]
struct Frame {
    evaluations: usize,
    /// `[gender_bias, image_quality]` of every non-dominated point seen so far.
    front: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct Trace {
    strategy: &'static str,
    frames: Vec<Frame>,
}

/// Best-so-far front on the two plotted objectives after each snapshot.
fn trace(log: &RunLog) -> Trace {
    let mut evaluations = 0;
    let mut archive: Vec<[f64; 2]> = Vec::new();
    let frames = log
        .snapshots
        .iter()
        .map(|s| {
            evaluations += s.new_evaluations;
            archive.extend(
                s.population
                    .iter()
                    .map(|e| [e.fitness.metrics.gender_bias, e.fitness.metrics.image_quality]),
            );
            let oriented: Vec<Vec<f64>> = archive.iter().map(|[g, q]| vec![*g, -q]).collect();
            let keep = pareto_front_oriented(&oriented).expect("two finite objectives");
            let mut front: Vec<[f64; 2]> = keep.iter().map(|&i| archive[i]).collect();
            front.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            front.dedup();
            archive = front.clone();
            Frame { evaluations, front }
        })
        .collect();
    Trace {
        strategy: log.strategy.name(),
        frames,
    }
}

/// Runs NSGA-II and random search with the same seed on the default
/// synthetic landscape and returns the best-so-far front after every
/// generation (or iteration) of each.
#[wasm_bindgen]
pub fn search_race(seed: u32, images: u32) -> Result<String, JsError> {
    race_json(seed, images).map_err(|e| JsError::new(&e))
}

fn race_json(seed: u32, images: u32) -> Result<String, String> {
    let cfg = SearchConfig {
        seed: u64::from(seed),
        images_per_individual: images.clamp(1, 50),
        ..SearchConfig::default()
    };
    let pools = KeywordPools::default();
    let mut evaluator = SyntheticEvaluator::new(SyntheticLandscape::default());
    let traces: Vec<Trace> = [Strategy::SustainDiffusion, Strategy::RandomSearch]
        .iter()
        .map(|&s| run_strategy(s, &cfg, Objective::CpuEnergy, &pools, &mut evaluator).map(|log| trace(&log)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&traces).expect("serializes"))
}

/// Names of the objectives the race frames plot, for axis labels.
#[wasm_bindgen]
pub fn race_axes() -> String {
    serde_json::to_string(&[Objective::GenderBias.name(), Objective::ImageQuality.name()]).expect("serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn bias_of_a_balanced_batch_is_zero() {
        let v: Value = serde_json::from_str(&bias_json([10, 10, 0], [5, 5, 5, 5, 0]).unwrap()).unwrap();
        assert_eq!(v["images"], 20);
        assert_eq!(v["gender_bias"], 0.0);
        assert_eq!(v["ethnic_bias"], 0.0);
        assert!(bias_json([0, 0, 0], [0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn worked_front() {
        let v: Value = serde_json::from_str(&front_json("[[0,1],[0.5,0.5],[1,0],[1,1]]", 0.5).unwrap()).unwrap();
        assert_eq!(v["front"], serde_json::json!([0, 1, 2]));
        assert_eq!(v["reference"], serde_json::json!([1.5, 1.5]));
        assert!((v["hypervolume"].as_f64().unwrap() - 1.5).abs() < 1e-12);
        assert!(front_json("[[1,2,3]]", 0.5).is_err());
        assert!(front_json("nope", 0.5).is_err());
    }

    #[test]
    fn race_fronts_only_improve() {
        let traces: Value = serde_json::from_str(&race_json(3, 20).unwrap()).unwrap();
        let traces = traces.as_array().unwrap();
        assert_eq!(traces.len(), 2);
        for t in traces {
            let frames = t["frames"].as_array().unwrap();
            for pair in frames.windows(2) {
                let before = pair[0]["front"].as_array().unwrap();
                let after = pair[1]["front"].as_array().unwrap();
                assert!(pair[1]["evaluations"].as_u64() >= pair[0]["evaluations"].as_u64());
                // every earlier point is matched or weakly dominated later
                for p in before {
                    let (g, q) = (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
                    assert!(after
                        .iter()
                        .any(|r| r[0].as_f64().unwrap() <= g && r[1].as_f64().unwrap() >= q));
                }
            }
        }
        assert_eq!(
            traces[1]["frames"].as_array().unwrap().last().unwrap()["evaluations"],
            100
        );
    }
}
