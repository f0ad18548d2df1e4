//! Fitness functions computed from a batch of generated images: image
//! quality, gender bias, ethnic bias and median energy/duration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("confidence {0} outside [0, 1]")]
    Confidence(f64),
    #[error("invalid image record: {0}")]
    Record(String),
    #[error("evaluation batch has no records")]
    EmptyBatch,
    #[error("invalid objective spec: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ethnicity {
    Arab,
    Asian,
    Black,
    White,
    Unknown,
}

impl Ethnicity {
    pub const CLASSES: [Ethnicity; 4] = [Ethnicity::Arab, Ethnicity::Asian, Ethnicity::Black, Ethnicity::White];
}

/// Per-image evaluator output. Field names double as the wire format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub quality: f64,
    pub gender: Gender,
    pub ethnicity: Ethnicity,
    pub cpu_kwh: f64,
    pub gpu_kwh: f64,
    pub duration_s: f64,
}

impl ImageRecord {
    pub fn validate(&self) -> Result<(), ObjectiveError> {
        if !(0.0..=1.0).contains(&self.quality) {
            return Err(ObjectiveError::Record(format!(
                "quality {} outside [0, 1]",
                self.quality
            )));
        }
        for (name, v) in [
            ("cpu_kwh", self.cpu_kwh),
            ("gpu_kwh", self.gpu_kwh),
            ("duration_s", self.duration_s),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ObjectiveError::Record(format!(
                    "{name} = {v} is not a non-negative number"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationBatch {
    pub individual_key: String,
    pub records: Vec<ImageRecord>,
}

impl EvaluationBatch {
    pub fn new(individual_key: String, records: Vec<ImageRecord>) -> Result<Self, ObjectiveError> {
        if records.is_empty() {
            return Err(ObjectiveError::EmptyBatch);
        }
        records.iter().try_for_each(ImageRecord::validate)?;
        Ok(Self {
            individual_key,
            records,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    ImageQuality,
    GenderBias,
    EthnicBias,
    CpuEnergy,
    GpuEnergy,
    Duration,
}

impl Objective {
    pub const ALL: [Objective; 6] = [
        Objective::ImageQuality,
        Objective::GenderBias,
        Objective::EthnicBias,
        Objective::CpuEnergy,
        Objective::GpuEnergy,
        Objective::Duration,
    ];

    pub fn direction(self) -> Direction {
        match self {
            Objective::ImageQuality => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::ImageQuality => "image_quality",
            Objective::GenderBias => "gender_bias",
            Objective::EthnicBias => "ethnic_bias",
            Objective::CpuEnergy => "cpu_energy",
            Objective::GpuEnergy => "gpu_energy",
            Objective::Duration => "duration",
        }
    }

    pub fn parse(name: &str) -> Option<Objective> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }
}

/// Ordered, duplicate-free list of objectives with their directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Objective>", into = "Vec<Objective>")]
pub struct ObjectiveSpec {
    objectives: Vec<Objective>,
}

impl TryFrom<Vec<Objective>> for ObjectiveSpec {
    type Error = ObjectiveError;

    fn try_from(objectives: Vec<Objective>) -> Result<Self, Self::Error> {
        Self::new(objectives)
    }
}

impl From<ObjectiveSpec> for Vec<Objective> {
    fn from(spec: ObjectiveSpec) -> Self {
        spec.objectives
    }
}

impl Default for ObjectiveSpec {
    fn default() -> Self {
        Self::sustain_diffusion()
    }
}

impl ObjectiveSpec {
    pub fn new(objectives: Vec<Objective>) -> Result<Self, ObjectiveError> {
        if objectives.is_empty() {
            return Err(ObjectiveError::Spec("no objectives".into()));
        }
        for (i, o) in objectives.iter().enumerate() {
            if objectives[..i].contains(o) {
                return Err(ObjectiveError::Spec(format!("duplicate objective {}", o.name())));
            }
        }
        Ok(Self { objectives })
    }

    /// Quality, gender bias, ethnic bias and CPU energy.
    pub fn sustain_diffusion() -> Self {
        Self::new(Objective::ALL[..4].to_vec()).unwrap()
    }

    /// Every tracked objective, including GPU energy and duration.
    pub fn all_tracked() -> Self {
        Self::new(Objective::ALL.to_vec()).unwrap()
    }

    pub fn single(objective: Objective) -> Self {
        Self {
            objectives: vec![objective],
        }
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    pub fn without(&self, objective: Objective) -> Result<Self, ObjectiveError> {
        Self::new(self.objectives.iter().copied().filter(|o| *o != objective).collect())
    }

    /// Projects metrics onto this spec in minimization orientation
    /// (maximized objectives negated).
    pub fn orient(&self, metrics: &Metrics) -> Vec<f64> {
        self.objectives
            .iter()
            .map(|o| match o.direction() {
                Direction::Maximize => -metrics.get(*o),
                Direction::Minimize => metrics.get(*o),
            })
            .collect()
    }

    /// Orients raw values given in spec order.
    pub fn orient_values(&self, values: &[f64]) -> Vec<f64> {
        self.objectives
            .iter()
            .zip(values)
            .map(|(o, v)| match o.direction() {
                Direction::Maximize => -v,
                Direction::Minimize => *v,
            })
            .collect()
    }
}

/// Every tracked metric of one evaluated individual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub image_quality: f64,
    pub gender_bias: f64,
    pub ethnic_bias: f64,
    pub cpu_energy: f64,
    pub gpu_energy: f64,
    pub duration: f64,
}

impl Metrics {
    pub fn get(&self, objective: Objective) -> f64 {
        match objective {
            Objective::ImageQuality => self.image_quality,
            Objective::GenderBias => self.gender_bias,
            Objective::EthnicBias => self.ethnic_bias,
            Objective::CpuEnergy => self.cpu_energy,
            Objective::GpuEnergy => self.gpu_energy,
            Objective::Duration => self.duration,
        }
    }

    pub fn from_batch(batch: &EvaluationBatch) -> Self {
        let energy = energy_fitness(batch);
        Self {
            image_quality: aggregate_quality(batch),
            gender_bias: gender_bias(batch),
            ethnic_bias: ethnic_bias(batch),
            cpu_energy: energy.cpu,
            gpu_energy: energy.gpu,
            duration: energy.duration,
        }
    }
}

/// Active objective values in spec order, plus every tracked metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessVector {
    pub values: Vec<f64>,
    pub metrics: Metrics,
}

impl FitnessVector {
    pub fn from_metrics(metrics: Metrics, spec: &ObjectiveSpec) -> Self {
        Self {
            values: spec.objectives().iter().map(|o| metrics.get(*o)).collect(),
            metrics,
        }
    }
}

pub fn fitness_vector(batch: &EvaluationBatch, spec: &ObjectiveSpec) -> FitnessVector {
    FitnessVector::from_metrics(Metrics::from_batch(batch), spec)
}

/// Mean detector confidence over the objects found in one image; an image
/// with no detections scores 0.
pub fn image_quality(confidences: &[f64]) -> Result<f64, ObjectiveError> {
    if let Some(&bad) = confidences.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(ObjectiveError::Confidence(bad));
    }
    if confidences.is_empty() {
        return Ok(0.0);
    }
    Ok(confidences.iter().sum::<f64>() / confidences.len() as f64)
}

pub fn aggregate_quality(batch: &EvaluationBatch) -> f64 {
    batch.records.iter().map(|r| r.quality).sum::<f64>() / batch.records.len() as f64
}

/// |P(male) - P(female)| over the images with a known gender label. A batch
/// with no known labels scores the maximum bias 1.
pub fn gender_bias(batch: &EvaluationBatch) -> f64 {
    let male = batch.records.iter().filter(|r| r.gender == Gender::Male).count();
    let female = batch.records.iter().filter(|r| r.gender == Gender::Female).count();
    let known = male + female;
    if known == 0 {
        return 1.0;
    }
    (male as f64 - female as f64).abs() / known as f64
}

/// Spread between the most and least represented of the four ethnicity
/// classes, as fractions of the images with a known label. Absent classes
/// count as 0.
pub fn ethnic_bias(batch: &EvaluationBatch) -> f64 {
    let counts = Ethnicity::CLASSES.map(|e| batch.records.iter().filter(|r| r.ethnicity == e).count());
    let known: usize = counts.iter().sum();
    if known == 0 {
        return 1.0;
    }
    let max = *counts.iter().max().unwrap();
    let min = *counts.iter().min().unwrap();
    (max - min) as f64 / known as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMedians {
    pub cpu: f64,
    pub gpu: f64,
    pub duration: f64,
}

pub fn energy_fitness(batch: &EvaluationBatch) -> EnergyMedians {
    let column = |f: fn(&ImageRecord) -> f64| -> Vec<f64> { batch.records.iter().map(f).collect() };
    EnergyMedians {
        cpu: median(&column(|r| r.cpu_kwh)),
        gpu: median(&column(|r| r.gpu_kwh)),
        duration: median(&column(|r| r.duration_s)),
    }
}

/// Median; the mean of the two central values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}
