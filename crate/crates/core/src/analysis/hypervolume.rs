//! Exact hypervolume by recursive slicing along the last objective, with a
//! sweep-line base case in two dimensions.
//!
//! Points are in minimization orientation; the measured region is the union
//! of boxes `[point, reference]`.

use serde::{Deserialize, Serialize};

use super::pareto::pareto_front_oriented;
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint(pub Vec<f64>);

/// Whether hypervolume is measured in raw objective units or after
/// rescaling every objective to [0, 1] over the pooled fronts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HvMode {
    #[default]
    Raw,
    Normalized,
}

pub const DEFAULT_EPSILON: f64 = 0.5;

/// Worst value of each objective over the union of fronts, plus `epsilon`.
pub fn reference_point(fronts: &[Vec<Vec<f64>>], epsilon: f64) -> Result<ReferencePoint, AnalysisError> {
    let mut points = fronts.iter().flatten();
    let first = points.next().ok_or(AnalysisError::Empty)?;
    let mut worst = first.clone();
    for p in points {
        if p.len() != worst.len() {
            return Err(AnalysisError::Arity {
                expected: worst.len(),
                got: p.len(),
            });
        }
        for (w, v) in worst.iter_mut().zip(p) {
            *w = w.max(*v);
        }
    }
    Ok(ReferencePoint(worst.into_iter().map(|w| w + epsilon).collect()))
}

/// Per-objective min-max scaling fitted on a set of fronts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Normalizer {
    pub fn fit(fronts: &[Vec<Vec<f64>>]) -> Result<Self, AnalysisError> {
        let mut points = fronts.iter().flatten();
        let first = points.next().ok_or(AnalysisError::Empty)?;
        let mut min = first.clone();
        let mut max = first.clone();
        for p in points {
            if p.len() != min.len() {
                return Err(AnalysisError::Arity {
                    expected: min.len(),
                    got: p.len(),
                });
            }
            for d in 0..p.len() {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
        Ok(Self { min, max })
    }

    /// Constant objectives map to 0.
    pub fn apply(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .enumerate()
            .map(|(d, v)| {
                let range = self.max[d] - self.min[d];
                if range > 0.0 {
                    (v - self.min[d]) / range
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn apply_all(&self, front: &[Vec<f64>]) -> Vec<Vec<f64>> {
        front.iter().map(|p| self.apply(p)).collect()
    }
}

/// Exact hypervolume of `front` with respect to `reference`. Every point
/// must be no worse than the reference in each objective.
pub fn hypervolume(front: &[Vec<f64>], reference: &ReferencePoint) -> Result<f64, AnalysisError> {
    let r = &reference.0;
    if r.is_empty() {
        return Err(AnalysisError::Empty);
    }
    for (index, p) in front.iter().enumerate() {
        if p.len() != r.len() {
            return Err(AnalysisError::Arity {
                expected: r.len(),
                got: p.len(),
            });
        }
        if p.iter().zip(r).any(|(v, rv)| v > rv || v.is_nan()) {
            return Err(AnalysisError::BeyondReference {
                index,
                point: p.clone(),
                reference: r.clone(),
            });
        }
    }
    Ok(slice_volume(front.to_vec(), r))
}

fn nondominated_unique(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let keep = pareto_front_oriented(&points).expect("uniform arity");
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(keep.len());
    for i in keep {
        if !out.contains(&points[i]) {
            out.push(points[i].clone());
        }
    }
    out
}

fn slice_volume(points: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    let dims = r.len();
    if points.is_empty() {
        return 0.0;
    }
    let mut points = nondominated_unique(points);
    match dims {
        1 => r[0] - points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => {
            points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            let mut area = 0.0;
            let mut ceiling = r[1];
            for p in &points {
                if p[1] < ceiling {
                    area += (r[0] - p[0]) * (ceiling - p[1]);
                    ceiling = p[1];
                }
            }
            area
        }
        _ => {
            let last = dims - 1;
            points.sort_by(|a, b| a[last].total_cmp(&b[last]));
            let mut volume = 0.0;
            for i in 0..points.len() {
                let upper = points.get(i + 1).map_or(r[last], |p| p[last]);
                let depth = upper - points[i][last];
                if depth <= 0.0 {
                    continue;
                }
                let projected: Vec<Vec<f64>> = points[..=i].iter().map(|p| p[..last].to_vec()).collect();
                volume += depth * slice_volume(projected, &r[..last]);
            }
            volume
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let front = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
        let r = ReferencePoint(vec![1.5, 1.5]);
        assert!((hypervolume(&front, &r).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_box_and_absorption() {
        let r = ReferencePoint(vec![2.0, 3.0, 4.0]);
        let p = vec![0.5, 1.0, 1.5];
        let single = hypervolume(std::slice::from_ref(&p), &r).unwrap();
        assert!((single - 1.5 * 2.0 * 2.5).abs() < 1e-12);
        let with_dominated = hypervolume(&[p.clone(), vec![1.0, 2.0, 2.0]], &r).unwrap();
        assert_eq!(single, with_dominated);
    }

    #[test]
    fn point_beyond_reference_is_named() {
        let r = ReferencePoint(vec![1.0, 1.0]);
        match hypervolume(&[vec![0.0, 0.0], vec![2.0, 0.5]], &r) {
            Err(AnalysisError::BeyondReference { index, point, .. }) => {
                assert_eq!(index, 1);
                assert_eq!(point, vec![2.0, 0.5]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reference_rules() {
        let r = reference_point(&[vec![vec![0.0, 1.0], vec![1.0, 0.0]]], 0.5).unwrap();
        assert_eq!(r.0, vec![1.5, 1.5]);
        let r = reference_point(&[vec![vec![2.0, 3.0]]], 0.5).unwrap();
        assert_eq!(r.0, vec![2.5, 3.5]);
        assert!(reference_point(&[], 0.5).is_err());

        let fronts = vec![vec![vec![3.0, 1e-4], vec![7.0, 5e-4]], vec![vec![5.0, 2e-4]]];
        let n = Normalizer::fit(&fronts).unwrap();
        let scaled: Vec<Vec<Vec<f64>>> = fronts.iter().map(|f| n.apply_all(f)).collect();
        assert_eq!(reference_point(&scaled, 0.5).unwrap().0, vec![1.5, 1.5]);
    }
}
