use std::collections::BTreeMap;

use super::AnalysisError;
use crate::objectives::{FitnessVector, ObjectiveSpec};
use crate::search::dominance::non_dominated_sort;

fn check_arity(points: &[Vec<f64>]) -> Result<(), AnalysisError> {
    if let Some(first) = points.first() {
        if let Some(bad) = points.iter().find(|p| p.len() != first.len()) {
            return Err(AnalysisError::Arity {
                expected: first.len(),
                got: bad.len(),
            });
        }
    }
    Ok(())
}

/// Indices of the non-dominated points (minimization orientation).
pub fn pareto_front_oriented(points: &[Vec<f64>]) -> Result<Vec<usize>, AnalysisError> {
    check_arity(points)?;
    Ok(non_dominated_sort(points).into_iter().next().unwrap_or_default())
}

pub fn pareto_front(points: &[FitnessVector], spec: &ObjectiveSpec) -> Result<Vec<usize>, AnalysisError> {
    let oriented = points
        .iter()
        .map(|p| {
            if p.values.len() == spec.len() {
                Ok(spec.orient_values(&p.values))
            } else {
                Err(AnalysisError::Arity {
                    expected: spec.len(),
                    got: p.values.len(),
                })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    pareto_front_oriented(&oriented)
}

/// Pools every labelled point, computes the global front and counts how
/// many front members each label contributed. Every label appears in the
/// result, possibly with 0.
pub fn count_optimal_by_strategy<L: Ord + Clone>(all: &[(L, Vec<f64>)]) -> Result<BTreeMap<L, usize>, AnalysisError> {
    let points: Vec<Vec<f64>> = all.iter().map(|(_, p)| p.clone()).collect();
    let mut counts: BTreeMap<L, usize> = all.iter().map(|(l, _)| (l.clone(), 0)).collect();
    for i in pareto_front_oriented(&points)? {
        *counts.get_mut(&all[i].0).expect("label present") += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn front_examples() {
        let pts = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        assert_eq!(pareto_front_oriented(&pts).unwrap(), vec![0, 1]);
        assert_eq!(pareto_front_oriented(&[vec![3.0, 4.0]]).unwrap(), vec![0]);
        assert!(pareto_front_oriented(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn counting() {
        let all = vec![
            ("sd", vec![0.0, 0.0]),
            ("default", vec![1.0, 1.0]),
            ("default", vec![0.5, 2.0]),
        ];
        let c = count_optimal_by_strategy(&all).unwrap();
        assert_eq!(c["sd"], 1);
        assert_eq!(c["default"], 0);

        let dup = vec![("a", vec![0.2, 0.3]), ("b", vec![0.2, 0.3])];
        let c = count_optimal_by_strategy(&dup).unwrap();
        assert_eq!((c["a"], c["b"]), (1, 1));
    }
}
