//! Pareto dominance, non-dominated sorting and crowding distance.
//!
//! Kernels work on vectors already oriented for minimization; the
//! [`fast_non_dominated_sort`] wrapper orients fitness vectors first.

use super::SearchError;
use crate::objectives::{FitnessVector, ObjectiveSpec};

/// `a` dominates `b`: no worse everywhere, strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Deb's fast non-dominated sort. Fronts are returned best first, indices
/// ascending within each front.
pub fn non_dominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Rank of every point (0 = non-dominated).
pub fn ranks(points: &[Vec<f64>]) -> Vec<usize> {
    let mut out = vec![0; points.len()];
    for (rank, front) in non_dominated_sort(points).iter().enumerate() {
        for &i in front {
            out[i] = rank;
        }
    }
    out
}

pub(crate) fn orient_all(points: &[FitnessVector], spec: &ObjectiveSpec) -> Result<Vec<Vec<f64>>, SearchError> {
    points
        .iter()
        .map(|p| {
            if p.values.len() != spec.len() {
                Err(SearchError::Arity {
                    expected: spec.len(),
                    got: p.values.len(),
                })
            } else {
                Ok(spec.orient_values(&p.values))
            }
        })
        .collect()
}

pub fn fast_non_dominated_sort(points: &[FitnessVector], spec: &ObjectiveSpec) -> Result<Vec<Vec<usize>>, SearchError> {
    Ok(non_dominated_sort(&orient_all(points, spec)?))
}

/// Crowding distance of each member of one front. Boundary points of every
/// objective get infinity; objectives with zero range contribute nothing.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    let dims = front[0].len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..dims {
        order.sort_by(|&a, &b| front[a][m].total_cmp(&front[b][m]).then(a.cmp(&b)));
        let lo = front[order[0]][m];
        let hi = front[order[n - 1]][m];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let gap = front[order[k + 1]][m] - front[order[k - 1]][m];
            distance[order[k]] += gap / range;
        }
    }
    distance
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> Vec<Vec<f64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn sort_examples() {
        assert_eq!(
            non_dominated_sort(&pts(&[&[1.0, 1.0], &[2.0, 2.0]])),
            vec![vec![0], vec![1]]
        );
        assert_eq!(
            non_dominated_sort(&pts(&[&[1.0, 3.0], &[3.0, 1.0], &[2.0, 2.0]])),
            vec![vec![0, 1, 2]]
        );
        assert!(non_dominated_sort(&[]).is_empty());
    }

    #[test]
    fn equal_vectors_do_not_dominate() {
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]));
        assert_eq!(non_dominated_sort(&pts(&[&[1.0, 2.0], &[1.0, 2.0]])), vec![vec![0, 1]]);
    }

    #[test]
    fn crowding_examples() {
        assert!(crowding_distance(&pts(&[&[0.0], &[1.0]]))
            .iter()
            .all(|d| d.is_infinite()));
        let d = crowding_distance(&pts(&[&[0.0], &[0.5], &[1.0]]));
        assert_eq!(d[1], 1.0);
        let d = crowding_distance(&pts(&[&[0.3, 0.3], &[0.3, 0.3], &[0.3, 0.3], &[0.3, 0.3]]));
        assert_eq!(&d[1..3], &[0.0, 0.0]);
    }

    #[test]
    fn arity_is_checked() {
        let spec = ObjectiveSpec::sustain_diffusion();
        let fv = FitnessVector {
            values: vec![0.1, 0.2],
            metrics: crate::objectives::Metrics {
                image_quality: 0.0,
                gender_bias: 0.0,
                ethnic_bias: 0.0,
                cpu_energy: 0.0,
                gpu_energy: 0.0,
                duration: 0.0,
            },
        };
        assert!(matches!(
            fast_non_dominated_sort(&[fv], &spec),
            Err(SearchError::Arity { expected: 4, got: 2 })
        ));
    }
}
