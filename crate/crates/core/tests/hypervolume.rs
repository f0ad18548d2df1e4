mod common;

use common::{monte_carlo_hypervolume, random_front};
use proptest::prelude::*;
use rand::Rng;
use sdtune::analysis::{hypervolume, reference_point, AnalysisError, Normalizer, ReferencePoint};
use sdtune::seed::rng;

#[test]
fn worked_example() {
    let front = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
    assert_eq!(hypervolume(&front, &ReferencePoint(vec![1.5, 1.5])).unwrap(), 1.5);
    let reference = reference_point(std::slice::from_ref(&front), 0.5).unwrap();
    assert_eq!(reference.0, vec![1.5, 1.5]);
}

#[test]
fn single_point_is_a_box() {
    let v = hypervolume(&[vec![1.0, 2.0, 3.0]], &ReferencePoint(vec![2.0, 4.0, 6.0])).unwrap();
    assert_eq!(v, 1.0 * 2.0 * 3.0);
}

#[test]
fn rejects_points_beyond_reference() {
    let err = hypervolume(&[vec![2.0, 0.0]], &ReferencePoint(vec![1.0, 1.0])).unwrap_err();
    assert!(matches!(err, AnalysisError::BeyondReference { index: 0, .. }));
    assert!(matches!(
        hypervolume(&[vec![0.0]], &ReferencePoint(vec![1.0, 1.0])),
        Err(AnalysisError::Arity { .. })
    ));
}

#[test]
fn matches_monte_carlo_in_five_dimensions() {
    let mut r = rng(55);
    for _ in 0..5 {
        let front = random_front(&mut r, 8, 5);
        let reference = reference_point(std::slice::from_ref(&front), 0.5).unwrap();
        let exact = hypervolume(&front, &reference).unwrap();
        let (est, se) = monte_carlo_hypervolume(&mut r, &front, &reference.0, 200_000);
        assert!((exact - est).abs() <= 4.0 * se, "exact {exact}, MC {est} ± {se}");
    }
}

#[test]
fn normalized_fronts_lie_in_unit_box() {
    let mut r = rng(9);
    let fronts: Vec<Vec<Vec<f64>>> = (0..4)
        .map(|_| {
            (0..6)
                .map(|_| vec![r.gen_range(0.0..10.0), r.gen_range(-5.0..0.0), r.gen::<f64>() * 1e-4])
                .collect()
        })
        .collect();
    let n = Normalizer::fit(&fronts).unwrap();
    for f in &fronts {
        for p in n.apply_all(f) {
            assert!(p.iter().all(|v| (0.0..=1.0).contains(v)), "{p:?}");
        }
    }
}

proptest! {
    #[test]
    fn adding_points_never_shrinks_volume(
        base in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..12),
        extra in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let reference = ReferencePoint(vec![1.5; 3]);
        let before = hypervolume(&base, &reference).unwrap();
        let mut more = base.clone();
        more.push(extra);
        let after = hypervolume(&more, &reference).unwrap();
        prop_assert!(after >= before - 1e-12);
    }

    #[test]
    fn dominated_points_do_not_count(
        base in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 1..10),
        pick in 0usize..10,
        offset in prop::collection::vec(0.0f64..0.2, 4),
    ) {
        let reference = ReferencePoint(vec![1.5; 4]);
        let p = &base[pick % base.len()];
        let dominated: Vec<f64> = p.iter().zip(&offset).map(|(a, b)| a + b).collect();
        let mut more = base.clone();
        more.push(dominated);
        let a = hypervolume(&base, &reference).unwrap();
        let b = hypervolume(&more, &reference).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn order_independent(mut front in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..12)) {
        let reference = ReferencePoint(vec![1.2; 3]);
        let a = hypervolume(&front, &reference).unwrap();
        front.reverse();
        let b = hypervolume(&front, &reference).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }
}
