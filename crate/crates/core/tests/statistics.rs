mod common;

use common::{enumerate_wilcoxon, oracle_average_ranks};
use proptest::prelude::*;
use sdtune::analysis::stats::average_ranks;
use sdtune::analysis::{
    dunn_posthoc, kruskal_wallis, spearman, vargha_delaney_a12, wilcoxon_signed_rank, Alternative, AnalysisError,
    EffectClass,
};

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn small_ints(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u8..10).prop_map(f64::from), n)
}

proptest! {
    #[test]
    fn wilcoxon_exact_matches_enumeration(pairs in prop::collection::vec((0u8..9, 0u8..9), 5..14)) {
        let a: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let b: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        let (ge, le) = enumerate_wilcoxon(&a, &b);
        let g = wilcoxon_signed_rank(&a, &b, Alternative::Greater).unwrap();
        let l = wilcoxon_signed_rank(&a, &b, Alternative::Less).unwrap();
        let t = wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).unwrap();
        prop_assert!((g.p_value - ge).abs() < 1e-12);
        prop_assert!((l.p_value - le).abs() < 1e-12);
        prop_assert!((t.p_value - (2.0 * ge.min(le)).min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn ranks_match_counting_oracle(values in small_ints(1..40)) {
        prop_assert_eq!(average_ranks(&values), oracle_average_ranks(&values));
    }

    #[test]
    fn a12_is_complementary(a in small_ints(1..20), b in small_ints(1..20)) {
        let ab = vargha_delaney_a12(&a, &b).unwrap().value;
        let ba = vargha_delaney_a12(&b, &a).unwrap().value;
        prop_assert!((ab + ba - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn spearman_is_pearson_of_ranks(x in small_ints(3..30), noise in small_ints(30..31)) {
        let y: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a + b).collect();
        match spearman(&x, &y) {
            Ok(rho) => {
                let want = pearson(&oracle_average_ranks(&x), &oracle_average_ranks(&y));
                prop_assert!((rho - want).abs() < 1e-9);
            }
            Err(AnalysisError::Undefined(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn dunn_adjustment_never_lowers_p(groups in prop::collection::vec(small_ints(2..8), 2..6)) {
        if let Ok(comparisons) = dunn_posthoc(&groups) {
            prop_assert_eq!(comparisons.len(), groups.len() * (groups.len() - 1) / 2);
            for c in comparisons {
                prop_assert!(c.p_adjusted >= c.p_raw && c.p_adjusted <= 1.0);
            }
        }
    }
}

#[test]
fn wilcoxon_large_sample_uses_normal_approximation() {
    let a: Vec<f64> = (0..30).map(|i| f64::from(i) + 0.5).collect();
    let b: Vec<f64> = (0..30).map(f64::from).collect();
    let r = wilcoxon_signed_rank(&a, &b, Alternative::Greater).unwrap();
    assert_eq!(r.statistic, 465.0);
    assert!(r.p_value < 1e-5);
    let two = wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).unwrap();
    assert!((two.p_value - 2.0 * r.p_value).abs() < 1e-12);
}

#[test]
fn wilcoxon_edge_cases() {
    assert!(matches!(
        wilcoxon_signed_rank(&[1.0; 4], &[0.0; 4], Alternative::Greater),
        Err(AnalysisError::TooFewSamples { .. })
    ));
    assert!(matches!(
        wilcoxon_signed_rank(&[1.0; 5], &[0.0; 6], Alternative::Greater),
        Err(AnalysisError::LengthMismatch(5, 6))
    ));
    let same = wilcoxon_signed_rank(&[1.0; 6], &[1.0; 6], Alternative::TwoSided).unwrap();
    assert!(same.degenerate && same.p_value == 1.0 && !same.significant);
    assert_eq!(same.statistic.to_bits(), 0.0f64.to_bits());
}

#[test]
fn a12_thresholds() {
    assert_eq!(
        vargha_delaney_a12(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap().value,
        0.0
    );
    assert_eq!(
        vargha_delaney_a12(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap().class,
        EffectClass::Large
    );
    let medium = vargha_delaney_a12(&[2.0, 3.0, 4.0, 5.0, 6.0], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    assert_eq!(medium.value, 0.68);
    assert_eq!(medium.class, EffectClass::Medium);
}

#[test]
fn kruskal_wallis_examples() {
    let h = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
    assert!((h.statistic - 27.0 / 7.0).abs() < 1e-12);
    assert!((h.p_value - 0.04953461).abs() < 1e-6);
    let flat = kruskal_wallis(&[vec![2.0; 3], vec![2.0; 4]]).unwrap();
    assert!(flat.degenerate && flat.p_value == 1.0);
}
