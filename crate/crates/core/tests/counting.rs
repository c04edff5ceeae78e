use std::f64::consts::PI;

use qdca_core::counting::{
    coherent_joint_distribution, outcome_distribution, within_bound, CountEstimate, CountingParams,
};
use qdca_core::selftest::coverage_probability;
use qdca_core::AttackConfig;

#[test]
fn outcome_law_is_mirror_symmetric() {
    for n in 1..=4 {
        let params = CountingParams::default_profile(n).unwrap();
        let size = 1usize << params.t();
        for m_true in 0..=params.pair_count() {
            let marks: Vec<bool> = (0..params.search_space()).map(|j| j < m_true).collect();
            let p = outcome_distribution(&marks, &params).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for b in 1..size {
                assert!((p[b] - p[size - b]).abs() < 1e-9, "n={n} M={m_true} b={b}");
            }
        }
    }
}

#[test]
fn marked_positions_do_not_matter() {
    let params = CountingParams::default_profile(3).unwrap();
    let front: Vec<bool> = (0..16).map(|j| j < 3).collect();
    let spread: Vec<bool> = (0..16).map(|j| j % 5 == 1).collect();
    assert_eq!(spread.iter().filter(|&&m| m).count(), 3);
    let a = outcome_distribution(&front, &params).unwrap();
    let b = outcome_distribution(&spread, &params).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn one_more_counting_bit_restores_coverage() {
    let params = CountingParams::new(3, 3, 0.05).unwrap();
    assert_eq!(params.t(), 7);
    for m_true in 0..=8 {
        let p = coverage_probability(&params, m_true).unwrap();
        assert!(p >= 0.9, "M={m_true}: {p}");
    }
}

#[test]
fn coverage_at_n3_t6() {
    let params = CountingParams::default_profile(3).unwrap();
    let expected = [
        1.0, 0.9744, 0.8885, 0.9815, 0.8985, 0.991, 0.9071, 0.9422, 1.0,
    ];
    for (m_true, want) in expected.iter().enumerate() {
        let p = coverage_probability(&params, m_true as u64).unwrap();
        assert!((p - want).abs() < 1e-4, "M={m_true}: {p}");
    }
}

#[test]
fn estimate_mapping_agrees_with_formula() {
    let params = CountingParams::default_profile(6).unwrap();
    for b in 0..128 {
        let e = CountEstimate::from_outcome(b, &params);
        let s = (PI * b as f64 / 128.0).sin();
        assert!((e.m_est - 128.0 * s * s).abs() < 1e-9);
        assert!(e.r <= 64);
        assert_eq!(e.r, (e.m_est + 0.5).floor().min(64.0) as u64);
    }
    assert!(within_bound(9.0, 8.0, &params));
    assert!(!within_bound(10.2, 8.0, &params));
}

#[test]
fn coherent_counting_matches_per_subkey_runs() {
    for (k, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let config = AttackConfig {
            k,
            n,
            ..AttackConfig::default()
        };
        let instance = config.build_instance().unwrap();
        let params = CountingParams::new(n, 2, 0.25).unwrap();
        let joint = coherent_joint_distribution(&instance, &params).unwrap();
        let k_count = instance.candidate_count() as f64;
        for (x, row) in joint.iter().enumerate() {
            let single =
                outcome_distribution(&instance.right_pair_marks(x as u64), &params).unwrap();
            for (p, q) in row.iter().zip(&single) {
                assert!((p - q / k_count).abs() < 1e-9, "k={k} n={n} x={x}");
            }
        }
    }
}

#[test]
fn coherent_mode_rejects_large_registers() {
    let config = AttackConfig {
        k: 3,
        n: 2,
        ..AttackConfig::default()
    };
    let instance = config.build_instance().unwrap();
    let params = CountingParams::default_profile(2).unwrap();
    assert!(coherent_joint_distribution(&instance, &params).is_err());
}
