mod common;

use proptest::prelude::*;
use ucurve::descriptive::{acf_values, describe_values, spearman};
use ucurve::{embedded_fixture, minmax_normalize, spearman_matrix, MonthlySeries, SeriesName};

/// Independent rank oracle: rank = #{< v} + (#{== v} + 1) / 2, then Pearson.
fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let less = v.iter().filter(|b| *b < a).count() as f64;
                let eq = v.iter().filter(|b| *b == a).count() as f64;
                less + (eq + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

#[test]
fn table2_rows() {
    let f = embedded_fixture();
    let md = describe_values(&f.values(SeriesName::MDReg)).unwrap();
    for (got, want) in [(md.mean, 377.71), (md.sd, 98.84), (md.median, 376.5), (md.se, 4.27)] {
        assert!((got - want).abs() <= 0.01, "{got} vs {want}");
    }
    assert!((md.skew.unwrap() + 0.41).abs() <= 0.01);
    assert!((md.kurtosis.unwrap() - 0.74).abs() <= 0.01);
    let g = describe_values(&f.values(SeriesName::MPIGuides)).unwrap();
    assert!((g.mean - 4.12).abs() <= 0.01 && (g.sd - 6.09).abs() <= 0.01);
    assert!((g.skew.unwrap() - 2.55).abs() <= 0.01 && (g.kurtosis.unwrap() - 7.42).abs() <= 0.01);
}

#[test]
fn hand_computed_summary() {
    let s = describe_values(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    assert_eq!(s.mean, 3.0);
    assert_eq!(s.median, 3.0);
    assert!((s.sd - 2.5f64.sqrt()).abs() < 1e-15);
    assert_eq!(s.range, 4.0);
}

#[test]
fn spearman_reference_pairs() {
    let f = embedded_fixture();
    let m = spearman_matrix(&f).unwrap();
    assert!((m.get("MDReg", "MedReg").unwrap() - 0.4361785).abs() < 1e-6);
    assert!((m.get("CumMPI", "CumMPIGuides").unwrap() - 0.9999789).abs() < 1e-6);
    assert_eq!(m.get("MPI", "MPI").unwrap(), 1.0);
}

#[test]
fn spearman_matches_counting_oracle() {
    let f = embedded_fixture();
    let m = spearman_matrix(&f).unwrap();
    for a in SeriesName::ALL {
        for b in SeriesName::ALL {
            let want = spearman_oracle(&f.values(a), &f.values(b));
            let got = m.get(a.as_str(), b.as_str()).unwrap();
            assert!((got - want).abs() < 1e-12, "{a}/{b}: {got} vs {want}");
        }
    }
}

#[test]
fn acf_reference_behaviour() {
    let x = common::white_noise(10_000, 1);
    let r = acf_values(&x, 3).unwrap();
    assert_eq!(r[0], 1.0);
    assert!(r[1].abs() < 0.05);
    let y = common::ar1(0.8, 100_000, 2);
    let r = acf_values(&y, 1).unwrap();
    assert!((r[1] - 0.8).abs() < 0.02, "acf(1) = {}", r[1]);
}

#[test]
fn minmax_examples() {
    let s = MonthlySeries::from_values("s", vec![0.0, 5.0, 10.0]);
    assert_eq!(minmax_normalize(&s).unwrap().values(), &[0.0, 0.5, 1.0]);
    let mpi = embedded_fixture().series(SeriesName::MPI);
    let argmax = |v: &[f64]| (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    let n = minmax_normalize(&mpi).unwrap();
    assert_eq!(argmax(n.values()), argmax(mpi.values()));
    assert!(minmax_normalize(&MonthlySeries::from_values("c", vec![2.0; 4])).is_err());
}

fn varying(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50i32..50, len)
        .prop_filter("non-constant", |v| v.iter().any(|a| *a != v[0]))
        .prop_map(|v| v.into_iter().map(f64::from).collect())
}

proptest! {
    #[test]
    fn spearman_monotone_invariant(x in varying(5..60), y in varying(5..60)) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        prop_assume!(x.iter().any(|a| *a != x[0]) && y.iter().any(|a| *a != y[0]));
        let r = spearman(x, y).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| (v / 10.0).exp() + v.powi(3)).collect();
        let ty: Vec<f64> = y.iter().map(|v| -1.0 / (60.0 - v)).collect();
        let r2 = spearman(&tx, &ty).unwrap();
        prop_assert!((r + r2).abs() < 1e-12, "decreasing map of y flips the sign: {} {}", r, r2);
        prop_assert!((spearman(&tx, y).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn describe_is_permutation_invariant(x in varying(4..80), k in 0usize..1000) {
        let mut p = x.clone();
        let len = p.len();
        p.rotate_left(k % len);
        p.reverse();
        let (a, b) = (describe_values(&x).unwrap(), describe_values(&p).unwrap());
        for (u, v) in [(a.mean, b.mean), (a.sd, b.sd), (a.median, b.median), (a.trimmed_mean, b.trimmed_mean),
                       (a.mad, b.mad), (a.range, b.range), (a.se, b.se)] {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
        }
        prop_assert!((a.skew.unwrap() - b.skew.unwrap()).abs() < 1e-9);
        prop_assert!((a.kurtosis.unwrap() - b.kurtosis.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn normalization_preserves_ranks(x in varying(3..80)) {
        let s = MonthlySeries::from_values("x", x.clone());
        let n = minmax_normalize(&s).unwrap();
        prop_assert_eq!(spearman(&x, n.values()).unwrap(), 1.0);
        prop_assert!(n.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
