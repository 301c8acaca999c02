mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use ucurve::causality::*;
use ucurve::{embedded_fixture, MonthlySeries, SeriesName};

/// Brute-force TE: enumerate every (y⁺, y, x) outcome and sum directly.
fn te_oracle(x: &[usize], y: &[usize]) -> f64 {
    let n = y.len() - 1;
    let mut c3: HashMap<(usize, usize, usize), f64> = HashMap::new();
    for t in 0..n {
        *c3.entry((y[t + 1], y[t], x[t])).or_default() += 1.0;
    }
    let count = |f: &dyn Fn(&(usize, usize, usize)) -> bool| c3.iter().filter(|(k, _)| f(k)).map(|(_, v)| v).sum::<f64>();
    let mut te = 0.0;
    for yp in 0..2 {
        for yc in 0..2 {
            for xs in 0..2 {
                let c = c3.get(&(yp, yc, xs)).copied().unwrap_or(0.0);
                if c == 0.0 {
                    continue;
                }
                let c_yx = count(&|k| k.1 == yc && k.2 == xs);
                let c_ypy = count(&|k| k.0 == yp && k.1 == yc);
                let c_y = count(&|k| k.1 == yc);
                te += c / n as f64 * ((c / c_yx) / (c_ypy / c_y)).ln();
            }
        }
    }
    te
}

fn conditional_entropy_next_given_current(y: &[usize]) -> f64 {
    let n = y.len() - 1;
    let mut h = 0.0;
    for yc in 0..2 {
        let c_y = (0..n).filter(|&t| y[t] == yc).count() as f64;
        for yp in 0..2 {
            let c = (0..n).filter(|&t| y[t] == yc && y[t + 1] == yp).count() as f64;
            if c > 0.0 {
                h -= c / n as f64 * (c / c_y).ln();
            }
        }
    }
    h
}

#[test]
fn dtw_identical_series() {
    let x = MonthlySeries::from_values("x", common::white_noise(60, 1));
    let a = dtw_align(&x, &x).unwrap();
    assert!(a.lag_at_t.iter().all(|&l| l == 0));
    assert_eq!(a.cost, 0.0);
}

#[test]
fn dtw_recovers_constant_shift() {
    let x = common::white_noise(200, 2);
    let y: Vec<f64> = (0..200).map(|t| if t >= 3 { x[t - 3] } else { x[0] }).collect();
    let a = dtw_align(&MonthlySeries::from_values("x", x), &MonthlySeries::from_values("y", y)).unwrap();
    assert_eq!(a.modal_lag(), 3);
    assert_eq!(a.lag_at_t.len(), 200);
}

#[test]
fn dtw_path_is_monotone() {
    for seed in 0..5 {
        let x = common::white_noise(120, 10 + seed);
        let y = common::ar1(0.7, 120, 20 + seed);
        let a = dtw_align_band(&x, &y, 1, 4).unwrap();
        let src: Vec<usize> = a.lag_at_t.iter().enumerate().map(|(t, &l)| t - l).collect();
        assert!(src.windows(2).all(|w| w[1] >= w[0]), "{src:?}");
        assert!(a.lag_at_t.iter().skip(4).all(|&l| (1..=4).contains(&l)));
    }
}

#[test]
fn independent_noise_has_small_te() {
    let te = transfer_entropy(&common::white_noise(10_000, 3), &common::white_noise(10_000, 4), 2).unwrap();
    assert!(te < 0.01, "{te}");
}

#[test]
fn deterministic_copy_matches_brute_force() {
    let x = [0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0, 1, 0];
    let mut y = vec![1];
    y.extend_from_slice(&x[..15]);
    let te = transfer_entropy_symbols(&x, &y, 2, 1);
    let h = conditional_entropy_next_given_current(&y);
    assert!((te - h).abs() < 1e-12, "{te} vs {h}");
    assert!((te - te_oracle(&x, &y)).abs() < 1e-12);
}

#[test]
fn too_few_samples_rejected() {
    assert!(transfer_entropy(&[0.0; 39], &[1.0; 39], 2).is_err());
    assert!(transfer_entropy(&common::white_noise(100, 1), &common::white_noise(100, 2), 1).is_err());
}

#[test]
fn reference_cells_flag_level() {
    let f = embedded_fixture();
    let cfg = VlteConfig { nboot: 100, ..VlteConfig::default() };
    let c = vl_transfer_entropy(&f.series(SeriesName::MDReg), &f.series(SeriesName::CumMPI), &cfg, 5).unwrap();
    assert!(!c.flag);
    // Two monotone cumulative series share one median split, so the
    // backward entropy vanishes and the ratio is an explicit NaN.
    let c = vl_transfer_entropy(&f.series(SeriesName::CumMPIGuides), &f.series(SeriesName::CumMPI), &cfg, 5).unwrap();
    assert_eq!(c.te_backward, 0.0);
    assert!(c.te_ratio.is_nan());
    assert!(!c.flag);
}

#[test]
fn matrix_is_reproducible_without_diagonal() {
    let f = embedded_fixture();
    let cols: Vec<MonthlySeries> =
        [SeriesName::MDReg, SeriesName::MDGuides, SeriesName::MPI].iter().map(|&s| f.series(s)).collect();
    let cfg = VlteConfig { nboot: 20, ..VlteConfig::default() };
    let a = causality_matrix_series(&cols, &cfg, 9);
    assert_eq!(a, causality_matrix_series(&cols, &cfg, 9));
    assert!(a.errors.is_empty());
    for i in 0..3 {
        assert!(a.cells[i][i].is_none());
        for j in (0..3).filter(|&j| j != i) {
            let c = a.cells[i][j].as_ref().unwrap();
            assert_eq!(c.flag, c.te_ratio > 1.0 && c.p_value <= cfg.alpha);
            assert_eq!(c.cause, cols[i].name);
        }
    }
    // A cell's value does not depend on which other series share the matrix.
    let pair = causality_matrix_series(&cols[..2], &cfg, 9);
    assert_eq!(pair.get("MDReg", "MDGuides"), a.get("MDReg", "MDGuides"));
}

fn symbols(len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..2, len)
}

proptest! {
    #[test]
    fn te_nonnegative_and_matches_oracle(x in symbols(40), y in symbols(40)) {
        let te = transfer_entropy_symbols(&x, &y, 2, 1);
        prop_assert!(te >= 0.0);
        prop_assert!((te - te_oracle(&x, &y).max(0.0)).abs() < 1e-12);
    }

    #[test]
    fn te_invariant_under_monotone_maps(seed in any::<u64>()) {
        let x = common::white_noise(400, seed);
        let y: Vec<f64> = common::white_noise(400, seed ^ 1).iter().zip(&x).map(|(e, v)| e + 0.5 * v).collect();
        let te = transfer_entropy(&x, &y, 2).unwrap();
        let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let gy: Vec<f64> = y.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        prop_assert_eq!(te, transfer_entropy(&fx, &gy, 2).unwrap());
        prop_assert_eq!(transfer_entropy(&x, &y, 3).unwrap(), transfer_entropy(&fx, &gy, 3).unwrap());
    }
}
