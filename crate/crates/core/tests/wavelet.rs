mod common;

use std::f64::consts::TAU;

use proptest::prelude::*;
use ucurve::dataset::FIXTURE_START;
use ucurve::wavelet::*;
use ucurve::{embedded_fixture, SeriesName};

/// Morlet (ω₀ = 6) reconstruction factor.
const C_DELTA: f64 = 0.776;

fn sinusoid(n: usize, period_years: f64) -> Vec<f64> {
    (0..n).map(|t| (TAU * t as f64 / (12.0 * period_years)).sin()).collect()
}

fn grid(n: usize) -> WaveletGrid {
    WaveletGrid::monthly(n, FIXTURE_START).unwrap()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap()
}

fn column(m: &Matrix, t: usize) -> Vec<f64> {
    m.iter().map(|r| r[t]).collect()
}

fn mid_average(m: &Matrix) -> Vec<f64> {
    let n = m[0].len();
    m.iter().map(|r| r[n / 4..3 * n / 4].iter().sum::<f64>() / (n / 2) as f64).collect()
}

fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len() - 1).filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1]).collect()
}

#[test]
fn grid_is_geometric() {
    let g = grid(540);
    assert!(g.periods.windows(2).all(|w| ((w[1] / w[0]) - 2f64.powf(DJ)).abs() < 1e-12));
    assert_eq!(g.dt, 1.0 / 12.0);
    let coi = g.coi();
    assert!(coi[0] < coi[270] && coi[539] < coi[270]);
}

#[test]
fn sinusoid_ridge_at_its_period() {
    let n = 540;
    let g = grid(n);
    let sp = cwt_morlet_values(&sinusoid(n, 8.0), &g).unwrap();
    for t in (n / 3..2 * n / 3).step_by(15) {
        let p = g.periods[argmax(&column(&sp.power, t))];
        assert!((p / 8.0).log2().abs() <= DJ + 1e-12, "t={t}: ridge at {p}");
    }
}

#[test]
fn two_superposed_ridges() {
    let n = 540;
    let g = grid(n);
    let x: Vec<f64> = sinusoid(n, 4.0).iter().zip(sinusoid(n, 16.0)).map(|(a, b)| a + b).collect();
    let avg = mid_average(&cwt_morlet_values(&x, &g).unwrap().power);
    // Long-period maxima beyond the cone of influence are edge artefacts;
    // the two dominant peaks are the ridges.
    let mut idx = local_maxima(&avg);
    idx.sort_by(|&a, &b| avg[b].total_cmp(&avg[a]));
    idx.truncate(2);
    idx.sort_unstable();
    let peaks: Vec<f64> = idx.into_iter().map(|i| g.periods[i]).collect();
    assert!((peaks[0] / 4.0).log2().abs() <= 2.0 * DJ, "{peaks:?}");
    assert!((peaks[1] / 16.0).log2().abs() <= 2.0 * DJ, "{peaks:?}");
}

#[test]
fn doubling_amplitude_quadruples_power() {
    let x = common::ar1(0.6, 300, 1);
    let g = grid(300);
    let a = cwt_morlet_values(&x, &g).unwrap();
    let b = cwt_morlet_values(&x.iter().map(|v| 2.0 * v).collect::<Vec<_>>(), &g).unwrap();
    for (ra, rb) in a.power.iter().zip(&b.power) {
        for (pa, pb) in ra.iter().zip(rb) {
            assert!((pb - 4.0 * pa).abs() <= 1e-9 * pb.max(1e-12));
            assert!(*pa >= 0.0);
        }
    }
}

#[test]
fn ridge_is_significant_and_seeded() {
    let n = 540;
    let g = grid(n);
    let e = common::white_noise(n, 2);
    let x: Vec<f64> = sinusoid(n, 8.0).iter().zip(&e).map(|(s, e)| 2.0 * s + 0.5 * e).collect();
    let sp = significance(cwt_morlet_values(&x, &g).unwrap(), 60, 13).unwrap();
    let p = sp.significance.as_ref().unwrap();
    let row = g.nearest_row(8.0);
    for t in (0..n).filter(|&t| sp.inside_coi(row, t)) {
        assert!(p[row][t] < 0.05, "t={t}: p={}", p[row][t]);
    }
    let again = significance(cwt_morlet_values(&x, &g).unwrap(), 60, 13).unwrap();
    assert_eq!(sp.significance, again.significance);
    assert!(significance(cwt_morlet_values(&x, &g).unwrap(), 5, 13).is_err());
}

#[test]
fn parseval_style_variance() {
    for (seed, x) in [(0, common::white_noise(4096, 21)), (1, common::ar1(0.5, 4096, 22))] {
        let g = WaveletGrid::new(x.len(), FIXTURE_START, DT, DJ, 2.0 * DT, 64.0).unwrap();
        let sp = cwt_morlet_values(&x, &g).unwrap();
        let n = x.len() as f64;
        let total: f64 = sp.power.iter().zip(&g.scales).map(|(r, s)| r.iter().sum::<f64>() / s).sum();
        let recon = DJ * DT / C_DELTA * total / n;
        let var = ucurve::stats::variance(&x, 0);
        assert!((recon / var - 1.0).abs() < 0.10, "case {seed}: {recon} vs {var}");
    }
}

#[test]
fn time_shift_moves_columns() {
    let (n, k) = (400, 7);
    let z = common::ar1(0.5, n + k, 5);
    let x = &z[k..];
    let y = &z[..n];
    let g = grid(n);
    let (px, py) = (cwt_morlet_values(x, &g).unwrap().power, cwt_morlet_values(y, &g).unwrap().power);
    let rows = g.nearest_row(2.0);
    for r in 0..=rows {
        let scale = px[r].iter().fold(0.0f64, |a, b| a.max(*b));
        for t in n / 4..3 * n / 4 {
            assert!((px[r][t] - py[r][t + k]).abs() <= 1e-2 * scale, "row {r} t {t}");
        }
    }
}

#[test]
fn self_coherence_is_one() {
    let x = common::ar1(0.5, 300, 3);
    let c = coherence_values(&x, &x, &grid(300), 0, 0).unwrap();
    assert!(c.coherence.iter().flatten().all(|v| (v - 1.0).abs() < 1e-6));
    assert!(c.significance.is_none());
}

#[test]
fn shared_sinusoid_is_coherent() {
    let n = 540;
    let s = sinusoid(n, 8.0);
    let (ex, ey) = (common::white_noise(n, 6), common::white_noise(n, 7));
    let x: Vec<f64> = s.iter().zip(&ex).map(|(a, e)| a + 0.5 * e).collect();
    let y: Vec<f64> = s.iter().zip(&ey).map(|(a, e)| a + 0.5 * e).collect();
    let g = grid(n);
    let c = coherence_values(&x, &y, &g, 0, 0).unwrap();
    let row = g.nearest_row(8.0);
    for t in n / 3..2 * n / 3 {
        assert!(c.coherence[row][t] > 0.8, "t={t}: {}", c.coherence[row][t]);
    }
    assert!(c.coherence.iter().flatten().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
}

#[test]
fn cumulative_pair_peaks_near_sixteen_years() {
    let f = embedded_fixture();
    let x = prepare(&f.values(SeriesName::CumMPIGuides)).unwrap();
    let y = prepare(&f.values(SeriesName::CumMPI)).unwrap();
    let c = coherence_values(&x, &y, &grid(536), 0, 0).unwrap();
    let p = c.peak_period();
    assert!((14.0..=18.0).contains(&p), "{p}");
}

#[test]
fn quartile_render_examples() {
    let q = quartile_render(&vec![vec![3.0, 1.0, 9.0], vec![4.0, 7.0, 2.0], vec![8.0, 5.0, 6.0]]).unwrap();
    assert_eq!(q[2][1], 0.5);
    assert!(quartile_render(&vec![vec![1.5; 3]; 2]).is_err());
}

proptest! {
    #[test]
    fn quartile_render_rank_invariant(m in prop::collection::vec(prop::collection::vec(0.0f64..100.0, 6), 2..6)) {
        prop_assume!(!ucurve::stats::is_constant(&m.iter().flatten().copied().collect::<Vec<_>>()));
        let q = quartile_render(&m).unwrap();
        let t: Matrix = m.iter().map(|r| r.iter().map(|v| (v / 10.0).exp() + v).collect()).collect();
        prop_assert_eq!(&q, &quartile_render(&t).unwrap());
        prop_assert!(q.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}
