use proptest::prelude::*;
use ucurve::dataset::{diff, undiff, FIXTURE_START};
use ucurve::{difference, embedded_fixture, load_frame, MonthlySeries, SeriesFrame, SeriesName};

#[test]
fn fixture_rows() {
    let f = embedded_fixture();
    assert_eq!(f.len(), 536);
    assert_eq!(f.row(0), [4, 251, 0, 0, 255, 0, 255, 0]);
    assert_eq!(f.row(52), [230, 219, 3, 4, 449, 7, 19918, 27]);
    assert_eq!(f.row(535), [572, 377, 7, 18, 949, 25, 384208, 2209]);
    assert_eq!(f.start(), FIXTURE_START);
    assert_eq!(f.months()[535].to_string(), "2020-12");
}

#[test]
fn fixture_identities() {
    let f = embedded_fixture();
    f.check_invariants().unwrap();
    let mpi = f.counts(SeriesName::MPI);
    let (a, b) = (f.counts(SeriesName::MDReg), f.counts(SeriesName::MedReg));
    assert!((0..f.len()).all(|t| mpi[t] - a[t] - b[t] == 0));
    // diff(CumMPI) is MPI one month later.
    let d = diff(&f.values(SeriesName::CumMPI));
    assert_eq!(d, f.values(SeriesName::MPI)[1..].to_vec());
}

#[test]
fn csv_round_trip_of_fixture() {
    let f = embedded_fixture();
    assert_eq!(load_frame(f.to_csv().as_bytes()).unwrap(), f);
}

#[test]
fn difference_of_named_series() {
    let s = MonthlySeries::from_values("x", vec![255.0, 442.0, 721.0]);
    assert_eq!(difference(&s, 1).unwrap().values(), &[187.0, 279.0]);
    let c = MonthlySeries::from_values("c", vec![3.0; 5]);
    assert!(difference(&c, 1).unwrap().values().iter().all(|v| *v == 0.0));
}

fn small_counts() -> impl Strategy<Value = Vec<[i64; 4]>> {
    prop::collection::vec([0i64..500, 0i64..500, 0i64..20, 0i64..20], 3..40)
}

proptest! {
    #[test]
    fn serialize_then_load_is_identity(rows in small_counts()) {
        let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
        let f = SeriesFrame::from_base(FIXTURE_START, col(0), col(1), col(2), col(3)).unwrap();
        f.check_invariants().unwrap();
        prop_assert_eq!(load_frame(f.to_csv().as_bytes()).unwrap(), f);
    }

    #[test]
    fn diff_then_cumsum_reconstructs(v in prop::collection::vec(-1_000_000i64..1_000_000, 2..100)) {
        // Integer-valued inputs keep every partial sum exact.
        let x: Vec<f64> = v.iter().map(|&a| a as f64).collect();
        prop_assert_eq!(undiff(x[0], &diff(&x)), x);
    }
}
