use num_bigint::BigUint;
use proptest::prelude::*;

use genusmaps::brute_oracle::enumerate_counts;
use genusmaps::exact_enum::{
    adaptive_table, partition_moments, persist, polygon_counts, polygon_counts_closed_form, CountTable,
};
use genusmaps::hyper_constants::{c_p, lambda_of_h, CpValue, HyperParams, LAMBDA_C};
use genusmaps::markov_props::{apv, MixtureSpec};
use genusmaps::psht_sim::{ln_partition, PeelingLaw};

#[test]
fn loop_row_is_planar_row() {
    let closed = CountTable::build(60, Some(0)).unwrap();
    let poly = polygon_counts(1, 61).unwrap();
    for j in 1..=61 {
        assert_eq!(poly.get(1, j).unwrap(), closed.tau(j - 1, 0).unwrap(), "j={j}");
    }
}

#[test]
fn oracle_matches_recurrence_for_every_genus() {
    let t = CountTable::build(3, None).unwrap();
    for n in 1..=3 {
        let brute = enumerate_counts(n).unwrap();
        for g in 0..=(n + 1) / 2 {
            let want = t.tau(n, g).unwrap();
            assert_eq!(brute.get(&g).cloned().unwrap_or_default(), *want);
        }
    }
}

#[test]
fn persisted_table_matches_fresh_build() {
    let dir = tempfile::tempdir().unwrap();
    let a = persist::load_or_build(dir.path(), 30, Some(5)).unwrap();
    let b = persist::load_or_build(dir.path(), 50, Some(5)).unwrap();
    let fresh = CountTable::build(50, Some(5)).unwrap();
    for n in 0..=50 {
        assert_eq!(b.row(n), fresh.row(n));
        if n <= 30 {
            assert_eq!(a.row(n), fresh.row(n));
        }
    }
}

#[test]
fn simulator_partition_function_matches_exact_series() {
    let l = lambda_of_h(0.125).unwrap();
    let law = PeelingLaw::new(l).unwrap();
    let table = adaptive_table(6, l, 1e-14).unwrap();
    for q in 1..=6 {
        let (z, _) = partition_moments(q, l, 1e-13, &table).unwrap();
        assert!((ln_partition(q, l).unwrap() - z.ln()).abs() < 1e-12);
        assert!((law.ln_z(q).unwrap() - z.ln()).abs() < 1e-12);
    }
}

#[test]
fn z1_is_half_beta() {
    let l = lambda_of_h(0.125).unwrap();
    let beta = HyperParams::from_lambda(l).unwrap().beta;
    let t = polygon_counts_closed_form(1, 1024).unwrap();
    let (z, _) = partition_moments(1, l, 1e-12, &t).unwrap();
    assert!((z - beta / 2.0).abs() < 1e-12);
}

#[test]
fn cp_at_critical_point_is_finite() {
    match c_p(LAMBDA_C, 3).unwrap() {
        CpValue::Finite(x) => assert!(x > 0.0),
        CpValue::Log(x) => assert!(x.is_finite()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recurrence_and_closed_form_polygon_tables_agree(p in 1usize..6, j in 0usize..14) {
        let a = polygon_counts(6, 14).unwrap();
        let b = polygon_counts_closed_form(6, 14).unwrap();
        prop_assert_eq!(a.get(p, j), b.get(p, j));
    }

    #[test]
    fn euler_support(n in 0usize..40, g in 0usize..25) {
        let t = CountTable::build(40, None).unwrap();
        let v = t.tau(n, g).unwrap();
        prop_assert_eq!(*v == BigUint::default(), g > (n + 1) / 2);
    }

    #[test]
    fn a11_is_one(l in 1e-4f64..LAMBDA_C) {
        let s = MixtureSpec::single(l).unwrap();
        prop_assert!((apv(&s, 1, 1).unwrap() - 1.0).abs() < 1e-13);
    }
}
