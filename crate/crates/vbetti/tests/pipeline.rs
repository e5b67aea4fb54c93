use vbetti::fpgroup::FreeAut;
use vbetti::pipeline::{
    run_case1, run_case2, run_multik, run_reduction, PipelineConfig,
};

fn cfg() -> PipelineConfig {
    PipelineConfig::default()
}

fn headline(rank: usize) -> FreeAut {
    FreeAut::parse_twist_word("Dx Dy^4", rank).unwrap()
}

#[test]
fn case1_headline_numbers() {
    let r = run_case1(&headline(2), "Dx Dy^4", &cfg()).unwrap();
    assert_eq!(r.power, 1);
    assert_eq!(r.lifts_found, 16);
    assert_eq!(r.base_betti, 1);
    assert_eq!(r.cover_betti_formula, 5);
    assert_eq!(r.cover_betti_oracle, 5);
    assert_eq!(r.max_fixed_dim, 4);
    assert!(r.inequality_holds);
    let pair = r.certificates.fixed_pair.unwrap();
    let i: i64 = pair.intersection.parse().unwrap();
    assert_eq!(i.abs(), 2);
}

#[test]
fn case1_report_is_deterministic_json() {
    let a = run_case1(&headline(2), "Dx Dy^4", &cfg()).unwrap().to_json();
    let b = run_case1(&headline(2), "Dx Dy^4", &cfg()).unwrap().to_json();
    assert_eq!(a, b);
}

#[test]
fn case1_rejects_wrong_rank() {
    assert!(run_case1(&headline(3), "Dx Dy^4", &cfg()).is_err());
}

#[test]
fn case2_n3_numbers() {
    let r = run_case2(3, &headline(2), "Dx Dy^4", &cfg()).unwrap();
    assert_eq!(r.covers[0].degree, 24);
    assert_eq!(r.lifts_found, 24);
    assert_eq!(r.base_betti, 1);
    assert_eq!(r.cover_betti_formula, 5);
    assert_eq!(r.certificates.joint_fixed_dim, Some(4));
    assert_eq!(r.certificates.dim_bound.as_deref(), Some("4"));
    let q = r.certificates.quotient.unwrap();
    assert_eq!(q.group_order, 6);
    assert_eq!(q.verified_orders, (6, 6, 3));
}

#[test]
fn case2_rejects_n2() {
    assert!(run_case2(2, &headline(2), "Dx Dy^4", &cfg()).is_err());
}

#[test]
fn multik_k2_numbers() {
    let r = run_multik(2, &headline(3), "Dx Dy^4", &cfg()).unwrap();
    assert_eq!(r.covers[0].degree, 32);
    assert_eq!(r.power, 1);
    assert_eq!(r.lifts_found, 32);
    assert_eq!(r.certificates.independent_rank, Some(4));
    assert!(r.cover_betti_formula >= 5);
    assert_eq!(r.cover_betti_formula, r.cover_betti_oracle);
    // intersection matrix: nonzero within pairs, zero across pairs
    let m = r.certificates.intersection_matrix.unwrap();
    assert_eq!(m[0][1], -m[1][0]);
    assert_ne!(m[0][1], 0);
    assert_ne!(m[2][3], 0);
    for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        assert_eq!(m[i][j], 0);
    }
}

#[test]
fn multik_rejects_bad_parameters() {
    assert!(run_multik(1, &headline(2), "Dx Dy^4", &cfg()).is_err());
    assert!(run_multik(2, &headline(2), "Dx Dy^4", &cfg()).is_err()); // rank must be k + 1
}

#[test]
fn reduction_of_headline_two_cones() {
    for i in [1usize, 2] {
        let r = run_reduction(&headline(3), i, &[2, 2], "Dx Dy^4", &cfg(), false).unwrap();
        assert_eq!(r.power, 1);
        assert_eq!(r.b1_quotient, r.b1_direct);
        assert!(r.b1_total >= r.b1_quotient);
        assert_eq!(r.b1_direct, 1); // theta(Dx Dy^4) is the rank-2 headline
    }
}

#[test]
fn reduction_downstream_feeds_case1() {
    let r = run_reduction(&headline(3), 1, &[2, 3], "Dx Dy^4", &cfg(), true).unwrap();
    let d = r.downstream.expect("downstream report");
    assert_eq!(d.construction, "case1");
    assert_eq!(d.cover_betti_formula, 5);
}

#[test]
fn reduction_validates_arguments() {
    assert!(run_reduction(&headline(3), 3, &[2, 2], "f", &cfg(), false).is_err());
    assert!(run_reduction(&headline(3), 1, &[2], "f", &cfg(), false).is_err());
    assert!(run_reduction(&headline(3), 1, &[2, 1], "f", &cfg(), false).is_err());
}
