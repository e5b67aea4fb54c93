use vbetti::exact::rat_int;
use vbetti::triangle::{
    case2_certificates, case2_cover, dim_bound, find_triangle_quotient, left_regular_pair,
};

#[test]
fn n2_is_cyclic_of_order_four() {
    let cert = find_triangle_quotient(2, 100, 10, 7).unwrap();
    assert_eq!(cert.order, 4);
    assert_eq!(cert.orders, (4, 4, 2));
    assert_eq!(cert.a, cert.b);
}

#[test]
fn n3_certificate_is_order_six_over_f7() {
    let cert = find_triangle_quotient(3, 10_000, 200, 7).unwrap();
    assert_eq!(cert.order, 6);
    assert_eq!(cert.orders, (6, 6, 3));
    assert_eq!(cert.prime_field, Some(7));
    let data = case2_certificates(&cert).unwrap();
    assert_eq!((data.cycles_a, data.cycles_b, data.cycles_ab), (1, 1, 2));
    assert_eq!(data.genus_row2, 2);
    assert_eq!(data.dim_bound, "4");
    // cycle counts are N / order
    assert_eq!(data.cycles_a, cert.order / 6);
    assert_eq!(data.cycles_ab, cert.order / 3);
}

#[test]
fn n3_search_is_deterministic_across_seeds() {
    // the structured diagonal candidate wins regardless of the seed
    let a = find_triangle_quotient(3, 10_000, 200, 7).unwrap();
    let b = find_triangle_quotient(3, 10_000, 200, 12345).unwrap();
    assert_eq!(a.order, b.order);
    assert_eq!(a.table.labels(), b.table.labels());
}

#[test]
fn n4_and_n5_certificates() {
    for n in [4u32, 5] {
        let cert = find_triangle_quotient(n, 10_000, 200, 7).unwrap();
        assert_eq!(cert.orders, (2 * n as u64, 2 * n as u64, n as u64));
        let data = case2_certificates(&cert).unwrap();
        assert_eq!(data.cycles_a, cert.order / (2 * n as usize));
        assert_eq!(data.cycles_ab, cert.order / n as usize);
    }
}

#[test]
fn case2_cover_shape() {
    let cert = find_triangle_quotient(3, 10_000, 200, 7).unwrap();
    let grid = case2_cover(&cert).unwrap();
    let c = grid.cover();
    assert_eq!(c.degree(), 4 * cert.order);
    assert!(c.orbifold_fill(3).is_ok());
    // 2g = 2 + N - sum of cycle counts of (a, b, ab), via the grid here
    assert_eq!(c.genus(), 9);
    let (la, lb) = left_regular_pair(&cert).unwrap();
    assert_eq!(la.degree(), cert.order);
    assert_eq!(lb.degree(), cert.order);
}

#[test]
fn dim_bound_values() {
    assert_eq!(dim_bound(3, 6), rat_int(4));
    assert_eq!(dim_bound(4, 8), rat_int(6));
    // exact rational, not a float: n = 3, N = 7 gives 2 + 7/3
    assert_eq!(dim_bound(3, 7), rat_int(13) / rat_int(3));
}

#[test]
fn quotient_search_failure_reports_primes() {
    // a tiny cap makes every candidate fail
    let err = find_triangle_quotient(3, 2, 1, 7).unwrap_err();
    match err {
        vbetti::Error::QuotientSearchFailed { primes_tried } => {
            assert!(primes_tried.contains(&7));
        }
        other => panic!("expected QuotientSearchFailed, got {other}"),
    }
}
