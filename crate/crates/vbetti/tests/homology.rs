use num_traits::Zero;
use vbetti::cover::{build_cover, find_lifts, FatSurface};
use vbetti::exact::Perm;
use vbetti::fpgroup::FreeAut;
use vbetti::homology::{
    betti_mapping_torus, betti_oracle, chain_intersection_matrix, fixed_pair_search,
    fixed_subspace_dim_of_canonical_lifts, H1Basis,
};
use vbetti::pipeline::case1_grid;

#[test]
fn case1_basis_dimensions() {
    let grid = case1_grid().unwrap();
    let basis = H1Basis::new(grid.cover());
    assert_eq!(basis.dim(), 17);
    // 8 punctures on a connected cover span a rank-7 boundary subspace
    assert_eq!(basis.boundary_rank(), 7);
    assert_eq!(basis.killed_dim(), 10); // = 2 * genus 5
}

#[test]
fn killed_form_is_antisymmetric_and_nondegenerate() {
    let grid = case1_grid().unwrap();
    let basis = H1Basis::new(grid.cover());
    let j = basis.killed_form();
    for a in 0..10 {
        for b in 0..10 {
            assert_eq!(*j.get(a, b), -j.get(b, a).clone());
        }
    }
    assert_eq!(j.rank(), 10);
}

#[test]
fn boundary_classes_reduce_to_zero() {
    let grid = case1_grid().unwrap();
    let c = grid.cover();
    let basis = H1Basis::new(c);
    for lift in c.boundary_lifts() {
        let lp = c.puncture_loop(lift);
        let cls = basis.loop_class(&lp);
        assert!(cls.iter().all(Zero::is_zero));
    }
}

#[test]
fn headline_action_and_betti() {
    let grid = case1_grid().unwrap();
    let c = grid.cover();
    let basis = H1Basis::new(c);
    let f = FreeAut::parse_twist_word("Dx Dy^4", 2).unwrap();
    let lifts = find_lifts(c, &f).unwrap();
    assert_eq!(lifts.len(), 16);
    let mut best = 0;
    for lam in &lifts {
        let act = basis.action(&f, lam).unwrap();
        assert!(act.preserves_form(&basis));
        best = best.max(act.fixed_dim());
        let formula = betti_mapping_torus(&basis, &act, 2).unwrap();
        let oracle = betti_oracle(c, &f, lam, 2).unwrap();
        assert_eq!(formula, oracle);
    }
    assert_eq!(best, 4);
}

#[test]
fn trivial_cover_betti_matches_abelianized_fix() {
    // base b1 of Dx Dy^4 over T(2) is 1 (no +1 eigenvector)
    let c = build_cover(
        FatSurface::punctured_torus(),
        vec![Perm::identity(1), Perm::identity(1)],
    )
    .unwrap();
    let basis = H1Basis::new(&c);
    assert_eq!(basis.killed_dim(), 2);
    let f = FreeAut::parse_twist_word("Dx Dy^4", 2).unwrap();
    let act = basis.action(&f, &[0]).unwrap();
    assert_eq!(betti_mapping_torus(&basis, &act, 2).unwrap(), 1);
    assert_eq!(betti_oracle(&c, &f, &[0], 2).unwrap(), 1);
    // identity monodromy: everything is fixed
    let id = FreeAut::identity(2);
    let act = basis.action(&id, &[0]).unwrap();
    assert_eq!(betti_mapping_torus(&basis, &act, 2).unwrap(), 3);
}

#[test]
fn fixed_pair_certificate_on_case1() {
    let grid = case1_grid().unwrap();
    let basis = H1Basis::new(grid.cover());
    let cert = fixed_pair_search(&grid, &basis).unwrap();
    let i: i64 = cert.intersection.to_string().parse().unwrap();
    assert_eq!(i.abs(), 2);
    assert!(cert.y_intersections.iter().all(Zero::is_zero));
    assert!(cert.y_intersections_star.iter().all(Zero::is_zero));
    assert!(cert.joint_fixed_dim >= 2);
    assert_eq!(cert.pair_space_dim, 2);
    // the joint dimension helper agrees
    let joint = fixed_subspace_dim_of_canonical_lifts(&grid, &basis).unwrap();
    assert_eq!(joint, cert.joint_fixed_dim);
}

#[test]
fn fixed_pair_rejects_foreign_basis() {
    let grid = case1_grid().unwrap();
    let other = case1_grid().unwrap();
    let basis = H1Basis::new(other.cover());
    assert!(fixed_pair_search(&grid, &basis).is_err());
}

#[test]
fn chain_intersection_matrix_is_antisymmetric() {
    let grid = case1_grid().unwrap();
    let c = grid.cover();
    let basis = H1Basis::new(c);
    let cert = fixed_pair_search(&grid, &basis).unwrap();
    let chains = vec![vec![cert.delta.clone()], vec![cert.delta_star.clone()]];
    let m = chain_intersection_matrix(c, &chains);
    assert_eq!(m[0][1], -m[1][0]);
    assert_eq!(m[0][0], 0);
    assert_eq!(m[1][1], 0);
}
