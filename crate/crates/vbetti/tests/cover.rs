use vbetti::cover::{
    build_cover, check_lift_conditions, condition_ii, fiber_product, find_lifts, grid_cover,
    intersection_number, minimal_lifting_power, pullback_class, transfer_loop, verify_lift,
    CoverLoop, FatSurface,
};
use vbetti::exact::Perm;
use vbetti::fpgroup::{commutator_xy, FreeAut, FreeWord};

fn case1_sigmas() -> [Perm; 4] {
    let s = Perm::parse("(1 2 3 4)", 4).unwrap();
    [s.clone(), s.inverse(), s.clone(), s.inverse()]
}

#[test]
fn punctured_torus_surface() {
    let s = FatSurface::punctured_torus();
    assert_eq!(s.rank(), 2);
    assert_eq!(s.genus(), 1);
    assert_eq!(s.punctures(), 1);
    assert_eq!(s.boundary_words(), &[commutator_xy()]);
    assert_eq!(s.euler_characteristic(), -1);
}

#[test]
fn k_punctured_torus_surface() {
    for k in 1..=4 {
        let s = FatSurface::k_punctured_torus(k);
        assert_eq!(s.rank(), k + 1);
        assert_eq!(s.genus(), 1);
        assert_eq!(s.punctures(), k);
    }
    // the last boundary word of T with 3 punctures: Z2 Z1 [x, y]
    let s = FatSurface::k_punctured_torus(3);
    let names = s.gen_names().to_vec();
    assert_eq!(s.boundary_words()[2].display(&names), "Z2 Z1 x y X Y");
}

#[test]
fn trivial_cover_intersection_calibration() {
    // I(x, y) = +1 on the once-punctured torus
    let c = build_cover(
        FatSurface::punctured_torus(),
        vec![Perm::identity(1), Perm::identity(1)],
    )
    .unwrap();
    let lx = CoverLoop::from_word(&c, 0, &FreeWord::generator(1)).unwrap();
    let ly = CoverLoop::from_word(&c, 0, &FreeWord::generator(2)).unwrap();
    assert_eq!(intersection_number(&c, &lx, &ly), 1);
    assert_eq!(intersection_number(&c, &ly, &lx), -1);
    assert_eq!(intersection_number(&c, &lx, &lx), 0);
}

#[test]
fn intersection_invariant_under_retraversal() {
    let grid = grid_cover(4, case1_sigmas()).unwrap();
    let c = grid.cover();
    // same classes traversed with a backtrack spliced in
    let a = CoverLoop::from_word(c, 0, &FreeWord::from_letters(&[1, 1, 1, 1])).unwrap();
    let b = CoverLoop::from_word(c, 0, &FreeWord::from_letters(&[2, 2, 2, 2])).unwrap();
    let i0 = intersection_number(c, &a, &b);
    let (steps, end) = c.path_steps_letters(0, &[1, 1, 2, -2, 1, 1]);
    assert_eq!(end, 0);
    let a2 = CoverLoop::new(c, steps).unwrap();
    assert_eq!(a2.len(), 6); // the backtrack is kept as a path
    assert_eq!(intersection_number(c, &a2, &b), i0);
}

#[test]
fn grid_cover_figure_numbers() {
    let grid = grid_cover(4, case1_sigmas()).unwrap();
    let c = grid.cover();
    assert_eq!(c.degree(), 16);
    assert_eq!(c.h1_dim(), 17);
    assert_eq!(c.genus(), 5);
    assert_eq!(c.boundary_lifts().len(), 8);
    assert!(c.boundary_lifts().iter().all(|p| p.degree == 2));
    assert!(c.orbifold_fill(2).unwrap().manifold);
    assert!(c.orbifold_fill(4).is_ok());
    assert!(c.orbifold_fill(3).is_err());
}

#[test]
fn lift_conditions_on_case1_tuple() {
    let sig = case1_sigmas();
    let lc = check_lift_conditions(&sig).unwrap();
    assert!(lc.lemma_lift);
    assert!(lc.condition_i);
    assert!(condition_ii(&sig, 2).unwrap());
    // a tuple with nontrivial full product fails
    let s3 = Perm::parse("(1 2 3)", 4).unwrap();
    let bad = [s3.clone(), s3.clone(), s3.clone(), s3.clone()];
    assert!(!check_lift_conditions(&bad).unwrap().lemma_lift);
}

#[test]
fn sixteen_lifts_of_the_headline_twists() {
    let grid = grid_cover(4, case1_sigmas()).unwrap();
    let c = grid.cover();
    let dx = FreeAut::dehn_twist_x(2);
    let dy4 = FreeAut::dehn_twist_y(2).pow(4).unwrap();
    let f = dx.compose(&dy4).unwrap();
    for g in [&dx, &dy4, &f] {
        let lifts = find_lifts(c, g).unwrap();
        assert_eq!(lifts.len(), 16);
        for lam in &lifts {
            assert!(verify_lift(c, g, lam));
        }
    }
    // Dy itself does not lift; Dy^2 already does (16 lifts)
    let dy = FreeAut::dehn_twist_y(2);
    assert!(find_lifts(c, &dy).unwrap().is_empty());
    let (m, lifts) = minimal_lifting_power(c, &dy, 8).unwrap();
    assert_eq!(m, 2);
    assert_eq!(lifts.len(), 16);
}

#[test]
fn canonical_dx_lift_row_action() {
    let grid = grid_cover(4, case1_sigmas()).unwrap();
    let lam = grid.canonical_dx_lift();
    assert!(verify_lift(grid.cover(), &FreeAut::dehn_twist_x(2), &lam));
    let mut acc = Perm::identity(4);
    for row in 0..4 {
        acc = acc.then(&grid.sigmas()[row]).unwrap();
        assert_eq!(grid.row_action(&lam, row), Some(acc.clone()));
    }
}

#[test]
fn condition_ii_matches_unwrapping_degrees() {
    let s = Perm::parse("(1 2 3)", 3).unwrap();
    let sig = [s.clone(), s.inverse(), s.clone(), s.inverse()];
    let grid = grid_cover(3, sig.clone()).unwrap();
    for n in 2..=6u32 {
        let fills = grid.cover().orbifold_fill(n).is_ok();
        assert_eq!(condition_ii(&sig, n).unwrap(), fills, "n = {n}");
    }
}

#[test]
fn fiber_product_and_transfer() {
    // two distinct degree-2 covers of the punctured torus
    let t = Perm::parse("(1 2)", 2).unwrap();
    let c1 = build_cover(
        FatSurface::punctured_torus(),
        vec![t.clone(), Perm::identity(2)],
    )
    .unwrap();
    let c2 = build_cover(
        FatSurface::punctured_torus(),
        vec![Perm::identity(2), t.clone()],
    )
    .unwrap();
    let fp = fiber_product(&c1, &c2).unwrap();
    assert_eq!(fp.cover.degree(), 4);
    // projections intertwine the actions
    for s in 0..4 {
        for l in [1i32, 2, -1, -2] {
            assert_eq!(
                fp.projections[0][fp.cover.act_letter(s, l)],
                c1.act_letter(fp.projections[0][s], l)
            );
        }
    }
    // transfer of the loop x (closed on c1 after 2 steps): components close
    let lx = CoverLoop::from_word(&c1, 0, &FreeWord::generator(1).repeat(2)).unwrap();
    let comps = transfer_loop(&fp.cover, &fp.projections[0], &lx).unwrap();
    let total: usize = comps.iter().map(CoverLoop::len).sum();
    assert_eq!(total % lx.len(), 0);
    assert!(!comps.is_empty());
}

#[test]
fn pullback_requires_matching_permutations() {
    let grid = grid_cover(4, case1_sigmas()).unwrap();
    let gc = grid.cover();
    let comm = commutator_xy();
    let comm_perm =
        Perm::from_images((0..16).map(|s| gc.act_word(s, &comm)).collect()).unwrap();
    let base2 = FatSurface::k_punctured_torus(2);
    let up = build_cover(
        base2.clone(),
        vec![gc.perms()[0].clone(), gc.perms()[1].clone(), comm_perm],
    )
    .unwrap();
    let lp = CoverLoop::from_word(gc, 0, &FreeWord::generator(1).repeat(4)).unwrap();
    let pulled = pullback_class(gc, &lp, &up).unwrap();
    assert_eq!(pulled.len(), lp.len());
    // mismatched permutations are rejected
    let other = build_cover(
        base2,
        vec![gc.perms()[1].clone(), gc.perms()[0].clone(), Perm::identity(16)],
    );
    if let Ok(other) = other {
        assert!(pullback_class(gc, &lp, &other).is_err());
    }
}
