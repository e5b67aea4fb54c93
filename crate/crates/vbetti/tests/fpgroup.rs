use num_bigint::BigInt;
use vbetti::exact::Perm;
use vbetti::fpgroup::{
    commutator_xy, mapping_torus_presentation, standard_names, subgroup_presentation, theta,
    FPGroup, FreeAut, FreeWord,
};

fn names2() -> Vec<String> {
    standard_names(2)
}

#[test]
fn word_parse_display_roundtrip() {
    let n = names2();
    let w = FreeWord::parse("x y X Y", &n).unwrap();
    assert_eq!(w, commutator_xy());
    assert_eq!(w.display(&n), "x y X Y");
    assert_eq!(FreeWord::parse("1", &n).unwrap(), FreeWord::empty());
    // free reduction
    assert_eq!(FreeWord::parse("x X y", &n).unwrap().len(), 1);
}

#[test]
fn twist_abelianizations() {
    let dx = FreeAut::dehn_twist_x(2);
    let m = dx.abelianized_matrix();
    assert_eq!(*m.get(0, 0), BigInt::from(1));
    assert_eq!(*m.get(0, 1), BigInt::from(1));
    assert_eq!(*m.get(1, 0), BigInt::from(0));
    assert_eq!(*m.get(1, 1), BigInt::from(1));
    let dy = FreeAut::dehn_twist_y(2);
    let m = dy.abelianized_matrix();
    assert_eq!(*m.get(0, 0), BigInt::from(1));
    assert_eq!(*m.get(0, 1), BigInt::from(0));
    assert_eq!(*m.get(1, 0), BigInt::from(-1));
    assert_eq!(*m.get(1, 1), BigInt::from(1));
}

#[test]
fn dx_dy4_abelianizes_to_frozen_matrix() {
    let f = FreeAut::parse_twist_word("Dx Dy^4", 2).unwrap();
    let m = f.abelianized_matrix();
    assert_eq!(*m.get(0, 0), BigInt::from(-3));
    assert_eq!(*m.get(0, 1), BigInt::from(1));
    assert_eq!(*m.get(1, 0), BigInt::from(-4));
    assert_eq!(*m.get(1, 1), BigInt::from(1));
}

#[test]
fn composition_right_factor_first() {
    let a = FreeAut::dehn_twist_x(2);
    let b = FreeAut::dehn_twist_y(2);
    let ab = a.compose(&b).unwrap();
    let w = FreeWord::parse("x y", &names2()).unwrap();
    assert_eq!(ab.apply(&w), a.apply(&b.apply(&w)));
    // twists fix the boundary word exactly
    for f in [&a, &b, &ab] {
        assert_eq!(f.apply(&commutator_xy()).cyclically_reduced().len(), 4);
    }
    assert_eq!(a.apply(&commutator_xy()), commutator_xy());
    assert_eq!(b.apply(&commutator_xy()), commutator_xy());
}

#[test]
fn aut_text_roundtrip() {
    let n = names2();
    let f = FreeAut::parse_twist_word("Dx", 2).unwrap();
    let text = f.display(&n);
    assert_eq!(text, "x -> x\ny -> y x");
    let g = FreeAut::parse_text(&text, &n).unwrap();
    assert_eq!(g.images(), f.images());
}

#[test]
fn certified_inverse_is_checked() {
    let good = FreeAut::new(
        vec![FreeWord::parse("x", &names2()).unwrap(), FreeWord::parse("y x", &names2()).unwrap()],
        Some(vec![
            FreeWord::parse("x", &names2()).unwrap(),
            FreeWord::parse("y X", &names2()).unwrap(),
        ]),
    );
    assert!(good.is_ok());
    let bad = FreeAut::new(
        vec![FreeWord::parse("x", &names2()).unwrap(), FreeWord::parse("y x", &names2()).unwrap()],
        Some(vec![
            FreeWord::parse("x", &names2()).unwrap(),
            FreeWord::parse("y x", &names2()).unwrap(),
        ]),
    );
    assert!(bad.is_err());
}

#[test]
fn presentation_parse_display_and_abelianization() {
    let g = FPGroup::parse("gens: x y t ; rels: t x T X, x x").unwrap();
    assert_eq!(g.rank(), 3);
    assert_eq!(g.relators.len(), 2);
    // abelianized: relator x^2 kills x rationally; t x t^-1 x^-1 dies
    assert_eq!(g.abelianization_rank(), 2);
    let shown = g.display();
    let g2 = FPGroup::parse(&shown).unwrap();
    assert_eq!(g, g2);
}

#[test]
fn mapping_torus_of_identity_over_torus() {
    // identity monodromy on the punctured torus with one cone of order 2:
    // abelianization is Z^2 x Z x (Z/2 torsion from [x,y]^2 = trivial
    // abelianized), so rank 3
    let f = FreeAut::identity(2);
    let g = mapping_torus_presentation(&f, &names2(), &[]).unwrap();
    assert_eq!(g.gens, vec!["x", "y", "t"]);
    assert_eq!(g.abelianization_rank(), 3);
}

#[test]
fn mapping_torus_of_dx_dy4_has_b1_one() {
    // the frozen headline: b1(M_f) = 1 for f = Dx Dy^4 (eigenvalues -1, -1)
    let f = FreeAut::parse_twist_word("Dx Dy^4", 2).unwrap();
    let g = mapping_torus_presentation(&f, &names2(), &[]).unwrap();
    assert_eq!(g.abelianization_rank(), 1);
}

#[test]
fn kill_generators_renumbers() {
    let g = FPGroup::parse("gens: a b c ; rels: a b c, b b").unwrap();
    let q = g.kill_generators(&[1]);
    assert_eq!(q.gens, vec!["a", "c"]);
    // relator a b c becomes a c; b b becomes empty and is dropped
    assert_eq!(q.relators.len(), 1);
    assert_eq!(q.relators[0].display(&q.gens), "a c");
}

#[test]
fn theta_strips_cone_generators() {
    // an automorphism of F(x, y, z1) fixing z1: Dx extended by identity
    let f = FreeAut::dehn_twist_x(3);
    let t = theta(&f, 1).unwrap();
    assert_eq!(t.rank(), 2);
    assert_eq!(t.display(&names2()), "x -> x\ny -> y x");
    assert!(theta(&f, 2).is_ok()); // rank 3 => k = 2 cone indices
    assert!(theta(&f, 3).is_err());
}

#[test]
fn theta_index_range() {
    let f = FreeAut::dehn_twist_x(4); // rank 4 => k = 3 cones
    assert!(theta(&f, 0).is_err());
    assert!(theta(&f, 3).is_ok());
    assert!(theta(&f, 4).is_err());
}

#[test]
fn subgroup_presentation_index_two_free_group() {
    // index-2 subgroup of F_2: free of rank 3 (Nielsen-Schreier)
    let g = FPGroup::free(vec!["x".into(), "y".into()]);
    let rep = vec![Perm::parse("(1 2)", 2).unwrap(), Perm::identity(2)];
    let h = subgroup_presentation(&g, &rep, 0).unwrap();
    assert_eq!(h.rank(), 3);
    assert_eq!(h.abelianization_rank(), 3);
}

#[test]
fn subgroup_presentation_rejects_unsatisfied_relator() {
    let g = FPGroup::parse("gens: x y ; rels: x x").unwrap();
    let rep = vec![Perm::parse("(1 2 3)", 3).unwrap(), Perm::identity(3)];
    assert!(subgroup_presentation(&g, &rep, 0).is_err());
}

#[test]
fn subgroup_presentation_reports_orbits() {
    let g = FPGroup::free(vec!["x".into(), "y".into()]);
    let rep = vec![Perm::identity(3), Perm::parse("(1 2)", 3).unwrap()];
    let err = subgroup_presentation(&g, &rep, 0).unwrap_err();
    match err {
        vbetti::Error::NonTransitive { orbits } => assert_eq!(orbits.len(), 2),
        other => panic!("expected NonTransitive, got {other}"),
    }
}
