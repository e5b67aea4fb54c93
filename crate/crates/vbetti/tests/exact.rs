use num_bigint::BigInt;
use num_traits::{One, Zero};
use vbetti::exact::{
    left_regular_representation, rat, rat_int, smith_normal_form, FiniteGroupTable, IntMatrix,
    Perm, RatMatrix,
};

#[test]
fn perm_right_action_and_composition() {
    // (1 2 3 4) in 1-based cycle notation, 0-based internally
    let a = Perm::parse("(1 2 3 4)", 4).unwrap();
    assert_eq!(a.apply(0), 1);
    assert_eq!(a.apply(3), 0);
    let b = Perm::parse("(1 2)", 4).unwrap();
    // then: self first, then other
    let ab = a.then(&b).unwrap();
    assert_eq!(ab.apply(0), 0); // 0 -> 1 -> 0... wait: 0 -a-> 1 -b-> 0
    assert_eq!(ab.apply(1), 2);
    assert_eq!(a.then(&a.inverse()).unwrap(), Perm::identity(4));
}

#[test]
fn perm_cycle_roundtrip_and_order() {
    let p = Perm::parse("(1 2 3 4)(5 6)", 6).unwrap();
    assert_eq!(p.order(), 4);
    let s = p.to_string();
    assert_eq!(Perm::parse(&s, 6).unwrap(), p);
    assert_eq!(p.cycles().len(), 2);
    // cycles() keeps fixed points as singletons (unwrapping degree 1)
    assert_eq!(p.pow(4).cycles().len(), 6);
    assert!(p.pow(4).is_identity());
}

#[test]
fn perm_parse_rejects_garbage() {
    assert!(Perm::parse("(1 2 9)", 4).is_err());
    assert!(Perm::parse("(1 1)", 4).is_err());
    assert!(Perm::parse("(0 1)", 4).is_err());
}

#[test]
fn snf_of_diag_2_3_is_1_6() {
    let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
    let snf = smith_normal_form(&m);
    assert_eq!(snf.rank, 2);
    assert_eq!(snf.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
}

#[test]
fn snf_certificate_umv_equals_d() {
    let m = IntMatrix::from_rows(&[vec![6, 4, 2], vec![2, 8, 4], vec![0, 10, -6]]);
    let snf = smith_normal_form(&m);
    let d = snf.u.mul(&m).mul(&snf.v);
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j {
                snf.diagonal.get(i).cloned().unwrap_or_else(BigInt::zero)
            } else {
                BigInt::zero()
            };
            assert_eq!(*d.get(i, j), expect);
        }
    }
    // divisibility chain and unimodular transforms
    for w in snf.diagonal.windows(2) {
        assert!((&w[1] % &w[0]).is_zero());
    }
    for t in [&snf.u, &snf.v] {
        let det = t.det();
        assert!(det == BigInt::one() || det == -BigInt::one());
    }
}

#[test]
fn rat_matrix_rank_and_kernel() {
    let m = RatMatrix::from_rows(&[
        vec![rat_int(1), rat_int(2), rat_int(3)],
        vec![rat_int(2), rat_int(4), rat_int(6)],
        vec![rat_int(0), rat_int(1), rat(1, 2)],
    ]);
    assert_eq!(m.rank(), 2);
    let k = m.kernel_basis();
    assert_eq!(k.len(), 1);
    for v in &k {
        let img = m.mul_vec(v);
        assert!(img.iter().all(|x| x.is_zero()));
    }
}

#[test]
fn cyclic_table_and_left_regular() {
    let g = FiniteGroupTable::cyclic(6);
    assert_eq!(g.order(), 6);
    assert_eq!(g.element_order(1), 6);
    assert_eq!(g.element_order(2), 3);
    assert_eq!(g.element_order(3), 2);
    let l = left_regular_representation(&g, 1).unwrap();
    assert_eq!(l.degree(), 6);
    // cycle count of the left regular representation is order / element order
    assert_eq!(l.cycles().len(), 1);
    let l2 = left_regular_representation(&g, 2).unwrap();
    assert_eq!(l2.cycles().len(), 2);
}
