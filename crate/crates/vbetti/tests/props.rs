//! Property suites over randomized inputs.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use vbetti::cover::{
    check_lift_conditions, condition_ii, find_lifts, grid_cover, verify_lift,
};
use vbetti::exact::{fixed_subspace, smith_normal_form, IntMatrix, Perm, RatMatrix};
use vbetti::fpgroup::{commutator_xy, FreeAut, FreeWord};

fn perm_strategy(d: usize) -> impl Strategy<Value = Perm> {
    proptest::collection::vec(any::<u64>(), d).prop_map(move |seeds| {
        // Fisher-Yates driven by the sampled seeds
        let mut images: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            images.swap(i, (seeds[i] % (i as u64 + 1)) as usize);
        }
        Perm::from_images(images).unwrap()
    })
}

fn int_matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec(proptest::collection::vec(-6i64..=6, cols), rows)
        .prop_map(|rows| IntMatrix::from_rows(&rows))
}

fn twist_word_strategy(rank: usize) -> impl Strategy<Value = FreeAut> {
    proptest::collection::vec((any::<bool>(), -2i64..=2), 1..=4).prop_map(move |factors| {
        let mut out = FreeAut::identity(rank);
        for (is_x, e) in factors {
            let t = if is_x {
                FreeAut::dehn_twist_x(rank)
            } else {
                FreeAut::dehn_twist_y(rank)
            };
            out = out.compose(&t.pow(e).unwrap()).unwrap();
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn snf_certificate(m in int_matrix_strategy(4, 3)) {
        let snf = smith_normal_form(&m);
        let d = snf.u.mul(&m).mul(&snf.v);
        for i in 0..4 {
            for j in 0..3 {
                let expect = if i == j && i < snf.diagonal.len() {
                    snf.diagonal[i].clone()
                } else {
                    BigInt::zero()
                };
                prop_assert_eq!(d.get(i, j), &expect);
            }
        }
        for w in snf.diagonal.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        let du = snf.u.det();
        let dv = snf.v.det();
        prop_assert!(du == BigInt::one() || du == -BigInt::one());
        prop_assert!(dv == BigInt::one() || dv == -BigInt::one());
    }

    #[test]
    fn perm_group_laws(a in perm_strategy(6), b in perm_strategy(6)) {
        prop_assert!(a.then(&a.inverse()).unwrap().is_identity());
        prop_assert_eq!(
            a.then(&b).unwrap().inverse(),
            b.inverse().then(&a.inverse()).unwrap()
        );
        let o = a.order();
        prop_assert!(a.pow(o as i64).is_identity());
        // cycle count times lcm structure: order is the lcm of cycle lengths
        let lcm = a.cycles().iter().fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64));
        prop_assert_eq!(o, lcm.max(1));
    }

    #[test]
    fn free_word_laws(xs in proptest::collection::vec(-3i32..=3, 0..12)) {
        let letters: Vec<i32> = xs.into_iter().filter(|&l| l != 0).collect();
        let w = FreeWord::from_letters(&letters);
        prop_assert!(w.mul(&w.inverse()).is_empty());
        prop_assert_eq!(w.inverse().inverse(), w.clone());
        // no cancelling adjacent pair survives reduction
        for pair in w.letters().windows(2) {
            prop_assert_ne!(pair[0], -pair[1]);
        }
    }

    #[test]
    fn twist_words_fix_boundary_and_compose_correctly(
        a in twist_word_strategy(2),
        b in twist_word_strategy(2),
        xs in proptest::collection::vec(-2i32..=2, 1..8),
    ) {
        let comm = commutator_xy();
        prop_assert_eq!(a.apply(&comm), comm.clone());
        let letters: Vec<i32> = xs.into_iter().filter(|&l| l != 0).collect();
        let w = FreeWord::from_letters(&letters);
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.apply(&w), a.apply(&b.apply(&w)));
        // inverse really inverts on words
        let ai = a.inverse().unwrap();
        prop_assert_eq!(ai.apply(&a.apply(&w)), w);
    }

    #[test]
    fn fixed_subspace_dimension_identity(m in int_matrix_strategy(4, 4)) {
        let a = m.to_rat();
        let fix = fixed_subspace(&a).unwrap();
        let ami = a.sub(&RatMatrix::identity(4));
        prop_assert_eq!(fix.len(), 4 - ami.rank());
    }

    #[test]
    fn lemma_lift_tuples_admit_dx_lifts(
        pi in perm_strategy(5),
        a in 0i64..5,
        b in 0i64..5,
        c in 0i64..5,
    ) {
        // powers of a single permutation trivially satisfy the commuting
        // conditions once the full product is forced to the identity
        let s1 = pi.pow(a);
        let s2 = pi.pow(b);
        let s3 = pi.pow(c);
        let s4 = s1.then(&s2).unwrap().then(&s3).unwrap().inverse();
        let sigmas = [s1, s2, s3, s4];
        prop_assert!(check_lift_conditions(&sigmas).unwrap().lemma_lift);
        let Ok(grid) = grid_cover(5, sigmas) else {
            return Ok(()); // intransitive sample
        };
        let dx = FreeAut::dehn_twist_x(2);
        let lifts = find_lifts(grid.cover(), &dx).unwrap();
        prop_assert!(!lifts.is_empty());
        let lam = grid.canonical_dx_lift();
        prop_assert!(verify_lift(grid.cover(), &dx, &lam));
    }

    #[test]
    fn condition_ii_iff_fill_succeeds(
        pi in perm_strategy(4),
        n in 2u32..=6,
    ) {
        let sigmas = [pi.clone(), pi.inverse(), pi.clone(), pi.inverse()];
        let Ok(grid) = grid_cover(4, sigmas.clone()) else {
            return Ok(());
        };
        prop_assert_eq!(
            condition_ii(&sigmas, n).unwrap(),
            grid.cover().orbifold_fill(n).is_ok()
        );
    }
}
