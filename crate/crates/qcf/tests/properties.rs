use proptest::prelude::*;
use qcf::geometry::{act, subspace_distance, Subspace};
use qcf::gf2::BitMatrix;

fn arb_matrix(nrows: usize, ncols: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::vec(0u64..(1 << ncols), nrows)
        .prop_map(move |rows| BitMatrix::from_rows(rows, ncols))
}

fn arb_invertible(n: usize) -> impl Strategy<Value = BitMatrix> {
    arb_matrix(n, n).prop_filter("invertible", |m| m.is_invertible())
}

proptest! {
    #[test]
    fn rref_is_idempotent(m in arb_matrix(5, 9)) {
        let r1 = m.rref();
        let r2 = r1.matrix.rref();
        prop_assert_eq!(&r1.matrix, &r2.matrix);
        prop_assert_eq!(r1.rank, r2.rank);
        prop_assert_eq!(r1.pivots, r2.pivots);
    }

    #[test]
    fn rank_nullity(m in arb_matrix(6, 11)) {
        prop_assert_eq!(m.kernel_basis().nrows() + m.rank(), m.ncols());
    }

    #[test]
    fn action_is_a_right_action(
        rows in prop::collection::vec(0u64..128, 3),
        a in arb_invertible(7),
        b in arb_invertible(7),
    ) {
        let s = Subspace::from_matrix(&BitMatrix::from_rows(rows, 7));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(act(&s, &BitMatrix::identity(7)).unwrap(), s.clone());
        prop_assert_eq!(
            act(&act(&s, &a).unwrap(), &b).unwrap(),
            act(&s, &ab).unwrap()
        );
    }

    #[test]
    fn distance_is_a_metric(
        ra in prop::collection::vec(0u64..128, 3),
        rb in prop::collection::vec(0u64..128, 3),
        rc in prop::collection::vec(0u64..128, 3),
    ) {
        let a = Subspace::from_matrix(&BitMatrix::from_rows(ra, 7));
        let b = Subspace::from_matrix(&BitMatrix::from_rows(rb, 7));
        let c = Subspace::from_matrix(&BitMatrix::from_rows(rc, 7));
        let dab = subspace_distance(&a, &b).unwrap();
        let dba = subspace_distance(&b, &a).unwrap();
        prop_assert_eq!(dab, dba);
        prop_assert_eq!(dab == 0, a == b);
        if a.dim() == b.dim() {
            prop_assert_eq!(dab % 2, 0);
        }
        let dbc = subspace_distance(&b, &c).unwrap();
        let dac = subspace_distance(&a, &c).unwrap();
        prop_assert!(dac <= dab + dbc);
    }
}
