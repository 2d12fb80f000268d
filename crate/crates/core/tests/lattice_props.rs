use nildecomp::zlattice::{
    complementary_projection, hnf, pure_closure, snf, split_or_obstruction, IntVec, SplitObstruction,
};
use nildecomp::{IntMat, Lattice};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = IntMat> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, c), r).prop_map(move |rows| {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            IntMat::from_i64(&refs)
        })
    })
}

fn lattice(n: usize, max_gens: usize) -> impl Strategy<Value = Lattice> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), 0..=max_gens).prop_map(move |gs| {
        let g: Vec<IntVec> = gs.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        Lattice::new(n, &g)
    })
}

fn pair() -> impl Strategy<Value = (Lattice, Lattice)> {
    (1usize..=4).prop_flat_map(|n| (lattice(n, 3), lattice(n, 3)))
}

fn rows_in(m: &IntMat, l: &Lattice) -> bool {
    m.rows().iter().all(|r| l.contains(r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hermite_form_is_reduced(m in matrix(5)) {
        let (h, u) = hnf(&m);
        prop_assert_eq!(u.mul(&m), h.clone());
        prop_assert!(u.is_unimodular());
        let mut last: Option<usize> = None;
        let mut seen_zero = false;
        for (i, row) in h.rows().iter().enumerate() {
            match row.iter().position(|x| !x.is_zero()) {
                None => seen_zero = true,
                Some(p) => {
                    prop_assert!(!seen_zero, "zero rows come last");
                    prop_assert!(last.is_none_or(|l| p > l));
                    prop_assert!(row[p].is_positive());
                    for above in &h.rows()[..i] {
                        prop_assert!(!above[p].is_negative() && above[p] < row[p]);
                    }
                    last = Some(p);
                }
            }
        }
    }

    #[test]
    fn smith_form_divides_down_the_diagonal(m in matrix(5)) {
        let r = snf(&m);
        prop_assert_eq!(r.p.mul(&m).mul(&r.q), r.s.clone());
        prop_assert!(r.p.is_unimodular() && r.q.is_unimodular());
        prop_assert_eq!(r.p.mul(&r.p_inv), IntMat::identity(m.nrows()));
        for (i, c) in r.invariants.iter().enumerate() {
            prop_assert!(c.is_positive());
            prop_assert_eq!(r.s.get(i, i), c);
            if i > 0 {
                prop_assert!(c.is_multiple_of(&r.invariants[i - 1]));
            }
        }
        for i in 0..r.s.nrows() {
            for j in 0..r.s.ncols() {
                if i != j || i >= r.rank() {
                    prop_assert!(r.s.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn pure_closure_contains_and_complements(l in (1usize..=5).prop_flat_map(|n| lattice(n, 4))) {
        let n = l.ambient_rank();
        let pc = pure_closure(&l);
        prop_assert!(pc.closure.contains_lattice(&l));
        prop_assert_eq!(pc.closure.rank(), l.rank());
        prop_assert_eq!(pc.closure.sum(&pc.complement), Lattice::full(n));
        prop_assert_eq!(pc.closure.rank() + pc.complement.rank(), n);
        prop_assert_eq!(pc.already_pure, pc.closure == l);
        prop_assert_eq!(pure_closure(&pc.closure).closure, pc.closure.clone());
    }

    #[test]
    fn splittings_contain_their_inputs((v1, v2) in pair()) {
        let n = v1.ambient_rank();
        match split_or_obstruction(&v1, &v2) {
            Ok(s) => {
                prop_assert!(s.z1.contains_lattice(&v1) && s.z2.contains_lattice(&v2));
                prop_assert_eq!(s.z1.sum(&s.z2), Lattice::full(n));
                prop_assert_eq!(s.z1.rank() + s.z2.rank(), n);
            }
            Err(SplitObstruction::Intersecting { witness }) => {
                prop_assert!(witness.iter().any(|x| !x.is_zero()));
                prop_assert!(v1.contains(&witness) && v2.contains(&witness));
            }
            Err(SplitObstruction::NotPure { invariants }) => {
                prop_assert!(v1.intersect(&v2).rank() == 0);
                prop_assert!(invariants.iter().any(|c| !c.is_one()));
            }
        }
    }

    #[test]
    fn projections_respect_both_lattices((r1, r2) in pair()) {
        let n = r1.ambient_rank();
        if let Some(e) = complementary_projection(&r1, &r2).unwrap() {
            prop_assert_eq!(e.mul(&e), e.clone());
            prop_assert!(rows_in(&e, &r1));
            prop_assert!(rows_in(&IntMat::identity(n).sub(&e), &r2));
        }
        // swapping the roles swaps the projection
        let swapped = complementary_projection(&r2, &r1).unwrap();
        prop_assert_eq!(swapped.is_some(), complementary_projection(&r1, &r2).unwrap().is_some());
    }

    #[test]
    fn pure_lattices_always_admit_projections(l in (1usize..=4).prop_flat_map(|n| lattice(n, 3))) {
        // a pure lattice and its complement's dual split the whole space
        let n = l.ambient_rank();
        let pc = pure_closure(&l);
        let e = complementary_projection(&pc.closure, &pc.complement).unwrap();
        prop_assert!(e.is_some());
        prop_assert_eq!(complementary_projection(&Lattice::full(n), &Lattice::zero(n)).unwrap(), Some(IntMat::identity(n)));
    }
}
