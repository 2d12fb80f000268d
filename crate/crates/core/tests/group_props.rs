use nildecomp::corpus::{self, CorpusSpec, Family};
use nildecomp::exactmat::commutator;
use nildecomp::{TGroup, UniMat};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pool() -> Vec<TGroup> {
    vec![
        corpus::heisenberg(),
        corpus::make(&CorpusSpec::new(Family::B)).unwrap(),
        corpus::gp(2).unwrap(),
        corpus::free_abelian(2).unwrap(),
        corpus::make(&CorpusSpec::new(Family::K)).unwrap(),
    ]
}

fn word(g: &TGroup, letters: &[(usize, i64)]) -> UniMat {
    let gens = g.generators();
    letters.iter().fold(UniMat::identity(g.ambient_size()), |acc, &(i, e)| acc.mul(&gens[i % gens.len()].pow(e)))
}

fn letters() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..8, -3i64..=3), 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_have_unique_normal_forms(which in 0usize..5, w in letters()) {
        let g = &pool()[which];
        let x = word(g, &w);
        let coords = g.malcev().coords(&x).expect("words lie in the group");
        prop_assert_eq!(g.malcev().normal_form(&coords), x.clone());
        prop_assert_eq!(g.membership(&x).unwrap(), Some(coords));
    }

    #[test]
    fn commutators_land_in_the_derived_subgroup(which in 0usize..5, a in letters(), b in letters()) {
        let g = &pool()[which];
        let c = commutator(&word(g, &a), &word(g, &b));
        prop_assert!(g.derived_subgroup().unwrap().contains_element(&c).unwrap());
    }

    #[test]
    fn central_elements_commute_with_everything(which in 0usize..5, w in letters()) {
        let g = &pool()[which];
        let x = word(g, &w);
        for z in g.center().generators() {
            prop_assert_eq!(z.mul(&x), x.mul(z));
        }
    }

    #[test]
    fn products_add_invariants(i in 0usize..5, j in 0usize..5) {
        let groups = pool();
        let (g1, g2) = (&groups[i], &groups[j]);
        let g = corpus::direct_product(g1, g2).unwrap();
        prop_assert_eq!(g.hirsch_length(), g1.hirsch_length() + g2.hirsch_length());
        prop_assert_eq!(g.center().hirsch_length(), g1.center().hirsch_length() + g2.center().hirsch_length());
        let d = g.derived_subgroup().unwrap().hirsch_length();
        let d1 = g1.derived_subgroup().unwrap().hirsch_length();
        let d2 = g2.derived_subgroup().unwrap().hirsch_length();
        prop_assert_eq!(d, d1 + d2);
        let z = corpus::direct_product(g1.center(), g2.center()).unwrap();
        prop_assert!(g.center().equals(&z).unwrap());
    }

    #[test]
    fn conjugation_preserves_invariants(which in 0usize..5, seed in any::<u64>()) {
        let g = &pool()[which];
        let h = corpus::conjugate_randomly(g, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(h.hirsch_length(), g.hirsch_length());
        prop_assert_eq!(h.center().hirsch_length(), g.center().hirsch_length());
        prop_assert_eq!(
            h.derived_subgroup().unwrap().hirsch_length(),
            g.derived_subgroup().unwrap().hirsch_length()
        );
        let (ah, ag) = (h.abelianization(), g.abelianization());
        prop_assert_eq!(ah.free_rank, ag.free_rank);
        prop_assert_eq!(ah.torsion, ag.torsion);
    }

    #[test]
    fn abelian_images_are_additive(which in 0usize..5, a in letters(), b in letters(), e in -4i64..=4) {
        let g = &pool()[which];
        let (x, y) = (word(g, &a), word(g, &b));
        let img = |m: &UniMat| g.free_abelian_image(m).unwrap().unwrap();
        let sum: Vec<BigInt> = img(&x).iter().zip(img(&y)).map(|(u, v)| u + v).collect();
        prop_assert_eq!(img(&x.mul(&y)), sum);
        let scaled: Vec<BigInt> = img(&x).iter().map(|c| c * e).collect();
        prop_assert_eq!(img(&x.pow(e)), scaled);
    }
}
