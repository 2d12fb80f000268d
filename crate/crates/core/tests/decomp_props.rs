use nildecomp::corpus;
use nildecomp::{decompose, verify, DecompCertificate, TGroup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn block(kind: u8) -> TGroup {
    match kind {
        0 => corpus::free_abelian(1).unwrap(),
        1 => corpus::heisenberg(),
        _ => corpus::gp(2).unwrap(),
    }
}

fn product(kinds: &[u8]) -> TGroup {
    kinds[1..].iter().fold(block(kinds[0]), |acc, &k| corpus::direct_product(&acc, &block(k)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn products_decompose_into_their_blocks(kinds in prop::collection::vec(0u8..3, 1..=3), seed in any::<u64>()) {
        let g = corpus::conjugate_randomly(&product(&kinds), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let cert = decompose(&g).unwrap();
        prop_assert!(verify(&g, &cert).valid);

        let total: usize = cert.leaves().iter().map(|l| l.hirsch).sum();
        prop_assert_eq!(total, g.hirsch_length());
        prop_assert_eq!(cert.abelian_rank(), kinds.iter().filter(|&&k| k == 0).count());
        let mut found = cert.nonabelian_hirsch();
        found.sort_unstable();
        let mut expected: Vec<usize> =
            kinds.iter().filter(|&&k| k != 0).map(|&k| block(k).hirsch_length()).collect();
        expected.sort_unstable();
        prop_assert_eq!(found, expected);

        for leaf in cert.leaves() {
            let factor = TGroup::new(g.ambient_size(), leaf.generators.clone()).unwrap();
            prop_assert!(g.contains(&factor).unwrap());
            prop_assert_eq!(factor.hirsch_length(), leaf.hirsch);
        }
    }

    #[test]
    fn certificates_are_deterministic_and_round_trip(kinds in prop::collection::vec(0u8..2, 1..=3)) {
        let g = product(&kinds);
        let json = decompose(&g).unwrap().to_json();
        prop_assert_eq!(decompose(&g).unwrap().to_json(), json.clone());
        let back = DecompCertificate::from_json(&json).unwrap();
        prop_assert_eq!(back.to_json(), json);
        prop_assert!(verify(&g, &back).valid);
    }
}
