use nildecomp::abelian_factor::{central_image_invariants, find_primitive_central, strip_abelian};
use nildecomp::corpus::{self, CorpusSpec, Family};
use nildecomp::exactmat::mat_root;
use nildecomp::{TGroup, UniMat};
use num_bigint::BigInt;

fn group(r: usize, gens: Vec<UniMat>) -> TGroup {
    TGroup::new(r, gens).unwrap()
}

#[test]
fn hirsch_lengths() {
    let cases = [
        (CorpusSpec::new(Family::B), 4),
        (CorpusSpec::new(Family::K), 5),
        (CorpusSpec::new(Family::Gp).with_p(2), 5),
        (CorpusSpec::new(Family::Gp).with_p(5), 5),
        (CorpusSpec::new(Family::D).with_p(2).with_q(3), 10),
        (CorpusSpec::new(Family::S).with_p(2).with_q(3), 9),
        (CorpusSpec::new(Family::Heisenberg), 3),
        (CorpusSpec::new(Family::FreeAbelian).with_n(4), 4),
        (CorpusSpec::new(Family::Product).with_n(2), 6),
    ];
    for (spec, h) in cases {
        assert_eq!(corpus::make(&spec).unwrap().hirsch_length(), h, "{spec:?}");
    }
}

#[test]
fn roots_in_gp() {
    for p in [2, 3, 5] {
        let g = corpus::gp(p).unwrap();
        let e = corpus::gp_elements(p).unwrap();
        assert!(!g.contains_element(&mat_root(&e.b, p).unwrap()).unwrap());
        assert!(!g.contains_element(&mat_root(&e.f, p).unwrap()).unwrap());
        assert!(g.contains_element(&mat_root(&e.c, p).unwrap()).unwrap());
        assert_eq!(corpus::gp_root_of_c(&e), mat_root(&e.c, p).unwrap());
    }
}

#[test]
fn gp_center_derived_and_abelianization() {
    for p in [2, 3] {
        let g = corpus::gp(p).unwrap();
        let e = corpus::gp_elements(p).unwrap();
        let cp = mat_root(&e.c, p).unwrap();
        let z = group(6, vec![cp.clone(), e.f.clone()]);
        assert!(g.center().equals(&z).unwrap());
        let d = group(6, vec![e.b.clone(), cp]);
        assert!(g.derived_subgroup().unwrap().equals(&d).unwrap());
        let ab = g.abelianization();
        assert_eq!(ab.free_rank, 3);
        assert!(ab.torsion.is_empty());
        // t, a, s map to a basis of the abelianization
        let gens = group(6, vec![e.t.clone(), e.a.clone(), e.s.clone()]);
        assert!(gens.join(&g.derived_subgroup().unwrap()).unwrap().equals(&g).unwrap());
    }
}

#[test]
fn gp_has_no_cyclic_factor() {
    let g = corpus::gp(2).unwrap();
    assert!(find_primitive_central(&g).is_none());
    assert_eq!(central_image_invariants(&g), vec![BigInt::from(2)]);
}

#[test]
fn s_subgroup_facts() {
    let (p, q) = (2, 3);
    let s = corpus::s_group(p, q).unwrap();
    let e = corpus::d_elements(p, q).unwrap();
    let cp = mat_root(&e.c, p).unwrap();
    let gq = mat_root(&e.c2, q).unwrap();
    let derived = group(12, vec![e.b.clone(), cp.clone(), e.b2.clone(), gq.clone()]);
    assert!(s.derived_subgroup().unwrap().equals(&derived).unwrap());
    let center = group(12, vec![cp, gq, e.f.clone()]);
    assert!(s.center().equals(&center).unwrap());
    assert!(find_primitive_central(&s).is_none());
}

#[test]
fn d_has_one_cyclic_factor() {
    let d = corpus::make(&CorpusSpec::new(Family::D).with_p(2).with_q(3)).unwrap();
    let split = strip_abelian(&d).unwrap();
    assert_eq!(split.rank, 1);
    assert_eq!(split.complement.hirsch_length(), 9);
    let e = corpus::d_elements(2, 3).unwrap();
    let expected = e.b.inverse().mul(&e.s.pow(2)).mul(&e.s2.pow(-3)).mul(&e.b2);
    let img_c = d.free_abelian_image(&split.cyclic[0]).unwrap().unwrap();
    let img_e = d.free_abelian_image(&expected).unwrap().unwrap();
    let neg: Vec<BigInt> = img_e.iter().map(|x| -x).collect();
    assert!(img_c == img_e || img_c == neg, "{img_c:?} vs {img_e:?}");
    assert!(strip_abelian(&split.complement).unwrap().rank == 0);
}
