//! End-to-end acceptance checks. Runs as a plain binary so each criterion
//! prints exactly one PASS/FAIL line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nildecomp::abelian_factor::{central_image_invariants, find_primitive_central, strip_abelian};
use nildecomp::corpus::{self, CorpusSpec, Family};
use nildecomp::direct_decomp::{
    build_h, decompose, gives_rise, nonabelian_bipartitions, rational_summands, try_match, verify, MatchOutcome,
    NodeKind, TrialOutcome,
};
use nildecomp::exactmat::{mat_exp, mat_log, mat_root};
use nildecomp::linalg::Span;
use nildecomp::zlattice::{hnf, snf, split_containing, IntVec};
use nildecomp::{IntMat, Lattice, RatMat, Rational, TGroup, UniMat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn group(r: usize, gens: Vec<UniMat>) -> TGroup {
    TGroup::new(r, gens).unwrap()
}

fn criterion_1() {
    let g = corpus::gp(2).unwrap();
    assert!(find_primitive_central(&g).is_none());
    assert_eq!(central_image_invariants(&g).first(), Some(&BigInt::from(2)));
    let cert = decompose(&g).unwrap();
    let leaves = cert.leaves();
    assert_eq!(leaves.len(), 1);
    assert_eq!(leaves[0].kind, NodeKind::Indecomposable);
    assert_eq!(cert.abelian_rank(), 0);
}

fn criterion_2() {
    let f = rational_summands(&corpus::gp(2).unwrap());
    let mut shape: Vec<(usize, bool)> = f.summands.iter().map(|s| s.dim()).zip(f.abelian.iter().copied()).collect();
    shape.sort();
    assert_eq!(shape, vec![(1, true), (4, false)]);
}

fn criterion_3() {
    let d = corpus::make(&CorpusSpec::new(Family::D).with_p(2).with_q(3)).unwrap();
    let split = strip_abelian(&d).unwrap();
    assert_eq!(split.rank, 1);
    let c = &split.cyclic[0];
    assert!(d.center().contains_element(c).unwrap());
    let e = corpus::d_elements(2, 3).unwrap();
    let expected = e.b.inverse().mul(&e.s.pow(2)).mul(&e.s2.pow(-3)).mul(&e.b2);
    assert_eq!(expected, e.f.mul(&e.f2.inverse()));
    let ic = d.free_abelian_image(c).unwrap().unwrap();
    let ie = d.free_abelian_image(&expected).unwrap().unwrap();
    let neg: IntVec = ie.iter().map(|x| -x).collect();
    assert!(ic == ie || ic == neg);
    let cert = decompose(&d).unwrap();
    let leaves = cert.leaves();
    assert_eq!(leaves.len(), 2);
    let mut kinds: Vec<(NodeKind, usize)> = leaves.iter().map(|l| (l.kind, l.hirsch)).collect();
    kinds.sort_by_key(|k| k.1);
    assert_eq!(kinds, vec![(NodeKind::Abelian, 1), (NodeKind::Indecomposable, 9)]);
    assert!(verify(&d, &cert).valid);
}

fn criterion_4() {
    let s = corpus::s_group(2, 3).unwrap();
    let e = corpus::d_elements(2, 3).unwrap();
    assert!(find_primitive_central(&s).is_none());
    let f = rational_summands(&s);
    let bps = nonabelian_bipartitions(&f);
    assert_eq!(bps.len(), 2);
    let logf = mat_log(&e.f).upper_entries();
    for bp in &bps {
        let (x1, x2) = gives_rise(&s, &bp.u1, &bp.u2).unwrap().expect("gives rise");
        let m = try_match(&s, &x1, &x2).unwrap();
        let MatchOutcome::Intersecting { witness } = m.outcome else {
            panic!("center split unexpectedly succeeded or failed differently");
        };
        assert!(!witness.is_identity());
        assert!(m.h1.center().contains_element(&witness).unwrap());
        assert!(m.h2.center().contains_element(&witness).unwrap());
        let lw = mat_log(&witness).upper_entries();
        assert_eq!(Span::new(lw.len(), &[lw, logf.clone()]).dim(), 1);
    }
    let cert = decompose(&s).unwrap();
    assert_eq!(cert.root.kind, NodeKind::Indecomposable);
    assert_eq!(cert.root.trials.len(), 2);
    assert!(cert.root.trials.iter().all(|t| t.outcome == TrialOutcome::CentersIntersect));
    assert_eq!(cert.abelian_rank(), 0);
}

fn criterion_5() {
    for p in [2, 3] {
        let g = corpus::gp(p).unwrap();
        let e = corpus::gp_elements(p).unwrap();
        let cp = mat_root(&e.c, p).unwrap();
        assert!(g.center().equals(&group(6, vec![cp.clone(), e.f.clone()])).unwrap());
        assert!(g.derived_subgroup().unwrap().equals(&group(6, vec![e.b.clone(), cp])).unwrap());
        let ab = g.abelianization();
        assert_eq!(ab.free_rank, 3);
        assert!(ab.torsion.is_empty());
    }

    let (p, q) = (2, 3);
    let s = corpus::s_group(p, q).unwrap();
    let e = corpus::d_elements(p, q).unwrap();
    let cp = mat_root(&e.c, p).unwrap();
    let gq = mat_root(&e.c2, q).unwrap();
    let s1 = e.s.clone();
    let s2 = mat_root(&e.b2.mul(&e.f), q).unwrap();
    let x1 = group(12, vec![e.t.clone(), e.a.clone(), s1.clone(), cp.clone(), gq.clone(), e.f.clone()]);
    let x2 = group(12, vec![e.t2.clone(), e.a2.clone(), s2.clone(), cp, gq, e.f.clone()]);
    let h1 = group(12, vec![e.t.clone(), e.a.clone(), s1]);
    let h2 = group(12, vec![e.t2.clone(), e.a2.clone(), s2]);

    let f = rational_summands(&s);
    let bps = nonabelian_bipartitions(&f);
    let mut matched = 0;
    for bp in &bps {
        let (gx1, gx2) = gives_rise(&s, &bp.u1, &bp.u2).unwrap().expect("gives rise");
        let (gx1, gx2) = if gx1.contains_element(&e.t).unwrap() { (gx1, gx2) } else { (gx2, gx1) };
        assert!(gx1.equals(&x1).unwrap());
        assert!(gx2.equals(&x2).unwrap());
        let gh1 = build_h(&s, &gx1).unwrap();
        let gh2 = build_h(&s, &gx2).unwrap();
        assert!(gh1.equals(&h1).unwrap());
        assert!(gh2.equals(&h2).unwrap());
        assert!(h1.center().contains_element(&e.f).unwrap());
        assert!(h2.center().contains_element(&e.f).unwrap());
        matched += 1;
    }
    assert_eq!(matched, 2);
}

fn rand_q(rng: &mut ChaCha8Rng, h: i64) -> Rational {
    Rational::new(rng.gen_range(-h..=h), rng.gen_range(1..=h))
}

fn rand_unimat(rng: &mut ChaCha8Rng, n: usize, h: i64) -> UniMat {
    let mut m = RatMat::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            m.set(i, j, rand_q(rng, h));
        }
    }
    UniMat::new(m).unwrap()
}

fn criterion_6() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let x = rand_unimat(&mut rng, n, 10);
        let y = rand_unimat(&mut rng, n, 10);
        assert_eq!(mat_exp(&mat_log(&x)), x);
        let u = mat_log(&y);
        assert_eq!(mat_log(&mat_exp(&u)), u);
        let k = rng.gen_range(-4..=4i64);
        assert_eq!(mat_log(&x.pow(k)), mat_log(&x).scale(&Rational::from_int(k)));
        let m = rng.gen_range(1..=5i64);
        assert_eq!(mat_root(&x, m).unwrap().pow(m), x);
        let lx = mat_log(&x);
        let ly = mat_log(&y);
        let logs_commute = lx.mul(&ly) == ly.mul(&lx);
        assert_eq!(x.mul(&y) == y.mul(&x), logs_commute);
        let z = x.pow(k).mul(&mat_root(&x, m).unwrap());
        assert!(x.mul(&z) == z.mul(&x));
        let lz = mat_log(&z);
        assert_eq!(lx.mul(&lz), lz.mul(&lx));
    }
    let specs = [
        CorpusSpec::new(Family::Heisenberg),
        CorpusSpec::new(Family::FreeAbelian).with_n(3),
        CorpusSpec::new(Family::B),
        CorpusSpec::new(Family::K),
        CorpusSpec::new(Family::Gp).with_p(2),
        CorpusSpec::new(Family::Gp).with_p(3),
        CorpusSpec::new(Family::D).with_p(2).with_q(3),
        CorpusSpec::new(Family::S).with_p(2).with_q(3),
        CorpusSpec::new(Family::Product).with_n(2),
    ];
    for spec in specs {
        let g = corpus::make(&spec).unwrap();
        let zl = g.lie().center();
        let viar = g.intersect_rational(&zl).unwrap();
        assert!(g.center().equals(&viar).unwrap(), "{spec:?}");
        let logs: Vec<_> = g.center().generators().iter().map(|z| mat_log(z).upper_entries()).collect();
        let n = g.lie().ambient_span().ambient_dim();
        assert_eq!(Span::new(n, &logs), g.lie().to_ambient(&zl), "{spec:?}");
    }
}

fn criterion_7() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool: Vec<(TGroup, Option<usize>)> = vec![
        (corpus::heisenberg(), Some(3)),
        (corpus::make(&CorpusSpec::new(Family::B)).unwrap(), Some(4)),
        (corpus::free_abelian(1).unwrap(), None),
    ];
    let gps = [corpus::gp(2).unwrap(), corpus::gp(3).unwrap()];
    for trial in 0..25 {
        let blocks = rng.gen_range(2..=3);
        let mut parts: Vec<(TGroup, Option<usize>)> = Vec::new();
        // at most one G_p block: two with coprime parameters decompose differently
        if rng.gen_bool(0.4) {
            parts.push((gps[rng.gen_range(0..2)].clone(), Some(5)));
        }
        while parts.len() < blocks {
            parts.push(pool[rng.gen_range(0..pool.len())].clone());
        }
        let mut g = parts[0].0.clone();
        for p in &parts[1..] {
            g = corpus::direct_product(&g, &p.0).unwrap();
        }
        if trial % 2 == 1 {
            g = corpus::conjugate_randomly(&g, &mut rng).unwrap();
        }
        let mut expected: Vec<usize> = parts.iter().filter_map(|p| p.1).collect();
        expected.sort();
        let abelian = parts.iter().filter(|p| p.1.is_none()).count();
        let cert = decompose(&g).unwrap();
        let mut got = cert.nonabelian_hirsch();
        got.sort();
        assert_eq!(got, expected, "trial {trial}");
        assert_eq!(cert.abelian_rank(), abelian, "trial {trial}");
        assert_eq!(cert.leaves().len(), parts.len(), "trial {trial}");
        assert!(verify(&g, &cert).valid, "trial {trial}");
    }
}

fn iv(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Gcd of all `k × k` minors of the rows.
fn minor_gcd(rows: &[IntVec], k: usize) -> BigInt {
    let n = rows.first().map_or(0, Vec::len);
    let mut g = BigInt::zero();
    for rs in subsets(rows.len(), k) {
        for cs in subsets(n, k) {
            let m = IntMat::new(k, rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect()).collect());
            g = g.gcd(&m.det());
        }
    }
    g
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn rank_of(rows: &[IntVec]) -> usize {
    (1..=rows.len()).rev().find(|&k| !minor_gcd(rows, k).is_zero()).unwrap_or(0)
}

/// Basis of `Q v ∩ Z^n` for a single vector.
fn primitive(v: &[BigInt]) -> Vec<IntVec> {
    let g = v.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    if g.is_zero() {
        Vec::new()
    } else {
        vec![v.iter().map(|x| x / &g).collect()]
    }
}

/// A splitting exists iff the pure closures meet trivially and span a pure
/// lattice, read off from ranks and minors.
fn split_oracle(v1: &[IntVec], v2: &[IntVec], closure: impl Fn(&[IntVec]) -> Vec<IntVec>) -> bool {
    let w1 = closure(v1);
    let w2 = closure(v2);
    let both: Vec<IntVec> = w1.iter().chain(&w2).cloned().collect();
    let k = both.len();
    if rank_of(&both) != k {
        return false;
    }
    k == 0 || minor_gcd(&both, k).is_one()
}

fn check_splitting(n: usize, v1: &Lattice, v2: &Lattice, expect: bool) {
    match split_containing(v1, v2) {
        None => assert!(!expect, "{v1:?} {v2:?}"),
        Some(s) => {
            assert!(expect, "{v1:?} {v2:?}");
            assert!(s.z1.contains_lattice(v1) && s.z2.contains_lattice(v2));
            let basis: Vec<IntVec> = s.z1.basis().iter().chain(s.z2.basis()).cloned().collect();
            assert_eq!(basis.len(), n);
            assert!(IntMat::new(n, basis).det().abs().is_one());
        }
    }
}

fn all_vectors(n: usize) -> Vec<IntVec> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-3..=3).map(move |x| [v.clone(), iv(&[x])].concat())).collect();
    }
    out
}

/// Pure closure of a rank-2 lattice in `Z^2`, or of any lattice of rank <= 1.
fn closure_small(v: &[IntVec]) -> Vec<IntVec> {
    let nz: Vec<IntVec> = v.iter().filter(|x| x.iter().any(|c| !c.is_zero())).cloned().collect();
    match rank_of(&nz) {
        0 => Vec::new(),
        1 => primitive(&nz[0]),
        _ => (0..nz[0].len()).map(|i| (0..nz[0].len()).map(|j| BigInt::from((i == j) as i64)).collect()).collect(),
    }
}

fn criterion_8() {
    for n in 1..=3 {
        let vs = all_vectors(n);
        for a in &vs {
            for b in &vs {
                let expect = split_oracle(std::slice::from_ref(a), std::slice::from_ref(b), closure_small);
                check_splitting(n, &Lattice::new(n, std::slice::from_ref(a)), &Lattice::new(n, std::slice::from_ref(b)), expect);
            }
        }
    }
    let vs = all_vectors(2);
    for a in &vs {
        for a2 in &vs {
            for b in &vs {
                let v1 = [a.clone(), a2.clone()];
                let expect = split_oracle(&v1, std::slice::from_ref(b), closure_small);
                check_splitting(2, &Lattice::new(2, &v1), &Lattice::new(2, std::slice::from_ref(b)), expect);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=4);
        let m = IntMat::new(
            cols,
            (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-9..=9))).collect()).collect(),
        );
        let r = snf(&m);
        assert!(r.p.is_unimodular() && r.q.is_unimodular());
        assert_eq!(r.p.mul(&m).mul(&r.q), r.s);
        assert_eq!(r.p.mul(&r.p_inv), IntMat::identity(rows));
        for i in 0..rows {
            for j in 0..cols {
                let x = r.s.get(i, j);
                if i != j || i >= r.rank() {
                    assert!(x.is_zero());
                } else {
                    assert_eq!(x, &r.invariants[i]);
                }
            }
        }
        assert!(r.invariants.iter().all(|c| c.is_positive()));
        for w in r.invariants.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        // determinantal divisors
        let mut prev = BigInt::one();
        for (k, c) in r.invariants.iter().enumerate() {
            let d = minor_gcd(m.rows(), k + 1);
            assert_eq!(&d / &prev, *c);
            prev = d;
        }
        assert!(minor_gcd(m.rows(), r.rank() + 1).is_zero() || r.rank() == rows.min(cols));

        let (h, u) = hnf(&m);
        assert!(u.is_unimodular());
        assert_eq!(u.mul(&m), h);
        let mut last: Option<usize> = None;
        for (i, row) in h.rows().iter().enumerate() {
            match row.iter().position(|x| !x.is_zero()) {
                None => assert!(h.rows()[i..].iter().all(|r| r.iter().all(Zero::is_zero))),
                Some(p) => {
                    assert!(last.is_none_or(|l| p > l));
                    assert!(row[p].is_positive());
                    for above in &h.rows()[..i] {
                        assert!(!above[p].is_negative() && above[p] < row[p]);
                    }
                    last = Some(p);
                }
            }
        }
    }
}

fn main() {
    let criteria: [(&str, fn()); 8] = [
        ("G_2 is directly indecomposable with no cyclic factor", criterion_1),
        ("rational summands of G_2 have dimensions 4 and 1", criterion_2),
        ("D splits as a cyclic factor times an indecomposable of Hirsch length 9", criterion_3),
        ("S is indecomposable, both bipartitions fail with a witness along f", criterion_4),
        ("centers, derived subgroups and the X/H groups match", criterion_5),
        ("log/exp/root identities and centers of example groups", criterion_6),
        ("random block products decompose back into their blocks", criterion_7),
        ("lattice splitting and Smith/Hermite forms agree with oracles", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {}: {} ({name}) [{secs:.1}s]", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
