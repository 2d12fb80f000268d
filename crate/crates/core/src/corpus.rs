//! Example groups: Heisenberg, free abelian, the class-3 group `B` and the
//! groups built from it (`K`, `G_p`, `D`, `S`), direct products and random
//! integral conjugates.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactmat::{commutator, mat_root, RatMat, UniMat};
use crate::rational::Rational;
use crate::tgroup::TGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Heisenberg,
    FreeAbelian,
    B,
    K,
    Gp,
    D,
    S,
    /// `n` block copies of the Heisenberg group.
    Product,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "heisenberg" => Family::Heisenberg,
            "free_abelian" | "free-abelian" | "z" => Family::FreeAbelian,
            "b" => Family::B,
            "k" => Family::K,
            "gp" => Family::Gp,
            "d" => Family::D,
            "s" => Family::S,
            "product" => Family::Product,
            other => return Err(Error::Parse(format!("unknown family '{other}'"))),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Heisenberg => "heisenberg",
            Family::FreeAbelian => "free_abelian",
            Family::B => "B",
            Family::K => "K",
            Family::Gp => "Gp",
            Family::D => "D",
            Family::S => "S",
            Family::Product => "product",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub family: Family,
    pub n: usize,
    pub p: i64,
    pub q: i64,
}

impl CorpusSpec {
    pub fn new(family: Family) -> CorpusSpec {
        CorpusSpec { family, n: 1, p: 2, q: 3 }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_p(mut self, p: i64) -> Self {
        self.p = p;
        self
    }

    pub fn with_q(mut self, q: i64) -> Self {
        self.q = q;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.family {
            Family::FreeAbelian | Family::Product if self.n == 0 => Err(invalid("n must be at least 1")),
            Family::Gp if self.p < 2 => Err(invalid("p must be at least 2")),
            Family::D | Family::S => {
                if self.p < 2 || self.q < 2 {
                    Err(invalid("p and q must be at least 2"))
                } else if !self.p.gcd(&self.q).eq(&1) {
                    Err(invalid("p and q must be coprime"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

pub fn make(spec: &CorpusSpec) -> Result<TGroup> {
    spec.validate()?;
    match spec.family {
        Family::Heisenberg => Ok(heisenberg()),
        Family::FreeAbelian => free_abelian(spec.n),
        Family::B => {
            let e = b_elements();
            TGroup::new(4, vec![e.t, e.a])
        }
        Family::K => {
            let e = gp_elements(2)?;
            TGroup::new(6, vec![e.t, e.a, e.f])
        }
        Family::Gp => gp(spec.p),
        Family::D => {
            let a = gp(spec.p)?;
            let b = gp(spec.q)?;
            direct_product(&a, &b)
        }
        Family::S => s_group(spec.p, spec.q),
        Family::Product => {
            let h = heisenberg();
            let mut g = h.clone();
            for _ in 1..spec.n {
                g = direct_product(&g, &h)?;
            }
            Ok(g)
        }
    }
}

fn unit(n: usize, i: usize, j: usize) -> UniMat {
    UniMat::new(RatMat::elementary(n, i, j, Rational::one())).expect("unitriangular")
}

pub fn heisenberg() -> TGroup {
    TGroup::new(3, vec![unit(3, 0, 1), unit(3, 1, 2)]).expect("size 3")
}

/// `Z^n` as translations in size `n + 1`.
pub fn free_abelian(n: usize) -> Result<TGroup> {
    TGroup::new(n + 1, (1..=n).map(|i| unit(n + 1, 0, i)).collect())
}

/// Generators of `B` in its affine realization of size 4.
#[derive(Clone, Debug)]
pub struct BElements {
    pub t: UniMat,
    pub a: UniMat,
    pub b: UniMat,
    pub c: UniMat,
}

/// `Z^3 ⋊ Z`: translations `c, b, a` in the last column, and `t` acting
/// on them by conjugation as `a ↦ ab`, `b ↦ bc`, `c ↦ c`.
pub fn b_elements() -> BElements {
    let t = UniMat::from_int_rows(&[&[1, -1, 1, 0], &[0, 1, -1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]])
        .expect("unitriangular");
    BElements { t, a: unit(4, 2, 3), b: unit(4, 1, 3), c: unit(4, 0, 3) }
}

/// Named elements of `G_p` in size 6, with `s^p = b f`.
#[derive(Clone, Debug)]
pub struct GpElements {
    pub t: UniMat,
    pub a: UniMat,
    pub b: UniMat,
    pub c: UniMat,
    pub f: UniMat,
    pub s: UniMat,
}

pub fn gp_elements(p: i64) -> Result<GpElements> {
    let e = b_elements();
    let i2 = UniMat::identity(2);
    let lift = |x: &UniMat| x.direct_sum(&i2);
    let f = UniMat::identity(4).direct_sum(&unit(2, 0, 1));
    let b = lift(&e.b);
    let s = mat_root(&b.mul(&f), p)?;
    Ok(GpElements { t: lift(&e.t), a: lift(&e.a), b, c: lift(&e.c), f, s })
}

pub fn gp(p: i64) -> Result<TGroup> {
    if p < 2 {
        return Err(invalid("p must be at least 2"));
    }
    let e = gp_elements(p)?;
    TGroup::new(6, vec![e.t, e.a, e.f, e.s])
}

/// Named elements of `D = G_p × G_q` in size 12. The second factor's
/// elements carry a `2` suffix.
#[derive(Clone, Debug)]
pub struct DElements {
    pub t: UniMat,
    pub a: UniMat,
    pub b: UniMat,
    pub c: UniMat,
    pub f: UniMat,
    pub s: UniMat,
    pub t2: UniMat,
    pub a2: UniMat,
    pub b2: UniMat,
    pub c2: UniMat,
    pub f2: UniMat,
    pub s2: UniMat,
}

pub fn d_elements(p: i64, q: i64) -> Result<DElements> {
    let x = gp_elements(p)?;
    let y = gp_elements(q)?;
    let i6 = UniMat::identity(6);
    let l = |m: &UniMat| m.direct_sum(&i6);
    let r = |m: &UniMat| i6.direct_sum(m);
    Ok(DElements {
        t: l(&x.t),
        a: l(&x.a),
        b: l(&x.b),
        c: l(&x.c),
        f: l(&x.f),
        s: l(&x.s),
        t2: r(&y.t),
        a2: r(&y.a),
        b2: r(&y.b),
        c2: r(&y.c),
        f2: r(&y.f),
        s2: r(&y.s),
    })
}

/// The seven generators of `S` inside the rational closure of `D`:
/// `t, a, s` from the first factor, `t2, a2` from the second, the shared
/// central `f`, and the `q`-th root of `b2 · f`.
pub fn s_generators(p: i64, q: i64) -> Result<Vec<UniMat>> {
    let e = d_elements(p, q)?;
    let root = mat_root(&e.b2.mul(&e.f), q)?;
    Ok(vec![e.t, e.a, e.s, e.t2, e.a2, e.f, root])
}

pub fn s_group(p: i64, q: i64) -> Result<TGroup> {
    CorpusSpec::new(Family::S).with_p(p).with_q(q).validate()?;
    TGroup::new(12, s_generators(p, q)?)
}

/// Block-diagonal product.
pub fn direct_product(g1: &TGroup, g2: &TGroup) -> Result<TGroup> {
    let (r1, r2) = (g1.ambient_size(), g2.ambient_size());
    let i1 = UniMat::identity(r1);
    let i2 = UniMat::identity(r2);
    let mut gens: Vec<UniMat> = g1.generators().iter().map(|g| g.direct_sum(&i2)).collect();
    gens.extend(g2.generators().iter().map(|g| i1.direct_sum(g)));
    TGroup::new(r1 + r2, gens)
}

/// A random unitriangular integer matrix with off-diagonal entries in `[-bound, bound]`.
pub fn random_unimodular<R: Rng>(r: usize, bound: i64, rng: &mut R) -> UniMat {
    let mut m = RatMat::identity(r);
    for i in 0..r {
        for j in i + 1..r {
            m.set(i, j, Rational::from_int(rng.gen_range(-bound..=bound)));
        }
    }
    UniMat::new(m).expect("unitriangular")
}

/// `P^{-1} G P` for a random unimodular unitriangular `P`.
pub fn conjugate_randomly<R: Rng>(g: &TGroup, rng: &mut R) -> Result<TGroup> {
    let p = random_unimodular(g.ambient_size(), 2, rng);
    TGroup::new(g.ambient_size(), g.generators().iter().map(|x| x.conj(&p)).collect())
}

/// `[t, s^{-1}]`, which is a `p`-th root of `c` in `G_p`.
pub fn gp_root_of_c(e: &GpElements) -> UniMat {
    commutator(&e.t, &e.s.inverse())
}
