//! Detecting and splitting off infinite cyclic direct factors.
//!
//! `G` has such a factor iff some central element maps to a primitive vector
//! of the free abelian quotient `W = G/T`, where `T` is the preimage of the
//! torsion of `G/[G,G]`. The test is whether the first Smith invariant of the
//! matrix of central images is 1.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{violation, Result};
use crate::exactmat::UniMat;
use crate::tgroup::TGroup;
use crate::zlattice::{snf, IntMat, IntSer, IntVec};

/// A central element `c` with a retraction `θ: W → Z` satisfying `θ(c) = 1`.
#[derive(Clone, Debug)]
pub struct PrimitiveCentral {
    pub element: UniMat,
    /// Row vector applied to coordinates in `W`.
    pub retraction: IntVec,
}

/// Smith invariants of the central image in `W`.
pub fn central_image_invariants(g: &TGroup) -> Vec<BigInt> {
    central_image(g).map(|(m, _)| snf(&m).invariants).unwrap_or_default()
}

fn central_image(g: &TGroup) -> Option<(IntMat, Vec<UniMat>)> {
    let n = g.free_abelian_rank();
    let zb = g.center().malcev().elements();
    if n == 0 || zb.is_empty() {
        return None;
    }
    let cols: Vec<IntVec> = zb
        .iter()
        .map(|z| g.free_abelian_image(z).expect("same size").expect("central elements are members"))
        .collect();
    Some((IntMat::from_columns(n, &cols), zb))
}

pub fn find_primitive_central(g: &TGroup) -> Option<PrimitiveCentral> {
    let (m, zb) = central_image(g)?;
    let res = snf(&m);
    if !res.invariants.first().is_some_and(One::is_one) {
        return None;
    }
    // M Q = P^{-1} S, so the first column of Q combines central elements into
    // one whose image is the first column of P^{-1}
    let mut c = UniMat::identity(g.ambient_size());
    for (j, z) in zb.iter().enumerate() {
        let e = res.q.get(j, 0);
        if !e.is_zero() {
            c = c.mul(&z.pow_big(e));
        }
    }
    Some(PrimitiveCentral { element: c, retraction: res.p.rows()[0].clone() })
}

fn apply(theta: &[BigInt], w: &[BigInt]) -> BigInt {
    theta.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// `G ≅ G_1 × Z^r`, built one cyclic factor at a time.
#[derive(Clone, Debug)]
pub struct AbelianSplit {
    pub complement: TGroup,
    pub rank: usize,
    pub cyclic: Vec<UniMat>,
    pub retractions: Vec<IntVec>,
    /// The group each retraction is defined on.
    stages: Vec<TGroup>,
}

impl AbelianSplit {
    /// Writes `x = c_1^{e_1} ··· c_r^{e_r} · y` with `y` in the complement.
    pub fn factor(&self, x: &UniMat) -> Result<Option<(Vec<BigInt>, UniMat)>> {
        let mut y = x.clone();
        let mut exps = Vec::with_capacity(self.rank);
        for ((stage, theta), c) in self.stages.iter().zip(&self.retractions).zip(&self.cyclic) {
            let Some(w) = stage.free_abelian_image(&y)? else {
                return Ok(None);
            };
            let e = apply(theta, &w);
            y = y.mul(&c.pow_big(&-&e));
            exps.push(e);
        }
        Ok(self.complement.contains_element(&y)?.then_some((exps, y)))
    }

    pub fn record(&self) -> AbelianRecord {
        AbelianRecord {
            rank: self.rank,
            cyclic: self.cyclic.clone(),
            retractions: self.retractions.iter().map(|r| r.iter().cloned().map(IntSer).collect()).collect(),
        }
    }
}

/// Serializable part of an [`AbelianSplit`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AbelianRecord {
    pub rank: usize,
    pub cyclic: Vec<UniMat>,
    pub retractions: Vec<Vec<IntSer>>,
}

pub fn strip_abelian(g: &TGroup) -> Result<AbelianSplit> {
    let mut cur = g.clone();
    let mut cyclic = Vec::new();
    let mut retractions = Vec::new();
    let mut stages = Vec::new();
    let bound = g.free_abelian_rank();
    while let Some(pc) = find_primitive_central(&cur) {
        if cyclic.len() == bound {
            return Err(violation("more cyclic factors than the free rank of the abelianization"));
        }
        let c = &pc.element;
        let mut kernel = Vec::new();
        for x in cur.malcev().elements() {
            let w = cur.free_abelian_image(&x)?.expect("basis elements are members");
            let e = apply(&pc.retraction, &w);
            kernel.push(x.mul(&c.pow_big(&-e)));
        }
        let next = TGroup::new(g.ambient_size(), kernel)?.reduced();
        if next.hirsch_length() + 1 != cur.hirsch_length() {
            return Err(violation("retraction kernel has the wrong Hirsch length"));
        }
        stages.push(cur);
        cyclic.push(pc.element);
        retractions.push(pc.retraction);
        cur = next;
    }
    Ok(AbelianSplit { complement: cur, rank: cyclic.len(), cyclic, retractions, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn free_abelian_strips_completely() {
        let g = corpus::free_abelian(3).unwrap();
        let s = strip_abelian(&g).unwrap();
        assert_eq!(s.rank, 3);
        assert_eq!(s.complement.hirsch_length(), 0);
    }

    #[test]
    fn infinite_cyclic_is_its_own_factor() {
        let g = corpus::free_abelian(1).unwrap();
        let pc = find_primitive_central(&g).unwrap();
        assert!(pc.element == g.generators()[0] || pc.element == g.generators()[0].inverse());
    }

    #[test]
    fn heisenberg_times_z() {
        let g = corpus::direct_product(&corpus::heisenberg(), &corpus::free_abelian(1).unwrap()).unwrap();
        let s = strip_abelian(&g).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.complement.hirsch_length(), 3);
        assert!(!s.complement.is_abelian());
        for x in g.generators() {
            let (exps, y) = s.factor(x).unwrap().unwrap();
            assert_eq!(s.cyclic[0].pow_big(&exps[0]).mul(&y), *x);
        }
    }

    #[test]
    fn heisenberg_has_no_cyclic_factor() {
        assert!(find_primitive_central(&corpus::heisenberg()).is_none());
    }
}
