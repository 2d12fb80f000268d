//! Direct decompositions into indecomposable factors.
//!
//! After cyclic factors are stripped, every splitting of the rational Lie
//! algebra into two nonabelian parts `U_1 + U_2` (both containing the
//! center) is tested: first whether `X_i = G ∩ exp(U_i)` decompose `G`
//! modulo its center, then whether the centers of the subgroups `H_i` built
//! from the noncentral part of `X_i` can be separated inside `Z(G)`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::abelian_factor::{strip_abelian, AbelianRecord};
use crate::error::{invalid, violation, Error, Result};
use crate::exactmat::{mat_exp, mat_log, NilMat, UniMat};
use crate::liealg::{LieAlg, Subspace};
use crate::linalg::{Frame, Span};
use crate::tgroup::{Filtration, TGroup};
use crate::zlattice::{
    complementary_projection, hnf, split_or_obstruction, IntMat, IntSer, IntVec, Lattice, SearchExhausted,
    SplitObstruction,
};

/// Indecomposable summands of the rational Lie algebra of a group.
#[derive(Clone, Debug)]
pub struct RationalFactorization {
    pub lie: LieAlg,
    pub summands: Vec<Subspace>,
    pub abelian: Vec<bool>,
    /// `exp` of each summand's basis.
    pub generators: Vec<Vec<UniMat>>,
}

pub fn rational_summands(g: &TGroup) -> RationalFactorization {
    let lie = g.lie().clone();
    let dec = lie.indecomposable_summands();
    let generators = dec.summands.iter().map(|s| lie.matrices(s).iter().map(mat_exp).collect()).collect();
    RationalFactorization { summands: dec.summands, abelian: dec.abelian, generators, lie }
}

/// A grouping of the summands into two sides, each containing a nonabelian
/// summand; `u1`, `u2` are the side sums plus the center.
#[derive(Clone, Debug)]
pub struct Bipartition {
    pub side1: Vec<usize>,
    pub side2: Vec<usize>,
    pub u1: Subspace,
    pub u2: Subspace,
}

pub fn nonabelian_bipartitions(f: &RationalFactorization) -> Vec<Bipartition> {
    let m = f.summands.len();
    if !(2..=20).contains(&m) {
        return Vec::new();
    }
    let mut sides: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for mask in 1u32..(1 << m) - 1 {
        let a: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let b: Vec<usize> = (0..m).filter(|i| mask & (1 << i) == 0).collect();
        if (a.len(), &a) > (b.len(), &b) {
            continue;
        }
        if a.iter().all(|&i| f.abelian[i]) || b.iter().all(|&i| f.abelian[i]) {
            continue;
        }
        sides.push((a, b));
    }
    sides.sort_by(|x, y| (x.0.len(), &x.0).cmp(&(y.0.len(), &y.0)));
    let z = f.lie.center();
    let side_sum = |idx: &[usize]| {
        idx.iter().fold(z.clone(), |acc, &i| acc.sum(&f.summands[i]).expect("same owner"))
    };
    sides
        .into_iter()
        .map(|(a, b)| {
            let u1 = side_sum(&a);
            let u2 = side_sum(&b);
            Bipartition { side1: a, side2: b, u1, u2 }
        })
        .collect()
}

/// Which of the conditions for `X_1, X_2` to decompose `G/Z(G)` failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiseFailure {
    NotCommuting,
    NotGenerating,
    CenterMismatch,
}

pub fn gives_rise(g: &TGroup, u1: &Subspace, u2: &Subspace) -> Result<std::result::Result<(TGroup, TGroup), RiseFailure>> {
    let lie = g.lie();
    let both = u1.sum(u2)?;
    let common = u1.intersect(u2)?;
    if both.dim() != lie.dim() || common.span() != lie.center().span() {
        return Err(invalid("subspaces must sum to the algebra and meet in its center"));
    }
    let x1 = g.intersect_rational(u1)?;
    let x2 = g.intersect_rational(u2)?;
    if !x1.commutes_with(&x2)? {
        return Ok(Err(RiseFailure::NotCommuting));
    }
    if !x1.join(&x2)?.contains(g)? {
        return Ok(Err(RiseFailure::NotGenerating));
    }
    if !g.intersect_rational(&common)?.equals(g.center())? {
        return Ok(Err(RiseFailure::CenterMismatch));
    }
    Ok(Ok((x1, x2)))
}

/// Multiplies `a` by central elements so that the central part of its
/// logarithm has coordinates in `[0, 1)` over the center's basis.
fn central_reduce(g: &TGroup, a: &UniMat) -> UniMat {
    let zb = g.center().malcev().elements();
    if zb.is_empty() {
        return a.clone();
    }
    let zl = g.lie().to_ambient(&g.lie().center());
    let v = mat_log(a).upper_entries();
    let res = zl.residual(&v);
    let comp: Vec<_> = v.iter().zip(&res).map(|(x, y)| x - y).collect();
    let logs: Vec<_> = zb.iter().map(|z| mat_log(z).upper_entries()).collect();
    let frame = Frame::new(v.len(), logs).expect("center basis is independent");
    let lambda = frame.coords(&comp).expect("central part lies in the center");
    let mut out = a.clone();
    for (z, l) in zb.iter().zip(lambda) {
        let e = l.floor();
        if !e.is_zero() {
            out = out.mul(&z.pow_big(&-e));
        }
    }
    out
}

/// The subgroup generated by the part of a Mal'cev basis of `X` that lies
/// above `Z(G)`.
pub fn build_h(g: &TGroup, x: &TGroup) -> Result<TGroup> {
    if !x.contains(g.center())? || !g.contains(x)? {
        return Err(invalid("expected Z(G) ⊆ X ⊆ G"));
    }
    let lx = x.lie();
    let zspan = g.lie().to_ambient(&g.lie().center()).intersect(lx.ambient_span());
    let zx = lx.subspace_from_ambient(&zspan)?;
    let (f, start) = Filtration::through_ideal(lx, &zx);
    let mb = x.malcev_with(f)?;
    let prefix: Vec<UniMat> =
        mb.elements().into_iter().zip(mb.weights()).filter(|(_, w)| *w < start).map(|(e, _)| e).collect();
    TGroup::new(g.ambient_size(), prefix.iter().map(|a| central_reduce(g, a)).collect())
}

/// Result of trying to turn `X_1, X_2` into a decomposition.
#[derive(Clone, Debug)]
pub struct MatchAttempt {
    pub h1: TGroup,
    pub h2: TGroup,
    pub outcome: MatchOutcome,
    /// The center test failed and the retraction search gave up.
    pub undecided: bool,
}

#[derive(Clone, Debug)]
pub enum MatchOutcome {
    /// `by_retraction` marks splittings the centers of `H_i` did not reveal.
    Split { g1: TGroup, g2: TGroup, z1: Vec<UniMat>, z2: Vec<UniMat>, by_retraction: bool },
    /// A nontrivial element of `Z(H_1) ∩ Z(H_2)`.
    Intersecting { witness: UniMat },
    NotPure { invariants: Vec<BigInt> },
    /// Some `Z(H_i)` is not contained in `Z(G)`.
    NotCentral,
}

fn lattice_of(zg: &TGroup, elems: &[UniMat]) -> Result<Option<Lattice>> {
    let k = zg.hirsch_length();
    let mut rows: Vec<IntVec> = Vec::new();
    for e in elems {
        match zg.abelian_coords(e)? {
            Some(c) => rows.push(c),
            None => return Ok(None),
        }
    }
    Ok(Some(Lattice::new(k, &rows)))
}

pub fn try_match(g: &TGroup, x1: &TGroup, x2: &TGroup) -> Result<MatchAttempt> {
    let h1 = build_h(g, x1)?;
    let h2 = build_h(g, x2)?;
    let zg = g.center();
    let zb = zg.malcev().elements();
    let c1 = h1.center().malcev().elements();
    let c2 = h2.center().malcev().elements();
    let lift = |v: &[BigInt]| zg.element(v);
    let outcome = match (lattice_of(zg, &c1)?, lattice_of(zg, &c2)?) {
        (Some(v1), Some(v2)) => match split_or_obstruction(&v1, &v2) {
            Err(SplitObstruction::Intersecting { witness }) => MatchOutcome::Intersecting { witness: lift(&witness) },
            Err(SplitObstruction::NotPure { invariants }) => MatchOutcome::NotPure { invariants },
            Ok(s) => {
                let z1: Vec<UniMat> = s.z1.basis().iter().map(|v| lift(v)).collect();
                let z2: Vec<UniMat> = s.z2.basis().iter().map(|v| lift(v)).collect();
                let r = g.ambient_size();
                let g1 = h1.join(&TGroup::new(r, z1.clone())?)?.reduced();
                let g2 = h2.join(&TGroup::new(r, z2.clone())?)?.reduced();
                debug_assert_eq!(zb.len(), s.z1.rank() + s.z2.rank());
                return Ok(MatchAttempt { h1, h2, outcome: MatchOutcome::Split { g1, g2, z1, z2, by_retraction: false }, undecided: false });
            }
        },
        _ => MatchOutcome::NotCentral,
    };
    // the centers of H_i depend on the chosen generators, so a failure here
    // is only conclusive once the retraction search agrees
    match retraction_match(g, x1, x2)? {
        Ok(Some((g1, g2, z1, z2))) => {
            log::info!("center test failed ({outcome:?}) but the retraction search found a splitting");
            Ok(MatchAttempt { h1, h2, outcome: MatchOutcome::Split { g1, g2, z1, z2, by_retraction: true }, undecided: false })
        }
        Ok(None) => Ok(MatchAttempt { h1, h2, outcome, undecided: false }),
        Err(SearchExhausted) => {
            log::warn!("retraction search exceeded its budget; treating the bipartition as unmatched");
            Ok(MatchAttempt { h1, h2, outcome, undecided: true })
        }
    }
}

/// Images of the center's basis in the free abelian quotient of `x`, one
/// column per central element.
fn central_images(x: &TGroup, zb: &[UniMat]) -> Result<IntMat> {
    let n = x.free_abelian_rank();
    let mut cols = Vec::with_capacity(zb.len());
    for z in zb {
        cols.push(x.free_abelian_image(z)?.ok_or_else(|| violation("central element outside X"))?);
    }
    Ok(IntMat::from_columns(n, &cols))
}

/// `Z(G) = Z_1 ⊕ Z_2` is realized by factors inside `X_1, X_2` iff the
/// projection onto `Z_2` extends to a homomorphism `X_1 → Z_2`, and the one
/// onto `Z_1` to `X_2 → Z_1`. Both extensions factor through the free
/// abelian quotients, so this is a question about two row lattices. The
/// factors are the kernels of the extensions.
#[allow(clippy::type_complexity)]
fn retraction_match(
    g: &TGroup,
    x1: &TGroup,
    x2: &TGroup,
) -> Result<std::result::Result<Option<(TGroup, TGroup, Vec<UniMat>, Vec<UniMat>)>, SearchExhausted>> {
    let zg = g.center();
    let zb = zg.malcev().elements();
    let k = zb.len();
    let m1 = central_images(x1, &zb)?;
    let m2 = central_images(x2, &zb)?;
    let l1 = Lattice::new(k, m1.rows());
    let l2 = Lattice::new(k, m2.rows());
    let e = match complementary_projection(&l1, &l2) {
        Err(x) => return Ok(Err(x)),
        Ok(None) => return Ok(Ok(None)),
        Ok(Some(e)) => e,
    };
    let co = IntMat::identity(k).sub(&e);
    let g1 = retraction_kernel(x1, zg, &m1, &e)?;
    let g2 = retraction_kernel(x2, zg, &m2, &co)?;
    let image = |p: &IntMat| -> Vec<UniMat> {
        Lattice::new(k, p.transpose().rows()).basis().iter().map(|v| zg.element(v)).collect()
    };
    Ok(Ok(Some((g1, g2, image(&co), image(&e)))))
}

/// Kernel of `x ↦ P·φ(x)` read in `Z(G)`, where `φ` is the free abelian
/// quotient map of `X` and `P = Φ M` for the central image matrix `M`.
fn retraction_kernel(x: &TGroup, zg: &TGroup, m: &IntMat, p: &IntMat) -> Result<TGroup> {
    let k = p.nrows();
    let (_, u) = hnf(m);
    let lattice = Lattice::new(k, m.rows());
    let rank = lattice.rank();
    let mut phi = Vec::with_capacity(k);
    for row in p.rows() {
        let c = lattice.coords(row).ok_or_else(|| violation("projection row outside the image lattice"))?;
        let mut out = vec![BigInt::zero(); m.nrows()];
        for (ci, ur) in c.iter().zip(&u.rows()[..rank]) {
            for (o, a) in out.iter_mut().zip(ur) {
                *o += ci * a;
            }
        }
        phi.push(out);
    }
    let mut gens = Vec::new();
    for y in x.malcev().elements() {
        let w = x.free_abelian_image(&y)?.ok_or_else(|| violation("basis element outside X"))?;
        let coords: IntVec = phi.iter().map(|r| r.iter().zip(&w).map(|(a, b)| a * b).sum()).collect();
        gens.push(y.mul(&zg.element(&coords).inverse()));
    }
    Ok(TGroup::new(x.ambient_size(), gens)?.reduced())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialOutcome {
    NotCommuting,
    NotGenerating,
    CenterMismatch,
    CenterNotCentral,
    CentersIntersect,
    CentersNotPure,
    Matched,
    /// Split found by the retraction search after the center test failed.
    MatchedByRetraction,
    /// The center test failed and the retraction search gave up.
    Undecided,
}

/// One bipartition tried during the search, with the groups it produced.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Trial {
    pub side1: Vec<usize>,
    pub side2: Vec<usize>,
    pub u1: Vec<NilMat>,
    pub u2: Vec<NilMat>,
    pub outcome: TrialOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<Vec<UniMat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2: Option<Vec<UniMat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1: Option<Vec<UniMat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<Vec<UniMat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z1: Option<Vec<UniMat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z2: Option<Vec<UniMat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<UniMat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<Vec<IntSer>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Product,
    Abelian,
    Indecomposable,
    Trivial,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertNode {
    pub kind: NodeKind,
    pub hirsch: usize,
    pub generators: Vec<UniMat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian_split: Option<AbelianRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trials: Vec<Trial>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CertNode>,
}

impl CertNode {
    fn leaf(kind: NodeKind, g: &TGroup) -> CertNode {
        CertNode {
            kind,
            hirsch: g.hirsch_length(),
            generators: g.generators().to_vec(),
            abelian_split: None,
            trials: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn leaves(&self) -> Vec<&CertNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(|c| c.leaves()).collect()
        }
    }

    /// All trials recorded in this subtree, in preorder.
    pub fn all_trials(&self) -> Vec<&Trial> {
        let mut out: Vec<&Trial> = self.trials.iter().collect();
        for c in &self.children {
            out.extend(c.all_trials());
        }
        out
    }
}

/// A decomposition tree whose leaves are the factors.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DecompCertificate {
    pub ambient: usize,
    pub root: CertNode,
}

impl DecompCertificate {
    pub fn leaves(&self) -> Vec<&CertNode> {
        self.root.leaves()
    }

    pub fn abelian_rank(&self) -> usize {
        self.leaves().iter().filter(|l| l.kind == NodeKind::Abelian).map(|l| l.hirsch).sum()
    }

    pub fn nonabelian_hirsch(&self) -> Vec<usize> {
        self.leaves().iter().filter(|l| l.kind == NodeKind::Indecomposable).map(|l| l.hirsch).collect()
    }

    pub fn is_indecomposable(&self) -> bool {
        matches!(self.root.kind, NodeKind::Indecomposable | NodeKind::Abelian)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<DecompCertificate> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Trials run so far, and the two factors when one matched.
pub type SplitSearch = (Vec<Trial>, Option<(TGroup, TGroup)>);

/// Runs every bipartition in order and stops at the first match.
pub fn search_split(g: &TGroup) -> Result<SplitSearch> {
    let fac = rational_summands(g);
    let mut trials = Vec::new();
    for bp in nonabelian_bipartitions(&fac) {
        let mut trial = Trial {
            side1: bp.side1.clone(),
            side2: bp.side2.clone(),
            u1: fac.lie.matrices(&bp.u1),
            u2: fac.lie.matrices(&bp.u2),
            outcome: TrialOutcome::Matched,
            x1: None,
            x2: None,
            h1: None,
            h2: None,
            z1: None,
            z2: None,
            witness: None,
            invariants: None,
        };
        let (x1, x2) = match gives_rise(g, &bp.u1, &bp.u2)? {
            Err(f) => {
                trial.outcome = match f {
                    RiseFailure::NotCommuting => TrialOutcome::NotCommuting,
                    RiseFailure::NotGenerating => TrialOutcome::NotGenerating,
                    RiseFailure::CenterMismatch => TrialOutcome::CenterMismatch,
                };
                log::debug!("bipartition {:?} | {:?}: {:?}", bp.side1, bp.side2, trial.outcome);
                trials.push(trial);
                continue;
            }
            Ok(pair) => pair,
        };
        trial.x1 = Some(x1.generators().to_vec());
        trial.x2 = Some(x2.generators().to_vec());
        let m = try_match(g, &x1, &x2)?;
        trial.h1 = Some(m.h1.generators().to_vec());
        trial.h2 = Some(m.h2.generators().to_vec());
        let found = match m.outcome {
            MatchOutcome::Split { g1, g2, z1, z2, by_retraction } => {
                if by_retraction {
                    trial.outcome = TrialOutcome::MatchedByRetraction;
                }
                trial.z1 = Some(z1);
                trial.z2 = Some(z2);
                Some((g1, g2))
            }
            MatchOutcome::Intersecting { witness } => {
                trial.outcome = TrialOutcome::CentersIntersect;
                trial.witness = Some(witness);
                None
            }
            MatchOutcome::NotPure { invariants } => {
                trial.outcome = TrialOutcome::CentersNotPure;
                trial.invariants = Some(invariants.into_iter().map(IntSer).collect());
                None
            }
            MatchOutcome::NotCentral => {
                trial.outcome = TrialOutcome::CenterNotCentral;
                None
            }
        };
        if m.undecided && found.is_none() {
            trial.outcome = TrialOutcome::Undecided;
        }
        log::debug!("bipartition {:?} | {:?}: {:?}", bp.side1, bp.side2, trial.outcome);
        trials.push(trial);
        if found.is_some() {
            return Ok((trials, found));
        }
    }
    Ok((trials, None))
}

fn decompose_node(g: &TGroup, nested: bool) -> Result<CertNode> {
    if g.hirsch_length() == 0 {
        return Ok(CertNode::leaf(NodeKind::Trivial, g));
    }
    let split = strip_abelian(g)?;
    if split.rank > 0 {
        if nested {
            return Err(violation("a factor of a group without cyclic factors has a cyclic factor"));
        }
        let r = g.ambient_size();
        let mut children: Vec<CertNode> = split
            .cyclic
            .iter()
            .map(|c| TGroup::new(r, vec![c.clone()]).map(|z| CertNode::leaf(NodeKind::Abelian, &z)))
            .collect::<Result<_>>()?;
        if split.complement.hirsch_length() > 0 {
            children.push(decompose_nonabelian(&split.complement)?);
        }
        if children.len() == 1 {
            return Ok(children.pop().expect("one child"));
        }
        let mut node = CertNode::leaf(NodeKind::Product, g);
        node.abelian_split = Some(split.record());
        node.children = children;
        return Ok(node);
    }
    decompose_nonabelian(g)
}

fn decompose_nonabelian(g: &TGroup) -> Result<CertNode> {
    let (trials, found) = search_split(g)?;
    let mut node = match found {
        None => CertNode::leaf(NodeKind::Indecomposable, g),
        Some((g1, g2)) => {
            let mut node = CertNode::leaf(NodeKind::Product, g);
            node.children = vec![decompose_node(&g1, true)?, decompose_node(&g2, true)?];
            node
        }
    };
    node.trials = trials;
    Ok(node)
}

/// Decomposes `G` into cyclic and directly indecomposable nonabelian
/// factors, and checks the result before returning it.
pub fn decompose(g: &TGroup) -> Result<DecompCertificate> {
    let cert = DecompCertificate { ambient: g.ambient_size(), root: decompose_node(g, false)? };
    let v = verify(g, &cert);
    if !v.valid {
        return Err(Error::InvariantViolation(format!("certificate rejected: {}", v.transcript.join("; "))));
    }
    Ok(cert)
}

#[derive(Clone, Debug)]
pub struct Verification {
    pub valid: bool,
    pub transcript: Vec<String>,
}

struct Checker {
    transcript: Vec<String>,
    valid: bool,
}

impl Checker {
    fn check(&mut self, ok: bool, msg: impl Into<String>) -> bool {
        let msg = msg.into();
        if ok {
            self.transcript.push(format!("ok: {msg}"));
        } else {
            self.transcript.push(format!("FAILED: {msg}"));
            self.valid = false;
        }
        ok
    }

    fn node(&mut self, r: usize, node: &CertNode, path: &str, root: bool) -> Result<()> {
        let g = TGroup::new(r, node.generators.clone())?;
        self.check(g.hirsch_length() == node.hirsch, format!("{path}: Hirsch length {}", node.hirsch));
        match node.kind {
            NodeKind::Trivial => {
                self.check(root && node.hirsch == 0, format!("{path}: trivial group only at the root"));
            }
            NodeKind::Abelian => {
                self.check(node.children.is_empty(), format!("{path}: abelian leaf has no children"));
                self.check(g.is_abelian() && node.hirsch > 0, format!("{path}: abelian leaf is nontrivial abelian"));
            }
            NodeKind::Indecomposable => {
                self.check(node.children.is_empty(), format!("{path}: indecomposable leaf has no children"));
                if !self.check(!g.is_abelian(), format!("{path}: indecomposable leaf is nonabelian")) {
                    return Ok(());
                }
                let fresh = TGroup::new(r, node.generators.clone())?;
                self.check(strip_abelian(&fresh)?.rank == 0, format!("{path}: no cyclic direct factor"));
                let (_, found) = search_split(&fresh)?;
                self.check(found.is_none(), format!("{path}: no bipartition yields a splitting"));
            }
            NodeKind::Product => {
                let kids: Vec<TGroup> =
                    node.children.iter().map(|c| TGroup::new(r, c.generators.clone())).collect::<Result<_>>()?;
                if !self.check(kids.len() >= 2, format!("{path}: product has at least two factors")) {
                    return Ok(());
                }
                for i in 0..kids.len() {
                    for j in i + 1..kids.len() {
                        self.check(kids[i].commutes_with(&kids[j])?, format!("{path}: factors {i} and {j} commute"));
                    }
                }
                let joined = kids.iter().skip(1).try_fold(kids[0].clone(), |acc, k| acc.join(k))?;
                self.check(joined.equals(&g)?, format!("{path}: factors generate the group"));
                let n = g.lie().ambient_span().ambient_dim();
                let dims: usize = kids.iter().map(|k| k.lie().dim()).sum();
                let span = kids.iter().fold(Span::zero(n), |acc, k| acc.sum(k.lie().ambient_span()));
                self.check(
                    dims == g.lie().dim() && span.dim() == dims,
                    format!("{path}: Lie algebras of the factors form a direct sum"),
                );
                for (i, c) in node.children.iter().enumerate() {
                    self.node(r, c, &format!("{path}.{i}"), false)?;
                }
            }
        }
        Ok(())
    }
}

/// Independently re-checks a certificate against `G`.
pub fn verify(g: &TGroup, cert: &DecompCertificate) -> Verification {
    let mut c = Checker { transcript: Vec::new(), valid: true };
    if !c.check(cert.ambient == g.ambient_size(), "ambient size matches") {
        return Verification { valid: false, transcript: c.transcript };
    }
    let run = |c: &mut Checker| -> Result<()> {
        let root = TGroup::new(cert.ambient, cert.root.generators.clone())?;
        c.check(root.equals(g)?, "root generates the input group");
        c.node(cert.ambient, &cert.root, "root", true)
    };
    if let Err(e) = run(&mut c) {
        c.check(false, format!("malformed certificate: {e}"));
    }
    Verification { valid: c.valid, transcript: c.transcript }
}
