//! Finitely generated torsion-free nilpotent groups given by unitriangular
//! rational matrices: Mal'cev bases by sifting along a central series of the
//! Lie algebra, constructive membership, centers, kernels, abelianization and
//! intersections with rational subgroups.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, violation, Error, Result};
use crate::exactmat::{commutator, mat_log, NilMat, RatMat, UniMat};
use crate::liealg::{LieAlg, Subspace};
use crate::linalg::{is_zero_vec, unit_vec, Frame, QVec, Span};
use crate::rational::Rational;
use crate::zlattice::{rational_hnf, snf, IntMat, IntVec};

/// Straight-line programs over a fixed list of generators.
#[derive(Clone, Debug, Default)]
pub struct Slp {
    nodes: Vec<Node>,
}

#[derive(Clone, Debug)]
enum Node {
    Gen(usize),
    Inv(usize),
    Mul(usize, usize),
    Pow(usize, BigInt),
}

impl Slp {
    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    pub fn gen(&mut self, i: usize) -> usize {
        self.push(Node::Gen(i))
    }

    pub fn inv(&mut self, a: usize) -> usize {
        self.push(Node::Inv(a))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Node::Mul(a, b))
    }

    pub fn pow(&mut self, a: usize, e: BigInt) -> usize {
        self.push(Node::Pow(a, e))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Evaluates node `id` with the given generator matrices.
    pub fn eval(&self, id: usize, gens: &[UniMat]) -> UniMat {
        let mut memo: HashMap<usize, UniMat> = HashMap::new();
        self.eval_memo(id, gens, &mut memo)
    }

    fn eval_memo(&self, id: usize, gens: &[UniMat], memo: &mut HashMap<usize, UniMat>) -> UniMat {
        if let Some(m) = memo.get(&id) {
            return m.clone();
        }
        let v = match &self.nodes[id] {
            Node::Gen(i) => gens[*i].clone(),
            Node::Inv(a) => self.eval_memo(*a, gens, memo).inverse(),
            Node::Mul(a, b) => {
                let x = self.eval_memo(*a, gens, memo);
                x.mul(&self.eval_memo(*b, gens, memo))
            }
            Node::Pow(a, e) => self.eval_memo(*a, gens, memo).pow_big(e),
        };
        memo.insert(id, v.clone());
        v
    }
}

/// A chain of subspaces `L = F_0 ⊋ F_1 ⊋ ... ⊋ F_k = 0` with
/// `[L, F_j] ⊆ F_{j+1}`, carried as a basis of `L` in which every `F_j` is
/// spanned by a tail.
#[derive(Clone, Debug)]
pub struct Filtration {
    r: usize,
    frame: Frame,
    breaks: Vec<usize>,
}

impl Filtration {
    /// `chain` runs from the whole algebra down to zero.
    pub fn from_chain(lie: &LieAlg, chain: &[Subspace]) -> Filtration {
        let mut chain: Vec<Span> = chain.iter().map(|s| lie.to_ambient(s)).collect();
        chain.dedup();
        let mut levels: Vec<Vec<QVec>> = Vec::new();
        for w in chain.windows(2) {
            let extra: Vec<QVec> = w[0].basis().iter().map(|v| w[1].residual(v)).collect();
            let extra = Span::new(w[0].ambient_dim(), &extra);
            levels.push(extra.basis().to_vec());
        }
        let mut breaks = vec![0];
        let mut basis = Vec::new();
        for l in levels {
            basis.extend(l);
            breaks.push(basis.len());
        }
        let n = lie.ambient_span().ambient_dim();
        Filtration { r: lie.ambient_size(), frame: Frame::new(n, basis).expect("adapted basis"), breaks }
    }

    pub fn lower_central(lie: &LieAlg) -> Filtration {
        Self::from_chain(lie, &lie.lower_central_series())
    }

    /// A central series passing through the ideal; returns it with the index
    /// of the first level inside the ideal.
    pub fn through_ideal(lie: &LieAlg, ideal: &Subspace) -> (Filtration, usize) {
        let lcs = lie.lower_central_series();
        let mut chain: Vec<Subspace> = lcs.iter().map(|l| l.sum(ideal).expect("same owner")).collect();
        let above: Vec<Span> = {
            let mut spans: Vec<Span> = chain.iter().map(|s| lie.to_ambient(s)).collect();
            spans.dedup();
            spans
        };
        let start = above.len() - 1;
        chain.extend(lcs.iter().skip(1).map(|l| l.intersect(ideal).expect("same owner")));
        let f = Self::from_chain(lie, &chain);
        let start = if ideal.dim() == 0 { f.levels() } else { start };
        (f, start)
    }

    pub fn levels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// Coordinates of `log x` in the adapted basis.
    pub fn coords(&self, x: &UniMat) -> Option<QVec> {
        if x.size() != self.r {
            return None;
        }
        self.frame.coords(&mat_log(x).upper_entries())
    }

    pub fn coords_of_nil(&self, u: &NilMat) -> Option<QVec> {
        self.frame.coords(&u.upper_entries())
    }

    pub fn basis_matrix(&self, k: usize) -> NilMat {
        NilMat::from_upper_entries(self.r, &self.frame.basis()[k])
    }

    fn level_of(&self, v: &[Rational]) -> Option<usize> {
        let first = v.iter().position(|x| !x.is_zero())?;
        Some(self.breaks.iter().rposition(|&b| b <= first).expect("breaks start at 0"))
    }

    fn slice<'a>(&self, v: &'a [Rational], level: usize) -> &'a [Rational] {
        &v[self.breaks[level]..self.breaks[level + 1]]
    }

    fn width(&self, level: usize) -> usize {
        self.breaks[level + 1] - self.breaks[level]
    }
}

#[derive(Clone, Debug, Default)]
struct Level {
    elems: Vec<UniMat>,
    images: Vec<QVec>,
    pivots: Vec<usize>,
    words: Vec<usize>,
    ids: Vec<u64>,
}

impl Level {
    /// Integer coefficients of `img` over the Hermite rows, if it lies in their lattice.
    fn solve(&self, img: &[Rational]) -> Option<Vec<BigInt>> {
        let mut w = img.to_vec();
        let mut out = Vec::with_capacity(self.images.len());
        for (row, &p) in self.images.iter().zip(&self.pivots) {
            let c = &w[p] / &row[p];
            let c = c.to_integer()?;
            if !c.is_zero() {
                let cq = Rational::from_bigint(c.clone());
                for (a, b) in w.iter_mut().zip(row) {
                    if !b.is_zero() {
                        *a -= &(&cq * b);
                    }
                }
            }
            out.push(c);
        }
        is_zero_vec(&w).then_some(out)
    }
}

/// An ordered Mal'cev basis: every element of the group is uniquely
/// `g_1^{x_1} ··· g_n^{x_n}` with integer exponents.
#[derive(Clone, Debug)]
pub struct MalcevBasis {
    filtration: Filtration,
    levels: Vec<Level>,
    slp: Slp,
    next_id: u64,
}

fn product(elems: &[UniMat], exps: &[BigInt], r: usize) -> UniMat {
    let mut acc = UniMat::identity(r);
    for (g, e) in elems.iter().zip(exps) {
        if !e.is_zero() {
            acc = acc.mul(&g.pow_big(e));
        }
    }
    acc
}

impl MalcevBasis {
    /// Builds a Mal'cev basis of `⟨gens⟩` adapted to the filtration, whose
    /// algebra must contain the logarithms of all generators.
    pub fn build(filtration: Filtration, gens: &[UniMat]) -> Result<MalcevBasis> {
        let nlev = filtration.levels();
        let mut mb = MalcevBasis { filtration, levels: vec![Level::default(); nlev], slp: Slp::default(), next_id: 0 };
        let mut pending: Vec<(UniMat, usize)> = Vec::new();
        for (i, g) in gens.iter().enumerate().rev() {
            let w = mb.slp.gen(i);
            pending.push((g.clone(), w));
        }
        let mut checked: HashSet<(u64, u64)> = HashSet::new();
        loop {
            while let Some((g, w)) = pending.pop() {
                mb.sift_insert(g, w, &mut pending)?;
            }
            let all: Vec<(u64, UniMat, usize)> = mb
                .levels
                .iter()
                .flat_map(|l| l.ids.iter().zip(&l.elems).zip(&l.words).map(|((&i, e), &w)| (i, e.clone(), w)))
                .collect();
            for (a, (ia, ga, wa)) in all.iter().enumerate() {
                for (ib, gb, wb) in &all[a + 1..] {
                    if checked.insert((*ia.min(ib), *ia.max(ib))) {
                        let c = commutator(ga, gb);
                        if !c.is_identity() {
                            let w = mb.commutator_word(*wa, *wb);
                            pending.push((c, w));
                        }
                    }
                }
            }
            if pending.is_empty() {
                return Ok(mb);
            }
        }
    }

    fn commutator_word(&mut self, a: usize, b: usize) -> usize {
        let ia = self.slp.inv(a);
        let ib = self.slp.inv(b);
        let x = self.slp.mul(ia, ib);
        let y = self.slp.mul(x, a);
        self.slp.mul(y, b)
    }

    fn product_word(&mut self, words: &[usize], exps: &[BigInt]) -> Option<usize> {
        let mut acc: Option<usize> = None;
        for (&w, e) in words.iter().zip(exps) {
            if e.is_zero() {
                continue;
            }
            let p = if e.is_one() { w } else { self.slp.pow(w, e.clone()) };
            acc = Some(match acc {
                None => p,
                Some(a) => self.slp.mul(a, p),
            });
        }
        acc
    }

    fn coords_or_err(&self, g: &UniMat) -> Result<QVec> {
        self.filtration.coords(g).ok_or_else(|| violation("element outside the filtered algebra"))
    }

    fn sift_insert(&mut self, mut g: UniMat, mut w: usize, pending: &mut Vec<(UniMat, usize)>) -> Result<()> {
        loop {
            if g.is_identity() {
                return Ok(());
            }
            let v = self.coords_or_err(&g)?;
            let k = self.filtration.level_of(&v).ok_or_else(|| violation("nonidentity element with zero logarithm"))?;
            let img = self.filtration.slice(&v, k).to_vec();
            let level = &self.levels[k];
            match level.solve(&img) {
                Some(exps) => {
                    let h = product(&level.elems, &exps, g.size());
                    let words = level.words.clone();
                    g = h.inverse().mul(&g);
                    if let Some(hw) = self.product_word(&words, &exps) {
                        let inv = self.slp.inv(hw);
                        w = self.slp.mul(inv, w);
                    }
                }
                None => {
                    self.insert(k, g, w, img, pending);
                    return Ok(());
                }
            }
        }
    }

    fn insert(&mut self, k: usize, g: UniMat, w: usize, img: QVec, pending: &mut Vec<(UniMat, usize)>) {
        let width = self.filtration.width(k);
        let r = g.size();
        let mut elems = std::mem::take(&mut self.levels[k].elems);
        let mut words = std::mem::take(&mut self.levels[k].words);
        let mut images = std::mem::take(&mut self.levels[k].images);
        elems.push(g);
        words.push(w);
        images.push(img);
        let (h, u) = rational_hnf(&images, width);
        let mut level = Level::default();
        for (row, urow) in h.into_iter().zip(u.rows()) {
            let e = product(&elems, urow, r);
            let ew = self.product_word(&words, urow).unwrap_or_else(|| {
                let g0 = self.slp.gen(0);
                let i0 = self.slp.inv(g0);
                self.slp.mul(g0, i0)
            });
            if is_zero_vec(&row) {
                pending.push((e, ew));
            } else {
                level.pivots.push(row.iter().position(|x| !x.is_zero()).expect("nonzero row"));
                level.images.push(row);
                level.elems.push(e);
                level.words.push(ew);
                level.ids.push(self.next_id);
                self.next_id += 1;
            }
        }
        self.levels[k] = level;
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(|l| l.elems.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elements(&self) -> Vec<UniMat> {
        self.levels.iter().flat_map(|l| l.elems.iter().cloned()).collect()
    }

    /// Filtration level of each element.
    pub fn weights(&self) -> Vec<usize> {
        self.levels.iter().enumerate().flat_map(|(k, l)| std::iter::repeat_n(k, l.elems.len())).collect()
    }

    /// Number of elements in each level.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.elems.len()).collect()
    }

    pub fn words(&self) -> Vec<usize> {
        self.levels.iter().flat_map(|l| l.words.iter().copied()).collect()
    }

    pub fn slp(&self) -> &Slp {
        &self.slp
    }

    /// Elements at filtration levels `>= level`.
    pub fn tail(&self, level: usize) -> Vec<UniMat> {
        self.levels.iter().skip(level).flat_map(|l| l.elems.iter().cloned()).collect()
    }

    /// Exponents of the normal form of `x`, or `None` if `x` is not in the group.
    pub fn coords(&self, x: &UniMat) -> Option<Vec<BigInt>> {
        let mut out: Vec<Vec<BigInt>> = self.levels.iter().map(|l| vec![BigInt::zero(); l.elems.len()]).collect();
        let mut g = x.clone();
        while !g.is_identity() {
            let v = self.filtration.coords(&g)?;
            let k = self.filtration.level_of(&v)?;
            let exps = self.levels[k].solve(self.filtration.slice(&v, k))?;
            let h = product(&self.levels[k].elems, &exps, g.size());
            g = h.inverse().mul(&g);
            for (o, e) in out[k].iter_mut().zip(exps) {
                *o += e;
            }
        }
        Some(out.into_iter().flatten().collect())
    }

    pub fn normal_form(&self, exps: &[BigInt]) -> UniMat {
        product(&self.elements(), exps, self.filtration.r)
    }
}

/// A T-group given by unitriangular generators of a fixed size.
#[derive(Clone, Debug)]
pub struct TGroup {
    r: usize,
    gens: Vec<UniMat>,
    data: OnceLock<Arc<GroupData>>,
    center: OnceLock<Arc<TGroup>>,
}

#[derive(Debug)]
struct GroupData {
    lie: LieAlg,
    malcev: MalcevBasis,
}

/// File form of a group: ambient size and generator matrices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupDoc {
    pub ambient: usize,
    pub generators: Vec<UniMat>,
}

/// The abelianization `G/[G,G]` described through Mal'cev coordinates.
#[derive(Clone, Debug)]
pub struct Abelianization {
    pub free_rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
    /// Smith invariants of the relation lattice, including ones.
    pub invariants: Vec<BigInt>,
    /// `P` from the Smith form of the relations, acting on Mal'cev coordinates.
    pub transform: IntMat,
    /// Images of the group's generators.
    pub generator_images: Vec<IntVec>,
    /// Generators of the preimage of the torsion subgroup.
    pub torsion_pullback: Vec<UniMat>,
}

impl Abelianization {
    /// Image of a Mal'cev coordinate vector: torsion components reduced
    /// modulo their invariants, followed by the free components.
    pub fn image_of_coords(&self, x: &[BigInt]) -> IntVec {
        let n = x.len();
        let px: IntVec =
            (0..n).map(|i| (0..n).map(|j| self.transform.get(i, j) * &x[j]).sum::<BigInt>()).collect();
        let mut out = Vec::new();
        for (i, c) in self.invariants.iter().enumerate() {
            if !c.is_one() {
                out.push(num_integer::Integer::mod_floor(&px[i], c));
            }
        }
        out.extend(px[self.invariants.len()..].iter().cloned());
        out
    }
}

/// The adjoint action `g ↦ (x ↦ g^{-1} x g)` on the Lie algebra, written on
/// coordinate rows in a basis adapted to the lower central series.
#[derive(Clone, Debug)]
pub struct AdjointRep {
    pub filtration: Filtration,
    pub images: Vec<UniMat>,
}

impl TGroup {
    pub fn new(r: usize, gens: Vec<UniMat>) -> Result<TGroup> {
        if r == 0 {
            return Err(invalid("ambient size must be positive"));
        }
        if let Some(g) = gens.iter().find(|g| g.size() != r) {
            return Err(invalid(format!("generator of size {} in ambient size {r}", g.size())));
        }
        let gens = gens.into_iter().filter(|g| !g.is_identity()).collect();
        Ok(TGroup { r, gens, data: OnceLock::new(), center: OnceLock::new() })
    }

    pub fn trivial(r: usize) -> TGroup {
        TGroup::new(r, Vec::new()).expect("positive size")
    }

    pub fn from_doc(doc: &GroupDoc) -> Result<TGroup> {
        TGroup::new(doc.ambient, doc.generators.clone())
    }

    pub fn to_doc(&self) -> GroupDoc {
        GroupDoc { ambient: self.r, generators: self.gens.clone() }
    }

    pub fn ambient_size(&self) -> usize {
        self.r
    }

    pub fn generators(&self) -> &[UniMat] {
        &self.gens
    }

    fn data(&self) -> &GroupData {
        self.data.get_or_init(|| {
            let logs: Vec<NilMat> = self.gens.iter().map(mat_log).collect();
            let lie = LieAlg::lie_closure(self.r, &logs).expect("generators share the ambient size");
            let f = Filtration::lower_central(&lie);
            let malcev = MalcevBasis::build(f, &self.gens).expect("logs of group elements lie in the algebra");
            Arc::new(GroupData { lie, malcev })
        })
    }

    /// The rational Lie algebra spanned by the logarithms of the group.
    pub fn lie(&self) -> &LieAlg {
        &self.data().lie
    }

    /// Mal'cev basis along the lower central series of the Lie algebra.
    pub fn malcev(&self) -> &MalcevBasis {
        &self.data().malcev
    }

    pub fn malcev_with(&self, f: Filtration) -> Result<MalcevBasis> {
        MalcevBasis::build(f, &self.malcev().elements())
    }

    pub fn hirsch_length(&self) -> usize {
        self.lie().dim()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_abelian(&self) -> bool {
        self.lie().is_abelian()
    }

    fn check_size(&self, x: &UniMat) -> Result<()> {
        if x.size() != self.r {
            return Err(invalid(format!("element of size {} against ambient size {}", x.size(), self.r)));
        }
        Ok(())
    }

    /// Normal-form exponents of `x` if it lies in the group.
    pub fn membership(&self, x: &UniMat) -> Result<Option<Vec<BigInt>>> {
        self.check_size(x)?;
        Ok(self.malcev().coords(x))
    }

    pub fn contains_element(&self, x: &UniMat) -> Result<bool> {
        Ok(self.membership(x)?.is_some())
    }

    pub fn contains(&self, other: &TGroup) -> Result<bool> {
        for g in &other.gens {
            if !self.contains_element(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &TGroup) -> Result<bool> {
        Ok(self.contains(other)? && other.contains(self)?)
    }

    pub fn commutes_with(&self, other: &TGroup) -> Result<bool> {
        if self.r != other.r {
            return Err(invalid("groups in different ambient sizes"));
        }
        Ok(self.gens.iter().all(|a| other.gens.iter().all(|b| a.mul(b) == b.mul(a))))
    }

    /// `⟨self ∪ other⟩`
    pub fn join(&self, other: &TGroup) -> Result<TGroup> {
        if self.r != other.r {
            return Err(invalid("groups in different ambient sizes"));
        }
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        TGroup::new(self.r, g)
    }

    /// A copy generated by its own Mal'cev basis.
    pub fn reduced(&self) -> TGroup {
        TGroup::new(self.r, self.malcev().elements()).expect("same ambient size")
    }

    pub fn derived_subgroup(&self) -> Result<TGroup> {
        let basis = self.malcev().elements();
        let mut gens = Vec::new();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                gens.push(commutator(&basis[i], &basis[j]));
            }
        }
        let bound = self.lie().lower_central_series().len() + 1;
        for _ in 0..=bound {
            let n = TGroup::new(self.r, gens.clone())?;
            let mut missing = Vec::new();
            for x in n.malcev().elements() {
                for b in &basis {
                    let c = commutator(&x, b);
                    if !n.contains_element(&c)? {
                        missing.push(c);
                    }
                }
            }
            if missing.is_empty() {
                return Ok(n.reduced());
            }
            gens.extend(missing);
        }
        Err(violation("normal closure did not stabilize within the nilpotency class"))
    }

    pub fn adjoint_rep(&self) -> Result<AdjointRep> {
        let f = Filtration::lower_central(self.lie());
        let images = self.gens.iter().map(|g| adjoint_image(&f, g)).collect::<Result<Vec<_>>>()?;
        Ok(AdjointRep { filtration: f, images })
    }

    /// Kernel of the homomorphism sending generator `i` to `images[i]`.
    pub fn hom_kernel(&self, images: &[UniMat]) -> Result<TGroup> {
        if images.len() != self.gens.len() {
            return Err(invalid("one image per generator is required"));
        }
        let Some(s) = images.first().map(|m| m.size()) else {
            return Ok(self.clone());
        };
        if images.iter().any(|m| m.size() != s) {
            return Err(invalid("images of different sizes"));
        }
        let r = self.r;
        let graph: Vec<UniMat> = self.gens.iter().zip(images).map(|(g, h)| g.direct_sum(h)).collect();
        let gamma = TGroup::new(r + s, graph)?;
        let lie = gamma.lie();
        let n = (r + s) * (r + s - 1) / 2;
        let mut first = Vec::new();
        let mut second = Vec::new();
        let mut idx = 0;
        for i in 0..r + s {
            for j in i + 1..r + s {
                if j < r {
                    first.push(unit_vec(n, idx));
                } else if i >= r {
                    second.push(unit_vec(n, idx));
                }
                idx += 1;
            }
        }
        let amb = lie.ambient_span();
        if amb.intersect(&Span::new(n, &second)).dim() > 0 {
            return Err(Error::InconsistentHomomorphism(
                "a relation among the generators is not respected by the images".into(),
            ));
        }
        let kernel_space = lie.subspace_from_ambient(&amb.intersect(&Span::new(n, &first)))?;
        let tail = gamma.intersect_ideal_elems(&kernel_space)?;
        TGroup::new(r, tail.iter().map(|g| g.block(0, r)).collect())
    }

    /// Kernel of a homomorphism into `(Q^m, +)`, given by generator images.
    pub fn hom_kernel_to_vectors(&self, images: &[QVec]) -> Result<TGroup> {
        let m = images.first().map_or(0, Vec::len);
        if images.iter().any(|v| v.len() != m) {
            return Err(invalid("image vectors of different lengths"));
        }
        if m == 0 {
            return Ok(self.clone());
        }
        let mats = images
            .iter()
            .map(|v| {
                let mut a = RatMat::identity(m + 1);
                for (j, x) in v.iter().enumerate() {
                    a.set(0, j + 1, x.clone());
                }
                UniMat::new(a)
            })
            .collect::<Result<Vec<_>>>()?;
        self.hom_kernel(&mats)
    }

    /// `Z(G)`, the kernel of the adjoint representation.
    pub fn center(&self) -> &TGroup {
        self.center.get_or_init(|| {
            let ad = self.adjoint_rep().expect("adjoint images are unitriangular");
            let z = self.hom_kernel(&ad.images).expect("the adjoint map is a homomorphism");
            Arc::new(z.reduced())
        })
    }

    pub fn abelianization(&self) -> Abelianization {
        let mb = self.malcev();
        let basis = mb.elements();
        let n = basis.len();
        let mut rels: Vec<IntVec> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let c = commutator(&basis[j], &basis[i]);
                rels.push(mb.coords(&c).expect("commutators lie in the group"));
            }
        }
        let m = IntMat::from_columns(n, &rels);
        let res = snf(&m);
        let rank = res.rank();
        let torsion: Vec<BigInt> = res.invariants.iter().filter(|c| !c.is_one()).cloned().collect();
        let free_rank = n - rank;
        let mut ab = Abelianization {
            free_rank,
            torsion,
            invariants: res.invariants.clone(),
            transform: res.p,
            generator_images: Vec::new(),
            torsion_pullback: mb.tail(1),
        };
        ab.generator_images =
            self.gens.iter().map(|g| ab.image_of_coords(&mb.coords(g).expect("generator is a member"))).collect();
        ab
    }

    /// Image in the free quotient `G/T`: the exponents at the top level of
    /// the lower-central Mal'cev basis.
    pub fn free_abelian_image(&self, x: &UniMat) -> Result<Option<IntVec>> {
        let k = self.malcev().level_sizes().first().copied().unwrap_or(0);
        Ok(self.membership(x)?.map(|c| c[..k].to_vec()))
    }

    pub fn free_abelian_rank(&self) -> usize {
        self.malcev().level_sizes().first().copied().unwrap_or(0)
    }

    fn intersect_ideal_elems(&self, ideal: &Subspace) -> Result<Vec<UniMat>> {
        let (f, start) = Filtration::through_ideal(self.lie(), ideal);
        let mb = self.malcev_with(f)?;
        Ok(mb.tail(start))
    }

    /// `G ∩ exp(I)` for an ideal `I` of the Lie algebra.
    pub fn intersect_ideal(&self, ideal: &Subspace) -> Result<TGroup> {
        if !self.lie().is_ideal(ideal)? {
            return Err(invalid("subspace is not an ideal"));
        }
        TGroup::new(self.r, self.intersect_ideal_elems(ideal)?)
    }

    /// `{g ∈ G : log g ∈ U}` for a subalgebra `U` of the Lie algebra.
    ///
    /// Walks down the chain `U + L_j` of the lower central series, each term
    /// an ideal of the previous one, intersecting with one ideal at a time.
    pub fn intersect_rational(&self, u: &Subspace) -> Result<TGroup> {
        let lie = self.lie();
        if !lie.is_subalgebra(u)? {
            return Err(invalid("subspace is not closed under brackets"));
        }
        if lie.is_ideal(u)? {
            return self.intersect_ideal(u);
        }
        let target: Vec<Span> = lie
            .lower_central_series()
            .iter()
            .skip(1)
            .map(|l| lie.to_ambient(&l.sum(u).expect("same owner")))
            .collect();
        let mut h = self.clone();
        for w in target {
            let hl = h.lie();
            let inside = hl.ambient_span().intersect(&w);
            if inside == *hl.ambient_span() {
                continue;
            }
            let ideal = hl.subspace_from_ambient(&inside)?;
            h = h.intersect_ideal(&ideal)?;
        }
        Ok(h.reduced())
    }

    /// Lattice coordinates of elements of an abelian group, in its own
    /// Mal'cev basis.
    pub fn abelian_coords(&self, x: &UniMat) -> Result<Option<IntVec>> {
        if !self.is_abelian() {
            return Err(invalid("lattice coordinates need an abelian group"));
        }
        self.membership(x)
    }

    /// Element with the given normal-form exponents.
    pub fn element(&self, exps: &[BigInt]) -> UniMat {
        self.malcev().normal_form(exps)
    }
}

fn adjoint_image(f: &Filtration, g: &UniMat) -> Result<UniMat> {
    let d = f.dim();
    let gi = g.inverse();
    let mut rows = Vec::with_capacity(d);
    for k in 0..d {
        let e = f.basis_matrix(k);
        let conj = NilMat::new(RatMat::mul(&RatMat::mul(&gi, &e), g))?;
        rows.push(f.coords_of_nil(&conj).ok_or_else(|| violation("conjugate left the algebra"))?);
    }
    UniMat::new(RatMat::from_rows(rows)?).map_err(|_| violation("adjoint image is not unitriangular"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn heis() -> (TGroup, UniMat, UniMat, UniMat) {
        let x = UniMat::new(RatMat::elementary(3, 0, 1, q(1))).unwrap();
        let y = UniMat::new(RatMat::elementary(3, 1, 2, q(1))).unwrap();
        let z = commutator(&x, &y);
        (TGroup::new(3, vec![x.clone(), y.clone()]).unwrap(), x, y, z)
    }

    #[test]
    fn heisenberg_basis_and_membership() {
        let (g, x, y, z) = heis();
        assert_eq!(g.hirsch_length(), 3);
        assert_eq!(g.malcev().level_sizes(), vec![2, 1]);
        assert_eq!(g.membership(&UniMat::identity(3)).unwrap(), Some(vec![BigInt::zero(); 3]));
        let c = g.membership(&z).unwrap().unwrap();
        assert_eq!(g.element(&c), z);
        assert_eq!(c.iter().filter(|e| !e.is_zero()).count(), 1);
        let w = x.mul(&y).mul(&x.inverse()).mul(&z.pow(5));
        let c = g.membership(&w).unwrap().unwrap();
        assert_eq!(g.element(&c), w);
        let half = UniMat::new(RatMat::elementary(3, 0, 1, Rational::new(1, 2))).unwrap();
        assert_eq!(g.membership(&half).unwrap(), None);
        assert!(g.membership(&UniMat::identity(4)).is_err());
    }

    #[test]
    fn words_reproduce_basis() {
        let (g, ..) = heis();
        let mb = g.malcev();
        for (w, e) in mb.words().iter().zip(mb.elements()) {
            assert_eq!(mb.slp().eval(*w, g.generators()), e);
        }
    }

    #[test]
    fn heisenberg_center_and_derived() {
        let (g, x, y, z) = heis();
        let zg = TGroup::new(3, vec![z.clone()]).unwrap();
        assert!(g.center().equals(&zg).unwrap());
        assert!(g.derived_subgroup().unwrap().equals(&zg).unwrap());
        let ad = g.adjoint_rep().unwrap();
        let img = TGroup::new(3, ad.images.clone()).unwrap();
        assert_eq!(img.hirsch_length(), 2);
        assert!(img.is_abelian());
        let gx = TGroup::new(3, vec![x]).unwrap();
        let gy = TGroup::new(3, vec![y]).unwrap();
        assert!(!gx.commutes_with(&gy).unwrap());
        assert!(g.intersect_rational(&g.lie().center()).unwrap().equals(&zg).unwrap());
    }

    #[test]
    fn abelianization_of_heisenberg() {
        let (g, ..) = heis();
        let ab = g.abelianization();
        assert_eq!(ab.free_rank, 2);
        assert!(ab.torsion.is_empty());
    }

    #[test]
    fn inconsistent_homomorphism_is_rejected() {
        let (g, x, ..) = heis();
        let ok = g.hom_kernel(&[x.clone(), UniMat::identity(3)]).unwrap();
        assert_eq!(ok.hirsch_length(), 2);
        // ⟨x, x^2⟩ with x ↦ x, x^2 ↦ 1 breaks the relation between the generators
        let two = TGroup::new(3, vec![x.clone(), x.pow(2)]).unwrap();
        let bad = two.hom_kernel(&[x.clone(), UniMat::identity(3)]);
        assert!(matches!(bad, Err(Error::InconsistentHomomorphism(_))));
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let (g, x, y, _) = heis();
        let k = g.hom_kernel(&[x, y]).unwrap();
        assert!(k.is_trivial() || k.hirsch_length() == 0);
    }

    #[test]
    fn doc_round_trip() {
        let (g, ..) = heis();
        let js = serde_json::to_string(&g.to_doc()).unwrap();
        let back = TGroup::from_doc(&serde_json::from_str(&js).unwrap()).unwrap();
        assert!(back.equals(&g).unwrap());
    }
}
