//! Finite-dimensional rational Lie algebras of strictly upper-triangular
//! matrices: structure constants, centers, lower central series, the
//! centroid, and splitting into indecomposable ideals.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::exactmat::{lie_bracket, NilMat, RatMat};
use crate::linalg::{self, add_scaled, combine, is_zero_vec, unit_vec, zero_vec, Frame, QVec, Span};
use crate::poly::{min_poly, min_poly_modulo, splitting_idempotent};
use crate::rational::Rational;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

fn ambient_vec(m: &NilMat) -> QVec {
    m.upper_entries()
}

/// A Lie algebra of `r × r` strictly upper-triangular matrices, carried by a
/// canonical (reduced echelon) basis and its structure constants.
#[derive(Clone, Debug)]
pub struct LieAlg {
    id: u64,
    r: usize,
    basis: Vec<NilMat>,
    frame: Frame,
    /// `consts[i][j]` are the coordinates of `[b_i, b_j]`.
    consts: Vec<Vec<QVec>>,
}

impl PartialEq for LieAlg {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.frame.span() == other.frame.span()
    }
}

impl LieAlg {
    /// Smallest bracket-closed subspace containing the given matrices.
    pub fn lie_closure(r: usize, vectors: &[NilMat]) -> Result<LieAlg> {
        if let Some(v) = vectors.iter().find(|v| v.size() != r) {
            return Err(invalid(format!("matrix of size {} in an algebra of size {r}", v.size())));
        }
        let n = r * r.saturating_sub(1) / 2;
        let mut span = Span::zero(n);
        let mut found: Vec<NilMat> = Vec::new();
        let mut queue: Vec<NilMat> = vectors.to_vec();
        while let Some(v) = queue.pop() {
            if span.contains(&ambient_vec(&v)) {
                continue;
            }
            span = span.sum(&Span::new(n, &[ambient_vec(&v)]));
            for w in &found {
                queue.push(lie_bracket(&v, w)?);
            }
            found.push(v);
        }
        Ok(Self::from_span(r, &span))
    }

    fn from_span(r: usize, span: &Span) -> LieAlg {
        let basis: Vec<NilMat> = span.basis().iter().map(|v| NilMat::from_upper_entries(r, v)).collect();
        let frame = Frame::new(span.ambient_dim(), span.basis().to_vec()).expect("echelon rows are independent");
        let d = basis.len();
        let mut consts = vec![vec![Vec::new(); d]; d];
        for i in 0..d {
            consts[i][i] = zero_vec(d);
            for j in i + 1..d {
                let br = lie_bracket(&basis[i], &basis[j]).expect("equal sizes");
                let c = frame.coords(&ambient_vec(&br)).expect("closed under brackets");
                consts[j][i] = c.iter().map(|x| -x).collect();
                consts[i][j] = c;
            }
        }
        LieAlg { id: fresh_id(), r, basis, frame, consts }
    }

    /// The algebra spanned by the given matrices, which must already be closed.
    pub fn from_basis(r: usize, basis: &[NilMat]) -> Result<LieAlg> {
        let l = Self::lie_closure(r, basis)?;
        let span = Span::new(l.frame.span().ambient_dim(), &basis.iter().map(ambient_vec).collect::<Vec<_>>());
        if span.dim() != l.dim() {
            return Err(invalid("basis is not closed under brackets"));
        }
        Ok(l)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_size(&self) -> usize {
        self.r
    }

    pub fn basis(&self) -> &[NilMat] {
        &self.basis
    }

    pub fn structure_constants(&self) -> &[Vec<QVec>] {
        &self.consts
    }

    /// The algebra as a subspace of the strictly-upper entries.
    pub fn ambient_span(&self) -> &Span {
        self.frame.span()
    }

    pub fn coords(&self, m: &NilMat) -> Option<QVec> {
        if m.size() != self.r {
            return None;
        }
        self.frame.coords(&ambient_vec(m))
    }

    pub fn coords_of_ambient(&self, v: &[Rational]) -> Option<QVec> {
        self.frame.coords(v)
    }

    pub fn element(&self, coords: &[Rational]) -> NilMat {
        NilMat::from_upper_entries(self.r, &self.frame.vector(coords))
    }

    pub fn bracket(&self, a: &[Rational], b: &[Rational]) -> QVec {
        let d = self.dim();
        let mut out = zero_vec(d);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() && i != j {
                    add_scaled(&mut out, &(ai * bj), &self.consts[i][j]);
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.consts.iter().flatten().all(|c| is_zero_vec(c))
    }

    pub fn whole(&self) -> Subspace {
        Subspace { owner: self.id, span: Span::full(self.dim()) }
    }

    pub fn zero_subspace(&self) -> Subspace {
        Subspace { owner: self.id, span: Span::zero(self.dim()) }
    }

    pub fn subspace(&self, vectors: &[QVec]) -> Subspace {
        Subspace { owner: self.id, span: Span::new(self.dim(), vectors) }
    }

    pub fn subspace_from_matrices(&self, ms: &[NilMat]) -> Result<Subspace> {
        let coords = ms
            .iter()
            .map(|m| self.coords(m).ok_or_else(|| invalid("matrix outside the algebra")))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.subspace(&coords))
    }

    pub fn subspace_from_ambient(&self, span: &Span) -> Result<Subspace> {
        let coords = span
            .basis()
            .iter()
            .map(|v| self.frame.coords(v).ok_or_else(|| invalid("vector outside the algebra")))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.subspace(&coords))
    }

    /// The subspace in strictly-upper-entry coordinates.
    pub fn to_ambient(&self, s: &Subspace) -> Span {
        let vecs: Vec<QVec> = s.span.basis().iter().map(|c| self.frame.vector(c)).collect();
        Span::new(self.frame.span().ambient_dim(), &vecs)
    }

    pub fn matrices(&self, s: &Subspace) -> Vec<NilMat> {
        s.span.basis().iter().map(|c| self.element(c)).collect()
    }

    fn check_owner(&self, s: &Subspace) -> Result<()> {
        if s.owner != self.id {
            return Err(invalid("subspace belongs to a different algebra"));
        }
        Ok(())
    }

    /// `[A, B]` as a subspace.
    pub fn bracket_spaces(&self, a: &Subspace, b: &Subspace) -> Result<Subspace> {
        self.check_owner(a)?;
        self.check_owner(b)?;
        let mut vecs = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                vecs.push(self.bracket(x, y));
            }
        }
        Ok(self.subspace(&vecs))
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> Result<bool> {
        let br = self.bracket_spaces(s, s)?;
        Ok(s.span.contains_span(&br.span))
    }

    pub fn is_ideal(&self, s: &Subspace) -> Result<bool> {
        let br = self.bracket_spaces(s, &self.whole())?;
        Ok(s.span.contains_span(&br.span))
    }

    /// `{x : [x, b] = 0 for every basis element b}`.
    pub fn center(&self) -> Subspace {
        let d = self.dim();
        // row i of the system: the coefficients of x_i in every [x, b_j]
        let rows: Vec<QVec> = (0..d).map(|i| (0..d).flat_map(|j| self.consts[i][j].clone()).collect()).collect();
        self.subspace(&linalg::left_nullspace(&rows, d * d))
    }

    /// `L = L_1 ⊇ L_2 = [L, L] ⊇ ... ⊇ 0`, ending with the zero subspace.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let mut series = vec![self.whole()];
        loop {
            let last = series.last().unwrap();
            if last.dim() == 0 {
                return series;
            }
            let next = self.bracket_spaces(&self.whole(), last).expect("same owner");
            series.push(next);
        }
    }

    /// The algebra spanned by a subalgebra, as a Lie algebra in its own right.
    pub fn subalgebra(&self, s: &Subspace) -> Result<LieAlg> {
        self.check_owner(s)?;
        let ambient = self.to_ambient(s);
        Ok(Self::from_span(self.r, &ambient))
    }

    /// Basis of the centroid: matrices `F` (acting on coordinate rows,
    /// `x ↦ x·F`) with `F([x, y]) = [F(x), y]` for all `x, y`.
    pub fn centroid(&self) -> Vec<RatMat> {
        let d = self.dim();
        if d == 0 {
            return Vec::new();
        }
        let var = |m: usize, k: usize| m * d + k;
        let mut eqs: Vec<QVec> = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut row = zero_vec(d * d);
                    for m in 0..d {
                        let c = &self.consts[i][j][m];
                        if !c.is_zero() {
                            row[var(m, k)] += c;
                        }
                    }
                    for l in 0..d {
                        let c = &self.consts[l][j][k];
                        if !c.is_zero() {
                            row[var(i, l)] -= c;
                        }
                    }
                    if !is_zero_vec(&row) {
                        eqs.push(row);
                    }
                }
            }
        }
        let (eqs, _) = linalg::rref(&eqs, d * d);
        linalg::nullspace(&eqs, d * d).into_iter().map(|v| RatMat::from_vec(d, v)).collect()
    }

    fn image_of(&self, f: &RatMat) -> Subspace {
        self.subspace(&f.rows())
    }

    /// Decomposition into indecomposable ideals.
    ///
    /// Abelian summands are split off first as a complement of `Z ∩ [L, L]`
    /// in the center `Z`. The rest is split by idempotents of its centroid,
    /// and each nonabelian summand is then normalized to `[M, M] + W`, where
    /// `W` is the canonical complement of `[M, M] + Z` in `M + Z`, so the
    /// output depends only on the algebra and not on its basis.
    pub fn indecomposable_summands(&self) -> LieDecomposition {
        let d = self.dim();
        let z = self.center();
        let derived = self.bracket_spaces(&self.whole(), &self.whole()).expect("same owner");
        let zd = z.intersect(&derived).expect("same owner");
        let abelian_part = zd.canonical_complement_in(&z);
        let rest = {
            let core = derived.sum(&abelian_part).expect("same owner");
            let pad = core.span.complement();
            Subspace { owner: self.id, span: derived.span.sum(&pad) }
        };

        let mut raw: Vec<Subspace> = Vec::new();
        let mut certified = Vec::new();
        if rest.dim() > 0 {
            let sub = self.subalgebra(&rest).expect("same owner");
            for (piece, cert) in split_by_centroid(&sub) {
                let mats = sub.matrices(&piece);
                raw.push(self.subspace_from_matrices(&mats).expect("ideal of a subalgebra"));
                certified.push(cert);
            }
        }

        let mut summands: Vec<(Subspace, bool, bool)> = Vec::new();
        for (m, cert) in raw.into_iter().zip(certified) {
            let dm = self.bracket_spaces(&m, &m).expect("same owner");
            let hat = m.sum(&z).expect("same owner");
            let base = dm.sum(&z).expect("same owner");
            let w = base.canonical_complement_in(&hat);
            summands.push((dm.sum(&w).expect("same owner"), false, cert));
        }
        for v in abelian_part.basis() {
            summands.push((self.subspace(std::slice::from_ref(v)), true, true));
        }
        summands.sort_by(|a, b| a.0.dim().cmp(&b.0.dim()).then_with(|| a.0.span.basis().cmp(b.0.span.basis())));

        let projections = projections(d, &summands.iter().map(|s| s.0.clone()).collect::<Vec<_>>());
        LieDecomposition {
            summands: summands.iter().map(|s| s.0.clone()).collect(),
            abelian: summands.iter().map(|s| s.1).collect(),
            certified: summands.iter().map(|s| s.2).collect(),
            projections,
        }
    }
}

/// Projection matrices (acting on coordinate rows) for a direct-sum family.
fn projections(d: usize, parts: &[Subspace]) -> Vec<RatMat> {
    let all: Vec<QVec> = parts.iter().flat_map(|p| p.basis().to_vec()).collect();
    if all.is_empty() {
        return Vec::new();
    }
    let frame = Frame::new(d, all).expect("summands form a direct sum");
    let mut out = Vec::new();
    let mut offset = 0;
    for p in parts {
        let k = p.dim();
        let rows: Vec<QVec> = (0..d)
            .map(|i| {
                let c = frame.coords(&unit_vec(d, i)).expect("summands span the algebra");
                combine(&c[offset..offset + k], p.basis(), d)
            })
            .collect();
        out.push(RatMat::from_rows(rows).expect("square"));
        offset += k;
    }
    out
}

const RANDOM_TRIALS: usize = 24;

/// Splits an algebra without abelian summands into indecomposable ideals,
/// each paired with whether its indecomposability was certified.
fn split_by_centroid(l: &LieAlg) -> Vec<(Subspace, bool)> {
    match find_idempotent(l) {
        Ok(e) => {
            let d = l.dim();
            let one_minus = RatMat::identity(d).sub(&e);
            let mut out = Vec::new();
            for part in [l.image_of(&e), l.image_of(&one_minus)] {
                let sub = l.subalgebra(&part).expect("same owner");
                for (piece, cert) in split_by_centroid(&sub) {
                    let mats = sub.matrices(&piece);
                    out.push((l.subspace_from_matrices(&mats).expect("nested ideal"), cert));
                }
            }
            out
        }
        Err(certified) => vec![(l.whole(), certified)],
    }
}

/// A nontrivial centroid idempotent, or `Err(certified)` when none was
/// found; `certified` records whether the centroid was shown to be local.
fn find_idempotent(l: &LieAlg) -> std::result::Result<RatMat, bool> {
    let c = l.centroid();
    if c.len() <= 1 {
        return Err(true);
    }
    let d = l.dim();
    let try_elem = |a: &RatMat| -> Option<RatMat> {
        let m = min_poly(a);
        let (f, g) = m.coprime_split()?;
        let e = splitting_idempotent(a, &f, &g);
        (!e.is_zero() && !e.is_identity() && e.mul(&e) == e).then_some(e)
    };
    for a in &c {
        if let Some(e) = try_elem(a) {
            return Ok(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c3a7);
    let random_elem = |rng: &mut ChaCha8Rng| {
        c.iter().fold(RatMat::zero(d), |acc, b| acc.add(&b.scale(&Rational::from_int(rng.gen_range(-3..=3)))))
    };
    for _ in 0..RANDOM_TRIALS {
        let a = random_elem(&mut rng);
        if let Some(e) = try_elem(&a) {
            return Ok(e);
        }
    }
    Err(centroid_is_local(&c, &mut rng, random_elem))
}

/// Certifies that the centroid modulo its radical is a field. The radical is
/// the kernel of the trace form; the quotient is a field exactly when it is
/// commutative and generated by one element with irreducible minimal polynomial.
fn centroid_is_local(
    c: &[RatMat],
    rng: &mut ChaCha8Rng,
    random_elem: impl Fn(&mut ChaCha8Rng) -> RatMat,
) -> bool {
    let m = c.len();
    let d = c[0].size();
    let gram: Vec<QVec> = (0..m).map(|i| (0..m).map(|j| c[i].mul(&c[j]).trace()).collect()).collect();
    let rad_coeffs = linalg::nullspace(&gram, m);
    let rad: Vec<QVec> = rad_coeffs
        .iter()
        .map(|k| k.iter().zip(c).fold(RatMat::zero(d), |acc, (x, b)| acc.add(&b.scale(x))).to_vec())
        .collect();
    let rad = Span::new(d * d, &rad);
    let quotient_dim = m - rad.dim();
    if quotient_dim <= 1 {
        return true;
    }
    for i in 0..m {
        for j in i + 1..m {
            let comm = c[i].mul(&c[j]).sub(&c[j].mul(&c[i]));
            if !rad.contains(&comm.to_vec()) {
                return false;
            }
        }
    }
    for _ in 0..4 {
        let a = random_elem(rng);
        let mp = min_poly_modulo(&a, &rad);
        if mp.degree() == quotient_dim {
            return mp.is_irreducible();
        }
    }
    false
}

/// A coordinate subspace of a [`LieAlg`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    owner: u64,
    span: Span,
}

impl Subspace {
    pub fn owner(&self) -> u64 {
        self.owner
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn basis(&self) -> &[QVec] {
        self.span.basis()
    }

    pub fn span(&self) -> &Span {
        &self.span
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.span.contains(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        self.same_owner(other)?;
        Ok(self.span.contains_span(&other.span))
    }

    fn same_owner(&self, other: &Subspace) -> Result<()> {
        if self.owner != other.owner {
            return Err(invalid("subspaces of different algebras"));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_owner(other)?;
        Ok(Subspace { owner: self.owner, span: self.span.sum(&other.span) })
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.same_owner(other)?;
        Ok(Subspace { owner: self.owner, span: self.span.intersect(&other.span) })
    }

    /// The canonical complement of `self` inside `outer ⊇ self`: the image of
    /// `outer` under elimination against the echelon basis of `self`.
    pub fn canonical_complement_in(&self, outer: &Subspace) -> Subspace {
        let vecs: Vec<QVec> = outer.basis().iter().map(|v| self.span.residual(v)).collect();
        Subspace { owner: self.owner, span: Span::new(self.span.ambient_dim(), &vecs) }
    }
}

/// `L = M_1 ⊕ ... ⊕ M_k` into indecomposable ideals.
#[derive(Clone, Debug)]
pub struct LieDecomposition {
    pub summands: Vec<Subspace>,
    pub abelian: Vec<bool>,
    /// Whether each summand's centroid was proven local (always true for
    /// one-dimensional and abelian summands).
    pub certified: Vec<bool>,
    /// `projections[i]` maps `L` onto `summands[i]` along the others.
    pub projections: Vec<RatMat>,
}

#[derive(Serialize, Deserialize)]
struct LieRepr {
    ambient: usize,
    basis: Vec<NilMat>,
    constants: Vec<(usize, usize, usize, Rational)>,
}

impl Serialize for LieAlg {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut constants = Vec::new();
        for (i, row) in self.consts.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                for (k, x) in c.iter().enumerate() {
                    if !x.is_zero() {
                        constants.push((i, j, k, x.clone()));
                    }
                }
            }
        }
        LieRepr { ambient: self.r, basis: self.basis.clone(), constants }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieAlg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LieRepr::deserialize(d)?;
        let l = LieAlg::from_basis(repr.ambient, &repr.basis).map_err(serde::de::Error::custom)?;
        if l.basis != repr.basis {
            return Err(serde::de::Error::custom("basis is not in canonical form"));
        }
        let dim = l.dim();
        let mut expect = vec![vec![zero_vec(dim); dim]; dim];
        for (i, j, k, x) in repr.constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(serde::de::Error::custom("structure constant index out of range"));
            }
            expect[i][j][k] = x;
        }
        if expect != l.consts {
            return Err(serde::de::Error::custom("structure constants disagree with the basis"));
        }
        Ok(l)
    }
}
