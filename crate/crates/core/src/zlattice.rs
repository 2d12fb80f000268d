//! Integer lattices: Hermite and Smith normal forms with transforms, pure
//! closures, and the test for a splitting `Z^n = A_1 ⊕ A_2` with prescribed
//! subgroups `A_i ⊇ V_i`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::QVec;
use crate::rational::{common_denominator, Rational};

pub type IntVec = Vec<BigInt>;

/// Dense integer matrix, stored by rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: Vec<IntVec>,
    ncols: usize,
}

impl IntMat {
    pub fn new(ncols: usize, rows: Vec<IntVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged integer matrix");
        IntMat { rows, ncols }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::new(ncols, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMat { rows: vec![vec![BigInt::zero(); ncols]; nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = BigInt::one();
        }
        m
    }

    /// Matrix whose columns are the given vectors of length `n`.
    pub fn from_columns(n: usize, cols: &[IntVec]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.rows[i][j] = c[i].clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[IntVec] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> IntVec {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        IntMat::new(self.nrows(), (0..self.ncols).map(|j| self.column(j)).collect())
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.ncols, other.nrows());
        let mut out = IntMat::zeros(self.nrows(), other.ncols);
        for i in 0..self.nrows() {
            for k in 0..self.ncols {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = &other.rows[k][j];
                    if !b.is_zero() {
                        out.rows[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.nrows(), self.ncols), (other.nrows(), other.ncols));
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        IntMat { ncols: self.ncols, rows }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    /// Exact determinant by fraction-free elimination. Square matrices only.
    pub fn det(&self) -> BigInt {
        let n = self.nrows();
        assert_eq!(n, self.ncols, "determinant of a non-square matrix");
        let mut m = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * prev
    }

    pub fn is_unimodular(&self) -> bool {
        self.nrows() == self.ncols && self.det().abs().is_one()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in self.rows.iter_mut() {
            r.swap(a, b);
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        let src_row = self.rows[src].clone();
        for (d, s) in self.rows[dst].iter_mut().zip(&src_row) {
            if !s.is_zero() {
                *d += k * s;
            }
        }
    }

    /// `col[dst] += k * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in self.rows.iter_mut() {
            if !r[src].is_zero() {
                let v = k * &r[src];
                r[dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.rows[i].iter_mut() {
            *x = -&*x;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in self.rows.iter_mut() {
            r[j] = -&r[j];
        }
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).finish()
    }
}

/// Row-style Hermite normal form `H = U M` with `U` unimodular.
///
/// Nonzero rows come first, pivots are positive and strictly increase to the
/// right, and entries above a pivot lie in `[0, pivot)`.
pub fn hnf(m: &IntMat) -> (IntMat, IntMat) {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.nrows());
    let nrows = h.nrows();
    let mut r = 0;
    for col in 0..h.ncols {
        if r == nrows {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below row r
            let pick = (r..nrows)
                .filter(|&i| !h.rows[i][col].is_zero())
                .min_by(|&a, &b| h.rows[a][col].abs().cmp(&h.rows[b][col].abs()));
            let Some(p) = pick else { break };
            h.rows.swap(r, p);
            u.rows.swap(r, p);
            let mut clean = true;
            for i in r + 1..nrows {
                if h.rows[i][col].is_zero() {
                    continue;
                }
                let q = h.rows[i][col].div_floor(&h.rows[r][col]);
                h.add_row(i, r, &-&q);
                u.add_row(i, r, &-&q);
                if !h.rows[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.rows[r][col].is_zero() {
            continue;
        }
        if h.rows[r][col].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h.rows[i][col].div_floor(&h.rows[r][col]);
            h.add_row(i, r, &-&q);
            u.add_row(i, r, &-&q);
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form data: `P M Q = S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub p: IntMat,
    pub q: IntMat,
    pub s: IntMat,
    /// The nonzero diagonal entries `c_1 | c_2 | ... | c_m`.
    pub invariants: Vec<BigInt>,
    /// `P^{-1}`, maintained alongside `P`.
    pub p_inv: IntMat,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

/// Smith normal form with unimodular transforms.
///
/// The pivot is always the nonzero entry of least absolute value in the
/// remaining block, ties broken by row and then column index.
pub fn snf(m: &IntMat) -> SnfResult {
    let (nr, nc) = (m.nrows(), m.ncols());
    let mut s = m.clone();
    let mut p = IntMat::identity(nr);
    let mut p_inv = IntMat::identity(nr);
    let mut q = IntMat::identity(nc);
    let mut invariants = Vec::new();

    // Row op R_dst += k R_src on P corresponds to C_src -= k C_dst on P^{-1}.
    let row_add = |s: &mut IntMat, p: &mut IntMat, p_inv: &mut IntMat, dst, src, k: &BigInt| {
        s.add_row(dst, src, k);
        p.add_row(dst, src, k);
        p_inv.add_col(src, dst, &-k);
    };

    for t in 0..nr.min(nc) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                let x = &s.rows[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < s.rows[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        move_pivot(&mut s, &mut p, &mut p_inv, &mut q, t, bi, bj);

        loop {
            let mut clean = true;
            for i in t + 1..nr {
                if s.rows[i][t].is_zero() {
                    continue;
                }
                let k = -(&s.rows[i][t] / &s.rows[t][t]);
                row_add(&mut s, &mut p, &mut p_inv, i, t, &k);
                clean &= s.rows[i][t].is_zero();
            }
            for j in t + 1..nc {
                if s.rows[t][j].is_zero() {
                    continue;
                }
                let k = -(&s.rows[t][j] / &s.rows[t][t]);
                s.add_col(j, t, &k);
                q.add_col(j, t, &k);
                clean &= s.rows[t][j].is_zero();
            }
            if !clean {
                // a remainder smaller than the pivot is left in row or column t
                let mut best = (t, t);
                for i in t + 1..nr {
                    let x = &s.rows[i][t];
                    if !x.is_zero() && x.abs() < s.rows[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..nc {
                    let x = &s.rows[t][j];
                    if !x.is_zero() && x.abs() < s.rows[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                move_pivot(&mut s, &mut p, &mut p_inv, &mut q, t, best.0, best.1);
                continue;
            }
            let bad = (t + 1..nr).find_map(|i| {
                (t + 1..nc).find(|&j| !s.rows[i][j].is_multiple_of(&s.rows[t][t])).map(|_| i)
            });
            match bad {
                Some(i) => row_add(&mut s, &mut p, &mut p_inv, t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.rows[t][t].is_negative() {
            s.negate_row(t);
            p.negate_row(t);
            p_inv.negate_col(t);
        }
        invariants.push(s.rows[t][t].clone());
    }
    SnfResult { p, q, s, invariants, p_inv }
}

fn move_pivot(
    s: &mut IntMat,
    p: &mut IntMat,
    p_inv: &mut IntMat,
    q: &mut IntMat,
    t: usize,
    i: usize,
    j: usize,
) {
    if i != t {
        s.rows.swap(i, t);
        p.rows.swap(i, t);
        p_inv.swap_cols(i, t);
    }
    if j != t {
        s.swap_cols(j, t);
        q.swap_cols(j, t);
    }
}

/// A finitely generated subgroup of `Z^n`, kept as the nonzero rows of its
/// Hermite normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    n: usize,
    basis: Vec<IntVec>,
}

impl Lattice {
    pub fn new(n: usize, gens: &[IntVec]) -> Self {
        if gens.is_empty() {
            return Lattice { n, basis: Vec::new() };
        }
        let (h, _) = hnf(&IntMat::new(n, gens.to_vec()));
        let basis = h.rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        Lattice { n, basis }
    }

    pub fn from_i64(n: usize, gens: &[&[i64]]) -> Self {
        let g: Vec<IntVec> = gens.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::new(n, &g)
    }

    pub fn zero(n: usize) -> Self {
        Lattice { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Lattice { n, basis: IntMat::identity(n).rows }
    }

    pub fn ambient_rank(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IntVec] {
        &self.basis
    }

    /// Integer coordinates of `v` with respect to the Hermite basis.
    pub fn coords(&self, v: &[BigInt]) -> Option<IntVec> {
        let mut w = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("zero basis row");
            let (q, r) = w[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (a, b) in w.iter_mut().zip(row) {
                *a -= &q * b;
            }
            coeffs.push(q);
        }
        w.iter().all(Zero::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coords(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut g = self.basis.clone();
        g.extend(other.basis.iter().cloned());
        Lattice::new(self.n, &g)
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        if self.rank() == 0 || other.rank() == 0 {
            return Lattice::zero(self.n);
        }
        // x·A = y·B  <=>  (x, -y) in the integer left kernel of [A; B]
        let mut stacked = self.basis.clone();
        stacked.extend(other.basis.iter().cloned());
        let m = IntMat::new(self.n, stacked).transpose();
        let ker = lattice_kernel(&m);
        let k = self.rank();
        let vecs: Vec<IntVec> = ker
            .basis
            .iter()
            .map(|c| {
                let mut v = vec![BigInt::zero(); self.n];
                for (ci, row) in c[..k].iter().zip(&self.basis) {
                    for (a, b) in v.iter_mut().zip(row) {
                        *a += ci * b;
                    }
                }
                v
            })
            .collect();
        Lattice::new(self.n, &vecs)
    }

    /// Is `kw ∈ L ⇒ w ∈ L` for all integer `k ≠ 0`?
    pub fn is_pure(&self) -> bool {
        pure_closure(self).already_pure
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(Z^{}; ", self.n)?;
        f.debug_list().entries(self.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).finish()?;
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    ambient: usize,
    basis: Vec<Vec<IntSer>>,
}

/// Integers serialize as JSON numbers when they fit in 64 bits, else strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSer(pub BigInt);

impl Serialize for IntSer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for IntSer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Num(i64),
            Str(String),
        }
        match Either::deserialize(d)? {
            Either::Num(x) => Ok(IntSer(BigInt::from(x))),
            Either::Str(s) => s.parse().map(IntSer).map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for Lattice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LatticeRepr {
            ambient: self.n,
            basis: self.basis.iter().map(|r| r.iter().cloned().map(IntSer).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = LatticeRepr::deserialize(d)?;
        let gens: Vec<IntVec> =
            repr.basis.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
        if gens.iter().any(|g| g.len() != repr.ambient) {
            return Err(serde::de::Error::custom("lattice vector of wrong length"));
        }
        Ok(Lattice::new(repr.ambient, &gens))
    }
}

/// Result of [`pure_closure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureClosure {
    pub closure: Lattice,
    pub complement: Lattice,
    /// The Smith invariants of the input; all equal to 1 iff it was pure.
    pub invariants: Vec<BigInt>,
    pub already_pure: bool,
}

/// Smallest pure sublattice containing `v`, together with a complement.
pub fn pure_closure(v: &Lattice) -> PureClosure {
    let n = v.n;
    if v.rank() == 0 {
        return PureClosure {
            closure: Lattice::zero(n),
            complement: Lattice::full(n),
            invariants: Vec::new(),
            already_pure: true,
        };
    }
    // generators as columns: M = P^{-1} S Q^{-1}, so V = <c_i w_i> for w_i the columns of P^{-1}
    let m = IntMat::from_columns(n, &v.basis);
    let res = snf(&m);
    let k = res.rank();
    let cols: Vec<IntVec> = (0..n).map(|j| res.p_inv.column(j)).collect();
    let already_pure = res.invariants.iter().all(One::is_one);
    PureClosure {
        closure: Lattice::new(n, &cols[..k]),
        complement: Lattice::new(n, &cols[k..]),
        invariants: res.invariants,
        already_pure,
    }
}

/// Why no splitting `Z^n = Z_1 ⊕ Z_2` with `V_i ⊆ Z_i` exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitObstruction {
    /// `V_1 ∩ V_2` is nontrivial; carries a nonzero common vector.
    Intersecting { witness: IntVec },
    /// `W_1 ∩ W_2 = 0` but `⟨W_1, W_2⟩` is not pure; carries its Smith invariants.
    NotPure { invariants: Vec<BigInt> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub z1: Lattice,
    pub z2: Lattice,
}

/// Decides whether `Z^n = Z_1 ⊕ Z_2` with `V_1 ⊆ Z_1`, `V_2 ⊆ Z_2`, and builds one.
pub fn split_or_obstruction(v1: &Lattice, v2: &Lattice) -> Result<Splitting, SplitObstruction> {
    let n = v1.n;
    assert_eq!(n, v2.n, "lattices in different ambient groups");
    let w1 = pure_closure(v1).closure;
    let w2 = pure_closure(v2).closure;
    let common = v1.intersect(v2);
    if let Some(w) = common.basis.first() {
        return Err(SplitObstruction::Intersecting { witness: w.clone() });
    }
    let b = w1.sum(&w2);
    debug_assert_eq!(b.rank(), w1.rank() + w2.rank());
    let closure = pure_closure(&b);
    if !closure.already_pure {
        log::warn!(
            "sublattices meet trivially but their pure closures span a non-pure lattice (invariants {:?})",
            closure.invariants
        );
        return Err(SplitObstruction::NotPure { invariants: closure.invariants });
    }
    Ok(Splitting { z1: w1, z2: w2.sum(&closure.complement) })
}

pub fn split_containing(v1: &Lattice, v2: &Lattice) -> Option<Splitting> {
    split_or_obstruction(v1, v2).ok()
}

/// The search in [`complementary_projection`] would exceed its budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchExhausted;

const PROJECTION_BUDGET: u64 = 1_000_000;

/// Looks for an idempotent `E` on `Z^k` whose rows lie in `r1` while the rows
/// of `I - E` lie in `r2`. In dual terms: `Z^k = A ⊕ B` with `A ⊆ r1` and
/// `B ⊆ r2`.
///
/// The common kernels of each side pin `E` down on a pure sublattice. On a
/// complement the remaining conditions are congruences modulo the exponents
/// of `r_i` inside their pure closures. They are solved one prime power at a
/// time and glued with the Chinese remainder theorem.
pub fn complementary_projection(r1: &Lattice, r2: &Lattice) -> Result<Option<IntMat>, SearchExhausted> {
    let k = r1.n;
    assert_eq!(k, r2.n, "lattices in different ambient groups");
    if r1.sum(r2) != Lattice::full(k) {
        return Ok(None);
    }
    let c1 = annihilator(r1);
    let c2 = annihilator(r2);
    if c1.intersect(&c2).rank() > 0 {
        return Ok(None);
    }
    let closure = pure_closure(&c1.sum(&c2));
    if !closure.already_pure {
        return Ok(None);
    }
    let (n1, n2) = (c1.rank(), c2.rank());
    let e = k - n1 - n2;
    let mut cols = c1.basis.clone();
    cols.extend(c2.basis.iter().cloned());
    cols.extend(closure.complement.basis.iter().cloned());
    let q = IntMat::from_columns(k, &cols);
    let q_inv = unimodular_inverse(&q);
    let blocks = Blocks { n1, n2, e };
    let t1 = times(r1, &q);
    let t2 = times(r2, &q);
    let m = exponent(&t1)?.lcm(&exponent(&t2)?);
    if m > 1 << 30 {
        return Err(SearchExhausted);
    }
    let moduli = prime_powers(m);
    let mut budget = PROJECTION_BUDGET;
    let mut exhausted = false;

    'rank: for r in 0..=e {
        let mut locals = Vec::with_capacity(moduli.len());
        for &(p, a) in &moduli {
            match local_projection(&t1, &t2, blocks, p.pow(a), r, &mut budget) {
                Ok(Some(sol)) => locals.push((p.pow(a), sol)),
                Ok(None) => continue 'rank,
                Err(SearchExhausted) => {
                    exhausted = true;
                    continue 'rank;
                }
            }
        }
        let inner = glue(&locals, blocks, m, r);
        let ok = inner.rows.iter().all(|row| t1.contains(row))
            && IntMat::identity(k).sub(&inner).rows.iter().all(|row| t2.contains(row));
        debug_assert!(ok, "glued projection violates a local condition");
        if ok {
            return Ok(Some(q.mul(&inner).mul(&q_inv)));
        }
    }
    if exhausted {
        Err(SearchExhausted)
    } else {
        Ok(None)
    }
}

/// Block sizes in adapted coordinates: killed by `r1`, killed by `r2`, rest.
#[derive(Clone, Copy)]
struct Blocks {
    n1: usize,
    n2: usize,
    e: usize,
}

/// A solution modulo one prime power: the change of basis diagonalising the
/// idempotent, and the rows of `E` over the two pinned blocks.
struct LocalProjection {
    basis: Vec<Vec<i64>>,
    pinned: Vec<Vec<i64>>,
}

fn local_projection(
    t1: &Lattice,
    t2: &Lattice,
    b: Blocks,
    q: i64,
    r: usize,
    budget: &mut u64,
) -> Result<Option<LocalProjection>, SearchExhausted> {
    let e = b.e;
    let level = Level::new(t1, t2, b, q);
    let tail1 = level.tail(&level.l1);
    let tail2 = level.tail(&level.l2);
    // image rows from the first lattice, kernel rows from the second
    for s in subsets(e, r) {
        let Some(image) = pivoted_rows(&tail1, &s, q) else { continue };
        for t in subsets(e, e - r) {
            let Some(kernel) = pivoted_rows(&tail2, &t, q) else { continue };
            let sizes: Vec<u64> = image.iter().chain(&kernel).map(|c| c.len() as u64).collect();
            let count = sizes.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n)).ok_or(SearchExhausted)?;
            if count > *budget {
                return Err(SearchExhausted);
            }
            *budget -= count;
            for idx in 0..count {
                let mut rest = idx;
                let rows: Vec<Vec<i64>> = image
                    .iter()
                    .chain(&kernel)
                    .zip(&sizes)
                    .map(|(choices, &n)| {
                        let pick = choices[(rest % n) as usize].clone();
                        rest /= n;
                        pick
                    })
                    .collect();
                let det = det_mod(&rows, q);
                if det.gcd(&q) != 1 {
                    continue;
                }
                let basis = inverse_mod(&rows, det, q);
                if let Some(pinned) = level.accepts(&basis, r) {
                    return Ok(Some(LocalProjection { basis, pinned }));
                }
            }
        }
    }
    Ok(None)
}

/// For each position `l` of `s`, every vector of `l` modulo `m` that is 1 at
/// `s[l]` and 0 elsewhere on `s`. `None` when some position has no such
/// vector. The lattice must contain `m Z^e`.
fn pivoted_rows(l: &Lattice, s: &[usize], m: i64) -> Option<Vec<Vec<Vec<i64>>>> {
    let e = l.n;
    let order: Vec<usize> = s.iter().copied().chain((0..e).filter(|i| !s.contains(i))).collect();
    let permuted: Vec<IntVec> = l.basis.iter().map(|v| order.iter().map(|&i| v[i].clone()).collect()).collect();
    let (h, _) = hnf(&IntMat::new(e, permuted));
    let h: Vec<Vec<i64>> = h.rows[..e].iter().map(|row| row.iter().map(|x| x.to_i64().expect("small")).collect()).collect();
    debug_assert!((0..e).all(|i| h[i][i] > 0), "lattice is not of full rank");
    let unpermute = |v: &[i64]| -> Vec<i64> {
        let mut out = vec![0; e];
        for (pos, &i) in order.iter().enumerate() {
            out[i] = v[pos].rem_euclid(m);
        }
        out
    };
    // everything in the lattice that vanishes on `s`, modulo m
    let mut free: Vec<Vec<i64>> = vec![vec![0; e]];
    for (i, row) in h.iter().enumerate().skip(s.len()) {
        let steps = m / row[i];
        free = free
            .iter()
            .flat_map(|base| (0..steps).map(move |c| base.iter().zip(row).map(|(x, y)| (x + c * y) % m).collect()))
            .collect();
    }
    (0..s.len())
        .map(|target| {
            let mut x = vec![0i64; e];
            for i in 0..s.len() {
                let want = (i == target) as i64 - x[i];
                if want % h[i][i] != 0 {
                    return None;
                }
                let c = want / h[i][i];
                for (xj, hj) in x.iter_mut().zip(&h[i]) {
                    *xj = (*xj + c * hj).rem_euclid(m);
                }
            }
            Some(free.iter().map(|f| unpermute(&x.iter().zip(f).map(|(a, b)| a + b).collect::<Vec<_>>())).collect())
        })
        .collect()
}

/// The conditions on a projection, read modulo `m`.
struct Level {
    m: i64,
    b: Blocks,
    l1: Lattice,
    l2: Lattice,
}

impl Level {
    fn new(t1: &Lattice, t2: &Lattice, b: Blocks, m: i64) -> Self {
        let Blocks { n1, n2, .. } = b;
        Level { m, b, l1: widen(t1, m, |j| j >= n1), l2: widen(t2, m, |j| j < n1 || j >= n1 + n2) }
    }

    /// Vectors `x` with `(0, x)` in `l`, the zero padding covering the pinned blocks.
    fn tail(&self, l: &Lattice) -> Lattice {
        let head = self.b.n1 + self.b.n2;
        let (h, _) = hnf(&IntMat::new(l.n, l.basis.clone()));
        let rows: Vec<IntVec> =
            h.rows.iter().filter(|row| row[..head].iter().all(Zero::is_zero)).map(|row| row[head..].to_vec()).collect();
        Lattice::new(self.b.e, &rows)
    }

    fn lift(&self, head: Option<usize>, tail: &[i64], sign: i64) -> IntVec {
        let Blocks { n1, n2, e } = self.b;
        let mut v = vec![BigInt::zero(); n1 + n2 + e];
        if let Some(i) = head {
            v[i] = BigInt::one();
        }
        for (x, t) in v[n1 + n2..].iter_mut().zip(tail) {
            *x = BigInt::from(sign * t);
        }
        v
    }

    /// Rows of `E` over the pinned blocks, when `p · diag(1^r, 0) · p^{-1}`
    /// can be completed to a projection modulo `m`.
    fn accepts(&self, p: &[Vec<i64>], r: usize) -> Option<Vec<Vec<i64>>> {
        let Blocks { n1, n2, e } = self.b;
        let m = self.m;
        let det = det_mod(p, m);
        if det.gcd(&m) != 1 {
            return None;
        }
        let p_inv = inverse_mod(p, det, m);
        let gamma = diagonalised(p, &p_inv, r, m);
        let fits = (0..e).all(|i| {
            let co: Vec<i64> = (0..e).map(|j| (i == j) as i64 - gamma[i][j]).collect();
            self.l1.contains(&self.lift(None, &gamma[i], 1)) && self.l2.contains(&self.lift(None, &co, 1))
        });
        if !fits {
            return None;
        }
        (0..n1 + n2)
            .map(|i| {
                let (lo, hi) = if i < n1 { (0, r) } else { (r, e) };
                span_mod(&p_inv[lo..hi], e, m).find(|a| {
                    if i < n1 {
                        self.l1.contains(&self.lift(None, a, 1)) && self.l2.contains(&self.lift(Some(i), a, -1))
                    } else {
                        self.l1.contains(&self.lift(Some(i), a, 1)) && self.l2.contains(&self.lift(None, a, -1))
                    }
                })
            })
            .collect()
    }
}

/// `l` plus `m` times every coordinate vector selected by `keep`.
fn widen(l: &Lattice, m: i64, keep: impl Fn(usize) -> bool) -> Lattice {
    let mut gens = l.basis.clone();
    for j in (0..l.n).filter(|&j| keep(j)) {
        let mut v = vec![BigInt::zero(); l.n];
        v[j] = BigInt::from(m);
        gens.push(v);
    }
    Lattice::new(l.n, &gens)
}

/// `p · diag(1^r, 0) · p^{-1}` modulo `m`.
fn diagonalised(p: &[Vec<i64>], p_inv: &[Vec<i64>], r: usize, m: i64) -> Vec<Vec<i64>> {
    let e = p.len();
    (0..e)
        .map(|i| (0..e).map(|j| (0..r).map(|l| p[i][l] * p_inv[l][j] % m).sum::<i64>().rem_euclid(m)).collect())
        .collect()
}

/// Every combination modulo `m` of the given rows.
fn span_mod(rows: &[Vec<i64>], e: usize, m: i64) -> impl Iterator<Item = Vec<i64>> + '_ {
    let total = (m as u64).pow(rows.len() as u32);
    (0..total).map(move |idx| {
        let w = digits(idx, rows.len(), m);
        (0..e).map(|j| w.iter().zip(rows).map(|(c, row)| c * row[j] % m).sum::<i64>().rem_euclid(m)).collect()
    })
}

/// Integral adapted-coordinate projection agreeing with every local solution.
fn glue(locals: &[(i64, LocalProjection)], b: Blocks, m: i64, r: usize) -> IntMat {
    let Blocks { n1, n2, e } = b;
    let k = n1 + n2 + e;
    let crt = |pick: &dyn Fn(&LocalProjection) -> i64| -> i64 {
        locals.iter().fold((0i64, 1i64), |(x, md), (pq, sol)| {
            let y = pick(sol).rem_euclid(*pq);
            let t = ((y - x).rem_euclid(*pq) * inv_mod(md % pq, *pq)).rem_euclid(*pq);
            (x + md * t, md * pq)
        })
        .0
    };
    let gamma = if r == 0 {
        IntMat::zeros(e, e)
    } else {
        let mut p: Vec<Vec<i64>> = (0..e).map(|i| (0..e).map(|j| crt(&|s| s.basis[i][j])).collect()).collect();
        // rescaling a column inside the image leaves the idempotent unchanged
        let u = inv_mod(det_mod(&p, m), m);
        for row in p.iter_mut() {
            row[0] = (row[0] * u).rem_euclid(m);
        }
        let lifted = lift_special(&p, m);
        let mut dr = IntMat::zeros(e, e);
        for l in 0..r {
            dr.rows[l][l] = BigInt::one();
        }
        lifted.mul(&dr).mul(&unimodular_inverse(&lifted))
    };
    let co = IntMat::identity(e).sub(&gamma);
    let mut rows = Vec::with_capacity(k);
    for i in 0..n1 + n2 {
        let w: IntVec = (0..e).map(|j| BigInt::from(crt(&|s| s.pinned[i][j]))).collect();
        let side = if i < n1 { &gamma } else { &co };
        let mut row = vec![BigInt::zero(); n1 + n2];
        if i >= n1 {
            row[i] = BigInt::one();
        }
        row.extend(row_times(&w, side));
        rows.push(row);
    }
    for g in &gamma.rows {
        let mut row = vec![BigInt::zero(); n1 + n2];
        row.extend(g.iter().cloned());
        rows.push(row);
    }
    IntMat::new(k, rows)
}

/// Prime factorisation as `(prime, multiplicity)` pairs.
fn prime_powers(mut m: i64) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut a = 0;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Increasing `r`-element subsets of `0..n`.
fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if r > n {
        return Vec::new();
    }
    let mut out = subsets(n - 1, r);
    for mut s in subsets(n - 1, r - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Vectors killed by every row of `l`.
fn annihilator(l: &Lattice) -> Lattice {
    if l.rank() == 0 {
        return Lattice::full(l.n);
    }
    lattice_kernel(&IntMat::new(l.n, l.basis.clone()))
}

fn times(l: &Lattice, q: &IntMat) -> Lattice {
    if l.rank() == 0 {
        return l.clone();
    }
    Lattice::new(l.n, &IntMat::new(l.n, l.basis.clone()).mul(q).rows)
}

/// Exponent of the pure closure of `l` modulo `l`.
fn exponent(l: &Lattice) -> Result<i64, SearchExhausted> {
    if l.rank() == 0 {
        return Ok(1);
    }
    let inv = snf(&IntMat::new(l.n, l.basis.clone())).invariants;
    inv.last().and_then(ToPrimitive::to_i64).filter(|&x| x <= 1 << 30).ok_or(SearchExhausted)
}

fn row_times(w: &[BigInt], m: &IntMat) -> IntVec {
    (0..m.ncols).map(|j| w.iter().zip(&m.rows).map(|(a, r)| a * &r[j]).sum()).collect()
}

fn digits(mut idx: u64, len: usize, m: i64) -> Vec<i64> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = (idx % m as u64) as i64;
        idx /= m as u64;
    }
    out
}

fn reduce(g: &IntMat, m: i64) -> Vec<i64> {
    let mb = BigInt::from(m);
    g.rows.iter().flatten().map(|x| x.mod_floor(&mb).to_i64().expect("small")).collect()
}

fn det_mod(p: &[Vec<i64>], m: i64) -> i64 {
    let n = p.len();
    if n == 0 {
        return 1 % m;
    }
    if n == 1 {
        return p[0][0].rem_euclid(m);
    }
    let mut acc = 0i64;
    for j in 0..n {
        let minor = minor(p, 0, j);
        let term = p[0][j] * det_mod(&minor, m) % m;
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc.rem_euclid(m)
}

fn minor(p: &[Vec<i64>], i: usize, j: usize) -> Vec<Vec<i64>> {
    p.iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
        .collect()
}

fn inv_mod(a: i64, m: i64) -> i64 {
    let g = a.extended_gcd(&m);
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(m)
}

fn inverse_mod(p: &[Vec<i64>], d: i64, m: i64) -> Vec<Vec<i64>> {
    let n = p.len();
    let di = inv_mod(d, m);
    if n == 1 {
        return vec![vec![di]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = det_mod(&minor(p, j, i), m);
                    let c = if (i + j) % 2 == 0 { c } else { -c };
                    (c * di).rem_euclid(m)
                })
                .collect()
        })
        .collect()
}

/// An integer matrix of determinant 1 reducing to `p`, which has determinant
/// 1 modulo `m`.
fn lift_special(p: &[Vec<i64>], m: i64) -> IntMat {
    let n = p.len();
    if n == 1 {
        return IntMat::identity(1);
    }
    let v = primitive_lift(&p.iter().map(|r| r[0]).collect::<Vec<_>>(), m);
    let (_, mut u) = hnf(&IntMat::from_columns(n, &[v]));
    let mut a = unimodular_inverse(&u);
    if a.det().is_negative() {
        for row in a.rows.iter_mut() {
            row[n - 1] = -&row[n - 1];
        }
        for x in u.rows[n - 1].iter_mut() {
            *x = -&*x;
        }
    }
    // a^{-1} p is block upper triangular with 1 in the corner
    let um: Vec<Vec<i64>> = reduce(&u, m).chunks(n).map(<[i64]>::to_vec).collect();
    let b: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|l| um[i][l] * p[l][j] % m).sum::<i64>().rem_euclid(m)).collect()).collect();
    debug_assert!(b[0][0] == 1 % m && (1..n).all(|i| b[i][0] == 0));
    let inner: Vec<Vec<i64>> = b[1..].iter().map(|r| r[1..].to_vec()).collect();
    let lifted = lift_special(&inner, m);
    let mut block = IntMat::identity(n);
    for j in 1..n {
        block.rows[0][j] = BigInt::from(b[0][j]);
        for i in 1..n {
            block.rows[i][j] = lifted.rows[i - 1][j - 1].clone();
        }
    }
    a.mul(&block)
}

/// A primitive integer vector congruent to `col` modulo `m`, assuming the
/// entries of `col` and `m` have no common factor.
fn primitive_lift(col: &[i64], m: i64) -> IntVec {
    let n = col.len();
    let mut v: Vec<i64> = col.iter().map(|x| x.rem_euclid(m)).collect();
    let mut h = v[..n - 1].iter().fold(0i64, |g, x| g.gcd(x));
    if h == 0 {
        v[0] = m;
        h = m;
    }
    let last = v[n - 1];
    let mut t = 0;
    while h.gcd(&(last + t * m)) != 1 {
        t += 1;
    }
    v[n - 1] = last + t * m;
    v.into_iter().map(BigInt::from).collect()
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(q: &IntMat) -> IntMat {
    let (h, u) = hnf(q);
    assert!(h == IntMat::identity(q.nrows()), "matrix is not unimodular");
    u
}

/// `{v ∈ Z^k : M v = 0}` in Hermite form.
pub fn lattice_kernel(m: &IntMat) -> Lattice {
    let k = m.ncols();
    let (h, u) = hnf(&m.transpose());
    let gens: Vec<IntVec> = (0..h.nrows())
        .filter(|&i| h.rows[i].iter().all(Zero::is_zero))
        .map(|i| u.rows[i].clone())
        .collect();
    Lattice::new(k, &gens)
}

/// Clears denominators: returns integer rows and the common scale `D` with
/// `rows = D · input`.
pub fn scale_to_integers(rows: &[QVec]) -> (Vec<IntVec>, BigInt) {
    let d = common_denominator(rows.iter().flatten());
    let ints = rows
        .iter()
        .map(|r| r.iter().map(|x| x.numer() * (&d / x.denom())).collect())
        .collect();
    (ints, d)
}

/// Row-style Hermite form of rational rows: the rows of `H` span the same
/// additive group as the input, and `U` is the unimodular transform.
pub fn rational_hnf(rows: &[QVec], ncols: usize) -> (Vec<QVec>, IntMat) {
    if rows.is_empty() {
        return (Vec::new(), IntMat::identity(0));
    }
    let (ints, d) = scale_to_integers(rows);
    let (h, u) = hnf(&IntMat::new(ncols, ints));
    let back = h
        .rows
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_big_parts(x.clone(), d.clone())).collect())
        .collect();
    (back, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVec {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&IntMat::identity(3));
        assert_eq!(h, IntMat::identity(3));
        assert_eq!(u, IntMat::identity(3));

        let m = IntMat::from_i64(&[&[2, 0], &[0, 3], &[2, 3]]);
        let (h, u) = hnf(&m);
        assert_eq!(u.mul(&m), h);
        assert!(u.is_unimodular());
        assert_eq!(h, IntMat::from_i64(&[&[2, 0], &[0, 3], &[0, 0]]));

        let (h, _) = hnf(&IntMat::from_i64(&[&[0, 1], &[1, 0]]));
        assert_eq!(h, IntMat::identity(2));
    }

    #[test]
    fn snf_examples() {
        let r = snf(&IntMat::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(r.invariants, iv(&[1, 6]));
        let r = snf(&IntMat::zeros(2, 3));
        assert!(r.invariants.is_empty());
        assert!(r.s.is_zero());
        // [[p, m], [-q, l]] with lp + mq = 1, here p = 2, q = 3, l = -1, m = 1
        let r = snf(&IntMat::from_i64(&[&[2, 1], &[-3, -1]]));
        assert_eq!(r.invariants, iv(&[1, 1]));
    }

    #[test]
    fn snf_traces_the_expected_primitive_column() {
        let m = IntMat::from_i64(&[&[2, 0], &[0, 3]]);
        let r = snf(&m);
        assert_eq!(r.p.mul(&m).mul(&r.q), r.s);
        assert_eq!(r.p.mul(&r.p_inv), IntMat::identity(2));
        assert_eq!(r.p_inv.column(0), iv(&[-2, 3]));
    }

    #[test]
    fn pure_closure_examples() {
        let pc = pure_closure(&Lattice::from_i64(2, &[&[2, 0]]));
        assert_eq!(pc.closure, Lattice::from_i64(2, &[&[1, 0]]));
        assert_eq!(pc.complement, Lattice::from_i64(2, &[&[0, 1]]));
        assert!(!pc.already_pure);

        let pc = pure_closure(&Lattice::from_i64(2, &[&[1, 0]]));
        assert!(pc.already_pure);
        assert_eq!(pc.closure, Lattice::from_i64(2, &[&[1, 0]]));

        let pc = pure_closure(&Lattice::from_i64(2, &[&[2, 2], &[0, 4]]));
        assert_eq!(pc.closure, Lattice::full(2));
        assert_eq!(pc.invariants, iv(&[2, 4]));
    }

    #[test]
    fn split_examples() {
        let s = split_containing(&Lattice::from_i64(2, &[&[1, 0]]), &Lattice::from_i64(2, &[&[0, 1]])).unwrap();
        assert_eq!(s.z1, Lattice::from_i64(2, &[&[1, 0]]));
        assert_eq!(s.z2, Lattice::from_i64(2, &[&[0, 1]]));

        let s = split_containing(&Lattice::from_i64(2, &[&[2, 0]]), &Lattice::from_i64(2, &[&[1, 1]])).unwrap();
        assert_eq!(s.z1, Lattice::from_i64(2, &[&[1, 0]]));
        assert_eq!(s.z2, Lattice::from_i64(2, &[&[1, 1]]));

        let out = split_or_obstruction(&Lattice::from_i64(2, &[&[2, 1]]), &Lattice::from_i64(2, &[&[0, 1]]));
        assert!(matches!(out, Err(SplitObstruction::NotPure { .. })));

        let out = split_or_obstruction(&Lattice::from_i64(2, &[&[2, 0]]), &Lattice::from_i64(2, &[&[3, 0]]));
        match out {
            Err(SplitObstruction::Intersecting { witness }) => assert_eq!(witness, iv(&[6, 0])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(lattice_kernel(&IntMat::from_i64(&[&[1, 1]])), Lattice::from_i64(2, &[&[1, -1]]));
        assert_eq!(lattice_kernel(&IntMat::identity(3)).rank(), 0);
        assert_eq!(lattice_kernel(&IntMat::from_i64(&[&[2, -1], &[-2, 1]])), Lattice::from_i64(2, &[&[1, 2]]));
    }

    #[test]
    fn rational_hnf_keeps_the_group() {
        let half = Rational::new(1, 2);
        let rows = vec![vec![half.clone(), Rational::zero()], vec![Rational::one(), Rational::one()]];
        let (h, u) = rational_hnf(&rows, 2);
        assert!(u.is_unimodular());
        assert_eq!(h[0], vec![half, Rational::zero()]);
        assert_eq!(h[1], vec![Rational::zero(), Rational::one()]);
    }

    fn check_projection(e: &IntMat, r1: &Lattice, r2: &Lattice) {
        let k = r1.ambient_rank();
        assert_eq!(e.mul(e), *e);
        let co = IntMat::identity(k).sub(e);
        assert!(e.rows().iter().all(|r| r1.contains(r)));
        assert!(co.rows().iter().all(|r| r2.contains(r)));
    }

    #[test]
    fn projection_blocked_by_coprime_divisibility() {
        // one side sees the last coordinate only through 2, the other through 3
        let r1 = Lattice::from_i64(3, &[&[0, 1, 0], &[0, 0, 2]]);
        let r2 = Lattice::from_i64(3, &[&[1, 0, 0], &[0, 0, 3]]);
        assert_eq!(complementary_projection(&r1, &r2), Ok(None));
    }

    #[test]
    fn projection_found_when_one_side_is_pure() {
        let r1 = Lattice::from_i64(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let r2 = Lattice::from_i64(3, &[&[0, 0, 1], &[0, 3, 0]]);
        let e = complementary_projection(&r1, &r2).unwrap().unwrap();
        check_projection(&e, &r1, &r2);
        // a skewed copy of the same configuration
        let q = IntMat::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[1, 1, 1]]);
        let (s1, s2) = (times(&r1, &q), times(&r2, &q));
        let e = complementary_projection(&s1, &s2).unwrap().unwrap();
        check_projection(&e, &s1, &s2);
    }

    #[test]
    fn projection_matches_small_search() {
        let range = -2..=2i64;
        let mut idempotents = Vec::new();
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                for c in -3..=3i64 {
                    for d in -3..=3i64 {
                        let e = IntMat::from_i64(&[&[a, b], &[c, d]]);
                        if e.mul(&e) == e {
                            idempotents.push(e);
                        }
                    }
                }
            }
        }
        let vecs: Vec<[i64; 2]> = range.clone().flat_map(|x| range.clone().map(move |y| [x, y])).collect();
        let lattice = |i: usize, j: usize| Lattice::from_i64(2, &[&vecs[i][..], &vecs[j][..]]);
        let mut found = 0;
        for i in (0..vecs.len()).step_by(3) {
            for j in (i..vecs.len()).step_by(4) {
                for a in (0..vecs.len()).step_by(5) {
                    for b in (a..vecs.len()).step_by(2) {
                        let (r1, r2) = (lattice(i, j), lattice(a, b));
                        let got = complementary_projection(&r1, &r2).unwrap();
                        let brute = idempotents.iter().any(|e| {
                            let co = IntMat::identity(2).sub(e);
                            e.rows().iter().all(|r| r1.contains(r)) && co.rows().iter().all(|r| r2.contains(r))
                        });
                        if let Some(e) = &got {
                            check_projection(e, &r1, &r2);
                            found += 1;
                        }
                        assert!(!brute || got.is_some(), "{r1:?} {r2:?}");
                    }
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn special_lift_reduces_correctly() {
        let p = vec![vec![2, 3], vec![1, 5]];
        // det = 7 = 1 mod 6
        let l = lift_special(&p, 6);
        assert!(l.det().is_one());
        assert_eq!(reduce(&l, 6), vec![2, 3, 1, 5]);
        let p = vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]];
        let l = lift_special(&p, 4);
        assert!(l.det().is_one());
        assert_eq!(reduce(&l, 4), vec![0, 0, 1, 1, 0, 0, 0, 1, 0]);
    }
}
