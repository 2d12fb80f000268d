//! Exact linear algebra over the rationals on row vectors.
//!
//! Subspaces are carried in reduced row echelon form, which makes their
//! representation canonical.

use crate::rational::Rational;

pub type QVec = Vec<Rational>;

pub fn zero_vec(n: usize) -> QVec {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

pub fn add_scaled(target: &mut [Rational], coef: &Rational, v: &[Rational]) {
    if coef.is_zero() {
        return;
    }
    for (t, x) in target.iter_mut().zip(v) {
        if !x.is_zero() {
            *t += &(coef * x);
        }
    }
}

pub fn scale_vec(coef: &Rational, v: &[Rational]) -> QVec {
    v.iter().map(|x| coef * x).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// `coeffs · rows`, a linear combination of row vectors of length `n`.
pub fn combine(coeffs: &[Rational], rows: &[QVec], n: usize) -> QVec {
    let mut out = zero_vec(n);
    for (c, r) in coeffs.iter().zip(rows) {
        add_scaled(&mut out, c, r);
    }
    out
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVec], ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        if !inv.is_one() {
            for x in m[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = -&row[col];
                add_scaled(row, &f, &pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : A x = 0}` for `A` given by its rows.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (r, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![None; ncols];
    for (i, &p) in pivots.iter().enumerate() {
        is_pivot[p] = Some(i);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = zero_vec(ncols);
        v[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -&r[i][free];
        }
        basis.push(v);
    }
    basis
}

/// Basis of `{y : y A = 0}`: the left kernel of the matrix whose rows are given.
pub fn left_nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    nullspace(&transpose(rows, ncols), rows.len())
}

pub fn transpose(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    (0..ncols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

/// A subspace of `Q^n` in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    n: usize,
    rows: Vec<QVec>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn new(n: usize, vectors: &[QVec]) -> Self {
        let (rows, pivots) = rref(vectors, n);
        Span { n, rows, pivots }
    }

    pub fn zero(n: usize) -> Self {
        Span { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Span { n, rows: (0..n).map(|i| unit_vec(n, i)).collect(), pivots: (0..n).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[QVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Component of `v` outside the span, after elimination against the echelon basis.
    pub fn residual(&self, v: &[Rational]) -> QVec {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = -&w[p];
                add_scaled(&mut w, &f, row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        is_zero_vec(&self.residual(v))
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Coordinates of `v` with respect to the echelon basis, if `v` lies in the span.
    pub fn echelon_coords(&self, v: &[Rational]) -> Option<QVec> {
        let c: QVec = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let back = combine(&c, &self.rows, self.n);
        (back.as_slice() == v).then_some(c)
    }

    pub fn sum(&self, other: &Span) -> Span {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Span::new(self.n, &all)
    }

    pub fn intersect(&self, other: &Span) -> Span {
        if self.dim() == 0 || other.dim() == 0 {
            return Span::zero(self.n);
        }
        // a·A = b·B  <=>  (a, -b) in the left kernel of [A; B]
        let mut stacked = self.rows.clone();
        stacked.extend(other.rows.iter().cloned());
        let kernel = left_nullspace(&stacked, self.n);
        let k = self.dim();
        let vecs: Vec<QVec> =
            kernel.iter().map(|c| combine(&c[..k], &self.rows, self.n)).collect();
        Span::new(self.n, &vecs)
    }

    /// Extends the span's basis by standard unit vectors to a basis of a complement.
    pub fn complement(&self) -> Span {
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let vecs: Vec<QVec> =
            (0..self.n).filter(|&i| !is_pivot[i]).map(|i| unit_vec(self.n, i)).collect();
        Span::new(self.n, &vecs)
    }
}

/// Coordinates with respect to an arbitrary (ordered) independent family.
#[derive(Clone, Debug)]
pub struct Frame {
    basis: Vec<QVec>,
    echelon: Span,
    /// `to_basis[k]` expresses echelon row `k` in terms of `basis`.
    to_basis: Vec<QVec>,
}

impl Frame {
    /// Fails (returns `None`) if the family is dependent.
    pub fn new(n: usize, basis: Vec<QVec>) -> Option<Self> {
        let k = basis.len();
        // Augment each vector with an identity block to track the transform.
        let aug: Vec<QVec> = basis
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut row = v.clone();
                row.extend(unit_vec(k, i));
                row
            })
            .collect();
        let (r, pivots) = rref(&aug, n + k);
        if pivots.iter().take_while(|&&p| p < n).count() < k {
            return None;
        }
        let rows: Vec<QVec> = r.iter().map(|row| row[..n].to_vec()).collect();
        let to_basis: Vec<QVec> = r.iter().map(|row| row[n..].to_vec()).collect();
        Some(Frame { basis, echelon: Span { n, rows, pivots }, to_basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn span(&self) -> &Span {
        &self.echelon
    }

    pub fn coords(&self, v: &[Rational]) -> Option<QVec> {
        let c = self.echelon.echelon_coords(v)?;
        Some(combine(&c, &self.to_basis, self.basis.len()))
    }

    pub fn vector(&self, coords: &[Rational]) -> QVec {
        combine(coords, &self.basis, self.echelon.n)
    }
}
