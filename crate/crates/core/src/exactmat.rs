//! Exact rational square matrices, with the unitriangular/nilpotent
//! refinements used to house group elements and Lie algebra elements.
//!
//! `log` and `exp` are finite sums because a strictly upper-triangular
//! `r × r` matrix satisfies `u^r = 0`.

use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::linalg::QVec;
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMat {
    n: usize,
    data: Vec<Rational>,
}

impl RatMat {
    pub fn zero(n: usize) -> Self {
        RatMat { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("matrix must be square"));
        }
        Ok(RatMat { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect())
    }

    /// `I + E_{ij}` scaled: the identity plus `value` at `(i, j)`.
    pub fn elementary(n: usize, i: usize, j: usize, value: Rational) -> Self {
        let mut m = Self::identity(n);
        m.set(i, j, value);
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let x = self.get(i, j);
                if i == j {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            })
        })
    }

    pub fn is_unitriangular(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i).is_one() && (0..i).all(|j| self.get(i, j).is_zero())
        })
    }

    pub fn is_strictly_upper(&self) -> bool {
        (0..self.n).all(|i| (0..=i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.n, other.n, "size mismatch");
        let n = self.n;
        let mut out = RatMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.n, other.n, "size mismatch");
        RatMat { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.n, other.n, "size mismatch");
        RatMat { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> RatMat {
        RatMat { n: self.n, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn transpose(&self) -> RatMat {
        let mut out = RatMat::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[Rational]) -> QVec {
        (0..self.n).map(|i| crate::linalg::dot(&self.data[i * self.n..(i + 1) * self.n], v)).collect()
    }

    /// Row-major flattening, used when matrices are treated as vectors.
    pub fn to_vec(&self) -> QVec {
        self.data.clone()
    }

    pub fn from_vec(n: usize, v: QVec) -> RatMat {
        assert_eq!(v.len(), n * n);
        RatMat { n, data: v }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &RatMat) -> RatMat {
        let n = self.n + other.n;
        let mut out = RatMat::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                out.set(self.n + i, self.n + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn block(&self, start: usize, len: usize) -> RatMat {
        let mut out = RatMat::zero(len);
        for i in 0..len {
            for j in 0..len {
                out.set(i, j, self.get(start + i, start + j).clone());
            }
        }
        out
    }

    /// Strictly-upper entries, row by row.
    pub fn upper_entries(&self) -> QVec {
        let n = self.n;
        let mut v = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for i in 0..n {
            for j in i + 1..n {
                v.push(self.get(i, j).clone());
            }
        }
        v
    }
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.data.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for RatMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Rational>>::deserialize(d)?;
        RatMat::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Upper unitriangular matrix: a group element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniMat(RatMat);

/// Strictly upper-triangular matrix: a Lie algebra element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NilMat(RatMat);

impl Deref for UniMat {
    type Target = RatMat;
    fn deref(&self) -> &RatMat {
        &self.0
    }
}

impl Deref for NilMat {
    type Target = RatMat;
    fn deref(&self) -> &RatMat {
        &self.0
    }
}

impl fmt::Debug for UniMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Debug for NilMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl Serialize for UniMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        UniMat::new(RatMat::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for NilMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NilMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        NilMat::new(RatMat::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl UniMat {
    pub fn new(m: RatMat) -> Result<Self> {
        if !m.is_unitriangular() {
            return Err(invalid("matrix is not upper unitriangular"));
        }
        Ok(UniMat(m))
    }

    pub fn identity(n: usize) -> Self {
        UniMat(RatMat::identity(n))
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(RatMat::from_int_rows(rows)?)
    }

    pub fn into_inner(self) -> RatMat {
        self.0
    }

    pub fn mul(&self, other: &UniMat) -> UniMat {
        UniMat(self.0.mul(&other.0))
    }

    /// `x - 1`.
    pub fn unipotent_part(&self) -> NilMat {
        NilMat(self.0.sub(&RatMat::identity(self.n)))
    }

    pub fn inverse(&self) -> UniMat {
        // (1 + u)^{-1} = 1 - u + u^2 - ...
        let u = self.unipotent_part();
        let neg = u.0.scale(&Rational::from_int(-1));
        let n = self.n;
        let mut acc = RatMat::identity(n);
        for _ in 1..n {
            acc = RatMat::identity(n).add(&neg.mul(&acc));
        }
        UniMat(acc)
    }

    pub fn pow(&self, e: i64) -> UniMat {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut k = e.unsigned_abs();
        if k > 64 {
            return mat_exp(&mat_log(self).scale(&Rational::from_int(e)));
        }
        let mut acc = UniMat::identity(self.n);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn pow_big(&self, e: &BigInt) -> UniMat {
        match e.to_i64() {
            Some(small) => self.pow(small),
            None => mat_exp(&mat_log(self).scale(&Rational::from_bigint(e.clone()))),
        }
    }

    /// `self^q` for rational `q`, the unique element of the rational closure.
    pub fn pow_rational(&self, q: &Rational) -> UniMat {
        if let Some(i) = q.to_i64() {
            return self.pow(i);
        }
        mat_exp(&mat_log(self).scale(q))
    }

    /// Conjugate `y^{-1} self y`.
    pub fn conj(&self, y: &UniMat) -> UniMat {
        y.inverse().mul(self).mul(y)
    }

    pub fn direct_sum(&self, other: &UniMat) -> UniMat {
        UniMat(self.0.direct_sum(&other.0))
    }

    pub fn block(&self, start: usize, len: usize) -> UniMat {
        UniMat(self.0.block(start, len))
    }
}

impl NilMat {
    pub fn new(m: RatMat) -> Result<Self> {
        if !m.is_strictly_upper() {
            return Err(invalid("matrix is not strictly upper triangular"));
        }
        Ok(NilMat(m))
    }

    pub fn zero(n: usize) -> Self {
        NilMat(RatMat::zero(n))
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(RatMat::from_int_rows(rows)?)
    }

    /// Rebuilds from strictly-upper entries listed row by row.
    pub fn from_upper_entries(n: usize, v: &[Rational]) -> Self {
        let mut m = RatMat::zero(n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, v[k].clone());
                k += 1;
            }
        }
        NilMat(m)
    }

    pub fn into_inner(self) -> RatMat {
        self.0
    }

    pub fn add(&self, other: &NilMat) -> NilMat {
        NilMat(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &NilMat) -> NilMat {
        NilMat(self.0.sub(&other.0))
    }

    pub fn scale(&self, c: &Rational) -> NilMat {
        NilMat(self.0.scale(c))
    }

    pub fn mul(&self, other: &NilMat) -> NilMat {
        NilMat(self.0.mul(&other.0))
    }

    pub fn direct_sum(&self, other: &NilMat) -> NilMat {
        NilMat(self.0.direct_sum(&other.0))
    }

    pub fn block(&self, start: usize, len: usize) -> NilMat {
        NilMat(self.0.block(start, len))
    }
}

/// `log(x) = u - u^2/2 + u^3/3 - ...` with `u = x - 1`.
pub fn mat_log(x: &UniMat) -> NilMat {
    let n = x.n;
    let u = x.unipotent_part();
    if n < 2 || u.is_zero() {
        return NilMat::zero(n);
    }
    // Horner: u (c1 + u (c2 + u (c3 + ...))), c_k = (-1)^{k+1}/k
    let coef = |k: usize| {
        let c = Rational::new(1, k as i64);
        if k.is_multiple_of(2) {
            -c
        } else {
            c
        }
    };
    let mut acc = RatMat::identity(n).scale(&coef(n - 1));
    for k in (1..n - 1).rev() {
        acc = RatMat::identity(n).scale(&coef(k)).add(&u.0.mul(&acc));
    }
    NilMat(u.0.mul(&acc))
}

/// `exp(u) = 1 + u + u^2/2! + ...`.
pub fn mat_exp(u: &NilMat) -> UniMat {
    let n = u.n;
    if u.is_zero() {
        return UniMat::identity(n);
    }
    // Horner: 1 + u (1 + u/2 (1 + u/3 (...)))
    let mut acc = RatMat::identity(n);
    for k in (1..n).rev() {
        acc = RatMat::identity(n).add(&u.0.mul(&acc).scale(&Rational::new(1, k as i64)));
    }
    UniMat(acc)
}

pub fn mat_log_checked(x: &RatMat) -> Result<NilMat> {
    Ok(mat_log(&UniMat::new(x.clone())?))
}

pub fn mat_exp_checked(u: &RatMat) -> Result<UniMat> {
    Ok(mat_exp(&NilMat::new(u.clone())?))
}

/// The unique unitriangular `n`-th root.
pub fn mat_root(x: &UniMat, n: i64) -> Result<UniMat> {
    if n <= 0 {
        return Err(invalid("root order must be positive"));
    }
    Ok(mat_exp(&mat_log(x).scale(&Rational::new(1, n))))
}

pub fn lie_bracket(u: &NilMat, v: &NilMat) -> Result<NilMat> {
    if u.size() != v.size() {
        return Err(invalid(format!("bracket of sizes {} and {}", u.size(), v.size())));
    }
    Ok(NilMat(u.0.mul(&v.0).sub(&v.0.mul(&u.0))))
}

/// Group commutator `[x, y] = x^{-1} y^{-1} x y`.
pub fn commutator(x: &UniMat, y: &UniMat) -> UniMat {
    x.inverse().mul(&y.inverse()).mul(x).mul(y)
}
