//! Univariate polynomials over the rationals: Euclidean arithmetic, minimal
//! polynomials of matrices, and a factor search sufficient to split a
//! polynomial into coprime parts.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactmat::RatMat;
use crate::linalg::{Frame, QVec};
use crate::rational::{common_denominator, Rational};

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![Rational::one()])
    }

    /// `x - a`
    pub fn linear(a: &Rational) -> Self {
        Poly(vec![-a, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().recip();
        Poly(self.0.iter().map(|c| c * &inv).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let z = Rational::zero();
        Poly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + other.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let z = Rational::zero();
        Poly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) - other.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.0.clone();
        let dd = d.degree();
        if r.len() < d.0.len() {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lead().recip();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                r[k + j] -= &(&c * dj);
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_rem(self).1.is_zero()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * &Rational::from_int(i as i64)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_mat(&self, a: &RatMat) -> RatMat {
        let n = a.size();
        let mut acc = RatMat::zero(n);
        for c in self.0.iter().rev() {
            acc = acc.mul(a).add(&RatMat::identity(n).scale(c));
        }
        acc
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, u, v)` with `u·self + v·other = g = gcd`.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = if r0.is_zero() { Rational::one() } else { r0.lead().recip() };
        let scale = |p: &Poly| Poly::new(p.0.iter().map(|c| c * &inv).collect());
        (scale(&r0), scale(&s0), scale(&t0))
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Primitive integer polynomial with positive leading coefficient.
    fn primitive_integer(&self) -> Vec<BigInt> {
        let d = common_denominator(self.0.iter());
        let ints: Vec<BigInt> = self.0.iter().map(|c| c.numer() * (&d / c.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let sign = if ints.last().is_some_and(|x| x.is_negative()) { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|x| x / &g * &sign).collect()
    }

    /// A monic factor of degree in `1..degree`, if the search finds one.
    ///
    /// Rational roots are tried first; higher-degree factors are found by
    /// interpolating through divisors of values at small integer points.
    /// Returns `None` when the polynomial is irreducible or when the divisor
    /// enumeration exceeds its budget (logged).
    pub fn find_factor(&self) -> Option<Poly> {
        if self.degree() < 2 {
            return None;
        }
        if let Some(r) = self.rational_root() {
            return Some(Poly::linear(&r));
        }
        let f = self.primitive_integer();
        for k in 2..=self.degree() / 2 {
            match kronecker_factor(&f, k) {
                Search::Found(h) => return Some(h.monic()),
                Search::None => {}
                Search::Budget => {
                    log::warn!("factor search budget exhausted at degree {k} for {self:?}");
                    return None;
                }
            }
        }
        None
    }

    pub fn rational_root(&self) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        if self.0[0].is_zero() {
            return Some(Rational::zero());
        }
        let f = self.primitive_integer();
        let a0 = f[0].abs();
        let an = f.last().unwrap().abs();
        for q in divisors(&an)? {
            for p in divisors(&a0)? {
                for sign in [1, -1] {
                    let r = Rational::from_big_parts(&p * sign, q.clone());
                    if self.eval(&r).is_zero() {
                        return Some(r);
                    }
                }
            }
        }
        None
    }

    /// Is there no factorization into nonconstant factors? Only exact when
    /// the factor search completes within budget.
    pub fn is_irreducible(&self) -> bool {
        self.degree() >= 1 && self.find_factor().is_none()
    }

    /// Splits into two nonconstant coprime monic factors when the polynomial
    /// is not a power of a single irreducible.
    pub fn coprime_split(&self) -> Option<(Poly, Poly)> {
        let s = self.squarefree_part();
        let h = s.find_factor()?;
        // h-primary part of self
        let mut f = Poly::one();
        let mut rest = self.monic();
        loop {
            let g = rest.gcd(&h);
            if g.is_constant() {
                break;
            }
            f = f.mul(&g);
            rest = rest.div_rem(&g).0;
        }
        if f.is_constant() || rest.is_constant() {
            return None;
        }
        Some((f.monic(), rest.monic()))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

const DIVISOR_LIMIT: u64 = 1 << 40;
const COMBINATION_BUDGET: usize = 2_000_000;

/// Positive divisors by trial division; `None` beyond the size limit.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64().filter(|&n| n <= DIVISOR_LIMIT)?;
    if n == 0 {
        return Some(vec![BigInt::one()]);
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

enum Search {
    Found(Poly),
    None,
    Budget,
}

fn eval_int(f: &[BigInt], x: i64) -> BigInt {
    let x = BigInt::from(x);
    f.iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c)
}

/// Kronecker's method: look for an integer factor of exact degree `k`.
fn kronecker_factor(f: &[BigInt], k: usize) -> Search {
    let target = Poly::new(f.iter().map(|c| Rational::from_bigint(c.clone())).collect());
    let mut points = Vec::new();
    let mut candidates = Vec::new();
    let mut x = 0i64;
    while points.len() <= k {
        let v = eval_int(f, x);
        if !v.is_zero() {
            let Some(divs) = divisors(&v) else { return Search::Budget };
            let signed: Vec<BigInt> = if points.is_empty() {
                divs
            } else {
                divs.iter().flat_map(|d| [d.clone(), -d]).collect()
            };
            points.push(x);
            candidates.push(signed);
        }
        x = if x <= 0 { 1 - x } else { -x };
    }
    let total = candidates.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    if total.is_none_or(|t| t > COMBINATION_BUDGET) {
        return Search::Budget;
    }
    let xs: Vec<Rational> = points.iter().map(|&p| Rational::from_int(p)).collect();
    let mut idx = vec![0usize; candidates.len()];
    loop {
        let ys: Vec<Rational> =
            idx.iter().zip(&candidates).map(|(&i, c)| Rational::from_bigint(c[i].clone())).collect();
        let h = interpolate(&xs, &ys);
        if h.degree() == k && h.coeffs().iter().all(Rational::is_integer) && h.divides(&target) {
            return Search::Found(h);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Search::None;
            }
            idx[pos] += 1;
            if idx[pos] < candidates[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Lagrange interpolation through `(xs[i], ys[i])`.
fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
    let mut out = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Poly::one();
        let mut denom = Rational::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = basis.mul(&Poly::linear(xj));
                denom *= &(xi - xj);
            }
        }
        let c = yi / &denom;
        out = out.add(&Poly::new(basis.0.iter().map(|b| b * &c).collect()));
    }
    out
}

/// Minimal polynomial of a square matrix, found by the first linear
/// dependence among its powers.
pub fn min_poly(a: &RatMat) -> Poly {
    let n = a.size();
    let mut powers: Vec<QVec> = vec![RatMat::identity(n).to_vec()];
    let mut cur = RatMat::identity(n);
    loop {
        cur = cur.mul(a);
        let v = cur.to_vec();
        let frame = Frame::new(n * n, powers.clone()).expect("powers below the minimal degree are independent");
        if let Some(c) = frame.coords(&v) {
            let mut coeffs: Vec<Rational> = c.iter().map(|x| -x).collect();
            coeffs.push(Rational::one());
            return Poly::new(coeffs);
        }
        powers.push(v);
    }
}

/// Minimal polynomial of `a` modulo a subspace of the enclosing algebra: the
/// least monic `m` with `m(a)` in `modulus`, all matrices flattened.
pub fn min_poly_modulo(a: &RatMat, modulus: &crate::linalg::Span) -> Poly {
    let n = a.size();
    let reduce = |m: &RatMat| modulus.residual(&m.to_vec());
    let mut powers: Vec<QVec> = Vec::new();
    let mut cur = RatMat::identity(n);
    loop {
        let v = reduce(&cur);
        if powers.is_empty() && crate::linalg::is_zero_vec(&v) {
            return Poly::one();
        }
        if !powers.is_empty() {
            let frame = Frame::new(n * n, powers.clone()).expect("independent powers");
            if let Some(c) = frame.coords(&v) {
                let mut coeffs: Vec<Rational> = c.iter().map(|x| -x).collect();
                coeffs.push(Rational::one());
                return Poly::new(coeffs);
            }
        }
        powers.push(v);
        cur = cur.mul(a);
    }
}

/// The idempotent `u(a)·f(a)` attached to a coprime split `m = f·g` of the
/// minimal polynomial of `a`, where `u·f + v·g = 1`.
pub fn splitting_idempotent(a: &RatMat, f: &Poly, g: &Poly) -> RatMat {
    let (one, u, _) = f.ext_gcd(g);
    debug_assert_eq!(one, Poly::one());
    u.mul(f).eval_mat(a)
}
