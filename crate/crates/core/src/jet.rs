//! Forward-mode automatic differentiation over truncated Taylor jets.
//!
//! [`Jet2`] carries a value, its gradient and its (packed, symmetric) Hessian
//! with respect to a fixed set of seeded directions. [`Dual`] is the
//! first-order counterpart. Both are generic over the coefficient type, so
//! jets nest: `Jet2<Jet2<f64>>` differentiates twice with respect to two
//! independent seedings and yields fourth-order mixed partials.
//!
//! A jet with zero directions is a constant and combines with jets of any
//! width.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar field used by every metric and curvature routine.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;

    /// Real part: the underlying `f64` value with all derivative parts dropped.
    fn re(&self) -> f64;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn recip(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn powi(self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powi(self, k: u32) -> Self {
        f64::powi(self, k as i32)
    }
}

/// Dot product of two equally long slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (u, v)| acc + u.clone() * v.clone())
}

#[inline]
fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Index of `(i, j)` in a packed upper-triangular row-major `n x n` matrix.
#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Second-order jet: value, gradient and Hessian in `n` seeded directions.
///
/// Storage is `[value, grad.., hess upper triangle row-major..]`.
#[derive(Clone, PartialEq)]
pub struct Jet2<T> {
    n: usize,
    c: Vec<T>,
}

impl<T: Scalar> Jet2<T> {
    pub fn constant(v: T) -> Self {
        Jet2 { n: 0, c: vec![v] }
    }

    /// Independent variable `v` seeded along direction `dir` of `n`.
    pub fn variable(v: T, dir: usize, n: usize) -> Self {
        assert!(dir < n, "direction {dir} out of range for {n} directions");
        let mut c = vec![T::zero(); 1 + n + tri_len(n)];
        c[0] = v;
        c[1 + dir] = T::one();
        Jet2 { n, c }
    }

    /// Seeds every entry of `values` as its own direction, offset by `first`
    /// within `n` total directions.
    pub fn seed(values: &[T], first: usize, n: usize) -> Vec<Self> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Self::variable(v.clone(), first + i, n))
            .collect()
    }

    pub fn lift(values: &[T]) -> Vec<Self> {
        values.iter().cloned().map(Self::constant).collect()
    }

    pub fn directions(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> &T {
        &self.c[0]
    }

    pub fn grad(&self, i: usize) -> T {
        if self.n == 0 {
            T::zero()
        } else {
            self.c[1 + i].clone()
        }
    }

    pub fn hess(&self, i: usize, j: usize) -> T {
        if self.n == 0 {
            T::zero()
        } else {
            self.c[1 + self.n + packed(self.n, i, j)].clone()
        }
    }

    pub fn into_value(self) -> T {
        self.c.into_iter().next().expect("jet storage is never empty")
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value()`.
    fn chain(&self, f0: T, f1: T, f2: T) -> Self {
        let n = self.n;
        if n == 0 {
            return Jet2::constant(f0);
        }
        let mut c = Vec::with_capacity(self.c.len());
        c.push(f0);
        for i in 0..n {
            c.push(f1.clone() * self.c[1 + i].clone());
        }
        for i in 0..n {
            let gi = self.c[1 + i].clone();
            for j in i..n {
                let h = self.c[1 + n + packed(n, i, j)].clone();
                c.push(f1.clone() * h + f2.clone() * gi.clone() * self.c[1 + j].clone());
            }
        }
        Jet2 { n, c }
    }

    fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Jet2 {
            n: self.n,
            c: self.c.iter().map(f).collect(),
        }
    }

    fn zip(self, rhs: Self, f: impl Fn(T, T) -> T) -> Self {
        match (self.n, rhs.n) {
            (a, b) if a == b => Jet2 {
                n: a,
                c: self.c.into_iter().zip(rhs.c).map(|(x, y)| f(x, y)).collect(),
            },
            (0, _) => {
                let v = self.into_value();
                let mut c = rhs.c;
                let first = c[0].clone();
                c[0] = f(v, first);
                for x in c.iter_mut().skip(1) {
                    *x = f(T::zero(), x.clone());
                }
                Jet2 { n: rhs.n, c }
            }
            (_, 0) => {
                let v = rhs.into_value();
                let mut c = self.c;
                let first = c[0].clone();
                c[0] = f(first, v);
                for x in c.iter_mut().skip(1) {
                    *x = f(x.clone(), T::zero());
                }
                Jet2 { n: self.n, c }
            }
            (a, b) => panic!("jet width mismatch: {a} vs {b}"),
        }
    }
}

impl<T: Scalar> fmt::Debug for Jet2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("n", &self.n)
            .field("c", &self.c)
            .finish()
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|a| -a.clone())
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if rhs.n == 0 {
            let v = rhs.into_value();
            return self.map(|a| a.clone() * v.clone());
        }
        if self.n == 0 {
            let v = self.into_value();
            return rhs.map(|a| a.clone() * v.clone());
        }
        assert_eq!(self.n, rhs.n, "jet width mismatch");
        let n = self.n;
        let (a, b) = (&self.c, &rhs.c);
        let (a0, b0) = (a[0].clone(), b[0].clone());
        let mut c = Vec::with_capacity(a.len());
        c.push(a0.clone() * b0.clone());
        for i in 0..n {
            c.push(a0.clone() * b[1 + i].clone() + b0.clone() * a[1 + i].clone());
        }
        let mut k = 1 + n;
        for i in 0..n {
            for j in i..n {
                let cross = a[1 + i].clone() * b[1 + j].clone() + a[1 + j].clone() * b[1 + i].clone();
                c.push(a0.clone() * b[k].clone() + b0.clone() * a[k].clone() + cross);
                k += 1;
            }
        }
        Jet2 { n, c }
    }
}

impl<T: Scalar> Div for Jet2<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.n == 0 {
            let v = rhs.into_value();
            return self.map(|a| a.clone() / v.clone());
        }
        self * rhs.recip()
    }
}

impl<T: Scalar> Add<f64> for Jet2<T> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] = self.c[0].clone() + rhs;
        self
    }
}

impl<T: Scalar> Sub<f64> for Jet2<T> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] = self.c[0].clone() - rhs;
        self
    }
}

impl<T: Scalar> Mul<f64> for Jet2<T> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.map(|a| a.clone() * rhs)
    }
}

impl<T: Scalar> Div<f64> for Jet2<T> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self.map(|a| a.clone() / rhs)
    }
}

impl<T: Scalar> Scalar for Jet2<T> {
    fn from_f64(v: f64) -> Self {
        Jet2::constant(T::from_f64(v))
    }

    fn re(&self) -> f64 {
        self.c[0].re()
    }

    fn sqrt(self) -> Self {
        let r = self.c[0].clone().sqrt();
        let d1 = r.clone().recip() * 0.5;
        let d2 = -(d1.clone() / self.c[0].clone()) * 0.5;
        self.chain(r, d1, d2)
    }

    fn exp(self) -> Self {
        let e = self.c[0].clone().exp();
        self.chain(e.clone(), e.clone(), e)
    }

    fn ln(self) -> Self {
        let v = self.c[0].clone();
        let inv = v.clone().recip();
        self.chain(v.ln(), inv.clone(), -(inv.clone() * inv))
    }

    fn sin(self) -> Self {
        let v = self.c[0].clone();
        let (s, c) = (v.clone().sin(), v.cos());
        self.chain(s.clone(), c, -s)
    }

    fn cos(self) -> Self {
        let v = self.c[0].clone();
        let (s, c) = (v.clone().sin(), v.cos());
        self.chain(c.clone(), -s, -c)
    }

    fn recip(self) -> Self {
        let inv = self.c[0].clone().recip();
        let inv2 = inv.clone() * inv.clone();
        let d2 = inv2.clone() * inv.clone() * 2.0;
        self.chain(inv, -inv2, d2)
    }
}

/// First-order jet: value and gradient in `n` seeded directions.
#[derive(Clone, PartialEq)]
pub struct Dual<T> {
    n: usize,
    c: Vec<T>,
}

impl<T: Scalar> Dual<T> {
    pub fn constant(v: T) -> Self {
        Dual { n: 0, c: vec![v] }
    }

    pub fn variable(v: T, dir: usize, n: usize) -> Self {
        assert!(dir < n, "direction {dir} out of range for {n} directions");
        let mut c = vec![T::zero(); 1 + n];
        c[0] = v;
        c[1 + dir] = T::one();
        Dual { n, c }
    }

    pub fn seed(values: &[T], first: usize, n: usize) -> Vec<Self> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| Self::variable(v.clone(), first + i, n))
            .collect()
    }

    pub fn lift(values: &[T]) -> Vec<Self> {
        values.iter().cloned().map(Self::constant).collect()
    }

    pub fn value(&self) -> &T {
        &self.c[0]
    }

    pub fn grad(&self, i: usize) -> T {
        if self.n == 0 {
            T::zero()
        } else {
            self.c[1 + i].clone()
        }
    }

    fn chain(&self, f0: T, f1: T) -> Self {
        let mut c = Vec::with_capacity(self.c.len());
        c.push(f0);
        c.extend(self.c[1..].iter().map(|g| f1.clone() * g.clone()));
        Dual { n: self.n, c }
    }

    fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Dual {
            n: self.n,
            c: self.c.iter().map(f).collect(),
        }
    }

    fn widen(self, n: usize) -> Self {
        if self.n == n {
            return self;
        }
        assert_eq!(self.n, 0, "dual width mismatch: {} vs {n}", self.n);
        let mut c = vec![T::zero(); 1 + n];
        c[0] = self.c.into_iter().next().expect("dual storage is never empty");
        Dual { n, c }
    }
}

impl<T: Scalar> fmt::Debug for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dual")
            .field("n", &self.n)
            .field("c", &self.c)
            .finish()
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.n.max(rhs.n);
        let (a, b) = (self.widen(n), rhs.widen(n));
        Dual {
            n,
            c: a.c.into_iter().zip(b.c).map(|(x, y)| x + y).collect(),
        }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.n.max(rhs.n);
        let (a, b) = (self.widen(n), rhs.widen(n));
        Dual {
            n,
            c: a.c.into_iter().zip(b.c).map(|(x, y)| x - y).collect(),
        }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|a| -a.clone())
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if rhs.n == 0 {
            let v = rhs.c[0].clone();
            return self.map(|a| a.clone() * v.clone());
        }
        if self.n == 0 {
            let v = self.c[0].clone();
            return rhs.map(|a| a.clone() * v.clone());
        }
        assert_eq!(self.n, rhs.n, "dual width mismatch");
        let (a0, b0) = (self.c[0].clone(), rhs.c[0].clone());
        let mut c = Vec::with_capacity(self.c.len());
        c.push(a0.clone() * b0.clone());
        for i in 1..=self.n {
            c.push(a0.clone() * rhs.c[i].clone() + b0.clone() * self.c[i].clone());
        }
        Dual { n: self.n, c }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.n == 0 {
            let v = rhs.c[0].clone();
            return self.map(|a| a.clone() / v.clone());
        }
        self * rhs.recip()
    }
}

impl<T: Scalar> Add<f64> for Dual<T> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] = self.c[0].clone() + rhs;
        self
    }
}

impl<T: Scalar> Sub<f64> for Dual<T> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] = self.c[0].clone() - rhs;
        self
    }
}

impl<T: Scalar> Mul<f64> for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.map(|a| a.clone() * rhs)
    }
}

impl<T: Scalar> Div<f64> for Dual<T> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self.map(|a| a.clone() / rhs)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_f64(v: f64) -> Self {
        Dual::constant(T::from_f64(v))
    }
    fn re(&self) -> f64 {
        self.c[0].re()
    }
    fn sqrt(self) -> Self {
        let r = self.c[0].clone().sqrt();
        let d = r.clone().recip() * 0.5;
        self.chain(r, d)
    }
    fn exp(self) -> Self {
        let e = self.c[0].clone().exp();
        self.chain(e.clone(), e)
    }
    fn ln(self) -> Self {
        let v = self.c[0].clone();
        self.chain(v.clone().ln(), v.recip())
    }
    fn sin(self) -> Self {
        let v = self.c[0].clone();
        self.chain(v.clone().sin(), v.cos())
    }
    fn cos(self) -> Self {
        let v = self.c[0].clone();
        self.chain(v.clone().cos(), -v.sin())
    }
    fn recip(self) -> Self {
        let inv = self.c[0].clone().recip();
        let d = -(inv.clone() * inv.clone());
        self.chain(inv, d)
    }
}
