//! Numeric abstraction shared by plain complex evaluation and jet arithmetic.
//!
//! Every kernel formula in this crate is written once against [`Scalar`] and
//! then evaluated either on `Complex64` (values) or on [`crate::jet::Jet`]
//! (values plus all mixed partials up to order four).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub trait Scalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant living in the same space as `self` (same jet layout).
    fn constant_like(&self, c: C64) -> Self;

    /// Value at the expansion point.
    fn value(&self) -> C64;

    fn scale(&self, c: C64) -> Self;

    fn add_const(&self, c: C64) -> Self;

    fn recip(&self) -> Self;

    fn ln(&self) -> Self;

    fn exp(&self) -> Self;

    /// `self^alpha` on the principal branch.
    fn powf(&self, alpha: f64) -> Self;

    fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return self.constant_like(C64::new(1.0, 0.0));
        }
        let base = if k < 0 { self.recip() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a * sq.clone(),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.clone() * sq;
        }
        acc.expect("nonzero exponent")
    }
}

impl Scalar for C64 {
    fn constant_like(&self, c: C64) -> Self {
        c
    }

    fn value(&self) -> C64 {
        *self
    }

    fn scale(&self, c: C64) -> Self {
        self * c
    }

    fn add_const(&self, c: C64) -> Self {
        self + c
    }

    fn recip(&self) -> Self {
        self.inv()
    }

    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }

    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }

    fn powf(&self, alpha: f64) -> Self {
        Complex64::powf(*self, alpha)
    }
}
