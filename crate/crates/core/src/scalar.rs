//! Number traits shared by the floating and exact rational code paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Commutative ring with identity. Numbers, [`Poly`](crate::polynomial::Poly)
/// and [`BiPoly`](crate::polynomial::BiPoly) all qualify.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// A field of coefficients: `f64` for numerics, [`BigRational`] for exact work.
pub trait Scalar: Ring + Div<Output = Self> + PartialOrd + Signed + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Exact conversion for rationals (every finite double is dyadic).
    /// `None` for non-finite input in exact mode.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// A ring that contains the scalars `T` (numbers, polynomials over `T`).
pub trait Algebra<T: Scalar>: Ring {
    fn from_scalar(c: T) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_scalar(T::from_i64(v))
    }
}

impl<T: Scalar> Algebra<T> for T {
    fn from_scalar(c: T) -> Self {
        c
    }
}

/// Shorthand for the exact rational `num/den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

/// Exact conversion of a finite double; panics on NaN or infinity.
pub fn exact(v: f64) -> BigRational {
    BigRational::from_f64(v).expect("finite value")
}

/// The rational with the smallest denominator that rounds to `v`, i.e. lies
/// strictly between the midpoints to its floating neighbours. Decimal input
/// such as `1.3` comes back as `13/10` instead of a 52-bit dyadic fraction,
/// which keeps exact symbolic work small.
pub fn simplest_rational(v: f64) -> BigRational {
    assert!(v.is_finite(), "finite value");
    if v == 0.0 {
        return BigRational::zero();
    }
    let x = exact(v.abs());
    let two = BigRational::from_integer(2.into());
    let lo = (&x + exact(v.abs().next_down())) / &two;
    let hi = if v.abs() == f64::MAX {
        None
    } else {
        Some((&x + exact(v.abs().next_up())) / &two)
    };
    let q = simplest_between(lo, hi);
    if v < 0.0 {
        -q
    } else {
        q
    }
}

/// Simplest rational in the open interval `(lo, hi)`, `0 <= lo`, with
/// `hi = None` meaning `+∞`. Continued-fraction descent.
fn simplest_between(lo: BigRational, hi: Option<BigRational>) -> BigRational {
    let n = lo.floor();
    let next = &n + BigRational::one();
    match &hi {
        None => return next,
        Some(h) if &next < h => return next,
        _ => {}
    }
    let hi = hi.expect("bounded");
    // no integer inside, so (lo, hi) ⊂ [n, n + 1]
    let inner_lo = (hi - &n).recip();
    let inner_hi = if lo == n { None } else { Some((lo - &n).recip()) };
    n + simplest_between(inner_lo, inner_hi).recip()
}
