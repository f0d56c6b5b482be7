//! Coefficient domains: exact rationals and complex doubles.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact rational coefficients.
pub type Q = Ratio<i128>;
/// Complex floating coefficients.
pub type C64 = Complex64;

/// Default absolute tolerance for numeric coefficient equality.
pub const DEFAULT_TOL: f64 = 1e-12;

pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(n: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    fn inv(&self) -> Option<Self>;
    /// Magnitude used for tolerance checks (exact domain: 0 iff zero).
    fn magnitude(&self) -> f64;
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn ratio(n: i64, d: i64) -> Self {
        Self::from_q(&Q::new(n as i128, d as i128))
    }
}

impl Coeff for Q {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(n: i64) -> Self {
        Q::from_integer(n as i128)
    }
    fn from_q(q: &Q) -> Self {
        *q
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn magnitude(&self) -> f64 {
        let a = self.abs();
        *a.numer() as f64 / *a.denom() as f64
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Coeff for C64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn from_q(q: &Q) -> Self {
        C64::new(*q.numer() as f64 / *q.denom() as f64, 0.0)
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(C64::new(1.0, 0.0) / self)
        }
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

/// `1/k!` as a coefficient.
pub fn inv_factorial<C: Coeff>(k: usize) -> C {
    let mut f: i128 = 1;
    for i in 2..=k as i128 {
        f *= i;
    }
    C::from_q(&Q::new(1, f))
}

/// Render a rational as `"p/q"` (or `"p"` for integers).
pub fn q_to_string(q: &Q) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_from_str(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<i128>().ok().map(Q::from_integer),
    }
}
