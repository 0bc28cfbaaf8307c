//! Numeric abstraction shared by every planning routine.
//!
//! Costs, utilities and discount factors are carried by any type implementing
//! [`Scalar`]. The file formats, the service and the CLI use the exact
//! [`Rational`](crate::Rational) instantiation; `f64` is available for quick
//! experiments where exactness does not matter.

use std::fmt;

use num_traits::Num;

/// A number usable as cost, utility or discount factor.
///
/// Implementations must form an ordered field on the values that actually
/// occur (non-negative costs and utilities, discounts in `(0, 1]`).
pub trait Scalar: Num + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {}

/// `base^exp` by repeated squaring.
pub fn pow<T: Scalar>(base: &T, exp: usize) -> T {
    num_traits::pow(base.clone(), exp)
}

pub(crate) fn max<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// True when `x >= 0`. NaN and negative values are rejected.
pub(crate) fn non_negative<T: Scalar>(x: &T) -> bool {
    *x >= T::zero()
}

/// Weights `tail[d] = sum_{t=d}^{horizon-1} gamma^t` for `d` in `0..=horizon`.
pub(crate) fn tail_weights<T: Scalar>(gamma: &T, horizon: usize) -> Vec<T> {
    let mut tail = vec![T::zero(); horizon + 1];
    let mut weights = Vec::with_capacity(horizon);
    let mut w = T::one();
    for _ in 0..horizon {
        weights.push(w.clone());
        w = w * gamma.clone();
    }
    for d in (0..horizon).rev() {
        tail[d] = tail[d + 1].clone() + weights[d].clone();
    }
    tail
}
