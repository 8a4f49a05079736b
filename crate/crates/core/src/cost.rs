//! Cost-accumulator library: values paired with a nonnegative time cost
//! that composes additively, plus comparison-counting reference sorts
//! built on it.
//!
//! `tick` charges cost without changing the value; `bind` chains
//! computations and adds their costs. The sorting routines charge exactly
//! one tick per element comparison, so their `time` is the comparison
//! count; list bookkeeping (length, take, drop) is free.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use thiserror::Error;

/// A value of type `A` together with the cost of computing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostValue<A> {
    pub ret: A,
    pub time: BigUint,
}

impl<A> CostValue<A> {
    /// Inject a value at zero cost.
    pub fn pure(a: A) -> Self {
        CostValue { ret: a, time: BigUint::zero() }
    }

    /// Chain a dependent computation; costs add.
    pub fn bind<B>(self, f: impl FnOnce(A) -> CostValue<B>) -> CostValue<B> {
        let next = f(self.ret);
        CostValue { ret: next.ret, time: self.time + next.time }
    }

    /// Transform the value, keeping the cost.
    pub fn map<B>(self, f: impl FnOnce(A) -> B) -> CostValue<B> {
        CostValue { ret: f(self.ret), time: self.time }
    }
}

/// Charge `c` cost units without producing a value.
pub fn tick(c: impl Into<BigUint>) -> CostValue<()> {
    CostValue { ret: (), time: c.into() }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("tick cost {0} is negative")]
pub struct NegativeCost(pub BigInt);

/// `tick` for signed inputs; costs are naturals, so negatives are
/// rejected.
pub fn tick_checked(c: &BigInt) -> Result<CostValue<()>, NegativeCost> {
    match c.to_biguint() {
        Some(c) => Ok(tick(c)),
        None => Err(NegativeCost(c.clone())),
    }
}

/// Merge two individually sorted lists, charging one tick per element
/// comparison. If the inputs are not sorted the result is still defined,
/// but no longer sorted.
pub fn merge<T: Ord + Clone>(xs: &[T], ys: &[T]) -> CostValue<Vec<T>> {
    match (xs.split_first(), ys.split_first()) {
        (None, _) => CostValue::pure(ys.to_vec()),
        (_, None) => CostValue::pure(xs.to_vec()),
        (Some((x, xs_rest)), Some((y, _))) => tick(1u32).bind(|_| {
            if x <= y {
                merge(xs_rest, ys).map(|rest| prepend(x.clone(), rest))
            } else {
                merge(xs, &ys[1..]).map(|rest| prepend(y.clone(), rest))
            }
        }),
    }
}

fn prepend<T>(head: T, mut tail: Vec<T>) -> Vec<T> {
    tail.insert(0, head);
    tail
}

/// Sort by halving, recursing, and merging; `time` is the total number of
/// element comparisons.
pub fn merge_sort<T: Ord + Clone>(xs: &[T]) -> CostValue<Vec<T>> {
    if xs.len() < 2 {
        return CostValue::pure(xs.to_vec());
    }
    let half = xs.len() / 2;
    let left = &xs[..half];
    let right = &xs[half..];
    merge_sort(left)
        .bind(|l| merge_sort(right).bind(move |r| merge(&l, &r)))
}

/// Ceiling base-2 logarithm: the smallest `k` with `2^k >= n` for
/// `n >= 1`, and 0 for `n = 0`.
pub fn clog2(n: u64) -> u32 {
    if n <= 1 {
        return 0;
    }
    64 - (n - 1).leading_zeros()
}
