//! Quantities derived from ε and the profit estimate α: the cardinality cap
//! `q(ε)`, the geometric profit classes and the low-profit pool `E(α)`.
//!
//! A profit class `r` holds the elements whose ratio `p(e) / (2α)` lies in
//! `((1−ε)^r, (1−ε)^(r−1)]`. Every comparison is carried out on exact
//! rationals; the class boundaries are precomputed once per layout.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::instance::{BcInstance, Element, Epsilon, IdSet};

/// `q(ε) = ⌈ε^(−1/ε)⌉`.
///
/// When `1/ε` is an integer `k` this is exactly `k^k`. Otherwise the
/// exponent is rounded up, giving `⌈ε^(−⌈1/ε⌉)⌉`, which is never smaller;
/// `q` is only ever used as an upper cap.
pub fn q_of(epsilon: &Epsilon) -> BigUint {
    let (num, den) = (epsilon.numerator(), epsilon.denominator());
    let k = den.div_ceil(num);
    let exp = u32::try_from(k).expect("1/epsilon fits in u32");
    let top = BigUint::from(den).pow(exp);
    let bottom = BigUint::from(num).pow(exp);
    let (quot, rem) = top.div_rem(&bottom);
    if rem.is_zero() {
        quot
    } else {
        quot + 1u32
    }
}

fn saturating_usize(v: &BigUint) -> usize {
    v.to_usize().unwrap_or(usize::MAX)
}

#[derive(Clone, Debug)]
pub struct ClassLayout {
    epsilon: Epsilon,
    alpha: u64,
    gamma: BigRational,
    r_lo: i64,
    r_hi: i64,
    // boundaries[i] = (1−ε)^(r_lo − 1 + i), strictly decreasing.
    boundaries: Vec<BigRational>,
    q: BigUint,
}

impl ClassLayout {
    /// Layout for an estimate `α` with `OPT/γ ≤ α ≤ OPT`.
    ///
    /// The index range is `[1 − ⌈log_{1/(1−ε)}(γ/2)⌉, ⌊log_{1−ε}(ε/γ)⌋ + 1]`,
    /// which for `γ = 2` is `[1, ⌊log_{1−ε}(ε/2)⌋ + 1]`. With `α = 0` the
    /// layout has no classes.
    pub fn new(epsilon: Epsilon, alpha: u64, gamma: BigRational) -> Result<Self> {
        let two = BigRational::from_integer(BigInt::from(2));
        if gamma < two {
            return Err(Error::Precondition(format!("approximation factor {gamma} is below 2")));
        }
        let q = q_of(&epsilon);
        if alpha == 0 {
            return Ok(Self { epsilon, alpha, gamma, r_lo: 1, r_hi: 0, boundaries: Vec::new(), q });
        }
        let eps = epsilon.to_ratio();
        let shrink = BigRational::one() - &eps;
        let grow = shrink.recip();

        let half_gamma = &gamma / &two;
        let mut top = BigRational::one();
        let mut widen = 0i64;
        while top < half_gamma {
            top *= &grow;
            widen += 1;
        }

        let floor = &eps / &gamma;
        let mut pow = BigRational::one();
        let mut steps = 0i64;
        loop {
            let next = &pow * &shrink;
            if next < floor {
                break;
            }
            pow = next;
            steps += 1;
        }
        let r_lo = 1 - widen;
        let r_hi = steps + 1;

        let mut boundaries = Vec::with_capacity((r_hi - r_lo + 2) as usize);
        let mut b = top;
        for _ in r_lo - 1..=r_hi {
            boundaries.push(b.clone());
            b *= &shrink;
        }
        Ok(Self { epsilon, alpha, gamma, r_lo, r_hi, boundaries, q })
    }

    pub fn with_gamma(epsilon: Epsilon, alpha: u64, gamma: u64) -> Result<Self> {
        Self::new(epsilon, alpha, BigRational::from_integer(BigInt::from(gamma)))
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    pub fn r_lo(&self) -> i64 {
        self.r_lo
    }

    pub fn r_hi(&self) -> i64 {
        self.r_hi
    }

    pub fn index_range(&self) -> RangeInclusive<i64> {
        self.r_lo..=self.r_hi
    }

    pub fn class_count(&self) -> usize {
        (self.r_hi - self.r_lo + 1).max(0) as usize
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// `q(ε)` clamped to `usize`.
    pub fn q_cap(&self) -> usize {
        saturating_usize(&self.q)
    }

    /// The half-open interval `((1−ε)^r, (1−ε)^(r−1)]` of class `r`.
    pub fn bounds(&self, r: i64) -> Option<(BigRational, BigRational)> {
        if !self.index_range().contains(&r) {
            return None;
        }
        let i = (r - self.r_lo) as usize;
        Some((self.boundaries[i + 1].clone(), self.boundaries[i].clone()))
    }

    /// The class holding an element of profit `profit`, if any.
    pub fn class_of_profit(&self, profit: u64) -> Option<i64> {
        if self.boundaries.is_empty() {
            return None;
        }
        let ratio = BigRational::new(BigInt::from(profit), BigInt::from(2u128 * u128::from(self.alpha)));
        // Number of boundaries ≥ ratio; the class is the last of them.
        let above = self.boundaries.partition_point(|b| *b >= ratio);
        if above == 0 || above == self.boundaries.len() {
            return None;
        }
        Some(self.r_lo + above as i64 - 1)
    }
}

pub fn class_index(element: &Element, layout: &ClassLayout) -> Option<i64> {
    layout.class_of_profit(element.profit)
}

/// Every class of the layout (empty ones included), keyed by index.
pub fn class_partition(instance: &BcInstance, layout: &ClassLayout) -> BTreeMap<i64, IdSet> {
    let mut classes: BTreeMap<i64, IdSet> = layout.index_range().map(|r| (r, IdSet::new())).collect();
    for e in instance.elements() {
        if let Some(r) = class_index(e, layout) {
            classes.entry(r).or_default().insert(e.id);
        }
    }
    classes
}

/// `E(α) = {e : p(e) ≤ 2εα}`.
pub fn small_profit_pool(instance: &BcInstance, alpha: u64, epsilon: &Epsilon) -> IdSet {
    let bound = 2 * u128::from(epsilon.numerator()) * u128::from(alpha);
    instance
        .elements()
        .iter()
        .filter(|e| u128::from(e.profit) * u128::from(epsilon.denominator()) <= bound)
        .map(|e| e.id)
        .collect()
}
