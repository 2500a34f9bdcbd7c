//! Exact box geometry.
//!
//! Boxes are axis-aligned products of intervals `[a_j / n_j^{e_j},
//! (a_j + 1) / n_j^{e_j}]` stored as integer corner numerators and
//! exponents, so every intersection, gap and containment question is a
//! finite integer comparison. Corners may be negative (translated copies
//! used by the disconnectedness decider); boxes generated from words always
//! lie inside the unit cube.
//!
//! The box convention is closed: two boxes meeting only in a corner touch,
//! and their squared gap is zero.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::SpongeSpec;
use crate::num::{self, Frac, GridInt};

/// A composition word: digit indices into `spec.digits()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, spec: &SpongeSpec) -> Result<()> {
        for &i in &self.0 {
            if i >= spec.digit_count() {
                return Err(Error::WordIndexOutOfRange { index: i, count: spec.digit_count() });
            }
        }
        Ok(())
    }
}

/// Per-axis dyadic-style interval product with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactBox<T> {
    /// Corner numerators `a_j`.
    pub corners: Vec<T>,
    /// Exponents `e_j`; axis `j` has side `n_j^{-e_j}`.
    pub exps: Vec<u32>,
}

impl<T: GridInt> ExactBox<T> {
    pub fn dims(&self) -> usize {
        self.corners.len()
    }

    /// Exact endpoints of the interval on `axis` (0-based).
    pub fn interval(&self, axis: usize, bases: &[u32]) -> Result<(Frac<T>, Frac<T>)> {
        let den: T = num::pow(bases[axis], self.exps[axis])?;
        let lo = Frac::new(self.corners[axis].clone(), den.clone())?;
        let hi = Frac::new(num::add(&self.corners[axis], &T::one())?, den)?;
        Ok((lo, hi))
    }

    /// Scale both boxes' intervals on `axis` to the finer of the two
    /// exponents. Returns `(lo_self, len_self, lo_other, len_other)` in
    /// units of `base^{-max(e1,e2)}`.
    fn scaled_pair(&self, other: &Self, axis: usize, base: u32) -> Result<(T, T, T, T)> {
        let (e1, e2) = (self.exps[axis], other.exps[axis]);
        let m = e1.max(e2);
        let s1: T = num::pow(base, m - e1)?;
        let s2: T = num::pow(base, m - e2)?;
        let a = num::mul(&self.corners[axis], &s1)?;
        let b = num::mul(&other.corners[axis], &s2)?;
        Ok((a, s1, b, s2))
    }

    /// Closed-box intersection test.
    pub fn touches(&self, other: &Self, bases: &[u32]) -> Result<bool> {
        for axis in 0..self.dims() {
            let (a, la, b, lb) = self.scaled_pair(other, axis, bases[axis])?;
            if num::add(&a, &la)? < b || num::add(&b, &lb)? < a {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Squared Euclidean distance between the two boxes (zero iff they
    /// touch under the closed convention).
    pub fn gap_sq(&self, other: &Self, bases: &[u32]) -> Result<Frac<T>> {
        let mut acc = Frac::zero();
        for axis in 0..self.dims() {
            let (a, la, b, lb) = self.scaled_pair(other, axis, bases[axis])?;
            let hi_a = num::add(&a, &la)?;
            let hi_b = num::add(&b, &lb)?;
            let gap = if b > hi_a {
                num::sub(&b, &hi_a)?
            } else if a > hi_b {
                num::sub(&a, &hi_b)?
            } else {
                continue;
            };
            let m = self.exps[axis].max(other.exps[axis]);
            let den: T = num::pow(bases[axis], m)?;
            let term = Frac::new(gap, den)?.square()?;
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }

    /// Squared farthest-point distance between the two boxes.
    pub fn span_sq(&self, other: &Self, bases: &[u32]) -> Result<Frac<T>> {
        let mut acc = Frac::zero();
        for axis in 0..self.dims() {
            let (a, la, b, lb) = self.scaled_pair(other, axis, bases[axis])?;
            let up = num::sub(&num::add(&b, &lb)?, &a)?;
            let down = num::sub(&num::add(&a, &la)?, &b)?;
            let span = up.max(down);
            let m = self.exps[axis].max(other.exps[axis]);
            let den: T = num::pow(bases[axis], m)?;
            let term = Frac::new(span, den)?.square()?;
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }

    pub fn contains(&self, other: &Self, bases: &[u32]) -> Result<bool> {
        for axis in 0..self.dims() {
            let (a, la, b, lb) = self.scaled_pair(other, axis, bases[axis])?;
            if b < a || num::add(&b, &lb)? > num::add(&a, &la)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn diam_sq(&self, bases: &[u32]) -> Result<Frac<T>> {
        let mut acc = Frac::zero();
        for axis in 0..self.dims() {
            acc = acc.checked_add(&Frac::inv_pow(bases[axis], self.exps[axis])?.square()?)?;
        }
        Ok(acc)
    }

    /// Does the box meet the boundary of the unit cube?
    pub fn touches_unit_boundary(&self, bases: &[u32]) -> Result<bool> {
        for axis in 0..self.dims() {
            if self.corners[axis].is_zero() {
                return Ok(true);
            }
            let den: T = num::pow(bases[axis], self.exps[axis])?;
            if num::add(&self.corners[axis], &T::one())? == den {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Does the (possibly translated) box intersect the closed unit cube?
    pub fn meets_unit_cube(&self, bases: &[u32]) -> Result<bool> {
        for axis in 0..self.dims() {
            let den: T = num::pow(bases[axis], self.exps[axis])?;
            let hi = num::add(&self.corners[axis], &T::one())?;
            if hi < T::zero() || self.corners[axis] > den {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Does the box meet the boundary of the enlarged cube `[-1, 2]^d`?
    pub fn touches_enlarged_boundary(&self, bases: &[u32]) -> Result<bool> {
        for axis in 0..self.dims() {
            let den: T = num::pow(bases[axis], self.exps[axis])?;
            let neg = num::sub(&T::zero(), &den)?;
            if self.corners[axis] == neg {
                return Ok(true);
            }
            let two_den = num::add(&den, &den)?;
            if num::add(&self.corners[axis], &T::one())? == two_den {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Translate by the integer vector `h` (in whole unit cubes).
    pub fn translated(&self, h: &[i32], bases: &[u32]) -> Result<Self> {
        let mut corners = Vec::with_capacity(self.dims());
        for axis in 0..self.dims() {
            let den: T = num::pow(bases[axis], self.exps[axis])?;
            let shift = num::mul(&den, &T::from_i32(h[axis]).ok_or(Error::ArithmeticOverflow)?)?;
            corners.push(num::add(&self.corners[axis], &shift)?);
        }
        Ok(ExactBox { corners, exps: self.exps.clone() })
    }
}

/// Largest `l` with `n_j^l <= n_d^k` for 0-based `axis`; the per-axis
/// refinement depth of stage-`k` approximate boxes. Decided by exact
/// integer power comparison, never by float logarithms.
pub fn ell(spec: &SpongeSpec, axis: usize, k: u32) -> u32 {
    num::floor_log_pow(spec.base(axis), spec.max_base(), k)
}

/// `Lambda^{-k}(unit cube + corner)` for a length-`k` word: every axis at
/// exponent `k`, corner digits accumulated by Horner's rule.
pub fn pillar<T: GridInt>(spec: &SpongeSpec, word: &Word) -> Result<ExactBox<T>> {
    word.validate(spec)?;
    let d = spec.dims();
    let mut corners = vec![T::zero(); d];
    for &idx in &word.0 {
        let digit = &spec.digits()[idx];
        for j in 0..d {
            let base: T = num::from_u32(spec.base(j))?;
            corners[j] = num::add(&num::mul(&corners[j], &base)?, &num::from_u32(digit[j])?)?;
        }
    }
    Ok(ExactBox { corners, exps: vec![word.len() as u32; d] })
}

fn check_budget(count: u128, budget: u64) -> Result<()> {
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { needed: count.to_string(), budget });
    }
    Ok(())
}

pub(crate) fn word_count(n: usize, len: u32, budget: u64) -> Result<()> {
    let mut count: u128 = 1;
    for _ in 0..len {
        count = count.checked_mul(n as u128).ok_or(Error::BudgetExceeded {
            needed: format!("{n}^{len}"),
            budget,
        })?;
        check_budget(count, budget)?;
    }
    Ok(())
}

/// All level-`k` pillars, deduplicated (words are injective onto boxes) and
/// canonically sorted.
pub fn pillars<T: GridInt>(spec: &SpongeSpec, k: u32, budget: u64) -> Result<Vec<ExactBox<T>>> {
    word_count(spec.digit_count(), k, budget)?;
    let mut out = Vec::new();
    let mut word = Word(vec![0; k as usize]);
    loop {
        out.push(pillar(spec, &word)?);
        if !advance_word(&mut word.0, spec.digit_count()) {
            break;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Odometer increment over digit indices; returns false on wrap-around.
pub(crate) fn advance_word(word: &mut [usize], n: usize) -> bool {
    for slot in word.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Stage-`k` approximate boxes: one box per word of length `ell_1(k)`,
/// with axis `j` truncated to its own depth `ell_j(k)`, deduplicated and
/// canonically sorted. Each box has side `n_j^{-ell_j(k)} <= n_d^{-k}` per
/// axis and contains attractor points.
pub fn approximate_boxes<T: GridInt>(
    spec: &SpongeSpec,
    k: u32,
    budget: u64,
) -> Result<Vec<ExactBox<T>>> {
    approximate_boxes_in_cylinder(spec, &Word(vec![]), k, budget)
}

/// Approximate boxes restricted to the cylinder of `prefix`: exactly the
/// stage-`k` boxes whose generating word starts with `prefix`.
pub fn approximate_boxes_in_cylinder<T: GridInt>(
    spec: &SpongeSpec,
    prefix: &Word,
    k: u32,
    budget: u64,
) -> Result<Vec<ExactBox<T>>> {
    prefix.validate(spec)?;
    let d = spec.dims();
    let depths: Vec<u32> = (0..d).map(|j| ell(spec, j, k)).collect();
    let len = depths[0] as usize;
    if prefix.len() > len {
        return Err(Error::DepthTooShallow {
            depth: k,
            delta: format!("cylinder of length {}", prefix.len()),
        });
    }
    word_count(spec.digit_count(), (len - prefix.len()) as u32, budget)?;

    let mut seen: HashSet<ExactBox<T>> = HashSet::new();
    let mut word = prefix.0.clone();
    word.resize(len, 0);
    loop {
        let mut corners = vec![T::zero(); d];
        for (pos, &idx) in word.iter().enumerate() {
            let digit = &spec.digits()[idx];
            for j in 0..d {
                if (pos as u32) < depths[j] {
                    let base: T = num::from_u32(spec.base(j))?;
                    corners[j] =
                        num::add(&num::mul(&corners[j], &base)?, &num::from_u32(digit[j])?)?;
                }
            }
        }
        seen.insert(ExactBox { corners, exps: depths.clone() });
        if !advance_word(&mut word[prefix.len()..], spec.digit_count()) {
            break;
        }
    }
    let mut out: Vec<ExactBox<T>> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Squared diameter of a stage-`k` approximate box.
pub fn stage_diam_sq<T: GridInt>(spec: &SpongeSpec, k: u32) -> Result<Frac<T>> {
    let mut acc = Frac::zero();
    for j in 0..spec.dims() {
        acc = acc.checked_add(&Frac::inv_pow(spec.base(j), ell(spec, j, k))?.square()?)?;
    }
    Ok(acc)
}

/// Smallest stage whose approximate boxes have diameter <= `delta`.
pub fn depth_for_delta<T: GridInt>(spec: &SpongeSpec, delta: &Frac<T>) -> Result<u32> {
    if delta.is_zero() || delta.is_negative() {
        return Err(Error::DeltaTooLarge { delta: delta.to_string(), side: "0".into() });
    }
    depth_for_delta_sq(spec, &delta.square()?)
}

/// Smallest stage whose approximate boxes have squared diameter at most
/// `delta_sq`.
pub fn depth_for_delta_sq<T: GridInt>(spec: &SpongeSpec, delta_sq: &Frac<T>) -> Result<u32> {
    if delta_sq.is_zero() || delta_sq.is_negative() {
        return Err(Error::DeltaTooLarge { delta: delta_sq.to_string(), side: "0".into() });
    }
    let mut k = 1u32;
    loop {
        if stage_diam_sq::<T>(spec, k)? <= *delta_sq {
            return Ok(k);
        }
        k += 1;
        if k > 100_000 {
            return Err(Error::DepthTooShallow { depth: k, delta: delta_sq.to_string() });
        }
    }
}

/// CSV dump of a box set: axis-wise corner and exponent columns, one row
/// per box, rows in canonical (lexicographic) order.
pub fn boxes_csv<T: GridInt>(boxes: &[ExactBox<T>]) -> String {
    let mut sorted: Vec<&ExactBox<T>> = boxes.iter().collect();
    sorted.sort();
    let d = sorted.first().map_or(0, |b| b.dims());
    let mut out = String::new();
    for j in 1..=d {
        if j > 1 {
            out.push(',');
        }
        let _ = write!(out, "a{j},e{j}");
    }
    out.push('\n');
    for b in sorted {
        for j in 0..d {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{},{}", b.corners[j], b.exps[j]);
        }
        out.push('\n');
    }
    out
}
