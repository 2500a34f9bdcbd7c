//! Delta-connectivity metrics: component-count brackets, profiles over a
//! geometric delta ladder, the gap sequence, and spread statistics.
//!
//! For a fixed `delta > 0` the attractor's delta-components are bracketed
//! by two graphs over the stage approximate boxes:
//!
//! * the **gap graph** joins boxes whose exact squared distance is at most
//!   `delta^2`; it can only over-merge, so its component count is a lower
//!   bound;
//! * the **merge graph** joins boxes only when two certified attractor
//!   points — the fixed points of the digit maps carried by each box's
//!   generating word — are within `delta`; together with the requirement
//!   that box diameters not exceed `delta`, its component count is an
//!   upper bound.
//!
//! Every comparison is exact: pair tests run on scaled integers over a
//! common denominator, never on floats.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::components::{Partition, UnionFind};
use crate::error::{Error, Result};
use crate::geometry::{self, ExactBox, Word};
use crate::model::SpongeSpec;
use crate::num::{self, Frac, GridInt};

/// Stage approximate boxes paired with one generating word per box, kept
/// as per-axis digit values so certified attractor points (anchor points)
/// can be produced for the merge graph.
#[derive(Debug, Clone)]
pub struct AnchoredBoxes<T: GridInt> {
    pub boxes: Vec<ExactBox<T>>,
    /// Per box, the axis values of one generating word of full length.
    anchor_vals: Vec<Vec<T>>,
    /// Length of the generating words.
    word_len: u32,
}

/// Enumerates the stage-`k` approximate boxes in the cylinder of `prefix`,
/// retaining for each box the per-axis value of its first generating word
/// in enumeration order. The box list is identical to
/// [`geometry::approximate_boxes_in_cylinder`].
pub fn anchored_boxes<T: GridInt>(
    spec: &SpongeSpec,
    prefix: &Word,
    k: u32,
    budget: u64,
) -> Result<AnchoredBoxes<T>> {
    prefix.validate(spec)?;
    let d = spec.dims();
    let depths: Vec<u32> = (0..d).map(|j| geometry::ell(spec, j, k)).collect();
    let len = depths[0] as usize;
    if prefix.len() > len {
        return Err(Error::DepthTooShallow {
            depth: k,
            delta: format!("cylinder of length {}", prefix.len()),
        });
    }
    geometry::word_count(spec.digit_count(), (len - prefix.len()) as u32, budget)?;

    let bases: Vec<Vec<T>> = (0..d)
        .map(|j| -> Result<Vec<T>> { Ok(vec![num::from_u32(spec.base(j))?]) })
        .collect::<Result<_>>()?;
    let mut seen: HashMap<ExactBox<T>, Vec<T>> = HashMap::new();
    let mut word = prefix.0.clone();
    word.resize(len, 0);
    loop {
        let mut corners = vec![T::zero(); d];
        let mut full = vec![T::zero(); d];
        for (pos, &idx) in word.iter().enumerate() {
            let digit = &spec.digits()[idx];
            for j in 0..d {
                let dv: T = num::from_u32(digit[j])?;
                full[j] = num::add(&num::mul(&full[j], &bases[j][0])?, &dv)?;
                if (pos as u32) < depths[j] {
                    corners[j] = num::add(&num::mul(&corners[j], &bases[j][0])?, &dv)?;
                }
            }
        }
        seen.entry(ExactBox { corners, exps: depths.clone() }).or_insert(full);
        if !geometry::advance_word(&mut word[prefix.len()..], spec.digit_count()) {
            break;
        }
    }
    let mut items: Vec<(ExactBox<T>, Vec<T>)> = seen.into_iter().collect();
    items.sort_by(|a, b| a.0.cmp(&b.0));
    let mut boxes = Vec::with_capacity(items.len());
    let mut anchor_vals = Vec::with_capacity(items.len());
    for (b, a) in items {
        boxes.push(b);
        anchor_vals.push(a);
    }
    Ok(AnchoredBoxes { boxes, anchor_vals, word_len: len as u32 })
}

fn checked_lcm<T: GridInt>(a: &T, b: &T) -> Result<T> {
    let g = a.gcd(b);
    num::mul(&(a.clone() / g), b)
}

/// Prepared exact pair predicates for one box list and one delta.
///
/// All pair tests reduce to checked integer comparisons over per-axis
/// common denominators; candidate pairs come from a coarse cell grid with
/// cell side `n_j^{-c_j}` chosen just above `delta`, so only a bounded
/// neighborhood of cells must be probed per box.
struct DeltaCtx<'a, T: GridInt> {
    boxes: &'a [ExactBox<T>],
    dims: usize,
    n_digits: usize,
    /// `delta^2` denominator; numerators are folded into the rhs values.
    q_sq: T,
    /// Gap lane: units of `1 / n_j^{m_j}`, scale factors into `lcm_gap`.
    gap_scale: Vec<T>,
    rhs_gap: T,
    /// Merge lane: anchor coordinates in units of `1 / (n_j^L (n_j - 1))`.
    anchor_units: Vec<T>,
    merge_scale: Vec<T>,
    rhs_merge: T,
    /// Coarse cell index per box, and the neighborhood offsets to probe.
    cells: Vec<Vec<T>>,
    offsets: Vec<Vec<T>>,
}

impl<'a, T: GridInt> DeltaCtx<'a, T> {
    fn new(spec: &SpongeSpec, ab: &'a AnchoredBoxes<T>, delta_sq: &Frac<T>) -> Result<Self> {
        let boxes = &ab.boxes;
        debug_assert!(!boxes.is_empty());
        debug_assert!(delta_sq.is_positive());
        let d = spec.dims();
        let exps = boxes[0].exps.clone();
        debug_assert!(boxes.iter().all(|b| b.exps == exps));
        let (p_sq, q_sq) = (delta_sq.numer().clone(), delta_sq.denom().clone());

        // Gap lane denominators.
        let g_pow: Vec<T> = (0..d)
            .map(|j| num::pow(spec.base(j), exps[j]))
            .collect::<Result<_>>()?;
        let g_sq: Vec<T> = g_pow.iter().map(|g| num::mul(g, g)).collect::<Result<_>>()?;
        let mut lcm_gap = T::one();
        for g in &g_sq {
            lcm_gap = checked_lcm(&lcm_gap, g)?;
        }
        let gap_scale: Vec<T> = g_sq.iter().map(|g| lcm_gap.clone() / g.clone()).collect();
        let rhs_gap = num::mul(&p_sq, &lcm_gap)?;

        // Merge lane: anchor point for box with word value `A` and digit
        // `i` has axis coordinate `(A (n-1) + i) / (n^L (n-1))`.
        let nm1: Vec<T> = (0..d)
            .map(|j| num::from_u32(spec.base(j) - 1))
            .collect::<Result<_>>()?;
        let a_den: Vec<T> = (0..d)
            .map(|j| num::mul(&num::pow::<T>(spec.base(j), ab.word_len)?, &nm1[j]))
            .collect::<Result<_>>()?;
        let a_sq: Vec<T> = a_den.iter().map(|g| num::mul(g, g)).collect::<Result<_>>()?;
        let mut lcm_merge = T::one();
        for g in &a_sq {
            lcm_merge = checked_lcm(&lcm_merge, g)?;
        }
        let merge_scale: Vec<T> = a_sq.iter().map(|g| lcm_merge.clone() / g.clone()).collect();
        let rhs_merge = num::mul(&p_sq, &lcm_merge)?;

        let n_digits = spec.digit_count();
        let mut anchor_units = Vec::with_capacity(boxes.len() * n_digits * d);
        for vals in &ab.anchor_vals {
            for digit in spec.digits() {
                for j in 0..d {
                    let iv: T = num::from_u32(digit[j])?;
                    anchor_units.push(num::add(&num::mul(&vals[j], &nm1[j])?, &iv)?);
                }
            }
        }

        // Coarse cells: per axis the largest c with n_j^{-c} >= delta,
        // cells of width n_j^{m_j - c_j} corner units. Only delta^2 is
        // available, so both bounds grow through squared comparisons.
        let mut cell_width = Vec::with_capacity(d);
        let mut radius = Vec::with_capacity(d);
        for j in 0..d {
            let mut c = 0u32;
            while c < exps[j] {
                match num::pow::<T>(spec.base(j), 2 * (c + 1))
                    .and_then(|v| num::mul(&v, &p_sq))
                {
                    Ok(v) if v <= q_sq => c += 1,
                    _ => break,
                }
            }
            let w: T = num::pow(spec.base(j), exps[j] - c)?;
            // Boxes within delta have corner units within delta n^m + 1
            // of each other, so cell indices differ by at most
            // s + 1 with s = floor((delta n^m + 1) / w); s is the largest
            // integer with (s w - 1)^2 q_sq <= p_sq n^{2m}.
            let rhs = num::mul(&num::mul(&g_pow[j], &g_pow[j])?, &p_sq)?;
            let mut s: i64 = 0;
            loop {
                let next = num::mul(
                    &w,
                    &T::from_i64(s + 1).ok_or(Error::ArithmeticOverflow)?,
                )?;
                let v = num::sub(&next, &T::one())?;
                match num::mul(&v, &v).and_then(|vv| num::mul(&vv, &q_sq)) {
                    Ok(lhs) if lhs <= rhs => s += 1,
                    _ => break,
                }
                if s > 1000 {
                    return Err(Error::ArithmeticOverflow);
                }
            }
            cell_width.push(w);
            radius.push(s + 1);
        }
        let mut cells = Vec::with_capacity(boxes.len());
        for b in boxes.iter() {
            let cell: Vec<T> = (0..d).map(|j| b.corners[j].div_floor(&cell_width[j])).collect();
            cells.push(cell);
        }
        let mut offsets: Vec<Vec<T>> = vec![vec![]];
        for j in 0..d {
            let mut next = Vec::new();
            for base in &offsets {
                for o in -radius[j]..=radius[j] {
                    let mut v = base.clone();
                    v.push(T::from_i64(o).ok_or(Error::ArithmeticOverflow)?);
                    next.push(v);
                }
            }
            offsets = next;
            if offsets.len() > 1_000_000 {
                return Err(Error::BudgetExceeded {
                    needed: format!("{} cell offsets", offsets.len()),
                    budget: 1_000_000,
                });
            }
        }

        Ok(DeltaCtx {
            boxes,
            dims: d,
            n_digits,
            q_sq,
            gap_scale,
            rhs_gap,
            anchor_units,
            merge_scale,
            rhs_merge,
            cells,
            offsets,
        })
    }

    /// Is the exact squared box distance at most `delta^2`?
    fn gap_le(&self, i: usize, j: usize) -> Result<bool> {
        let (bi, bj) = (&self.boxes[i], &self.boxes[j]);
        let mut s = T::zero();
        for ax in 0..self.dims {
            let diff = num::sub(&bi.corners[ax], &bj.corners[ax])?.abs();
            if diff > T::one() {
                let u = num::sub(&diff, &T::one())?;
                s = num::add(&s, &num::mul(&num::mul(&u, &u)?, &self.gap_scale[ax])?)?;
            }
        }
        Ok(num::mul(&s, &self.q_sq)? <= self.rhs_gap)
    }

    /// Are two certified attractor points of the boxes within `delta`?
    fn merge_le(&self, i: usize, j: usize) -> Result<bool> {
        let d = self.dims;
        let stride = self.n_digits * d;
        let ai = &self.anchor_units[i * stride..(i + 1) * stride];
        let aj = &self.anchor_units[j * stride..(j + 1) * stride];
        for ti in 0..self.n_digits {
            'pair: for tj in 0..self.n_digits {
                let mut s = T::zero();
                for ax in 0..d {
                    let dc = num::sub(&ai[ti * d + ax], &aj[tj * d + ax])?.abs();
                    let term = num::mul(&num::mul(&dc, &dc)?, &self.merge_scale[ax])?;
                    s = match s.checked_add(&term) {
                        Some(v) => v,
                        None => continue 'pair,
                    };
                }
                match s.checked_mul(&self.q_sq) {
                    Some(v) if v <= self.rhs_merge => return Ok(true),
                    _ => {}
                }
            }
        }
        Ok(false)
    }

    /// Runs both union-finds over the candidate pairs from the cell grid.
    fn partitions(&self, budget: u64) -> Result<(Partition, Partition)> {
        let b = self.boxes.len();
        let mut uf_lo = UnionFind::new(b);
        let mut uf_hi = UnionFind::new(b);
        let mut map: HashMap<&[T], Vec<u32>> = HashMap::new();
        for (i, cell) in self.cells.iter().enumerate() {
            map.entry(cell.as_slice()).or_default().push(i as u32);
        }
        let mut probe: Vec<T> = Vec::with_capacity(self.dims);
        let mut pairs = 0u64;
        for i in 0..b {
            'offset: for off in &self.offsets {
                probe.clear();
                for ax in 0..self.dims {
                    match self.cells[i][ax].checked_add(&off[ax]) {
                        Some(v) => probe.push(v),
                        None => continue 'offset,
                    }
                }
                let Some(members) = map.get(probe.as_slice()) else { continue };
                for &ju in members {
                    let j = ju as usize;
                    if j <= i {
                        continue;
                    }
                    pairs += 1;
                    if pairs > budget {
                        return Err(Error::BudgetExceeded {
                            needed: format!("{pairs} pair tests"),
                            budget,
                        });
                    }
                    // A merge edge implies a gap edge (anchor points lie
                    // inside their boxes), so the test nests.
                    if self.gap_le(i, j)? {
                        uf_lo.union(i, j);
                        if self.merge_le(i, j)? {
                            uf_hi.union(i, j);
                        }
                    }
                }
            }
        }
        Ok((uf_lo.partition(), uf_hi.partition()))
    }
}

/// Gap-graph and merge-graph partitions for an anchored box set.
pub(crate) fn delta_partitions_anchored<T: GridInt>(
    spec: &SpongeSpec,
    ab: &AnchoredBoxes<T>,
    delta_sq: &Frac<T>,
    budget: u64,
) -> Result<(Partition, Partition)> {
    DeltaCtx::new(spec, ab, delta_sq)?.partitions(budget)
}

/// Boxes plus both partitions for the cylinder of `word` at `depth`.
pub(crate) fn delta_partitions_in_cylinder<T: GridInt>(
    spec: &SpongeSpec,
    word: &Word,
    delta: &Frac<T>,
    depth: u32,
    budget: u64,
) -> Result<(Vec<ExactBox<T>>, Partition, Partition)> {
    if !delta.is_positive() {
        return Err(Error::DeltaTooLarge { delta: delta.to_string(), side: "0".into() });
    }
    if geometry::stage_diam_sq::<T>(spec, depth)? > delta.square()? {
        return Err(Error::DepthTooShallow { depth, delta: delta.to_string() });
    }
    let ab = anchored_boxes::<T>(spec, word, depth, budget)?;
    let (lo, hi) = delta_partitions_anchored(spec, &ab, &delta.square()?, budget)?;
    Ok((ab.boxes, lo, hi))
}

/// Bracket `[lo, hi]` on the number of delta-components of the attractor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HBracket<T: GridInt> {
    pub delta: Frac<T>,
    pub lo: u64,
    pub hi: u64,
    /// Approximation stage the bracket was computed at.
    pub depth: u32,
    /// True when the bracket collapses to the exact count.
    pub exact: bool,
}

/// Bracket the delta-component count at the given stage (default: the
/// shallowest stage whose boxes have diameter at most `delta`).
pub fn h_bracket<T: GridInt>(
    spec: &SpongeSpec,
    delta: &Frac<T>,
    depth: Option<u32>,
    budget: u64,
) -> Result<HBracket<T>> {
    if !delta.is_positive() {
        return Err(Error::DeltaTooLarge { delta: delta.to_string(), side: "0".into() });
    }
    let (lo, hi, depth) = h_bracket_at_sq(spec, &delta.square()?, depth, budget)?;
    Ok(HBracket { delta: delta.clone(), lo, hi, depth, exact: lo == hi })
}

/// Bracket the count at an exact squared delta, returning
/// `(lo, hi, depth)`. Gap values are square roots of rationals, so
/// resampling the count at a gap has to happen in squared coordinates.
pub fn h_bracket_at_sq<T: GridInt>(
    spec: &SpongeSpec,
    delta_sq: &Frac<T>,
    depth: Option<u32>,
    budget: u64,
) -> Result<(u64, u64, u32)> {
    if !delta_sq.is_positive() {
        return Err(Error::DeltaTooLarge { delta: delta_sq.to_string(), side: "0".into() });
    }
    // delta at least the unit-cube diameter: everything is one component.
    if *delta_sq >= Frac::from_int(num::from_u32::<T>(spec.dims() as u32)?) {
        return Ok((1, 1, 0));
    }
    let depth = match depth {
        Some(t) => t,
        None => geometry::depth_for_delta_sq(spec, delta_sq)?,
    };
    if geometry::stage_diam_sq::<T>(spec, depth)? > *delta_sq {
        return Err(Error::DepthTooShallow { depth, delta: delta_sq.to_string() });
    }
    let ab = anchored_boxes::<T>(spec, &Word(vec![]), depth, budget)?;
    let (lo_part, hi_part) = delta_partitions_anchored(spec, &ab, delta_sq, budget)?;
    let (lo, hi) = (lo_part.len() as u64, hi_part.len() as u64);
    debug_assert!(lo <= hi);
    Ok((lo, hi, depth))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow<T: GridInt> {
    pub k: u32,
    pub bracket: HBracket<T>,
}

/// Component-count brackets along the ladder `delta = n_d^{-k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HProfile<T: GridInt> {
    pub rows: Vec<ProfileRow<T>>,
}

/// Profile for `k = 1..=k_max`. `extra` fixes the stage at `k + extra`;
/// by default each row uses the shallowest stage fine enough for its
/// delta.
pub fn h_profile<T: GridInt>(
    spec: &SpongeSpec,
    k_max: u32,
    extra: Option<u32>,
    budget: u64,
) -> Result<HProfile<T>> {
    let mut rows = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let delta = Frac::inv_pow(spec.max_base(), k)?;
        let depth = match extra {
            Some(t) => Some(k + t),
            None => None,
        };
        rows.push(ProfileRow { k, bracket: h_bracket(spec, &delta, depth, budget)? });
    }
    Ok(HProfile { rows })
}

/// CSV dump: one row per ladder step with the exact delta as a fraction.
pub fn profile_csv<T: GridInt>(profile: &HProfile<T>) -> String {
    let mut out = String::from("k,delta_num,delta_den,lo,hi,depth,exact\n");
    for row in &profile.rows {
        let b = &row.bracket;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.k,
            b.delta.numer(),
            b.delta.denom(),
            b.lo,
            b.hi,
            b.depth,
            b.exact
        ));
    }
    out
}

/// Least-squares estimate of the growth exponent `s` in `h(delta) ~
/// delta^{-s}` from a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// Set when some bracket is wider than a factor of two; the midpoint
    /// regression is then unreliable.
    pub low_confidence: bool,
}

pub fn estimate_exponent<T: GridInt>(profile: &HProfile<T>) -> Result<ExponentEstimate> {
    let n = profile.rows.len();
    if n < 3 {
        return Err(Error::ProfileTooShort { min: 3, got: n });
    }
    let mut low_confidence = false;
    let pts: Vec<(f64, f64)> = profile
        .rows
        .iter()
        .map(|row| {
            let b = &row.bracket;
            if b.hi > 2 * b.lo {
                low_confidence = true;
            }
            let x = -b.delta.to_f64().ln();
            let y = (0.5 * (b.lo + b.hi) as f64).ln();
            (x, y)
        })
        .collect();
    let nf = n as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / nf, sy / nf);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).abs())
        .fold(0.0, f64::max);
    Ok(ExponentEstimate { slope, intercept, max_residual, low_confidence })
}

/// One certified run of the gap sequence: the component count jumps by
/// `multiplicity` somewhere in the squared-delta interval
/// `(delta_sq_lo, delta_sq_hi]`, i.e. the gap values `g_i` for
/// `first_index <= i < first_index + multiplicity` all lie in that
/// interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapEntry<T: GridInt> {
    pub first_index: u64,
    pub multiplicity: u64,
    /// Exclusive lower bound on the squared gap values.
    pub delta_sq_lo: Frac<T>,
    /// Inclusive upper bound on the squared gap values.
    pub delta_sq_hi: Frac<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSequence<T: GridInt> {
    pub depth: u32,
    /// Certified runs, largest delta first.
    pub entries: Vec<GapEntry<T>>,
    /// Inclusive squared-delta candidate ranges where the bracket did not
    /// close, largest first. Jumps inside these ranges are unlocated.
    pub unresolved: Vec<(Frac<T>, Frac<T>)>,
    /// Squared resolution floor: candidates below the stage box diameter
    /// are not examined.
    pub floor_sq: Frac<T>,
}

impl<T: GridInt> GapSequence<T> {
    /// Certified squared-delta interval containing the `i`-th gap value
    /// (1-based), if the sweep located it.
    pub fn gap(&self, i: u64) -> Option<(&Frac<T>, &Frac<T>)> {
        if i == 0 {
            return None;
        }
        self.entries
            .iter()
            .find(|e| e.first_index <= i && i < e.first_index + e.multiplicity)
            .map(|e| (&e.delta_sq_lo, &e.delta_sq_hi))
    }

    /// CSV dump; delta bounds are square roots, for reading convenience.
    pub fn csv(&self) -> String {
        let mut out = String::from("index,delta_lo,delta_hi,multiplicity\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.first_index,
                e.delta_sq_lo.to_f64().sqrt(),
                e.delta_sq_hi.to_f64().sqrt(),
                e.multiplicity
            ));
        }
        out
    }
}

/// Locates the leading gap values of the attractor by sweeping a
/// union-find pair over every distinct box distance at a stage fine
/// enough to separate deltas down to `n_d^{-(k_max+1)}`.
pub fn gap_sequence<T: GridInt>(
    spec: &SpongeSpec,
    k_max: u32,
    budget: u64,
) -> Result<GapSequence<T>> {
    let n_top = spec.max_base();
    let target = Frac::<T>::inv_pow(n_top, k_max + 1)?;
    let depth = geometry::depth_for_delta(spec, &target)?;
    let ab = anchored_boxes::<T>(spec, &Word(vec![]), depth, budget)?;
    let boxes = &ab.boxes;
    let b = boxes.len();
    let pair_count = (b as u64) * (b as u64 - 1) / 2;
    if pair_count > budget {
        return Err(Error::BudgetExceeded {
            needed: format!("{pair_count} box pairs"),
            budget,
        });
    }
    let d = spec.dims();
    let exps = boxes[0].exps.clone();

    // Common denominator M for both squared-distance lanes.
    let g_sq: Vec<T> = (0..d)
        .map(|j| {
            let g: T = num::pow(spec.base(j), exps[j])?;
            num::mul(&g, &g)
        })
        .collect::<Result<_>>()?;
    let nm1: Vec<T> = (0..d)
        .map(|j| num::from_u32(spec.base(j) - 1))
        .collect::<Result<_>>()?;
    let a_sq: Vec<T> = (0..d)
        .map(|j| {
            let g = num::mul(&num::pow::<T>(spec.base(j), ab.word_len)?, &nm1[j])?;
            num::mul(&g, &g)
        })
        .collect::<Result<_>>()?;
    let mut m_den = T::one();
    for v in g_sq.iter().chain(a_sq.iter()) {
        m_den = checked_lcm(&m_den, v)?;
    }
    let fg: Vec<T> = g_sq.iter().map(|g| m_den.clone() / g.clone()).collect();
    let fa: Vec<T> = a_sq.iter().map(|g| m_den.clone() / g.clone()).collect();

    let n_digits = spec.digit_count();
    let mut anchor_units = Vec::with_capacity(b * n_digits * d);
    for vals in &ab.anchor_vals {
        for digit in spec.digits() {
            for j in 0..d {
                let iv: T = num::from_u32(digit[j])?;
                anchor_units.push(num::add(&num::mul(&vals[j], &nm1[j])?, &iv)?);
            }
        }
    }
    let gap_of = |i: usize, j: usize| -> Result<T> {
        let mut s = T::zero();
        for ax in 0..d {
            let diff = num::sub(&boxes[i].corners[ax], &boxes[j].corners[ax])?.abs();
            if diff > T::one() {
                let u = num::sub(&diff, &T::one())?;
                s = num::add(&s, &num::mul(&num::mul(&u, &u)?, &fg[ax])?)?;
            }
        }
        Ok(s)
    };
    let stride = n_digits * d;
    let merge_of = |i: usize, j: usize| -> Result<Option<T>> {
        let ai = &anchor_units[i * stride..(i + 1) * stride];
        let aj = &anchor_units[j * stride..(j + 1) * stride];
        let mut best: Option<T> = None;
        for ti in 0..n_digits {
            'pair: for tj in 0..n_digits {
                let mut s = T::zero();
                for ax in 0..d {
                    let dc = num::sub(&ai[ti * d + ax], &aj[tj * d + ax])?.abs();
                    let term = num::mul(&num::mul(&dc, &dc)?, &fa[ax])?;
                    s = match s.checked_add(&term) {
                        Some(v) => v,
                        None => continue 'pair,
                    };
                }
                best = Some(match best {
                    Some(cur) if cur <= s => cur,
                    _ => s,
                });
            }
        }
        Ok(best)
    };

    // Resolution floor: squared stage box diameter, exact over M.
    let mut floor_scaled = T::zero();
    for f in &fg {
        floor_scaled = num::add(&floor_scaled, f)?;
    }

    // Pass 1: candidate values = distinct positive box gaps above the
    // floor, plus the grid values n_d^{-2k}.
    let mut cand_set: BTreeSet<T> = (0..b)
        .into_par_iter()
        .map(|i| -> Result<BTreeSet<T>> {
            let mut local = BTreeSet::new();
            for j in (i + 1)..b {
                let g = gap_of(i, j)?;
                if g >= floor_scaled && !g.is_zero() {
                    local.insert(g);
                }
            }
            Ok(local)
        })
        .try_reduce(BTreeSet::new, |mut a, mut b| {
            a.append(&mut b);
            Ok(a)
        })?;
    for k in 1..=k_max {
        let den: T = num::pow(n_top, 2 * k)?;
        let val = m_den.clone() / den; // exact: n_d^{2k} divides M
        if val >= floor_scaled {
            cand_set.insert(val);
        }
    }
    let candidates: Vec<T> = cand_set.into_iter().collect();
    let floor_sq = Frac::new(floor_scaled, m_den.clone())?;
    if candidates.is_empty() {
        return Ok(GapSequence { depth, entries: vec![], unresolved: vec![], floor_sq });
    }

    // Pass 2: bucket each pair at the first candidate where its edge
    // becomes active.
    let per_i: Vec<(Vec<(u32, u32, u32)>, Vec<(u32, u32, u32)>)> = (0..b)
        .into_par_iter()
        .map(|i| -> Result<(Vec<(u32, u32, u32)>, Vec<(u32, u32, u32)>)> {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for j in (i + 1)..b {
                let g = gap_of(i, j)?;
                let idx = candidates.partition_point(|c| *c < g);
                if idx < candidates.len() {
                    lo.push((idx as u32, i as u32, j as u32));
                }
                if let Some(mg) = merge_of(i, j)? {
                    // Merge values live over M as well; same bucket rule.
                    let idx = candidates.partition_point(|c| *c < mg);
                    if idx < candidates.len() {
                        hi.push((idx as u32, i as u32, j as u32));
                    }
                }
            }
            Ok((lo, hi))
        })
        .collect::<Result<_>>()?;
    let mut lo_buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); candidates.len()];
    let mut hi_buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); candidates.len()];
    for (lo, hi) in per_i {
        for (idx, i, j) in lo {
            lo_buckets[idx as usize].push((i, j));
        }
        for (idx, i, j) in hi {
            hi_buckets[idx as usize].push((i, j));
        }
    }

    // Ascending sweep recording the bracket at every candidate.
    let mut uf_lo = UnionFind::new(b);
    let mut uf_hi = UnionFind::new(b);
    let mut records: Vec<(T, u64, u64)> = Vec::with_capacity(candidates.len());
    for (ci, cval) in candidates.iter().enumerate() {
        for &(i, j) in &lo_buckets[ci] {
            uf_lo.union(i as usize, j as usize);
        }
        for &(i, j) in &hi_buckets[ci] {
            uf_hi.union(i as usize, j as usize);
        }
        records.push((cval.clone(), uf_lo.count() as u64, uf_hi.count() as u64));
    }

    // Walk down from the largest candidate, emitting an entry whenever the
    // resolved count steps up between consecutive resolved candidates.
    let mut entries = Vec::new();
    let mut unresolved = Vec::new();
    let mut prev_resolved: Option<(T, u64)> = None;
    let mut open_run: Option<(T, T)> = None;
    for (cval, lo, hi) in records.into_iter().rev() {
        if lo == hi {
            if let Some((low, high)) = open_run.take() {
                unresolved.push((Frac::new(low, m_den.clone())?, Frac::new(high, m_den.clone())?));
            }
            match &prev_resolved {
                Some((pc, ph)) => {
                    if lo > *ph {
                        entries.push(GapEntry {
                            first_index: *ph,
                            multiplicity: lo - ph,
                            delta_sq_lo: Frac::new(cval.clone(), m_den.clone())?,
                            delta_sq_hi: Frac::new(pc.clone(), m_den.clone())?,
                        });
                    }
                }
                None => {
                    if lo > 1 {
                        // Jumps above the largest resolved candidate are
                        // bounded by the unit-cube diameter.
                        entries.push(GapEntry {
                            first_index: 1,
                            multiplicity: lo - 1,
                            delta_sq_lo: Frac::new(cval.clone(), m_den.clone())?,
                            delta_sq_hi: Frac::from_int(num::from_u32(d as u32)?),
                        });
                    }
                }
            }
            prev_resolved = Some((cval, lo));
        } else {
            open_run = Some(match open_run.take() {
                Some((_, high)) => (cval, high),
                None => (cval.clone(), cval),
            });
        }
    }
    if let Some((low, high)) = open_run.take() {
        unresolved.push((Frac::new(low, m_den.clone())?, Frac::new(high, m_den)?));
    }
    Ok(GapSequence { depth, entries, unresolved, floor_sq })
}

/// One resampled point of the gap-sequence inversion: the component count
/// recomputed at `delta_sq` must bracket `expected`, and equal it when
/// the bracket closes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTripRow<T: GridInt> {
    pub delta_sq: Frac<T>,
    pub expected: u64,
    pub lo: u64,
    pub hi: u64,
}

impl<T: GridInt> RoundTripRow<T> {
    /// Bracket contains the expected count, exactly when closed.
    pub fn consistent(&self) -> bool {
        self.lo <= self.expected && self.expected <= self.hi
    }
}

/// Invert a gap sequence back into sampled component counts. Counting
/// jumps, the component count at a delta equal to the `i`-th largest gap
/// value is exactly `i` (chains may use distances equal to delta), which
/// for each certified run means: resampling at the run's inclusive upper
/// bound must reproduce the run's first index. Sampling happens at the
/// same stage the sequence was computed at, so resolved runs resample
/// exactly.
pub fn gap_round_trip<T: GridInt>(
    spec: &SpongeSpec,
    gaps: &GapSequence<T>,
    budget: u64,
) -> Result<Vec<RoundTripRow<T>>> {
    let mut rows = Vec::with_capacity(gaps.entries.len());
    for e in &gaps.entries {
        let (lo, hi, _) = h_bracket_at_sq(spec, &e.delta_sq_hi, Some(gaps.depth), budget)?;
        rows.push(RoundTripRow {
            delta_sq: e.delta_sq_hi.clone(),
            expected: e.first_index,
            lo,
            hi,
        });
    }
    Ok(rows)
}

/// Bracketed spread statistic: the largest delta-component diameter in
/// units of delta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadStat<T: GridInt> {
    pub delta: Frac<T>,
    pub depth: u32,
    /// Squared lower bound on `max diam(component) / delta`.
    pub ratio_sq_lo: Frac<T>,
    /// Squared upper bound.
    pub ratio_sq_hi: Frac<T>,
    /// Boxes of the gap-graph component attaining the upper bound.
    pub witness: Vec<ExactBox<T>>,
}

pub fn spread_statistic<T: GridInt>(
    spec: &SpongeSpec,
    delta: &Frac<T>,
    depth: Option<u32>,
    budget: u64,
) -> Result<SpreadStat<T>> {
    if !delta.is_positive() {
        return Err(Error::DeltaTooLarge { delta: delta.to_string(), side: "0".into() });
    }
    let depth = match depth {
        Some(t) => t,
        None => geometry::depth_for_delta(spec, delta)?,
    };
    if geometry::stage_diam_sq::<T>(spec, depth)? > delta.square()? {
        return Err(Error::DepthTooShallow { depth, delta: delta.to_string() });
    }
    let ab = anchored_boxes::<T>(spec, &Word(vec![]), depth, budget)?;
    let (lo_part, hi_part) = delta_partitions_anchored(spec, &ab, &delta.square()?, budget)?;
    let boxes = &ab.boxes;
    let bases = spec.bases();

    let work: u64 = [&lo_part, &hi_part]
        .iter()
        .flat_map(|p| p.comps.iter())
        .map(|c| (c.len() as u64) * (c.len() as u64 - 1) / 2)
        .sum();
    if work > budget {
        return Err(Error::BudgetExceeded {
            needed: format!("{work} in-component pairs"),
            budget,
        });
    }

    // Lower bound: certified components (merge graph) are subsets of true
    // components, and box gaps are lower bounds on point distances.
    let mut lo_diam_sq = Frac::zero();
    for comp in &hi_part.comps {
        for (x, &i) in comp.iter().enumerate() {
            for &j in comp.iter().skip(x + 1) {
                let g = boxes[i].gap_sq(&boxes[j], bases)?;
                if g > lo_diam_sq {
                    lo_diam_sq = g;
                }
            }
        }
    }
    // Upper bound: true components are subsets of gap-graph components,
    // and box spans are upper bounds on point distances.
    let mut hi_diam_sq = Frac::zero();
    let mut witness_idx = 0usize;
    for (ci, comp) in lo_part.comps.iter().enumerate() {
        let mut comp_span = Frac::zero();
        if comp.len() == 1 {
            comp_span = boxes[comp[0]].diam_sq(bases)?;
        }
        for (x, &i) in comp.iter().enumerate() {
            for &j in comp.iter().skip(x + 1) {
                let s = boxes[i].span_sq(&boxes[j], bases)?;
                if s > comp_span {
                    comp_span = s;
                }
            }
        }
        if comp_span > hi_diam_sq {
            hi_diam_sq = comp_span;
            witness_idx = ci;
        }
    }
    debug_assert!(lo_diam_sq <= hi_diam_sq);
    let delta_sq = delta.square()?;
    Ok(SpreadStat {
        delta: delta.clone(),
        depth,
        ratio_sq_lo: lo_diam_sq.checked_div(&delta_sq)?,
        ratio_sq_hi: hi_diam_sq.checked_div(&delta_sq)?,
        witness: lo_part.comps[witness_idx].iter().map(|&i| boxes[i].clone()).collect(),
    })
}
