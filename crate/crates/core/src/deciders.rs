//! Decision procedures for two connectivity properties of a sponge
//! attractor, each returning a verdict carrying a machine-checkable
//! certificate:
//!
//! * [`has_trivial_points`] — does the attractor contain a point that is
//!   its own connected component?
//! * [`is_totally_disconnected`] — is *every* connected component a
//!   single point?
//!
//! Both searches are finite and certified. A `Yes`/`No` answer comes with
//! a witness that [`verify_certificate`] can re-check from scratch against
//! the brute-force component oracle; an `Unknown` answer records the
//! exhausted search depth and certifies nothing.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::components;
use crate::error::{Error, Result};
use crate::geometry::{self, ExactBox};
use crate::model::SpongeSpec;
use crate::num::GridInt;

/// Three-valued outcome of a decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

/// Which property a verdict speaks about; used when re-checking
/// certificates so that answer and certificate kind can be matched up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    TrivialPoints,
    TotallyDisconnected,
}

/// Machine-checkable evidence attached to a [`Verdict`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate<T: GridInt> {
    /// A whole connected component of the level-`level` pillars that
    /// avoids the unit-cube boundary. Scaled copies of the attractor nest
    /// inside it, so repeating the construction pins a singleton
    /// component: the attractor has trivial points.
    IslandAtLevel { level: u32, witness: Vec<ExactBox<T>> },
    /// The digit set projected onto `axes` (1-based) is a full product, so
    /// the attractor contains a product of full unit intervals on those
    /// axes: no trivial points, and not totally disconnected.
    FullProjectionInterval { axes: Vec<usize> },
    /// The neighbor-translate test succeeded at level `level`: among the
    /// `3^d` unit translates of the level-`level` pillars, no connected
    /// component both meets the unit cube and reaches the boundary of the
    /// enlarged cube `[-1,2]^d`. Components of the attractor therefore
    /// cannot cross a stage cell, at any scale: all are points.
    XiLevel { level: u32 },
    /// On `axis` (1-based), every digit value occurs with the other
    /// coordinates fixed to `fixed`, so the attractor contains a straight
    /// segment parallel to that axis: not totally disconnected.
    LineSegmentWitness { axis: usize, fixed: Vec<u32> },
    /// The search ran out of levels at `cap` without deciding.
    DepthExhausted { cap: u32 },
}

/// Outcome of a decision procedure: the answer, its certificate, and the
/// 1-based original axes the decision was computed on (after any
/// degenerate-axis reduction; the identity when no reduction applies).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<T: GridInt> {
    pub answer: Answer,
    pub certificate: Certificate<T>,
    pub kept_axes: Vec<usize>,
}

/// Does the attractor contain a singleton connected component?
///
/// Degenerate axes are dropped first (the attractor is isometric to its
/// reduction). If the reduced digit set is a full product the attractor is
/// a cube and the answer is `No`; otherwise levels `1..=cap` are searched
/// for an island — a pillar component avoiding the unit-cube boundary —
/// which forces trivial points. With no island up to `cap` the answer is
/// `Unknown`.
///
/// Errors with [`Error::AllAxesDegenerate`] when the attractor is a single
/// point.
pub fn has_trivial_points<T: GridInt>(
    spec: &SpongeSpec,
    cap: u32,
    budget: u64,
) -> Result<Verdict<T>> {
    let (reduced, kept) = spec.reduce_degenerate()?;
    if reduced.is_full_product() {
        return Ok(Verdict {
            answer: Answer::No,
            certificate: Certificate::FullProjectionInterval { axes: kept.clone() },
            kept_axes: kept,
        });
    }
    for level in 1..=cap {
        let (count, witness) = components::islands::<T>(&reduced, level, budget)?;
        if count > 0 {
            let witness = witness.expect("island count is positive");
            return Ok(Verdict {
                answer: Answer::Yes,
                certificate: Certificate::IslandAtLevel { level, witness },
                kept_axes: kept,
            });
        }
    }
    Ok(Verdict {
        answer: Answer::Unknown,
        certificate: Certificate::DepthExhausted { cap },
        kept_axes: kept,
    })
}

/// Is every connected component of the attractor a single point?
///
/// No axis reduction is applied; certificates refer to the spec as given.
/// A full digit product or a full digit line refutes the property with an
/// explicit continuum witness. Otherwise the neighbor-translate test is
/// run at levels `1..=cap`; the first certifying level proves the
/// property. If no level certifies the answer is `Unknown`.
pub fn is_totally_disconnected<T: GridInt>(
    spec: &SpongeSpec,
    cap: u32,
    budget: u64,
) -> Result<Verdict<T>> {
    let identity: Vec<usize> = (1..=spec.dims()).collect();
    if spec.is_full_product() {
        return Ok(Verdict {
            answer: Answer::No,
            certificate: Certificate::FullProjectionInterval { axes: identity.clone() },
            kept_axes: identity,
        });
    }
    if let Some((axis, fixed)) = find_full_line(spec) {
        return Ok(Verdict {
            answer: Answer::No,
            certificate: Certificate::LineSegmentWitness { axis, fixed },
            kept_axes: identity,
        });
    }
    for level in 1..=cap {
        if xi_level_certifies::<T>(spec, level, budget)? {
            return Ok(Verdict {
                answer: Answer::Yes,
                certificate: Certificate::XiLevel { level },
                kept_axes: identity,
            });
        }
    }
    Ok(Verdict {
        answer: Answer::Unknown,
        certificate: Certificate::DepthExhausted { cap },
        kept_axes: identity,
    })
}

/// Number of boxes examined by the level-`k0` neighbor-translate test:
/// `3^d * N^k0` for `N` digits in dimension `d`.
pub fn finite_type_bound(spec: &SpongeSpec, k0: u32) -> Result<u64> {
    let translates = 3u64
        .checked_pow(spec.dims() as u32)
        .ok_or(Error::ArithmeticOverflow)?;
    let per_translate = (spec.digit_count() as u64)
        .checked_pow(k0)
        .ok_or(Error::ArithmeticOverflow)?;
    translates
        .checked_mul(per_translate)
        .ok_or(Error::ArithmeticOverflow)
}

/// Re-check a verdict's certificate from scratch.
///
/// The certificate kind must match the stated answer and property, the
/// kept axes must match an independent re-reduction, and the witness data
/// must re-verify: island witnesses against the brute-force component
/// oracle, translate levels by re-running the test, digit lines and full
/// products by direct digit-set inspection. Any mismatch yields
/// [`Error::InvalidCertificate`].
pub fn verify_certificate<T: GridInt>(
    spec: &SpongeSpec,
    property: Property,
    verdict: &Verdict<T>,
    budget: u64,
) -> Result<()> {
    check_coherence(property, verdict)?;
    match property {
        Property::TrivialPoints => {
            let (_, kept) = spec.reduce_degenerate()?;
            if verdict.kept_axes != kept {
                return Err(invalid(
                    "kept axes do not match the degenerate-axis reduction",
                ));
            }
        }
        Property::TotallyDisconnected => {
            let identity: Vec<usize> = (1..=spec.dims()).collect();
            if verdict.kept_axes != identity {
                return Err(invalid("kept axes must be the identity for this property"));
            }
        }
    }
    match &verdict.certificate {
        Certificate::IslandAtLevel { level, witness } => {
            verify_island(spec, *level, witness, budget)
        }
        Certificate::FullProjectionInterval { axes } => {
            if axes != &verdict.kept_axes {
                return Err(invalid("full-projection axes must match the kept axes"));
            }
            let projected = spec.project_axes(axes)?;
            if projected.is_full_product() {
                Ok(())
            } else {
                Err(invalid(
                    "projection onto the stated axes is not a full digit product",
                ))
            }
        }
        Certificate::XiLevel { level } => {
            if xi_level_certifies::<T>(spec, *level, budget)? {
                Ok(())
            } else {
                Err(invalid(&format!(
                    "neighbor-translate test does not certify at level {level}"
                )))
            }
        }
        Certificate::LineSegmentWitness { axis, fixed } => verify_line(spec, *axis, fixed),
        Certificate::DepthExhausted { .. } => Ok(()),
    }
}

fn invalid(reason: &str) -> Error {
    Error::InvalidCertificate { reason: reason.to_string() }
}

fn check_coherence<T: GridInt>(property: Property, verdict: &Verdict<T>) -> Result<()> {
    use Certificate::*;
    let ok = match (property, verdict.answer) {
        (Property::TrivialPoints, Answer::Yes) => {
            matches!(verdict.certificate, IslandAtLevel { .. })
        }
        (Property::TrivialPoints, Answer::No) => {
            matches!(verdict.certificate, FullProjectionInterval { .. })
        }
        (Property::TotallyDisconnected, Answer::Yes) => {
            matches!(verdict.certificate, XiLevel { .. })
        }
        (Property::TotallyDisconnected, Answer::No) => matches!(
            verdict.certificate,
            FullProjectionInterval { .. } | LineSegmentWitness { .. }
        ),
        (_, Answer::Unknown) => matches!(verdict.certificate, DepthExhausted { .. }),
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(&format!(
            "certificate kind does not fit answer {:?} for {:?}",
            verdict.answer, property
        )))
    }
}

/// Smallest axis, then lexicographically smallest fixed tuple, carrying a
/// full digit line: all `n_axis` values present with the other
/// coordinates held at `fixed`.
fn find_full_line(spec: &SpongeSpec) -> Option<(usize, Vec<u32>)> {
    for axis in 0..spec.dims() {
        let n = spec.base(axis) as usize;
        let mut groups: BTreeMap<Vec<u32>, HashSet<u32>> = BTreeMap::new();
        for tuple in spec.digits() {
            let fixed: Vec<u32> = tuple
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != axis)
                .map(|(_, &v)| v)
                .collect();
            groups.entry(fixed).or_default().insert(tuple[axis]);
        }
        for (fixed, values) in groups {
            if values.len() == n {
                return Some((axis + 1, fixed));
            }
        }
    }
    None
}

/// One round of the neighbor-translate test: translate the level-`k`
/// pillars by every vector in `{-1,0,1}^d` and check that no connected
/// component of the union both meets the unit cube and touches the
/// boundary of `[-1,2]^d`.
fn xi_level_certifies<T: GridInt>(spec: &SpongeSpec, k: u32, budget: u64) -> Result<bool> {
    let d = spec.dims();
    let pillars: Vec<ExactBox<T>> = geometry::pillars(spec, k, budget)?;
    let translates = 3u64
        .checked_pow(d as u32)
        .ok_or(Error::ArithmeticOverflow)?;
    let total = translates
        .checked_mul(pillars.len() as u64)
        .ok_or(Error::ArithmeticOverflow)?;
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total.to_string(), budget });
    }
    let mut boxes: Vec<ExactBox<T>> = Vec::with_capacity(total as usize);
    let mut shift = vec![-1i32; d];
    'shifts: loop {
        for b in &pillars {
            boxes.push(b.translated(&shift, spec.bases())?);
        }
        for axis in 0..d {
            if shift[axis] < 1 {
                shift[axis] += 1;
                continue 'shifts;
            }
            shift[axis] = -1;
        }
        break;
    }
    debug_assert_eq!(boxes.len() as u64, total);
    let partition = components::components(&boxes, spec.bases())?;
    for comp in &partition.comps {
        let mut meets = false;
        for &i in comp {
            if boxes[i].meets_unit_cube(spec.bases())? {
                meets = true;
                break;
            }
        }
        if !meets {
            continue;
        }
        for &i in comp {
            if boxes[i].touches_enlarged_boundary(spec.bases())? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Re-check an island witness: after re-reduction, every witness box must
/// be a genuine level-`level` pillar, the witness must equal one whole
/// component of those pillars under the brute-force oracle, and no
/// witness box may touch the unit-cube boundary.
fn verify_island<T: GridInt>(
    spec: &SpongeSpec,
    level: u32,
    witness: &[ExactBox<T>],
    budget: u64,
) -> Result<()> {
    let (reduced, _) = spec.reduce_degenerate()?;
    if level == 0 || witness.is_empty() {
        return Err(invalid("island witness must be nonempty at a positive level"));
    }
    let boxes: Vec<ExactBox<T>> = geometry::pillars(&reduced, level, budget)?;
    let index: HashMap<&ExactBox<T>, usize> =
        boxes.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut members: Vec<usize> = Vec::with_capacity(witness.len());
    for b in witness {
        match index.get(b) {
            Some(&i) => members.push(i),
            None => return Err(invalid("witness box is not a pillar of the stated level")),
        }
    }
    members.sort_unstable();
    members.dedup();
    if members.len() != witness.len() {
        return Err(invalid("witness lists a pillar twice"));
    }
    let partition = components::components_brute(&boxes, reduced.bases())?;
    if !partition.comps.iter().any(|c| c == &members) {
        return Err(invalid("witness is not a whole component of the level pillars"));
    }
    for b in witness {
        if b.touches_unit_boundary(reduced.bases())? {
            return Err(invalid("witness component touches the unit-cube boundary"));
        }
    }
    Ok(())
}

/// Re-check a digit-line witness by direct membership tests.
fn verify_line(spec: &SpongeSpec, axis: usize, fixed: &[u32]) -> Result<()> {
    let d = spec.dims();
    if axis == 0 || axis > d {
        return Err(invalid("line axis out of range"));
    }
    if fixed.len() != d - 1 {
        return Err(invalid("line witness has the wrong arity"));
    }
    let set: HashSet<&Vec<u32>> = spec.digits().iter().collect();
    for value in 0..spec.base(axis - 1) {
        let mut tuple = Vec::with_capacity(d);
        tuple.extend_from_slice(&fixed[..axis - 1]);
        tuple.push(value);
        tuple.extend_from_slice(&fixed[axis - 1..]);
        if !set.contains(&tuple) {
            return Err(invalid(&format!(
                "digit line is missing value {value} on axis {axis}"
            )));
        }
    }
    Ok(())
}
