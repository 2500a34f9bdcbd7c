//! Classifiers for two global properties of a sponge attractor, built as
//! certified conjunctions of the per-set deciders, plus a pairwise
//! comparison that can distinguish attractors up to Lipschitz maps.
//!
//! * Maximal power law: the delta-component count grows at the fastest
//!   rate the box dimension allows. Holds exactly when the attractor —
//!   and, for strict sponges, each of its leading-axes projections — has
//!   trivial points.
//! * Perfect disconnectedness: every delta-scale component has diameter
//!   comparable to delta. Holds exactly when the attractor — and, for
//!   strict sponges, each leading-axes projection — is totally
//!   disconnected.
//!
//! Answers come only from certificates; the numeric corroboration block
//! (profile exponents, spread trends) is advisory and never overrides a
//! verdict.

use rayon::prelude::*;

use crate::deciders::{self, Answer, Verdict};
use crate::error::{Error, Result};
use crate::metrics;
use crate::model::{Kind, SpongeSpec};
use crate::num::{Frac, GridInt};

/// Property a [`Classification`] speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassProperty {
    MaximalPowerLaw,
    PerfectlyDisconnected,
}

/// Why a classification is `Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    /// The spec is outside the hypotheses the classification theorems
    /// cover: mixed base pattern, or an attractor degenerated to a point.
    OutOfTheoremScope,
    /// Some required sub-verdict stayed undecided at the configured caps.
    DepthExhausted,
}

/// Search caps and budgets for classification runs.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Deepest level searched for islands.
    pub island_cap: u32,
    /// Deepest level tried by the neighbor-translate test.
    pub xi_cap: u32,
    /// Levels sampled by corroborating profiles and spread trends.
    pub profile_kmax: u32,
    /// Deepest gap-sequence index ladder used by comparisons.
    pub gap_kmax: u32,
    /// Box/pair budget for each underlying computation.
    pub budget: u64,
    /// Heuristic flag threshold: monotone gap-ratio drift beyond this
    /// factor across resolved indices is reported as divergence.
    pub ratio_divergence_factor: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            island_cap: 4,
            xi_cap: 3,
            profile_kmax: 5,
            gap_kmax: 4,
            budget: crate::DEFAULT_BUDGET,
            ratio_divergence_factor: 8.0,
        }
    }
}

/// One decided set entering a classification: the attractor itself or a
/// leading-axes projection of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjunct<T: GridInt> {
    /// Number of leading axes kept; equals the (reduced) dimension for
    /// the attractor itself.
    pub axes: usize,
    /// Whether this sub-verdict feeds the overall answer. Projections of
    /// a cube are reported as evidence but are not required by the cube
    /// form of the theorems.
    pub required: bool,
    pub verdict: Verdict<T>,
}

/// Advisory numeric evidence accompanying a classification.
#[derive(Debug, Clone, PartialEq)]
pub enum Corroboration {
    /// Log-log slope of the component-count profile against the box
    /// dimension; the maximal power law predicts agreement.
    Exponent { slope: f64, box_dimension: f64, low_confidence: bool },
    /// Bracketed max component-spread ratios at `delta = n_d^{-k}`,
    /// ascending in `k`; perfect disconnectedness predicts boundedness.
    Spread { ratios: Vec<(u32, f64, f64)> },
}

/// Certified classification of one spec for one property.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T: GridInt> {
    pub property: ClassProperty,
    pub answer: Answer,
    /// Populated exactly when `answer` is `Unknown`.
    pub reason: Option<UnknownReason>,
    /// 1-based original axes surviving degenerate-axis reduction.
    pub kept_axes: Vec<usize>,
    /// Sub-verdicts, the attractor first, then projections by ascending
    /// axis count. Empty when the spec is out of theorem scope.
    pub conjuncts: Vec<Conjunct<T>>,
    /// Advisory numbers; errors while computing them are swallowed.
    pub corroboration: Option<Corroboration>,
}

/// Does the delta-component count of the attractor follow the maximal
/// power law `h(delta) ~ delta^{-dim_B}`?
pub fn classify_maximal_power_law<T: GridInt>(
    spec: &SpongeSpec,
    caps: &Caps,
) -> Result<Classification<T>> {
    classify_property(spec, caps, ClassProperty::MaximalPowerLaw)
}

/// Is every delta-scale component of the attractor of diameter
/// comparable to delta (perfect disconnectedness)?
pub fn classify_perfectly_disconnected<T: GridInt>(
    spec: &SpongeSpec,
    caps: &Caps,
) -> Result<Classification<T>> {
    classify_property(spec, caps, ClassProperty::PerfectlyDisconnected)
}

fn out_of_scope<T: GridInt>(
    property: ClassProperty,
    kept_axes: Vec<usize>,
) -> Classification<T> {
    Classification {
        property,
        answer: Answer::Unknown,
        reason: Some(UnknownReason::OutOfTheoremScope),
        kept_axes,
        conjuncts: Vec::new(),
        corroboration: None,
    }
}

fn classify_property<T: GridInt>(
    spec: &SpongeSpec,
    caps: &Caps,
    property: ClassProperty,
) -> Result<Classification<T>> {
    let (reduced, kept) = match spec.reduce_degenerate() {
        Ok(pair) => pair,
        Err(Error::AllAxesDegenerate) => {
            return Ok(out_of_scope(property, Vec::new()));
        }
        Err(e) => return Err(e),
    };
    let kind = reduced.kind();
    if kind == Kind::Mixed {
        return Ok(out_of_scope(property, kept));
    }
    let d = reduced.dims();

    // The attractor itself, then every leading-axes projection. For a
    // cube only the attractor's own verdict is required; for a strict
    // sponge the theorems require every projection as well.
    let mut targets: Vec<(usize, bool, SpongeSpec)> =
        vec![(d, true, reduced.clone())];
    for j in 1..d {
        targets.push((j, kind == Kind::Sponge, reduced.project(j)?));
    }

    let conjuncts: Vec<Conjunct<T>> = targets
        .into_par_iter()
        .map(|(axes, required, s)| {
            let verdict = match property {
                ClassProperty::MaximalPowerLaw => {
                    deciders::has_trivial_points::<T>(&s, caps.island_cap, caps.budget)?
                }
                ClassProperty::PerfectlyDisconnected => {
                    deciders::is_totally_disconnected::<T>(&s, caps.xi_cap, caps.budget)?
                }
            };
            Ok(Conjunct { axes, required, verdict })
        })
        .collect::<Result<Vec<_>>>()?;

    let required: Vec<&Conjunct<T>> = conjuncts.iter().filter(|c| c.required).collect();
    let answer = if required.iter().any(|c| c.verdict.answer == Answer::No) {
        Answer::No
    } else if required.iter().all(|c| c.verdict.answer == Answer::Yes) {
        Answer::Yes
    } else {
        Answer::Unknown
    };
    let reason = match answer {
        Answer::Unknown => Some(UnknownReason::DepthExhausted),
        _ => None,
    };

    let corroboration = match property {
        ClassProperty::MaximalPowerLaw => exponent_corroboration::<T>(&reduced, caps),
        ClassProperty::PerfectlyDisconnected => spread_corroboration::<T>(&reduced, caps),
    };

    Ok(Classification { property, answer, reason, kept_axes: kept, conjuncts, corroboration })
}

fn exponent_corroboration<T: GridInt>(spec: &SpongeSpec, caps: &Caps) -> Option<Corroboration> {
    let profile = metrics::h_profile::<T>(spec, caps.profile_kmax, None, caps.budget).ok()?;
    let est = metrics::estimate_exponent(&profile).ok()?;
    Some(Corroboration::Exponent {
        slope: est.slope,
        box_dimension: spec.box_dimension().value,
        low_confidence: est.low_confidence,
    })
}

fn spread_corroboration<T: GridInt>(spec: &SpongeSpec, caps: &Caps) -> Option<Corroboration> {
    let mut ratios = Vec::new();
    for k in 1..=caps.profile_kmax {
        let delta = Frac::<T>::inv_pow(spec.max_base(), k).ok()?;
        match metrics::spread_statistic(spec, &delta, None, caps.budget) {
            Ok(stat) => ratios.push((
                k,
                stat.ratio_sq_lo.to_f64().sqrt(),
                stat.ratio_sq_hi.to_f64().sqrt(),
            )),
            Err(_) => break,
        }
    }
    if ratios.is_empty() {
        None
    } else {
        Some(Corroboration::Spread { ratios })
    }
}

/// Outcome of comparing two specs through Lipschitz-invariant structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    /// Some property has definite, differing verdicts: no Lipschitz map
    /// can carry one attractor onto the other.
    DistinguishedNotLipschitz,
    /// No certified distinction at the configured caps.
    NotDistinguished,
}

/// Measured window of the gap-value ratios `g_i(A) / g_i(B)` over indices
/// resolved in both sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRatioWindow {
    pub resolved_indices: u64,
    /// Outer bounds of the ratio over all compared indices.
    pub inf: f64,
    pub sup: f64,
    /// Heuristic flag: ratio midpoints drift monotonically by more than
    /// the configured factor. Advisory only, never a verdict.
    pub divergent: bool,
}

/// Full pairwise comparison: both classifications for both specs, the
/// gap-ratio window, and the one certified conclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T: GridInt> {
    pub mpl: (Classification<T>, Classification<T>),
    pub pd: (Classification<T>, Classification<T>),
    pub ratio_window: Option<GapRatioWindow>,
    pub conclusion: Conclusion,
}

fn definite_mismatch(a: Answer, b: Answer) -> bool {
    matches!(
        (a, b),
        (Answer::Yes, Answer::No) | (Answer::No, Answer::Yes)
    )
}

/// Compare two attractors. The conclusion is
/// [`Conclusion::DistinguishedNotLipschitz`] exactly when one of the two
/// classified properties has definite, differing verdicts; measured
/// gap-ratio divergence is reported but never concludes on its own.
pub fn compare<T: GridInt>(
    left: &SpongeSpec,
    right: &SpongeSpec,
    caps: &Caps,
) -> Result<ComparisonReport<T>> {
    let mpl = (
        classify_maximal_power_law::<T>(left, caps)?,
        classify_maximal_power_law::<T>(right, caps)?,
    );
    let pd = (
        classify_perfectly_disconnected::<T>(left, caps)?,
        classify_perfectly_disconnected::<T>(right, caps)?,
    );
    let conclusion = if definite_mismatch(mpl.0.answer, mpl.1.answer)
        || definite_mismatch(pd.0.answer, pd.1.answer)
    {
        Conclusion::DistinguishedNotLipschitz
    } else {
        Conclusion::NotDistinguished
    };
    let ratio_window = gap_ratio_window::<T>(left, right, caps);
    Ok(ComparisonReport { mpl, pd, ratio_window, conclusion })
}

fn gap_ratio_window<T: GridInt>(
    left: &SpongeSpec,
    right: &SpongeSpec,
    caps: &Caps,
) -> Option<GapRatioWindow> {
    let ga = metrics::gap_sequence::<T>(left, caps.gap_kmax, caps.budget).ok()?;
    let gb = metrics::gap_sequence::<T>(right, caps.gap_kmax, caps.budget).ok()?;
    let last_a = ga.entries.last()?;
    let last_b = gb.entries.last()?;
    let max_a = last_a.first_index + last_a.multiplicity - 1;
    let max_b = last_b.first_index + last_b.multiplicity - 1;
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    let mut mids: Vec<f64> = Vec::new();
    let mut resolved = 0u64;
    for i in 1..=max_a.min(max_b) {
        let (Some((alo, ahi)), Some((blo, bhi))) = (ga.gap(i), gb.gap(i)) else {
            continue;
        };
        resolved += 1;
        // Gap values are bracketed by (sq_lo, sq_hi]; the ratio interval
        // takes opposite ends.
        let lo = (alo.to_f64() / bhi.to_f64()).sqrt();
        let hi = (ahi.to_f64() / blo.to_f64()).sqrt();
        inf = inf.min(lo);
        sup = sup.max(hi);
        mids.push(((ahi.to_f64() / bhi.to_f64()).sqrt() + (alo.to_f64() / blo.to_f64()).sqrt()) / 2.0);
    }
    if resolved == 0 {
        return None;
    }
    let monotone = mids.windows(2).all(|w| w[1] >= w[0])
        || mids.windows(2).all(|w| w[1] <= w[0]);
    let first = *mids.first().unwrap_or(&1.0);
    let last = *mids.last().unwrap_or(&1.0);
    let drift = if first > 0.0 && last > 0.0 {
        (last / first).max(first / last)
    } else {
        f64::INFINITY
    };
    let divergent = mids.len() >= 2 && monotone && drift > caps.ratio_divergence_factor;
    Some(GapRatioWindow { resolved_indices: resolved, inf, sup, divergent })
}
