//! On-disk document schema: spec files, analysis reports, and the
//! re-verification walk over every certificate a report embeds.
//!
//! All numeric payloads that may exceed 64 bits (box corners, exact
//! rationals) travel as decimal strings, so the same documents round-trip
//! for both the fixed-width and the big-integer scalar types. Serialized
//! field order is declaration order, which keeps emitted documents
//! byte-deterministic.

use serde::{Deserialize, Serialize};

use crate::classify::{
    ClassProperty, Classification, ComparisonReport, Conclusion, Conjunct, Corroboration,
    GapRatioWindow, UnknownReason,
};
use crate::components::ComponentSummary;
use crate::deciders::{self, Answer, Certificate, Property, Verdict};
use crate::error::{Error, Result};
use crate::geometry::ExactBox;
use crate::metrics::{GapSequence, HProfile, RoundTripRow};
use crate::model::{Kind, SpongeSpec};
use crate::num::{Frac, GridInt};

fn malformed(reason: impl Into<String>) -> Error {
    Error::MalformedReport { reason: reason.into() }
}

/// Spec file: dimension, bases, digit tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDoc {
    pub dimension: usize,
    pub bases: Vec<u32>,
    pub digits: Vec<Vec<u32>>,
}

impl SpecDoc {
    pub fn from_spec(spec: &SpongeSpec) -> Self {
        SpecDoc {
            dimension: spec.dims(),
            bases: spec.bases().to_vec(),
            digits: spec.digits().to_vec(),
        }
    }

    /// Parse a spec document from JSON text.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| malformed(format!("spec file: {e}")))
    }

    /// Validate and build the spec.
    pub fn to_spec(&self) -> Result<SpongeSpec> {
        if self.dimension != self.bases.len() {
            return Err(malformed(format!(
                "spec file: dimension {} does not match {} bases",
                self.dimension,
                self.bases.len()
            )));
        }
        SpongeSpec::new(self.bases.clone(), self.digits.clone())
    }
}

/// Exact box: per-axis corner numerators (decimal strings) and exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxDoc {
    pub corners: Vec<String>,
    pub exps: Vec<u32>,
}

impl BoxDoc {
    pub fn from_box<T: GridInt>(b: &ExactBox<T>) -> Self {
        BoxDoc {
            corners: b.corners.iter().map(|c| c.to_string()).collect(),
            exps: b.exps.clone(),
        }
    }

    pub fn to_box<T: GridInt>(&self) -> Result<ExactBox<T>> {
        let corners = self
            .corners
            .iter()
            .map(|s| s.parse::<T>().map_err(|_| malformed(format!("bad corner {s:?}"))))
            .collect::<Result<Vec<T>>>()?;
        if corners.len() != self.exps.len() {
            return Err(malformed("box corner/exponent arity mismatch"));
        }
        Ok(ExactBox { corners, exps: self.exps.clone() })
    }
}

fn frac_to_string<T: GridInt>(f: &Frac<T>) -> String {
    f.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerDoc {
    Yes,
    No,
    Unknown,
}

impl From<Answer> for AnswerDoc {
    fn from(a: Answer) -> Self {
        match a {
            Answer::Yes => AnswerDoc::Yes,
            Answer::No => AnswerDoc::No,
            Answer::Unknown => AnswerDoc::Unknown,
        }
    }
}

impl From<AnswerDoc> for Answer {
    fn from(a: AnswerDoc) -> Self {
        match a {
            AnswerDoc::Yes => Answer::Yes,
            AnswerDoc::No => Answer::No,
            AnswerDoc::Unknown => Answer::Unknown,
        }
    }
}

/// Certificate wire form, tagged by kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateDoc {
    IslandAtLevel { level: u32, witness: Vec<BoxDoc> },
    FullProjectionInterval { axes: Vec<usize> },
    XiLevel { level: u32 },
    LineSegmentWitness { axis: usize, fixed: Vec<u32> },
    DepthExhausted { cap: u32 },
}

impl CertificateDoc {
    pub fn from_certificate<T: GridInt>(c: &Certificate<T>) -> Self {
        match c {
            Certificate::IslandAtLevel { level, witness } => CertificateDoc::IslandAtLevel {
                level: *level,
                witness: witness.iter().map(BoxDoc::from_box).collect(),
            },
            Certificate::FullProjectionInterval { axes } => {
                CertificateDoc::FullProjectionInterval { axes: axes.clone() }
            }
            Certificate::XiLevel { level } => CertificateDoc::XiLevel { level: *level },
            Certificate::LineSegmentWitness { axis, fixed } => {
                CertificateDoc::LineSegmentWitness { axis: *axis, fixed: fixed.clone() }
            }
            Certificate::DepthExhausted { cap } => CertificateDoc::DepthExhausted { cap: *cap },
        }
    }

    pub fn to_certificate<T: GridInt>(&self) -> Result<Certificate<T>> {
        Ok(match self {
            CertificateDoc::IslandAtLevel { level, witness } => Certificate::IslandAtLevel {
                level: *level,
                witness: witness
                    .iter()
                    .map(BoxDoc::to_box)
                    .collect::<Result<Vec<_>>>()?,
            },
            CertificateDoc::FullProjectionInterval { axes } => {
                Certificate::FullProjectionInterval { axes: axes.clone() }
            }
            CertificateDoc::XiLevel { level } => Certificate::XiLevel { level: *level },
            CertificateDoc::LineSegmentWitness { axis, fixed } => {
                Certificate::LineSegmentWitness { axis: *axis, fixed: fixed.clone() }
            }
            CertificateDoc::DepthExhausted { cap } => {
                Certificate::DepthExhausted { cap: *cap }
            }
        })
    }
}

/// Verdict wire form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub answer: AnswerDoc,
    pub certificate: CertificateDoc,
    pub kept_axes: Vec<usize>,
}

impl VerdictDoc {
    pub fn from_verdict<T: GridInt>(v: &Verdict<T>) -> Self {
        VerdictDoc {
            answer: v.answer.into(),
            certificate: CertificateDoc::from_certificate(&v.certificate),
            kept_axes: v.kept_axes.clone(),
        }
    }

    pub fn to_verdict<T: GridInt>(&self) -> Result<Verdict<T>> {
        Ok(Verdict {
            answer: self.answer.into(),
            certificate: self.certificate.to_certificate()?,
            kept_axes: self.kept_axes.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassPropertyDoc {
    MaximalPowerLaw,
    PerfectlyDisconnected,
}

impl From<ClassProperty> for ClassPropertyDoc {
    fn from(p: ClassProperty) -> Self {
        match p {
            ClassProperty::MaximalPowerLaw => ClassPropertyDoc::MaximalPowerLaw,
            ClassProperty::PerfectlyDisconnected => ClassPropertyDoc::PerfectlyDisconnected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonDoc {
    OutOfTheoremScope,
    DepthExhausted,
}

impl From<UnknownReason> for ReasonDoc {
    fn from(r: UnknownReason) -> Self {
        match r {
            UnknownReason::OutOfTheoremScope => ReasonDoc::OutOfTheoremScope,
            UnknownReason::DepthExhausted => ReasonDoc::DepthExhausted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjunctDoc {
    /// Leading axes of the projection this verdict is about; the full
    /// (reduced) dimension denotes the attractor itself.
    pub axes: usize,
    pub required: bool,
    pub verdict: VerdictDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorroborationDoc {
    Exponent { slope: f64, box_dimension: f64, low_confidence: bool },
    Spread { ratios: Vec<SpreadRatioDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadRatioDoc {
    pub k: u32,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

impl From<&Corroboration> for CorroborationDoc {
    fn from(c: &Corroboration) -> Self {
        match c {
            Corroboration::Exponent { slope, box_dimension, low_confidence } => {
                CorroborationDoc::Exponent {
                    slope: *slope,
                    box_dimension: *box_dimension,
                    low_confidence: *low_confidence,
                }
            }
            Corroboration::Spread { ratios } => CorroborationDoc::Spread {
                ratios: ratios
                    .iter()
                    .map(|&(k, lo, hi)| SpreadRatioDoc { k, ratio_lo: lo, ratio_hi: hi })
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationDoc {
    pub property: ClassPropertyDoc,
    pub answer: AnswerDoc,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<ReasonDoc>,
    pub kept_axes: Vec<usize>,
    pub conjuncts: Vec<ConjunctDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub corroboration: Option<CorroborationDoc>,
}

impl ClassificationDoc {
    pub fn from_classification<T: GridInt>(c: &Classification<T>) -> Self {
        ClassificationDoc {
            property: c.property.into(),
            answer: c.answer.into(),
            reason: c.reason.map(Into::into),
            kept_axes: c.kept_axes.clone(),
            conjuncts: c
                .conjuncts
                .iter()
                .map(|Conjunct { axes, required, verdict }| ConjunctDoc {
                    axes: *axes,
                    required: *required,
                    verdict: VerdictDoc::from_verdict(verdict),
                })
                .collect(),
            corroboration: c.corroboration.as_ref().map(Into::into),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConclusionDoc {
    DistinguishedNotLipschitz,
    NotDistinguished,
}

impl From<Conclusion> for ConclusionDoc {
    fn from(c: Conclusion) -> Self {
        match c {
            Conclusion::DistinguishedNotLipschitz => ConclusionDoc::DistinguishedNotLipschitz,
            Conclusion::NotDistinguished => ConclusionDoc::NotDistinguished,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioWindowDoc {
    pub resolved_indices: u64,
    pub inf: f64,
    pub sup: f64,
    pub divergent: bool,
}

impl From<&GapRatioWindow> for RatioWindowDoc {
    fn from(w: &GapRatioWindow) -> Self {
        RatioWindowDoc {
            resolved_indices: w.resolved_indices,
            inf: w.inf,
            sup: w.sup,
            divergent: w.divergent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummaryDoc {
    pub level: u32,
    pub total_boxes: u64,
    pub component_count: u64,
    pub island_count: u64,
    pub max_component_size: u64,
}

impl From<&ComponentSummary> for LevelSummaryDoc {
    fn from(s: &ComponentSummary) -> Self {
        LevelSummaryDoc {
            level: s.level,
            total_boxes: s.total_boxes,
            component_count: s.component_count,
            island_count: s.island_count,
            max_component_size: s.max_component_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IslandLevelDoc {
    pub level: u32,
    pub islands: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRowDoc {
    pub k: u32,
    /// Linear delta as an exact rational string.
    pub delta: String,
    pub lo: u64,
    pub hi: u64,
    pub depth: u32,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapEntryDoc {
    pub first_index: u64,
    pub multiplicity: u64,
    /// Exclusive lower bound of the squared gap values, exact rational.
    pub delta_sq_lo: String,
    /// Inclusive upper bound, exact rational.
    pub delta_sq_hi: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTripDoc {
    pub delta_sq: String,
    pub expected: u64,
    pub lo: u64,
    pub hi: u64,
}

pub fn profile_rows_doc<T: GridInt>(profile: &HProfile<T>) -> Vec<ProfileRowDoc> {
    profile
        .rows
        .iter()
        .map(|r| ProfileRowDoc {
            k: r.k,
            delta: frac_to_string(&r.bracket.delta),
            lo: r.bracket.lo,
            hi: r.bracket.hi,
            depth: r.bracket.depth,
            exact: r.bracket.exact,
        })
        .collect()
}

pub fn gap_entries_doc<T: GridInt>(gaps: &GapSequence<T>) -> Vec<GapEntryDoc> {
    gaps.entries
        .iter()
        .map(|e| GapEntryDoc {
            first_index: e.first_index,
            multiplicity: e.multiplicity,
            delta_sq_lo: frac_to_string(&e.delta_sq_lo),
            delta_sq_hi: frac_to_string(&e.delta_sq_hi),
        })
        .collect()
}

pub fn round_trip_doc<T: GridInt>(rows: &[RoundTripRow<T>]) -> Vec<RoundTripDoc> {
    rows.iter()
        .map(|r| RoundTripDoc {
            delta_sq: frac_to_string(&r.delta_sq),
            expected: r.expected,
            lo: r.lo,
            hi: r.hi,
        })
        .collect()
}

/// Subcommand-specific result payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Results {
    Analyze {
        kind: String,
        box_dimension: f64,
        dimension_terms: Vec<f64>,
        projection_counts: Vec<u64>,
        levels: Vec<LevelSummaryDoc>,
    },
    Islands {
        levels: Vec<IslandLevelDoc>,
        witness_level: Option<u32>,
        witness: Option<Vec<BoxDoc>>,
    },
    Td {
        verdict: VerdictDoc,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        finite_type_bound: Option<u64>,
    },
    Hprofile {
        rows: Vec<ProfileRowDoc>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        slope: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        low_confidence: Option<bool>,
    },
    Gapseq {
        depth: u32,
        floor_sq: String,
        entries: Vec<GapEntryDoc>,
        unresolved: Vec<[String; 2]>,
        round_trip: Vec<RoundTripDoc>,
    },
    Classify {
        classification: ClassificationDoc,
    },
    Compare {
        mpl_left: ClassificationDoc,
        mpl_right: ClassificationDoc,
        pd_left: ClassificationDoc,
        pd_right: ClassificationDoc,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        ratio_window: Option<RatioWindowDoc>,
        conclusion: ConclusionDoc,
    },
    VerifyCert {
        checked: u64,
        all_valid: bool,
    },
}

pub fn kind_str(kind: Kind) -> &'static str {
    match kind {
        Kind::Cube => "cube",
        Kind::Sponge => "sponge",
        Kind::Mixed => "mixed",
    }
}

/// Full run configuration, embedded in every report for reproducibility.
/// The worker-thread count is deliberately absent: it can never affect
/// results, and reports must be byte-identical across thread counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfigDoc {
    pub subcommand: String,
    pub spec_paths: Vec<String>,
    pub island_cap: u32,
    pub xi_cap: u32,
    pub kmax: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extra_depth: Option<u32>,
    pub budget: u64,
    pub big: bool,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out_dir: Option<String>,
}

/// Report envelope written by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfigDoc,
    pub spec: SpecDoc,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub second_spec: Option<SpecDoc>,
    pub results: Results,
}

impl Report {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| malformed(format!("report: {e}")))
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Build the compare payload from a comparison report.
pub fn compare_results<T: GridInt>(report: &ComparisonReport<T>) -> Results {
    Results::Compare {
        mpl_left: ClassificationDoc::from_classification(&report.mpl.0),
        mpl_right: ClassificationDoc::from_classification(&report.mpl.1),
        pd_left: ClassificationDoc::from_classification(&report.pd.0),
        pd_right: ClassificationDoc::from_classification(&report.pd.1),
        ratio_window: report.ratio_window.as_ref().map(Into::into),
        conclusion: report.conclusion.into(),
    }
}

/// Re-check every certificate a report embeds against the embedded specs,
/// returning how many were checked. Reports whose payloads carry no
/// verdicts (census tables, profiles) verify vacuously with count 0.
pub fn reverify_report<T: GridInt>(report: &Report, budget: u64) -> Result<u64> {
    let spec = report.spec.to_spec()?;
    match &report.results {
        Results::Td { verdict, finite_type_bound } => {
            let v = verdict.to_verdict::<T>()?;
            deciders::verify_certificate(&spec, Property::TotallyDisconnected, &v, budget)?;
            if let Some(bound) = finite_type_bound {
                let Certificate::XiLevel { level } = &v.certificate else {
                    return Err(Error::InvalidCertificate {
                        reason: "finite-type bound without a translate-level certificate"
                            .into(),
                    });
                };
                if deciders::finite_type_bound(&spec, *level)? != *bound {
                    return Err(Error::InvalidCertificate {
                        reason: "finite-type bound does not match the certified level".into(),
                    });
                }
            }
            Ok(1)
        }
        Results::Classify { classification } => {
            reverify_classification::<T>(&spec, classification, budget)
        }
        Results::Compare { mpl_left, mpl_right, pd_left, pd_right, .. } => {
            let second = report
                .second_spec
                .as_ref()
                .ok_or_else(|| malformed("compare report lacks the second spec"))?
                .to_spec()?;
            let mut checked = 0;
            checked += reverify_classification::<T>(&spec, mpl_left, budget)?;
            checked += reverify_classification::<T>(&second, mpl_right, budget)?;
            checked += reverify_classification::<T>(&spec, pd_left, budget)?;
            checked += reverify_classification::<T>(&second, pd_right, budget)?;
            Ok(checked)
        }
        _ => Ok(0),
    }
}

fn reverify_classification<T: GridInt>(
    spec: &SpongeSpec,
    doc: &ClassificationDoc,
    budget: u64,
) -> Result<u64> {
    let property = match doc.property {
        ClassPropertyDoc::MaximalPowerLaw => Property::TrivialPoints,
        ClassPropertyDoc::PerfectlyDisconnected => Property::TotallyDisconnected,
    };
    if doc.conjuncts.is_empty() {
        // Out-of-scope classifications carry no certificates.
        if doc.answer != AnswerDoc::Unknown {
            return Err(Error::InvalidCertificate {
                reason: "definite classification without conjunct certificates".into(),
            });
        }
        return Ok(0);
    }
    let (reduced, kept) = spec.reduce_degenerate()?;
    if kept != doc.kept_axes {
        return Err(Error::InvalidCertificate {
            reason: "classification kept axes do not match the reduction".into(),
        });
    }
    let mut checked = 0;
    for conj in &doc.conjuncts {
        let target = if conj.axes == reduced.dims() {
            reduced.clone()
        } else {
            reduced.project(conj.axes)?
        };
        let v = conj.verdict.to_verdict::<T>()?;
        deciders::verify_certificate(&target, property, &v, budget)?;
        checked += 1;
    }
    // The stored overall answer must follow from the required conjuncts.
    let required: Vec<&ConjunctDoc> = doc.conjuncts.iter().filter(|c| c.required).collect();
    let expected = if required.iter().any(|c| c.verdict.answer == AnswerDoc::No) {
        AnswerDoc::No
    } else if required.iter().all(|c| c.verdict.answer == AnswerDoc::Yes) {
        AnswerDoc::Yes
    } else {
        AnswerDoc::Unknown
    };
    if expected != doc.answer {
        return Err(Error::InvalidCertificate {
            reason: "classification answer does not follow from its conjuncts".into(),
        });
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_perfectly_disconnected, compare, Caps};
    use crate::deciders::has_trivial_points;
    use crate::Coord;

    const BUDGET: u64 = 1 << 22;

    fn dust() -> SpongeSpec {
        SpongeSpec::new(vec![3, 3], vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]])
            .unwrap()
    }

    fn config(subcommand: &str) -> RunConfigDoc {
        RunConfigDoc {
            subcommand: subcommand.into(),
            spec_paths: vec!["dust.spec".into()],
            island_cap: 4,
            xi_cap: 3,
            kmax: 4,
            extra_depth: None,
            budget: BUDGET,
            big: false,
            format: "json".into(),
            out_dir: None,
        }
    }

    #[test]
    fn spec_doc_round_trips_and_validates() {
        let doc = SpecDoc::parse(
            r#"{"dimension": 2, "bases": [3, 3],
                "digits": [[0,0],[0,2],[2,0],[2,2]]}"#,
        )
        .unwrap();
        assert_eq!(doc.to_spec().unwrap(), dust());
        assert_eq!(SpecDoc::from_spec(&dust()), doc);

        let bad = SpecDoc::parse(r#"{"dimension": 3, "bases": [3,3], "digits": [[0,0]]}"#)
            .unwrap();
        assert!(matches!(bad.to_spec(), Err(Error::MalformedReport { .. })));
        assert!(matches!(
            SpecDoc::parse("{not json"),
            Err(Error::MalformedReport { .. })
        ));
    }

    #[test]
    fn verdict_docs_round_trip_through_json() {
        let v = has_trivial_points::<Coord>(&dust(), 3, BUDGET).unwrap();
        let doc = VerdictDoc::from_verdict(&v);
        let json = serde_json::to_string(&doc).unwrap();
        let back: VerdictDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_verdict::<Coord>().unwrap(), v);
        assert!(json.contains("\"kind\":\"island_at_level\""));
    }

    #[test]
    fn classify_report_reverifies() {
        let c = classify_perfectly_disconnected::<Coord>(&dust(), &Caps::default()).unwrap();
        let report = Report {
            tool: "spongestat".into(),
            version: "0".into(),
            config: config("classify"),
            spec: SpecDoc::from_spec(&dust()),
            second_spec: None,
            results: Results::Classify {
                classification: ClassificationDoc::from_classification(&c),
            },
        };
        let text = report.to_json_pretty();
        let parsed = Report::parse(&text).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(reverify_report::<Coord>(&parsed, BUDGET).unwrap(), 2);
    }

    #[test]
    fn tampered_report_answer_is_rejected() {
        let c = classify_perfectly_disconnected::<Coord>(&dust(), &Caps::default()).unwrap();
        let mut doc = ClassificationDoc::from_classification(&c);
        doc.answer = AnswerDoc::No;
        let report = Report {
            tool: "spongestat".into(),
            version: "0".into(),
            config: config("classify"),
            spec: SpecDoc::from_spec(&dust()),
            second_spec: None,
            results: Results::Classify { classification: doc },
        };
        assert!(matches!(
            reverify_report::<Coord>(&report, BUDGET),
            Err(Error::InvalidCertificate { .. })
        ));
    }

    #[test]
    fn compare_report_reverifies_all_four_classifications() {
        let other = SpongeSpec::new(vec![2, 3], vec![vec![0, 0], vec![1, 2]]).unwrap();
        let caps = Caps { profile_kmax: 3, gap_kmax: 3, budget: 1 << 24, ..Caps::default() };
        let cr = compare::<Coord>(&dust(), &other, &caps).unwrap();
        let report = Report {
            tool: "spongestat".into(),
            version: "0".into(),
            config: config("compare"),
            spec: SpecDoc::from_spec(&dust()),
            second_spec: Some(SpecDoc::from_spec(&other)),
            results: compare_results(&cr),
        };
        let parsed = Report::parse(&report.to_json_line()).unwrap();
        // dust: 2 conjuncts per property; sponge partner: 2 per property.
        assert_eq!(reverify_report::<Coord>(&parsed, 1 << 24).unwrap(), 8);
    }

    #[test]
    fn big_scalar_reports_parse_fixed_width_documents() {
        let v = has_trivial_points::<Coord>(&dust(), 3, BUDGET).unwrap();
        let doc = VerdictDoc::from_verdict(&v);
        let big = doc.to_verdict::<crate::BigCoord>().unwrap();
        assert_eq!(VerdictDoc::from_verdict(&big), doc);
    }
}
