//! Acceptance gate: ten end-to-end criteria covering oracle equivalence,
//! certified counts on classical examples, theorem-level classification,
//! island scaling, finite-type bounds, gap sequences, no-trivial-point
//! growth bounds, and byte-level CLI determinism.
//!
//! Each test prints exactly one `PASS`/`FAIL` line (visible under
//! `--nocapture`) and asserts the same condition.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sponge_core::classify::{
    classify_maximal_power_law, classify_perfectly_disconnected, Caps,
};
use sponge_core::components::{
    components, components_brute, components_hierarchical, islands, level_summary,
    max_pillars_per_component,
};
use sponge_core::deciders::{
    finite_type_bound, has_trivial_points, is_totally_disconnected, Answer, Certificate,
};
use sponge_core::geometry::pillars;
use sponge_core::metrics::{
    estimate_exponent, gap_round_trip, gap_sequence, h_bracket, h_profile, spread_statistic,
};
use sponge_core::num::Frac;
use sponge_core::{Coord, SpongeSpec};

/// Work budget generous enough for the deepest rows in this suite.
const BUDGET: u64 = 400_000_000;

type Check = Result<String, String>;

fn ck(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn gate(id: &str, what: &str, run: impl FnOnce() -> Check) {
    match run() {
        Ok(detail) => println!("PASS {id}: {what} — {detail}"),
        Err(why) => {
            println!("FAIL {id}: {what} — {why}");
            panic!("acceptance {id} failed: {why}");
        }
    }
}

fn spec(bases: &[u32], digits: &[&[u32]]) -> SpongeSpec {
    SpongeSpec::new(
        bases.to_vec(),
        digits.iter().map(|d| d.to_vec()).collect(),
    )
    .expect("suite spec must validate")
}

fn cantor() -> SpongeSpec {
    spec(&[3], &[&[0], &[2]])
}

fn dust() -> SpongeSpec {
    spec(&[3, 3], &[&[0, 0], &[0, 2], &[2, 0], &[2, 2]])
}

fn carpet() -> SpongeSpec {
    spec(
        &[3, 3],
        &[
            &[0, 0],
            &[0, 1],
            &[0, 2],
            &[1, 0],
            &[1, 2],
            &[2, 0],
            &[2, 1],
            &[2, 2],
        ],
    )
}

/// Sponge whose first-axis projection is all of [0,1].
fn full_projection_sponge() -> SpongeSpec {
    spec(&[2, 3], &[&[0, 0], &[1, 1], &[0, 2]])
}

/// Totally disconnected sponge whose first-axis projection is all of [0,1].
fn diagonal_sponge() -> SpongeSpec {
    spec(&[2, 3], &[&[0, 0], &[1, 2]])
}

/// Base-5 square: the 16 border cells plus the center cell. The center
/// cell is an island at level one, and the pattern recurses.
fn center_island_cube() -> SpongeSpec {
    let mut digits: Vec<Vec<u32>> = Vec::new();
    for i in 0..5u32 {
        for j in 0..5u32 {
            if i == 0 || i == 4 || j == 0 || j == 4 {
                digits.push(vec![i, j]);
            }
        }
    }
    digits.push(vec![2, 2]);
    SpongeSpec::new(vec![5, 5], digits).expect("center-island spec must validate")
}

// ---------------------------------------------------------------------------
// 01: accelerated component counter == all-pairs oracle == hierarchical glue.
// ---------------------------------------------------------------------------

fn oracle_suite() -> Vec<(SpongeSpec, u32)> {
    let mut out: Vec<(SpongeSpec, u32)> = Vec::new();
    let mut add = |bases: &[u32], digits: &[&[u32]], k: u32| {
        out.push((spec(bases, digits), k));
    };

    // One-dimensional sets over several bases.
    add(&[2], &[&[0], &[1]], 8);
    add(&[2], &[&[0]], 5);
    add(&[2], &[&[1]], 5);
    add(&[3], &[&[0], &[2]], 7);
    add(&[3], &[&[0], &[1], &[2]], 5);
    add(&[3], &[&[1], &[2]], 7);
    add(&[4], &[&[0], &[3]], 7);
    add(&[4], &[&[0], &[2]], 7);
    add(&[4], &[&[1], &[2], &[3]], 5);
    add(&[4], &[&[0], &[1], &[2], &[3]], 4);
    add(&[5], &[&[0], &[2], &[4]], 5);
    add(&[5], &[&[0], &[4]], 7);
    add(&[5], &[&[0], &[1], &[2], &[3], &[4]], 3);

    // Planar cubes, base 2.
    add(&[2, 2], &[&[0, 0], &[1, 1]], 7);
    add(&[2, 2], &[&[0, 1], &[1, 0]], 7);
    add(&[2, 2], &[&[0, 0], &[1, 0], &[0, 1]], 5);
    add(&[2, 2], &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]], 4);
    add(&[2, 2], &[&[0, 0], &[1, 1], &[1, 0]], 5);
    add(&[2, 2], &[&[0, 0], &[1, 0]], 7);
    add(&[2, 2], &[&[1, 1]], 4);

    // Planar cubes, base 3.
    add(&[3, 3], &[&[0, 0], &[0, 2], &[2, 0], &[2, 2]], 4);
    add(
        &[3, 3],
        &[
            &[0, 0],
            &[0, 1],
            &[0, 2],
            &[1, 0],
            &[1, 2],
            &[2, 0],
            &[2, 1],
            &[2, 2],
        ],
        3,
    );
    add(
        &[3, 3],
        &[&[1, 1], &[0, 1], &[2, 1], &[1, 0], &[1, 2]],
        4,
    );
    add(
        &[3, 3],
        &[&[0, 0], &[1, 0], &[2, 0], &[0, 2], &[1, 2], &[2, 2]],
        4,
    );
    add(&[3, 3], &[&[0, 0], &[1, 1], &[2, 2]], 5);
    add(
        &[3, 3],
        &[&[0, 0], &[0, 2], &[2, 0], &[2, 2], &[1, 1]],
        4,
    );
    add(&[3, 3], &[&[0, 0], &[2, 1]], 7);
    add(&[3, 3], &[&[0, 1], &[1, 0], &[1, 2], &[2, 1]], 4);

    // Planar cubes, base 4.
    add(&[4, 4], &[&[0, 0], &[3, 3]], 7);
    add(&[4, 4], &[&[0, 0], &[1, 1], &[2, 2], &[3, 3]], 4);
    add(&[4, 4], &[&[0, 0], &[1, 0], &[2, 0], &[3, 0]], 4);

    // Planar sponges.
    add(&[2, 3], &[&[0, 0], &[1, 2]], 7);
    add(&[2, 3], &[&[0, 0], &[1, 1], &[0, 2]], 5);
    add(&[2, 3], &[&[0, 0], &[1, 1]], 7);
    add(&[2, 3], &[&[0, 1], &[1, 0], &[1, 2]], 5);
    add(&[2, 3], &[&[0, 0], &[0, 1], &[1, 0], &[1, 2]], 4);
    add(&[2, 4], &[&[0, 0], &[1, 3]], 7);
    add(&[2, 4], &[&[0, 0], &[1, 1], &[1, 3]], 5);
    add(&[3, 4], &[&[0, 0], &[1, 2], &[2, 3]], 5);
    add(&[2, 5], &[&[0, 0], &[1, 4]], 7);
    add(&[3, 5], &[&[0, 0], &[2, 4]], 7);

    // Three-dimensional examples, including mixed base patterns.
    add(&[2, 2, 2], &[&[0, 0, 0], &[1, 1, 1]], 7);
    add(
        &[2, 2, 2],
        &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
        4,
    );
    add(
        &[2, 2, 2],
        &[
            &[0, 0, 0],
            &[0, 0, 1],
            &[0, 1, 0],
            &[0, 1, 1],
            &[1, 0, 0],
            &[1, 0, 1],
            &[1, 1, 0],
            &[1, 1, 1],
        ],
        3,
    );
    add(&[2, 2, 2], &[&[0, 0, 0], &[1, 1, 0]], 7);
    add(&[2, 2, 3], &[&[0, 0, 0], &[1, 1, 2]], 7);
    add(
        &[2, 2, 3],
        &[&[0, 0, 0], &[1, 1, 1], &[0, 1, 2]],
        4,
    );
    add(&[2, 3, 4], &[&[0, 0, 0], &[1, 2, 3]], 7);
    add(
        &[3, 3, 3],
        &[
            &[0, 0, 0],
            &[0, 0, 2],
            &[0, 2, 0],
            &[0, 2, 2],
            &[2, 0, 0],
            &[2, 0, 2],
            &[2, 2, 0],
            &[2, 2, 2],
        ],
        3,
    );
    add(
        &[3, 3, 3],
        &[
            &[1, 1, 1],
            &[0, 1, 1],
            &[2, 1, 1],
            &[1, 0, 1],
            &[1, 2, 1],
            &[1, 1, 0],
            &[1, 1, 2],
        ],
        3,
    );
    add(&[2, 3, 3], &[&[0, 0, 0], &[1, 2, 2], &[0, 1, 1]], 4);

    // A few larger box counts to stress the accelerated path.
    add(&[3, 3], &[&[0, 0], &[0, 2], &[2, 0], &[2, 2]], 7);
    add(
        &[3, 3],
        &[
            &[0, 0],
            &[0, 1],
            &[0, 2],
            &[1, 0],
            &[1, 2],
            &[2, 0],
            &[2, 1],
            &[2, 2],
        ],
        4,
    );
    add(&[2, 3], &[&[0, 0], &[1, 1], &[0, 2]], 7);

    // Seeded random extras so the suite is not purely hand-picked.
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    let mut extras = 0;
    while extras < 12 {
        let d = rng.gen_range(1..=3usize);
        let mut bases: Vec<u32> = (0..d).map(|_| rng.gen_range(2..=4u32)).collect();
        bases.sort_unstable();
        let cells: u32 = bases.iter().product();
        let n = rng.gen_range(2..=cells.min(6).max(2));
        let mut set: HashSet<Vec<u32>> = HashSet::new();
        let mut tries = 0;
        while (set.len() as u32) < n && tries < 500 {
            set.insert(bases.iter().map(|&b| rng.gen_range(0..b)).collect());
            tries += 1;
        }
        if (set.len() as u32) < n.min(2) {
            continue;
        }
        let digits: Vec<Vec<u32>> = set.into_iter().collect();
        let count = digits.len() as u64;
        let mut k = 1u32;
        while count.pow(k + 1) <= 2_000 && k < 8 {
            k += 1;
        }
        if let Ok(s) = SpongeSpec::new(bases, digits) {
            out.push((s, k));
            extras += 1;
        }
    }
    out
}

#[test]
fn c01_component_oracles_agree() {
    gate(
        "01",
        "accelerated counter == all-pairs oracle == hierarchical glue on 50+ specs",
        || {
            let start = Instant::now();
            let suite = oracle_suite();
            ck(
                suite.len() >= 50,
                format!("suite has only {} specs", suite.len()),
            )?;
            let mut checked = 0usize;
            for (i, (s, k)) in suite.iter().enumerate() {
                let boxes = pillars::<Coord>(s, *k, BUDGET)
                    .map_err(|e| format!("spec {i}: pillars failed: {e}"))?;
                ck(
                    boxes.len() as u64 <= 100_000,
                    format!("spec {i}: {} boxes exceeds the suite envelope", boxes.len()),
                )?;
                let fast = components(&boxes, s.bases())
                    .map_err(|e| format!("spec {i}: accelerated path failed: {e}"))?;
                let brute = components_brute(&boxes, s.bases())
                    .map_err(|e| format!("spec {i}: oracle failed: {e}"))?;
                ck(
                    fast == brute,
                    format!(
                        "spec {i} (k={k}): accelerated {} comps != oracle {} comps",
                        fast.len(),
                        brute.len()
                    ),
                )?;
                let mut splits: Vec<u32> = vec![1, k / 2, k.saturating_sub(1)];
                splits.retain(|&s| s >= 1 && s < *k);
                splits.dedup();
                for split in splits {
                    let glued = components_hierarchical::<Coord>(s, *k, split, BUDGET)
                        .map_err(|e| format!("spec {i}: glue path failed: {e}"))?;
                    ck(
                        glued == brute,
                        format!("spec {i} (k={k}, split={split}): glue path disagrees"),
                    )?;
                }
                checked += 1;
            }
            let elapsed = start.elapsed();
            ck(
                elapsed < Duration::from_secs(120),
                format!("took {elapsed:?}, over the two-minute limit"),
            )?;
            Ok(format!("{checked} specs, {elapsed:?}"))
        },
    );
}

// ---------------------------------------------------------------------------
// 02: totally disconnected planar dust has a tight, maximal power law.
// ---------------------------------------------------------------------------

#[test]
fn c02_dust_profile_tight_with_dimension_slope() {
    gate(
        "02",
        "dust component profile exact to k=8 with slope log4/log3",
        || {
            let start = Instant::now();
            let s = dust();
            let profile = h_profile::<Coord>(&s, 8, None, BUDGET)
                .map_err(|e| format!("profile failed: {e}"))?;
            for row in &profile.rows {
                let b = &row.bracket;
                ck(
                    b.exact && b.lo == b.hi,
                    format!("k={}: bracket ({}, {}) is not tight", row.k, b.lo, b.hi),
                )?;
            }
            let est =
                estimate_exponent(&profile).map_err(|e| format!("regression failed: {e}"))?;
            let target = 4f64.ln() / 3f64.ln();
            ck(
                (est.slope - target).abs() <= 0.05,
                format!("slope {} not within 0.05 of {target}", est.slope),
            )?;
            let trivial = has_trivial_points::<Coord>(&s, 4, BUDGET)
                .map_err(|e| format!("trivial-point decision failed: {e}"))?;
            ck(
                trivial.answer == Answer::Yes,
                "dust should decide Yes for trivial points".into(),
            )?;
            let elapsed = start.elapsed();
            ck(
                elapsed < Duration::from_secs(60),
                format!("took {elapsed:?}, over the one-minute limit"),
            )?;
            Ok(format!("slope {:.4} vs {:.4}, {elapsed:?}", est.slope, target))
        },
    );
}

// ---------------------------------------------------------------------------
// 03: the connected carpet stays one component at every scale.
// ---------------------------------------------------------------------------

#[test]
fn c03_carpet_single_component_flat_exponent() {
    gate(
        "03",
        "carpet has one component per stage, flat exponent, classifier never Yes",
        || {
            let start = Instant::now();
            let s = carpet();
            for k in 1..=5u32 {
                let summary = level_summary::<Coord>(&s, k, BUDGET)
                    .map_err(|e| format!("census k={k} failed: {e}"))?;
                ck(
                    summary.component_count == 1,
                    format!("stage {k} has {} components", summary.component_count),
                )?;
            }
            let profile = h_profile::<Coord>(&s, 5, None, BUDGET)
                .map_err(|e| format!("profile failed: {e}"))?;
            for row in &profile.rows {
                let b = &row.bracket;
                ck(
                    b.lo == 1 && b.hi == 1,
                    format!("k={}: bracket ({}, {}) != (1, 1)", row.k, b.lo, b.hi),
                )?;
            }
            let est =
                estimate_exponent(&profile).map_err(|e| format!("regression failed: {e}"))?;
            ck(
                est.slope.abs() <= 0.05,
                format!("slope {} should vanish", est.slope),
            )?;
            let caps = Caps {
                island_cap: 3,
                xi_cap: 2,
                profile_kmax: 3,
                gap_kmax: 2,
                budget: 50_000_000,
                ..Caps::default()
            };
            let cls = classify_maximal_power_law::<Coord>(&s, &caps)
                .map_err(|e| format!("classification failed: {e}"))?;
            ck(
                cls.answer == Answer::Unknown,
                format!("classifier answered {:?}, expected Unknown", cls.answer),
            )?;
            let elapsed = start.elapsed();
            ck(
                elapsed < Duration::from_secs(60),
                format!("took {elapsed:?}, over the one-minute limit"),
            )?;
            Ok(format!("five stages at (1, 1), slope {:.4}, {elapsed:?}", est.slope))
        },
    );
}

// ---------------------------------------------------------------------------
// 04: a full interval projection forbids the maximal power law.
// ---------------------------------------------------------------------------

#[test]
fn c04_full_projection_breaks_maximal_power_law() {
    gate(
        "04",
        "full first-axis projection classifies No and the normalized count decays",
        || {
            let s = full_projection_sponge();
            let caps = Caps {
                island_cap: 4,
                xi_cap: 3,
                profile_kmax: 4,
                gap_kmax: 3,
                budget: 50_000_000,
                ..Caps::default()
            };
            let cls = classify_maximal_power_law::<Coord>(&s, &caps)
                .map_err(|e| format!("classification failed: {e}"))?;
            ck(
                cls.answer == Answer::No,
                format!("answer {:?}, expected No", cls.answer),
            )?;
            let witness = cls.conjuncts.iter().find(|c| {
                c.axes == 1
                    && c.required
                    && c.verdict.answer == Answer::No
                    && matches!(
                        &c.verdict.certificate,
                        Certificate::FullProjectionInterval { axes } if axes == &vec![1]
                    )
            });
            ck(
                witness.is_some(),
                "no required first-axis conjunct with a full-interval certificate".into(),
            )?;
            let dim = s.box_dimension().value;
            let mut values = Vec::new();
            for k in 3..=7u32 {
                let delta =
                    Frac::<Coord>::inv_pow(3, k).map_err(|e| format!("delta: {e}"))?;
                let b = h_bracket(&s, &delta, None, BUDGET)
                    .map_err(|e| format!("bracket k={k} failed: {e}"))?;
                values.push((b.hi as f64) * 3f64.powf(-(k as f64) * dim));
            }
            for w in values.windows(2) {
                ck(
                    w[1] < w[0],
                    format!("normalized counts not strictly decreasing: {values:?}"),
                )?;
            }
            Ok(format!(
                "No with interval certificate; normalized counts {:.4} down to {:.4}",
                values[0],
                values[values.len() - 1]
            ))
        },
    );
}

// ---------------------------------------------------------------------------
// 05: total disconnectedness without perfect disconnectedness.
// ---------------------------------------------------------------------------

#[test]
fn c05_disconnected_but_not_perfectly() {
    gate(
        "05",
        "diagonal sponge: points split but components spread without bound",
        || {
            let s = diagonal_sponge();
            let td = is_totally_disconnected::<Coord>(&s, 4, BUDGET)
                .map_err(|e| format!("disconnectedness decision failed: {e}"))?;
            ck(
                td.answer == Answer::Yes,
                format!("expected Yes for total disconnectedness, got {:?}", td.answer),
            )?;
            let caps = Caps {
                island_cap: 4,
                xi_cap: 4,
                profile_kmax: 4,
                gap_kmax: 3,
                budget: 50_000_000,
                ..Caps::default()
            };
            let cls = classify_perfectly_disconnected::<Coord>(&s, &caps)
                .map_err(|e| format!("classification failed: {e}"))?;
            ck(
                cls.answer == Answer::No,
                format!("answer {:?}, expected No", cls.answer),
            )?;
            let witness = cls.conjuncts.iter().find(|c| {
                c.axes == 1
                    && c.verdict.answer == Answer::No
                    && matches!(
                        &c.verdict.certificate,
                        Certificate::FullProjectionInterval { axes } if axes == &vec![1]
                    )
            });
            ck(
                witness.is_some(),
                "no first-axis full-interval certificate".into(),
            )?;
            let mut ratios = Vec::new();
            for k in 2..=5u32 {
                let delta =
                    Frac::<Coord>::inv_pow(6, k).map_err(|e| format!("delta: {e}"))?;
                let stat = spread_statistic(&s, &delta, None, BUDGET)
                    .map_err(|e| format!("spread k={k} failed: {e}"))?;
                ratios.push(stat.ratio_sq_lo.to_f64().sqrt());
            }
            for (i, w) in ratios.windows(2).enumerate() {
                ck(
                    w[1] >= 1.4 * w[0],
                    format!(
                        "spread lower bound grew only {:.3}x at step {}: {ratios:?}",
                        w[1] / w[0],
                        i + 2
                    ),
                )?;
            }
            Ok(format!(
                "spread lower bounds {:.2} -> {:.2} over four levels",
                ratios[0],
                ratios[ratios.len() - 1]
            ))
        },
    );
}

// ---------------------------------------------------------------------------
// 06: island counts multiply level by level.
// ---------------------------------------------------------------------------

#[test]
fn c06_island_counts_scale_geometrically() {
    gate(
        "06",
        "center-island square produces at least 17^(k-1) islands at level k",
        || {
            let s = center_island_cube();
            let mut counts = Vec::new();
            for k in 1..=3u32 {
                let (count, witness) = islands::<Coord>(&s, k, BUDGET)
                    .map_err(|e| format!("island count k={k} failed: {e}"))?;
                let needed = 17u64.pow(k - 1);
                ck(
                    count >= needed,
                    format!("level {k}: {count} islands < {needed}"),
                )?;
                ck(
                    witness.is_some(),
                    format!("level {k}: no witness island returned"),
                )?;
                counts.push(count);
            }
            Ok(format!("island counts {counts:?} vs floors [1, 17, 289]"))
        },
    );
}

// ---------------------------------------------------------------------------
// 07: certified disconnectedness caps component sizes at deeper levels.
// ---------------------------------------------------------------------------

#[test]
fn c07_finite_type_bound_holds_past_certification() {
    gate(
        "07",
        "every level-certified spec keeps components under its pillar bound",
        || {
            let candidates: Vec<SpongeSpec> = vec![
                cantor(),
                dust(),
                diagonal_sponge(),
                spec(&[2, 2], &[&[0, 0]]),
                spec(&[3, 3], &[&[0, 0], &[2, 1]]),
                spec(&[2, 3, 4], &[&[0, 0, 0], &[1, 2, 3]]),
                spec(&[4, 4], &[&[0, 0], &[3, 3]]),
                spec(&[2, 2, 2], &[&[0, 0, 0], &[1, 1, 1]]),
            ];
            let mut certified = 0usize;
            for (i, s) in candidates.iter().enumerate() {
                let verdict = is_totally_disconnected::<Coord>(s, 4, BUDGET)
                    .map_err(|e| format!("candidate {i}: decision failed: {e}"))?;
                if verdict.answer != Answer::Yes {
                    continue;
                }
                let level = match verdict.certificate {
                    Certificate::XiLevel { level } => level,
                    ref other => {
                        return Err(format!(
                            "candidate {i}: Yes with unexpected certificate {other:?}"
                        ))
                    }
                };
                let bound = finite_type_bound(s, level)
                    .map_err(|e| format!("candidate {i}: bound failed: {e}"))?;
                for k in 1..=level + 3 {
                    let largest = max_pillars_per_component::<Coord>(s, k, BUDGET)
                        .map_err(|e| format!("candidate {i}: k={k} failed: {e}"))?;
                    ck(
                        largest <= bound,
                        format!(
                            "candidate {i}: level {k} component holds {largest} pillars, \
                             bound {bound}"
                        ),
                    )?;
                }
                certified += 1;
            }
            ck(
                certified >= 4,
                format!("only {certified} candidates certified; suite too weak"),
            )?;
            Ok(format!("{certified} certified specs stayed under their bounds"))
        },
    );
}

// ---------------------------------------------------------------------------
// 08: the ternary gap sequence and its inversion.
// ---------------------------------------------------------------------------

#[test]
fn c08_ternary_gap_sequence_round_trips() {
    gate(
        "08",
        "ternary set yields gaps (1/3)x1, (1/9)x2, (1/27)x4 and inverts",
        || {
            let s = cantor();
            let gaps = gap_sequence::<Coord>(&s, 3, BUDGET)
                .map_err(|e| format!("gap sweep failed: {e}"))?;
            // Independent enumeration: removing middle thirds creates
            // 2^(j-1) gaps of width 3^-j at stage j.
            let mut expected = Vec::new();
            let mut first = 1u64;
            for j in 1..=3u32 {
                let mult = 1u64 << (j - 1);
                let width_sq = Frac::<Coord>::inv_pow(3, j)
                    .and_then(|f| f.square())
                    .map_err(|e| format!("oracle width: {e}"))?;
                expected.push((first, mult, width_sq));
                first += mult;
            }
            ck(
                gaps.entries.len() >= expected.len(),
                format!("only {} certified runs", gaps.entries.len()),
            )?;
            for (i, (first, mult, width_sq)) in expected.iter().enumerate() {
                let e = &gaps.entries[i];
                ck(
                    e.first_index == *first
                        && e.multiplicity == *mult
                        && e.delta_sq_hi == *width_sq,
                    format!(
                        "run {i}: got index {} x{} at {}, expected {first} x{mult} at {width_sq}",
                        e.first_index, e.multiplicity, e.delta_sq_hi
                    ),
                )?;
            }
            let rows = gap_round_trip(&s, &gaps, BUDGET)
                .map_err(|e| format!("round trip failed: {e}"))?;
            ck(!rows.is_empty(), "no round-trip rows".into())?;
            for row in &rows {
                ck(
                    row.consistent() && row.lo == row.hi && row.lo == row.expected,
                    format!(
                        "count at squared delta {} is ({}, {}), expected exactly {}",
                        row.delta_sq, row.lo, row.hi, row.expected
                    ),
                )?;
            }
            Ok(format!(
                "{} certified runs matched; {} resamples exact",
                expected.len(),
                rows.len()
            ))
        },
    );
}

// ---------------------------------------------------------------------------
// 09: no trivial points forces at most geometric component growth.
// ---------------------------------------------------------------------------

#[test]
fn c09_no_trivial_point_growth_bound() {
    gate(
        "09",
        "no-trivial-point squares: hi(m^-k) <= 2d(r-1)^(k+q) for k <= 6",
        || {
            // Full products, corner-connected trominoes, a plus shape, and
            // interval-times-ternary products: none has a trivial point.
            let suite: Vec<SpongeSpec> = vec![
                spec(&[2], &[&[0], &[1]]),
                spec(&[3], &[&[0], &[1], &[2]]),
                spec(&[2, 2], &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]),
                spec(&[2, 2], &[&[0, 0], &[1, 0], &[0, 1]]),
                spec(&[3, 3], &[&[1, 1], &[0, 1], &[2, 1], &[1, 0], &[1, 2]]),
                spec(
                    &[3, 3],
                    &[&[0, 0], &[1, 0], &[2, 0], &[0, 2], &[1, 2], &[2, 2]],
                ),
                spec(
                    &[3, 3],
                    &[&[0, 0], &[0, 1], &[0, 2], &[2, 0], &[2, 1], &[2, 2]],
                ),
                spec(
                    &[2, 2, 2],
                    &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
                ),
            ];
            let mut lines = 0usize;
            for (i, s) in suite.iter().enumerate() {
                let d = s.dims() as f64;
                let m = s.max_base();
                let r = s.digit_count() as f64;
                let q = (d.sqrt().log(m as f64)).floor() as i32 + 1;
                for k in 1..=6u32 {
                    let delta =
                        Frac::<Coord>::inv_pow(m, k).map_err(|e| format!("delta: {e}"))?;
                    let b = h_bracket(s, &delta, None, BUDGET)
                        .map_err(|e| format!("spec {i}: bracket k={k} failed: {e}"))?;
                    let bound = 2.0 * d * (r - 1.0).powi(k as i32 + q);
                    ck(
                        (b.hi as f64) <= bound,
                        format!("spec {i}: hi({m}^-{k}) = {} exceeds {bound}", b.hi),
                    )?;
                    lines += 1;
                }
            }
            Ok(format!("{lines} bound checks across {} specs", suite.len()))
        },
    );
}

// ---------------------------------------------------------------------------
// 10: identical bytes at 1, 4, and 8 worker threads.
// ---------------------------------------------------------------------------

fn write_spec(dir: &Path, name: &str, s: &SpongeSpec) -> String {
    let digits: Vec<String> = s
        .digits()
        .iter()
        .map(|t| {
            let parts: Vec<String> = t.iter().map(u32::to_string).collect();
            format!("[{}]", parts.join(","))
        })
        .collect();
    let bases: Vec<String> = s.bases().iter().map(u32::to_string).collect();
    let mut body = String::new();
    write!(
        body,
        "{{\"dimension\": {}, \"bases\": [{}], \"digits\": [{}]}}",
        s.dims(),
        bases.join(","),
        digits.join(",")
    )
    .unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    name.to_string()
}

#[test]
fn c10_cli_output_is_thread_count_invariant() {
    gate(
        "10",
        "all CLI subcommands emit identical bytes at 1, 4, and 8 threads",
        || {
            let exe = env!("CARGO_BIN_EXE_spongestat");
            let root = tempfile::tempdir().map_err(|e| format!("tempdir: {e}"))?;
            let spec_dir = root.path().join("specs");
            std::fs::create_dir_all(&spec_dir).map_err(|e| format!("mkdir: {e}"))?;
            write_spec(&spec_dir, "dust.json", &dust());
            write_spec(&spec_dir, "cantor.json", &cantor());
            write_spec(&spec_dir, "pifull.json", &full_projection_sponge());
            write_spec(&spec_dir, "diag.json", &diagonal_sponge());
            write_spec(&spec_dir, "rings.json", &center_island_cube());

            // A fixed report to exercise certificate re-verification.
            let verify_src = root.path().join("verify_src");
            std::fs::create_dir_all(&verify_src).map_err(|e| format!("mkdir: {e}"))?;
            let seed = Command::new(exe)
                .current_dir(&verify_src)
                .args([
                    "classify",
                    "../specs/diag.json",
                    "--property",
                    "pd",
                    "--out",
                    "out",
                ])
                .output()
                .map_err(|e| format!("seed run: {e}"))?;
            ck(
                seed.status.success(),
                format!(
                    "seed classify failed: {}",
                    String::from_utf8_lossy(&seed.stderr)
                ),
            )?;

            let cases: Vec<(&str, Vec<&str>)> = vec![
                ("analyze", vec!["analyze", "../specs/dust.json", "--depth", "3"]),
                ("islands", vec!["islands", "../specs/rings.json", "--depth", "2"]),
                ("td", vec!["td", "../specs/diag.json", "--cap", "3"]),
                (
                    "hprofile",
                    vec!["hprofile", "../specs/dust.json", "--kmax", "4"],
                ),
                (
                    "gapseq",
                    vec!["gapseq", "../specs/cantor.json", "--kmax", "3"],
                ),
                (
                    "classify_mpl",
                    vec![
                        "classify",
                        "../specs/pifull.json",
                        "--property",
                        "mpl",
                    ],
                ),
                (
                    "classify_pd",
                    vec!["classify", "../specs/diag.json", "--property", "pd"],
                ),
                (
                    "compare",
                    vec![
                        "compare",
                        "../specs/dust.json",
                        "../specs/diag.json",
                        "--kmax",
                        "3",
                    ],
                ),
                (
                    "verify",
                    vec!["verify-cert", "../verify_src/out/report.json"],
                ),
            ];

            let mut runs = 0usize;
            for (name, args) in &cases {
                let mut outputs: Vec<(String, Vec<u8>, Vec<u8>)> = Vec::new();
                for threads in ["1", "4", "8"] {
                    let run_dir = root.path().join(format!("{name}_t{threads}"));
                    std::fs::create_dir_all(&run_dir).map_err(|e| format!("mkdir: {e}"))?;
                    let out = Command::new(exe)
                        .current_dir(&run_dir)
                        .args(args.iter())
                        .args(["--threads", threads, "--out", "out"])
                        .output()
                        .map_err(|e| format!("{name} t{threads}: spawn failed: {e}"))?;
                    ck(
                        out.status.success(),
                        format!(
                            "{name} t{threads} failed: {}",
                            String::from_utf8_lossy(&out.stderr)
                        ),
                    )?;
                    let report = std::fs::read(run_dir.join("out/report.json"))
                        .map_err(|e| format!("{name} t{threads}: report.json: {e}"))?;
                    outputs.push((threads.to_string(), out.stdout, report));
                    runs += 1;
                }
                for pair in outputs.windows(2) {
                    ck(
                        pair[0].1 == pair[1].1,
                        format!(
                            "{name}: stdout differs between {} and {} threads",
                            pair[0].0, pair[1].0
                        ),
                    )?;
                    ck(
                        pair[0].2 == pair[1].2,
                        format!(
                            "{name}: report.json differs between {} and {} threads",
                            pair[0].0, pair[1].0
                        ),
                    )?;
                }
            }
            Ok(format!("{} cases x 3 thread counts, {runs} runs", cases.len()))
        },
    );
}
