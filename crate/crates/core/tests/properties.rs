//! Randomized invariants over small specs: projection algebra, pillar
//! refinement, component-count monotonicity, oracle agreement, bracket
//! validity, and decider/certificate coherence.

use proptest::prelude::*;

use sponge_core::components::{
    components, components_brute, islands, level_summary,
};
use sponge_core::geometry::ExactBox;
use sponge_core::deciders::{
    has_trivial_points, is_totally_disconnected, verify_certificate, Answer, Property,
};
use sponge_core::geometry::pillars;
use sponge_core::metrics::h_bracket;
use sponge_core::num::Frac;
use sponge_core::report::VerdictDoc;
use sponge_core::{Coord, Kind, SpongeSpec};

const BUDGET: u64 = 1 << 22;

/// All digit tuples of the given bases, in lexicographic order.
fn all_cells(bases: &[u32]) -> Vec<Vec<u32>> {
    let mut cells: Vec<Vec<u32>> = vec![vec![]];
    for &b in bases {
        let mut next = Vec::with_capacity(cells.len() * b as usize);
        for cell in &cells {
            for v in 0..b {
                let mut c = cell.clone();
                c.push(v);
                next.push(c);
            }
        }
        cells = next;
    }
    cells
}

fn arb_spec(max_dim: usize, max_base: u32, max_digits: usize) -> BoxedStrategy<SpongeSpec> {
    (1..=max_dim)
        .prop_flat_map(move |d| {
            proptest::collection::vec(2..=max_base, d).prop_map(|mut v| {
                v.sort_unstable();
                v
            })
        })
        .prop_flat_map(move |bases| {
            let cells = all_cells(&bases);
            let hi = cells.len().min(max_digits);
            proptest::sample::subsequence(cells, 1..=hi)
                .prop_map(move |digits| {
                    SpongeSpec::new(bases.clone(), digits).expect("sampled spec is valid")
                })
        })
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    /// Leading-axes projection composes: taking j axes then i of those is
    /// taking i axes directly; projected dimension never exceeds the
    /// original.
    #[test]
    fn projection_composes_and_shrinks_dimension(s in arb_spec(3, 4, 6)) {
        let d = s.dims();
        let full = s.box_dimension().value;
        for j in 1..=d {
            let pj = s.project(j).unwrap();
            prop_assert!(pj.box_dimension().value <= full + 1e-12);
            for i in 1..=j {
                let pi_direct = s.project(i).unwrap();
                let pi_nested = pj.project(i).unwrap();
                prop_assert_eq!(&pi_nested, &pi_direct);
            }
        }
    }

    /// Cube box dimension is log(N)/log(base) exactly.
    #[test]
    fn cube_dimension_is_digit_count_log(s in arb_spec(2, 3, 6)) {
        if s.kind() == Kind::Cube {
            let expect = (s.digit_count() as f64).ln() / (s.base(0) as f64).ln();
            prop_assert!((s.box_dimension().value - expect).abs() < 1e-12);
        }
    }

    /// Degenerate-axis reduction outputs a spec with no degenerate axis,
    /// and only ever removes axes (kept axes are 1-based and increasing).
    #[test]
    fn reduction_removes_all_degenerate_axes(s in arb_spec(3, 4, 6)) {
        match s.reduce_degenerate() {
            Err(_) => {} // every axis degenerate: nothing to check
            Ok((reduced, kept)) => {
                prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(kept.iter().all(|&a| 1 <= a && a <= s.dims()));
                prop_assert_eq!(reduced.dims(), kept.len());
                for axis in 0..reduced.dims() {
                    let hi = reduced.base(axis) - 1;
                    let col: Vec<u32> =
                        reduced.digits().iter().map(|t| t[axis]).collect();
                    let all_low = col.iter().all(|&v| v == 0);
                    let all_high = col.iter().all(|&v| v == hi);
                    prop_assert!(!(all_low || all_high));
                }
            }
        }
    }

    /// Each level-(k+1) pillar lies inside exactly one level-k pillar.
    #[test]
    fn pillars_refine(s in arb_spec(3, 3, 4), k in 1u32..=2) {
        prop_assume!((s.digit_count() as u64).pow(k + 1) <= 512);
        let coarse = pillars::<Coord>(&s, k, BUDGET).unwrap();
        let fine = pillars::<Coord>(&s, k + 1, BUDGET).unwrap();
        for f in &fine {
            let parents = coarse
                .iter()
                .filter(|c| c.contains(f, s.bases()).unwrap())
                .count();
            prop_assert_eq!(parents, 1);
        }
    }

    /// Box gap and span are symmetric in their arguments.
    #[test]
    fn gap_and_span_are_symmetric(s in arb_spec(3, 3, 4), k in 1u32..=2) {
        let boxes = pillars::<Coord>(&s, k, BUDGET).unwrap();
        let bases = s.bases();
        for a in boxes.iter().take(8) {
            for b in boxes.iter().take(8) {
                prop_assert_eq!(
                    a.gap_sq(b, bases).unwrap(),
                    b.gap_sq(a, bases).unwrap()
                );
                prop_assert_eq!(
                    a.span_sq(b, bases).unwrap(),
                    b.span_sq(a, bases).unwrap()
                );
            }
        }
    }

    /// Refinement splits components, never merges: counts are monotone in
    /// the level. The accelerated path agrees with the all-pairs oracle.
    #[test]
    fn component_counts_rise_with_level(s in arb_spec(3, 3, 5)) {
        prop_assume!((s.digit_count() as u64).pow(3) <= 512);
        let mut prev = 0u64;
        for k in 1..=3u32 {
            let boxes = pillars::<Coord>(&s, k, BUDGET).unwrap();
            let fast = components(&boxes, s.bases()).unwrap();
            let brute = components_brute(&boxes, s.bases()).unwrap();
            prop_assert_eq!(&fast, &brute);
            prop_assert!(fast.len() as u64 >= prev);
            prev = fast.len() as u64;
        }
    }

    /// Components of a disjoint union are at most the components of the
    /// parts combined.
    #[test]
    fn component_counts_are_subadditive(s in arb_spec(2, 4, 6), k in 1u32..=2) {
        prop_assume!((s.digit_count() as u64).pow(k) <= 256);
        let boxes = pillars::<Coord>(&s, k, BUDGET).unwrap();
        prop_assume!(boxes.len() >= 2);
        let (a, b) = boxes.split_at(boxes.len() / 2);
        let whole = components(&boxes, s.bases()).unwrap().len();
        let left = components(a, s.bases()).unwrap().len();
        let right = components(b, s.bases()).unwrap().len();
        prop_assert!(whole <= left + right);
    }

    /// An island at level 1 spawns at least N islands at level 2: every
    /// cell carries a scaled copy of the whole picture.
    #[test]
    fn islands_multiply_by_digit_count(s in arb_spec(2, 5, 6)) {
        prop_assume!((s.digit_count() as u64).pow(2) <= 1024);
        let (c1, _) = islands::<Coord>(&s, 1, BUDGET).unwrap();
        if c1 >= 1 {
            let (c2, _) = islands::<Coord>(&s, 2, BUDGET).unwrap();
            prop_assert!(c2 >= s.digit_count() as u64);
        }
    }

    /// Brackets are ordered, shrink (or stay) as depth grows, and widen
    /// in count as delta shrinks at a fixed depth.
    #[test]
    fn brackets_are_valid_and_monotone(s in arb_spec(2, 3, 4)) {
        let n_top = s.max_base();
        let d1 = Frac::<Coord>::inv_pow(n_top, 1).unwrap();
        let d2 = Frac::<Coord>::inv_pow(n_top, 2).unwrap();
        let b2 = h_bracket(&s, &d2, None, BUDGET).unwrap();
        prop_assert!(b2.lo >= 1 && b2.lo <= b2.hi);
        // Same depth, larger delta: both ends can only drop.
        let b1 = h_bracket(&s, &d1, Some(b2.depth), BUDGET).unwrap();
        prop_assert!(b1.lo >= 1 && b1.lo <= b1.hi);
        prop_assert!(b1.lo <= b2.lo);
        prop_assert!(b1.hi <= b2.hi);
        // One stage deeper at the same delta: the bracket never widens.
        let deeper = h_bracket(&s, &d2, Some(b2.depth + 1), BUDGET).unwrap();
        prop_assert!(deeper.lo >= b2.lo);
        prop_assert!(deeper.hi <= b2.hi);
    }

    /// For cubes, merges at delta = m^-k stay inside stage-(k-1)
    /// components, so the lower bound dominates the coarser stage count.
    #[test]
    fn cube_bracket_dominates_previous_stage(s in arb_spec(2, 3, 6)) {
        prop_assume!(s.kind() == Kind::Cube);
        let m = s.base(0);
        let delta = Frac::<Coord>::inv_pow(m, 2).unwrap();
        let b = h_bracket(&s, &delta, None, BUDGET).unwrap();
        let coarse = level_summary::<Coord>(&s, 1, BUDGET).unwrap();
        prop_assert!(b.lo >= coarse.component_count);
    }

    /// Dropping degenerate axes leaves the pillar picture unchanged on
    /// the surviving axes: reduction is an isometry of stage sets.
    #[test]
    fn reduction_preserves_pillars_on_kept_axes(s in arb_spec(3, 3, 4), k in 1u32..=2) {
        prop_assume!((s.digit_count() as u64).pow(k) <= 256);
        let (reduced, kept) = match s.reduce_degenerate() {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let original = pillars::<Coord>(&s, k, BUDGET).unwrap();
        let expected = pillars::<Coord>(&reduced, k, BUDGET).unwrap();
        let projected: Vec<ExactBox<Coord>> = original
            .iter()
            .map(|b| ExactBox {
                corners: kept.iter().map(|&a| b.corners[a - 1]).collect(),
                exps: kept.iter().map(|&a| b.exps[a - 1]).collect(),
            })
            .collect();
        prop_assert_eq!(projected, expected);
    }

    /// The two deciders never contradict each other, their certificates
    /// re-verify, and verdicts survive a JSON round trip.
    #[test]
    fn verdicts_cohere_and_reverify(s in arb_spec(3, 4, 5)) {
        let trivial = match has_trivial_points::<Coord>(&s, 2, BUDGET) {
            Ok(v) => v,
            Err(_) => return Ok(()), // fully degenerate: out of scope here
        };
        let disconnected = is_totally_disconnected::<Coord>(&s, 2, BUDGET).unwrap();
        // A full product is connected, hence not totally disconnected.
        prop_assert!(
            !(trivial.answer == Answer::No && disconnected.answer == Answer::Yes)
        );
        verify_certificate(&s, Property::TrivialPoints, &trivial, BUDGET).unwrap();
        verify_certificate(&s, Property::TotallyDisconnected, &disconnected, BUDGET)
            .unwrap();
        for verdict in [&trivial, &disconnected] {
            let doc = VerdictDoc::from_verdict(verdict);
            let text = serde_json::to_string(&doc).unwrap();
            let back: VerdictDoc = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back.to_verdict::<Coord>().unwrap(), verdict);
        }
    }
}

fn fixed(bases: &[u32], digits: &[&[u32]]) -> SpongeSpec {
    SpongeSpec::new(
        bases.to_vec(),
        digits.iter().map(|d| d.to_vec()).collect(),
    )
    .unwrap()
}

/// The upper bound scales no faster than delta^-dim: with the constant
/// measured once at k = 2, hi(n_d^-k) stays at or below C * n_d^(k*dim)
/// for the deeper rows of each suite member.
#[test]
fn upper_bound_tracks_dimension_scaling() {
    let suite = vec![
        fixed(&[3], &[&[0], &[2]]),
        fixed(&[3, 3], &[&[0, 0], &[0, 2], &[2, 0], &[2, 2]]),
        fixed(
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
        ),
        fixed(&[2, 3], &[&[0, 0], &[1, 1], &[0, 2]]),
        fixed(
            &[3, 3],
            &[&[0, 0], &[1, 0], &[2, 0], &[0, 2], &[1, 2], &[2, 2]],
        ),
    ];
    for (i, s) in suite.iter().enumerate() {
        let dim = s.box_dimension().value;
        let n = s.max_base() as f64;
        let hi_at = |k: u32| -> f64 {
            let delta = Frac::<Coord>::inv_pow(s.max_base(), k).unwrap();
            h_bracket(&s, &delta, None, 1 << 26).unwrap().hi as f64
        };
        let c = hi_at(2) / n.powf(2.0 * dim);
        for k in 3..=5u32 {
            let bound = c * n.powf(k as f64 * dim) * (1.0 + 1e-9);
            let hi = hi_at(k);
            assert!(
                hi <= bound,
                "suite {i}: hi({n}^-{k}) = {hi} above scaled constant {bound}"
            );
        }
    }
}

/// Distinct islands at level k sit at distance >= n_d^-k from each
/// other: separation is visible already at the pillar grid.
#[test]
fn islands_are_separated_at_grid_scale() {
    let mut digits: Vec<Vec<u32>> = Vec::new();
    for i in 0..5u32 {
        for j in 0..5u32 {
            if i == 0 || i == 4 || j == 0 || j == 4 {
                digits.push(vec![i, j]);
            }
        }
    }
    digits.push(vec![2, 2]);
    let s = SpongeSpec::new(vec![5, 5], digits).unwrap();
    let k = 2u32;
    let boxes = pillars::<Coord>(&s, k, BUDGET).unwrap();
    let partition = components(&boxes, s.bases()).unwrap();
    let mut island_comps: Vec<&Vec<usize>> = Vec::new();
    for comp in &partition.comps {
        let touches = comp
            .iter()
            .any(|&i| boxes[i].touches_unit_boundary(s.bases()).unwrap());
        if !touches {
            island_comps.push(comp);
        }
    }
    assert!(island_comps.len() >= 2, "need at least two islands");
    let min_gap_sq = Frac::<Coord>::inv_pow(s.max_base(), k).unwrap().square().unwrap();
    for (x, a) in island_comps.iter().enumerate() {
        for b in island_comps.iter().skip(x + 1) {
            for &i in a.iter() {
                for &j in b.iter() {
                    let g = boxes[i].gap_sq(&boxes[j], s.bases()).unwrap();
                    assert!(
                        g >= min_gap_sq,
                        "islands closer than the grid step: gap^2 = {g}"
                    );
                }
            }
        }
    }
}
