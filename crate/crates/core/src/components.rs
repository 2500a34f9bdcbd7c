//! Connected components of box sets under the closed touching relation,
//! island extraction, and the boundary/inner split of delta-components
//! inside a cylinder.
//!
//! Component counting is implemented three ways: an all-pairs union-find
//! oracle, a grid-hash accelerated path, and a hierarchical path that
//! solves each ancestor cylinder locally and glues along shared faces. The
//! paths must agree exactly; the test suite and the acceptance suite
//! enforce this.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, ExactBox, Word};
use crate::model::SpongeSpec;
use crate::num::{self, Frac, GridInt};

/// Union-find with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], count: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the two elements were in different components.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.count -= 1;
        true
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Members per component, each sorted, components ordered by their
    /// smallest member. This is the canonical form used everywhere so that
    /// output never depends on merge order or thread count.
    pub fn partition(&mut self) -> Partition {
        let n = self.parent.len();
        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for x in 0..n {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        Partition { comps }
    }
}

/// Canonical partition of box indices into components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub comps: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn max_size(&self) -> usize {
        self.comps.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn uniform_exps<T: GridInt>(boxes: &[ExactBox<T>]) -> bool {
    boxes.windows(2).all(|w| w[0].exps == w[1].exps)
}

/// Touching test for same-exponent boxes: corner offsets at most one per
/// axis. `None` from checked subtraction means the corners are further
/// apart than any grid neighbor, so the boxes cannot touch.
fn touches_uniform<T: GridInt>(a: &ExactBox<T>, b: &ExactBox<T>) -> bool {
    for axis in 0..a.dims() {
        match a.corners[axis].checked_sub(&b.corners[axis]) {
            Some(d) => {
                if d.abs() > T::one() {
                    return false;
                }
            }
            None => return false,
        }
    }
    true
}

/// All-pairs component oracle: O(B^2) touching tests into a union-find.
pub fn components_brute<T: GridInt>(
    boxes: &[ExactBox<T>],
    bases: &[u32],
) -> Result<Partition> {
    let n = boxes.len();
    let uniform = uniform_exps(boxes);
    let edges: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Vec<(usize, usize)>> {
            let mut local = Vec::new();
            for j in (i + 1)..n {
                let touch = if uniform {
                    touches_uniform(&boxes[i], &boxes[j])
                } else {
                    boxes[i].touches(&boxes[j], bases)?
                };
                if touch {
                    local.push((i, j));
                }
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    let mut uf = UnionFind::new(n);
    for list in edges {
        for (i, j) in list {
            uf.union(i, j);
        }
    }
    Ok(uf.partition())
}

/// Offsets in `{-1, 0, 1}^d` excluding the origin.
fn neighbor_offsets(d: usize) -> Vec<Vec<i8>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                [-1i8, 0, 1].iter().map(move |&o| {
                    let mut w = v.clone();
                    w.push(o);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&o| o != 0));
    out
}

fn corner_index<T: GridInt>(boxes: &[ExactBox<T>]) -> HashMap<Vec<T>, usize> {
    boxes
        .iter()
        .enumerate()
        .map(|(i, b)| (b.corners.clone(), i))
        .collect()
}

fn union_grid_neighbors<T: GridInt>(
    boxes: &[ExactBox<T>],
    subset: &[usize],
    index: &HashMap<Vec<T>, usize>,
    uf: &mut UnionFind,
) {
    let d = boxes.first().map_or(0, ExactBox::dims);
    let offsets = neighbor_offsets(d);
    let mut key = Vec::with_capacity(d);
    for &i in subset {
        'offset: for off in &offsets {
            key.clear();
            for axis in 0..d {
                let shifted = match off[axis] {
                    0 => boxes[i].corners[axis].clone(),
                    1 => match boxes[i].corners[axis].checked_add(&T::one()) {
                        Some(v) => v,
                        None => continue 'offset,
                    },
                    _ => match boxes[i].corners[axis].checked_sub(&T::one()) {
                        Some(v) => v,
                        None => continue 'offset,
                    },
                };
                key.push(shifted);
            }
            if let Some(&j) = index.get(&key) {
                if j > i {
                    debug_assert!(touches_uniform(&boxes[i], &boxes[j]));
                    uf.union(i, j);
                }
            }
        }
    }
}

/// Grid-hash accelerated components for same-exponent box sets: distinct
/// boxes touch exactly when their corners differ by at most one per axis,
/// so only the 3^d neighbor corners are probed. Falls back to the oracle
/// for mixed-exponent sets.
pub fn components_fast<T: GridInt>(boxes: &[ExactBox<T>], bases: &[u32]) -> Result<Partition> {
    if !uniform_exps(boxes) {
        return components_brute(boxes, bases);
    }
    let index = corner_index(boxes);
    let subset: Vec<usize> = (0..boxes.len()).collect();
    let mut uf = UnionFind::new(boxes.len());
    union_grid_neighbors(boxes, &subset, &index, &mut uf);
    Ok(uf.partition())
}

/// Default component path.
pub fn components<T: GridInt>(boxes: &[ExactBox<T>], bases: &[u32]) -> Result<Partition> {
    components_fast(boxes, bases)
}

/// Hierarchical path over the level-`k` pillars: solve each level-`split`
/// ancestor cylinder locally, then glue components whose boxes lie on a
/// shared ancestor face. Equals the flat computation on the canonical
/// pillar list.
pub fn components_hierarchical<T: GridInt>(
    spec: &SpongeSpec,
    k: u32,
    split: u32,
    budget: u64,
) -> Result<Partition> {
    let boxes: Vec<ExactBox<T>> = geometry::pillars(spec, k, budget)?;
    if split == 0 || split >= k {
        return components_fast(&boxes, spec.bases());
    }
    let d = spec.dims();
    let rel: Vec<T> = (0..d)
        .map(|j| num::pow(spec.base(j), k - split))
        .collect::<Result<_>>()?;

    let mut groups: HashMap<Vec<T>, Vec<usize>> = HashMap::new();
    for (i, b) in boxes.iter().enumerate() {
        let ancestor: Vec<T> = (0..d)
            .map(|j| b.corners[j].div_floor(&rel[j]))
            .collect();
        groups.entry(ancestor).or_default().push(i);
    }

    let index = corner_index(&boxes);
    let mut uf = UnionFind::new(boxes.len());
    let mut group_list: Vec<&Vec<usize>> = groups.values().collect();
    group_list.sort_by_key(|g| g[0]);
    for group in group_list {
        union_grid_neighbors(&boxes, group, &index, &mut uf);
    }

    // Glue step: only boxes on an ancestor face can touch another group.
    let mut boundary = Vec::new();
    for (i, b) in boxes.iter().enumerate() {
        let on_face = (0..d).try_fold(false, |acc, j| -> Result<bool> {
            if acc {
                return Ok(true);
            }
            let m = b.corners[j].mod_floor(&rel[j]);
            Ok(m.is_zero() || m == num::sub(&rel[j], &T::one())?)
        })?;
        if on_face {
            boundary.push(i);
        }
    }
    let face_index: HashMap<Vec<T>, usize> = boundary
        .iter()
        .map(|&i| (boxes[i].corners.clone(), i))
        .collect();
    union_grid_neighbors(&boxes, &boundary, &face_index, &mut uf);
    Ok(uf.partition())
}

/// Census of a component partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub level: u32,
    pub total_boxes: u64,
    pub component_count: u64,
    /// Box count per component, in canonical component order.
    pub component_sizes: Vec<u64>,
    /// Whether the component meets the unit-cube boundary, same order.
    pub boundary_flags: Vec<bool>,
    pub island_count: u64,
    pub max_component_size: u64,
}

pub fn summarize<T: GridInt>(
    boxes: &[ExactBox<T>],
    partition: &Partition,
    bases: &[u32],
    level: u32,
) -> Result<ComponentSummary> {
    let mut sizes = Vec::with_capacity(partition.len());
    let mut flags = Vec::with_capacity(partition.len());
    for comp in &partition.comps {
        sizes.push(comp.len() as u64);
        let mut touches = false;
        for &i in comp {
            if boxes[i].touches_unit_boundary(bases)? {
                touches = true;
                break;
            }
        }
        flags.push(touches);
    }
    let islands = flags.iter().filter(|&&f| !f).count() as u64;
    Ok(ComponentSummary {
        level,
        total_boxes: boxes.len() as u64,
        component_count: partition.len() as u64,
        max_component_size: sizes.iter().copied().max().unwrap_or(0),
        component_sizes: sizes,
        boundary_flags: flags,
        island_count: islands,
    })
}

/// Level-`k` pillar census via the default component path.
pub fn level_summary<T: GridInt>(
    spec: &SpongeSpec,
    k: u32,
    budget: u64,
) -> Result<ComponentSummary> {
    let boxes: Vec<ExactBox<T>> = geometry::pillars(spec, k, budget)?;
    let partition = components(&boxes, spec.bases())?;
    summarize(&boxes, &partition, spec.bases(), k)
}

/// Island count at level `k` plus one canonical witness island (the one
/// containing the smallest box in canonical order), if any.
pub fn islands<T: GridInt>(
    spec: &SpongeSpec,
    k: u32,
    budget: u64,
) -> Result<(u64, Option<Vec<ExactBox<T>>>)> {
    let boxes: Vec<ExactBox<T>> = geometry::pillars(spec, k, budget)?;
    let partition = components(&boxes, spec.bases())?;
    let mut count = 0u64;
    let mut witness: Option<Vec<ExactBox<T>>> = None;
    for comp in &partition.comps {
        let mut touches = false;
        for &i in comp {
            if boxes[i].touches_unit_boundary(spec.bases())? {
                touches = true;
                break;
            }
        }
        if !touches {
            count += 1;
            if witness.is_none() {
                witness = Some(comp.iter().map(|&i| boxes[i].clone()).collect());
            }
        }
    }
    Ok((count, witness))
}

/// Largest number of level-`k` pillars in a single component.
pub fn max_pillars_per_component<T: GridInt>(
    spec: &SpongeSpec,
    k: u32,
    budget: u64,
) -> Result<u64> {
    let boxes: Vec<ExactBox<T>> = geometry::pillars(spec, k, budget)?;
    let partition = components(&boxes, spec.bases())?;
    Ok(partition.max_size() as u64)
}

/// Bracketed boundary/inner split of the delta-components of a cylinder.
///
/// Components are computed from the stage-`depth` boxes inside the
/// cylinder, once under the over-merging gap graph and once under the
/// guaranteed-merge graph; a component is inner when the exact distance
/// from its box hull to the cylinder's pillar boundary exceeds `delta`.
/// The two graphs bracket each count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryInnerCount<T: GridInt> {
    pub delta: Frac<T>,
    pub depth: u32,
    /// (lo, hi) bracket of the total delta-component count of the cylinder.
    pub total: (u64, u64),
    pub boundary: (u64, u64),
    pub inner: (u64, u64),
}

pub fn boundary_inner_split<T: GridInt>(
    spec: &SpongeSpec,
    word: &Word,
    delta: &Frac<T>,
    depth: u32,
    budget: u64,
) -> Result<BoundaryInnerCount<T>> {
    let side = Frac::inv_pow(spec.max_base(), word.len() as u32)?;
    if !(delta < &side) {
        return Err(Error::DeltaTooLarge { delta: delta.to_string(), side: side.to_string() });
    }
    let (boxes, lo_part, hi_part) =
        crate::metrics::delta_partitions_in_cylinder(spec, word, delta, depth, budget)?;

    let parent: ExactBox<T> = geometry::pillar(spec, word)?;
    let split_counts = |part: &Partition| -> Result<(u64, u64)> {
        let mut boundary = 0u64;
        let mut inner = 0u64;
        for comp in &part.comps {
            let mut dist: Option<Frac<T>> = None;
            for &i in comp {
                let d = distance_to_parent_boundary(&boxes[i], &parent, spec.bases())?;
                dist = Some(match dist {
                    Some(cur) if cur <= d => cur,
                    _ => d,
                });
            }
            let dist = dist.expect("components are nonempty");
            if &dist > delta {
                inner += 1;
            } else {
                boundary += 1;
            }
        }
        Ok((boundary, inner))
    };
    let (b_lo, i_lo) = split_counts(&lo_part)?;
    let (b_hi, i_hi) = split_counts(&hi_part)?;
    Ok(BoundaryInnerCount {
        delta: delta.clone(),
        depth,
        total: (lo_part.len() as u64, hi_part.len() as u64),
        boundary: (b_lo.min(b_hi), b_lo.max(b_hi)),
        inner: (i_lo.min(i_hi), i_lo.max(i_hi)),
    })
}

/// Exact distance from a box inside `parent` to the boundary of `parent`:
/// the smallest per-axis distance to a face.
fn distance_to_parent_boundary<T: GridInt>(
    b: &ExactBox<T>,
    parent: &ExactBox<T>,
    bases: &[u32],
) -> Result<Frac<T>> {
    let mut best: Option<Frac<T>> = None;
    for axis in 0..b.dims() {
        let (blo, bhi) = b.interval(axis, bases)?;
        let (plo, phi) = parent.interval(axis, bases)?;
        for d in [blo.checked_sub(&plo)?, phi.checked_sub(&bhi)?] {
            debug_assert!(!d.is_negative(), "box must lie inside the cylinder pillar");
            best = Some(match best {
                Some(cur) if cur <= d => cur,
                _ => d,
            });
        }
    }
    Ok(best.expect("boxes have at least one axis"))
}
