//! Sponge specifications.
//!
//! A spec is a base vector `n_1 <= ... <= n_d` (each `>= 2`) together with a
//! nonempty set of digit tuples from `prod_j {0..n_j-1}`. The attractor is
//! the unique compact set `E` with `E = union_i Lambda^{-1}(E + i)` over the
//! digits `i`, where `Lambda = diag(n_1, ..., n_d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape class of a spec. Every classification theorem implemented here is
/// stated either for cubes (all bases equal) or for strict sponges
/// (strictly increasing bases); anything else is out of scope and the
/// classifiers answer `Unknown` for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Cube,
    Sponge,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpongeSpec {
    bases: Vec<u32>,
    digits: Vec<Vec<u32>>,
}

impl SpongeSpec {
    /// Validates bases and digits. Digits are stored sorted
    /// lexicographically; duplicates are rejected.
    pub fn new(bases: Vec<u32>, digits: Vec<Vec<u32>>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let d = bases.len();
        for (j, &b) in bases.iter().enumerate() {
            if b < 2 {
                return Err(Error::BaseTooSmall { axis: j + 1, base: b });
            }
            if j + 1 < d && bases[j + 1] < b {
                // Bases must be non-decreasing; reordering axes is the
                // caller's job because it changes the attractor.
                return Err(Error::BaseTooSmall { axis: j + 2, base: bases[j + 1] });
            }
        }
        if digits.is_empty() {
            return Err(Error::EmptyDigits);
        }
        let mut digits = digits;
        for digit in &digits {
            if digit.len() != d {
                return Err(Error::DigitArityMismatch {
                    digit: digit.clone(),
                    got: digit.len(),
                    expected: d,
                });
            }
            for (j, (&v, &b)) in digit.iter().zip(&bases).enumerate() {
                if v >= b {
                    return Err(Error::DigitOutOfRange { axis: j + 1, value: v, base: b });
                }
            }
        }
        digits.sort();
        for w in digits.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateDigit { digit: w[0].clone() });
            }
        }
        Ok(SpongeSpec { bases, digits })
    }

    pub fn dims(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn base(&self, axis: usize) -> u32 {
        self.bases[axis]
    }

    /// Largest base `n_d`.
    pub fn max_base(&self) -> u32 {
        *self.bases.last().expect("validated spec is nonempty")
    }

    /// Digits, sorted lexicographically.
    pub fn digits(&self) -> &[Vec<u32>] {
        &self.digits
    }

    pub fn digit_count(&self) -> usize {
        self.digits.len()
    }

    pub fn kind(&self) -> Kind {
        let all_equal = self.bases.windows(2).all(|w| w[0] == w[1]);
        if all_equal {
            return Kind::Cube;
        }
        let strict = self.bases.windows(2).all(|w| w[0] < w[1]);
        if strict {
            Kind::Sponge
        } else {
            Kind::Mixed
        }
    }

    /// Projection onto the first `j` axes (1-based count, `1 <= j <= d`):
    /// keeps bases `n_1..n_j` and deduplicates the projected digits.
    pub fn project(&self, j: usize) -> Result<SpongeSpec> {
        if j == 0 || j > self.dims() {
            return Err(Error::AxisOutOfRange { axis: j, dims: self.dims() });
        }
        let axes: Vec<usize> = (1..=j).collect();
        self.project_axes(&axes)
    }

    /// Projection onto an arbitrary subset of axes, given as strictly
    /// increasing 1-based indices. Keeps the selected bases and
    /// deduplicates the projected digits.
    pub fn project_axes(&self, axes: &[usize]) -> Result<SpongeSpec> {
        if axes.is_empty() {
            return Err(Error::AxisOutOfRange { axis: 0, dims: self.dims() });
        }
        let mut prev = 0usize;
        for &a in axes {
            if a == 0 || a > self.dims() || a <= prev {
                return Err(Error::AxisOutOfRange { axis: a, dims: self.dims() });
            }
            prev = a;
        }
        let bases: Vec<u32> = axes.iter().map(|&a| self.bases[a - 1]).collect();
        let mut digits: Vec<Vec<u32>> = self
            .digits
            .iter()
            .map(|t| axes.iter().map(|&a| t[a - 1]).collect())
            .collect();
        digits.sort();
        digits.dedup();
        Ok(SpongeSpec { bases, digits })
    }

    /// Is axis `j` (0-based) degenerate, i.e. constant 0 or constant
    /// `n_j - 1` across all digits?
    fn axis_degenerate(&self, j: usize) -> bool {
        let first = self.digits[0][j];
        (first == 0 || first == self.bases[j] - 1)
            && self.digits.iter().all(|t| t[j] == first)
    }

    /// Drops degenerate axes until none remain. On such an axis the
    /// attractor is squashed to a boundary face, so deleting the axis is an
    /// isometry of the attractor. Returns the reduced spec and the kept
    /// axes as 1-based indices into the original spec. Errors with
    /// [`Error::AllAxesDegenerate`] when the attractor is a single point.
    pub fn reduce_degenerate(&self) -> Result<(SpongeSpec, Vec<usize>)> {
        let mut bases = self.bases.clone();
        let mut digits = self.digits.clone();
        let mut kept: Vec<usize> = (1..=self.dims()).collect();
        loop {
            let current = SpongeSpec { bases: bases.clone(), digits: digits.clone() };
            let degenerate = (0..current.dims()).find(|&j| current.axis_degenerate(j));
            match degenerate {
                None => return Ok((current, kept)),
                Some(j) if current.dims() == 1 => {
                    let _ = j;
                    return Err(Error::AllAxesDegenerate);
                }
                Some(j) => {
                    bases.remove(j);
                    kept.remove(j);
                    for t in &mut digits {
                        t.remove(j);
                    }
                    digits.sort();
                    digits.dedup();
                }
            }
        }
    }

    /// Is the digit set the full product `prod_j {0..n_j-1}`?
    pub fn is_full_product(&self) -> bool {
        let full: u64 = self.bases.iter().map(|&b| b as u64).product();
        self.digits.len() as u64 == full
    }

    /// Number of distinct digit projections onto the first `j` axes.
    pub fn projection_count(&self, j: usize) -> usize {
        let mut seen: Vec<&[u32]> = self.digits.iter().map(|t| &t[..j]).collect();
        seen.sort();
        seen.dedup();
        seen.len()
    }

    /// Box-counting dimension, reported as a float with per-axis terms.
    /// Decisions never consume this; it only feeds reports and the
    /// advisory exponent comparison.
    pub fn box_dimension(&self) -> DimensionValue {
        let d = self.dims();
        let mut counts = Vec::with_capacity(d);
        for j in 1..=d {
            counts.push(self.projection_count(j) as u64);
        }
        let mut terms = Vec::with_capacity(d);
        let mut prev = 1.0f64;
        for (j, &c) in counts.iter().enumerate() {
            let term = (c as f64 / prev).ln() / (self.bases[j] as f64).ln();
            terms.push(term);
            prev = c as f64;
        }
        DimensionValue { value: terms.iter().sum(), terms, projection_counts: counts }
    }
}

/// Box-counting dimension with its per-axis contributions
/// `log(c_j / c_{j-1}) / log n_j` where `c_j` counts distinct projections
/// of the digit set onto the first `j` axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionValue {
    pub value: f64,
    pub terms: Vec<f64>,
    pub projection_counts: Vec<u64>,
}
