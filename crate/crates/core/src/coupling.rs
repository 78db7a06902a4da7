//! Greedy minimum-entropy coupling of probability marginals.
//!
//! Given marginals `p_1 … p_m`, the greedy repeatedly takes the largest
//! remaining mass of every row, places the smallest of those maxima at the
//! joint coordinate formed by the rows' argmaxes, and subtracts it from each
//! row. The resulting joint is a feasible coupling whose entropy upper-bounds
//! the (NP-hard) minimum.

use crate::density::{validate_density, DensityMatrix, PureState, DENSITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{kron_vec, Complex, ComplexMatrix};

/// Entries above `-NEG_TOL` are treated as zero when slightly negative.
const NEG_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;
/// Greedy stops once the placeable mass falls to this level.
pub const MASS_CUTOFF: f64 = 1e-12;

/// Probability rows to be coupled, zero-padded to a common length.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSet {
    rows: Vec<Vec<f64>>,
    /// Lengths before padding.
    widths: Vec<usize>,
}

impl MarginalSet {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidMarginals("no rows".into()));
        }
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        if width == 0 {
            return Err(Error::InvalidMarginals("empty row".into()));
        }
        let widths = rows.iter().map(Vec::len).collect();
        let mut padded = Vec::with_capacity(rows.len());
        for (k, row) in rows.into_iter().enumerate() {
            let mut clean = Vec::with_capacity(width);
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() || x < -NEG_TOL {
                    return Err(Error::InvalidMarginals(format!(
                        "row {k} entry {j} = {x} is not a probability"
                    )));
                }
                clean.push(x.max(0.0));
            }
            let sum: f64 = clean.iter().sum();
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidMarginals(format!(
                    "row {k} sums to {sum}, not 1"
                )));
            }
            clean.resize(width, 0.0);
            padded.push(clean);
        }
        Ok(Self {
            rows: padded,
            widths,
        })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn original_widths(&self) -> &[usize] {
        &self.widths
    }
}

/// One point mass of a coupling: a coordinate per marginal row.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub coords: Vec<usize>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingResult {
    pub entropy_bits: f64,
    pub placements: Vec<Placement>,
}

impl CouplingResult {
    /// Marginal of the placements along row `k`, as a vector of length `width`.
    pub fn marginal(&self, k: usize, width: usize) -> Vec<f64> {
        let mut out = vec![0.0; width];
        for p in &self.placements {
            out[p.coords[k]] += p.mass;
        }
        out
    }

    pub fn masses(&self) -> Vec<f64> {
        self.placements.iter().map(|p| p.mass).collect()
    }
}

/// `H(p) = −Σ p_i log₂ p_i` with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(x) = p.iter().find(|&&x| !x.is_finite() || x < -NEG_TOL) {
        return Err(Error::InvalidMarginals(format!(
            "{x} is not a probability"
        )));
    }
    Ok(entropy_unchecked(p))
}

fn entropy_unchecked(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Index of the largest entry; the lowest index wins ties.
fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = j;
        }
    }
    best
}

pub fn greedy_min_entropy_coupling(marginals: &MarginalSet) -> CouplingResult {
    let mut work: Vec<Vec<f64>> = marginals.rows().to_vec();
    let mut placements = Vec::new();
    // Each step zeroes at least one entry, so this bounds the loop.
    let max_steps = work.len() * marginals.width() + 1;

    for _ in 0..max_steps {
        let coords: Vec<usize> = work.iter().map(|r| argmax(r)).collect();
        let mass = work
            .iter()
            .zip(&coords)
            .map(|(r, &j)| r[j])
            .fold(f64::INFINITY, f64::min);
        if mass <= MASS_CUTOFF {
            break;
        }
        for (row, &j) in work.iter_mut().zip(&coords) {
            row[j] -= mass;
        }
        placements.push(Placement { coords, mass });
    }

    let total: f64 = placements.iter().map(|p| p.mass).sum();
    for p in &mut placements {
        p.mass /= total;
    }
    let entropy_bits = entropy_unchecked(&placements.iter().map(|p| p.mass).collect::<Vec<_>>());
    CouplingResult {
        entropy_bits,
        placements,
    }
}

/// `Σ r · (⊗_k |v^k_{c_k}⟩)(⊗_k |v^k_{c_k}⟩)†` for each placement `(c, r)`.
pub fn coupling_to_joint_density(
    result: &CouplingResult,
    eigvecs_per_marginal: &[Vec<PureState>],
) -> Result<DensityMatrix> {
    let dims: Vec<usize> = eigvecs_per_marginal
        .iter()
        .map(|set| set.first().map_or(0, PureState::dim))
        .collect();
    if dims.contains(&0) {
        return Err(Error::DimensionMismatch("empty eigenvector set".into()));
    }
    let total: usize = dims.iter().product();
    let mut joint = ComplexMatrix::zeros(total, total);
    for placement in &result.placements {
        if placement.coords.len() != eigvecs_per_marginal.len() {
            return Err(Error::DimensionMismatch(format!(
                "placement has {} coordinates for {} marginals",
                placement.coords.len(),
                eigvecs_per_marginal.len()
            )));
        }
        let mut ket = vec![Complex::new(1.0, 0.0)];
        for (k, &c) in placement.coords.iter().enumerate() {
            let set = &eigvecs_per_marginal[k];
            let v = set.get(c).ok_or_else(|| {
                Error::DimensionMismatch(format!(
                    "coordinate {c} out of range for marginal {k} with {} vectors",
                    set.len()
                ))
            })?;
            if v.dim() != dims[k] {
                return Err(Error::DimensionMismatch(format!(
                    "marginal {k} mixes vector dimensions {} and {}",
                    v.dim(),
                    dims[k]
                )));
            }
            ket = kron_vec(&ket, v.amplitudes());
        }
        let term = ComplexMatrix::outer(&ket).scale_real(placement.mass);
        joint = joint.add(&term)?;
    }
    validate_density(joint, &dims, DENSITY_TOL)
}

/// Exhaustive minimum joint entropy over a 2×2 coupling polytope.
///
/// The polytope is the segment `t ∈ [max(0, p₀+q₀−1), min(p₀, q₀)]` with joint
/// `[[t, p₀−t], [q₀−t, 1−p₀−q₀+t]]`; `grid_steps + 1` equally spaced points
/// including both ends are evaluated.
pub fn bruteforce_coupling_2rows(p: [f64; 2], q: [f64; 2], grid_steps: usize) -> f64 {
    let lo = (p[0] + q[0] - 1.0).max(0.0);
    let hi = p[0].min(q[0]).max(lo);
    let steps = grid_steps.max(1);
    (0..=steps)
        .map(|k| {
            let t = if k == steps {
                hi
            } else {
                lo + (hi - lo) * k as f64 / steps as f64
            };
            let cells = [t, p[0] - t, q[0] - t, 1.0 - p[0] - q[0] + t];
            entropy_unchecked(&cells.map(|x| x.max(0.0)))
        })
        .fold(f64::INFINITY, f64::min)
}
