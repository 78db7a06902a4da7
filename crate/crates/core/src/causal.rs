//! Causal direction from exogenous entropy, for classical joint tables and
//! bipartite density matrices.
//!
//! For the hypothesis `A → B` the score is `S(A) + S(E)`, where `S(E)` is the
//! greedy coupling entropy of the spectra of the instance conditionals
//! `ρ_{B | A = |a_i⟩}` taken over the eigenbasis `{|a_i⟩}` of `ρ_A`. The
//! direction with the smaller score wins.

use std::fmt;

use crate::coupling::{greedy_min_entropy_coupling, shannon_entropy, CouplingResult, MarginalSet};
use crate::density::{conditional_numerator, instance_conditional, DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, Subsystem, DEFAULT_EIG_TOL};

/// Default tolerance within which two directional scores count as a tie.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;
/// Cause-side eigenbranches at or below this weight are skipped.
pub const BRANCH_CUTOFF: f64 = 1e-12;
/// Reduced spectra with a gap below this are flagged as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Classical joint distribution `p(X = i, Y = j)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

impl JointDistribution {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        let rows = table.len();
        let cols = table.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDistribution("empty table".into()));
        }
        if table.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDistribution("ragged table".into()));
        }
        let flat: Vec<f64> = table.into_iter().flatten().collect();
        if let Some(x) = flat.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {x} is not a probability"
            )));
        }
        let sum: f64 = flat.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self {
            rows,
            cols,
            table: flat,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.cols + j]
    }

    pub fn as_rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn transposed(&self) -> Self {
        let mut table = vec![0.0; self.table.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                table[j * self.rows + i] = self.get(i, j);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            table,
        }
    }

    /// `p(X)`.
    pub fn row_marginal(&self) -> Vec<f64> {
        self.table.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    /// `p(Y)`.
    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    AtoB,
    BtoA,
    Tie,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AtoB => "A->B",
            Direction::BtoA => "B->A",
            Direction::Tie => "Tie",
        }
    }

    fn from_scores(forward: f64, backward: f64, tie_tol: f64) -> Self {
        if (forward - backward).abs() <= tie_tol {
            Direction::Tie
        } else if forward < backward {
            Direction::AtoB
        } else {
            Direction::BtoA
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which hypothesis a directional analysis scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `A → B`: condition B on the eigenstates of A.
    Forward,
    /// `B → A`.
    Backward,
}

/// A reduced density whose spectrum has (near-)coincident eigenvalues, making
/// its eigenbasis, and therefore the verdict, basis-choice dependent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyWarning {
    pub subsystem: Subsystem,
    pub min_gap: f64,
}

impl fmt::Display for DegeneracyWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DegeneracyWarning: reduced density of {:?} has eigenvalues {:.3e} apart; its eigenbasis is not unique",
            self.subsystem, self.min_gap
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalVerdict {
    pub direction: Direction,
    /// `S(A → B) = s_cause_fwd + s_exo_fwd`.
    pub s_forward: f64,
    /// `S(A ← B) = s_cause_bwd + s_exo_bwd`.
    pub s_backward: f64,
    pub s_cause_fwd: f64,
    pub s_exo_fwd: f64,
    pub s_cause_bwd: f64,
    pub s_exo_bwd: f64,
    pub warnings: Vec<DegeneracyWarning>,
}

impl CausalVerdict {
    fn from_parts(
        (s_cause_fwd, s_exo_fwd): (f64, f64),
        (s_cause_bwd, s_exo_bwd): (f64, f64),
        tie_tol: f64,
        warnings: Vec<DegeneracyWarning>,
    ) -> Self {
        let s_forward = s_cause_fwd + s_exo_fwd;
        let s_backward = s_cause_bwd + s_exo_bwd;
        Self {
            direction: Direction::from_scores(s_forward, s_backward, tie_tol),
            s_forward,
            s_backward,
            s_cause_fwd,
            s_exo_fwd,
            s_cause_bwd,
            s_exo_bwd,
            warnings,
        }
    }

    /// `S(A ← B) − S(A → B)`.
    pub fn delta(&self) -> f64 {
        self.s_backward - self.s_forward
    }
}

/// One eigenbranch of the cause subsystem.
#[derive(Debug, Clone)]
pub struct ConditionalBranch {
    pub weight: f64,
    pub eigenvector: PureState,
    /// `Tr_cause{ρ ⋆ |v⟩⟨v|}` before normalization.
    pub numerator: ComplexMatrix,
    pub conditional: DensityMatrix,
}

/// Everything computed while scoring one causal hypothesis.
#[derive(Debug, Clone)]
pub struct DirectionalAnalysis {
    pub orientation: Orientation,
    pub cause: DensityMatrix,
    pub effect: DensityMatrix,
    /// Branches in descending eigenvalue order; zero-weight branches omitted.
    pub branches: Vec<ConditionalBranch>,
    pub marginals: MarginalSet,
    pub coupling: CouplingResult,
    pub degeneracy: Option<DegeneracyWarning>,
}

impl DirectionalAnalysis {
    pub fn cause_entropy(&self) -> f64 {
        self.cause.entropy()
    }

    pub fn exogenous_entropy(&self) -> f64 {
        self.coupling.entropy_bits
    }

    pub fn score(&self) -> f64 {
        self.cause_entropy() + self.exogenous_entropy()
    }
}

fn degeneracy(spectrum: &[f64], subsystem: Subsystem) -> Option<DegeneracyWarning> {
    let min_gap = spectrum
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(f64::INFINITY, f64::min);
    (min_gap < DEGENERACY_GAP).then_some(DegeneracyWarning { subsystem, min_gap })
}

/// Runs the conditioning and coupling steps for one hypothesis.
pub fn analyze_direction(
    rho_ab: &DensityMatrix,
    orientation: Orientation,
    eig_tol: f64,
) -> Result<DirectionalAnalysis> {
    rho_ab.bipartite_dims()?;
    let (cause_side, effect_side) = match orientation {
        Orientation::Forward => (Subsystem::A, Subsystem::B),
        Orientation::Backward => (Subsystem::B, Subsystem::A),
    };
    let cause = rho_ab.reduced(cause_side)?;
    let effect = rho_ab.reduced(effect_side)?;
    let eig = hermitian_eig(cause.matrix(), eig_tol)?;

    let mut branches = Vec::new();
    for (i, &weight) in eig.eigenvalues.iter().enumerate() {
        if weight <= BRANCH_CUTOFF {
            continue;
        }
        let eigenvector = PureState::new(eig.eigenvector(i))?;
        let numerator = conditional_numerator(rho_ab, &eigenvector, cause_side)?;
        let conditional = instance_conditional(rho_ab, &eigenvector, cause_side)?;
        branches.push(ConditionalBranch {
            weight,
            eigenvector,
            numerator,
            conditional,
        });
    }
    let marginals = MarginalSet::new(
        branches
            .iter()
            .map(|b| b.conditional.spectrum().to_vec())
            .collect(),
    )?;
    let coupling = greedy_min_entropy_coupling(&marginals);
    Ok(DirectionalAnalysis {
        orientation,
        degeneracy: degeneracy(&eig.eigenvalues, cause_side),
        cause,
        effect,
        branches,
        marginals,
        coupling,
    })
}

/// Spectra of the effect-side instance conditionals, one row per cause eigenbranch.
pub fn conditional_spectra(
    rho_ab: &DensityMatrix,
    orientation: Orientation,
    eig_tol: f64,
) -> Result<MarginalSet> {
    analyze_direction(rho_ab, orientation, eig_tol).map(|a| a.marginals)
}

/// Quantum entropic causal inference on a bipartite density matrix.
pub fn qeci_infer(rho_ab: &DensityMatrix, tie_tol: f64) -> Result<CausalVerdict> {
    let fwd = analyze_direction(rho_ab, Orientation::Forward, DEFAULT_EIG_TOL)?;
    let bwd = analyze_direction(rho_ab, Orientation::Backward, DEFAULT_EIG_TOL)?;
    let warnings = [fwd.degeneracy, bwd.degeneracy].into_iter().flatten().collect();
    Ok(CausalVerdict::from_parts(
        (fwd.cause_entropy(), fwd.exogenous_entropy()),
        (bwd.cause_entropy(), bwd.exogenous_entropy()),
        tie_tol,
        warnings,
    ))
}

/// `(H(X), H(E))` for the hypothesis `X → Y` on a table with X along rows.
fn classical_score(joint: &JointDistribution) -> Result<(f64, f64)> {
    let px = joint.row_marginal();
    let rows: Vec<Vec<f64>> = joint
        .as_rows()
        .into_iter()
        .zip(&px)
        .filter(|(_, &m)| m > BRANCH_CUTOFF)
        .map(|(row, &m)| row.iter().map(|x| x / m).collect())
        .collect();
    if rows.is_empty() {
        return Err(Error::InvalidDistribution("marginal is entirely zero".into()));
    }
    let exo = greedy_min_entropy_coupling(&MarginalSet::new(rows)?).entropy_bits;
    Ok((shannon_entropy(&px)?, exo))
}

/// Classical entropic causal inference; `X` indexes rows, `Y` columns.
pub fn classical_eci(joint: &JointDistribution, tie_tol: f64) -> Result<CausalVerdict> {
    let fwd = classical_score(joint)?;
    let bwd = classical_score(&joint.transposed())?;
    Ok(CausalVerdict::from_parts(fwd, bwd, tie_tol, Vec::new()))
}
