//! Validated density matrices, pure states and instance conditionals.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, matmul, partial_trace, swap_subsystems, Complex, ComplexMatrix,
    Subsystem, DEFAULT_EIG_TOL,
};

/// Tolerance used when re-validating states the library derives itself.
pub const DENSITY_TOL: f64 = 1e-9;
/// A conditioning outcome with probability at or below this is measure-zero.
pub const PROB_TOL: f64 = 1e-12;
/// Eigenvalues at or below this contribute nothing to an entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// Hermitian, positive-semidefinite, unit-trace matrix over a product of subsystems.
///
/// The spectrum (descending, clamped at zero) is computed once at validation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
    spectrum: Vec<f64>,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Eigenvalues in non-increasing order.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_spectrum(&self.spectrum)
    }

    /// `(dim_a, dim_b)` for a two-subsystem state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            &[a, b] => Ok((a, b)),
            other => Err(Error::DimensionMismatch(format!(
                "expected a bipartite state, got subsystem dims {other:?}"
            ))),
        }
    }

    /// Reduced state of `keep`, tracing out the other factor.
    pub fn reduced(&self, keep: Subsystem) -> Result<DensityMatrix> {
        let (a, b) = self.bipartite_dims()?;
        let m = partial_trace(&self.mat, a, b, keep.other())?;
        let dim = m.rows();
        validate_density(m, &[dim], DENSITY_TOL)
    }

    /// The same state with its two subsystems reordered.
    pub fn swapped(&self) -> Result<DensityMatrix> {
        let (a, b) = self.bipartite_dims()?;
        Ok(DensityMatrix {
            mat: swap_subsystems(&self.mat, a, b)?,
            dims: vec![b, a],
            spectrum: self.spectrum.clone(),
        })
    }
}

/// Unit-norm ket.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    ket: Vec<Complex>,
}

impl PureState {
    pub fn new(ket: Vec<Complex>) -> Result<Self> {
        if ket.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotNormalized {
                norm,
                tol: DENSITY_TOL,
            });
        }
        Ok(Self { ket })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut ket = vec![Complex::new(0.0, 0.0); dim];
        ket[index] = Complex::new(1.0, 0.0);
        Self { ket }
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.ket
    }

    pub fn dim(&self) -> usize {
        self.ket.len()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.ket)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        validate_density(self.projector(), &[self.dim()], DENSITY_TOL)
    }
}

/// Checks the density-matrix contract at tolerance `tol` and wraps `m`.
///
/// The stored matrix is the Hermitian part of `m`, rescaled to unit trace;
/// eigenvalues in `[-tol, 0)` are clamped to zero before rescaling.
pub fn validate_density(m: ComplexMatrix, dims: &[usize], tol: f64) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let product: usize = dims.iter().product();
    if dims.is_empty() || product != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            m.rows()
        )));
    }
    let residual = m.hermitian_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceNotOne {
            trace,
            residual: (trace - 1.0).abs(),
            tol,
        });
    }
    let herm = m.hermitian_part();
    let eig = hermitian_eig(&herm, DEFAULT_EIG_TOL)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            tol,
        });
    }
    // Round-off negatives only need the cached spectrum clamped; rebuilding the
    // matrix from eigenvectors would cost more accuracy than it buys.
    let (mat, clamped) = if min < -PROB_TOL {
        let clamped: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
        (eig.reconstruct_with(|x| x.max(0.0)), clamped)
    } else {
        (herm, eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect())
    };
    let total: f64 = clamped.iter().sum();
    let spectrum = clamped.iter().map(|x| x / total).collect();
    Ok(DensityMatrix {
        mat: mat.scale_real(1.0 / mat.trace().re),
        dims: dims.to_vec(),
        spectrum,
    })
}

/// Shannon entropy in bits of an eigenvalue spectrum, skipping values ≤ 1e-12.
pub(crate) fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum
        .iter()
        .filter(|&&x| x > ENTROPY_CUTOFF)
        .map(|&x| -x * x.log2())
        .sum();
    s.max(0.0)
}

/// von Neumann entropy `S(ρ) = −Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.entropy()
}

/// `M ⋆ N = (N^{1/2} ⊗ I) M (N^{1/2} ⊗ I)`, with `I` sized so the product fits `M`.
pub fn star_product(m: &ComplexMatrix, n: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !n.is_square() {
        return Err(Error::DimensionMismatch("star product needs a square N".into()));
    }
    let eig = hermitian_eig(n, DEFAULT_EIG_TOL)?;
    let scale = n.frobenius_norm().max(1.0);
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -DENSITY_TOL * scale {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                tol: DENSITY_TOL * scale,
            });
        }
    }
    let root = eig.reconstruct_with(|x| x.max(0.0).sqrt());
    star_with_root(m, &root)
}

/// `(R ⊗ I) M (R ⊗ I)` for an already computed square root `R`.
fn star_with_root(m: &ComplexMatrix, root: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = root.rows();
    if !m.is_square() || d == 0 || !m.rows().is_multiple_of(d) {
        return Err(Error::DimensionMismatch(format!(
            "star product: N is {d}x{d} but M is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let lifted = kron(root, &ComplexMatrix::identity(m.rows() / d));
    matmul(&matmul(&lifted, m)?, &lifted)
}

/// Unnormalized conditional of the subsystem opposite `conditioned`:
/// `Tr_1{ρ' ⋆ |ψ⟩⟨ψ|}` where `ρ'` has the conditioned subsystem first.
///
/// A rank-one projector is its own square root, so it is used directly.
pub fn conditional_numerator(
    rho_joint: &DensityMatrix,
    condition: &PureState,
    conditioned: Subsystem,
) -> Result<ComplexMatrix> {
    let (a, b) = rho_joint.bipartite_dims()?;
    let (first, second, ordered) = match conditioned {
        Subsystem::A => (a, b, rho_joint.matrix().clone()),
        Subsystem::B => (b, a, swap_subsystems(rho_joint.matrix(), a, b)?),
    };
    if condition.dim() != first {
        return Err(Error::DimensionMismatch(format!(
            "condition ket has dimension {} but the conditioned subsystem has {first}",
            condition.dim()
        )));
    }
    let starred = star_with_root(&ordered, &condition.projector())?;
    partial_trace(&starred, first, second, Subsystem::A)
}

/// State of the other subsystem given that `conditioned` was observed in `condition`.
pub fn instance_conditional(
    rho_joint: &DensityMatrix,
    condition: &PureState,
    conditioned: Subsystem,
) -> Result<DensityMatrix> {
    let numerator = conditional_numerator(rho_joint, condition, conditioned)?;
    let probability = numerator.trace().re;
    if probability <= PROB_TOL {
        return Err(Error::ZeroProbabilityCondition { probability });
    }
    let dim = numerator.rows();
    validate_density(numerator.scale_real(1.0 / probability), &[dim], DENSITY_TOL)
}

/// Normalized spin singlet `(|01⟩ − |10⟩)/√2` as a density on `[2, 2]`.
pub fn spin_singlet() -> DensityMatrix {
    let h = 0.5;
    let m = ComplexMatrix::from_real_rows(&[
        vec![0.0, 0.0, 0.0, 0.0],
        vec![0.0, h, -h, 0.0],
        vec![0.0, -h, h, 0.0],
        vec![0.0, 0.0, 0.0, 0.0],
    ])
    .expect("4x4");
    validate_density(m, &[2, 2], DENSITY_TOL).expect("singlet is a valid state")
}
