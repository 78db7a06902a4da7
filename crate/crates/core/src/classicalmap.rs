//! Conversions between classical joint tables and bipartite density matrices.

use crate::causal::JointDistribution;
use crate::density::{validate_density, DensityMatrix, DENSITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{dagger, hermitian_eig, kron, matmul, ComplexMatrix, Subsystem, DEFAULT_EIG_TOL};

/// Places `p(x_i, y_j)` on the diagonal slot `i·n + j` of a density on `[m, n]`.
pub fn diag_embed(joint: &JointDistribution) -> Result<DensityMatrix> {
    let diag: Vec<f64> = joint.as_rows().into_iter().flatten().collect();
    validate_density(
        ComplexMatrix::from_real_diagonal(&diag),
        &[joint.rows(), joint.cols()],
        DENSITY_TOL,
    )
}

/// Reads a joint table off `ρ` in the product of the marginals' eigenbases.
///
/// With `U = V_A ⊗ V_B` built from the eigenvectors of `ρ_A` and `ρ_B`
/// (descending eigenvalue order), the table is the diagonal of `U† ρ U`.
/// Rows follow the eigen-order of `ρ_A`, columns that of `ρ_B`.
pub fn rotate_to_classical(rho_ab: &DensityMatrix) -> Result<JointDistribution> {
    let (a, b) = rho_ab.bipartite_dims()?;
    let va = hermitian_eig(rho_ab.reduced(Subsystem::A)?.matrix(), DEFAULT_EIG_TOL)?.eigenvectors;
    let vb = hermitian_eig(rho_ab.reduced(Subsystem::B)?.matrix(), DEFAULT_EIG_TOL)?.eigenvectors;
    let u = kron(&va, &vb);
    let rotated = matmul(&matmul(&dagger(&u), rho_ab.matrix())?, &u)?;
    let diag: Vec<f64> = rotated.diagonal().iter().map(|z| z.re.max(0.0)).collect();
    let total: f64 = diag.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution("rotated diagonal is empty".into()));
    }
    JointDistribution::new(
        diag.chunks(b)
            .take(a)
            .map(|row| row.iter().map(|x| x / total).collect())
            .collect(),
    )
}
