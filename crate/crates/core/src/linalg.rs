//! Dense complex linear algebra for small composite quantum systems.
//!
//! Matrices are row-major. Composite indices follow the `|a⟩⊗|b⟩` convention:
//! basis state `(i, k)` of an `A ⊗ B` system lives at index `i * dim_b + k`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Default convergence tolerance of the Jacobi eigensolver, relative to `‖A‖_F`.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;
/// Sweep limit of the Jacobi eigensolver.
pub const MAX_JACOBI_SWEEPS: usize = 100;
/// Relative anti-Hermitian residual accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-8;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from real row vectors; all rows must have equal length.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex::new(x, 0.0)))
            .collect::<Vec<_>>();
        Self::new(rows.len(), cols, data)
    }

    /// Column vector (ket) from its amplitudes.
    pub fn column(amplitudes: &[Complex]) -> Result<Self> {
        Self::new(amplitudes.len(), 1, amplitudes.to_vec())
    }

    /// `|ψ⟩⟨ψ|` for the given amplitudes.
    pub fn outer(amplitudes: &[Complex]) -> Self {
        let n = amplitudes.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn column_vec(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: Complex) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest entrywise modulus of `self - other`; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖A − A†‖_F`; infinite for non-square input.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == ZERO {
                continue;
            }
            for j in 0..b.cols {
                out.data[i * b.cols + j] += aik * b.data[k * b.cols + j];
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two kets given as amplitude slices.
pub fn kron_vec(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Spectrum and orthonormal eigenbasis of a Hermitian matrix.
///
/// Eigenvalues are sorted in non-increasing order and column `i` of
/// `eigenvectors` pairs with `eigenvalues[i]`. Each eigenvector's
/// largest-magnitude component is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, i: usize) -> Vec<Complex> {
        self.eigenvectors.column_vec(i)
    }

    /// `Σ f(λ_i) v_i v_i†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.rows;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.eigenvectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.eigenvectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius mass is at most `eig_tol · ‖A‖_F`.
pub fn hermitian_eig(a: &ComplexMatrix, eig_tol: f64) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let norm = a.frobenius_norm();
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL * norm {
        return Err(Error::NotHermitian {
            residual,
            tol: HERMITIAN_TOL * norm,
        });
    }

    let mut work = a.hermitian_part();
    let mut vecs = ComplexMatrix::identity(n);
    let threshold = eig_tol * norm;

    let mut converged = false;
    for _ in 0..=MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&work) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut work, &mut vecs, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let raw: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable: equal eigenvalues keep the order the sweeps produced.
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));

    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = fix_gauge(vecs.column_vec(src));
        for (i, z) in col.into_iter().enumerate() {
            eigenvectors[(i, dst)] = z;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&i| raw[i]).collect(),
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `m[p][q]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)` acting on
/// rows/columns `p, q`, then accumulates `V ← V G`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = m[(p, q)];
    let b_abs = b.norm();
    if b_abs == 0.0 {
        return;
    }
    let phase = b / b_abs;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    let zeta = (aqq - app) / (2.0 * b_abs);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Entries of G restricted to the (p, q) plane.
    let g_pp = Complex::new(c, 0.0);
    let g_pq = Complex::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = m.rows;
    // M ← M G
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * g_pp + mkq * g_qp;
        m[(k, q)] = mkp * g_pq + mkq * g_qq;
    }
    // M ← G† M
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * mpk + g_qp.conj() * mqk;
        m[(q, k)] = g_pq.conj() * mpk + g_qq.conj() * mqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Multiplies by a unit phase so the largest-magnitude component is real positive.
fn fix_gauge(mut col: Vec<Complex>) -> Vec<Complex> {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return col;
    }
    // First component within rounding of the maximum, so near-ties resolve by index.
    let pivot = col
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = col[pivot].conj() / col[pivot].norm();
    for z in &mut col {
        *z *= phase;
    }
    col[pivot] = Complex::new(col[pivot].re, 0.0);
    col
}

/// Which factor of a bipartite `A ⊗ B` system an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

fn check_bipartite(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    let n = dim_a * dim_b;
    if !rho.is_square() || rho.rows != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}x{n} matrix for subsystems {dim_a}x{dim_b}, got {}x{}",
            rho.rows, rho.cols
        )));
    }
    Ok(())
}

/// Partial trace over `traced` of a matrix on `A ⊗ B`.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(rho, dim_a, dim_b)?;
    let out = match traced {
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(dim_a, dim_a);
            for i in 0..dim_a {
                for j in 0..dim_a {
                    out[(i, j)] = (0..dim_b)
                        .map(|k| rho[(i * dim_b + k, j * dim_b + k)])
                        .sum();
                }
            }
            out
        }
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(dim_b, dim_b);
            for k in 0..dim_b {
                for l in 0..dim_b {
                    out[(k, l)] = (0..dim_a)
                        .map(|i| rho[(i * dim_b + k, i * dim_b + l)])
                        .sum();
                }
            }
            out
        }
    };
    Ok(out)
}

/// Reorders a matrix on `A ⊗ B` into the same operator on `B ⊗ A`.
pub fn swap_subsystems(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(rho, dim_a, dim_b)?;
    let n = dim_a * dim_b;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..dim_a {
        for k in 0..dim_b {
            for j in 0..dim_a {
                for l in 0..dim_b {
                    out[(k * dim_a + i, l * dim_a + j)] = rho[(i * dim_b + k, j * dim_b + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Pauli X.
pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("2x2")
}
