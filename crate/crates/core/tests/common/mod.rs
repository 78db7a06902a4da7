//! Random states and unitaries shared by the integration tests.
#![allow(dead_code)]

use qeci::linalg::{dagger, kron, matmul};
use qeci::{validate_density, Complex, ComplexMatrix, DensityMatrix, JointDistribution, PureState};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn random_complex(rng: &mut StdRng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Haar-ish unitary: Gram–Schmidt on random complex columns.
pub fn random_unitary(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex> = (0..n).map(|_| random_complex(rng)).collect();
        for u in &cols {
            let dot: Complex = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let data = (0..n).flat_map(|i| cols.iter().map(move |c| c[i])).collect();
    ComplexMatrix::new(n, n, data).unwrap()
}

/// Random full-rank density `G G† / Tr` on `[da, db]`.
pub fn random_density(rng: &mut StdRng, da: usize, db: usize) -> DensityMatrix {
    let n = da * db;
    let g = ComplexMatrix::new(n, n, (0..n * n).map(|_| random_complex(rng)).collect()).unwrap();
    let m = matmul(&g, &dagger(&g)).unwrap();
    let m = m.scale_real(1.0 / m.trace().re);
    validate_density(m.hermitian_part(), &[da, db], 1e-9).unwrap()
}

pub fn random_pure(rng: &mut StdRng, dim: usize) -> PureState {
    let v: Vec<Complex> = (0..dim).map(|_| random_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(v.into_iter().map(|z| z / norm).collect()).unwrap()
}

pub fn random_joint(rng: &mut StdRng, rows: usize, cols: usize) -> JointDistribution {
    let cells: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = cells.iter().sum();
    JointDistribution::new(cells.chunks(cols).map(|r| r.iter().map(|x| x / total).collect()).collect())
        .unwrap()
}

/// Smallest gap between consecutive entries of a sorted spectrum.
pub fn min_gap(spectrum: &[f64]) -> f64 {
    spectrum.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min)
}

pub fn min_gap_unsorted(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    min_gap(&v)
}

/// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
pub fn local_rotation(rho: &DensityMatrix, ua: &ComplexMatrix, ub: &ComplexMatrix) -> DensityMatrix {
    let u = kron(ua, ub);
    let m = matmul(&matmul(&u, rho.matrix()).unwrap(), &dagger(&u)).unwrap();
    validate_density(m.hermitian_part(), rho.dims(), 1e-9).unwrap()
}
