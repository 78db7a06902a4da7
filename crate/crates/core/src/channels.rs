//! Joint density matrices produced by sending one half of a correlated
//! two-qubit state through a noisy channel.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with subsystem A first.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::density::{validate_density, DensityMatrix, DENSITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{kron_vec, Complex, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// Bit flips on computational-basis correlations.
    Qsc,
    /// Flips between the Hadamard-basis states `|±⟩`.
    Gqsc,
    /// Depolarizing noise on a mixture of two entangled pure states.
    Depolarizing,
    /// Bit flips on `½(|00⟩⟨00| + |11⟩⟨11|)`.
    Bitflip,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Qsc => "qsc",
            ChannelKind::Gqsc => "gqsc",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::Bitflip => "bitflip",
        }
    }
}

/// Real amplitudes `(γ, λ)` of the state `γ|0⟩ + λ|1⟩`.
pub type PureParams = (f64, f64);

/// A channel experiment at one error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub q: f64,
    pub p: f64,
    pub c1: PureParams,
    pub c2: PureParams,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, q: f64, p: f64) -> Self {
        Self {
            kind,
            q,
            p,
            c1: (0.6, 0.8),
            c2: (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        }
    }

    pub fn with_p(self, p: f64) -> Self {
        Self { p, ..self }
    }

    pub fn build(&self) -> Result<DensityMatrix> {
        match self.kind {
            ChannelKind::Qsc => qsc_computational(self.q, self.p),
            ChannelKind::Gqsc => qsc_hadamard(self.q, self.p),
            ChannelKind::Depolarizing => depolarizing_mixture(self.q, self.c1, self.c2, self.p),
            ChannelKind::Bitflip => bitflip_entangled(self.p),
        }
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

fn check_pure_params((gamma, lambda): PureParams) -> Result<()> {
    let norm = gamma * gamma + lambda * lambda;
    if !norm.is_finite() || (norm - 1.0).abs() > DENSITY_TOL {
        return Err(Error::NotNormalized {
            norm: norm.sqrt(),
            tol: DENSITY_TOL,
        });
    }
    Ok(())
}

/// `Σ w_k |ψ_k⟩⟨ψ_k|` over real kets.
fn mixture(terms: &[(f64, [f64; 4])]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (w, ket) in terms {
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] += Complex::new(w * ket[i] * ket[j], 0.0);
            }
        }
    }
    m
}

fn two_qubit(m: ComplexMatrix) -> Result<DensityMatrix> {
    validate_density(m, &[2, 2], DENSITY_TOL)
}

/// Weights of `|a_i b_j⟩` when B is a copy of A flipped with probability `p`,
/// and A is in its first state with probability `q`.
fn symmetric_weights(q: f64, p: f64) -> [f64; 4] {
    [
        q * (1.0 - p),
        q * p,
        (1.0 - q) * p,
        (1.0 - q) * (1.0 - p),
    ]
}

pub fn qsc_computational(q: f64, p: f64) -> Result<DensityMatrix> {
    check_probability("q", q)?;
    check_probability("p", p)?;
    two_qubit(ComplexMatrix::from_real_diagonal(&symmetric_weights(q, p)))
}

pub fn qsc_hadamard(q: f64, p: f64) -> Result<DensityMatrix> {
    check_probability("q", q)?;
    check_probability("p", p)?;
    let plus = [Complex::new(FRAC_1_SQRT_2, 0.0), Complex::new(FRAC_1_SQRT_2, 0.0)];
    let minus = [Complex::new(FRAC_1_SQRT_2, 0.0), Complex::new(-FRAC_1_SQRT_2, 0.0)];
    let w = symmetric_weights(q, p);
    let pairs = [(&plus, &plus), (&plus, &minus), (&minus, &plus), (&minus, &minus)];
    let mut m = ComplexMatrix::zeros(4, 4);
    for (weight, (a, b)) in w.iter().zip(pairs) {
        let ket = kron_vec(a, b);
        m = m.add(&ComplexMatrix::outer(&ket).scale_real(*weight))?;
    }
    two_qubit(m)
}

/// One entangled component `γ²|00⟩ + γλ|01⟩ + γλ|10⟩ + λ²|11⟩` after B passes a
/// depolarizing channel: weight `1 − p` untouched, `p/3` on each Pauli image.
pub fn depolarizing_component(gamma: f64, lambda: f64, p: f64) -> Result<DensityMatrix> {
    check_pure_params((gamma, lambda))?;
    check_probability("p", p)?;
    let (g2, gl, l2) = (gamma * gamma, gamma * lambda, lambda * lambda);
    let terms = [
        (1.0 - p, [g2, gl, gl, l2]),
        // phase flip on B
        (p / 3.0, [g2, -gl, gl, -l2]),
        // bit flip on B
        (p / 3.0, [gl, g2, l2, gl]),
        // bit and phase flip on B
        (p / 3.0, [-gl, g2, -l2, gl]),
    ];
    two_qubit(mixture(&terms))
}

/// `q ρ^{c1} + (1 − q) ρ^{c2}` of two depolarized components.
pub fn depolarizing_mixture(q: f64, c1: PureParams, c2: PureParams, p: f64) -> Result<DensityMatrix> {
    check_probability("q", q)?;
    let first = depolarizing_component(c1.0, c1.1, p)?;
    let second = depolarizing_component(c2.0, c2.1, p)?;
    let m = first
        .matrix()
        .scale_real(q)
        .add(&second.matrix().scale_real(1.0 - q))?;
    two_qubit(m)
}

/// `½(1−p)(|00⟩⟨00| + |11⟩⟨11|) + ½p(|01⟩⟨01| + |10⟩⟨10|)`.
pub fn bitflip_entangled(p: f64) -> Result<DensityMatrix> {
    check_probability("p", p)?;
    let keep = 0.5 * (1.0 - p);
    let flip = 0.5 * p;
    two_qubit(ComplexMatrix::from_real_diagonal(&[keep, flip, flip, keep]))
}

/// Exogenous state `½ diag(1−p, p, p, 1−p)` of the bit-flip structural equation.
pub fn bitflip_exogenous(p: f64) -> Result<DensityMatrix> {
    bitflip_entangled(p)
}
