//! Quantum entropic causal inference.
//!
//! Given the joint density matrix of two quantum subsystems, decide whether
//! `A` causes `B` or `B` causes `A` by comparing the entropy of the simplest
//! structural model in each direction: the entropy of the cause plus the
//! entropy of the smallest exogenous variable that reproduces every
//! conditional state of the effect.
//!
//! ```
//! use qeci::{channels::qsc_computational, causal::{qeci_infer, Direction}};
//!
//! let rho = qsc_computational(0.4, 0.05).unwrap();
//! let verdict = qeci_infer(&rho, 1e-9).unwrap();
//! assert_eq!(verdict.direction, Direction::AtoB);
//! assert!((verdict.s_forward - 1.2573).abs() < 1e-4);
//! ```

pub mod causal;
pub mod channels;
pub mod classicalmap;
pub mod cli;
pub mod coupling;
pub mod density;
pub mod error;
pub mod io;
pub mod linalg;

pub use causal::{classical_eci, qeci_infer, CausalVerdict, Direction, JointDistribution};
pub use coupling::{greedy_min_entropy_coupling, CouplingResult, MarginalSet};
pub use density::{instance_conditional, star_product, validate_density, DensityMatrix, PureState};
pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix, Subsystem};
