//! Numerical lab for the scalar inequalities behind the counting bounds:
//! discrete convolution checks on the cube, the three-variable boundary
//! inequality, the critical-point systems, and the elementary lemma used by
//! the energy bound.

pub mod cube;
pub mod exponents;
pub mod kfold;
pub mod roots;
pub mod scalar;

pub use cube::{
    check_po, conv3, conv3_at_ones, l2_conv_check, tensor_check, CubeFunction, L2ConvCheck,
    PoCheck, TensorCheck,
};
pub use exponents::{p_k, Exponents};
pub use kfold::{solve_kfold_system, KfoldSolution, KfoldSystemReport};
pub use roots::{solve_critical_points, solve_x1, CriticalPoint, CriticalPointReport, X1Report};
pub use scalar::{
    fpx, lemma_elem_gap, lhs_abc, sweep_lemma_gap, verify_abc, AbcSweep, EqualityWitness, FaceMax,
    GapSweep,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("argument {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("{op} supports dimension at most {cap}, got {dim}")]
    Guard {
        op: &'static str,
        dim: usize,
        cap: usize,
    },
    #[error("functions must share a dimension ({expected} vs {got})")]
    DimMismatch { expected: usize, got: usize },
    #[error("values must be finite")]
    NonFinite,
    #[error("target vector entries must lie in 0..=3")]
    BadTarget,
    #[error("step {step} outside (0, {max}]")]
    BadStep { step: f64, max: f64 },
    #[error("root search failed to converge: {what}")]
    Convergence { what: &'static str },
    #[error("k-fold system needs a, b >= 1 with a + b = k and 3 <= k <= 6")]
    BadSystem,
}
