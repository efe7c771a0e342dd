//! Finite-dimensional C*-algebra arithmetic over `M_n(C)`.
//!
//! The norm is the operator norm, the involution is the conjugate transpose
//! and the order is the Löwner order. Every spectral question is answered by
//! a single deterministic Hermitian eigenvalue kernel.

mod element;
mod spectral;
pub mod text;

pub use element::{AlgebraElement, ComplexScalar};

use crate::error::{Error, Result};

pub const DEFAULT_POS_TOL: f64 = 1e-9;
pub const DEFAULT_HERM_TOL: f64 = 1e-9;
pub const DEFAULT_CONV_TOL: f64 = 1e-10;

/// Numerical tolerances shared by the order predicates and the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pos_tol: f64,
    herm_tol: f64,
    conv_tol: f64,
}

impl ToleranceConfig {
    pub fn new(pos_tol: f64, herm_tol: f64, conv_tol: f64) -> Result<Self> {
        let unit_interval = |v: f64| v.is_finite() && (0.0..1.0).contains(&v);
        if !unit_interval(pos_tol) {
            return Err(Error::InvalidInput(format!("pos_tol must lie in [0, 1), got {pos_tol}")));
        }
        if !unit_interval(herm_tol) {
            return Err(Error::InvalidInput(format!("herm_tol must lie in [0, 1), got {herm_tol}")));
        }
        if !(conv_tol.is_finite() && conv_tol > 0.0) {
            return Err(Error::InvalidInput(format!("conv_tol must be positive, got {conv_tol}")));
        }
        Ok(Self { pos_tol, herm_tol, conv_tol })
    }

    /// Relative eigenvalue floor for positivity.
    pub fn pos_tol(&self) -> f64 {
        self.pos_tol
    }

    /// Relative Hermitian asymmetry bound.
    pub fn herm_tol(&self) -> f64 {
        self.herm_tol
    }

    /// Solver target on the residual norm.
    pub fn conv_tol(&self) -> f64 {
        self.conv_tol
    }

    pub fn with_conv_tol(self, conv_tol: f64) -> Result<Self> {
        Self::new(self.pos_tol, self.herm_tol, conv_tol)
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            pos_tol: DEFAULT_POS_TOL,
            herm_tol: DEFAULT_HERM_TOL,
            conv_tol: DEFAULT_CONV_TOL,
        }
    }
}

pub fn operator_norm(m: &AlgebraElement) -> f64 {
    m.operator_norm()
}

pub fn is_positive(m: &AlgebraElement, tol: &ToleranceConfig) -> bool {
    m.is_positive(tol)
}

pub fn loewner_leq(p: &AlgebraElement, q: &AlgebraElement, tol: &ToleranceConfig) -> Result<bool> {
    p.loewner_leq(q, tol)
}

pub fn conjugate_sandwich(a: &AlgebraElement, d: &AlgebraElement) -> Result<AlgebraElement> {
    AlgebraElement::conjugate_sandwich(a, d)
}
