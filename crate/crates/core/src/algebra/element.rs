use std::fmt;

use num_complex::Complex64;

use super::spectral::hermitian_spectrum;
use super::ToleranceConfig;
use crate::error::{Error, Result};

/// Scalar field of the algebra.
pub type ComplexScalar = Complex64;

/// An element of the full matrix algebra `M_n(C)`: an `n x n` complex
/// matrix, stored row-major, with every entry finite.
///
/// Elements are immutable values. Arithmetic that can overflow returns a
/// `Result` so that non-finite entries never enter the algebra.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement {
    dim: usize,
    entries: Vec<ComplexScalar>,
}

impl AlgebraElement {
    /// Builds an element from `dim * dim` row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<ComplexScalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("algebra dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("algebra element"));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, values: &[f64]) -> Result<Self> {
        Self::from_entries(dim, values.iter().map(|&v| ComplexScalar::new(v, 0.0)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "algebra dimension must be at least 1");
        Self {
            dim,
            entries: vec![ComplexScalar::new(0.0, 0.0); dim * dim],
        }
    }

    /// The unit of the algebra, i.e. the identity matrix.
    pub fn unit(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    /// `c` times the unit. Panics on a non-finite `c`.
    pub fn scalar(dim: usize, c: f64) -> Self {
        assert!(c.is_finite(), "scalar multiple must be finite");
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ComplexScalar::new(c, 0.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut entries = vec![ComplexScalar::new(0.0, 0.0); dim * dim];
        for (i, &v) in values.iter().enumerate() {
            entries[i * dim + i] = ComplexScalar::new(v, 0.0);
        }
        Self::from_entries(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[ComplexScalar] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> ComplexScalar {
        self.entries[row * self.dim + col]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.entries[j * n + i].conj());
            }
        }
        Self { dim: n, entries }
    }

    pub fn scale(&self, c: ComplexScalar) -> Result<Self> {
        Self::from_entries(self.dim, self.entries.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Result<Self> {
        self.scale(ComplexScalar::new(c, 0.0))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_entries(
            self.dim,
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_entries(
            self.dim,
            self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        )
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut entries = vec![ComplexScalar::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.entries[i * n + k];
                if aik == ComplexScalar::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += aik * other.entries[k * n + j];
                }
            }
        }
        Self::from_entries(n, entries)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |m - m*|` over all entries.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = self.entries[i * n + j] - self.entries[j * n + i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn is_exactly_hermitian(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| self.entries[i * n + j] == self.entries[j * n + i].conj()))
    }

    /// Whether `self` is Hermitian up to `herm_tol`, measured relative to
    /// the entry scale: `max |m - m*| <= herm_tol * (1 + max |m|)`.
    pub fn is_hermitian_within(&self, herm_tol: f64) -> bool {
        self.hermitian_asymmetry() <= herm_tol * (1.0 + self.max_abs())
    }

    /// `(m + m*) / 2`.
    pub fn symmetrized(&self) -> Self {
        let n = self.dim;
        let mut entries = self.entries.clone();
        for i in 0..n {
            entries[i * n + i] = ComplexScalar::new(self.entries[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let avg = (self.entries[i * n + j] + self.entries[j * n + i].conj()) * 0.5;
                entries[i * n + j] = avg;
                entries[j * n + i] = avg.conj();
            }
        }
        Self { dim: n, entries }
    }

    /// Spectrum of the symmetrization `(m + m*) / 2`, ascending. Rejects
    /// elements whose asymmetry exceeds `herm_tol` (relative).
    pub fn hermitian_eigenvalues(&self, herm_tol: f64) -> Result<Vec<f64>> {
        let asymmetry = self.hermitian_asymmetry();
        let bound = herm_tol * (1.0 + self.max_abs());
        if asymmetry > bound {
            return Err(Error::NotHermitian { asymmetry, bound });
        }
        Ok(hermitian_spectrum(self.dim, &self.symmetrized().entries))
    }

    /// The C*-norm: largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.is_exactly_hermitian() {
            let eig = hermitian_spectrum(self.dim, &self.entries);
            return eig.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        }
        // m*m is exactly Hermitian in floating point: entry (i,j) and (j,i)
        // are computed from the same products in the same order.
        let gram = self
            .adjoint()
            .checked_mul(self)
            .expect("gram matrix of a finite element overflowed");
        let top = hermitian_spectrum(self.dim, &gram.entries)
            .last()
            .copied()
            .unwrap_or(0.0);
        top.max(0.0).sqrt()
    }

    /// `m >= 0`: Hermitian within `herm_tol` and
    /// `min eig >= -pos_tol * (1 + ||m||)`.
    pub fn is_positive(&self, tol: &ToleranceConfig) -> bool {
        match self.hermitian_eigenvalues(tol.herm_tol()) {
            Ok(eig) => {
                let floor = -tol.pos_tol() * (1.0 + self.operator_norm());
                eig.first().is_none_or(|&min| min >= floor)
            }
            Err(_) => false,
        }
    }

    /// Löwner order `self <= other`, i.e. `other - self >= 0`.
    pub fn loewner_leq(&self, other: &Self, tol: &ToleranceConfig) -> Result<bool> {
        Ok(other.checked_sub(self)?.is_positive(tol))
    }

    /// `a* d a`, evaluated as the three-factor product.
    pub fn conjugate_sandwich(a: &Self, d: &Self) -> Result<Self> {
        a.adjoint().checked_mul(d)?.checked_mul(a)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({})", super::text::format_inline(self))
    }
}
