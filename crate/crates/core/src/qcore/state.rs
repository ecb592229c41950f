use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::DEFAULT_TOL;
use crate::error::{domain, Error, Result};

/// Amplitudes below this magnitude are treated as vanishing when choosing
/// the canonical global phase.
const PHASE_EPS: f64 = 1e-12;

/// Normalized state vector with canonical global phase: the first
/// non-vanishing amplitude is real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts amplitudes whose squared norm is 1 within the default tolerance.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, DEFAULT_TOL)
    }

    pub fn with_tolerance(amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(domain("state vector must have positive dimension"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol {
            return Err(domain(format!(
                "state vector is not normalized (|ψ|² = {norm_sq})"
            )));
        }
        Ok(Self::canonical(amplitudes))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > PHASE_EPS) || !norm.is_finite() {
            return Err(domain("cannot normalize a zero vector"));
        }
        Ok(Self::canonical(
            amplitudes.into_iter().map(|a| a / norm).collect(),
        ))
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(domain(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: amps })
    }

    fn canonical(mut amplitudes: Vec<Complex64>) -> Self {
        if let Some(lead) = amplitudes.iter().find(|a| a.norm() > PHASE_EPS).copied() {
            let phase = lead.conj() / lead.norm();
            for a in &mut amplitudes {
                *a *= phase;
            }
            // The leading amplitude is real by construction; drop the roundoff.
            if let Some(first) = amplitudes.iter_mut().find(|a| a.norm() > PHASE_EPS) {
                *first = Complex64::new(first.norm(), 0.0);
            }
        }
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(domain(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOL)
    }

    /// Validates the density-matrix invariants with a caller-chosen tolerance.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_hermitian(tol) {
            return Err(Error::InvariantViolation("matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvariantViolation(format!(
                "trace is {tr}, expected 1"
            )));
        }
        let (values, _) = matrix.hermitian_eigen();
        if let Some(&min) = values.last() {
            if min < -tol {
                return Err(Error::InvariantViolation(format!(
                    "matrix has negative eigenvalue {min}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Skips validation; callers guarantee the invariants (convex
    /// combinations and projectors of valid inputs).
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `I/d`
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(domain("dimension must be positive"));
        }
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }
}
