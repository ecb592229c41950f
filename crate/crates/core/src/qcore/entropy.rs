use super::context::clamped_eigenvalues;
use super::state::DensityMatrix;
use crate::error::{Error, Result};

/// Eigenvalues below this are an invariant violation rather than roundoff.
const NEGATIVE_EIGENVALUE_FLOOR: f64 = -1e-6;

/// Shannon entropy in bits, with `0 log 0 = 0`. Negative entries count as 0.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// `−Σ λᵢ log₂ λᵢ` over the eigenvalues of `rho`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let (values, _) = rho.matrix().hermitian_eigen();
    if let Some(&min) = values.last() {
        if min < NEGATIVE_EIGENVALUE_FLOOR {
            return Err(Error::InvariantViolation(format!(
                "density matrix has eigenvalue {min} below {NEGATIVE_EIGENVALUE_FLOOR}"
            )));
        }
    }
    let max = (rho.dim() as f64).log2();
    Ok(shannon_entropy(&clamped_eigenvalues(&values)).min(max))
}
