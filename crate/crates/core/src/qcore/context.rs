use num_complex::Complex64;

use super::state::{DensityMatrix, PureState};
use super::{pure_from_bloch, DEFAULT_TOL};
use crate::error::{domain, Result};

/// Ordered orthonormal basis, i.e. the propositions about one observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    basis: Vec<PureState>,
}

impl Context {
    pub fn new(basis: Vec<PureState>) -> Result<Self> {
        Self::with_tolerance(basis, DEFAULT_TOL)
    }

    pub fn with_tolerance(basis: Vec<PureState>, tol: f64) -> Result<Self> {
        let dim = basis.first().map(PureState::dim).unwrap_or(0);
        if dim == 0 {
            return Err(domain("a context needs at least one basis vector"));
        }
        if basis.len() != dim || basis.iter().any(|v| v.dim() != dim) {
            return Err(domain(format!(
                "a context in dimension {dim} needs exactly {dim} vectors of that dimension"
            )));
        }
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                let ip = a.inner(b)?.norm();
                if ip > tol {
                    return Err(domain(format!(
                        "basis vectors are not orthogonal (|⟨a|b⟩| = {ip})"
                    )));
                }
            }
        }
        Ok(Self { basis })
    }

    /// The computational basis `|0⟩, …, |d−1⟩`.
    pub fn computational(dim: usize) -> Result<Self> {
        let basis = (0..dim)
            .map(|i| PureState::basis(dim, i))
            .collect::<Result<_>>()?;
        Self::new(basis)
    }

    /// Qubit basis `{ψ(θ, φ), ψ(π − θ, φ + π)}`: spin up and down along a
    /// Bloch direction.
    pub fn qubit_axis(theta: f64, phi: f64) -> Result<Self> {
        let up = pure_from_bloch(theta, phi)?;
        let down = pure_from_bloch(std::f64::consts::PI - theta, phi + std::f64::consts::PI)?;
        Self::new(vec![up, down])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }
}

/// Eigenbasis of a density matrix ordered by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenContext {
    pub context: Context,
    /// Eigenvalues aligned with `context`, clamped to `[0, 1]`.
    pub eigenvalues: Vec<f64>,
    /// Set when two eigenvalues lie closer than the gap tolerance, in which
    /// case the basis of each degenerate block was completed canonically.
    pub degenerate: bool,
}

/// Eigenvalues of `rho` clamped to `[0, 1]`, descending.
pub(crate) fn clamped_eigenvalues(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

/// Privileged context of `rho`: an orthonormal eigenbasis, descending by
/// eigenvalue.
///
/// Inside a degenerate block (adjacent eigenvalues within `1e-9`) the solver's
/// vectors are replaced by a canonical basis of the same eigenspace: the
/// computational basis vectors are projected onto it and orthonormalized
/// greedily, always taking the candidate with the largest remaining norm
/// (lowest index on ties). The result depends only on `rho`.
pub fn eigen_context(rho: &DensityMatrix) -> EigenContext {
    const GAP_TOL: f64 = 1e-9;

    let dim = rho.dim();
    let (values, vectors) = rho.matrix().hermitian_eigen();

    let mut blocks: Vec<std::ops::Range<usize>> = Vec::new();
    let mut start = 0;
    for i in 1..=dim {
        if i == dim || values[i - 1] - values[i] >= GAP_TOL {
            blocks.push(start..i);
            start = i;
        }
    }
    let degenerate = blocks.iter().any(|b| b.len() > 1);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for block in blocks {
        if block.len() == 1 {
            basis.push(vectors[block.start].clone());
        } else {
            basis.extend(canonical_block_basis(&vectors[block], dim));
        }
    }

    let basis = basis
        .into_iter()
        .map(|v| PureState::normalized(v).expect("eigenvectors are non-zero"))
        .collect();
    EigenContext {
        context: Context { basis },
        eigenvalues: clamped_eigenvalues(&values),
        degenerate,
    }
}

fn canonical_block_basis(span: &[Vec<Complex64>], dim: usize) -> Vec<Vec<Complex64>> {
    let project = |v: &[Complex64], onto: &[Vec<Complex64>]| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for u in onto {
            let coeff: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            for (o, a) in out.iter_mut().zip(u) {
                *o += coeff * a;
            }
        }
        out
    };
    let norm = |v: &[Complex64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();

    let mut chosen: Vec<Vec<Complex64>> = Vec::with_capacity(span.len());
    let mut used = vec![false; dim];
    while chosen.len() < span.len() {
        let mut best: Option<(usize, Vec<Complex64>, f64)> = None;
        for j in (0..dim).filter(|&j| !used[j]) {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[j] = Complex64::new(1.0, 0.0);
            let in_space = project(&e, span);
            let taken = project(&in_space, &chosen);
            let residual: Vec<Complex64> =
                in_space.iter().zip(&taken).map(|(a, b)| a - b).collect();
            let n = norm(&residual);
            if best.as_ref().is_none_or(|(_, _, bn)| n > *bn + 1e-12) {
                best = Some((j, residual, n));
            }
        }
        let (j, residual, n) =
            best.expect("eigenspace dimension never exceeds the ambient dimension");
        used[j] = true;
        chosen.push(residual.into_iter().map(|a| a / n).collect());
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{ComplexMatrix, DensityMatrix};

    #[test]
    fn diagonal_matrix_gives_computational_basis() {
        let rho =
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.8, 0.0], &[0.0, 0.2]]).unwrap())
                .unwrap();
        let eig = eigen_context(&rho);
        assert!(!eig.degenerate);
        let comp = Context::computational(2).unwrap();
        for (a, b) in eig.context.basis().iter().zip(comp.basis()) {
            assert!(a.approx_eq(b, 1e-12));
        }
        assert!((eig.eigenvalues[0] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn ascending_diagonal_is_reordered() {
        let rho =
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.3, 0.0], &[0.0, 0.7]]).unwrap())
                .unwrap();
        let eig = eigen_context(&rho);
        assert!(eig.context.basis()[0].approx_eq(&PureState::basis(2, 1).unwrap(), 1e-12));
    }

    #[test]
    fn maximally_mixed_is_flagged_and_canonical() {
        for dim in 2..=4 {
            let eig = eigen_context(&DensityMatrix::maximally_mixed(dim).unwrap());
            assert!(eig.degenerate);
            let comp = Context::computational(dim).unwrap();
            for (a, b) in eig.context.basis().iter().zip(comp.basis()) {
                assert!(a.approx_eq(b, 1e-12), "dim {dim}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn partially_degenerate_block_is_orthonormal() {
        // diag(0.5, 0.25, 0.25) rotated so the degenerate block is not axis-aligned.
        let s = 0.5f64.sqrt();
        let basis = [[1.0, 0.0, 0.0], [0.0, s, s], [0.0, s, -s]];
        let weights = [0.5, 0.25, 0.25];
        let mut m = ComplexMatrix::zeros(3);
        for (w, v) in weights.iter().zip(basis) {
            let v: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            m = &m + &ComplexMatrix::outer(&v, &v).scale(*w);
        }
        let eig = eigen_context(&DensityMatrix::new(m).unwrap());
        assert!(eig.degenerate);
        assert!(Context::new(eig.context.basis().to_vec()).is_ok());
        assert!(eig.context.basis()[1].approx_eq(&PureState::basis(3, 1).unwrap(), 1e-12));
    }

    #[test]
    fn non_orthogonal_basis_is_rejected() {
        let a = PureState::basis(2, 0).unwrap();
        let b = pure_from_bloch(1.0, 0.0).unwrap();
        assert!(Context::new(vec![a, b]).is_err());
    }
}
