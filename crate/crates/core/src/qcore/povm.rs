use super::context::Context;
use super::matrix::ComplexMatrix;
use super::state::{DensityMatrix, PureState};
use super::DEFAULT_TOL;
use crate::error::{domain, Error, Result};

/// Positive operator-valued measure with labelled outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    name: String,
    labels: Vec<String>,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(name: impl Into<String>, outcomes: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        Self::with_tolerance(name, outcomes, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        name: impl Into<String>,
        outcomes: Vec<(String, ComplexMatrix)>,
        tol: f64,
    ) -> Result<Self> {
        let name = name.into();
        let Some(dim) = outcomes.first().map(|(_, m)| m.dim()) else {
            return Err(domain(format!("POVM `{name}` has no elements")));
        };
        let mut sum = ComplexMatrix::zeros(dim);
        let mut labels = Vec::with_capacity(outcomes.len());
        let mut elements = Vec::with_capacity(outcomes.len());
        for (label, element) in outcomes {
            if element.dim() != dim {
                return Err(domain(format!(
                    "POVM `{name}`: element `{label}` has mismatched dimension"
                )));
            }
            if labels.contains(&label) {
                return Err(domain(format!(
                    "POVM `{name}`: duplicate outcome label `{label}`"
                )));
            }
            if !element.is_hermitian(tol) {
                return Err(Error::InvariantViolation(format!(
                    "POVM `{name}`: element `{label}` is not Hermitian"
                )));
            }
            let (values, _) = element.hermitian_eigen();
            if values.last().is_some_and(|&v| v < -tol) {
                return Err(Error::InvariantViolation(format!(
                    "POVM `{name}`: element `{label}` is not positive semidefinite"
                )));
            }
            sum = &sum + &element;
            labels.push(label);
            elements.push(element);
        }
        if !sum.approx_eq(&ComplexMatrix::identity(dim), tol) {
            return Err(Error::InvariantViolation(format!(
                "POVM `{name}`: elements do not sum to the identity"
            )));
        }
        Ok(Self {
            name,
            labels,
            elements,
        })
    }

    /// Projective measurement onto the basis of `context`, one label per vector.
    pub fn projective(
        name: impl Into<String>,
        context: &Context,
        labels: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        if labels.len() != context.dim() {
            return Err(domain(format!(
                "POVM `{name}`: {} labels for a basis of {} vectors",
                labels.len(),
                context.dim()
            )));
        }
        let outcomes = labels
            .into_iter()
            .zip(context.basis())
            .map(|(l, v)| (l, v.projector()))
            .collect();
        Self::new(name, outcomes)
    }

    /// Spin measurement along the Bloch direction `(theta, phi)`, with
    /// outcomes `"{name}+"` (aligned) and `"{name}-"` (anti-aligned).
    pub fn qubit_axis(name: impl Into<String>, theta: f64, phi: f64) -> Result<Self> {
        let name = name.into();
        let context = Context::qubit_axis(theta, phi)?;
        let labels = vec![format!("{name}+"), format!("{name}-")];
        Self::projective(name, &context, labels)
    }

    pub fn pauli_x() -> Self {
        Self::qubit_axis("x", std::f64::consts::FRAC_PI_2, 0.0).expect("valid axis")
    }

    pub fn pauli_y() -> Self {
        Self::qubit_axis(
            "y",
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_2,
        )
        .expect("valid axis")
    }

    pub fn pauli_z() -> Self {
        Self::qubit_axis("z", 0.0, 0.0).expect("valid axis")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element(&self, label: &str) -> Result<&ComplexMatrix> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.elements[i])
            .ok_or_else(|| Error::Lookup(format!("POVM `{}` has no outcome `{label}`", self.name)))
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (&str, &ComplexMatrix)> {
        self.labels.iter().map(String::as_str).zip(&self.elements)
    }
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Generalized Born rule `tr(ρ E_k)`, clamped to `[0, 1]`.
pub fn born_probability(rho: &DensityMatrix, m: &Povm, k: &str) -> Result<f64> {
    let element = m.element(k)?;
    if rho.dim() != m.dim() {
        return Err(domain(format!(
            "state dimension {} does not match POVM `{}` dimension {}",
            rho.dim(),
            m.name(),
            m.dim()
        )));
    }
    Ok(clamp_probability((rho.matrix() * element).trace().re))
}

/// Born rule for a pure state, `⟨ψ|E_k|ψ⟩`, without forming the projector.
pub fn born_probability_pure(psi: &PureState, m: &Povm, k: &str) -> Result<f64> {
    let element = m.element(k)?;
    if psi.dim() != m.dim() {
        return Err(domain(format!(
            "state dimension {} does not match POVM `{}` dimension {}",
            psi.dim(),
            m.name(),
            m.dim()
        )));
    }
    Ok(clamp_probability(element.expectation(psi.amplitudes()).re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{density_from_pure, pure_from_bloch};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn axis_state(theta: f64, phi: f64) -> PureState {
        pure_from_bloch(theta, phi).unwrap()
    }

    #[test]
    fn z_eigenstate_has_certain_outcome() {
        let rho = density_from_pure(&axis_state(0.0, 0.0));
        let z = Povm::pauli_z();
        assert!((born_probability(&rho, &z, "z+").unwrap() - 1.0).abs() < 1e-12);
        assert!(born_probability(&rho, &z, "z-").unwrap().abs() < 1e-12);
    }

    #[test]
    fn z_state_in_x_basis_is_even() {
        let rho = density_from_pure(&axis_state(0.0, 0.0));
        let x = Povm::pauli_x();
        assert!((born_probability(&rho, &x, "x+").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_isotropic() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        for (theta, phi) in [(0.3, 1.1), (FRAC_PI_2, 0.0), (2.0, -0.7), (PI, 0.0)] {
            let m = Povm::qubit_axis("n", theta, phi).unwrap();
            for label in m.labels() {
                assert!((born_probability(&rho, &m, label).unwrap() - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unknown_label_is_lookup_error() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let err = born_probability(&rho, &Povm::pauli_z(), "x+").unwrap_err();
        assert!(matches!(err, Error::Lookup(_)));
    }

    #[test]
    fn dimension_mismatch_is_domain_error() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(
            born_probability(&rho, &Povm::pauli_z(), "z+"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let half = ComplexMatrix::identity(2).scale(0.4);
        let err =
            Povm::new("bad", vec![("a".into(), half.clone()), ("b".into(), half)]).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(_)));
    }

    #[test]
    fn trine_povm_is_accepted() {
        // Three-outcome symmetric POVM: (2/3)|ψ_k⟩⟨ψ_k| for Bloch directions 120° apart.
        let outcomes = (0..3)
            .map(|k| {
                let theta = FRAC_PI_2;
                let phi = 2.0 * PI * k as f64 / 3.0;
                (
                    format!("t{k}"),
                    axis_state(theta, phi).projector().scale(2.0 / 3.0),
                )
            })
            .collect();
        let trine = Povm::new("trine", outcomes).unwrap();
        let rho = density_from_pure(&axis_state(0.0, 0.0));
        let total: f64 = trine
            .labels()
            .iter()
            .map(|l| born_probability(&rho, &trine, l).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
