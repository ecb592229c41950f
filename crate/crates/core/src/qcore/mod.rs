//! Dense complex linear algebra for single finite-dimensional quantum systems.
//!
//! Everything here is an immutable value; all operations are pure functions.
//! Invariant checks use an absolute tolerance of [`DEFAULT_TOL`] unless a
//! `with_tolerance` constructor is used.

mod bloch;
mod context;
mod entropy;
mod matrix;
mod povm;
mod state;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

pub use bloch::{bloch_vector, BlochVector};
pub use context::{eigen_context, Context, EigenContext};
pub use entropy::{shannon_entropy, von_neumann_entropy};
pub use matrix::ComplexMatrix;
pub use povm::{born_probability, born_probability_pure, Povm};
pub use state::{DensityMatrix, PureState};

use crate::error::{domain, Result};

/// Default absolute tolerance for invariant checks and equality.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Qubit state at Bloch polar angle `theta` and azimuth `phi`:
/// `(cos θ/2, e^{iφ} sin θ/2)`, canonical phase.
pub fn pure_from_bloch(theta: f64, phi: f64) -> Result<PureState> {
    if !(0.0..=PI).contains(&theta) {
        return Err(domain(format!("polar angle {theta} outside [0, π]")));
    }
    if !phi.is_finite() {
        return Err(domain("azimuth must be finite"));
    }
    let phi = phi.rem_euclid(TAU);
    let (s, c) = (theta / 2.0).sin_cos();
    PureState::new(vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)])
}

/// Rank-one projector `|ψ⟩⟨ψ|`.
///
/// A `PureState` is normalized by construction, so the non-normalized case
/// is rejected earlier, by [`PureState::new`].
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_trusted(psi.projector())
}

/// Convex combination `Σ wᵢ ρᵢ`.
pub fn mix(components: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    mix_with_tolerance(components, DEFAULT_TOL)
}

pub fn mix_with_tolerance(components: &[(f64, DensityMatrix)], tol: f64) -> Result<DensityMatrix> {
    let Some((_, first)) = components.first() else {
        return Err(domain("mixture needs at least one component"));
    };
    let dim = first.dim();
    let mut total = 0.0;
    for (w, rho) in components {
        if !(*w >= 0.0) || !w.is_finite() {
            return Err(domain(format!(
                "mixture weight {w} is negative or not finite"
            )));
        }
        if rho.dim() != dim {
            return Err(domain(format!(
                "mixture components have dimensions {dim} and {}",
                rho.dim()
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > tol {
        return Err(domain(format!(
            "mixture weights sum to {total}, expected 1"
        )));
    }
    let acc = components
        .iter()
        .fold(ComplexMatrix::zeros(dim), |acc, (w, rho)| {
            &acc + &rho.matrix().scale(*w)
        });
    DensityMatrix::with_tolerance(acc, tol)
}

/// Result of the density-matrix overlap test `tr(ρ₁ρ₂) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    /// `tr(ρ₁ρ₂)`, clamped to `[0, 1]`.
    pub value: f64,
    /// `value < 1e-9`.
    pub disjoint: bool,
}

/// Threshold below which `tr(ρ₁ρ₂)` counts as zero.
pub const OVERLAP_ZERO_TOL: f64 = 1e-9;

/// `tr(ρ₁ρ₂)` and the zero test. For positive semidefinite operators
/// `tr(ρ₁ρ₂) = 0` exactly when `ρ₁ρ₂ = 0`; for pure states the value is
/// `|⟨ψ₁|ψ₂⟩|²`.
pub fn trace_overlap(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<Overlap> {
    if rho1.dim() != rho2.dim() {
        return Err(domain(format!(
            "overlap of states with dimensions {} and {}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    let value = (rho1.matrix() * rho2.matrix()).trace().re.clamp(0.0, 1.0);
    Ok(Overlap {
        value,
        disjoint: value < OVERLAP_ZERO_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::f64::consts::FRAC_PI_2;

    fn zp() -> PureState {
        pure_from_bloch(0.0, 0.0).unwrap()
    }
    fn zm() -> PureState {
        pure_from_bloch(PI, 0.0).unwrap()
    }
    fn xp() -> PureState {
        pure_from_bloch(FRAC_PI_2, 0.0).unwrap()
    }
    fn real_matrix(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    /// Eigenvalues of a real symmetric 2×2 `[[a, b], [b, d]]` in closed form.
    fn sym2_eigenvalues(a: f64, b: f64, d: f64) -> (f64, f64) {
        let mean = (a + d) / 2.0;
        let radius = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        (mean + radius, mean - radius)
    }

    fn binary_entropy(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn bloch_poles_and_equator() {
        let s = 0.5f64.sqrt();
        assert!(zp().approx_eq(
            &PureState::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap(),
            1e-15
        ));
        let down = zm();
        assert!(down.amplitudes()[0].norm() < 1e-15);
        assert!((down.amplitudes()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let plus = xp();
        assert!((plus.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((plus.amplitudes()[1] - Complex64::new(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn azimuth_is_reduced_modulo_two_pi() {
        let a = pure_from_bloch(1.0, 0.3).unwrap();
        let b = pure_from_bloch(1.0, 0.3 + 4.0 * PI).unwrap();
        let c = pure_from_bloch(1.0, 0.3 - TAU).unwrap();
        assert!(a.approx_eq(&b, 1e-12) && a.approx_eq(&c, 1e-12));
    }

    #[test]
    fn polar_angle_out_of_range_is_domain_error() {
        assert!(matches!(pure_from_bloch(-0.1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            pure_from_bloch(PI + 1e-6, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn projectors_of_basis_states() {
        let up = density_from_pure(&zp());
        assert!(up
            .matrix()
            .approx_eq(&real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]), 1e-15));
        let plus = density_from_pure(&xp());
        assert!(plus
            .matrix()
            .approx_eq(&real_matrix(&[&[0.5, 0.5], &[0.5, 0.5]]), 1e-15));
        let sq = plus.matrix() * plus.matrix();
        assert!(sq.approx_eq(plus.matrix(), 1e-12));
        assert!((plus.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_states_have_zero_entropy() {
        for (theta, phi) in [(0.0, 0.0), (0.7, 2.1), (FRAC_PI_2, 4.0), (PI, 0.0)] {
            let rho = density_from_pure(&pure_from_bloch(theta, phi).unwrap());
            assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn mixing_examples() {
        let up = density_from_pure(&zp());
        assert!(mix(&[(1.0, up.clone())]).unwrap().approx_eq(&up, 1e-15));

        let even = mix(&[(0.5, up.clone()), (0.5, density_from_pure(&zm()))]).unwrap();
        assert!(even.approx_eq(&DensityMatrix::maximally_mixed(2).unwrap(), 1e-12));

        // Entry-wise: ½·diag(1, 0) + ½·[[½, ½], [½, ½]].
        let oracle = real_matrix(&[&[0.5 * 1.0 + 0.5 * 0.5, 0.5 * 0.5], &[0.5 * 0.5, 0.5 * 0.5]]);
        let d = mix(&[(0.5, up), (0.5, density_from_pure(&xp()))]).unwrap();
        assert!(d.matrix().approx_eq(&oracle, 1e-12));
        assert!(oracle.approx_eq(&real_matrix(&[&[0.75, 0.25], &[0.25, 0.25]]), 0.0));
    }

    #[test]
    fn mixing_errors() {
        let up = density_from_pure(&zp());
        assert!(matches!(
            mix(&[(0.6, up.clone()), (0.6, up.clone())]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mix(&[
                (0.5, up.clone()),
                (0.5, DensityMatrix::maximally_mixed(3).unwrap())
            ]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mix(&[(-0.5, up.clone()), (1.5, up)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(mix(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn entropy_of_pole_equator_mixture_matches_closed_form() {
        let (l1, l2) = sym2_eigenvalues(0.75, 0.25, 0.25);
        let s = 0.5f64.sqrt();
        assert!((l1 - (1.0 + s) / 2.0).abs() < 1e-15 && (l2 - (1.0 - s) / 2.0).abs() < 1e-15);
        let oracle = binary_entropy(l1);
        assert!((oracle - 0.600876).abs() < 1e-6);

        let rho = DensityMatrix::new(real_matrix(&[&[0.75, 0.25], &[0.25, 0.25]])).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let up = density_from_pure(&zp());
        let down = density_from_pure(&zm());
        let plus = density_from_pure(&xp());

        let o = trace_overlap(&up, &down).unwrap();
        assert!(o.disjoint && o.value.abs() < 1e-15);

        // |⟨z+|x+⟩|² with ⟨z+|x+⟩ = 1/√2.
        let ip = zp().inner(&xp()).unwrap().norm_sqr();
        let o = trace_overlap(&up, &plus).unwrap();
        assert!(!o.disjoint && (o.value - ip).abs() < 1e-12 && (ip - 0.5).abs() < 1e-12);

        assert!((trace_overlap(&plus, &plus).unwrap().value - 1.0).abs() < 1e-12);
        assert!(trace_overlap(&up, &DensityMatrix::maximally_mixed(3).unwrap()).is_err());
    }

    #[test]
    fn eigen_axis_of_pole_equator_mixture() {
        let rho = DensityMatrix::new(real_matrix(&[&[0.75, 0.25], &[0.25, 0.25]])).unwrap();
        let eig = eigen_context(&rho);
        assert!(!eig.degenerate);
        // Bloch vector (½, 0, ½) normalizes to polar angle π/4.
        let r = BlochVector::new(0.5, 0.0, 0.5);
        let oracle = r.z.atan2(r.x.hypot(r.y));
        let top = bloch_vector(&density_from_pure(&eig.context.basis()[0])).unwrap();
        let (theta, phi) = top.spherical_angles().unwrap();
        assert!((theta - (FRAC_PI_2 - oracle)).abs() < 1e-12);
        assert!((theta - PI / 4.0).abs() < 1e-12);
        assert!(phi.abs() < 1e-12);
    }

    #[test]
    fn bloch_of_pole_equator_mixture() {
        let up = density_from_pure(&zp());
        let plus = density_from_pure(&xp());
        let rho = mix(&[(0.5, up.clone()), (0.5, plus.clone())]).unwrap();
        let a = bloch_vector(&up).unwrap();
        let b = bloch_vector(&plus).unwrap();
        let oracle = BlochVector::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y), 0.5 * (a.z + b.z));
        let r = bloch_vector(&rho).unwrap();
        assert!(r.approx_eq(oracle, 1e-12));
        assert!(r.approx_eq(BlochVector::new(0.5, 0.0, 0.5), 1e-12));
        assert!(r.to_density().unwrap().approx_eq(&rho, 1e-12));
    }
}
