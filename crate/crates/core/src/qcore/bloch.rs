use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::state::DensityMatrix;
use crate::error::{domain, Result};

/// Cartesian coordinates of a qubit state in the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_pure(self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Polar angle from +z and azimuth in `[0, 2π)`; `None` at the origin.
    pub fn spherical_angles(self) -> Option<(f64, f64)> {
        let r = self.norm();
        if r < 1e-12 {
            return None;
        }
        let theta = (self.z / r).clamp(-1.0, 1.0).acos();
        let mut phi = self.y.atan2(self.x);
        if phi < 0.0 {
            phi += std::f64::consts::TAU;
        }
        if self.x.hypot(self.y) < 1e-12 * r {
            phi = 0.0;
        }
        Some((theta, phi))
    }

    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        (self.x - other.x).abs() <= tol
            && (self.y - other.y).abs() <= tol
            && (self.z - other.z).abs() <= tol
    }

    /// `(I + r·σ)/2`; fails when `|r| > 1 + 1e-9`.
    pub fn to_density(self) -> Result<DensityMatrix> {
        if self.norm() > 1.0 + super::DEFAULT_TOL {
            return Err(domain(format!("Bloch vector has norm {} > 1", self.norm())));
        }
        Ok(DensityMatrix::from_trusted(bloch_matrix(self)))
    }
}

pub(crate) fn bloch_matrix(r: BlochVector) -> ComplexMatrix {
    let half = |v: f64| v / 2.0;
    ComplexMatrix::from_row_major(
        2,
        &[
            Complex64::new(half(1.0 + r.z), 0.0),
            Complex64::new(half(r.x), -half(r.y)),
            Complex64::new(half(r.x), half(r.y)),
            Complex64::new(half(1.0 - r.z), 0.0),
        ],
    )
    .expect("2x2 entries")
}

/// `(tr ρσx, tr ρσy, tr ρσz)` for a qubit density matrix.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(domain(format!(
            "Bloch vectors need a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let off = m.get(1, 0);
    Ok(BlochVector::new(
        2.0 * off.re,
        2.0 * off.im,
        m.get(0, 0).re - m.get(1, 1).re,
    ))
}
