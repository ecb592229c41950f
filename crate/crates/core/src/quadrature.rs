//! Equal-weight quadrature rules on circles and on the unit sphere.

use std::f64::consts::{PI, TAU};

/// Sample count for circles of states.
pub const RING_POINTS: usize = 4096;
/// Sample count for the whole sphere.
pub const SPHERE_POINTS: usize = 10_000;

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 1e-12 && n.is_finite()).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// Orthonormal `(u, v)` with `u × v = axis`, for a unit `axis`.
fn perpendicular_frame(axis: Vec3) -> (Vec3, Vec3) {
    // Cross with the coordinate direction least aligned with the axis.
    let helper = if axis[0].abs() <= axis[1].abs() && axis[0].abs() <= axis[2].abs() {
        [1.0, 0.0, 0.0]
    } else if axis[1].abs() <= axis[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let u = normalize(cross(helper, axis)).expect("helper is not parallel to axis");
    let v = cross(axis, u);
    (u, v)
}

/// `n` equally spaced points on the circle at angle `polar` from unit `axis`.
/// Exact for trigonometric polynomials in the ring angle of degree `< n`.
pub fn ring_points(axis: Vec3, polar: f64, n: usize) -> impl Iterator<Item = Vec3> {
    let (u, v) = perpendicular_frame(axis);
    let (s, c) = polar.sin_cos();
    (0..n).map(move |k| {
        let (sa, ca) = (TAU * k as f64 / n as f64).sin_cos();
        std::array::from_fn(|i| c * axis[i] + s * (ca * u[i] + sa * v[i]))
    })
}

/// Fibonacci lattice: `zᵢ = 1 − (2i+1)/n`, azimuth `i · π(3 − √5)`.
pub fn fibonacci_sphere(n: usize) -> impl Iterator<Item = Vec3> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |i| {
        let z = 1.0 - (2 * i + 1) as f64 / n as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let (s, c) = (golden_angle * i as f64).sin_cos();
        [r * c, r * s, z]
    })
}

/// Mean of `f` over a point set.
pub fn average<I, F>(points: I, mut f: F) -> f64
where
    I: IntoIterator<Item = Vec3>,
    F: FnMut(Vec3) -> f64,
{
    let mut count = 0usize;
    let mut sum = 0.0;
    for p in points {
        sum += f(p);
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}
