//! Epistemic states as probability measures over the pure states of a qubit.
//!
//! The ontic space is the Bloch sphere of pure states. A preparation induces
//! a probability measure on it; the supported families are finite point
//! masses, the uniform measure on a circle of states ([`Ring`]), the uniform
//! measure on the whole sphere, and convex mixtures of those.
//!
//! [`iota`] sends every measure to the density matrix obtained by mixing the
//! projectors of its points. It is linear and onto, but many measures share
//! one image, and it does not respect the entropy order computed here by
//! [`hs_entropy`].

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{domain, Error, Result};
use crate::qcore::{
    density_from_pure, mix, pure_from_bloch, shannon_entropy, BlochVector, ComplexMatrix,
    DensityMatrix, PureState,
};
use crate::quadrature::{self, Vec3, RING_POINTS, SPHERE_POINTS};

/// Angular tolerance for identifying ontic points and rings.
pub const ANGLE_TOL: f64 = 1e-9;
/// Tolerance on mixture weight sums.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A pure qubit state given by its Bloch angles.
///
/// `theta ∈ [0, π]`, `phi ∈ [0, 2π)`, and `phi = 0` at both poles.
#[derive(Debug, Clone, Copy)]
pub struct OnticPoint {
    theta: f64,
    phi: f64,
}

impl OnticPoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(domain(format!("polar angle {theta} outside [0, π]")));
        }
        if !phi.is_finite() {
            return Err(domain("azimuth must be finite"));
        }
        let at_pole = theta < ANGLE_TOL * 1e-3 || PI - theta < ANGLE_TOL * 1e-3;
        let phi = if at_pole { 0.0 } else { phi.rem_euclid(TAU) };
        // rem_euclid can round up to exactly 2π
        let phi = if phi >= TAU { 0.0 } else { phi };
        Ok(Self { theta, phi })
    }

    /// Point in the direction of a non-zero 3-vector.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        let u = quadrature::normalize(v).ok_or_else(|| domain("direction must be non-zero"))?;
        Self::new(u[2].clamp(-1.0, 1.0).acos(), u[1].atan2(u[0]))
    }

    pub fn z_plus() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }
    pub fn z_minus() -> Self {
        Self {
            theta: PI,
            phi: 0.0,
        }
    }
    pub fn x_plus() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }
    pub fn x_minus() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: PI,
        }
    }
    pub fn y_plus() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
        }
    }
    pub fn y_minus() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 3.0 * FRAC_PI_2,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit Bloch vector.
    pub fn direction(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn pure_state(&self) -> PureState {
        pure_from_bloch(self.theta, self.phi).expect("theta kept in range")
    }

    /// Same point up to [`ANGLE_TOL`] of angular separation.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let (a, b) = (self.direction(), other.direction());
        quadrature::norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]]) <= ANGLE_TOL
    }
}

impl PartialEq for OnticPoint {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

/// Finitely many point masses, pairwise distinct, weights positive and summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSupport {
    atoms: Vec<(OnticPoint, f64)>,
}

impl FiniteSupport {
    /// Coincident points are merged; the weights must be positive and sum
    /// to 1 within `1e-9`, and are then renormalized.
    pub fn new(atoms: Vec<(OnticPoint, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(domain("finite support needs at least one point"));
        }
        let mut merged: Vec<(OnticPoint, f64)> = Vec::with_capacity(atoms.len());
        let mut total = 0.0;
        for (point, w) in atoms {
            if !(w > 0.0) || !w.is_finite() {
                return Err(domain(format!("point weight {w} must be positive")));
            }
            total += w;
            add_atom(&mut merged, point, w);
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(domain(format!("point weights sum to {total}, expected 1")));
        }
        for (_, w) in &mut merged {
            *w /= total;
        }
        Ok(Self { atoms: merged })
    }

    pub fn atoms(&self) -> &[(OnticPoint, f64)] {
        &self.atoms
    }

    pub fn weight_of(&self, point: &OnticPoint) -> f64 {
        self.atoms
            .iter()
            .find(|(p, _)| p.approx_eq(point))
            .map_or(0.0, |(_, w)| *w)
    }

    fn shares_point_with(&self, other: &Self) -> bool {
        self.atoms
            .iter()
            .any(|(p, _)| other.atoms.iter().any(|(q, _)| p.approx_eq(q)))
    }
}

fn add_atom(atoms: &mut Vec<(OnticPoint, f64)>, point: OnticPoint, w: f64) {
    match atoms.iter_mut().find(|(p, _)| p.approx_eq(&point)) {
        Some((_, existing)) => *existing += w,
        None => atoms.push((point, w)),
    }
}

/// Uniform measure on the circle of pure states at `polar_angle` from `axis`.
#[derive(Debug, Clone, Copy)]
pub struct Ring {
    axis: Vec3,
    polar_angle: f64,
}

impl Ring {
    pub fn new(axis: Vec3, polar_angle: f64) -> Result<Self> {
        let axis =
            quadrature::normalize(axis).ok_or_else(|| domain("ring axis must be non-zero"))?;
        if !(polar_angle > 0.0 && polar_angle < PI) {
            return Err(domain(format!(
                "ring polar angle {polar_angle} outside (0, π)"
            )));
        }
        Ok(Self { axis, polar_angle })
    }

    /// The great circle of states on the x/y plane.
    pub fn equator() -> Self {
        Self {
            axis: [0.0, 0.0, 1.0],
            polar_angle: FRAC_PI_2,
        }
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn polar_angle(&self) -> f64 {
        self.polar_angle
    }

    /// Same circle of states: `(n, θ)` and `(−n, π − θ)` describe one ring.
    pub fn same_circle(&self, other: &Self) -> bool {
        let close = |a: Vec3, b: Vec3| {
            quadrature::norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]]) <= ANGLE_TOL
        };
        let flipped = [-other.axis[0], -other.axis[1], -other.axis[2]];
        (close(self.axis, other.axis) && (self.polar_angle - other.polar_angle).abs() <= ANGLE_TOL)
            || (close(self.axis, flipped)
                && (self.polar_angle - (PI - other.polar_angle)).abs() <= ANGLE_TOL)
    }

    pub fn sample_points(&self, n: usize) -> impl Iterator<Item = Vec3> {
        quadrature::ring_points(self.axis, self.polar_angle, n)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.same_circle(other)
    }
}

/// Flattened mixture of measures on supports of possibly different dimension.
///
/// Only produced by [`mix_epistemic`]: it holds at least two components, no
/// nested mixtures, at most one finite support, no repeated ring, and at
/// most one sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeMixture {
    components: Vec<(f64, EpistemicState)>,
}

impl GradeMixture {
    pub fn components(&self) -> &[(f64, EpistemicState)] {
        &self.components
    }
}

/// Probability measure over the pure qubit states.
#[derive(Debug, Clone, PartialEq)]
pub enum EpistemicState {
    FiniteSupport(FiniteSupport),
    Ring(Ring),
    UniformSphere,
    GradeMixture(GradeMixture),
}

impl EpistemicState {
    pub fn delta(point: OnticPoint) -> Self {
        Self::FiniteSupport(FiniteSupport {
            atoms: vec![(point, 1.0)],
        })
    }

    pub fn finite(atoms: Vec<(OnticPoint, f64)>) -> Result<Self> {
        FiniteSupport::new(atoms).map(Self::FiniteSupport)
    }

    /// Equal weights on distinct points.
    pub fn uniform(points: &[OnticPoint]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let state = FiniteSupport::new(points.iter().map(|&p| (p, w)).collect())?;
        if state.atoms.len() != points.len() {
            return Err(domain("uniform support points must be distinct"));
        }
        Ok(Self::FiniteSupport(state))
    }

    pub fn ring(axis: Vec3, polar_angle: f64) -> Result<Self> {
        Ring::new(axis, polar_angle).map(Self::Ring)
    }

    /// Uniform on the poles `z⁺`, `z⁻`.
    pub fn case_a() -> Self {
        Self::uniform(&[OnticPoint::z_plus(), OnticPoint::z_minus()]).expect("distinct points")
    }

    /// Uniform on the equator.
    pub fn case_b() -> Self {
        Self::Ring(Ring::equator())
    }

    /// Uniform on the whole sphere.
    pub fn case_c() -> Self {
        Self::UniformSphere
    }

    /// Uniform on the north pole and one equator point, `z⁺`, `x⁺`.
    pub fn case_d() -> Self {
        Self::uniform(&[OnticPoint::z_plus(), OnticPoint::x_plus()]).expect("distinct points")
    }

    /// Uniform on `x⁺`, `x⁻`.
    pub fn x_pair() -> Self {
        Self::uniform(&[OnticPoint::x_plus(), OnticPoint::x_minus()]).expect("distinct points")
    }

    /// Dimensions of the supports carrying mass, ascending and deduplicated.
    pub fn grades(&self) -> Vec<u8> {
        let mut grades = match self {
            Self::FiniteSupport(_) => vec![0],
            Self::Ring(_) => vec![1],
            Self::UniformSphere => vec![2],
            Self::GradeMixture(m) => m.components.iter().flat_map(|(_, c)| c.grades()).collect(),
        };
        grades.sort_unstable();
        grades.dedup();
        grades
    }

    fn leaves(&self) -> Vec<(f64, &EpistemicState)> {
        match self {
            Self::GradeMixture(m) => m.components.iter().map(|(w, c)| (*w, c)).collect(),
            leaf => vec![(1.0, leaf)],
        }
    }
}

/// Convex combination `Σ wᵢ eᵢ` of epistemic states.
///
/// Point masses from all finite components are pooled (coincident points add
/// their weights), identical rings and spheres are merged, and any remaining
/// heterogeneity yields a flat [`GradeMixture`]. Zero-weight components are
/// dropped.
pub fn mix_epistemic(components: &[(f64, EpistemicState)]) -> Result<EpistemicState> {
    if components.is_empty() {
        return Err(domain("mixture needs at least one component"));
    }
    let mut total = 0.0;
    for (w, _) in components {
        if !(*w >= 0.0) || !w.is_finite() {
            return Err(domain(format!(
                "mixture weight {w} is negative or not finite"
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(domain(format!(
            "mixture weights sum to {total}, expected 1"
        )));
    }

    let mut atoms: Vec<(OnticPoint, f64)> = Vec::new();
    let mut rings: Vec<(f64, Ring)> = Vec::new();
    let mut sphere = 0.0;
    for (w, state) in components.iter().filter(|(w, _)| *w > 0.0) {
        let w = w / total;
        for (lw, leaf) in state.leaves() {
            let weight = w * lw;
            match leaf {
                EpistemicState::FiniteSupport(fs) => {
                    for (p, pw) in &fs.atoms {
                        add_atom(&mut atoms, *p, weight * pw);
                    }
                }
                EpistemicState::Ring(ring) => {
                    match rings.iter_mut().find(|(_, r)| r.same_circle(ring)) {
                        Some((rw, _)) => *rw += weight,
                        None => rings.push((weight, *ring)),
                    }
                }
                EpistemicState::UniformSphere => sphere += weight,
                EpistemicState::GradeMixture(_) => unreachable!("mixtures are kept flat"),
            }
        }
    }

    let mut parts: Vec<(f64, EpistemicState)> = Vec::new();
    let finite_weight: f64 = atoms.iter().map(|(_, w)| w).sum();
    if finite_weight > 0.0 {
        for (_, w) in &mut atoms {
            *w /= finite_weight;
        }
        parts.push((
            finite_weight,
            EpistemicState::FiniteSupport(FiniteSupport { atoms }),
        ));
    }
    parts.extend(rings.into_iter().map(|(w, r)| (w, EpistemicState::Ring(r))));
    if sphere > 0.0 {
        parts.push((sphere, EpistemicState::UniformSphere));
    }

    if parts.len() == 1 {
        return Ok(parts.pop().expect("one part").1);
    }
    let sum: f64 = parts.iter().map(|(w, _)| w).sum();
    for (w, _) in &mut parts {
        *w /= sum;
    }
    Ok(EpistemicState::GradeMixture(GradeMixture {
        components: parts,
    }))
}

/// Entropy graded by the dimension of the support.
///
/// Ordered lexicographically on `(grade, value)`: any measure on a
/// higher-dimensional support has infinitely more entropy than one on a
/// lower-dimensional support.
#[derive(Debug, Clone, Copy)]
pub struct GradedEntropy {
    /// 0 for point masses, 1 for circles, 2 for the sphere.
    pub grade: u8,
    /// Bits.
    pub value: f64,
}

impl PartialEq for GradedEntropy {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for GradedEntropy {}

impl PartialOrd for GradedEntropy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GradedEntropy {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade
            .cmp(&other.grade)
            .then_with(|| self.value.total_cmp(&other.value))
    }
}

/// Information entropy of an epistemic state, with single pure states at 0.
///
/// Point masses give the Shannon entropy of their weights. A measure on
/// circles or on the sphere is scored by its differential entropy in bits
/// against a reference measure that gives every component manifold (each
/// distinct circle, or the sphere) total mass 1, the continuous analogue of
/// counting measure. A single uniform ring or the uniform sphere therefore
/// scores `(grade, 0)`, and a mixture of distinct rings with weights `wᵢ`
/// scores `(1, H(w))`: the density is the constant `wᵢ` on ring `i`, and
/// ring crossings are null sets.
///
/// Mixtures across grades have no defined value and are rejected.
pub fn hs_entropy(e: &EpistemicState) -> Result<GradedEntropy> {
    let grades = e.grades();
    if grades.len() != 1 {
        return Err(Error::UnsupportedComparison(format!(
            "entropy of a measure mixing support dimensions {grades:?}"
        )));
    }
    let grade = grades[0];
    let value = match e {
        EpistemicState::FiniteSupport(fs) => {
            let w: Vec<f64> = fs.atoms.iter().map(|(_, w)| *w).collect();
            shannon_entropy(&w)
        }
        EpistemicState::Ring(_) | EpistemicState::UniformSphere => 0.0,
        EpistemicState::GradeMixture(m) => {
            let w: Vec<f64> = m.components.iter().map(|(w, _)| *w).collect();
            shannon_entropy(&w)
        }
    };
    Ok(GradedEntropy { grade, value })
}

/// Density matrix of an epistemic state: `∫ |ψ(λ)⟩⟨ψ(λ)| dp(λ)`.
///
/// Closed forms: a ring at angle `θ` about `n̂` maps to `(I + cos θ n̂·σ)/2`
/// and the uniform sphere to `I/2`.
pub fn iota(e: &EpistemicState) -> DensityMatrix {
    match e {
        EpistemicState::FiniteSupport(fs) => {
            let parts: Vec<(f64, DensityMatrix)> = fs
                .atoms
                .iter()
                .map(|(p, w)| (*w, density_from_pure(&p.pure_state())))
                .collect();
            mix(&parts).expect("normalized weights and valid projectors")
        }
        EpistemicState::Ring(ring) => {
            let c = ring.polar_angle.cos();
            let n = ring.axis;
            BlochVector::new(c * n[0], c * n[1], c * n[2])
                .to_density()
                .expect("|cos θ| ≤ 1")
        }
        EpistemicState::UniformSphere => DensityMatrix::maximally_mixed(2).expect("qubit"),
        EpistemicState::GradeMixture(m) => {
            let parts: Vec<(f64, DensityMatrix)> =
                m.components.iter().map(|(w, c)| (*w, iota(c))).collect();
            mix(&parts).expect("normalized weights")
        }
    }
}

/// [`iota`] evaluated by quadrature (4096 ring samples, 10 000-point
/// Fibonacci sphere) instead of closed forms. Used to cross-check them.
pub fn iota_quadrature(e: &EpistemicState) -> DensityMatrix {
    fn average_projector(points: impl Iterator<Item = Vec3>) -> DensityMatrix {
        let mut acc = ComplexMatrix::zeros(2);
        let mut count = 0usize;
        for p in points {
            let psi = OnticPoint::from_direction(p)
                .expect("unit vector")
                .pure_state();
            acc = &acc + &psi.projector();
            count += 1;
        }
        DensityMatrix::with_tolerance(acc.scale(1.0 / count as f64), 1e-6)
            .expect("average of projectors")
    }
    match e {
        EpistemicState::FiniteSupport(_) => iota(e),
        EpistemicState::Ring(ring) => average_projector(ring.sample_points(RING_POINTS)),
        EpistemicState::UniformSphere => {
            average_projector(quadrature::fibonacci_sphere(SPHERE_POINTS))
        }
        EpistemicState::GradeMixture(m) => {
            let parts: Vec<(f64, DensityMatrix)> = m
                .components
                .iter()
                .map(|(w, c)| (*w, iota_quadrature(c)))
                .collect();
            crate::qcore::mix_with_tolerance(&parts, 1e-6).expect("normalized weights")
        }
    }
}

/// Whether two epistemic states overlap, i.e. are NOT mutually singular.
///
/// Point masses overlap iff they share a point; rings iff they are the same
/// circle (distinct circles meet in at most two points, a null set); the
/// sphere overlaps only measures with mass on the sphere; a point mass is
/// null under any ring. Mixtures overlap iff some pair of components does.
pub fn hs_overlap(e1: &EpistemicState, e2: &EpistemicState) -> bool {
    use EpistemicState::*;
    match (e1, e2) {
        (GradeMixture(m), other) | (other, GradeMixture(m)) => {
            m.components.iter().any(|(_, c)| hs_overlap(c, other))
        }
        (FiniteSupport(a), FiniteSupport(b)) => a.shares_point_with(b),
        (Ring(a), Ring(b)) => a.same_circle(b),
        (UniformSphere, UniformSphere) => true,
        (UniformSphere, _) | (_, UniformSphere) => false,
        (FiniteSupport(_), Ring(_)) | (Ring(_), FiniteSupport(_)) => false,
    }
}

/// The witness point when `e` is a single point mass `δ(λ − λ_ψ)`.
pub fn is_delta(e: &EpistemicState) -> Option<OnticPoint> {
    match e {
        EpistemicState::FiniteSupport(fs) if fs.atoms.len() == 1 => Some(fs.atoms[0].0),
        _ => None,
    }
}
