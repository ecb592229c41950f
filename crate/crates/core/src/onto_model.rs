//! Ontological models of a qubit: response functions, Born-rule consistency,
//! and the ψ-ontic / ψ-epistemic / ψ-complete classification.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::hs_model::{hs_overlap, is_delta, EpistemicState, OnticPoint};
use crate::qcore::{
    born_probability, born_probability_pure, density_from_pure, trace_overlap, DensityMatrix, Povm,
    PureState,
};
use crate::quadrature::{self, RING_POINTS, SPHERE_POINTS};

/// Tolerance for exact (finite-sum) paths.
pub const EXACT_TOL: f64 = 1e-9;
/// Tolerance for paths that integrate over rings or the sphere.
pub const QUADRATURE_TOL: f64 = 1e-6;

/// Outcome probabilities `p(k | λ, M)` given the ontic state.
///
/// Implementations must be pure and reentrant: the same arguments always
/// give the same value, and calls may happen from several threads at once.
/// For every `λ` and `M` the values over `M`'s outcomes sum to 1.
pub trait ResponseFunction: Send + Sync {
    fn probability(&self, lambda: &OnticPoint, m: &Povm, k: &str) -> Result<f64>;
}

impl<F> ResponseFunction for F
where
    F: Fn(&OnticPoint, &Povm, &str) -> Result<f64> + Send + Sync,
{
    fn probability(&self, lambda: &OnticPoint, m: &Povm, k: &str) -> Result<f64> {
        self(lambda, m, k)
    }
}

/// The Born response of a ψ-complete model: `⟨ψ(λ)|E_k|ψ(λ)⟩`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BornResponse;

impl ResponseFunction for BornResponse {
    fn probability(&self, lambda: &OnticPoint, m: &Povm, k: &str) -> Result<f64> {
        born_probability_pure(&lambda.pure_state(), m, k)
    }
}

/// One row of a tabulated response: outcome probabilities for one ontic
/// point under one named measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub point: OnticPoint,
    pub measurement: String,
    pub probabilities: Vec<(String, f64)>,
}

/// Response function defined by a finite table, keyed by ontic point and
/// measurement name. Points off the table are lookup errors, so a tabulated
/// model only supports preparations with finite support.
#[derive(Debug, Clone, Default)]
pub struct TabulatedResponse {
    entries: Vec<TableEntry>,
}

impl TabulatedResponse {
    pub fn new(entries: Vec<TableEntry>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if e.probabilities
                .iter()
                .any(|(_, p)| !(0.0..=1.0).contains(p))
            {
                return Err(domain(format!(
                    "table entry for measurement `{}` has a probability outside [0, 1]",
                    e.measurement
                )));
            }
            let total: f64 = e.probabilities.iter().map(|(_, p)| p).sum();
            if (total - 1.0).abs() > EXACT_TOL {
                return Err(domain(format!(
                    "table entry for measurement `{}` sums to {total}, expected 1",
                    e.measurement
                )));
            }
            if entries[..i]
                .iter()
                .any(|o| o.measurement == e.measurement && o.point.approx_eq(&e.point))
            {
                return Err(domain(format!(
                    "duplicate table entry for measurement `{}` at ({}, {})",
                    e.measurement,
                    e.point.theta(),
                    e.point.phi()
                )));
            }
        }
        Ok(Self { entries })
    }
}

impl ResponseFunction for TabulatedResponse {
    fn probability(&self, lambda: &OnticPoint, m: &Povm, k: &str) -> Result<f64> {
        let entry = self
            .entries
            .iter()
            .find(|e| e.measurement == m.name() && e.point.approx_eq(lambda))
            .ok_or_else(|| {
                Error::Lookup(format!(
                    "no table entry for measurement `{}` at ({}, {})",
                    m.name(),
                    lambda.theta(),
                    lambda.phi()
                ))
            })?;
        if !m.labels().iter().any(|l| l == k) {
            return Err(Error::Lookup(format!(
                "POVM `{}` has no outcome `{k}`",
                m.name()
            )));
        }
        Ok(entry
            .probabilities
            .iter()
            .find(|(l, _)| l == k)
            .map_or(0.0, |(_, p)| *p))
    }
}

/// Response function plus the preparation map `P ↦ p(λ|P)`.
#[derive(Clone)]
pub struct OntologicalModel {
    response: Arc<dyn ResponseFunction>,
    preparations: BTreeMap<String, EpistemicState>,
}

impl std::fmt::Debug for OntologicalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OntologicalModel")
            .field("preparations", &self.preparations)
            .finish_non_exhaustive()
    }
}

impl OntologicalModel {
    pub fn new(response: impl ResponseFunction + 'static) -> Self {
        Self {
            response: Arc::new(response),
            preparations: BTreeMap::new(),
        }
    }

    /// Registers (or replaces) a preparation.
    pub fn with_preparation(mut self, name: impl Into<String>, state: EpistemicState) -> Self {
        self.preparations.insert(name.into(), state);
        self
    }

    pub fn insert_preparation(&mut self, name: impl Into<String>, state: EpistemicState) {
        self.preparations.insert(name.into(), state);
    }

    pub fn preparation(&self, name: &str) -> Result<&EpistemicState> {
        self.preparations
            .get(name)
            .ok_or_else(|| Error::Lookup(format!("preparation `{name}` is not registered")))
    }

    /// Registered preparations in name order.
    pub fn preparations(&self) -> impl Iterator<Item = (&str, &EpistemicState)> {
        self.preparations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn response(&self) -> &dyn ResponseFunction {
        self.response.as_ref()
    }
}

/// The ψ-complete qubit model: ontic states are the pure states, the
/// response is the Born rule, and the registry holds point masses on the six
/// axis states (`z+`, `z-`, `x+`, `x-`, `y+`, `y-`) plus the cases `A`
/// (poles), `B` (equator), `C` (sphere) and `D` (`z⁺` and `x⁺`).
pub fn psi_complete_qubit_model() -> OntologicalModel {
    let axis_points = [
        ("z+", OnticPoint::z_plus()),
        ("z-", OnticPoint::z_minus()),
        ("x+", OnticPoint::x_plus()),
        ("x-", OnticPoint::x_minus()),
        ("y+", OnticPoint::y_plus()),
        ("y-", OnticPoint::y_minus()),
    ];
    let mut model = OntologicalModel::new(BornResponse);
    for (name, point) in axis_points {
        model.insert_preparation(name, EpistemicState::delta(point));
    }
    model
        .with_preparation("A", EpistemicState::case_a())
        .with_preparation("B", EpistemicState::case_b())
        .with_preparation("C", EpistemicState::case_c())
        .with_preparation("D", EpistemicState::case_d())
}

fn expected_response(
    response: &dyn ResponseFunction,
    state: &EpistemicState,
    m: &Povm,
    k: &str,
) -> Result<f64> {
    let at = |v: quadrature::Vec3| -> Result<f64> {
        response.probability(&OnticPoint::from_direction(v)?, m, k)
    };
    let mean = |points: &mut dyn Iterator<Item = quadrature::Vec3>| -> Result<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for p in points {
            sum += at(p)?;
            n += 1;
        }
        Ok(sum / n as f64)
    };
    match state {
        EpistemicState::FiniteSupport(fs) => fs
            .atoms()
            .iter()
            .map(|(p, w)| Ok(w * response.probability(p, m, k)?))
            .sum(),
        EpistemicState::Ring(ring) => mean(&mut ring.sample_points(RING_POINTS)),
        EpistemicState::UniformSphere => mean(&mut quadrature::fibonacci_sphere(SPHERE_POINTS)),
        EpistemicState::GradeMixture(mix) => mix
            .components()
            .iter()
            .map(|(w, c)| Ok(w * expected_response(response, c, m, k)?))
            .sum(),
    }
}

/// Model prediction `∫ p(k|λ, M) p(λ|P) dλ`, clamped to `[0, 1]`.
///
/// Exact for point masses; rings use 4096 equally spaced samples and the
/// sphere a 10 000-point Fibonacci lattice.
pub fn predict(model: &OntologicalModel, prep: &str, m: &Povm, k: &str) -> Result<f64> {
    let state = model.preparation(prep)?;
    if !m.labels().iter().any(|l| l == k) {
        return Err(Error::Lookup(format!(
            "POVM `{}` has no outcome `{k}`",
            m.name()
        )));
    }
    Ok(expected_response(model.response(), state, m, k)?.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub preparation: String,
    pub measurement: String,
    pub outcome: String,
    /// Model prediction.
    pub lhs: f64,
    /// `tr(ρ E_k)`.
    pub rhs: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// Sorted by descending `abs_error`; ties keep (preparation, measurement,
    /// outcome) declaration order.
    pub rows: Vec<ConsistencyRow>,
    pub tolerance: f64,
    pub max_abs_error: f64,
    pub passed: bool,
}

/// Compares model predictions against the Born rule for each
/// `(preparation, ρ)` pair, measurement and outcome.
///
/// Mismatches are report content. Errors are reserved for bad arguments
/// (non-positive tolerance, unknown preparation, dimension mismatch).
pub fn verify_born(
    model: &OntologicalModel,
    pairs: &[(String, DensityMatrix)],
    measurements: &[Povm],
    tol: f64,
) -> Result<ConsistencyReport> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut rows = Vec::new();
    for (prep, rho) in pairs {
        for m in measurements {
            for k in m.labels() {
                let lhs = predict(model, prep, m, k)?;
                let rhs = born_probability(rho, m, k)?;
                rows.push(ConsistencyRow {
                    preparation: prep.clone(),
                    measurement: m.name().to_string(),
                    outcome: k.clone(),
                    lhs,
                    rhs,
                    abs_error: (lhs - rhs).abs(),
                });
            }
        }
    }
    rows.sort_by(|a, b| b.abs_error.total_cmp(&a.abs_error));
    let max_abs_error = rows.first().map_or(0.0, |r| r.abs_error);
    Ok(ConsistencyReport {
        rows,
        tolerance: tol,
        max_abs_error,
        passed: max_abs_error <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    PsiComplete,
    PsiOnticIncomplete,
    PsiEpistemic,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PsiComplete => "psi_complete",
            Verdict::PsiOnticIncomplete => "psi_ontic_incomplete",
            Verdict::PsiEpistemic => "psi_epistemic",
        }
    }
}

/// Classification of a model relative to a finite set of preparations.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Overlapping pair, lexicographically smallest by name; present iff the
    /// verdict is [`Verdict::PsiEpistemic`].
    pub witness: Option<(String, String)>,
    /// The preparation set the verdict is relative to, sorted by name.
    pub preparations: Vec<String>,
}

/// Classifies a model over the given preparations.
///
/// Overlap is checked pairwise with [`hs_overlap`]. A verdict can only be
/// relative to the supplied finite set: the ontic condition quantifies over
/// all pairs of states, which no finite computation can cover.
pub fn classify(model: &OntologicalModel, preparations: &[&str]) -> Result<Classification> {
    let mut names: Vec<&str> = preparations.to_vec();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(domain("preparation list contains duplicates"));
    }
    if names.len() < 2 {
        return Err(domain("classification needs at least two preparations"));
    }
    let states: Vec<&EpistemicState> = names
        .iter()
        .map(|n| model.preparation(n))
        .collect::<Result<_>>()?;

    let mut witness = None;
    'outer: for i in 0..states.len() {
        for j in i + 1..states.len() {
            if hs_overlap(states[i], states[j]) {
                witness = Some((names[i].to_string(), names[j].to_string()));
                break 'outer;
            }
        }
    }
    let verdict = if witness.is_some() {
        Verdict::PsiEpistemic
    } else if states.iter().all(|s| is_delta(s).is_some()) {
        // Distinct witnesses follow from non-overlap: equal deltas overlap.
        Verdict::PsiComplete
    } else {
        Verdict::PsiOnticIncomplete
    };
    Ok(Classification {
        verdict,
        witness,
        preparations: names.into_iter().map(String::from).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmVerdict {
    /// All pairs orthogonal.
    Ontic,
    /// Some pair overlaps.
    Epistemic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmOverlapWitness {
    pub first: usize,
    pub second: usize,
    /// `tr(ρ₁ρ₂) = |⟨ψ₁|ψ₂⟩|²`.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QmOverlapVerdict {
    pub verdict: QmVerdict,
    /// First non-orthogonal pair in index order.
    pub witness: Option<QmOverlapWitness>,
}

/// Applies the overlap condition to density matrices: pure states overlap
/// unless their projectors multiply to zero, i.e. unless they are orthogonal.
pub fn qm_overlap_classification(states: &[PureState]) -> Result<QmOverlapVerdict> {
    if states.len() < 2 {
        return Err(domain("overlap classification needs at least two states"));
    }
    let rhos: Vec<DensityMatrix> = states.iter().map(density_from_pure).collect();
    for i in 0..rhos.len() {
        for j in i + 1..rhos.len() {
            let o = trace_overlap(&rhos[i], &rhos[j])?;
            if !o.disjoint {
                return Ok(QmOverlapVerdict {
                    verdict: QmVerdict::Epistemic,
                    witness: Some(QmOverlapWitness {
                        first: i,
                        second: j,
                        overlap: o.value,
                    }),
                });
            }
        }
    }
    Ok(QmOverlapVerdict {
        verdict: QmVerdict::Ontic,
        witness: None,
    })
}
