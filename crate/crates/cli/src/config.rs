//! Scenario configuration: a TOML document with the sections `seed`,
//! `tolerances`, `preparations`, `epistemic_states`, `measurements`,
//! `models` and `checks`.
//!
//! Every cross-reference is resolved at load time. Names defined in the
//! document shadow the built-ins listed in [`builtin`].

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_complex::Complex64;
use ontic_core::hs_model::{mix_epistemic, EpistemicState, OnticPoint};
use ontic_core::onto_model::{
    psi_complete_qubit_model, OntologicalModel, TableEntry, TabulatedResponse,
};
use ontic_core::qcore::{
    density_from_pure, mix, pure_from_bloch, ComplexMatrix, DensityMatrix, Povm, PureState,
};
use serde::Deserialize;

use crate::angle::Angle;

pub const DEFAULT_ANALYTIC_TOL: f64 = 1e-9;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-6;
pub const DEFAULT_MODEL: &str = "psi_complete";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// Document schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(default)]
    pub preparations: BTreeMap<String, PreparationSpec>,
    #[serde(default)]
    pub epistemic_states: BTreeMap<String, EpistemicSpec>,
    #[serde(default)]
    pub measurements: BTreeMap<String, MeasurementSpec>,
    #[serde(default)]
    pub models: BTreeMap<String, ModelSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub analytic: Option<f64>,
    pub quadrature: Option<f64>,
}

/// Complex entries, row-major, each as `[re, im]`.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedRef {
    pub name: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PreparationSpec {
    Pure { theta: Angle, phi: Angle },
    Density { entries: MatrixRows },
    Mixture { components: Vec<WeightedRef> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub theta: Angle,
    pub phi: Angle,
    pub weight: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpistemicSpec {
    Finite { points: Vec<PointSpec> },
    Ring { axis: [f64; 3], polar_angle: Angle },
    Sphere {},
    Mixture { components: Vec<WeightedRef> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub label: String,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementSpec {
    /// Spin measurement along a Bloch axis; outcomes `<name>+`, `<name>-`.
    Projective {
        theta: Angle,
        phi: Angle,
    },
    Povm {
        elements: Vec<ElementSpec>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntrySpec {
    pub theta: Angle,
    pub phi: Angle,
    pub measurement: String,
    pub probabilities: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Born response; registry holds the built-in and all configured
    /// epistemic states.
    PsiComplete {},
    /// Response given by a table; registry holds the listed epistemic states.
    Tabulated {
        preparations: Vec<String>,
        entries: Vec<TableEntrySpec>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BornPair {
    /// Preparation registered in the model.
    pub epistemic: String,
    /// Density-matrix preparation to compare against; defaults to the image
    /// of the epistemic state.
    pub density: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedVerdict {
    PsiComplete,
    PsiOnticIncomplete,
    PsiEpistemic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedQmVerdict {
    Ontic,
    Epistemic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    BornConsistency {
        id: Option<String>,
        model: Option<String>,
        pairs: Vec<BornPair>,
        measurements: Vec<String>,
        tolerance: Option<f64>,
    },
    HsOverlap {
        id: Option<String>,
        a: String,
        b: String,
        expect: bool,
    },
    EntropyCompare {
        id: Option<String>,
        a: String,
        b: String,
        expect_hs_equal: Option<bool>,
        expect_vn_equal: Option<bool>,
        tolerance: Option<f64>,
    },
    IotaImage {
        id: Option<String>,
        state: String,
        expect: Option<String>,
        expect_bloch: Option<[f64; 3]>,
        tolerance: Option<f64>,
    },
    Classify {
        id: Option<String>,
        model: Option<String>,
        preparations: Vec<String>,
        expect: ExpectedVerdict,
    },
    QmOverlap {
        id: Option<String>,
        states: Vec<String>,
        expect: ExpectedQmVerdict,
    },
    ContextDrift {
        id: Option<String>,
        a: String,
        b: String,
        steps: Option<usize>,
        samples: Option<usize>,
        expect_monotone: Option<bool>,
        tolerance: Option<f64>,
    },
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::BornConsistency { .. } => "born_consistency",
            CheckSpec::HsOverlap { .. } => "hs_overlap",
            CheckSpec::EntropyCompare { .. } => "entropy_compare",
            CheckSpec::IotaImage { .. } => "iota_image",
            CheckSpec::Classify { .. } => "classify",
            CheckSpec::QmOverlap { .. } => "qm_overlap",
            CheckSpec::ContextDrift { .. } => "context_drift",
        }
    }

    pub fn id(&self, index: usize) -> String {
        let explicit = match self {
            CheckSpec::BornConsistency { id, .. }
            | CheckSpec::HsOverlap { id, .. }
            | CheckSpec::EntropyCompare { id, .. }
            | CheckSpec::IotaImage { id, .. }
            | CheckSpec::Classify { id, .. }
            | CheckSpec::QmOverlap { id, .. }
            | CheckSpec::ContextDrift { id, .. } => id.clone(),
        };
        explicit.unwrap_or_else(|| format!("{}-{index}", self.kind()))
    }
}

// ---------------------------------------------------------------------------
// Resolved scenario
// ---------------------------------------------------------------------------

/// A density-matrix preparation, with its state vector when it is pure by
/// construction.
#[derive(Debug, Clone)]
pub struct Preparation {
    pub density: DensityMatrix,
    pub pure: Option<PureState>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub analytic: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic: DEFAULT_ANALYTIC_TOL,
            quadrature: DEFAULT_QUADRATURE_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub preparations: BTreeMap<String, Preparation>,
    pub epistemic_states: BTreeMap<String, EpistemicState>,
    pub measurements: BTreeMap<String, Povm>,
    pub models: BTreeMap<String, OntologicalModel>,
    pub checks: Vec<CheckSpec>,
}

/// Built-in names available to every scenario.
pub mod builtin {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    const AXES: [(&str, f64, f64); 6] = [
        ("z+", 0.0, 0.0),
        ("z-", PI, 0.0),
        ("x+", FRAC_PI_2, 0.0),
        ("x-", FRAC_PI_2, PI),
        ("y+", FRAC_PI_2, FRAC_PI_2),
        ("y-", FRAC_PI_2, 3.0 * FRAC_PI_2),
    ];

    /// `z±`, `x±`, `y±` as pure states and `mixed` = I/2.
    pub fn preparations() -> BTreeMap<String, Preparation> {
        let mut out: BTreeMap<String, Preparation> = AXES
            .iter()
            .map(|&(name, theta, phi)| {
                let psi = pure_from_bloch(theta, phi).expect("valid axis");
                (
                    name.to_string(),
                    Preparation {
                        density: density_from_pure(&psi),
                        pure: Some(psi),
                    },
                )
            })
            .collect();
        out.insert(
            "mixed".into(),
            Preparation {
                density: DensityMatrix::maximally_mixed(2).expect("qubit"),
                pure: None,
            },
        );
        out
    }

    /// Point masses on the six axis states, cases `A`–`D`, and `x_pair`.
    pub fn epistemic_states() -> BTreeMap<String, EpistemicState> {
        let mut out: BTreeMap<String, EpistemicState> = psi_complete_qubit_model()
            .preparations()
            .map(|(n, s)| (n.to_string(), s.clone()))
            .collect();
        out.insert("x_pair".into(), EpistemicState::x_pair());
        out
    }

    /// `x`, `y`, `z` spin measurements.
    pub fn measurements() -> BTreeMap<String, Povm> {
        [Povm::pauli_x(), Povm::pauli_y(), Povm::pauli_z()]
            .into_iter()
            .map(|m| (m.name().to_string(), m))
            .collect()
    }
}

fn matrix_from_rows(rows: &MatrixRows, key: &str) -> Result<ComplexMatrix, ConfigError> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(invalid(
            key,
            format!("matrix must be square, got {dim} rows of unequal length"),
        ));
    }
    let entries: Vec<Complex64> = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    ComplexMatrix::from_row_major(dim, &entries).map_err(|e| invalid(key, e.to_string()))
}

/// Depth-first resolution of named, possibly mutually referencing items.
struct Resolver<'a, S, T> {
    section: &'static str,
    specs: &'a BTreeMap<String, S>,
    builtins: BTreeMap<String, T>,
    done: BTreeMap<String, T>,
    in_progress: BTreeSet<String>,
}

impl<'a, S, T: Clone> Resolver<'a, S, T> {
    fn new(
        section: &'static str,
        specs: &'a BTreeMap<String, S>,
        builtins: BTreeMap<String, T>,
    ) -> Self {
        Self {
            section,
            specs,
            builtins,
            done: BTreeMap::new(),
            in_progress: BTreeSet::new(),
        }
    }

    fn get(
        &mut self,
        name: &str,
        referrer: &str,
        build: &dyn Fn(&mut Self, &str, &S) -> Result<T, ConfigError>,
    ) -> Result<T, ConfigError> {
        if let Some(v) = self.done.get(name) {
            return Ok(v.clone());
        }
        let Some(spec) = self.specs.get(name) else {
            return self
                .builtins
                .get(name)
                .cloned()
                .ok_or_else(|| invalid(referrer, format!("unknown {} `{name}`", self.section)));
        };
        if !self.in_progress.insert(name.to_string()) {
            return Err(invalid(
                referrer,
                format!("circular reference through `{name}`"),
            ));
        }
        let value = build(self, name, spec)?;
        self.in_progress.remove(name);
        self.done.insert(name.to_string(), value.clone());
        Ok(value)
    }

    fn resolve_all(
        mut self,
        build: &dyn Fn(&mut Self, &str, &S) -> Result<T, ConfigError>,
    ) -> Result<BTreeMap<String, T>, ConfigError> {
        for name in self.specs.keys() {
            let key = format!("{}.{name}", self.section);
            self.get(name, &key, build)?;
        }
        let mut all = self.builtins;
        all.extend(self.done);
        Ok(all)
    }
}

fn build_preparation(
    r: &mut Resolver<PreparationSpec, Preparation>,
    name: &str,
    spec: &PreparationSpec,
) -> Result<Preparation, ConfigError> {
    let key = format!("preparations.{name}");
    match spec {
        PreparationSpec::Pure { theta, phi } => {
            let psi = pure_from_bloch(theta.radians(), phi.radians())
                .map_err(|e| invalid(&key, e.to_string()))?;
            Ok(Preparation {
                density: density_from_pure(&psi),
                pure: Some(psi),
            })
        }
        PreparationSpec::Density { entries } => {
            let m = matrix_from_rows(entries, &format!("{key}.entries"))?;
            let density = DensityMatrix::new(m)
                .map_err(|e| invalid(format!("{key}.entries"), e.to_string()))?;
            Ok(Preparation {
                density,
                pure: None,
            })
        }
        PreparationSpec::Mixture { components } => {
            let mut parts = Vec::with_capacity(components.len());
            for (i, c) in components.iter().enumerate() {
                let p = r.get(
                    &c.name,
                    &format!("{key}.components[{i}].name"),
                    &build_preparation,
                )?;
                parts.push((c.weight, p.density));
            }
            let density =
                mix(&parts).map_err(|e| invalid(format!("{key}.components"), e.to_string()))?;
            Ok(Preparation {
                density,
                pure: None,
            })
        }
    }
}

fn build_epistemic(
    r: &mut Resolver<EpistemicSpec, EpistemicState>,
    name: &str,
    spec: &EpistemicSpec,
) -> Result<EpistemicState, ConfigError> {
    let key = format!("epistemic_states.{name}");
    match spec {
        EpistemicSpec::Finite { points } => {
            let atoms = points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    OnticPoint::new(p.theta.radians(), p.phi.radians())
                        .map(|pt| (pt, p.weight))
                        .map_err(|e| invalid(format!("{key}.points[{i}]"), e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            EpistemicState::finite(atoms)
                .map_err(|e| invalid(format!("{key}.points"), e.to_string()))
        }
        EpistemicSpec::Ring { axis, polar_angle } => {
            EpistemicState::ring(*axis, polar_angle.radians())
                .map_err(|e| invalid(&key, e.to_string()))
        }
        EpistemicSpec::Sphere {} => Ok(EpistemicState::UniformSphere),
        EpistemicSpec::Mixture { components } => {
            let mut parts = Vec::with_capacity(components.len());
            for (i, c) in components.iter().enumerate() {
                let e = r.get(
                    &c.name,
                    &format!("{key}.components[{i}].name"),
                    &build_epistemic,
                )?;
                parts.push((c.weight, e));
            }
            mix_epistemic(&parts).map_err(|e| invalid(format!("{key}.components"), e.to_string()))
        }
    }
}

fn build_measurement(name: &str, spec: &MeasurementSpec) -> Result<Povm, ConfigError> {
    let key = format!("measurements.{name}");
    match spec {
        MeasurementSpec::Projective { theta, phi } => {
            Povm::qubit_axis(name, theta.radians(), phi.radians())
                .map_err(|e| invalid(&key, e.to_string()))
        }
        MeasurementSpec::Povm { elements } => {
            let outcomes = elements
                .iter()
                .enumerate()
                .map(|(i, el)| {
                    Ok((
                        el.label.clone(),
                        matrix_from_rows(&el.matrix, &format!("{key}.elements[{i}].matrix"))?,
                    ))
                })
                .collect::<Result<Vec<_>, ConfigError>>()?;
            Povm::new(name, outcomes).map_err(|e| invalid(&key, e.to_string()))
        }
    }
}

fn build_model(
    name: &str,
    spec: &ModelSpec,
    epistemic: &BTreeMap<String, EpistemicState>,
    measurements: &BTreeMap<String, Povm>,
) -> Result<OntologicalModel, ConfigError> {
    let key = format!("models.{name}");
    match spec {
        ModelSpec::PsiComplete {} => Ok(psi_complete_model(epistemic)),
        ModelSpec::Tabulated {
            preparations,
            entries,
        } => {
            let mut table = Vec::with_capacity(entries.len());
            for (i, e) in entries.iter().enumerate() {
                let ekey = format!("{key}.entries[{i}]");
                let m = measurements.get(&e.measurement).ok_or_else(|| {
                    invalid(
                        format!("{ekey}.measurement"),
                        format!("unknown measurement `{}`", e.measurement),
                    )
                })?;
                if let Some(label) = e.probabilities.keys().find(|l| !m.labels().contains(l)) {
                    return Err(invalid(
                        format!("{ekey}.probabilities"),
                        format!("measurement `{}` has no outcome `{label}`", e.measurement),
                    ));
                }
                let point = OnticPoint::new(e.theta.radians(), e.phi.radians())
                    .map_err(|err| invalid(&ekey, err.to_string()))?;
                table.push(TableEntry {
                    point,
                    measurement: e.measurement.clone(),
                    probabilities: e
                        .probabilities
                        .iter()
                        .map(|(l, p)| (l.clone(), *p))
                        .collect(),
                });
            }
            let response = TabulatedResponse::new(table)
                .map_err(|e| invalid(format!("{key}.entries"), e.to_string()))?;
            let mut model = OntologicalModel::new(response);
            for (i, p) in preparations.iter().enumerate() {
                let state = epistemic.get(p).ok_or_else(|| {
                    invalid(
                        format!("{key}.preparations[{i}]"),
                        format!("unknown epistemic state `{p}`"),
                    )
                })?;
                model.insert_preparation(p.clone(), state.clone());
            }
            Ok(model)
        }
    }
}

fn psi_complete_model(epistemic: &BTreeMap<String, EpistemicState>) -> OntologicalModel {
    let mut model = psi_complete_qubit_model();
    for (name, state) in epistemic {
        model.insert_preparation(name.clone(), state.clone());
    }
    model
}

impl Scenario {
    /// The scenario with only built-in names and no checks.
    pub fn builtin() -> Self {
        let epistemic_states = builtin::epistemic_states();
        let mut models = BTreeMap::new();
        models.insert(
            DEFAULT_MODEL.to_string(),
            psi_complete_model(&epistemic_states),
        );
        Self {
            seed: 0,
            tolerances: Tolerances::default(),
            preparations: builtin::preparations(),
            epistemic_states,
            measurements: builtin::measurements(),
            models,
            checks: Vec::new(),
        }
    }

    pub fn from_config(config: ScenarioConfig) -> Result<Self, ConfigError> {
        let mut tolerances = Tolerances::default();
        for (field, value, slot) in [
            (
                "tolerances.analytic",
                config.tolerances.analytic,
                &mut tolerances.analytic,
            ),
            (
                "tolerances.quadrature",
                config.tolerances.quadrature,
                &mut tolerances.quadrature,
            ),
        ] {
            if let Some(v) = value {
                if !(v > 0.0) {
                    return Err(invalid(field, "tolerance must be positive"));
                }
                *slot = v;
            }
        }

        let preparations =
            Resolver::new("preparation", &config.preparations, builtin::preparations())
                .resolve_all(&build_preparation)?;
        let epistemic_states = Resolver::new(
            "epistemic state",
            &config.epistemic_states,
            builtin::epistemic_states(),
        )
        .resolve_all(&build_epistemic)?;

        let mut measurements = builtin::measurements();
        for (name, spec) in &config.measurements {
            measurements.insert(name.clone(), build_measurement(name, spec)?);
        }

        let mut models = BTreeMap::new();
        models.insert(
            DEFAULT_MODEL.to_string(),
            psi_complete_model(&epistemic_states),
        );
        for (name, spec) in &config.models {
            models.insert(
                name.clone(),
                build_model(name, spec, &epistemic_states, &measurements)?,
            );
        }

        let scenario = Self {
            seed: config.seed.unwrap_or(0),
            tolerances,
            preparations,
            epistemic_states,
            measurements,
            models,
            checks: config.checks,
        };
        scenario.validate_checks()?;
        Ok(scenario)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_config(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn model(&self, name: Option<&str>, key: &str) -> Result<&OntologicalModel, ConfigError> {
        let name = name.unwrap_or(DEFAULT_MODEL);
        self.models
            .get(name)
            .ok_or_else(|| invalid(key, format!("unknown model `{name}`")))
    }

    pub fn preparation(&self, name: &str, key: &str) -> Result<&Preparation, ConfigError> {
        self.preparations
            .get(name)
            .ok_or_else(|| invalid(key, format!("unknown preparation `{name}`")))
    }

    pub fn epistemic(&self, name: &str, key: &str) -> Result<&EpistemicState, ConfigError> {
        self.epistemic_states
            .get(name)
            .ok_or_else(|| invalid(key, format!("unknown epistemic state `{name}`")))
    }

    pub fn measurement(&self, name: &str, key: &str) -> Result<&Povm, ConfigError> {
        self.measurements
            .get(name)
            .ok_or_else(|| invalid(key, format!("unknown measurement `{name}`")))
    }

    fn validate_checks(&self) -> Result<(), ConfigError> {
        let mut ids = BTreeSet::new();
        for (i, check) in self.checks.iter().enumerate() {
            let key = |field: &str| format!("checks[{i}].{field}");
            if !ids.insert(check.id(i)) {
                return Err(invalid(
                    key("id"),
                    format!("duplicate check id `{}`", check.id(i)),
                ));
            }
            let tolerance = match check {
                CheckSpec::BornConsistency {
                    model,
                    pairs,
                    measurements,
                    tolerance,
                    ..
                } => {
                    let m = self.model(model.as_deref(), &key("model"))?;
                    for (j, p) in pairs.iter().enumerate() {
                        m.preparation(&p.epistemic).map_err(|_| {
                            invalid(
                                key(&format!("pairs[{j}].epistemic")),
                                format!(
                                    "preparation `{}` is not registered in the model",
                                    p.epistemic
                                ),
                            )
                        })?;
                        if let Some(d) = &p.density {
                            self.preparation(d, &key(&format!("pairs[{j}].density")))?;
                        } else {
                            self.epistemic(&p.epistemic, &key(&format!("pairs[{j}].epistemic")))?;
                        }
                    }
                    for (j, name) in measurements.iter().enumerate() {
                        self.measurement(name, &key(&format!("measurements[{j}]")))?;
                    }
                    *tolerance
                }
                CheckSpec::HsOverlap { a, b, .. } => {
                    self.epistemic(a, &key("a"))?;
                    self.epistemic(b, &key("b"))?;
                    None
                }
                CheckSpec::EntropyCompare {
                    a, b, tolerance, ..
                } => {
                    self.epistemic(a, &key("a"))?;
                    self.epistemic(b, &key("b"))?;
                    *tolerance
                }
                CheckSpec::IotaImage {
                    state,
                    expect,
                    tolerance,
                    ..
                } => {
                    self.epistemic(state, &key("state"))?;
                    if let Some(e) = expect {
                        self.preparation(e, &key("expect"))?;
                    }
                    *tolerance
                }
                CheckSpec::Classify {
                    model,
                    preparations,
                    ..
                } => {
                    let m = self.model(model.as_deref(), &key("model"))?;
                    for (j, p) in preparations.iter().enumerate() {
                        m.preparation(p).map_err(|_| {
                            invalid(
                                key(&format!("preparations[{j}]")),
                                format!("preparation `{p}` is not registered in the model"),
                            )
                        })?;
                    }
                    None
                }
                CheckSpec::QmOverlap { states, .. } => {
                    for (j, s) in states.iter().enumerate() {
                        let p = self.preparation(s, &key(&format!("states[{j}]")))?;
                        if p.pure.is_none() {
                            return Err(invalid(
                                key(&format!("states[{j}]")),
                                format!("preparation `{s}` is not a pure state"),
                            ));
                        }
                    }
                    None
                }
                CheckSpec::ContextDrift {
                    a,
                    b,
                    steps,
                    samples,
                    tolerance,
                    ..
                } => {
                    self.preparation(a, &key("a"))?;
                    self.preparation(b, &key("b"))?;
                    if steps.is_some_and(|s| s < 2) {
                        return Err(invalid(key("steps"), "need at least 2 steps"));
                    }
                    if samples.is_some_and(|s| s < 1) {
                        return Err(invalid(key("samples"), "need at least 1 sample"));
                    }
                    *tolerance
                }
            };
            if tolerance.is_some_and(|t| !(t > 0.0)) {
                return Err(invalid(key("tolerance"), "tolerance must be positive"));
            }
        }
        Ok(())
    }
}
