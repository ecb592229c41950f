//! Evaluation of configured checks into report records.
//!
//! Load-time validation has already resolved every reference, so errors
//! here are numerical or domain failures; they fail the offending record and
//! leave the rest of the run alone.

use std::cmp::Ordering;
use std::thread;

use ontic_core::contextual::{mixture_context_drift, DriftRow};
use ontic_core::hs_model::{hs_entropy, hs_overlap, iota, iota_quadrature, GradedEntropy};
use ontic_core::onto_model::{
    classify, qm_overlap_classification, verify_born, QmVerdict, Verdict,
};
use ontic_core::qcore::{bloch_vector, von_neumann_entropy, BlochVector, DensityMatrix, PureState};
use serde_json::{json, Value};

use crate::config::{CheckSpec, ExpectedQmVerdict, ExpectedVerdict, Scenario, Tolerances};
use crate::report::{num, vec3, Record};

pub const DEFAULT_DRIFT_STEPS: usize = 11;
pub const DEFAULT_DRIFT_SAMPLES: usize = 100;

/// Tolerance precedence: the check's own value, then `--tol`, then the
/// scenario's `[tolerances]` (which already fall back to the defaults).
#[derive(Debug, Clone, Copy)]
pub struct TolerancePolicy {
    pub cli: Option<f64>,
    pub scenario: Tolerances,
}

impl TolerancePolicy {
    pub fn analytic(&self, own: Option<f64>) -> f64 {
        own.or(self.cli).unwrap_or(self.scenario.analytic)
    }

    pub fn quadrature(&self, own: Option<f64>) -> f64 {
        own.or(self.cli).unwrap_or(self.scenario.quadrature)
    }
}

type Outcome = Result<(Value, bool), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn graded_json(g: GradedEntropy) -> Value {
    json!({ "grade": g.grade, "value": num(g.value) })
}

fn bloch_json(rho: &DensityMatrix) -> Result<Value, String> {
    Ok(vec3(bloch_vector(rho).map_err(err)?.to_array()))
}

fn ordering_str(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    }
}

fn tolerant_cmp(a: f64, b: f64, tol: f64) -> Ordering {
    if (a - b).abs() <= tol {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

fn graded_cmp(a: GradedEntropy, b: GradedEntropy, tol: f64) -> Ordering {
    a.grade
        .cmp(&b.grade)
        .then_with(|| tolerant_cmp(a.value, b.value, tol))
}

fn verdict_matches(v: Verdict, e: ExpectedVerdict) -> bool {
    matches!(
        (v, e),
        (Verdict::PsiComplete, ExpectedVerdict::PsiComplete)
            | (
                Verdict::PsiOnticIncomplete,
                ExpectedVerdict::PsiOnticIncomplete
            )
            | (Verdict::PsiEpistemic, ExpectedVerdict::PsiEpistemic)
    )
}

fn qm_verdict_str(v: QmVerdict) -> &'static str {
    match v {
        QmVerdict::Ontic => "ontic",
        QmVerdict::Epistemic => "epistemic",
    }
}

/// Polar angles of the top-eigenvector axis on the open interval of `p₁`
/// are strictly monotone (all increasing or all decreasing).
pub fn strictly_monotone_axis(rows: &[DriftRow]) -> bool {
    if rows.len() < 3 {
        return false;
    }
    let interior = &rows[1..rows.len() - 1];
    let thetas: Option<Vec<f64>> = interior
        .iter()
        .map(|r| {
            r.eigen_axis
                .and_then(BlochVector::spherical_angles)
                .map(|(t, _)| t)
        })
        .collect();
    let Some(thetas) = thetas else { return false };
    if thetas.len() < 2 {
        return true;
    }
    let up = thetas.windows(2).all(|w| w[1] > w[0]);
    let down = thetas.windows(2).all(|w| w[1] < w[0]);
    up || down
}

pub fn drift_row_json(r: &DriftRow) -> Value {
    let angles = r.eigen_axis.and_then(BlochVector::spherical_angles);
    json!({
        "p1": num(r.p1),
        "bloch": r.bloch.map(|b| vec3(b.to_array())),
        "eigen_axis_theta": angles.map(|a| num(a.0)),
        "eigen_axis_phi": angles.map(|a| num(a.1)),
        "degenerate": r.degenerate,
        "vn_entropy_bits": num(r.vn_entropy),
        "min_context_entropy_bits": num(r.min_context_entropy),
    })
}

pub fn uniform_weights(steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps).map(|i| i as f64 / last).collect()
}

fn evaluate(scenario: &Scenario, check: &CheckSpec, tol: f64) -> Outcome {
    match check {
        CheckSpec::BornConsistency {
            model,
            pairs,
            measurements,
            ..
        } => {
            let model = scenario.model(model.as_deref(), "model").map_err(err)?;
            let pairs = pairs
                .iter()
                .map(|p| {
                    let rho = match &p.density {
                        Some(d) => scenario
                            .preparation(d, "density")
                            .map_err(err)?
                            .density
                            .clone(),
                        None => iota(scenario.epistemic(&p.epistemic, "epistemic").map_err(err)?),
                    };
                    Ok((p.epistemic.clone(), rho))
                })
                .collect::<Result<Vec<_>, String>>()?;
            let povms = measurements
                .iter()
                .map(|m| scenario.measurement(m, "measurement").cloned().map_err(err))
                .collect::<Result<Vec<_>, String>>()?;
            let report = verify_born(model, &pairs, &povms, tol).map_err(err)?;
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "preparation": r.preparation,
                        "measurement": r.measurement,
                        "outcome": r.outcome,
                        "lhs": num(r.lhs),
                        "rhs": num(r.rhs),
                        "abs_error": num(r.abs_error),
                    })
                })
                .collect();
            Ok((
                json!({ "max_abs_error": num(report.max_abs_error), "rows": rows }),
                report.passed,
            ))
        }
        CheckSpec::HsOverlap { a, b, expect, .. } => {
            let ea = scenario.epistemic(a, "a").map_err(err)?;
            let eb = scenario.epistemic(b, "b").map_err(err)?;
            let overlap = hs_overlap(ea, eb);
            Ok((json!({ "overlap": overlap }), overlap == *expect))
        }
        CheckSpec::EntropyCompare {
            a,
            b,
            expect_hs_equal,
            expect_vn_equal,
            ..
        } => {
            let ea = scenario.epistemic(a, "a").map_err(err)?;
            let eb = scenario.epistemic(b, "b").map_err(err)?;
            let (ha, hb) = (hs_entropy(ea).map_err(err)?, hs_entropy(eb).map_err(err)?);
            let va = von_neumann_entropy(&iota(ea)).map_err(err)?;
            let vb = von_neumann_entropy(&iota(eb)).map_err(err)?;
            let hs_order = graded_cmp(ha, hb, tol);
            let vn_order = tolerant_cmp(va, vb, tol);
            let hs_equal = hs_order == Ordering::Equal;
            let vn_equal = vn_order == Ordering::Equal;
            let passed = expect_hs_equal.is_none_or(|e| e == hs_equal)
                && expect_vn_equal.is_none_or(|e| e == vn_equal);
            Ok((
                json!({
                    "hs_a": graded_json(ha),
                    "hs_b": graded_json(hb),
                    "vn_a": num(va),
                    "vn_b": num(vb),
                    "hs_equal": hs_equal,
                    "vn_equal": vn_equal,
                    "hs_order": ordering_str(hs_order),
                    "vn_order": ordering_str(vn_order),
                    "order_preserving": hs_order == vn_order,
                }),
                passed,
            ))
        }
        CheckSpec::IotaImage {
            state,
            expect,
            expect_bloch,
            ..
        } => {
            let e = scenario.epistemic(state, "state").map_err(err)?;
            let qtol = scenario.tolerances.quadrature.max(tol);
            let exact = iota(e);
            let approx = iota_quadrature(e);
            let quad_err = exact.matrix().max_abs_diff(approx.matrix());
            let mut passed = quad_err <= qtol;
            let mut values = json!({
                "bloch": bloch_json(&exact)?,
                "bloch_quadrature": bloch_json(&approx)?,
                "quadrature_abs_error": num(quad_err),
                "quadrature_tolerance": num(qtol),
                "vn_entropy": num(von_neumann_entropy(&exact).map_err(err)?),
            });
            if let Some(name) = expect {
                let target = &scenario.preparation(name, "expect").map_err(err)?.density;
                let d = exact.matrix().max_abs_diff(target.matrix());
                values["expected_abs_error"] = num(d);
                passed &= d <= tol;
            }
            if let Some(v) = expect_bloch {
                let got = bloch_vector(&exact).map_err(err)?;
                let ok = got.approx_eq(BlochVector::from_array(*v), tol);
                values["bloch_matches"] = json!(ok);
                passed &= ok;
            }
            Ok((values, passed))
        }
        CheckSpec::Classify {
            model,
            preparations,
            expect,
            ..
        } => {
            let model = scenario.model(model.as_deref(), "model").map_err(err)?;
            let names: Vec<&str> = preparations.iter().map(String::as_str).collect();
            let c = classify(model, &names).map_err(err)?;
            Ok((
                json!({
                    "verdict": c.verdict.as_str(),
                    "witness": c.witness.map(|(a, b)| vec![a, b]),
                    "preparations": c.preparations,
                }),
                verdict_matches(c.verdict, *expect),
            ))
        }
        CheckSpec::QmOverlap { states, expect, .. } => {
            let psis = states
                .iter()
                .map(|s| {
                    let p = scenario.preparation(s, "states").map_err(err)?;
                    p.pure
                        .clone()
                        .ok_or_else(|| format!("preparation `{s}` is not pure"))
                })
                .collect::<Result<Vec<PureState>, String>>()?;
            let v = qm_overlap_classification(&psis).map_err(err)?;
            let expected = match expect {
                ExpectedQmVerdict::Ontic => QmVerdict::Ontic,
                ExpectedQmVerdict::Epistemic => QmVerdict::Epistemic,
            };
            Ok((
                json!({
                    "verdict": qm_verdict_str(v.verdict),
                    "witness": v.witness.map(|w| json!({
                        "first": states[w.first],
                        "second": states[w.second],
                        "overlap": num(w.overlap),
                    })),
                }),
                v.verdict == expected,
            ))
        }
        CheckSpec::ContextDrift {
            a,
            b,
            steps,
            samples,
            expect_monotone,
            ..
        } => {
            let ra = &scenario.preparation(a, "a").map_err(err)?.density;
            let rb = &scenario.preparation(b, "b").map_err(err)?.density;
            let weights = uniform_weights(steps.unwrap_or(DEFAULT_DRIFT_STEPS));
            let samples = samples.unwrap_or(DEFAULT_DRIFT_SAMPLES);
            let rows =
                mixture_context_drift(ra, rb, &weights, scenario.seed, samples).map_err(err)?;
            let monotone = strictly_monotone_axis(&rows);
            let bound_ok = rows
                .iter()
                .all(|r| r.min_context_entropy >= r.vn_entropy - tol);
            Ok((
                json!({
                    "axis_monotone": monotone,
                    "context_bound_holds": bound_ok,
                    "rows": rows.iter().map(drift_row_json).collect::<Vec<_>>(),
                }),
                bound_ok && expect_monotone.is_none_or(|e| e == monotone),
            ))
        }
    }
}

fn inputs(check: &CheckSpec) -> Value {
    match check {
        CheckSpec::BornConsistency {
            model,
            pairs,
            measurements,
            ..
        } => json!({
            "model": model.as_deref().unwrap_or(crate::config::DEFAULT_MODEL),
            "pairs": pairs.iter().map(|p| json!({ "epistemic": p.epistemic, "density": p.density })).collect::<Vec<_>>(),
            "measurements": measurements,
        }),
        CheckSpec::HsOverlap { a, b, expect, .. } => json!({ "a": a, "b": b, "expect": expect }),
        CheckSpec::EntropyCompare {
            a,
            b,
            expect_hs_equal,
            expect_vn_equal,
            ..
        } => json!({
            "a": a, "b": b, "expect_hs_equal": expect_hs_equal, "expect_vn_equal": expect_vn_equal,
        }),
        CheckSpec::IotaImage {
            state,
            expect,
            expect_bloch,
            ..
        } => json!({
            "state": state, "expect": expect, "expect_bloch": expect_bloch.map(vec3),
        }),
        CheckSpec::Classify {
            model,
            preparations,
            expect,
            ..
        } => json!({
            "model": model.as_deref().unwrap_or(crate::config::DEFAULT_MODEL),
            "preparations": preparations,
            "expect": match expect {
                ExpectedVerdict::PsiComplete => Verdict::PsiComplete.as_str(),
                ExpectedVerdict::PsiOnticIncomplete => Verdict::PsiOnticIncomplete.as_str(),
                ExpectedVerdict::PsiEpistemic => Verdict::PsiEpistemic.as_str(),
            },
        }),
        CheckSpec::QmOverlap { states, expect, .. } => json!({
            "states": states,
            "expect": match expect {
                ExpectedQmVerdict::Ontic => "ontic",
                ExpectedQmVerdict::Epistemic => "epistemic",
            },
        }),
        CheckSpec::ContextDrift {
            a,
            b,
            steps,
            samples,
            expect_monotone,
            ..
        } => json!({
            "a": a,
            "b": b,
            "steps": steps.unwrap_or(DEFAULT_DRIFT_STEPS),
            "samples": samples.unwrap_or(DEFAULT_DRIFT_SAMPLES),
            "expect_monotone": expect_monotone,
        }),
    }
}

/// Tolerance a check is judged against, or `None` for purely structural
/// checks.
fn tolerance_for(check: &CheckSpec, policy: &TolerancePolicy) -> Option<f64> {
    match check {
        // Predictions for rings and the sphere go through quadrature.
        CheckSpec::BornConsistency { tolerance, .. } => Some(policy.quadrature(*tolerance)),
        CheckSpec::EntropyCompare { tolerance, .. }
        | CheckSpec::IotaImage { tolerance, .. }
        | CheckSpec::ContextDrift { tolerance, .. } => Some(policy.analytic(*tolerance)),
        CheckSpec::HsOverlap { .. } | CheckSpec::Classify { .. } | CheckSpec::QmOverlap { .. } => {
            None
        }
    }
}

pub fn run_check(
    scenario: &Scenario,
    index: usize,
    check: &CheckSpec,
    policy: &TolerancePolicy,
) -> Record {
    let id = check.id(index);
    let tolerance = tolerance_for(check, policy);
    let inputs = inputs(check);
    match evaluate(scenario, check, tolerance.unwrap_or(policy.analytic(None))) {
        Ok((values, passed)) => Record {
            id,
            kind: check.kind().to_string(),
            inputs,
            values,
            passed,
            tolerance,
            error: None,
        },
        Err(e) => Record::failed(id, check.kind(), inputs, tolerance, e),
    }
}

/// Runs every check, concurrently, and returns records in declaration order.
pub fn run_checks(scenario: &Scenario, policy: &TolerancePolicy) -> Vec<Record> {
    thread::scope(|s| {
        let handles: Vec<_> = scenario
            .checks
            .iter()
            .enumerate()
            .map(|(i, c)| s.spawn(move || run_check(scenario, i, c, policy)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    })
}
