//! Built-in reproduction of the qubit cases A–D and the overlap
//! demonstrations, each record judged against embedded golden values.

use ontic_core::hs_model::{hs_entropy, hs_overlap, iota, iota_quadrature, EpistemicState};
use ontic_core::onto_model::{
    psi_complete_qubit_model, qm_overlap_classification, verify_born, QmVerdict,
};
use ontic_core::qcore::{
    bloch_vector, pure_from_bloch, von_neumann_entropy, BlochVector, DensityMatrix, Povm,
};
use serde_json::{json, Value};
use std::f64::consts::FRAC_PI_2;

use crate::checks::graded_json;
use crate::report::{num, vec3, Record, Report};

pub const ANALYTIC_TOL: f64 = 1e-9;
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Slack on an entropy printed to four decimals.
pub const DISPLAY_TOL: f64 = 5e-4;

struct Golden {
    name: &'static str,
    grade: u8,
    hs_value: f64,
    bloch: [f64; 3],
    vn: f64,
    /// `vn` is a four-decimal display value rather than an exact one.
    vn_display: bool,
}

const CASES: [Golden; 4] = [
    Golden {
        name: "A",
        grade: 0,
        hs_value: 1.0,
        bloch: [0.0, 0.0, 0.0],
        vn: 1.0,
        vn_display: false,
    },
    Golden {
        name: "B",
        grade: 1,
        hs_value: 0.0,
        bloch: [0.0, 0.0, 0.0],
        vn: 1.0,
        vn_display: false,
    },
    Golden {
        name: "C",
        grade: 2,
        hs_value: 0.0,
        bloch: [0.0, 0.0, 0.0],
        vn: 1.0,
        vn_display: false,
    },
    Golden {
        name: "D",
        grade: 0,
        hs_value: 1.0,
        bloch: [0.5, 0.0, 0.5],
        vn: 0.6009,
        vn_display: true,
    },
];

fn state(name: &str) -> EpistemicState {
    match name {
        "A" => EpistemicState::case_a(),
        "B" => EpistemicState::case_b(),
        "C" => EpistemicState::case_c(),
        "D" => EpistemicState::case_d(),
        _ => unreachable!("unknown case {name}"),
    }
}

fn bloch(rho: &DensityMatrix) -> Result<BlochVector, String> {
    bloch_vector(rho).map_err(|e| e.to_string())
}

fn record(
    id: &str,
    kind: &str,
    inputs: Value,
    tolerance: Option<f64>,
    body: Result<(Value, bool), String>,
) -> Record {
    match body {
        Ok((values, passed)) => Record {
            id: id.to_string(),
            kind: kind.to_string(),
            inputs,
            values,
            passed,
            tolerance,
            error: None,
        },
        Err(e) => Record::failed(id.to_string(), kind, inputs, tolerance, e),
    }
}

fn case_record(g: &Golden) -> Record {
    let inputs = json!({
        "state": g.name,
        "expected": {
            "hs_grade": g.grade,
            "hs_value": num(g.hs_value),
            "bloch": vec3(g.bloch),
            "vn_entropy": num(g.vn),
        },
    });
    let body = (|| {
        let e = state(g.name);
        let hs = hs_entropy(&e).map_err(|e| e.to_string())?;
        let image = iota(&e);
        let image_q = iota_quadrature(&e);
        let (b, bq) = (bloch(&image)?, bloch(&image_q)?);
        let vn = von_neumann_entropy(&image).map_err(|e| e.to_string())?;
        let golden = BlochVector::from_array(g.bloch);
        let vn_tol = if g.vn_display {
            DISPLAY_TOL
        } else {
            ANALYTIC_TOL
        };
        let passed = hs.grade == g.grade
            && (hs.value - g.hs_value).abs() <= ANALYTIC_TOL
            && b.approx_eq(golden, ANALYTIC_TOL)
            && bq.approx_eq(golden, QUADRATURE_TOL)
            && (vn - g.vn).abs() <= vn_tol;
        Ok((
            json!({
                "hs_grade": hs.grade,
                "hs_value": num(hs.value),
                "bloch": vec3(b.to_array()),
                "bloch_quadrature": vec3(bq.to_array()),
                "vn_entropy": num(vn),
                "vn_display": format!("{vn:.4}"),
            }),
            passed,
        ))
    })();
    record(
        &format!("case-{}", g.name),
        "case_row",
        inputs,
        Some(ANALYTIC_TOL),
        body,
    )
}

fn grade_collapse() -> Record {
    let body = (|| {
        let (a, b, c) = (
            EpistemicState::case_a(),
            EpistemicState::case_b(),
            EpistemicState::case_c(),
        );
        let grades: Vec<u8> = [&a, &b, &c]
            .iter()
            .map(|e| hs_entropy(e).map(|h| h.grade))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let (ia, ib, ic) = (iota(&a), iota(&b), iota(&c));
        let spread = ia
            .matrix()
            .max_abs_diff(ib.matrix())
            .max(ib.matrix().max_abs_diff(ic.matrix()));
        let ab = hs_overlap(&a, &b);
        let bc = hs_overlap(&b, &c);
        let passed = grades == [0, 1, 2] && spread <= ANALYTIC_TOL && !ab && !bc;
        Ok((
            json!({
                "grades": grades,
                "image_spread": num(spread),
                "images_identical": spread <= ANALYTIC_TOL,
                "overlap_A_B": ab,
                "overlap_B_C": bc,
            }),
            passed,
        ))
    })();
    record(
        "grade-collapse",
        "grade_collapse",
        json!({ "states": ["A", "B", "C"], "expected": { "grades": [0, 1, 2], "overlap_A_B": false, "overlap_B_C": false } }),
        Some(ANALYTIC_TOL),
        body,
    )
}

fn order_violation() -> Record {
    let body = (|| {
        let (a, d) = (EpistemicState::case_a(), EpistemicState::case_d());
        let (ha, hd) = (
            hs_entropy(&a).map_err(|e| e.to_string())?,
            hs_entropy(&d).map_err(|e| e.to_string())?,
        );
        let va = von_neumann_entropy(&iota(&a)).map_err(|e| e.to_string())?;
        let vd = von_neumann_entropy(&iota(&d)).map_err(|e| e.to_string())?;
        let hs_equal = ha.grade == hd.grade && (ha.value - hd.value).abs() <= ANALYTIC_TOL;
        let vn_equal = (va - vd).abs() <= ANALYTIC_TOL;
        let order_preserving = hs_equal == vn_equal;
        Ok((
            json!({
                "hs_A": graded_json(ha),
                "hs_D": graded_json(hd),
                "vn_A": num(va),
                "vn_D": num(vd),
                "order_preserving": order_preserving,
            }),
            hs_equal && !vn_equal && !order_preserving,
        ))
    })();
    record(
        "order-violation",
        "order_violation",
        json!({ "states": ["A", "D"], "expected": { "order_preserving": false } }),
        Some(ANALYTIC_TOL),
        body,
    )
}

fn hs_nonoverlap() -> Record {
    let overlap = hs_overlap(&EpistemicState::case_a(), &EpistemicState::x_pair());
    record(
        "overlap-A-x_pair",
        "support_overlap",
        json!({ "a": "A", "b": "x_pair", "expected": { "overlap": false } }),
        None,
        Ok((json!({ "overlap": overlap }), !overlap)),
    )
}

fn qm_overlap() -> Record {
    let body = (|| {
        let states = [
            pure_from_bloch(0.0, 0.0).map_err(|e| e.to_string())?,
            pure_from_bloch(FRAC_PI_2, 0.0).map_err(|e| e.to_string())?,
        ];
        let v = qm_overlap_classification(&states).map_err(|e| e.to_string())?;
        let overlap = v.witness.map_or(0.0, |w| w.overlap);
        let epistemic = v.verdict == QmVerdict::Epistemic;
        Ok((
            json!({
                "verdict": if epistemic { "epistemic" } else { "ontic" },
                "trace_overlap": num(overlap),
            }),
            epistemic && (overlap - 0.5).abs() <= ANALYTIC_TOL,
        ))
    })();
    record(
        "qm-overlap-z+_x+",
        "state_overlap",
        json!({ "states": ["z+", "x+"], "expected": { "verdict": "epistemic", "trace_overlap": 0.5 } }),
        Some(ANALYTIC_TOL),
        body,
    )
}

fn born_consistency() -> Record {
    let model = psi_complete_qubit_model();
    let names: Vec<String> = model.preparations().map(|(n, _)| n.to_string()).collect();
    let body = (|| {
        let pairs: Vec<(String, DensityMatrix)> = model
            .preparations()
            .map(|(n, e)| (n.to_string(), iota(e)))
            .collect();
        let povms = [Povm::pauli_x(), Povm::pauli_y(), Povm::pauli_z()];
        let report =
            verify_born(&model, &pairs, &povms, QUADRATURE_TOL).map_err(|e| e.to_string())?;
        Ok((
            json!({ "max_abs_error": num(report.max_abs_error), "rows": report.rows.len() }),
            report.passed,
        ))
    })();
    record(
        "born-consistency",
        "builtin_born_consistency",
        json!({ "model": "psi_complete", "preparations": names, "measurements": ["x", "y", "z"] }),
        Some(QUADRATURE_TOL),
        body,
    )
}

/// Every record of the case report, in a fixed order.
pub fn run_paper_cases(seed: u64) -> Report {
    let mut records: Vec<Record> = CASES.iter().map(case_record).collect();
    records.push(grade_collapse());
    records.push(hs_nonoverlap());
    records.push(qm_overlap());
    records.push(order_violation());
    records.push(born_consistency());
    // The seed is echoed for uniformity; no record here samples.
    Report::new("paper-cases", seed, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_golden_values_match() {
        let r = run_paper_cases(0);
        for rec in &r.records {
            assert!(rec.passed, "{rec:#?}");
        }
        assert_eq!(r.summary.total, 9);
    }

    #[test]
    fn case_d_displays_rounded_entropy() {
        let d = case_record(&CASES[3]);
        assert_eq!(d.values["vn_display"], "0.6009");
    }
}
