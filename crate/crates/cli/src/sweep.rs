//! Entropy and privileged-context sweep over `p₁ρ₁ + (1 − p₁)ρ₂`.

use ontic_core::contextual::{mixture_context_drift, DriftRow};
use ontic_core::qcore::{BlochVector, DensityMatrix};

use crate::checks::uniform_weights;

pub const HEADER: [&str; 9] = [
    "p1",
    "bloch_x",
    "bloch_y",
    "bloch_z",
    "eigen_axis_theta",
    "eigen_axis_phi",
    "degenerate_flag",
    "vn_entropy_bits",
    "min_context_entropy_bits",
];

/// Drift rows at `steps` evenly spaced weights covering `[0, 1]`.
pub fn sweep_rows(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    steps: usize,
    seed: u64,
    samples: usize,
) -> Result<Vec<DriftRow>, String> {
    if steps < 2 {
        return Err(format!("--steps must be at least 2, got {steps}"));
    }
    mixture_context_drift(rho1, rho2, &uniform_weights(steps), seed, samples)
        .map_err(|e| e.to_string())
}

/// Shortest round-trip decimal; exponent form for magnitudes where plain
/// notation would need long runs of zeros.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// CSV with a header row and LF line endings. Axis angles are blank where
/// the mixture is degenerate; the flag column is `1` there and `0` elsewhere.
pub fn to_csv(rows: &[DriftRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for r in rows {
        let b = r.bloch.map(BlochVector::to_array);
        let angles = r.eigen_axis.and_then(BlochVector::spherical_angles);
        w.write_record([
            format_float(r.p1),
            opt(b.map(|v| v[0])),
            opt(b.map(|v| v[1])),
            opt(b.map(|v| v[2])),
            opt(angles.map(|a| a.0)),
            opt(angles.map(|a| a.1)),
            u8::from(r.degenerate).to_string(),
            format_float(r.vn_entropy),
            format_float(r.min_context_entropy),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}
