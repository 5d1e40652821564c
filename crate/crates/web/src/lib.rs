//! Browser bindings for the spinchan demo page.
//!
//! Each exported function returns a JSON string. The plain Rust functions
//! below do the work and are tested natively; the `wasm_bindgen` wrappers
//! only convert errors into JavaScript exceptions.

use serde_json::json;
use wasm_bindgen::prelude::*;

use spinchan::bipartite::{entropy_curve, CurveBases};
use spinchan::entropy::{min_output_entropy_with, MinEntropyOptions};
use spinchan::numerics::eigenvalues;
use spinchan::report;
use spinchan::{
    bloch_to_state, build_isotropic, build_transpose_depolarizing, state_to_bloch, Basis,
    BlochVector, KrausChannel, Spin, Units,
};

/// Largest restart count accepted from the page.
pub const MAX_RESTARTS: usize = 256;

fn units(bits: bool) -> Units {
    if bits {
        Units::Bits
    } else {
        Units::Nats
    }
}

/// Two-use entropy of the spin-1/2 channel along the Schmidt edge, as
/// `[{lambda1, eigenvalues, entropy_<unit>}, ...]`.
pub fn curve_json(grid: usize, bits: bool) -> Result<String, String> {
    if !(3..=2001).contains(&grid) {
        return Err(format!("grid must be between 3 and 2001, got {grid}"));
    }
    let u = units(bits);
    let points = entropy_curve(grid, &CurveBases::Canonical).map_err(|e| e.to_string())?;
    let rows: Vec<_> = points
        .iter()
        .map(|p| {
            let mut row = serde_json::Map::new();
            row.insert("lambda1".into(), json!(p.lambda1));
            row.insert("eigenvalues".into(), json!(p.eigenvalues));
            row.insert(u.field("entropy"), json!(u.convert(p.entropy_nats)));
            serde_json::Value::Object(row)
        })
        .collect();
    report::to_json(&rows).map_err(|e| e.to_string())
}

/// Image of a Bloch vector under the spin-1/2 channel, with the output spectrum.
pub fn bloch_image_json(s1: f64, s2: f64, s3: f64) -> Result<String, String> {
    let b = BlochVector::new(s1, s2, s3).map_err(|e| e.to_string())?;
    let ch = build_isotropic(Spin::Half, Basis::Magnetic).map_err(|e| e.to_string())?;
    let rho = bloch_to_state(&b).map_err(|e| e.to_string())?;
    let out = ch.apply(&rho).map_err(|e| e.to_string())?;
    let image = state_to_bloch(&out).map_err(|e| e.to_string())?;
    let spectrum = eigenvalues(out.matrix()).map_err(|e| e.to_string())?;
    report::to_json(&json!({
        "input": b.components(),
        "output": image.components(),
        "output_spectrum": spectrum,
    }))
    .map_err(|e| e.to_string())
}

fn channel_by_name(name: &str, dim: usize) -> Result<KrausChannel, String> {
    let ch = match name {
        "phi-half" => build_isotropic(Spin::Half, Basis::Magnetic),
        "phi-one" => build_isotropic(Spin::One, Basis::Cartesian),
        "phi-one-magnetic" => build_isotropic(Spin::One, Basis::Magnetic),
        "transpose-depolarizing" => build_transpose_depolarizing(dim),
        other => return Err(format!("unknown channel {other:?}")),
    };
    ch.map_err(|e| e.to_string())
}

/// Minimum output entropy report for a named channel.
pub fn min_entropy_json(
    channel: &str,
    dim: usize,
    restarts: usize,
    seed: u64,
    bits: bool,
) -> Result<String, String> {
    if !(1..=MAX_RESTARTS).contains(&restarts) {
        return Err(format!("restarts must be between 1 and {MAX_RESTARTS}"));
    }
    let ch = channel_by_name(channel, dim)?;
    let report = min_output_entropy_with(
        &ch,
        &MinEntropyOptions {
            restarts,
            seed,
            ..MinEntropyOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let mut value = report.to_json_value(units(bits));
    value["label"] = json!(ch.label());
    value["dim"] = json!(ch.dim());
    value["objective_evals"] = json!(report.objective_evals);
    report::to_json(&value).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = entropyCurve)]
pub fn entropy_curve_js(grid: usize, bits: bool) -> Result<String, JsError> {
    curve_json(grid, bits).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = blochImage)]
pub fn bloch_image_js(s1: f64, s2: f64, s3: f64) -> Result<String, JsError> {
    bloch_image_json(s1, s2, s3).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = minEntropy)]
pub fn min_entropy_js(
    channel: &str,
    dim: usize,
    restarts: usize,
    seed: u32,
    bits: bool,
) -> Result<String, JsError> {
    min_entropy_json(channel, dim, restarts, seed as u64, bits).map_err(|e| JsError::new(&e))
}
