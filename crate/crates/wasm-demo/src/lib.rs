//! Browser bindings for the twin-beam demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` so the page can plot it
//! without any glue beyond the generated bindings.

use twinbeam::tables::{linspace, threshold_curves, uniform_grid};
use twinbeam::{
    evolve, fidelity, threshold_time, wigner_eval, ChannelParams, PhasePoint, TeleportationParams,
    TwinBeamParams,
};
use wasm_bindgen::prelude::*;

fn inputs(
    lambda: f64,
    gamma_rate: f64,
    thermal_m: f64,
) -> twinbeam::Result<(TwinBeamParams, ChannelParams)> {
    Ok((
        TwinBeamParams::from_lambda(lambda)?,
        ChannelParams::new(gamma_rate, thermal_m)?,
    ))
}

/// `[t, Σ₊², Σ₋², F]` for each of `points` times in `[0, t_max]`.
pub fn evolve_curve_values(
    lambda: f64,
    gamma_rate: f64,
    thermal_m: f64,
    t_max: f64,
    points: usize,
) -> twinbeam::Result<Vec<f64>> {
    let (tb, cp) = inputs(lambda, gamma_rate, thermal_m)?;
    let tp = TeleportationParams::default();
    let mut out = Vec::with_capacity(4 * points);
    for t in linspace(0.0, t_max, points)? {
        let v = evolve(&tb, &cp, t)?.variances;
        out.extend([t, v.var_plus, v.var_minus, fidelity(&tb, &cp, t, &tp)?]);
    }
    Ok(out)
}

/// `[N, Γ·t_s]` pairs on the grid `0, step, …, n_max`. Never-separable
/// points come out as `Infinity`.
pub fn threshold_curve_values(thermal_m: f64, n_max: f64, step: f64) -> twinbeam::Result<Vec<f64>> {
    let grid = uniform_grid(n_max, step)?;
    let curves = threshold_curves(&grid, &[thermal_m])?;
    Ok(grid
        .iter()
        .zip(curves.column(0))
        .flat_map(|(&n, t)| [n, t.as_f64()])
        .collect())
}

/// Evolved Wigner function on the `(x₁, x₂)` plane at `y₁ = y₂ = 0`,
/// row-major with `x₂` varying slowest, over `[-extent, extent]²`.
pub fn wigner_slice_values(
    lambda: f64,
    gamma_rate: f64,
    thermal_m: f64,
    t: f64,
    extent: f64,
    pixels: usize,
) -> twinbeam::Result<Vec<f64>> {
    let (tb, cp) = inputs(lambda, gamma_rate, thermal_m)?;
    let v = evolve(&tb, &cp, t)?.variances;
    let axis = linspace(-extent, extent, pixels)?;
    let mut out = Vec::with_capacity(pixels * pixels);
    for &x2 in &axis {
        for &x1 in &axis {
            out.push(wigner_eval(&v, &PhasePoint::new(x1, 0.0, x2, 0.0)?));
        }
    }
    Ok(out)
}

fn js(e: twinbeam::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn evolve_curve(
    lambda: f64,
    gamma_rate: f64,
    thermal_m: f64,
    t_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    evolve_curve_values(lambda, gamma_rate, thermal_m, t_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn threshold_curve(thermal_m: f64, n_max: f64, step: f64) -> Result<Vec<f64>, JsError> {
    threshold_curve_values(thermal_m, n_max, step).map_err(js)
}

#[wasm_bindgen]
pub fn wigner_slice(
    lambda: f64,
    gamma_rate: f64,
    thermal_m: f64,
    t: f64,
    extent: f64,
    pixels: usize,
) -> Result<Vec<f64>, JsError> {
    wigner_slice_values(lambda, gamma_rate, thermal_m, t, extent, pixels).map_err(js)
}

/// Threshold time for the given source and channel; `Infinity` for pure loss.
#[wasm_bindgen]
pub fn threshold(lambda: f64, gamma_rate: f64, thermal_m: f64) -> Result<f64, JsError> {
    let (tb, cp) = inputs(lambda, gamma_rate, thermal_m).map_err(js)?;
    Ok(threshold_time(&tb, &cp).as_f64())
}
