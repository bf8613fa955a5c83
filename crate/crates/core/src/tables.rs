//! Tabulated sweeps shared by the command-line tool and the browser demo.

use serde::{Deserialize, Serialize};

use crate::channel::{evolve, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::TwinBeamParams;
use crate::separability::{threshold_time, variance_criterion, Threshold};
use crate::teleportation::{fidelity, TeleportationParams};

/// Thermal photon numbers of the reference threshold curves.
pub const REFERENCE_M_VALUES: [f64; 4] = [0.1, 0.3, 0.7, 1.0];
/// Largest photon number of the reference threshold curves.
pub const REFERENCE_N_MAX: f64 = 20.0;
/// Photon-number spacing of the reference threshold curves.
pub const REFERENCE_N_STEP: f64 = 0.1;

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) {
        return Err(Error::domain("grid bounds must be finite"));
    }
    match points {
        0 => Err(Error::domain("grid needs at least one point")),
        1 if start == stop => Ok(vec![start]),
        1 => Err(Error::domain("a single-point grid needs start == stop")),
        _ if stop <= start => Err(Error::domain(format!(
            "grid must be strictly increasing, got [{start}, {stop}]"
        ))),
        _ => {
            let n = (points - 1) as f64;
            Ok((0..points)
                .map(|i| {
                    if i + 1 == points {
                        stop
                    } else {
                        start + (stop - start) * i as f64 / n
                    }
                })
                .collect())
        }
    }
}

/// Grid `0, step, 2·step, …, max`. When `1/step` is a whole number the
/// nodes are `i/(1/step)`, so decimal steps land on the nearest double.
pub fn uniform_grid(max: f64, step: f64) -> Result<Vec<f64>> {
    if !(max > 0.0 && step > 0.0 && max.is_finite()) {
        return Err(Error::domain(format!(
            "invalid grid (max {max}, step {step})"
        )));
    }
    let count = (max / step).round().max(1.0) as usize;
    let per_unit = (1.0 / step).round();
    let node = |i: usize| {
        if i == count {
            max
        } else if per_unit >= 1.0 && (per_unit * step - 1.0).abs() < 1e-12 {
            i as f64 / per_unit
        } else {
            max * i as f64 / count as f64
        }
    };
    Ok((0..=count).map(node).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveRow {
    pub t: f64,
    pub tau: f64,
    pub sigma_plus_sq: f64,
    pub sigma_minus_sq: f64,
    pub separable: bool,
    pub fidelity: f64,
}

pub fn evolve_table(
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    times: &[f64],
    tp: &TeleportationParams,
) -> Result<Vec<EvolveRow>> {
    times
        .iter()
        .map(|&t| {
            let r = evolve(tb, cp, t)?;
            Ok(EvolveRow {
                t,
                tau: r.tau,
                sigma_plus_sq: r.variances.var_plus,
                sigma_minus_sq: r.variances.var_minus,
                separable: variance_criterion(&r.variances)?.separable,
                fidelity: fidelity(tb, cp, t, tp)?,
            })
        })
        .collect()
}

/// Threshold time (in units of `1/Γ`) against twin-beam photon number, one
/// curve per thermal photon number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCurves {
    pub n_values: Vec<f64>,
    pub m_values: Vec<f64>,
    /// `rows[i][j]` is the threshold at `n_values[i]` for `m_values[j]`.
    pub rows: Vec<Vec<Threshold>>,
}

impl ThresholdCurves {
    pub fn column(&self, j: usize) -> Vec<Threshold> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

pub fn threshold_curves(n_values: &[f64], m_values: &[f64]) -> Result<ThresholdCurves> {
    let channels = m_values
        .iter()
        .map(|&m| ChannelParams::new(1.0, m))
        .collect::<Result<Vec<_>>>()?;
    let rows = n_values
        .iter()
        .map(|&n| {
            let tb = TwinBeamParams::from_photon_number(n)?;
            Ok(channels.iter().map(|cp| threshold_time(&tb, cp)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurves {
        n_values: n_values.to_vec(),
        m_values: m_values.to_vec(),
        rows,
    })
}

/// The reference threshold curves: `N ∈ [0, 20]` in steps of 0.1 and
/// `M ∈ {0.1, 0.3, 0.7, 1.0}`.
pub fn reference_curves() -> Result<ThresholdCurves> {
    threshold_curves(
        &uniform_grid(REFERENCE_N_MAX, REFERENCE_N_STEP)?,
        &REFERENCE_M_VALUES,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_shapes() {
        assert_eq!(linspace(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 2.0, 1).unwrap(), vec![2.0]);
        assert!(linspace(1.0, 0.0, 3).is_err());
        assert!(linspace(0.0, 1.0, 0).is_err());
        assert!(linspace(0.0, 1.0, 1).is_err());
        assert!(linspace(0.0, f64::NAN, 4).is_err());
    }

    #[test]
    fn uniform_grid_is_clean() {
        let g = uniform_grid(20.0, 0.1).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[200], 20.0);
        let short = uniform_grid(0.3, 0.1).unwrap();
        assert_eq!(short, vec![0.0, 0.1, 0.2, 0.3]);
        let odd = uniform_grid(1.0, 0.3).unwrap();
        assert_eq!(odd.len(), 4);
        assert_eq!(odd[3], 1.0);
    }

    #[test]
    fn reference_first_row_is_zero() {
        let c = reference_curves().unwrap();
        assert!(c.rows[0].iter().all(|t| *t == Threshold::Finite(0.0)));
        assert_eq!(c.rows.len(), 201);
    }

    #[test]
    fn evolve_table_flags() {
        let tb = TwinBeamParams::from_lambda(1.0).unwrap();
        let cp = ChannelParams::new(1.0, 0.5).unwrap();
        let rows = evolve_table(&tb, &cp, &[0.0, 2.0], &TeleportationParams::default()).unwrap();
        assert!(!rows[0].separable);
        assert!(rows[1].separable);
        assert!(rows[0].fidelity > 0.5 && rows[1].fidelity < 0.5);
    }
}
