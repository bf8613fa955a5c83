//! Coherent-state teleportation through the evolved twin-beam.
//!
//! With unit gain, the teleported state of a coherent input keeps its mean
//! and acquires an extra `2Σ₋²` of variance per quadrature. The overlap with
//! the input then gives `F = 1/(1 + 4Σ₋²)`.

use serde::{Deserialize, Serialize};

use crate::channel::{evolve, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{TwinBeamParams, VariancePair, VACUUM_VARIANCE};

/// Efficiency `η ∈ (0, 1]`, entering the fidelity as the additive term
/// `(1−η)/η` in the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportationParams {
    eta: f64,
}

impl TeleportationParams {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::domain(format!("eta must lie in (0, 1], got {eta}")));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    fn penalty(&self) -> f64 {
        (1.0 - self.eta) / self.eta
    }
}

impl Default for TeleportationParams {
    fn default() -> Self {
        Self { eta: 1.0 }
    }
}

/// Isotropic single-mode Gaussian Wigner function: displacement
/// `(mean_x, mean_y)` and per-quadrature variance `var`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentGaussian {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var: f64,
}

impl CoherentGaussian {
    pub fn new(mean_x: f64, mean_y: f64, var: f64) -> Result<Self> {
        if !(mean_x.is_finite() && mean_y.is_finite()) {
            return Err(Error::domain("displacement must be finite"));
        }
        if !(var.is_finite() && var > 0.0) {
            return Err(Error::domain(format!(
                "variance must be positive, got {var}"
            )));
        }
        Ok(Self {
            mean_x,
            mean_y,
            var,
        })
    }

    /// Coherent state with amplitude `(mean_x, mean_y)`.
    pub fn coherent(mean_x: f64, mean_y: f64) -> Result<Self> {
        Self::new(mean_x, mean_y, VACUUM_VARIANCE)
    }

    /// Wigner function at `(x, y)`.
    pub fn wigner(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        (-(dx * dx + dy * dy) / (2.0 * self.var)).exp() / (2.0 * std::f64::consts::PI * self.var)
    }
}

/// Output state of unit-gain teleportation of a coherent `input` using a
/// shared state with variances `channel_state`.
pub fn teleport_coherent(
    input: &CoherentGaussian,
    channel_state: &VariancePair,
) -> Result<CoherentGaussian> {
    if (input.var - VACUUM_VARIANCE).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "only coherent inputs (variance 1/4) are modelled, got variance {}",
            input.var
        )));
    }
    if channel_state.var_minus.is_nan() || channel_state.var_minus < 0.0 {
        return Err(Error::domain("channel variance must be non-negative"));
    }
    Ok(CoherentGaussian {
        mean_x: input.mean_x,
        mean_y: input.mean_y,
        var: input.var + 2.0 * channel_state.var_minus,
    })
}

/// Overlap `π ∫ W_a W_b dx dy` of two isotropic Gaussians, equal to
/// `exp(−|Δμ|²/(2(v_a+v_b))) / (2(v_a+v_b))`. This is the fidelity when
/// `a` is pure.
pub fn gaussian_overlap_fidelity(a: &CoherentGaussian, b: &CoherentGaussian) -> Result<f64> {
    if !(a.var > 0.0 && b.var > 0.0) {
        return Err(Error::domain("variances must be positive"));
    }
    let s = a.var + b.var;
    let d2 = (a.mean_x - b.mean_x).powi(2) + (a.mean_y - b.mean_y).powi(2);
    Ok((-d2 / (2.0 * s)).exp() / (2.0 * s))
}

/// Teleportation fidelity `1/(1 + 4Σ₋² + (1−η)/η)` after time `t`.
pub fn fidelity(
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    t: f64,
    tp: &TeleportationParams,
) -> Result<f64> {
    let v = evolve(tb, cp, t)?.variances;
    Ok(1.0 / (1.0 + 4.0 * v.var_minus + tp.penalty()))
}

/// The same fidelity written out in the channel parameters,
/// `1/(1 + e^{−2λ−Γt} + (1−e^{−Γt})(2M+1) + (1−η)/η)`.
pub fn fidelity_expanded(
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    t: f64,
    tp: &TeleportationParams,
) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let gt = cp.gamma_rate() * t;
    let denom = 1.0
        + (-2.0 * tb.lambda() - gt).exp()
        + (1.0 - (-gt).exp()) * (2.0 * cp.m_thermal() + 1.0)
        + tp.penalty();
    Ok(1.0 / denom)
}

/// How the classical bound `F = 1/2` itself is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FidelityBound {
    /// Quantum iff `F > 1/2`; the boundary state is separable, so it counts
    /// as classical.
    #[default]
    Strict,
    /// Quantum iff `F ≥ 1/2`.
    Inclusive,
}

/// Whether teleportation beats the classical bound, at unit efficiency.
pub fn quantum_teleportation_possible(
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    t: f64,
) -> Result<bool> {
    quantum_teleportation_possible_with(tb, cp, t, FidelityBound::Strict)
}

pub fn quantum_teleportation_possible_with(
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    t: f64,
    bound: FidelityBound,
) -> Result<bool> {
    let f = fidelity(tb, cp, t, &TeleportationParams::default())?;
    Ok(beats_classical(f, bound))
}

/// Compare a fidelity with the classical bound 1/2.
pub fn beats_classical(fidelity: f64, bound: FidelityBound) -> bool {
    match bound {
        FidelityBound::Strict => fidelity > 0.5,
        FidelityBound::Inclusive => fidelity >= 0.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::initial_variances;
    use approx::assert_relative_eq;

    fn tb(lambda: f64) -> TwinBeamParams {
        TwinBeamParams::from_lambda(lambda).unwrap()
    }

    fn cp(g: f64, m: f64) -> ChannelParams {
        ChannelParams::new(g, m).unwrap()
    }

    #[test]
    fn eta_validation() {
        assert!(TeleportationParams::new(0.0).is_err());
        assert!(TeleportationParams::new(1.01).is_err());
        assert!(TeleportationParams::new(f64::NAN).is_err());
        assert_eq!(
            TeleportationParams::new(1.0).unwrap(),
            TeleportationParams::default()
        );
    }

    #[test]
    fn ideal_channel_is_perfect() {
        let z = CoherentGaussian::coherent(0.4, -1.2).unwrap();
        let ideal = VariancePair {
            var_plus: 1e9,
            var_minus: 0.0,
        };
        let out = teleport_coherent(&z, &ideal).unwrap();
        assert_eq!(out, z);
        assert_eq!(gaussian_overlap_fidelity(&z, &out).unwrap(), 1.0);
    }

    #[test]
    fn pure_twin_beam_output() {
        let z = CoherentGaussian::coherent(1.0, 0.5).unwrap();
        let lambda = 0.8;
        let out = teleport_coherent(&z, &initial_variances(&tb(lambda))).unwrap();
        assert_relative_eq!(
            out.var,
            0.25 + 0.5 * (-2.0 * lambda).exp(),
            max_relative = 1e-14
        );
        let f = gaussian_overlap_fidelity(&z, &out).unwrap();
        assert_relative_eq!(f, 1.0 / (1.0 + (-2.0 * lambda).exp()), max_relative = 1e-14);
    }

    #[test]
    fn boundary_channel_gives_one_half() {
        let z = CoherentGaussian::coherent(0.0, 0.0).unwrap();
        let out = teleport_coherent(&z, &VariancePair::vacuum()).unwrap();
        assert_relative_eq!(out.var, 0.75, max_relative = 1e-15);
        assert_relative_eq!(
            gaussian_overlap_fidelity(&z, &out).unwrap(),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn non_coherent_input_rejected() {
        let sq = CoherentGaussian::new(0.0, 0.0, 0.3).unwrap();
        assert!(teleport_coherent(&sq, &VariancePair::vacuum()).is_err());
        assert!(CoherentGaussian::new(0.0, 0.0, -0.3).is_err());
    }

    #[test]
    fn overlap_closed_forms() {
        let a = CoherentGaussian::coherent(0.0, 0.0).unwrap();
        assert_eq!(gaussian_overlap_fidelity(&a, &a).unwrap(), 1.0);
        let b = CoherentGaussian::new(0.0, 0.0, 0.75).unwrap();
        assert_eq!(gaussian_overlap_fidelity(&a, &b).unwrap(), 0.5);
        let c = CoherentGaussian::coherent(1.0, 0.0).unwrap();
        assert_relative_eq!(
            gaussian_overlap_fidelity(&a, &c).unwrap(),
            (-1.0_f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn fidelity_values() {
        let one = TeleportationParams::default();
        assert_eq!(fidelity(&tb(0.0), &cp(1.0, 0.5), 0.0, &one).unwrap(), 0.5);
        let f = fidelity(&tb(1.0), &cp(1.0, 0.5), 0.0, &one).unwrap();
        assert_relative_eq!(f, 1.0 / (1.0 + (-2.0_f64).exp()), max_relative = 1e-14);
        assert_relative_eq!(f, 0.880797, epsilon = 1e-6);
        let f = fidelity(&tb(0.5), &cp(1.0, 0.5), 0.2, &one).unwrap();
        let g = fidelity_expanded(&tb(0.5), &cp(1.0, 0.5), 0.2, &one).unwrap();
        assert_relative_eq!(f, g, max_relative = 1e-12);
        assert_relative_eq!(f, 0.601059, epsilon = 1e-6);
    }

    #[test]
    fn efficiency_lowers_fidelity() {
        let (t, c) = (tb(0.7), cp(1.0, 0.2));
        let full = fidelity(&t, &c, 0.1, &TeleportationParams::default()).unwrap();
        let half = fidelity(&t, &c, 0.1, &TeleportationParams::new(0.5).unwrap()).unwrap();
        assert!(half < full);
        let exp = fidelity_expanded(&t, &c, 0.1, &TeleportationParams::new(0.5).unwrap()).unwrap();
        assert_relative_eq!(half, exp, max_relative = 1e-12);
    }

    #[test]
    fn quantum_regime_matches_threshold() {
        let (t, c) = (tb(1.0), cp(1.0, 0.5));
        let ts = crate::separability::threshold_time(&t, &c).value().unwrap();
        assert!(quantum_teleportation_possible(&t, &c, 0.9 * ts).unwrap());
        assert!(!quantum_teleportation_possible(&t, &c, 1.1 * ts).unwrap());
        assert!(!quantum_teleportation_possible(&tb(0.0), &c, 0.0).unwrap());
        assert!(
            quantum_teleportation_possible_with(&tb(0.0), &c, 0.0, FidelityBound::Inclusive)
                .unwrap()
        );
    }
}
