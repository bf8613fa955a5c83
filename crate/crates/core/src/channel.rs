//! Thermal loss/amplification channel acting identically on both beams.
//!
//! Each quadrature undergoes an Ornstein-Uhlenbeck relaxation: the mean decays
//! as `e^{−Γt/2}` and the variance relaxes from its initial value to the
//! thermal value `(2M+1)/4` as `e^{−Γt}`. Two clocks are exposed, the
//! physical time `t` and the rescaled time `τ = Γ t / γ` with drift
//! `γ = 1/(2M+1)`; note `γτ = Γt`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    initial_variances, wigner_eval, PhasePoint, TwinBeamParams, VariancePair, VACUUM_VARIANCE,
};

/// Damping rate Γ and thermal photon number M of the (identical) fibres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    gamma_rate: f64,
    m_thermal: f64,
}

impl ChannelParams {
    pub fn new(gamma_rate: f64, m_thermal: f64) -> Result<Self> {
        if !gamma_rate.is_finite() || gamma_rate <= 0.0 {
            return Err(Error::domain(format!(
                "damping rate must be positive and finite, got {gamma_rate}"
            )));
        }
        if !m_thermal.is_finite() || m_thermal < 0.0 {
            return Err(Error::domain(format!(
                "thermal photon number must be finite and non-negative, got {m_thermal}"
            )));
        }
        Ok(Self {
            gamma_rate,
            m_thermal,
        })
    }

    pub fn gamma_rate(&self) -> f64 {
        self.gamma_rate
    }

    pub fn m_thermal(&self) -> f64 {
        self.m_thermal
    }

    /// Drift coefficient `γ = 1/(2M+1)`.
    pub fn drift(&self) -> f64 {
        drift_coefficient(self)
    }

    /// Per-quadrature variance of the stationary thermal state, `(2M+1)/4`.
    pub fn thermal_variance(&self) -> f64 {
        VACUUM_VARIANCE * (2.0 * self.m_thermal + 1.0)
    }

    /// Rescaled time `τ = Γ t (2M+1)`.
    pub fn tau(&self, t: f64) -> f64 {
        self.gamma_rate * t / self.drift()
    }
}

pub fn drift_coefficient(cp: &ChannelParams) -> f64 {
    1.0 / (2.0 * cp.m_thermal + 1.0)
}

/// Diffusion `D² = (1/4γ)(1 − e^{−γτ})` accumulated after time `t`.
pub fn diffusion(cp: &ChannelParams, t: f64) -> f64 {
    let gamma_tau = cp.gamma_rate * t;
    (-(-gamma_tau).exp_m1()) / (4.0 * cp.drift())
}

/// Output of [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResult {
    pub variances: VariancePair,
    pub time: f64,
    pub tau: f64,
    pub diffusion: f64,
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!(
            "evolution time must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

/// Evolve an arbitrary variance pair through the channel for time `t`.
///
/// The family `(Σ₊², Σ₋²)` is closed under the channel, so evolution
/// composes: `evolve_variances(evolve_variances(v, t₁), t₂)` equals
/// `evolve_variances(v, t₁ + t₂)`.
pub fn evolve_variances(v: &VariancePair, cp: &ChannelParams, t: f64) -> Result<EvolutionResult> {
    check_time(t)?;
    let decay = (-cp.gamma_rate * t).exp();
    let d2 = diffusion(cp, t);
    Ok(EvolutionResult {
        variances: VariancePair {
            var_plus: decay * v.var_plus + d2,
            var_minus: decay * v.var_minus + d2,
        },
        time: t,
        tau: cp.tau(t),
        diffusion: d2,
    })
}

/// Variances of the twin-beam `tb` after propagating for time `t`.
pub fn evolve(tb: &TwinBeamParams, cp: &ChannelParams, t: f64) -> Result<EvolutionResult> {
    evolve_variances(&initial_variances(tb), cp, t)
}

/// Green function `G(x | x′)` of a single quadrature after time `t > 0`.
pub fn green_function(cp: &ChannelParams, t: f64, x: f64, x_prime: f64) -> Result<f64> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::domain(format!(
            "Green function needs t > 0 (got {t}); at t = 0 it is a delta function"
        )));
    }
    Ok(green_kernel(cp, t)(x, x_prime))
}

/// Green function with the time-dependent constants hoisted out.
fn green_kernel(cp: &ChannelParams, t: f64) -> impl Fn(f64, f64) -> f64 {
    let d2 = diffusion(cp, t);
    let shrink = (-0.5 * cp.gamma_rate * t).exp();
    let norm = 1.0 / (2.0 * PI * d2).sqrt();
    move |x, x_prime| {
        let dx = x - x_prime * shrink;
        norm * (-dx * dx / (2.0 * d2)).exp()
    }
}

/// Monte-Carlo estimate together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Minimum sample count accepted by [`evolve_by_convolution`].
pub const MIN_MC_SAMPLES: usize = 10_000;

/// Draw a phase point from the Gaussian Wigner function with variances `v`.
pub fn sample_wigner<R: rand::Rng + ?Sized>(v: &VariancePair, rng: &mut R) -> PhasePoint {
    let wide = (2.0 * v.var_plus).sqrt();
    let narrow = (2.0 * v.var_minus).sqrt();
    let mut draw = || -> f64 { StandardNormal.sample(rng) };
    let xs = wide * draw();
    let xd = narrow * draw();
    let ys = narrow * draw();
    let yd = wide * draw();
    PhasePoint {
        x1: 0.5 * (xs + xd),
        x2: 0.5 * (xs - xd),
        y1: 0.5 * (ys + yd),
        y2: 0.5 * (ys - yd),
    }
}

/// Evaluate the evolved Wigner function at `p` by averaging the product of
/// single-quadrature Green functions over samples of the initial twin-beam.
///
/// This never touches the closed-form evolved variances, so it serves as an
/// independent check of [`evolve`]. Deterministic for a given `seed`.
pub fn evolve_by_convolution(
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    t: f64,
    p: &PhasePoint,
    mc_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::domain(format!("convolution needs t > 0, got {t}")));
    }
    if mc_samples < MIN_MC_SAMPLES {
        return Err(Error::domain(format!(
            "need at least {MIN_MC_SAMPLES} Monte-Carlo samples, got {mc_samples}"
        )));
    }
    let v0 = initial_variances(tb);
    let g = green_kernel(cp, t);
    let target = p.as_array();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..mc_samples {
        let src = sample_wigner(&v0, &mut rng).as_array();
        let k: f64 = target.iter().zip(&src).map(|(&x, &xp)| g(x, xp)).product();
        sum += k;
        sum_sq += k * k;
    }
    let n = mc_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(McEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
        samples: mc_samples,
    })
}

/// Variances of the stationary state `μ_M ⊗ μ_M`: `((2M+1)/4, (2M+1)/4)`.
pub fn stationary_state(cp: &ChannelParams) -> VariancePair {
    let v = cp.thermal_variance();
    VariancePair {
        var_plus: v,
        var_minus: v,
    }
}

/// Wigner function of the stationary state at `p`.
pub fn stationary_wigner(cp: &ChannelParams, p: &PhasePoint) -> f64 {
    wigner_eval(&stationary_state(cp), p)
}
