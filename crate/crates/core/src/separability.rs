//! Entanglement vs separability of the evolved twin-beam and the time at
//! which entanglement dies.
//!
//! Two routes decide separability and are kept independent:
//! [`ppt_eigen_check`] diagonalises `V + (i/4)Ω` with
//! `Ω = diag(J, −J)` (the symplectic form with the second mode transposed),
//! while [`variance_criterion`] compares `Σ₋²` with the vacuum variance.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channel::{evolve, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, TwinBeamParams, VariancePair, VACUUM_VARIANCE};
use crate::linalg::{hermitian_eigenvalues, SymmetricMatrix};
use num_complex::Complex64;

/// Numerical slack below zero still classified as separable.
pub const EIGEN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    pub separable: bool,
    /// Smallest eigenvalue of `V + (i/4)Ω`.
    pub min_eigenvalue: f64,
    /// The binding variance `Σ₋²`.
    pub binding_variance: f64,
}

impl SeparabilityVerdict {
    pub fn entangled(&self) -> bool {
        !self.separable
    }
}

/// Check positivity of `V + (i/4)Ω` by full diagonalisation.
pub fn ppt_eigen_check(cov: &CovarianceMatrix) -> Result<SeparabilityVerdict> {
    let scale = cov
        .entries
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);
    if cov.entries.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("covariance matrix has non-finite entries"));
    }
    if cov.asymmetry() > 1e-12 * scale {
        return Err(Error::domain(format!(
            "covariance matrix is not symmetric (asymmetry {:e})",
            cov.asymmetry()
        )));
    }
    let spectrum = SymmetricMatrix::from_fn(4, |i, j| cov.entries[i][j]).eigenvalues();
    if spectrum[0] <= 0.0 {
        return Err(Error::domain(format!(
            "covariance matrix is not positive definite (eigenvalue {:e})",
            spectrum[0]
        )));
    }

    let omega = partially_transposed_form();
    let mut h = [Complex64::new(0.0, 0.0); 16];
    for i in 0..4 {
        for j in 0..4 {
            h[i * 4 + j] = Complex64::new(cov.entries[i][j], 0.25 * omega[i][j]);
        }
    }
    let min_eigenvalue = hermitian_eigenvalues(4, &h)[0];
    let e = &cov.entries;
    Ok(SeparabilityVerdict {
        separable: min_eigenvalue >= -EIGEN_SLACK,
        min_eigenvalue,
        binding_variance: e[0][0] - e[0][2],
    })
}

/// `Ω = diag(J, −J)` with `J = [[0, 1], [−1, 0]]`.
fn partially_transposed_form() -> [[f64; 4]; 4] {
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
}

/// Separability from the variances alone: separable iff `Σ₋² ≥ 1/4`.
///
/// Requires `Σ₊² ≥ Σ₋²`, which holds along every evolved twin-beam with
/// `λ ≥ 0`; the weaker condition `Σ₊² ≥ 1/4` is then implied.
pub fn variance_criterion(v: &VariancePair) -> Result<SeparabilityVerdict> {
    if !(v.var_plus > 0.0 && v.var_minus > 0.0) {
        return Err(Error::domain(format!(
            "variances must be positive, got {v:?}"
        )));
    }
    if v.var_plus < v.var_minus {
        return Err(Error::domain(format!(
            "expected var_plus >= var_minus for the twin-beam family, got {v:?}"
        )));
    }
    let minus_ok = v.var_minus >= VACUUM_VARIANCE - EIGEN_SLACK;
    let plus_ok = v.var_plus >= VACUUM_VARIANCE - EIGEN_SLACK;
    if minus_ok && !plus_ok {
        log::warn!("variance pair {v:?} satisfies the minus condition but not the plus one");
    }
    Ok(SeparabilityVerdict {
        separable: minus_ok && plus_ok,
        min_eigenvalue: v.var_minus.min(v.var_plus) - VACUUM_VARIANCE,
        binding_variance: v.var_minus,
    })
}

/// A threshold that is either a finite time or never reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    /// Entanglement survives for every finite time (pure loss, `M = 0`).
    Infinite,
}

impl Threshold {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Threshold::Finite(v) => Some(v),
            Threshold::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Threshold::Infinite)
    }

    /// Finite value, or `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Finite(v) => write!(f, "{v}"),
            Threshold::Infinite => f.write_str("infinite"),
        }
    }
}

/// Serialised as a plain number, or as the string `"infinite"`.
impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Finite(v) => s.serialize_f64(*v),
            Threshold::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(Threshold::Finite(v)),
            Repr::Text(s) if s == "infinite" => Ok(Threshold::Infinite),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"infinite\", got {s:?}"
            ))),
        }
    }
}

/// `(1 − e^{−2λ}) / (2M)`, the argument of the threshold logarithm.
fn threshold_log_argument(tb: &TwinBeamParams, cp: &ChannelParams) -> f64 {
    -(-2.0 * tb.lambda()).exp_m1() / (2.0 * cp.m_thermal())
}

/// Time after which the evolved twin-beam is separable:
/// `t_s = ln(1 + (1 − e^{−2λ})/(2M)) / Γ`.
///
/// A vacuum input (`λ = 0`) is separable from the start; for `M = 0` and
/// `λ > 0` the state never becomes separable.
pub fn threshold_time(tb: &TwinBeamParams, cp: &ChannelParams) -> Threshold {
    if tb.lambda() == 0.0 {
        return Threshold::Finite(0.0);
    }
    if cp.m_thermal() == 0.0 {
        return Threshold::Infinite;
    }
    Threshold::Finite(threshold_log_argument(tb, cp).ln_1p() / cp.gamma_rate())
}

/// Threshold time expressed through the photon number:
/// `t_s = ln(1 + (√(N(N+2)) − N)/(2M)) / Γ`.
pub fn threshold_time_from_photon_number(n_mean: f64, cp: &ChannelParams) -> Result<Threshold> {
    if !n_mean.is_finite() || n_mean < 0.0 {
        return Err(Error::domain(format!(
            "mean photon number must be finite and non-negative, got {n_mean}"
        )));
    }
    if n_mean == 0.0 {
        return Ok(Threshold::Finite(0.0));
    }
    if cp.m_thermal() == 0.0 {
        return Ok(Threshold::Infinite);
    }
    let gap = (n_mean * (n_mean + 2.0)).sqrt() - n_mean;
    Ok(Threshold::Finite(
        (gap / (2.0 * cp.m_thermal())).ln_1p() / cp.gamma_rate(),
    ))
}

/// Threshold on the rescaled clock, `τ_s = (2M+1) Γ t_s`.
///
/// Both closed forms, `−(1/γ) ln((1−γ)/(1−γe^{−2λ}))` and
/// `(2M+1) ln(1 + (1−e^{−2λ})/(2M))`, are evaluated; they must agree.
pub fn threshold_tau(tb: &TwinBeamParams, cp: &ChannelParams) -> Threshold {
    if tb.lambda() == 0.0 {
        return Threshold::Finite(0.0);
    }
    if cp.m_thermal() == 0.0 {
        return Threshold::Infinite;
    }
    let gamma = cp.drift();
    let (lhs, rhs) = threshold_tau_forms(tb, cp);
    debug_assert!(
        (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
        "threshold forms disagree: {lhs} vs {rhs} (gamma {gamma})"
    );
    Threshold::Finite(rhs)
}

/// The two closed forms of `τ_s`, in the order they are usually written.
pub fn threshold_tau_forms(tb: &TwinBeamParams, cp: &ChannelParams) -> (f64, f64) {
    let gamma = cp.drift();
    let squeeze = (-2.0 * tb.lambda()).exp();
    let first = -((1.0 - gamma) / (1.0 - gamma * squeeze)).ln() / gamma;
    let second = (2.0 * cp.m_thermal() + 1.0) * threshold_log_argument(tb, cp).ln_1p();
    (first, second)
}

/// Large-gain limit of the threshold time, `ln(1 + 1/(2M)) / Γ`.
pub fn saturation_threshold(cp: &ChannelParams) -> Threshold {
    if cp.m_thermal() == 0.0 {
        return Threshold::Infinite;
    }
    Threshold::Finite((0.5 / cp.m_thermal()).ln_1p() / cp.gamma_rate())
}

/// Threshold time found by bisection on `Σ₋²(t) − 1/4`, using only the
/// evolved variances. The bracket is `[0, 10·saturation]`; when it holds no
/// sign change the closed form is returned instead.
pub fn threshold_time_bisection(tb: &TwinBeamParams, cp: &ChannelParams) -> Result<Threshold> {
    let excess =
        |t: f64| -> Result<f64> { Ok(evolve(tb, cp, t)?.variances.var_minus - VACUUM_VARIANCE) };
    let hi0 = match saturation_threshold(cp) {
        Threshold::Finite(s) => 10.0 * s,
        Threshold::Infinite => return Ok(threshold_time(tb, cp)),
    };
    let (mut lo, mut hi) = (0.0_f64, hi0);
    let f_lo = excess(lo)?;
    if f_lo >= 0.0 {
        return Ok(Threshold::Finite(0.0));
    }
    if excess(hi)? < 0.0 {
        return Ok(threshold_time(tb, cp));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold::Finite(0.5 * (lo + hi)))
}

/// Separability verdict of the evolved twin-beam at time `t`, by the
/// variance route.
pub fn evolved_verdict(
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    t: f64,
) -> Result<SeparabilityVerdict> {
    variance_criterion(&evolve(tb, cp, t)?.variances)
}
