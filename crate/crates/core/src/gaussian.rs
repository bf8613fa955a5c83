//! Twin-beam parameterisations, variance pairs, covariance matrices and the
//! two-mode Gaussian Wigner function.
//!
//! Quadratures follow the convention `x = (a + a†)/2`, `y = (a − a†)/(2i)`,
//! so the vacuum has variance 1/4 in every quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-quadrature variance of the vacuum.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Lower bound on `var_plus * var_minus`; attained by the pure twin-beam.
pub const HEISENBERG_PRODUCT: f64 = 1.0 / 16.0;

/// The three equivalent descriptions of a twin-beam: the gain `lambda`, the
/// Fock weight `x = tanh(lambda)` and the total mean photon number
/// `n_mean = 2 sinh²(lambda)`.
///
/// For `lambda` above roughly 19 the weight `x` rounds to exactly 1 in double
/// precision. Everything that only needs `lambda` keeps working; the Fock
/// representation refuses such states through its tail check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinBeamParams {
    lambda: f64,
    x: f64,
    n_mean: f64,
}

impl TwinBeamParams {
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::domain(format!(
                "squeezing parameter must be finite and non-negative, got {lambda}"
            )));
        }
        let s = lambda.sinh();
        let n_mean = 2.0 * s * s;
        if !n_mean.is_finite() {
            return Err(Error::domain(format!(
                "squeezing parameter {lambda} overflows the photon number"
            )));
        }
        Ok(Self {
            lambda,
            x: lambda.tanh(),
            n_mean,
        })
    }

    pub fn from_photon_number(n_mean: f64) -> Result<Self> {
        if !n_mean.is_finite() || n_mean < 0.0 {
            return Err(Error::domain(format!(
                "mean photon number must be finite and non-negative, got {n_mean}"
            )));
        }
        Ok(Self {
            lambda: (n_mean / 2.0).sqrt().asinh(),
            x: (n_mean / (n_mean + 2.0)).sqrt(),
            n_mean,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn n_mean(&self) -> f64 {
        self.n_mean
    }

    pub fn initial_variances(&self) -> VariancePair {
        initial_variances(self)
    }
}

/// Build a twin-beam from its gain.
pub fn twin_beam_from_lambda(lambda: f64) -> Result<TwinBeamParams> {
    TwinBeamParams::from_lambda(lambda)
}

/// Build a twin-beam from its total mean photon number.
pub fn twin_beam_from_photon_number(n_mean: f64) -> Result<TwinBeamParams> {
    TwinBeamParams::from_photon_number(n_mean)
}

/// The two variances `(Σ₊², Σ₋²)` that fix a zero-mean twin-beam-like
/// Gaussian state. `var_plus` belongs to `x₁+x₂` and `y₁−y₂`, `var_minus`
/// to `x₁−x₂` and `y₁+y₂` (each combination has variance `2Σ²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariancePair {
    pub var_plus: f64,
    pub var_minus: f64,
}

impl VariancePair {
    /// Validated constructor: both variances positive and finite, and the
    /// product respects the uncertainty bound up to rounding.
    pub fn new(var_plus: f64, var_minus: f64) -> Result<Self> {
        if !(var_plus.is_finite() && var_minus.is_finite()) || var_plus <= 0.0 || var_minus <= 0.0 {
            return Err(Error::domain(format!(
                "variances must be positive and finite, got ({var_plus}, {var_minus})"
            )));
        }
        if var_plus * var_minus < HEISENBERG_PRODUCT * (1.0 - 1e-12) {
            return Err(Error::domain(format!(
                "variance pair ({var_plus}, {var_minus}) violates the uncertainty bound 1/16"
            )));
        }
        Ok(Self {
            var_plus,
            var_minus,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            var_plus: VACUUM_VARIANCE,
            var_minus: VACUUM_VARIANCE,
        }
    }

    pub fn product(&self) -> f64 {
        self.var_plus * self.var_minus
    }
}

/// Variances of the pure twin-beam: `e^{±2λ}/4`.
pub fn initial_variances(tb: &TwinBeamParams) -> VariancePair {
    let e = (2.0 * tb.lambda).exp();
    VariancePair {
        var_plus: VACUUM_VARIANCE * e,
        var_minus: VACUUM_VARIANCE / e,
    }
}

/// Second-moment matrix of `(x₁, y₁, x₂, y₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    pub entries: [[f64; 4]; 4],
}

impl CovarianceMatrix {
    pub fn new(entries: [[f64; 4]; 4]) -> Self {
        Self { entries }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    /// Largest absolute asymmetry `|V_pk − V_kp|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for p in 0..4 {
            for k in 0..p {
                worst = worst.max((self.entries[p][k] - self.entries[k][p]).abs());
            }
        }
        worst
    }
}

/// Covariance matrix of the Gaussian state with variances `v`.
///
/// Diagonal entries are `(Σ₊²+Σ₋²)/2`; the `x₁x₂` correlation is
/// `+(Σ₊²−Σ₋²)/2` and the `y₁y₂` correlation is `−(Σ₊²−Σ₋²)/2`, as dictated
/// by the `(y₁+y₂)` / `(y₁−y₂)` structure of the Wigner function.
pub fn covariance_from_variances(v: &VariancePair) -> CovarianceMatrix {
    let diag = 0.5 * (v.var_plus + v.var_minus);
    let cross = 0.5 * (v.var_plus - v.var_minus);
    CovarianceMatrix::new([
        [diag, 0.0, cross, 0.0],
        [0.0, diag, 0.0, -cross],
        [cross, 0.0, diag, 0.0],
        [0.0, -cross, 0.0, diag],
    ])
}

/// Inverse of [`covariance_from_variances`] on the twin-beam family.
///
/// Fails when the matrix is not of the twin-beam form (to relative
/// precision 1e-12).
pub fn variances_from_covariance(cov: &CovarianceMatrix) -> Result<VariancePair> {
    let e = &cov.entries;
    let diag = e[0][0];
    let cross = e[0][2];
    let scale = diag.abs().max(1.0);
    let tol = 1e-12 * scale;
    let expected = covariance_from_variances(&VariancePair {
        var_plus: diag + cross,
        var_minus: diag - cross,
    });
    for (p, (row, want)) in e.iter().zip(&expected.entries).enumerate() {
        for (k, (&got, &want)) in row.iter().zip(want).enumerate() {
            if (got - want).abs() > tol {
                return Err(Error::domain(format!(
                    "covariance entry ({p},{k}) = {got} is outside the twin-beam family"
                )));
            }
        }
    }
    VariancePair::new(diag + cross, diag - cross)
}

/// A point `(x₁, y₁, x₂, y₂)` of two-mode phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl PhasePoint {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        let p = Self { x1, y1, x2, y2 };
        if p.as_array().iter().all(|c| c.is_finite()) {
            Ok(p)
        } else {
            Err(Error::domain(format!("phase point {p:?} is not finite")))
        }
    }

    pub fn origin() -> Self {
        Self {
            x1: 0.0,
            y1: 0.0,
            x2: 0.0,
            y2: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            x1: a[0],
            y1: a[1],
            x2: a[2],
            y2: a[3],
        }
    }
}

/// Two-mode Wigner function of the zero-mean Gaussian state with variances `v`.
pub fn wigner_eval(v: &VariancePair, p: &PhasePoint) -> f64 {
    let (sp, sm) = (v.var_plus, v.var_minus);
    let norm = 1.0 / (2.0 * PI * sp * 2.0 * PI * sm);
    let xs = p.x1 + p.x2;
    let xd = p.x1 - p.x2;
    let ys = p.y1 + p.y2;
    let yd = p.y1 - p.y2;
    let exponent =
        -xs * xs / (4.0 * sp) - ys * ys / (4.0 * sm) - xd * xd / (4.0 * sm) - yd * yd / (4.0 * sp);
    norm * exponent.exp()
}
