//! Runs the Fock-space oracle against the closed forms on parameter grids.

use serde::{Deserialize, Serialize};

use crate::channel::{evolve, ChannelParams};
use crate::error::{Error, Result};
use crate::fock::{
    extract_variances, integrate, partial_transpose_min_eigenvalue, twin_beam_fock,
    IntegratorConfig,
};
use crate::gaussian::{covariance_from_variances, TwinBeamParams, VariancePair, VACUUM_VARIANCE};
use crate::separability::{ppt_eigen_check, variance_criterion};

/// Largest tolerated `|Σ±²(closed form) − Σ±²(oracle)|`.
pub const ORACLE_TOLERANCE: f64 = 1e-5;
/// Sign comparisons are skipped when `|Σ₋² − 1/4|` is below this band.
pub const PPT_BAND: f64 = 1e-3;
/// The partially transposed Fock matrix counts as entangled only below
/// `-PT_SLACK`; separable states sit at zero up to round-off.
pub const PT_SLACK: f64 = 1e-9;
/// Truncations beyond this are refused when enlarging automatically.
pub const MAX_AUTO_DIM: usize = 40;

pub const GRID_LAMBDAS: [f64; 3] = [0.2, 0.4, 0.6];
pub const GRID_M_VALUES: [f64; 3] = [0.1, 0.5, 1.0];
pub const GRID_GAMMA_T: [f64; 3] = [0.1, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub lambda: f64,
    pub m_thermal: f64,
    pub gamma_rate: f64,
    pub time: f64,
}

/// Optional overrides of the automatic integrator settings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleOverrides {
    pub dim: Option<usize>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub case: OracleCase,
    pub dim: usize,
    pub step: f64,
    pub closed: VariancePair,
    pub oracle: VariancePair,
    pub diff_plus: f64,
    pub diff_minus: f64,
    /// Smallest eigenvalue of `V + (i/4)Ω` for the closed-form state.
    pub ppt_min_eigenvalue: f64,
    /// Smallest eigenvalue of the partially transposed Fock matrix.
    pub pt_min_eigenvalue: f64,
    /// Whether the entanglement verdicts were compared (outside the band).
    pub ppt_compared: bool,
    /// All three verdicts agree (trivially true when not compared).
    pub ppt_agree: bool,
}

impl OracleOutcome {
    pub fn within_tolerance(&self) -> bool {
        self.diff_plus < ORACLE_TOLERANCE && self.diff_minus < ORACLE_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.within_tolerance() && self.ppt_agree
    }
}

/// The 3×3×3 grid over `λ`, `M` and `Γt` with `Γ = 1`.
pub fn default_grid() -> Vec<OracleCase> {
    let mut cases = Vec::with_capacity(27);
    for &lambda in &GRID_LAMBDAS {
        for &m_thermal in &GRID_M_VALUES {
            for &time in &GRID_GAMMA_T {
                cases.push(OracleCase {
                    lambda,
                    m_thermal,
                    gamma_rate: 1.0,
                    time,
                });
            }
        }
    }
    cases
}

/// Integrate one case in the Fock basis and compare with the closed forms.
///
/// Without a `dim` override the truncation starts from
/// [`IntegratorConfig::auto`] and is enlarged whenever a truncation error is
/// raised, up to [`MAX_AUTO_DIM`].
pub fn run_case(case: &OracleCase, overrides: &OracleOverrides) -> Result<OracleOutcome> {
    let tb = TwinBeamParams::from_lambda(case.lambda)?;
    let cp = ChannelParams::new(case.gamma_rate, case.m_thermal)?;
    let auto = IntegratorConfig::auto(&tb, &cp)?;
    let step = overrides.step.unwrap_or(auto.step);
    let mut dim = overrides.dim.unwrap_or(auto.dim);
    loop {
        let cfg = IntegratorConfig::new(step, dim, auto.tail_tolerance)?;
        let attempt =
            twin_beam_fock(&tb, dim).and_then(|rho0| integrate(&rho0, &cp, case.time, &cfg));
        match attempt {
            Ok(rho) => return compare(case, &tb, &cp, &cfg, &rho),
            Err(Error::Truncation { min_dim, .. })
                if overrides.dim.is_none() && min_dim > dim && min_dim <= MAX_AUTO_DIM =>
            {
                log::debug!("raising dim from {dim} to {min_dim} for {case:?}");
                dim = min_dim;
            }
            Err(e) => return Err(e),
        }
    }
}

fn compare(
    case: &OracleCase,
    tb: &TwinBeamParams,
    cp: &ChannelParams,
    cfg: &IntegratorConfig,
    rho: &crate::fock::FockDensityMatrix,
) -> Result<OracleOutcome> {
    let closed = evolve(tb, cp, case.time)?.variances;
    let oracle = extract_variances(rho)?;
    let ppt = ppt_eigen_check(&covariance_from_variances(&closed))?;
    let var = variance_criterion(&closed)?;
    let pt_min = partial_transpose_min_eigenvalue(rho);
    let ppt_compared = (closed.var_minus - VACUUM_VARIANCE).abs() > PPT_BAND;
    let fock_entangled = pt_min < -PT_SLACK;
    let ppt_agree =
        !ppt_compared || (ppt.separable == var.separable && fock_entangled == !var.separable);
    Ok(OracleOutcome {
        case: *case,
        dim: cfg.dim,
        step: cfg.step,
        closed,
        oracle,
        diff_plus: (closed.var_plus - oracle.var_plus).abs(),
        diff_minus: (closed.var_minus - oracle.var_minus).abs(),
        ppt_min_eigenvalue: ppt.min_eigenvalue,
        pt_min_eigenvalue: pt_min,
        ppt_compared,
        ppt_agree,
    })
}

/// Run every case; results come back in input order.
pub fn run_grid(cases: &[OracleCase], overrides: &OracleOverrides) -> Vec<Result<OracleOutcome>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cases.par_iter().map(|c| run_case(c, overrides)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cases.iter().map(|c| run_case(c, overrides)).collect()
    }
}
