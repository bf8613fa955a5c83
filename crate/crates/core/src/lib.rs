//! Twin-beam (two-mode squeezed vacuum) propagation through a pair of noisy
//! active fibres.
//!
//! The crate follows the Gaussian state analytically: the twin-beam stays a
//! zero-mean Gaussian described by two variances `(Σ₊², Σ₋²)`, which relax
//! toward the thermal value `(2M+1)/4`. On top of that it decides
//! separability (by the PPT criterion and by the variance condition), finds
//! the time after which entanglement is lost, and evaluates coherent-state
//! teleportation fidelity. The [`fock`] module integrates the underlying
//! master equation in a truncated Fock basis as an independent check.
//!
//! Quadrature convention: `x = (a + a†)/2`, vacuum variance 1/4.

pub mod channel;
pub mod crosscheck;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod separability;
pub mod tables;
pub mod teleportation;

pub use channel::{
    diffusion, drift_coefficient, evolve, evolve_by_convolution, evolve_variances, green_function,
    stationary_state, stationary_wigner, ChannelParams, EvolutionResult, McEstimate,
};
pub use error::{Error, Result};
pub use gaussian::{
    covariance_from_variances, initial_variances, twin_beam_from_lambda,
    twin_beam_from_photon_number, variances_from_covariance, wigner_eval, CovarianceMatrix,
    PhasePoint, TwinBeamParams, VariancePair, VACUUM_VARIANCE,
};
pub use separability::{
    ppt_eigen_check, saturation_threshold, threshold_tau, threshold_time, threshold_time_bisection,
    variance_criterion, SeparabilityVerdict, Threshold,
};
pub use teleportation::{
    fidelity, gaussian_overlap_fidelity, quantum_teleportation_possible, teleport_coherent,
    CoherentGaussian, TeleportationParams,
};
