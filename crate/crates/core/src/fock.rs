//! Brute-force check of the Gaussian closed forms: the two-mode master
//! equation integrated in a truncated Fock basis.
//!
//! The density matrix is stored densely in the product basis `|n₁ n₂⟩`,
//! `n₁, n₂ < dim`, with row index `n₁·dim + n₂`. The generator is
//!
//! ```text
//! dρ/dt = Γ(1+M) (L[a] + L[b]) ρ + Γ M (L[a†] + L[b†]) ρ,
//! L[O]ρ = OρO† − ½ O†O ρ − ½ ρ O†O,
//! ```
//!
//! built from the truncated ladder matrices, so the truncated generator is
//! exactly trace preserving and its fixed point is the truncated thermal
//! product.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::gaussian::{TwinBeamParams, VariancePair};
use crate::linalg::hermitian_eigenvalues_blocked;

/// Default bound on the discarded weight of the initial twin-beam.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-8;
/// Upper bound on `step·Γ·(2M+1)`.
pub const MAX_STEP_PRODUCT: f64 = 0.05;
/// Extra levels added on top of the tail-based truncation.
pub const DIM_MARGIN: usize = 4;
/// Largest population tolerated in the top two levels of either mode.
pub const TOP_OCCUPATION_LIMIT: f64 = 1e-6;
/// Largest change of any second moment tolerated when halving the step.
pub const STEP_HALVING_TOLERANCE: f64 = 1e-6;

const HERMITICITY_LIMIT: f64 = 1e-10;
const TRACE_LIMIT: f64 = 1e-9;
const DIAGONAL_LIMIT: f64 = -1e-12;
const MEAN_LIMIT: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncated two-mode density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    tail_mass: f64,
}

impl FockDensityMatrix {
    /// Build from a row-major `dim²×dim²` buffer.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 1 || entries.len() != dim.pow(4) {
            return Err(Error::domain(format!(
                "buffer of length {} does not match dim {dim}",
                entries.len()
            )));
        }
        Ok(Self {
            dim,
            entries,
            tail_mass: 0.0,
        })
    }

    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim.pow(4)],
            tail_mass: 0.0,
        }
    }

    /// `|ψ⟩⟨ψ|` for the product-basis amplitudes `psi`.
    pub fn pure(dim: usize, psi: &[Complex64]) -> Result<Self> {
        let size = dim * dim;
        if psi.len() != size {
            return Err(Error::domain("amplitude vector does not match dim"));
        }
        let mut rho = Self::zeros(dim);
        for r in 0..size {
            if psi[r] == ZERO {
                continue;
            }
            for c in 0..size {
                rho.entries[r * size + c] = psi[r] * psi[c].conj();
            }
        }
        Ok(rho)
    }

    /// Product of truncated, renormalised thermal states with `m` photons.
    pub fn thermal_product(m: f64, dim: usize) -> Result<Self> {
        if !(m.is_finite() && m >= 0.0) || dim < 1 {
            return Err(Error::domain(format!(
                "invalid thermal state (M={m}, dim={dim})"
            )));
        }
        let p = thermal_populations(m, dim);
        let mut rho = Self::zeros(dim);
        let size = dim * dim;
        for n1 in 0..dim {
            for n2 in 0..dim {
                let r = n1 * dim + n2;
                rho.entries[r * size + r] = Complex64::new(p[n1] * p[n2], 0.0);
            }
        }
        Ok(rho)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::thermal_product(0.0, dim)
    }

    /// Per-mode truncation.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Size of the two-mode basis, `dim²`.
    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Weight discarded when the initial state was truncated.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `⟨n₁ n₂| ρ |m₁ m₂⟩`.
    pub fn get(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> Complex64 {
        let d = self.dim;
        self.entries[(n1 * d + n2) * self.size() + (m1 * d + m2)]
    }

    pub fn trace(&self) -> Complex64 {
        let size = self.size();
        (0..size).map(|r| self.entries[r * size + r]).sum()
    }

    /// Largest `|ρ_rc − conj(ρ_cr)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let size = self.size();
        let mut worst = 0.0_f64;
        for r in 0..size {
            for c in r..size {
                let d = self.entries[r * size + c] - self.entries[c * size + r].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Replace `ρ` by `(ρ + ρ†)/2`.
    pub fn symmetrize(&mut self) {
        let size = self.size();
        for r in 0..size {
            for c in r..size {
                let avg = 0.5 * (self.entries[r * size + c] + self.entries[c * size + r].conj());
                self.entries[r * size + c] = avg;
                self.entries[c * size + r] = avg.conj();
            }
        }
    }

    /// Smallest diagonal entry (real part).
    pub fn min_diagonal(&self) -> f64 {
        let size = self.size();
        (0..size)
            .map(|r| self.entries[r * size + r].re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Marginal photon-number distributions of both modes.
    pub fn marginal_populations(&self) -> (Vec<f64>, Vec<f64>) {
        let (d, size) = (self.dim, self.size());
        let mut p1 = vec![0.0; d];
        let mut p2 = vec![0.0; d];
        for r in 0..size {
            let w = self.entries[r * size + r].re;
            p1[r / d] += w;
            p2[r % d] += w;
        }
        (p1, p2)
    }

    /// Population of the top two Fock levels, maximised over both modes.
    pub fn top_occupation(&self) -> f64 {
        let (p1, p2) = self.marginal_populations();
        let top = |p: &[f64]| p.iter().rev().take(2).sum::<f64>();
        top(&p1).max(top(&p2))
    }

    /// Largest entry violating the twin-beam pattern `n₁−m₁ = n₂−m₂`.
    pub fn selection_rule_violation(&self) -> f64 {
        let d = self.dim as isize;
        let mut worst = 0.0_f64;
        for n1 in 0..d {
            for n2 in 0..d {
                for m1 in 0..d {
                    for m2 in 0..d {
                        if n1 - m1 != n2 - m2 {
                            let v = self.get(n1 as usize, n2 as usize, m1 as usize, m2 as usize);
                            worst = worst.max(v.norm());
                        }
                    }
                }
            }
        }
        worst
    }

    /// `Tr(ρ O)` for a product of ladder operators; `ops` is written left to
    /// right as in the operator product, so the last entry acts first.
    /// Intermediate states are not truncated, so `a a† = a†a + 1` holds.
    pub fn expect(&self, ops: &[Ladder]) -> Complex64 {
        let (d, size) = (self.dim as i64, self.size());
        let mut acc = ZERO;
        for l1 in 0..d {
            for l2 in 0..d {
                let (mut k1, mut k2, mut coef) = (l1, l2, 1.0_f64);
                for op in ops.iter().rev() {
                    let (n, raise) = match op {
                        Ladder::A => (&mut k1, false),
                        Ladder::Ad => (&mut k1, true),
                        Ladder::B => (&mut k2, false),
                        Ladder::Bd => (&mut k2, true),
                    };
                    if raise {
                        *n += 1;
                        coef *= (*n as f64).sqrt();
                    } else {
                        coef *= (*n as f64).sqrt();
                        *n -= 1;
                    }
                    if coef == 0.0 {
                        break;
                    }
                }
                if coef == 0.0 || k1 < 0 || k2 < 0 || k1 >= d || k2 >= d {
                    continue;
                }
                let row = (l1 * d + l2) as usize;
                let col = (k1 * d + k2) as usize;
                acc += coef * self.entries[row * size + col];
            }
        }
        acc
    }

    /// First and second ladder moments.
    pub fn moments(&self) -> Moments {
        use Ladder::*;
        Moments {
            a: self.expect(&[A]),
            b: self.expect(&[B]),
            n1: self.expect(&[Ad, A]).re,
            n2: self.expect(&[Bd, B]).re,
            aa: self.expect(&[A, A]),
            bb: self.expect(&[B, B]),
            ab: self.expect(&[A, B]),
            ad_b: self.expect(&[Ad, B]),
        }
    }
}

/// Ladder operators of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    A,
    Ad,
    B,
    Bd,
}

/// `⟨a⟩, ⟨b⟩, ⟨a†a⟩, ⟨b†b⟩, ⟨a²⟩, ⟨b²⟩, ⟨ab⟩, ⟨a†b⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub a: Complex64,
    pub b: Complex64,
    pub n1: f64,
    pub n2: f64,
    pub aa: Complex64,
    pub bb: Complex64,
    pub ab: Complex64,
    pub ad_b: Complex64,
}

impl Moments {
    pub fn max_abs_diff(&self, other: &Moments) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.n1 - other.n1).abs(),
            (self.n2 - other.n2).abs(),
            (self.aa - other.aa).norm(),
            (self.bb - other.bb).norm(),
            (self.ab - other.ab).norm(),
            (self.ad_b - other.ad_b).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn thermal_populations(m: f64, dim: usize) -> Vec<f64> {
    let q = m / (1.0 + m);
    let mut p: Vec<f64> = (0..dim).map(|n| q.powi(n as i32)).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= z);
    p
}

/// Smallest `dim` with `x^{2·dim} ≤ tol`.
pub fn min_dim_for_tail(x: f64, tol: f64) -> usize {
    if x <= 0.0 {
        return 1;
    }
    if x >= 1.0 {
        return usize::MAX;
    }
    let d = (tol.ln() / (2.0 * x.ln())).ceil().max(1.0) as usize;
    // guard against rounding in the logarithms
    if x.powi(2 * d as i32) > tol {
        d + 1
    } else {
        d
    }
}

/// The twin-beam `√(1−x²) Σ_p x^p |p p⟩`, truncated to `p < dim` and
/// renormalised. Fails when the discarded weight `x^{2·dim}` exceeds
/// [`DEFAULT_TAIL_TOLERANCE`].
pub fn twin_beam_fock(tb: &TwinBeamParams, dim: usize) -> Result<FockDensityMatrix> {
    twin_beam_fock_with_tolerance(tb, dim, DEFAULT_TAIL_TOLERANCE)
}

pub fn twin_beam_fock_with_tolerance(
    tb: &TwinBeamParams,
    dim: usize,
    tail_tolerance: f64,
) -> Result<FockDensityMatrix> {
    let x = tb.x();
    let min_dim = min_dim_for_tail(x, tail_tolerance);
    if dim < 2 || dim < min_dim {
        return Err(Error::Truncation {
            reason: format!(
                "twin-beam with x = {x} loses weight {:e} at dim {dim} (tolerance {tail_tolerance:e})",
                x.powi(2 * dim as i32)
            ),
            min_dim: min_dim.max(2),
        });
    }
    let tail_mass = x.powi(2 * dim as i32);
    let norm = ((1.0 - x * x) / (1.0 - tail_mass)).sqrt();
    let mut psi = vec![ZERO; dim * dim];
    for p in 0..dim {
        psi[p * dim + p] = Complex64::new(norm * x.powi(p as i32), 0.0);
    }
    let mut rho = FockDensityMatrix::pure(dim, &psi)?;
    rho.tail_mass = tail_mass;
    Ok(rho)
}

/// Precomputed ladder factors for one truncation.
struct Generator {
    dim: usize,
    loss: f64,
    gain: f64,
    sqrt: Vec<f64>,
    /// diagonal of the truncated `a a†`: `n+1` below the top level, 0 at it
    aad: Vec<f64>,
}

impl Generator {
    fn new(dim: usize, cp: &ChannelParams) -> Self {
        let g = cp.gamma_rate();
        let m = cp.m_thermal();
        Self {
            dim,
            loss: g * (1.0 + m),
            gain: g * m,
            sqrt: (0..=dim).map(|k| (k as f64).sqrt()).collect(),
            aad: (0..dim)
                .map(|n| if n + 1 < dim { (n + 1) as f64 } else { 0.0 })
                .collect(),
        }
    }

    fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        let size = d * d;
        let (sq, aad) = (&self.sqrt, &self.aad);
        let (ls, gn) = (self.loss, self.gain);
        for n1 in 0..d {
            for n2 in 0..d {
                let r = n1 * d + n2;
                let row = &rho[r * size..(r + 1) * size];
                for m1 in 0..d {
                    for m2 in 0..d {
                        let c = m1 * d + m2;
                        let here = row[c];
                        // −½{O†O, ρ} for loss and gain on both modes
                        let diag = ls * 0.5 * ((n1 + m1 + n2 + m2) as f64)
                            + gn * 0.5 * (aad[n1] + aad[m1] + aad[n2] + aad[m2]);
                        let mut v = -diag * here;
                        // a ρ a† and b ρ b†
                        if n1 + 1 < d && m1 + 1 < d {
                            v += ls * sq[n1 + 1] * sq[m1 + 1] * rho[(r + d) * size + c + d];
                        }
                        if n2 + 1 < d && m2 + 1 < d {
                            v += ls * sq[n2 + 1] * sq[m2 + 1] * rho[(r + 1) * size + c + 1];
                        }
                        // a† ρ a and b† ρ b
                        if n1 > 0 && m1 > 0 {
                            v += gn * sq[n1] * sq[m1] * rho[(r - d) * size + c - d];
                        }
                        if n2 > 0 && m2 > 0 {
                            v += gn * sq[n2] * sq[m2] * rho[(r - 1) * size + c - 1];
                        }
                        out[r * size + c] = v;
                    }
                }
            }
        }
    }
}

/// Time derivative `L ρ` of the density matrix.
pub fn lindblad_rhs(rho: &FockDensityMatrix, cp: &ChannelParams) -> FockDensityMatrix {
    let mut out = FockDensityMatrix::zeros(rho.dim);
    Generator::new(rho.dim, cp).apply(&rho.entries, &mut out.entries);
    out
}

/// Fixed-step RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step: f64,
    pub dim: usize,
    pub tail_tolerance: f64,
}

impl IntegratorConfig {
    pub fn new(step: f64, dim: usize, tail_tolerance: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::domain(format!("step must be positive, got {step}")));
        }
        if dim < 2 {
            return Err(Error::domain(format!("dim must be at least 2, got {dim}")));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(Error::domain(format!(
                "tail tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        Ok(Self {
            step,
            dim,
            tail_tolerance,
        })
    }

    /// Truncation and step sized for `tb` in channel `cp`: the twin-beam
    /// tail plus [`DIM_MARGIN`] levels, enlarged if a thermal state with the
    /// larger of `M` and the per-mode photon number would leak more than the
    /// tail tolerance; the step is half the largest allowed.
    pub fn auto(tb: &TwinBeamParams, cp: &ChannelParams) -> Result<Self> {
        let tol = DEFAULT_TAIL_TOLERANCE;
        let by_tail = min_dim_for_tail(tb.x(), tol).saturating_add(DIM_MARGIN);
        let n_mode = cp.m_thermal().max(0.5 * tb.n_mean());
        let q = n_mode / (1.0 + n_mode);
        let by_thermal = if q > 0.0 {
            (tol.ln() / q.ln()).ceil() as usize
        } else {
            2
        };
        let step = 0.5 * MAX_STEP_PRODUCT / (cp.gamma_rate() * (2.0 * cp.m_thermal() + 1.0));
        Self::new(step, by_tail.max(by_thermal).max(2), tol)
    }

    pub fn validate(&self, cp: &ChannelParams) -> Result<()> {
        let product = self.step * cp.gamma_rate() * (2.0 * cp.m_thermal() + 1.0);
        if product > MAX_STEP_PRODUCT * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "step·Γ·(2M+1) = {product} exceeds {MAX_STEP_PRODUCT}"
            )));
        }
        Ok(())
    }
}

fn rk4_step(
    gen: &Generator,
    rho: &mut FockDensityMatrix,
    h: f64,
    scratch: &mut [Vec<Complex64>; 5],
) {
    let [k1, k2, k3, k4, tmp] = scratch;
    let y = &rho.entries;
    gen.apply(y, k1);
    for i in 0..y.len() {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    gen.apply(tmp, k2);
    for i in 0..y.len() {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    gen.apply(tmp, k3);
    for i in 0..y.len() {
        tmp[i] = y[i] + h * k3[i];
    }
    gen.apply(tmp, k4);
    let y = &mut rho.entries;
    for i in 0..y.len() {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Single fixed-step run without the step-halving gate. `observe` is called
/// after every step with the current time and state.
pub fn integrate_fixed_step(
    rho0: &FockDensityMatrix,
    cp: &ChannelParams,
    t: f64,
    step: f64,
    mut observe: impl FnMut(f64, &FockDensityMatrix),
) -> Result<FockDensityMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let mut rho = rho0.clone();
    if t == 0.0 {
        return Ok(rho);
    }
    let steps = (t / step).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let gen = Generator::new(rho.dim, cp);
    let n = rho.entries.len();
    let mut scratch: [Vec<Complex64>; 5] = std::array::from_fn(|_| vec![ZERO; n]);
    for k in 1..=steps {
        rk4_step(&gen, &mut rho, h, &mut scratch);
        let herm = rho.hermiticity_deviation();
        if herm > HERMITICITY_LIMIT {
            return Err(Error::Accuracy(format!(
                "hermiticity drift {herm:e} at step {k}"
            )));
        }
        log::trace!("step {k}: hermiticity deviation {herm:e}");
        rho.symmetrize();
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_LIMIT || tr.im.abs() > TRACE_LIMIT {
            return Err(Error::Accuracy(format!(
                "trace drifted to {tr} at step {k}"
            )));
        }
        let min_diag = rho.min_diagonal();
        if min_diag < DIAGONAL_LIMIT {
            return Err(Error::Accuracy(format!(
                "negative population {min_diag:e} at step {k}"
            )));
        }
        observe(k as f64 * h, &rho);
    }
    Ok(rho)
}

/// Evolve `rho0` for time `t` under the master equation.
///
/// The run is repeated with half the step; if any first or second moment
/// moves by more than [`STEP_HALVING_TOLERANCE`] an accuracy error is
/// returned. A truncation error is returned when the top two levels of
/// either mode end up holding more than [`TOP_OCCUPATION_LIMIT`].
pub fn integrate(
    rho0: &FockDensityMatrix,
    cp: &ChannelParams,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<FockDensityMatrix> {
    cfg.validate(cp)?;
    if rho0.dim != cfg.dim {
        return Err(Error::domain(format!(
            "state has dim {} but the integrator is configured for {}",
            rho0.dim, cfg.dim
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let coarse = integrate_fixed_step(rho0, cp, t, cfg.step, |_, _| {})?;
    let fine = integrate_fixed_step(rho0, cp, t, 0.5 * cfg.step, |_, _| {})?;
    let change = coarse.moments().max_abs_diff(&fine.moments());
    if change > STEP_HALVING_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "halving the step changed a moment by {change:e}"
        )));
    }
    check_truncation(&fine)?;
    Ok(fine)
}

fn check_truncation(rho: &FockDensityMatrix) -> Result<()> {
    let top = rho.top_occupation();
    if top > TOP_OCCUPATION_LIMIT {
        return Err(Error::Truncation {
            reason: format!("top two Fock levels hold {top:e}"),
            min_dim: rho.dim + DIM_MARGIN,
        });
    }
    Ok(())
}

/// `(Σ₊², Σ₋²)` from symmetric-ordered moments with `x = (a + a†)/2`:
/// `Σ₊² = Var(x₁+x₂)/2`, `Σ₋² = Var(x₁−x₂)/2`.
pub fn extract_variances(rho: &FockDensityMatrix) -> Result<VariancePair> {
    let m = rho.moments();
    if m.a.norm() > MEAN_LIMIT || m.b.norm() > MEAN_LIMIT {
        return Err(Error::domain(format!(
            "state is displaced (<a> = {}, <b> = {})",
            m.a, m.b
        )));
    }
    // ⟨x₁²⟩ = (2 Re⟨a²⟩ + 2⟨a†a⟩ + 1)/4, ⟨x₁x₂⟩ = (Re⟨ab⟩ + Re⟨a†b⟩)/2
    let x1 = (2.0 * m.aa.re + 2.0 * m.n1 + 1.0) / 4.0;
    let x2 = (2.0 * m.bb.re + 2.0 * m.n2 + 1.0) / 4.0;
    let x12 = 0.5 * (m.ab.re + m.ad_b.re);
    Ok(VariancePair {
        var_plus: 0.5 * (x1 + x2 + 2.0 * x12),
        var_minus: 0.5 * (x1 + x2 - 2.0 * x12),
    })
}

/// Partial transpose on the second mode: `⟨n₁n₂|ρ^T|m₁m₂⟩ = ⟨n₁m₂|ρ|m₁n₂⟩`.
pub fn partial_transpose(rho: &FockDensityMatrix) -> FockDensityMatrix {
    let d = rho.dim;
    let mut out = FockDensityMatrix::zeros(d);
    let size = d * d;
    for n1 in 0..d {
        for n2 in 0..d {
            for m1 in 0..d {
                for m2 in 0..d {
                    out.entries[(n1 * d + n2) * size + m1 * d + m2] = rho.get(n1, m2, m1, n2);
                }
            }
        }
    }
    out
}

/// Smallest eigenvalue of the partial transpose; negative means entangled.
pub fn partial_transpose_min_eigenvalue(rho: &FockDensityMatrix) -> f64 {
    let pt = partial_transpose(rho);
    hermitian_eigenvalues_blocked(pt.size(), &pt.entries)[0]
}

/// Uhlmann fidelity `(Tr √(√σ ρ √σ))²` between `rho` and the truncated
/// thermal product with `m` photons per mode.
pub fn thermal_fidelity(rho: &FockDensityMatrix, m: f64) -> Result<f64> {
    let sigma = FockDensityMatrix::thermal_product(m, rho.dim)?;
    let size = rho.size();
    let root: Vec<f64> = (0..size)
        .map(|r| sigma.entries[r * size + r].re.max(0.0).sqrt())
        .collect();
    let mut sandwich = rho.entries.clone();
    for r in 0..size {
        for c in 0..size {
            sandwich[r * size + c] *= root[r] * root[c];
        }
    }
    let ev = hermitian_eigenvalues_blocked(size, &sandwich);
    let s: f64 = ev.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(s * s)
}

/// One row of the optional moment time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSample {
    pub t: f64,
    pub trace: f64,
    pub sigma_plus_sq: f64,
    pub sigma_minus_sq: f64,
    pub min_pt_eig: f64,
}

fn sample_of(t: f64, rho: &FockDensityMatrix) -> Result<MomentSample> {
    let v = extract_variances(rho)?;
    Ok(MomentSample {
        t,
        trace: rho.trace().re,
        sigma_plus_sq: v.var_plus,
        sigma_minus_sq: v.var_minus,
        min_pt_eig: partial_transpose_min_eigenvalue(rho),
    })
}

/// Moment time series recorded every `every` steps of a fixed-step run
/// (the initial state is always included).
pub fn moment_series(
    rho0: &FockDensityMatrix,
    cp: &ChannelParams,
    t: f64,
    cfg: &IntegratorConfig,
    every: usize,
) -> Result<Vec<MomentSample>> {
    cfg.validate(cp)?;
    let every = every.max(1);
    let mut out = vec![sample_of(0.0, rho0)?];
    let mut err = None;
    let mut count = 0usize;
    integrate_fixed_step(rho0, cp, t, cfg.step, |time, rho| {
        count += 1;
        if err.is_none() && count.is_multiple_of(every) {
            match sample_of(time, rho) {
                Ok(s) => out.push(s),
                Err(e) => err = Some(e),
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Write a moment series as CSV with header
/// `t,trace,sigma_plus_sq,sigma_minus_sq,min_pt_eig`.
pub fn write_moment_csv<W: Write>(out: &mut W, series: &[MomentSample]) -> std::io::Result<()> {
    writeln!(out, "t,trace,sigma_plus_sq,sigma_minus_sq,min_pt_eig")?;
    for s in series {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.t, s.trace, s.sigma_plus_sq, s.sigma_minus_sq, s.min_pt_eig
        )?;
    }
    Ok(())
}
