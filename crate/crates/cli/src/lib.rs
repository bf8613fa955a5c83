//! Command implementations behind the `twinbeam` binary.
//!
//! Every command writes its machine-readable output to the supplied writer
//! and returns the process exit status. All numbers come from the
//! `twinbeam` library.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use twinbeam::crosscheck::{self, OracleCase, OracleOutcome, OracleOverrides};
use twinbeam::separability::threshold_tau;
use twinbeam::tables::{self, evolve_table, linspace, uniform_grid};
use twinbeam::teleportation::{beats_classical, FidelityBound};
use twinbeam::{
    evolve, evolve_by_convolution, fidelity, threshold_time, wigner_eval, ChannelParams,
    PhasePoint, TeleportationParams, Threshold, TwinBeamParams,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_INFINITE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "twinbeam",
    version,
    about = "Twin-beam entanglement and teleportation fidelity in noisy active fibres"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the evolved variances, separability and fidelity over time
    #[command(allow_negative_numbers = true)]
    Evolve(EvolveArgs),
    /// Print the time after which the state becomes separable
    #[command(allow_negative_numbers = true)]
    Threshold(ThresholdArgs),
    /// Print the coherent-state teleportation fidelity
    #[command(allow_negative_numbers = true)]
    Fidelity(FidelityArgs),
    /// Threshold time against photon number for several thermal noise levels
    #[command(allow_negative_numbers = true)]
    Fig1(Fig1Args),
    /// Cross-check the closed forms against the Fock-space master equation
    #[command(allow_negative_numbers = true)]
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct TwinBeamInput {
    /// Squeezing parameter λ (gain of the parametric source)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Total mean photon number N of the twin-beam
    #[arg(long = "n-mean")]
    pub n_mean: Option<f64>,
}

impl TwinBeamInput {
    fn resolve(&self) -> twinbeam::Result<TwinBeamParams> {
        match (self.lambda, self.n_mean) {
            (Some(l), _) => TwinBeamParams::from_lambda(l),
            (_, Some(n)) => TwinBeamParams::from_photon_number(n),
            _ => unreachable!("clap enforces one twin-beam input"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChannelInput {
    /// Damping rate Γ (1/time)
    #[arg(long = "gamma-rate", default_value_t = 1.0)]
    pub gamma_rate: f64,
    /// Thermal photon number M of the fibres
    #[arg(long = "thermal-m", default_value_t = 0.5)]
    pub thermal_m: f64,
}

impl ChannelInput {
    fn resolve(&self) -> twinbeam::Result<ChannelParams> {
        ChannelParams::new(self.gamma_rate, self.thermal_m)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TimeInput {
    /// Single evolution time
    #[arg(long, conflicts_with_all = ["t_start", "t_stop", "t_steps"])]
    pub t: Option<f64>,
    /// First time of an evenly spaced grid
    #[arg(long = "t-start", requires_all = ["t_stop", "t_steps"])]
    pub t_start: Option<f64>,
    /// Last time of the grid
    #[arg(long = "t-stop", requires_all = ["t_start", "t_steps"])]
    pub t_stop: Option<f64>,
    /// Number of grid points
    #[arg(long = "t-steps", requires_all = ["t_start", "t_stop"])]
    pub t_steps: Option<usize>,
}

impl TimeInput {
    fn is_given(&self) -> bool {
        self.t.is_some() || self.t_start.is_some()
    }

    fn grid(&self) -> Result<Vec<f64>, CliError> {
        match (self.t, self.t_start, self.t_stop, self.t_steps) {
            (Some(t), ..) => Ok(vec![t]),
            (None, Some(a), Some(b), Some(n)) => Ok(linspace(a, b, n)?),
            _ => Err(CliError::Usage(
                "give either --t or all of --t-start/--t-stop/--t-steps".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputOptions {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub twin: TwinBeamInput,
    #[command(flatten)]
    pub channel: ChannelInput,
    #[command(flatten)]
    pub time: TimeInput,
    /// Teleportation efficiency η in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Also estimate W at the origin by Monte-Carlo convolution with this many samples
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<usize>,
    /// Seed for the Monte-Carlo estimate
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub twin: TwinBeamInput,
    #[command(flatten)]
    pub channel: ChannelInput,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub twin: TwinBeamInput,
    #[command(flatten)]
    pub channel: ChannelInput,
    #[command(flatten)]
    pub time: TimeInput,
    /// Teleportation efficiency η in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Count F = 1/2 exactly as quantum
    #[arg(long = "inclusive-bound")]
    pub inclusive_bound: bool,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// Largest photon number on the grid
    #[arg(long = "n-max", default_value_t = tables::REFERENCE_N_MAX)]
    pub n_max: f64,
    /// Photon-number spacing
    #[arg(long = "n-step", default_value_t = tables::REFERENCE_N_STEP)]
    pub n_step: f64,
    /// Thermal photon numbers, one curve each
    #[arg(long = "m-values", value_delimiter = ',', default_values_t = tables::REFERENCE_M_VALUES)]
    pub m_values: Vec<f64>,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Squeezing parameter (default: 0.2, 0.4 and 0.6)
    #[arg(long, conflicts_with = "n_mean")]
    pub lambda: Option<f64>,
    /// Photon number instead of λ
    #[arg(long = "n-mean")]
    pub n_mean: Option<f64>,
    /// Damping rate Γ
    #[arg(long = "gamma-rate", default_value_t = 1.0)]
    pub gamma_rate: f64,
    /// Thermal photon number (default: 0.1, 0.5 and 1.0)
    #[arg(long = "thermal-m")]
    pub thermal_m: Option<f64>,
    /// Times (default: Γt = 0.1, 0.5 and 1.0)
    #[command(flatten)]
    pub time: TimeInput,
    /// Fock truncation per mode (default: chosen automatically)
    #[arg(long)]
    pub dim: Option<usize>,
    /// RK4 step (default: 0.025/(Γ(2M+1)))
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    pub output: OutputOptions,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<twinbeam::Error> for CliError {
    fn from(e: twinbeam::Error) -> Self {
        match e {
            twinbeam::Error::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// Run a parsed command. Output goes to `--out` when given, otherwise to
/// `stdout`; human-readable notes go to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, CliError> {
    let output = match &cli.command {
        Command::Evolve(a) => &a.output,
        Command::Threshold(a) => &a.output,
        Command::Fidelity(a) => &a.output,
        Command::Fig1(a) => &a.output,
        Command::Oracle(a) => &a.output,
    };
    let mut buf = Vec::new();
    let code = match &cli.command {
        Command::Evolve(a) => cmd_evolve(a, &mut buf)?,
        Command::Threshold(a) => cmd_threshold(a, &mut buf, stderr)?,
        Command::Fidelity(a) => cmd_fidelity(a, &mut buf)?,
        Command::Fig1(a) => cmd_fig1(a, &mut buf)?,
        Command::Oracle(a) => cmd_oracle(a, &mut buf, stderr)?,
    };
    match &output.out {
        Some(path) => std::fs::write(path, &buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(code)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct EvolveRecord {
    #[serde(flatten)]
    row: tables::EvolveRow,
    #[serde(skip_serializing_if = "Option::is_none")]
    wigner_origin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wigner_origin_mc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wigner_origin_mc_stderr: Option<f64>,
}

pub fn cmd_evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let tb = a.twin.resolve()?;
    let cp = a.channel.resolve()?;
    let tp = TeleportationParams::new(a.eta)?;
    let times = a.time.grid()?;
    let rows = evolve_table(&tb, &cp, &times, &tp)?;
    let mut records = Vec::with_capacity(rows.len());
    for row in rows {
        let mut rec = EvolveRecord {
            row,
            wigner_origin: None,
            wigner_origin_mc: None,
            wigner_origin_mc_stderr: None,
        };
        if let Some(n) = a.mc_samples {
            let origin = PhasePoint::origin();
            rec.wigner_origin = Some(wigner_eval(&evolve(&tb, &cp, row.t)?.variances, &origin));
            if row.t > 0.0 {
                let est = evolve_by_convolution(&tb, &cp, row.t, &origin, n, a.seed)?;
                rec.wigner_origin_mc = Some(est.value);
                rec.wigner_origin_mc_stderr = Some(est.std_error);
            }
        }
        records.push(rec);
    }
    match a.output.format {
        Format::Json => write_json(out, &records)?,
        Format::Csv => {
            write!(out, "t,tau,sigma_plus_sq,sigma_minus_sq,separable,fidelity")?;
            if a.mc_samples.is_some() {
                write!(
                    out,
                    ",wigner_origin,wigner_origin_mc,wigner_origin_mc_stderr"
                )?;
            }
            writeln!(out)?;
            for rec in &records {
                let r = &rec.row;
                write!(
                    out,
                    "{},{},{},{},{},{}",
                    r.t, r.tau, r.sigma_plus_sq, r.sigma_minus_sq, r.separable, r.fidelity
                )?;
                if a.mc_samples.is_some() {
                    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                    write!(
                        out,
                        ",{},{},{}",
                        opt(rec.wigner_origin),
                        opt(rec.wigner_origin_mc),
                        opt(rec.wigner_origin_mc_stderr)
                    )?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ThresholdRecord {
    t_s: Threshold,
    tau_s: Threshold,
}

pub fn cmd_threshold(
    a: &ThresholdArgs,
    out: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, CliError> {
    let tb = a.twin.resolve()?;
    let cp = a.channel.resolve()?;
    let rec = ThresholdRecord {
        t_s: threshold_time(&tb, &cp),
        tau_s: threshold_tau(&tb, &cp),
    };
    match a.output.format {
        Format::Json => write_json(out, &rec)?,
        Format::Csv => writeln!(out, "t_s,tau_s\n{},{}", rec.t_s, rec.tau_s)?,
    }
    match rec.t_s {
        Threshold::Finite(t) => {
            writeln!(
                stderr,
                "state becomes separable after t_s = {t:.6} (Γ t_s = {:.6}, τ_s = {})",
                t * cp.gamma_rate(),
                rec.tau_s
            )?;
            Ok(EXIT_OK)
        }
        Threshold::Infinite => {
            writeln!(
                stderr,
                "entanglement survives for all times (threshold infinite)"
            )?;
            Ok(EXIT_INFINITE)
        }
    }
}

#[derive(Serialize)]
struct FidelityRecord {
    t: f64,
    fidelity: f64,
    quantum: bool,
}

pub fn cmd_fidelity(a: &FidelityArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let tb = a.twin.resolve()?;
    let cp = a.channel.resolve()?;
    let tp = TeleportationParams::new(a.eta)?;
    let bound = if a.inclusive_bound {
        FidelityBound::Inclusive
    } else {
        FidelityBound::Strict
    };
    let records = a
        .time
        .grid()?
        .into_iter()
        .map(|t| {
            let f = fidelity(&tb, &cp, t, &tp)?;
            Ok(FidelityRecord {
                t,
                fidelity: f,
                quantum: beats_classical(f, bound),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    match a.output.format {
        Format::Json => write_json(out, &records)?,
        Format::Csv => {
            writeln!(out, "t,fidelity,quantum")?;
            for r in &records {
                writeln!(out, "{},{},{}", r.t, r.fidelity, r.quantum)?;
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_fig1(a: &Fig1Args, out: &mut dyn Write) -> Result<u8, CliError> {
    if a.m_values.is_empty() {
        return Err(CliError::Usage("--m-values must not be empty".into()));
    }
    let grid = uniform_grid(a.n_max, a.n_step)?;
    let curves = tables::threshold_curves(&grid, &a.m_values)?;
    match a.output.format {
        Format::Json => write_json(out, &curves)?,
        Format::Csv => {
            write!(out, "N")?;
            for m in &curves.m_values {
                write!(out, ",t_s(M={m:?})")?;
            }
            writeln!(out)?;
            for (n, row) in curves.n_values.iter().zip(&curves.rows) {
                write!(out, "{n}")?;
                for t in row {
                    write!(out, ",{t}")?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn oracle_cases(a: &OracleArgs) -> Result<Vec<OracleCase>, CliError> {
    let lambdas = match (a.lambda, a.n_mean) {
        (Some(l), _) => vec![TwinBeamParams::from_lambda(l)?.lambda()],
        (_, Some(n)) => vec![TwinBeamParams::from_photon_number(n)?.lambda()],
        _ => crosscheck::GRID_LAMBDAS.to_vec(),
    };
    let ms = match a.thermal_m {
        Some(m) => vec![m],
        None => crosscheck::GRID_M_VALUES.to_vec(),
    };
    let times = if a.time.is_given() {
        a.time.grid()?
    } else {
        crosscheck::GRID_GAMMA_T
            .iter()
            .map(|gt| gt / a.gamma_rate)
            .collect()
    };
    let mut cases = Vec::new();
    for &lambda in &lambdas {
        for &m_thermal in &ms {
            for &time in &times {
                cases.push(OracleCase {
                    lambda,
                    m_thermal,
                    gamma_rate: a.gamma_rate,
                    time,
                });
            }
        }
    }
    Ok(cases)
}

pub fn cmd_oracle(
    a: &OracleArgs,
    out: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, CliError> {
    let cases = oracle_cases(a)?;
    let overrides = OracleOverrides {
        dim: a.dim,
        step: a.step,
    };
    let results = crosscheck::run_grid(&cases, &overrides);
    let mut ok: Vec<OracleOutcome> = Vec::new();
    let mut failed = false;
    for (case, res) in cases.iter().zip(results) {
        match res {
            Ok(o) => {
                if !o.passed() {
                    failed = true;
                    writeln!(stderr, "tolerance breach at {case:?}")?;
                }
                ok.push(o);
            }
            Err(e) => {
                failed = true;
                writeln!(stderr, "error at {case:?}: {e}")?;
            }
        }
    }
    match a.output.format {
        Format::Json => write_json(out, &ok)?,
        Format::Csv => {
            writeln!(
                out,
                "lambda,thermal_m,gamma_rate,t,dim,step,sigma_plus_sq,sigma_plus_sq_oracle,\
                 sigma_minus_sq,sigma_minus_sq_oracle,diff_plus,diff_minus,ppt_min_eig,\
                 pt_min_eig,ppt_agree"
            )?;
            for o in &ok {
                let c = &o.case;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{:e},{:e},{:e},{:e},{}",
                    c.lambda,
                    c.m_thermal,
                    c.gamma_rate,
                    c.time,
                    o.dim,
                    o.step,
                    o.closed.var_plus,
                    o.oracle.var_plus,
                    o.closed.var_minus,
                    o.oracle.var_minus,
                    o.diff_plus,
                    o.diff_minus,
                    o.ppt_min_eigenvalue,
                    o.pt_min_eigenvalue,
                    o.ppt_agree
                )?;
            }
        }
    }
    let worst = ok
        .iter()
        .map(|o| o.diff_plus.max(o.diff_minus))
        .fold(0.0_f64, f64::max);
    writeln!(
        stderr,
        "{} of {} cases checked, largest variance difference {worst:e} (tolerance {:e})",
        ok.len(),
        cases.len(),
        crosscheck::ORACLE_TOLERANCE
    )?;
    Ok(if failed { EXIT_NUMERICAL } else { EXIT_OK })
}
