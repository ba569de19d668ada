//! Command-line front end. Exit codes: 0 when every check passes, 1 when a
//! verification fails, 2 on bad input.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::completeness::{completeness_defect, DEFAULT_X_CUT};
use crate::dynamics::{TruncatedLattice, WavePacketParams, DEFAULT_BUFFER, DEFAULT_L, DEFAULT_SIGMA_X};
use crate::error::{Error, Result};
use crate::fuzz::{run_fuzz, FuzzConfig};
use crate::gallery::RandomGadgetConfig;
use crate::graph::{load_graph_with_tolerances, ScatteringGraph};
use crate::levinson::{
    levinson_report, winding_by_phase, winding_closed_form, DEFAULT_INITIAL_GRID, DEFAULT_MAX_REFINE,
};
use crate::quadrature::QuadratureConfig;
use crate::report::{analyze, CompletenessOptions};
use crate::smatrix::{circle_grid, s_matrix, s_matrix_on_circle, sample_circle, write_csv};
use crate::spectra::{bound_state_catalog, CountIdentityReport};
use crate::tolerance::ToleranceConfig;

/// Largest wave-packet deviation from `|S|^2` accepted by `evolve`.
pub const EVOLVE_TOLERANCE: f64 = 2e-2;
/// Norm and energy drift accepted by `evolve`.
pub const CONSERVATION_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "graphscat", version, about = "Scattering analysis of finite graphs with semi-infinite paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct TolArgs {
    #[arg(long)]
    tol_eps_herm: Option<f64>,
    #[arg(long)]
    tol_eps_rank: Option<f64>,
    #[arg(long)]
    tol_eps_root_cluster: Option<f64>,
    #[arg(long)]
    tol_eps_snap: Option<f64>,
    #[arg(long)]
    tol_eps_unitary: Option<f64>,
    #[arg(long)]
    tol_quad_target: Option<f64>,
}

impl TolArgs {
    fn apply(&self, mut tol: ToleranceConfig) -> Result<ToleranceConfig> {
        let pairs = [
            (self.tol_eps_herm, &mut tol.eps_herm),
            (self.tol_eps_rank, &mut tol.eps_rank),
            (self.tol_eps_root_cluster, &mut tol.eps_root_cluster),
            (self.tol_eps_snap, &mut tol.eps_snap),
            (self.tol_eps_unitary, &mut tol.eps_unitary),
            (self.tol_quad_target, &mut tol.quad_target),
        ];
        for (value, slot) in pairs {
            if let Some(v) = value {
                *slot = v;
            }
        }
        tol.validate()?;
        Ok(tol)
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound states, count identities, Levinson check and (optionally) completeness.
    Analyze {
        graph: PathBuf,
        #[arg(long)]
        completeness: bool,
        #[arg(long, default_value_t = DEFAULT_X_CUT)]
        x_cut: usize,
        #[command(flatten)]
        common: Common,
    },
    /// S-matrix at one momentum, one complex z, or on a uniform circle grid.
    Smatrix {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["z_re", "grid"])]
        k: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "z_im", conflicts_with = "grid")]
        z_re: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "z_re")]
        z_im: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Confined, unconfined and half-bound states with their counts.
    BoundStates {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Winding number of det S by phase tracking and from the roots of W.
    Winding {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_INITIAL_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_REFINE)]
        max_refine: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Winding number against the bound-state count.
    Levinson {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_INITIAL_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_REFINE)]
        max_refine: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Resolution of the identity on a window of vertices.
    Completeness {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_X_CUT)]
        x_cut: usize,
        #[arg(long, default_value_t = QuadratureConfig::default().max_panels)]
        max_panels: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Wave-packet scattering on a truncated lattice.
    Evolve {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k0: f64,
        /// Position-space width of the packet.
        #[arg(long, default_value_t = DEFAULT_SIGMA_X)]
        sigma: f64,
        #[arg(long = "L", default_value_t = DEFAULT_L)]
        l: usize,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 0)]
        path: usize,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_BUFFER)]
        buffer: usize,
        /// Density snapshots at evenly spaced times.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        snapshots: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Count and Levinson identities on seeded random gadgets.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        m_min: usize,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        #[arg(long, default_value_t = 2.0)]
        weight_bound: f64,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long)]
        real_only: bool,
        /// Where to write the first failing graph; stderr otherwise.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

struct Outcome {
    json: String,
    pass: bool,
}

fn outcome(value: &impl Serialize, pass: bool) -> Result<Outcome> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Outcome { json, pass })
}

fn load(path: &Path, tol: &TolArgs) -> Result<(ScatteringGraph, ToleranceConfig)> {
    let (graph, file_tol) = load_graph_with_tolerances(path)?;
    Ok((graph, tol.apply(file_tol)?))
}

fn csv_file(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn execute(command: &Command, stderr: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Analyze { graph, completeness, x_cut, common } => {
            let (g, tol) = load(graph, &common.tol)?;
            let opts = completeness.then_some(CompletenessOptions {
                x_cut: *x_cut,
                quad: QuadratureConfig::with_target(tol.quad_target),
            });
            let report = analyze(&g, &tol, opts)?;
            outcome(&report, report.pass)
        }
        Command::Smatrix { graph, k, z_re, z_im, grid, csv, common } => {
            let (g, tol) = load(graph, &common.tol)?;
            let samples = match (k, z_re.zip(*z_im), grid) {
                (Some(k), _, _) => vec![s_matrix_on_circle(&g, *k)?],
                (None, Some((re, im)), _) => vec![s_matrix(&g, Complex64::new(re, im))?],
                (None, None, grid) => sample_circle(&g, &circle_grid(grid.unwrap_or(64)))?,
            };
            if let Some(path) = csv {
                write_csv(&samples, csv_file(path)?)?;
            }
            let defect = samples
                .iter()
                .filter(|s| s.k.is_some())
                .map(|s| s.unitarity_defect())
                .fold(0.0, f64::max);
            let pass = defect <= tol.eps_unitary;
            outcome(&json!({ "samples": samples, "max_unitarity_defect": defect, "pass": pass }), pass)
        }
        Command::BoundStates { graph, common } => {
            let (g, tol) = load(graph, &common.tol)?;
            let catalog = bound_state_catalog(&g, &tol)?;
            let counts = CountIdentityReport::from_catalog(&catalog);
            let pass = counts.pass;
            outcome(&json!({ "catalog": catalog, "count_identities": counts, "pass": pass }), pass)
        }
        Command::Winding { graph, grid, max_refine, csv, common } => {
            let (g, tol) = load(graph, &common.tol)?;
            let phase = winding_by_phase(&g, *grid, *max_refine)?;
            if let Some(path) = csv {
                phase.write_csv(csv_file(path)?)?;
            }
            let closed = winding_closed_form(&g, &tol);
            let pass = closed == phase.winding;
            outcome(&json!({ "phase": phase, "winding_closed_form": closed, "pass": pass }), pass)
        }
        Command::Levinson { graph, grid, max_refine, csv, common } => {
            let (g, tol) = load(graph, &common.tol)?;
            let catalog = bound_state_catalog(&g, &tol)?;
            let phase = winding_by_phase(&g, *grid, *max_refine)?;
            if let Some(path) = csv {
                phase.write_csv(csv_file(path)?)?;
            }
            let report = levinson_report(&g, &catalog, &phase);
            outcome(&report, report.pass)
        }
        Command::Completeness { graph, x_cut, max_panels, common } => {
            let (g, tol) = load(graph, &common.tol)?;
            let quad = QuadratureConfig { max_panels: *max_panels, ..QuadratureConfig::with_target(tol.quad_target) };
            let report = completeness_defect(&g, *x_cut, &quad, &tol)?;
            outcome(&report, report.pass)
        }
        Command::Evolve { graph, k0, sigma, l, t, path, x0, buffer, csv, snapshots, common } => {
            let (g, _) = load(graph, &common.tol)?;
            let params = WavePacketParams { k0: *k0, sigma_x: *sigma, path: *path, x0: *x0, t: *t, buffer: *buffer };
            let lattice = TruncatedLattice::new(&g, *l)?;
            let run = lattice.scatter(&params)?;
            if let Some(p) = csv {
                let count = (*snapshots).max(2);
                let times: Vec<f64> =
                    (0..count).map(|i| run.t * i as f64 / (count - 1) as f64).collect();
                lattice.write_density_csv(&params, &times, csv_file(p)?)?;
            }
            let pass = run.max_prediction_error <= EVOLVE_TOLERANCE
                && run.norm_deviation <= CONSERVATION_TOLERANCE
                && run.energy_deviation <= CONSERVATION_TOLERANCE;
            outcome(&json!({ "run": run, "tolerance": EVOLVE_TOLERANCE, "pass": pass }), pass)
        }
        Command::Fuzz {
            seed,
            count,
            n_min,
            n_max,
            m_min,
            m_max,
            weight_bound,
            density,
            real_only,
            dump,
            common,
        } => {
            let tol = common.tol.apply(ToleranceConfig::default())?;
            if n_min > n_max || m_min > m_max || *n_min == 0 {
                return Err(Error::Domain("size bounds need 1 <= n_min <= n_max and m_min <= m_max".into()));
            }
            let cfg = FuzzConfig {
                seed: *seed,
                count: *count,
                gadget: RandomGadgetConfig {
                    n_min: *n_min,
                    n_max: *n_max,
                    m_min: *m_min,
                    m_max: *m_max,
                    weight_bound: *weight_bound,
                    imaginary: !real_only,
                    density: *density,
                },
            };
            let report = run_fuzz(&cfg, &tol);
            if let Some(failure) = &report.first_failure {
                let text = serde_json::to_string_pretty(&failure.graph).map_err(|e| Error::Parse(e.to_string()))?;
                match dump {
                    Some(path) => std::fs::write(path, text)?,
                    None => writeln!(stderr, "first failing graph (seed {}):\n{text}", failure.seed)?,
                }
            }
            outcome(&report, report.pass)
        }
    }
}

fn report_path(command: &Command) -> Option<&Path> {
    let common = match command {
        Command::Analyze { common, .. }
        | Command::Smatrix { common, .. }
        | Command::BoundStates { common, .. }
        | Command::Winding { common, .. }
        | Command::Levinson { common, .. }
        | Command::Completeness { common, .. }
        | Command::Evolve { common, .. }
        | Command::Fuzz { common, .. } => common,
    };
    common.report.as_deref()
}

/// Exit code for an error: 2 for input problems, 1 for failed computations.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_)
        | Error::Parse(_)
        | Error::Validation(_)
        | Error::Domain(_)
        | Error::ZeroArgument
        | Error::TruncationTooSmall(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = execute(&cli.command, stderr).and_then(|o| {
        match report_path(&cli.command) {
            Some(path) => std::fs::write(path, format!("{}\n", o.json))?,
            None => writeln!(stdout, "{}", o.json)?,
        }
        Ok(o.pass)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        // a closed stdout (e.g. piped into `head`) is not a failure
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
