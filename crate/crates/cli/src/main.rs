//! `spdc-spiral`: joint OAM spectra, overlap amplitudes and entanglement
//! metrics of collinear SPDC photon pairs, emitted as CSV/JSON datasets.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{AmplitudeMethod, SourceArg};
use config::{RawConfig, RunConfig};
use error::{CliError, CliResult};

/// Default output directory when `--out-dir` is absent.
const OUT_DIR_ENV: &str = "SPDC_SPIRAL_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "spdc-spiral",
    version,
    about = "Joint OAM spectra and entanglement metrics of SPDC photon pairs",
    after_help = "Keys in the config file (key = value, one per line, # comments) are\n\
                  overridden by the matching command-line flags."
)]
struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (default: $SPDC_SPIRAL_OUT_DIR or '.').
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Normalized pump width.
    #[arg(long, global = true)]
    wbar_p: Option<f64>,
    /// Normalized analysis-mode width.
    #[arg(long, global = true)]
    wbar_0: Option<f64>,
    /// Pump refractive index.
    #[arg(long, global = true)]
    n_p: Option<f64>,
    /// Pump vacuum wavelength in meters (physical block).
    #[arg(long, global = true)]
    lambda_p_m: Option<f64>,
    /// Crystal length in meters (physical block).
    #[arg(long = "L-m", global = true)]
    l_m: Option<f64>,
    /// Pump beam width in meters (physical block).
    #[arg(long, global = true)]
    w_p_m: Option<f64>,
    /// Analysis beam width in meters (physical block).
    #[arg(long, global = true)]
    w0_m: Option<f64>,
    /// Pump winding number (single LG mode).
    #[arg(long, global = true)]
    pump_l0: Option<i32>,
    /// Pump superposition, comma-separated m:re:im entries.
    #[arg(long, global = true)]
    pump_coeffs: Option<String>,
    /// Winding truncation.
    #[arg(long, global = true)]
    l_max: Option<u32>,
    /// Radial-index truncation.
    #[arg(long, global = true)]
    p_max: Option<u32>,
    /// Quadrature refinement tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Initial radial panels.
    #[arg(long, global = true)]
    panels: Option<usize>,
    /// Gauss-Legendre points per panel.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Base azimuthal point count.
    #[arg(long, global = true)]
    angular: Option<usize>,
    /// Maximum panel doublings.
    #[arg(long, global = true)]
    refine_max: Option<usize>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file (relative paths resolve inside the output directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint OAM weight table P_{l1,l2}.
    Spectrum,
    /// A single mode-pair amplitude record.
    Amplitude {
        #[arg(long, allow_hyphen_values = true)]
        l1: i32,
        #[arg(long, default_value_t = 0)]
        p1: u32,
        #[arg(long, allow_hyphen_values = true)]
        l2: i32,
        #[arg(long, default_value_t = 0)]
        p2: u32,
        #[arg(long, value_enum, default_value_t = AmplitudeMethod::Quadrature)]
        method: AmplitudeMethod,
    },
    /// Cumulative radial weight of one winding pair as p_max grows.
    Cumulative {
        #[arg(long, allow_hyphen_values = true)]
        l1: i32,
        #[arg(long, allow_hyphen_values = true)]
        l2: i32,
    },
    /// Entropy of entanglement and Schmidt metrics of the p = 0 subspace.
    Entropy {
        #[arg(long, value_enum, default_value_t = SourceArg::Closed)]
        source: SourceArg,
    },
    /// Reproduce a figure dataset: 1a, 1b, 1c, 2a, 2b or 3.
    Figure { id: String },
    /// Run the oracle-equivalence and normalization self-checks.
    Validate,
}

fn merge_flags(cli: &Cli, raw: &mut RawConfig) {
    macro_rules! set_if {
        ($field:expr, $key:literal) => {
            if let Some(v) = &$field {
                raw.set($key, v);
            }
        };
    }
    set_if!(cli.wbar_p, "wbar_p");
    set_if!(cli.wbar_0, "wbar_0");
    set_if!(cli.n_p, "n_p");
    set_if!(cli.lambda_p_m, "lambda_p_m");
    set_if!(cli.l_m, "L_m");
    set_if!(cli.w_p_m, "w_p_m");
    set_if!(cli.w0_m, "w0_m");
    set_if!(cli.pump_l0, "pump_l0");
    set_if!(cli.pump_coeffs, "pump_coeffs");
    set_if!(cli.l_max, "l_max");
    set_if!(cli.p_max, "p_max");
    set_if!(cli.tol, "tol");
    set_if!(cli.panels, "panels");
    set_if!(cli.points, "points");
    set_if!(cli.angular, "angular");
    set_if!(cli.refine_max, "refine_max");
    set_if!(cli.format, "format");
    if let Some(out) = &cli.out {
        raw.set("out", out.display());
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        // Ignore the error if a pool already exists (e.g. repeated calls in
        // tests); per-amplitude results do not depend on the thread count.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }

    let mut raw = match &cli.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    merge_flags(cli, &mut raw);
    let cfg: RunConfig = config::build(&raw)?;

    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    match &cli.command {
        Command::Spectrum => commands::cmd_spectrum(&cfg, &out_dir),
        Command::Amplitude { l1, p1, l2, p2, method } => {
            commands::cmd_amplitude(&cfg, &out_dir, *l1, *p1, *l2, *p2, *method)
        }
        Command::Cumulative { l1, l2 } => commands::cmd_cumulative(&cfg, &out_dir, *l1, *l2),
        Command::Entropy { source } => commands::cmd_entropy(&cfg, &out_dir, *source),
        Command::Figure { id } => commands::cmd_figure(&cfg, &out_dir, id),
        Command::Validate => commands::cmd_validate(&cfg, &out_dir),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
