//! `srmimo` — drive BER sweeps for single-RF MIMO schemes, inspect spectral
//! efficiency, plot result files and compare curves.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 semantically invalid
//! configuration, 4 I/O failure.

mod catalog;
mod csvio;
mod scenario;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use srmimo_core::mapping::spectral_efficiency;
use srmimo_core::sim::{self, BerPoint};

#[derive(Parser)]
#[command(name = "srmimo", version, about = "Link-level simulator for single-RF MIMO schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo sweep described by a scenario file and write a CSV.
    Simulate(SimulateArgs),
    /// Print spectral efficiency and RF-chain count for a scheme.
    Se(SeArgs),
    /// Render one or more sweep CSVs as a semilog SVG plot.
    Plot(PlotArgs),
    /// Interpolate the SNR gain of one sweep over another at a target BER.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario file (key = value lines with one [scheme] section).
    scenario: PathBuf,
    /// Override the scenario's SNR grid: a single dB value or start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Override the scenario's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (default: the scenario's `out` key, else its stem + .csv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Results are
    /// byte-identical for any worker count.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SeArgs {
    /// Scheme tag: sm gsm qsm rsm rqsm mbm ris-mimo ris-gsm ris-qsm ris-rsm ris-rqsm
    scheme: String,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    na: Option<usize>,
    /// Metasurface element count (RIS schemes).
    #[arg(long)]
    n: Option<usize>,
    /// Element group count (RIS schemes).
    #[arg(long)]
    ng: Option<usize>,
    /// RF mirror count (MBM).
    #[arg(long)]
    mirrors: Option<usize>,
    /// Constellation order; assumes PSK (same spectral efficiency as any family).
    #[arg(long)]
    m: Option<usize>,
    /// Constellation family and order, e.g. qam16, psk8, pam4.
    #[arg(long)]
    modulation: Option<String>,
    /// PAM order for ris-rqsm (omit for the sign-bit mode).
    #[arg(long)]
    pam: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep CSVs, one curve each.
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Sweep whose gain is reported.
    a: PathBuf,
    /// Reference sweep.
    b: PathBuf,
    /// Target BER at which the two curves are interpolated.
    #[arg(long, default_value_t = 1e-3)]
    ber: f64,
}

enum CliError {
    Usage(String),
    Config(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Se(args) => cmd_se(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.scenario).map_err(|e| io_err(&args.scenario, e))?;
    let display = args.scenario.display().to_string();
    let mut scn =
        scenario::parse_scenario(&text, &display).map_err(|e| CliError::Usage(e.to_string()))?;

    if let Some(snr) = &args.snr {
        scn.spec.snr_db = scenario::parse_snr_grid(snr)
            .map_err(|m| CliError::Usage(format!("--snr: {m}")))?;
    }
    if let Some(seed) = args.seed {
        scn.spec.seed = seed;
    }
    scn.spec.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let workers = match args.workers {
        Some(0) => return Err(CliError::Usage("--workers must be >= 1".into())),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };

    let se = spectral_efficiency(&scn.spec.scheme).map_err(|e| CliError::Config(e.to_string()))?;
    let tag = scn.spec.scheme.tag();
    eprintln!("{tag}: {se} bpcu, seed {}, {} workers", scn.spec.seed, workers);

    let mut points = Vec::with_capacity(scn.spec.snr_db.len());
    for idx in 0..scn.spec.snr_db.len() {
        let p = sim::run_point_parallel(&scn.spec, idx, workers)
            .map_err(|e| CliError::Config(e.to_string()))?;
        eprintln!(
            "  {:>7.2} dB  ber {:.3e}  ({} errors / {} bits{})",
            p.snr_db,
            p.ber(),
            p.errors,
            p.bits,
            if p.redraws > 0 { format!(", {} channel redraws", p.redraws) } else { String::new() }
        );
        points.push(p);
    }

    let out = args
        .out
        .or_else(|| scn.out.map(PathBuf::from))
        .unwrap_or_else(|| args.scenario.with_extension("csv"));
    let mut buf = Vec::new();
    csvio::write_csv(&mut buf, tag, se, scn.spec.seed, &points)
        .map_err(|e| io_err(&out, e))?;
    fs::write(&out, &buf).map_err(|e| io_err(&out, e))?;
    println!("wrote {} ({} points)", out.display(), points.len());
    Ok(())
}

fn cmd_se(args: SeArgs) -> Result<(), CliError> {
    let params = catalog::SeParams {
        nt: args.nt,
        nr: args.nr,
        na: args.na,
        n: args.n,
        ng: args.ng,
        mirrors: args.mirrors,
        m: args.m,
        modulation: args.modulation.clone(),
        pam: args.pam,
    };
    let cfg = catalog::se_config(&args.scheme, &params).map_err(CliError::Usage)?;
    let se = spectral_efficiency(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    println!("scheme: {}", cfg.tag());
    println!("rf chains/antennas: {}", catalog::chains_label(cfg.tag()));
    println!("spectral efficiency: {se} bpcu");
    Ok(())
}

fn load_sweep(path: &Path) -> Result<csvio::SweepData, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    csvio::read_csv(&text, &path.display().to_string()).map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let sweeps: Vec<csvio::SweepData> =
        args.csv.iter().map(|p| load_sweep(p)).collect::<Result<_, _>>()?;
    let mut curves = Vec::with_capacity(sweeps.len());
    for (path, data) in args.csv.iter().zip(&sweeps) {
        let total = data.points.len();
        let points: Vec<(f64, f64)> = data
            .points
            .iter()
            .filter(|p| p.errors > 0)
            .map(|p| (p.snr_db, p.ber()))
            .collect();
        let omitted = total - points.len();
        if omitted > 0 {
            eprintln!(
                "note: {}: {omitted} of {total} points have zero measured BER and are omitted \
                 from the log-scale plot",
                path.display()
            );
        }
        if points.is_empty() {
            eprintln!(
                "warning: {}: no plottable points; drawing an empty curve",
                path.display()
            );
        }
        // Legend is the scheme tag; repeated tags get the seed appended.
        let label = if sweeps.iter().filter(|s| s.tag == data.tag).count() > 1 {
            format!("{} (seed {})", data.tag, data.seed)
        } else {
            data.tag.clone()
        };
        curves.push(svg::Curve { label, points });
    }
    let out = svg::render(&curves);
    fs::write(&args.out, out).map_err(|e| io_err(&args.out, e))?;
    println!("wrote {} ({} curves)", args.out.display(), curves.len());
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    if !(args.ber.is_finite() && args.ber > 0.0 && args.ber < 1.0) {
        return Err(CliError::Usage("--ber must be in (0, 1)".into()));
    }
    let a = load_sweep(&args.a)?;
    let b = load_sweep(&args.b)?;
    if a.se != b.se {
        eprintln!("note: spectral efficiencies differ ({} vs {} bpcu)", a.se, b.se);
    }
    let detail = |name: &Path, points: &[BerPoint]| {
        format!("{} ({} points)", name.display(), points.len())
    };
    let gain = sim::gain_at_ber(&a.points, &b.points, args.ber).map_err(|e| {
        CliError::Config(format!(
            "cannot interpolate both curves at BER {:e}: {e} [{} vs {}]",
            args.ber,
            detail(&args.a, &a.points),
            detail(&args.b, &b.points)
        ))
    })?;
    println!("gain of {} over {} at BER {:e}: {:.2} dB", a.tag, b.tag, args.ber, gain);
    Ok(())
}
