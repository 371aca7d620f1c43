use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use spinarrival::csv_out;
use spinarrival::plotscript::script_for;
use spinarrival::point::{evaluate, render, Method};
use spinarrival::config::{resolve, Family, Overrides, Preset, Selectors, Spacing, Triple};
use spinarrival::sweep::run_sweep;
use spinarrival::validate::{run, Tier};
use spinarrival::{default_output, OUT_DIR_ENV};
use spinarrival_core::{AsymmetricPacket, Packet, SpaceTimePoint, SpinVector, SymmetricPacket};

#[derive(Parser)]
#[command(name = "spinarrival", version, about = "Spin-dependent mean arrival times of free Gaussian packets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print ρ, J_i, J_s and J at one space-time point.
    Point(PointArgs),
    /// Sweep the group velocity and write a CSV.
    Sweep(SweepArgs),
    /// Run the invariant suites; exits non-zero on any failure.
    Validate {
        #[arg(long, default_value = "fast")]
        tier: Tier,
    },
    /// Write a matplotlib script that plots a sweep CSV.
    Plotscript {
        csv: PathBuf,
        /// Script path; defaults to the CSV path with a `.py` extension.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Image the script saves; defaults to the CSV path with a `.png` extension.
        #[arg(long)]
        image: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, default_value = "symmetric")]
    family: Family,
    #[arg(long, default_value_t = 0.01)]
    sigma0: f64,
    #[arg(long, default_value_t = 0.001)]
    a: f64,
    #[arg(long, default_value_t = 0.4)]
    b: f64,
    #[arg(long, default_value_t = 0.01)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    x1: f64,
    #[arg(long)]
    u: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
    #[arg(long)]
    t: f64,
    /// Spin direction; the magnitude is always 1/2.
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    spin: Triple,
    #[arg(long, default_value = "closed")]
    method: Method,
    /// Finite-difference step for `--method numeric`.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    preset: Option<Preset>,
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory used when `--out` is absent.
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    detector: Option<Triple>,
    #[arg(long, allow_hyphen_values = true)]
    u_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    u_max: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    #[arg(long)]
    spacing: Option<Spacing>,
    /// Comma separated subset of tau, tau_i, tau_s.
    #[arg(long)]
    selectors: Option<Selectors>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    t_initial: Option<f64>,
    #[arg(long)]
    max_doublings: Option<u32>,
    #[arg(long)]
    tail_fraction: Option<f64>,
    #[arg(long)]
    max_panels: Option<usize>,
}

impl SweepArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            preset: self.preset,
            family: self.family,
            sigma0: self.sigma0,
            a: self.a,
            b: self.b,
            c: self.c,
            x1: self.x1,
            detector: self.detector.map(|t| t.0),
            u_min: self.u_min,
            u_max: self.u_max,
            n_points: self.n_points,
            spacing: self.spacing,
            selectors: self.selectors,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            t_initial: self.t_initial,
            max_doublings: self.max_doublings,
            tail_fraction: self.tail_fraction,
            max_panels: self.max_panels,
        }
    }
}

fn cmd_point(args: PointArgs) -> Result<()> {
    let packet: Packet = match args.family {
        Family::Symmetric => SymmetricPacket::new(args.sigma0, args.u)?.into(),
        Family::Asymmetric => AsymmetricPacket::new(args.a, args.b, args.c, args.x1, args.u)?.into(),
    };
    let spin = SpinVector::along(args.spin.0)?;
    let pt = SpaceTimePoint::new(args.x, args.y, args.z, args.t);
    let sample = evaluate(&packet, pt, spin, args.method, args.step)?;
    print!("{}", render(&sample));
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => Overrides::load_config(path)?,
        None => Overrides::default(),
    };
    let flags = args.overrides();
    let spec = resolve(&config, &flags)?;
    let name = match flags.preset.or(config.preset) {
        Some(p) => format!("{p}.csv"),
        None => "sweep.csv".to_string(),
    };
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| default_output(args.out_dir.as_deref(), &name));
    let rows = run_sweep(&spec)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    csv_out::write_rows(std::io::BufWriter::new(file), &rows).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_plotscript(csv: PathBuf, out: Option<PathBuf>, image: Option<PathBuf>) -> Result<()> {
    let text = fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
    let out = out.unwrap_or_else(|| csv.with_extension("py"));
    let image = image.unwrap_or_else(|| csv.with_extension("png"));
    if out == csv {
        bail!("refusing to overwrite the input CSV");
    }
    let script = script_for(&text, &csv, &image).with_context(|| format!("malformed sweep CSV {}", csv.display()))?;
    fs::write(&out, script).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point(a) => cmd_point(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Plotscript { csv, out, image } => cmd_plotscript(csv, out, image),
        Command::Validate { tier } => {
            let report = run(tier);
            print!("{report}");
            let failed = report.failures().count();
            eprintln!("{} checks, {} failed", report.checks.len(), failed);
            return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
