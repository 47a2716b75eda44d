use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maplace::commands::{self, SweepVariable};
use maplace::config::{DesignKind, ExperimentConfig, OutputFormat, Resolved};
use maplace::error::{exit, CliError, Result};
use maplace::formats::{self, Report};
use maplace::parallel::Workers;
use maplace::verify;
use maplace_core::geometry::ArrayGeometry;

/// Near-field movable-antenna placement: design, evaluate, map and compare
/// linear arrays by their worst-case squared position error bound.
#[derive(Parser, Debug)]
#[command(name = "maplace", version)]
struct Cli {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Wavelength in meters.
    #[arg(long, global = true)]
    wavelength: Option<f64>,
    /// Carrier frequency in Hz (default 28e9).
    #[arg(long, global = true)]
    frequency: Option<f64>,
    /// Half-aperture in meters.
    #[arg(long, global = true)]
    half_aperture: Option<f64>,
    /// Half-aperture in wavelengths (default 25).
    #[arg(long, global = true)]
    half_aperture_wl: Option<f64>,
    /// Number of antennas.
    #[arg(short = 'n', long = "antennas", visible_alias = "max-n", global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    snapshots: Option<u32>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Angular grid resolution.
    #[arg(long, global = true)]
    n_u: Option<usize>,
    /// Radial grid resolution.
    #[arg(long, global = true)]
    n_r: Option<usize>,
    #[arg(long, global = true)]
    u_max: Option<f64>,
    /// proposed | proposed-asymptotic | ula | sparse-ula | two-edge | exhaustive | positions-file
    #[arg(long, global = true, value_parser = parse_design)]
    design: Option<DesignKind>,
    /// json | csv
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Candidate pitch for exhaustive search, meters.
    #[arg(long, global = true)]
    pitch: Option<f64>,
    /// Restrict exhaustive search to mirror-symmetric subsets.
    #[arg(long, global = true)]
    symmetry_prune: bool,
    /// Maximum number of subset-times-grid-point evaluations.
    #[arg(long, global = true)]
    search_budget: Option<u128>,
}

fn parse_design(s: &str) -> std::result::Result<DesignKind, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

impl Overrides {
    fn to_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            wavelength: self.wavelength,
            frequency: self.frequency,
            half_aperture: self.half_aperture,
            half_aperture_wl: self.half_aperture_wl,
            n: self.n,
            snapshots: self.snapshots,
            snr_db: self.snr_db,
            n_u: self.n_u,
            n_r: self.n_r,
            u_max: self.u_max,
            design: self.design,
            format: self.format,
            seed: self.seed,
            pitch: self.pitch,
            symmetry_prune: self.symmetry_prune.then_some(true),
            search_budget: self.search_budget,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the selected design and report its worst case.
    Design {
        /// Write positions here, one per line.
        #[arg(long, value_name = "FILE")]
        positions: Option<PathBuf>,
        /// Positions to read for `--design positions-file`.
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Evaluate the worst case of a positions file.
    Evaluate {
        positions: PathBuf,
        /// Fail if adjacent elements are closer than lambda/2.
        #[arg(long)]
        enforce_spacing: bool,
        /// Also report SPEB at this direction cosine.
        #[arg(long, requires = "at_r", allow_negative_numbers = true)]
        at_u: Option<f64>,
        /// Also report SPEB at this range, meters.
        #[arg(long, requires = "at_u")]
        at_r: Option<f64>,
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Emit log10 SPEB over the near-field grid as CSV.
    Heatmap {
        /// Positions file; the configured design is used when omitted.
        positions: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Compare designs over a parameter sweep as long-form CSV.
    Benchmark {
        /// snr_db | n | a (meters)
        #[arg(long)]
        sweep: String,
        /// Comma-separated sweep values; an empty string gives an empty table.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        /// Comma-separated design names.
        #[arg(long)]
        designs: Option<String>,
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Run seeded randomized property checks.
    Verify {
        /// Random instances per property.
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<F>(path: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let label = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut out = open_output(path)?;
    f(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(label, e))
}

fn write_report(cfg: &Resolved, report: &Report, path: Option<&Path>) -> Result<()> {
    emit(path, |out| match cfg.format {
        OutputFormat::Json => report.write_json(out),
        OutputFormat::Csv => report.write_csv(out),
    })
}

fn parse_list<T>(raw: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    let base = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = base.overridden_by(&cli.overrides.to_config()).resolve()?;
    let workers = Workers::from_env()?;

    match cli.command {
        Command::Design {
            positions,
            input,
            report,
        } => {
            let out = commands::cmd_design(&cfg, &workers, input.as_deref())?;
            if let Some(p) = positions.as_deref() {
                emit(Some(p), |w| {
                    formats::write_positions(w, out.array.positions())
                })?;
            }
            write_report(&cfg, &out.report, report.as_deref())
        }
        Command::Evaluate {
            positions,
            enforce_spacing,
            at_u,
            at_r,
            report,
        } => {
            let xs = formats::read_positions(&positions)?;
            let probe = at_u.zip(at_r);
            let rep = commands::cmd_evaluate(&cfg, &workers, xs, enforce_spacing, probe)?;
            write_report(&cfg, &rep, report.as_deref())
        }
        Command::Heatmap { positions, output } => {
            let array = match positions {
                Some(p) => ArrayGeometry::new(
                    formats::read_positions(&p)?,
                    cfg.half_aperture,
                    cfg.wavelength,
                )?,
                None => commands::cmd_design(&cfg, &workers, None)?.array,
            };
            let rows = commands::cmd_heatmap(&cfg, &workers, &array)?;
            emit(output.as_deref(), |w| formats::write_heatmap(w, &rows))
        }
        Command::Benchmark {
            sweep,
            values,
            designs,
            output,
        } => {
            let sweep = SweepVariable::parse(&sweep)?;
            let values = match values {
                Some(v) => parse_list(&v, |s| {
                    s.parse::<f64>()
                        .map_err(|_| CliError::Config(format!("invalid sweep value `{s}`")))
                })?,
                None => sweep.default_values(&cfg),
            };
            let designs = match designs {
                Some(d) => parse_list(&d, str::parse)?,
                None => DesignKind::BENCHMARK.to_vec(),
            };
            let rows = commands::cmd_benchmark(&cfg, &workers, sweep, &values, &designs)?;
            emit(output.as_deref(), |w| formats::write_benchmark(w, &rows))
        }
        Command::Verify { cases } => {
            let params = commands::sensing_params(&cfg, cfg.n)?;
            let checks = verify::run_checks(cfg.seed, cases, &params);
            let failed = checks.iter().filter(|c| !c.passed).count();
            emit(None, |w| {
                for c in &checks {
                    writeln!(
                        w,
                        "{} {}: {}",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.detail
                    )?;
                }
                Ok(())
            })?;
            if failed > 0 {
                Err(CliError::Verification(failed))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
