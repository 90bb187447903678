use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use depth_tvd::depth::{transform_sample, DepthKind, DepthSample, KernelSpec, Reference};
use depth_tvd::distributions::{ContinuousDistribution, SortedSample};
use depth_tvd::divergence::{
    gaussian_tvd_exact, induced_tvd, mmd_squared_direct, mmd_squared_via_depth, tvd_between, QuadratureConfig,
};
use depth_tvd::experiments::{
    emit_histogram, emit_report, histogram_csv, run_reference_experiment_with_samples, ExperimentConfig, ReportFormat,
};
use depth_tvd::io::{read_text, read_values, write_text, write_values};
use depth_tvd::lvtvd::{lvtvd_two_sample, one_sided_uniform_lp, solve_chain_lp};
use depth_tvd::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "depth-tvd", version, about = "Depth-induced TVD and LV-TVD estimators")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for any sampling the command does.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file of option values. For `reproduce` this is an experiment
    /// config; otherwise each key fills the flag of the same name unless it
    /// is given explicitly.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a seeded sample from a distribution.
    Sample {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
    },
    /// Depth values of a sample against a reference distribution or sample.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, conflicts_with = "reference_sample")]
        reference_dist: Option<String>,
        #[arg(long)]
        reference_sample: Option<PathBuf>,
        #[arg(long)]
        bandwidth: Option<f64>,
    },
    /// Closed-form TVD between two Gaussians.
    #[command(allow_negative_numbers = true)]
    TvdExact {
        #[arg(long)]
        mu1: f64,
        #[arg(long)]
        sigma1: f64,
        #[arg(long)]
        mu2: f64,
        #[arg(long)]
        sigma2: f64,
    },
    /// TVD between two distributions by quadrature.
    TvdQuadrature {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Depth-induced TVDs between two distributions.
    InducedTvd {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Two-sample LV-TVD between two CSV samples.
    Lvtvd {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        l: f64,
        /// Include the optimal node values.
        #[arg(long)]
        values: bool,
    },
    /// One-sided LV-TVD of a CSV sample against the uniform law on [a, b].
    #[command(allow_negative_numbers = true)]
    LvtvdOneSided {
        #[arg(long)]
        z: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        b: f64,
        #[arg(long)]
        l: f64,
        /// Also write the LP in the plain-text debug format.
        #[arg(long)]
        export_lp: Option<PathBuf>,
    },
    /// Squared MMD with a Gaussian kernel, directly and through kernel depths.
    Mmd {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        bandwidth: f64,
    },
    /// Run the reference experiment and write its report.
    Reproduce {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Directory for histogram CSVs of every depth sample.
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Histogram of a CSV of depth values.
    Histogram {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        bandwidth: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct QuadArgs {
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_subdivisions: Option<usize>,
    #[arg(long)]
    sign_change_bracket_grid: Option<usize>,
}

impl QuadArgs {
    fn config(&self) -> Result<QuadratureConfig> {
        let d = QuadratureConfig::default();
        let cfg = QuadratureConfig {
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_subdivisions: self.max_subdivisions.unwrap_or(d.max_subdivisions),
            sign_change_bracket_grid: self.sign_change_bracket_grid.unwrap_or(d.sign_change_bracket_grid),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Kind {
    Hd,
    Sd,
    Qt,
    Kd,
}

impl Kind {
    fn depth(self, bandwidth: Option<f64>) -> Result<DepthKind> {
        match (self, bandwidth) {
            (Kind::Hd, _) => Ok(DepthKind::Halfspace),
            (Kind::Sd, _) => Ok(DepthKind::Simplicial),
            (Kind::Qt, _) => Ok(DepthKind::Quantile),
            (Kind::Kd, Some(h)) => Ok(DepthKind::Kernel(KernelSpec::gaussian(h)?)),
            (Kind::Kd, None) => Err(Error::InvalidParameter("kernel depth needs --bandwidth".into())),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    match parse(&args).and_then(|cli| run(cli.command, &cli.common)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(&e.to_string(), e.kind());
            ExitCode::from(1)
        }
    }
}

fn report_error(message: &str, kind: &str) {
    let body = json!({ "error": message, "kind": kind });
    let _ = writeln!(std::io::stderr(), "{body}");
}

fn try_parse(args: &[String]) -> Result<Cli> {
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(cli),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp
            | clap::error::ErrorKind::DisplayVersion
            | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => e.exit(),
            _ => {
                report_error(e.to_string().trim(), "usage");
                std::process::exit(2)
            }
        },
    }
}

/// `--config` value in raw arguments.
fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// For every command but `reproduce`, flags missing from the command line are
/// filled from the `--config` JSON object before parsing.
fn parse(args: &[String]) -> Result<Cli> {
    let Some(path) = config_path(args) else {
        return try_parse(args);
    };
    if args.iter().skip(1).any(|a| a == "reproduce") {
        return try_parse(args);
    }
    let text = read_text(&path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.clone(),
        detail: e.to_string(),
    })?;
    let Value::Object(map) = value else {
        return Err(Error::Parse {
            path,
            detail: "config must be a JSON object".into(),
        });
    };
    let mut extended = args.to_vec();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        let given = args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match v {
            Value::Bool(true) => extended.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => extended.extend([flag, s]),
            other => extended.extend([flag, other.to_string()]),
        }
    }
    try_parse(&extended)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn emit_values(out: Option<&Path>, header: &str, values: &[f64]) -> Result<()> {
    match out {
        Some(path) => write_values(path, header, values),
        None => {
            let mut text = format!("{header}\n");
            for v in values {
                text.push_str(&format!("{v}\n"));
            }
            emit(None, &text)
        }
    }
}

fn distribution(text: &str) -> Result<ContinuousDistribution> {
    ContinuousDistribution::from_json(text)
}

fn sorted_from(path: &Path) -> Result<SortedSample> {
    let values = read_values(path)?;
    if values.is_empty() {
        return Err(Error::DegenerateInput(format!("{} holds no values", path.display())));
    }
    SortedSample::from_unsorted(values)
}

fn run(command: Command, common: &Common) -> Result<()> {
    let out = common.out.as_deref();
    let seed = common.seed.unwrap_or(0);
    match command {
        Command::Sample { dist, n } => {
            if n == 0 {
                return Err(Error::DegenerateInput("n must be positive".into()));
            }
            let d = distribution(&dist)?;
            emit_values(out, "value", &d.draw(n, seed))
        }
        Command::Transform {
            input,
            kind,
            reference_dist,
            reference_sample,
            bandwidth,
        } => {
            let points = sorted_from(&input)?;
            let kind = kind.depth(bandwidth)?;
            let depths = match (reference_dist, reference_sample) {
                (Some(d), None) => transform_sample(&points, Reference::Analytic(&distribution(&d)?), &kind),
                (None, Some(p)) => transform_sample(&points, Reference::Empirical(&sorted_from(&p)?), &kind),
                _ => {
                    return Err(Error::InvalidParameter(
                        "give exactly one of --reference-dist and --reference-sample".into(),
                    ))
                }
            };
            emit_values(out, "depth", depths.values())
        }
        Command::TvdExact { mu1, sigma1, mu2, sigma2 } => {
            let tvd = gaussian_tvd_exact(mu1, sigma1, mu2, sigma2)?;
            emit_json(out, &json!({ "tvd": tvd }))
        }
        Command::TvdQuadrature { p, q, quad } => {
            let cfg = quad.config()?;
            let tvd = tvd_between(&distribution(&p)?, &distribution(&q)?, &cfg)?;
            emit_json(out, &json!({ "tvd": tvd, "config": cfg }))
        }
        Command::InducedTvd { kind, p, q, quad } => {
            let cfg = quad.config()?;
            let r = induced_tvd(kind.depth(None)?, &distribution(&p)?, &distribution(&q)?, &cfg)?;
            emit_json(
                out,
                &json!({
                    "forward": r.forward,
                    "backward": r.backward,
                    "symmetrized": r.symmetrized,
                    "config": cfg,
                    "seeds": common.seed,
                }),
            )
        }
        Command::Lvtvd { x, y, l, values } => {
            let (sx, sy) = (sorted_from(&x)?, sorted_from(&y)?);
            let s = lvtvd_two_sample(&sx, &sy, l)?;
            let mut body = json!({ "objective": s.objective, "l": l, "n_x": sx.len(), "n_y": sy.len() });
            if values {
                body["values"] = json!(s.values);
            }
            emit_json(out, &body)
        }
        Command::LvtvdOneSided { z, a, b, l, export_lp } => {
            let sz = sorted_from(&z)?;
            let lp = one_sided_uniform_lp(&sz, a, b, l)?;
            if let Some(path) = export_lp {
                write_text(&path, &lp.to_debug_text())?;
            }
            let s = solve_chain_lp(&lp);
            emit_json(out, &json!({ "objective": s.objective, "l": l, "a": a, "b": b, "n": sz.len() }))
        }
        Command::Mmd { x, y, bandwidth } => {
            let (sx, sy) = (sorted_from(&x)?, sorted_from(&y)?);
            let k = KernelSpec::gaussian(bandwidth)?;
            emit_json(
                out,
                &json!({
                    "direct": mmd_squared_direct(&sx, &sy, &k)?,
                    "via_depth": mmd_squared_via_depth(&sx, &sy, &k)?,
                }),
            )
        }
        Command::Reproduce { format, plots } => {
            let mut cfg = match &common.config {
                Some(path) => serde_json::from_str::<ExperimentConfig>(&read_text(path)?).map_err(|e| Error::Parse {
                    path: path.clone(),
                    detail: e.to_string(),
                })?,
                None => ExperimentConfig::default(),
            };
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            let (report, samples) = run_reference_experiment_with_samples(&cfg)?;
            if let Some(dir) = plots {
                std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
                for (name, d) in &samples.samples {
                    emit_histogram(d, cfg.histogram_bins, &dir.join(format!("{name}.csv")))?;
                }
            }
            let format = match format {
                Format::Json => ReportFormat::Json,
                Format::Csv => ReportFormat::Csv,
            };
            match out {
                Some(path) => emit_report(&report, format, path),
                None => emit(
                    None,
                    &match format {
                        ReportFormat::Json => report.to_json()?,
                        ReportFormat::Csv => report.to_csv(),
                    },
                ),
            }
        }
        Command::Histogram {
            input,
            kind,
            bins,
            bandwidth,
        } => {
            let depths = DepthSample::from_values(read_values(&input)?, kind.depth(bandwidth)?, "input")?;
            emit(out, &histogram_csv(&depths, bins)?)
        }
    }
}
