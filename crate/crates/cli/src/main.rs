mod input;
mod number;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use recal_core::{
    apply_or, conditional_or_exact, marginal_or, moments, taylor_or_detailed, CalibrationTask,
    FigureSpec, OddsRatio, Probability, RecalError,
};

use input::{open_output, RiskFile};
use number::format_sig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Recal(#[from] RecalError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("header must be `risk` or `risk,outcome`, found `{0}`")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("input has no data rows")]
    Empty,
    #[error("input has no outcome column")]
    MissingOutcome,
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "recal",
    version,
    about = "Odds-ratio recalibration of risk prediction models"
)]
struct Cli {
    /// Write data output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Significant digits for numeric output.
    #[arg(long, global = true, default_value_t = 17)]
    digits: usize,
    /// Seed for any Monte Carlo step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Simple,
    Taylor,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Odds-ratio taking mean risk p0 to target p1.
    Adjust {
        #[arg(long)]
        p0: f64,
        #[arg(long)]
        p1: f64,
        /// Variance of the predicted risks (needed for taylor).
        #[arg(long)]
        v: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Fit the intercept update on a `risk,outcome` file.
    Fit {
        file: PathBuf,
        /// Use the n-1 variance for the Taylor row.
        #[arg(long)]
        sample_variance: bool,
    },
    /// Multiply the odds of every risk in a file by a fixed odds-ratio.
    Apply {
        file: PathBuf,
        #[arg(long = "or")]
        odds_ratio: f64,
    },
    /// Variance sweeps comparing the three odds-ratios.
    Simulate {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5])]
        p0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
              default_values_t = [-0.5, -0.25, -0.1, 0.1, 0.25, 0.5])]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        grid_size: usize,
        /// Add a Monte Carlo estimate of the exact odds-ratio.
        #[arg(long)]
        mc_check: bool,
        #[arg(long, default_value_t = 100_000)]
        mc_n: usize,
        /// Add log-scale bias columns.
        #[arg(long)]
        log_bias: bool,
    },
    /// Summary statistics of a risk file.
    Moments { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let fmt = |x: f64| format_sig(x, cli.digits);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Adjust { p0, p1, v, method } => adjust(out, &fmt, *p0, *p1, *v, *method),
        Command::Fit {
            file,
            sample_variance,
        } => fit(out, &fmt, file, *sample_variance),
        Command::Apply { file, odds_ratio } => apply(out, &fmt, file, *odds_ratio),
        Command::Simulate {
            p0,
            delta,
            grid_size,
            mc_check,
            mc_n,
            log_bias,
        } => {
            if *grid_size == 0 {
                return Err(CliError::Usage("--grid-size must be at least 1".into()));
            }
            let spec = FigureSpec {
                p0s: p0.clone(),
                deltas: delta.clone(),
                grid_points: *grid_size,
                mc_n: if *mc_check { *mc_n } else { 0 },
                seed: cli.seed,
            };
            simulate(out, &fmt, &spec, *mc_check, *log_bias)
        }
        Command::Moments { file } => moments_cmd(out, &fmt, file),
    }
}

fn adjust(
    out: Option<&Path>,
    fmt: &dyn Fn(f64) -> String,
    p0: f64,
    p1: f64,
    v: Option<f64>,
    method: Method,
) -> Result<(), CliError> {
    let a = Probability::new(p0)?;
    let b = Probability::new(p1)?;
    let mut rows = Vec::new();
    if matches!(method, Method::Simple | Method::Both) {
        rows.push(("simple", marginal_or(a, b).get()));
    }
    if matches!(method, Method::Taylor | Method::Both) {
        let v = v.ok_or_else(|| CliError::Usage("--v is required for the taylor method".into()))?;
        let task = CalibrationTask::new(p0, p1, v)?;
        rows.push(("taylor", taylor_checked(&task)?));
    }
    let mut w = open_output(out)?;
    writeln!(w, "method,odds_ratio")?;
    for (name, x) in rows {
        writeln!(w, "{name},{}", fmt(x))?;
    }
    w.flush()?;
    Ok(())
}

/// Taylor odds-ratio, warning on stderr when more than one root qualifies.
fn taylor_checked(task: &CalibrationTask) -> Result<f64, RecalError> {
    let choice = taylor_or_detailed(task)?;
    if choice.is_ambiguous() {
        eprintln!(
            "warning: several admissible Taylor roots {:?}; using the one nearest the marginal odds-ratio",
            choice.survivors
        );
    }
    Ok(choice.odds_ratio.get())
}

fn fit(
    out: Option<&Path>,
    fmt: &dyn Fn(f64) -> String,
    file: &Path,
    sample: bool,
) -> Result<(), CliError> {
    let data = RiskFile::read(file)?;
    let labeled = data.labeled()?;
    let exact = conditional_or_exact(&labeled)?;
    let summary = moments(labeled.risks());
    let target = labeled.outcome_mean();
    let simple = marginal_or(summary.mean, Probability::new(target)?);
    let variance = if sample {
        summary
            .sample_variance()
            .ok_or_else(|| CliError::Usage("sample variance needs n >= 2".into()))?
    } else {
        summary.variance
    };
    let taylor = match CalibrationTask::new(summary.mean.get(), target, variance)
        .and_then(|t| taylor_checked(&t))
    {
        Ok(x) => fmt(x),
        Err(e) => {
            eprintln!("warning: taylor: {e}");
            "NA".into()
        }
    };

    let mut w = open_output(out)?;
    writeln!(w, "method,odds_ratio")?;
    writeln!(w, "exact,{}", fmt(exact.get()))?;
    writeln!(w, "simple,{}", fmt(simple.get()))?;
    writeln!(w, "taylor,{taylor}")?;
    writeln!(w)?;
    writeln!(w, "statistic,value")?;
    writeln!(w, "mean,{}", fmt(summary.mean.get()))?;
    writeln!(w, "variance,{}", fmt(variance))?;
    writeln!(w, "n,{}", summary.n)?;
    w.flush()?;
    Ok(())
}

fn apply(
    out: Option<&Path>,
    fmt: &dyn Fn(f64) -> String,
    file: &Path,
    x: f64,
) -> Result<(), CliError> {
    let data = RiskFile::read(file)?;
    let x = OddsRatio::new(x)?;
    let mut w = csv::WriterBuilder::new().from_writer(open_output(out)?);
    let mut header = data.header.clone();
    header.push("updated_risk".into());
    w.write_record(&header)?;
    for (fields, &r) in data.raw.iter().zip(&data.risks) {
        let updated = apply_or(Probability::new(r)?, x).get();
        let mut rec = fields.clone();
        rec.push(fmt(updated));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn simulate(
    out: Option<&Path>,
    fmt: &dyn Fn(f64) -> String,
    spec: &FigureSpec,
    mc: bool,
    log_bias: bool,
) -> Result<(), CliError> {
    for &p0 in &spec.p0s {
        for &d in &spec.deltas {
            let p1 = p0 * (1.0 + d);
            if !(p1 > 0.0 && p1 < 1.0) {
                eprintln!("warning: skipping p0={p0} delta={d}: target {p1} outside (0, 1)");
            }
        }
    }
    if spec.scenarios()?.is_empty() {
        return Err(CliError::Usage("no valid (p0, delta) pair".into()));
    }
    let result = spec.run()?;
    for warning in &result.warnings {
        eprintln!(
            "warning: p0={} delta={} variance={}: {}",
            warning.p0, warning.delta, warning.variance, warning.reason
        );
    }

    let mut w = csv::WriterBuilder::new().from_writer(open_output(out)?);
    let mut header = vec![
        "p0",
        "delta",
        "p1",
        "variance",
        "auc",
        "or_exact",
        "or_simple",
        "or_taylor",
        "relbias_simple",
        "relbias_taylor",
    ];
    if log_bias {
        header.extend(["logbias_simple", "logbias_taylor"]);
    }
    if mc {
        header.push("or_exact_mc");
    }
    w.write_record(&header)?;
    for row in &result.rows {
        let mut rec: Vec<String> = [
            row.p0,
            row.delta,
            row.p1,
            row.variance,
            row.auc,
            row.or_exact,
            row.or_simple,
            row.or_taylor,
            row.relbias_simple,
            row.relbias_taylor,
        ]
        .iter()
        .map(|&x| fmt(x))
        .collect();
        if log_bias {
            rec.push(fmt(row.logbias_simple()));
            rec.push(fmt(row.logbias_taylor()));
        }
        if mc {
            rec.push(row.or_exact_mc.map_or_else(|| "NA".into(), fmt));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn moments_cmd(
    out: Option<&Path>,
    fmt: &dyn Fn(f64) -> String,
    file: &Path,
) -> Result<(), CliError> {
    let data = RiskFile::read(file)?;
    let summary = moments(&data.cohort()?);
    let mut sorted = data.risks.clone();
    sorted.sort_by(f64::total_cmp);

    let mut w = open_output(out)?;
    writeln!(w, "statistic,value")?;
    writeln!(w, "mean,{}", fmt(summary.mean.get()))?;
    writeln!(w, "variance,{}", fmt(summary.variance))?;
    writeln!(
        w,
        "sample_variance,{}",
        summary.sample_variance().map_or_else(|| "NA".into(), fmt)
    )?;
    writeln!(w, "n,{}", summary.n)?;
    writeln!(w, "min,{}", fmt(sorted[0]))?;
    writeln!(w, "q1,{}", fmt(quantile(&sorted, 0.25)))?;
    writeln!(w, "median,{}", fmt(quantile(&sorted, 0.5)))?;
    writeln!(w, "q3,{}", fmt(quantile(&sorted, 0.75)))?;
    writeln!(w, "max,{}", fmt(sorted[sorted.len() - 1]))?;
    w.flush()?;
    Ok(())
}

/// Linear interpolation between order statistics at `(n - 1) q`.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
