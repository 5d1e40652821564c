use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use spinchan::bipartite::{entropy_curve, write_curve_csv, CurveBases, CurvePoint};
use spinchan::entropy::{min_output_entropy_with, MinEntropyOptions};
use spinchan::report::{self, fmt_f64};
use spinchan::verify::{self, CheckResult, SuiteOptions};
use spinchan::{
    build_isotropic, build_transpose_depolarizing, check_covariance, holevo_covariant, Basis,
    CovarianceCertificate, KrausChannel, Spin, Units,
};

#[derive(Parser)]
#[command(name = "spinchan", version, about = "Isotropic spin channels: entropies, capacities and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a channel: Kraus count, CPTP and covariance residuals.
    Info(ChannelCmd),
    /// Minimum output entropy by multistart simplex search.
    MinEntropy(ChannelCmd),
    /// Holevo capacity of a covariant channel.
    Capacity(ChannelCmd),
    /// Two-use output entropy of the spin-1/2 channel along the Schmidt edge.
    Curve(CurveCmd),
    /// Run the verification suite; exits 1 if any check fails.
    Verify(VerifyCmd),
    /// Write a channel in the JSON Kraus format.
    ExportChannel(ChannelCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelKind {
    PhiHalf,
    PhiOne,
    PhiOneMagnetic,
    TransposeDepolarizing,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    Nats,
    Bits,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Nats => Units::Nats,
            UnitsArg::Bits => Units::Bits,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = UnitsArg::Nats)]
    units: UnitsArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ChannelCmd {
    #[arg(long, value_enum, required_unless_present = "channel_file")]
    channel: Option<ChannelKind>,
    /// Dimension; required for transpose-depolarizing.
    #[arg(long)]
    dim: Option<usize>,
    /// Read the channel from a JSON Kraus file instead.
    #[arg(long, conflicts_with_all = ["channel", "dim"])]
    channel_file: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CurveCmd {
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyCmd {
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Haar-random entangled samples per additivity probe.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Also check three-use additivity for the spin-1/2 channel.
    #[arg(long)]
    three_fold: bool,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<spinchan::Error> for Failure {
    fn from(e: spinchan::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Info(cmd) => info(&cmd),
        Command::MinEntropy(cmd) => min_entropy(&cmd),
        Command::Capacity(cmd) => capacity(&cmd),
        Command::Curve(cmd) => curve(&cmd),
        Command::Verify(cmd) => run_verify(&cmd),
        Command::ExportChannel(cmd) => export_channel(&cmd),
    }
}

fn load_channel(cmd: &ChannelCmd) -> Result<KrausChannel, Failure> {
    if let Some(path) = &cmd.channel_file {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        return Ok(KrausChannel::from_json(&text)?);
    }
    let kind = cmd
        .channel
        .ok_or_else(|| Failure::Usage("--channel or --channel-file is required".into()))?;
    match (kind, cmd.dim) {
        (ChannelKind::TransposeDepolarizing, Some(d)) => Ok(build_transpose_depolarizing(d)?),
        (ChannelKind::TransposeDepolarizing, None) => Err(Failure::Usage(
            "--dim is required for --channel transpose-depolarizing".into(),
        )),
        (_, Some(_)) => Err(Failure::Usage(
            "--dim is only accepted with --channel transpose-depolarizing".into(),
        )),
        (ChannelKind::PhiHalf, None) => Ok(build_isotropic(Spin::Half, Basis::Magnetic)?),
        (ChannelKind::PhiOne, None) => Ok(build_isotropic(Spin::One, Basis::Cartesian)?),
        (ChannelKind::PhiOneMagnetic, None) => Ok(build_isotropic(Spin::One, Basis::Magnetic)?),
    }
}

fn emit(common: &Common, body: &str) -> Result<(), Failure> {
    match &common.output {
        Some(path) => fs::write(path, format!("{body}\n"))?,
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{body}")?;
        }
    }
    Ok(())
}

fn require_format(common: &Common, allowed: &[Format], command: &str) -> Result<(), Failure> {
    if allowed.contains(&common.format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("unsupported --format for {command}")))
    }
}

/// Flat `key = value` lines for text output.
fn text_lines(value: &serde_json::Value) -> String {
    let mut lines = Vec::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            let shown = match v {
                serde_json::Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
                other => report::to_json(other).unwrap_or_default(),
            };
            lines.push(format!("{k} = {shown}"));
        }
    }
    lines.join("\n")
}

fn render(common: &Common, value: &serde_json::Value) -> Result<String, Failure> {
    Ok(match common.format {
        Format::Text => text_lines(value),
        _ => report::to_json(value)?,
    })
}

fn info(cmd: &ChannelCmd) -> Result<bool, Failure> {
    require_format(&cmd.common, &[Format::Json, Format::Text], "info")?;
    let ch = load_channel(cmd)?;
    let mut value = json!({
        "label": ch.label(),
        "dim": ch.dim(),
        "kraus_count": ch.kraus().len(),
        "trace_preservation_residual": ch.trace_preservation_residual(),
        "unitality_residual": ch.unitality_residual(),
    });
    if ch.dim() * ch.dim() <= spinchan::tolerance::MAX_DIM {
        value["choi_min_eigenvalue"] = json!(ch.choi_min_eigenvalue()?);
    }
    if !ch.symmetry().is_empty() {
        value["covariance_residual"] = json!(check_covariance(&ch, 100, cmd.common.seed)?);
    }
    emit(&cmd.common, &render(&cmd.common, &value)?)?;
    Ok(true)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn minimize(cmd: &ChannelCmd, ch: &KrausChannel) -> Result<spinchan::EntropyReport, Failure> {
    if cmd.restarts == 0 {
        return Err(Failure::Usage("--restarts must be positive".into()));
    }
    if !(cmd.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let opts = MinEntropyOptions {
        restarts: cmd.restarts,
        tol: cmd.tol,
        seed: cmd.common.seed,
        ..MinEntropyOptions::default()
    };
    Ok(min_output_entropy_with(ch, &opts)?)
}

fn min_entropy(cmd: &ChannelCmd) -> Result<bool, Failure> {
    require_format(&cmd.common, &[Format::Json, Format::Text], "min-entropy")?;
    let ch = load_channel(cmd)?;
    let report = minimize(cmd, &ch)?;
    let units = Units::from(cmd.common.units);
    let mut value = report.to_json_value(units);
    value["label"] = json!(ch.label());
    emit(&cmd.common, &render(&cmd.common, &value)?)?;
    Ok(true)
}

fn capacity(cmd: &ChannelCmd) -> Result<bool, Failure> {
    require_format(&cmd.common, &[Format::Json, Format::Text], "capacity")?;
    let ch = load_channel(cmd)?;
    let cert = CovarianceCertificate::verify(&ch, 100, cmd.common.seed)?;
    let report = minimize(cmd, &ch)?;
    let chi = holevo_covariant(&ch, &report, &cert)?;
    let units = Units::from(cmd.common.units);
    let mut value = serde_json::Map::new();
    value.insert("label".into(), json!(ch.label()));
    value.insert(units.field("chi"), json!(units.convert(chi)));
    value.insert(
        units.field("min_entropy"),
        json!(units.convert(report.min_entropy)),
    );
    value.insert("covariance_residual".into(), json!(cert.residual));
    value.insert("seed".into(), json!(cmd.common.seed));
    emit(&cmd.common, &render(&cmd.common, &serde_json::Value::Object(value))?)?;
    Ok(true)
}

fn curve_json(points: &[CurvePoint], units: Units) -> serde_json::Value {
    let rows: Vec<_> = points
        .iter()
        .map(|p| {
            let mut row = serde_json::Map::new();
            row.insert("lambda1".into(), json!(p.lambda1));
            row.insert("eigenvalues".into(), json!(p.eigenvalues));
            row.insert(units.field("entropy"), json!(units.convert(p.entropy_nats)));
            serde_json::Value::Object(row)
        })
        .collect();
    json!(rows)
}

fn curve(cmd: &CurveCmd) -> Result<bool, Failure> {
    if cmd.grid < 3 {
        return Err(Failure::Usage("--grid must be at least 3".into()));
    }
    let points = entropy_curve(cmd.grid, &CurveBases::Canonical)?;
    let units = Units::from(cmd.common.units);
    let body = match cmd.common.format {
        Format::Csv | Format::Text => {
            let mut buf = Vec::new();
            write_curve_csv(&points, units, &mut buf)?;
            String::from_utf8(buf).expect("CSV is ASCII").trim_end().to_string()
        }
        Format::Json => report::to_json(&curve_json(&points, units))?,
    };
    emit(&cmd.common, &body)?;
    Ok(true)
}

fn run_verify(cmd: &VerifyCmd) -> Result<bool, Failure> {
    require_format(&cmd.common, &[Format::Json, Format::Text], "verify")?;
    if cmd.grid < 3 {
        return Err(Failure::Usage("--grid must be at least 3".into()));
    }
    if cmd.restarts == 0 {
        return Err(Failure::Usage("--restarts must be positive".into()));
    }
    let checks = verify::run_all_with(&SuiteOptions {
        seed: cmd.common.seed,
        restarts: cmd.restarts,
        entangled_samples: cmd.samples,
        grid: cmd.grid,
        three_fold: cmd.three_fold,
        ..SuiteOptions::default()
    })?;
    let body = match cmd.common.format {
        Format::Text => verify_text(&checks),
        _ => verify::report_json(&checks)?,
    };
    emit(&cmd.common, &body)?;
    Ok(checks.iter().all(|c| c.passed))
}

fn verify_text(checks: &[CheckResult]) -> String {
    let mut lines: Vec<String> = checks
        .iter()
        .map(|c| {
            format!(
                "{} {} residual={} tolerance={}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                fmt_f64(c.residual),
                fmt_f64(c.tolerance)
            )
        })
        .collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    lines.push(format!("{} checks, {failed} failed", checks.len()));
    lines.join("\n")
}

fn export_channel(cmd: &ChannelCmd) -> Result<bool, Failure> {
    require_format(&cmd.common, &[Format::Json], "export-channel")?;
    let ch = load_channel(cmd)?;
    emit(&cmd.common, &ch.to_json()?)?;
    Ok(true)
}
