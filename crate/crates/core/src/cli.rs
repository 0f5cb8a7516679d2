//! Command-line front end.
//!
//! `tpt-engine <command> [flags]` where the command is one of `gap`, `bands`,
//! `phase`, `otto`, `stirling`, `map`, `curve`. Every flag can also come from
//! a JSON config file (`--config`, keys are the flag names in snake_case);
//! flags override the file. `--dump-config` prints the merged configuration
//! and exits.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 numerical failure, 4 I/O.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cycles::{cycle_report, CycleKind, CycleReport, CycleSpec};
use crate::error::Error;
use crate::material::{FieldPotential, MaterialParams};
use crate::quadrature::QuadratureSettings;
use crate::sweep::{
    efficiency_curve, otto_work_map, with_threads, work_curve, Curve, GridSpec, PartialSpec,
    Quantity, SweptParam, WorkMap,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICS: i32 = 3;
pub const EXIT_IO: i32 = 4;

const DEFAULT_LAMBDA_SO: f64 = 30.0;
const DEFAULT_T_HOT: f64 = 40.0;
const DEFAULT_T_COLD: f64 = 30.0;

/// Elementary charge, C.
const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant, J·s.
const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Gap,
    Bands,
    Phase,
    Otto,
    Stirling,
    Map,
    Curve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Accepts `u-cold` as well as `u_cold` for any snake_case enum.
fn parse_name<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.replace('-', "_")))
        .map_err(|_| format!("unknown value '{s}'"))
}

#[derive(Debug, Parser)]
#[command(
    name = "tpt-engine",
    version,
    about = "Otto and Stirling cycles with a gapped Dirac monolayer as working substance",
    allow_negative_numbers = true
)]
struct Args {
    /// gap | bands | phase | otto | stirling | map | curve
    #[arg(value_parser = parse_name::<Command>)]
    command: Option<Command>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the merged configuration as JSON and exit
    #[arg(long)]
    dump_config: bool,

    /// Spin-orbit coupling, meV
    #[arg(long)]
    lambda_so: Option<f64>,
    /// Field potential l·ε_z, meV (gap, bands, phase)
    #[arg(long)]
    u: Option<f64>,
    /// Momentum in natural units, meV (bands)
    #[arg(long)]
    k: Option<f64>,

    /// Hot-bath temperature, K
    #[arg(long)]
    t_hot: Option<f64>,
    /// Cold-bath temperature, K
    #[arg(long)]
    t_cold: Option<f64>,
    /// Field potential on the hot stroke, meV
    #[arg(long)]
    u_hot: Option<f64>,
    /// Field potential on the cold stroke, meV
    #[arg(long)]
    u_cold: Option<f64>,

    /// otto | stirling (curve)
    #[arg(long, value_parser = parse_name::<CycleKind>)]
    cycle: Option<CycleKind>,
    /// work | efficiency (curve)
    #[arg(long, value_parser = parse_name::<Quantity>)]
    quantity: Option<Quantity>,
    /// Swept parameter: u-cold | u-hot | t-hot | t-cold (curve)
    #[arg(long, value_parser = parse_name::<SweptParam>)]
    axis: Option<SweptParam>,
    /// First node of the swept axis
    #[arg(long)]
    start: Option<f64>,
    /// Last node of the swept axis
    #[arg(long)]
    stop: Option<f64>,
    /// Number of nodes, endpoints included
    #[arg(long)]
    steps: Option<usize>,
    /// u_hot axis of a map; defaults to the start/stop/steps axis
    #[arg(long)]
    hot_start: Option<f64>,
    #[arg(long)]
    hot_stop: Option<f64>,
    #[arg(long)]
    hot_steps: Option<usize>,

    /// Relative quadrature tolerance (default 1e-9)
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Worker threads for sweeps
    #[arg(long)]
    threads: Option<usize>,

    /// Output file; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv | json
    #[arg(long, value_parser = parse_name::<Format>)]
    format: Option<Format>,
    /// Fermi velocity in m/s; converts densities to J/m²
    #[arg(long)]
    v_f: Option<f64>,
}

/// Everything a run needs. Same keys in the config file and on the command
/// line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_so: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_hot: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_cold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_hot: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_cold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<SweptParam>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hot_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hot_stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hot_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_f: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl RunConfig {
    fn from_args(a: &Args) -> Self {
        RunConfig {
            command: a.command,
            lambda_so: a.lambda_so,
            u: a.u,
            k: a.k,
            t_hot: a.t_hot,
            t_cold: a.t_cold,
            u_hot: a.u_hot,
            u_cold: a.u_cold,
            cycle: a.cycle,
            quantity: a.quantity,
            axis: a.axis,
            start: a.start,
            stop: a.stop,
            steps: a.steps,
            hot_start: a.hot_start,
            hot_stop: a.hot_stop,
            hot_steps: a.hot_steps,
            rel_tol: a.rel_tol,
            threads: a.threads,
            output: a.output.clone(),
            format: a.format,
            v_f: a.v_f,
        }
    }

    /// Values set in `top` win.
    pub fn merge(mut self, top: &RunConfig) -> Self {
        overlay!(self, top; command, lambda_so, u, k, t_hot, t_cold, u_hot, u_cold, cycle,
            quantity, axis, start, stop, steps, hot_start, hot_stop, hot_steps, rel_tol,
            threads, output, format, v_f);
        self
    }

    /// Fills documented defaults for the selected command.
    pub fn with_defaults(mut self) -> Self {
        self.lambda_so.get_or_insert(DEFAULT_LAMBDA_SO);
        if matches!(
            self.command,
            Some(Command::Otto | Command::Stirling | Command::Map | Command::Curve)
        ) {
            self.t_hot.get_or_insert(DEFAULT_T_HOT);
            self.t_cold.get_or_insert(DEFAULT_T_COLD);
            self.rel_tol
                .get_or_insert(QuadratureSettings::default().rel_tol);
        }
        if self.command == Some(Command::Curve) {
            self.quantity.get_or_insert(Quantity::Work);
        }
        self
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerics(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerics(_) => EXIT_NUMERICS,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerics(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Numerics(other.to_string()),
        }
    }
}

fn required<T: Copy>(v: Option<T>, flag: &str, cmd: Command) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("command '{}' requires --{flag}", command_name(cmd))))
}

fn command_name(c: Command) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// Natural-unit densities (meV³ with ħ = v_f = 1) to J/m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SIConversion {
    v_f: f64,
}

impl SIConversion {
    pub fn new(v_f: f64) -> crate::Result<Self> {
        if v_f.is_finite() && v_f > 0.0 {
            Ok(Self { v_f })
        } else {
            Err(Error::InvalidParameter(format!(
                "Fermi velocity must be > 0 m/s, got {v_f}"
            )))
        }
    }

    pub fn factor(&self) -> f64 {
        let mev = ELEMENTARY_CHARGE * 1e-3;
        mev.powi(3) / (HBAR * self.v_f).powi(2)
    }

    pub fn to_si(&self, value: f64) -> f64 {
        value * self.factor()
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Formats with 12 significant digits, plain decimal for moderate
/// magnitudes and exponent form otherwise. Locale independent.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let r = round_sig12(x);
    let exp = r.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let s = r.to_string();
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        format!("{r:e}")
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                if let Some(r) = serde_json::Number::from_f64(round_sig12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

/// Curve or map destined for CSV.
#[derive(Debug, Clone, Copy)]
pub enum Tabular<'a> {
    Curve(&'a Curve),
    Map(&'a WorkMap),
}

pub fn write_csv<W: Write>(result: Tabular<'_>, mut out: W) -> io::Result<()> {
    match result {
        Tabular::Curve(c) => {
            out.write_all(b"abscissa_meV,value\n")?;
            for (x, v) in c.abscissa.iter().zip(&c.values) {
                let v = v.map(format_sig12).unwrap_or_default();
                writeln!(out, "{},{}", format_sig12(*x), v)?;
            }
        }
        Tabular::Map(m) => {
            out.write_all(b"u_cold_meV,u_hot_meV,work,sign\n")?;
            for (uc, uh, w, s) in m.entries() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    format_sig12(uc),
                    format_sig12(uh),
                    format_sig12(w),
                    s.symbol()
                )?;
            }
        }
    }
    Ok(())
}

pub fn csv_string(result: Tabular<'_>) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn emit_csv(result: Tabular<'_>, path: &Path) -> io::Result<()> {
    fs::write(path, csv_string(result))
}

#[derive(Serialize)]
struct BandsOut {
    k: f64,
    u: f64,
    lambda_so: f64,
    e1: f64,
    e2: f64,
}

#[derive(Serialize)]
struct ReportOut<'a> {
    units: &'static str,
    #[serde(flatten)]
    report: &'a CycleReport,
}

fn units(conv: Option<SIConversion>) -> &'static str {
    if conv.is_some() {
        "J/m^2"
    } else {
        "meV^3"
    }
}

fn scale_report(mut r: CycleReport, conv: Option<SIConversion>) -> CycleReport {
    if let Some(c) = conv {
        r.work = c.to_si(r.work);
        r.q_in = c.to_si(r.q_in);
        r.numerics = c.to_si(r.numerics);
        r.heats = match r.heats {
            crate::cycles::Heats::Otto { q_in, q_out } => crate::cycles::Heats::Otto {
                q_in: c.to_si(q_in),
                q_out: c.to_si(q_out),
            },
            crate::cycles::Heats::Stirling {
                q_ba,
                q_cb,
                q_dc,
                q_ad,
            } => crate::cycles::Heats::Stirling {
                q_ba: c.to_si(q_ba),
                q_cb: c.to_si(q_cb),
                q_dc: c.to_si(q_dc),
                q_ad: c.to_si(q_ad),
            },
        };
    }
    r
}

/// Serialized report exactly as the CLI prints it.
pub fn report_json(report: &CycleReport, conv: Option<SIConversion>) -> String {
    let r = scale_report(*report, conv);
    to_json_string(&ReportOut {
        units: units(conv),
        report: &r,
    })
}

fn quadrature(cfg: &RunConfig) -> Result<QuadratureSettings, CliError> {
    let q = QuadratureSettings::default().with_rel_tol(cfg.rel_tol.unwrap_or(1e-9));
    q.validate()?;
    Ok(q)
}

fn cycle_spec(cfg: &RunConfig, cmd: Command) -> Result<CycleSpec, CliError> {
    Ok(CycleSpec::new(
        required(cfg.t_hot, "t-hot", cmd)?,
        required(cfg.t_cold, "t-cold", cmd)?,
        required(cfg.u_hot, "u-hot", cmd)?,
        required(cfg.u_cold, "u-cold", cmd)?,
    )?)
}

fn axis(cfg: &RunConfig, cmd: Command) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(
        required(cfg.start, "start", cmd)?,
        required(cfg.stop, "stop", cmd)?,
        required(cfg.steps, "steps", cmd)?,
    )?)
}

fn run_threads<R: Send>(cfg: &RunConfig, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match cfg.threads {
        Some(0) => Err(CliError::Usage("--threads must be >= 1".into())),
        Some(n) => Ok(with_threads(n, f)?),
        None => Ok(f()),
    }
}

/// Executes a fully merged configuration and returns the text to emit.
fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    let cmd = cfg.command.ok_or_else(|| {
        CliError::Usage("no command given (gap, bands, phase, otto, stirling, map, curve)".into())
    })?;
    let p = MaterialParams::new(cfg.lambda_so.unwrap_or(DEFAULT_LAMBDA_SO))?;
    let conv = cfg.v_f.map(SIConversion::new).transpose()?;
    let format = cfg.format;
    let json_only = |what: &str| match format {
        Some(Format::Csv) => Err(CliError::Usage(format!("'{what}' output is JSON only"))),
        _ => Ok(()),
    };

    match cmd {
        Command::Gap => {
            let u = required(cfg.u, "u", cmd)?;
            Ok(format!("{}\n", format_sig12(p.band_gap(FieldPotential(u)))))
        }
        Command::Phase => {
            let u = required(cfg.u, "u", cmd)?;
            let v = serde_json::to_value(p.classify_phase(FieldPotential(u))).expect("enum");
            Ok(format!("{}\n", v.as_str().unwrap_or_default()))
        }
        Command::Bands => {
            json_only("bands")?;
            let u = required(cfg.u, "u", cmd)?;
            let k = required(cfg.k, "k", cmd)?;
            let b = p.band_energies(k, FieldPotential(u))?;
            Ok(to_json_string(&BandsOut {
                k,
                u,
                lambda_so: p.lambda_so(),
                e1: b.e1,
                e2: b.e2,
            }))
        }
        Command::Otto | Command::Stirling => {
            json_only("cycle report")?;
            let spec = cycle_spec(cfg, cmd)?;
            let q = quadrature(cfg)?;
            let kind = if cmd == Command::Otto {
                CycleKind::Otto
            } else {
                CycleKind::Stirling
            };
            let report = cycle_report(kind, &spec, &p, &q)?;
            Ok(report_json(&report, conv))
        }
        Command::Map => {
            let cold = axis(cfg, cmd)?;
            let hot = GridSpec::new(
                cfg.hot_start.unwrap_or(cold.start),
                cfg.hot_stop.unwrap_or(cold.stop),
                cfg.hot_steps.unwrap_or(cold.steps),
            )?;
            let t_hot = required(cfg.t_hot, "t-hot", cmd)?;
            let t_cold = required(cfg.t_cold, "t-cold", cmd)?;
            let q = quadrature(cfg)?;
            let mut map = run_threads(cfg, || otto_work_map(&cold, &hot, t_hot, t_cold, &p, &q))??;
            if let Some(c) = conv {
                for row in map.values.iter_mut().chain(map.numerics.iter_mut()) {
                    row.iter_mut().for_each(|w| *w = c.to_si(*w));
                }
            }
            Ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => csv_string(Tabular::Map(&map)),
                Format::Json => to_json_string(&map),
            })
        }
        Command::Curve => {
            let kind = required(cfg.cycle, "cycle", cmd)?;
            let swept = required(cfg.axis, "axis", cmd)?;
            let grid = axis(cfg, cmd)?;
            let quantity = cfg.quantity.unwrap_or(Quantity::Work);
            let mut fixed = PartialSpec {
                t_hot: cfg.t_hot,
                t_cold: cfg.t_cold,
                u_hot: cfg.u_hot,
                u_cold: cfg.u_cold,
            };
            match swept {
                SweptParam::THot => fixed.t_hot = None,
                SweptParam::TCold => fixed.t_cold = None,
                SweptParam::UHot => fixed.u_hot = None,
                SweptParam::UCold => fixed.u_cold = None,
            }
            for (v, name, me) in [
                (fixed.t_hot, "t-hot", SweptParam::THot),
                (fixed.t_cold, "t-cold", SweptParam::TCold),
                (fixed.u_hot, "u-hot", SweptParam::UHot),
                (fixed.u_cold, "u-cold", SweptParam::UCold),
            ] {
                if me != swept {
                    required(v, name, cmd)?;
                }
            }
            let q = quadrature(cfg)?;
            let mut curve = run_threads(cfg, || match quantity {
                Quantity::Work => work_curve(kind, &fixed, &grid, &p, &q),
                Quantity::Efficiency => efficiency_curve(kind, &fixed, &grid, &p, &q),
            })??;
            if let (Some(c), Quantity::Work) = (conv, quantity) {
                curve
                    .values
                    .iter_mut()
                    .for_each(|v| *v = v.map(|w| c.to_si(w)));
            }
            Ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => csv_string(Tabular::Curve(&curve)),
                Format::Json => to_json_string(&curve),
            })
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Parses `argv` (program name first), runs the command and reports an exit
/// code. Output goes to `stdout` unless `--output` names a file.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match run_args(&args, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "tpt-engine: {e}");
            if matches!(e, CliError::Usage(_)) {
                let _ = writeln!(stderr, "run `tpt-engine --help` for usage");
            }
            e.code()
        }
    }
}

fn run_args(args: &Args, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file_cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let cfg = file_cfg.merge(&RunConfig::from_args(args)).with_defaults();

    if args.dump_config {
        let text = serde_json::to_string_pretty(&cfg).expect("serializable") + "\n";
        return stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()));
    }

    let text = execute(&cfg)?;
    match &cfg.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["tpt-engine"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_sig12(0.0), "0.0");
        assert_eq!(format_sig12(60.0), "60.0");
        assert_eq!(format_sig12(0.1 + 0.2), "0.3");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(-2.0 / 3.0 * 1e-7), "-6.66666666667e-8");
        assert_eq!(format_sig12(123456789.0123456), "123456789.012");
        assert_eq!(format_sig12(2.5e13), "2.5e13");
    }

    #[test]
    fn gap_command() {
        let (code, out, _) = run_capture(&["gap", "--lambda-so", "30", "--u", "30"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0.0\n");
        let (_, out, _) = run_capture(&["gap", "--u", "-45"]);
        assert_eq!(out, "30.0\n");
    }

    #[test]
    fn phase_and_bands_commands() {
        let (_, out, _) = run_capture(&["phase", "--u", "20"]);
        assert_eq!(out, "topological_insulator\n");
        let (code, out, _) = run_capture(&["bands", "--u", "40", "--k", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["e1"], 10.0);
        assert_eq!(v["e2"], 70.0);
    }

    #[test]
    fn missing_flag_is_usage_error() {
        let (code, out, err) = run_capture(&["otto", "--u-hot", "33"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(err.contains("--u-cold"), "{err}");
        let (code, _, _) = run_capture(&["gap"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_capture(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_capture(&["gap", "--u", "1", "--bogus", "2"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_capture(&["gap", "--u", "1", "--lambda-so", "-3"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("tpt-engine"));
    }

    #[test]
    fn si_conversion() {
        let c = SIConversion::new(1e6).unwrap();
        assert_eq!(c.to_si(0.0), 0.0);
        let d = SIConversion::new(2e6).unwrap();
        assert!((c.to_si(3.0) / d.to_si(3.0) - 4.0).abs() < 1e-12);
        assert!(SIConversion::new(0.0).is_err());
        assert!(SIConversion::new(-1.0).is_err());
    }

    #[test]
    fn merge_prefers_flags() {
        let file = RunConfig {
            u: Some(1.0),
            lambda_so: Some(20.0),
            ..Default::default()
        };
        let flags = RunConfig {
            u: Some(5.0),
            ..Default::default()
        };
        let m = file.merge(&flags);
        assert_eq!(m.u, Some(5.0));
        assert_eq!(m.lambda_so, Some(20.0));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"u": 1.0, "zeta": 2}"#);
        assert!(r.is_err());
        let r: RunConfig =
            serde_json::from_str(r#"{"command": "curve", "axis": "u_cold"}"#).unwrap();
        assert_eq!(r.axis, Some(SweptParam::UCold));
    }
}
