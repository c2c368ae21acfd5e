//! `no3il` command-line front end.
//!
//! Exit codes: 0 success, 1 negative answer (`verify` found a violation,
//! `collinear` said no, a `selftest` check failed, or a `tau --search`
//! cross-check disagreed), 2 usage or input error, 3 search budget
//! exhausted.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use no3il::lines::{enumerate_lines_capped, DEFAULT_MAX_CELLS};
use no3il::{
    construct_max, max_no3il, torus_collinear, verify_no3il, Configuration, SearchLimits,
    TauResult, TorusDims, TorusPoint, Verdict,
};

mod selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Environment variable overriding the line-enumeration cap on `m * n`.
pub const MAX_CELLS_ENV: &str = "NO3IL_MAX_CELLS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "no3il",
    version,
    about = "No-three-in-line sets on the discrete torus T(m x n)"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Cap on m*n for line enumeration and search [env: NO3IL_MAX_CELLS, default 4096].
    #[arg(long, global = true)]
    max_cells: Option<u64>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute tau(T(m x n)): closed form when known, exact search otherwise.
    Tau {
        m: u64,
        n: u64,
        /// Search limits, e.g. `nodes=1000000,ms=60000,workers=4`.
        /// Defaults: nodes=10^12, ms=3600000, workers=1.
        #[arg(long, value_parser = parse_limits)]
        limits: Option<LimitSpec>,
        /// Fix the origin in the search (translation symmetry).
        #[arg(long)]
        symmetry: bool,
        /// Always run the exact search and check it against the closed form.
        #[arg(long)]
        search: bool,
        /// Also draw the witness as a grid.
        #[arg(long)]
        ascii: bool,
    },
    /// Print the closed-form witness and where it comes from.
    Construct {
        m: u64,
        n: u64,
        #[arg(long)]
        ascii: bool,
    },
    /// Check a point set for three collinear points.
    Verify {
        m: u64,
        n: u64,
        /// JSON array of [x,y] pairs, or an object with m, n and points.
        #[arg(long)]
        points: PathBuf,
        /// Read the point file as CSV, one `x,y` per line.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        ascii: bool,
    },
    /// List every line of the torus.
    Lines { m: u64, n: u64 },
    /// Decide whether three points lie on a common line.
    Collinear {
        m: u64,
        n: u64,
        x1: u64,
        y1: u64,
        x2: u64,
        y2: u64,
        x3: u64,
        y3: u64,
    },
    /// Run the golden table, partition and oracle checks.
    Selftest,
}

/// Values parsed from `--limits`; unset keys keep their defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LimitSpec {
    pub nodes: Option<u64>,
    pub ms: Option<u64>,
    pub workers: Option<usize>,
}

pub fn parse_limits(s: &str) -> Result<LimitSpec, String> {
    let mut spec = LimitSpec::default();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        let num: u64 = value
            .trim()
            .parse()
            .map_err(|_| format!("`{value}` is not a non-negative integer"))?;
        if num == 0 {
            return Err(format!("{key} must be positive"));
        }
        match key.trim() {
            "nodes" => spec.nodes = Some(num),
            "ms" => spec.ms = Some(num),
            "workers" => spec.workers = Some(num as usize),
            other => return Err(format!("unknown limit `{other}` (use nodes, ms, workers)")),
        }
    }
    Ok(spec)
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub format: Format,
    pub max_cells: u64,
    pub limits: SearchLimits,
    pub points: Option<PathBuf>,
}

impl CliConfig {
    fn resolve(cli: &Cli, env_cap: Option<&str>) -> Result<Self, String> {
        let env_cap = match env_cap {
            Some(v) => Some(
                v.trim()
                    .parse::<u64>()
                    .ok()
                    .filter(|&c| c > 0)
                    .ok_or_else(|| format!("{MAX_CELLS_ENV}=`{v}` is not a positive integer"))?,
            ),
            None => None,
        };
        let max_cells = cli.max_cells.or(env_cap).unwrap_or(DEFAULT_MAX_CELLS);
        if max_cells == 0 {
            return Err("--max-cells must be positive".into());
        }
        let mut limits = SearchLimits {
            max_cells,
            ..SearchLimits::default()
        };
        let mut points = None;
        match &cli.cmd {
            Command::Tau {
                limits: spec,
                symmetry,
                ..
            } => {
                if let Some(spec) = spec {
                    limits.max_nodes = spec.nodes.unwrap_or(limits.max_nodes);
                    limits.time_budget = spec
                        .ms
                        .map(Duration::from_millis)
                        .unwrap_or(limits.time_budget);
                    limits.parallel_width = spec.workers.unwrap_or(limits.parallel_width);
                }
                limits.translation_symmetry = *symmetry;
            }
            Command::Verify { points: p, .. } => points = Some(p.clone()),
            _ => {}
        }
        Ok(CliConfig {
            format: cli.format,
            max_cells,
            limits,
            points,
        })
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

type CmdResult = Result<i32, String>;

/// Runs the CLI on `args` (including the program name), reading the
/// enumeration cap override from the process environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(MAX_CELLS_ENV).ok();
    run_with_env(args, env.as_deref(), out, err)
}

/// [`run`] with an explicit value for `NO3IL_MAX_CELLS`.
pub fn run_with_env<I, T>(
    args: I,
    env_cap: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    let result =
        CliConfig::resolve(&cli, env_cap).and_then(|cfg| dispatch(&cli.cmd, &cfg, &mut io));
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dims(m: u64, n: u64) -> Result<TorusDims, String> {
    TorusDims::new(m, n).map_err(|e| e.to_string())
}

fn dispatch(cmd: &Command, cfg: &CliConfig, io: &mut Io) -> CmdResult {
    match *cmd {
        Command::Tau {
            m,
            n,
            search,
            ascii,
            ..
        } => cmd_tau(dims(m, n)?, search, ascii, cfg, io),
        Command::Construct { m, n, ascii } => cmd_construct(dims(m, n)?, ascii, cfg, io),
        Command::Verify {
            m, n, csv, ascii, ..
        } => {
            let d = dims(m, n)?;
            let path = cfg
                .points
                .as_deref()
                .expect("verify always has a point file");
            let points = read_points(d, path, csv)?;
            cmd_verify(&points, ascii, cfg, io)
        }
        Command::Lines { m, n } => cmd_lines(dims(m, n)?, cfg, io),
        Command::Collinear {
            m,
            n,
            x1,
            y1,
            x2,
            y2,
            x3,
            y3,
        } => {
            let d = dims(m, n)?;
            let p = |x, y| d.point(x, y).map_err(|e| e.to_string());
            cmd_collinear(d, [p(x1, y1)?, p(x2, y2)?, p(x3, y3)?], cfg, io)
        }
        Command::Selftest => selftest::run(cfg, io.out),
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), String> {
    let s = serde_json::to_string(value).map_err(|e| e.to_string())?;
    writeln!(out, "{s}").map_err(|e| e.to_string())
}

fn w(r: std::io::Result<()>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn point_list(points: &[TorusPoint]) -> String {
    points
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_tau(
    r: &TauResult,
    ascii: bool,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), String> {
    match format {
        Format::Json => emit_json(out, r),
        Format::Text => {
            let kind = if r.tau.is_exact() {
                "exact"
            } else {
                "lower bound"
            };
            w(writeln!(
                out,
                "{}: tau = {} ({kind}, {})",
                r.dims,
                r.tau.value(),
                r.provenance
            ))?;
            w(writeln!(out, "witness: {}", point_list(r.witness.points())))?;
            if r.stats.nodes > 0 {
                w(writeln!(
                    out,
                    "search: {} nodes, {} prunes, {} ms",
                    r.stats.nodes,
                    r.stats.prunes,
                    r.stats.elapsed.as_millis()
                ))?;
            }
            if ascii {
                w(write!(out, "{}", r.witness.ascii_grid()))?;
            }
            Ok(())
        }
    }
}

fn cmd_tau(
    d: TorusDims,
    force_search: bool,
    ascii: bool,
    cfg: &CliConfig,
    io: &mut Io,
) -> CmdResult {
    let closed = construct_max(d);
    if closed.tau.is_exact() && !force_search {
        print_tau(&closed, ascii, cfg.format, io.out)?;
        return Ok(EXIT_OK);
    }
    let searched = max_no3il(d, &cfg.limits).map_err(|e| e.to_string())?;
    print_tau(&searched, ascii, cfg.format, io.out)?;
    if !searched.tau.is_exact() {
        w(writeln!(
            io.err,
            "search budget exhausted; {} is only a lower bound",
            searched.tau.value()
        ))?;
        return Ok(EXIT_BUDGET);
    }
    if closed.tau.is_exact() && closed.tau != searched.tau {
        w(writeln!(
            io.err,
            "mismatch: {} gives {}, search gives {}",
            closed.provenance,
            closed.tau.value(),
            searched.tau.value()
        ))?;
        return Ok(EXIT_NEGATIVE);
    }
    if force_search && cfg.format == Format::Text && closed.tau.is_exact() {
        w(writeln!(io.out, "agrees with {}", closed.provenance))?;
    }
    Ok(EXIT_OK)
}

/// `construct --format json` output; readable back by `verify`.
#[derive(Serialize)]
struct ConstructOut<'a> {
    m: u64,
    n: u64,
    points: &'a [TorusPoint],
    provenance: &'static str,
    exact: bool,
}

fn cmd_construct(d: TorusDims, ascii: bool, cfg: &CliConfig, io: &mut Io) -> CmdResult {
    let r = construct_max(d);
    match cfg.format {
        Format::Json => emit_json(
            io.out,
            &ConstructOut {
                m: d.m(),
                n: d.n(),
                points: r.witness.points(),
                provenance: r.provenance.as_str(),
                exact: r.tau.is_exact(),
            },
        )?,
        Format::Text => {
            let kind = if r.tau.is_exact() {
                "optimal"
            } else {
                "lower bound"
            };
            w(writeln!(
                io.out,
                "{d}: {} points ({}, {kind})",
                r.witness.len(),
                r.provenance
            ))?;
            w(writeln!(io.out, "{}", point_list(r.witness.points())))?;
            if ascii {
                w(write!(io.out, "{}", r.witness.ascii_grid()))?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Reads a point file in any accepted layout.
pub fn read_points(d: TorusDims, path: &Path, csv: bool) -> Result<Configuration, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let pairs = if csv {
        parse_csv_points(&text)?
    } else {
        parse_json_points(d, &text)?
    };
    Configuration::new(d, pairs.into_iter().map(|(x, y)| TorusPoint { x, y }))
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_pair_list(v: &serde_json::Value) -> Result<Vec<(u64, u64)>, String> {
    serde_json::from_value::<Vec<(u64, u64)>>(v.clone())
        .map_err(|e| format!("points must be a list of [x, y] pairs: {e}"))
}

pub fn parse_json_points(d: TorusDims, text: &str) -> Result<Vec<(u64, u64)>, String> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    match &v {
        serde_json::Value::Array(_) => parse_pair_list(&v),
        serde_json::Value::Object(obj) => {
            for (key, expected) in [("m", d.m()), ("n", d.n())] {
                if let Some(found) = obj.get(key) {
                    if found.as_u64() != Some(expected) {
                        return Err(format!(
                            "point file has {key} = {found}, command line says {expected}"
                        ));
                    }
                }
            }
            let pts = obj
                .get("points")
                .ok_or("point file object has no `points` field")?;
            parse_pair_list(pts)
        }
        _ => Err("point file must be a JSON array or object".into()),
    }
}

pub fn parse_csv_points(text: &str) -> Result<Vec<(u64, u64)>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.deserialize::<(u64, u64)>() {
        out.push(rec.map_err(|e| format!("bad CSV row: {e}"))?);
    }
    Ok(out)
}

fn cmd_verify(points: &Configuration, ascii: bool, cfg: &CliConfig, io: &mut Io) -> CmdResult {
    let verdict = verify_no3il(points.dims(), points);
    match (cfg.format, verdict) {
        (Format::Json, Verdict::Ok) => {
            emit_json(io.out, &json!({ "ok": true, "points": points.len() }))?
        }
        (Format::Json, Verdict::Violation(t)) => emit_json(
            io.out,
            &json!({ "ok": false, "points": points.len(), "triple": t }),
        )?,
        (Format::Text, Verdict::Ok) => w(writeln!(
            io.out,
            "ok: {} points, no three collinear on {}",
            points.len(),
            points.dims()
        ))?,
        (Format::Text, Verdict::Violation(t)) => w(writeln!(
            io.out,
            "violation: {} {} {} are collinear",
            t[0], t[1], t[2]
        ))?,
    }
    if ascii && cfg.format == Format::Text {
        w(write!(io.out, "{}", points.ascii_grid()))?;
    }
    Ok(if verdict.is_ok() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_lines(d: TorusDims, cfg: &CliConfig, io: &mut Io) -> CmdResult {
    let lines = enumerate_lines_capped(d, cfg.max_cells).map_err(|e| e.to_string())?;
    match cfg.format {
        Format::Json => emit_json(io.out, &lines)?,
        Format::Text => {
            w(writeln!(io.out, "{d}: {} lines", lines.len()))?;
            for l in &lines {
                w(writeln!(
                    io.out,
                    "base {} dir ({},{}) period {}: {}",
                    l.base(),
                    l.dir().u(),
                    l.dir().v(),
                    l.period(),
                    point_list(l.points())
                ))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_collinear(d: TorusDims, p: [TorusPoint; 3], cfg: &CliConfig, io: &mut Io) -> CmdResult {
    let yes = torus_collinear(d, p[0], p[1], p[2]).map_err(|e| e.to_string())?;
    match cfg.format {
        Format::Json => emit_json(io.out, &json!({ "collinear": yes }))?,
        Format::Text => w(writeln!(
            io.out,
            "{}",
            if yes { "collinear" } else { "not-collinear" }
        ))?,
    }
    Ok(if yes { EXIT_OK } else { EXIT_NEGATIVE })
}
