//! Command-line front end. `run` parses arguments, writes the command's output
//! and returns the process exit code.

use std::fs;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::hyper::{j_exact, DiskPoint};
use crate::kvol::{find_minimum, kvol_at, scan, verify_covering, CandidateConfig, ScanRow, SCAN_HEADER};
use crate::origami::StaircaseSurface;
use crate::saddle::{trace_direction, SaddleRecord, SaddleTable};
use crate::slope::{parse_rational, slopes_up_to, Rational, Slope};
use crate::veech::{end_of_z_by_group, exact_is_safe, EndZOracle};
use crate::verify::{self, Level, VerifyOptions, COVERING_N_MAX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Numeric {
    /// Keep rational inputs and outputs exact where the computation allows.
    Exact,
    Float,
}

#[derive(Debug, Parser)]
#[command(
    name = "kvol",
    version,
    about = "KVol on staircase origamis and their Teichmüller disks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Staircase parameter: the surface is St(2s−1), of genus s.
    #[arg(long, global = true, env = "KVOL_S", default_value_t = 2)]
    pub s: i64,
    /// Output format; defaults to csv for `scan` and `itable`, a text table for
    /// `verify`, json otherwise.
    #[arg(long, global = true, env = "KVOL_FORMAT", value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, env = "KVOL_NUMERIC", value_enum, default_value = "exact")]
    pub numeric: Numeric,
    /// Explicit seed family size N for the geodesic search.
    #[arg(long, global = true, env = "KVOL_BASE_BOUND")]
    pub base_bound: Option<i64>,
    /// Initial orbit bound on |cz + d|².
    #[arg(long, global = true, env = "KVOL_ORBIT_BOUND")]
    pub orbit_bound: Option<f64>,
    /// Unchanged deepening rounds required before the search stops.
    #[arg(long, global = true, env = "KVOL_ROUNDS")]
    pub rounds: Option<u32>,
    #[arg(long, global = true, env = "KVOL_MAX_ROUNDS")]
    pub max_rounds: Option<u32>,
    #[arg(long, global = true, env = "KVOL_TOLERANCE")]
    pub tolerance: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true, env = "KVOL_OUTPUT")]
    pub output: Option<String>,
}

impl GlobalOpts {
    pub fn config(&self) -> Result<CandidateConfig, Error> {
        let d = CandidateConfig::default();
        let cfg = CandidateConfig {
            base_endpoint_bound: self.base_bound.unwrap_or(d.base_endpoint_bound),
            orbit_bound: self.orbit_bound.unwrap_or(d.orbit_bound),
            stability_rounds: self.rounds.unwrap_or(d.stability_rounds),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            max_rounds: self.max_rounds.unwrap_or(d.max_rounds),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// KVol at one point of the Teichmüller disk.
    At {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// KVol on a grid; one row per point.
    Scan {
        #[arg(long, allow_hyphen_values = true, default_value = "-1")]
        x_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        x_max: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "0.5")]
        y_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "3")]
        y_max: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "0.1")]
        step: f64,
    },
    /// Saddle connections of direction (p, q) with homology classes and crossing words.
    Saddles {
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
    },
    /// Intersection ratios I(r, r') over all slope pairs of height ≤ bound.
    Itable {
        #[arg(long, default_value_t = 4)]
        bound: i64,
    },
    /// Whether (r, r') is the pair of endpoints of a geodesic of the family 𝒵.
    Endz {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        rp: String,
    },
    /// Global minimum of KVol on the disk.
    Min,
    /// Banana-neighbourhood covering check of the region around the minimum.
    Cover {
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value_t = COVERING_N_MAX)]
        n_max: i64,
    },
    /// Run the acceptance battery.
    Verify {
        #[arg(value_enum, default_value = "quick")]
        level: LevelArg,
        /// Perturb the intersection form; the battery must then fail.
        #[arg(long)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

/// What went wrong, already mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unstable(_) | Error::NonConvergence(_) => EXIT_UNSTABLE,
            Error::Invariant(_) => EXIT_FAILURE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

/// Command output plus the exit code it should end with.
pub struct Output {
    pub bytes: Vec<u8>,
    pub code: i32,
}

impl Output {
    fn ok(bytes: Vec<u8>) -> Self {
        Output { bytes, code: EXIT_OK }
    }
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>, Failure>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    })
}

fn fmt_ratio(r: Rational, numeric: Numeric) -> String {
    match numeric {
        Numeric::Exact => r.to_string(),
        Numeric::Float => crate::kvol::format_sig(crate::hyper::ratio_f64(r)),
    }
}

/// A point from two coordinate strings; rational inputs stay exact in exact mode.
pub fn parse_point(x: &str, y: &str, numeric: Numeric) -> Result<DiskPoint, Error> {
    let float = |s: &str| -> Result<f64, Error> {
        match parse_rational(s) {
            Ok(r) => Ok(crate::hyper::ratio_f64(r)),
            Err(_) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {s:?}"))),
        }
    };
    if numeric == Numeric::Exact {
        if let (Ok(xr), Ok(yr)) = (parse_rational(x), parse_rational(y)) {
            if exact_is_safe(xr) && exact_is_safe(yr) {
                return DiskPoint::exact(xr, yr);
            }
        }
    }
    DiskPoint::new(float(x)?, float(y)?)
}

#[derive(Serialize)]
struct AtOutput<'a> {
    #[serde(flatten)]
    result: &'a crate::kvol::KVolResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactTerms>,
}

#[derive(Serialize)]
struct ExactTerms {
    x: String,
    y: String,
    reduced_x: String,
    reduced_y: String,
    j_1: String,
    j_minus_1: String,
}

#[derive(Serialize)]
struct ItableRow {
    r: String,
    rp: String,
    #[serde(rename = "I")]
    i: String,
    end_z: bool,
    end_z_group: bool,
}

#[derive(Serialize)]
struct EndzOutput {
    r: String,
    rp: String,
    end_z: bool,
    end_z_group: bool,
    #[serde(rename = "I")]
    i: String,
    witness: (usize, usize),
}

/// Runs one parsed command and returns its output.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let s = g.s;
    StaircaseSurface::new(s)?;
    let cfg = g.config()?;
    let default_csv = matches!(cli.command, Command::Scan { .. } | Command::Itable { .. });
    let format = g.format.unwrap_or(if default_csv { Format::Csv } else { Format::Json });
    match &cli.command {
        Command::At { x, y } => {
            let z = parse_point(x, y, g.numeric)?;
            let res = kvol_at(s, &z, &cfg)?;
            match format {
                Format::Json => {
                    let exact = match (z.exact, res.reduced.exact) {
                        (Some((x, y)), Some((rx, ry))) => Some(ExactTerms {
                            x: x.to_string(),
                            y: y.to_string(),
                            reduced_x: rx.to_string(),
                            reduced_y: ry.to_string(),
                            j_1: j_exact(Slope::integer(1), &res.reduced)
                                .map(|v| v.to_string())
                                .unwrap_or_default(),
                            j_minus_1: j_exact(Slope::integer(-1), &res.reduced)
                                .map(|v| v.to_string())
                                .unwrap_or_default(),
                        }),
                        _ => None,
                    };
                    Ok(Output::ok(json(&AtOutput { result: &res, exact })?))
                }
                Format::Csv => {
                    let row = ScanRow::from_result(z.x, z.y, Ok(res));
                    Ok(Output::ok(csv_rows(&header(SCAN_HEADER), [row.record()])?))
                }
            }
        }
        Command::Scan {
            x_min,
            x_max,
            y_min,
            y_max,
            step,
        } => {
            let rows = scan(s, (*x_min, *x_max), (*y_min, *y_max), *step, &cfg)?;
            match format {
                Format::Json => Ok(Output::ok(json(&rows)?)),
                Format::Csv => Ok(Output::ok(csv_rows(
                    &header(SCAN_HEADER),
                    rows.iter().map(|r| r.record()),
                )?)),
            }
        }
        Command::Saddles { p, q } => {
            let d = Slope::direction(*p, *q)?;
            let surface = StaircaseSurface::new(s)?;
            let records = trace_direction(&surface, d)?
                .iter()
                .map(|c| SaddleRecord::new(&surface, c))
                .collect::<Result<Vec<_>, _>>()?;
            match format {
                Format::Json => Ok(Output::ok(json(&records)?)),
                Format::Csv => {
                    let join = |v: &[i64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                    Ok(Output::ok(csv_rows(
                        &[
                            "p",
                            "q",
                            "start_square",
                            "end_square",
                            "class",
                            "eps",
                            "phi",
                            "crossing_word",
                        ],
                        records.iter().map(|r| {
                            [
                                r.p.to_string(),
                                r.q.to_string(),
                                r.start_square.to_string(),
                                r.end_square.to_string(),
                                r.class.clone(),
                                join(&r.eps),
                                join(&r.phi),
                                r.crossing_word.join(" "),
                            ]
                        }),
                    )?))
                }
            }
        }
        Command::Itable { bound } => {
            if *bound < 1 {
                return Err(Error::InvalidParameter(format!("bound {bound} must be at least 1")).into());
            }
            let oracle = EndZOracle::with_table(SaddleTable::new(s)?);
            let slopes = slopes_up_to(*bound);
            let mut rows = Vec::new();
            for (i, &r) in slopes.iter().enumerate() {
                for &rp in &slopes[i + 1..] {
                    let ratio = oracle.table().intersection_ratio(r, rp)?;
                    rows.push(ItableRow {
                        r: r.to_string(),
                        rp: rp.to_string(),
                        i: fmt_ratio(ratio.value, g.numeric),
                        end_z: oracle.is_end(r, rp)?,
                        end_z_group: end_of_z_by_group(r, rp)?,
                    });
                }
            }
            match format {
                Format::Json => Ok(Output::ok(json(&rows)?)),
                Format::Csv => Ok(Output::ok(csv_rows(
                    &["r", "rp", "I", "end_z", "end_z_group"],
                    rows.iter().map(|r| {
                        [
                            r.r.clone(),
                            r.rp.clone(),
                            r.i.clone(),
                            r.end_z.to_string(),
                            r.end_z_group.to_string(),
                        ]
                    }),
                )?)),
            }
        }
        Command::Endz { r, rp } => {
            let (r, rp): (Slope, Slope) = (r.parse()?, rp.parse()?);
            let oracle = EndZOracle::new(s)?;
            let ratio = oracle.table().intersection_ratio(r, rp)?;
            let out = EndzOutput {
                r: r.to_string(),
                rp: rp.to_string(),
                end_z: oracle.is_end(r, rp)?,
                end_z_group: end_of_z_by_group(r, rp)?,
                i: fmt_ratio(ratio.value, g.numeric),
                witness: ratio.witness,
            };
            match format {
                Format::Json => Ok(Output::ok(json(&out)?)),
                Format::Csv => Ok(Output::ok(csv_rows(
                    &["r", "rp", "end_z", "end_z_group", "I"],
                    [[out.r, out.rp, out.end_z.to_string(), out.end_z_group.to_string(), out.i]],
                )?)),
            }
        }
        Command::Min => {
            let m = find_minimum(s, &cfg)?;
            match format {
                Format::Json => Ok(Output::ok(json(&m)?)),
                Format::Csv => {
                    let f = crate::kvol::format_sig;
                    Ok(Output::ok(csv_rows(
                        &["x", "y", "kvol", "mirrored_kvol", "evaluations"],
                        [[
                            f(m.point.x),
                            f(m.point.y),
                            f(m.value),
                            f(m.mirrored_value),
                            m.evaluations.to_string(),
                        ]],
                    )?))
                }
            }
        }
        Command::Cover { step, n_max } => {
            let report = verify_covering(*step, *n_max)?;
            let code = if report.passed() { EXIT_OK } else { EXIT_FAILURE };
            let bytes = match format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let f = crate::kvol::format_sig;
                    csv_rows(&["x", "y"], report.uncovered.iter().map(|&(x, y)| [f(x), f(y)]))?
                }
            };
            Ok(Output { bytes, code })
        }
        Command::Verify { level, inject_fault } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = verify::run(
                VerifyOptions {
                    level,
                    inject_fault: *inject_fault,
                },
                &cfg,
            );
            let code = if report.passed() { EXIT_OK } else { EXIT_FAILURE };
            let bytes = match g.format {
                None => {
                    let mut text = String::new();
                    for c in &report.criteria {
                        text.push_str(&c.line());
                        text.push('\n');
                    }
                    let failed = report.criteria.iter().filter(|c| !c.passed).count();
                    text.push_str(&format!("{} criteria, {failed} failed\n", report.criteria.len()));
                    text.into_bytes()
                }
                Some(Format::Json) => json(&report)?,
                Some(Format::Csv) => csv_rows(
                    &[
                        "criterion",
                        "name",
                        "passed",
                        "claim",
                        "computed",
                        "tolerance",
                        "seconds",
                    ],
                    report.criteria.iter().map(|c| {
                        [
                            c.id.to_string(),
                            c.name.clone(),
                            c.passed.to_string(),
                            c.claim.clone(),
                            c.computed.clone(),
                            c.tolerance.clone(),
                            format!("{:.3}", c.seconds),
                        ]
                    }),
                )?,
            };
            Ok(Output { bytes, code })
        }
    }
}

fn header(h: &str) -> Vec<&str> {
    h.split(',').collect()
}

/// Parses `args`, runs the command, writes its output, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.global.output {
                Some(path) => fs::write(path, &out.bytes),
                None => stdout.write_all(&out.bytes),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILURE;
            }
            if out.code != EXIT_OK {
                let _ = writeln!(stderr, "check failed");
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn main_with_env() -> i32 {
    run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}
