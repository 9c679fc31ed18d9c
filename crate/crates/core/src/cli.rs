//! Command-line front end: `build`, `verify-spectrum`, `count`, `predict` and
//! `experiment`.
//!
//! Exit codes: 0 on success, 1 on runtime failure (including a failed identity
//! check), 2 on usage errors. Data goes to stdout or files, diagnostics to stderr.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::count::{count_ordered_tuples, PatternGraph, VertexSubset};
use crate::error::Error;
use crate::graph::{build_graph, closed_form_degree, closed_form_n, Family};
use crate::lab::{
    compare_thresholds, predict_alon, predict_lambda_k, run_experiment, validity_margin, CountReport,
    ExperimentConfig, CSV_COLUMNS,
};
use crate::spectral::verify_square_identity;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Projective,
    Affine,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Projective => Family::Projective,
            FamilyArg::Affine => Family::Affine,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "orthocount",
    version,
    about = "Orthogonality graphs over finite fields: spectral checks and orthogonal k-tuple counts",
    arg_required_else_help = true
)]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph and export its adjacency as hex rows.
    Build {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the square identity of the adjacency matrix exactly.
    VerifySpectrum {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
    },
    /// Count ordered k-tuples of distinct mutually orthogonal vectors.
    Count {
        #[arg(long, value_enum, default_value = "affine")]
        family: FamilyArg,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Newline-separated vectors such as `1,0,2`; the full vertex set when omitted.
        #[arg(long)]
        subset: Option<PathBuf>,
    },
    /// Print the closed-form predictions and thresholds.
    Predict {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u64,
    },
    /// Run seeded random-subset experiments and write CSV (and JSON) reports.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
}

pub fn parse_invocation<I, T>(argv: I) -> Result<Invocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Invocation::try_parse_from(argv)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Failed(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.display().to_string(), source: io::Error::other(e) }
}

#[derive(Serialize)]
struct CountOutput {
    m: usize,
    k: usize,
    lambda_k: u128,
}

#[derive(Serialize)]
struct PredictOutput {
    q: u64,
    d: u32,
    k: u32,
    m: u64,
    predicted_main: f64,
    predicted_alon: f64,
    threshold_new: f64,
    threshold_old: f64,
    validity_margin: f64,
    exponent_new: String,
    exponent_old: String,
    exponent_difference: f64,
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value).expect("report types serialize");
    writeln!(out, "{text}").map_err(io_err(Path::new("<stdout>")))
}

/// Executes a parsed invocation. Warnings are written to `err`.
pub fn run(inv: Invocation, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match inv.command {
        Command::Build { family, q, d, out: path } => {
            let g = build_graph(family.into(), q, d)?;
            match path {
                Some(p) => {
                    let f = File::create(&p).map_err(io_err(&p))?;
                    let mut w = BufWriter::new(f);
                    g.write_export(&mut w).map_err(io_err(&p))?;
                    w.flush().map_err(io_err(&p))?;
                }
                None => g.write_export(out).map_err(io_err(Path::new("<stdout>")))?,
            }
        }
        Command::VerifySpectrum { family, q, d } => {
            let g = build_graph(family.into(), q, d)?;
            let report = verify_square_identity(&g)?;
            print_json(out, &report)?;
            if !report.pass {
                return Err(CliError::Failed(format!(
                    "square identity failed with {} violating entries",
                    report.violation_count
                )));
            }
        }
        Command::Count { family, q, d, k, subset } => {
            let g = build_graph(family.into(), q, d)?;
            let s = match subset {
                Some(p) => {
                    let mut text = String::new();
                    File::open(&p)
                        .and_then(|mut f| f.read_to_string(&mut text))
                        .map_err(io_err(&p))?;
                    VertexSubset::parse(&g, &text)?
                }
                None => VertexSubset::full(&g),
            };
            let lambda_k = count_ordered_tuples(&s, k)?;
            print_json(out, &CountOutput { m: s.m(), k, lambda_k })?;
        }
        Command::Predict { q, d, k, m } => {
            if q < 2 || d < 2 || k < 1 {
                return Err(Error::InvalidParameters("need q >= 2, d >= 2, k >= 1".into()).into());
            }
            let h = PatternGraph::complete(k as usize)?;
            let n = closed_form_n(Family::Affine, q, d) as u64;
            let degree = closed_form_degree(Family::Affine, q, d) as u64;
            let cmp = compare_thresholds(q, d, k);
            print_json(
                out,
                &PredictOutput {
                    q,
                    d,
                    k,
                    m,
                    predicted_main: predict_lambda_k(m, q, k),
                    predicted_alon: predict_alon(m, n, degree, &h),
                    threshold_new: cmp.threshold_new,
                    threshold_old: cmp.threshold_old,
                    validity_margin: validity_margin(m, q, d, &h),
                    exponent_new: cmp.exponent_new,
                    exponent_old: cmp.exponent_old,
                    exponent_difference: cmp.exponent_difference,
                },
            )?;
        }
        Command::Experiment { config, out_csv, out_json } => {
            let text = std::fs::read_to_string(&config).map_err(io_err(&config))?;
            let cfg: ExperimentConfig = text.parse()?;
            if let Some(w) = cfg.regime_warning() {
                let _ = writeln!(err, "warning: {w}");
            }
            let rows = run_experiment(&cfg)?;
            let flagged = rows.iter().filter(|r| r.is_flagged()).count();
            if flagged > 0 {
                let _ = writeln!(err, "warning: {flagged} rows have validity margin below 1");
            }
            emit_reports(&rows, &out_csv, out_json.as_deref())?;
        }
    }
    Ok(())
}

/// Writes the rows as CSV (header always present) and optionally as a JSON array.
pub fn emit_reports(rows: &[CountReport], csv_path: &Path, json_path: Option<&Path>) -> Result<(), CliError> {
    let f = File::create(csv_path).map_err(io_err(csv_path))?;
    write_csv(rows, BufWriter::new(f)).map_err(csv_err(csv_path))?;
    if let Some(p) = json_path {
        let f = File::create(p).map_err(io_err(p))?;
        write_json(rows, BufWriter::new(f)).map_err(io_err(p))?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(rows: &[CountReport], w: W) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wtr.write_record(CSV_COLUMNS)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[CountReport], mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    w.flush()
}

pub fn read_csv<R: Read>(r: R) -> csv::Result<Vec<CountReport>> {
    csv::Reader::from_reader(r).deserialize().collect()
}

/// Parses `argv`, runs it, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = match parse_invocation(argv) {
        Ok(inv) => inv,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match run(inv, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}
