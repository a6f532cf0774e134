mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::process::ExitCode;
use tpbg::hankel::{empirical_order, log_grid, DEFAULT_SCAN_POINTS};
use tpbg::report::{csv_line, fmt_real};
use tpbg::specialfn::tricomi_psi;
use tpbg::staircase::{classify, precedes, succeeds, PlanePoint};
use tpbg::turan::{self, records_csv, Inequality, InequalityRecord, SearchRegion};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "tpbg", version, about = "Tricomi determinants, total positivity of the Beta-Gamma kernel and Turán inequalities")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<std::path::PathBuf>,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Psi(a, c, z).
    #[command(allow_negative_numbers = true)]
    Psi {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        z: f64,
    },
    /// Total-positivity class of the kernel at (d, b).
    #[command(allow_negative_numbers = true)]
    Classify {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        b: f64,
        /// Rows of the staircase table.
        #[arg(long, default_value_t = 4)]
        max_n: u32,
    },
    /// Theoretical against empirical order over a (d, b) grid.
    #[command(allow_negative_numbers = true)]
    Scan(ScanArgs),
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        /// Random draws (samples for `laws`).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Turán-type inequality reports.
    #[command(subcommand)]
    Turan(TuranCommand),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = -2.0)]
    d_min: f64,
    #[arg(long, default_value_t = 3.0)]
    d_max: f64,
    #[arg(long, default_value_t = 0.1)]
    b_min: f64,
    #[arg(long, default_value_t = 3.0)]
    b_max: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    #[arg(long, default_value_t = 1e-6)]
    z_min: f64,
    #[arg(long, default_value_t = 1e6)]
    z_max: f64,
    #[arg(long, default_value_t = DEFAULT_SCAN_POINTS)]
    z_points: usize,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PointArgs {
    #[arg(long, requires_all = ["c", "x"])]
    a: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    /// Evaluate on the built-in grid of the region.
    #[arg(long, value_enum, conflicts_with_all = ["a", "samples"])]
    grid: Option<GridKind>,
    /// Evaluate at N random points of the region.
    #[arg(long, conflicts_with = "a")]
    samples: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    Default,
}

#[derive(Subcommand)]
enum TuranCommand {
    /// Psi(a,c)^2 <= Psi(a,c-1) Psi(a,c+1).
    Holder(PointArgs),
    /// Turán bound on a >= 1 or c <= a+2.
    Cor1(PointArgs),
    /// Contiguous-in-(a,c) bound on a > 1, c < 1+a, with its baseline.
    Cor2(PointArgs),
    /// Turán bound against the cited bounds.
    #[command(allow_negative_numbers = true)]
    Compare {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        x: f64,
    },
    /// Search for a violation of the Turán bound.
    #[command(allow_negative_numbers = true)]
    Falsify {
        #[arg(long, requires = "c", conflicts_with = "region")]
        a: Option<f64>,
        #[arg(long, requires = "a")]
        c: Option<f64>,
        #[arg(long, value_enum)]
        region: Option<RegionKind>,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionKind {
    Falsity,
    Validity,
}

enum CliError {
    Domain(String),
}

impl From<tpbg::Error> for CliError {
    fn from(e: tpbg::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Rendered output and whether the command's checks passed.
struct Output {
    csv: String,
    json: Value,
    ok: bool,
}

fn envelope(command: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_psi(a: f64, c: f64, z: f64) -> Result<Output, CliError> {
    let value = tricomi_psi(a, c, z)?;
    Ok(Output {
        csv: format!("a,c,z,value\n{}", csv_line([fmt_real(a), fmt_real(c), fmt_real(z), fmt_real(value)])),
        json: envelope("psi", json!({"a": a, "c": c, "z": z, "value": value})),
        ok: true,
    })
}

#[derive(Serialize)]
struct ClassifyRow {
    n: u32,
    succeeds: bool,
    precedes: bool,
}

fn cmd_classify(d: f64, b: f64, max_n: u32) -> Result<Output, CliError> {
    let p = PlanePoint::new(d, b);
    let class = classify(p)?;
    let rows: Vec<ClassifyRow> = (1..=max_n).map(|n| ClassifyRow { n, succeeds: succeeds(p, n), precedes: precedes(p, n) }).collect();
    let mut csv = String::from("d,b,classification,n,succeeds,precedes\n");
    for r in &rows {
        csv.push_str(&csv_line([fmt_real(d), fmt_real(b), class.to_string(), r.n.to_string(), r.succeeds.to_string(), r.precedes.to_string()]));
    }
    let json = envelope("classify", json!({"d": d, "b": b, "classification": class, "label": class.to_string(), "table": rows}));
    Ok(Output { csv, json, ok: true })
}

#[derive(Serialize)]
struct ScanCell {
    d: f64,
    b: f64,
    /// TP order from the staircase, `None` for TP_infinity.
    theoretical: Option<u32>,
    /// 1 + the largest n <= n_max with D^1, ..., D^n nonnegative on the grid.
    empirical: usize,
    /// The empirical order reached n_max + 1.
    capped: bool,
    /// d or b is an integer.
    boundary: bool,
    agree: bool,
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi < lo {
        return Vec::new();
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| lo + step * i as f64).map(|v| (v * 1e12).round() / 1e12).collect()
}

fn cmd_scan(s: &ScanArgs) -> Result<Output, CliError> {
    if !(s.step > 0.0) || s.n_max == 0 || !(s.z_min > 0.0 && s.z_max > s.z_min) || s.z_points < 2 {
        return Err(CliError::Domain("scan needs step > 0, n_max >= 1, 0 < z_min < z_max and z_points >= 2".into()));
    }
    let grid = log_grid(s.z_min, s.z_max, s.z_points);
    let cells: Vec<(f64, f64)> = axis(s.d_min, s.d_max, s.step).into_iter().flat_map(|d| axis(s.b_min, s.b_max, s.step).into_iter().map(move |b| (d, b))).collect();
    let rows = cells
        .par_iter()
        .map(|&(d, b)| {
            let theoretical = classify(PlanePoint::new(d, b))?.order();
            let empirical = empirical_order(b, d, s.n_max, &grid)? + 1;
            let capped = empirical == s.n_max + 1;
            let boundary = d.fract() == 0.0 || b.fract() == 0.0;
            let agree = theoretical.map_or(capped, |t| (t as usize).min(s.n_max + 1) == empirical);
            Ok(ScanCell { d, b, theoretical, empirical, capped, boundary, agree })
        })
        .collect::<tpbg::Result<Vec<_>>>()?;
    let mut csv = String::from("d,b,theoretical,empirical,capped,boundary,agree\n");
    for r in &rows {
        let t = r.theoretical.map_or("infinity".to_string(), |t| t.to_string());
        csv.push_str(&csv_line([fmt_real(r.d), fmt_real(r.b), t, r.empirical.to_string(), r.capped.to_string(), r.boundary.to_string(), r.agree.to_string()]));
    }
    let json = envelope("scan", json!({"n_max": s.n_max, "z_min": s.z_min, "z_max": s.z_max, "z_points": s.z_points, "cells": rows}));
    Ok(Output { csv, json, ok: true })
}

fn cmd_verify(suite: verify::Suite, seed: u64, trials: Option<usize>) -> Result<Output, CliError> {
    let checks = verify::run(suite, seed, trials)?;
    let ok = checks.iter().all(|c| c.pass);
    let mut csv = String::from("suite,check,samples,statistic,threshold,pass\n");
    let name = to_json(&suite).as_str().unwrap_or_default().to_string();
    for c in &checks {
        csv.push_str(&csv_line([name.clone(), c.check.clone(), c.samples.to_string(), fmt_real(c.statistic), fmt_real(c.threshold), c.pass.to_string()]));
    }
    let json = envelope("verify", json!({"suite": suite, "seed": seed, "pass": ok, "checks": checks}));
    Ok(Output { csv, json, ok })
}

fn records_output(command: &str, records: Vec<InequalityRecord>) -> Output {
    let ok = records.iter().all(|r| r.holds);
    Output { csv: records_csv(&records), json: envelope(command, json!({"all_hold": ok, "records": records})), ok }
}

fn points(kind: Inequality, p: &PointArgs, seed: u64) -> Vec<(f64, f64, f64)> {
    match (p.a, p.c, p.x, p.samples) {
        (Some(a), Some(c), Some(x), _) => vec![(a, c, x)],
        (_, _, _, Some(n)) => turan::sample_region(kind, n, seed),
        _ => turan::default_grid(kind),
    }
}

fn cmd_turan(t: &TuranCommand, seed: u64) -> Result<Output, CliError> {
    match t {
        TuranCommand::Holder(p) => Ok(records_output("turan holder", turan::check_points(Inequality::Holder, &points(Inequality::Holder, p, seed))?)),
        TuranCommand::Cor1(p) => Ok(records_output("turan cor1", turan::check_points(Inequality::Corollary1, &points(Inequality::Corollary1, p, seed))?)),
        TuranCommand::Cor2(p) => {
            let mut records = Vec::new();
            for (a, c, x) in points(Inequality::Corollary2, p, seed) {
                let r = turan::corollary2(a, c, x)?;
                records.push(r.bound);
                records.push(r.baseline);
            }
            Ok(records_output("turan cor2", records))
        }
        TuranCommand::Compare { a, c, x } => {
            let cmps = turan::comparison_bounds(*a, *c, *x)?;
            let mut csv = String::from("a,c,x,cited,threshold,corollary_rhs,cited_rhs,lhs,tighter\n");
            for m in &cmps {
                let cited = to_json(&m.which).as_str().unwrap_or_default().to_string();
                let tighter = if m.corollary_tighter { "corollary1" } else { "cited" };
                csv.push_str(&csv_line([
                    fmt_real(*a),
                    fmt_real(*c),
                    fmt_real(*x),
                    cited,
                    fmt_real(m.threshold),
                    fmt_real(m.corollary.rhs),
                    fmt_real(m.cited.rhs),
                    fmt_real(m.corollary.lhs),
                    tighter.to_string(),
                ]));
            }
            let ok = cmps.iter().all(|m| m.corollary.holds && m.cited.holds);
            Ok(Output { csv, json: envelope("turan compare", json!({"comparisons": cmps})), ok })
        }
        TuranCommand::Falsify { a, c, region, budget } => {
            let r = match (a, c, region) {
                (Some(a), Some(c), _) => SearchRegion::point(*a, *c),
                (_, _, Some(RegionKind::Validity)) => SearchRegion::validity(),
                _ => SearchRegion::falsity(),
            };
            let out = turan::counterexample_search(r, *budget)?;
            let found = out.violation.is_some();
            if !found {
                eprintln!("no violation found in {} evaluations", out.evaluations);
            }
            let csv = records_csv(&out.worst.iter().cloned().collect::<Vec<_>>());
            let json = envelope("turan falsify", json!({"region": r, "evaluations": out.evaluations, "found": found, "worst": out.worst}));
            Ok(Output { csv, json, ok: found })
        }
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Psi { a, c, z } => cmd_psi(*a, *c, *z),
        Command::Classify { d, b, max_n } => cmd_classify(*d, *b, *max_n),
        Command::Scan(s) => cmd_scan(s),
        Command::Verify { suite, trials } => cmd_verify(*suite, cli.seed, *trials),
        Command::Turan(t) => cmd_turan(t, cli.seed),
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("TPBG_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Domain(format!("TPBG_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Domain("TPBG_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Domain(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(&cli));
    let output = match result {
        Ok(o) => o,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Csv => output.csv,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&output.json).expect("serializable")),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if output.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
