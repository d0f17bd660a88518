use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pv_core::bruhat::{Bruhat, Convention};
use pv_core::chevalley::ChevalleyRep;
use pv_core::construct::Pipeline;
use pv_core::fixture::{diff_json, run_checks, Fixture};
use pv_core::gauge::normalize_to_ag;
use pv_core::matrix::{Matrix, QMatrix};
use pv_core::rootsys::{RootSystem, RootType};
use pv_core::scalar::{fmt_q, show_q};
use pv_core::{DiffPoly, Error};

#[derive(Parser)]
#[command(name = "pvgen", version, about = "Generic Picard-Vessiot extensions: derivation, fixtures, Bruhat and gauge utilities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full construction for a root system
    Derive {
        #[command(flatten)]
        system: System,
        #[command(flatten)]
        out: Output,
    },
    /// Check golden fixtures or a saved derive report
    Verify {
        /// Fixture file, derive report, or directory of them
        #[arg(long)]
        fixtures: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Bruhat normal form of an SL_n matrix
    Bruhat {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Conv::Negative)]
        convention: Conv,
        #[command(flatten)]
        out: Output,
    },
    /// Gauge a matrix in A_0^+(s) + b^- to the shape A_G(f)
    GaugeNormalize {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long = "type", default_value = "A")]
        kind: String,
        /// Defaults to dim - 1 for type A
        #[arg(long)]
        rank: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct System {
    #[arg(long = "type")]
    kind: String,
    #[arg(long)]
    rank: usize,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Conv {
    Positive,
    Negative,
}

/// Failure with its exit code: 1 usage, 2 computation, 3 fixture mismatch.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedType { .. } | Error::Parse(_) | Error::Calibration(_) | Error::DimMismatch(..) => 1,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Fail> {
    match cmd {
        Cmd::Derive { system, out } => derive(&system, &out),
        Cmd::Verify { fixtures, out } => verify(&fixtures, &out),
        Cmd::Bruhat { matrix, convention, out } => bruhat(&matrix, convention, &out),
        Cmd::GaugeNormalize { matrix, kind, rank, out } => gauge(&matrix, &kind, rank, &out),
    }
}

fn emit(out: &Output, text: String) -> Result<(), Fail> {
    match &out.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail(1, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON serializes");
    s.push('\n');
    s
}

fn build_rep(kind: &str, rank: usize) -> Result<ChevalleyRep, Fail> {
    let rs = RootSystem::from_label(kind, rank).map_err(|_| {
        Fail::from(Error::UnsupportedType { label: kind.to_string(), rank })
    })?;
    Ok(ChevalleyRep::build(&rs)?)
}

fn derive(sys: &System, out: &Output) -> Result<(), Fail> {
    let rep = build_rep(&sys.kind, sys.rank)?;
    let pl = Pipeline::run(&rep)?;
    pl.verify(&rep)?;
    let text = match out.format {
        Format::Json => pretty(&pl.to_json(&rep)),
        Format::Text => derive_text(&rep, &pl),
    };
    emit(out, text)
}

fn derive_text(rep: &ChevalleyRep, pl: &Pipeline) -> String {
    let mut s = String::new();
    let rs = rep.rs();
    let comp: Vec<usize> = rs.comp().iter().map(|k| k + 1).collect();
    let _ = writeln!(s, "system {}  m = {}  complementary {:?}", rs.label(), rs.m(), comp);
    let list = |s: &mut String, name: &str, v: &[DiffPoly]| {
        for (i, p) in v.iter().enumerate() {
            let _ = writeln!(s, "{name}_{} = {p}", i + 1);
        }
    };
    let _ = writeln!(s, "\n# ℓδ(u(η))");
    for (k, p) in &pl.stage1.v {
        let _ = writeln!(s, "v_{k} = {p}");
    }
    let _ = writeln!(s, "\n# Ad(u(η))(A_0^-)");
    list(&mut s, "g", &pl.stage2.g);
    list(&mut s, "ℓ", &pl.stage2.ell);
    list(&mut s, "p", &pl.stage2.p);
    let _ = writeln!(s, "\n# A_L");
    let _ = writeln!(s, "n(w̄) =\n{}", pl.liouville.n_bar);
    let c: Vec<String> = pl.liouville.c.iter().map(show_q).collect();
    let _ = writeln!(s, "c = [{}]", c.join(", "));
    list(&mut s, "ḡ", &pl.liouville.gbar);
    for (i, z) in pl.liouville.z.iter().enumerate() {
        let _ = writeln!(s, "z_{} = {z}", i + 1);
    }
    for (i, y) in pl.liouville.y.iter().enumerate() {
        let _ = writeln!(s, "y_{} = {y}", i + 1);
    }
    let _ = writeln!(s, "\n# ℓδ(Y) = A_0^+ + Σ h_i X_i");
    list(&mut s, "h", &pl.h_raw.h);
    let _ = writeln!(s, "\n# elimination");
    for (k, p) in &pl.elim.f {
        let _ = writeln!(s, "η_{k} = {p}");
    }
    let _ = writeln!(s, "\n# invariants");
    for (a, j) in pl.inv.comp.iter().enumerate() {
        let _ = writeln!(s, "h_{j} = {}", pl.inv.h[a]);
    }
    let _ = writeln!(s, "\n∂(Y) = A_G(h)·Y: ok");
    s
}

fn fixture_files(path: &Path) -> Result<Vec<PathBuf>, Fail> {
    if path.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| Fail(1, format!("{}: {e}", path.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        v.sort();
        if v.is_empty() {
            return Err(Fail(1, format!("no fixtures in {}", path.display())));
        }
        Ok(v)
    } else if path.exists() {
        Ok(vec![path.to_path_buf()])
    } else {
        Err(Fail(1, format!("{}: not found", path.display())))
    }
}

fn read_json(path: &Path) -> Result<Value, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail(1, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail(1, format!("{}: {e}", path.display())))
}

/// (label, ok, detail) per check of one file.
fn check_file(path: &Path) -> Result<Vec<(String, bool, String)>, Fail> {
    let v = read_json(path)?;
    if let Some(sys) = v.get("system") {
        let kind = sys["type"].as_str().ok_or_else(|| Fail(1, "report lacks system.type".into()))?;
        let rank = sys["rank"].as_u64().ok_or_else(|| Fail(1, "report lacks system.rank".into()))? as usize;
        let rep = build_rep(kind, rank)?;
        let got = Pipeline::run(&rep)?.to_json(&rep);
        let diffs = diff_json(&v, &got);
        if diffs.is_empty() {
            return Ok(vec![("report".into(), true, "identical".into())]);
        }
        return Ok(diffs.into_iter().map(|d| ("report".into(), false, d)).collect());
    }
    let fx = Fixture::from_str(&v.to_string())?;
    let rep = build_rep(&fx.kind, fx.rank)?;
    let pl = Pipeline::run(&rep)?;
    Ok(run_checks(&rep, &pl, &fx)?.into_iter().map(|o| (o.label, o.ok, o.detail)).collect())
}

fn verify(path: &Path, out: &Output) -> Result<(), Fail> {
    let mut all_ok = true;
    let mut text = String::new();
    let mut files = Vec::new();
    for f in fixture_files(path)? {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let res = check_file(&f)?;
        let failed = res.iter().filter(|r| !r.1).count();
        all_ok &= failed == 0;
        for (label, ok, detail) in &res {
            if *ok {
                let _ = writeln!(text, "PASS {name} {label}");
            } else {
                let _ = writeln!(text, "FAIL {name} {label}: {detail}");
            }
        }
        let _ = writeln!(text, "{name}: {} checks, {failed} failed", res.len());
        files.push(json!({
            "path": f.display().to_string(),
            "checks": res.iter().map(|(l, ok, d)| json!({"label": l, "ok": ok, "detail": d})).collect::<Vec<_>>(),
        }));
    }
    let body = match out.format {
        Format::Text => text,
        Format::Json => pretty(&json!({"ok": all_ok, "files": files})),
    };
    emit(out, body)?;
    if all_ok {
        Ok(())
    } else {
        Err(Fail(3, String::new()))
    }
}

/// A matrix file is either an array of rows or an object with a "matrix" key.
fn matrix_value(path: &Path) -> Result<Value, Fail> {
    let v = read_json(path)?;
    Ok(match v.get("matrix") {
        Some(m) => m.clone(),
        None => v,
    })
}

fn bruhat(path: &Path, conv: Conv, out: &Output) -> Result<(), Fail> {
    let m = QMatrix::from_json(&matrix_value(path)?)?;
    let b = Bruhat::for_sl(m.n())?;
    let conv = match conv {
        Conv::Positive => Convention::Positive,
        Conv::Negative => Convention::Negative,
    };
    let f = b.decompose(&m, conv)?;
    let text = match out.format {
        Format::Json => pretty(&f.to_json()),
        Format::Text => {
            let qs = |v: &[pv_core::Rational]| v.iter().map(show_q).collect::<Vec<_>>().join(", ");
            let diag: Vec<_> = (0..f.t.n()).map(|i| f.t.get(i, i).clone()).collect();
            let mut s = String::new();
            let _ = writeln!(s, "w = {:?}  word = {:?}", f.w, f.word.iter().map(|i| i + 1).collect::<Vec<_>>());
            let _ = writeln!(s, "u' =\n{}", f.uprime);
            let _ = writeln!(s, "n(w) =\n{}", f.n);
            let _ = writeln!(s, "t = diag({})", qs(&diag));
            let _ = writeln!(s, "u =\n{}", f.u);
            let _ = writeln!(s, "x = ({})\nz = ({})\ny = ({})", qs(&f.x), qs(&f.z), qs(&f.y));
            s
        }
    };
    emit(out, text)
}

fn gauge(path: &Path, kind: &str, rank: Option<usize>, out: &Output) -> Result<(), Fail> {
    let a: Matrix<DiffPoly> = Matrix::from_json_with(&matrix_value(path)?, |e| match e {
        Value::Number(n) => n
            .as_i64()
            .map(DiffPoly::int)
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}"))),
        other => DiffPoly::from_json(other),
    })?;
    let rank = match rank {
        Some(r) => r,
        None if kind.parse::<RootType>().ok() == Some(RootType::A) => a.n().saturating_sub(1),
        None => return Err(Fail(1, format!("--rank is required for type {kind}"))),
    };
    let rep = build_rep(kind, rank)?;
    if rep.dim() != a.n() {
        return Err(Error::DimMismatch(a.n(), rep.dim()).into());
    }
    let n = normalize_to_ag(&rep, &a)?;
    let text = match out.format {
        Format::Json => pretty(&n.to_json(&rep)?),
        Format::Text => {
            let mut s = String::new();
            if !n.z.is_empty() {
                let z: Vec<String> = n.z.iter().map(fmt_q).collect();
                let _ = writeln!(s, "torus z = ({})", z.join(", "));
            }
            let _ = writeln!(s, "u =\n{}", n.matrix(&rep)?);
            for (j, f) in n.comp.iter().zip(&n.f) {
                let _ = writeln!(s, "f_{j} = {f}");
            }
            s
        }
    };
    emit(out, text)
}
