//! Command-line front end for the `affsurj` binary.
//!
//! Exit codes: 0 on success or a passing audit, 1 on a failing audit, 2 on
//! usage, parse or input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{qi, q_to_f64, Q};
use crate::construct::{build_many_points_example, build_sigma, build_theorem_map, ConstructionBundle, ConstructionError, ZSpec};
use crate::io::{bundle_from_json, bundle_to_json, points_from_json, spec_duplicate_count, spec_from_json, IoError};
use crate::solver::{preimage, SolveError, SolveOptions, Target, WITNESS_TOL};
use crate::text::{format_poly, parse_poly, parse_rational};
use crate::verify::{
    audit_bundle, audit_degree, default_probes, jelonek_fixture, jelonek_map, nodal_cubic_points, AuditReport, Execution,
    SampleConfig, VerifyError,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Format(#[from] IoError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("write failed: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Parser, Debug)]
#[command(name = "affsurj", version, about = "Polynomial maps from affine space onto the complement of F x W")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a map whose image avoids the given set.
    Construct(ConstructArgs),
    /// Classify a target point and print preimage witnesses.
    Preimage(PreimageArgs),
    /// Audit a bundle: degree, avoided-set probes, random surjectivity samples.
    Verify(VerifyArgs),
    /// Report the degree of a bundle against its bound.
    Degree(DegreeArgs),
    /// Run one of the built-in fixtures end to end.
    Demo(DemoArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Theorem,
    Sigma,
    ManyPoints,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// ZSpec JSON file (not needed for many-points).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "theorem")]
    family: FamilyArg,
    /// Ambient dimension for many-points.
    #[arg(long)]
    n: Option<usize>,
    /// Degree parameter for many-points.
    #[arg(long)]
    d: Option<usize>,
    /// Where to write the bundle; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PreimageArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Comma-separated coordinates: rationals like `3/4`, or complex `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, default_value_t = WITNESS_TOL)]
    tol: f64,
}

#[derive(Args, Debug, Clone)]
struct SamplingArgs {
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Sample coordinates from the integers in [-grid, grid].
    #[arg(long, global = true, default_value_t = 10)]
    grid: i64,
    #[arg(long, global = true, default_value_t = WITNESS_TOL)]
    tol: f64,
    /// Disable data-parallel sampling.
    #[arg(long, global = true)]
    sequential: bool,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl SamplingArgs {
    fn config(&self) -> SampleConfig {
        SampleConfig {
            samples: self.samples,
            seed: self.seed,
            grid: self.grid,
            tol: self.tol,
            execution: if self.sequential { Execution::Sequential } else { Execution::Parallel },
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// JSON list of points of Z to probe; defaults to probes derived from the bundle.
    #[arg(long)]
    z_probes: Option<PathBuf>,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args, Debug)]
struct DegreeArgs {
    #[arg(long)]
    bundle: PathBuf,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[command(subcommand)]
    which: Demo,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// Nodal cubic over two points in dimension 4.
    #[command(name = "example-2-2")]
    Example22,
    /// Degree-d map avoiding many points.
    ManyPoints {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
    },
    /// The plane minus one point, degree 3.
    Jelonek,
    /// Affine space minus the origin, degree 3.
    Punctured {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Construct(a) => construct(a, out, err),
        Command::Preimage(a) => preimage_cmd(a, out),
        Command::Verify(a) => verify_cmd(a, out),
        Command::Degree(a) => degree_cmd(a, out),
        Command::Demo(a) => demo(a, out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn load_bundle(path: &Path) -> Result<ConstructionBundle, CliError> {
    Ok(bundle_from_json(&read(path)?)?)
}

fn construct(a: ConstructArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let bundle = match a.family {
        FamilyArg::ManyPoints => {
            let (n, d) = match (a.n, a.d) {
                (Some(n), Some(d)) => (n, d),
                _ => return Err(CliError::Usage("many-points needs --n and --d".into())),
            };
            build_many_points_example(n, d)?.0
        }
        fam => {
            let path = a
                .spec
                .as_deref()
                .ok_or_else(|| CliError::Usage("--spec is required for this family".into()))?;
            let text = read(path)?;
            let dups = spec_duplicate_count(&text)?;
            if dups > 0 {
                writeln!(err, "warning: dropped {dups} duplicate point(s) from F")?;
            }
            let spec = spec_from_json(&text)?;
            if fam == FamilyArg::Sigma {
                build_sigma(&spec)?
            } else {
                build_theorem_map(&spec)?
            }
        }
    };
    let json = bundle_to_json(&bundle);
    match &a.out {
        Some(path) => {
            write_file(path, &json)?;
            print_map(out, &bundle)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => writeln!(out, "{json}")?,
    }
    Ok(EXIT_PASS)
}

fn print_map(out: &mut dyn Write, b: &ConstructionBundle) -> std::io::Result<()> {
    writeln!(out, "family {}, n = {}, degree {} (bound {})", b.family, b.n(), b.degree, b.degree_bound)?;
    for (k, c) in b.full_map.components().iter().enumerate() {
        writeln!(out, "  f{} = {}", k + 1, format_poly(c, 'z'))?;
    }
    Ok(())
}

enum Coord {
    Exact(Q),
    Complex(Complex64),
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    parse_rational(s).map(|q| q_to_f64(&q)).or_else(|| s.parse::<f64>().ok())
}

fn parse_coord(s: &str) -> Result<Coord, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("bad coordinate `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        if let Some(q) = parse_rational(&t) {
            return Ok(Coord::Exact(q));
        }
        return parse_real(&t).map(|x| Coord::Complex(Complex64::new(x, 0.0))).ok_or_else(bad);
    };
    // Split before the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other.strip_prefix('+').unwrap_or(other)).ok_or_else(bad)?,
    };
    let re = parse_real(re).ok_or_else(bad)?;
    Ok(Coord::Complex(Complex64::new(re, im)))
}

fn parse_point(s: &str) -> Result<Target, CliError> {
    let coords = s.split(',').map(parse_coord).collect::<Result<Vec<_>, _>>()?;
    if coords.iter().all(|c| matches!(c, Coord::Exact(_))) {
        let v = coords
            .into_iter()
            .map(|c| match c {
                Coord::Exact(q) => q,
                Coord::Complex(_) => unreachable!(),
            })
            .collect();
        return Ok(Target::Rational(v));
    }
    let v = coords
        .into_iter()
        .map(|c| match c {
            Coord::Exact(q) => Complex64::new(q_to_f64(&q), 0.0),
            Coord::Complex(z) => z,
        })
        .collect();
    Ok(Target::Complex(v))
}

fn fmt_complex(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn preimage_cmd(a: PreimageArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let bundle = load_bundle(&a.bundle)?;
    let target = parse_point(&a.point)?;
    let set = preimage(&bundle, &target, &SolveOptions::with_tol(a.tol))?;
    if set.exact_empty {
        let c = set.verdict.empty_constant.clone().unwrap_or_else(|| qi(0));
        writeln!(out, "EXACT EMPTY (residual constant = {c})")?;
        return Ok(EXIT_PASS);
    }
    let exactness = if set.verdict.exact { "exact" } else { "numeric" };
    writeln!(out, "verdict: {} ({exactness})", set.verdict.kind.as_str())?;
    match &set.verdict.residual {
        crate::solver::Residual::Exact(p) => writeln!(out, "residual: {}", format_poly(p, 'z'))?,
        crate::solver::Residual::Numeric(p) => {
            let cs: Vec<String> = p.coeffs().iter().map(fmt_complex).collect();
            writeln!(out, "residual coefficients (ascending): [{}]", cs.join(", "))?
        }
    }
    writeln!(out, "witnesses: {}", set.witnesses.len())?;
    for (z, r) in set.witnesses.iter().zip(&set.residuals) {
        let zs: Vec<String> = z.iter().map(fmt_complex).collect();
        writeln!(out, "  ({})  |f(z) - w| = {r:.3e}", zs.join(", "))?;
    }
    if set.rejected > 0 {
        writeln!(out, "rejected candidates: {}", set.rejected)?;
    }
    Ok(EXIT_PASS)
}

fn emit_report(report: &AuditReport, s: &SamplingArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let json = report.to_json();
    if let Some(path) = &s.out {
        write_file(path, &json)?;
    }
    if s.json {
        writeln!(out, "{json}")?;
    } else {
        writeln!(out, "{}", report.summary())?;
    }
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn verify_cmd(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let bundle = load_bundle(&a.bundle)?;
    let probes = match &a.z_probes {
        Some(p) => points_from_json(&read(p)?)?,
        None => default_probes(&bundle),
    };
    let report = audit_bundle(&bundle, &a.sampling.config(), &probes)?;
    emit_report(&report, &a.sampling, out)
}

fn degree_cmd(a: DegreeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let bundle = load_bundle(&a.bundle)?;
    let r = audit_degree(&bundle);
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    writeln!(out, "degree {} bound {} {verdict}", r.degree_observed, r.degree_bound)?;
    Ok(if r.pass { EXIT_PASS } else { EXIT_FAIL })
}

/// The nodal-cubic bundle over `F = {(1,0), (-1,0)}`.
pub fn example_2_2_bundle() -> Result<ConstructionBundle, ConstructionError> {
    let nodal = parse_poly("z3^2 - z4^3 - z4^2", 4).expect("literal parses");
    let spec = ZSpec::new(4, vec![vec![qi(1), qi(0)], vec![qi(-1), qi(0)]], vec![nodal])?;
    build_theorem_map(&spec)
}

/// Points of `F x W` for the nodal-cubic bundle, `t` in `-5..=5`.
pub fn example_2_2_probes() -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    for b in [1, -1] {
        for (x, y) in nodal_cubic_points(-5..=5) {
            out.push(vec![qi(b), qi(0), x, y]);
        }
    }
    out
}

/// Sigma bundle for affine `n`-space minus the origin.
pub fn punctured_bundle(n: usize) -> Result<ConstructionBundle, ConstructionError> {
    build_sigma(&ZSpec::new(n, vec![vec![qi(0); n]], vec![])?)
}

fn demo(a: DemoArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = a.sampling.config();
    let report = match a.which {
        Demo::Example22 => {
            let b = example_2_2_bundle()?;
            print_map(out, &b)?;
            audit_bundle(&b, &cfg, &example_2_2_probes())?
        }
        Demo::ManyPoints { n, d } => {
            let (b, pts) = build_many_points_example(n, d)?;
            writeln!(out, "avoided points: {}", pts.len())?;
            print_map(out, &b)?;
            audit_bundle(&b, &cfg, &pts)?
        }
        Demo::Jelonek => {
            for (k, c) in jelonek_map().components().iter().enumerate() {
                writeln!(out, "  f{} = {}", k + 1, format_poly(c, 'z'))?;
            }
            jelonek_fixture(&cfg)
        }
        Demo::Punctured { n } => {
            let b = punctured_bundle(n)?;
            print_map(out, &b)?;
            audit_bundle(&b, &cfg, &[vec![qi(0); n]])?
        }
    };
    emit_report(&report, &a.sampling, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("affsurj").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_literals() {
        let z = |s| match parse_coord(s).unwrap() {
            Coord::Complex(z) => z,
            Coord::Exact(q) => Complex64::new(q_to_f64(&q), 0.0),
        };
        assert_eq!(z("1+2i"), Complex64::new(1.0, 2.0));
        assert_eq!(z("-1-i"), Complex64::new(-1.0, -1.0));
        assert_eq!(z("i"), Complex64::new(0.0, 1.0));
        assert_eq!(z("-3/2i"), Complex64::new(0.0, -1.5));
        assert_eq!(z("1e-3+1e-3i"), Complex64::new(1e-3, 1e-3));
        assert!(matches!(parse_coord("3/4").unwrap(), Coord::Exact(_)));
        assert!(parse_coord("x").is_err());
    }

    #[test]
    fn points_route_by_kind() {
        assert!(matches!(parse_point("0,1/2,-3").unwrap(), Target::Rational(_)));
        assert!(matches!(parse_point("0,i").unwrap(), Target::Complex(_)));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["construct", "--family", "many-points"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["degree", "--bundle", "/nonexistent/b.json"]).0, EXIT_USAGE);
    }

    #[test]
    fn demo_many_points_reports_count() {
        let (code, out, _) = run_capture(&["demo", "many-points", "--n", "3", "--d", "4", "--samples", "20"]);
        assert_eq!(code, EXIT_PASS, "{out}");
        assert!(out.contains("avoided points: 4"));
        assert!(out.contains("degree 4"));
    }
}
