//! Command-line front end: parses a problem description, dispatches the
//! computation, and emits machine-readable reports (formats are frozen in
//! `docs/formats.md`).

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bands::{BandStructure, Side};
use crate::classify::{self, Overall, SingularPoint, SingularityKind, Verdict};
use crate::criteria;
use crate::harness;
use crate::spectrum::{self, Definitizability};
use crate::weyl::{ClosedFormSpec, WeylPair};

/// Format version stamped into every report.
pub const REPORT_VERSION: &str = "1";

const EXIT_OK: i32 = 0;
const EXIT_ERROR: i32 = 1;
const EXIT_UNDECIDED: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_BAD_JSON: i32 = 65;

#[derive(Parser, Debug)]
#[command(name = "indefsl", version, about = "Spectral analysis of indefinite Sturm–Liouville operators with finite-zone potentials")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TolProfile {
    /// Library default tolerances.
    Default,
    /// Same tolerances, but any verdict that sits near a decision boundary
    /// is reported as Undecided instead of the nominal class.
    Strict,
}

impl TolProfile {
    fn name(self) -> &'static str {
        match self {
            TolProfile::Default => "default",
            TolProfile::Strict => "strict",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Ex1,
    Ex2,
}

/// Flags selecting the operator: exactly one of `--const-a`,
/// `--family --k2 --xi`, or `--bands <file.json>`.
#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// Closed-form family (requires --k2 and --xi).
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Elliptic modulus squared k² ∈ (0, 1).
    #[arg(long)]
    k2: Option<f64>,
    /// Spectral shift ξ.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<f64>,
    /// Constant potential q ≡ a.
    #[arg(long = "const-a", allow_hyphen_values = true)]
    const_a: Option<f64>,
    /// JSON file holding a BandStructure or a closed-form spec.
    #[arg(long)]
    bands: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Tolerance profile, echoed in every report header.
    #[arg(long = "tol-profile", value_enum, default_value = "default")]
    tol_profile: TolProfile,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Similarity classification: verdict, singular points, eigenvalues.
    Classify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Essential spectrum and eigenvalues.
    Eigs {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate M±(λ) and D(λ) = M₊(λ) − M₋(λ).
    WeylEval {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Point λ as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Classification sweep over a ξ grid; CSV columns
    /// (xi, verdict, singularities, eigenvalues).
    Sweep {
        /// Closed-form family to sweep.
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Elliptic modulus squared.
        #[arg(long)]
        k2: f64,
        /// Grid `a:b:step` (inclusive).
        #[arg(long = "xi-grid", allow_hyphen_values = true)]
        xi_grid: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Boundedness criteria report (ratio sups, Muckenhoupt scan,
    /// dissipative part, Poisson condition).
    Check {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Definitizability of the support pair: decision plus separating
    /// partition or an overlap witness.
    Definitizable {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Finite-difference resolvent evidence; CSV columns
    /// (epsilon, integral, f_id).
    Harness {
        /// Constant potential of the surrogate operator.
        #[arg(long = "const-a", default_value = "1.0", allow_hyphen_values = true)]
        const_a: f64,
        /// Dirichlet truncation half-width.
        #[arg(long = "half-width", default_value = "20.0")]
        half_width: f64,
        /// Grid step.
        #[arg(long, default_value = "0.1")]
        step: f64,
        /// Number of random test vectors (plus one origin-concentrated one).
        #[arg(long, default_value = "3")]
        samples: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug)]
struct CliFailure {
    code: i32,
    message: String,
}

impl CliFailure {
    fn error(message: impl Into<String>) -> Self {
        CliFailure { code: EXIT_ERROR, message: message.into() }
    }

    fn bad_json(message: impl Into<String>) -> Self {
        CliFailure { code: EXIT_BAD_JSON, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliFailure { code: EXIT_USAGE, message: message.into() }
    }
}

impl ProblemArgs {
    fn build(&self) -> Result<WeylPair, CliFailure> {
        let sources = [
            self.const_a.is_some(),
            self.family.is_some(),
            self.bands.is_some(),
        ];
        if sources.iter().filter(|&&b| b).count() != 1 {
            return Err(CliFailure::usage(
                "specify exactly one of --const-a, --family (with --k2/--xi), or --bands",
            ));
        }
        if let Some(a) = self.const_a {
            return WeylPair::constant(a).map_err(|e| CliFailure::error(e.to_string()));
        }
        if let Some(family) = self.family {
            let k2 = self
                .k2
                .ok_or_else(|| CliFailure::usage("--family requires --k2"))?;
            let xi = self
                .xi
                .ok_or_else(|| CliFailure::usage("--family requires --xi"))?;
            let pair = match family {
                FamilyArg::Ex1 => WeylPair::example1(xi, k2),
                FamilyArg::Ex2 => WeylPair::example2(xi, k2, false),
            };
            return pair.map_err(|e| CliFailure::error(e.to_string()));
        }
        let path = self.bands.as_ref().expect("checked above");
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliFailure::error(format!("cannot read {}: {e}", path.display())))?;
        if let Ok(spec) = serde_json::from_str::<ClosedFormSpec>(&text) {
            if let Ok(pair) = WeylPair::from_spec(&spec) {
                return Ok(pair);
            }
        }
        let bands: BandStructure = serde_json::from_str(&text).map_err(|e| {
            CliFailure::bad_json(format!("{} is neither a closed-form spec nor a band structure: {e}", path.display()))
        })?;
        WeylPair::finite_zone(&bands).map_err(|e| CliFailure::error(e.to_string()))
    }
}

fn header(profile: TolProfile) -> Value {
    json!({
        "version": REPORT_VERSION,
        "tol_profile": profile.name(),
    })
}

fn merged(profile: TolProfile, mut body: Value) -> String {
    let mut report = header(profile);
    report
        .as_object_mut()
        .expect("header is an object")
        .append(body.as_object_mut().expect("body is an object"));
    serde_json::to_string_pretty(&report).expect("serializable report")
}

fn csv_header(profile: TolProfile, columns: &str) -> String {
    format!(
        "# indefsl-report v{REPORT_VERSION} tol-profile={}\n{columns}\n",
        profile.name()
    )
}

fn overall_name(v: Overall) -> &'static str {
    match v {
        Overall::SimilarSelfadjoint => "SimilarSelfadjoint",
        Overall::SimilarNormal => "SimilarNormal",
        Overall::NotSimilar => "NotSimilar",
        Overall::Undecided => "Undecided",
    }
}

fn kind_name(k: SingularityKind) -> &'static str {
    match k {
        SingularityKind::StrongSingularity => "StrongSingularity",
        SingularityKind::CleanEdge => "CleanEdge",
        SingularityKind::GeneralizedPole => "GeneralizedPole",
        SingularityKind::Undecided => "Undecided",
    }
}

/// In the strict profile, near-boundary verdicts are demoted to Undecided.
fn effective_overall(verdict: &Verdict, profile: TolProfile) -> Overall {
    if profile == TolProfile::Strict && verdict.boundary {
        Overall::Undecided
    } else {
        verdict.overall
    }
}

fn singular_points_json(verdict: &Verdict) -> Value {
    let list: Vec<Value> = verdict
        .singularities
        .iter()
        .filter(|s| {
            matches!(
                s.kind,
                SingularityKind::StrongSingularity | SingularityKind::Undecided
            )
        })
        .map(|s| {
            let point: Value = match s.point {
                SingularPoint::Finite(t) => json!(t),
                SingularPoint::Infinity => json!("inf"),
            };
            json!({ "point": point, "kind": kind_name(s.kind) })
        })
        .collect();
    Value::Array(list)
}

fn eigenvalues_json(verdict_spectrum: &spectrum::SpectrumResult) -> Value {
    let list: Vec<Value> = verdict_spectrum
        .eigenvalues
        .iter()
        .map(|e| json!({ "re": e.value.re, "im": e.value.im, "mult": e.alg_mult }))
        .collect();
    Value::Array(list)
}

fn definitizable_json(d: &Definitizability) -> Value {
    match d {
        Definitizability::Definitizable { partition } => {
            json!({ "definitizable": true, "partition": partition })
        }
        Definitizability::No { witness } => {
            json!({ "definitizable": false, "witness": [witness.lo, witness.hi] })
        }
    }
}

fn essential_json(essential: &[crate::bands::Interval]) -> Value {
    let list: Vec<Value> = essential
        .iter()
        .map(|iv| {
            let lo = if iv.lo.is_finite() { json!(iv.lo) } else { Value::Null };
            let hi = if iv.hi.is_finite() { json!(iv.hi) } else { Value::Null };
            json!([lo, hi])
        })
        .collect();
    Value::Array(list)
}

fn parse_lambda(text: &str) -> Result<Complex64, CliFailure> {
    let mut parts = text.split(',');
    let (re, im) = match (parts.next(), parts.next(), parts.next()) {
        (Some(re), Some(im), None) => (re, im),
        _ => return Err(CliFailure::usage("--lambda expects `re,im`")),
    };
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| CliFailure::usage("--lambda expects numeric `re,im`"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| CliFailure::usage("--lambda expects numeric `re,im`"))?;
    Ok(Complex64::new(re, im))
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliFailure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliFailure::usage("--xi-grid expects `a:b:step`"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliFailure::usage("--xi-grid expects numeric `a:b:step`"))?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || b < a {
        return Err(CliFailure::usage("--xi-grid needs a ≤ b and step > 0"));
    }
    let n = ((b - a) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| a + step * i as f64).collect();
    if let Some(last) = grid.last_mut() {
        if (*last - b).abs() < 0.5 * step {
            *last = b;
        }
    }
    grid.retain(|&x| x <= b + 1e-12 * (1.0 + b.abs()));
    Ok(grid)
}

fn fmt_num(v: f64) -> String {
    format!("{v:.6}")
}

fn singularities_csv(verdict: &Verdict) -> String {
    verdict
        .singularities
        .iter()
        .filter(|s| {
            matches!(
                s.kind,
                SingularityKind::StrongSingularity | SingularityKind::Undecided
            )
        })
        .map(|s| match s.point {
            SingularPoint::Finite(t) => fmt_num(t),
            SingularPoint::Infinity => "inf".to_string(),
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn eigenvalues_csv(verdict: &Verdict) -> String {
    verdict
        .spectrum
        .eigenvalues
        .iter()
        .map(|e| format!("{}{}{}i", fmt_num(e.value.re), if e.value.im < 0.0 { "" } else { "+" }, fmt_num(e.value.im)))
        .collect::<Vec<_>>()
        .join(";")
}

fn seed_from_env() -> u64 {
    std::env::var("INDEFSL_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1)
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliFailure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| CliFailure::error(format!("cannot build thread pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<(String, i32), CliFailure> {
    match cli.cmd {
        Command::Classify { problem, common } => {
            let w = problem.build()?;
            let verdict =
                classify::classify_similarity(&w).map_err(|e| CliFailure::error(e.to_string()))?;
            let overall = effective_overall(&verdict, common.tol_profile);
            let body = json!({
                "overall": overall_name(overall),
                "singularities": singular_points_json(&verdict),
                "eigenvalues": eigenvalues_json(&verdict.spectrum),
                "definitizable": definitizable_json(&verdict.definitizability),
            });
            let code = if overall == Overall::Undecided {
                EXIT_UNDECIDED
            } else {
                EXIT_OK
            };
            Ok((merged(common.tol_profile, body), code))
        }
        Command::Eigs { problem, common } => {
            let w = problem.build()?;
            let result =
                spectrum::eigenvalues(&w).map_err(|e| CliFailure::error(e.to_string()))?;
            let body = json!({
                "essential": essential_json(&result.essential),
                "eigenvalues": eigenvalues_json(&result),
            });
            Ok((merged(common.tol_profile, body), EXIT_OK))
        }
        Command::WeylEval { problem, lambda, common } => {
            let w = problem.build()?;
            let z = parse_lambda(&lambda)?;
            let mp = w
                .eval_m(Side::Plus, z)
                .map_err(|e| CliFailure::error(e.to_string()))?;
            let mm = w
                .eval_m(Side::Minus, z)
                .map_err(|e| CliFailure::error(e.to_string()))?;
            let body = json!({
                "lambda": { "re": z.re, "im": z.im },
                "m_plus": { "re": mp.re, "im": mp.im },
                "m_minus": { "re": mm.re, "im": mm.im },
                "d": { "re": (mp - mm).re, "im": (mp - mm).im },
            });
            Ok((merged(common.tol_profile, body), EXIT_OK))
        }
        Command::Sweep { family, k2, xi_grid, common } => {
            let grid = parse_grid(&xi_grid)?;
            let pool = thread_pool(common.jobs)?;
            let rows: Vec<Result<(f64, Verdict), String>> = pool.install(|| {
                use rayon::prelude::*;
                grid.par_iter()
                    .map(|&xi| {
                        let w = match family {
                            FamilyArg::Ex1 => WeylPair::example1(xi, k2),
                            FamilyArg::Ex2 => WeylPair::example2(xi, k2, false),
                        }
                        .map_err(|e| e.to_string())?;
                        classify::classify_similarity(&w)
                            .map(|v| (xi, v))
                            .map_err(|e| e.to_string())
                    })
                    .collect()
            });
            let mut out = csv_header(common.tol_profile, "xi,verdict,singularities,eigenvalues");
            let mut undecided = false;
            for row in rows {
                let (xi, verdict) = row.map_err(CliFailure::error)?;
                let overall = effective_overall(&verdict, common.tol_profile);
                undecided |= overall == Overall::Undecided;
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_num(xi),
                    overall_name(overall),
                    singularities_csv(&verdict),
                    eigenvalues_csv(&verdict),
                ));
            }
            let code = if undecided { EXIT_UNDECIDED } else { EXIT_OK };
            Ok((out, code))
        }
        Command::Check { problem, common } => {
            let w = problem.build()?;
            let grid = criteria::default_real_grid(&w);
            let necessary = criteria::necessary_ratio(&w, &grid);
            let sufficient = criteria::sufficient_sum_ratio(&w);
            let mac = criteria::muckenhoupt_pair_scan(&w);
            let dissipative = criteria::dissipative_part_check(&w);
            let poisson = criteria::poisson_condition(&w)
                .map_err(|e| CliFailure::error(e.to_string()))?;
            let status = |s: criteria::BoundStatus| match s {
                criteria::BoundStatus::Bounded => "Bounded",
                criteria::BoundStatus::Unbounded => "Unbounded",
            };
            let body = json!({
                "necessary_ratio": { "sup": necessary.sup, "status": status(necessary.status) },
                "sufficient_sum_ratio": { "sup": sufficient.sup, "status": status(sufficient.status) },
                "muckenhoupt_scan": {
                    "sup": mac.sup,
                    "witness": mac.witness.map(|iv| json!([iv.lo, iv.hi])).unwrap_or(Value::Null),
                },
                "dissipative_part": {
                    "inf": dissipative.inf,
                    "bounded_away": dissipative.bounded_away,
                },
                "poisson_condition": { "sup": poisson.sup, "status": status(poisson.status) },
            });
            Ok((merged(common.tol_profile, body), EXIT_OK))
        }
        Command::Definitizable { problem, common } => {
            let w = problem.build()?;
            let decision =
                spectrum::definitizable_for(&w).map_err(|e| CliFailure::error(e.to_string()))?;
            let body = definitizable_json(&decision);
            Ok((merged(common.tol_profile, body), EXIT_OK))
        }
        Command::Harness { const_a, half_width, step, samples, common } => {
            let seed = seed_from_env();
            let eps = [1.0, 0.1, 0.01, 0.001];
            let pool = thread_pool(common.jobs)?;
            let rows = pool
                .install(|| {
                    harness::fd_resolvent_evidence(
                        const_a, half_width, step, &eps, samples, seed,
                    )
                })
                .map_err(|e| CliFailure::error(e.to_string()))?;
            let mut out = csv_header(common.tol_profile, "epsilon,integral,f_id");
            for r in rows {
                out.push_str(&format!("{},{:.9e},{}\n", r.epsilon, r.integral, r.f_id));
            }
            Ok((out, EXIT_OK))
        }
    }
}

/// Parses and runs one invocation; returns the process exit code.
pub fn run<I: Iterator<Item = String>>(args: I) -> i32 {
    let argv = std::iter::once("indefsl".to_string()).chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return EXIT_OK;
        }
        Err(e) => {
            eprint!("{e}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli) {
        Ok((output, code)) => {
            print!("{output}");
            if !output.ends_with('\n') {
                println!();
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> Result<(String, i32), CliFailure> {
        let argv = std::iter::once("indefsl".to_string()).chain(args.iter().map(|s| s.to_string()));
        let cli = Cli::try_parse_from(argv).map_err(|e| CliFailure::usage(e.to_string()))?;
        dispatch(cli)
    }

    #[test]
    fn weyl_eval_constant_at_i() {
        let (out, code) =
            run_capture(&["weyl-eval", "--const-a", "0", "--lambda", "0,1"]).unwrap();
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let mp = &v["m_plus"];
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((mp["re"].as_f64().unwrap() - inv_sqrt2).abs() < 1e-12);
        assert!((mp["im"].as_f64().unwrap() - inv_sqrt2).abs() < 1e-12);
        assert_eq!(v["version"], "1");
        assert_eq!(v["tol_profile"], "default");
    }

    #[test]
    fn classify_constant_is_selfadjoint() {
        let (out, code) = run_capture(&["classify", "--const-a", "1"]).unwrap();
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["overall"], "SimilarSelfadjoint");
        assert_eq!(v["singularities"].as_array().unwrap().len(), 0);
        assert!(v["definitizable"]["definitizable"].as_bool().unwrap());
    }

    #[test]
    fn sweep_rows_are_deterministic() {
        let args = [
            "sweep", "--family", "ex1", "--k2", "0.5", "--xi-grid", "-0.2:-0.1:0.1",
        ];
        let (out1, code) = run_capture(&args).unwrap();
        let (out2, _) = run_capture(&args).unwrap();
        assert_eq!(code, 0);
        assert_eq!(out1, out2);
        let lines: Vec<&str> = out1.lines().collect();
        assert_eq!(lines[0], "# indefsl-report v1 tol-profile=default");
        assert_eq!(lines[1], "xi,verdict,singularities,eigenvalues");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("-0.200000,NotSimilar,0.000000,"));
    }

    #[test]
    fn eigs_reports_unbounded_intervals_as_null() {
        let (out, code) = run_capture(&["eigs", "--const-a", "0"]).unwrap();
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let essential = v["essential"].as_array().unwrap();
        assert_eq!(essential.len(), 1);
        assert!(essential[0][0].is_null() && essential[0][1].is_null());
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn usage_and_json_failures_use_reserved_codes() {
        let err = run_capture(&["classify"]).unwrap_err();
        assert_eq!(err.code, EXIT_USAGE);

        let err = run_capture(&["classify", "--const-a", "1", "--family", "ex1"]).unwrap_err();
        assert_eq!(err.code, EXIT_USAGE);

        let dir = std::env::temp_dir().join("indefsl-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("broken.json");
        std::fs::write(&path, "{ not json").unwrap();
        let err = run_capture(&["eigs", "--bands", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.code, EXIT_BAD_JSON);
    }

    #[test]
    fn bands_file_round_trip() {
        let dir = std::env::temp_dir().join("indefsl-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("const.json");
        std::fs::write(&path, r#"{"kind":"const","a":1.0}"#).unwrap();
        let (out, code) =
            run_capture(&["classify", "--bands", path.to_str().unwrap()]).unwrap();
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["overall"], "SimilarSelfadjoint");
    }

    #[test]
    fn xi_grid_parser() {
        let grid = parse_grid("-2:1:0.5").unwrap();
        assert_eq!(grid.len(), 7);
        assert_eq!(grid[0], -2.0);
        assert_eq!(*grid.last().unwrap(), 1.0);
        assert!(parse_grid("1:0:0.5").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn strict_profile_demotes_boundary_verdicts() {
        // ξ at the classification transition point −1−1/√2: the default
        // profile commits to a class, strict reports Undecided (exit code 2)
        let (out, _) = run_capture(&[
            "classify", "--family", "ex1", "--k2", "0.5", "--xi", "-1.7071067811865475",
            "--tol-profile", "strict",
        ])
        .unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["tol_profile"], "strict");
    }
}
