//! `srconj`: conjugate times, finiteness classification, comparison checks
//! and the acceptance suite from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use sr_conjugate::comparison::{self, CurvatureBoundSpec, ReportVerdict};
use sr_conjugate::curvature::{ConstantField, CurvatureField, FieldSpec};
use sr_conjugate::jacobi::{self, ConjugateTimeResult, Tolerances};
use sr_conjugate::lie3d::{self, ContactStructure3D, CovectorState};
use sr_conjugate::linalg::{self, Mat};
use sr_conjugate::lq::{self, DiagonalRowModel, LQModel};
use sr_conjugate::selftest::{self, SelftestConfig};
use sr_conjugate::YoungDiagram;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VACUOUS: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DEFAULT_HORIZON: f64 = 50.0;

const CSV_HELP: &str = "\
CSV columns:
  lq-tc       t, det_n, sigma_min          (Jacobi grid of the model)
  lie3d-tc    t, h0, h1, h2, r11, r22, det_n (grid along the geodesic)
  lie3d-sweep chi, kappa, h0, theta, energy, verdict, tc, error
              (one row per point; failed points keep verdict = error)

Exit codes: 0 ok, 1 usage, 2 hypothesis violated (vacuous), 3 numerical failure.
A --config file holds `key = value` lines named after the long flags;
flags given on the command line win.";

#[derive(Debug, Parser)]
#[command(name = "srconj", version, about, after_help = CSV_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Relative integration tolerance.
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    /// Absolute integration tolerance.
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    /// Refinement tolerance for conjugate times.
    #[arg(long, global = true)]
    pub reftol: Option<f64>,
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for the randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// `key = value` defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    SectionalLower,
    SectionalUpper,
    RicciLevel,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First conjugate time of an LQ model.
    LqTc {
        /// Row lengths, e.g. `2,1`.
        #[arg(long, conflicts_with_all = ["l", "kappas"], requires = "q")]
        rows: Option<String>,
        /// Curvature matrix, rows separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Single row of this length with `Q = diag(kappas)`.
        #[arg(long, requires = "kappas")]
        l: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        kappas: Option<String>,
    },
    /// Finiteness of `t_c(κ₁, …, κ_ℓ)` from the polynomial condition.
    LqClassify {
        #[arg(long)]
        l: usize,
        #[arg(long, allow_hyphen_values = true)]
        kappas: String,
    },
    /// Conjugate time of a geodesic on a 3D contact structure.
    Lie3dTc {
        #[arg(long, default_value_t = 0.0)]
        chi: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        h0: f64,
        /// Angle of `(h1, h2)` on the unit circle.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        /// Prescribe the constant of motion instead of `theta` (`chi > 0`).
        #[arg(long = "E", conflicts_with = "theta")]
        energy: Option<f64>,
        /// Integrate even when `chi = 0` has a closed form.
        #[arg(long)]
        numeric: bool,
    },
    /// Conjugate times over a grid of `chi`, `kappa`, `h0` (lists or `a:b:n`).
    Lie3dSweep {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        chi: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        kappa: String,
        #[arg(long, allow_hyphen_values = true)]
        h0: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        /// Worker threads (default: one per core).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Checks a comparison bound for a constant or sampled curvature.
    CompareVerify {
        #[arg(long)]
        rows: String,
        #[arg(long, value_enum)]
        bound: BoundKind,
        /// Bound matrix for the sectional kinds.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Level index for `ricci-level`.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        kappas: Option<String>,
        /// Constant curvature along the geodesic.
        #[arg(long, conflicts_with = "field", allow_hyphen_values = true)]
        r: Option<String>,
        /// Curvature field as JSON (constant or sampled).
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Runs the acceptance criteria.
    Selftest {
        /// Run only this criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<sr_conjugate::Error> for Failure {
    fn from(e: sr_conjugate::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `argv`, runs the command and returns the exit code. Output goes to
/// `out` unless `--output` names a file; diagnostics go to `err`.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            return f.code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(artifact) => match emit(&cli.common, &artifact, out) {
            Ok(()) => artifact.code,
            Err(f) => {
                let _ = writeln!(err, "error: {}", f.message());
                f.code()
            }
        },
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

/// What a command produced: a JSON document or a CSV table, plus the exit
/// code to report after writing it.
struct Artifact {
    body: String,
    code: i32,
}

impl Artifact {
    fn json<T: Serialize>(v: &T) -> Outcome<Self> {
        let mut body = serde_json::to_string_pretty(v).map_err(|e| Failure::Numerical(e.to_string()))?;
        body.push('\n');
        Ok(Self { body, code: EXIT_OK })
    }

    fn csv<T: Serialize>(rows: &[T]) -> Outcome<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| Failure::Numerical(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Numerical(e.to_string()))?;
        Ok(Self {
            body: String::from_utf8(bytes).expect("csv writes utf-8"),
            code: EXIT_OK,
        })
    }

    fn with_code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

fn emit(common: &Common, a: &Artifact, out: &mut dyn Write) -> Outcome<()> {
    match &common.output {
        Some(p) => fs::write(p, &a.body).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(a.body.as_bytes()).map_err(|e| usage(e.to_string())),
    }
}

/// Appends `--key value` for every config entry whose flag is absent.
fn merge_config(argv: &[String]) -> Outcome<Vec<String>> {
    let Some(path) = find_flag(argv, "config") else {
        return Ok(argv.to_vec());
    };
    let text = fs::read_to_string(&path).map_err(|e| usage(format!("cannot read config {path}: {e}")))?;
    let mut merged = argv.to_vec();
    for (key, value) in parse_config(&text)? {
        if key == "config" || find_flag(argv, &key).is_some() || argv.iter().any(|a| a == &format!("--{key}")) {
            continue;
        }
        match value.as_str() {
            "true" => merged.push(format!("--{key}")),
            "false" => {}
            _ => merged.push(format!("--{key}={value}")),
        }
    }
    Ok(merged)
}

fn find_flag(argv: &[String], key: &str) -> Option<String> {
    let long = format!("--{key}");
    let prefix = format!("--{key}=");
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == &long {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix(&prefix) {
            return Some(v.to_string());
        }
    }
    None
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Outcome<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`", i + 1)))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_list(s: &str) -> Outcome<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("not a number: `{t}`")))
        })
        .collect()
}

/// A list `a,b,c` or an inclusive range `start:stop:count`.
pub fn parse_grid(s: &str) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s),
        [a, b, n] => {
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("not a number: `{t}`")))
            };
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| usage(format!("bad count in `{s}`")))?;
            match n {
                0 => Err(usage(format!("empty range `{s}`"))),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        _ => Err(usage(format!("expected a list or start:stop:count, got `{s}`"))),
    }
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_matrix(s: &str) -> Outcome<Mat> {
    let rows = s.split(';').map(parse_list).collect::<Outcome<Vec<_>>>()?;
    Ok(linalg::from_rows(&rows)?)
}

fn tolerances(c: &Common) -> Outcome<Tolerances> {
    let d = Tolerances::default();
    let t = Tolerances {
        rel: c.rtol.unwrap_or(d.rel),
        abs: c.atol.unwrap_or(d.abs),
        refine: c.reftol.unwrap_or(d.refine),
        ..d
    };
    t.validate()?;
    Ok(t)
}

fn horizon(c: &Common) -> Outcome<f64> {
    let h = c.horizon.unwrap_or(DEFAULT_HORIZON);
    if !(h > 0.0 && h.is_finite()) {
        return Err(usage(format!("horizon must be positive, got {h}")));
    }
    Ok(h)
}

fn execute(cli: &Cli) -> Outcome<Artifact> {
    let c = &cli.common;
    match &cli.command {
        Command::LqTc { rows, q, l, kappas } => lq_tc(c, rows.as_deref(), q.as_deref(), *l, kappas.as_deref()),
        Command::LqClassify { l, kappas } => lq_classify(*l, kappas),
        Command::Lie3dTc {
            chi,
            kappa,
            h0,
            theta,
            energy,
            numeric,
        } => lie3d_tc(c, *chi, *kappa, *h0, *theta, *energy, *numeric),
        Command::Lie3dSweep {
            chi,
            kappa,
            h0,
            theta,
            threads,
        } => lie3d_sweep(c, chi, kappa, h0, *theta, *threads),
        Command::CompareVerify {
            rows,
            bound,
            q,
            level,
            kappas,
            r,
            field,
        } => compare_verify(
            c,
            rows,
            *bound,
            q.as_deref(),
            *level,
            kappas.as_deref(),
            r.as_deref(),
            field.as_deref(),
        ),
        Command::Selftest { criterion } => run_selftest(c, *criterion),
    }
}

fn diagonal_row(l: usize, kappas: &str) -> Outcome<DiagonalRowModel> {
    let k = parse_list(kappas)?;
    if k.len() != l {
        return Err(usage(format!("--l {l} needs {l} kappas, got {}", k.len())));
    }
    Ok(DiagonalRowModel::new(k)?)
}

#[derive(Serialize)]
struct LqTcReport {
    rows: Vec<usize>,
    q: Vec<Vec<f64>>,
    closed_form: Option<f64>,
    #[serde(flatten)]
    result: ConjugateTimeResult,
}

#[derive(Serialize)]
struct DetRow {
    t: f64,
    det_n: f64,
    sigma_min: f64,
}

fn lq_tc(c: &Common, rows: Option<&str>, q: Option<&str>, l: Option<usize>, kappas: Option<&str>) -> Outcome<Artifact> {
    let model = match (rows, q, l, kappas) {
        (Some(r), Some(q), None, None) => {
            let d: YoungDiagram = r.parse()?;
            LQModel::new(d, parse_matrix(q)?)?
        }
        (None, None, Some(l), Some(k)) => diagonal_row(l, k)?.to_model(),
        _ => return Err(usage("give either --rows with --q, or --l with --kappas")),
    };
    let tol = tolerances(c)?;
    let h = horizon(c)?;
    if c.format == Some(Format::Csv) {
        let traj = jacobi::integrate_jacobi(&model.structural(), model.field(), h, &tol)?;
        let rows: Vec<DetRow> = (0..traj.times.len())
            .map(|i| DetRow {
                t: traj.times[i],
                det_n: traj.det_n[i],
                sigma_min: traj.sigma_min[i],
            })
            .collect();
        return Artifact::csv(&rows);
    }
    let result = lq::lq_conjugate_time(&model, h, &tol)?;
    Artifact::json(&LqTcReport {
        rows: model.diagram().row_lengths().to_vec(),
        q: linalg::to_rows(model.q()),
        closed_form: lq::closed_form_tc(&model),
        result,
    })
}

#[derive(Serialize)]
struct ClassifyReport {
    kappas: Vec<f64>,
    polynomial: Vec<f64>,
    #[serde(flatten)]
    finiteness: lq::Finiteness,
}

fn lq_classify(l: usize, kappas: &str) -> Outcome<Artifact> {
    let row = diagonal_row(l, kappas)?;
    Artifact::json(&ClassifyReport {
        kappas: parse_list(kappas)?,
        polynomial: row.finiteness_polynomial().coeffs().to_vec(),
        finiteness: lq::classify_finiteness(&row),
    })
}

fn initial_covector(s: &ContactStructure3D, h0: f64, theta: f64, energy: Option<f64>) -> Outcome<CovectorState> {
    match energy {
        Some(e) => Ok(CovectorState::from_energy(s.chi, e, h0, true, true)?),
        None => Ok(CovectorState::new(theta.cos(), theta.sin(), h0)),
    }
}

#[derive(Serialize)]
struct Lie3dReport {
    chi: f64,
    kappa: f64,
    h0: f64,
    h1: f64,
    h2: f64,
    energy: Option<f64>,
    #[serde(flatten)]
    result: ConjugateTimeResult,
}

fn lie3d_tc(
    c: &Common,
    chi: f64,
    kappa: f64,
    h0: f64,
    theta: f64,
    energy: Option<f64>,
    numeric: bool,
) -> Outcome<Artifact> {
    let s = ContactStructure3D::new(chi, kappa)?;
    let h = initial_covector(&s, h0, theta, energy)?;
    let tol = tolerances(c)?;
    let hz = horizon(c)?;
    if c.format == Some(Format::Csv) {
        return Artifact::csv(&lie3d::trajectory_table(&s, &h, hz, &tol)?);
    }
    let result = if chi == 0.0 && !numeric {
        lie3d::chi0_conjugate_time(kappa, h.h0)
    } else {
        lie3d::conjugate_time_3d(&s, &h, hz, &tol)?
    };
    Artifact::json(&Lie3dReport {
        chi,
        kappa,
        h0: h.h0,
        h1: h.h1,
        h2: h.h2,
        energy: h.energy(chi),
        result,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub chi: f64,
    pub kappa: f64,
    pub h0: f64,
    pub theta: f64,
    pub energy: Option<f64>,
    pub verdict: String,
    pub tc: Option<f64>,
    pub error: String,
}

fn sweep_point(chi: f64, kappa: f64, h0: f64, theta: f64, horizon: f64, tol: &Tolerances) -> SweepRow {
    let h = CovectorState::new(theta.cos(), theta.sin(), h0);
    let mut row = SweepRow {
        chi,
        kappa,
        h0,
        theta,
        energy: h.energy(chi),
        verdict: String::new(),
        tc: None,
        error: String::new(),
    };
    let result = ContactStructure3D::new(chi, kappa).and_then(|s| {
        if chi == 0.0 {
            Ok(lie3d::chi0_conjugate_time(kappa, h0))
        } else {
            lie3d::conjugate_time_3d(&s, &h, horizon, tol)
        }
    });
    match result {
        Ok(r) => {
            row.verdict = verdict_name(&r).to_string();
            row.tc = r.time();
        }
        Err(e) => {
            row.verdict = "error".into();
            row.error = e.to_string();
        }
    }
    row
}

fn verdict_name(r: &ConjugateTimeResult) -> &'static str {
    match r {
        ConjugateTimeResult::Finite { .. } => "finite",
        ConjugateTimeResult::NoneUpToHorizon { .. } => "none-up-to-horizon",
        ConjugateTimeResult::CertifiedInfinite { .. } => "certified-infinite",
    }
}

fn lie3d_sweep(c: &Common, chi: &str, kappa: &str, h0: &str, theta: f64, threads: Option<usize>) -> Outcome<Artifact> {
    let (chis, kappas, h0s) = (parse_grid(chi)?, parse_grid(kappa)?, parse_grid(h0)?);
    let tol = tolerances(c)?;
    let hz = horizon(c)?;
    let mut points = Vec::with_capacity(chis.len() * kappas.len() * h0s.len());
    for &x in &chis {
        for &k in &kappas {
            for &h in &h0s {
                points.push((x, k, h));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| usage(e.to_string()))?;
    // collect keeps parameter order whatever the completion order
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|&(x, k, h)| sweep_point(x, k, h, theta, hz, &tol))
            .collect()
    });
    match c.format {
        Some(Format::Json) => Artifact::json(&rows),
        _ => Artifact::csv(&rows),
    }
}

#[allow(clippy::too_many_arguments)]
fn compare_verify(
    c: &Common,
    rows: &str,
    bound: BoundKind,
    q: Option<&str>,
    level: Option<usize>,
    kappas: Option<&str>,
    r: Option<&str>,
    field: Option<&Path>,
) -> Outcome<Artifact> {
    let diagram: YoungDiagram = rows.parse()?;
    let spec = match bound {
        BoundKind::SectionalLower | BoundKind::SectionalUpper => {
            let q = parse_matrix(q.ok_or_else(|| usage("sectional bounds need --q"))?)?;
            if bound == BoundKind::SectionalLower {
                CurvatureBoundSpec::SectionalLower {
                    diagram: diagram.clone(),
                    q,
                }
            } else {
                CurvatureBoundSpec::SectionalUpper {
                    diagram: diagram.clone(),
                    q,
                }
            }
        }
        BoundKind::RicciLevel => CurvatureBoundSpec::RicciLevel {
            diagram: diagram.clone(),
            level: level.ok_or_else(|| usage("ricci-level needs --level"))?,
            kappas: parse_list(kappas.ok_or_else(|| usage("ricci-level needs --kappas"))?)?,
        },
    };
    let curvature: Arc<dyn CurvatureField> = match (r, field) {
        (Some(r), None) => Arc::new(ConstantField::new(parse_matrix(r)?)?),
        (None, Some(p)) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            FieldSpec::from_json(&text)?.build()?
        }
        _ => return Err(usage("give the curvature with --r or --field")),
    };
    let tol = tolerances(c)?;
    let report = comparison::verify_comparison(&diagram.structural_matrices(), curvature, &spec, horizon(c)?, &tol)?;
    let code = match report.verdict {
        ReportVerdict::Pass | ReportVerdict::Inconclusive => EXIT_OK,
        ReportVerdict::Vacuous => EXIT_VACUOUS,
        ReportVerdict::Fail => EXIT_NUMERICAL,
    };
    Ok(Artifact::json(&report)?.with_code(code))
}

fn run_selftest(c: &Common, criterion: Option<u8>) -> Outcome<Artifact> {
    let cfg = SelftestConfig {
        seed: c.seed.unwrap_or(selftest::DEFAULT_SEED),
        tolerances: tolerances(c)?,
    };
    let outcomes = match criterion {
        Some(id) => vec![selftest::run_criterion(id, &cfg).ok_or_else(|| usage(format!("no criterion {id}")))?],
        None => selftest::run_all(&cfg),
    };
    let code = if outcomes.iter().all(|o| o.passed) {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    };
    Ok(Artifact::json(&outcomes)?.with_code(code))
}
