//! Command-line front end. Exit status: 0 on success or Pass, 1 on Fail (or an
//! unsettled verdict, or a numerical failure), 2 on usage and input errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{self, Status, DIRECT_LIMIT};
use crate::config::{Format, Resolved, RunConfig};
use crate::error::{Error, Result};
use crate::export::{self, fmt_float, ProfileMeta};
use crate::geometry::{self, Lattice, SelfSimilarKind, SelfSimilarSpec};
use crate::params::{self, BlowupCertificate};
use crate::profile::{self, ProfileStatus};
use crate::sweep::{self, OneOrMany, Outcome, SweepGrid};

pub const OUT_DIR_ENV: &str = "YAMABE_OUT_DIR";

/// Slack on the certified blow-up radius.
const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "yamabe",
    version,
    about = "Radial Yamabe soliton profiles, curvature and asymptotics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the radial profile and export it.
    #[command(allow_negative_numbers = true)]
    Solve(ParamArgs),
    /// Scalar and sectional curvature along the profile.
    #[command(allow_negative_numbers = true)]
    Geometry(ParamArgs),
    /// Compare asymptotic limits and invariants with the closed-form predictions.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Certified blow-up radius for alpha < 0, beta <= 0 against the detected one.
    #[command(allow_negative_numbers = true)]
    CertifyBlowup(ParamArgs),
    /// Evaluate a self-similar fast-diffusion solution and its PDE residual.
    #[command(allow_negative_numbers = true)]
    Selfsim(SelfsimArgs),
    /// Verify every point of a parameter grid in parallel.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Defaults to (n-2)/(n+2).
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long = "r0-scale")]
    pub r0_scale: Option<f64>,
    /// Output directory (also YAMABE_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also run outside the covered parameter range.
    #[arg(long)]
    pub formal: bool,
    /// Print the full JSON report instead of the summary line.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SelfsimArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub kind: SelfSimilarKind,
    /// Extinction time (backward only).
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Radii at which to evaluate.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub x: Vec<f64>,
    /// Relative finite-difference step for the residual.
    #[arg(long, default_value_t = 4e-3)]
    pub h: f64,
    /// Residual study on the standard lattice with step halving.
    #[arg(long)]
    pub study: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Grid TOML: run-config keys, each a value or a list.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub rho: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<f64>,
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long = "r0-scale")]
    pub r0_scale: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
    #[arg(long)]
    pub formal: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn env_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|s| !s.is_empty())
        .map(PathBuf::from)
}

impl ParamArgs {
    /// Flags over the environment's output directory over the config file.
    pub fn to_config(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            n: self.n,
            m: self.m,
            beta: self.beta,
            rho: self.rho,
            alpha: self.alpha,
            eta: self.eta,
            r_max: self.r_max,
            rtol: self.rtol,
            atol: self.atol,
            r0_scale: self.r0_scale,
            output_dir: self.out.clone().or_else(env_out_dir),
            formats: (!self.format.is_empty()).then(|| self.format.clone()),
        };
        Ok(flags.over(file))
    }

    pub fn resolve(&self, default_r_max: f64) -> Result<Resolved> {
        self.to_config()?.resolve(default_r_max)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_)
        | Error::OutsideTheorems(_)
        | Error::NotBlowupRegime { .. }
        | Error::NotSoliton(_)
        | Error::InvalidArgument(_)
        | Error::Config(_) => 2,
        _ => 1,
    }
}

/// Parse `args` and run; output and diagnostics go to the given writers.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> std::process::ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::ExitCode::from(code as u8)
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve(a) => solve(a, out),
        Command::Geometry(a) => geometry_cmd(a, out),
        Command::Verify(a) => verify(a, out),
        Command::CertifyBlowup(a) => certify(a, out),
        Command::Selfsim(a) => selfsim(a, out),
        Command::Sweep(a) => sweep_cmd(a, out),
    }
}

fn say(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(line)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_outputs<T: Serialize>(run: &Resolved, stem: &str, json: &T) -> Result<Option<PathBuf>> {
    if !run.wants(Format::Json) {
        return Ok(None);
    }
    let path = run.output_dir.join(format!("{stem}.json"));
    export::write_json(json, &path)?;
    Ok(Some(path))
}

fn shown(paths: &[Option<PathBuf>]) -> String {
    let v: Vec<String> = paths.iter().flatten().map(|p| p.display().to_string()).collect();
    if v.is_empty() {
        String::new()
    } else {
        format!(" -> {}", v.join(", "))
    }
}

fn solve(a: &ParamArgs, out: &mut dyn Write) -> Result<i32> {
    let run = a.resolve(1e3)?;
    let prof = profile::solve_profile(&run.params, run.r_max, &run.settings)?;
    let mut written = Vec::new();
    if run.wants(Format::Csv) {
        let path = run.output_dir.join("profile.csv");
        export::write_profile_csv(&prof, &path)?;
        written.push(Some(path));
    }
    written.push(write_outputs(&run, "profile", &ProfileMeta::of(&prof))?);
    say(
        out,
        format_args!(
            "solve: {} r_last={} points={}{}",
            status_text(&prof.status),
            fmt_float(prof.r_last()),
            prof.len(),
            shown(&written)
        ),
    )?;
    Ok(0)
}

fn status_text(s: &ProfileStatus) -> String {
    match s {
        ProfileStatus::Global { .. } => "Global".into(),
        ProfileStatus::BlowUp { r_star } => format!("BlowUp r*={}", fmt_float(*r_star)),
        ProfileStatus::StepFailure { r_fail, reason } => format!("StepFailure r={} ({reason})", fmt_float(*r_fail)),
    }
}

#[derive(Serialize)]
struct GeometrySummary<'a> {
    params: &'a params::SolitonParams,
    source: geometry::CurveSource,
    grid_points: usize,
    #[serde(rename = "R_at_origin")]
    scalar_at_origin: f64,
    #[serde(rename = "K0_at_origin")]
    k0_at_origin: f64,
    #[serde(rename = "K1_at_origin")]
    k1_at_origin: f64,
    k0_crosscheck_defect: f64,
    w_identity_defect: Option<f64>,
}

fn geometry_cmd(a: &ParamArgs, out: &mut dyn Write) -> Result<i32> {
    let run = a.resolve(1e3)?;
    let (prof, curves, _) = if run.r_max > DIRECT_LIMIT {
        analysis::solve_and_stitch(&run.params, run.r_max, &run.settings)?
    } else {
        let prof = profile::solve_profile(&run.params, run.r_max, &run.settings)?;
        let curves = geometry::geometry(&prof)?;
        (prof, curves, None)
    };
    let mut written = Vec::new();
    if run.wants(Format::Csv) {
        let path = run.output_dir.join("geometry.csv");
        export::write_geometry_csv(&curves, &path)?;
        written.push(Some(path));
    }
    let summary = GeometrySummary {
        params: &run.params,
        source: curves.source,
        grid_points: curves.len(),
        scalar_at_origin: curves.scalar_at_origin,
        k0_at_origin: curves.k0_at_origin,
        k1_at_origin: curves.k1_at_origin,
        k0_crosscheck_defect: curves.k0_crosscheck_defect,
        w_identity_defect: geometry::consistency_check_w(&prof).ok(),
    };
    written.push(write_outputs(&run, "geometry", &summary)?);
    say(
        out,
        format_args!(
            "geometry: R(0)={} K0(0)={} K1(0)={} K0 cross-check={} points={}{}",
            fmt_float(curves.scalar_at_origin),
            fmt_float(curves.k0_at_origin),
            fmt_float(curves.k1_at_origin),
            fmt_float(curves.k0_crosscheck_defect),
            curves.len(),
            shown(&written)
        ),
    )?;
    Ok(0)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let run = a.params.resolve(1e4)?;
    let report = if a.formal {
        analysis::verify_formal(&run.params, run.r_max, &run.settings)?
    } else {
        analysis::verify(&run.params, run.r_max, &run.settings).map_err(|e| match e {
            Error::OutsideTheorems(why) => Error::OutsideTheorems(format!("{why}; pass --formal to compare anyway")),
            other => other,
        })?
    };
    let written = write_outputs(&run, "report", &report)?;
    if a.json {
        say(out, format_args!("{}", report.to_json()?))?;
    } else {
        let failed: Vec<&str> = report.failed_invariants().map(|i| i.name.as_str()).collect();
        let off: Vec<String> = report
            .verdicts
            .iter()
            .filter(|(_, v)| v.status != Status::Pass)
            .map(|(q, v)| format!("{q}:{}", v.status))
            .collect();
        say(
            out,
            format_args!(
                "verify: {} ({} {}, {} mode) verdicts-not-passing=[{}] failed-invariants=[{}]{}",
                report.overall,
                report.class.variant,
                report.class.validity,
                if a.formal { "formal" } else { "strict" },
                off.join(","),
                failed.join(","),
                shown(&[written])
            ),
        )?;
    }
    Ok(if report.overall == Status::Pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct CertifyOutput {
    params: params::SolitonParams,
    certificate: BlowupCertificate,
    profile_status: ProfileStatus,
    within_bound: bool,
}

fn certify(a: &ParamArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = a.to_config()?;
    let params = cfg.params()?;
    let cert = params::blowup_certificate(&params)?;
    // past the bound by a margin, or far enough to see an uncertified blow-up
    let default_r_max = cert.radius_bound.map_or(1e3, |b| 10.0 * b);
    let run = cfg.resolve(default_r_max)?;
    let prof = profile::solve_profile(&run.params, run.r_max, &run.settings)?;
    let within_bound = match (prof.status.clone(), cert.radius_bound) {
        (ProfileStatus::BlowUp { r_star }, Some(b)) => r_star <= b + BOUND_SLACK,
        (ProfileStatus::BlowUp { .. }, None) => true,
        _ => false,
    };
    let result = CertifyOutput {
        params: run.params,
        certificate: cert,
        profile_status: prof.status.clone(),
        within_bound,
    };
    let written = write_outputs(&run, "certificate", &result)?;
    let bound = cert.radius_bound.map_or("none".to_string(), fmt_float);
    say(
        out,
        format_args!(
            "certify-blowup: {} bound={} detected={} {}{}",
            cert.case_tag,
            bound,
            status_text(&prof.status),
            if within_bound {
                "within bound"
            } else {
                "NOT within bound"
            },
            shown(&[written])
        ),
    )?;
    Ok(if within_bound { 0 } else { 1 })
}

#[derive(Serialize)]
struct SelfsimOutput {
    spec: SelfSimilarSpec,
    t: f64,
    h: f64,
    x: Vec<f64>,
    u: Vec<f64>,
    pde_residual: Vec<Option<f64>>,
    study: Option<geometry::PdeResidualStudy>,
}

fn selfsim(a: &SelfsimArgs, out: &mut dyn Write) -> Result<i32> {
    let run = a.params.resolve(20.0)?;
    let spec = SelfSimilarSpec::new(a.kind, run.params, a.horizon)?;
    let prof = profile::solve_profile(&run.params, run.r_max, &run.settings)?;
    let mut u = Vec::with_capacity(a.x.len());
    let mut res = Vec::with_capacity(a.x.len());
    for &x in &a.x {
        u.push(geometry::self_similar_eval(&spec, &prof, &[x], a.t)?);
        res.push(if x > 0.0 {
            Some(geometry::pde_residual(&spec, &prof, x, a.t, a.h)?)
        } else {
            None
        });
    }
    let study = if a.study {
        Some(geometry::pde_residual_study(&spec, &prof, &Lattice::standard(&spec))?)
    } else {
        None
    };
    let mut written = Vec::new();
    if run.wants(Format::Csv) {
        let path = run.output_dir.join("selfsim.csv");
        write_selfsim_csv(&path, &a.x, &u, &res)?;
        written.push(Some(path));
    }
    let result = SelfsimOutput {
        spec,
        t: a.t,
        h: a.h,
        x: a.x.clone(),
        u,
        pde_residual: res,
        study,
    };
    written.push(write_outputs(&run, "selfsim", &result)?);
    let worst = result.pde_residual.iter().flatten().fold(0.0f64, |acc, r| acc.max(*r));
    let study_text = match &result.study {
        Some(s) => format!(
            " study: max={} half={} order={}",
            fmt_float(s.max_residual),
            fmt_float(s.max_residual_half),
            s.observed_order.map_or("n/a".into(), fmt_float)
        ),
        None => String::new(),
    };
    say(
        out,
        format_args!(
            "selfsim: {:?} t={} points={} max residual={}{}{}",
            a.kind,
            fmt_float(a.t),
            a.x.len(),
            fmt_float(worst),
            study_text,
            shown(&written)
        ),
    )?;
    Ok(0)
}

fn write_selfsim_csv(path: &Path, x: &[f64], u: &[f64], res: &[Option<f64>]) -> Result<()> {
    let mut buf = Vec::new();
    {
        let mut wtr = csv::Writer::from_writer(&mut buf);
        wtr.write_record(["x", "u", "pde_residual"])?;
        for i in 0..x.len() {
            wtr.write_record([
                fmt_float(x[i]),
                fmt_float(u[i]),
                res[i].map(fmt_float).unwrap_or_default(),
            ])?;
        }
        wtr.flush().map_err(csv::Error::from)?;
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn list<T: Clone>(flags: &[T], file: Option<OneOrMany<T>>) -> Option<OneOrMany<T>> {
    if flags.is_empty() {
        file
    } else {
        Some(OneOrMany::Many(flags.to_vec()))
    }
}

fn sweep_cmd(a: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let file = match &a.config {
        Some(path) => SweepGrid::load(path)?,
        None => SweepGrid::default(),
    };
    let grid = SweepGrid {
        n: list(&a.n, file.n),
        m: list(&a.m, file.m),
        beta: list(&a.beta, file.beta),
        rho: list(&a.rho, file.rho),
        alpha: list(&a.alpha, file.alpha),
        eta: list(&a.eta, file.eta),
        r_max: a.r_max.or(file.r_max),
        rtol: a.rtol.or(file.rtol),
        atol: a.atol.or(file.atol),
        r0_scale: a.r0_scale.or(file.r0_scale),
        output_dir: a.out.clone().or_else(env_out_dir).or(file.output_dir),
        formal: Some(a.formal || file.formal.unwrap_or(false)),
    };
    let points = grid.points();
    if grid.n.is_none() || grid.beta.is_none() {
        return Err(Error::Config("sweep needs at least 'n' and 'beta'".into()));
    }
    let formal = grid.formal.unwrap_or(false);
    let rows = match a.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| sweep::run_sweep(&points, formal, 1e4)),
        None => sweep::run_sweep(&points, formal, 1e4),
    };
    let out_dir = grid.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let formats = if a.format.is_empty() {
        vec![Format::Csv, Format::Json]
    } else {
        a.format.clone()
    };
    let mut written = Vec::new();
    if formats.contains(&Format::Csv) {
        let path = out_dir.join("sweep.csv");
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        sweep::write_table(&rows, std::io::BufWriter::new(file))?;
        written.push(Some(path));
    }
    if formats.contains(&Format::Json) {
        let path = out_dir.join("sweep.json");
        export::write_json(&rows, &path)?;
        written.push(Some(path));
    }
    let count = |o: Outcome| rows.iter().filter(|r| r.outcome == o).count();
    let bad = count(Outcome::Fail) + count(Outcome::Error) + count(Outcome::Inconclusive);
    say(
        out,
        format_args!(
            "sweep: {} points Pass={} Fail={} Inconclusive={} BlowUp={} Solved={} Error={}{}",
            rows.len(),
            count(Outcome::Pass),
            count(Outcome::Fail),
            count(Outcome::Inconclusive),
            count(Outcome::BlowUp),
            count(Outcome::Solved),
            count(Outcome::Error),
            shown(&written)
        ),
    )?;
    Ok(if bad == 0 { 0 } else { 1 })
}
