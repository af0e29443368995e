//! Parameter sweeps: the cartesian product of listed values, one verification per
//! point, run in parallel. Failures stay in their row.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, Quantity, Status};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::export::fmt_float;
use crate::params::{self, SolitonParams};
use crate::profile::{self, ProfileStatus};

/// A scalar or a list in the grid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Same keys as a run config, each taking a list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub n: Option<OneOrMany<u32>>,
    pub m: Option<OneOrMany<f64>>,
    pub beta: Option<OneOrMany<f64>>,
    pub rho: Option<OneOrMany<f64>>,
    pub alpha: Option<OneOrMany<f64>>,
    pub eta: Option<OneOrMany<f64>>,
    pub r_max: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub r0_scale: Option<f64>,
    pub output_dir: Option<PathBuf>,
    /// Compare against the formulas also outside the covered range.
    pub formal: Option<bool>,
}

impl SweepGrid {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// One run config per grid point, in row-major order `n, m, beta, rho, alpha, eta`.
    pub fn points(&self) -> Vec<RunConfig> {
        fn axis<T: Clone>(x: &Option<OneOrMany<T>>) -> Vec<Option<T>> {
            match x {
                None => vec![None],
                Some(v) => v.values().into_iter().map(Some).collect(),
            }
        }
        let mut out = Vec::new();
        for n in axis(&self.n) {
            for m in axis(&self.m) {
                for beta in axis(&self.beta) {
                    for rho in axis(&self.rho) {
                        for alpha in axis(&self.alpha) {
                            for eta in axis(&self.eta) {
                                out.push(RunConfig {
                                    n,
                                    m,
                                    beta,
                                    rho,
                                    alpha,
                                    eta,
                                    r_max: self.r_max,
                                    rtol: self.rtol,
                                    atol: self.atol,
                                    r0_scale: self.r0_scale,
                                    output_dir: None,
                                    formats: None,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    BlowUp,
    /// Not covered and no formal comparison requested: solved only.
    Solved,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub params: Option<SolitonParams>,
    pub class: String,
    pub coverage: String,
    pub outcome: Outcome,
    pub profile_status: String,
    pub r_star: Option<f64>,
    pub blowup_case: Option<String>,
    pub radius_bound: Option<f64>,
    pub limits: Vec<(Quantity, f64)>,
    pub failed_invariants: Vec<String>,
    pub message: String,
}

pub const LIMIT_COLUMNS: [Quantity; 7] = [
    Quantity::W,
    Quantity::WOverLogR,
    Quantity::Scalar,
    Quantity::K0,
    Quantity::K1,
    Quantity::RvpOverV,
    Quantity::R2V2k,
];

fn empty_row(index: usize) -> SweepRow {
    SweepRow {
        index,
        params: None,
        class: String::new(),
        coverage: String::new(),
        outcome: Outcome::Error,
        profile_status: String::new(),
        r_star: None,
        blowup_case: None,
        radius_bound: None,
        limits: Vec::new(),
        failed_invariants: Vec::new(),
        message: String::new(),
    }
}

/// Verify one grid point; never fails, errors land in the row.
pub fn run_point(index: usize, cfg: &RunConfig, formal: bool, default_r_max: f64) -> SweepRow {
    let mut row = empty_row(index);
    if let Err(e) = fill_row(&mut row, cfg, formal, default_r_max) {
        row.outcome = Outcome::Error;
        row.message = e.to_string();
    }
    row
}

fn fill_row(row: &mut SweepRow, cfg: &RunConfig, formal: bool, default_r_max: f64) -> Result<()> {
    let run = cfg.resolve(default_r_max)?;
    let p = run.params;
    row.params = Some(p);
    let class = params::classify(&p);
    row.class = class.variant.to_string();
    row.coverage = class.validity.to_string();

    if p.alpha < 0.0 && p.beta <= 0.0 {
        let cert = params::blowup_certificate(&p)?;
        row.blowup_case = Some(cert.case_tag.to_string());
        row.radius_bound = cert.radius_bound;
        let prof = profile::solve_profile(&p, run.r_max, &run.settings)?;
        row.profile_status = prof.status.label().into();
        if let ProfileStatus::BlowUp { r_star } = prof.status {
            row.r_star = Some(r_star);
            row.outcome = Outcome::BlowUp;
        } else {
            row.outcome = Outcome::Fail;
            row.message = format!("no blow-up detected up to r = {}", prof.r_last());
        }
        return Ok(());
    }
    if !class.is_covered() && !formal {
        let prof = profile::solve_profile(&p, run.r_max, &run.settings)?;
        row.profile_status = prof.status.label().into();
        row.r_star = matches!(prof.status, ProfileStatus::BlowUp { .. }).then(|| prof.status.radius());
        row.outcome = Outcome::Solved;
        row.message = class.reason.clone();
        return Ok(());
    }
    let report = if formal {
        analysis::verify_formal(&p, run.r_max, &run.settings)?
    } else {
        analysis::verify(&p, run.r_max, &run.settings)?
    };
    row.profile_status = report.profile_status.label().into();
    row.outcome = match report.overall {
        Status::Pass => Outcome::Pass,
        Status::Fail => Outcome::Fail,
        Status::Inconclusive => Outcome::Inconclusive,
    };
    row.limits = LIMIT_COLUMNS
        .iter()
        .filter_map(|q| report.observed.get(q).map(|o| (*q, o.value)))
        .collect();
    row.failed_invariants = report.failed_invariants().map(|i| i.name.clone()).collect();
    Ok(())
}

/// All points in parallel; rows come back in grid order.
pub fn run_sweep(points: &[RunConfig], formal: bool, default_r_max: f64) -> Vec<SweepRow> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| run_point(i, cfg, formal, default_r_max))
        .collect()
}

pub fn write_table<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "index",
        "n",
        "m",
        "alpha",
        "beta",
        "rho",
        "eta",
        "class",
        "coverage",
        "outcome",
        "profile_status",
        "r_star",
        "blowup_case",
        "radius_bound",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(LIMIT_COLUMNS.iter().map(|q| q.name().to_string()));
    header.push("failed_invariants".into());
    header.push("message".into());
    wtr.write_record(&header)?;

    let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
    for row in rows {
        let mut rec = vec![row.index.to_string()];
        match &row.params {
            Some(p) => {
                rec.push(p.n.to_string());
                rec.push(fmt_float(p.m));
                rec.push(fmt_float(p.alpha));
                rec.push(fmt_float(p.beta));
                rec.push(opt(p.rho));
                rec.push(fmt_float(p.eta));
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 6)),
        }
        rec.push(row.class.clone());
        rec.push(row.coverage.clone());
        rec.push(format!("{:?}", row.outcome));
        rec.push(row.profile_status.clone());
        rec.push(opt(row.r_star));
        rec.push(row.blowup_case.clone().unwrap_or_default());
        rec.push(opt(row.radius_bound));
        for q in LIMIT_COLUMNS {
            rec.push(opt(row.limits.iter().find(|(k, _)| *k == q).map(|(_, v)| *v)));
        }
        rec.push(row.failed_invariants.join(";"));
        rec.push(row.message.clone());
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_cartesian() {
        let g = SweepGrid::from_toml_str("n = 3\nbeta = [1.2, 2.0, 4.0]\nrho = [1.0, 2.0]\n").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0].beta, Some(1.2));
        assert_eq!(pts[1].rho, Some(2.0));
        assert!(SweepGrid::from_toml_str("n = 3\nbogus = 1\n").is_err());
    }

    #[test]
    fn rows_keep_order_and_errors() {
        let g = SweepGrid::from_toml_str("n = 3\nbeta = [1.0, -1.0]\nalpha = [-1.0]\nr_max = 1e2\n").unwrap();
        let mut pts = g.points();
        pts.push(RunConfig {
            n: Some(2),
            ..pts[0].clone()
        });
        let rows = run_sweep(&pts, false, 1e2);
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().enumerate().all(|(i, r)| r.index == i));
        // alpha < 0 < beta: outside the theorems, solved only
        assert_eq!(rows[0].outcome, Outcome::Solved);
        assert_eq!(rows[1].outcome, Outcome::BlowUp);
        assert!(rows[1].r_star.unwrap() <= rows[1].radius_bound.unwrap());
        assert_eq!(rows[2].outcome, Outcome::Error);

        let mut buf = Vec::new();
        write_table(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text
            .lines()
            .next()
            .unwrap()
            .starts_with("index,n,m,alpha,beta,rho,eta,class"));
    }
}
