//! Run configuration: a flat TOML table whose keys match the CLI flags.
//!
//! ```toml
//! n = 3
//! beta = 1.0
//! rho = 1.0
//! eta = 1.0
//! r_max = 1e4
//! formats = ["csv", "json"]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{soliton_exponent, SolitonParams};
use crate::profile::SolverSettings;

const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every field optional so that files and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<u32>,
    pub m: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub r_max: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub r0_scale: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

/// A checked configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub params: SolitonParams,
    pub r_max: f64,
    pub settings: SolverSettings,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Resolved {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            n: self.n.or(base.n),
            m: self.m.or(base.m),
            beta: self.beta.or(base.beta),
            rho: self.rho.or(base.rho),
            alpha: self.alpha.or(base.alpha),
            eta: self.eta.or(base.eta),
            r_max: self.r_max.or(base.r_max),
            rtol: self.rtol.or(base.rtol),
            atol: self.atol.or(base.atol),
            r0_scale: self.r0_scale.or(base.r0_scale),
            output_dir: self.output_dir.or(base.output_dir),
            formats: self.formats.or(base.formats),
        }
    }

    /// Parameters only. With the soliton exponent (the default for `m`) exactly one
    /// of `rho`, `alpha` is needed, and both are accepted when consistent; any
    /// other `m` takes `alpha` and no `rho`.
    pub fn params(&self) -> Result<SolitonParams> {
        let n = self.n.ok_or_else(|| Error::Config("missing key 'n'".into()))?;
        let beta = self.beta.ok_or_else(|| Error::Config("missing key 'beta'".into()))?;
        let eta = self.eta.unwrap_or(1.0);
        if n < 3 {
            return Err(Error::Config(format!("n = {n} must be at least 3")));
        }
        let ms = soliton_exponent(n);
        let m = self.m.unwrap_or(ms);
        let soliton_m = (m - ms).abs() <= CONSISTENCY_TOL * ms;
        let params = match (soliton_m, self.rho, self.alpha) {
            (true, Some(rho), None) => SolitonParams::soliton(n, beta, rho, eta),
            (true, None, Some(alpha)) => SolitonParams::soliton_from_alpha(n, alpha, beta, eta),
            (true, Some(rho), Some(alpha)) => {
                let p = SolitonParams::soliton(n, beta, rho, eta);
                if (p.alpha - alpha).abs() > CONSISTENCY_TOL * alpha.abs().max(1.0) {
                    return Err(Error::Config(format!(
                        "alpha = {alpha} and rho = {rho} disagree: rho gives alpha = {}",
                        p.alpha
                    )));
                }
                p
            }
            (true, None, None) => return Err(Error::Config("one of 'rho' or 'alpha' is required".into())),
            (false, Some(_), _) => {
                return Err(Error::Config(format!(
                    "'rho' needs the soliton exponent m = {ms}, got m = {m}"
                )))
            }
            (false, None, Some(alpha)) => SolitonParams::general(n, m, alpha, beta, eta),
            (false, None, None) => return Err(Error::Config("'alpha' is required when m is not (n-2)/(n+2)".into())),
        };
        params.validated()
    }

    pub fn settings(&self) -> Result<SolverSettings> {
        let d = SolverSettings::default();
        let rtol = self.rtol.unwrap_or(d.rtol);
        let atol = self.atol.unwrap_or(d.atol);
        let r0_scale = self.r0_scale.unwrap_or(d.r0_scale);
        if !(rtol > 0.0 && atol > 0.0 && r0_scale > 0.0) {
            return Err(Error::Config(format!(
                "rtol, atol, r0_scale must be positive (got {rtol}, {atol}, {r0_scale})"
            )));
        }
        let s = SolverSettings {
            r0_scale,
            ..SolverSettings::with_tolerances(rtol, atol)
        };
        s.check()?;
        Ok(s)
    }

    pub fn resolve(&self, default_r_max: f64) -> Result<Resolved> {
        let r_max = self.r_max.unwrap_or(default_r_max);
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::Config(format!("r_max = {r_max} must be positive")));
        }
        Ok(Resolved {
            params: self.params()?,
            r_max,
            settings: self.settings()?,
            output_dir: self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
            formats: self.formats.clone().unwrap_or_else(|| vec![Format::Csv, Format::Json]),
        })
    }
}
