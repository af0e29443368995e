//! Radial profile solver.
//!
//! State `(v, v')` with
//! `v'' = -(m-1) v'^2 / v - (n-1) v' / r - (alpha v + beta r v') v^{1-m} / (n-1)`,
//! started at a small `r0` from the Taylor expansion about the degenerate origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, Control, MaxStep, Outcome};
use crate::numeric::{self, Jet};
use crate::params::SolitonParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub rtol: f64,
    pub atol: f64,
    /// `r0 = r0_scale * eta^{(m-1)/2}`.
    pub r0_scale: f64,
    /// Steps never exceed `max_step_frac * r`.
    pub max_step_frac: f64,
    /// Blow-up is declared once `v > blowup_cap * eta`.
    pub blowup_cap: f64,
    /// Step underflow threshold relative to `r`.
    pub min_step_rel: f64,
    pub max_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-30,
            r0_scale: 1e-6,
            max_step_frac: 0.01,
            blowup_cap: 1e12,
            min_step_rel: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

impl SolverSettings {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("r0_scale", self.r0_scale),
            ("max_step_frac", self.max_step_frac),
            ("blowup_cap", self.blowup_cap),
            ("min_step_rel", self.min_step_rel),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {value} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ProfileStatus {
    Global { r_max: f64 },
    BlowUp { r_star: f64 },
    StepFailure { r_fail: f64, reason: String },
}

impl ProfileStatus {
    pub fn radius(&self) -> f64 {
        match self {
            ProfileStatus::Global { r_max } => *r_max,
            ProfileStatus::BlowUp { r_star } => *r_star,
            ProfileStatus::StepFailure { r_fail, .. } => *r_fail,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProfileStatus::Global { .. } => "Global",
            ProfileStatus::BlowUp { .. } => "BlowUp",
            ProfileStatus::StepFailure { .. } => "StepFailure",
        }
    }
}

/// Sampled solution on the accepted steps of the integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub params: SolitonParams,
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub status: ProfileStatus,
    pub settings: SolverSettings,
    ddv: Vec<f64>,
}

/// `v''` from the profile equation.
pub fn second_derivative(params: &SolitonParams, r: f64, v: f64, dv: f64) -> f64 {
    let n = params.dim();
    let m = params.m;
    -(m - 1.0) * dv * dv / v
        - (n - 1.0) * dv / r
        - (params.alpha * v + params.beta * r * dv) * v.powf(1.0 - m) / (n - 1.0)
}

/// `v''(0) = -alpha eta^{2-m} / (n (n-1))`.
pub fn origin_curvature(params: &SolitonParams) -> f64 {
    let n = params.dim();
    -params.alpha * params.eta.powf(2.0 - params.m) / (n * (n - 1.0))
}

/// Taylor start `v(r0) = eta + v''(0) r0^2 / 2`, `v'(r0) = v''(0) r0`.
pub fn series_start(params: &SolitonParams, r0: f64) -> Result<(f64, f64)> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidArgument(format!("r0 = {r0} must be positive")));
    }
    let c = origin_curvature(params);
    Ok((params.eta + 0.5 * c * r0 * r0, c * r0))
}

/// Integrate from `r0 = r0_scale * eta^{(m-1)/2}` to `r_max`.
pub fn solve_profile(params: &SolitonParams, r_max: f64, settings: &SolverSettings) -> Result<RadialProfile> {
    let params = params.validated()?;
    settings.check()?;
    let r0 = settings.r0_scale * params.length_scale();
    if !(r_max > r0 && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "r_max = {r_max} must be finite and exceed r0 = {r0}"
        )));
    }
    let (v0, dv0) = series_start(&params, r0)?;

    let ode = integrator::Settings {
        rtol: settings.rtol,
        atol: settings.atol,
        max_step: MaxStep::Proportional {
            frac: settings.max_step_frac,
            floor: 0.0,
        },
        min_step_rel: settings.min_step_rel,
        max_steps: settings.max_steps,
    };
    let cap = settings.blowup_cap * params.eta;

    let mut r = Vec::new();
    let mut v = Vec::new();
    let mut dv = Vec::new();
    let mut ddv = Vec::new();
    let mut bad_state: Option<String> = None;

    let rhs = |t: f64, y: &[f64; 2]| {
        if y[0] > 0.0 {
            [y[1], second_derivative(&params, t, y[0], y[1])]
        } else {
            [f64::NAN, f64::NAN]
        }
    };
    let outcome = integrator::integrate(rhs, r0, [v0, dv0], r_max, &ode, |step| {
        if !(step.y[0] > 0.0) || !step.y[0].is_finite() || !step.y[1].is_finite() {
            bad_state = Some(format!("non-positive or non-finite state v = {}", step.y[0]));
            return Control::Stop;
        }
        r.push(step.t);
        v.push(step.y[0]);
        dv.push(step.y[1]);
        ddv.push(step.dy[1]);
        if step.y[0] > cap {
            Control::Stop
        } else {
            Control::Continue
        }
    });

    let last_r = r.last().copied().unwrap_or(r0);
    let increasing = dv.last().is_some_and(|d| *d > 0.0);
    let status = match (&outcome, bad_state) {
        (_, Some(reason)) => ProfileStatus::StepFailure { r_fail: last_r, reason },
        (Outcome::Reached(_), None) => ProfileStatus::Global { r_max },
        (Outcome::Stopped(_), None) => ProfileStatus::BlowUp { r_star: last_r },
        (Outcome::StepUnderflow { .. } | Outcome::NonFinite { .. }, None) if increasing => {
            ProfileStatus::BlowUp { r_star: last_r }
        }
        (Outcome::StepUnderflow { h, .. }, None) => ProfileStatus::StepFailure {
            r_fail: last_r,
            reason: format!("step size {h:e} underflow without blow-up indicators"),
        },
        (Outcome::NonFinite { .. }, None) => ProfileStatus::StepFailure {
            r_fail: last_r,
            reason: "non-finite right-hand side".into(),
        },
        (Outcome::MaxSteps { .. }, None) => ProfileStatus::StepFailure {
            r_fail: last_r,
            reason: format!("step budget of {} exhausted", settings.max_steps),
        },
    };

    Ok(RadialProfile {
        params,
        r,
        v,
        dv,
        status,
        settings: *settings,
        ddv,
    })
}

impl RadialProfile {
    /// Rebuild a profile from stored samples (e.g. an exported CSV).
    pub fn from_samples(
        params: SolitonParams,
        r: Vec<f64>,
        v: Vec<f64>,
        dv: Vec<f64>,
        status: ProfileStatus,
        settings: SolverSettings,
    ) -> Result<Self> {
        let params = params.validated()?;
        if r.len() != v.len() || r.len() != dv.len() {
            return Err(Error::InvalidArgument("column lengths differ".into()));
        }
        if r.is_empty() {
            return Err(Error::TooFewPoints { got: 0, need: 1 });
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || !(r[0] > 0.0) {
            return Err(Error::InvalidArgument(
                "radii must be positive and strictly increasing".into(),
            ));
        }
        if v.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::InvalidArgument("profile values must be positive".into()));
        }
        let ddv = r
            .iter()
            .zip(v.iter().zip(&dv))
            .map(|(&ri, (&vi, &di))| second_derivative(&params, ri, vi, di))
            .collect();
        Ok(Self {
            params,
            r,
            v,
            dv,
            status,
            settings,
            ddv,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r0(&self) -> f64 {
        self.r[0]
    }

    pub fn r_last(&self) -> f64 {
        *self.r.last().expect("non-empty profile")
    }

    /// `v''` at the grid points, from the equation.
    pub fn ddv(&self) -> &[f64] {
        &self.ddv
    }

    fn jet(&self, i: usize) -> Jet {
        Jet {
            f: self.v[i],
            df: self.dv[i],
            d2f: self.ddv[i],
        }
    }

    /// `(v, v', v'')` at any `r` in `[0, r_last]`: Taylor series below `r0`,
    /// quintic Hermite interpolation between stored steps above. No extrapolation.
    pub fn eval(&self, r: f64) -> Result<Jet> {
        let r_last = self.r_last();
        if !(r >= 0.0 && r <= r_last) {
            return Err(Error::OutOfRange { r, r_max: r_last });
        }
        if r < self.r[0] {
            let c = origin_curvature(&self.params);
            return Ok(Jet {
                f: self.params.eta + 0.5 * c * r * r,
                df: c * r,
                d2f: c,
            });
        }
        let i = match self.r.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => return Ok(self.jet(i)),
            Err(i) => i,
        };
        Ok(numeric::quintic_hermite(
            self.r[i - 1],
            self.jet(i - 1),
            self.r[i],
            self.jet(i),
            r,
        ))
    }
}

/// Pointwise and integral-identity residuals of a stored profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_ode_residual: f64,
    pub max_integral_residual: f64,
    pub grid_points: usize,
}

pub const MIN_RESIDUAL_POINTS: usize = 10;

/// Residuals of the stored samples.
///
/// The pointwise residual evaluates the equation with `(v^m)''` taken from
/// five-point finite differences of the stored `(v^m)' = m v^{m-1} v'`, normalised by
/// `|alpha v| + |beta r v'|`. The integral residual compares
/// `(n-1)/m r^{n-1} (v^m)'` with `-beta r^n v + (n beta - alpha) int_0^r z^{n-1} v dz`.
pub fn residuals(profile: &RadialProfile) -> Result<ResidualReport> {
    residuals_of(&profile.params, &profile.r, &profile.v, &profile.dv)
}

pub(crate) fn residuals_of(params: &SolitonParams, r: &[f64], v: &[f64], dv: &[f64]) -> Result<ResidualReport> {
    let len = r.len();
    if len < MIN_RESIDUAL_POINTS {
        return Err(Error::TooFewPoints {
            got: len,
            need: MIN_RESIDUAL_POINTS,
        });
    }
    let n = params.dim();
    let m = params.m;
    let (alpha, beta) = (params.alpha, params.beta);
    let floor = f64::EPSILON * params.eta * (alpha.abs() + beta.abs()) + f64::MIN_POSITIVE;

    let g: Vec<f64> = (0..len).map(|i| m * v[i].powf(m - 1.0) * dv[i]).collect();
    let dg = numeric::derivative(r, &g, 5);
    let max_ode = (0..len)
        .map(|i| {
            let lhs = (n - 1.0) / m * (dg[i] + (n - 1.0) / r[i] * g[i]) + alpha * v[i] + beta * r[i] * dv[i];
            let scale = (alpha * v[i]).abs() + (beta * r[i] * dv[i]).abs() + floor;
            lhs.abs() / scale
        })
        .fold(0.0, f64::max);

    // int_0^{r0} z^{n-1} v dz from the series start
    let c = origin_curvature(params);
    let r0 = r[0];
    let mut integral = params.eta * r0.powf(n) / n + c * r0.powf(n + 2.0) / (2.0 * (n + 2.0));
    let f = |i: usize| r[i].powf(n - 1.0) * v[i];
    let df = |i: usize| (n - 1.0) * r[i].powf(n - 2.0) * v[i] + r[i].powf(n - 1.0) * dv[i];
    let mut max_int: f64 = 0.0;
    for i in 0..len {
        if i > 0 {
            integral += numeric::hermite_trapezoid(r[i] - r[i - 1], f(i - 1), df(i - 1), f(i), df(i));
        }
        let lhs = (n - 1.0) * r[i].powf(n - 1.0) * v[i].powf(m - 1.0) * dv[i];
        let rhs = -beta * r[i].powf(n) * v[i] + (n * beta - alpha) * integral;
        let defect = (lhs - rhs).abs();
        if defect > 0.0 {
            max_int = max_int.max(defect / lhs.abs().max(rhs.abs()));
        }
    }

    Ok(ResidualReport {
        max_ode_residual: max_ode,
        max_integral_residual: max_int,
        grid_points: len,
    })
}
