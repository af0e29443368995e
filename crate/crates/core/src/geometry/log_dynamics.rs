//! Autonomous dynamics of `w~(s) = r^2 v^{1-m}` in `s = log r`:
//!
//! `w~_ss = (1-2m)/(1-m) w~_s^2 / w~ - beta/(n-1) w~ w~_s - rho/(n-1) w~^2 + 2(n-2-nm)/(1-m) w~`
//!
//! Used to carry a profile out to very large radii (s of order 30).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, Control, MaxStep, Outcome};
use crate::params::SolitonParams;
use crate::profile::RadialProfile;

/// The four terms of the right-hand side, in order.
pub(crate) fn w_log_terms(p: &SolitonParams, w: f64, ws: f64) -> [f64; 4] {
    let n = p.dim();
    let m = p.m;
    let rho = p.rho.unwrap_or(0.0);
    [
        (1.0 - 2.0 * m) / (1.0 - m) * ws * ws / w,
        -p.beta / (n - 1.0) * w * ws,
        -rho / (n - 1.0) * w * w,
        2.0 * (n - 2.0 - n * m) / (1.0 - m) * w,
    ]
}

/// `w~_ss` as a function of `(w~, w~_s)`.
pub fn w_log_rhs(p: &SolitonParams, w: f64, ws: f64) -> f64 {
    w_log_terms(p, w, ws).iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for LogSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-30,
            max_step: 0.01,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LogStatus {
    Reached {
        s_end: f64,
    },
    /// `w~` fell to zero.
    Collapsed {
        s: f64,
        reason: String,
    },
    /// `w~_s` diverged or the controller stalled.
    Diverged {
        s: f64,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogTrajectory {
    pub params: SolitonParams,
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub ws: Vec<f64>,
    pub wss: Vec<f64>,
    pub status: LogStatus,
}

impl LogTrajectory {
    pub fn s_last(&self) -> f64 {
        *self.s.last().expect("non-empty trajectory")
    }

    /// `R = rho + beta w~_s / w~` along the trajectory.
    pub fn scalar_curvature(&self) -> Vec<f64> {
        let rho = self.params.rho.unwrap_or(0.0);
        self.w
            .iter()
            .zip(&self.ws)
            .map(|(w, ws)| rho + self.params.beta * ws / w)
            .collect()
    }
}

/// Integrate the `w~` equation on `[s0, s1]` from `(w~, w~_s)` at `s0`.
pub fn w_log_dynamics(
    params: &SolitonParams,
    s0: f64,
    s1: f64,
    init: (f64, f64),
    settings: &LogSettings,
) -> Result<LogTrajectory> {
    let p = params.validated()?;
    if p.rho.is_none() {
        return Err(Error::NotSoliton("w~ dynamics needs rho".into()));
    }
    if !(init.0 > 0.0 && init.0.is_finite() && init.1.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "initial w~ = {} must be positive",
            init.0
        )));
    }
    if !(s1 > s0) {
        return Err(Error::InvalidArgument(format!("empty s range [{s0}, {s1}]")));
    }
    let ode = integrator::Settings {
        rtol: settings.rtol,
        atol: settings.atol,
        max_step: MaxStep::Fixed(settings.max_step),
        min_step_rel: 1e-14,
        max_steps: settings.max_steps,
    };
    let mut traj = LogTrajectory {
        params: p,
        s: Vec::new(),
        w: Vec::new(),
        ws: Vec::new(),
        wss: Vec::new(),
        status: LogStatus::Reached { s_end: s1 },
    };
    let mut stop: Option<LogStatus> = None;
    let rhs = |_s: f64, y: &[f64; 2]| {
        if y[0] > 0.0 {
            [y[1], w_log_rhs(&p, y[0], y[1])]
        } else {
            [f64::NAN, f64::NAN]
        }
    };
    let outcome = integrator::integrate(rhs, s0, [init.0, init.1], s1, &ode, |st| {
        if !(st.y[0] > f64::MIN_POSITIVE) {
            stop = Some(LogStatus::Collapsed {
                s: st.t,
                reason: format!("w~ = {} reached zero", st.y[0]),
            });
            return Control::Stop;
        }
        if !st.y[1].is_finite() || st.y[1].abs() > 1e12 * (1.0 + st.y[0]) {
            stop = Some(LogStatus::Diverged {
                s: st.t,
                reason: format!("w~_s = {} diverged", st.y[1]),
            });
            return Control::Stop;
        }
        traj.s.push(st.t);
        traj.w.push(st.y[0]);
        traj.ws.push(st.y[1]);
        traj.wss.push(st.dy[1]);
        Control::Continue
    });
    traj.status = match (stop, outcome) {
        (Some(st), _) => st,
        (None, Outcome::Reached(_)) => LogStatus::Reached { s_end: s1 },
        (None, other) => LogStatus::Diverged {
            s: other.last().t,
            reason: format!("integration stopped: {other:?}"),
        },
    };
    Ok(traj)
}

/// `(s, w~, w~_s)` of a profile at radius `r`, with `w~_s = r w' = 2 w psi_s`.
pub fn handoff(profile: &RadialProfile, r: f64) -> Result<(f64, f64, f64)> {
    let m = profile.params.m;
    let j = profile.eval(r)?;
    let w = r * r * j.f.powf(1.0 - m);
    let psi_s = 1.0 + 0.5 * (1.0 - m) * r * j.df / j.f;
    Ok((r.ln(), w, 2.0 * w * psi_s))
}

/// Continue a profile from its last grid point out to `r_end` in log variables.
pub fn continue_profile(profile: &RadialProfile, r_end: f64, settings: &LogSettings) -> Result<LogTrajectory> {
    let (s0, w, ws) = handoff(profile, profile.r_last())?;
    w_log_dynamics(&profile.params, s0, r_end.ln(), (w, ws), settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{solve_profile, SolverSettings};
    use approx::assert_relative_eq;

    #[test]
    fn shrinking_fixed_point() {
        let p = SolitonParams::soliton(3, 1.0, 1.0, 1.0);
        let a0 = 2.0;
        assert_relative_eq!(w_log_rhs(&p, a0, 0.0), 0.0, epsilon = 1e-14);
        let p5 = SolitonParams::soliton(5, 1.0, 1.0, 1.0);
        assert_relative_eq!(w_log_rhs(&p5, 12.0, 0.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn agrees_with_direct_integration() {
        let p = SolitonParams::soliton(3, 1.0, 1.0, 1.0);
        let direct = solve_profile(&p, 1e3, &SolverSettings::default()).unwrap();
        let short = solve_profile(&p, 10.0, &SolverSettings::default()).unwrap();
        let traj = continue_profile(&short, 1e3, &LogSettings::default()).unwrap();
        assert!(matches!(traj.status, LogStatus::Reached { .. }));
        let w_log = *traj.w.last().unwrap();
        let v = direct.v.last().unwrap();
        let w_direct = 1e6 * v.powf(1.0 - p.m);
        assert_relative_eq!(w_log, w_direct, max_relative = 1e-7);
    }

    #[test]
    fn steady_grows_like_log() {
        let p = SolitonParams::soliton(3, 1.0, 0.0, 1.0);
        let short = solve_profile(&p, 10.0, &SolverSettings::default()).unwrap();
        let (s0, w, ws) = handoff(&short, 10.0).unwrap();
        let traj = w_log_dynamics(&p, s0, 30.0, (w, ws), &LogSettings::default()).unwrap();
        let ratio = traj.w.last().unwrap() / 30.0;
        assert!((1.7..=2.3).contains(&ratio), "{ratio}");
    }

    #[test]
    fn divergence_is_reported() {
        // beta < 0: the -beta w w_s term feeds finite-s blow-up
        let p = SolitonParams::soliton(3, -1.0, 1.0, 1.0);
        let traj = w_log_dynamics(&p, 0.0, 50.0, (1.0, 1.0), &LogSettings::default()).unwrap();
        assert!(matches!(traj.status, LogStatus::Diverged { .. }), "{:?}", traj.status);
        assert!(traj.s_last() < 50.0);
    }

    #[test]
    fn rejects_bad_input() {
        let p = SolitonParams::soliton(3, 1.0, 1.0, 1.0);
        assert!(w_log_dynamics(&p, 0.0, 1.0, (0.0, 0.0), &LogSettings::default()).is_err());
        assert!(w_log_dynamics(&p, 1.0, 0.0, (1.0, 0.0), &LogSettings::default()).is_err());
        let g = SolitonParams::general(3, 0.2, 1.0, 1.0, 1.0);
        assert!(w_log_dynamics(&g, 0.0, 1.0, (1.0, 0.0), &LogSettings::default()).is_err());
    }
}
