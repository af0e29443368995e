//! Asymptotic limits from computed trajectories, compared against the closed-form
//! predictions, plus the invariant battery.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, continue_profile, GeometryCurves, LogSettings, LogStatus};
use crate::numeric;
use crate::params::{self, SolitonClass, SolitonKind, SolitonParams, TheoreticalPredictions};
use crate::profile::{self, ProfileStatus, RadialProfile, ResidualReport, SolverSettings};

/// Relative tolerance on limit values at the end of the run.
pub const LIMIT_TOL: f64 = 0.05;
/// Tolerance on values extrapolated to the origin.
pub const ORIGIN_TOL: f64 = 1e-4;
/// Relative slack on inequalities.
pub const SLACK: f64 = 1e-6;
/// Tail width (relative) below which a limit counts as settled.
pub const CONVERGED_WIDTH: f64 = 0.01;
/// Tolerance on the fitted growth exponent of `w` for expanding solitons.
pub const GROWTH_TOL: f64 = 0.10;
/// Largest radius integrated directly; beyond it the log-variable dynamics take over.
pub const DIRECT_LIMIT: f64 = 1e3;
/// Agreement required between the two routes to `K0`.
pub const K0_CROSSCHECK_TOL: f64 = 1e-4;
/// Bound on the finite-difference defect of the `w` identities.
pub const W_IDENTITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "w")]
    W,
    #[serde(rename = "w_over_logr")]
    WOverLogR,
    #[serde(rename = "R")]
    Scalar,
    K0,
    K1,
    #[serde(rename = "rvp_over_v")]
    RvpOverV,
    #[serde(rename = "r2v2k")]
    R2V2k,
    #[serde(rename = "w_growth_exponent")]
    WGrowthExponent,
    #[serde(rename = "w_tilde_ss")]
    WTildeSs,
    #[serde(rename = "R_at_origin")]
    ScalarAtOrigin,
    #[serde(rename = "K0_at_origin")]
    K0AtOrigin,
    #[serde(rename = "K1_at_origin")]
    K1AtOrigin,
}

impl Quantity {
    pub const ALL: [Quantity; 12] = [
        Quantity::W,
        Quantity::WOverLogR,
        Quantity::Scalar,
        Quantity::K0,
        Quantity::K1,
        Quantity::RvpOverV,
        Quantity::R2V2k,
        Quantity::WGrowthExponent,
        Quantity::WTildeSs,
        Quantity::ScalarAtOrigin,
        Quantity::K0AtOrigin,
        Quantity::K1AtOrigin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::W => "w",
            Quantity::WOverLogR => "w_over_logr",
            Quantity::Scalar => "R",
            Quantity::K0 => "K0",
            Quantity::K1 => "K1",
            Quantity::RvpOverV => "rvp_over_v",
            Quantity::R2V2k => "r2v2k",
            Quantity::WGrowthExponent => "w_growth_exponent",
            Quantity::WTildeSs => "w_tilde_ss",
            Quantity::ScalarAtOrigin => "R_at_origin",
            Quantity::K0AtOrigin => "K0_at_origin",
            Quantity::K1AtOrigin => "K1_at_origin",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Value at the largest abscissa and the spread over the last decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observed {
    #[serde(with = "crate::export::nullable_f64")]
    pub value: f64,
    #[serde(with = "crate::export::nullable_f64")]
    pub tail_width: f64,
    pub converged: bool,
}

impl Observed {
    fn exact(value: f64) -> Self {
        Self {
            value,
            tail_width: 0.0,
            converged: value.is_finite(),
        }
    }
}

/// Indices of the last decade `[r_end / 10, r_end]`.
fn tail(r: &[f64]) -> std::ops::Range<usize> {
    let r_end = *r.last().expect("non-empty grid");
    let start = r.partition_point(|&x| x < 0.1 * r_end);
    start..r.len()
}

/// Width is `max - min` over the tail; it is judged against `max(|end|, 0.01 sup|q|)`
/// so that curves tending to zero are measured on the scale they started from.
fn observe(q: &[f64], tail_idx: std::ops::Range<usize>) -> Observed {
    let value = *q.last().expect("non-empty curve");
    let (lo, hi) = q[tail_idx]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let tail_width = hi - lo;
    let sup = q.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let norm = value.abs().max(0.01 * sup);
    Observed {
        value,
        tail_width,
        converged: value.is_finite() && tail_width <= CONVERGED_WIDTH * norm,
    }
}

/// Least-squares slope of `log w` against `log r` over the last decade.
pub fn growth_exponent(r: &[f64], w: &[f64]) -> f64 {
    let idx = tail(r);
    let xs: Vec<f64> = r[idx.clone()].iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = w[idx].iter().map(|x| x.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Observed limits of every tracked quantity.
pub fn estimate_limits(curves: &GeometryCurves) -> Result<BTreeMap<Quantity, Observed>> {
    let p = &curves.params;
    if curves.len() < profile::MIN_RESIDUAL_POINTS {
        return Err(Error::TooFewPoints {
            got: curves.len(),
            need: profile::MIN_RESIDUAL_POINTS,
        });
    }
    let r = &curves.r;
    let t = tail(r);
    let mut out = BTreeMap::new();

    out.insert(Quantity::W, observe(&curves.w, t.clone()));
    let w_log: Vec<f64> = r
        .iter()
        .zip(&curves.w)
        .map(|(r, w)| if *r > 1.0 { w / r.ln() } else { f64::NAN })
        .collect();
    if r.last().copied().unwrap_or(0.0) > 10.0 {
        out.insert(Quantity::WOverLogR, observe(&w_log, t.clone()));
    }
    out.insert(Quantity::Scalar, observe(&curves.scalar, t.clone()));
    out.insert(Quantity::K0, observe(&curves.k0, t.clone()));
    out.insert(Quantity::K1, observe(&curves.k1, t.clone()));
    out.insert(Quantity::RvpOverV, observe(&curves.rvp_over_v, t.clone()));
    if let Some(k) = p.k() {
        let r2v2k: Vec<f64> = r.iter().zip(&curves.v).map(|(r, v)| r * r * v.powf(2.0 * k)).collect();
        // the limit is a positive constant; judge the width against it alone
        let mut o = observe(&r2v2k, t.clone());
        o.converged = o.value.is_finite() && o.value > 0.0 && o.tail_width <= CONVERGED_WIDTH * o.value;
        out.insert(Quantity::R2V2k, o);
    }
    let exponent = growth_exponent(r, &curves.w);
    out.insert(Quantity::WGrowthExponent, Observed::exact(exponent));

    let s: Vec<f64> = r[t.clone()].iter().map(|x| x.ln()).collect();
    if s.len() >= 5 {
        let (_, wss) = numeric::derivatives2(&s, &curves.w[t.clone()], 5);
        let scale = curves.w[t.clone()].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut o = observe(&wss, 0..wss.len());
        o.converged = o.value.is_finite() && o.tail_width <= CONVERGED_WIDTH * scale;
        out.insert(Quantity::WTildeSs, o);
    }

    out.insert(Quantity::ScalarAtOrigin, Observed::exact(curves.scalar_at_origin));
    out.insert(Quantity::K0AtOrigin, Observed::exact(curves.k0_at_origin));
    out.insert(Quantity::K1AtOrigin, Observed::exact(curves.k1_at_origin));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(with = "crate::export::nullable_f64")]
    pub observed: f64,
    pub predicted: Option<f64>,
    /// `|observed - predicted| / scale`; the scale is `|predicted|`, or for a zero
    /// target the size of the quantity at the origin.
    pub rel_error: Option<f64>,
    pub tolerance: f64,
}

/// What the predictions say about one quantity.
enum Target {
    Value {
        value: f64,
        scale: f64,
        tol: f64,
    },
    /// A finite positive limit exists, value unknown.
    Exists,
}

fn targets(p: &SolitonParams, pred: &TheoreticalPredictions) -> BTreeMap<Quantity, Target> {
    let mut t = BTreeMap::new();
    let value = |value: f64, zero_scale: f64, tol: f64| Target::Value {
        value,
        scale: if value != 0.0 { value.abs() } else { zero_scale.abs() },
        tol,
    };
    let k_scale = pred.k_at_zero;
    if let Some(a0) = pred.w_limit {
        t.insert(Quantity::W, value(a0, a0, LIMIT_TOL));
        t.insert(Quantity::WTildeSs, value(0.0, a0, LIMIT_TOL));
    }
    if let Some(a1) = pred.w_over_logr_limit {
        t.insert(Quantity::WOverLogR, value(a1, a1, LIMIT_TOL));
    }
    t.insert(Quantity::Scalar, value(pred.r_limit, pred.r_at_zero, LIMIT_TOL));
    t.insert(Quantity::K0, value(pred.k0_limit, k_scale, LIMIT_TOL));
    t.insert(Quantity::K1, value(pred.k1_limit, k_scale, LIMIT_TOL));
    t.insert(Quantity::RvpOverV, value(pred.rvp_over_v_limit, 1.0, LIMIT_TOL));
    if pred.r2v2k_limit_exists {
        t.insert(Quantity::R2V2k, Target::Exists);
        if p.beta != 0.0 {
            let rho = p.rho.unwrap_or(0.0);
            t.insert(Quantity::WGrowthExponent, value(rho.abs() / p.beta, 1.0, GROWTH_TOL));
        }
    }
    t.insert(Quantity::ScalarAtOrigin, value(pred.r_at_zero, 1.0, ORIGIN_TOL));
    t.insert(Quantity::K0AtOrigin, value(pred.k_at_zero, 1.0, ORIGIN_TOL));
    t.insert(Quantity::K1AtOrigin, value(pred.k_at_zero, 1.0, ORIGIN_TOL));
    t
}

fn judge(obs: &Observed, target: &Target) -> Verdict {
    match *target {
        Target::Value { value, scale, tol } => {
            let err = (obs.value - value).abs() / scale;
            let status = if err < tol {
                Status::Pass
            } else if obs.converged {
                Status::Fail
            } else {
                Status::Inconclusive
            };
            Verdict {
                status,
                observed: obs.value,
                predicted: Some(value),
                rel_error: Some(err),
                tolerance: tol,
            }
        }
        Target::Exists => Verdict {
            status: if obs.converged {
                Status::Pass
            } else {
                Status::Inconclusive
            },
            observed: obs.value,
            predicted: None,
            rel_error: None,
            tolerance: CONVERGED_WIDTH,
        },
    }
}

/// One monitored inequality: `holds` iff `worst_margin >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub name: String,
    #[serde(with = "crate::export::nullable_f64")]
    pub worst_margin: f64,
    /// NaN for checks that are not pointwise.
    #[serde(with = "crate::export::nullable_f64")]
    pub location_r: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl InvariantRecord {
    fn new(name: &str, worst_margin: f64, location_r: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            worst_margin,
            location_r,
            tolerance,
            holds: worst_margin >= -tolerance,
        }
    }

    /// Smallest `margin(i)` over `idx`.
    fn scan(name: &str, r: &[f64], idx: impl Iterator<Item = usize>, margin: impl Fn(usize) -> f64) -> Self {
        let (mut worst, mut at) = (f64::INFINITY, f64::NAN);
        for i in idx {
            let q = margin(i);
            if q < worst || q.is_nan() {
                worst = q;
                at = r[i];
                if q.is_nan() {
                    break;
                }
            }
        }
        Self::new(name, worst, at, SLACK)
    }
}

/// Every inequality the theory asserts for this regime, checked on the curves.
pub fn invariant_battery(curves: &GeometryCurves, class: &SolitonClass) -> Vec<InvariantRecord> {
    let p = &curves.params;
    let (n, m) = (p.dim(), p.m);
    let (alpha, beta) = (p.alpha, p.beta);
    let rho = p.rho.unwrap_or(0.0);
    let r = &curves.r;
    let len = curves.len();
    let all = || 0..len;
    let pairs = || 1..len;
    let mut log = Vec::new();

    log.push(InvariantRecord::scan("w_positive", r, all(), |i| curves.w[i]));
    if alpha != 0.0 {
        let k = beta / alpha;
        log.push(InvariantRecord::scan("v_plus_krvp_positive", r, all(), |i| {
            1.0 + k * curves.rvp_over_v[i]
        }));
        let sign = alpha.signum();
        log.push(InvariantRecord::scan("dv_sign", r, all(), |i| {
            -sign * curves.rvp_over_v[i]
        }));
    }
    let span = 2.0 / (1.0 - m);
    log.push(InvariantRecord::scan("rvp_over_v_range", r, all(), |i| {
        let q = curves.rvp_over_v[i];
        (-q).min(q + span) / span
    }));
    log.push(InvariantRecord::scan("psi_s_range", r, all(), |i| {
        let q = curves.psi_s[i];
        q.min(1.0 - q)
    }));
    if alpha > 0.0 {
        let top = alpha * (1.0 - m);
        log.push(InvariantRecord::scan("R_bounds", r, all(), |i| {
            let q = curves.scalar[i];
            q.min(top - q) / top
        }));
        if alpha >= n * beta {
            let bound = 2.0 * n * (n - 1.0) / (alpha * (1.0 - m));
            log.push(InvariantRecord::scan("w_upper_bound", r, all(), |i| {
                (bound - curves.w[i]) / bound
            }));
        }
    }
    if alpha < 0.0 && beta > 0.0 {
        let scale = curves.scalar.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        log.push(InvariantRecord::scan("R_negative", r, all(), |i| {
            -curves.scalar[i] / scale
        }));
    }
    if matches!(
        class.variant,
        SolitonKind::Shrinking | SolitonKind::Steady | SolitonKind::Expanding
    ) {
        log.push(InvariantRecord::scan("w_increasing", r, pairs(), |i| {
            (curves.w[i] - curves.w[i - 1]) / curves.w[i]
        }));
        let t = tail(r);
        log.push(InvariantRecord::scan(
            "w_tail_nondecreasing",
            r,
            (t.start.max(1))..t.end,
            |i| (curves.w[i] - curves.w[i - 1]) / curves.w[i],
        ));
        let r_scale = curves.scalar.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        log.push(InvariantRecord::scan("R_decreasing", r, pairs(), |i| {
            (curves.scalar[i - 1] - curves.scalar[i]) / r_scale
        }));
        let k_scale = curves.k0_at_origin.abs().max(curves.k1_at_origin.abs());
        log.push(InvariantRecord::scan("K0_positive", r, all(), |i| {
            curves.k0[i] / k_scale
        }));
        log.push(InvariantRecord::scan("K1_positive", r, all(), |i| {
            curves.k1[i] / k_scale
        }));
    }
    if class.variant == SolitonKind::Shrinking {
        let a0 = (n - 1.0) * (n - 2.0) / rho;
        log.push(InvariantRecord::scan("w_below_limit", r, all(), |i| {
            (a0 - curves.w[i]) / a0
        }));
        let scale = rho.abs().max(curves.scalar_at_origin.abs());
        log.push(InvariantRecord::scan("R_above_rho", r, all(), |i| {
            (curves.scalar[i] - rho) / scale
        }));
    }
    let mut cross = InvariantRecord::new(
        "K0_two_routes_agree",
        K0_CROSSCHECK_TOL - curves.k0_crosscheck_defect,
        f64::NAN,
        0.0,
    );
    cross.location_r = worst_crosscheck_radius(curves);
    log.push(cross);
    log
}

fn worst_crosscheck_radius(curves: &GeometryCurves) -> f64 {
    let k = curves.k0_quadrature.len();
    let mut worst = (0.0, f64::NAN);
    for i in 0..k {
        let d = geometry::crosscheck_defect(&curves.k0[..k][i..=i], &curves.k0_quadrature[i..=i]);
        if d > worst.0 {
            worst = (d, curves.r[i]);
        }
    }
    worst.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Only parameters covered by the theorems.
    Strict,
    /// Predictions substituted without checking the hypotheses.
    Formal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub params: SolitonParams,
    pub class: SolitonClass,
    pub mode: Mode,
    pub r_max: f64,
    pub settings: SolverSettings,
    pub profile_status: ProfileStatus,
    pub continuation: Option<LogStatus>,
    pub residuals: ResidualReport,
    pub w_identity_defect: f64,
    pub observed: BTreeMap<Quantity, Observed>,
    pub predicted: TheoreticalPredictions,
    pub verdicts: BTreeMap<Quantity, Verdict>,
    pub not_applicable: Vec<Quantity>,
    pub invariant_log: Vec<InvariantRecord>,
    pub overall: Status,
}

impl AsymptoticReport {
    pub fn failed_invariants(&self) -> impl Iterator<Item = &InvariantRecord> {
        self.invariant_log.iter().filter(|i| !i.holds)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Direct solve up to `min(r_max, DIRECT_LIMIT)`, log-variable continuation beyond,
/// and the stitched curves.
pub fn solve_and_stitch(
    params: &SolitonParams,
    r_max: f64,
    settings: &SolverSettings,
) -> Result<(RadialProfile, GeometryCurves, Option<LogStatus>)> {
    let direct_end = r_max.min(DIRECT_LIMIT);
    let prof = profile::solve_profile(params, direct_end, settings)?;
    if let ProfileStatus::BlowUp { r_star } = prof.status {
        return Err(Error::Solver {
            r: r_star,
            reason: "profile blew up before the asymptotic range".into(),
        });
    }
    if let ProfileStatus::StepFailure { r_fail, reason } = &prof.status {
        return Err(Error::Solver {
            r: *r_fail,
            reason: reason.clone(),
        });
    }
    let curves = geometry::geometry(&prof)?;
    if r_max <= direct_end * (1.0 + 1e-12) {
        return Ok((prof, curves, None));
    }
    let log_settings = LogSettings {
        rtol: settings.rtol,
        ..LogSettings::default()
    };
    let traj = continue_profile(&prof, r_max, &log_settings)?;
    let status = traj.status.clone();
    if let LogStatus::Collapsed { s, reason } | LogStatus::Diverged { s, reason } = &status {
        return Err(Error::Solver {
            r: s.exp(),
            reason: format!("log-variable continuation: {reason}"),
        });
    }
    let curves = curves.stitch(&traj)?;
    Ok((prof, curves, Some(status)))
}

/// Full verification for parameters covered by the theorems.
pub fn verify(params: &SolitonParams, r_max: f64, settings: &SolverSettings) -> Result<AsymptoticReport> {
    run(params, r_max, settings, Mode::Strict)
}

/// As [`verify`] but for any soliton parameters, comparing against the formulas of
/// the soliton variant without their hypotheses.
pub fn verify_formal(params: &SolitonParams, r_max: f64, settings: &SolverSettings) -> Result<AsymptoticReport> {
    run(params, r_max, settings, Mode::Formal)
}

fn run(params: &SolitonParams, r_max: f64, settings: &SolverSettings, mode: Mode) -> Result<AsymptoticReport> {
    let p = params.validated()?;
    settings.check()?;
    if !(r_max >= 1e2 && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "verification needs r_max >= 100, got {r_max}"
        )));
    }
    let class = params::classify(&p);
    let predicted = match mode {
        Mode::Strict => params::predictions(&p)?,
        Mode::Formal => params::formal_predictions(&p)?,
    };
    let (prof, curves, continuation) = solve_and_stitch(&p, r_max, settings)?;
    let residuals = profile::residuals(&prof)?;
    let w_identity_defect = if p.beta != 0.0 {
        geometry::consistency_check_w(&prof)?
    } else {
        f64::NAN
    };
    let observed = estimate_limits(&curves)?;

    let mut verdicts = BTreeMap::new();
    let mut not_applicable = Vec::new();
    let targets = targets(&p, &predicted);
    for q in Quantity::ALL {
        match (targets.get(&q), observed.get(&q)) {
            (Some(t), Some(o)) => {
                verdicts.insert(q, judge(o, t));
            }
            (Some(_), None) => {
                verdicts.insert(
                    q,
                    Verdict {
                        status: Status::Inconclusive,
                        observed: f64::NAN,
                        predicted: None,
                        rel_error: None,
                        tolerance: LIMIT_TOL,
                    },
                );
            }
            (None, _) => not_applicable.push(q),
        }
    }

    let mut invariant_log = invariant_battery(&curves, &class);
    if w_identity_defect.is_finite() {
        invariant_log.push(InvariantRecord::new(
            "w_identities",
            W_IDENTITY_TOL - w_identity_defect,
            f64::NAN,
            0.0,
        ));
    }

    let worst_verdict = verdicts.values().map(|v| v.status).max().unwrap_or(Status::Pass);
    let overall = if invariant_log.iter().any(|i| !i.holds) {
        Status::Fail
    } else {
        worst_verdict
    };

    Ok(AsymptoticReport {
        params: p,
        class,
        mode,
        r_max,
        settings: *settings,
        profile_status: prof.status.clone(),
        continuation,
        residuals,
        w_identity_defect,
        observed,
        predicted,
        verdicts,
        not_applicable,
        invariant_log,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> SolverSettings {
        SolverSettings::default()
    }

    fn obs(report: &AsymptoticReport, q: Quantity) -> f64 {
        report.observed[&q].value
    }

    #[test]
    fn tail_is_last_decade() {
        let r: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(tail(&r), 9..100);
    }

    #[test]
    fn observe_flags_unsettled_tail() {
        let q: Vec<f64> = (0..100).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
        let o = observe(&q, 90..100);
        assert!(!o.converged);
        let flat = vec![2.0; 100];
        assert!(observe(&flat, 90..100).converged);
    }

    #[test]
    fn growth_exponent_of_power_law() {
        let r: Vec<f64> = (0..200).map(|i| 10f64.powf(1.0 + i as f64 / 100.0)).collect();
        let w: Vec<f64> = r.iter().map(|x| 3.0 * x.powf(1.3)).collect();
        assert!((growth_exponent(&r, &w) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn shrinking_limits() {
        // beta = rho/(n-2) sits on the boundary of the covered range
        let p = SolitonParams::soliton(3, 1.0, 1.0, 1.0);
        assert!(verify(&p, 1e4, &settings()).is_err());
        let rep = verify_formal(&p, 1e4, &settings()).unwrap();
        assert!((obs(&rep, Quantity::W) - 2.0).abs() / 2.0 < LIMIT_TOL);
        assert!((obs(&rep, Quantity::Scalar) - 1.0).abs() < LIMIT_TOL);
        assert!((obs(&rep, Quantity::K1) - 0.5).abs() / 0.5 < LIMIT_TOL);
        assert_eq!(rep.verdicts[&Quantity::W].status, Status::Pass);
        assert!(rep.not_applicable.contains(&Quantity::R2V2k));
        assert!(matches!(rep.continuation, Some(LogStatus::Reached { .. })));
    }

    #[test]
    fn steady_limits() {
        let p = SolitonParams::soliton(3, 1.0, 0.0, 1.0);
        let rep = verify(&p, 1e4, &settings()).unwrap();
        assert!(rep.verdicts[&Quantity::Scalar].status != Status::Fail);
        let wl = obs(&rep, Quantity::WOverLogR);
        assert!(wl > 1.0 && wl < 3.0, "{wl}");
    }

    #[test]
    fn expanding_limits() {
        let p = SolitonParams::soliton(3, 1.0, -1.0, 1.0);
        let rep = verify(&p, 1e4, &settings()).unwrap();
        assert!((obs(&rep, Quantity::RvpOverV) + 1.25).abs() / 1.25 < 0.02);
        assert_eq!(rep.verdicts[&Quantity::R2V2k].status, Status::Pass);
        assert_eq!(rep.verdicts[&Quantity::WGrowthExponent].status, Status::Pass);
        assert!(
            rep.invariant_log.iter().all(|i| i.holds),
            "{:?}",
            rep.failed_invariants().collect::<Vec<_>>()
        );
        assert_eq!(rep.overall, Status::Pass);
    }

    #[test]
    fn uncovered_rejected_but_formal_runs() {
        let p = SolitonParams::soliton(3, -1.0, 1.0, 1.0);
        assert!(matches!(verify(&p, 1e3, &settings()), Err(Error::OutsideTheorems(_))));
        // alpha < 0 < beta: negative curvature everywhere; the equation stiffens
        // like beta r v^{1-m}, so the run stays short
        let neg = SolitonParams::soliton(3, 1.0, -3.0, 1.0);
        let rep = verify_formal(&neg, 1e2, &settings()).unwrap();
        let rec = rep.invariant_log.iter().find(|i| i.name == "R_negative").unwrap();
        assert!(rec.holds, "{rec:?}");
    }

    #[test]
    fn report_is_deterministic() {
        let p = SolitonParams::soliton(3, 2.0, 1.0, 1.0);
        let a = verify(&p, 1e3, &settings()).unwrap().to_json().unwrap();
        let b = verify(&p, 1e3, &settings()).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn short_runs_rejected() {
        let p = SolitonParams::soliton(3, 1.0, 1.0, 1.0);
        assert!(verify(&p, 10.0, &settings()).is_err());
    }
}
