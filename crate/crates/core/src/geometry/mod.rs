//! Conformal geometry of `g = v^{4/(n+2)} dx^2` along a radial soliton profile.
//!
//! With `w = r^2 v^{1-m}`, `psi = w^{1/2}` and `psi_s = 1 + (1-m)/2 r v'/v`:
//!
//! * `R = (1-m)(alpha + beta r v'/v) = rho + 2 beta psi_s`
//! * `K1 = (1 - psi_s^2) / psi^2`
//! * `K0 = -R_r / (2 beta r v^{1-m})`
//!
//! `K0` is also recomputed from the integral representation of `R'` obtained from
//! the radial equation `(n-1) Delta R + beta r R_r v^{1-m} + R (R - rho) v^{1-m} = 0`,
//! and the two are compared point by point.

mod log_dynamics;
mod self_similar;

pub use log_dynamics::{continue_profile, handoff, w_log_dynamics, w_log_rhs, LogSettings, LogStatus, LogTrajectory};
pub use self_similar::{
    pde_residual, pde_residual_study, self_similar_eval, Lattice, PdeResidualStudy, SelfSimilarKind, SelfSimilarSpec,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;
use crate::params::SolitonParams;
use crate::profile::RadialProfile;

fn soliton_rho(params: &SolitonParams) -> Result<f64> {
    let rho = params
        .rho
        .ok_or_else(|| Error::NotSoliton("no soliton constant rho".into()))?;
    params.validated()?;
    Ok(rho)
}

/// `x = (1-m)/2 * r v'/v`, so that `psi_s = 1 + x` and `1 - psi_s^2 = -x (2 + x)`
/// without cancellation near the origin.
fn half_log_slope(m: f64, r: f64, v: f64, dv: f64) -> f64 {
    0.5 * (1.0 - m) * r * dv / v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarCurvature {
    pub values: Vec<f64>,
    /// Limit at `r = 0`, `alpha (1-m)`.
    pub at_origin: f64,
    /// Extrapolation of the grid values to the origin.
    pub extrapolated_origin: f64,
}

/// `R(r) = (1-m)(alpha + beta r v'/v)` on the profile grid.
pub fn scalar_curvature(profile: &RadialProfile) -> Result<ScalarCurvature> {
    let p = &profile.params;
    soliton_rho(p)?;
    let values: Vec<f64> = (0..profile.len())
        .map(|i| (1.0 - p.m) * (p.alpha + p.beta * profile.r[i] * profile.dv[i] / profile.v[i]))
        .collect();
    Ok(ScalarCurvature {
        at_origin: p.alpha * (1.0 - p.m),
        extrapolated_origin: origin_limit(&profile.r, &values),
        values,
    })
}

fn origin_limit(r: &[f64], q: &[f64]) -> f64 {
    if r.len() < 3 {
        return q.first().copied().unwrap_or(f64::NAN);
    }
    numeric::extrapolate_to_origin([r[0], r[1], r[2]], [q[0], q[1], q[2]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionalCurvatures {
    pub k0: Vec<f64>,
    pub k1: Vec<f64>,
    /// `K0` from the integral representation of `R'`.
    pub k0_quadrature: Vec<f64>,
    /// Worst normalised disagreement between the two `K0` routes.
    pub max_crosscheck_defect: f64,
    pub k0_at_origin: f64,
    pub k1_at_origin: f64,
    /// Grid indices where `psi < atol`.
    pub flagged: Vec<usize>,
}

/// `R_r` differentiated along the trajectory, with `v''` from the equation.
fn scalar_curvature_slope(p: &SolitonParams, r: f64, v: f64, dv: f64, ddv: f64) -> f64 {
    let q = dv / v;
    (1.0 - p.m) * p.beta * (q + r * ddv / v - r * q * q)
}

pub fn sectional_curvatures(profile: &RadialProfile) -> Result<SectionalCurvatures> {
    let p = &profile.params;
    let rho = soliton_rho(p)?;
    if p.beta == 0.0 {
        return Err(Error::NotSoliton(
            "K0 = -R_r / (2 beta r v^{1-m}) is undefined for beta = 0".into(),
        ));
    }
    let m = p.m;
    let (r, v, dv, ddv) = (&profile.r, &profile.v, &profile.dv, profile.ddv());
    let len = profile.len();

    let mut k0 = Vec::with_capacity(len);
    let mut k1 = Vec::with_capacity(len);
    let mut flagged = Vec::new();
    for i in 0..len {
        let vm = v[i].powf(1.0 - m);
        let w = r[i] * r[i] * vm;
        let x = half_log_slope(m, r[i], v[i], dv[i]);
        k1.push(-x * (2.0 + x) / w);
        let rr = scalar_curvature_slope(p, r[i], v[i], dv[i], ddv[i]);
        k0.push(-rr / (2.0 * p.beta * r[i] * vm));
        if w.sqrt() < profile.settings.atol {
            flagged.push(i);
        }
    }

    let k0_quadrature = k0_by_quadrature(profile, rho)?;
    let max_crosscheck_defect = crosscheck_defect(&k0, &k0_quadrature);

    Ok(SectionalCurvatures {
        k0_at_origin: origin_limit(r, &k0),
        k1_at_origin: origin_limit(r, &k1),
        k0,
        k1,
        k0_quadrature,
        max_crosscheck_defect,
        flagged,
    })
}

/// Pointwise `|a - b| / max(|a|, |b|)`, with the denominator floored at `1e-4`
/// of the curves' largest magnitude: an absolute tolerance for the tail and for
/// sign changes, where both routes are tiny.
pub fn crosscheck_defect(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |acc, x| acc.max(x.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs();
            if d == 0.0 {
                0.0
            } else {
                d / x.abs().max(y.abs()).max(1e-4 * scale)
            }
        })
        .fold(0.0, f64::max)
}

/// `R'(r) = -J(r) / ((n-1) r^{n-1})` with
/// `J(r) = int_0^r z^{n-1} v^{1-m} R (R - rho) e^{E(z) - E(r)} dz`,
/// `E(r) = beta/(n-1) int_0^r tau v^{1-m} dtau + gamma log v(r)`, `gamma = (n-2)(1-m)/2`.
///
/// This integrates `(n-1) Delta_g R + <grad R, grad f>_g + R (R - rho) = 0` written in
/// Euclidean terms: the metric Laplacian contributes the first-order term
/// `(n-1) gamma (v'/v) R'` besides `(n-1) Delta R + beta r v^{1-m} R'`, hence the
/// `gamma log v` part of the integrating factor.
///
/// `J` is accumulated step by step in the rescaled form above so the exponential
/// never overflows; each step uses Simpson's rule with midpoint and
/// three-quarter-point values from the profile interpolant.
fn k0_by_quadrature(profile: &RadialProfile, rho: f64) -> Result<Vec<f64>> {
    let p = &profile.params;
    let n = p.dim();
    let m = p.m;
    let beta = p.beta;

    let point = |z: f64, v: f64, dv: f64| {
        let vm = v.powf(1.0 - m);
        let big_r = (1.0 - m) * (p.alpha + beta * z * dv / v);
        let g = z.powf(n - 1.0) * vm * big_r * (big_r - rho);
        let e = beta / (n - 1.0) * z * vm;
        (g, e, v.ln())
    };
    let at = |z: f64| -> Result<(f64, f64, f64)> {
        let j = profile.eval(z)?;
        Ok(point(z, j.f, j.df))
    };

    let r = &profile.r;
    let len = profile.len();
    let mut out = Vec::with_capacity(len);

    // stub [0, r0]: integrand ~ z^{n-1} g(0)
    let gamma = 0.5 * (n - 2.0) * (1.0 - m);
    let (g0, _, _) = point(r[0], profile.v[0], profile.dv[0]);
    let mut j_acc = g0 * r[0] / n;
    let k0_of = |i: usize, j_acc: f64| {
        let r_slope = -j_acc / ((n - 1.0) * r[i].powf(n - 1.0));
        -r_slope / (2.0 * beta * r[i] * profile.v[i].powf(1.0 - m))
    };
    out.push(k0_of(0, j_acc));

    for i in 1..len {
        let (a, b) = (r[i - 1], r[i]);
        let h = b - a;
        let c = 0.5 * (a + b);
        let d = 0.5 * (c + b);
        let (ga, ea, la) = point(a, profile.v[i - 1], profile.dv[i - 1]);
        let (gb, eb, lb) = point(b, profile.v[i], profile.dv[i]);
        let (gc, ec, lc) = at(c)?;
        let (_, ed, _) = at(d)?;
        let de_ab = h / 6.0 * (ea + 4.0 * ec + eb) + gamma * (lb - la);
        let de_cb = h / 12.0 * (ec + 4.0 * ed + eb) + gamma * (lb - lc);
        let wa = (-de_ab).exp();
        let wc = (-de_cb).exp();
        j_acc = j_acc * wa + h / 6.0 * (ga * wa + 4.0 * gc * wc + gb);
        out.push(k0_of(i, j_acc));
    }
    Ok(out)
}

/// Where a set of curves came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CurveSource {
    Direct,
    /// Direct grid up to `handoff`, log-variable continuation beyond.
    Stitched {
        handoff: f64,
    },
}

/// Derived curves on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryCurves {
    pub params: SolitonParams,
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    #[serde(rename = "R")]
    pub scalar: Vec<f64>,
    #[serde(rename = "K0")]
    pub k0: Vec<f64>,
    #[serde(rename = "K1")]
    pub k1: Vec<f64>,
    pub psi_s: Vec<f64>,
    pub s_tilde: Vec<f64>,
    pub rvp_over_v: Vec<f64>,
    /// Quadrature route for `K0`; only on the directly integrated part.
    pub k0_quadrature: Vec<f64>,
    pub k0_crosscheck_defect: f64,
    #[serde(rename = "R_at_origin")]
    pub scalar_at_origin: f64,
    #[serde(rename = "K0_at_origin")]
    pub k0_at_origin: f64,
    #[serde(rename = "K1_at_origin")]
    pub k1_at_origin: f64,
    pub source: CurveSource,
}

/// All curves for a soliton profile on its own grid.
pub fn geometry(profile: &RadialProfile) -> Result<GeometryCurves> {
    let p = profile.params;
    let scalar = scalar_curvature(profile)?;
    let sect = sectional_curvatures(profile)?;
    let m = p.m;
    let len = profile.len();
    let (r, v, dv) = (&profile.r, &profile.v, &profile.dv);

    let w: Vec<f64> = (0..len).map(|i| r[i] * r[i] * v[i].powf(1.0 - m)).collect();
    let rvp_over_v: Vec<f64> = (0..len).map(|i| r[i] * dv[i] / v[i]).collect();
    let psi_s: Vec<f64> = rvp_over_v.iter().map(|q| 1.0 + 0.5 * (1.0 - m) * q).collect();

    // s~ = int sqrt(w) ds, normalised by s~(r0) = psi(r0)
    let mut s_tilde = Vec::with_capacity(len);
    s_tilde.push(w[0].sqrt());
    for i in 1..len {
        let ds = (r[i] / r[i - 1]).ln();
        let prev = s_tilde[i - 1];
        s_tilde.push(prev + 0.5 * ds * (w[i - 1].sqrt() + w[i].sqrt()));
    }

    Ok(GeometryCurves {
        params: p,
        r: r.clone(),
        v: v.clone(),
        w,
        scalar: scalar.values,
        k0: sect.k0,
        k1: sect.k1,
        psi_s,
        s_tilde,
        rvp_over_v,
        k0_quadrature: sect.k0_quadrature,
        k0_crosscheck_defect: sect.max_crosscheck_defect,
        scalar_at_origin: scalar.extrapolated_origin,
        k0_at_origin: sect.k0_at_origin,
        k1_at_origin: sect.k1_at_origin,
        source: CurveSource::Direct,
    })
}

impl GeometryCurves {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Append a log-variable continuation that starts at the last grid point.
    pub fn stitch(mut self, log: &LogTrajectory) -> Result<Self> {
        let p = self.params;
        let rho = soliton_rho(&p)?;
        let m = p.m;
        let handoff = *self.r.last().expect("non-empty curves");
        let s_handoff = handoff.ln();
        for i in 0..log.s.len() {
            let s = log.s[i];
            if s <= s_handoff * (1.0 + 1e-15) + 1e-15 {
                continue;
            }
            let (w, ws, wss) = (log.w[i], log.ws[i], log.wss[i]);
            let psi_s = 0.5 * ws / w;
            let r = s.exp();
            let lw = ws / w;
            let prev_s = self.r.last().unwrap().ln();
            let prev_st = *self.s_tilde.last().unwrap();
            let prev_w = *self.w.last().unwrap();
            self.r.push(r);
            self.v.push(((w.ln() - 2.0 * s) / (1.0 - m)).exp());
            self.w.push(w);
            self.scalar.push(rho + p.beta * lw);
            self.k1.push((1.0 - psi_s * psi_s) / w);
            self.k0.push(-(wss / w - lw * lw) / (2.0 * w));
            self.psi_s.push(psi_s);
            self.rvp_over_v.push(2.0 * (psi_s - 1.0) / (1.0 - m));
            self.s_tilde
                .push(prev_st + 0.5 * (s - prev_s) * (prev_w.sqrt() + w.sqrt()));
        }
        self.source = CurveSource::Stitched { handoff };
        Ok(self)
    }

    /// `(value, index)` nearest to radius `r` on the grid.
    pub fn index_near(&self, r: f64) -> usize {
        match self.r.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.r.len() => self.r.len() - 1,
            Err(i) => {
                if (self.r[i] - r).abs() < (r - self.r[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        }
    }
}

/// Defect of `w' = 2 r v^{1-m} psi_s` and `r w' = (w/beta)(R - rho)` with `w'` from
/// second-order finite differences of the stored `w`.
///
/// Both defects are normalised by the natural scale of the left side
/// (`2 r v^{1-m}` and `w` respectively); the worse one is returned.
pub fn consistency_check_w(profile: &RadialProfile) -> Result<f64> {
    let p = &profile.params;
    let m = p.m;
    let w: Vec<f64> = (0..profile.len())
        .map(|i| profile.r[i] * profile.r[i] * profile.v[i].powf(1.0 - m))
        .collect();
    consistency_check_w_values(profile, &w)
}

pub(crate) fn consistency_check_w_values(profile: &RadialProfile, w: &[f64]) -> Result<f64> {
    let p = &profile.params;
    let rho = soliton_rho(p)?;
    if p.beta == 0.0 {
        return Err(Error::NotSoliton(
            "identity r w' = (w/beta)(R - rho) needs beta != 0".into(),
        ));
    }
    let m = p.m;
    let (r, v, dv) = (&profile.r, &profile.v, &profile.dv);
    let dw = numeric::derivative(r, w, 3);
    let mut worst: f64 = 0.0;
    for i in 0..profile.len() {
        let vm = v[i].powf(1.0 - m);
        let psi_s = 1.0 + half_log_slope(m, r[i], v[i], dv[i]);
        let scale1 = 2.0 * r[i] * vm;
        let d1 = (dw[i] - scale1 * psi_s).abs() / scale1;
        let big_r = (1.0 - m) * (p.alpha + p.beta * r[i] * dv[i] / v[i]);
        let d2 = (r[i] * dw[i] - w[i] / p.beta * (big_r - rho)).abs() / w[i];
        worst = worst.max(d1).max(d2);
    }
    Ok(worst)
}

/// Normalised residual of the autonomous `w~` equation with `w~_s`, `w~_ss` from
/// five-point finite differences in `s = log r` at interior grid points (three-point
/// ones drop to first order where the last step is clipped to `r_max`).
pub fn w_tilde_equation_defect(profile: &RadialProfile) -> Result<f64> {
    let p = &profile.params;
    soliton_rho(p)?;
    let m = p.m;
    let s: Vec<f64> = profile.r.iter().map(|r| r.ln()).collect();
    let w: Vec<f64> = (0..profile.len())
        .map(|i| profile.r[i] * profile.r[i] * profile.v[i].powf(1.0 - m))
        .collect();
    let (ws, wss) = numeric::derivatives2(&s, &w, 5);
    let mut worst: f64 = 0.0;
    for i in 1..profile.len().saturating_sub(1) {
        let terms = log_dynamics::w_log_terms(p, w[i], ws[i]);
        let scale = terms.iter().map(|t| t.abs()).sum::<f64>() + wss[i].abs();
        let rhs: f64 = terms.iter().sum();
        worst = worst.max((wss[i] - rhs).abs() / scale);
    }
    Ok(worst)
}
