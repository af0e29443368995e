//! Self-similar solutions of the fast diffusion equation `u_t = (n-1)/m Delta u^m`
//! built from a radial profile `v`:
//!
//! * forward   `u1 = t^{-alpha} v(x t^{-beta})`,           `alpha (1-m) = 2 beta - 1`
//! * backward  `u2 = (T-t)^{alpha} v(x (T-t)^{beta})`,     `alpha (1-m) = 2 beta + 1 > 0`
//! * eternal   `u3 = e^{-alpha t} v(x e^{-beta t})`,       `alpha (1-m) = 2 beta`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SolitonParams;
use crate::profile::RadialProfile;

const RELATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfSimilarKind {
    Forward,
    Backward,
    Eternal,
}

impl std::str::FromStr for SelfSimilarKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" => Ok(Self::Forward),
            "backward" => Ok(Self::Backward),
            "eternal" => Ok(Self::Eternal),
            other => Err(Error::InvalidArgument(format!("unknown self-similar kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarSpec {
    pub kind: SelfSimilarKind,
    /// Extinction time, backward solutions only.
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub params: SolitonParams,
}

impl SelfSimilarSpec {
    pub fn new(kind: SelfSimilarKind, params: SolitonParams, horizon: Option<f64>) -> Result<Self> {
        let spec = Self { kind, horizon, params };
        spec.check()?;
        Ok(spec)
    }

    pub fn forward(params: SolitonParams) -> Result<Self> {
        Self::new(SelfSimilarKind::Forward, params, None)
    }

    pub fn backward(params: SolitonParams, horizon: f64) -> Result<Self> {
        Self::new(SelfSimilarKind::Backward, params, Some(horizon))
    }

    pub fn eternal(params: SolitonParams) -> Result<Self> {
        Self::new(SelfSimilarKind::Eternal, params, None)
    }

    /// `alpha` required by the kind for the given `m` and `beta`.
    pub fn required_alpha(kind: SelfSimilarKind, m: f64, beta: f64) -> f64 {
        let shift = match kind {
            SelfSimilarKind::Forward => -1.0,
            SelfSimilarKind::Backward => 1.0,
            SelfSimilarKind::Eternal => 0.0,
        };
        (2.0 * beta + shift) / (1.0 - m)
    }

    pub fn check(&self) -> Result<()> {
        let p = self.params.validated()?;
        let want = Self::required_alpha(self.kind, p.m, p.beta);
        let scale = 1f64.max(p.alpha.abs()).max(want.abs());
        if (p.alpha - want).abs() > RELATION_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "{:?} solution needs alpha = {want}, got {}",
                self.kind, p.alpha
            )));
        }
        match (self.kind, self.horizon) {
            (SelfSimilarKind::Backward, _) if p.alpha <= 0.0 => Err(Error::InvalidArgument(format!(
                "backward solution needs alpha > 0, got {}",
                p.alpha
            ))),
            (SelfSimilarKind::Backward, Some(t)) if t > 0.0 && t.is_finite() => Ok(()),
            (SelfSimilarKind::Backward, other) => Err(Error::InvalidArgument(format!(
                "backward solution needs a positive horizon T, got {other:?}"
            ))),
            _ => Ok(()),
        }
    }

    /// Time factor `a(t)` and spatial factor `b(t)` with `u = a(t) v(b(t) |x|)`.
    fn factors(&self, t: f64) -> Result<(f64, f64)> {
        let (alpha, beta) = (self.params.alpha, self.params.beta);
        match self.kind {
            SelfSimilarKind::Forward => {
                if !(t > 0.0) {
                    return Err(Error::InvalidArgument(format!("forward solution needs t > 0, got {t}")));
                }
                Ok((t.powf(-alpha), t.powf(-beta)))
            }
            SelfSimilarKind::Backward => {
                let tau = self.horizon.unwrap_or(f64::NAN) - t;
                if !(tau > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "backward solution needs t < T, got t = {t}"
                    )));
                }
                Ok((tau.powf(alpha), tau.powf(beta)))
            }
            SelfSimilarKind::Eternal => Ok(((-alpha * t).exp(), (-beta * t).exp())),
        }
    }

    /// Time step scale used by the residual diagnostics at time `t`.
    fn time_scale(&self, t: f64) -> f64 {
        match self.kind {
            SelfSimilarKind::Forward => t,
            SelfSimilarKind::Backward => t.abs().min(self.horizon.unwrap_or(f64::NAN) - t).max(1e-300),
            SelfSimilarKind::Eternal => t.abs().max(1.0),
        }
    }
}

fn check_profile(spec: &SelfSimilarSpec, profile: &RadialProfile) -> Result<()> {
    spec.check()?;
    let (a, b) = (&spec.params, &profile.params);
    if a.n != b.n || a.m != b.m || a.alpha != b.alpha || a.beta != b.beta {
        return Err(Error::InvalidArgument(
            "profile was computed for different (n, m, alpha, beta)".into(),
        ));
    }
    Ok(())
}

/// `u` at radius `r` and time `t`.
pub(crate) fn radial_value(spec: &SelfSimilarSpec, profile: &RadialProfile, r: f64, t: f64) -> Result<f64> {
    let (a, b) = spec.factors(t)?;
    Ok(a * profile.eval(b * r)?.f)
}

/// `u(x, t)` for a point `x` of any dimension (only `|x|` matters).
pub fn self_similar_eval(spec: &SelfSimilarSpec, profile: &RadialProfile, x: &[f64], t: f64) -> Result<f64> {
    check_profile(spec, profile)?;
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    radial_value(spec, profile, r, t)
}

/// Normalised residual `|u_t - (n-1)/m Delta u^m| / (|u_t| + |(n-1)/m Delta u^m| + |u|/tau)`
/// at `(r, t)` by central differences with relative step `h` in both variables, where
/// `tau` is the time scale the step is taken relative to.
pub fn pde_residual(spec: &SelfSimilarSpec, profile: &RadialProfile, r: f64, t: f64, h: f64) -> Result<f64> {
    check_profile(spec, profile)?;
    if !(r > 0.0 && h > 0.0 && h < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "need r > 0 and 0 < h < 0.5, got r = {r}, h = {h}"
        )));
    }
    let p = &spec.params;
    let (n, m) = (p.dim(), p.m);
    let hr = h * r;
    let ht = h * spec.time_scale(t);
    let um = |rr: f64| radial_value(spec, profile, rr, t).map(|u| u.powf(m));
    let (left, mid, right) = (um(r - hr)?, um(r)?, um(r + hr)?);
    let lap = (left - 2.0 * mid + right) / (hr * hr) + (n - 1.0) / r * (right - left) / (2.0 * hr);
    let u_t = (radial_value(spec, profile, r, t + ht)? - radial_value(spec, profile, r, t - ht)?) / (2.0 * ht);
    let diffusion = (n - 1.0) / m * lap;
    let u = radial_value(spec, profile, r, t)?;
    let scale = u_t.abs() + diffusion.abs() + u.abs() * h / ht;
    Ok(if scale == 0.0 {
        0.0
    } else {
        (u_t - diffusion).abs() / scale
    })
}

/// Sample points `(r, t)` and relative difference step for the residual study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub h: f64,
}

impl Lattice {
    pub fn new(r: Vec<f64>, t: Vec<f64>, h: f64) -> Self {
        Self { r, t, h }
    }

    /// A small interior lattice suited to the kind: `r` in `[0.5, 2]`, times away
    /// from `t = 0` and from the horizon.
    pub fn standard(spec: &SelfSimilarSpec) -> Self {
        let r = linspace(0.5, 2.0, 7);
        let t = match spec.kind {
            SelfSimilarKind::Forward => linspace(0.5, 2.0, 5),
            SelfSimilarKind::Backward => {
                let big_t = spec.horizon.unwrap_or(1.0);
                linspace(0.1 * big_t, 0.7 * big_t, 5)
            }
            SelfSimilarKind::Eternal => linspace(-0.5, 0.5, 5),
        };
        Self { r, t, h: 4e-3 }
    }
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeResidualStudy {
    pub h: f64,
    pub points: usize,
    pub max_residual: f64,
    pub max_residual_half: f64,
    /// `log2` of the residual ratio between `h` and `h/2`; `None` when both vanish.
    pub observed_order: Option<f64>,
}

/// Maximum residual over the lattice at steps `h` and `h/2`, with the observed order.
pub fn pde_residual_study(
    spec: &SelfSimilarSpec,
    profile: &RadialProfile,
    lattice: &Lattice,
) -> Result<PdeResidualStudy> {
    if lattice.r.is_empty() || lattice.t.is_empty() {
        return Err(Error::InvalidArgument("empty lattice".into()));
    }
    let sweep = |h: f64| -> Result<f64> {
        let mut worst = 0f64;
        for &t in &lattice.t {
            for &r in &lattice.r {
                worst = worst.max(pde_residual(spec, profile, r, t, h)?);
            }
        }
        Ok(worst)
    };
    let coarse = sweep(lattice.h)?;
    let fine = sweep(0.5 * lattice.h)?;
    let observed_order = (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2());
    Ok(PdeResidualStudy {
        h: lattice.h,
        points: lattice.r.len() * lattice.t.len(),
        max_residual: coarse,
        max_residual_half: fine,
        observed_order,
    })
}
