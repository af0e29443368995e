//! Parameter space of the radial profile equation
//!
//! `(n-1)/m ((v^m)'' + (n-1)/r (v^m)') + alpha v + beta r v' = 0`, `v'(0) = 0`, `v(0) = eta`,
//! together with the soliton constant `rho`, regime classification, the closed-form
//! limits predicted for covered regimes and the finite-radius certificates for
//! `alpha < 0, beta <= 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for the "exact" algebraic relations between parameters.
const RELATION_TOL: f64 = 1e-12;

/// Parameter tuple of the profile equation.
///
/// `rho` is present only for soliton runs, in which case `m = (n-2)/(n+2)` and
/// `alpha (1-m) = 2 beta + rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub n: u32,
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rho: Option<f64>,
    pub eta: f64,
}

/// The exponent `(n-2)/(n+2)` for which `g = v^{4/(n+2)} dx^2` is a Yamabe soliton.
pub fn soliton_exponent(n: u32) -> f64 {
    let n = f64::from(n);
    (n - 2.0) / (n + 2.0)
}

impl SolitonParams {
    /// Non-soliton run of the general equation.
    pub fn general(n: u32, m: f64, alpha: f64, beta: f64, eta: f64) -> Self {
        Self {
            n,
            m,
            alpha,
            beta,
            rho: None,
            eta,
        }
    }

    /// Soliton run with `rho` given; `alpha` is derived.
    pub fn soliton(n: u32, beta: f64, rho: f64, eta: f64) -> Self {
        let m = soliton_exponent(n);
        Self {
            n,
            m,
            alpha: (2.0 * beta + rho) / (1.0 - m),
            beta,
            rho: Some(rho),
            eta,
        }
    }

    /// Soliton run with `alpha` given; `rho` is derived.
    pub fn soliton_from_alpha(n: u32, alpha: f64, beta: f64, eta: f64) -> Self {
        let m = soliton_exponent(n);
        Self {
            n,
            m,
            alpha,
            beta,
            rho: Some(alpha * (1.0 - m) - 2.0 * beta),
            eta,
        }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    /// `k = beta / alpha`, defined only for `alpha != 0`.
    pub fn k(&self) -> Option<f64> {
        (self.alpha != 0.0).then(|| self.beta / self.alpha)
    }

    pub fn is_soliton(&self) -> bool {
        self.rho.is_some()
    }

    /// Characteristic radius `eta^{(m-1)/2}` on which the profile varies near the origin.
    pub fn length_scale(&self) -> f64 {
        self.eta.powf((self.m - 1.0) / 2.0)
    }

    /// `alpha (1-m) - 2 beta - rho`; zero for consistent soliton parameters.
    pub fn soliton_defect(&self) -> Option<f64> {
        self.rho.map(|rho| self.alpha * (1.0 - self.m) - 2.0 * self.beta - rho)
    }

    pub fn validate(&self) -> ValidationResult {
        let mut violations = Vec::new();
        let fields = [
            ("m", self.m),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("eta", self.eta),
            ("rho", self.rho.unwrap_or(0.0)),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                violations.push(Violation::NonFinite(name));
            }
        }
        if self.n < 3 {
            violations.push(Violation::DimensionTooSmall { n: self.n });
        }
        let upper = (self.dim() - 2.0) / self.dim();
        if !(self.m > 0.0 && self.m <= upper * (1.0 + RELATION_TOL)) {
            violations.push(Violation::ExponentOutOfRange { m: self.m, upper });
        }
        if !(self.eta > 0.0) {
            violations.push(Violation::NonPositiveEta { eta: self.eta });
        }
        if let Some(rho) = self.rho {
            let expected = soliton_exponent(self.n);
            if (self.m - expected).abs() > RELATION_TOL * expected.max(1.0) {
                violations.push(Violation::SolitonExponentMismatch { m: self.m, expected });
            }
            let defect = self.alpha * (1.0 - self.m) - 2.0 * self.beta - rho;
            let scale = (self.alpha * (1.0 - self.m)).abs() + (2.0 * self.beta).abs() + rho.abs();
            if defect.abs() > RELATION_TOL * scale.max(1.0) {
                violations.push(Violation::SolitonRelationBroken { defect });
            }
        }
        ValidationResult { violations }
    }

    /// Returns the parameters back if valid, otherwise every violation.
    pub fn validated(self) -> Result<Self> {
        let result = self.validate();
        if result.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(result.violations))
        }
    }
}

/// A violated standing hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NonFinite(&'static str),
    DimensionTooSmall { n: u32 },
    ExponentOutOfRange { m: f64, upper: f64 },
    NonPositiveEta { eta: f64 },
    SolitonExponentMismatch { m: f64, expected: f64 },
    SolitonRelationBroken { defect: f64 },
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::NonFinite(_) => "finite_fields",
            Violation::DimensionTooSmall { .. } => "n_at_least_3",
            Violation::ExponentOutOfRange { .. } => "m_range",
            Violation::NonPositiveEta { .. } => "eta_positive",
            Violation::SolitonExponentMismatch { .. } => "soliton_exponent",
            Violation::SolitonRelationBroken { .. } => "soliton_relation",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite(field) => write!(f, "{field} is not finite"),
            Violation::DimensionTooSmall { n } => write!(f, "n = {n} but n >= 3 is required"),
            Violation::ExponentOutOfRange { m, upper } => {
                write!(f, "m = {m} outside (0, (n-2)/n] = (0, {upper}]")
            }
            Violation::NonPositiveEta { eta } => write!(f, "eta = {eta} must be positive"),
            Violation::SolitonExponentMismatch { m, expected } => {
                write!(f, "soliton run needs m = (n-2)/(n+2) = {expected}, got {m}")
            }
            Violation::SolitonRelationBroken { defect } => {
                write!(f, "alpha (1-m) - 2 beta - rho = {defect} is not zero")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.violations.iter().map(Violation::name).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolitonKind {
    Shrinking,
    Steady,
    Expanding,
    NonSoliton,
}

impl fmt::Display for SolitonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coverage {
    CoveredByTheorems,
    OutsideTheorems,
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonClass {
    pub variant: SolitonKind,
    pub validity: Coverage,
    pub reason: String,
}

impl SolitonClass {
    pub fn is_covered(&self) -> bool {
        self.validity == Coverage::CoveredByTheorems
    }
}

/// Classify by the sign of `rho` and check the hypotheses of the asymptotic theorems.
///
/// The boundary `beta = rho/(n-2)` is outside (the hypothesis is strict).
pub fn classify(params: &SolitonParams) -> SolitonClass {
    use Coverage::*;
    let Some(rho) = params.rho else {
        return SolitonClass {
            variant: SolitonKind::NonSoliton,
            validity: OutsideTheorems,
            reason: "no soliton constant rho".into(),
        };
    };
    let n = params.dim();
    if rho > 0.0 {
        let threshold = rho / (n - 2.0);
        let (validity, reason) = if params.beta > threshold {
            (
                CoveredByTheorems,
                format!("beta = {} > rho/(n-2) = {threshold}", params.beta),
            )
        } else {
            (
                OutsideTheorems,
                format!("beta = {} <= rho/(n-2) = {threshold}", params.beta),
            )
        };
        SolitonClass {
            variant: SolitonKind::Shrinking,
            validity,
            reason,
        }
    } else {
        let variant = if rho == 0.0 {
            SolitonKind::Steady
        } else {
            SolitonKind::Expanding
        };
        let (validity, reason) = if params.alpha > 0.0 {
            (CoveredByTheorems, format!("alpha = {} > 0", params.alpha))
        } else {
            (OutsideTheorems, format!("alpha = {} <= 0", params.alpha))
        };
        SolitonClass {
            variant,
            validity,
            reason,
        }
    }
}

/// Closed-form limits and bounds for a soliton regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalPredictions {
    /// `lim r^2 v^{1-m}` (shrinking).
    pub w_limit: Option<f64>,
    /// `lim r^2 v^{1-m} / log r` (steady).
    pub w_over_logr_limit: Option<f64>,
    /// Whether `lim r^2 v^{2k}` is finite and positive (expanding).
    pub r2v2k_limit_exists: bool,
    pub rvp_over_v_limit: f64,
    #[serde(rename = "R_at_zero")]
    pub r_at_zero: f64,
    #[serde(rename = "R_limit")]
    pub r_limit: f64,
    #[serde(rename = "K_at_zero")]
    pub k_at_zero: f64,
    #[serde(rename = "K0_limit")]
    pub k0_limit: f64,
    #[serde(rename = "K1_limit")]
    pub k1_limit: f64,
    #[serde(rename = "R_upper")]
    pub r_upper: Option<f64>,
    pub w_upper: Option<f64>,
}

/// Predictions for a covered soliton regime; anything else is rejected.
pub fn predictions(params: &SolitonParams) -> Result<TheoreticalPredictions> {
    params.validated()?;
    let class = classify(params);
    if !class.is_covered() {
        return Err(Error::OutsideTheorems(format!("{}: {}", class.variant, class.reason)));
    }
    formal_predictions(params)
}

/// The closed-form values obtained by substituting `params` into the formulas of its
/// soliton variant, without checking the coverage hypotheses.
///
/// Used for boundary runs such as `beta = rho/(n-2)` where the theorems are silent
/// but the formulas still define a natural target.
pub fn formal_predictions(params: &SolitonParams) -> Result<TheoreticalPredictions> {
    let Some(rho) = params.rho else {
        return Err(Error::NotSoliton("no soliton constant rho".into()));
    };
    let n = params.dim();
    let m = params.m;
    let (alpha, beta) = (params.alpha, params.beta);
    let variant = classify(params).variant;

    let shrinking = variant == SolitonKind::Shrinking;
    let steady = variant == SolitonKind::Steady;
    let expanding = variant == SolitonKind::Expanding;

    let rvp_over_v_limit = if expanding {
        match params.k() {
            Some(k) if k != 0.0 => -1.0 / k,
            _ => f64::NAN,
        }
    } else {
        -2.0 / (1.0 - m)
    };

    Ok(TheoreticalPredictions {
        w_limit: shrinking.then(|| (n - 1.0) * (n - 2.0) / rho),
        w_over_logr_limit: (steady && beta != 0.0).then(|| 2.0 * (n - 1.0) * (n - 2.0 - m * n) / (beta * (1.0 - m))),
        r2v2k_limit_exists: expanding,
        rvp_over_v_limit,
        r_at_zero: alpha * (1.0 - m),
        r_limit: if expanding { 0.0 } else { rho },
        k_at_zero: (2.0 * beta + rho) / (n * (n - 1.0)),
        k0_limit: 0.0,
        k1_limit: if shrinking { rho / ((n - 1.0) * (n - 2.0)) } else { 0.0 },
        r_upper: (alpha > 0.0).then_some(alpha * (1.0 - m)),
        w_upper: (alpha > 0.0 && alpha >= n * beta).then(|| 2.0 * n * (n - 1.0) / (alpha * (1.0 - m))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlowupCase {
    /// `0 > n beta > alpha`
    Case1,
    /// `0 > alpha >= n beta`
    Case2,
    /// `alpha < 0`, `beta = 0`
    Case3,
}

impl fmt::Display for BlowupCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Certified upper bound on the maximal existence radius when `alpha < 0`, `beta <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupCertificate {
    pub case_tag: BlowupCase,
    #[serde(rename = "C1")]
    pub c1: Option<f64>,
    pub radius_bound: Option<f64>,
}

/// From `v^{m-2} v' >= C1 r`:
/// `v^{1-m}(r) >= (eta^{m-1} - (1-m) C1 r^2 / 2)^{-1}`, which diverges at
/// `sqrt(2/(C1 (1-m))) eta^{(m-1)/2}`. Case 3 has no closed-form radius.
pub fn blowup_certificate(params: &SolitonParams) -> Result<BlowupCertificate> {
    params.validated()?;
    let (alpha, beta) = (params.alpha, params.beta);
    if !(alpha < 0.0 && beta <= 0.0) {
        return Err(Error::NotBlowupRegime { alpha, beta });
    }
    let n = params.dim();
    let case_tag = if beta == 0.0 {
        BlowupCase::Case3
    } else if n * beta > alpha {
        BlowupCase::Case1
    } else {
        BlowupCase::Case2
    };
    if case_tag == BlowupCase::Case3 {
        return Ok(BlowupCertificate {
            case_tag,
            c1: None,
            radius_bound: None,
        });
    }
    let c1 = (alpha.abs() / n).min(beta.abs()) / (n - 1.0);
    let radius = (2.0 / (c1 * (1.0 - params.m))).sqrt() * params.eta.powf((params.m - 1.0) / 2.0);
    Ok(BlowupCertificate {
        case_tag,
        c1: Some(c1),
        radius_bound: Some(radius),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn shrink() -> SolitonParams {
        SolitonParams::soliton(3, 1.0, 1.0, 1.0)
    }

    #[test]
    fn reference_soliton_is_valid() {
        let p = SolitonParams {
            n: 3,
            m: 0.2,
            alpha: 3.75,
            beta: 1.0,
            rho: Some(1.0),
            eta: 1.0,
        };
        assert!(p.validate().is_valid());
        assert_relative_eq!(shrink().alpha, 3.75, max_relative = 1e-15);
    }

    #[test]
    fn rejects_m_above_range() {
        let p = SolitonParams::general(3, 0.5, 1.0, 1.0, 1.0);
        assert_eq!(p.validate().names(), vec!["m_range"]);
    }

    #[test]
    fn rejects_zero_eta() {
        let p = SolitonParams::general(3, 0.2, 1.0, 1.0, 0.0);
        assert_eq!(p.validate().names(), vec!["eta_positive"]);
    }

    #[test]
    fn reports_every_violation() {
        let p = SolitonParams {
            n: 2,
            m: 0.7,
            alpha: 1.0,
            beta: 1.0,
            rho: Some(5.0),
            eta: -1.0,
        };
        let names = p.validate().names();
        for expected in ["n_at_least_3", "m_range", "eta_positive", "soliton_relation"] {
            assert!(names.contains(&expected), "{names:?} missing {expected}");
        }
    }

    #[test]
    fn inconsistent_rho_rejected() {
        let mut p = shrink();
        p.alpha = 3.0;
        assert_eq!(p.validate().names(), vec!["soliton_relation"]);
    }

    #[test]
    fn boundary_beta_is_outside() {
        let c = classify(&shrink());
        assert_eq!(c.variant, SolitonKind::Shrinking);
        assert_eq!(c.validity, Coverage::OutsideTheorems);
    }

    #[test]
    fn classification_examples() {
        let c = classify(&SolitonParams::soliton(3, 2.0, 1.0, 1.0));
        assert_eq!(
            (c.variant, c.validity),
            (SolitonKind::Shrinking, Coverage::CoveredByTheorems)
        );

        let steady = SolitonParams::soliton_from_alpha(3, 2.5, 1.0, 1.0);
        assert_eq!(steady.rho, Some(0.0));
        let c = classify(&steady);
        assert_eq!(
            (c.variant, c.validity),
            (SolitonKind::Steady, Coverage::CoveredByTheorems)
        );

        let c = classify(&SolitonParams::soliton(3, 1.0, -1.0, 1.0));
        assert_eq!(
            (c.variant, c.validity),
            (SolitonKind::Expanding, Coverage::CoveredByTheorems)
        );

        let c = classify(&SolitonParams::general(3, 0.2, 1.0, 1.0, 1.0));
        assert_eq!(c.variant, SolitonKind::NonSoliton);
    }

    #[test]
    fn predictions_reject_outside() {
        assert!(matches!(predictions(&shrink()), Err(Error::OutsideTheorems(_))));
    }

    #[test]
    fn shrinking_formal_values() {
        let p = formal_predictions(&shrink()).unwrap();
        assert_relative_eq!(p.w_limit.unwrap(), 2.0);
        assert_relative_eq!(p.k_at_zero, 0.5);
        assert_relative_eq!(p.k1_limit, 0.5);
        assert_relative_eq!(p.r_at_zero, 3.0, max_relative = 1e-15);
        assert_relative_eq!(p.r_limit, 1.0);
        assert_relative_eq!(p.w_upper.unwrap(), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn steady_values() {
        let p = predictions(&SolitonParams::soliton(3, 1.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(p.w_over_logr_limit.unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(p.r_at_zero, 2.0, max_relative = 1e-15);
        assert_eq!(p.r_limit, 0.0);
        assert_eq!(p.k1_limit, 0.0);
        assert!(p.w_limit.is_none());
    }

    #[test]
    fn expanding_values() {
        let params = SolitonParams::soliton(3, 1.0, -1.0, 1.0);
        assert_relative_eq!(params.alpha, 1.25, max_relative = 1e-15);
        assert_relative_eq!(params.k().unwrap(), 0.8, max_relative = 1e-15);
        let p = predictions(&params).unwrap();
        assert_relative_eq!(p.rvp_over_v_limit, -1.25, max_relative = 1e-14);
        assert_eq!(p.r_limit, 0.0);
        assert_eq!(p.k1_limit, 0.0);
        assert!(p.r2v2k_limit_exists);
    }

    #[test]
    fn n5_shrinking_limit() {
        let params = SolitonParams::soliton(5, 1.0, 1.0, 1.0);
        assert_relative_eq!(params.m, 3.0 / 7.0);
        assert_relative_eq!(params.alpha, 5.25, max_relative = 1e-14);
        let p = predictions(&params).unwrap();
        assert_relative_eq!(p.w_limit.unwrap(), 12.0);
    }

    #[test]
    fn certificate_case2() {
        let c = blowup_certificate(&SolitonParams::general(3, 0.2, -1.0, -1.0, 1.0)).unwrap();
        assert_eq!(c.case_tag, BlowupCase::Case2);
        assert_relative_eq!(c.c1.unwrap(), 1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(c.radius_bound.unwrap(), 15f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn certificate_case1() {
        let c = blowup_certificate(&SolitonParams::general(3, 0.2, -4.0, -1.0, 1.0)).unwrap();
        assert_eq!(c.case_tag, BlowupCase::Case1);
        assert_relative_eq!(c.c1.unwrap(), 0.5);
        assert_relative_eq!(c.radius_bound.unwrap(), 5f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn certificate_case3_has_no_radius() {
        let c = blowup_certificate(&SolitonParams::general(3, 0.2, -1.0, 0.0, 1.0)).unwrap();
        assert_eq!(c.case_tag, BlowupCase::Case3);
        assert!(c.c1.is_none() && c.radius_bound.is_none());
    }

    #[test]
    fn certificate_rejects_other_signs() {
        for (a, b) in [(1.0, -1.0), (-1.0, 0.5), (0.0, 0.0)] {
            let p = SolitonParams::general(3, 0.2, a, b, 1.0);
            assert!(matches!(blowup_certificate(&p), Err(Error::NotBlowupRegime { .. })));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn soliton_relation_holds(n in 3u32..9, beta in -5.0f64..5.0, rho in -5.0f64..5.0) {
                let p = SolitonParams::soliton(n, beta, rho, 1.0);
                let scale = 1.0 + beta.abs() + rho.abs();
                prop_assert!(p.soliton_defect().unwrap().abs() <= 8.0 * f64::EPSILON * scale);
                prop_assert!(p.validate().is_valid());
            }

            #[test]
            fn classify_ignores_eta(n in 3u32..9, beta in -5.0f64..5.0, rho in -5.0f64..5.0,
                                    eta in 1e-3f64..1e3) {
                let p = SolitonParams::soliton(n, beta, rho, 1.0);
                prop_assert_eq!(classify(&p), classify(&p.with_eta(eta)));
            }

            #[test]
            fn radius_bound_scales_with_eta(alpha in -10.0f64..-0.01, beta in -10.0f64..-0.01,
                                            eta in 1e-2f64..1e2) {
                let p = SolitonParams::general(3, 0.2, alpha, beta, eta);
                let b1 = blowup_certificate(&p).unwrap().radius_bound.unwrap();
                let b2 = blowup_certificate(&p.with_eta(2.0 * eta)).unwrap().radius_bound.unwrap();
                let expected = 2f64.powf((p.m - 1.0) / 2.0);
                prop_assert!((b2 / b1 - expected).abs() <= 1e-14);
            }

            #[test]
            fn shrinking_w_times_k1_is_one(n in 3u32..9, rho in 0.01f64..5.0, excess in 0.01f64..5.0) {
                let beta = rho / (f64::from(n) - 2.0) + excess;
                let p = predictions(&SolitonParams::soliton(n, beta, rho, 1.0)).unwrap();
                prop_assert!((p.w_limit.unwrap() * p.k1_limit - 1.0).abs() <= 1e-14);
            }
        }
    }
}
