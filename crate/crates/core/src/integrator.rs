//! Embedded Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! Local error per component is controlled against `atol + rtol * max(|y_old|, |y_new|)`
//! (RMS norm). Every accepted step is handed to an observer which may stop the run.

/// Upper limit on the step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxStep {
    Unbounded,
    Fixed(f64),
    /// `frac * max(|t|, floor)`: uniform steps in `log t` once `t > floor`.
    Proportional {
        frac: f64,
        floor: f64,
    },
}

impl MaxStep {
    fn at(&self, t: f64) -> f64 {
        match *self {
            MaxStep::Unbounded => f64::INFINITY,
            MaxStep::Fixed(h) => h,
            MaxStep::Proportional { frac, floor } => frac * t.abs().max(floor),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: MaxStep,
    /// Step-size underflow threshold relative to `|t|`.
    pub min_step_rel: f64,
    pub max_steps: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_step: MaxStep::Unbounded,
            min_step_rel: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// An accepted point of the trajectory together with the right-hand side there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<const N: usize> {
    Reached(Step<N>),
    Stopped(Step<N>),
    /// The controller needed a step below `min_step_rel * |t|`.
    StepUnderflow {
        last: Step<N>,
        h: f64,
    },
    /// Like `StepUnderflow`, but the last rejections came from non-finite stages.
    NonFinite {
        last: Step<N>,
    },
    MaxSteps {
        last: Step<N>,
    },
}

impl<const N: usize> Outcome<N> {
    pub fn last(&self) -> &Step<N> {
        match self {
            Outcome::Reached(s) | Outcome::Stopped(s) => s,
            Outcome::StepUnderflow { last, .. } | Outcome::NonFinite { last } | Outcome::MaxSteps { last } => last,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|x| x.is_finite())
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], s: &Settings) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = s.atol + s.rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &mut F, t0: f64, y0: &[f64; N], f0: &[f64; N], s: &Settings) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let norm = |x: &[f64; N]| -> f64 {
        let sum: f64 = (0..N).map(|i| (x[i] / (s.atol + s.rtol * y0[i].abs())).powi(2)).sum();
        (sum / N as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = combine(y0, h0, &[(1.0, f0)]);
    let f1 = f(t0 + h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = if finite(&f1) { norm(&diff) / h0 } else { f64::INFINITY };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let h = (100.0 * h0).min(h1);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        h0
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end > t0`.
///
/// `observe` sees the initial point and every accepted step; returning
/// [`Control::Stop`] ends the run with [`Outcome::Stopped`].
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    settings: &Settings,
    mut observe: O,
) -> Outcome<N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Step<N>) -> Control,
{
    let s = settings;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut current = Step { t, y, dy: k1 };
    if observe(&current) == Control::Stop {
        return Outcome::Stopped(current);
    }
    if !finite(&k1) {
        return Outcome::NonFinite { last: current };
    }

    let mut h = initial_step(&mut f, t, &y, &k1, s);
    let mut rejected_last = false;
    let mut nonfinite_last = false;
    let mut accepted = 0usize;

    loop {
        if t >= t_end {
            return Outcome::Reached(current);
        }
        if accepted >= s.max_steps {
            return Outcome::MaxSteps { last: current };
        }
        h = h.min(s.max_step.at(t));
        let remaining = t_end - t;
        let last_step = h >= remaining;
        if last_step {
            h = remaining;
        } else if h > 0.5 * remaining {
            // avoid a sliver of a final step
            h = 0.5 * remaining;
        }
        let h_min = s.min_step_rel * t.abs().max(f64::MIN_POSITIVE);
        if h < h_min {
            return if nonfinite_last {
                Outcome::NonFinite { last: current }
            } else {
                Outcome::StepUnderflow { last: current, h }
            };
        }

        let k2 = f(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if last_step { t_end } else { t + h };
        let k7 = f(t_new, &y_new);

        let stages_ok = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| finite(k)) && finite(&y_new);
        if !stages_ok {
            nonfinite_last = true;
            rejected_last = true;
            h *= 0.25;
            continue;
        }
        nonfinite_last = false;

        let err: [f64; N] =
            std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let e = error_norm(&err, &y, &y_new, s);
        let mut fac = if e == 0.0 { 5.0 } else { 0.9 * e.powf(-0.2) };
        fac = fac.clamp(0.2, 5.0);

        if e <= 1.0 {
            t = t_new;
            y = y_new;
            k1 = k7;
            accepted += 1;
            current = Step { t, y, dy: k1 };
            if observe(&current) == Control::Stop {
                return Outcome::Stopped(current);
            }
            if rejected_last {
                fac = fac.min(1.0);
            }
            rejected_last = false;
            h *= fac;
        } else {
            rejected_last = true;
            h *= fac.min(1.0);
        }
    }
}
