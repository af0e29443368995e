//! Small numerical kernels: finite-difference weights on scattered nodes,
//! quintic Hermite interpolation, extrapolation to the origin.

/// Fornberg weights for the derivatives `0..=order` at `x0` from values at `nodes`.
///
/// `weights[k][j]` multiplies `f(nodes[j])` in the approximation of `f^(k)(x0)`.
pub fn fd_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Window of `width` consecutive indices around `i`, shifted inward at the ends.
pub fn stencil(i: usize, len: usize, width: usize) -> std::ops::Range<usize> {
    let half = width / 2;
    let start = i.saturating_sub(half).min(len.saturating_sub(width));
    start..(start + width).min(len)
}

/// First derivative of tabulated `f` at every node, from `width`-point stencils.
pub fn derivative(x: &[f64], f: &[f64], width: usize) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let idx = stencil(i, x.len(), width);
            let w = fd_weights(x[i], &x[idx.clone()], 1);
            idx.zip(&w[1]).map(|(j, c)| c * f[j]).sum()
        })
        .collect()
}

/// First and second derivative at every node from `width`-point stencils.
pub fn derivatives2(x: &[f64], f: &[f64], width: usize) -> (Vec<f64>, Vec<f64>) {
    (0..x.len())
        .map(|i| {
            let idx = stencil(i, x.len(), width);
            let w = fd_weights(x[i], &x[idx.clone()], 2);
            let d1: f64 = idx.clone().zip(&w[1]).map(|(j, c)| c * f[j]).sum();
            let d2: f64 = idx.zip(&w[2]).map(|(j, c)| c * f[j]).sum();
            (d1, d2)
        })
        .unzip()
}

/// Quintic Hermite data at one node: value, first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// Value and first two derivatives at `x` of the quintic matching `a` at `xa` and
/// `b` at `xb` up to second derivatives.
pub fn quintic_hermite(xa: f64, a: Jet, xb: f64, b: Jet, x: f64) -> Jet {
    let h = xb - xa;
    let t = (x - xa) / h;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);

    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;

    let d10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d20 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d21 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    let d11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d01 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;

    let s10 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
    let s20 = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
    let s21 = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);
    let s11 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
    let s01 = 60.0 * t - 180.0 * t2 + 120.0 * t3;

    // h00 = 1 - h01 and d00 = -d01, s00 = -s01; written through the jump so that
    // constants are reproduced exactly
    let jump = b.f - a.f;
    let f = a.f + jump * h01 + h * (a.df * h10 + b.df * h11) + h * h * (a.d2f * h20 + b.d2f * h21);
    let df = jump * d01 / h + a.df * d10 + b.df * d11 + h * (a.d2f * d20 + b.d2f * d21);
    let d2f = jump * s01 / (h * h) + (a.df * s10 + b.df * s11) / h + a.d2f * s20 + b.d2f * s21;
    Jet { f, df, d2f }
}

/// Limit at `r = 0` of a smooth even function sampled at three small radii,
/// eliminating the `r^2` and `r^4` terms (Richardson-type weights).
pub fn extrapolate_to_origin(r: [f64; 3], q: [f64; 3]) -> f64 {
    let x = r.map(|ri| ri * ri);
    // Lagrange interpolation in x = r^2, evaluated at x = 0
    let mut acc = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if j != i {
                w *= x[j] / (x[j] - x[i]);
            }
        }
        acc += w * q[i];
    }
    acc
}

/// Integral of the cubic Hermite interpolant of `f` on `[a, b]`: trapezoid with
/// endpoint-derivative correction, exact for cubics.
pub fn hermite_trapezoid(h: f64, fa: f64, dfa: f64, fb: f64, dfb: f64) -> f64 {
    0.5 * h * (fa + fb) + h * h * (dfa - dfb) / 12.0
}
