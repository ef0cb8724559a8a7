//! Helpers shared by the integration suites: an adaptive-Simpson reference
//! integrator (an independent check on the graded product rules) and a
//! tangent-point integrand rebuilt from the public Gauss-map API.
#![allow(dead_code)]

use tangentpoint::{gauss_eval_at, CurveSamples};

fn simpson_slice(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_slice(fa, flm, fm, a, m);
    let right = simpson_slice(fm, frm, fb, m, b);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature with Richardson-style acceptance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson_slice(fa, fm, fb, a, b);
    simpson_recurse(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// u-averaged tangent-point integrand at offset w, assembled from the
/// public Gauss-map evaluator rather than the energy module's kernels.
pub fn tp_mean_at_w(samples: &CurveSamples, p: f64, q: f64, w: f64) -> f64 {
    let n = samples.n;
    let mut acc = 0.0;
    for i in 0..n {
        let u = samples.params[i];
        let ge = gauss_eval_at(samples, u, w).expect("offset off the diagonal");
        // inv_tp_radius = 2 |perp| / chord^2 recovers the projected chord.
        let perp = 0.5 * ge.inv_tp_radius * ge.chord * ge.chord;
        let s1 = samples.derivative_at(u + w).norm();
        acc += perp.powf(q) / ge.chord.powf(p) * samples.speeds[i] * s1;
    }
    acc / n as f64
}
