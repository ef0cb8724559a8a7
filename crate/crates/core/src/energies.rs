//! Energy functionals on sampled curves: the two-parameter tangent-point
//! family, its classical normalization, the minorants G and F with their
//! slices, fractional Willmore energies built on nonlocal mean curvature,
//! and three generic Gauss-map functionals.
//!
//! Every double integral runs over the sample grid in u and a graded
//! half-rule in w: the inner sum evaluates the kernel at offsets +delta and
//! -delta, which reaches both endpoint singularities of the w-integrand at
//! full floating-point resolution (the offset 1 - delta is never formed).
//! Grid-doubling in w supplies the error estimate and the divergence flag.

use crate::bounds;
use crate::error::{Error, Result};
use crate::gaussmap::project_perp;
use crate::output::{format_f64, json_bool, json_object, json_string};
use crate::quadrature::{graded_half_nodes, study_from_values, QuadratureSpec};
use crate::samples::{embeddedness_ratio, is_convex_planar, is_embedded_check, CurveSamples};
use crate::vec3::Vec3;
use rayon::prelude::*;

/// Minimum chord/arc ratio below which samples are rejected as
/// self-intersecting.
pub const EMBED_TOL: f64 = 0.01;

/// Fixed inner rule for the slice and mean-curvature operations that take
/// no quadrature spec.
const SLICE_NW: usize = 1024;
const SLICE_GRADING: f64 = 6.0;

/// Below this offset the near-diagonal kernels switch from point
/// differences to their curvature-based limits. Direct evaluation of
/// quantities like |P_perp_tangent(gamma(u+w) - gamma(u))| loses all
/// precision once the true O(w^2) value drops under the absolute rounding
/// noise of the curve points; the switch keeps the relative error at
/// O(w) <= 1e-6 on one side and O(eps / w^2) <= ~1e-5 on the other.
const W_TAYLOR: f64 = 1e-6;

/// |P_perp_tangent(gamma'')| at grid point i, the ingredient of every
/// near-diagonal limit: du_norm -> pk / speed, dw_norm -> pk / (2 speed),
/// |P_perp_tangent(chord vector)| -> pk w^2 / 2.
fn taylor_perp(samples: &CurveSamples, i: usize) -> Result<f64> {
    let d2 = samples.second_derivative_at(samples.params[i]);
    Ok(project_perp(samples.tangents[i], d2)?.norm())
}

/// Which Gauss-map partial derivative a generic functional consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZVar {
    U,
    W,
}

/// Discriminates the implemented functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    Tp,
    TpClassic,
    G,
    GSliceW,
    F,
    FSliceU,
    Willmore,
    I1,
    I2,
    I3,
}

impl EnergyKind {
    pub fn name(self) -> &'static str {
        match self {
            EnergyKind::Tp => "TP",
            EnergyKind::TpClassic => "TPClassic",
            EnergyKind::G => "G",
            EnergyKind::GSliceW => "GSliceW",
            EnergyKind::F => "F",
            EnergyKind::FSliceU => "FSliceU",
            EnergyKind::Willmore => "Willmore",
            EnergyKind::I1 => "I1",
            EnergyKind::I2 => "I2",
            EnergyKind::I3 => "I3",
        }
    }
}

/// Full description of one energy evaluation. Fields not used by `kind`
/// are ignored; the constructors fill them with neutral values.
#[derive(Debug, Clone, Copy)]
pub struct EnergySpec {
    pub kind: EnergyKind,
    pub p: f64,
    pub q: f64,
    /// Fractional order for Willmore.
    pub s: f64,
    /// Fixed w for GSliceW, fixed u for FSliceU.
    pub slice_value: f64,
    /// Which partial derivative I1 consumes.
    pub z_variable: ZVar,
}

impl EnergySpec {
    pub fn tp(p: f64, q: f64) -> Self {
        EnergySpec {
            kind: EnergyKind::Tp,
            p,
            q,
            s: 0.0,
            slice_value: 0.0,
            z_variable: ZVar::U,
        }
    }

    pub fn tp_classic(q: f64) -> Self {
        EnergySpec {
            kind: EnergyKind::TpClassic,
            ..EnergySpec::tp(2.0 * q, q)
        }
    }

    pub fn g(p: f64, q: f64) -> Self {
        EnergySpec {
            kind: EnergyKind::G,
            ..EnergySpec::tp(p, q)
        }
    }

    pub fn g_slice(p: f64, q: f64, w: f64) -> Self {
        EnergySpec {
            kind: EnergyKind::GSliceW,
            slice_value: w,
            ..EnergySpec::tp(p, q)
        }
    }

    pub fn f(p: f64, q: f64) -> Self {
        EnergySpec {
            kind: EnergyKind::F,
            ..EnergySpec::tp(p, q)
        }
    }

    pub fn f_slice(p: f64, q: f64, u: f64) -> Self {
        EnergySpec {
            kind: EnergyKind::FSliceU,
            slice_value: u,
            ..EnergySpec::tp(p, q)
        }
    }

    pub fn willmore(s: f64, p: f64) -> Self {
        EnergySpec {
            kind: EnergyKind::Willmore,
            p,
            q: f64::NAN,
            s,
            slice_value: 0.0,
            z_variable: ZVar::U,
        }
    }

    /// Exponent on the projected-tangent factor of F: alpha = p - q.
    pub fn alpha(&self) -> f64 {
        self.p - self.q
    }

    /// Exponent on the projected-chord-direction factor of F:
    /// beta = 2q - p; alpha + beta = q.
    pub fn beta(&self) -> f64 {
        2.0 * self.q - self.p
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            EnergyKind::Tp
            | EnergyKind::TpClassic
            | EnergyKind::G
            | EnergyKind::GSliceW
            | EnergyKind::F
            | EnergyKind::FSliceU => check_pq(self.p, self.q),
            EnergyKind::Willmore => check_willmore(self.s, self.p),
            EnergyKind::I1 | EnergyKind::I2 | EnergyKind::I3 => Ok(()),
        }
    }
}

/// One evaluated energy with its quadrature diagnostics. Parameter fields
/// are None when the functional does not use them.
#[derive(Debug, Clone)]
pub struct EnergyValue {
    pub kind: EnergyKind,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub value: f64,
    /// Difference between the last two grid-doubling levels; 0 when only
    /// one level was run.
    pub error_estimate: f64,
    pub n_u: usize,
    pub n_w: usize,
    /// False when the doubling sequence has not contracted to the
    /// requested tolerance; persistent growth is how infinite-energy
    /// exponent ranges manifest.
    pub converged: bool,
}

impl EnergyValue {
    pub fn to_json(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(format_f64).unwrap_or_else(|| "null".to_owned())
        }
        json_object(&[
            ("kind", json_string(self.kind.name())),
            ("p", opt(self.p)),
            ("q", opt(self.q)),
            ("s", opt(self.s)),
            ("value", format_f64(self.value)),
            ("error_estimate", format_f64(self.error_estimate)),
            ("N_u", self.n_u.to_string()),
            ("N_w", self.n_w.to_string()),
            ("converged", json_bool(self.converged)),
        ])
    }
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be >= 0, got {p}")));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q must be > 0, got {q}")));
    }
    Ok(())
}

fn check_willmore(s: f64, p: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fractional order s must lie in (0,1), got {s}"
        )));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Willmore power must be >= 1, got {p}"
        )));
    }
    Ok(())
}

fn ensure_embedded(samples: &CurveSamples) -> Result<()> {
    if !is_embedded_check(samples, EMBED_TOL) {
        return Err(Error::NotEmbedded {
            ratio: embeddedness_ratio(samples),
            tol: EMBED_TOL,
        });
    }
    Ok(())
}

fn ensure_arclength(samples: &CurveSamples) -> Result<()> {
    if !samples.is_arclength {
        return Err(Error::NotArcLength);
    }
    Ok(())
}

fn ensure_convex_planar_2d(samples: &CurveSamples) -> Result<()> {
    if samples.dims != 2 {
        return Err(Error::InvalidDims(samples.dims));
    }
    if !is_convex_planar(samples).is_convex {
        return Err(Error::NotConvexPlanar);
    }
    Ok(())
}

type Kernel<'a> = dyn Fn(usize, f64) -> Result<f64> + Sync + 'a;

/// Mean over the u-grid of the w-integral of `kernel(i, w)`, where w runs
/// over (0,1) realized as signed offsets +-delta with delta in (0, 1/2].
fn level_mean(samples: &CurveSamples, n_w: usize, grading: f64, kernel: &Kernel) -> Result<f64> {
    let (nodes, weights) = graded_half_nodes(n_w, grading)?;
    let rows: Vec<Result<f64>> = (0..samples.n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for (d, wt) in nodes.iter().zip(weights.iter()) {
                acc += wt * (kernel(i, *d)? + kernel(i, -*d)?);
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for row in rows {
        total += row?;
    }
    Ok(total / samples.n as f64)
}

struct RawIntegral {
    value: f64,
    error_estimate: f64,
    n_w: usize,
    converged: bool,
}

/// Runs `kernel` through the grid-doubling study prescribed by `quad`:
/// levels n_w, 2 n_w, ... The reported value is the finest level.
fn doubling_integral(
    samples: &CurveSamples,
    quad: &QuadratureSpec,
    kernel: &Kernel,
) -> Result<RawIntegral> {
    quad.validate()?;
    let mut values = Vec::with_capacity(quad.doubling_rounds);
    let mut n = quad.n_w;
    let mut finest = n;
    for _ in 0..quad.doubling_rounds {
        values.push(level_mean(samples, n, quad.grading_exponent, kernel)?);
        finest = n;
        n *= 2;
    }
    let error_estimate = if values.len() >= 2 {
        (values[values.len() - 1] - values[values.len() - 2]).abs()
    } else {
        0.0
    };
    let study = study_from_values(values, quad.convergence_rtol);
    Ok(RawIntegral {
        value: *study.values.last().expect("at least one level"),
        error_estimate,
        n_w: finest,
        converged: study.converged,
    })
}

fn tp_summand(samples: &CurveSamples, i: usize, w: f64, p: f64, q: f64) -> Result<f64> {
    let speed0 = samples.speeds[i];
    if w.abs() < W_TAYLOR {
        let perp = 0.5 * taylor_perp(samples, i)? * w * w;
        let chord = speed0 * w.abs();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        // perp^q and chord^p individually underflow at strong gradings even
        // though the quotient is a moderate w^(2q-p); combine in log space.
        return Ok((q * perp.ln() - p * chord.ln()).exp() * speed0 * speed0);
    }
    let t0 = samples.tangents[i];
    let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
    let delta = p1 - samples.points[i];
    let chord = delta.norm();
    if !(chord > 0.0) {
        return Err(Error::DegenerateDenominator(chord));
    }
    // P_perp_t0 annihilates t0 * w, so this equals P_perp_t0(delta) exactly
    // but without forming an O(w^2) residue from O(1) inputs.
    let perp = project_perp(t0, delta - t0 * w)?;
    Ok(perp.norm().powf(q) / chord.powf(p) * speed0 * t1.norm())
}

/// Generalized tangent-point energy: double integral of
/// |P_perp_tangent(chord vector)|^q / chord^p weighted by both speeds.
/// Exponents p >= 2q + 1 are admitted but come back flagged non-convergent
/// (grid sums grow without contraction).
pub fn tp_energy(
    samples: &CurveSamples,
    p: f64,
    q: f64,
    quad: &QuadratureSpec,
) -> Result<EnergyValue> {
    check_pq(p, q)?;
    ensure_embedded(samples)?;
    let kernel = move |i: usize, w: f64| tp_summand(samples, i, w, p, q);
    let raw = doubling_integral(samples, quad, &kernel)?;
    Ok(EnergyValue {
        kind: EnergyKind::Tp,
        p: Some(p),
        q: Some(q),
        s: None,
        value: raw.value,
        error_estimate: raw.error_estimate,
        n_u: samples.n,
        n_w: raw.n_w,
        converged: raw.converged,
    })
}

/// One w-level of the tangent-point sum, exposed so callers can drive
/// their own convergence studies.
pub fn tp_energy_at(
    samples: &CurveSamples,
    p: f64,
    q: f64,
    n_w: usize,
    grading: f64,
) -> Result<f64> {
    check_pq(p, q)?;
    ensure_embedded(samples)?;
    let kernel = move |i: usize, w: f64| tp_summand(samples, i, w, p, q);
    level_mean(samples, n_w, grading, &kernel)
}

/// Classical tangent-point energy: reciprocal tangent-circle radius to the
/// q-th power, weighted by both speeds. Summand-for-summand this is
/// 2^q times the generalized energy at p = 2q.
pub fn tp_classic(samples: &CurveSamples, q: f64, quad: &QuadratureSpec) -> Result<EnergyValue> {
    check_pq(2.0 * q, q)?;
    ensure_embedded(samples)?;
    let kernel = move |i: usize, w: f64| -> Result<f64> {
        let speed0 = samples.speeds[i];
        if w.abs() < W_TAYLOR {
            // Limit of 2 perp / chord^2: the curvature of the curve itself.
            let inv_radius = taylor_perp(samples, i)? / (speed0 * speed0);
            return Ok(inv_radius.powf(q) * speed0 * speed0);
        }
        let t0 = samples.tangents[i];
        let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
        let delta = p1 - samples.points[i];
        let chord = delta.norm();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        let perp = project_perp(t0, delta - t0 * w)?.norm();
        let inv_radius = 2.0 * perp / (chord * chord);
        Ok(inv_radius.powf(q) * speed0 * t1.norm())
    };
    let raw = doubling_integral(samples, quad, &kernel)?;
    Ok(EnergyValue {
        kind: EnergyKind::TpClassic,
        p: None,
        q: Some(q),
        s: None,
        value: raw.value,
        error_estimate: raw.error_estimate,
        n_u: samples.n,
        n_w: raw.n_w,
        converged: raw.converged,
    })
}

fn g_summand(samples: &CurveSamples, i: usize, w: f64, p: f64, q: f64) -> Result<f64> {
    if w.abs() < W_TAYLOR {
        let speed0 = samples.speeds[i];
        let du_norm = taylor_perp(samples, i)? / speed0;
        let chord = speed0 * w.abs();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        return Ok((0.5 * du_norm).powf(q) * chord.powf(2.0 * q - p));
    }
    let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
    let delta = p1 - samples.points[i];
    let chord = delta.norm();
    if !(chord > 0.0) {
        return Err(Error::DegenerateDenominator(chord));
    }
    let phi = delta / chord;
    let du_norm = project_perp(phi, t1 - samples.tangents[i])?.norm() / chord;
    Ok((0.5 * du_norm).powf(q) * chord.powf(2.0 * q - p))
}

/// Minorant G: double integral of (half the u-derivative of the Gauss map)
/// to the q-th power times chord^(2q-p). Deliberately carries no speed
/// weights.
pub fn g_energy(
    samples: &CurveSamples,
    p: f64,
    q: f64,
    quad: &QuadratureSpec,
) -> Result<EnergyValue> {
    check_pq(p, q)?;
    ensure_embedded(samples)?;
    let kernel = move |i: usize, w: f64| g_summand(samples, i, w, p, q);
    let raw = doubling_integral(samples, quad, &kernel)?;
    Ok(EnergyValue {
        kind: EnergyKind::G,
        p: Some(p),
        q: Some(q),
        s: None,
        value: raw.value,
        error_estimate: raw.error_estimate,
        n_u: samples.n,
        n_w: raw.n_w,
        converged: raw.converged,
    })
}

/// Fixed-offset slice of G: the u-integral alone at offset w.
pub fn g_slice_w(samples: &CurveSamples, p: f64, q: f64, w: f64) -> Result<f64> {
    check_pq(p, q)?;
    ensure_embedded(samples)?;
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "slice offset must lie in (0,1), got {w}"
        )));
    }
    let mut acc = 0.0;
    for i in 0..samples.n {
        acc += g_summand(samples, i, w, p, q)?;
    }
    Ok(acc / samples.n as f64)
}

fn f_summand(samples: &CurveSamples, i: usize, w: f64, alpha: f64, beta: f64) -> Result<f64> {
    let t0 = samples.tangents[i];
    let speed0 = samples.speeds[i];
    if w.abs() < W_TAYLOR {
        let pk = taylor_perp(samples, i)?;
        let dw_norm = 0.5 * pk / speed0;
        let perp_tangent = 0.5 * pk * w.abs() / speed0;
        return Ok(perp_tangent.powf(beta) * dw_norm.powf(alpha));
    }
    let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
    let delta = p1 - samples.points[i];
    let chord = delta.norm();
    if !(chord > 0.0) {
        return Err(Error::DegenerateDenominator(chord));
    }
    let phi = delta / chord;
    let dw_norm = project_perp(phi, t1)?.norm() / chord;
    let perp_tangent = project_perp(t0, delta - t0 * w)?.norm() / chord;
    Ok(perp_tangent.powf(beta) * dw_norm.powf(alpha))
}

/// Minorant F on arc-length curves: double integral of
/// |P_perp_tangent(Gauss direction)|^(2q-p) |d_w Gauss|^(p-q).
pub fn f_energy(
    samples: &CurveSamples,
    p: f64,
    q: f64,
    quad: &QuadratureSpec,
) -> Result<EnergyValue> {
    check_pq(p, q)?;
    ensure_arclength(samples)?;
    ensure_embedded(samples)?;
    let (alpha, beta) = (p - q, 2.0 * q - p);
    let kernel = move |i: usize, w: f64| f_summand(samples, i, w, alpha, beta);
    let raw = doubling_integral(samples, quad, &kernel)?;
    Ok(EnergyValue {
        kind: EnergyKind::F,
        p: Some(p),
        q: Some(q),
        s: None,
        value: raw.value,
        error_estimate: raw.error_estimate,
        n_u: samples.n,
        n_w: raw.n_w,
        converged: raw.converged,
    })
}

/// Fixed-base slice of F: the w-integral alone at grid point i.
pub fn f_slice_u(samples: &CurveSamples, p: f64, q: f64, i: usize) -> Result<f64> {
    check_pq(p, q)?;
    ensure_arclength(samples)?;
    ensure_embedded(samples)?;
    let (alpha, beta) = (p - q, 2.0 * q - p);
    let i = i % samples.n;
    let (nodes, weights) = graded_half_nodes(SLICE_NW, SLICE_GRADING)?;
    let mut acc = 0.0;
    for (d, wt) in nodes.iter().zip(weights.iter()) {
        acc += wt * (f_summand(samples, i, *d, alpha, beta)?
            + f_summand(samples, i, -*d, alpha, beta)?);
    }
    Ok(acc)
}

/// Sign of the enclosed area: +1 for counterclockwise parametrizations.
fn orientation_sign(samples: &CurveSamples) -> f64 {
    let mut acc = 0.0;
    for i in 0..samples.n {
        acc += samples.points[i].x * samples.tangents[i].y
            - samples.points[i].y * samples.tangents[i].x;
    }
    if acc >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn h_summand(samples: &CurveSamples, i: usize, w: f64, s: f64, orient: f64) -> Result<f64> {
    if w.abs() < W_TAYLOR {
        let t0 = samples.tangents[i];
        let speed0 = samples.speeds[i];
        let d2 = samples.second_derivative_at(samples.params[i]);
        let normal = Vec3::new(-t0.y * orient / speed0, t0.x * orient / speed0, 0.0);
        let num = 0.5 * w * w * normal.dot(d2);
        let chord = speed0 * w.abs();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        return Ok(num / chord.powf(2.0 + s) * speed0);
    }
    let (py, ty) = samples.model().point_and_derivative(samples.params[i] + w);
    let d = samples.points[i] - py;
    let chord = d.norm();
    if !(chord > 0.0) {
        return Err(Error::DegenerateDenominator(chord));
    }
    let speed = ty.norm();
    // Inward normal of a counterclockwise convex curve: tangent rotated by
    // +90 degrees.
    let normal = Vec3::new(-ty.y * orient / speed, ty.x * orient / speed, 0.0);
    // normal is orthogonal to ty exactly, so adding ty * w changes nothing
    // in exact arithmetic; it removes the O(w) bulk of d whose rounding
    // noise would otherwise bury the O(w^2) normal component.
    Ok(normal.dot(d + ty * w) / chord.powf(2.0 + s) * speed)
}

fn h_gauss_summand(samples: &CurveSamples, i: usize, w: f64, s: f64) -> Result<f64> {
    if w.abs() < W_TAYLOR {
        let speed0 = samples.speeds[i];
        let dw_norm = 0.5 * taylor_perp(samples, i)? / speed0;
        let chord = speed0 * w.abs();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        return Ok(dw_norm * chord.powf(-s));
    }
    let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
    let delta = p1 - samples.points[i];
    let chord = delta.norm();
    if !(chord > 0.0) {
        return Err(Error::DegenerateDenominator(chord));
    }
    let dw_norm = project_perp(delta / chord, t1)?.norm() / chord;
    Ok(dw_norm * chord.powf(-s))
}

fn h_value(
    samples: &CurveSamples,
    i: usize,
    s: f64,
    orient: f64,
    nodes: &[f64],
    weights: &[f64],
) -> Result<f64> {
    let mut acc = 0.0;
    for (d, wt) in nodes.iter().zip(weights.iter()) {
        acc += wt * (h_summand(samples, i, *d, s, orient)? + h_summand(samples, i, -*d, s, orient)?);
    }
    Ok(acc)
}

/// Nonlocal mean curvature of a convex planar curve at grid point i:
/// integral against the inward normal of the kernel (x - y) / |x - y|^(2+s).
/// The normalizing constant is taken as 1.
pub fn nonlocal_mean_curvature(samples: &CurveSamples, i: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fractional order s must lie in (0,1), got {s}"
        )));
    }
    ensure_convex_planar_2d(samples)?;
    let (nodes, weights) = graded_half_nodes(SLICE_NW, SLICE_GRADING)?;
    h_value(
        samples,
        i % samples.n,
        s,
        orientation_sign(samples),
        &nodes,
        &weights,
    )
}

/// Same quantity through the Gauss-map identity valid on convex curves:
/// integral of |d_w Gauss| times chord^(-s).
pub fn nonlocal_mean_curvature_gauss(samples: &CurveSamples, i: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fractional order s must lie in (0,1), got {s}"
        )));
    }
    ensure_convex_planar_2d(samples)?;
    let (nodes, weights) = graded_half_nodes(SLICE_NW, SLICE_GRADING)?;
    let i = i % samples.n;
    let mut acc = 0.0;
    for (d, wt) in nodes.iter().zip(weights.iter()) {
        acc += wt * (h_gauss_summand(samples, i, *d, s)? + h_gauss_summand(samples, i, -*d, s)?);
    }
    Ok(acc)
}

/// Fractional Willmore energy: the u-integral of |H|^p against arc length,
/// with H the nonlocal mean curvature of order s.
pub fn willmore_fractional(
    samples: &CurveSamples,
    s: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<EnergyValue> {
    check_willmore(s, p)?;
    ensure_convex_planar_2d(samples)?;
    quad.validate()?;
    let orient = orientation_sign(samples);
    let mut values = Vec::with_capacity(quad.doubling_rounds);
    let mut n = quad.n_w;
    let mut finest = n;
    for _ in 0..quad.doubling_rounds {
        let (nodes, weights) = graded_half_nodes(n, quad.grading_exponent)?;
        let rows: Vec<Result<f64>> = (0..samples.n)
            .into_par_iter()
            .map(|i| {
                let h = h_value(samples, i, s, orient, &nodes, &weights)?;
                Ok(h.abs().powf(p) * samples.speeds[i])
            })
            .collect();
        let mut total = 0.0;
        for row in rows {
            total += row?;
        }
        values.push(total / samples.n as f64);
        finest = n;
        n *= 2;
    }
    let error_estimate = if values.len() >= 2 {
        (values[values.len() - 1] - values[values.len() - 2]).abs()
    } else {
        0.0
    };
    let study = study_from_values(values, quad.convergence_rtol);
    Ok(EnergyValue {
        kind: EnergyKind::Willmore,
        p: Some(p),
        q: None,
        s: Some(s),
        value: *study.values.last().expect("at least one level"),
        error_estimate,
        n_u: samples.n,
        n_w: finest,
        converged: study.converged,
    })
}

/// Generic functional of one Gauss-map partial derivative:
/// double integral of f(|d_z Gauss|). No speed weights on purpose, so the
/// value genuinely depends on the parametrization.
pub fn functional_i1<F>(
    samples: &CurveSamples,
    f: F,
    z: ZVar,
    quad: &QuadratureSpec,
) -> Result<EnergyValue>
where
    F: Fn(f64) -> f64 + Sync,
{
    ensure_embedded(samples)?;
    let kernel = move |i: usize, w: f64| -> Result<f64> {
        if w.abs() < W_TAYLOR {
            let pk = taylor_perp(samples, i)?;
            let deriv = match z {
                ZVar::U => pk / samples.speeds[i],
                ZVar::W => 0.5 * pk / samples.speeds[i],
            };
            return Ok(f(deriv));
        }
        let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
        let delta = p1 - samples.points[i];
        let chord = delta.norm();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        let phi = delta / chord;
        let deriv = match z {
            ZVar::U => project_perp(phi, t1 - samples.tangents[i])?.norm() / chord,
            ZVar::W => project_perp(phi, t1)?.norm() / chord,
        };
        Ok(f(deriv))
    };
    let raw = doubling_integral(samples, quad, &kernel)?;
    Ok(EnergyValue {
        kind: EnergyKind::I1,
        p: None,
        q: None,
        s: None,
        value: raw.value,
        error_estimate: raw.error_estimate,
        n_u: samples.n,
        n_w: raw.n_w,
        converged: raw.converged,
    })
}

/// Generic functional on arc-length curves: double integral of
/// f(|d_u Gauss|) / g(chord^2).
pub fn functional_i2<F, G>(
    samples: &CurveSamples,
    f: F,
    g: G,
    quad: &QuadratureSpec,
) -> Result<EnergyValue>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    ensure_arclength(samples)?;
    ensure_embedded(samples)?;
    let kernel = move |i: usize, w: f64| -> Result<f64> {
        if w.abs() < W_TAYLOR {
            let speed0 = samples.speeds[i];
            let du_norm = taylor_perp(samples, i)? / speed0;
            let chord = speed0 * w.abs();
            return Ok(f(du_norm) / g(chord * chord));
        }
        let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
        let delta = p1 - samples.points[i];
        let chord = delta.norm();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        let phi = delta / chord;
        let du_norm = project_perp(phi, t1 - samples.tangents[i])?.norm() / chord;
        Ok(f(du_norm) / g(chord * chord))
    };
    let raw = doubling_integral(samples, quad, &kernel)?;
    Ok(EnergyValue {
        kind: EnergyKind::I2,
        p: None,
        q: None,
        s: None,
        value: raw.value,
        error_estimate: raw.error_estimate,
        n_u: samples.n,
        n_w: raw.n_w,
        converged: raw.converged,
    })
}

/// Generic functional of the tangent/Gauss angle: double integral of
/// g(<unit tangent, Gauss direction>) |d_w Gauss|.
pub fn functional_i3<G>(samples: &CurveSamples, g: G, quad: &QuadratureSpec) -> Result<EnergyValue>
where
    G: Fn(f64) -> f64 + Sync,
{
    ensure_embedded(samples)?;
    let kernel = move |i: usize, w: f64| -> Result<f64> {
        let speed0 = samples.speeds[i];
        if w.abs() < W_TAYLOR {
            let pk = taylor_perp(samples, i)?;
            let dw_norm = 0.5 * pk / speed0;
            // Tangent/chord angle shrinks like pk |w| / (2 speed); keep the
            // quadratic so integrable singularities of g at +-1 stay finite.
            let theta = 0.5 * pk * w.abs() / speed0;
            let cos_angle = w.signum() * (1.0 - 0.5 * theta * theta);
            return Ok(g(cos_angle) * dw_norm);
        }
        let (p1, t1) = samples.model().point_and_derivative(samples.params[i] + w);
        let delta = p1 - samples.points[i];
        let chord = delta.norm();
        if !(chord > 0.0) {
            return Err(Error::DegenerateDenominator(chord));
        }
        let phi = delta / chord;
        let dw_norm = project_perp(phi, t1)?.norm() / chord;
        let cos_angle = samples.tangents[i].dot(phi) / speed0;
        Ok(g(cos_angle) * dw_norm)
    };
    let raw = doubling_integral(samples, quad, &kernel)?;
    Ok(EnergyValue {
        kind: EnergyKind::I3,
        p: None,
        q: None,
        s: None,
        value: raw.value,
        error_estimate: raw.error_estimate,
        n_u: samples.n,
        n_w: raw.n_w,
        converged: raw.converged,
    })
}

/// Mean-square chord length against its shift bound: returns
/// (integral of |gamma(t+shift) - gamma(t)|^2, (sin(pi shift)/pi)^2 times
/// the integral of |gamma'|^2), with the shift snapped to the sample grid.
/// The first never exceeds the second, with equality exactly at unit-speed
/// circles.
pub fn wirtinger_check(samples: &CurveSamples, shift: f64) -> Result<(f64, f64)> {
    ensure_arclength(samples)?;
    let n = samples.n;
    let j = ((shift * n as f64).round() as i64).rem_euclid(n as i64) as usize;
    let snapped = j as f64 / n as f64;
    let mut lhs = 0.0;
    let mut speed_sq = 0.0;
    for i in 0..n {
        let d = samples.points[(i + j) % n] - samples.points[i];
        lhs += d.norm_sq();
        speed_sq += samples.speeds[i] * samples.speeds[i];
    }
    lhs /= n as f64;
    speed_sq /= n as f64;
    let factor = (std::f64::consts::PI * snapped).sin() / std::f64::consts::PI;
    Ok((lhs, factor * factor * speed_sq))
}

/// Dispatches the closed-form kinds of `EnergySpec`. The generic
/// functionals I1, I2, I3 take callables and must be invoked directly.
pub fn evaluate(
    samples: &CurveSamples,
    spec: &EnergySpec,
    quad: &QuadratureSpec,
) -> Result<EnergyValue> {
    spec.validate()?;
    match spec.kind {
        EnergyKind::Tp => tp_energy(samples, spec.p, spec.q, quad),
        EnergyKind::TpClassic => tp_classic(samples, spec.q, quad),
        EnergyKind::G => g_energy(samples, spec.p, spec.q, quad),
        EnergyKind::GSliceW => {
            let value = g_slice_w(samples, spec.p, spec.q, spec.slice_value)?;
            Ok(EnergyValue {
                kind: EnergyKind::GSliceW,
                p: Some(spec.p),
                q: Some(spec.q),
                s: None,
                value,
                error_estimate: 0.0,
                n_u: samples.n,
                n_w: 0,
                converged: true,
            })
        }
        EnergyKind::F => f_energy(samples, spec.p, spec.q, quad),
        EnergyKind::FSliceU => {
            let i = (spec.slice_value * samples.n as f64).round() as usize % samples.n;
            let value = f_slice_u(samples, spec.p, spec.q, i)?;
            Ok(EnergyValue {
                kind: EnergyKind::FSliceU,
                p: Some(spec.p),
                q: Some(spec.q),
                s: None,
                value,
                error_estimate: 0.0,
                n_u: samples.n,
                n_w: SLICE_NW,
                converged: true,
            })
        }
        EnergyKind::Willmore => willmore_fractional(samples, spec.s, spec.p, quad),
        EnergyKind::I1 | EnergyKind::I2 | EnergyKind::I3 => Err(Error::InvalidParameter(
            "generic functionals take callables; use functional_i1/i2/i3".into(),
        )),
    }
}

/// Closed-form lower bound matching `spec` for a curve of length `length`,
/// when one exists: the sharp sin-power bound for TP and TPClassic (scaled
/// by 2^q) and the disk value for Willmore.
pub fn bound_for_spec(spec: &EnergySpec, length: f64) -> Result<Option<f64>> {
    match spec.kind {
        EnergyKind::Tp | EnergyKind::G | EnergyKind::F => {
            Ok(Some(bounds::tp_lower_bound(length, spec.p, spec.q)?))
        }
        EnergyKind::TpClassic => Ok(Some(
            2.0f64.powf(spec.q) * bounds::tp_lower_bound(length, 2.0 * spec.q, spec.q)?,
        )),
        EnergyKind::Willmore => Ok(Some(bounds::willmore_lower_bound(length, spec.s, spec.p)?)),
        _ => Ok(None),
    }
}
