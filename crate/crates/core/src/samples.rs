//! Sampled curve grids and reparametrization.
//!
//! Energies integrate over off-grid offsets u + w, so a sample set keeps an
//! analytic evaluator alongside the grid arrays: either the Fourier curve
//! itself or its arc-length reparametrization (Fourier evaluation composed
//! with a Newton inversion of the cumulative length).

use crate::curves::FourierCurve;
use crate::error::{Error, Result};
use crate::vec3::{symmetric_eigen_3x3, Vec3};

/// Minimum grid size accepted anywhere; coarser grids cannot resolve even
/// the fixture curves.
pub const MIN_SAMPLES: usize = 16;

/// 8-point Gauss-Legendre rule on [-1, 1]; exact through degree 15, which
/// makes per-cell speed integrals of trigonometric polynomials accurate to
/// machine precision at the table resolutions used here.
const GL8: [(f64, f64); 8] = [
    (-0.9602898564975362, 0.10122853629037626),
    (-0.7966664774136267, 0.22238103445337448),
    (-0.5255324099163290, 0.31370664587788727),
    (-0.1834346424956498, 0.36268378337836198),
    (0.1834346424956498, 0.36268378337836198),
    (0.5255324099163290, 0.31370664587788727),
    (0.7966664774136267, 0.22238103445337448),
    (0.9602898564975362, 0.10122853629037626),
];

/// Arc-length reparametrization of a Fourier curve. Callers pass the unit
/// parameter t in [0, 1); internally t maps to arc length s = t * L and the
/// original parameter u solves arclen(u) = s.
#[derive(Debug, Clone)]
pub struct ArcLengthCurve {
    base: FourierCurve,
    length: f64,
    /// cum[k] = arc length of gamma([0, k / table_n]), k = 0..=table_n.
    cum: Vec<f64>,
}

impl ArcLengthCurve {
    pub fn new(base: FourierCurve) -> Result<ArcLengthCurve> {
        base.validate()?;
        let table_n = (128 * (base.modes + 1)).clamp(2048, 16384);
        let mut cum = Vec::with_capacity(table_n + 1);
        cum.push(0.0);
        let h = 1.0 / table_n as f64;
        let mut total = 0.0;
        for k in 0..table_n {
            let a = k as f64 * h;
            let mut cell = 0.0;
            for &(x, w) in &GL8 {
                cell += w * base.derivative(a + 0.5 * h * (x + 1.0)).norm();
            }
            total += cell * 0.5 * h;
            cum.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::ZeroLength);
        }
        Ok(ArcLengthCurve {
            base,
            length: total,
            cum,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn base(&self) -> &FourierCurve {
        &self.base
    }

    fn arclen_from(&self, cell: usize, u: f64) -> f64 {
        let table_n = self.cum.len() - 1;
        let a = cell as f64 / table_n as f64;
        let mut acc = 0.0;
        for &(x, w) in &GL8 {
            acc += w * self.base.derivative(a + 0.5 * (u - a) * (x + 1.0)).norm();
        }
        self.cum[cell] + acc * 0.5 * (u - a)
    }

    /// Solves arclen(u) = t * length for u in [0, 1). Newton from a table
    /// interpolation, with bisection as a safety net.
    pub fn invert(&self, t: f64) -> Result<f64> {
        let t = t - t.floor();
        let s = t * self.length;
        let table_n = self.cum.len() - 1;
        let cell = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(k) => k.min(table_n - 1),
            Err(k) => k.saturating_sub(1).min(table_n - 1),
        };
        let h = 1.0 / table_n as f64;
        let (mut lo, mut hi) = (cell as f64 * h, (cell + 1) as f64 * h);
        let seg = self.cum[cell + 1] - self.cum[cell];
        let mut u = if seg > 0.0 {
            lo + h * (s - self.cum[cell]) / seg
        } else {
            0.5 * (lo + hi)
        };
        let tol = 1e-14 * self.length.max(1.0);
        for _ in 0..60 {
            let f = self.arclen_from(cell, u) - s;
            if f.abs() <= tol {
                return Ok(u - u.floor());
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let speed = self.base.derivative(u).norm();
            let step = if speed > 0.0 { f / speed } else { 0.0 };
            u -= step;
            if !(lo..=hi).contains(&u) {
                u = 0.5 * (lo + hi);
            }
        }
        Err(Error::ArcLengthInversion(t))
    }

    pub fn point(&self, t: f64) -> Result<Vec3> {
        Ok(self.base.point(self.invert(t)?))
    }

    /// d gamma / dt = gamma'(u) L / |gamma'(u)|; constant speed L.
    pub fn derivative(&self, t: f64) -> Result<Vec3> {
        let u = self.invert(t)?;
        let d = self.base.derivative(u);
        Ok(d * (self.length / d.norm()))
    }

    /// Chain rule with u'(t) = L / |gamma'| and
    /// u''(t) = -L^2 <gamma', gamma''> / |gamma'|^4.
    pub fn second_derivative(&self, t: f64) -> Result<Vec3> {
        let u = self.invert(t)?;
        let d1 = self.base.derivative(u);
        let d2 = self.base.second_derivative(u);
        let n2 = d1.norm_sq();
        let l2 = self.length * self.length;
        Ok(d2 * (l2 / n2) - d1 * (l2 * d1.dot(d2) / (n2 * n2)))
    }
}

/// Analytic evaluator carried along with a sample grid.
#[derive(Debug, Clone)]
pub enum CurveModel {
    Fourier(FourierCurve),
    ArcLength(ArcLengthCurve),
}

impl CurveModel {
    pub fn dims(&self) -> usize {
        match self {
            CurveModel::Fourier(c) => c.dims,
            CurveModel::ArcLength(c) => c.base().dims,
        }
    }

    pub fn point(&self, u: f64) -> Vec3 {
        match self {
            CurveModel::Fourier(c) => c.point(u),
            CurveModel::ArcLength(c) => c.point(u).expect("inversion converged at build time"),
        }
    }

    pub fn derivative(&self, u: f64) -> Vec3 {
        match self {
            CurveModel::Fourier(c) => c.derivative(u),
            CurveModel::ArcLength(c) => c.derivative(u).expect("inversion converged at build time"),
        }
    }

    pub fn second_derivative(&self, u: f64) -> Vec3 {
        match self {
            CurveModel::Fourier(c) => c.second_derivative(u),
            CurveModel::ArcLength(c) => c
                .second_derivative(u)
                .expect("inversion converged at build time"),
        }
    }

    pub fn point_and_derivative(&self, u: f64) -> (Vec3, Vec3) {
        match self {
            CurveModel::Fourier(c) => c.point_and_derivative(u),
            CurveModel::ArcLength(_) => (self.point(u), self.derivative(u)),
        }
    }
}

/// A curve sampled on the uniform grid u_i = i / n, plus the analytic model
/// that produced it.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub n: usize,
    pub dims: usize,
    pub params: Vec<f64>,
    pub points: Vec<Vec3>,
    pub tangents: Vec<Vec3>,
    pub speeds: Vec<f64>,
    pub length: f64,
    pub is_arclength: bool,
    model: CurveModel,
}

impl CurveSamples {
    pub fn model(&self) -> &CurveModel {
        &self.model
    }

    pub fn point_at(&self, u: f64) -> Vec3 {
        self.model.point(u)
    }

    pub fn derivative_at(&self, u: f64) -> Vec3 {
        self.model.derivative(u)
    }

    pub fn second_derivative_at(&self, u: f64) -> Vec3 {
        self.model.second_derivative(u)
    }
}

fn build_samples(model: CurveModel, n: usize) -> Result<CurveSamples> {
    if n < MIN_SAMPLES {
        return Err(Error::GridTooSmall(n, MIN_SAMPLES));
    }
    let dims = model.dims();
    let mut params = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut speeds = Vec::with_capacity(n);
    for i in 0..n {
        let u = i as f64 / n as f64;
        let (p, d) = model.point_and_derivative(u);
        let speed = d.norm();
        if !(speed > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "vanishing tangent at u = {u}; curve is not an immersion"
            )));
        }
        params.push(u);
        points.push(p);
        tangents.push(d);
        speeds.push(speed);
    }
    let length = match &model {
        CurveModel::Fourier(_) => speeds.iter().sum::<f64>() / n as f64,
        CurveModel::ArcLength(c) => c.length(),
    };
    let is_arclength = speeds
        .iter()
        .all(|&s| (s - length).abs() <= 1e-8 * length);
    Ok(CurveSamples {
        n,
        dims,
        params,
        points,
        tangents,
        speeds,
        length,
        is_arclength,
        model,
    })
}

/// Samples a curve at n uniform parameter values.
pub fn sample(curve: &FourierCurve, n: usize) -> Result<CurveSamples> {
    curve.validate()?;
    build_samples(CurveModel::Fourier(curve.clone()), n)
}

/// Samples the arc-length reparametrization at n uniform values; the result
/// has constant speed equal to the total length.
pub fn resample_arclength(curve: &FourierCurve, n: usize) -> Result<CurveSamples> {
    curve.validate()?;
    let model = ArcLengthCurve::new(curve.clone())?;
    build_samples(CurveModel::ArcLength(model), n)
}

/// Smallest chord-to-arc ratio over all sample pairs, normalized by length:
/// min_{i<j} |p_j - p_i| / d(u_i, u_j) where d is the intrinsic (shorter
/// arc) distance. Self-intersecting curves drive this toward zero.
pub fn embeddedness_ratio(samples: &CurveSamples) -> f64 {
    let n = samples.n;
    let mut min_ratio = f64::INFINITY;
    // Intrinsic distance along the curve needs cumulative arc length.
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        // Trapezoid per cell; adequate because the ratio check is coarse.
        let next = samples.speeds[(i + 1) % n];
        cum[i + 1] = cum[i] + 0.5 * (samples.speeds[i] + next) / n as f64;
    }
    let total = cum[n];
    for i in 0..n {
        for j in (i + 1)..n {
            let chord = (samples.points[j] - samples.points[i]).norm();
            let along = cum[j] - cum[i];
            let d_intr = along.min(total - along);
            if d_intr > 0.0 {
                min_ratio = min_ratio.min(chord / d_intr);
            }
        }
    }
    min_ratio
}

/// True when the chord-to-arc ratio stays above tol (relative scale-free
/// threshold; 0 for genuinely self-intersecting grids).
pub fn is_embedded_check(samples: &CurveSamples, tol: f64) -> bool {
    embeddedness_ratio(samples) >= tol
}

/// Diagnosis of planarity and convexity from a sample grid.
#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub is_planar: bool,
    pub is_convex: bool,
    /// Sum of signed turning angles between consecutive tangents, in the
    /// best-fit plane; +-2 pi for simple convex curves.
    pub total_turning: f64,
    pub min_signed_curvature: f64,
    pub max_signed_curvature: f64,
}

/// Tests whether the sampled curve lies in a plane and, if so, whether the
/// signed curvature keeps one sign (allowing flat stretches) while the
/// tangent turns by exactly one revolution.
pub fn is_convex_planar(samples: &CurveSamples) -> ConvexityReport {
    let n = samples.n;
    let centroid = samples.points.iter().fold(Vec3::ZERO, |a, &p| a + p) / n as f64;
    let mut cov = [[0.0f64; 3]; 3];
    let mut radius: f64 = 0.0;
    for p in &samples.points {
        let d = *p - centroid;
        radius = radius.max(d.norm());
        let arr = [d.x, d.y, d.z];
        for r in 0..3 {
            for c in 0..3 {
                cov[r][c] += arr[r] * arr[c];
            }
        }
    }
    let (_evals, evecs) = symmetric_eigen_3x3(cov);
    // Eigenvalues ascending: evecs[0] is the candidate plane normal.
    let normal = evecs[0];
    let (e1, e2) = (evecs[2], evecs[1]);
    let diameter = 2.0 * radius;
    let mut max_off = 0.0f64;
    for p in &samples.points {
        max_off = max_off.max((*p - centroid).dot(normal).abs());
    }
    let is_planar = max_off <= 1e-9 * diameter.max(f64::MIN_POSITIVE);

    // Signed turning between consecutive in-plane tangents.
    let mut total_turning = 0.0;
    let mut min_curv = f64::INFINITY;
    let mut max_curv = f64::NEG_INFINITY;
    let mut degenerate = false;
    for i in 0..n {
        let t0 = samples.tangents[i];
        let t1 = samples.tangents[(i + 1) % n];
        let a = (t0.dot(e1), t0.dot(e2));
        let b = (t1.dot(e1), t1.dot(e2));
        let na = (a.0 * a.0 + a.1 * a.1).sqrt();
        let nb = (b.0 * b.0 + b.1 * b.1).sqrt();
        if na < 1e-12 * samples.speeds[i] || nb < 1e-12 * samples.speeds[(i + 1) % n] {
            degenerate = true;
            continue;
        }
        let cross = a.0 * b.1 - a.1 * b.0;
        let dot = a.0 * b.0 + a.1 * b.1;
        let dtheta = cross.atan2(dot);
        total_turning += dtheta;
        let ds = 0.5 * (samples.speeds[i] + samples.speeds[(i + 1) % n]) / n as f64;
        let curv = dtheta / ds;
        min_curv = min_curv.min(curv);
        max_curv = max_curv.max(curv);
    }
    // Orient so total turning is positive; the sign is a choice of plane
    // orientation, not a property of the curve.
    if total_turning < 0.0 {
        total_turning = -total_turning;
        let (lo, hi) = (min_curv, max_curv);
        min_curv = -hi;
        max_curv = -lo;
    }
    let scale = max_curv.abs().max(min_curv.abs()).max(f64::MIN_POSITIVE);
    let sign_change = min_curv < -1e-9 * scale && max_curv > 1e-9 * scale;
    let one_turn = (total_turning - 2.0 * std::f64::consts::PI).abs() <= 1e-3;
    let is_convex = is_planar && !degenerate && !sign_change && one_turn;
    ConvexityReport {
        is_planar,
        is_convex,
        total_turning,
        min_signed_curvature: min_curv,
        max_signed_curvature: max_curv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{
        make_circle, make_ellipse, make_figure_eight, make_perturbed_circle, make_trefoil,
    };

    #[test]
    fn circle_samples_have_unit_speed_and_length() {
        let samples = sample(&make_circle(1.0, 2).unwrap(), 64).unwrap();
        assert_eq!(samples.n, 64);
        assert!((samples.length - 1.0).abs() < 1e-14);
        assert!(samples.is_arclength);
        for &s in &samples.speeds {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sample_rejects_tiny_grids() {
        let circle = make_circle(1.0, 2).unwrap();
        assert!(matches!(
            sample(&circle, 8),
            Err(Error::GridTooSmall(8, MIN_SAMPLES))
        ));
    }

    #[test]
    fn arclength_inversion_is_identity_on_the_circle() {
        let circle = make_circle(2.0, 2).unwrap();
        let arc = ArcLengthCurve::new(circle.clone()).unwrap();
        assert!((arc.length() - 2.0).abs() < 1e-13);
        for i in 0..97 {
            let t = i as f64 / 97.0;
            assert!((arc.invert(t).unwrap() - t).abs() < 1e-12);
        }
    }

    #[test]
    fn resampled_ellipse_has_constant_speed() {
        let ellipse = make_ellipse(2.0, 1.0).unwrap();
        let samples = resample_arclength(&ellipse, 128).unwrap();
        assert!(samples.is_arclength);
        let length = samples.length;
        for &s in &samples.speeds {
            assert!((s - length).abs() < 1e-10 * length);
        }
        // Finite differences of positions confirm the reported speed: the
        // reparametrized curve moves equal distances in equal parameter steps.
        let h = 1e-5;
        for i in (0..128).step_by(17) {
            let u = samples.params[i];
            let fd = (samples.point_at(u + h) - samples.point_at(u - h)) / (2.0 * h);
            assert!((fd.norm() - length).abs() < 1e-6 * length);
            assert!((fd - samples.tangents[i]).norm() < 1e-6 * length);
        }
    }

    #[test]
    fn resampled_second_derivative_matches_finite_differences() {
        let ellipse = make_ellipse(2.0, 1.0).unwrap();
        let samples = resample_arclength(&ellipse, 64).unwrap();
        let h = 1e-4;
        for i in (0..64).step_by(7) {
            let u = samples.params[i];
            let fd = (samples.point_at(u + h) + samples.point_at(u - h)
                - samples.point_at(u) * 2.0)
                / (h * h);
            let exact = samples.second_derivative_at(u);
            assert!(
                (fd - exact).norm() < 1e-4 * exact.norm().max(1.0),
                "i = {i}: fd = {:?}, exact = {:?}",
                fd,
                exact
            );
        }
        // Arc-length parametrization: acceleration is orthogonal to velocity.
        for i in 0..64 {
            let u = samples.params[i];
            let d1 = samples.derivative_at(u);
            let d2 = samples.second_derivative_at(u);
            assert!(d1.dot(d2).abs() < 1e-6 * d1.norm() * d2.norm().max(1.0));
        }
    }

    #[test]
    fn non_arclength_parametrization_is_detected() {
        let ellipse = make_ellipse(2.0, 1.0).unwrap();
        let samples = sample(&ellipse, 64).unwrap();
        assert!(!samples.is_arclength);
    }

    #[test]
    fn embeddedness_separates_fixtures_from_figure_eight() {
        let circle = sample(&make_circle(1.0, 2).unwrap(), 128).unwrap();
        // Circle chord / intrinsic distance = sin(pi w) / (pi w) >= 2/pi.
        let ratio = embeddedness_ratio(&circle);
        assert!((ratio - 2.0 / std::f64::consts::PI).abs() < 1e-3);
        assert!(is_embedded_check(&circle, 0.01));

        let trefoil = sample(&make_trefoil(1.0).unwrap(), 256).unwrap();
        assert!(is_embedded_check(&trefoil, 0.01));

        let eight = sample(&make_figure_eight(1.0).unwrap(), 256).unwrap();
        assert!(!is_embedded_check(&eight, 0.01));
        assert!(embeddedness_ratio(&eight) < 2e-2);
    }

    #[test]
    fn convexity_classification_on_fixtures() {
        let circle = sample(&make_circle(1.0, 2).unwrap(), 256).unwrap();
        let report = is_convex_planar(&circle);
        assert!(report.is_planar && report.is_convex);
        assert!((report.total_turning - 2.0 * std::f64::consts::PI).abs() < 1e-6);

        let ellipse = sample(&make_ellipse(2.0, 1.0).unwrap(), 256).unwrap();
        assert!(is_convex_planar(&ellipse).is_convex);

        // Gentle mode-2 wobble stays convex; strong mode-3 wobble does not.
        let gentle = sample(&make_perturbed_circle(1.0, 2, 0.05).unwrap(), 256).unwrap();
        assert!(is_convex_planar(&gentle).is_convex);
        let wavy = sample(&make_perturbed_circle(1.0, 3, 0.3).unwrap(), 256).unwrap();
        let report = is_convex_planar(&wavy);
        assert!(report.is_planar);
        assert!(!report.is_convex);
        assert!(report.min_signed_curvature < 0.0);

        let trefoil = sample(&make_trefoil(1.0).unwrap(), 256).unwrap();
        let report = is_convex_planar(&trefoil);
        assert!(!report.is_planar && !report.is_convex);
    }

    #[test]
    fn planar_3d_embedding_is_recognized() {
        let circle3 = sample(&make_circle(1.0, 3).unwrap(), 128).unwrap();
        let report = is_convex_planar(&circle3);
        assert!(report.is_planar && report.is_convex);
    }
}
