//! The two-variable Gauss map of a closed curve and its spherical path
//! lengths.
//!
//! For a curve gamma and offset w, phi(u, w) is the unit chord direction
//! (gamma(u+w) - gamma(u)) / |gamma(u+w) - gamma(u)|. Freezing one variable
//! traces a path on the sphere; total curvature gives every u-path length
//! >= 2 pi and almost every w-path length >= pi, with equality exactly for
//! convex planar curves. Those floors are what the energy bounds rest on.

use crate::error::{Error, Result};
use crate::output::{format_f64, json_object};
use crate::samples::CurveSamples;
use crate::vec3::Vec3;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Component of x orthogonal to v: x - v <v,x> / |v|^2.
pub fn project_perp(v: Vec3, x: Vec3) -> Result<Vec3> {
    let n2 = v.norm_sq();
    if !(n2 > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(x - v * (v.dot(x) / n2))
}

/// Pointwise Gauss-map data at one (u, w) pair.
#[derive(Debug, Clone, Copy)]
pub struct GaussEval {
    /// Unit chord direction phi(u, w).
    pub phi: Vec3,
    /// |d phi / du| = |P_perp_phi(gamma'(u+w) - gamma'(u))| / chord.
    pub du_norm: f64,
    /// |d phi / dw| = |P_perp_phi gamma'(u+w)| / chord.
    pub dw_norm: f64,
    /// |gamma(u+w) - gamma(u)|.
    pub chord: f64,
    /// 1 / r_tp = 2 |P_perp_tangent(gamma(u+w) - gamma(u))| / chord^2, the
    /// reciprocal radius of the smallest circle through both points tangent
    /// to the curve at u.
    pub inv_tp_radius: f64,
}

fn gauss_from_parts(
    p0: Vec3,
    t0: Vec3,
    p1: Vec3,
    t1: Vec3,
    length: f64,
    pair: (usize, usize),
) -> Result<GaussEval> {
    let delta = p1 - p0;
    let chord = delta.norm();
    if chord < 1e-14 * length {
        return Err(Error::CoincidentPoints {
            i: pair.0,
            j: pair.1,
        });
    }
    let phi = delta / chord;
    let du_norm = project_perp(phi, t1 - t0)?.norm() / chord;
    let dw_norm = project_perp(phi, t1)?.norm() / chord;
    let inv_tp_radius = 2.0 * project_perp(t0, delta)?.norm() / (chord * chord);
    Ok(GaussEval {
        phi,
        du_norm,
        dw_norm,
        chord,
        inv_tp_radius,
    })
}

/// Gauss-map data between grid samples i and i + j_offset (indices mod N).
/// j_offset must not be 0 mod N; a vanishing chord between distinct
/// parameters signals a non-embedded sample set.
pub fn gauss_eval(samples: &CurveSamples, i: usize, j_offset: usize) -> Result<GaussEval> {
    let n = samples.n;
    let j = j_offset % n;
    if j == 0 {
        return Err(Error::InvalidParameter(
            "gauss_eval needs distinct parameters: j_offset = 0 mod N".into(),
        ));
    }
    let i = i % n;
    let k = (i + j) % n;
    gauss_from_parts(
        samples.points[i],
        samples.tangents[i],
        samples.points[k],
        samples.tangents[k],
        samples.length,
        (i, k),
    )
}

/// Gauss-map data at arbitrary (u, w) through the analytic curve model;
/// w may be negative (backward offset), which is how integrands singular at
/// w = 1 are evaluated without forming 1 - w.
pub fn gauss_eval_at(samples: &CurveSamples, u: f64, w: f64) -> Result<GaussEval> {
    let (p0, t0) = samples.model().point_and_derivative(u);
    let (p1, t1) = samples.model().point_and_derivative(u + w);
    gauss_from_parts(p0, t0, p1, t1, samples.length, (0, 0))
}

/// Limit of dw_norm as w -> 0 or 1: |P_perp_tangent gamma''| / (2 |gamma'|),
/// i.e. half the curvature times the speed.
pub fn dw_norm_limit(samples: &CurveSamples, i: usize) -> Result<f64> {
    let u = samples.params[i % samples.n];
    let d1 = samples.derivative_at(u);
    let d2 = samples.second_derivative_at(u);
    Ok(project_perp(d1, d2)?.norm() / (2.0 * d1.norm()))
}

/// Snaps an offset in (0,1) to the nearest grid offset index j in 1..N-1.
pub fn snap_offset(n: usize, w: f64) -> Result<usize> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "offset w must lie in (0,1), got {w}"
        )));
    }
    let j = (w * n as f64).round() as usize % n;
    if j == 0 {
        return Err(Error::InvalidParameter(format!(
            "offset w = {w} snaps to the degenerate grid offset 0"
        )));
    }
    Ok(j)
}

/// Length of the spherical path u -> phi(u, w) at fixed offset w (snapped
/// to the grid): periodic trapezoid of du_norm over one period. Fenchel's
/// theorem puts this at >= 2 pi for embedded closed curves.
pub fn path_length_u(samples: &CurveSamples, w: f64) -> Result<f64> {
    let j = snap_offset(samples.n, w)?;
    path_length_u_at(samples, j)
}

fn path_length_u_at(samples: &CurveSamples, j: usize) -> Result<f64> {
    let n = samples.n;
    let mut acc = 0.0;
    for i in 0..n {
        acc += gauss_eval(samples, i, j)?.du_norm;
    }
    Ok(acc / n as f64)
}

/// Length of the spherical path w -> phi(u_i, w): trapezoid over [0,1]
/// using the analytic endpoint limits (the integrand extends continuously
/// with value |kappa| |gamma'| / 2 at w in {0,1}). Bounded below by pi.
pub fn path_length_w(samples: &CurveSamples, i: usize) -> Result<f64> {
    let n = samples.n;
    let mut acc = dw_norm_limit(samples, i)?;
    for j in 1..n {
        acc += gauss_eval(samples, i, j)?.dw_norm;
    }
    Ok(acc / n as f64)
}

/// Grid minima of the two spherical path lengths and their slack over the
/// total-curvature floors 2 pi (u-paths) and pi (w-paths).
#[derive(Debug, Clone)]
pub struct FenchelReport {
    pub min_path_u: f64,
    /// Offset w = j/N at which the u-path length is minimal.
    pub argmin_w: f64,
    pub min_path_w: f64,
    /// Base point u = i/N at which the w-path length is minimal.
    pub argmin_u: f64,
    /// min_path_u - 2 pi; negative values beyond quadrature error indicate
    /// an implementation bug, never a theorem violation.
    pub slack_u: f64,
    /// min_path_w - pi.
    pub slack_w: f64,
    pub n: usize,
}

impl FenchelReport {
    /// JSON form; the w-path minimum is published under the key
    /// "min_path_v".
    pub fn to_json(&self) -> String {
        json_object(&[
            ("min_path_u", format_f64(self.min_path_u)),
            ("argmin_w", format_f64(self.argmin_w)),
            ("min_path_v", format_f64(self.min_path_w)),
            ("argmin_u", format_f64(self.argmin_u)),
            ("slack_u", format_f64(self.slack_u)),
            ("slack_w", format_f64(self.slack_w)),
            ("N", self.n.to_string()),
        ])
    }
}

/// Evaluates both path-length families over the whole grid and reports
/// their minima against the Fenchel floors.
pub fn fenchel_report(samples: &CurveSamples) -> Result<FenchelReport> {
    let n = samples.n;
    // One pass over the full (i, j) grid, parallel over rows i with an
    // ordered reduction: row i contributes dw_norm(i, j) to its own w-path
    // and du_norm(i, j) to every u-path at offset j.
    struct Row {
        path_w: f64,
        du_by_offset: Vec<f64>,
    }
    let rows: Vec<Result<Row>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut du_by_offset = vec![0.0; n];
            let mut acc = dw_norm_limit(samples, i)?;
            for j in 1..n {
                let ev = gauss_eval(samples, i, j)?;
                acc += ev.dw_norm;
                du_by_offset[j] = ev.du_norm;
            }
            Ok(Row {
                path_w: acc / n as f64,
                du_by_offset,
            })
        })
        .collect();

    let mut path_u_sums = vec![0.0; n];
    let mut min_path_w = f64::INFINITY;
    let mut argmin_u = 0.0;
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        if row.path_w < min_path_w {
            min_path_w = row.path_w;
            argmin_u = samples.params[i];
        }
        for j in 1..n {
            path_u_sums[j] += row.du_by_offset[j];
        }
    }
    let mut min_path_u = f64::INFINITY;
    let mut argmin_w = 0.0;
    for (j, &sum) in path_u_sums.iter().enumerate().skip(1) {
        let value = sum / n as f64;
        if value < min_path_u {
            min_path_u = value;
            argmin_w = j as f64 / n as f64;
        }
    }
    Ok(FenchelReport {
        min_path_u,
        argmin_w,
        min_path_w,
        argmin_u,
        slack_u: min_path_u - 2.0 * PI,
        slack_w: min_path_w - PI,
        n,
    })
}
