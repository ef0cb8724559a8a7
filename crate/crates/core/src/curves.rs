//! Closed curves as truncated Fourier series on the unit torus.
//!
//! gamma_d(u) = a_0/2 + sum_k (a_k cos 2 pi k u + b_k sin 2 pi k u) per
//! dimension. Trigonometric polynomials give exact derivatives everywhere,
//! which the quadrature and the Gauss-map formulas rely on.

use crate::error::{Error, Result};
use crate::output::format_f64;
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// A closed curve in 2 or 3 dimensions given by Fourier coefficients.
/// `coeffs[d][k] = (a_k, b_k)` for k = 0..=modes; `b_0` is inert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCurve {
    pub dims: usize,
    pub modes: usize,
    pub coeffs: Vec<Vec<(f64, f64)>>,
}

impl FourierCurve {
    /// Zero curve with allocated coefficient storage.
    pub fn zeros(dims: usize, modes: usize) -> Result<FourierCurve> {
        if dims != 2 && dims != 3 {
            return Err(Error::InvalidDims(dims));
        }
        Ok(FourierCurve {
            dims,
            modes,
            coeffs: vec![vec![(0.0, 0.0); modes + 1]; dims],
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims != 2 && self.dims != 3 {
            return Err(Error::InvalidDims(self.dims));
        }
        if self.coeffs.len() != self.dims {
            return Err(Error::InvalidParameter(format!(
                "coeffs holds {} dimensions, curve declares {}",
                self.coeffs.len(),
                self.dims
            )));
        }
        for (d, row) in self.coeffs.iter().enumerate() {
            if row.len() != self.modes + 1 {
                return Err(Error::InvalidParameter(format!(
                    "dimension {d} holds {} mode pairs, expected modes + 1 = {}",
                    row.len(),
                    self.modes + 1
                )));
            }
            for &(a, b) in row {
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidParameter(
                        "non-finite Fourier coefficient".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn component(&self, d: usize, u: f64, order: u32) -> f64 {
        let row = &self.coeffs[d];
        let (c1, s1) = {
            let ang = TAU * u;
            (ang.cos(), ang.sin())
        };
        let mut ck = 1.0;
        let mut sk = 0.0;
        let mut acc = if order == 0 { row[0].0 * 0.5 } else { 0.0 };
        for (k, &(a, b)) in row.iter().enumerate().skip(1) {
            // Angle-addition recurrence: (ck, sk) = (cos, sin)(2 pi k u).
            let c = ck * c1 - sk * s1;
            let s = sk * c1 + ck * s1;
            ck = c;
            sk = s;
            let omega = TAU * k as f64;
            acc += match order {
                0 => a * c + b * s,
                1 => omega * (b * c - a * s),
                _ => -omega * omega * (a * c + b * s),
            };
        }
        acc
    }

    #[inline]
    fn eval(&self, u: f64, order: u32) -> Vec3 {
        Vec3::new(
            self.component(0, u, order),
            self.component(1, u, order),
            if self.dims == 3 {
                self.component(2, u, order)
            } else {
                0.0
            },
        )
    }

    #[inline]
    pub fn point(&self, u: f64) -> Vec3 {
        self.eval(u, 0)
    }

    #[inline]
    pub fn derivative(&self, u: f64) -> Vec3 {
        self.eval(u, 1)
    }

    #[inline]
    pub fn second_derivative(&self, u: f64) -> Vec3 {
        self.eval(u, 2)
    }

    /// Point and first derivative in one pass; this pair dominates the inner
    /// loops of the energy quadrature.
    pub fn point_and_derivative(&self, u: f64) -> (Vec3, Vec3) {
        let mut pt = [0.0f64; 3];
        let mut dv = [0.0f64; 3];
        let ang = TAU * u;
        let (c1, s1) = (ang.cos(), ang.sin());
        for d in 0..self.dims {
            let row = &self.coeffs[d];
            let mut ck = 1.0;
            let mut sk = 0.0;
            let mut p = row[0].0 * 0.5;
            let mut v = 0.0;
            for (k, &(a, b)) in row.iter().enumerate().skip(1) {
                let c = ck * c1 - sk * s1;
                let s = sk * c1 + ck * s1;
                ck = c;
                sk = s;
                let omega = TAU * k as f64;
                p += a * c + b * s;
                v += omega * (b * c - a * s);
            }
            pt[d] = p;
            dv[d] = v;
        }
        (
            Vec3::new(pt[0], pt[1], pt[2]),
            Vec3::new(dv[0], dv[1], dv[2]),
        )
    }

    /// Total length by the periodic trapezoid rule on the (smooth, periodic)
    /// speed; spectrally accurate.
    pub fn length(&self) -> f64 {
        let n = (64 * (self.modes + 1)).max(1024);
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.derivative(i as f64 / n as f64).norm();
        }
        acc / n as f64
    }
}

/// Round circle of the given total length in the x-y plane.
pub fn make_circle(length: f64, dims: usize) -> Result<FourierCurve> {
    if !(length > 0.0) {
        return Err(Error::ZeroLength);
    }
    let r = length / TAU;
    let mut curve = FourierCurve::zeros(dims, 1)?;
    curve.coeffs[0][1].0 = r; // x = r cos
    curve.coeffs[1][1].1 = r; // y = r sin
    Ok(curve)
}

/// Axis-aligned ellipse (a cos, b sin).
pub fn make_ellipse(a: f64, b: f64) -> Result<FourierCurve> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ellipse semi-axes must be positive, got a = {a}, b = {b}"
        )));
    }
    let mut curve = FourierCurve::zeros(2, 1)?;
    curve.coeffs[0][1].0 = a;
    curve.coeffs[1][1].1 = b;
    Ok(curve)
}

/// Circle with the radial perturbation r(theta) = 1 + eps cos(mode * theta),
/// rescaled to the requested length. The product expands exactly into modes
/// mode - 1, 1, mode + 1, so the result is again a Fourier curve.
pub fn make_perturbed_circle(length: f64, mode: usize, eps: f64) -> Result<FourierCurve> {
    if !(length > 0.0) {
        return Err(Error::ZeroLength);
    }
    if mode < 2 {
        return Err(Error::InvalidParameter(format!(
            "perturbation mode must be >= 2, got {mode}"
        )));
    }
    if !(eps.abs() < 1.0) {
        return Err(Error::PerturbationTooLarge(eps));
    }
    let mut curve = FourierCurve::zeros(2, mode + 1)?;
    // x = cos t + (eps/2)(cos (mode+1) t + cos (mode-1) t)
    // y = sin t + (eps/2)(sin (mode+1) t - sin (mode-1) t)
    curve.coeffs[0][1].0 += 1.0;
    curve.coeffs[0][mode + 1].0 += 0.5 * eps;
    curve.coeffs[0][mode - 1].0 += 0.5 * eps;
    curve.coeffs[1][1].1 += 1.0;
    curve.coeffs[1][mode + 1].1 += 0.5 * eps;
    curve.coeffs[1][mode - 1].1 -= 0.5 * eps;
    rescale_to_length(&curve, length)
}

/// Standard trefoil knot
/// (sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t) scaled uniformly.
pub fn make_trefoil(scale: f64) -> Result<FourierCurve> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "trefoil scale must be positive, got {scale}"
        )));
    }
    let mut curve = FourierCurve::zeros(3, 3)?;
    curve.coeffs[0][1].1 = scale;
    curve.coeffs[0][2].1 = 2.0 * scale;
    curve.coeffs[1][1].0 = scale;
    curve.coeffs[1][2].0 = -2.0 * scale;
    curve.coeffs[2][3].1 = -scale;
    Ok(curve)
}

/// Planar figure eight (sin 4 pi u, sin 2 pi u); self-intersects at the
/// origin. Used to exercise the embeddedness check.
pub fn make_figure_eight(scale: f64) -> Result<FourierCurve> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "figure-eight scale must be positive, got {scale}"
        )));
    }
    let mut curve = FourierCurve::zeros(2, 2)?;
    curve.coeffs[0][2].1 = scale;
    curve.coeffs[1][1].1 = scale;
    Ok(curve)
}

/// Uniform rescale of all coefficients so the curve has the target length.
/// Translations scale with the rest; lengths are 1-homogeneous so the factor
/// is exact.
pub fn rescale_to_length(curve: &FourierCurve, target: f64) -> Result<FourierCurve> {
    curve.validate()?;
    if !(target > 0.0) {
        return Err(Error::ZeroLength);
    }
    let current = curve.length();
    if !(current > 0.0) {
        return Err(Error::ZeroLength);
    }
    let factor = target / current;
    let mut out = curve.clone();
    for row in &mut out.coeffs {
        for pair in row {
            pair.0 *= factor;
            pair.1 *= factor;
        }
    }
    Ok(out)
}

/// Parses the curve JSON schema {dims, modes, coeffs}.
pub fn curve_from_json(text: &str) -> Result<FourierCurve> {
    let curve: FourierCurve = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParameter(format!("curve JSON: {e}")))?;
    curve.validate()?;
    Ok(curve)
}

/// Serializes a curve to the schema {dims, modes, coeffs} with 17
/// significant digits per coefficient (round-trip exact for f64).
pub fn curve_to_json(curve: &FourierCurve) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"dims\":{},\"modes\":{},\"coeffs\":[",
        curve.dims, curve.modes
    ));
    for (d, row) in curve.coeffs.iter().enumerate() {
        if d > 0 {
            out.push(',');
        }
        out.push('[');
        for (k, &(a, b)) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", format_f64(a), format_f64(b)));
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}
