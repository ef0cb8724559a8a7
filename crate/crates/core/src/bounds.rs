//! Closed-form sharp lower bounds and the (p, q) parameter-region
//! classification.
//!
//! The central quantity is `int_0^1 sin(pi w)^a dw`, which evaluates to
//! `Gamma((a+1)/2) / (sqrt(pi) * Gamma((a+2)/2))` for a > -1; the circle
//! saturates the tangent-point bound with exactly this integral.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma function for positive arguments, relative error well below 1e-12
/// on (0, 50].
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::GammaDomain(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos series in its accurate range.
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

/// `int_0^1 sin(pi w)^a dw` for a > -1.
pub fn sin_power_integral(a: f64) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::DivergentExponent(a));
    }
    Ok(gamma_unchecked((a + 1.0) / 2.0) / (PI.sqrt() * gamma_unchecked((a + 2.0) / 2.0)))
}

/// Sharp lower bound for TP^(p,q) at total length `length`:
/// `L^(q+2-p) * pi^(p-q) * int_0^1 sin(pi w)^(2q-p) dw`,
/// attained by the round circle. Requires 2q - p > -1 (finite-energy side).
pub fn tp_lower_bound(length: f64, p: f64, q: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::ZeroLength);
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tp_lower_bound requires q >= 1, got q = {q}"
        )));
    }
    let a = 2.0 * q - p;
    Ok(length.powf(q + 2.0 - p) * PI.powf(p - q) * sin_power_integral(a)?)
}

/// Lower bound for the fractional Willmore energy W_(s,wp) of a convex set
/// with perimeter `length`: `L^(1-wp*s) * (pi^(1+s) * int sin^(-s))^wp`,
/// attained by the round disk.
pub fn willmore_lower_bound(length: f64, s: f64, wp: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::ZeroLength);
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "willmore_lower_bound requires s in (0,1), got s = {s}"
        )));
    }
    if !(wp >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "willmore_lower_bound requires wp >= 1, got wp = {wp}"
        )));
    }
    let h_circle = PI.powf(1.0 + s) * sin_power_integral(-s)?;
    Ok(length.powf(1.0 - wp * s) * h_circle.powf(wp))
}

/// Region flags for a (p, q) pair. Flags are not mutually exclusive: on
/// (2q, 2q+1) the bound holds unconditionally inside the main validity
/// window and among convex curves, and both flags are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegionFlags {
    pub repulsive: bool,
    pub mildly_repulsive: bool,
    pub infinite_energy: bool,
    pub no_minimizer: bool,
    pub lower_limit: bool,
    pub bound_valid_all: bool,
    pub bound_valid_convex_only: bool,
}

impl RegionFlags {
    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.repulsive {
            out.push("repulsive");
        }
        if self.mildly_repulsive {
            out.push("mildly_repulsive");
        }
        if self.infinite_energy {
            out.push("infinite_energy");
        }
        if self.no_minimizer {
            out.push("no_minimizer");
        }
        if self.lower_limit {
            out.push("lower_limit");
        }
        if self.bound_valid_all {
            out.push("bound_valid_all");
        }
        if self.bound_valid_convex_only {
            out.push("bound_valid_convex_only");
        }
        out
    }
}

impl std::fmt::Display for RegionFlags {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.names().join("|"))
    }
}

/// Boundary tolerance for region membership.
const REGION_TOL: f64 = 1e-12;

/// Classifies a (p, q) pair against the energy landscape: repulsiveness,
/// finiteness, and the two validity modes of the sharp bound.
pub fn classify_region(p: f64, q: f64) -> Result<RegionFlags> {
    if !(p.is_finite() && q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "classify_region requires finite p and q > 0, got p = {p}, q = {q}"
        )));
    }
    let t = REGION_TOL;
    let lower_limit = (p - (q + 1.0)).abs() <= t;
    let in_main_window = q >= 1.0 - t
        && p >= q + 1.0 - t
        && p < 2.0 * q + 1.0 - t
        && p >= 2.0 * q - 2.0 - t
        && p <= 4.0 * q - 2.0 + t;
    Ok(RegionFlags {
        repulsive: q > 1.0 + t && p >= q + 2.0 - t && p < 2.0 * q + 1.0 - t,
        mildly_repulsive: p > q + 1.0 + t && p < q + 2.0 - t,
        infinite_energy: q > 1.0 + t && p >= 2.0 * q + 1.0 - t,
        no_minimizer: p < q + 1.0 - t,
        lower_limit,
        bound_valid_all: (q >= 1.0 - t && lower_limit) || in_main_window,
        bound_valid_convex_only: q >= 1.0 - t
            && p > 2.0 * q + t
            && p < 2.0 * q + 1.0 - t,
    })
}

/// Exponent decomposition used to interpolate between the two minorants:
/// sigma = (2q-p)q / (2q-p+1), mu = (2q-p)(q-p+1) / (2q-p+1).
pub fn sigma_mu(p: f64, q: f64) -> Result<(f64, f64)> {
    let denom = 2.0 * q - p + 1.0;
    if denom.abs() < 1e-9 {
        return Err(Error::DegenerateDenominator(denom));
    }
    let sigma = (2.0 * q - p) * q / denom;
    let mu = (2.0 * q - p) * (q - p + 1.0) / denom;
    Ok((sigma, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::graded_half_nodes;

    #[test]
    fn gamma_matches_closed_forms() {
        let sqrt_pi = PI.sqrt();
        assert!((gamma_fn(0.5).unwrap() - sqrt_pi).abs() / sqrt_pi < 1e-13);
        assert!((gamma_fn(1.5).unwrap() - sqrt_pi / 2.0).abs() / (sqrt_pi / 2.0) < 1e-13);
        assert!((gamma_fn(2.5).unwrap() - 0.75 * sqrt_pi).abs() / (0.75 * sqrt_pi) < 1e-13);
        let mut fact = 1.0;
        for n in 1..=20u32 {
            let g = gamma_fn(n as f64).unwrap();
            assert!((g - fact).abs() / fact < 1e-12, "Gamma({n})");
            fact *= n as f64;
        }
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        let prod = gamma_fn(0.25).unwrap() * gamma_fn(0.75).unwrap();
        let want = PI / (PI / 4.0).sin();
        assert!((prod - want).abs() / want < 1e-13);
    }

    #[test]
    fn gamma_recurrence_on_domain() {
        // Gamma(x+1) = x Gamma(x) across (0, 50].
        let mut x = 0.05;
        while x < 49.0 {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!((lhs - rhs).abs() / rhs.abs() < 1e-12, "x = {x}");
            x += 0.173;
        }
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn sin_power_closed_forms() {
        assert!((sin_power_integral(0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((sin_power_integral(1.0).unwrap() - 2.0 / PI).abs() < 1e-14);
        assert!((sin_power_integral(2.0).unwrap() - 0.5).abs() < 1e-14);
        assert!(sin_power_integral(-1.0).is_err());
        assert!(sin_power_integral(-1.3).is_err());
    }

    #[test]
    fn sin_power_matches_graded_quadrature() {
        // Independent check of the Gamma formula against direct integration
        // of sin(pi w)^a. The integrand is symmetric about w = 1/2, so twice
        // the half rule covers (0,1) while keeping the singular endpoint at
        // full floating-point resolution; a = -0.9 needs the strong grading
        // (transformed decay t^(g/10 - 1)).
        for &a in &[-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0] {
            let (nodes, weights) = graded_half_nodes(1 << 16, 24.0).unwrap();
            let direct: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(&w, &om)| 2.0 * (PI * w).sin().powf(a) * om)
                .sum();
            let formula = sin_power_integral(a).unwrap();
            assert!(
                ((direct - formula) / formula).abs() < 1e-8,
                "a = {a}: direct {direct} vs formula {formula}"
            );
        }
    }

    #[test]
    fn tp_bound_values() {
        assert!((tp_lower_bound(1.0, 4.0, 2.0).unwrap() - PI * PI).abs() < 1e-12);
        assert!((tp_lower_bound(1.0, 3.0, 2.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((tp_lower_bound(1.0, 2.0, 1.0).unwrap() - PI).abs() < 1e-12);
        // Length scaling L^(q+2-p).
        let b1 = tp_lower_bound(1.0, 3.0, 2.0).unwrap();
        let b2 = tp_lower_bound(2.0, 3.0, 2.0).unwrap();
        assert!((b2 / b1 - 2.0).abs() < 1e-12);
        assert!(tp_lower_bound(0.0, 4.0, 2.0).is_err());
        assert!(tp_lower_bound(1.0, 4.0, 0.5).is_err());
        // Beyond the finite-energy window the defining integral diverges.
        assert!(tp_lower_bound(1.0, 5.0, 2.0).is_err());
    }

    #[test]
    fn willmore_bound_value() {
        // W_(s,1) bound at L = 1 equals the constant nonlocal curvature of
        // the unit-perimeter disk: pi^(1+s) int sin^(-s).
        let b = willmore_lower_bound(1.0, 0.5, 1.0).unwrap();
        let want = PI.powf(1.5) * sin_power_integral(-0.5).unwrap();
        assert!((b - want).abs() / want < 1e-14);
        // Frozen from the Gamma formula: Gamma(0.25)/(sqrt(pi) Gamma(0.75))
        // = 1.6692536833481464, times pi^1.5.
        assert!((b - 9.294952018801935).abs() < 1e-9, "got {b}");
        assert!(willmore_lower_bound(1.0, 1.2, 1.0).is_err());
        assert!(willmore_lower_bound(1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn region_classification_examples() {
        let r = classify_region(4.0, 2.0).unwrap();
        assert!(r.repulsive && r.bound_valid_all);
        assert!(!r.bound_valid_convex_only && !r.lower_limit && !r.infinite_energy);

        let r = classify_region(3.0, 2.0).unwrap();
        assert!(r.lower_limit && r.bound_valid_all);
        assert!(!r.repulsive && !r.mildly_repulsive && !r.no_minimizer);

        let r = classify_region(4.8, 2.0).unwrap();
        assert!(r.repulsive && r.bound_valid_all && r.bound_valid_convex_only);

        let r = classify_region(3.5, 2.0).unwrap();
        assert!(r.mildly_repulsive && r.bound_valid_all);

        let r = classify_region(5.0, 2.0).unwrap();
        assert!(r.infinite_energy && !r.bound_valid_all && !r.repulsive);

        let r = classify_region(2.5, 2.0).unwrap();
        assert!(r.no_minimizer && !r.bound_valid_all);

        let r = classify_region(2.0, 1.0).unwrap();
        assert!(r.bound_valid_all && !r.repulsive && !r.infinite_energy);
    }

    #[test]
    fn region_flag_exclusions_hold_on_grid() {
        let mut q = 1.0;
        while q <= 3.5 {
            let mut p = 0.5;
            while p <= 4.0 * q + 1.0 {
                let r = classify_region(p, q).unwrap();
                assert!(!(r.infinite_energy && r.bound_valid_all), "p={p} q={q}");
                assert!(!(r.bound_valid_all && r.no_minimizer), "p={p} q={q}");
                assert!(!(r.lower_limit && r.mildly_repulsive), "p={p} q={q}");
                p += 0.0625;
            }
            q += 0.25;
        }
    }

    #[test]
    fn sigma_mu_identities() {
        for &(p, q) in &[
            (3.0, 2.0),
            (3.5, 2.0),
            (4.5, 2.0),
            (2.5, 1.5),
            (5.0, 3.0),
            (3.7, 1.9),
        ] {
            let (sigma, mu) = sigma_mu(p, q).unwrap();
            assert!((sigma + mu - (2.0 * q - p)).abs() < 1e-12, "p={p} q={q}");
            if (sigma + mu).abs() > 1e-9 {
                assert!(
                    (sigma / (sigma + mu) + sigma - q).abs() < 1e-12,
                    "p={p} q={q}"
                );
                assert!(
                    (2.0 * sigma / (sigma + mu) + sigma - mu - p).abs() < 1e-12,
                    "p={p} q={q}"
                );
            }
        }
        // Interior of (q+1, 2q): sigma > 0, mu < 0.
        let (sigma, mu) = sigma_mu(3.5, 2.0).unwrap();
        assert!(sigma > 0.0 && mu < 0.0);
        // (3, 2): sigma = 1, mu = 0.
        let (sigma, mu) = sigma_mu(3.0, 2.0).unwrap();
        assert!((sigma - 1.0).abs() < 1e-14 && mu.abs() < 1e-14);
        assert!(sigma_mu(5.0, 2.0).is_err());
    }
}
