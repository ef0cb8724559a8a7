//! Steepest descent over Fourier coefficients at fixed length.
//!
//! The objective is the length-normalized energy: coefficients are rescaled
//! to the target length before every evaluation, which enforces the
//! constraint exactly and removes the scaling invariance direction from the
//! search space. Embeddedness acts as an infinite barrier (failed
//! evaluations return +inf), so the line search simply refuses to step
//! across a self-intersection.

use crate::curves::{make_circle, make_perturbed_circle, rescale_to_length, FourierCurve};
use crate::energies::{bound_for_spec, evaluate, EnergyKind, EnergySpec};
use crate::error::{Error, Result};
use crate::output::{format_f64, json_string};
use crate::quadrature::QuadratureSpec;
use crate::samples::{resample_arclength, sample, CurveSamples};
use rayon::prelude::*;

/// Backtracking line-search parameters.
#[derive(Debug, Clone, Copy)]
pub struct StepRule {
    pub initial_step: f64,
    pub shrink: f64,
    pub armijo: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule {
            initial_step: 0.05,
            shrink: 0.5,
            armijo: 0.1,
        }
    }
}

/// Everything a descent run needs besides the starting curve.
#[derive(Debug, Clone)]
pub struct MinimizeConfig {
    pub spec: EnergySpec,
    pub modes: usize,
    pub dims: usize,
    pub target_length: f64,
    pub max_iters: usize,
    pub grad_step: f64,
    pub step_rule: StepRule,
    pub stop_grad_norm: f64,
    pub quad: QuadratureSpec,
}

impl MinimizeConfig {
    /// Defaults tuned for desk-scale runs: a coarse single-level rule keeps
    /// each objective call cheap; the sample count is quad.n_u.
    pub fn new(spec: EnergySpec) -> Self {
        MinimizeConfig {
            spec,
            modes: 5,
            dims: 2,
            target_length: 1.0,
            max_iters: 500,
            grad_step: 1e-5,
            step_rule: StepRule::default(),
            stop_grad_norm: 1e-4,
            quad: QuadratureSpec {
                n_u: 64,
                n_w: 64,
                grading_exponent: 4.0,
                doubling_rounds: 1,
                convergence_rtol: 1e-6,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.quad.validate()?;
        if self.dims != 2 && self.dims != 3 {
            return Err(Error::InvalidDims(self.dims));
        }
        if self.modes == 0 || self.modes > 8 {
            return Err(Error::InvalidParameter(format!(
                "modes must lie in 1..=8, got {}",
                self.modes
            )));
        }
        if !(self.target_length > 0.0) || !self.target_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "target_length must be positive, got {}",
                self.target_length
            )));
        }
        if !(self.grad_step >= 1e-7 && self.grad_step <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "grad_step must lie in [1e-7, 1e-3], got {}",
                self.grad_step
            )));
        }
        if !(self.step_rule.initial_step > 0.0 && self.step_rule.initial_step.is_finite()) {
            return Err(Error::InvalidParameter(
                "initial_step must be positive".into(),
            ));
        }
        if !(self.step_rule.shrink > 0.0 && self.step_rule.shrink < 1.0) {
            return Err(Error::InvalidParameter(
                "shrink factor must lie in (0,1)".into(),
            ));
        }
        if !(self.step_rule.armijo > 0.0 && self.step_rule.armijo < 0.5) {
            return Err(Error::InvalidParameter(
                "Armijo constant must lie in (0, 0.5)".into(),
            ));
        }
        if !(self.stop_grad_norm > 0.0) {
            return Err(Error::InvalidParameter(
                "stop_grad_norm must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// How a descent run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminatedBy {
    GradNorm,
    MaxIters,
    LineSearchFailure,
}

impl TerminatedBy {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminatedBy::GradNorm => "grad_norm",
            TerminatedBy::MaxIters => "max_iters",
            TerminatedBy::LineSearchFailure => "line_search_failure",
        }
    }
}

/// Outcome of a descent run. `energies` holds the starting value followed by
/// one entry per accepted step, so it is non-increasing by construction.
#[derive(Debug, Clone)]
pub struct MinimizeReport {
    pub energies: Vec<f64>,
    pub final_coeffs: FourierCurve,
    pub final_grad_norm: f64,
    pub circle_deviation: f64,
    pub bound_gap: f64,
    pub iterations_used: usize,
    pub terminated_by: TerminatedBy,
}

impl MinimizeReport {
    pub fn to_json(&self) -> String {
        let energies = self
            .energies
            .iter()
            .map(|e| format_f64(*e))
            .collect::<Vec<_>>()
            .join(",");
        let bound_gap = if self.bound_gap.is_finite() {
            format_f64(self.bound_gap)
        } else {
            "null".to_string()
        };
        format!(
            "{{\"energies\":[{}],\"final_coeffs\":{},\"final_grad_norm\":{},\"circle_deviation\":{},\"bound_gap\":{},\"iterations_used\":{},\"terminated_by\":{}}}",
            energies,
            crate::curves::curve_to_json(&self.final_coeffs),
            format_f64(self.final_grad_norm),
            format_f64(self.circle_deviation),
            bound_gap,
            self.iterations_used,
            json_string(self.terminated_by.as_str()),
        )
    }
}

fn needs_arclength(spec: &EnergySpec) -> bool {
    matches!(spec.kind, EnergyKind::F | EnergyKind::FSliceU)
}

fn eval_curve(coeffs: &FourierCurve, config: &MinimizeConfig) -> Result<f64> {
    let scaled = rescale_to_length(coeffs, config.target_length)?;
    let samples = if needs_arclength(&config.spec) {
        resample_arclength(&scaled, config.quad.n_u)?
    } else {
        sample(&scaled, config.quad.n_u)?
    };
    Ok(evaluate(&samples, &config.spec, &config.quad)?.value)
}

/// Length-normalized objective. Every failure mode (self-intersection,
/// degenerate rescale, non-convexity for Willmore) maps to +inf so the
/// descent treats it as a barrier rather than an error.
pub fn energy_of_coeffs(coeffs: &FourierCurve, config: &MinimizeConfig) -> f64 {
    eval_curve(coeffs, config).unwrap_or(f64::INFINITY)
}

/// Coefficient slots the gradient moves: every (a_k, b_k) with k >= 1 in
/// every dimension. The k = 0 pair is excluded: a_0 is a translation the
/// energy cannot see and b_0 is inert.
fn free_slots(curve: &FourierCurve) -> Vec<(usize, usize, bool)> {
    let mut slots = Vec::with_capacity(curve.dims * curve.modes * 2);
    for d in 0..curve.dims {
        for k in 1..=curve.modes {
            slots.push((d, k, false));
            slots.push((d, k, true));
        }
    }
    slots
}

fn bump(curve: &FourierCurve, slot: (usize, usize, bool), h: f64) -> FourierCurve {
    let mut out = curve.clone();
    let (d, k, sine) = slot;
    if sine {
        out.coeffs[d][k].1 += h;
    } else {
        out.coeffs[d][k].0 += h;
    }
    out
}

/// Central finite-difference gradient over the free coefficient slots,
/// components in `free_slots` order. Where one side of the stencil lands on
/// the +inf barrier the component falls back to a one-sided difference;
/// where both sides do, the component is set to zero (no usable direction).
pub fn gradient_fd(coeffs: &FourierCurve, config: &MinimizeConfig) -> Result<Vec<f64>> {
    let f0 = energy_of_coeffs(coeffs, config);
    if !f0.is_finite() {
        return Err(Error::InvalidParameter(
            "gradient requested where the objective is infinite".into(),
        ));
    }
    let h = config.grad_step;
    let slots = free_slots(coeffs);
    Ok(slots
        .par_iter()
        .map(|&slot| {
            let fp = energy_of_coeffs(&bump(coeffs, slot, h), config);
            let fm = energy_of_coeffs(&bump(coeffs, slot, -h), config);
            match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - f0) / h,
                (false, true) => (f0 - fm) / h,
                (false, false) => 0.0,
            }
        })
        .collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn step_along(curve: &FourierCurve, direction: &[f64], step: f64) -> FourierCurve {
    let mut out = curve.clone();
    for (slot, g) in free_slots(curve).into_iter().zip(direction.iter()) {
        let (d, k, sine) = slot;
        if sine {
            out.coeffs[d][k].1 -= step * g;
        } else {
            out.coeffs[d][k].0 -= step * g;
        }
    }
    out
}

fn pad_modes(curve: &FourierCurve, modes: usize) -> Result<FourierCurve> {
    if curve.modes > modes {
        return Err(Error::InvalidParameter(format!(
            "starting curve carries {} modes, config allows {}",
            curve.modes, modes
        )));
    }
    let mut out = FourierCurve::zeros(curve.dims, modes)?;
    for d in 0..curve.dims {
        for k in 0..=curve.modes {
            out.coeffs[d][k] = curve.coeffs[d][k];
        }
    }
    Ok(out)
}

/// Coefficient of variation of the centroid distances: zero exactly for a
/// round circle, and a scale-free measure of how far from round the curve
/// sits.
pub fn circle_deviation(samples: &CurveSamples) -> f64 {
    let n = samples.n as f64;
    let mut centroid = crate::vec3::Vec3::new(0.0, 0.0, 0.0);
    for p in &samples.points {
        centroid = centroid + *p;
    }
    centroid = centroid / n;
    let radii: Vec<f64> = samples.points.iter().map(|p| (*p - centroid).norm()).collect();
    let mean = radii.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return f64::INFINITY;
    }
    let var = radii.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    var.sqrt() / mean
}

const MAX_BACKTRACKS: usize = 60;
const REPORT_SAMPLES: usize = 256;

/// Steepest descent with Armijo backtracking on the length-normalized
/// objective. Starting curves with fewer modes than the config are padded
/// with zeros so descent can populate higher harmonics.
pub fn descend(start: &FourierCurve, config: &MinimizeConfig) -> Result<MinimizeReport> {
    config.validate()?;
    start.validate()?;
    if start.dims != config.dims {
        return Err(Error::InvalidDims(start.dims));
    }
    let mut x = pad_modes(start, config.modes)?;
    let mut energy = energy_of_coeffs(&x, config);
    if !energy.is_finite() {
        return Err(Error::InvalidParameter(
            "starting curve fails the embeddedness barrier".into(),
        ));
    }
    let mut energies = vec![energy];
    let mut terminated = TerminatedBy::MaxIters;
    let mut grad_norm = f64::NAN;
    let mut iterations = 0;

    for _ in 0..config.max_iters {
        let grad = gradient_fd(&x, config)?;
        grad_norm = norm(&grad);
        if grad_norm <= config.stop_grad_norm {
            terminated = TerminatedBy::GradNorm;
            break;
        }
        let mut step = config.step_rule.initial_step;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let candidate = step_along(&x, &grad, step);
            let trial = energy_of_coeffs(&candidate, config);
            if trial <= energy - config.step_rule.armijo * step * grad_norm * grad_norm {
                x = candidate;
                energy = trial;
                energies.push(energy);
                accepted = true;
                break;
            }
            step *= config.step_rule.shrink;
        }
        if !accepted {
            terminated = TerminatedBy::LineSearchFailure;
            break;
        }
        iterations += 1;
    }

    if terminated == TerminatedBy::MaxIters {
        // The loop exhausted its budget right after an accepted step; report
        // the gradient where we stopped, not one iteration stale.
        grad_norm = norm(&gradient_fd(&x, config)?);
    }

    let final_coeffs = rescale_to_length(&x, config.target_length)?;
    let report_samples = sample(&final_coeffs, REPORT_SAMPLES)?;
    let deviation = circle_deviation(&report_samples);
    let bound_gap = match bound_for_spec(&config.spec, config.target_length)? {
        Some(bound) => (energy - bound) / bound,
        None => f64::NAN,
    };
    Ok(MinimizeReport {
        energies,
        final_coeffs,
        final_grad_norm: grad_norm,
        circle_deviation: deviation,
        bound_gap,
        iterations_used: iterations,
        terminated_by: terminated,
    })
}

/// Energy excess of a radially perturbed circle over the round circle, both
/// rescaled to length 1 and evaluated with the same rule. Positive gaps are
/// local evidence that the circle minimizes; for kernels that only force
/// convexity the gap vanishes over convex perturbations.
pub fn perturbation_gap(
    spec: &EnergySpec,
    mode: usize,
    eps: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let config = MinimizeConfig {
        spec: spec.clone(),
        quad: quad.clone(),
        ..MinimizeConfig::new(spec.clone())
    };
    let perturbed = make_perturbed_circle(1.0, mode, eps)?;
    let circle = make_circle(1.0, 2)?;
    let e_perturbed = eval_curve(&perturbed, &config)?;
    let e_circle = eval_curve(&circle, &config)?;
    Ok(e_perturbed - e_circle)
}
