//! Tangent-point and related knot energies of closed curves.
//!
//! The crate evaluates a two-parameter family of tangent-point energies and
//! several companion functionals (minorants, fractional Willmore energies,
//! Gauss-map path lengths) on curves given as truncated Fourier series,
//! computes the matching closed-form lower bounds, and runs gradient descent
//! over Fourier coefficients to confirm that round circles minimize these
//! energies in the expected parameter regions.
//!
//! Organization:
//! - [`curves`]: Fourier curve representation and fixture constructors
//! - [`samples`]: sampling, arc-length reparametrization, geometric checks
//! - [`gaussmap`]: the two-variable Gauss map, its partial derivatives, and
//!   spherical path lengths with their total-curvature floors
//! - [`quadrature`]: graded product rules for the singular double integrals
//! - [`energies`]: energy evaluation with convergence control
//! - [`bounds`]: gamma-function closed forms and parameter-region logic
//! - [`minimize`]: finite-difference gradient descent over coefficients

pub mod bounds;
pub mod curves;
pub mod energies;
pub mod error;
pub mod gaussmap;
pub mod minimize;
pub mod output;
pub mod quadrature;
pub mod samples;
pub mod vec3;

pub use bounds::{
    classify_region, sigma_mu, sin_power_integral, tp_lower_bound, willmore_lower_bound,
    RegionFlags,
};
pub use curves::{
    curve_from_json, curve_to_json, make_circle, make_ellipse, make_figure_eight,
    make_perturbed_circle, make_trefoil, rescale_to_length, FourierCurve,
};
pub use energies::{
    bound_for_spec, evaluate, f_energy, f_slice_u, functional_i1, functional_i2, functional_i3,
    g_energy, g_slice_w, nonlocal_mean_curvature, nonlocal_mean_curvature_gauss, tp_classic,
    tp_energy, tp_energy_at, willmore_fractional, wirtinger_check, EnergyKind, EnergySpec,
    EnergyValue, ZVar, EMBED_TOL,
};
pub use error::{Error, Result};
pub use minimize::{
    circle_deviation, descend, energy_of_coeffs, gradient_fd, perturbation_gap, MinimizeConfig,
    MinimizeReport, StepRule, TerminatedBy,
};
pub use gaussmap::{
    fenchel_report, gauss_eval, gauss_eval_at, path_length_u, path_length_w, project_perp,
    FenchelReport, GaussEval,
};
pub use quadrature::{
    convergence_study, graded_half_nodes, graded_nodes, periodic_trapezoid, study_from_values,
    ConvergenceStudy, QuadratureSpec, ORDER_EXACT,
};
pub use samples::{
    embeddedness_ratio, is_convex_planar, is_embedded_check, resample_arclength, sample,
    ArcLengthCurve, ConvexityReport, CurveModel, CurveSamples,
};
pub use vec3::Vec3;
