//! The `verify` subcommand: a self-contained invariant suite over the
//! builtin fixtures, printed as a pass/fail table.
//!
//! Every check is normalized to "defect <= tolerance" with a nonnegative
//! defect, so --strict can swap a single tolerance onto all of them.

use anyhow::{bail, Result};
use std::f64::consts::PI;
use tangentpoint::{
    f_energy, fenchel_report, g_energy, make_circle, make_ellipse, make_trefoil,
    resample_arclength, sample, tp_classic, tp_energy, tp_lower_bound, willmore_fractional,
    willmore_lower_bound, wirtinger_check, FourierCurve, QuadratureSpec,
};

#[derive(clap::Args)]
pub struct VerifyArgs {
    /// Run one group only: homogeneity | reparametrization | minorant-chain
    /// | fenchel | wirtinger | circle-identity.
    #[arg(long)]
    only: Option<String>,
    /// Replace every check tolerance with this value.
    #[arg(long)]
    strict: Option<f64>,
}

struct Check {
    group: &'static str,
    name: &'static str,
    defect: f64,
    tolerance: f64,
}

const GROUPS: [&str; 6] = [
    "homogeneity",
    "reparametrization",
    "minorant-chain",
    "fenchel",
    "wirtinger",
    "circle-identity",
];

pub fn run(args: &VerifyArgs) -> Result<i32> {
    if let Some(only) = &args.only {
        if !GROUPS.contains(&only.as_str()) {
            bail!(
                "unknown verify group {only:?}; expected one of: {}",
                GROUPS.join(", ")
            );
        }
    }
    let selected = |group: &str| args.only.as_deref().map_or(true, |only| only == group);

    let mut checks = Vec::new();
    if selected("homogeneity") {
        checks.extend(homogeneity()?);
    }
    if selected("reparametrization") {
        checks.extend(reparametrization()?);
    }
    if selected("minorant-chain") {
        checks.extend(minorant_chain()?);
    }
    if selected("fenchel") {
        checks.extend(fenchel()?);
    }
    if selected("wirtinger") {
        checks.extend(wirtinger()?);
    }
    if selected("circle-identity") {
        checks.extend(circle_identity()?);
    }
    if let Some(tol) = args.strict {
        for check in &mut checks {
            check.tolerance = tol;
        }
    }

    println!(
        "{:<18} {:<26} {:>12} {:>12}  {}",
        "group", "check", "defect", "tolerance", "status"
    );
    let mut first_fail: Option<&Check> = None;
    let mut passed = 0usize;
    for check in &checks {
        let pass = check.defect <= check.tolerance;
        if pass {
            passed += 1;
        } else if first_fail.is_none() {
            first_fail = Some(check);
        }
        println!(
            "{:<18} {:<26} {:>12.3e} {:>12.3e}  {}",
            check.group,
            check.name,
            check.defect,
            check.tolerance,
            if pass { "pass" } else { "FAIL" }
        );
    }
    println!("{} checks, {} passed, {} failed", checks.len(), passed, checks.len() - passed);
    if let Some(fail) = first_fail {
        println!("first failing invariant: {}/{}", fail.group, fail.name);
        return Ok(3);
    }
    Ok(0)
}

fn rule(n: usize, rounds: usize) -> QuadratureSpec {
    QuadratureSpec {
        n_u: n,
        n_w: n,
        grading_exponent: 4.0,
        doubling_rounds: rounds,
        convergence_rtol: 1e-6,
    }
}

fn scaled(curve: &FourierCurve, lambda: f64) -> FourierCurve {
    let mut out = curve.clone();
    for row in &mut out.coeffs {
        for c in row.iter_mut() {
            c.0 *= lambda;
            c.1 *= lambda;
        }
    }
    out
}

/// TP(lambda curve) = lambda^(2 + q - p) TP(curve), checked on grids that
/// map onto each other node for node so the identity is exact.
fn homogeneity() -> Result<Vec<Check>> {
    let quad = rule(128, 1);
    let curve = make_ellipse(1.5, 1.0)?;
    let mut out = Vec::new();
    for (name, p, q) in [
        ("tp-4-2-scaling", 4.0, 2.0),
        ("tp-3-2-scaling", 3.0, 2.0),
    ] {
        let base = tp_energy(&sample(&curve, 128)?, p, q, &quad)?.value;
        let mut worst = 0.0f64;
        for lambda in [0.5f64, 2.0] {
            let value = tp_energy(&sample(&scaled(&curve, lambda), 128)?, p, q, &quad)?.value;
            let expected = lambda.powf(2.0 + q - p) * base;
            worst = worst.max(((value - expected) / expected).abs());
        }
        out.push(Check {
            group: "homogeneity",
            name,
            defect: worst,
            tolerance: 1e-12,
        });
    }
    Ok(out)
}

/// The energy is a geometric quantity: Fourier and arc-length
/// parametrizations of the same ellipse must agree within the combined
/// grid-doubling error budget.
fn reparametrization() -> Result<Vec<Check>> {
    let quad = rule(256, 3);
    let fourier = tp_energy(&sample(&make_ellipse(2.0, 1.0)?, 256)?, 4.0, 2.0, &quad)?;
    let arc = tp_energy(
        &resample_arclength(&make_ellipse(2.0, 1.0)?, 256)?,
        4.0,
        2.0,
        &quad,
    )?;
    Ok(vec![Check {
        group: "reparametrization",
        name: "tp-4-2-parametrization",
        defect: (fourier.value - arc.value).abs(),
        tolerance: 3.0 * (fourier.error_estimate + arc.error_estimate),
    }])
}

/// G <= TP and F <= TP pointwise in the integrand, so the discrete values
/// may cross only within quadrature error; at the circle both collapse to
/// equality.
fn minorant_chain() -> Result<Vec<Check>> {
    let quad = rule(256, 2);
    let ellipse = resample_arclength(&make_ellipse(1.5, 1.0)?, 256)?;
    let mut out = Vec::new();

    let tp42 = tp_energy(&ellipse, 4.0, 2.0, &quad)?;
    let g42 = g_energy(&ellipse, 4.0, 2.0, &quad)?;
    out.push(Check {
        group: "minorant-chain",
        name: "g-below-tp-ellipse",
        defect: (g42.value - tp42.value).max(0.0),
        tolerance: 3.0 * (tp42.error_estimate + g42.error_estimate),
    });
    let tp32 = tp_energy(&ellipse, 3.0, 2.0, &quad)?;
    let f32v = f_energy(&ellipse, 3.0, 2.0, &quad)?;
    out.push(Check {
        group: "minorant-chain",
        name: "f-below-tp-ellipse",
        defect: (f32v.value - tp32.value).max(0.0),
        tolerance: 3.0 * (tp32.error_estimate + f32v.error_estimate),
    });

    let circle = resample_arclength(&make_circle(1.0, 2)?, 256)?;
    let tp42c = tp_energy(&circle, 4.0, 2.0, &quad)?.value;
    let g42c = g_energy(&circle, 4.0, 2.0, &quad)?.value;
    out.push(Check {
        group: "minorant-chain",
        name: "g-circle-equality",
        defect: ((g42c - tp42c) / tp42c).abs(),
        tolerance: 1e-5,
    });
    let tp32c = tp_energy(&circle, 3.0, 2.0, &quad)?.value;
    let f32c = f_energy(&circle, 3.0, 2.0, &quad)?.value;
    out.push(Check {
        group: "minorant-chain",
        name: "f-circle-equality",
        defect: ((f32c - tp32c) / tp32c).abs(),
        tolerance: 1e-5,
    });
    Ok(out)
}

/// Frozen-offset Gauss-map paths are closed spherical curves: u-paths have
/// length >= 2 pi, w-paths >= pi, with equality exactly on convex curves.
fn fenchel() -> Result<Vec<Check>> {
    let circle = fenchel_report(&sample(&make_circle(1.0, 2)?, 256)?)?;
    let ellipse = fenchel_report(&resample_arclength(&make_ellipse(2.0, 1.0)?, 512)?)?;
    let trefoil = fenchel_report(&sample(&make_trefoil(1.0)?, 256)?)?;
    Ok(vec![
        Check {
            group: "fenchel",
            name: "circle-floors",
            defect: (circle.min_path_u - 2.0 * PI)
                .abs()
                .max((circle.min_path_w - PI).abs()),
            tolerance: 1e-4,
        },
        Check {
            group: "fenchel",
            name: "ellipse-floors",
            defect: (ellipse.min_path_u - 2.0 * PI)
                .abs()
                .max((ellipse.min_path_w - PI).abs()),
            tolerance: 1e-4,
        },
        Check {
            group: "fenchel",
            name: "trefoil-excess",
            defect: (2.0 * PI + 0.01 - trefoil.min_path_u)
                .max(PI + 0.01 - trefoil.min_path_w)
                .max(0.0),
            tolerance: 0.0,
        },
    ])
}

fn wirtinger() -> Result<Vec<Check>> {
    let circle = resample_arclength(&make_circle(1.0, 2)?, 256)?;
    let mut worst = 0.0f64;
    for shift in [0.1, 0.3, 0.5] {
        let (lhs, rhs) = wirtinger_check(&circle, shift)?;
        worst = worst.max((rhs - lhs).abs());
    }
    let ellipse = resample_arclength(&make_ellipse(2.0, 1.0)?, 256)?;
    let (lhs, rhs) = wirtinger_check(&ellipse, 0.3)?;
    Ok(vec![
        Check {
            group: "wirtinger",
            name: "circle-equality",
            defect: worst,
            tolerance: 1e-10,
        },
        Check {
            group: "wirtinger",
            name: "ellipse-strictness",
            defect: (1e-4 - (rhs - lhs)).max(0.0),
            tolerance: 0.0,
        },
    ])
}

/// All of the closed forms the unit circle is supposed to attain.
fn circle_identity() -> Result<Vec<Check>> {
    let quad = rule(256, 1);
    let circle = sample(&make_circle(1.0, 2)?, 256)?;
    let rel = |value: f64, target: f64| ((value - target) / target).abs();
    Ok(vec![
        Check {
            group: "circle-identity",
            name: "tp-4-2-pi-squared",
            defect: rel(tp_energy(&circle, 4.0, 2.0, &quad)?.value, PI * PI),
            tolerance: 1e-6,
        },
        Check {
            group: "circle-identity",
            name: "tp-3-2-bound",
            defect: rel(
                tp_energy(&circle, 3.0, 2.0, &quad)?.value,
                tp_lower_bound(1.0, 3.0, 2.0)?,
            ),
            tolerance: 1e-4,
        },
        Check {
            group: "circle-identity",
            name: "tp-2-1-bound",
            defect: rel(
                tp_energy(&circle, 2.0, 1.0, &quad)?.value,
                tp_lower_bound(1.0, 2.0, 1.0)?,
            ),
            tolerance: 1e-4,
        },
        Check {
            group: "circle-identity",
            name: "classic-q2-bound",
            defect: rel(
                tp_classic(&circle, 2.0, &quad)?.value,
                4.0 * tp_lower_bound(1.0, 4.0, 2.0)?,
            ),
            tolerance: 1e-4,
        },
        Check {
            group: "circle-identity",
            name: "willmore-disk-bound",
            defect: rel(
                willmore_fractional(&circle, 0.5, 1.0, &quad)?.value,
                willmore_lower_bound(1.0, 0.5, 1.0)?,
            ),
            tolerance: 1e-4,
        },
    ])
}
