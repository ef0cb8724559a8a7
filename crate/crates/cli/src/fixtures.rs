//! Builtin fixture grammar shared by every subcommand:
//! `circle | ellipse:a:b | perturbed:mode:eps | trefoil`.
//!
//! Fixtures with an intrinsic size (circle, perturbed circle) are built at
//! unit length; the others keep their natural size until the caller rescales.

use anyhow::{bail, Context, Result};
use tangentpoint::{make_circle, make_ellipse, make_perturbed_circle, make_trefoil, FourierCurve};

pub const GRAMMAR: &str = "circle | ellipse:a:b | perturbed:mode:eps | trefoil";

pub fn parse_fixture(text: &str) -> Result<FourierCurve> {
    let parts: Vec<&str> = text.split(':').collect();
    let curve = match (parts[0], parts.len()) {
        ("circle", 1) => make_circle(1.0, 2)?,
        ("trefoil", 1) => make_trefoil(1.0)?,
        ("ellipse", 3) => {
            let a = axis(parts[1], "a")?;
            let b = axis(parts[2], "b")?;
            make_ellipse(a, b)?
        }
        ("perturbed", 3) => {
            let mode: usize = parts[1]
                .parse()
                .with_context(|| format!("perturbation mode must be a positive integer, got {:?}", parts[1]))?;
            let eps: f64 = parts[2]
                .parse()
                .with_context(|| format!("perturbation amplitude must be a number, got {:?}", parts[2]))?;
            make_perturbed_circle(1.0, mode, eps)?
        }
        _ => bail!("unknown fixture {text:?}; expected {GRAMMAR}"),
    };
    Ok(curve)
}

fn axis(text: &str, name: &str) -> Result<f64> {
    let value: f64 = text
        .parse()
        .with_context(|| format!("ellipse semi-axis {name} must be a number, got {text:?}"))?;
    if !(value > 0.0) {
        bail!("ellipse semi-axis {name} must be positive, got {value}");
    }
    Ok(value)
}
