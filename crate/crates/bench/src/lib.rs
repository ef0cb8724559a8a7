//! Shared fixtures for the criterion benchmarks in `benches/`.

use tangentpoint::curves::{make_circle, make_ellipse, make_trefoil};
use tangentpoint::samples::{sample, CurveSamples};

pub fn circle_samples(n: usize) -> CurveSamples {
    sample(&make_circle(1.0, 2).unwrap(), n).unwrap()
}

pub fn ellipse_samples(n: usize) -> CurveSamples {
    sample(&make_ellipse(2.0, 1.0).unwrap(), n).unwrap()
}

pub fn trefoil_samples(n: usize) -> CurveSamples {
    sample(&make_trefoil(1.0).unwrap(), n).unwrap()
}
