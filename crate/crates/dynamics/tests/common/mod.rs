#![allow(dead_code)]

use conv_reg::{Mollifier, RegularizedField};
use dynamics::{Orientation, Section, SewingLeg};
use pws_core::{default_vars, PiecewiseField};

/// X₊ = ∂x + (−3(x+λ)² + 2(x+λ) + 7/4)∂y above y = 0, X₋ = −∂x + (3x² − 7x + 2)∂y below.
pub fn lambda_family(lambda: &str) -> PiecewiseField {
    let g = format!("-3*(x+({lambda}))^2 + 2*(x+({lambda})) + 7/4");
    PiecewiseField::parse(2, &default_vars(2), &[1], &[&["1", g.as_str()], &["-1", "3*x^2 - 7*x + 2"]]).unwrap()
}

pub fn regularized(lambda: &str) -> RegularizedField {
    RegularizedField::new(lambda_family(lambda), Mollifier::plateau(0.25).unwrap()).unwrap()
}

pub fn sigma(o: Orientation) -> Section {
    Section::coordinate(2, 1, 0.0, o).unwrap()
}

/// Up through Σ, over the top along X₊, down through Σ, back along X₋.
pub fn sewing_legs() -> Vec<SewingLeg> {
    vec![
        SewingLeg { branch: 0, to: sigma(Orientation::Negative) },
        SewingLeg { branch: 1, to: sigma(Orientation::Positive) },
    ]
}

pub fn x_section(level: f64) -> Section {
    Section::coordinate(2, 0, level, Orientation::Positive).unwrap()
}

/// The same loop, started and closed on {x = level} in the upper half plane.
pub fn sewing_legs_on(level: f64) -> Vec<SewingLeg> {
    vec![
        SewingLeg { branch: 0, to: sigma(Orientation::Negative) },
        SewingLeg { branch: 1, to: sigma(Orientation::Positive) },
        SewingLeg { branch: 0, to: x_section(level) },
    ]
}
