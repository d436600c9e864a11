//! Equilibria of polynomial fields: Newton location and linear classification.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::DynError;
use crate::field::PolyField;
use crate::poincare::Multiplier;

pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Saddle,
    Node,
    Focus,
    CenterCandidate,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumInfo {
    pub location: Vec<f64>,
    pub jacobian: Vec<Vec<f64>>,
    pub trace: f64,
    pub determinant: f64,
    pub eigenvalues: Vec<Multiplier>,
    pub classification: Classification,
}

fn eigen(j: &[Vec<f64>]) -> Vec<Multiplier> {
    let d = j.len();
    let m = DMatrix::from_fn(d, d, |r, c| j[r][c]);
    let mut ev: Vec<Multiplier> = m.complex_eigenvalues().iter().map(|z| Multiplier { re: z.re, im: z.im }).collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

fn classify(trace: f64, det: f64, ev: &[Multiplier]) -> Classification {
    let tol = DEGENERACY_TOL;
    if det.abs() <= tol {
        return Classification::Degenerate;
    }
    if ev.len() == 2 {
        if det < 0.0 {
            return Classification::Saddle;
        }
        if trace.abs() <= tol {
            return Classification::CenterCandidate;
        }
        // repeated eigenvalues count as a node whatever the rounding of the discriminant
        let disc = trace * trace - 4.0 * det;
        let scale = trace * trace + 4.0 * det.abs();
        return if disc < -1e-12 * scale { Classification::Focus } else { Classification::Node };
    }
    let pos = ev.iter().filter(|z| z.re > tol).count();
    let neg = ev.iter().filter(|z| z.re < -tol).count();
    let complex = ev.iter().any(|z| z.im.abs() > tol);
    if pos > 0 && neg > 0 {
        Classification::Saddle
    } else if pos + neg < ev.len() {
        Classification::CenterCandidate
    } else if complex {
        Classification::Focus
    } else {
        Classification::Node
    }
}

/// Linearization at `point`, from the exact Jacobian polynomials.
pub fn classify_equilibrium(field: &PolyField, point: &[f64]) -> EquilibriumInfo {
    let jacobian = field.jacobian(point);
    let d = jacobian.len();
    let m = DMatrix::from_fn(d, d, |r, c| jacobian[r][c]);
    let trace = m.trace();
    let determinant = m.determinant();
    let eigenvalues = eigen(&jacobian);
    let classification = classify(trace, determinant, &eigenvalues);
    EquilibriumInfo { location: point.to_vec(), jacobian, trace, determinant, eigenvalues, classification }
}

/// Newton's method on X = 0 with the exact Jacobian.
pub fn find_equilibrium(field: &PolyField, seed: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>, DynError> {
    let d = field.components().len();
    if seed.len() != d {
        return Err(DynError::Dimension { expected: d, got: seed.len() });
    }
    let mut x = seed.to_vec();
    for it in 0..=max_iter {
        let f = field.eval_vec(&x);
        let res = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if res < tol {
            return Ok(x);
        }
        if it == max_iter {
            return Err(DynError::NoConvergence { iterations: it, residual: res, reason: "iteration limit".into() });
        }
        let j = field.jacobian(&x);
        let step = DMatrix::from_fn(d, d, |r, c| j[r][c])
            .lu()
            .solve(&DVector::from_iterator(d, f.iter().map(|v| -v)))
            .ok_or(DynError::NoConvergence { iterations: it, residual: res, reason: "singular Jacobian".into() })?;
        x.iter_mut().zip(step.iter()).for_each(|(a, b)| *a += b);
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use pws_core::default_vars;

    #[test]
    fn linear_saddle_and_focus() {
        let vars = default_vars(2);
        let s = PolyField::parse(&vars, &["x", "-y"]).unwrap();
        assert_eq!(classify_equilibrium(&s, &[0.0, 0.0]).classification, Classification::Saddle);
        let f = PolyField::parse(&vars, &["-x/10 + y", "-x - y/10"]).unwrap();
        let info = classify_equilibrium(&f, &[0.0, 0.0]);
        assert_eq!(info.classification, Classification::Focus);
        assert!((info.trace + 0.2).abs() < 1e-15);
        let c = PolyField::parse(&vars, &["y", "-x"]).unwrap();
        assert_eq!(classify_equilibrium(&c, &[0.0, 0.0]).classification, Classification::CenterCandidate);
        let d = PolyField::parse(&vars, &["x^2", "-y"]).unwrap();
        assert_eq!(classify_equilibrium(&d, &[0.0, 0.0]).classification, Classification::Degenerate);
    }

    #[test]
    fn newton_finds_a_root() {
        let vars = default_vars(2);
        let f = PolyField::parse(&vars, &["x^2 + y^2 - 1", "x - y"]).unwrap();
        let x = find_equilibrium(&f, &[1.0, 0.5], 1e-14, 50).unwrap();
        assert!((x[0] - 0.5f64.sqrt()).abs() < 1e-14 && (x[1] - x[0]).abs() < 1e-15);
    }

    #[test]
    fn spatial_saddle_focus() {
        let vars = default_vars(3);
        let f = PolyField::parse(&vars, &["-x/10 + y", "-x - y/10", "z"]).unwrap();
        assert_eq!(classify_equilibrium(&f, &[0.0; 3]).classification, Classification::Saddle);
        let g = PolyField::parse(&vars, &["-x/10 + y", "-x - y/10", "-z"]).unwrap();
        assert_eq!(classify_equilibrium(&g, &[0.0; 3]).classification, Classification::Focus);
    }
}
