//! Exact affine coordinate changes of polynomial fields and their jets.

use num_traits::{One, Zero};
use serde::Serialize;

use pws_core::{MultiPoly, Rational, VarList};

use crate::error::DynError;

/// X = M·x + b, with exact rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineChange {
    pub matrix: Vec<Vec<Rational>>,
    pub offset: Vec<Rational>,
}

impl AffineChange {
    pub fn new(matrix: Vec<Vec<Rational>>, offset: Vec<Rational>) -> Result<Self, DynError> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) || offset.len() != n {
            return Err(DynError::Invalid("affine change must be square with matching offset".into()));
        }
        Ok(AffineChange { matrix, offset })
    }

    pub fn linear(matrix: Vec<Vec<Rational>>) -> Result<Self, DynError> {
        let n = matrix.len();
        Self::new(matrix, vec![Rational::zero(); n])
    }

    pub fn identity(n: usize) -> Self {
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        AffineChange { matrix, offset: vec![Rational::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    /// x = M⁻¹(X − b), by Gauss–Jordan elimination over ℚ.
    pub fn inverse(&self) -> Result<AffineChange, DynError> {
        let n = self.n();
        let mut a: Vec<Vec<Rational>> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(DynError::SingularChange)?;
            a.swap(col, piv);
            let p = a[col][col].clone();
            a[col].iter_mut().for_each(|v| *v = &*v / &p);
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..2 * n {
                        let sub = &f * &a[col][c];
                        a[r][c] -= sub;
                    }
                }
            }
        }
        let inv: Vec<Vec<Rational>> = a.into_iter().map(|r| r[n..].to_vec()).collect();
        let offset = inv.iter().map(|row| -row.iter().zip(&self.offset).map(|(m, b)| m * b).sum::<Rational>()).collect();
        Ok(AffineChange { matrix: inv, offset })
    }

    /// Images (M·x + b)_i as polynomials in `vars`.
    fn images(&self, vars: &VarList) -> Vec<MultiPoly> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| {
                let mut p = MultiPoly::constant(vars, b.clone());
                for (j, m) in row.iter().enumerate() {
                    if !m.is_zero() {
                        p = &p + &MultiPoly::var(vars, j).scale(m);
                    }
                }
                p
            })
            .collect()
    }

    pub fn describe(&self, old: &VarList, new: &VarList) -> Vec<String> {
        self.images(old)
            .iter()
            .zip(new.iter())
            .map(|(p, v)| format!("{v} = {p}"))
            .collect()
    }
}

/// A transformed field split into its jet and the terms above the order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Jet {
    pub order: u32,
    #[serde(serialize_with = "polys_as_strings")]
    pub jet: Vec<MultiPoly>,
    #[serde(serialize_with = "polys_as_strings")]
    pub remainder: Vec<MultiPoly>,
}

fn polys_as_strings<S: serde::Serializer>(v: &[MultiPoly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.to_string()))
}

impl Jet {
    pub fn remainder_is_zero(&self) -> bool {
        self.remainder.iter().all(MultiPoly::is_zero)
    }
}

/// The field ẋ = f(x) written in X = M·x + b: Ẋ = M·f(M⁻¹(X − b)).
pub fn transform_field(comps: &[MultiPoly], change: &AffineChange, new_vars: &VarList) -> Result<Vec<MultiPoly>, DynError> {
    let n = comps.len();
    if change.n() != n || new_vars.len() != n {
        return Err(DynError::Dimension { expected: n, got: change.n().min(new_vars.len()) });
    }
    let back = change.inverse()?.images(new_vars);
    let pulled: Vec<MultiPoly> = comps.iter().map(|c| c.substitute(&back, new_vars)).collect();
    Ok(change
        .matrix
        .iter()
        .map(|row| {
            let mut acc = MultiPoly::zero(new_vars);
            for (m, p) in row.iter().zip(&pulled) {
                if !m.is_zero() {
                    acc = &acc + &p.scale(m);
                }
            }
            acc
        })
        .collect())
}

pub fn jet_transform(comps: &[MultiPoly], change: &AffineChange, new_vars: &VarList, order: u32) -> Result<Jet, DynError> {
    let full = transform_field(comps, change, new_vars)?;
    let jet: Vec<MultiPoly> = full.iter().map(|p| p.truncate(order)).collect();
    let remainder = full.iter().zip(&jet).map(|(f, j)| f - j).collect();
    Ok(Jet { order, jet, remainder })
}
