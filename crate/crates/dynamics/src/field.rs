//! Vector fields the integrator can follow.

use blowup::{ChartField, ChartMap};
use conv_reg::{convolve_callable, AdaptiveConfig, RegularizedField};
use pws_core::{MultiPoly, PiecewiseField, PolyF64, VarList};

use crate::error::DynError;

pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<(), DynError>;
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<(), DynError> {
        (**self).eval(x, out)
    }
}

/// Closure-backed field.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<(), DynError> {
        (self.f)(x, out);
        Ok(())
    }
}

/// Polynomial field with its exact Jacobian and divergence.
#[derive(Clone, Debug)]
pub struct PolyField {
    comps: Vec<MultiPoly>,
    compiled: Vec<PolyF64>,
    jac: Vec<Vec<PolyF64>>,
    div: PolyF64,
}

impl PolyField {
    pub fn new(comps: Vec<MultiPoly>) -> Result<Self, DynError> {
        let n = comps.len();
        if n == 0 {
            return Err(DynError::Invalid("empty field".into()));
        }
        let vars = comps[0].vars().clone();
        if vars.len() != n || comps.iter().any(|c| c.vars() != &vars) {
            return Err(DynError::Invalid("components must share n variables".into()));
        }
        let compiled = comps.iter().map(PolyF64::new).collect();
        let jac = comps.iter().map(|c| (0..n).map(|j| c.partial(j).to_f64()).collect()).collect();
        let mut div = MultiPoly::zero(&vars);
        for (i, c) in comps.iter().enumerate() {
            div = &div + &c.partial(i);
        }
        Ok(PolyField { comps, compiled, jac, div: div.to_f64() })
    }

    pub fn parse(vars: &VarList, comps: &[&str]) -> Result<Self, DynError> {
        let polys = comps.iter().map(|s| MultiPoly::parse(s, vars)).collect::<Result<Vec<_>, _>>()?;
        Self::new(polys)
    }

    /// The polynomial extension of one branch of a piecewise field.
    pub fn branch(field: &PiecewiseField, mask: usize) -> Result<Self, DynError> {
        if mask >= field.num_branches() {
            return Err(DynError::Invalid(format!("branch mask {mask} out of range")));
        }
        Self::new(field.branch_by_mask(mask).to_vec())
    }

    pub fn vars(&self) -> &VarList {
        self.comps[0].vars()
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.comps
    }

    /// ∂X_i/∂x_j as an exact polynomial.
    pub fn jacobian_poly(&self, i: usize, j: usize) -> MultiPoly {
        self.comps[i].partial(j)
    }

    pub fn trace_poly(&self) -> MultiPoly {
        let mut t = MultiPoly::zero(self.vars());
        for i in 0..self.comps.len() {
            t = &t + &self.comps[i].partial(i);
        }
        t
    }

    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jac.iter().map(|row| row.iter().map(|p| p.eval(x)).collect()).collect()
    }

    pub fn divergence(&self, x: &[f64]) -> f64 {
        self.div.eval(x)
    }

    pub fn eval_vec(&self, x: &[f64]) -> Vec<f64> {
        self.compiled.iter().map(|p| p.eval(x)).collect()
    }
}

impl VectorField for PolyField {
    fn dim(&self) -> usize {
        self.comps.len()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<(), DynError> {
        for (o, p) in out.iter_mut().zip(&self.compiled) {
            *o = p.eval(x);
        }
        Ok(())
    }
}

/// m_ε ∗ X at a fixed ε > 0, in the original coordinates.
#[derive(Clone, Debug)]
pub struct RegularizedVf {
    rf: RegularizedField,
    eps: f64,
}

impl RegularizedVf {
    pub fn new(rf: &RegularizedField, eps: f64) -> Result<Self, DynError> {
        if !(eps > 0.0) {
            return Err(DynError::Invalid(format!("ε must be positive, got {eps}")));
        }
        Ok(RegularizedVf { rf: rf.clone(), eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl VectorField for RegularizedVf {
    fn dim(&self) -> usize {
        self.rf.n()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<(), DynError> {
        out.copy_from_slice(&self.rf.eval(x, self.eps)?);
        Ok(())
    }
}

/// Same field, evaluated by nested adaptive quadrature of the branches instead of mollifier moments.
#[derive(Clone, Debug)]
pub struct QuadratureVf {
    rf: RegularizedField,
    eps: f64,
}

impl QuadratureVf {
    pub fn new(rf: &RegularizedField, eps: f64) -> Result<Self, DynError> {
        if !(eps > 0.0) {
            return Err(DynError::Invalid(format!("ε must be positive, got {eps}")));
        }
        Ok(QuadratureVf { rf: rf.clone(), eps })
    }
}

impl VectorField for QuadratureVf {
    fn dim(&self) -> usize {
        self.rf.n()
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<(), DynError> {
        let cfg = AdaptiveConfig { abs_tol: 1e-12, ..Default::default() };
        out.copy_from_slice(&convolve_callable(self.rf.base(), self.rf.mollifier(), x, self.eps, cfg)?);
        Ok(())
    }
}

/// The divided pullback in the family chart of the active axes:
/// coordinates (x̲, y_I, ρ) with x_I = ρ·y_I and ε = ρ.
#[derive(Clone, Debug)]
pub struct FamilyChartVf {
    cf: ChartField,
    active: Vec<usize>,
}

impl FamilyChartVf {
    pub fn new(rf: &RegularizedField) -> Result<Self, DynError> {
        let active = rf.locus().active().to_vec();
        let chart = ChartMap::family(rf.n(), &active)?;
        Ok(FamilyChartVf { cf: ChartField::new(rf, &chart)?, active })
    }

    pub fn chart(&self) -> &ChartMap {
        self.cf.chart()
    }

    /// Chart point over (x, ε), ε > 0.
    pub fn to_chart(&self, x: &[f64], eps: f64) -> Vec<f64> {
        let mut w = x.to_vec();
        for &a in &self.active {
            w[a] /= eps;
        }
        w.push(eps);
        w
    }

    pub fn from_chart(&self, w: &[f64]) -> Vec<f64> {
        let n = w.len() - 1;
        let mut x = w[..n].to_vec();
        for &a in &self.active {
            x[a] *= w[n];
        }
        x
    }
}

impl VectorField for FamilyChartVf {
    fn dim(&self) -> usize {
        self.cf.field().n() + 1
    }
    fn eval(&self, w: &[f64], out: &mut [f64]) -> Result<(), DynError> {
        out.copy_from_slice(&self.cf.divided(w)?);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use conv_reg::Mollifier;
    use pws_core::{default_vars, rat};

    #[test]
    fn poly_field_derivatives_are_exact() {
        let vars = default_vars(2);
        let f = PolyField::parse(&vars, &["x*y - x", "y^2 + 3*x"]).unwrap();
        assert_eq!(f.trace_poly(), MultiPoly::parse("y - 1 + 2*y", &vars).unwrap());
        assert_eq!(f.jacobian(&[2.0, 5.0]), vec![vec![4.0, 2.0], vec![3.0, 10.0]]);
        assert_eq!(f.divergence(&[2.0, 5.0]), 14.0);
        assert_eq!(f.jacobian_poly(1, 0), MultiPoly::constant(&vars, rat(3, 1)));
    }

    #[test]
    fn family_chart_round_trip() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[1], &[&["1", "1"], &["-1", "2"]]).unwrap();
        let rf = RegularizedField::new(f, Mollifier::box_profile()).unwrap();
        let vf = FamilyChartVf::new(&rf).unwrap();
        let w = vf.to_chart(&[0.3, 0.004], 0.01);
        assert!((w[1] - 0.4).abs() < 1e-15);
        let x = vf.from_chart(&w);
        assert!((x[1] - 0.004).abs() < 1e-17);
        let mut a = [0.0; 3];
        vf.eval(&w, &mut a).unwrap();
        let mut b = [0.0; 2];
        RegularizedVf::new(&rf, 0.01).unwrap().eval(&x, &mut b).unwrap();
        // the chart field is ε·(m_ε ∗ X) pulled back: x-component scales by ε
        assert!((a[0] - 0.01 * b[0]).abs() < 1e-14);
        assert!((a[1] - b[1]).abs() < 1e-12);
        assert_eq!(a[2], 0.0);
    }
}
