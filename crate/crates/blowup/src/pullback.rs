//! Vector fields on (x, ε) space and their pullbacks through charts.
//!
//! Every evaluator returns n+1 components: the phase components and the
//! ε-component, which is zero for a regularized family.

use conv_reg::{AxisGeom, Cut, RegularizedField};
use nalgebra::{DMatrix, DVector};

use crate::chart::{monomial, monomial_i, rational_f64, ChartMap};
use crate::error::BlowupError;

pub trait Evaluator {
    /// Number of input (and output) coordinates.
    fn dim(&self) -> usize;
    fn eval(&self, p: &[f64]) -> Result<Vec<f64>, BlowupError>;
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, p: &[f64]) -> Result<Vec<f64>, BlowupError> {
        (**self).eval(p)
    }
}

/// (x, ε) ↦ (m_ε ∗ X)(x) ⊕ 0.
#[derive(Clone, Debug)]
pub struct RegularizedEvaluator {
    rf: RegularizedField,
}

impl RegularizedEvaluator {
    pub fn new(rf: &RegularizedField) -> Self {
        RegularizedEvaluator { rf: rf.clone() }
    }
}

impl Evaluator for RegularizedEvaluator {
    fn dim(&self) -> usize {
        self.rf.n() + 1
    }

    fn eval(&self, p: &[f64]) -> Result<Vec<f64>, BlowupError> {
        let n = self.rf.n();
        if p.len() != n + 1 {
            return Err(BlowupError::Dimension { expected: n + 1, got: p.len() });
        }
        let mut v = self.rf.eval(&p[..n], p[n])?;
        v.push(0.0);
        Ok(v)
    }
}

/// φ*Y: solves J(w)·v = Y(φ(w)).
#[derive(Clone, Debug)]
pub struct Pullback<E> {
    chart: ChartMap,
    inner: E,
}

pub fn pullback<E: Evaluator>(chart: &ChartMap, inner: E) -> Pullback<E> {
    Pullback { chart: chart.clone(), inner }
}

impl<E: Evaluator> Evaluator for Pullback<E> {
    fn dim(&self) -> usize {
        self.chart.n() + 1
    }

    fn eval(&self, w: &[f64]) -> Result<Vec<f64>, BlowupError> {
        let m = self.dim();
        if w.len() != m {
            return Err(BlowupError::Dimension { expected: m, got: w.len() });
        }
        if self.chart.divisor_value(w) == 0.0 {
            return Err(BlowupError::OnDivisor);
        }
        let y = self.inner.eval(&self.chart.apply(w))?;
        let jac = self.chart.jacobian(w);
        let mat = DMatrix::from_fn(m, m, |i, j| jac[i][j]);
        let rhs = DVector::from_vec(y);
        let sol = mat.lu().solve(&rhs).ok_or(BlowupError::OnDivisor)?;
        Ok(sol.iter().copied().collect())
    }
}

/// D(w)·Y(w) for a divisor monomial D.
#[derive(Clone, Debug)]
pub struct DivideDivisor<E> {
    divisor: Vec<u32>,
    inner: E,
}

pub fn divide_divisor<E: Evaluator>(inner: E, divisor: &[u32]) -> DivideDivisor<E> {
    DivideDivisor { divisor: divisor.to_vec(), inner }
}

impl<E: Evaluator> Evaluator for DivideDivisor<E> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, w: &[f64]) -> Result<Vec<f64>, BlowupError> {
        let d = monomial(w, &self.divisor);
        Ok(self.inner.eval(w)?.into_iter().map(|v| d * v).collect())
    }
}

/// J(w)·v: the chart vector v at w seen in (x, ε) coordinates.
pub fn push_forward(chart: &ChartMap, w: &[f64], v: &[f64]) -> Vec<f64> {
    chart.jacobian(w).iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

#[derive(Clone, Debug)]
struct Coef {
    k: usize,
    j: usize,
    c: f64,
    e: Vec<i64>,
}

#[derive(Clone, Debug)]
struct AxisMono {
    sign: f64,
    alpha: Vec<u32>,
    beta: Vec<u32>,
}

/// The divisor-divided pullback evaluated directly in chart coordinates.
///
/// In the chart, x_i − εt = w^g (σα − βt) with g the common part of the
/// monomials of x_i and ε, so the sign regions of the convolution integral
/// are read off the reduced factor σα − βt. That keeps the formula valid on
/// the divisor itself, where the generic pullback is undefined.
#[derive(Clone, Debug)]
pub struct ChartField {
    rf: RegularizedField,
    chart: ChartMap,
    coefs: Vec<Coef>,
    axes: Vec<AxisMono>,
}

impl ChartField {
    pub fn new(rf: &RegularizedField, chart: &ChartMap) -> Result<Self, BlowupError> {
        let n = rf.n();
        if chart.n() != n {
            return Err(BlowupError::Dimension { expected: n, got: chart.n() });
        }
        let a = chart.exponents();
        let inv = chart.inverse_exponents()?;
        let d = chart.divisor();
        let mut coefs = Vec::new();
        for (k, row) in inv.iter().enumerate() {
            for j in 0..n {
                let c = rational_f64(row[j]);
                if c == 0.0 {
                    continue;
                }
                let e = (0..=n)
                    .map(|l| d[l] as i64 + (l == k) as i64 - a[j][l] as i64)
                    .collect();
                coefs.push(Coef { k, j, c: c * chart.signs()[j] as f64, e });
            }
        }
        let eps_row = &a[n];
        let axes = (0..n)
            .map(|i| {
                let g: Vec<u32> = a[i].iter().zip(eps_row).map(|(x, y)| *x.min(y)).collect();
                AxisMono {
                    sign: chart.signs()[i] as f64,
                    alpha: a[i].iter().zip(&g).map(|(x, y)| x - y).collect(),
                    beta: eps_row.iter().zip(&g).map(|(x, y)| x - y).collect(),
                }
            })
            .collect();
        Ok(ChartField { rf: rf.clone(), chart: chart.clone(), coefs, axes })
    }

    pub fn chart(&self) -> &ChartMap {
        &self.chart
    }

    pub fn field(&self) -> &RegularizedField {
        &self.rf
    }

    /// Same chart, different regularized field.
    pub fn with_field(&self, rf: &RegularizedField) -> Self {
        ChartField { rf: rf.clone(), ..self.clone() }
    }

    /// True when every divided coefficient is a polynomial in the chart variables.
    pub fn is_polynomial(&self) -> bool {
        self.coefs.iter().all(|c| c.e.iter().all(|&v| v >= 0))
    }

    /// (m_ε ∗ X)∘φ at w, including points of the divisor.
    pub fn extension(&self, w: &[f64]) -> Result<Vec<f64>, BlowupError> {
        let n = self.rf.n();
        if w.len() != n + 1 {
            return Err(BlowupError::Dimension { expected: n + 1, got: w.len() });
        }
        let old = self.chart.apply(w);
        let eps = old[n];
        let locus = self.rf.locus();
        let geom: Vec<AxisGeom> = (0..n)
            .map(|i| {
                if locus.is_active(i) {
                    let m = &self.axes[i];
                    AxisGeom::reduced(old[i], eps, m.sign * monomial(w, &m.alpha), monomial(w, &m.beta))
                } else {
                    AxisGeom { value: old[i], eps, cut: Cut::Plus }
                }
            })
            .collect();
        let mut out = vec![0.0; n];
        self.rf.eval_geom(&geom, &mut out)?;
        Ok(out)
    }

    /// Components of the divided pullback 𝒳 = D·φ*(m_ε ∗ X).
    pub fn divided(&self, w: &[f64]) -> Result<Vec<f64>, BlowupError> {
        let f = self.extension(w)?;
        let mut out = vec![0.0; self.rf.n() + 1];
        for c in &self.coefs {
            out[c.k] += c.c * monomial_i(w, &c.e) * f[c.j];
        }
        Ok(out)
    }

    /// Derivative of the ε-monomial of the chart along 𝒳.
    pub fn eps_drift(&self, w: &[f64]) -> Result<f64, BlowupError> {
        let v = self.divided(w)?;
        let n = self.rf.n();
        let e = &self.chart.exponents()[n];
        let mut s = 0.0;
        for k in 0..=n {
            if e[k] == 0 {
                continue;
            }
            let mut ek = e.clone();
            ek[k] -= 1;
            s += e[k] as f64 * monomial(w, &ek) * v[k];
        }
        Ok(s * self.chart.signs()[n] as f64)
    }
}

impl Evaluator for ChartField {
    fn dim(&self) -> usize {
        self.rf.n() + 1
    }

    fn eval(&self, w: &[f64]) -> Result<Vec<f64>, BlowupError> {
        self.divided(w)
    }
}
