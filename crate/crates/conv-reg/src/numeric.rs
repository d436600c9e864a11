//! Numeric evaluation of m_ε ∗ X.
//!
//! Polynomial fields go through a moment evaluator: after the change of
//! variables x − εt, each branch monomial factors over the axes, and every
//! factor is a binomial combination of mollifier moments over the part of
//! [−1, 1] where that branch is selected. Callable fields use nested adaptive
//! Gauss–Legendre quadrature over the tensor cube.

use std::sync::Arc;

use pws_core::{BranchField, NormalCrossingsLocus, PiecewiseField};

use crate::error::ConvError;
use crate::mollifier::{Mollifier, MAX_MOMENT};
use crate::quad::{adaptive_vec, AdaptiveConfig};

/// Which part of the mollifier axis [−1, 1] selects the `+` branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cut {
    /// `+` for t < c.
    Below(f64),
    /// `+` for t > c.
    Above(f64),
    /// The whole axis selects `+`.
    Plus,
    /// The whole axis selects `−`.
    Minus,
    /// The point sits on the hyperplane and ε = 0.
    OnLocus,
}

/// Per-axis data of one evaluation: the integrand uses value − eps·t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisGeom {
    pub value: f64,
    pub eps: f64,
    pub cut: Cut,
}

impl AxisGeom {
    /// Plain coordinates: the `+` side is x − εt > 0.
    pub fn plain(x: f64, eps: f64) -> Self {
        let cut = if eps > 0.0 {
            Cut::Below(x / eps)
        } else if x > 0.0 {
            Cut::Plus
        } else if x < 0.0 {
            Cut::Minus
        } else {
            Cut::OnLocus
        };
        AxisGeom { value: x, eps, cut }
    }

    /// Sign region sσα − βt > 0, written for the reduced form of a chart.
    pub fn reduced(value: f64, eps: f64, alpha: f64, beta: f64) -> Self {
        let cut = if beta > 0.0 {
            Cut::Below(alpha / beta)
        } else if beta < 0.0 {
            Cut::Above(alpha / beta)
        } else if alpha > 0.0 {
            Cut::Plus
        } else if alpha < 0.0 {
            Cut::Minus
        } else {
            Cut::OnLocus
        };
        AxisGeom { value, eps, cut }
    }

    /// (`+` interval, `−` interval) inside [−1, 1]; empty intervals have lo ≥ hi.
    fn intervals(&self) -> ((f64, f64), (f64, f64)) {
        match self.cut {
            Cut::Below(c) => {
                let c = c.clamp(-1.0, 1.0);
                ((-1.0, c), (c, 1.0))
            }
            Cut::Above(c) => {
                let c = c.clamp(-1.0, 1.0);
                ((c, 1.0), (-1.0, c))
            }
            Cut::Plus => ((-1.0, 1.0), (1.0, 1.0)),
            Cut::Minus => ((1.0, 1.0), (-1.0, 1.0)),
            Cut::OnLocus => ((0.0, 0.0), (0.0, 0.0)),
        }
    }
}

/// A piecewise-polynomial field together with its mollifier.
#[derive(Clone, Debug)]
pub struct RegularizedField {
    base: Arc<PiecewiseField>,
    mollifier: Mollifier,
    degree: Vec<usize>,
    // per mask, per component: (coefficient, per-axis exponents)
    terms: Vec<Vec<Vec<(f64, Vec<u8>)>>>,
}

impl RegularizedField {
    pub fn new(base: PiecewiseField, mollifier: Mollifier) -> Result<Self, ConvError> {
        Self::from_arc(Arc::new(base), mollifier)
    }

    pub fn from_arc(base: Arc<PiecewiseField>, mollifier: Mollifier) -> Result<Self, ConvError> {
        let n = base.n();
        let mut degree = vec![0usize; n];
        let mut terms = Vec::with_capacity(base.num_branches());
        for mask in 0..base.num_branches() {
            let mut comps = Vec::with_capacity(n);
            for p in base.compiled(mask) {
                for (i, &e) in p.max_exp().iter().enumerate() {
                    degree[i] = degree[i].max(e as usize);
                }
                comps.push(
                    p.terms()
                        .iter()
                        .filter(|(c, _)| *c != 0.0)
                        .map(|(c, e)| (*c, e.iter().map(|&k| k as u8).collect()))
                        .collect(),
                );
            }
            terms.push(comps);
        }
        if let Some(&d) = degree.iter().max() {
            if d > MAX_MOMENT {
                return Err(ConvError::Field(pws_core::FieldError::Invalid(format!(
                    "per-axis degree {d} exceeds the supported {MAX_MOMENT}"
                ))));
            }
        }
        Ok(RegularizedField { base, mollifier, degree, terms })
    }

    pub fn base(&self) -> &PiecewiseField {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<PiecewiseField> {
        &self.base
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn locus(&self) -> &NormalCrossingsLocus {
        self.base.locus()
    }

    /// Per-axis degree of the branch polynomials.
    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    /// Axis geometry of a plain (x, ε) evaluation.
    pub fn plain_geometry(&self, x: &[f64], eps: f64) -> Vec<AxisGeom> {
        x.iter().map(|&xi| AxisGeom::plain(xi, eps)).collect()
    }

    /// (m_ε ∗ X)(x).
    pub fn eval(&self, x: &[f64], eps: f64) -> Result<Vec<f64>, ConvError> {
        let n = self.n();
        if x.len() != n {
            return Err(ConvError::Dimension { expected: n, got: x.len() });
        }
        if eps < 0.0 || eps.is_nan() {
            return Err(ConvError::NegativeEpsilon(eps));
        }
        if eps == 0.0 {
            return self.base.eval_piecewise(x).map_err(|e| match e {
                pws_core::FieldError::OnLocus { axis } => ConvError::OnLocus { axis },
                other => other.into(),
            });
        }
        let mut out = vec![0.0; n];
        self.eval_geom(&self.plain_geometry(x, eps), &mut out)?;
        Ok(out)
    }

    /// Weighted moment of every branch, given per-axis geometry.
    ///
    /// Smooth axes ignore `cut`. This is the entry point for evaluations in
    /// blow-up charts, where value and eps come from the chart monomials and
    /// the cut from the reduced sign condition.
    pub fn eval_geom(&self, geom: &[AxisGeom], out: &mut [f64]) -> Result<(), ConvError> {
        let n = self.n();
        if geom.len() != n || out.len() != n {
            return Err(ConvError::Dimension { expected: n, got: geom.len().min(out.len()) });
        }
        const W: usize = MAX_MOMENT + 1;
        // factors[i][slot][k] = ∫ (v − e t)^k m(t) dt over the slot's interval
        let mut factors = vec![[[0.0f64; W]; 2]; n];
        let mut empty = vec![[false; 2]; n];
        let locus = self.base.locus();
        for i in 0..n {
            let d = self.degree[i];
            let g = geom[i];
            let mut mu = [[0.0f64; W]; 2];
            if locus.is_active(i) {
                if g.cut == Cut::OnLocus {
                    return Err(ConvError::OnLocus { axis: i });
                }
                let (p, m) = g.intervals();
                for (slot, (lo, hi)) in [p, m].into_iter().enumerate() {
                    if hi <= lo {
                        empty[i][slot] = true;
                    } else {
                        self.mollifier.interval_moments(lo, hi, &mut mu[slot][..=d]);
                    }
                }
            } else {
                mu[0][..=d].copy_from_slice(&self.mollifier.full_moments()[..=d]);
                mu[1] = mu[0];
            }
            for slot in 0..2 {
                if empty[i][slot] {
                    continue;
                }
                expand(g.value, g.eps, &mu[slot], d, &mut factors[i][slot]);
            }
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        let active = locus.active();
        let mut slots = vec![0usize; n];
        'branch: for (mask, comps) in self.terms.iter().enumerate() {
            slots.iter_mut().for_each(|s| *s = 0);
            for (k, &axis) in active.iter().enumerate() {
                let s = (mask >> k) & 1;
                if empty[axis][s] {
                    continue 'branch;
                }
                slots[axis] = s;
            }
            for (o, comp) in out.iter_mut().zip(comps) {
                let mut acc = 0.0;
                for (c, e) in comp {
                    let mut t = *c;
                    for i in 0..n {
                        t *= factors[i][slots[i]][e[i] as usize];
                    }
                    acc += t;
                }
                *o += acc;
            }
        }
        Ok(())
    }
}

// out[k] = Σ_j C(k,j) v^{k−j} (−e)^j mu[j]
fn expand(v: f64, e: f64, mu: &[f64], d: usize, out: &mut [f64]) {
    let mut vp = [1.0f64; MAX_MOMENT + 1];
    let mut ep = [1.0f64; MAX_MOMENT + 1];
    for k in 1..=d {
        vp[k] = vp[k - 1] * v;
        ep[k] = ep[k - 1] * -e;
    }
    let mut row = [0.0f64; MAX_MOMENT + 1];
    for k in 0..=d {
        // Pascal row k, updated in place right to left
        row[k] = 1.0;
        for j in (1..k).rev() {
            row[j] += row[j - 1];
        }
        let mut acc = 0.0;
        for j in 0..=k {
            acc += row[j] * vp[k - j] * ep[j] * mu[j];
        }
        out[k] = acc;
    }
}

/// (m_ε ∗ X)(x) for a polynomial field.
pub fn convolve_numeric(rf: &RegularizedField, x: &[f64], eps: f64) -> Result<Vec<f64>, ConvError> {
    rf.eval(x, eps)
}

/// (m_ε ∗ X)(x) for arbitrary smooth branches, by nested adaptive quadrature.
///
/// Each axis is split at the mollifier breakpoints and, for active axes, at
/// t = x_i/ε. The tolerance is shared out over the nesting levels.
pub fn convolve_callable<F: BranchField + ?Sized>(
    field: &F,
    mollifier: &Mollifier,
    x: &[f64],
    eps: f64,
    cfg: AdaptiveConfig,
) -> Result<Vec<f64>, ConvError> {
    let n = field.n();
    if x.len() != n {
        return Err(ConvError::Dimension { expected: n, got: x.len() });
    }
    if eps < 0.0 || eps.is_nan() {
        return Err(ConvError::NegativeEpsilon(eps));
    }
    if eps == 0.0 {
        return field.eval_piecewise(x).map_err(|e| match e {
            pws_core::FieldError::OnLocus { axis } => ConvError::OnLocus { axis },
            other => other.into(),
        });
    }
    let mut t = vec![0.0; n];
    nested(field, mollifier, x, eps, cfg, 0, 0, &mut t)
}

#[allow(clippy::too_many_arguments)]
fn nested<F: BranchField + ?Sized>(
    field: &F,
    m: &Mollifier,
    x: &[f64],
    eps: f64,
    cfg: AdaptiveConfig,
    level: usize,
    mask: usize,
    t: &mut Vec<f64>,
) -> Result<Vec<f64>, ConvError> {
    let n = field.n();
    if level == n {
        let y: Vec<f64> = x.iter().zip(t.iter()).map(|(xi, ti)| xi - eps * ti).collect();
        let mut out = vec![0.0; n];
        field.eval_branch(mask, &y, &mut out);
        return Ok(out);
    }
    let mut pts = vec![-1.0];
    pts.extend(m.breakpoints());
    let pos = field.locus().position(level);
    if pos.is_some() {
        let c = x[level] / eps;
        if c > -1.0 && c < 1.0 {
            pts.push(c);
        }
    }
    pts.push(1.0);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let level_cfg = AdaptiveConfig { abs_tol: cfg.abs_tol * 0.5, max_depth: cfg.max_depth };
    let inner_cfg = AdaptiveConfig { abs_tol: cfg.abs_tol * 0.5, max_depth: cfg.max_depth };
    let mut total = vec![0.0; n];
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut piece_mask = mask;
        if let Some(k) = pos {
            let mid = 0.5 * (a + b);
            if x[level] - eps * mid < 0.0 {
                piece_mask |= 1 << k;
            }
        }
        let mut tt = t.clone();
        let v = adaptive_vec(
            |s, out| {
                tt[level] = s;
                let inner = nested(field, m, x, eps, inner_cfg, level + 1, piece_mask, &mut tt)?;
                let w = m.profile(s);
                for (o, v) in out.iter_mut().zip(&inner) {
                    *o = w * v;
                }
                Ok(())
            },
            a,
            b,
            n,
            level_cfg,
        )?;
        for (o, v) in total.iter_mut().zip(&v) {
            *o += v;
        }
    }
    Ok(total)
}

/// ½(1+φ(x₁/ε))X₊(x) + ½(1−φ(x₁/ε))X₋(x) for a two-branch field.
pub fn st_regularize(field: &PiecewiseField, mollifier: &Mollifier, x: &[f64], eps: f64) -> Result<Vec<f64>, ConvError> {
    let locus = field.locus();
    if locus.active().len() != 1 {
        return Err(ConvError::Field(pws_core::FieldError::Invalid(
            "ST regularization needs exactly one switching hyperplane".into(),
        )));
    }
    if !(eps > 0.0) {
        return Err(ConvError::NegativeEpsilon(eps));
    }
    let axis = locus.active()[0];
    let (_, _, phi) = crate::mollifier::weight_functions(mollifier, x[axis] / eps);
    let n = field.n();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    field.eval_branch(0, x, &mut plus);
    field.eval_branch(1, x, &mut minus);
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| 0.5 * (1.0 + phi) * p + 0.5 * (1.0 - phi) * m)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pws_core::{default_vars, PiecewiseField};

    fn sewing() -> PiecewiseField {
        PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1", "1"], &["2", "1"]]).unwrap()
    }

    #[test]
    fn sewing_midpoint() {
        let rf = RegularizedField::new(sewing(), Mollifier::box_profile()).unwrap();
        let v = convolve_numeric(&rf, &[0.0, 0.0], 0.1).unwrap();
        assert!((v[0] - 1.5).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn escaping_field_on_the_box() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1", "1"], &["-1", "1"]]).unwrap();
        let rf = RegularizedField::new(f, Mollifier::box_profile()).unwrap();
        let v = convolve_numeric(&rf, &[0.025, 0.0], 0.1).unwrap();
        assert!((v[0] - 0.25).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_eps_is_the_piecewise_field() {
        let rf = RegularizedField::new(sewing(), Mollifier::box_profile()).unwrap();
        assert_eq!(convolve_numeric(&rf, &[-0.3, 1.0], 0.0).unwrap(), vec![2.0, 1.0]);
        assert!(matches!(convolve_numeric(&rf, &[0.0, 1.0], 0.0), Err(ConvError::OnLocus { axis: 0 })));
        assert!(matches!(convolve_numeric(&rf, &[0.0, 1.0], -1.0), Err(ConvError::NegativeEpsilon(_))));
    }

    #[test]
    fn moments_agree_with_nested_quadrature() {
        let vars = default_vars(2);
        let f = PiecewiseField::parse(
            2,
            &vars,
            &[0, 1],
            &[&["x*y - 1", "y^3 + 2"], &["x^2", "-y"], &["3 - y", "x*x*y"], &["1/2", "x - y^2"]],
        )
        .unwrap();
        let call = pws_core::CallableField::from_piecewise(&f);
        for m in [Mollifier::box_profile(), Mollifier::plateau(0.3).unwrap()] {
            let rf = RegularizedField::new(f.clone(), m.clone()).unwrap();
            for (x, eps) in [([0.03, -0.05], 0.1), ([0.2, 0.01], 0.1), ([-0.5, 0.4], 0.7)] {
                let a = rf.eval(&x, eps).unwrap();
                let b = convolve_callable(&call, &m, &x, eps, AdaptiveConfig::default()).unwrap();
                for k in 0..2 {
                    assert!((a[k] - b[k]).abs() < 1e-10, "{x:?} {eps}: {a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn st_matches_on_the_outer_side() {
        let m = Mollifier::box_profile();
        let f = sewing();
        assert_eq!(st_regularize(&f, &m, &[0.0, 0.0], 0.1).unwrap(), vec![1.5, 1.0]);
        assert_eq!(st_regularize(&f, &m, &[0.2, 0.0], 0.1).unwrap(), vec![1.0, 1.0]);
    }
}
