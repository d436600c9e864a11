//! Exact convolution with the box mollifier on the core region.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use pws_core::field::{terms_json, TermJson};
use pws_core::{int, rat, var_list, MultiPoly, NormalCrossingsLocus, PiecewiseField, PolyF64, VarList};

use crate::error::ConvError;
use crate::mollifier::Mollifier;

/// ∫_a^b t^j · ½ dt = (b^{j+1} − a^{j+1}) / (2(j+1)).
pub fn box_moment(j: u32, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let d = b.pow(j + 1) - a.pow(j + 1);
    d.scale(&rat(1, 2 * (j as i64 + 1)))
}

/// Regularized field pulled back to the chart x_i = ε y_i (i ∈ axes), on |y_i| ≤ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreRegionPoly {
    pub chart_id: String,
    /// Chart variables: the original names (now meaning y_i on regularized axes), then "eps".
    pub vars: VarList,
    /// Components of m_ε ∗ X at x = chart(y, ε).
    pub raw: Vec<MultiPoly>,
    /// The chart vector field multiplied by ε: raw_i on regularized axes, ε·raw_k on smooth ones.
    pub components: Vec<MultiPoly>,
    /// Regularized axes, 0-based.
    pub axes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityJson {
    pub axes: Vec<usize>,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreRegionJson {
    pub chart_id: String,
    pub vars: Vec<String>,
    pub components: Vec<Vec<TermJson>>,
    pub validity: ValidityJson,
}

impl CoreRegionPoly {
    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// Plain coordinates of the chart point (y, ε).
    pub fn to_plain(&self, y: &[f64], eps: f64) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(i, &v)| if self.axes.contains(&i) { eps * v } else { v })
            .collect()
    }

    fn point(y: &[f64], eps: f64) -> Vec<f64> {
        let mut p = y.to_vec();
        p.push(eps);
        p
    }

    pub fn eval_raw(&self, y: &[f64], eps: f64) -> Vec<f64> {
        let p = Self::point(y, eps);
        self.raw.iter().map(|c| PolyF64::new(c).eval(&p)).collect()
    }

    pub fn eval(&self, y: &[f64], eps: f64) -> Vec<f64> {
        let p = Self::point(y, eps);
        self.components.iter().map(|c| PolyF64::new(c).eval(&p)).collect()
    }

    pub fn to_json(&self) -> CoreRegionJson {
        CoreRegionJson {
            chart_id: self.chart_id.clone(),
            vars: self.vars.iter().cloned().collect(),
            components: self.components.iter().map(terms_json).collect(),
            validity: ValidityJson { axes: self.axes.iter().map(|a| a + 1).collect(), bound: 1.0 },
        }
    }
}

/// Work variables: x.., eps, t.., y..
struct Work {
    n: usize,
    vars: VarList,
    chart: VarList,
}

impl Work {
    fn new(field_vars: &VarList) -> Self {
        let n = field_vars.len();
        let mut names: Vec<String> = field_vars.iter().cloned().collect();
        names.push("eps".into());
        names.extend(field_vars.iter().map(|v| format!("t_{v}")));
        names.extend(field_vars.iter().map(|v| format!("ybar_{v}")));
        let mut chart: Vec<String> = field_vars.iter().cloned().collect();
        chart.push("eps".into());
        Work { n, vars: var_list(&names), chart: var_list(&chart) }
    }

    fn x(&self, i: usize) -> MultiPoly {
        MultiPoly::var(&self.vars, i)
    }
    fn eps(&self) -> MultiPoly {
        MultiPoly::var(&self.vars, self.n)
    }
    fn t(&self, i: usize) -> MultiPoly {
        MultiPoly::var(&self.vars, self.n + 1 + i)
    }
    fn ybar(&self, i: usize) -> MultiPoly {
        MultiPoly::var(&self.vars, 2 * self.n + 1 + i)
    }

    /// Convolves one scalar piecewise polynomial (given per branch mask, in
    /// the field's variables) and returns it in chart variables.
    fn convolve(&self, locus: &NormalCrossingsLocus, branches: &[&MultiPoly]) -> MultiPoly {
        let n = self.n;
        let shift: Vec<MultiPoly> = (0..n).map(|i| self.x(i) - &self.eps() * &self.t(i)).collect();
        let one = MultiPoly::one(&self.vars);
        let neg_one = -&one;
        let mut total = MultiPoly::zero(&self.vars);
        for (mask, p) in branches.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let limits: Vec<(MultiPoly, MultiPoly)> = (0..n)
                .map(|i| match locus.position(i) {
                    None => (neg_one.clone(), one.clone()),
                    Some(k) if (mask >> k) & 1 == 0 => (neg_one.clone(), self.ybar(i)),
                    Some(_) => (self.ybar(i), one.clone()),
                })
                .collect();
            let g = p.substitute(&shift, &self.vars);
            let mut cache: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
            for (e, c) in g.terms() {
                let alpha: Vec<u32> = e[n + 1..2 * n + 1].to_vec();
                let mut rest = e.clone();
                rest[n + 1..2 * n + 1].iter_mut().for_each(|v| *v = 0);
                let factor = cache.entry(alpha.clone()).or_insert_with(|| {
                    let mut f = one.clone();
                    for (i, &a) in alpha.iter().enumerate() {
                        f = &f * &box_moment(a, &limits[i].0, &limits[i].1);
                    }
                    f
                });
                total = &total + &(&MultiPoly::monomial(&self.vars, rest, c.clone()) * &*factor);
            }
        }
        let y = |i: usize| MultiPoly::var(&self.chart, i);
        let e = MultiPoly::var(&self.chart, n);
        let zero = MultiPoly::zero(&self.chart);
        let mut images = Vec::with_capacity(3 * n + 1);
        for i in 0..n {
            images.push(if locus.is_active(i) { &e * &y(i) } else { y(i) });
        }
        images.push(e.clone());
        images.extend(std::iter::repeat(zero).take(n));
        images.extend((0..n).map(y));
        total.substitute(&images, &self.chart)
    }
}

fn chart_id(axes: &[usize]) -> String {
    let list: Vec<String> = axes.iter().map(|a| (a + 1).to_string()).collect();
    format!("eps(I={{{}}})", list.join(","))
}

fn check_chart(locus: &NormalCrossingsLocus, axes: &[usize]) -> Result<(), ConvError> {
    let mut a = axes.to_vec();
    a.sort_unstable();
    a.dedup();
    if a != locus.active() {
        return Err(ConvError::UnsupportedChart(format!(
            "the core-region chart must rescale exactly the active axes {:?}, got {:?}",
            locus.active(),
            axes
        )));
    }
    Ok(())
}

/// Exact m_ε ∗ X (box mollifier) in the chart x_i = ε y_i over `axes`.
pub fn convolve_symbolic(field: &PiecewiseField, axes: &[usize], mollifier: &Mollifier) -> Result<CoreRegionPoly, ConvError> {
    if !mollifier.is_box() {
        return Err(ConvError::UnsupportedMollifier);
    }
    let locus = field.locus();
    check_chart(locus, axes)?;
    let work = Work::new(field.vars());
    let n = field.n();
    let mut raw = Vec::with_capacity(n);
    for c in 0..n {
        let refs: Vec<&MultiPoly> = field.branches().iter().map(|b| &b[c]).collect();
        raw.push(work.convolve(locus, &refs));
    }
    let e = MultiPoly::var(&work.chart, n);
    let components = raw
        .iter()
        .enumerate()
        .map(|(i, p)| if locus.is_active(i) { p.clone() } else { &e * p })
        .collect();
    Ok(CoreRegionPoly { chart_id: chart_id(axes), vars: work.chart.clone(), raw, components, axes: locus.active().to_vec() })
}

/// The weight multiplying each branch (indexed by mask) on the core region.
pub fn branch_weights(field: &PiecewiseField) -> Result<Vec<MultiPoly>, ConvError> {
    let locus = field.locus();
    let work = Work::new(field.vars());
    let one = MultiPoly::one(field.vars());
    let zero = MultiPoly::zero(field.vars());
    (0..locus.num_branches())
        .map(|mask| {
            let ind: Vec<&MultiPoly> = (0..locus.num_branches()).map(|m| if m == mask { &one } else { &zero }).collect();
            Ok(work.convolve(locus, &ind))
        })
        .collect()
}

/// The constant `1` in chart variables, for partition-of-unity checks.
pub fn chart_one(field: &PiecewiseField) -> MultiPoly {
    MultiPoly::constant(&Work::new(field.vars()).chart, int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RegularizedField;
    use pws_core::default_vars;

    fn vars1() -> VarList {
        var_list(&["a", "b"])
    }

    #[test]
    fn box_moment_examples() {
        let v = vars1();
        let one = MultiPoly::one(&v);
        let m1 = -&one;
        assert_eq!(box_moment(0, &m1, &one), one);
        assert!(box_moment(1, &m1, &one).is_zero());
        let y = MultiPoly::var(&v, 0);
        assert_eq!(box_moment(0, &m1, &y), MultiPoly::parse("(1 + a)/2", &v).unwrap());
    }

    #[test]
    fn sewing_core_region() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1", "1"], &["2", "1"]]).unwrap();
        let c = convolve_symbolic(&f, &[0], &Mollifier::box_profile()).unwrap();
        assert_eq!(c.components[0], MultiPoly::parse("(3 - x)/2", &c.vars).unwrap());
        assert_eq!(c.components[1], MultiPoly::parse("eps", &c.vars).unwrap());
        assert_eq!(c.chart_id, "eps(I={1})");
    }

    #[test]
    fn escaping_core_region() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1", "1"], &["-1", "1"]]).unwrap();
        let c = convolve_symbolic(&f, &[0], &Mollifier::box_profile()).unwrap();
        assert_eq!(c.components[0], MultiPoly::parse("x", &c.vars).unwrap());
        assert_eq!(c.components[1], MultiPoly::parse("eps", &c.vars).unwrap());
    }

    #[test]
    fn rejects_plateau_and_wrong_axes() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1", "1"], &["-1", "1"]]).unwrap();
        assert!(matches!(
            convolve_symbolic(&f, &[0], &Mollifier::plateau(0.2).unwrap()),
            Err(ConvError::UnsupportedMollifier)
        ));
        assert!(matches!(convolve_symbolic(&f, &[1], &Mollifier::box_profile()), Err(ConvError::UnsupportedChart(_))));
    }

    #[test]
    fn planar_weights_are_products() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[0, 1], &[&["0", "0"] as &[&str]; 4]).unwrap();
        let w = branch_weights(&f).unwrap();
        let vars = var_list(&["x", "y", "eps"]);
        let expect = ["(1+x)*(1+y)/4", "(1-x)*(1+y)/4", "(1+x)*(1-y)/4", "(1-x)*(1-y)/4"];
        for (m, e) in expect.iter().enumerate() {
            assert_eq!(w[m], MultiPoly::parse(e, &vars).unwrap(), "mask {m}");
        }
    }

    #[test]
    fn symbolic_matches_numeric() {
        let vars = default_vars(3);
        let f = PiecewiseField::parse(
            3,
            &vars,
            &[0, 2],
            &[
                &["x*y - z^2", "1 + x^3", "z"],
                &["x^2*z", "-y", "2"],
                &["3 - y*z", "x*x*y", "x - 1"],
                &["1/2", "x - y^2", "z^3 - x"],
            ],
        )
        .unwrap();
        let c = convolve_symbolic(&f, &[0, 2], &Mollifier::box_profile()).unwrap();
        let rf = RegularizedField::new(f, Mollifier::box_profile()).unwrap();
        for y in [[0.3, -0.7, 0.9], [-0.95, 0.2, -0.1], [0.0, 1.5, 0.5]] {
            for eps in [0.05, 0.4] {
                let sym = c.eval_raw(&y, eps);
                let num = rf.eval(&c.to_plain(&y, eps), eps).unwrap();
                for k in 0..3 {
                    assert!((sym[k] - num[k]).abs() < 1e-12, "{y:?}: {sym:?} vs {num:?}");
                }
            }
        }
    }
}
