//! Numerical certificates that the divided pullback is smooth up to the divisor.

use serde::Serialize;

use conv_reg::{weight_functions, RegularizedField};
use pws_core::BranchField;

use crate::chart::ChartMap;
use crate::error::BlowupError;
use crate::plan::PlanChart;
use crate::pullback::{divide_divisor, pullback, push_forward, ChartField, Evaluator, RegularizedEvaluator};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub estimated_order: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub chart_id: String,
    pub checks: Vec<CheckResult>,
}

impl SmoothnessReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub points_per_axis: usize,
    /// Upper end of the grid for every variable; nonnegative variables start at 0.
    pub bound: f64,
    pub meshes: [f64; 3],
    pub consistency_tol: f64,
    pub continuity_tol: f64,
    pub truncation_tol: f64,
    pub min_order: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            points_per_axis: 11,
            bound: 0.9,
            meshes: [1e-2, 5e-3, 2.5e-3],
            consistency_tol: 1e-8,
            continuity_tol: 1e-8,
            truncation_tol: 1e-10,
            min_order: 1.7,
        }
    }
}

fn grid(chart: &ChartMap, cfg: &VerifyConfig) -> Vec<Vec<f64>> {
    let m = chart.n() + 1;
    let n = cfg.points_per_axis;
    let axis = |k: usize| -> Vec<f64> {
        let lo = if chart.nonneg()[k] { 0.0 } else { -cfg.bound };
        (0..n).map(|i| lo + (cfg.bound - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let axes: Vec<Vec<f64>> = (0..m).map(axis).collect();
    let mut pts = vec![Vec::with_capacity(m)];
    for a in &axes {
        let mut next = Vec::with_capacity(pts.len() * a.len());
        for p in &pts {
            for &v in a {
                let mut q: Vec<f64> = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// Value at 0 of the polynomial through (s_i, v_i).
fn neville_at_zero(s: &[f64], v: &[f64]) -> f64 {
    let mut p = v.to_vec();
    let k = s.len();
    for level in 1..k {
        for i in 0..k - level {
            let (a, b) = (s[i], s[i + level]);
            p[i] = (-b * p[i] + a * p[i + 1]) / (a - b);
        }
    }
    p[0]
}

/// Truncates the base field along the chart's phase directions.
pub fn truncated_field(rf: &RegularizedField, chain: &[(usize, i8)]) -> Result<RegularizedField, BlowupError> {
    let mut base = rf.base().clone();
    for &(axis, sign) in chain {
        base = base.drop_component(axis, sign).map_err(conv_reg::ConvError::from)?;
    }
    Ok(RegularizedField::new(base, rf.mollifier().clone())?)
}

/// Runs the consistency, continuity, finite-difference and branch-truncation
/// checks of one plan chart on its sample grid.
pub fn verify_smooth(rf: &RegularizedField, pc: &PlanChart, cfg: &VerifyConfig) -> Result<SmoothnessReport, BlowupError> {
    let chart = &pc.chart;
    let ext = ChartField::new(rf, chart)?;
    let generic = divide_divisor(pullback(chart, RegularizedEvaluator::new(rf)), chart.divisor());
    let n = rf.n();
    let pts = grid(chart, cfg);
    let div: Vec<usize> = (0..=n).filter(|&k| chart.divisor()[k] > 0).collect();

    let mut consistency: f64 = 0.0;
    let mut continuity: f64 = 0.0;
    let mut fd_order: Option<f64> = None;
    let mut fd_fail = false;
    let mut curvature: f64 = 0.0;

    let mut on_div = Vec::new();
    for w in &pts {
        let d = chart.divisor_value(w);
        if d != 0.0 {
            if chart.apply(w)[n] > 0.0 {
                let a = ext.divided(w)?;
                let b = generic.eval(w)?;
                for k in 0..=n {
                    consistency = consistency.max(rel(b[k], a[k]));
                }
            }
        } else {
            on_div.push(w);
        }
    }

    let approach: Vec<f64> = {
        let h = cfg.meshes[0];
        (0..4).map(|i| h / f64::powi(2.0, i)).collect()
    };
    for w in &on_div {
        let at = ext.divided(w)?;
        let zero_div: Vec<usize> = div.iter().copied().filter(|&k| w[k] == 0.0).collect();
        let mut samples = Vec::with_capacity(approach.len());
        let mut ok = true;
        for &s in &approach {
            let mut q = w.to_vec();
            for &k in &zero_div {
                q[k] = s;
            }
            match generic.eval(&q) {
                Ok(v) => samples.push(v),
                Err(BlowupError::Conv(conv_reg::ConvError::OnLocus { .. })) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok {
            for k in 0..=n {
                let vals: Vec<f64> = samples.iter().map(|v| v[k]).collect();
                continuity = continuity.max(rel(neville_at_zero(&approach, &vals), at[k]));
            }
        }
        for &k in &zero_div {
            let mut d2 = vec![[0.0f64; 3]; n + 1];
            for (hi, &h) in cfg.meshes.iter().enumerate() {
                let mut p = w.to_vec();
                let mut q = w.to_vec();
                p[k] = h;
                q[k] = -h;
                let fp = ext.divided(&p)?;
                let fq = ext.divided(&q)?;
                for c in 0..=n {
                    d2[c][hi] = fp[c] - 2.0 * at[c] + fq[c];
                }
            }
            let h3 = cfg.meshes[2];
            for c in 0..=n {
                curvature = curvature.max(d2[c][2].abs() / (h3 * h3));
                if d2[c][0].abs() <= 1e-10 * (1.0 + at[c].abs()) {
                    continue;
                }
                let r1 = (d2[c][0] / d2[c][1]).abs().log2();
                let r2 = (d2[c][1] / d2[c][2]).abs().log2();
                let r = if r1.is_finite() && r2.is_finite() { r1.min(r2) } else { f64::NEG_INFINITY };
                fd_order = Some(fd_order.map_or(r, |o| o.min(r)));
                if r.is_nan() || r < cfg.min_order {
                    fd_fail = true;
                }
            }
        }
    }

    let mut checks = vec![
        CheckResult {
            name: "consistency".into(),
            max_residual: consistency,
            estimated_order: None,
            pass: consistency < cfg.consistency_tol,
        },
        CheckResult {
            name: "continuity".into(),
            max_residual: continuity,
            estimated_order: None,
            pass: continuity < cfg.continuity_tol,
        },
        CheckResult {
            name: "fd_order".into(),
            max_residual: curvature,
            estimated_order: fd_order,
            pass: !fd_fail && curvature.is_finite(),
        },
    ];

    if !pc.chain.is_empty() {
        let trunc = ext.with_field(&truncated_field(rf, &pc.chain)?);
        let mut worst: f64 = 0.0;
        for w in &pts {
            let a = ext.divided(w)?;
            let b = trunc.divided(w)?;
            for k in 0..=n {
                worst = worst.max((a[k] - b[k]).abs());
            }
        }
        checks.push(CheckResult {
            name: "branch_truncation".into(),
            max_residual: worst,
            estimated_order: None,
            pass: worst < cfg.truncation_tol,
        });
    }

    let report = SmoothnessReport { chart_id: chart.id().to_string(), checks };
    if report.pass() {
        Ok(report)
    } else {
        Err(BlowupError::NotSmooth(Box::new(report)))
    }
}

/// Factor λ with J_a𝒳_a = λ·J_b𝒳_b at a common point (x, ε), if both charts cover it.
///
/// Returns the factor and the residual of the proportionality.
pub fn overlap_factor(a: &ChartField, b: &ChartField, old: &[f64]) -> Result<Option<(f64, f64)>, BlowupError> {
    let (Some(wa), Some(wb)) = (a.chart().inverse(old)?, b.chart().inverse(old)?) else {
        return Ok(None);
    };
    let va = push_forward(a.chart(), &wa, &a.divided(&wa)?);
    let vb = push_forward(b.chart(), &wb, &b.divided(&wb)?);
    let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
    let nb: f64 = vb.iter().map(|y| y * y).sum();
    if nb == 0.0 {
        return Ok(None);
    }
    let lambda = dot / nb;
    let res = va.iter().zip(&vb).map(|(x, y)| (x - lambda * y).abs()).fold(0.0, f64::max);
    Ok(Some((lambda, res)))
}

/// Residual of the zero-fiber identity in the family chart of a single-axis locus:
/// the divided field at ρ = 0 must be (f⁺_a(0, x̲)M₊(y) + f⁻_a(0, x̲)M₋(y)) ∂y.
pub fn vertical_residual(rf: &RegularizedField, others: &[f64], ys: &[f64]) -> Result<f64, BlowupError> {
    let locus = rf.locus();
    if locus.active().len() != 1 {
        return Err(BlowupError::Invalid("needs exactly one active axis".into()));
    }
    let a = locus.active()[0];
    let n = rf.n();
    if others.len() != n - 1 {
        return Err(BlowupError::Dimension { expected: n - 1, got: others.len() });
    }
    let chart = ChartMap::family(n, &[a])?;
    let cf = ChartField::new(rf, &chart)?;
    let mut worst: f64 = 0.0;
    for &y in ys {
        let mut x0 = Vec::with_capacity(n);
        let mut it = others.iter();
        for i in 0..n {
            x0.push(if i == a { 0.0 } else { *it.next().unwrap() });
        }
        let mut w = x0.clone();
        w[a] = y;
        w.push(0.0);
        let v = cf.divided(&w)?;
        let mut fp = vec![0.0; n];
        let mut fm = vec![0.0; n];
        rf.base().eval_branch(0, &x0, &mut fp);
        rf.base().eval_branch(1, &x0, &mut fm);
        let (mp, mm, _) = weight_functions(rf.mollifier(), y);
        for k in 0..=n {
            let expect = if k == a { fp[a] * mp + fm[a] * mm } else { 0.0 };
            worst = worst.max((v[k] - expect).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::smoothing_plan;
    use conv_reg::Mollifier;
    use pws_core::{default_vars, PiecewiseField};

    #[test]
    fn neville_recovers_polynomials() {
        let s = [0.4, 0.2, 0.1, 0.05];
        let v: Vec<f64> = s.iter().map(|x| 2.0 - x + 3.0 * x * x - x * x * x).collect();
        assert!((neville_at_zero(&s, &v) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sewing_plan_is_smooth() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1", "1"], &["2", "1"]]).unwrap();
        let rf = RegularizedField::new(f, Mollifier::plateau(0.25).unwrap()).unwrap();
        let plan = smoothing_plan(rf.locus()).unwrap();
        let cfg = VerifyConfig { points_per_axis: 5, ..Default::default() };
        for pc in &plan.charts {
            let rep = verify_smooth(&rf, pc, &cfg).unwrap();
            if !pc.chain.is_empty() {
                assert!(rep.check("branch_truncation").unwrap().max_residual < 1e-10);
            }
        }
    }

    #[test]
    fn box_kink_is_detected() {
        // The box weights are only C⁰: second differences across |z| = 1 scale like h.
        let f = PiecewiseField::parse(1, &default_vars(1), &[0], &[&["1"], &["-1"]]).unwrap();
        let rf = RegularizedField::new(f, Mollifier::box_profile()).unwrap();
        let chart = ChartMap::family(1, &[0]).unwrap();
        let cf = ChartField::new(&rf, &chart).unwrap();
        let d2 = |h: f64| {
            let c = cf.divided(&[1.0, 0.3]).unwrap()[0];
            cf.divided(&[1.0 + h, 0.3]).unwrap()[0] - 2.0 * c + cf.divided(&[1.0 - h, 0.3]).unwrap()[0]
        };
        let r = (d2(1e-2) / d2(5e-3)).log2();
        assert!((r - 1.0).abs() < 1e-6, "{r}");
    }
}
