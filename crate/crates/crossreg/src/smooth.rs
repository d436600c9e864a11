//! Smoothness verification of every chart of the smoothing plan.

use serde::Serialize;

use blowup::{smoothing_plan, verify_smooth, BlowupError, SmoothnessReport, VerifyConfig};
use conv_reg::{Mollifier, RegularizedField};
use pws_core::{default_vars, PiecewiseField};

use crate::error::CrossError;

#[derive(Clone, Debug, Serialize)]
pub struct SmoothCheckReport {
    pub n: usize,
    /// 1-based.
    pub active_axes: Vec<usize>,
    pub mollifier: String,
    pub charts: Vec<SmoothnessReport>,
    pub all_pass: bool,
}

/// Distinct quadratic branches on every orthant of the first k axes of ℝⁿ.
pub fn sample_field(n: usize, k: usize) -> Result<PiecewiseField, CrossError> {
    let vars = default_vars(n);
    let active: Vec<usize> = (0..k).collect();
    let branches: Vec<Vec<String>> = (0..(1usize << k))
        .map(|m| {
            (0..n)
                .map(|c| {
                    let a = vars[c].as_str();
                    let b = vars[(c + 1) % n].as_str();
                    format!("{}/3 + ({} - {})*{}/4 - {}*{}/5", m + c + 1, m % 3, c, b, a, b)
                })
                .collect()
        })
        .collect();
    let owned: Vec<Vec<&str>> = branches.iter().map(|b| b.iter().map(|s| s.as_str()).collect()).collect();
    let refs: Vec<&[&str]> = owned.iter().map(|b| b.as_slice()).collect();
    Ok(PiecewiseField::parse(n, &vars, &active, &refs)?)
}

pub fn smoothcheck(field: PiecewiseField, mollifier: Mollifier, cfg: &VerifyConfig) -> Result<SmoothCheckReport, CrossError> {
    let name = if mollifier.is_box() { "box".to_string() } else { format!("plateau(eta={})", mollifier.eta()) };
    let rf = RegularizedField::new(field, mollifier)?;
    let plan = smoothing_plan(rf.locus())?;
    let mut charts = Vec::with_capacity(plan.charts.len());
    for pc in &plan.charts {
        charts.push(match verify_smooth(&rf, pc, cfg) {
            Ok(rep) => rep,
            Err(BlowupError::NotSmooth(rep)) => *rep,
            Err(e) => return Err(e.into()),
        });
    }
    Ok(SmoothCheckReport {
        n: rf.n(),
        active_axes: rf.locus().active().iter().map(|a| a + 1).collect(),
        mollifier: name,
        all_pass: charts.iter().all(SmoothnessReport::pass),
        charts,
    })
}
