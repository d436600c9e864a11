//! The sequence of blow-ups that turns a regularized family into a smooth one.

use serde::Serialize;

use pws_core::NormalCrossingsLocus;

use crate::chart::ChartMap;
use crate::error::BlowupError;

/// One chart of the final atlas.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanChart {
    pub chart: ChartMap,
    /// Phase directions taken, in order, with their signs.
    pub chain: Vec<(usize, i8)>,
    /// Active axes still discontinuous in this chart; empty for a finished chart.
    pub residual: Vec<usize>,
}

impl PlanChart {
    pub fn id(&self) -> &str {
        self.chart.id()
    }

    /// Accumulated divisor monomial.
    pub fn divisor(&self) -> &[u32] {
        self.chart.divisor()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingPlan {
    pub n: usize,
    pub active: Vec<usize>,
    /// Centers per stage; each center is the stratum {x_j = 0, j ∈ J} × {ε = 0}.
    pub centers: Vec<Vec<Vec<usize>>>,
    pub charts: Vec<PlanChart>,
}

fn subsets_of_size(set: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if set.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for rest in subsets_of_size(&set[1..], k - 1) {
        let mut v = vec![set[0]];
        v.extend(rest);
        out.push(v);
    }
    out.extend(subsets_of_size(&set[1..], k));
    out
}

pub fn smoothing_plan(locus: &NormalCrossingsLocus) -> Result<SmoothingPlan, BlowupError> {
    let active = locus.active().to_vec();
    if active.is_empty() {
        return Err(BlowupError::EmptyLocus);
    }
    let n = locus.n();
    let centers = (1..=active.len()).rev().map(|k| subsets_of_size(&active, k)).collect();
    let mut charts = Vec::new();
    expand(n, ChartMap::identity(n), Vec::new(), active.clone(), &mut charts)?;
    Ok(SmoothingPlan { n, active, centers, charts })
}

fn expand(
    n: usize,
    prefix: ChartMap,
    chain: Vec<(usize, i8)>,
    residual: Vec<usize>,
    out: &mut Vec<PlanChart>,
) -> Result<(), BlowupError> {
    if residual.is_empty() {
        out.push(PlanChart { chart: prefix, chain, residual });
        return Ok(());
    }
    let fam = prefix.compose(&ChartMap::family(n, &residual)?);
    out.push(PlanChart { chart: fam, chain: chain.clone(), residual: Vec::new() });
    for &i in &residual {
        for sign in [1i8, -1] {
            let next = prefix.compose(&ChartMap::phase(n, &residual, i, sign)?);
            let mut c = chain.clone();
            c.push((i, sign));
            let rest: Vec<usize> = residual.iter().copied().filter(|&a| a != i).collect();
            expand(n, next, c, rest, out)?;
        }
    }
    Ok(())
}

impl SmoothingPlan {
    pub fn num_stages(&self) -> usize {
        self.centers.len()
    }
}
