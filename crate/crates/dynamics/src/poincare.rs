//! Transition maps between sections, return maps, and their fixed points.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use conv_reg::RegularizedField;
use pws_core::PiecewiseField;

use crate::error::DynError;
use crate::field::{FamilyChartVf, FnField, PolyField, VectorField};
use crate::ode::{integrate, integrate_with_events, Event, IntegratorConfig, Trajectory};
use crate::section::Section;

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionConfig {
    pub integrator: IntegratorConfig,
    /// Give up when the target is not reached within this time.
    pub max_time: f64,
    /// Relative finite-difference step on the section parametrization.
    pub fd_step: f64,
    /// Minimum |n̂·X|/|X| at departure and arrival.
    pub transversality: f64,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        TransitionConfig {
            integrator: IntegratorConfig::with_tol(1e-12, 1e-14),
            max_time: 200.0,
            fd_step: 1e-6,
            transversality: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transition {
    pub param: Vec<f64>,
    pub state: Vec<f64>,
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionMap {
    pub param: Vec<f64>,
    pub state: Vec<f64>,
    pub time: f64,
    /// Rows index target parameters, columns source parameters.
    pub derivative: Vec<Vec<f64>>,
}

fn check_transverse<F: VectorField + ?Sized>(f: &F, sec: &Section, x: &[f64], tol: f64) -> Result<Vec<f64>, DynError> {
    let mut v = vec![0.0; f.dim()];
    f.eval(x, &mut v)?;
    let r = sec.transversality(&v);
    if r < tol {
        return Err(DynError::Tangency { point: x.to_vec(), ratio: r });
    }
    Ok(v)
}

/// Follows the flow from x0 to the first oriented crossing of `to`.
pub fn flow_to_section<F: VectorField + ?Sized>(
    f: &F,
    x0: &[f64],
    to: &Section,
    cfg: &TransitionConfig,
) -> Result<(Transition, Trajectory), DynError> {
    let ev = Event { section: to.clone(), terminal: true };
    let traj = integrate_with_events(f, x0, (0.0, cfg.max_time), &cfg.integrator, &[ev])?;
    let Some(hit) = traj.events.last() else {
        return Err(DynError::NoCrossing { max_time: cfg.max_time });
    };
    check_transverse(f, to, &hit.x, cfg.transversality)?;
    let t = Transition { param: to.param(&hit.x), state: hit.x.clone(), time: hit.t };
    Ok((t, traj))
}

fn fd_jacobian<G>(s: &[f64], rows: usize, step: f64, mut g: G) -> Result<Vec<Vec<f64>>, DynError>
where
    G: FnMut(&[f64]) -> Result<Vec<f64>, DynError>,
{
    let mut jac = vec![vec![0.0; s.len()]; rows];
    let mut p = s.to_vec();
    for j in 0..s.len() {
        let h = step * s[j].abs().max(1.0);
        p[j] = s[j] + h;
        let fp = g(&p)?;
        p[j] = s[j] - h;
        let fm = g(&p)?;
        p[j] = s[j];
        for i in 0..rows {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Transition from the point with parameter `s` on `from` to the next crossing of `to`,
/// with its derivative by central differences.
pub fn transition_map<F: VectorField + ?Sized>(
    f: &F,
    from: &Section,
    s: &[f64],
    to: &Section,
    cfg: &TransitionConfig,
) -> Result<TransitionMap, DynError> {
    if s.len() != from.dim() {
        return Err(DynError::Dimension { expected: from.dim(), got: s.len() });
    }
    let go = |p: &[f64]| -> Result<Transition, DynError> {
        let x = from.point(p);
        check_transverse(f, from, &x, cfg.transversality)?;
        Ok(flow_to_section(f, &x, to, cfg)?.0)
    };
    let base = go(s)?;
    let derivative = fd_jacobian(s, to.dim(), cfg.fd_step, |p| Ok(go(p)?.param))?;
    Ok(TransitionMap { param: base.param, state: base.state, time: base.time, derivative })
}

pub trait ReturnMap {
    fn dim(&self) -> usize;
    fn apply(&self, s: &[f64]) -> Result<Transition, DynError>;
}

/// First return of a smooth field to one section.
#[derive(Clone, Debug)]
pub struct FirstReturnMap<F> {
    field: F,
    section: Section,
    cfg: TransitionConfig,
}

impl<F: VectorField> FirstReturnMap<F> {
    pub fn new(field: F, section: Section, cfg: TransitionConfig) -> Result<Self, DynError> {
        if field.dim() != section.n() {
            return Err(DynError::Dimension { expected: field.dim(), got: section.n() });
        }
        Ok(FirstReturnMap { field, section, cfg })
    }

    /// The orbit from the section point with parameter s until its return.
    pub fn orbit(&self, s: &[f64]) -> Result<Trajectory, DynError> {
        let x = self.section.point(s);
        Ok(flow_to_section(&self.field, &x, &self.section, &self.cfg)?.1)
    }
}

impl<F: VectorField> ReturnMap for FirstReturnMap<F> {
    fn dim(&self) -> usize {
        self.section.dim()
    }
    fn apply(&self, s: &[f64]) -> Result<Transition, DynError> {
        let x = self.section.point(s);
        check_transverse(&self.field, &self.section, &x, self.cfg.transversality)?;
        Ok(flow_to_section(&self.field, &x, &self.section, &self.cfg)?.0)
    }
}

/// Return map of m_ε ∗ X on a section of (x, ε)-space, ε > 0 fixed, computed
/// in the family chart of the blow-up. Parameters are those of the section in
/// the original coordinates.
#[derive(Clone, Debug)]
pub struct RegularizedReturnMap {
    vf: FamilyChartVf,
    eps: f64,
    section: Section,
    chart_section: Section,
    cfg: TransitionConfig,
}

impl RegularizedReturnMap {
    pub fn new(rf: &RegularizedField, eps: f64, section: &Section, cfg: TransitionConfig) -> Result<Self, DynError> {
        if !(eps > 0.0) {
            return Err(DynError::Invalid(format!("ε must be positive, got {eps}")));
        }
        if section.n() != rf.n() {
            return Err(DynError::Dimension { expected: rf.n(), got: section.n() });
        }
        let vf = FamilyChartVf::new(rf)?;
        let mut normal: Vec<f64> = section.normal().to_vec();
        for &a in rf.locus().active() {
            normal[a] *= eps;
        }
        normal.push(0.0);
        let chart_section = Section::new(normal, section.level(), section.orientation())?;
        let mut cfg = cfg;
        cfg.max_time /= eps;
        Ok(RegularizedReturnMap { vf, eps, section: section.clone(), chart_section, cfg })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// One period in original coordinates and time.
    ///
    /// The chart field is ε·(m_ε ∗ X), so chart time is original time over ε.
    pub fn orbit(&self, s: &[f64]) -> Result<Trajectory, DynError> {
        let w = self.vf.to_chart(&self.section.point(s), self.eps);
        let mut traj = flow_to_section(&self.vf, &w, &self.chart_section, &self.cfg)?.1;
        for x in traj.x.iter_mut() {
            *x = self.vf.from_chart(x);
        }
        // ρ is constant along orbits, so d/dt of from_chart(w) is from_chart(dw/dτ)/ε
        for d in traj.dx.iter_mut() {
            let mut v = self.vf.from_chart(&[&d[..d.len() - 1], &[self.eps]].concat());
            v.iter_mut().for_each(|a| *a /= self.eps);
            *d = v;
        }
        traj.t.iter_mut().for_each(|t| *t *= self.eps);
        for e in traj.events.iter_mut() {
            e.x = self.vf.from_chart(&e.x);
            e.t *= self.eps;
        }
        Ok(traj)
    }
}

impl ReturnMap for RegularizedReturnMap {
    fn dim(&self) -> usize {
        self.section.dim()
    }
    fn apply(&self, s: &[f64]) -> Result<Transition, DynError> {
        let w = self.vf.to_chart(&self.section.point(s), self.eps);
        check_transverse(&self.vf, &self.chart_section, &w, self.cfg.transversality)?;
        let (t, _) = flow_to_section(&self.vf, &w, &self.chart_section, &self.cfg)?;
        let x = self.vf.from_chart(&t.state);
        Ok(Transition { param: self.section.param(&x), state: x, time: t.time * self.eps })
    }
}

/// One leg of a sewing cycle: flow the branch `branch` (sign mask) until `to`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SewingLeg {
    pub branch: usize,
    pub to: Section,
}

/// Data the divergence formula needs for one leg.
#[derive(Clone, Debug)]
pub struct SewingSegment {
    pub field: PolyField,
    pub entry: Vec<f64>,
    pub exit: Vec<f64>,
    pub entry_tangent: Vec<f64>,
    pub exit_tangent: Vec<f64>,
    pub travel_time: f64,
}

/// P = P_k ∘ ⋯ ∘ P₁ through a declared branch sequence.
///
/// A closed plan starts on the section of its last leg; an open one maps its
/// start section to the last leg's section.
#[derive(Clone, Debug)]
pub struct SewingMap {
    field: PiecewiseField,
    branches: Vec<PolyField>,
    start: Section,
    legs: Vec<SewingLeg>,
    cfg: TransitionConfig,
}

impl SewingMap {
    pub fn new(field: &PiecewiseField, legs: &[SewingLeg], cfg: TransitionConfig) -> Result<Self, DynError> {
        let start = legs.last().ok_or_else(|| DynError::Invalid("a sewing plan needs at least one leg".into()))?.to.clone();
        Self::open(field, &start, legs, cfg)
    }

    pub fn open(field: &PiecewiseField, start: &Section, legs: &[SewingLeg], cfg: TransitionConfig) -> Result<Self, DynError> {
        if legs.is_empty() {
            return Err(DynError::Invalid("a sewing plan needs at least one leg".into()));
        }
        let branches = legs.iter().map(|l| PolyField::branch(field, l.branch)).collect::<Result<Vec<_>, _>>()?;
        for l in legs {
            if l.to.n() != field.n() {
                return Err(DynError::Dimension { expected: field.n(), got: l.to.n() });
            }
        }
        Ok(SewingMap { field: field.clone(), branches, start: start.clone(), legs: legs.to_vec(), cfg })
    }

    pub fn section(&self) -> &Section {
        &self.start
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.legs.last().unwrap().to
    }

    fn sewing_check(&self, sec: &Section, x: &[f64], arriving: usize, departing: usize) -> Result<(), DynError> {
        let a = self.branches[arriving].eval_vec(x);
        let d = self.branches[departing].eval_vec(x);
        let (fa, fd) = (sec.flux(&a), sec.flux(&d));
        let tol = self.cfg.transversality;
        if sec.transversality(&a) < tol || sec.transversality(&d) < tol || (fa > 0.0) != (fd > 0.0) {
            return Err(DynError::SlidingDetected { point: x.to_vec(), arriving: fa, departing: fd });
        }
        Ok(())
    }

    fn orthant_check(&self, leg: usize, traj: &Trajectory) -> Result<(), DynError> {
        let locus = self.field.locus();
        let mask = self.legs[leg].branch;
        let m = traj.x.len();
        for x in traj.x.iter().take(m.saturating_sub(1)).skip(1) {
            let scale = 1e-9 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max));
            for (k, &a) in locus.active().iter().enumerate() {
                let sign = if (mask >> k) & 1 == 1 { -1.0 } else { 1.0 };
                if sign * x[a] < -scale {
                    return Err(DynError::LeftOrthant { leg });
                }
            }
        }
        Ok(())
    }

    fn run(&self, s: &[f64]) -> Result<(Transition, Vec<SewingSegment>), DynError> {
        let k = self.legs.len();
        let start = self.section();
        let mut x = start.point(s);
        let mut time = 0.0;
        let mut segs = Vec::with_capacity(k);
        let mut sec = start;
        for i in 0..k {
            if i > 0 {
                self.sewing_check(sec, &x, i - 1, i)?;
            } else if self.is_closed() {
                self.sewing_check(sec, &x, k - 1, 0)?;
            }
            let (t, traj) = flow_to_section(&self.branches[i], &x, &self.legs[i].to, &self.cfg)?;
            self.orthant_check(i, &traj)?;
            segs.push(SewingSegment {
                field: self.branches[i].clone(),
                entry: x.clone(),
                exit: t.state.clone(),
                entry_tangent: sec.basis().first().cloned().unwrap_or_default(),
                exit_tangent: self.legs[i].to.basis().first().cloned().unwrap_or_default(),
                travel_time: t.time,
            });
            time += t.time;
            x = t.state;
            sec = &self.legs[i].to;
        }
        let end = &self.legs[k - 1].to;
        Ok((Transition { param: end.param(&x), state: x, time }, segs))
    }

    pub fn segments(&self, s: &[f64]) -> Result<Vec<SewingSegment>, DynError> {
        Ok(self.run(s)?.1)
    }

    /// Derivatives of the individual legs at the orbit through s.
    pub fn leg_derivatives(&self, s: &[f64]) -> Result<Vec<Vec<Vec<f64>>>, DynError> {
        let k = self.legs.len();
        let mut from = self.section().clone();
        let mut p = s.to_vec();
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let tm = transition_map(&self.branches[i], &from, &p, &self.legs[i].to, &self.cfg)?;
            out.push(tm.derivative);
            p = tm.param;
            from = self.legs[i].to.clone();
        }
        Ok(out)
    }
}

impl ReturnMap for SewingMap {
    fn dim(&self) -> usize {
        self.start.dim()
    }
    fn apply(&self, s: &[f64]) -> Result<Transition, DynError> {
        Ok(self.run(s)?.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    pub hyperbolic_margin: f64,
    /// Forward iterations of the map before Newton starts.
    pub pre_iterations: usize,
    /// Search box for the section parameters.
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl Default for CycleConfig {
    fn default() -> Self {
        CycleConfig { tol: 1e-10, max_iter: 50, fd_step: 1e-6, hyperbolic_margin: 1e-6, pre_iterations: 0, bounds: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Multiplier {
    pub re: f64,
    pub im: f64,
}

impl Multiplier {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareResult {
    pub fixed_point: Vec<f64>,
    pub state: Vec<f64>,
    pub return_time: f64,
    pub derivative: Vec<Vec<f64>>,
    pub multipliers: Vec<Multiplier>,
    pub residual: f64,
    pub iterations: usize,
    pub hyperbolic: bool,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn eigenvalues(m: &[Vec<f64>]) -> Vec<Multiplier> {
    let d = m.len();
    if d == 1 {
        return vec![Multiplier { re: m[0][0], im: 0.0 }];
    }
    let mat = DMatrix::from_fn(d, d, |i, j| m[i][j]);
    mat.complex_eigenvalues().iter().map(|c| Multiplier { re: c.re, im: c.im }).collect()
}

/// Newton iteration on P(s) − s with a central-difference Jacobian and backtracking.
pub fn find_cycle<M: ReturnMap + ?Sized>(map: &M, seed: &[f64], cfg: &CycleConfig) -> Result<PoincareResult, DynError> {
    let d = map.dim();
    if seed.len() != d {
        return Err(DynError::Dimension { expected: d, got: seed.len() });
    }
    let fail = |it: usize, res: f64, reason: String| DynError::NoConvergence { iterations: it, residual: res, reason };
    let inside = |s: &[f64]| cfg.bounds.as_ref().map_or(true, |b| s.iter().zip(b).all(|(v, (lo, hi))| v >= lo && v <= hi));
    let mut s = seed.to_vec();
    for _ in 0..cfg.pre_iterations {
        s = map.apply(&s).map_err(|e| fail(0, f64::NAN, format!("forward iteration failed: {e}")))?.param;
        if !inside(&s) {
            return Err(fail(0, f64::NAN, "forward iteration left the search box".into()));
        }
    }
    let residual = |s: &[f64]| -> Result<(Transition, Vec<f64>), DynError> {
        let t = map.apply(s)?;
        let r = t.param.iter().zip(s).map(|(a, b)| a - b).collect();
        Ok((t, r))
    };
    let (mut tr, mut r) = residual(&s).map_err(|e| fail(0, f64::NAN, e.to_string()))?;
    let mut it = 0;
    loop {
        if sup(&r) < cfg.tol {
            break;
        }
        if it >= cfg.max_iter {
            return Err(fail(it, sup(&r), "iteration limit".into()));
        }
        it += 1;
        let dp = fd_jacobian(&s, d, cfg.fd_step, |p| Ok(map.apply(p)?.param)).map_err(|e| fail(it, sup(&r), e.to_string()))?;
        let jac = DMatrix::from_fn(d, d, |i, j| dp[i][j] - if i == j { 1.0 } else { 0.0 });
        let rhs = DVector::from_iterator(d, r.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs).ok_or_else(|| fail(it, sup(&r), "singular Jacobian".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = s.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
            if inside(&trial) {
                if let Ok((t2, r2)) = residual(&trial) {
                    if sup(&r2) < sup(&r) || lambda < 1e-3 {
                        s = trial;
                        tr = t2;
                        r = r2;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(fail(it, sup(&r), "no acceptable step inside the search box".into()));
        }
    }
    let derivative = fd_jacobian(&s, d, cfg.fd_step, |p| Ok(map.apply(p)?.param))?;
    let multipliers = eigenvalues(&derivative);
    let hyperbolic = multipliers.iter().all(|m| (m.modulus() - 1.0).abs() > cfg.hyperbolic_margin);
    Ok(PoincareResult {
        fixed_point: s,
        state: tr.state,
        return_time: tr.time,
        derivative,
        multipliers,
        residual: sup(&r),
        iterations: it,
        hyperbolic,
    })
}

/// Fixed point of the sewing Poincaré map of `field` through `legs`.
pub fn sewing_poincare(
    field: &PiecewiseField,
    legs: &[SewingLeg],
    seed: &[f64],
    cycle: &CycleConfig,
    cfg: &TransitionConfig,
) -> Result<PoincareResult, DynError> {
    find_cycle(&SewingMap::new(field, legs, cfg.clone())?, seed, cycle)
}

/// Fixed point of the return map of m_ε ∗ X on `section`; at ε = 0 the
/// sewing map through `legs` is used.
pub fn regularized_poincare(
    rf: &RegularizedField,
    eps: f64,
    section: &Section,
    seed: &[f64],
    legs: Option<&[SewingLeg]>,
    cycle: &CycleConfig,
    cfg: &TransitionConfig,
) -> Result<PoincareResult, DynError> {
    if eps > 0.0 {
        find_cycle(&RegularizedReturnMap::new(rf, eps, section, cfg.clone())?, seed, cycle)
    } else if eps == 0.0 {
        let legs = legs.ok_or_else(|| DynError::Invalid("ε = 0 needs a sewing plan".into()))?;
        if &legs.last().unwrap().to != section {
            return Err(DynError::Invalid("the sewing plan must close on the given section".into()));
        }
        sewing_poincare(rf.base(), legs, seed, cycle, cfg)
    } else {
        Err(DynError::Invalid(format!("ε must be nonnegative, got {eps}")))
    }
}

fn cross(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// dP/dx = Π ‖X_i(p_i)‖ sin θ_in / (‖X_i(p_{i+1})‖ sin θ_out) · exp ∫ div X_i,
/// with oriented angles measured from the section tangent to the field.
pub fn divergence_derivative(segments: &[SewingSegment], cfg: &IntegratorConfig) -> Result<f64, DynError> {
    let mut prod = 1.0;
    for seg in segments {
        if seg.field.dim() != 2 {
            return Err(DynError::Dimension { expected: 2, got: seg.field.dim() });
        }
        let xin = seg.field.eval_vec(&seg.entry);
        let xout = seg.field.eval_vec(&seg.exit);
        let norm = |v: &[f64]| v[0].hypot(v[1]);
        let sin_in = cross(&seg.entry_tangent, &xin) / (norm(&xin) * norm(&seg.entry_tangent));
        let sin_out = cross(&seg.exit_tangent, &xout) / (norm(&xout) * norm(&seg.exit_tangent));
        for s in [sin_in, sin_out] {
            if !(s.abs() >= 1e-8) {
                return Err(DynError::DegenerateAngle(s));
            }
        }
        let f = &seg.field;
        let aug = FnField::new(3, |x: &[f64], o: &mut [f64]| {
            let v = f.eval_vec(&x[..2]);
            o[0] = v[0];
            o[1] = v[1];
            o[2] = f.divergence(&x[..2]);
        });
        let tr = integrate(&aug, &[seg.entry[0], seg.entry[1], 0.0], (0.0, seg.travel_time), cfg)?;
        prod *= norm(&xin) * sin_in / (norm(&xout) * sin_out) * tr.last()[2].exp();
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::section::Orientation;
    use pws_core::default_vars;

    #[test]
    fn linear_transition_is_exponential() {
        let f = PolyField::parse(&default_vars(2), &["1", "y"]).unwrap();
        let from = Section::coordinate(2, 0, 0.0, Orientation::Positive).unwrap();
        let to = Section::coordinate(2, 0, 1.0, Orientation::Positive).unwrap();
        let tm = transition_map(&f, &from, &[0.3], &to, &TransitionConfig::default()).unwrap();
        let e = std::f64::consts::E;
        assert!((tm.param[0] - 0.3 * e).abs() < 1e-10);
        assert!((tm.derivative[0][0] - e).abs() < 1e-8);
        assert!((tm.time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_has_fixed_point_zero() {
        struct Half;
        impl ReturnMap for Half {
            fn dim(&self) -> usize {
                1
            }
            fn apply(&self, s: &[f64]) -> Result<Transition, DynError> {
                Ok(Transition { param: vec![s[0] / 2.0], state: vec![s[0] / 2.0], time: 1.0 })
            }
        }
        let r = find_cycle(&Half, &[0.8], &CycleConfig::default()).unwrap();
        assert!(r.fixed_point[0].abs() < 1e-10);
        assert!((r.multipliers[0].re - 0.5).abs() < 1e-9);
        assert!(r.hyperbolic);
    }

    #[test]
    fn mirror_branches_give_identity() {
        let f = PiecewiseField::parse(2, &default_vars(2), &[1], &[&["-1", "1"], &["1", "1"]]).unwrap();
        let below = Section::coordinate(2, 1, -1.0, Orientation::Positive).unwrap();
        let above = Section::coordinate(2, 1, 1.0, Orientation::Positive).unwrap();
        let sigma = Section::coordinate(2, 1, 0.0, Orientation::Positive).unwrap();
        let legs = [SewingLeg { branch: 1, to: sigma }, SewingLeg { branch: 0, to: above }];
        let map = SewingMap::open(&f, &below, &legs, TransitionConfig::default()).unwrap();
        let r = find_cycle(&map, &[0.4], &CycleConfig::default()).unwrap();
        assert!((r.fixed_point[0] - 0.4).abs() < 1e-12);
        assert!((r.multipliers[0].re - 1.0).abs() < 1e-9);
        assert!(!r.hyperbolic);
    }

    #[test]
    fn rotation_returns_after_one_period() {
        let rot = PiecewiseField::parse(2, &default_vars(2), &[1], &[&["y", "-x"], &["y", "-x"]]).unwrap();
        let down = Section::coordinate(2, 1, 0.0, Orientation::Negative).unwrap();
        let up = Section::coordinate(2, 1, 0.0, Orientation::Positive).unwrap();
        let legs = [SewingLeg { branch: 0, to: down }, SewingLeg { branch: 1, to: up }];
        let map = SewingMap::new(&rot, &legs, TransitionConfig::default()).unwrap();
        let t = map.apply(&[-0.7]).unwrap();
        assert!((t.param[0] + 0.7).abs() < 1e-10);
        assert!((t.time - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        let chain = map.leg_derivatives(&[-0.7]).unwrap();
        assert!((chain[0][0][0] * chain[1][0][0] - 1.0).abs() < 1e-7);
    }
}
