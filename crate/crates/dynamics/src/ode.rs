//! Dormand–Prince 5(4) integration with cubic Hermite dense output and
//! section events.

use serde::Serialize;

use crate::error::DynError;
use crate::field::VectorField;
use crate::section::Section;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// Box the state must stay in; leaving it is an error.
    pub domain: Option<Vec<(f64, f64)>>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rtol: 1e-9, atol: 1e-12, h_max: f64::INFINITY, h_min: 1e-14, max_steps: 2_000_000, domain: None }
    }
}

impl IntegratorConfig {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        IntegratorConfig { rtol, atol, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub section: usize,
    pub t: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Event {
    pub section: Section,
    pub terminal: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    #[serde(skip)]
    pub dx: Vec<Vec<f64>>,
    pub events: Vec<EventRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.x.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn end_time(&self) -> f64 {
        *self.t.last().unwrap_or(&0.0)
    }

    /// Cubic Hermite interpolation between stored steps; linear when derivatives were dropped.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        let (first, last) = (*self.t.first()?, *self.t.last()?);
        if t < first || t > last {
            return None;
        }
        let k = match self.t.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(k) => return Some(self.x[k].clone()),
            Err(k) => k - 1,
        };
        let h = self.t[k + 1] - self.t[k];
        if self.dx.len() != self.t.len() {
            let s = (t - self.t[k]) / h;
            return Some(self.x[k].iter().zip(&self.x[k + 1]).map(|(a, b)| a + s * (b - a)).collect());
        }
        Some(hermite(&self.x[k], &self.dx[k], &self.x[k + 1], &self.dx[k + 1], h, (t - self.t[k]) / h))
    }

    /// CSV with header `t,x1,..,xn`.
    pub fn to_csv(&self) -> String {
        let n = self.x.first().map_or(0, |v| v.len());
        let mut s = String::from("t");
        for i in 1..=n {
            s.push_str(&format!(",x{i}"));
        }
        s.push('\n');
        for (t, x) in self.t.iter().zip(&self.x) {
            s.push_str(&fmt12(*t));
            for v in x {
                s.push(',');
                s.push_str(&fmt12(*v));
            }
            s.push('\n');
        }
        s
    }
}

/// Twelve significant digits, the fixed format of every numeric export.
pub fn fmt12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{:.11e}", v)
}

fn hermite(y0: &[f64], f0: &[f64], y1: &[f64], f1: &[f64], h: f64, s: f64) -> Vec<f64> {
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    (0..y0.len()).map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i]).collect()
}

struct Stepper<'a, F: ?Sized> {
    f: &'a F,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl<'a, F: VectorField + ?Sized> Stepper<'a, F> {
    fn new(f: &'a F) -> Self {
        let n = f.dim();
        Stepper { f, k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    /// One step of size h from (y, f0). Returns (y_new, error estimate); k[6] holds f(y_new).
    fn step(&mut self, y: &[f64], f0: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>), DynError> {
        let n = y.len();
        self.k[0].copy_from_slice(f0);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s][..s].iter().enumerate() {
                    acc += a * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            self.f.eval(&self.tmp, &mut self.k[s])?;
        }
        // stage 7 is evaluated at the 5th-order solution (FSAL)
        let y_new: Vec<f64> = self.tmp.clone();
        let err = (0..n).map(|i| h * (0..7).map(|j| E[j] * self.k[j][i]).sum::<f64>()).collect();
        Ok((y_new, err))
    }
}

fn err_norm(err: &[f64], y0: &[f64], y1: &[f64], cfg: &IntegratorConfig) -> f64 {
    let n = err.len() as f64;
    (err.iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = cfg.atol + cfg.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum::<f64>()
        / n)
        .sqrt()
}

fn initial_step<F: VectorField + ?Sized>(f: &F, y0: &[f64], f0: &[f64], cfg: &IntegratorConfig) -> Result<f64, DynError> {
    let sc: Vec<f64> = y0.iter().map(|v| cfg.atol + cfg.rtol * v.abs()).collect();
    let n = y0.len() as f64;
    let rms = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n).sqrt();
    let d0 = rms(y0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + h0 * d).collect();
    let mut f1 = vec![0.0; y0.len()];
    f.eval(&y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(cfg.h_max))
}

fn in_domain(x: &[f64], cfg: &IntegratorConfig) -> bool {
    match &cfg.domain {
        None => x.iter().all(|v| v.is_finite()),
        Some(b) => x.iter().zip(b).all(|(v, (lo, hi))| *v >= *lo && *v <= *hi),
    }
}

pub fn integrate<F: VectorField + ?Sized>(
    f: &F,
    x0: &[f64],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynError> {
    integrate_with_events(f, x0, t_span, cfg, &[])
}

/// Integrates forward; stops early at the first crossing of a terminal event section.
///
/// An event only fires after the orbit has been seen strictly away from its
/// section, so starting on a section does not trigger it.
pub fn integrate_with_events<F: VectorField + ?Sized>(
    f: &F,
    x0: &[f64],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    events: &[Event],
) -> Result<Trajectory, DynError> {
    let n = f.dim();
    if x0.len() != n {
        return Err(DynError::Dimension { expected: n, got: x0.len() });
    }
    let (t0, t1) = t_span;
    if !(t1 >= t0) {
        return Err(DynError::Invalid("integration runs forward in time".into()));
    }
    let mut y = x0.to_vec();
    let mut fy = vec![0.0; n];
    f.eval(&y, &mut fy)?;
    let mut traj = Trajectory { t: vec![t0], x: vec![y.clone()], dx: vec![fy.clone()], events: Vec::new() };
    if t1 == t0 {
        return Ok(traj);
    }
    let arm_tol = |s: &Section, x: &[f64]| 1e-10 * (1.0 + s.level().abs() + x.iter().map(|v| v.abs()).fold(0.0, f64::max));
    let mut armed: Vec<bool> = events.iter().map(|e| e.section.value(&y).abs() > arm_tol(&e.section, &y)).collect();
    let mut g: Vec<f64> = events.iter().map(|e| e.section.value(&y)).collect();

    let mut stepper = Stepper::new(f);
    let mut h = initial_step(f, &y, &fy, cfg)?.min(t1 - t0);
    let mut t = t0;
    for _ in 0..cfg.max_steps {
        if t >= t1 {
            return Ok(traj);
        }
        let last = t + h >= t1;
        let h_try = if last { t1 - t } else { h };
        let (y_new, err) = match stepper.step(&y, &fy, h_try) {
            Ok(v) => v,
            Err(e) => {
                // a failed evaluation inside the step is treated as a rejection
                if h_try * 0.25 < cfg.h_min {
                    return Err(e);
                }
                h = h_try * 0.25;
                continue;
            }
        };
        let en = err_norm(&err, &y, &y_new, cfg);
        if !en.is_finite() || en > 1.0 {
            let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            h = h_try * fac;
            if h < cfg.h_min {
                return Err(DynError::StepFailure { t });
            }
            continue;
        }
        let f_new = stepper.k[6].clone();
        let t_new = if last { t1 } else { t + h_try };

        // event scan on the accepted step
        let mut hit: Option<(usize, f64, Vec<f64>)> = None;
        for (ei, ev) in events.iter().enumerate() {
            let g_new = ev.section.value(&y_new);
            if armed[ei] && ev.section.orientation().accepts(g[ei], g_new) {
                let (te, xe) = locate(&mut stepper, &ev.section, &y, &fy, &y_new, &f_new, t, h_try, g[ei], g_new)?;
                traj.events.push(EventRecord { section: ei, t: te, x: xe.clone() });
                if ev.terminal && hit.as_ref().map_or(true, |(_, th, _)| te < *th) {
                    hit = Some((ei, te, xe));
                }
            }
            if !armed[ei] && g_new.abs() > arm_tol(&ev.section, &y_new) {
                armed[ei] = true;
            }
            g[ei] = g_new;
        }
        if let Some((_, te, xe)) = hit {
            let mut fe = vec![0.0; n];
            f.eval(&xe, &mut fe)?;
            traj.events.retain(|r| r.t <= te);
            traj.t.push(te);
            traj.x.push(xe);
            traj.dx.push(fe);
            return Ok(traj);
        }

        t = t_new;
        y = y_new;
        fy = f_new;
        if !in_domain(&y, cfg) {
            return Err(DynError::Escape { t });
        }
        traj.t.push(t);
        traj.x.push(y.clone());
        traj.dx.push(fy.clone());

        let fac = 0.9 * en.max(1e-10).powf(-0.2);
        h = (h_try * fac.clamp(0.2, 10.0)).min(cfg.h_max);
        if h < cfg.h_min {
            return Err(DynError::StepFailure { t });
        }
    }
    Err(DynError::StepFailure { t })
}

/// Crossing time inside [t, t + h]: Illinois root solve on the Hermite
/// interpolant, then Newton polishing on exact Runge–Kutta sub-steps.
#[allow(clippy::too_many_arguments)]
fn locate<F: VectorField + ?Sized>(
    stepper: &mut Stepper<'_, F>,
    sec: &Section,
    y0: &[f64],
    f0: &[f64],
    y1: &[f64],
    f1: &[f64],
    t: f64,
    h: f64,
    g0: f64,
    g1: f64,
) -> Result<(f64, Vec<f64>), DynError> {
    let gs = |s: f64| sec.value(&hermite(y0, f0, y1, f1, h, s));
    let (mut a, mut b, mut ga, mut gb) = (0.0f64, 1.0f64, g0, g1);
    let mut side = 0i8;
    let mut s = 1.0;
    for _ in 0..200 {
        s = (a * gb - b * ga) / (gb - ga);
        if !(s > a && s < b) {
            s = 0.5 * (a + b);
        }
        let gm = gs(s);
        if gm == 0.0 || (b - a) * h.abs() < 1e-12 {
            break;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = s;
            ga = gm;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = s;
            gb = gm;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    let mut tau = s * h;
    let mut fx = vec![0.0; y0.len()];
    for _ in 0..6 {
        let x = stepper.step(y0, f0, tau)?.0;
        stepper.f.eval(&x, &mut fx)?;
        let flux = sec.flux(&fx);
        let d = if flux == 0.0 { 0.0 } else { sec.value(&x) / flux };
        if d.abs() <= 1e-15 * (1.0 + tau.abs()) || !(tau - d > 0.0 && tau - d <= h) {
            return Ok((t + tau, x));
        }
        tau -= d;
    }
    Ok((t + tau, stepper.step(y0, f0, tau)?.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::section::Orientation;

    #[test]
    fn exponential_decay() {
        let f = FnField::new(1, |x: &[f64], o: &mut [f64]| o[0] = -x[0]);
        let tr = integrate(&f, &[2.0], (0.0, 1.0), &IntegratorConfig::default()).unwrap();
        assert!((tr.last()[0] - 2.0 * (-1.0f64).exp()).abs() < 2e-9);
        assert_eq!(tr.end_time(), 1.0);
    }

    #[test]
    fn constant_field_is_exact() {
        let f = FnField::new(2, |_: &[f64], o: &mut [f64]| {
            o[0] = 1.0;
            o[1] = 0.0
        });
        let tr = integrate(&f, &[0.0, 0.0], (0.0, 1.0), &IntegratorConfig::default()).unwrap();
        assert!((tr.last()[0] - 1.0).abs() < 1e-12 && tr.last()[1] == 0.0);
    }

    #[test]
    fn events_are_located_to_rounding() {
        let f = FnField::new(2, |x: &[f64], o: &mut [f64]| {
            o[0] = -x[1];
            o[1] = x[0]
        });
        let ev = Event { section: Section::coordinate(2, 1, 0.0, Orientation::Negative).unwrap(), terminal: true };
        let tr = integrate_with_events(&f, &[1.0, 0.0], (0.0, 10.0), &IntegratorConfig::default(), &[ev]).unwrap();
        let e = &tr.events[0];
        assert!((e.t - std::f64::consts::PI).abs() < 1e-9, "{}", e.t);
        assert!(e.x[1].abs() < 1e-14);
        assert_eq!(tr.end_time(), e.t);
    }

    #[test]
    fn dense_output_matches_solution() {
        let f = FnField::new(2, |x: &[f64], o: &mut [f64]| {
            o[0] = -x[1];
            o[1] = x[0]
        });
        let tr = integrate(&f, &[1.0, 0.0], (0.0, 3.0), &IntegratorConfig::default()).unwrap();
        for t in [0.1, 0.77, 1.9, 2.95] {
            let x = tr.interpolate(t).unwrap();
            assert!((x[0] - t.cos()).abs() < 1e-5 && (x[1] - t.sin()).abs() < 1e-5);
        }
    }

    #[test]
    fn escape_is_reported() {
        let f = FnField::new(1, |_: &[f64], o: &mut [f64]| o[0] = 1.0);
        let cfg = IntegratorConfig { domain: Some(vec![(-1.0, 1.0)]), ..Default::default() };
        assert!(matches!(integrate(&f, &[0.0], (0.0, 5.0), &cfg), Err(DynError::Escape { .. })));
    }
}
