//! The λ-family X₊ = ∂x + g₊∂y on {y > 0}, X₋ = −∂x + g₋∂y on {y < 0},
//! g₊ = −3(x+λ)² + 2(x+λ) + 7/4 and g₋ = 3x² − 7x + 2.

use rayon::prelude::*;
use serde::Serialize;

use conv_reg::{convolve_symbolic, Mollifier, RegularizedField};
use dynamics::{
    find_cycle, hausdorff, resample, sewing_poincare, CycleConfig, DynError, Orientation, RegularizedReturnMap,
    RegularizedVf, Section, SewingLeg, Trajectory, TransitionConfig, VectorField,
};
use num_traits::{One, Signed, Zero};
use pws_core::{default_vars, format_rational, int, rat, rational_to_f64, var_list, MultiPoly, PiecewiseField, Rational};

use crate::error::CrossError;

pub const HOPF_LAMBDA: (i64, i64) = (5, 6);

fn lam_str(lambda: &Rational) -> String {
    format!("({})", format_rational(lambda))
}

pub fn g_plus(lambda: &Rational) -> MultiPoly {
    let l = lam_str(lambda);
    MultiPoly::parse(&format!("-3*(x+{l})^2 + 2*(x+{l}) + 7/4"), &default_vars(2)).expect("well-formed")
}

pub fn g_minus() -> MultiPoly {
    MultiPoly::parse("3*x^2 - 7*x + 2", &default_vars(2)).expect("well-formed")
}

pub fn family(lambda: &Rational) -> Result<PiecewiseField, CrossError> {
    let vars = default_vars(2);
    let one = MultiPoly::one(&vars);
    Ok(PiecewiseField::two_branch(&vars, 1, vec![one.clone(), g_plus(lambda)], vec![-&one, g_minus()])?)
}

pub fn regularized(lambda: &Rational, eta: f64) -> Result<RegularizedField, CrossError> {
    let m = if eta == 0.0 { Mollifier::box_profile() } else { Mollifier::plateau(eta)? };
    Ok(RegularizedField::new(family(lambda)?, m)?)
}

/// The reference coefficient G(x, y) of ∂y in the ε-chart.
pub fn g_reference(lambda: &Rational) -> MultiPoly {
    let l = lam_str(lambda);
    let s = format!(
        "(15/8 + {l} - 3/2*{l}^2) + (-5/2 - 3*{l})*x + (-1/8 + {l} - 3/2*{l}^2)*y + (9/2 - 3*{l})*x*y - 3*x^2*y"
    );
    MultiPoly::parse(&s, &var_list(&["x", "y", "eps"])).expect("well-formed")
}

/// x-coordinate of the equilibrium of the core field at ε = 0.
pub fn core_equilibrium_x(lambda: &Rational) -> Option<Rational> {
    let den = int(5) + int(6) * lambda;
    if den.is_zero() {
        return None;
    }
    Some((rat(15, 4) + int(2) * lambda - int(3) * lambda * lambda) / den)
}

fn at(p: &MultiPoly, x: &Rational) -> Rational {
    p.eval(&[x.clone(), Rational::zero()])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tangency {
    pub branch: String,
    pub x: String,
    /// The normal component vanishes there exactly.
    pub on_zero_set: bool,
    /// Lie derivative of the normal component along the branch.
    pub lie_derivative: String,
    pub visible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaRegion {
    pub from: String,
    pub to: String,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GCheck {
    pub reference: String,
    pub computed: String,
    pub first_component: String,
    pub first_component_matches: bool,
    /// Computed minus reference with ε = 0.
    pub residual_at_eps0: String,
    pub matches_at_eps0: bool,
    /// Computed minus reference for ε > 0.
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructuralReport {
    pub lambda: String,
    pub endpoints: Vec<String>,
    pub tangencies: Vec<Tangency>,
    pub regions: Vec<SigmaRegion>,
    pub g_check: GCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub lambda: String,
    pub residual: [String; 2],
    pub pass: bool,
}

fn tangency(branch: &str, g: &MultiPoly, xdot: i64, x: &Rational) -> Tangency {
    let lie = int(xdot) * at(&g.partial(0), x);
    // y ≈ ½·lie·t² near the tangency; visible when the orbit bends away from Σ into its own half plane
    let visible = if branch == "X+" { lie.is_positive() } else { lie.is_negative() };
    Tangency {
        branch: branch.into(),
        x: format_rational(x),
        on_zero_set: at(g, x).is_zero(),
        lie_derivative: format_rational(&lie),
        visible,
    }
}

pub fn structural(lambda: &Rational) -> Result<StructuralReport, CrossError> {
    let gp = g_plus(lambda);
    let gm = g_minus();
    let plus_roots = [rat(-1, 2) - lambda, rat(7, 6) - lambda];
    let minus_roots = [rat(1, 3), int(2)];
    let mut tangencies: Vec<Tangency> = plus_roots.iter().map(|x| tangency("X+", &gp, 1, x)).collect();
    tangencies.extend(minus_roots.iter().map(|x| tangency("X-", &gm, -1, x)));

    let mut pts: Vec<Rational> = plus_roots.iter().chain(&minus_roots).cloned().collect();
    pts.sort();
    pts.dedup();
    let mut regions = Vec::new();
    let mut probes: Vec<(Option<&Rational>, Option<&Rational>, Rational)> = Vec::new();
    probes.push((None, pts.first(), pts[0].clone() - Rational::one()));
    for w in pts.windows(2) {
        probes.push((Some(&w[0]), Some(&w[1]), (&w[0] + &w[1]) / int(2)));
    }
    probes.push((pts.last(), None, pts[pts.len() - 1].clone() + Rational::one()));
    for (a, b, mid) in probes {
        let (p, m) = (at(&gp, &mid), at(&gm, &mid));
        let kind = match (p.is_positive(), m.is_positive()) {
            (true, true) => "sewing-up",
            (false, false) => "sewing-down",
            (false, true) => "sliding",
            (true, false) => "escaping",
        };
        regions.push(SigmaRegion {
            from: a.map_or("-inf".into(), format_rational),
            to: b.map_or("inf".into(), format_rational),
            kind: kind.into(),
        });
    }

    let core = convolve_symbolic(&family(lambda)?, &[1], &Mollifier::box_profile())?;
    let reference = g_reference(lambda);
    let vars = core.vars.clone();
    let zero_eps = |p: &MultiPoly| p.substitute_var(2, &MultiPoly::zero(&vars));
    let diff = &core.components[1] - &reference;
    let first = MultiPoly::parse("eps*y", &vars)?;
    let g_check = GCheck {
        reference: reference.to_string(),
        computed: core.components[1].to_string(),
        first_component: core.components[0].to_string(),
        first_component_matches: core.components[0] == first,
        residual_at_eps0: zero_eps(&diff).to_string(),
        matches_at_eps0: zero_eps(&diff).is_zero(),
        residual: diff.to_string(),
    };
    Ok(StructuralReport {
        lambda: format_rational(lambda),
        endpoints: pts.iter().map(format_rational).collect(),
        tangencies,
        regions,
        g_check,
    })
}

/// X₊ + X₋ at the given λ; zero exactly when λ = −5/6.
pub fn symmetry(lambda: &Rational) -> Result<SymmetryReport, CrossError> {
    let f = family(lambda)?;
    let r: Vec<MultiPoly> = (0..2).map(|k| &f.branch_by_mask(0)[k] + &f.branch_by_mask(1)[k]).collect();
    Ok(SymmetryReport {
        lambda: format_rational(lambda),
        pass: r.iter().all(MultiPoly::is_zero),
        residual: [r[0].to_string(), r[1].to_string()],
    })
}

pub fn sigma(o: Orientation) -> Section {
    Section::coordinate(2, 1, 0.0, o).expect("valid section")
}

pub fn x_section(level: f64) -> Section {
    Section::coordinate(2, 0, level, Orientation::Positive).expect("valid section")
}

/// Up through Σ along X₊, down through Σ along X₋, back to {x = level}.
pub fn sewing_legs_on(level: f64) -> Vec<SewingLeg> {
    vec![
        SewingLeg { branch: 0, to: sigma(Orientation::Negative) },
        SewingLeg { branch: 1, to: sigma(Orientation::Positive) },
        SewingLeg { branch: 0, to: x_section(level) },
    ]
}

/// The closed poly-trajectory of X_λ for λ ∈ (−5/6, 0): fold, X₊ arc, slide,
/// fold, X₋ arc, slide. `per_arc` points on each arc.
pub fn poly_trajectory(lambda: f64, per_arc: usize) -> Result<Vec<Vec<f64>>, CrossError> {
    if !(lambda > -5.0 / 6.0 && lambda < 0.0) {
        return Err(CrossError::DegenerateParameters(format!(
            "closed poly-trajectory through two folds needs λ in (-5/6, 0), got {lambda}"
        )));
    }
    let gu = |u: f64| -u * u * u + u * u + 1.75 * u;
    let gl = |x: f64| x * x * x - 3.5 * x * x + 2.0 * x;
    let n = per_arc.max(2);
    let (a, b) = (-0.5 - lambda, 2.0 - lambda);
    let mut pts = Vec::with_capacity(2 * n + 2);
    for i in 0..n {
        let x = a + (b - a) * i as f64 / (n - 1) as f64;
        pts.push(vec![x, gu(x + lambda) - gu(-0.5)]);
    }
    for i in 0..n {
        let x = 2.0 + (-0.5 - 2.0) * i as f64 / (n - 1) as f64;
        pts.push(vec![x, gl(2.0) - gl(x)]);
    }
    pts.push(vec![a, 0.0]);
    Ok(pts)
}

/// Equilibrium of m_ε ∗ X_λ near the ε = 0 prediction (x_e, 0).
pub fn regularized_equilibrium(rf: &RegularizedField, eps: f64, seed: [f64; 2]) -> Result<[f64; 2], CrossError> {
    let vf = RegularizedVf::new(rf, eps)?;
    let f = |p: [f64; 2]| -> Result<[f64; 2], CrossError> {
        let mut o = [0.0; 2];
        vf.eval(&p, &mut o)?;
        Ok(o)
    };
    let mut p = seed;
    for _ in 0..60 {
        let v = f(p)?;
        if v[0].abs().max(v[1].abs()) < 1e-13 {
            return Ok(p);
        }
        let h = [1e-7, 1e-7 * eps];
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut a = p;
            let mut b = p;
            a[k] += h[k];
            b[k] -= h[k];
            let (fa, fb) = (f(a)?, f(b)?);
            for i in 0..2 {
                j[i][k] = (fa[i] - fb[i]) / (2.0 * h[k]);
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dx = (j[1][1] * v[0] - j[0][1] * v[1]) / det;
        let dy = (j[0][0] * v[1] - j[1][0] * v[0]) / det;
        p = [p[0] - dx, p[1] - dy];
    }
    let v = f(p)?;
    if v[0].abs().max(v[1].abs()) < 1e-10 {
        Ok(p)
    } else {
        Err(CrossError::Dyn(DynError::NoConvergence {
            iterations: 60,
            residual: v[0].abs().max(v[1].abs()),
            reason: "regularized equilibrium".into(),
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    /// Plateau width of the mollifier; 0 selects the box profile.
    pub eta: f64,
    /// Seed height above the equilibrium on the section.
    pub seed_offset: f64,
    pub pre_iterations: usize,
    /// Upper end of the search interval on the section.
    pub y_max: f64,
    pub hausdorff_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { eta: 0.25, seed_offset: 0.3, pre_iterations: 6, y_max: 5.0, hausdorff_samples: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleRow {
    pub lambda: String,
    pub eps: String,
    /// {x = level}, crossed with increasing x.
    pub section_level: f64,
    pub equilibrium: [f64; 2],
    pub found: bool,
    pub fixed_y: Option<f64>,
    pub multiplier: Option<f64>,
    pub amplitude: Option<f64>,
    pub period: Option<f64>,
    /// Distance to the ε = 0 poly-trajectory, where one exists.
    pub hausdorff: Option<f64>,
    pub note: Option<String>,
}

/// A located cycle together with one period of its orbit.
pub struct CycleOutcome {
    pub row: CycleRow,
    pub orbit: Option<Vec<Vec<f64>>>,
}

/// Searches the return map of m_ε ∗ X_λ on {x = x_e} above the equilibrium.
pub fn locate_cycle(lambda: &Rational, eps: &Rational, cfg: &SweepConfig) -> Result<CycleOutcome, CrossError> {
    let lam = rational_to_f64(lambda);
    let e = rational_to_f64(eps);
    if !(e > 0.0) {
        return Err(CrossError::Config(format!("ε must be positive, got {}", format_rational(eps))));
    }
    let xe = core_equilibrium_x(lambda)
        .ok_or_else(|| CrossError::DegenerateParameters("λ = -5/6: the core field has no isolated equilibrium".into()))?;
    let rf = regularized(lambda, cfg.eta)?;
    let eq = regularized_equilibrium(&rf, e, [rational_to_f64(&xe), 0.0])?;
    let section = x_section(eq[0]);
    let map = RegularizedReturnMap::new(&rf, e, &section, TransitionConfig::default())?;
    let cycle = CycleConfig {
        pre_iterations: cfg.pre_iterations,
        bounds: Some(vec![(eq[1] + 1e-4, cfg.y_max)]),
        ..Default::default()
    };
    let mut row = CycleRow {
        lambda: format_rational(lambda),
        eps: format_rational(eps),
        section_level: eq[0],
        equilibrium: eq,
        found: false,
        fixed_y: None,
        multiplier: None,
        amplitude: None,
        period: None,
        hausdorff: None,
        note: None,
    };
    let res = match find_cycle(&map, &[eq[1] + cfg.seed_offset], &cycle) {
        Ok(r) => r,
        Err(err @ (DynError::NoConvergence { .. } | DynError::NoCrossing { .. } | DynError::Tangency { .. })) => {
            row.note = Some(err.to_string());
            return Ok(CycleOutcome { row, orbit: None });
        }
        Err(err) => return Err(err.into()),
    };
    let orbit = dense(&map.orbit(&res.fixed_point)?, 4000);
    let (lo, hi) = orbit.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])));
    row.found = true;
    row.fixed_y = Some(res.fixed_point[0]);
    row.multiplier = Some(res.multipliers[0].re);
    row.amplitude = Some((hi - lo) / 2.0);
    row.period = Some(res.return_time);
    if lam > -5.0 / 6.0 && lam < 0.0 {
        row.hausdorff = Some(hausdorff(&orbit, &poly_trajectory(lam, 400)?, cfg.hausdorff_samples));
    }
    Ok(CycleOutcome { row, orbit: Some(orbit) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BifurcationReport {
    pub mollifier: String,
    pub hopf_lambda: String,
    pub structure: Vec<StructuralReport>,
    pub symmetry: SymmetryReport,
    pub cycles: Vec<CycleRow>,
}

impl BifurcationReport {
    pub fn cycles_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
        let mut s = String::from("lambda,eps,section_level,found,fixed_y,multiplier,amplitude,period,hausdorff\n");
        for r in &self.cycles {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.lambda,
                r.eps,
                fmt12(r.section_level),
                r.found,
                opt(r.fixed_y),
                opt(r.multiplier),
                opt(r.amplitude),
                opt(r.period),
                opt(r.hausdorff)
            ));
        }
        s
    }
}

/// Structural data for every λ and a cycle search on the λ × ε grid.
/// Rows come out sorted by (λ, ε) whatever the evaluation order.
pub fn run_lambda_family(
    lambdas: &[Rational],
    epss: &[Rational],
    cfg: &SweepConfig,
) -> Result<BifurcationReport, CrossError> {
    let mut lambdas = lambdas.to_vec();
    lambdas.sort();
    lambdas.dedup();
    let mut epss = epss.to_vec();
    epss.sort();
    epss.dedup();
    let structure = lambdas.iter().map(structural).collect::<Result<Vec<_>, _>>()?;
    let grid: Vec<(&Rational, &Rational)> = lambdas.iter().flat_map(|l| epss.iter().map(move |e| (l, e))).collect();
    let cycles = grid
        .par_iter()
        .map(|(l, e)| locate_cycle(l, e, cfg).map(|o| o.row))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BifurcationReport {
        mollifier: if cfg.eta == 0.0 { "box".into() } else { format!("plateau(eta={})", cfg.eta) },
        hopf_lambda: format_rational(&rat(HOPF_LAMBDA.0, HOPF_LAMBDA.1)),
        structure,
        symmetry: symmetry(&rat(-5, 6))?,
        cycles,
    })
}

/// Fixed point of the ε = 0 sewing map on {x = level}, with the divergence
/// formula and a finite-difference derivative side by side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SewingCheck {
    pub lambda: String,
    pub section_level: f64,
    pub fixed_y: Option<f64>,
    pub divergence_derivative: Option<f64>,
    pub fd_derivative: Option<f64>,
    pub relative_error: Option<f64>,
    pub note: Option<String>,
}

pub fn sewing_check(lambda: &Rational, level: f64, seed: f64) -> Result<SewingCheck, CrossError> {
    let field = family(lambda)?;
    let legs = sewing_legs_on(level);
    let tcfg = TransitionConfig::default();
    let mut out = SewingCheck {
        lambda: format_rational(lambda),
        section_level: level,
        fixed_y: None,
        divergence_derivative: None,
        fd_derivative: None,
        relative_error: None,
        note: None,
    };
    let res = match sewing_poincare(&field, &legs, &[seed], &CycleConfig::default(), &tcfg) {
        Ok(r) => r,
        Err(e) => {
            out.note = Some(e.to_string());
            return Ok(out);
        }
    };
    let map = dynamics::SewingMap::new(&field, &legs, tcfg.clone())?;
    let segs = map.segments(&res.fixed_point)?;
    let d = dynamics::divergence_derivative(&segs, &tcfg.integrator)?;
    let fd = res.derivative[0][0];
    out.fixed_y = Some(res.fixed_point[0]);
    out.divergence_derivative = Some(d);
    out.fd_derivative = Some(fd);
    out.relative_error = Some((d - fd).abs() / fd.abs().max(f64::MIN_POSITIVE));
    Ok(out)
}

/// `count` states at uniform times along the trajectory, from its dense output.
pub fn dense(traj: &Trajectory, count: usize) -> Vec<Vec<f64>> {
    let (t0, t1) = (traj.t[0], traj.end_time());
    let n = count.max(2);
    (0..n)
        .filter_map(|k| traj.interpolate((t0 + (t1 - t0) * k as f64 / (n - 1) as f64).min(t1)))
        .collect()
}

pub(crate) fn fmt12(v: f64) -> String {
    dynamics::fmt12(v)
}

/// The poly-trajectory and the resampled cycle, for plotting.
pub fn resampled(points: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    resample(points, count)
}

/// Portrait of m_ε ∗ X_λ: Σ, the return section, the cycle when one exists,
/// a few orbits and, for λ ∈ (−5/6, 0), the ε = 0 poly-trajectory.
pub fn lambda_portrait(lambda: &Rational, eps: &Rational, cfg: &SweepConfig) -> Result<crate::portrait::PortraitData, CrossError> {
    use crate::portrait::{trajectory_in_box, Marker, Polyline, PortraitData, SectionMarker};
    let domain = [[-1.5, 3.0], [-3.0, 3.0]];
    let lam = rational_to_f64(lambda);
    let e = rational_to_f64(eps);
    let mut data = PortraitData::new(
        &format!("lambda family, lambda={} eps={}", format_rational(lambda), format_rational(eps)),
        domain,
    );
    data.sections.push(SectionMarker { label: "Sigma".into(), from: [domain[0][0], 0.0], to: [domain[0][1], 0.0] });
    let out = locate_cycle(lambda, eps, cfg)?;
    let r = &out.row;
    data.sections.push(SectionMarker {
        label: "return section".into(),
        from: [r.section_level, r.equilibrium[1]],
        to: [r.section_level, cfg.y_max.min(domain[1][1])],
    });
    data.equilibria.push(Marker { label: "equilibrium".into(), at: r.equilibrium, kind: "equilibrium".into() });
    let rf = regularized(lambda, cfg.eta)?;
    let vf = RegularizedVf::new(&rf, e)?;
    let icfg = dynamics::IntegratorConfig::with_tol(1e-9, 1e-12);
    for x0 in [[-1.0, 2.0], [2.5, -2.0], [0.0, 0.5], [r.equilibrium[0] + 0.05, r.equilibrium[1]]] {
        let pts = trajectory_in_box(&vf, x0, 12.0, &domain, &icfg)?;
        data.trajectories.push(Polyline { label: format!("from ({}, {})", x0[0], x0[1]), points: pts });
    }
    if let Some(orbit) = &out.orbit {
        let pts = orbit.iter().map(|p| [p[0], p[1]]).collect();
        data.trajectories.push(Polyline { label: "cycle".into(), points: pts });
    }
    if lam > -5.0 / 6.0 && lam < 0.0 {
        let pts = poly_trajectory(lam, 200)?.iter().map(|p| [p[0], p[1]]).collect();
        data.trajectories.push(Polyline { label: "poly-trajectory at eps = 0".into(), points: pts });
    }
    Ok(data)
}
