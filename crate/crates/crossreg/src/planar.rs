//! The piecewise-constant planar cross on Σ = {x = 0} ∪ {y = 0} and its core
//! normal form x' = (x+½)(y+½) − B, y' = C(x−½)(y−½) − D.

use serde::Serialize;

use conv_reg::{branch_weights, convolve_symbolic, Mollifier};
use dynamics::{
    classify_equilibrium, find_equilibrium, first_integral_drift, integrate, Classification, IntegratorConfig, PolyField,
};
use num_traits::{One, Signed, Zero};
use pws_core::{default_vars, format_rational, int, rat, rational_to_f64, MultiPoly, PiecewiseField, Rational};

use crate::error::CrossError;

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarParams {
    pub c: Rational,
    pub b: Rational,
    pub d: Rational,
}

impl PlanarParams {
    pub fn new(c: Rational, b: Rational, d: Rational) -> Result<Self, CrossError> {
        for (name, v) in [("C", &c), ("B", &b), ("D", &d)] {
            if !v.is_positive() {
                return Err(CrossError::DegenerateParameters(format!(
                    "{name} = {} but the planar cross needs C, B, D > 0",
                    format_rational(v)
                )));
            }
        }
        Ok(PlanarParams { c, b, d })
    }
}

/// Constant branch values (a_st, b_st) for signs s of x and t of y.
pub fn branch_value(p: &PlanarParams, s: i64, t: i64) -> (Rational, Rational) {
    let (s, t) = (int(s), int(t));
    let a = rat(1, 4) - &p.b + &s / int(2) + &t / int(2) + &s * &t;
    let b = &p.c / int(4) - &p.d - &p.c * &s / int(2) - &p.c * &t / int(2) + &p.c * &s * &t;
    (a, b)
}

fn mask_signs(mask: usize) -> (i64, i64) {
    let s = if mask & 1 == 0 { 1 } else { -1 };
    let t = if mask & 2 == 0 { 1 } else { -1 };
    (s, t)
}

pub fn cross_field(p: &PlanarParams) -> Result<PiecewiseField, CrossError> {
    let vars = default_vars(2);
    let locus = pws_core::NormalCrossingsLocus::new(2, &[0, 1])?;
    let branches = (0..4)
        .map(|m| {
            let (s, t) = mask_signs(m);
            let (a, b) = branch_value(p, s, t);
            vec![MultiPoly::constant(&vars, a), MultiPoly::constant(&vars, b)]
        })
        .collect();
    Ok(PiecewiseField::from_masks(locus, vars, branches)?)
}

pub fn normal_form(p: &PlanarParams) -> Result<PolyField, CrossError> {
    let vars = default_vars(2);
    let bx = MultiPoly::parse("(x+1/2)*(y+1/2)", &vars)? - MultiPoly::constant(&vars, p.b.clone());
    let by = MultiPoly::parse("(x-1/2)*(y-1/2)", &vars)?.scale(&p.c) - MultiPoly::constant(&vars, p.d.clone());
    Ok(PolyField::new(vec![bx, by])?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchRow {
    pub signs: [i64; 2],
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumRow {
    pub location: [f64; 2],
    pub classification: Classification,
    pub trace: f64,
    pub determinant: f64,
    /// Inside the core box [−1, 1]² where the normal form is exact.
    pub in_core: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspReport {
    pub x_star: String,
    pub b_star: String,
    /// From C(x*−½)² = D, solved exactly.
    pub d_star: String,
    /// The closed form C/(C²+1) as stated alongside B*.
    pub d_star_reference: String,
    pub reference_matches: bool,
    /// Both components of the normal form vanish at (x*, x*) with (B*, D*).
    pub is_equilibrium: bool,
    /// Trace and determinant of the linear part there.
    pub trace: String,
    pub determinant: String,
    pub bt: BtCoefficients,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BtCoefficients {
    pub a: String,
    pub b: String,
    pub ab: String,
    /// "BT-" for ab < 0, "BT+" for ab > 0, "degenerate" otherwise.
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub initial: [f64; 2],
    pub t_end: f64,
    pub rtol: f64,
    /// max |H(t) − H(0)| / |H(0)|.
    pub drift: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossReport {
    pub c: String,
    pub b: String,
    pub d: String,
    pub branches: Vec<BranchRow>,
    pub weights: Vec<String>,
    pub weights_sum_to_one: bool,
    pub core_field: [String; 2],
    pub core_matches_normal_form: bool,
    pub trace: String,
    pub trace_matches: bool,
    pub determinant: String,
    pub determinant_matches: bool,
    pub equilibria: Vec<EquilibriumRow>,
    pub cusp: CuspReport,
    /// Drift of H = (xy + ½(y−x) − B − ¼)e^{y−x}; only on the stratum C = 1, B = D.
    pub first_integral: Option<DriftReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarOptions {
    pub drift_initial: [f64; 2],
    pub t_end: f64,
    pub rtol: f64,
    pub drift_tol: f64,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        PlanarOptions { drift_initial: [0.0, 0.0], t_end: 10.0, rtol: 1e-10, drift_tol: 1e-8 }
    }
}

type Mat2 = [[Rational; 2]; 2];

fn dot(u: &[Rational; 2], v: &[Rational; 2]) -> Rational {
    &u[0] * &v[0] + &u[1] * &v[1]
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0].clone(), a[1][0].clone()], [a[0][1].clone(), a[1][1].clone()]]
}

/// A nonzero kernel vector of a rank-one 2×2 matrix.
fn kernel(a: &Mat2) -> Option<[Rational; 2]> {
    let row = a.iter().find(|r| !r[0].is_zero() || !r[1].is_zero())?;
    Some([row[1].clone(), -row[0].clone()])
}

/// One solution of a v = rhs for a rank-one a, if consistent.
fn solve_singular(a: &Mat2, rhs: &[Rational; 2]) -> Option<[Rational; 2]> {
    let i = (0..2).find(|&i| !a[i][0].is_zero() || !a[i][1].is_zero())?;
    let v = if !a[i][0].is_zero() {
        [&rhs[i] / &a[i][0], Rational::zero()]
    } else {
        [Rational::zero(), &rhs[i] / &a[i][1]]
    };
    let ok = (0..2).all(|r| &a[r][0] * &v[0] + &a[r][1] * &v[1] == rhs[r]);
    ok.then_some(v)
}

/// Normal form coefficients of a nilpotent equilibrium, following Kuznetsov:
/// A q0 = 0, A q1 = q0, Aᵀ p1 = 0, Aᵀ p0 = p1, ⟨q0,p0⟩ = ⟨q1,p1⟩ = 1, ⟨q0,p1⟩ = ⟨q1,p0⟩ = 0,
/// a = ½⟨p1, B(q0,q0)⟩, b = ⟨p0, B(q0,q0)⟩ + ⟨p1, B(q0,q1)⟩.
/// The kernel vector q0 is scaled so its first nonzero entry is 1; a and b scale
/// with q0 but the sign of ab does not.
pub fn bt_coefficients(jac: &Mat2, hess: &[Mat2; 2]) -> Result<BtCoefficients, CrossError> {
    let bad = |m: &str| CrossError::DegenerateParameters(format!("not a Bogdanov-Takens point: {m}"));
    let q0 = kernel(jac).ok_or_else(|| bad("linear part vanishes"))?;
    let lead = if q0[0].is_zero() { q0[1].clone() } else { q0[0].clone() };
    let q0 = [&q0[0] / &lead, &q0[1] / &lead];
    let q1 = solve_singular(jac, &q0).ok_or_else(|| bad("linear part is not nilpotent"))?;
    let at = transpose(jac);
    let p1 = kernel(&at).ok_or_else(|| bad("linear part vanishes"))?;
    let s = dot(&q1, &p1);
    if s.is_zero() {
        return Err(bad("Jordan chain is degenerate"));
    }
    let p1 = [&p1[0] / &s, &p1[1] / &s];
    let p0 = solve_singular(&at, &p1).ok_or_else(|| bad("adjoint chain is inconsistent"))?;
    let k = dot(&q1, &p0);
    let p0 = [&p0[0] - &k * &p1[0], &p0[1] - &k * &p1[1]];
    let bil = |u: &[Rational; 2], v: &[Rational; 2]| -> [Rational; 2] {
        let comp = |h: &Mat2| {
            let mut acc = Rational::zero();
            for i in 0..2 {
                for j in 0..2 {
                    acc += &h[i][j] * &u[i] * &v[j];
                }
            }
            acc
        };
        [comp(&hess[0]), comp(&hess[1])]
    };
    let b00 = bil(&q0, &q0);
    let a = dot(&p1, &b00) / int(2);
    let b = dot(&p0, &b00) + dot(&p1, &bil(&q0, &q1));
    let ab = &a * &b;
    let kind = if ab.is_negative() {
        "BT-"
    } else if ab.is_positive() {
        "BT+"
    } else {
        "degenerate"
    };
    Ok(BtCoefficients {
        a: format_rational(&a),
        b: format_rational(&b),
        ab: format_rational(&ab),
        kind: kind.into(),
    })
}

fn exact_jacobian(f: &PolyField, p: &[Rational]) -> Mat2 {
    let e = |i, j| f.jacobian_poly(i, j).eval(p);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn exact_hessians(f: &PolyField, p: &[Rational]) -> [Mat2; 2] {
    let h = |c: usize| {
        let g = &f.components()[c];
        let e = |i: usize, j: usize| g.partial(i).partial(j).eval(p);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    };
    [h(0), h(1)]
}

pub fn cusp(c: &Rational) -> Result<CuspReport, CrossError> {
    let x = (c - Rational::one()) / (int(2) * (c + Rational::one()));
    let b_star = c * c / ((c + Rational::one()) * (c + Rational::one()));
    let d_star = c * (&x - rat(1, 2)) * (&x - rat(1, 2));
    let d_reference = c / (c * c + Rational::one());
    let p = PlanarParams::new(c.clone(), b_star.clone(), d_star.clone())?;
    let f = normal_form(&p)?;
    let pt = [x.clone(), x.clone()];
    let is_eq = f.components().iter().all(|g| g.eval(&pt).is_zero());
    let jac = exact_jacobian(&f, &pt);
    let tr = &jac[0][0] + &jac[1][1];
    let det = &jac[0][0] * &jac[1][1] - &jac[0][1] * &jac[1][0];
    let bt = bt_coefficients(&jac, &exact_hessians(&f, &pt))?;
    Ok(CuspReport {
        x_star: format_rational(&x),
        b_star: format_rational(&b_star),
        d_star: format_rational(&d_star),
        d_star_reference: format_rational(&d_reference),
        reference_matches: d_reference == d_star,
        is_equilibrium: is_eq,
        trace: format_rational(&tr),
        determinant: format_rational(&det),
        bt,
    })
}

/// Real roots of −Cx² + (CB − D)x + (C/4 − CB/2 − D/2) = 0, each with y = B/(x+½) − ½,
/// polished by Newton on the normal form.
pub fn equilibria(p: &PlanarParams) -> Result<Vec<[f64; 2]>, CrossError> {
    let (c, b, d) = (rational_to_f64(&p.c), rational_to_f64(&p.b), rational_to_f64(&p.d));
    let qa = -c;
    let qb = c * b - d;
    let qc = c / 4.0 - c * b / 2.0 - d / 2.0;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let f = normal_form(p)?;
    let mut out = Vec::new();
    for sgn in [-1.0, 1.0] {
        let x = (-qb + sgn * disc.sqrt()) / (2.0 * qa);
        if (x + 0.5).abs() < 1e-14 {
            continue;
        }
        let y = b / (x + 0.5) - 0.5;
        let r = find_equilibrium(&f, &[x, y], 1e-14, 50)?;
        out.push([r[0], r[1]]);
    }
    out.sort_by(|u, v| u[0].total_cmp(&v[0]));
    out.dedup_by(|u, v| (u[0] - v[0]).abs() + (u[1] - v[1]).abs() < 1e-12);
    Ok(out)
}

pub fn run_planar_cross(p: &PlanarParams, opts: &PlanarOptions) -> Result<CrossReport, CrossError> {
    let field = cross_field(p)?;
    let branches = (0..4)
        .map(|m| {
            let (s, t) = mask_signs(m);
            let (a, b) = branch_value(p, s, t);
            BranchRow { signs: [s, t], a: format_rational(&a), b: format_rational(&b) }
        })
        .collect();
    let weights = branch_weights(&field)?;
    let mut total = MultiPoly::zero(weights[0].vars());
    for w in &weights {
        total = &total + w;
    }
    let core = convolve_symbolic(&field, &[0, 1], &Mollifier::box_profile())?;
    let nf = normal_form(p)?;
    let lifted: Vec<MultiPoly> = nf.components().iter().map(|g| g.with_vars(&core.vars)).collect::<Result<_, _>>()?;
    let vars = default_vars(2);
    let trace = nf.trace_poly();
    let trace_expected = MultiPoly::parse("x - 1/2", &vars)?.scale(&p.c) + MultiPoly::parse("y + 1/2", &vars)?;
    let det = &nf.jacobian_poly(0, 0) * &nf.jacobian_poly(1, 1) - &nf.jacobian_poly(0, 1) * &nf.jacobian_poly(1, 0);
    let det_expected = MultiPoly::parse("x - y", &vars)?.scale(&p.c);
    let equilibria = equilibria(p)?
        .into_iter()
        .map(|q| {
            let info = classify_equilibrium(&nf, &q);
            EquilibriumRow {
                location: q,
                classification: info.classification,
                trace: info.trace,
                determinant: info.determinant,
                in_core: q.iter().all(|v| v.abs() <= 1.0),
            }
        })
        .collect();
    let first_integral = if p.c.is_one() && p.b == p.d {
        let cfg = IntegratorConfig::with_tol(opts.rtol, opts.rtol * 1e-2);
        let tr = integrate(&nf, &opts.drift_initial, (0.0, opts.t_end), &cfg)?;
        let drift = first_integral_drift(&tr, rational_to_f64(&p.b));
        Some(DriftReport {
            initial: opts.drift_initial,
            t_end: opts.t_end,
            rtol: opts.rtol,
            drift,
            tolerance: opts.drift_tol,
            pass: drift < opts.drift_tol,
        })
    } else {
        None
    };
    Ok(CrossReport {
        c: format_rational(&p.c),
        b: format_rational(&p.b),
        d: format_rational(&p.d),
        branches,
        weights: weights.iter().map(|w| w.to_string()).collect(),
        weights_sum_to_one: total.is_one_poly(),
        core_field: [core.raw[0].to_string(), core.raw[1].to_string()],
        core_matches_normal_form: core.raw == lifted,
        trace: trace.to_string(),
        trace_matches: trace == trace_expected,
        determinant: det.to_string(),
        determinant_matches: det == det_expected,
        equilibria,
        cusp: cusp(&p.c)?,
        first_integral,
    })
}

trait IsOnePoly {
    fn is_one_poly(&self) -> bool;
}

impl IsOnePoly for MultiPoly {
    fn is_one_poly(&self) -> bool {
        *self == MultiPoly::one(self.vars())
    }
}


fn kind_name(c: &Classification) -> String {
    serde_json::to_value(c).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Normal-form portrait on the core box with both nullclines and the equilibria.
pub fn planar_portrait(p: &PlanarParams, grid: usize, t_end: f64) -> Result<crate::portrait::PortraitData, CrossError> {
    use crate::portrait::{graph_in_box, trajectory_in_box, Marker, PortraitData, Polyline};
    let domain = [[-1.0, 1.0], [-1.0, 1.0]];
    let (c, b, d) = (rational_to_f64(&p.c), rational_to_f64(&p.b), rational_to_f64(&p.d));
    let mut data = PortraitData::new(
        &format!("planar cross C={} B={} D={}", format_rational(&p.c), format_rational(&p.b), format_rational(&p.d)),
        domain,
    );
    data.nullclines.extend(graph_in_box("x' = 0", |x| b / (x + 0.5) - 0.5, &domain, 401));
    data.nullclines.extend(graph_in_box("y' = 0", |x| 0.5 + d / (c * (x - 0.5)), &domain, 401));
    let nf = normal_form(p)?;
    let cfg = IntegratorConfig::with_tol(1e-9, 1e-12);
    let g = grid.max(1);
    for i in 0..g {
        for j in 0..g {
            let at = |k: usize| if g == 1 { 0.0 } else { -0.9 + 1.8 * k as f64 / (g - 1) as f64 };
            let x0 = [at(i), at(j)];
            let pts = trajectory_in_box(&nf, x0, t_end, &domain, &cfg)?;
            data.trajectories.push(Polyline { label: format!("from ({}, {})", x0[0], x0[1]), points: pts });
        }
    }
    for (k, q) in equilibria(p)?.into_iter().enumerate() {
        if q.iter().all(|v| v.abs() <= 1.0) {
            let info = classify_equilibrium(&nf, &q);
            data.equilibria.push(Marker { label: format!("E{}", k + 1), at: q, kind: kind_name(&info.classification) });
        }
    }
    Ok(data)
}
