//! Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
//! Exits nonzero when any criterion fails.

use std::time::{Duration, Instant};

use blowup::{overlap_factor, smoothing_plan, vertical_residual, verify_smooth, BlowupError, ChartField, VerifyConfig};
use conv_reg::{
    branch_weights, convolve_callable, convolve_symbolic, st_regularize, weight_functions, AdaptiveConfig, Mollifier,
    RegularizedField,
};
use crossreg::config::{ScenarioConfig, ScenarioName};
use crossreg::lambda::{dense, locate_cycle, sewing_check, SweepConfig};
use crossreg::planar::{planar_portrait, run_planar_cross, PlanarOptions, PlanarParams};
use crossreg::portrait::{render_to_string, Format};
use crossreg::scenario::{emit, run_scenario, Overrides};
use crossreg::smooth::sample_field;
use crossreg::spatial::{run_spatial_cross, Unfolding};
use crossreg::table::run_table;
use dynamics::{flow_to_section, polyline_dist, Classification, FnField, Orientation, Section, TransitionConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use pws_core::{default_vars, int, parse_rational, rat, MultiPoly, NormalCrossingsLocus, PiecewiseField, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

// 1. Normal-form table: exact rational equality, under 1 s.
const TABLE_BUDGET: Duration = Duration::from_secs(1);
// 2. Sewing closed form: quadrature agreement on the core region.
const SEWING_TOL: f64 = 1e-10;
// 4. Smoothing pipeline budget; per-check tolerances live in VerifyConfig::default().
const SMOOTHING_BUDGET: Duration = Duration::from_secs(30);
// 5. Purely vertical divisor field.
const VERTICAL_TOL: f64 = 1e-10;
// 6. ST link: fitted K within 20% across ε.
const ST_SPREAD: f64 = 0.2;
// 7(ii). Divergence formula against finite differences.
const DIVERGENCE_REL: f64 = 1e-6;
// 9. First-integral drift at rtol 1e-10.
const DRIFT_TOL: f64 = 1e-8;
// 11. Linearity and orbit invariance.
const LINEARITY_TOL: f64 = 1e-10;
const REPARAM_TOL: f64 = 1e-6;

fn c1_table() -> Outcome {
    let t = Instant::now();
    let rep = run_table().unwrap();
    let el = t.elapsed();
    let bad: Vec<String> = rep
        .rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} residual ({}, {})", r.name, r.residual[0], r.residual[1]))
        .collect();
    let ok = bad.is_empty() && el < TABLE_BUDGET;
    let n = rep.rows.iter().filter(|r| r.pass).count();
    outcome(ok, format!("{n}/8 rows exact in {el:.2?}{}", if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }))
}

fn c2_sewing() -> Outcome {
    let f = PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1", "1"], &["2", "1"]]).unwrap();
    let m = Mollifier::box_profile();
    let core = convolve_symbolic(&f, &[0], &m).unwrap();
    let want = [MultiPoly::parse("(3 - x)/2", &core.vars).unwrap(), MultiPoly::parse("eps", &core.vars).unwrap()];
    let symbolic = core.components[..] == want[..];
    let mut worst: f64 = 0.0;
    let cfg = AdaptiveConfig { abs_tol: 1e-13, ..Default::default() };
    for eps in [0.2, 0.05] {
        for i in 0..=8 {
            for y in [-0.7, 0.0, 1.3] {
                let ybar = -0.95 + 1.9 * i as f64 / 8.0;
                let num = convolve_callable(&f, &m, &core.to_plain(&[ybar, y], eps), eps, cfg).unwrap();
                let sym = core.eval_raw(&[ybar, y], eps);
                worst = worst.max((num[0] - sym[0]).abs().max((num[1] - sym[1]).abs()));
            }
        }
    }
    outcome(
        symbolic && worst < SEWING_TOL,
        format!("symbolic ((3-y1)/2, eps) exact: {symbolic}; quadrature gap {worst:.2e}"),
    )
}

fn c3_weights() -> Outcome {
    let p = PlanarParams::new(int(2), rat(1, 20), rat(1, 20)).unwrap();
    let field = crossreg::planar::cross_field(&p).unwrap();
    let w = branch_weights(&field).unwrap();
    let vars = w[0].vars().clone();
    let mut planar_form = true;
    let mut total = MultiPoly::zero(&vars);
    for (mask, wm) in w.iter().enumerate() {
        let s = if mask & 1 == 0 { "+" } else { "-" };
        let t = if mask & 2 == 0 { "+" } else { "-" };
        let m = MultiPoly::parse(&format!("(1 {s} x)*(1 {t} y)/4"), &vars).unwrap();
        planar_form &= *wm == m;
        total = &total + wm;
    }
    let planar_sum = total == MultiPoly::one(&vars);
    let sp = run_spatial_cross(&Unfolding::zero()).unwrap();
    let ok = planar_form && planar_sum && sp.weights_match_eighth_p && sp.weights_sum_to_one && sp.closed_form_at_zero && sp.core_matches_brute_force;
    outcome(
        ok,
        format!(
            "planar M_st = (1+sx)(1+ty)/4: {planar_form}, sum 1: {planar_sum}; spatial P_s/8: {}, sum 1: {}, \
             brute force = convolution: {}, (x-z, x-z-xy, y-z): {}",
            sp.weights_match_eighth_p, sp.weights_sum_to_one, sp.core_matches_brute_force, sp.closed_form_at_zero
        ),
    )
}

fn c4_smoothing() -> Outcome {
    let t = Instant::now();
    let cfg = VerifyConfig::default();
    let mut charts = 0;
    let mut failures = Vec::new();
    let (mut cont, mut order, mut trunc) = (0.0f64, f64::INFINITY, 0.0f64);
    for (n, k) in [(2, 1), (2, 2), (3, 3)] {
        let rf = RegularizedField::new(sample_field(n, k).unwrap(), Mollifier::plateau(0.25).unwrap()).unwrap();
        for pc in &smoothing_plan(rf.locus()).unwrap().charts {
            charts += 1;
            let rep = match verify_smooth(&rf, pc, &cfg) {
                Ok(r) => r,
                Err(BlowupError::NotSmooth(r)) => {
                    failures.push(r.chart_id.clone());
                    *r
                }
                Err(e) => return outcome(false, format!("{}: {e}", pc.id())),
            };
            for c in &rep.checks {
                match c.name.as_str() {
                    "continuity" => cont = cont.max(c.max_residual),
                    "fd_order" => order = order.min(c.estimated_order.unwrap_or(f64::INFINITY)),
                    "branch_truncation" => trunc = trunc.max(c.max_residual),
                    _ => {}
                }
            }
        }
    }
    let el = t.elapsed();
    outcome(
        failures.is_empty() && el < SMOOTHING_BUDGET,
        format!(
            "{charts} charts for |I| = 1, 2, 3; worst continuity {cont:.2e}, min order {order:.3}, truncation {trunc:.2e}; {el:.2?}{}",
            if failures.is_empty() { String::new() } else { format!("; failing {}", failures.join(", ")) }
        ),
    )
}

fn c5_vertical() -> Outcome {
    let f = PiecewiseField::parse(
        3,
        &default_vars(3),
        &[0],
        &[&["1 + y*z", "x - z^2", "3*y + x*x"], &["-2 + y", "z*x + 1", "y - x*z"]],
    )
    .unwrap();
    let ys: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    let mut worst: f64 = 0.0;
    for m in [Mollifier::box_profile(), Mollifier::plateau(0.25).unwrap()] {
        let rf = RegularizedField::new(f.clone(), m).unwrap();
        for others in [[0.3, -0.5], [0.0, 0.9], [-0.8, 0.2]] {
            worst = worst.max(vertical_residual(&rf, &others, &ys).unwrap());
        }
    }
    outcome(worst < VERTICAL_TOL, format!("max residual {worst:.2e} on the 21-point y grid"))
}

fn c6_st() -> Outcome {
    let f = PiecewiseField::parse(2, &default_vars(2), &[0], &[&["1 + y", "x - 1"], &["x^2 - 2", "y*x + 1"]]).unwrap();
    let m = Mollifier::plateau(0.25).unwrap();
    let rf = RegularizedField::new(f.clone(), m.clone()).unwrap();
    let mut ks = Vec::new();
    for eps in [0.1, 0.05, 0.025] {
        let mut worst: f64 = 0.0;
        for i in 0..=40 {
            for j in 0..=20 {
                let x = [eps * (-1.0 + 0.05 * i as f64), -1.0 + 0.1 * j as f64];
                let a = st_regularize(&f, &m, &x, eps).unwrap();
                let b = rf.eval(&x, eps).unwrap();
                worst = worst.max((a[0] - b[0]).abs().max((a[1] - b[1]).abs()));
            }
        }
        ks.push(worst / eps);
    }
    let (lo, hi) = ks.iter().fold((f64::INFINITY, 0.0f64), |(a, b), k| (a.min(*k), b.max(*k)));
    let spread = hi / lo - 1.0;
    outcome(spread <= ST_SPREAD, format!("K = {:.4}, {:.4}, {:.4}; spread {:.1}%", ks[0], ks[1], ks[2], 100.0 * spread))
}

fn c7_poincare() -> Outcome {
    let lam = q("-0.4");
    let cfg = SweepConfig::default();
    let at = |e: &str| locate_cycle(&lam, &q(e), &cfg).unwrap().row;
    let r = at("0.01");
    let i_ok = r.found && r.multiplier.is_some_and(|m| m.abs() < 1.0);
    let sew = sewing_check(&lam, 1.0, 1.7).unwrap();
    let ii_ok = sew.relative_error.is_some_and(|e| e < DIVERGENCE_REL);
    let ii = match (&sew.relative_error, &sew.note) {
        (Some(e), _) => format!("rel {e:.2e}"),
        (None, Some(n)) => format!("no sewing cycle at eps=0 ({n})"),
        _ => "no result".into(),
    };
    let hs: Vec<f64> = ["0.04", "0.02", "0.01"].iter().map(|e| at(e).hausdorff.unwrap_or(f64::NAN)).collect();
    let iii_ok = hs[0] > hs[1] && hs[1] > hs[2];
    let mark = |b: bool| if b { "pass" } else { "FAIL" };
    outcome(
        i_ok && ii_ok && iii_ok,
        format!(
            "(i) {}: y* = {:.6}, multiplier {:.2e}; (ii) {}: {ii}; (iii) {}: Hausdorff {:.4}, {:.4}, {:.4}",
            mark(i_ok),
            r.fixed_y.unwrap_or(f64::NAN),
            r.multiplier.unwrap_or(f64::NAN),
            mark(ii_ok),
            mark(iii_ok),
            hs[0],
            hs[1],
            hs[2]
        ),
    )
}

fn c8_hopf() -> Outcome {
    let cfg = SweepConfig::default();
    let eps = q("0.01");
    let amps: Vec<Option<f64>> =
        ["0.70", "0.74", "0.78", "0.82"].iter().map(|l| locate_cycle(&q(l), &eps, &cfg).unwrap().row.amplitude).collect();
    let decreasing = amps.iter().all(Option::is_some) && amps.windows(2).all(|w| w[0].unwrap() > w[1].unwrap());
    let beyond = locate_cycle(&q("0.9"), &eps, &cfg).unwrap().row;
    let fmt: Vec<String> = amps.iter().map(|a| a.map_or("none".into(), |v| format!("{v:.4}"))).collect();
    outcome(
        decreasing && !beyond.found,
        format!("amplitudes {}; cycle at lambda = 0.9: {}", fmt.join(", "), beyond.found),
    )
}

fn c9_planar() -> Outcome {
    let p = PlanarParams::new(int(2), q("0.05"), q("0.05")).unwrap();
    let rep = run_planar_cross(&p, &PlanarOptions::default()).unwrap();
    let mut kinds: Vec<Classification> = rep.equilibria.iter().map(|e| e.classification).collect();
    kinds.sort_by_key(|c| format!("{c:?}"));
    let kinds_ok = kinds == [Classification::Focus, Classification::Saddle];
    let b_ok = rep.cusp.b_star == "4/9";
    let s = PlanarParams::new(int(1), q("0.1"), q("0.1")).unwrap();
    let opts = PlanarOptions { rtol: 1e-10, t_end: 10.0, ..Default::default() };
    let drift = run_planar_cross(&s, &opts).unwrap().first_integral.map_or(f64::INFINITY, |d| d.drift);
    let ok = kinds_ok && b_ok && drift < DRIFT_TOL && rep.trace_matches;
    outcome(
        ok,
        format!(
            "equilibria {:?}; B* = {}; drift {drift:.2e}; trace = Cx - C/2 + y + 1/2: {}",
            rep.equilibria.iter().map(|e| e.classification).collect::<Vec<_>>(),
            rep.cusp.b_star,
            rep.trace_matches
        ),
    )
}

fn c10_spatial() -> Outcome {
    let zero = run_spatial_cross(&Unfolding::zero()).unwrap();
    let u = run_spatial_cross(&Unfolding { a: q("0.1"), b: q("-2/3"), c: q("5/4") }).unwrap();
    let ok = zero.cusp_jet.matches
        && zero.cusp_jet.remainder_is_zero
        && u.unfolding_jet.matches
        && u.unfolding_jet.remainder_is_zero
        && u.unfolding_identity;
    outcome(
        ok,
        format!(
            "jet ({}) remainder zero {}; unfolding a + bY + cZ + X(X - Z) symbolic in (a, b, c): {}",
            zero.cusp_jet.jet.join(", "),
            zero.cusp_jet.remainder_is_zero,
            u.unfolding_identity
        ),
    )
}

fn poly_from(coeffs: &[i64], vars: &pws_core::VarList) -> MultiPoly {
    let monos = ["1", "x", "y", "x*y", "x^2", "y^2"];
    let mut p = MultiPoly::zero(vars);
    for (c, m) in coeffs.iter().zip(monos) {
        p = &p + &MultiPoly::parse(m, vars).unwrap().scale(&int(*c));
    }
    p
}

fn random_field(coeffs: &[i64]) -> PiecewiseField {
    let vars = default_vars(2);
    let locus = NormalCrossingsLocus::new(2, &[0, 1]).unwrap();
    let branches = coeffs.chunks(12).map(|b| b.chunks(6).map(|c| poly_from(c, &vars)).collect()).collect();
    PiecewiseField::from_masks(locus, vars, branches).unwrap()
}

fn linearity() -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 48, failure_persistence: None, ..Config::default() });
    let coeffs = proptest::collection::vec(-5i64..=5, 48);
    let strat = (coeffs.clone(), coeffs, -4i64..=4, -4i64..=4, -1.0f64..1.0, -1.0f64..1.0, 0.01f64..0.5);
    runner
        .run(&strat, |(cf, cg, a, b, x, y, eps)| {
            let f = random_field(&cf);
            let g = random_field(&cg);
            let h = f.linear_combination(&int(a), &g, &int(b)).unwrap();
            for m in [Mollifier::box_profile(), Mollifier::plateau(0.25).unwrap()] {
                let ev = |p: &PiecewiseField| RegularizedField::new(p.clone(), m.clone()).unwrap().eval(&[x, y], eps).unwrap();
                let (vf, vg, vh) = (ev(&f), ev(&g), ev(&h));
                for k in 0..2 {
                    let lin = a as f64 * vf[k] + b as f64 * vg[k];
                    prop_assert!((vh[k] - lin).abs() <= LINEARITY_TOL * (1.0 + lin.abs()));
                }
            }
            Ok(())
        })
        .map_err(|e| format!("linearity: {e}"))
}

fn partition_of_unity() -> Result<(), String> {
    for (n, k) in [(2, 1), (2, 2), (3, 3)] {
        let w = branch_weights(&sample_field(n, k).unwrap()).unwrap();
        let mut total = MultiPoly::zero(w[0].vars());
        for p in &w {
            total = &total + p;
        }
        if total != MultiPoly::one(w[0].vars()) {
            return Err(format!("symbolic weights for |I| = {k} sum to {total}"));
        }
    }
    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    runner
        .run(&(-1.5f64..1.5, 0.0f64..0.9), |(y, eta)| {
            let m = if eta < 0.05 { Mollifier::box_profile() } else { Mollifier::plateau(eta).unwrap() };
            let (mp, mm, phi) = weight_functions(&m, y);
            prop_assert!((mp + mm - 1.0).abs() < 1e-15 && (mp - mm - phi).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&mp));
            Ok(())
        })
        .map_err(|e| format!("partition of unity: {e}"))
}

fn overlap_positivity() -> Result<usize, String> {
    let rf = RegularizedField::new(sample_field(2, 2).unwrap(), Mollifier::plateau(0.25).unwrap()).unwrap();
    let plan = smoothing_plan(rf.locus()).unwrap();
    let fields: Vec<ChartField> = plan.charts.iter().map(|pc| ChartField::new(&rf, &pc.chart).unwrap()).collect();
    let mut runner = TestRunner::new(Config { cases: 32, failure_persistence: None, ..Config::default() });
    let count = std::cell::Cell::new(0usize);
    runner
        .run(&(-0.2f64..0.2, -0.2f64..0.2, 0.02f64..0.1), |(x, y, e)| {
            for a in &fields {
                for b in &fields {
                    if let Some((lambda, res)) = overlap_factor(a, b, &[x, y, e]).unwrap() {
                        prop_assert!(lambda > 0.0, "factor {lambda}");
                        prop_assert!(res < 1e-9 * lambda.max(1.0), "residual {res}");
                        count.set(count.get() + 1);
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| format!("overlap positivity: {e}"))?;
    Ok(count.get())
}

fn reparametrization() -> Result<f64, String> {
    let g = |x: &[f64]| 1.0 + x[0] * x[0] + 0.5 * x[1] * x[1];
    let base = |x: &[f64], o: &mut [f64]| {
        o[0] = 1.0;
        o[1] = -3.0 * (x[0] - 0.4).powi(2) + 2.0 * (x[0] - 0.4) + 1.75;
    };
    let sec = Section::coordinate(2, 1, 0.0, Orientation::Negative).unwrap();
    let cfg = TransitionConfig::default();
    let worst = std::cell::Cell::new(0.0f64);
    let mut runner = TestRunner::new(Config { cases: 24, failure_persistence: None, ..Config::default() });
    runner
        .run(&(0.1f64..0.6, 0.2f64..1.5), |(x0, k)| {
            let f = FnField::new(2, base);
            let gf = FnField::new(2, |x: &[f64], o: &mut [f64]| {
                base(x, o);
                let s = k * g(x);
                o.iter_mut().for_each(|v| *v *= s);
            });
            let start = [x0, 1e-3];
            let a = flow_to_section(&f, &start, &sec, &cfg).unwrap().1;
            let b = flow_to_section(&gf, &start, &sec, &cfg).unwrap().1;
            // integrator nodes lie on the true orbits; the other side is a fine Hermite polyline
            let one = |p: &dynamics::Trajectory, q: &dynamics::Trajectory| {
                let fine = dense(q, 20_000);
                p.x.iter().map(|x| polyline_dist(x, &fine)).fold(0.0, f64::max)
            };
            let d = one(&a, &b).max(one(&b, &a));
            worst.set(worst.get().max(d));
            prop_assert!(d < REPARAM_TOL, "Hausdorff {d:e}");
            Ok(())
        })
        .map_err(|e| format!("reparametrization: {e}"))?;
    Ok(worst.get())
}

fn determinism() -> Result<usize, String> {
    let mut lam = ScenarioConfig::new(ScenarioName::LambdaFamily);
    lam.params.lambda = Some(vec![crossreg::Param(q("0.4")), crossreg::Param(q("0.7"))]);
    lam.params.eps = Some(vec![crossreg::Param(q("0.02")), crossreg::Param(q("0.01"))]);
    let configs = [
        ScenarioConfig::new(ScenarioName::Table),
        ScenarioConfig::new(ScenarioName::PlanarCross),
        ScenarioConfig::new(ScenarioName::SpatialCross),
        lam,
    ];
    let mut compared = 0;
    let produce = |c: &ScenarioConfig, f: Format| -> String {
        let rep = run_scenario(c, &Overrides::default()).unwrap();
        emit(c, &rep, f).unwrap()
    };
    for c in &configs {
        for f in [Format::Json, Format::Csv] {
            if produce(c, f) != produce(c, f) {
                return Err(format!("{} {:?} differs between runs", c.scenario.as_str(), f));
            }
            compared += 1;
        }
    }
    let p = PlanarParams::new(int(2), rat(1, 20), rat(1, 20)).unwrap();
    let svg = || render_to_string(&planar_portrait(&p, 4, 20.0).unwrap(), Format::Svg).unwrap();
    if svg() != svg() {
        return Err("planar SVG differs between runs".into());
    }
    Ok(compared + 1)
}

fn c11_properties() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, r: Result<String, String>| match r {
        Ok(s) => parts.push(format!("{name} ok{s}")),
        Err(e) => {
            ok = false;
            parts.push(format!("{name} FAIL ({e})"));
        }
    };
    record("linearity", linearity().map(|_| String::new()));
    record("partition of unity", partition_of_unity().map(|_| String::new()));
    record("overlap positivity", overlap_positivity().map(|n| format!(" ({n} pairs)")));
    record("reparametrization", reparametrization().map(|d| format!(" (max {d:.1e})")));
    record("determinism", determinism().map(|n| format!(" ({n} reports)")));
    outcome(ok, parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("normal-form table", c1_table),
        ("sewing closed form", c2_sewing),
        ("core-region weights", c3_weights),
        ("smoothing pipeline", c4_smoothing),
        ("purely vertical divisor field", c5_vertical),
        ("ST link", c6_st),
        ("Poincare machinery", c7_poincare),
        ("Hopf-type collapse", c8_hopf),
        ("planar cross", c9_planar),
        ("spatial cusp", c10_spatial),
        ("property suites", c11_properties),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} {name}: {} [{:.2?}]", i + 1, o.detail, t.elapsed());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
