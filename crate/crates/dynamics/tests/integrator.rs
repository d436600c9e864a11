mod common;

use dynamics::{
    hausdorff, integrate, integrate_with_events, resample, transition_map, Event, FnField, IntegratorConfig, Orientation,
    PolyField, Section, TransitionConfig, Trajectory,
};
use proptest::prelude::*;
use pws_core::default_vars;

fn rotation() -> FnField<impl Fn(&[f64], &mut [f64])> {
    FnField::new(2, |x: &[f64], o: &mut [f64]| {
        o[0] = x[1];
        o[1] = -x[0];
    })
}

#[test]
fn harmonic_energy_is_conserved() {
    let tr = integrate(&rotation(), &[1.0, 0.5], (0.0, 100.0), &IntegratorConfig::with_tol(1e-9, 1e-12)).unwrap();
    let e0 = 1.25;
    let drift = tr.x.iter().map(|x| (x[0] * x[0] + x[1] * x[1] - e0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-7, "{drift}");
}

#[test]
fn constant_field_transition_is_the_identity() {
    let f = PolyField::parse(&default_vars(2), &["1", "0"]).unwrap();
    let from = Section::coordinate(2, 0, 0.0, Orientation::Positive).unwrap();
    let to = Section::coordinate(2, 0, 1.0, Orientation::Positive).unwrap();
    let tm = transition_map(&f, &from, &[0.37], &to, &TransitionConfig::default()).unwrap();
    assert!((tm.param[0] - 0.37).abs() < 1e-14);
    assert!((tm.derivative[0][0] - 1.0).abs() < 1e-9);
    assert!((tm.time - 1.0).abs() < 1e-12);
}

#[test]
fn linear_transition_multiplies_by_e() {
    let f = PolyField::parse(&default_vars(2), &["1", "y"]).unwrap();
    let from = Section::coordinate(2, 0, 0.0, Orientation::Positive).unwrap();
    let to = Section::coordinate(2, 0, 1.0, Orientation::Positive).unwrap();
    let tm = transition_map(&f, &from, &[0.5], &to, &TransitionConfig::default()).unwrap();
    let e = std::f64::consts::E;
    assert!((tm.param[0] - 0.5 * e).abs() < 1e-11);
    assert!((tm.derivative[0][0] - e).abs() < 1e-8);
}

#[test]
fn lambda_upper_branch_transition_matches_direct_integration() {
    let f = PolyField::branch(&common::lambda_family("2/5"), 0).unwrap();
    let from = common::sigma(Orientation::Positive);
    let to = common::sigma(Orientation::Negative);
    let tm = transition_map(&f, &from, &[-0.4], &to, &TransitionConfig::default()).unwrap();
    let direct = integrate(&f, &[-0.4, 0.0], (0.0, tm.time), &IntegratorConfig::with_tol(1e-12, 1e-14)).unwrap();
    assert!((direct.last()[0] - tm.state[0]).abs() < 1e-9);
    assert!(direct.last()[1].abs() < 1e-9);
    // upper orbits are level sets of y − G₊(x)
    let g = |x: f64| {
        let u = x + 0.4;
        -u * u * u + u * u + 1.75 * u
    };
    assert!((g(tm.state[0]) - g(-0.4)).abs() < 1e-10);
}

/// Dense samples of a trajectory, uniform in time.
fn dense(tr: &Trajectory, count: usize) -> Vec<Vec<f64>> {
    let t1 = tr.end_time();
    (0..count).map(|k| tr.interpolate((t1 * k as f64 / (count - 1) as f64).min(t1)).unwrap()).collect()
}

fn orbit_to_section<F: dynamics::VectorField>(f: &F, x0: &[f64]) -> Trajectory {
    let ev = Event { section: Section::coordinate(2, 1, 0.0, Orientation::Positive).unwrap(), terminal: true };
    integrate_with_events(f, x0, (0.0, 100.0), &IntegratorConfig::with_tol(1e-12, 1e-14), &[ev]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn time_rescaling_keeps_the_orbit(r in 0.5f64..1.5, a in 0.0f64..2.0, damp in 0.0f64..0.2) {
        let x = FnField::new(2, move |p: &[f64], o: &mut [f64]| {
            o[0] = p[1];
            o[1] = -p[0] - damp * p[1];
        });
        let gx = FnField::new(2, move |p: &[f64], o: &mut [f64]| {
            let g = 1.0 + a * p[0] * p[0];
            o[0] = g * p[1];
            o[1] = g * (-p[0] - damp * p[1]);
        });
        let p = orbit_to_section(&x, &[r, 0.0]);
        let q = orbit_to_section(&gx, &[r, 0.0]);
        let (ps, qs) = (resample(&dense(&p, 20000), 2000), resample(&dense(&q, 20000), 2000));
        let worst = ps.iter().zip(&qs).map(|(u, v)| dynamics::geometry::dist(u, v)).fold(0.0, f64::max);
        prop_assert!(worst < 1e-6, "{}", worst);
        prop_assert!(hausdorff(&ps, &qs, 2000) < 1e-6);
    }
}
