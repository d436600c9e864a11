use dynamics::{
    classify_equilibrium, darboux_h, find_equilibrium, first_integral_drift, integrate, jet_transform, transform_field,
    AffineChange, Classification, IntegratorConfig, PolyField,
};
use proptest::prelude::*;
use pws_core::{default_vars, int, rat, var_list, MultiPoly, Rational};

fn planar_cross(c: &str, b: &str, d: &str) -> PolyField {
    let vars = default_vars(2);
    PolyField::parse(&vars, &[&format!("(x+1/2)*(y+1/2) - {b}"), &format!("{c}*(x-1/2)*(y-1/2) - {d}")]).unwrap()
}

#[test]
fn planar_cross_has_a_saddle_and_a_focus() {
    let f = planar_cross("2", "1/20", "1/20");
    let saddle = find_equilibrium(&f, &[-0.45, 0.45], 1e-14, 50).unwrap();
    let focus = find_equilibrium(&f, &[0.45, -0.45], 1e-14, 50).unwrap();
    assert!(saddle[0] < saddle[1] && focus[0] > focus[1]);
    assert_eq!(classify_equilibrium(&f, &saddle).classification, Classification::Saddle);
    assert_eq!(classify_equilibrium(&f, &focus).classification, Classification::Focus);
}

#[test]
fn planar_cross_trace_and_determinant() {
    let vars = default_vars(2);
    let f = planar_cross("2", "1/20", "1/20");
    assert_eq!(f.trace_poly(), MultiPoly::parse("2*x - 1 + y + 1/2", &vars).unwrap());
    let det = &(&f.jacobian_poly(0, 0) * &f.jacobian_poly(1, 1)) - &(&f.jacobian_poly(0, 1) * &f.jacobian_poly(1, 0));
    assert_eq!(det, MultiPoly::parse("2*(x - y)", &vars).unwrap());
    let p = find_equilibrium(&f, &[0.45, -0.45], 1e-14, 50).unwrap();
    let info = classify_equilibrium(&f, &p);
    assert!((info.trace - (2.0 * p[0] - 1.0 + p[1] + 0.5)).abs() < 1e-14);
}

#[test]
fn darboux_integral_values() {
    assert!((darboux_h(0.1, 0.0, 0.0) + 0.35).abs() < 1e-15);
    for (x, y) in [(0.3, -0.7), (1.1, 0.4), (-0.25, 0.9)] {
        assert_eq!(darboux_h(0.1, -y, -x), darboux_h(0.1, x, y));
    }
}

#[test]
fn darboux_integral_is_conserved() {
    let f = planar_cross("1", "1/10", "1/10");
    let tr = integrate(&f, &[0.0, 0.0], (0.0, 10.0), &IntegratorConfig::with_tol(1e-10, 1e-12)).unwrap();
    let drift = first_integral_drift(&tr, 0.1);
    assert!(drift < 1e-8, "{drift}");
}

fn spatial_vars() -> pws_core::VarList {
    default_vars(3)
}

fn cusp_change() -> AffineChange {
    AffineChange::linear(vec![vec![int(1), int(0), int(0)], vec![int(1), int(0), int(-1)], vec![int(1), int(-1), int(0)]])
        .unwrap()
}

#[test]
fn spatial_cross_is_a_cusp() {
    let vars = spatial_vars();
    let f: Vec<MultiPoly> = ["x - z", "x - z - x*y", "y - z"].iter().map(|s| MultiPoly::parse(s, &vars).unwrap()).collect();
    let new = var_list(&["X", "Y", "Z"]);
    let jet = jet_transform(&f, &cusp_change(), &new, 2).unwrap();
    let expect: Vec<MultiPoly> = ["Y", "Z", "X*(X - Z)"].iter().map(|s| MultiPoly::parse(s, &new).unwrap()).collect();
    assert_eq!(jet.jet, expect);
    assert!(jet.remainder_is_zero());
}

#[test]
fn spatial_unfolding_jet() {
    let vars = spatial_vars();
    let new = var_list(&["X", "Y", "Z"]);
    for (a, b, c) in [(rat(1, 10), int(0), int(0)), (rat(-1, 3), rat(2, 7), rat(5, 4))] {
        let sub = |s: &str| MultiPoly::parse(s, &vars).unwrap();
        let y = &(&(&sub("x - z - x*y") - &MultiPoly::constant(&vars, a.clone())) - &sub("x - z").scale(&b))
            - &sub("x - y").scale(&c);
        let f = vec![sub("x - z"), y, sub("y - z")];
        let jet = jet_transform(&f, &cusp_change(), &new, 2).unwrap();
        let n = |s: &str| MultiPoly::parse(s, &new).unwrap();
        let z = &(&(&n("X*(X - Z)") + &MultiPoly::constant(&new, a.clone())) + &n("Y").scale(&b)) + &n("Z").scale(&c);
        assert_eq!(jet.jet[2], z);
        assert_eq!(jet.jet[2].constant_term(), a);
        assert!(jet.remainder_is_zero());
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jet_transform_round_trips(m in proptest::collection::vec(small_rational(), 9),
                                 b in proptest::collection::vec(small_rational(), 3),
                                 coeffs in proptest::collection::vec(small_rational(), 9)) {
        let rows: Vec<Vec<Rational>> = m.chunks(3).map(|r| r.to_vec()).collect();
        let Ok(change) = AffineChange::new(rows, b) else { unreachable!() };
        prop_assume!(change.inverse().is_ok());
        let vars = spatial_vars();
        let basis = ["x*y", "z^2", "x", "y*z", "1", "x^2*z", "y", "x*z", "z"];
        let f: Vec<MultiPoly> = (0..3)
            .map(|i| {
                let mut p = MultiPoly::zero(&vars);
                for k in 0..3 {
                    p = &p + &MultiPoly::parse(basis[3 * i + k], &vars).unwrap().scale(&coeffs[3 * i + k]);
                }
                p
            })
            .collect();
        let mid = var_list(&["X", "Y", "Z"]);
        let there = transform_field(&f, &change, &mid).unwrap();
        let back = transform_field(&there, &change.inverse().unwrap(), &vars).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn classification_ignores_time_rescaling(m in proptest::collection::vec(-6i64..=6, 4), k in 1i64..=9) {
        let vars = default_vars(2);
        let field = |s: i64| {
            PolyField::parse(&vars, &[
                &format!("{s}*({}*x + {}*y)/3", m[0], m[1]),
                &format!("{s}*({}*x + {}*y)/3", m[2], m[3]),
            ]).unwrap()
        };
        let a = classify_equilibrium(&field(1), &[0.0, 0.0]);
        let b = classify_equilibrium(&field(k), &[0.0, 0.0]);
        prop_assert_eq!(a.classification, b.classification);
        prop_assert_eq!(a.trace.signum() * (a.trace != 0.0) as i32 as f64, b.trace.signum() * (b.trace != 0.0) as i32 as f64);
        prop_assert_eq!(a.determinant.signum() * (a.determinant != 0.0) as i32 as f64,
                        b.determinant.signum() * (b.determinant != 0.0) as i32 as f64);
    }
}
