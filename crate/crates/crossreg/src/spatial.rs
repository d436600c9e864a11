//! The piecewise-constant spatial cross on the three coordinate planes, its
//! core field, and the 2-jet at the origin in cusp coordinates
//! (X, Y, Z) = (x, x − z, x − y).

use serde::Serialize;

use conv_reg::{branch_weights, convolve_symbolic, Mollifier};
use dynamics::{jet_transform, AffineChange, Jet};
use pws_core::{default_vars, format_rational, int, rat, var_list, MultiPoly, NormalCrossingsLocus, PiecewiseField, Rational, VarList};

use crate::error::CrossError;

#[derive(Clone, Debug, PartialEq)]
pub struct Unfolding {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Unfolding {
    pub fn zero() -> Self {
        Unfolding { a: int(0), b: int(0), c: int(0) }
    }
}

fn mask_signs(mask: usize) -> [i64; 3] {
    std::array::from_fn(|k| if mask >> k & 1 == 0 { 1 } else { -1 })
}

/// C_s = (s1 − s3, s1 − s3 − s1s2 − a − b(s1 − s3) − c(s1 − s2), s2 − s3).
pub fn branch_value(u: &Unfolding, s: [i64; 3]) -> [Rational; 3] {
    let [s1, s2, s3] = s.map(int);
    let mid = &s1 - &s3 - &s1 * &s2 - &u.a - &u.b * (&s1 - &s3) - &u.c * (&s1 - &s2);
    [&s1 - &s3, mid, &s2 - &s3]
}

pub fn cross_field(u: &Unfolding) -> Result<PiecewiseField, CrossError> {
    let vars = default_vars(3);
    let locus = NormalCrossingsLocus::new(3, &[0, 1, 2])?;
    let branches = (0..8)
        .map(|m| branch_value(u, mask_signs(m)).into_iter().map(|v| MultiPoly::constant(&vars, v)).collect())
        .collect();
    Ok(PiecewiseField::from_masks(locus, vars, branches)?)
}

/// P_s = (1 + s1 x)(1 + s2 y)(1 + s3 z) over the first three of `vars`.
fn p_s(vars: &VarList, s: [i64; 3]) -> MultiPoly {
    let mut p = MultiPoly::one(vars);
    for (k, sk) in s.iter().enumerate() {
        let f = MultiPoly::one(vars) + MultiPoly::var(vars, k).scale(&int(*sk));
        p = &p * &f;
    }
    p
}

/// Σ_s P_s C_s by direct expansion over the eight sign vectors (no convolution).
pub fn brute_force_sum(u: &Unfolding) -> Vec<MultiPoly> {
    let vars = default_vars(3);
    let mut acc = vec![MultiPoly::zero(&vars); 3];
    for m in 0..8 {
        let s = mask_signs(m);
        let p = p_s(&vars, s);
        for (k, v) in branch_value(u, s).iter().enumerate() {
            acc[k] = &acc[k] + &p.scale(v);
        }
    }
    acc
}

pub fn cusp_change(extra: usize) -> AffineChange {
    let n = 3 + extra;
    let mut m = vec![vec![int(0); n]; n];
    m[0][0] = int(1);
    m[1][0] = int(1);
    m[1][2] = int(-1);
    m[2][0] = int(1);
    m[2][1] = int(-1);
    for k in 3..n {
        m[k][k] = int(1);
    }
    AffineChange::linear(m).expect("invertible")
}

fn cusp_vars() -> VarList {
    var_list(&["X", "Y", "Z"])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchRow {
    pub signs: [i64; 3],
    pub value: [String; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JetReport {
    pub jet: Vec<String>,
    pub expected: Vec<String>,
    pub matches: bool,
    pub remainder_is_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpatialReport {
    pub a: String,
    pub b: String,
    pub c: String,
    pub branches: Vec<BranchRow>,
    /// Core weights from the box convolution; each equals ⅛P_s.
    pub weights: Vec<String>,
    pub weights_match_eighth_p: bool,
    pub weights_sum_to_one: bool,
    /// Core field with the ⅛ normalization.
    pub core_field: Vec<String>,
    /// Σ_s P_s C_s, the same field without the ⅛.
    pub core_field_unnormalized: Vec<String>,
    pub core_matches_brute_force: bool,
    /// At (a, b, c) = 0 the core field is (x − z, x − z − xy, y − z).
    pub closed_form_at_zero: bool,
    pub cusp_jet: JetReport,
    pub unfolding_jet: JetReport,
    /// a + bY + cZ + X(X − Z) holds with a, b, c as indeterminates.
    pub unfolding_identity: bool,
    pub change: Vec<String>,
}

fn jet_report(jet: &Jet, expected: &[MultiPoly]) -> JetReport {
    JetReport {
        jet: jet.jet.iter().map(|p| p.to_string()).collect(),
        expected: expected.iter().map(|p| p.to_string()).collect(),
        matches: jet.jet == expected,
        remainder_is_zero: jet.remainder_is_zero(),
    }
}

fn core_of(u: &Unfolding) -> Result<Vec<MultiPoly>, CrossError> {
    let core = convolve_symbolic(&cross_field(u)?, &[0, 1, 2], &Mollifier::box_profile())?;
    let vars = default_vars(3);
    Ok(core.raw.iter().map(|p| p.with_vars(&vars)).collect::<Result<_, _>>()?)
}

/// The unfolding with a, b, c as extra variables, pushed through the cusp change.
pub fn symbolic_unfolding() -> Result<bool, CrossError> {
    let vars = var_list(&["x", "y", "z", "a", "b", "c"]);
    let sym = |s: &str| MultiPoly::parse(s, &vars);
    let mut acc = vec![MultiPoly::zero(&vars); 6];
    for m in 0..8 {
        let s = mask_signs(m);
        let [s1, s2, s3] = s;
        let comps = [
            format!("{}", s1 - s3),
            format!("{} - a - ({})*b - ({})*c", s1 - s3 - s1 * s2, s1 - s3, s1 - s2),
            format!("{}", s2 - s3),
        ];
        let p = p_s(&vars, s).scale(&rat(1, 8));
        for k in 0..3 {
            acc[k] = &acc[k] + &(&p * &sym(&comps[k])?);
        }
    }
    let new = var_list(&["X", "Y", "Z", "a", "b", "c"]);
    let jet = jet_transform(&acc, &cusp_change(3), &new, 2)?;
    let n = |s: &str| MultiPoly::parse(s, &new);
    let expected = vec![n("Y")?, n("Z")?, n("X*(X - Z) + a + b*Y + c*Z")?, n("0")?, n("0")?, n("0")?];
    Ok(jet.jet == expected && jet.remainder_is_zero())
}

pub fn run_spatial_cross(u: &Unfolding) -> Result<SpatialReport, CrossError> {
    let field = cross_field(u)?;
    let vars = default_vars(3);
    let weights = branch_weights(&field)?;
    let wvars = weights[0].vars().clone();
    let eighth = (0..8)
        .map(|m| p_s(&vars, mask_signs(m)).scale(&rat(1, 8)).with_vars(&wvars))
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = MultiPoly::zero(&wvars);
    for w in &weights {
        total = &total + w;
    }
    let core = core_of(u)?;
    let brute = brute_force_sum(u);
    let core_matches = core.iter().zip(&brute).all(|(a, b)| *a == b.scale(&rat(1, 8)));
    let closed: Vec<MultiPoly> =
        ["x - z", "x - z - x*y", "y - z"].iter().map(|s| MultiPoly::parse(s, &vars)).collect::<Result<_, _>>()?;
    let zero_core = core_of(&Unfolding::zero())?;
    let cv = cusp_vars();
    let n = |s: &str| MultiPoly::parse(s, &cv);
    let cusp_jet = jet_transform(&zero_core, &cusp_change(0), &cv, 2)?;
    let cusp_expected = vec![n("Y")?, n("Z")?, n("X*(X - Z)")?];
    let unf_jet = jet_transform(&core, &cusp_change(0), &cv, 2)?;
    let z = n("X*(X - Z)")?
        + MultiPoly::constant(&cv, u.a.clone())
        + n("Y")?.scale(&u.b)
        + n("Z")?.scale(&u.c);
    let unf_expected = vec![n("Y")?, n("Z")?, z];
    Ok(SpatialReport {
        a: format_rational(&u.a),
        b: format_rational(&u.b),
        c: format_rational(&u.c),
        branches: (0..8)
            .map(|m| {
                let s = mask_signs(m);
                BranchRow { signs: s, value: branch_value(u, s).map(|v| format_rational(&v)) }
            })
            .collect(),
        weights: weights.iter().map(|w| w.to_string()).collect(),
        weights_match_eighth_p: weights == eighth,
        weights_sum_to_one: total == MultiPoly::one(&wvars),
        core_field: core.iter().map(|p| p.to_string()).collect(),
        core_field_unnormalized: brute.iter().map(|p| p.to_string()).collect(),
        core_matches_brute_force: core_matches,
        closed_form_at_zero: zero_core == closed,
        cusp_jet: jet_report(&cusp_jet, &cusp_expected),
        unfolding_jet: jet_report(&unf_jet, &unf_expected),
        unfolding_identity: symbolic_unfolding()?,
        change: cusp_change(0).describe(&vars, &cv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_at_zero_is_eight_times_the_closed_form() {
        let vars = default_vars(3);
        let want = ["8*x - 8*z", "8*x - 8*z - 8*x*y", "8*y - 8*z"];
        for (p, w) in brute_force_sum(&Unfolding::zero()).iter().zip(want) {
            assert_eq!(*p, MultiPoly::parse(w, &vars).unwrap());
        }
    }

    #[test]
    fn unfolding_constant_term() {
        let u = Unfolding { a: rat(1, 10), b: int(0), c: int(0) };
        let r = run_spatial_cross(&u).unwrap();
        assert!(r.unfolding_jet.matches && r.unfolding_jet.remainder_is_zero);
        let cv = cusp_vars();
        assert_eq!(MultiPoly::parse(&r.unfolding_jet.jet[2], &cv).unwrap().constant_term(), rat(1, 10));
    }
}
