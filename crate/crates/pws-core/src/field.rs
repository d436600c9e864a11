//! Piecewise-polynomial vector fields whose discontinuity locus is a union of
//! coordinate hyperplanes.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::poly::{format_rational, parse_rational, var_list, MultiPoly, PolyF64, VarList};

/// Σ = ⋃_{i ∈ I} {x_i = 0} inside ℝⁿ. Axes are 0-based internally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalCrossingsLocus {
    n: usize,
    active: Vec<usize>,
}

impl NormalCrossingsLocus {
    pub fn new(n: usize, active: &[usize]) -> Result<Self, FieldError> {
        if n == 0 {
            return Err(FieldError::Invalid("dimension must be positive".into()));
        }
        let mut a = active.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != active.len() {
            return Err(FieldError::Invalid("repeated active axis".into()));
        }
        if let Some(&bad) = a.iter().find(|&&i| i >= n) {
            return Err(FieldError::BadAxis(bad));
        }
        Ok(NormalCrossingsLocus { n, active: a })
    }

    pub fn empty(n: usize) -> Self {
        NormalCrossingsLocus { n, active: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn num_branches(&self) -> usize {
        1 << self.active.len()
    }

    /// Position of `axis` inside the active list.
    pub fn position(&self, axis: usize) -> Option<usize> {
        self.active.iter().position(|&a| a == axis)
    }

    pub fn is_active(&self, axis: usize) -> bool {
        self.position(axis).is_some()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.active.iter().any(|&i| x[i] == 0.0)
    }

    pub fn without(&self, axis: usize) -> Result<Self, FieldError> {
        let k = self.position(axis).ok_or(FieldError::BadAxis(axis))?;
        let mut a = self.active.clone();
        a.remove(k);
        Ok(NormalCrossingsLocus { n: self.n, active: a })
    }
}

/// One sign per active axis, in active-axis order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    axes: Vec<usize>,
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(locus: &NormalCrossingsLocus, signs: &[i8]) -> Result<Self, FieldError> {
        if signs.len() != locus.active().len() {
            return Err(FieldError::Invalid(format!(
                "sign vector has {} entries, locus has {} active axes",
                signs.len(),
                locus.active().len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(FieldError::Invalid("signs must be +1 or -1".into()));
        }
        Ok(SignVector { axes: locus.active().to_vec(), signs: signs.to_vec() })
    }

    /// Bit k of `mask` set means sign −1 on the k-th active axis.
    pub fn from_mask(locus: &NormalCrossingsLocus, mask: usize) -> Self {
        let signs = (0..locus.active().len()).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
        SignVector { axes: locus.active().to_vec(), signs }
    }

    pub fn of_point(locus: &NormalCrossingsLocus, x: &[f64]) -> Result<Self, FieldError> {
        let mut signs = Vec::with_capacity(locus.active().len());
        for &i in locus.active() {
            if x[i] > 0.0 {
                signs.push(1);
            } else if x[i] < 0.0 {
                signs.push(-1);
            } else {
                return Err(FieldError::OnLocus { axis: i });
            }
        }
        Ok(SignVector { axes: locus.active().to_vec(), signs })
    }

    pub fn mask(&self) -> usize {
        self.signs.iter().enumerate().map(|(k, &s)| if s < 0 { 1 << k } else { 0 }).sum()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn sign(&self, axis: usize) -> Option<i8> {
        self.axes.iter().position(|&a| a == axis).map(|k| self.signs[k])
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        write!(f, "({s})")
    }
}

/// Anything that can evaluate the smooth extension of each branch.
pub trait BranchField: Send + Sync {
    fn locus(&self) -> &NormalCrossingsLocus;
    fn eval_branch(&self, mask: usize, x: &[f64], out: &mut [f64]);

    fn n(&self) -> usize {
        self.locus().n()
    }

    fn eval_piecewise(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        let s = SignVector::of_point(self.locus(), x)?;
        let mut out = vec![0.0; self.n()];
        self.eval_branch(s.mask(), x, &mut out);
        Ok(out)
    }
}

#[derive(Clone)]
pub struct PiecewiseField {
    locus: NormalCrossingsLocus,
    vars: VarList,
    branches: Vec<Vec<MultiPoly>>,
    compiled: Vec<Vec<PolyF64>>,
}

impl PartialEq for PiecewiseField {
    fn eq(&self, other: &Self) -> bool {
        self.locus == other.locus && self.vars == other.vars && self.branches == other.branches
    }
}

impl fmt::Debug for PiecewiseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PiecewiseField(n={}, I={:?})", self.n(), self.locus.active())?;
        for (m, b) in self.branches.iter().enumerate() {
            let comps: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            writeln!(f, "  {:?}: ({})", SignVector::from_mask(&self.locus, m), comps.join(", "))?;
        }
        Ok(())
    }
}

pub fn default_vars(n: usize) -> VarList {
    match n {
        1 => var_list(&["x"]),
        2 => var_list(&["x", "y"]),
        3 => var_list(&["x", "y", "z"]),
        _ => (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().into(),
    }
}

impl PiecewiseField {
    /// Branches indexed by mask (see [`SignVector::from_mask`]).
    pub fn from_masks(
        locus: NormalCrossingsLocus,
        vars: VarList,
        branches: Vec<Vec<MultiPoly>>,
    ) -> Result<Self, FieldError> {
        let n = locus.n();
        if vars.len() != n {
            return Err(FieldError::Invalid(format!("{} variables for dimension {n}", vars.len())));
        }
        if branches.len() != locus.num_branches() {
            return Err(FieldError::Invalid(format!(
                "expected {} branches, got {}",
                locus.num_branches(),
                branches.len()
            )));
        }
        for b in &branches {
            if b.len() != n {
                return Err(FieldError::Invalid(format!("branch has {} components, expected {n}", b.len())));
            }
            if b.iter().any(|p| *p.vars() != vars) {
                return Err(FieldError::Invalid("branch polynomial uses foreign variables".into()));
            }
        }
        let compiled = branches.iter().map(|b| b.iter().map(PolyF64::new).collect()).collect();
        Ok(PiecewiseField { locus, vars, branches, compiled })
    }

    pub fn new(
        locus: NormalCrossingsLocus,
        vars: VarList,
        branches: Vec<(SignVector, Vec<MultiPoly>)>,
    ) -> Result<Self, FieldError> {
        let mut slots: Vec<Option<Vec<MultiPoly>>> = vec![None; locus.num_branches()];
        for (s, comps) in branches {
            if s.axes() != locus.active() {
                return Err(FieldError::Invalid("sign vector domain differs from active axes".into()));
            }
            let m = s.mask();
            if slots[m].is_some() {
                return Err(FieldError::Invalid(format!("duplicate branch {s:?}")));
            }
            slots[m] = Some(comps);
        }
        let mut out = Vec::with_capacity(slots.len());
        for (m, s) in slots.into_iter().enumerate() {
            out.push(s.ok_or_else(|| {
                FieldError::Invalid(format!("missing branch {:?}", SignVector::from_mask(&locus, m)))
            })?);
        }
        Self::from_masks(locus, vars, out)
    }

    /// Builds a field from expression strings, one list per mask.
    pub fn parse(
        n: usize,
        vars: &VarList,
        active: &[usize],
        branches: &[&[&str]],
    ) -> Result<Self, FieldError> {
        let locus = NormalCrossingsLocus::new(n, active)?;
        let mut bs = Vec::with_capacity(branches.len());
        for b in branches {
            let comps = b.iter().map(|s| MultiPoly::parse(s, vars)).collect::<Result<Vec<_>, _>>()?;
            bs.push(comps);
        }
        Self::from_masks(locus, vars.clone(), bs)
    }

    /// Two-branch field: `plus` on {x_axis > 0}, `minus` on {x_axis < 0}.
    pub fn two_branch(
        vars: &VarList,
        axis: usize,
        plus: Vec<MultiPoly>,
        minus: Vec<MultiPoly>,
    ) -> Result<Self, FieldError> {
        let locus = NormalCrossingsLocus::new(vars.len(), &[axis])?;
        Self::from_masks(locus, vars.clone(), vec![plus, minus])
    }

    pub fn smooth(vars: &VarList, comps: Vec<MultiPoly>) -> Result<Self, FieldError> {
        Self::from_masks(NormalCrossingsLocus::empty(vars.len()), vars.clone(), vec![comps])
    }

    pub fn n(&self) -> usize {
        self.locus.n()
    }

    pub fn locus(&self) -> &NormalCrossingsLocus {
        &self.locus
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[Vec<MultiPoly>] {
        &self.branches
    }

    pub fn branch(&self, s: &SignVector) -> &[MultiPoly] {
        &self.branches[s.mask()]
    }

    pub fn branch_by_mask(&self, mask: usize) -> &[MultiPoly] {
        &self.branches[mask]
    }

    pub fn compiled(&self, mask: usize) -> &[PolyF64] {
        &self.compiled[mask]
    }

    /// Highest per-variable degree over all branch components.
    pub fn max_degree(&self) -> u32 {
        self.branches
            .iter()
            .flat_map(|b| b.iter())
            .flat_map(|p| (0..self.n()).map(move |i| p.degree_in(i)))
            .max()
            .unwrap_or(0)
    }

    pub fn eval_piecewise(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        BranchField::eval_piecewise(self, x)
    }

    /// Restricts to the side `sign·x_axis > 0`, removing `axis` from the locus.
    pub fn drop_component(&self, axis: usize, sign: i8) -> Result<Self, FieldError> {
        let k = self.locus.position(axis).ok_or(FieldError::BadAxis(axis))?;
        if sign != 1 && sign != -1 {
            return Err(FieldError::Invalid("sign must be +1 or -1".into()));
        }
        let new_locus = self.locus.without(axis)?;
        let bit = if sign < 0 { 1usize << k } else { 0 };
        let low = (1usize << k) - 1;
        let branches = (0..new_locus.num_branches())
            .map(|m| {
                let old = (m & low) | bit | ((m & !low) << 1);
                self.branches[old].clone()
            })
            .collect();
        Self::from_masks(new_locus, self.vars.clone(), branches)
    }

    /// `a·self + b·other` branchwise; both fields must share locus and variables.
    pub fn linear_combination(
        &self,
        a: &crate::poly::Rational,
        other: &PiecewiseField,
        b: &crate::poly::Rational,
    ) -> Result<Self, FieldError> {
        if self.locus != other.locus || self.vars != other.vars {
            return Err(FieldError::Invalid("fields differ in locus or variables".into()));
        }
        let branches = self
            .branches
            .iter()
            .zip(&other.branches)
            .map(|(p, q)| p.iter().zip(q).map(|(u, v)| &u.scale(a) + &v.scale(b)).collect())
            .collect();
        Self::from_masks(self.locus.clone(), self.vars.clone(), branches)
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            n: self.n(),
            vars: Some(self.vars.to_vec()),
            active_axes: self.locus.active().iter().map(|i| i + 1).collect(),
            branches: self
                .branches
                .iter()
                .enumerate()
                .map(|(m, b)| BranchJson {
                    signs: SignVector::from_mask(&self.locus, m).signs().to_vec(),
                    components: b.iter().map(terms_json).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FieldJson) -> Result<Self, FieldError> {
        let vars = match &j.vars {
            Some(v) => var_list(v),
            None => default_vars(j.n),
        };
        let active: Vec<usize> = j
            .active_axes
            .iter()
            .map(|&a| a.checked_sub(1).ok_or(FieldError::BadAxis(0)))
            .collect::<Result<_, _>>()?;
        let locus = NormalCrossingsLocus::new(j.n, &active)?;
        let mut bs = Vec::with_capacity(j.branches.len());
        for b in &j.branches {
            let s = SignVector::new(&locus, &b.signs)?;
            let comps = b
                .components
                .iter()
                .map(|t| poly_from_terms_json(t, &vars))
                .collect::<Result<Vec<_>, _>>()?;
            bs.push((s, comps));
        }
        Self::new(locus, vars, bs)
    }
}

impl BranchField for PiecewiseField {
    fn locus(&self) -> &NormalCrossingsLocus {
        &self.locus
    }

    fn eval_branch(&self, mask: usize, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.compiled[mask]) {
            *o = p.eval(x);
        }
    }
}

pub type BranchFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Branches given as arbitrary smooth closures; only numeric routines accept it.
#[derive(Clone)]
pub struct CallableField {
    locus: NormalCrossingsLocus,
    branches: Vec<BranchFn>,
}

impl CallableField {
    pub fn new(locus: NormalCrossingsLocus, branches: Vec<BranchFn>) -> Result<Self, FieldError> {
        if branches.len() != locus.num_branches() {
            return Err(FieldError::Invalid(format!(
                "expected {} branches, got {}",
                locus.num_branches(),
                branches.len()
            )));
        }
        Ok(CallableField { locus, branches })
    }

    pub fn from_piecewise(f: &PiecewiseField) -> Self {
        let branches = (0..f.num_branches())
            .map(|m| {
                let comps: Vec<PolyF64> = f.compiled(m).to_vec();
                Arc::new(move |x: &[f64], out: &mut [f64]| {
                    for (o, p) in out.iter_mut().zip(&comps) {
                        *o = p.eval(x);
                    }
                }) as BranchFn
            })
            .collect();
        CallableField { locus: f.locus().clone(), branches }
    }
}

impl BranchField for CallableField {
    fn locus(&self) -> &NormalCrossingsLocus {
        &self.locus
    }

    fn eval_branch(&self, mask: usize, x: &[f64], out: &mut [f64]) {
        (self.branches[mask])(x, out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchJson {
    pub signs: Vec<i8>,
    pub components: Vec<Vec<TermJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    pub active_axes: Vec<usize>,
    pub branches: Vec<BranchJson>,
}

pub fn terms_json(p: &MultiPoly) -> Vec<TermJson> {
    p.terms().map(|(e, c)| TermJson { coeff: format_rational(c), exps: e.clone() }).collect()
}

pub fn poly_from_terms_json(terms: &[TermJson], vars: &VarList) -> Result<MultiPoly, FieldError> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.exps.len() != vars.len() {
            return Err(FieldError::Invalid(format!(
                "term has {} exponents, expected {}",
                t.exps.len(),
                vars.len()
            )));
        }
        out.push((t.exps.clone(), parse_rational(&t.coeff)?));
    }
    Ok(MultiPoly::from_terms(vars, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn escaping() -> PiecewiseField {
        let v = default_vars(2);
        PiecewiseField::parse(2, &v, &[0], &[&["1", "1"], &["-1", "1"]]).unwrap()
    }

    #[test]
    fn escaping_field_selects_branch_by_sign() {
        let f = escaping();
        assert_eq!(f.eval_piecewise(&[0.5, 3.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(f.eval_piecewise(&[-0.5, 3.0]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(f.eval_piecewise(&[0.0, 3.0]), Err(FieldError::OnLocus { axis: 0 }));
    }

    #[test]
    fn mask_round_trip() {
        let l = NormalCrossingsLocus::new(3, &[0, 2]).unwrap();
        for m in 0..4 {
            assert_eq!(SignVector::from_mask(&l, m).mask(), m);
        }
        let s = SignVector::new(&l, &[1, -1]).unwrap();
        assert_eq!(s.sign(2), Some(-1));
        assert_eq!(s.sign(1), None);
        assert!(SignVector::new(&l, &[1]).is_err());
        assert!(SignVector::new(&l, &[1, 0]).is_err());
    }

    #[test]
    fn drop_component_on_cross() {
        let v = default_vars(2);
        // branch (s,t) has components (s, t) so we can read signs back
        let f = PiecewiseField::parse(2, &v, &[0, 1], &[&["1", "1"], &["-1", "1"], &["1", "-1"], &["-1", "-1"]])
            .unwrap();
        let g = f.drop_component(0, 1).unwrap();
        assert_eq!(g.locus().active(), &[1]);
        assert_eq!(g.eval_piecewise(&[-7.0, 0.5]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(g.eval_piecewise(&[-7.0, -0.5]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(f.drop_component(0, 1).unwrap().drop_component(1, -1).unwrap().branches()[0][1].to_string(), "-1");
        assert!(matches!(g.drop_component(0, 1), Err(FieldError::BadAxis(0))));
    }

    #[test]
    fn json_round_trip() {
        let f = escaping();
        let s = serde_json::to_string(&f.to_json()).unwrap();
        let j: FieldJson = serde_json::from_str(&s).unwrap();
        assert_eq!(PiecewiseField::from_json(&j).unwrap(), f);
        assert!(serde_json::from_str::<FieldJson>(r#"{"n":1,"active_axes":[],"branches":[],"extra":1}"#).is_err());
    }

    #[test]
    fn branch_count_is_enforced() {
        let v = default_vars(2);
        let l = NormalCrossingsLocus::new(2, &[0, 1]).unwrap();
        let one = MultiPoly::one(&v);
        assert!(PiecewiseField::from_masks(l, v.clone(), vec![vec![one.clone(), one]]).is_err());
    }

    #[test]
    fn callable_matches_polynomial() {
        let f = escaping();
        let c = CallableField::from_piecewise(&f);
        assert_eq!(c.eval_piecewise(&[-0.25, 2.0]).unwrap(), f.eval_piecewise(&[-0.25, 2.0]).unwrap());
    }
}
