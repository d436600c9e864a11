//! Monomial blow-up charts on (x, ε) space.
//!
//! A chart with phase dimension n has n+1 old variables (x₁..xₙ, ε) and n+1
//! new variables (z₁..zₙ, ρ). Each old variable is a signed monomial in the
//! new ones: old_j = σ_j · Π_k w_k^{A_jk}.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::BlowupError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChartMap {
    n: usize,
    exps: Vec<Vec<u32>>,
    signs: Vec<i8>,
    nonneg: Vec<bool>,
    divisor: Vec<u32>,
    id: String,
}

fn set_label(axes: &[usize]) -> String {
    let s: Vec<String> = axes.iter().map(|a| (a + 1).to_string()).collect();
    format!("{{{}}}", s.join(","))
}

fn check_axes(n: usize, axes: &[usize]) -> Result<(), BlowupError> {
    for (k, &a) in axes.iter().enumerate() {
        if a >= n {
            return Err(BlowupError::BadAxis(a));
        }
        if axes[..k].contains(&a) {
            return Err(BlowupError::DuplicateAxis(a));
        }
    }
    Ok(())
}

impl ChartMap {
    pub fn identity(n: usize) -> Self {
        let exps = (0..=n).map(|j| (0..=n).map(|k| (j == k) as u32).collect()).collect();
        ChartMap { n, exps, signs: vec![1; n + 1], nonneg: vec![false; n + 1], divisor: vec![0; n + 1], id: "id".into() }
    }

    /// Directional chart of the blow-up of {x_I = 0, ε = 0} in the x_{i1} direction:
    /// x_{i1} = ±z_{i1}, x_i = z_{i1} z_i (i ∈ I∖{i1}), ε = z_{i1} ρ.
    pub fn phase(n: usize, axes: &[usize], i1: usize, sign: i8) -> Result<Self, BlowupError> {
        check_axes(n, axes)?;
        if !axes.contains(&i1) {
            return Err(BlowupError::BadAxis(i1));
        }
        if sign != 1 && sign != -1 {
            return Err(BlowupError::Invalid(format!("sign must be ±1, got {sign}")));
        }
        let mut c = Self::identity(n);
        for &i in axes {
            if i != i1 {
                c.exps[i][i1] = 1;
            }
        }
        c.exps[n][i1] = 1;
        c.signs[i1] = sign;
        c.nonneg[i1] = true;
        c.nonneg[n] = true;
        c.divisor[i1] = 1;
        let mut sorted = axes.to_vec();
        sorted.sort_unstable();
        c.id = format!("phase(I={}, i1={}, {})", set_label(&sorted), i1 + 1, if sign > 0 { '+' } else { '-' });
        Ok(c)
    }

    /// Chart where ε is the radial variable: x_i = ρ z_i (i ∈ I), ε = ρ.
    pub fn family(n: usize, axes: &[usize]) -> Result<Self, BlowupError> {
        check_axes(n, axes)?;
        let mut c = Self::identity(n);
        for &i in axes {
            c.exps[i][n] = 1;
        }
        c.nonneg[n] = true;
        c.divisor[n] = 1;
        let mut sorted = axes.to_vec();
        sorted.sort_unstable();
        c.id = format!("family(I={})", set_label(&sorted));
        Ok(c)
    }

    /// Successive phase charts along `chain`, each over the axes not yet used.
    pub fn composed(n: usize, axes: &[usize], chain: &[usize]) -> Result<Self, BlowupError> {
        let signed: Vec<(usize, i8)> = chain.iter().map(|&i| (i, 1)).collect();
        Self::composed_signed(n, axes, &signed)
    }

    pub fn composed_signed(n: usize, axes: &[usize], chain: &[(usize, i8)]) -> Result<Self, BlowupError> {
        check_axes(n, axes)?;
        let ids: Vec<usize> = chain.iter().map(|c| c.0).collect();
        check_axes(n, &ids)?;
        let mut out = Self::identity(n);
        let mut rest = axes.to_vec();
        for &(i, s) in chain {
            let p = Self::phase(n, &rest, i, s)?;
            out = out.compose(&p);
            rest.retain(|&a| a != i);
        }
        Ok(out)
    }

    /// `self ∘ other`: the new variables of `self` are the old variables of `other`.
    pub fn compose(&self, other: &ChartMap) -> ChartMap {
        assert_eq!(self.n, other.n, "charts of different dimension");
        if self.id == "id" {
            return other.clone();
        }
        if other.id == "id" {
            return self.clone();
        }
        let m = self.n + 1;
        let mut exps = vec![vec![0u32; m]; m];
        let mut signs = vec![1i8; m];
        for j in 0..m {
            for l in 0..m {
                exps[j][l] = (0..m).map(|k| self.exps[j][k] * other.exps[k][l]).sum();
            }
            let mut s = self.signs[j];
            for k in 0..m {
                if other.signs[k] < 0 && self.exps[j][k] % 2 == 1 {
                    s = -s;
                }
            }
            signs[j] = s;
        }
        let mut divisor = other.divisor.clone();
        for l in 0..m {
            divisor[l] += (0..m).map(|k| self.divisor[k] * other.exps[k][l]).sum::<u32>();
        }
        let nonneg = (0..m)
            .map(|k| {
                let ident_row = other.signs[k] > 0 && (0..m).all(|l| other.exps[k][l] == (k == l) as u32);
                other.nonneg[k] || (self.nonneg[k] && ident_row)
            })
            .collect();
        ChartMap { n: self.n, exps, signs, nonneg, divisor, id: format!("{} ∘ {}", self.id, other.id) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exps
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn nonneg(&self) -> &[bool] {
        &self.nonneg
    }

    pub fn divisor(&self) -> &[u32] {
        &self.divisor
    }

    /// Names of the new variables: z1..zn, rho.
    pub fn new_var_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.n).map(|i| format!("z{i}")).collect();
        v.push("rho".into());
        v
    }

    /// Old variables (x, ε) at the chart point w.
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        self.exps.iter().zip(&self.signs).map(|(row, &s)| s as f64 * monomial(w, row)).collect()
    }

    pub fn divisor_value(&self, w: &[f64]) -> f64 {
        monomial(w, &self.divisor)
    }

    /// ∂old_j/∂w_k.
    pub fn jacobian(&self, w: &[f64]) -> Vec<Vec<f64>> {
        let m = self.n + 1;
        let mut jac = vec![vec![0.0; m]; m];
        for j in 0..m {
            for k in 0..m {
                let a = self.exps[j][k];
                if a == 0 {
                    continue;
                }
                let mut e = self.exps[j].clone();
                e[k] -= 1;
                jac[j][k] = self.signs[j] as f64 * a as f64 * monomial(w, &e);
            }
        }
        jac
    }

    /// Exact inverse of the exponent matrix.
    pub fn inverse_exponents(&self) -> Result<Vec<Vec<Ratio<i64>>>, BlowupError> {
        let m = self.n + 1;
        let zero = Ratio::from_integer(0);
        let one = Ratio::from_integer(1);
        let mut a: Vec<Vec<Ratio<i64>>> = self
            .exps
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let mut r: Vec<Ratio<i64>> = row.iter().map(|&v| Ratio::from_integer(v as i64)).collect();
                r.extend((0..m).map(|k| if k == j { one } else { zero }));
                r
            })
            .collect();
        for col in 0..m {
            let piv = (col..m).find(|&r| a[r][col] != zero).ok_or_else(|| {
                BlowupError::Invalid(format!("exponent matrix of {} is singular", self.id))
            })?;
            a.swap(col, piv);
            let p = a[col][col];
            for v in a[col].iter_mut() {
                *v /= p;
            }
            for r in 0..m {
                if r != col && a[r][col] != zero {
                    let f = a[r][col];
                    for c in 0..2 * m {
                        let t = a[col][c] * f;
                        a[r][c] -= t;
                    }
                }
            }
        }
        Ok(a.into_iter().map(|r| r[m..].to_vec()).collect())
    }

    /// Preimage of an old point with ε > 0 and nonzero coordinates, if it lies in the chart.
    pub fn inverse(&self, old: &[f64]) -> Result<Option<Vec<f64>>, BlowupError> {
        let inv = self.inverse_exponents()?;
        let m = self.n + 1;
        if old.iter().any(|v| *v == 0.0) {
            return Ok(None);
        }
        let logs: Vec<f64> = old.iter().map(|v| v.abs().ln()).collect();
        let mag: Vec<f64> = (0..m)
            .map(|k| (0..m).map(|j| rational_f64(inv[k][j]) * logs[j]).sum::<f64>().exp())
            .collect();
        let free: Vec<usize> = (0..m).filter(|&k| !self.nonneg[k]).collect();
        for bits in 0..(1usize << free.len()) {
            let mut w = mag.clone();
            for (b, &k) in free.iter().enumerate() {
                if (bits >> b) & 1 == 1 {
                    w[k] = -w[k];
                }
            }
            let back = self.apply(&w);
            if back.iter().zip(old).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs())) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    /// Human-readable substitution, e.g. "x1 = z1, eps = z1*rho".
    pub fn describe(&self) -> String {
        let names = self.new_var_names();
        let mut parts = Vec::new();
        for j in 0..=self.n {
            let lhs = if j == self.n { "eps".to_string() } else { format!("x{}", j + 1) };
            let mut factors = Vec::new();
            for (k, &a) in self.exps[j].iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(names[k].clone()),
                    _ => factors.push(format!("{}^{a}", names[k])),
                }
            }
            let body = if factors.is_empty() { "1".to_string() } else { factors.join("*") };
            let sign = if self.signs[j] < 0 { "-" } else { "" };
            parts.push(format!("{lhs} = {sign}{body}"));
        }
        parts.join(", ")
    }
}

impl fmt::Display for ChartMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.describe())
    }
}

pub(crate) fn rational_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) fn monomial(w: &[f64], e: &[u32]) -> f64 {
    let mut p = 1.0;
    for (x, &k) in w.iter().zip(e) {
        match k {
            0 => {}
            1 => p *= x,
            _ => p *= x.powi(k as i32),
        }
    }
    p
}

pub(crate) fn monomial_i(w: &[f64], e: &[i64]) -> f64 {
    let mut p = 1.0;
    for (x, &k) in w.iter().zip(e) {
        if k != 0 {
            p *= x.powi(k as i32);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_chart_examples() {
        let c = ChartMap::phase(1, &[0], 0, 1).unwrap();
        assert_eq!(c.describe(), "x1 = z1, eps = z1*rho");
        assert_eq!(c.divisor(), &[1, 0]);
        let c = ChartMap::phase(2, &[0, 1], 0, 1).unwrap();
        assert_eq!(c.describe(), "x1 = z1, x2 = z1*z2, eps = z1*rho");
        assert_eq!(c.id(), "phase(I={1,2}, i1=1, +)");
        assert_eq!(c.compose(&ChartMap::identity(2)), c);
        assert!(matches!(ChartMap::phase(2, &[0], 1, 1), Err(BlowupError::BadAxis(1))));
    }

    #[test]
    fn family_chart_examples() {
        assert_eq!(ChartMap::family(1, &[0]).unwrap().describe(), "x1 = z1*rho, eps = rho");
        assert_eq!(ChartMap::family(2, &[0, 1]).unwrap().describe(), "x1 = z1*rho, x2 = z2*rho, eps = rho");
        assert_eq!(ChartMap::family(2, &[]).unwrap().describe(), "x1 = z1, x2 = z2, eps = rho");
    }

    #[test]
    fn composed_chart_examples() {
        let c = ChartMap::composed(3, &[0, 1, 2], &[0, 1]).unwrap();
        assert_eq!(c.describe(), "x1 = z1, x2 = z1*z2, x3 = z1*z2*z3, eps = z1*z2*rho");
        assert_eq!(c.divisor(), &[1, 1, 0, 0]);
        assert_eq!(ChartMap::composed(2, &[0, 1], &[]).unwrap(), ChartMap::identity(2));
        assert!(matches!(ChartMap::composed(2, &[0, 1], &[0, 0]), Err(BlowupError::DuplicateAxis(0))));
    }

    #[test]
    fn negative_signs_compose() {
        let a = ChartMap::phase(2, &[0, 1], 0, -1).unwrap();
        let b = ChartMap::phase(2, &[1], 1, -1).unwrap();
        let c = a.compose(&b);
        let w = [0.3, 0.7, 0.2];
        let direct = a.apply(&b.apply(&w));
        for (u, v) in c.apply(&w).iter().zip(&direct) {
            assert!((u - v).abs() < 1e-15);
        }
        assert_eq!(c.signs(), &[-1, -1, 1]);
    }

    #[test]
    fn inverse_round_trip() {
        let c = ChartMap::composed_signed(3, &[0, 1, 2], &[(1, -1), (2, 1)]).unwrap();
        let w = [0.4, 0.3, 0.6, 0.5];
        let old = c.apply(&w);
        let back = c.inverse(&old).unwrap().unwrap();
        for k in 0..4 {
            assert!((back[k] - w[k]).abs() < 1e-12);
        }
        let inv = c.inverse_exponents().unwrap();
        for r in &inv {
            assert!(r.iter().all(|v| v.is_integer()));
        }
    }
}
