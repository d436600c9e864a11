//! Gauss–Legendre rules and adaptive bisection on top of them.

use std::sync::OnceLock;

use crate::error::ConvError;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// n-point rule on [−1, 1], nodes by Newton iteration on Pₙ.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                if n == 1 {
                    p0 = 1.0;
                    p1 = x;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
    }

    /// Vector-valued version; `out` is overwritten.
    pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(&self, mut f: F, a: f64, b: f64, out: &mut [f64]) {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut buf = vec![0.0; out.len()];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            f(m + h * x, &mut buf);
            for (o, v) in out.iter_mut().zip(&buf) {
                *o += w * h * v;
            }
        }
    }
}

/// Shared 10- and 20-point rules.
pub fn gl10() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(10))
}

pub fn gl20() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(20))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig { abs_tol: 1e-10, max_depth: 40 }
    }
}

/// Adaptive bisection with the 10-point rule: a panel is accepted once the
/// whole-panel and two-half estimates agree to the panel's share of the tolerance.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: AdaptiveConfig) -> Result<f64, ConvError> {
    if a == b {
        return Ok(0.0);
    }
    let rule = gl10();
    let whole = rule.integrate(&mut f, a, b);
    recurse(&mut f, rule, a, b, whole, cfg.abs_tol, 0, cfg.max_depth)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64, ConvError> {
    let m = 0.5 * (a + b);
    let l = rule.integrate(&mut *f, a, m);
    let r = rule.integrate(&mut *f, m, b);
    let halves = l + r;
    let floor = 8.0 * f64::EPSILON * halves.abs();
    if (halves - whole).abs() <= tol.max(floor) {
        return Ok(halves);
    }
    if depth >= max_depth {
        return Err(ConvError::QuadratureFailure { a, b, error: (halves - whole).abs() });
    }
    Ok(recurse(f, rule, a, m, l, 0.5 * tol, depth + 1, max_depth)?
        + recurse(f, rule, m, b, r, 0.5 * tol, depth + 1, max_depth)?)
}

/// Vector-valued adaptive quadrature; the error test uses the max-norm.
pub fn adaptive_vec<F: FnMut(f64, &mut [f64]) -> Result<(), ConvError>>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    cfg: AdaptiveConfig,
) -> Result<Vec<f64>, ConvError> {
    let mut out = vec![0.0; dim];
    if a == b {
        return Ok(out);
    }
    let whole = panel_vec(&mut f, a, b, dim)?;
    recurse_vec(&mut f, a, b, &whole, cfg.abs_tol, 0, cfg.max_depth, &mut out)?;
    Ok(out)
}

fn panel_vec<F: FnMut(f64, &mut [f64]) -> Result<(), ConvError>>(
    f: &mut F,
    a: f64,
    b: f64,
    dim: usize,
) -> Result<Vec<f64>, ConvError> {
    let rule = gl10();
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let mut acc = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        f(m + h * x, &mut buf)?;
        for (o, v) in acc.iter_mut().zip(&buf) {
            *o += w * h * v;
        }
    }
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn recurse_vec<F: FnMut(f64, &mut [f64]) -> Result<(), ConvError>>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: &[f64],
    tol: f64,
    depth: u32,
    max_depth: u32,
    out: &mut [f64],
) -> Result<(), ConvError> {
    let m = 0.5 * (a + b);
    let l = panel_vec(f, a, m, whole.len())?;
    let r = panel_vec(f, m, b, whole.len())?;
    let mut err: f64 = 0.0;
    let mut size: f64 = 0.0;
    for i in 0..whole.len() {
        err = err.max((l[i] + r[i] - whole[i]).abs());
        size = size.max((l[i] + r[i]).abs());
    }
    if err <= tol.max(8.0 * f64::EPSILON * size) {
        for i in 0..out.len() {
            out[i] += l[i] + r[i];
        }
        return Ok(());
    }
    if depth >= max_depth {
        return Err(ConvError::QuadratureFailure { a, b, error: err });
    }
    recurse_vec(f, a, m, &l, 0.5 * tol, depth + 1, max_depth, out)?;
    recurse_vec(f, m, b, &r, 0.5 * tol, depth + 1, max_depth, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for n in [1, 2, 5, 10, 20] {
            let r = GaussLegendre::new(n);
            let w: f64 = r.weights().iter().sum();
            assert!((w - 2.0).abs() < 1e-14, "n={n}");
            let deg = 2 * n - 1;
            let v = r.integrate(|x| x.powi(deg as i32 - 1), 0.0, 1.0);
            assert!((v - 1.0 / deg as f64).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_a_kink() {
        let v = adaptive(|x: f64| x.abs(), -1.0, 2.0, AdaptiveConfig::default()).unwrap();
        assert!((v - 2.5).abs() < 1e-10);
    }

    #[test]
    fn adaptive_reports_failure() {
        let cfg = AdaptiveConfig { abs_tol: 1e-14, max_depth: 2 };
        assert!(adaptive(|x: f64| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, cfg).is_err());
    }

    #[test]
    fn vector_version_matches_scalar() {
        let v = adaptive_vec(
            |x, out| {
                out[0] = x.exp();
                out[1] = (3.0 * x).sin();
                Ok(())
            },
            0.0,
            2.0,
            2,
            AdaptiveConfig::default(),
        )
        .unwrap();
        assert!((v[0] - (2f64.exp() - 1.0)).abs() < 1e-12);
        assert!((v[1] - (1.0 - 6f64.cos()) / 3.0).abs() < 1e-12);
    }
}
