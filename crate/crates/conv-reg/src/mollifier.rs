//! One-dimensional mollifier profiles and their cumulative moments.
//!
//! The n-dimensional mollifier is the tensor product of a single even profile
//! supported on [−1, 1]. Two profiles are provided: the box (uniform density
//! ½) and the plateau, which is constant on [−(1−η), 1−η] and rises through a
//! C^∞ transition on each band of width η.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::ConvError;
use crate::quad::{adaptive, adaptive_vec, gl20, AdaptiveConfig};

/// Highest per-axis monomial degree the moment evaluator supports.
pub const MAX_MOMENT: usize = 12;

const PANELS: usize = 32;
const NQ: usize = MAX_MOMENT + 2;

/// Scenario-file form of a mollifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MollifierSpec {
    Box,
    Plateau { eta: f64 },
}

impl Default for MollifierSpec {
    fn default() -> Self {
        MollifierSpec::Box
    }
}

/// Tabulated partial integrals Q_m(σ) = ∫₀^σ s^m β(s) ds of the bump
/// β(s) = exp(−1/(4s(1−s))) on [0, 1].
#[derive(Debug)]
struct BumpTable {
    prefix: Vec<[f64; NQ]>,
    z: f64,
}

fn bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (-1.0 / (4.0 * s * (1.0 - s))).exp()
    }
}

impl BumpTable {
    fn shared() -> Arc<BumpTable> {
        static T: OnceLock<Arc<BumpTable>> = OnceLock::new();
        T.get_or_init(|| Arc::new(BumpTable::build())).clone()
    }

    fn build() -> Self {
        let cfg = AdaptiveConfig { abs_tol: 1e-18, max_depth: 40 };
        let mut prefix = vec![[0.0; NQ]];
        let mut acc = [0.0; NQ];
        for p in 0..PANELS {
            let a = p as f64 / PANELS as f64;
            let b = (p + 1) as f64 / PANELS as f64;
            let v = adaptive_vec(
                |s, out| {
                    let w = bump(s);
                    let mut sp = 1.0;
                    for o in out.iter_mut() {
                        *o = sp * w;
                        sp *= s;
                    }
                    Ok(())
                },
                a,
                b,
                NQ,
                cfg,
            )
            .expect("bump moments converge");
            for m in 0..NQ {
                acc[m] += v[m];
            }
            prefix.push(acc);
        }
        let z = prefix[PANELS][0];
        BumpTable { prefix, z }
    }

    /// Q_0..Q_{count−1} at σ ∈ [0, 1].
    fn q(&self, sigma: f64, count: usize, out: &mut [f64; NQ]) {
        let sigma = sigma.clamp(0.0, 1.0);
        let p = ((sigma * PANELS as f64) as usize).min(PANELS);
        out[..count].copy_from_slice(&self.prefix[p][..count]);
        let a = p as f64 / PANELS as f64;
        if sigma > a {
            let rule = gl20();
            let h = 0.5 * (sigma - a);
            let mid = 0.5 * (sigma + a);
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                let s = mid + h * x;
                let mut v = w * h * bump(s);
                for o in out.iter_mut().take(count) {
                    *o += v;
                    v *= s;
                }
            }
        }
    }

    fn transition(&self, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            return 0.0;
        }
        if sigma >= 1.0 {
            return 1.0;
        }
        let mut q = [0.0; NQ];
        self.q(sigma, 1, &mut q);
        q[0] / self.z
    }

    /// B_k(σ) = ∫₀^σ s^k T(s) ds for k < count.
    fn b(&self, sigma: f64, count: usize, out: &mut [f64]) {
        let sigma = sigma.clamp(0.0, 1.0);
        let mut q = [0.0; NQ];
        self.q(sigma, count + 1, &mut q);
        let t = q[0] / self.z;
        let mut sp = sigma;
        for k in 0..count {
            let kk = (k + 1) as f64;
            out[k] = sp * t / kk - q[k + 1] / (kk * self.z);
            sp *= sigma;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mollifier {
    spec: MollifierSpec,
    eta: f64,
    height: f64,
    table: Option<Arc<BumpTable>>,
    left: [f64; MAX_MOMENT + 1],
    right: [f64; MAX_MOMENT + 1],
    total: [f64; MAX_MOMENT + 1],
}

fn binom_row(j: usize) -> [f64; MAX_MOMENT + 1] {
    let mut row = [0.0; MAX_MOMENT + 1];
    row[0] = 1.0;
    for k in 1..=j {
        row[k] = row[k - 1] * (j + 1 - k) as f64 / k as f64;
    }
    row
}

impl Mollifier {
    pub fn box_profile() -> Self {
        let mut total = [0.0; MAX_MOMENT + 1];
        for (j, t) in total.iter_mut().enumerate() {
            if j % 2 == 0 {
                *t = 1.0 / (j + 1) as f64;
            }
        }
        Mollifier {
            spec: MollifierSpec::Box,
            eta: 0.0,
            height: 0.5,
            table: None,
            left: [0.0; MAX_MOMENT + 1],
            right: total,
            total,
        }
    }

    pub fn plateau(eta: f64) -> Result<Self, ConvError> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(ConvError::InvalidMollifier(format!("plateau width η = {eta} must lie in (0, 1)")));
        }
        let table = BumpTable::shared();
        let mut b1 = [0.0; MAX_MOMENT + 1];
        table.b(1.0, MAX_MOMENT + 1, &mut b1);
        let height = 1.0 / (2.0 * (1.0 - eta) + 2.0 * eta * b1[0]);
        let mut m = Mollifier {
            spec: MollifierSpec::Plateau { eta },
            eta,
            height,
            table: Some(table),
            left: [0.0; MAX_MOMENT + 1],
            right: [0.0; MAX_MOMENT + 1],
            total: [0.0; MAX_MOMENT + 1],
        };
        let mut left = [0.0; MAX_MOMENT + 1];
        m.left_band(1.0, &mut left);
        let a = -1.0 + eta;
        let mut right = [0.0; MAX_MOMENT + 1];
        let mut total = [0.0; MAX_MOMENT + 1];
        let mut rb = [0.0; MAX_MOMENT + 1];
        m.right_band(1.0, &mut rb);
        for j in 0..=MAX_MOMENT {
            let jj = (j + 1) as i32;
            right[j] = left[j] + height * ((-a).powi(jj) - a.powi(jj)) / jj as f64;
            total[j] = right[j] + rb[j];
        }
        m.left = left;
        m.right = right;
        m.total = total;
        Ok(m)
    }

    pub fn from_spec(spec: &MollifierSpec) -> Result<Self, ConvError> {
        match spec {
            MollifierSpec::Box => Ok(Self::box_profile()),
            MollifierSpec::Plateau { eta } => Self::plateau(*eta),
        }
    }

    pub fn spec(&self) -> &MollifierSpec {
        &self.spec
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn is_box(&self) -> bool {
        self.table.is_none()
    }

    /// Value of the profile on the plateau.
    pub fn height(&self) -> f64 {
        self.height
    }

    /// Interior points where the profile stops being analytic.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.is_box() {
            Vec::new()
        } else {
            vec![-(1.0 - self.eta), 1.0 - self.eta]
        }
    }

    /// The C^∞ band transition T: [0,1] → [0,1].
    pub fn transition(&self, s: f64) -> f64 {
        match &self.table {
            None => 1.0,
            Some(t) => t.transition(s),
        }
    }

    pub fn profile(&self, t: f64) -> f64 {
        let a = t.abs();
        if a > 1.0 {
            return 0.0;
        }
        match &self.table {
            None => 0.5,
            Some(tab) => {
                if a <= 1.0 - self.eta {
                    self.height
                } else {
                    self.height * tab.transition((1.0 - a) / self.eta)
                }
            }
        }
    }

    // ∫_{−1}^{y} t^j m(t) dt on the left band, σ = (1+y)/η.
    fn left_band(&self, sigma: f64, out: &mut [f64]) {
        let tab = self.table.as_ref().expect("plateau");
        let n = out.len();
        let mut b = [0.0; MAX_MOMENT + 1];
        tab.b(sigma, n, &mut b);
        for (j, o) in out.iter_mut().enumerate() {
            let row = binom_row(j);
            let mut acc = 0.0;
            let mut ek = 1.0;
            for k in 0..=j {
                let sgn = if (j - k) % 2 == 0 { 1.0 } else { -1.0 };
                acc += row[k] * ek * sgn * b[k];
                ek *= self.eta;
            }
            *o = self.height * self.eta * acc;
        }
    }

    // ∫_{y}^{1} t^j m(t) dt on the right band, σ = (1−y)/η.
    fn right_band(&self, sigma: f64, out: &mut [f64]) {
        let tab = self.table.as_ref().expect("plateau");
        let n = out.len();
        let mut b = [0.0; MAX_MOMENT + 1];
        tab.b(sigma, n, &mut b);
        for (j, o) in out.iter_mut().enumerate() {
            let row = binom_row(j);
            let mut acc = 0.0;
            let mut ek = 1.0;
            for k in 0..=j {
                acc += row[k] * ek * b[k];
                ek *= -self.eta;
            }
            *o = self.height * self.eta * acc;
        }
    }

    /// Cumulative moments C_j(y) = ∫_{−1}^{y} t^j m(t) dt for j < out.len().
    pub fn cumulative_moments(&self, y: f64, out: &mut [f64]) {
        let n = out.len();
        assert!(n <= MAX_MOMENT + 1, "moment order {} exceeds {}", n - 1, MAX_MOMENT);
        if y <= -1.0 {
            out.iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        if y >= 1.0 {
            out.copy_from_slice(&self.total[..n]);
            return;
        }
        if self.is_box() {
            let mut yp = y;
            let mut ap = -1.0;
            for (j, o) in out.iter_mut().enumerate() {
                *o = 0.5 * (yp - ap) / (j + 1) as f64;
                yp *= y;
                ap *= -1.0;
            }
            return;
        }
        let e = self.eta;
        if y <= -1.0 + e {
            self.left_band((1.0 + y) / e, out);
        } else if y < 1.0 - e {
            let a = -1.0 + e;
            let mut yp = y;
            let mut ap = a;
            for (j, o) in out.iter_mut().enumerate() {
                *o = self.left[j] + self.height * (yp - ap) / (j + 1) as f64;
                yp *= y;
                ap *= a;
            }
        } else {
            self.right_band((1.0 - y) / e, out);
            for (j, o) in out.iter_mut().enumerate() {
                *o = self.total[j] - *o;
            }
        }
    }

    /// ∫_a^b t^j m(t) dt for j < out.len().
    pub fn interval_moments(&self, a: f64, b: f64, out: &mut [f64]) {
        let n = out.len();
        let mut lo = [0.0; MAX_MOMENT + 1];
        self.cumulative_moments(a, &mut lo[..n]);
        self.cumulative_moments(b, out);
        for j in 0..n {
            out[j] -= lo[j];
        }
    }

    /// ∫_{−1}^{1} t^j m(t) dt.
    pub fn full_moments(&self) -> &[f64] {
        &self.total
    }

    /// Mass below the level y: the weight M₊(y).
    pub fn mass_below(&self, y: f64) -> f64 {
        let mut c = [0.0];
        self.cumulative_moments(y, &mut c);
        c[0]
    }

    /// Total mass by adaptive quadrature of the profile itself.
    pub fn quadrature_mass(&self) -> Result<f64, ConvError> {
        let cfg = AdaptiveConfig { abs_tol: 1e-13, max_depth: 40 };
        let mut pts = vec![-1.0];
        pts.extend(self.breakpoints());
        pts.push(1.0);
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += adaptive(|t| self.profile(t), w[0], w[1], cfg)?;
        }
        Ok(total)
    }
}

/// (M₊(y), M₋(y), φ(y)) for the axis profile of `m`.
pub fn weight_functions(m: &Mollifier, y: f64) -> (f64, f64, f64) {
    let p = m.mass_below(y).clamp(0.0, 1.0);
    (p, 1.0 - p, 2.0 * p - 1.0)
}
