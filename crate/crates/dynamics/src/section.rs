//! Affine transverse sections {ℓ·x = c} with an orthonormal parametrization.

use serde::{Deserialize, Serialize};

use crate::error::DynError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// ℓ·x − c goes from negative to positive.
    Positive,
    Negative,
    Both,
}

impl Orientation {
    pub fn accepts(self, before: f64, after: f64) -> bool {
        let up = before < 0.0 && after >= 0.0;
        let down = before > 0.0 && after <= 0.0;
        match self {
            Orientation::Positive => up,
            Orientation::Negative => down,
            Orientation::Both => up || down,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    normal: Vec<f64>,
    level: f64,
    orientation: Orientation,
    origin: Vec<f64>,
    /// Orthonormal basis of ker ℓ; column k is the direction of parameter k.
    basis: Vec<Vec<f64>>,
}

impl Section {
    pub fn new(normal: Vec<f64>, level: f64, orientation: Orientation) -> Result<Self, DynError> {
        let n = normal.len();
        let nn: f64 = normal.iter().map(|v| v * v).sum();
        if n == 0 || nn == 0.0 || !nn.is_finite() {
            return Err(DynError::Invalid("section normal must be nonzero".into()));
        }
        let origin: Vec<f64> = normal.iter().map(|v| v * level / nn).collect();
        let unit: Vec<f64> = normal.iter().map(|v| v / nn.sqrt()).collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
        for k in 0..n {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            for b in std::iter::once(&unit).chain(basis.iter()) {
                let d: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
                v.iter_mut().zip(b).for_each(|(a, c)| *a -= d * c);
            }
            let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if len > 1e-8 {
                v.iter_mut().for_each(|a| *a /= len);
                basis.push(v);
            }
            if basis.len() == n - 1 {
                break;
            }
        }
        Ok(Section { normal, level, orientation, origin, basis })
    }

    /// {x_axis = level}, parametrized by the remaining coordinates in order.
    pub fn coordinate(n: usize, axis: usize, level: f64, orientation: Orientation) -> Result<Self, DynError> {
        if axis >= n {
            return Err(DynError::Invalid(format!("axis {axis} out of range for n = {n}")));
        }
        let mut normal = vec![0.0; n];
        normal[axis] = 1.0;
        let mut origin = vec![0.0; n];
        origin[axis] = level;
        let basis = (0..n)
            .filter(|&k| k != axis)
            .map(|k| {
                let mut v = vec![0.0; n];
                v[k] = 1.0;
                v
            })
            .collect();
        Ok(Section { normal, level, orientation, origin, basis })
    }

    pub fn n(&self) -> usize {
        self.normal.len()
    }

    /// Number of parameters.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Section { orientation, ..self.clone() }
    }

    /// ℓ·x − c.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.level
    }

    pub fn point(&self, s: &[f64]) -> Vec<f64> {
        let mut x = self.origin.clone();
        for (b, sk) in self.basis.iter().zip(s) {
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += sk * bi);
        }
        x
    }

    pub fn param(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.iter().zip(x).zip(&self.origin).map(|((bi, xi), oi)| bi * (xi - oi)).sum())
            .collect()
    }

    /// |ℓ̂·v| / |v|, the sine of the angle between v and the section.
    pub fn transversality(&self, v: &[f64]) -> f64 {
        let nl = self.normal.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv == 0.0 {
            return 0.0;
        }
        (self.normal.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / (nl * nv)).abs()
    }

    /// Normal component ℓ·v.
    pub fn flux(&self, v: &[f64]) -> f64 {
        self.normal.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}
