//! The Darboux-type first integral on the symmetric stratum C = 1, B = D of the planar cross.

use crate::ode::Trajectory;

/// H = (xy + ½(y − x) − B − ¼)·e^{y−x}.
pub fn darboux_h(b: f64, x: f64, y: f64) -> f64 {
    (x * y + 0.5 * (y - x) - b - 0.25) * (y - x).exp()
}

/// max_t |H(x(t)) − H(x(0))| / max(|H(x(0))|, 1e−12).
pub fn first_integral_drift(traj: &Trajectory, b: f64) -> f64 {
    let Some(x0) = traj.x.first() else {
        return 0.0;
    };
    let h0 = darboux_h(b, x0[0], x0[1]);
    let scale = h0.abs().max(1e-12);
    traj.x.iter().map(|p| (darboux_h(b, p[0], p[1]) - h0).abs() / scale).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        assert!((darboux_h(0.1, 0.0, 0.0) + 0.35).abs() < 1e-15);
    }
}
