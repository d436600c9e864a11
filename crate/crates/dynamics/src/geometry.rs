//! Polyline utilities for comparing orbits.

/// `count` points spaced evenly in arclength along the polyline.
pub fn resample(points: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    if points.len() < 2 || count < 2 {
        return points.iter().take(count.max(1)).cloned().collect();
    }
    let mut cum = vec![0.0];
    for w in points.windows(2) {
        cum.push(cum.last().unwrap() + dist(&w[0], &w[1]));
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let s = total * k as f64 / (count - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(points[seg].iter().zip(&points[seg + 1]).map(|(a, b)| a + t * (b - a)).collect());
    }
    out
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn segment_dist(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 > 0.0 {
        (p.iter().zip(a).zip(&ab).map(|((pi, ai), d)| (pi - ai) * d).sum::<f64>() / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.iter().zip(a).zip(&ab).map(|((pi, ai), d)| (pi - ai - t * d).powi(2)).sum::<f64>().sqrt()
}

/// Distance from p to the polyline through `line`.
pub fn polyline_dist(p: &[f64], line: &[Vec<f64>]) -> f64 {
    if line.len() == 1 {
        return dist(p, &line[0]);
    }
    line.windows(2).map(|w| segment_dist(p, &w[0], &w[1])).fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two polylines, each resampled to `samples` points.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>], samples: usize) -> f64 {
    let ra = resample(a, samples);
    let rb = resample(b, samples);
    let one = |p: &[Vec<f64>], q: &[Vec<f64>]| p.iter().map(|x| polyline_dist(x, q)).fold(0.0, f64::max);
    one(&ra, &rb).max(one(&rb, &ra))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resampling_is_uniform() {
        let line = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 3.0]];
        let r = resample(&line, 5);
        assert_eq!(r[1], vec![1.0, 0.0]);
        assert_eq!(r[4], vec![1.0, 3.0]);
        assert!((r[2][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_of_offset_square() {
        let sq = |d: f64| vec![vec![d, d], vec![1.0 - d, d], vec![1.0 - d, 1.0 - d], vec![d, 1.0 - d], vec![d, d]];
        assert!((hausdorff(&sq(0.0), &sq(0.1), 400) - 0.1 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(hausdorff(&sq(0.0), &sq(0.0), 100), 0.0);
    }
}
