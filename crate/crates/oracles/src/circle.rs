//! Algebraic least-squares circle through points in the plane.

/// Centre and radius minimising `sum (x^2 + y^2 + D x + E y + F)^2`.
pub fn fit_circle(points: &[(f64, f64)]) -> ((f64, f64), f64) {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    // centred coordinates keep the normal equations well conditioned
    let (mut suu, mut svv, mut suv, mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (u, v) = (x - mx, y - my);
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let b1 = 0.5 * (suuu + suvv);
    let b2 = 0.5 * (svvv + svuu);
    let det = suu * svv - suv * suv;
    let uc = (b1 * svv - b2 * suv) / det;
    let vc = (suu * b2 - suv * b1) / det;
    let r = (uc * uc + vc * vc + (suu + svv) / n).sqrt();
    ((uc + mx, vc + my), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_circle() {
        let pts: Vec<_> = (0..40)
            .map(|i| {
                let t = 0.1 * i as f64;
                (2.0 + 0.7 * t.cos(), -1.0 + 0.7 * t.sin())
            })
            .collect();
        let ((cx, cy), r) = fit_circle(&pts);
        assert!((cx - 2.0).abs() < 1e-12 && (cy + 1.0).abs() < 1e-12 && (r - 0.7).abs() < 1e-12);
    }
}
