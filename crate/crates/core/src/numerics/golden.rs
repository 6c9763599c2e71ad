use crate::error::{Error, Result};

/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenMax {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Upper bound on the iterations `golden_section_max` needs for a bracket and tolerance.
pub fn golden_iteration_bound(lo: f64, hi: f64, tol: f64) -> usize {
    let n = (((hi - lo) / tol).ln() / (1.0 / 0.618f64).ln()).ceil();
    n.max(0.0) as usize + 2
}

/// Golden-section search for the maximiser of `f` on `[lo, hi]`.
///
/// Fails with [`Error::NoInteriorMaximum`] if the bracket collapses onto either
/// end of the search range.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<GoldenMax>
where
    F: FnMut(f64) -> f64,
{
    if !(hi > lo) || !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "golden-section search needs lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    let mut moved_lo = false;
    let mut moved_hi = false;
    while b - a > tol {
        iterations += 1;
        if fc >= fd {
            b = d;
            moved_hi = true;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            moved_lo = true;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if !moved_lo || !moved_hi {
        return Err(Error::NoInteriorMaximum { lo, hi });
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok(GoldenMax { x, value, iterations })
}
