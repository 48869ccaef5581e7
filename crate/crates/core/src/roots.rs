//! Bracketing root finders shared by the dispersion and loading solvers.

/// Bisects `f` on `[lo, hi]` until the bracket stops shrinking in floating
/// point or its width drops below `x_tol`.
///
/// The caller guarantees a sign change; an exact zero at either end is
/// returned immediately.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= x_tol {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Returns every bracket `[x_i, x_{i+1}]` of consecutive samples where `f`
/// changes sign. Non-finite samples break the scan and never bracket.
pub fn sign_change_brackets<F>(f: F, xs: &[f64]) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in xs {
        let y = f(x);
        if !y.is_finite() {
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if (py < 0.0) != (y < 0.0) || py == 0.0 {
                out.push((px, x));
            }
        }
        prev = Some((x, y));
    }
    out
}

/// Log-spaced samples from `lo` to `hi` with `per_decade` points per decade.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let step = decades / n as f64;
    (0..=n).map(|i| lo * 10f64.powf(step * i as f64)).collect()
}
