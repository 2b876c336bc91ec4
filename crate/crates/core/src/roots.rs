//! Scan-and-bisect root location for scalar functions on a positive interval.

/// Every sign change of `f` on `(0, r_max]`, sampled on the grid `step, 2*step, ...`
/// and refined by bisection until the bracket is narrower than `tol`.
///
/// Grid points where `f` is exactly zero are reported as roots. Non-finite samples
/// break a bracket instead of producing a spurious root.
pub fn positive_roots<F: Fn(f64) -> f64>(f: F, r_max: f64, step: f64, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let n = (r_max / step).floor() as usize;
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=n {
        let x = i as f64 * step;
        let fx = f(x);
        if !fx.is_finite() {
            prev = None;
            continue;
        }
        if fx == 0.0 {
            roots.push(x);
            prev = None;
            continue;
        }
        if let Some((xp, fp)) = prev {
            if fp.signum() != fx.signum() {
                roots.push(bisect(&f, xp, x, fp, tol));
            }
        }
        prev = Some((x, fx));
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, flo: f64, tol: f64) -> f64 {
    let slo = flo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest positive root, if any.
pub fn smallest_positive_root<F: Fn(f64) -> f64>(f: F, r_max: f64, step: f64, tol: f64) -> Option<f64> {
    positive_roots(f, r_max, step, tol).into_iter().next()
}

/// Largest positive root, if any.
pub fn largest_positive_root<F: Fn(f64) -> f64>(f: F, r_max: f64, step: f64, tol: f64) -> Option<f64> {
    positive_roots(f, r_max, step, tol).into_iter().last()
}
