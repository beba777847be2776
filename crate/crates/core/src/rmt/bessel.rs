//! Bessel function of the first kind, order one, and the zeros of
//! `J₁(2t)/t` in `t`.

use std::f64::consts::PI;

/// Above this the ascending series loses too many digits to cancellation.
const SERIES_LIMIT: f64 = 12.0;
const SERIES_TERMS: usize = 30;

/// `J₁(x)`, accurate to about 1e-12 absolute for all finite `x`.
pub fn bessel_j1(x: f64) -> f64 {
    if x < 0.0 {
        return -bessel_j1(-x);
    }
    if x <= SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

// J₁(x) = Σ_m (-1)^m (x/2)^{2m+1} / (m! (m+1)!)
fn series(x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h;
    let mut sum = term;
    for m in 0..SERIES_TERMS - 1 {
        let m = m as f64;
        term *= -h2 / ((m + 1.0) * (m + 2.0));
        sum += term;
    }
    sum
}

// Hankel expansion, J₁(x) = √(2/πx) (P cos χ − Q sin χ), χ = x − 3π/4.
// Summation stops at the smallest term of the divergent series.
fn asymptotic(x: f64) -> f64 {
    let mu = 4.0;
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..60usize {
        let size = a.abs();
        if size > prev || size < 1e-17 {
            break;
        }
        // a_k carries (−1)^{⌊k/2⌋}: even k feed P, odd k feed Q.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        prev = size;
        let j = (2 * k + 1) as f64;
        a *= (mu - j * j) / ((k + 1) as f64) * inv8x;
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `J₁(2t)/t`, the large-N limit of the normalized first trace moment of a
/// GUE evolution. Equals one at `t = 0`.
pub fn bessel_ratio(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        return 1.0 - 0.5 * t * t;
    }
    bessel_j1(2.0 * t) / t
}

const SCAN_STEP: f64 = 0.1;
const BISECTION_TOL: f64 = 1e-13;

/// The first `count` positive times `t` with `J₁(2t) = 0`, ascending.
///
/// Roots are bracketed by sign changes on a grid of spacing 0.1 starting at
/// `t = 0.1` and refined by bisection.
pub fn bessel_zero_times(count: usize) -> Vec<f64> {
    let f = |t: f64| bessel_j1(2.0 * t);
    let mut roots = Vec::with_capacity(count);
    let mut step = 1usize;
    let mut lo = SCAN_STEP;
    let mut f_lo = f(lo);
    while roots.len() < count {
        step += 1;
        let hi = SCAN_STEP * step as f64;
        let f_hi = f(hi);
        if f_hi == 0.0 {
            roots.push(hi);
        } else if f_lo.signum() != f_hi.signum() && f_lo != 0.0 {
            roots.push(bisect(f, lo, hi, f_lo));
        }
        lo = hi;
        f_lo = f_hi;
    }
    roots
}

/// The first `count` times of local maxima of `|J₁(2t)/t|` for `t > 0`; the
/// `m`-th lies between the `m`-th and `(m+1)`-th zero time.
pub fn bessel_extremum_times(count: usize) -> Vec<f64> {
    let roots = bessel_zero_times(count + 1);
    roots
        .windows(2)
        .map(|w| golden_max(|t| bessel_ratio(t).abs(), w[0], w[1]))
        .collect()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
