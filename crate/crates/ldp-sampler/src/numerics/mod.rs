//! Shared numerical kernels: bisection, bracketed scalar minimization, and
//! deterministic RNG streams.

pub mod rng;
pub mod special;

pub use rng::KeyedRng;

use crate::error::{Error, Result};

/// A sign-change bracket for root finding.
#[derive(Clone, Copy, Debug)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Evaluate `f` at the endpoints and require a sign change (an endpoint
    /// within `tol` of zero also counts).
    pub fn new(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Domain(format!("bracket needs lo < hi, got [{lo}, {hi}]")));
        }
        let f_lo = f(lo);
        let f_hi = f(hi);
        if f_lo * f_hi > 0.0 && f_lo.abs() > tol && f_hi.abs() > tol {
            return Err(Error::Bracket { lo, hi, f_lo, f_hi });
        }
        Ok(Bracket { lo, hi, f_lo, f_hi })
    }
}

/// Bisection on a bracketed monotone function.
///
/// Stops when |f(x)| <= tol or the interval width drops below
/// tol * max(1, |x|); at most 200 halvings.
pub fn bisect(f: impl Fn(f64) -> f64, bracket: &Bracket, tol: f64) -> f64 {
    if bracket.f_lo.abs() <= tol {
        return bracket.lo;
    }
    if bracket.f_hi.abs() <= tol {
        return bracket.hi;
    }
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut f_lo = bracket.f_lo;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() <= tol || (hi - lo) <= tol * mid.abs().max(1.0) {
            return mid;
        }
        if f_mid * f_lo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    mid
}

/// Golden-section search on [lo, hi] for a unimodal objective.
fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo) > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimize a continuous scalar function on [lo, hi]: coarse grid scan, then
/// golden-section refinement around the best cell. Returns (argmin, min).
///
/// The result is never worse than the best value seen on the scan grid.
pub fn minimize_scalar(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "minimize_scalar needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    if grid < 64 {
        return Err(Error::Domain(format!("minimize_scalar needs grid >= 64, got {grid}")));
    }
    let step = (hi - lo) / grid as f64;
    let mut best_i = 0usize;
    let mut best_x = lo;
    let mut best_f = f(lo);
    for i in 1..=grid {
        let x = if i == grid { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if fx < best_f {
            best_f = fx;
            best_x = x;
            best_i = i;
        }
    }
    let left = if best_i == 0 { lo } else { lo + step * (best_i - 1) as f64 };
    let right = if best_i >= grid { hi } else { lo + step * (best_i + 1) as f64 };
    let (gx, gf) = golden_section(&f, left, right, tol);
    if gf < best_f {
        Ok((gx, gf))
    } else {
        Ok((best_x, best_f))
    }
}

/// `n` equally spaced points covering [lo, hi] inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}
