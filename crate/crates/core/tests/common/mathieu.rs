//! Independent Floquet oracle for the Mathieu equation
//! `u'' + (a - 2 q cos 2t) u = 0`: fixed-step real RK4 over one period.

use std::f64::consts::PI;

pub const STEPS: usize = 4000;

/// Trace of the one-period monodromy matrix.
pub fn trace(a: f64, q: f64) -> f64 {
    let h = PI / STEPS as f64;
    let f = |t: f64, y: [f64; 4]| -> [f64; 4] {
        let w = a - 2.0 * q * (2.0 * t).cos();
        // columns (u, u') of the fundamental matrix
        [y[1], -w * y[0], y[3], -w * y[2]]
    };
    let mut y = [1.0, 0.0, 0.0, 1.0];
    for i in 0..STEPS {
        let t = i as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, std::array::from_fn(|j| y[j] + h / 2.0 * k1[j]));
        let k3 = f(t + h / 2.0, std::array::from_fn(|j| y[j] + h / 2.0 * k2[j]));
        let k4 = f(t + h, std::array::from_fn(|j| y[j] + h * k3[j]));
        for j in 0..4 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    y[0] + y[3]
}

pub fn stable(a: f64, q: f64) -> bool {
    trace(a, q).abs() < 2.0
}

/// Edge of the first stability region along `a = 0`, by bisection.
pub fn q_boundary_at_zero_a(tol: f64) -> f64 {
    let (mut lo, mut hi) = (0.5, 1.0);
    assert!(stable(0.0, lo) && !stable(0.0, hi));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if stable(0.0, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
