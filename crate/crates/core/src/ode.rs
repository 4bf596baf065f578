//! Explicit Runge-Kutta integration of `dy/dt = f(t, y)` for complex state
//! vectors: adaptive Dormand-Prince 5(4) and fixed-step classical RK4.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Adaptive Dormand-Prince 5(4) with local error control.
    DormandPrince { rel_tol: f64, abs_tol: f64 },
    /// Classical RK4 with step `max_step`.
    Rk4,
}

// Dormand-Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus embedded fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Reusable stepper. The step size carries over between successive calls to
/// [`Solver::advance`], so sampling a trajectory on a grid does not restart
/// the step-size controller at every sample.
#[derive(Debug, Clone)]
pub struct Solver {
    method: Method,
    max_step: f64,
    h: Option<f64>,
    k: [Vec<C64>; 7],
    y_stage: Vec<C64>,
    y_new: Vec<C64>,
    stats: SolverStats,
}

impl Solver {
    pub fn new(method: Method, max_step: f64) -> Self {
        Self {
            method,
            max_step,
            h: None,
            k: Default::default(),
            y_stage: Vec::new(),
            y_new: Vec::new(),
            stats: SolverStats::default(),
        }
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    fn ensure_len(&mut self, n: usize) {
        for buf in self.k.iter_mut().chain([&mut self.y_stage, &mut self.y_new]) {
            buf.resize(n, C64::new(0.0, 0.0));
        }
    }

    /// Integrates from `*t` to `t_end`, updating `t` and `y` in place.
    /// `accept` is called with every accepted state and may veto it.
    pub fn advance<F, A>(&mut self, f: &mut F, t: &mut f64, y: &mut [C64], t_end: f64, accept: &mut A) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
        A: FnMut(f64, &[C64]) -> Result<()>,
    {
        self.ensure_len(y.len());
        match self.method {
            Method::Rk4 => self.advance_rk4(f, t, y, t_end, accept),
            Method::DormandPrince { rel_tol, abs_tol } => self.advance_dp(f, t, y, t_end, rel_tol, abs_tol, accept),
        }
    }

    fn advance_rk4<F, A>(&mut self, f: &mut F, t: &mut f64, y: &mut [C64], t_end: f64, accept: &mut A) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
        A: FnMut(f64, &[C64]) -> Result<()>,
    {
        let n = y.len();
        while *t < t_end {
            let remaining = t_end - *t;
            let h = if remaining <= self.max_step * (1.0 + 1e-12) { remaining } else { self.max_step };
            let [k1, k2, k3, k4, ..] = &mut self.k;
            let ys = &mut self.y_stage;
            f(*t, y, k1)?;
            for i in 0..n {
                ys[i] = y[i] + 0.5 * h * k1[i];
            }
            f(*t + 0.5 * h, ys, k2)?;
            for i in 0..n {
                ys[i] = y[i] + 0.5 * h * k2[i];
            }
            f(*t + 0.5 * h, ys, k3)?;
            for i in 0..n {
                ys[i] = y[i] + h * k3[i];
            }
            f(*t + h, ys, k4)?;
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            self.stats.rhs_evals += 4;
            self.stats.accepted += 1;
            *t = if h == remaining { t_end } else { *t + h };
            accept(*t, y)?;
        }
        Ok(())
    }

    fn initial_step<F>(&mut self, f: &mut F, t: f64, y: &[C64], rel_tol: f64, abs_tol: f64) -> Result<f64>
    where
        F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
    {
        let n = y.len();
        let scale = |v: &C64| abs_tol + rel_tol * v.norm();
        let rms = |it: &mut dyn Iterator<Item = f64>| (it.map(|x| x * x).sum::<f64>() / n.max(1) as f64).sqrt();
        let [k1, k2, ..] = &mut self.k;
        f(t, y, k1)?;
        self.stats.rhs_evals += 1;
        let d0 = rms(&mut y.iter().map(|v| v.norm() / scale(v)));
        let d1 = rms(&mut y.iter().zip(k1.iter()).map(|(v, d)| d.norm() / scale(v)));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.max_step);
        for i in 0..n {
            self.y_stage[i] = y[i] + h0 * k1[i];
        }
        f(t + h0, &self.y_stage, k2)?;
        self.stats.rhs_evals += 1;
        let d2 = rms(&mut y.iter().zip(k1.iter().zip(k2.iter())).map(|(v, (a, b))| (b - a).norm() / scale(v))) / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
        Ok((100.0 * h0).min(h1).min(self.max_step))
    }

    #[allow(clippy::too_many_arguments)]
    fn advance_dp<F, A>(
        &mut self,
        f: &mut F,
        t: &mut f64,
        y: &mut [C64],
        t_end: f64,
        rel_tol: f64,
        abs_tol: f64,
        accept: &mut A,
    ) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
        A: FnMut(f64, &[C64]) -> Result<()>,
    {
        let n = y.len();
        if *t >= t_end {
            return Ok(());
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(f, *t, y, rel_tol, abs_tol)?,
        };
        // k[0] holds f(t, y) at the start of each step
        f(*t, y, &mut self.k[0])?;
        self.stats.rhs_evals += 1;
        let mut last_rhs_error: Option<Error> = None;

        while *t < t_end {
            let remaining = t_end - *t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            if !clamped && step < 1e-14 * t.abs().max(1.0) {
                return Err(last_rhs_error.unwrap_or(Error::StepUnderflow { t: *t, h: step }));
            }

            match self.try_dp_step(f, *t, y, step) {
                Ok(()) => {}
                Err(e @ (Error::Domain { .. } | Error::BoundaryBreach { .. })) => {
                    // a stage left the disk: shrink and retry
                    last_rhs_error = Some(e);
                    self.stats.rejected += 1;
                    h = step * 0.25;
                    continue;
                }
                Err(e) => return Err(e),
            }
            let err = {
                let [k1, _, k3, k4, k5, k6, k7] = &self.k;
                let sum: f64 = (0..n)
                    .map(|i| {
                        let e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                        let scale = abs_tol + rel_tol * y[i].norm().max(self.y_new[i].norm());
                        (e.norm() / scale).powi(2)
                    })
                    .sum();
                // error per unit step: the global error stays proportional to the tolerance
                (sum / n.max(1) as f64).sqrt() / step.min(1.0)
            };
            if !err.is_finite() {
                self.stats.rejected += 1;
                h = step * MIN_FACTOR;
                continue;
            }
            let factor = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
            if err <= 1.0 {
                let t_new = if clamped { t_end } else { *t + step };
                accept(t_new, &self.y_new)?;
                y.copy_from_slice(&self.y_new);
                *t = t_new;
                self.k.swap(0, 6);
                self.stats.accepted += 1;
                last_rhs_error = None;
                // a step shortened to hit t_end says nothing about the natural size
                if !clamped {
                    h = (step * factor).min(self.max_step);
                }
            } else {
                self.stats.rejected += 1;
                h = step * factor.min(1.0);
            }
        }
        self.h = Some(h);
        Ok(())
    }

    /// One Dormand-Prince trial step from `(t, y)`, writing the candidate into
    /// `y_new` and the stage derivatives into `k[1..7]`. `k[0]` must hold `f(t, y)`.
    fn try_dp_step<F>(&mut self, f: &mut F, t: f64, y: &[C64], h: f64) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
    {
        let n = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let ys = &mut self.y_stage;
        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, ys, k2)?;
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, ys, k3)?;
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, ys, k4)?;
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, ys, k5)?;
        for i in 0..n {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, ys, k6)?;
        let yn = &mut self.y_new;
        for i in 0..n {
            yn[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f(t + h, yn, k7)?;
        self.stats.rhs_evals += 6;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotate(omega: f64) -> impl FnMut(f64, &[C64], &mut [C64]) -> Result<()> {
        move |_t, y, dy| {
            for (d, v) in dy.iter_mut().zip(y) {
                *d = C64::new(0.0, -omega) * v;
            }
            Ok(())
        }
    }

    #[test]
    fn dormand_prince_solves_rotation() {
        let mut solver = Solver::new(Method::DormandPrince { rel_tol: 1e-11, abs_tol: 1e-13 }, 0.5);
        let mut y = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.5)];
        let mut t = 0.0;
        solver.advance(&mut rotate(1.7), &mut t, &mut y, 10.0, &mut |_, _| Ok(())).unwrap();
        assert_eq!(t, 10.0);
        let phase = C64::new(0.0, -17.0).exp();
        assert!((y[0] - phase).norm() < 1e-9);
        assert!((y[1] - C64::new(0.0, 0.5) * phase).norm() < 1e-9);
    }

    #[test]
    fn rk4_order_four() {
        let run = |h: f64| {
            let mut solver = Solver::new(Method::Rk4, h);
            let mut y = vec![C64::new(1.0, 0.0)];
            let mut t = 0.0;
            solver.advance(&mut rotate(1.0), &mut t, &mut y, 2.0, &mut |_, _| Ok(())).unwrap();
            (y[0] - C64::new(0.0, -2.0).exp()).norm()
        };
        let ratio = run(0.1) / run(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn sampling_hits_targets_exactly() {
        let mut solver = Solver::new(Method::DormandPrince { rel_tol: 1e-9, abs_tol: 1e-12 }, 1.0);
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut t = 0.0;
        for i in 1..=7 {
            let target = 0.3 * i as f64;
            solver.advance(&mut rotate(2.0), &mut t, &mut y, target, &mut |_, _| Ok(())).unwrap();
            assert_eq!(t, target);
        }
    }

    #[test]
    fn accept_hook_can_abort() {
        let mut solver = Solver::new(Method::DormandPrince { rel_tol: 1e-9, abs_tol: 1e-12 }, 0.1);
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut t = 0.0;
        let mut grow = |_t: f64, y: &[C64], dy: &mut [C64]| {
            dy[0] = y[0];
            Ok(())
        };
        let r = solver.advance(&mut grow, &mut t, &mut y, 10.0, &mut |t, y| {
            if y[0].norm() > 100.0 {
                Err(Error::BoundaryBreach { t, mode: "a", modulus: y[0].norm() })
            } else {
                Ok(())
            }
        });
        assert!(matches!(r, Err(Error::BoundaryBreach { .. })));
    }

    #[test]
    fn repeated_stage_failures_underflow() {
        let mut solver = Solver::new(Method::DormandPrince { rel_tol: 1e-9, abs_tol: 1e-12 }, 0.1);
        let mut y = vec![C64::new(0.5, 0.0)];
        let mut t = 0.0;
        let mut calls = 0;
        let mut f = |_t: f64, _y: &[C64], dy: &mut [C64]| {
            calls += 1;
            if calls > 3 {
                return Err(Error::Domain { modulus: 1.0, guard: 1e-12 });
            }
            dy[0] = C64::new(1.0, 0.0);
            Ok(())
        };
        let r = solver.advance(&mut f, &mut t, &mut y, 1.0, &mut |_, _| Ok(()));
        assert!(matches!(r, Err(Error::Domain { .. })));
    }
}
