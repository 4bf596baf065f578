//! Coherent-state equations of motion on the product of two unit disks.
//!
//! Each mode follows `dz/dt = {z, H}`, which for the Husimi polynomial reads
//!
//! ```text
//! dz/dt = [dH/dxi (1+z)^2 - dH/deta (1-z)^2] / (2 i k)
//! ```
//!
//! For a quadratic Hamiltonian this is a Riccati equation: the Moebius image
//! of a linear flow in SU(1,1). [`monodromy`] integrates that linear flow over
//! one drive period to classify stability.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::husimi::{AnharmonicSpec, HusimiCoefficients};
use crate::ode::{Method, Solver};
use crate::su11::{disk_gap, XiEta};
use crate::trap::{
    mathieu_parameters, DimensionlessScheme, MathieuParameters, Mode, ReducedTrap, TrapConfig, TrapParams,
};

/// Floquet multipliers with `|mu| <= 1 + TOL_FLOQUET` count as stable.
pub const TOL_FLOQUET: f64 = 1e-6;
/// A stable verdict with `| |tr U| - 2 |` below this is flagged marginal.
pub const MARGINAL_TRACE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryState {
    /// Time in scheme units.
    pub t: f64,
    pub z_a: C64,
    pub z_r: C64,
}

impl TrajectoryState {
    pub fn new(t: f64, z_a: C64, z_r: C64) -> Self {
        Self { t, z_a, z_r }
    }

    pub fn z(&self, mode: Mode) -> C64 {
        match mode {
            Mode::Axial => self.z_a,
            Mode::Radial => self.z_r,
        }
    }

    fn check_disk(&self) -> Result<()> {
        for mode in Mode::BOTH {
            let z = self.z(mode);
            if disk_gap(z).is_err() {
                return Err(Error::BoundaryBreach { t: self.t, mode: mode.label(), modulus: z.norm() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegratorScheme {
    #[default]
    AdaptiveRk45,
    FixedRk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step in scheme time; the fixed step for RK4.
    pub max_step: f64,
    pub scheme: IntegratorScheme,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 0.05, scheme: IntegratorScheme::AdaptiveRk45 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config { key, reason: format!("must be positive and finite, got {v}") })
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_step", self.max_step)
    }

    fn solver(&self) -> Result<Solver> {
        self.validate()?;
        let method = match self.scheme {
            IntegratorScheme::AdaptiveRk45 => Method::DormandPrince { rel_tol: self.rel_tol, abs_tol: self.abs_tol },
            IntegratorScheme::FixedRk4 => Method::Rk4,
        };
        Ok(Solver::new(method, self.max_step))
    }
}

/// The semiclassical model: a trap in scheme units plus its anharmonicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdvpModel {
    trap: ReducedTrap,
    spec: AnharmonicSpec,
}

impl TdvpModel {
    pub fn new(cfg: &TrapConfig, spec: &AnharmonicSpec, scheme: &DimensionlessScheme) -> Self {
        Self::from_reduced(ReducedTrap::new(cfg, scheme), *spec)
    }

    pub fn from_reduced(trap: ReducedTrap, spec: AnharmonicSpec) -> Self {
        Self { trap, spec }
    }

    pub fn trap(&self) -> &ReducedTrap {
        &self.trap
    }

    pub fn spec(&self) -> &AnharmonicSpec {
        &self.spec
    }

    pub fn coefficients(&self, tau: f64) -> HusimiCoefficients {
        HusimiCoefficients::at(&self.trap, &self.spec, tau)
    }

    /// `H(z_a, z_r)` at the state's time.
    pub fn energy(&self, s: &TrajectoryState) -> Result<f64> {
        Ok(self.coefficients(s.t).value(XiEta::from_z(s.z_a)?, XiEta::from_z(s.z_r)?))
    }

    /// `(dz_a/dt, dz_r/dt)` with coefficients frozen at `s.t`. Defined on
    /// the whole open disk; the guard band is enforced on accepted states.
    pub fn rhs(&self, s: &TrajectoryState) -> Result<(C64, C64)> {
        let coeffs = self.coefficients(s.t);
        let p = coeffs.partials(XiEta::from_z_open(s.z_a)?, XiEta::from_z_open(s.z_r)?);
        let flow = |dxi: f64, deta: f64, z: C64, k: f64| {
            let g = dxi * (1.0 + z).powi(2) - deta * (1.0 - z).powi(2);
            // g / (2 i k)
            C64::new(g.im, -g.re) / (2.0 * k)
        };
        Ok((
            flow(p.dxi_a, p.deta_a, s.z_a, self.trap.k(Mode::Axial)),
            flow(p.dxi_r, p.deta_r, s.z_r, self.trap.k(Mode::Radial)),
        ))
    }
}

pub fn eom_rhs(
    s: &TrajectoryState,
    cfg: &TrapConfig,
    spec: &AnharmonicSpec,
    scheme: &DimensionlessScheme,
) -> Result<(C64, C64)> {
    TdvpModel::new(cfg, spec, scheme).rhs(s)
}

/// Which states [`integrate`] returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// Every accepted integrator step.
    EveryStep,
    /// `n + 1` equally spaced samples including both end points.
    Uniform(usize),
}

/// Integrates the equations of motion from `initial` to `t_end`.
pub fn integrate(
    model: &TdvpModel,
    initial: TrajectoryState,
    t_end: f64,
    icfg: &IntegratorConfig,
    sampling: Sampling,
) -> Result<Vec<TrajectoryState>> {
    initial.check_disk()?;
    let mut solver = icfg.solver()?;
    let mut rhs = |t: f64, y: &[C64], dy: &mut [C64]| -> Result<()> {
        let (da, dr) = model.rhs(&TrajectoryState::new(t, y[0], y[1]))?;
        dy[0] = da;
        dy[1] = dr;
        Ok(())
    };
    let mut y = [initial.z_a, initial.z_r];
    let mut t = initial.t;
    let mut out = vec![initial];
    match sampling {
        Sampling::EveryStep => {
            let mut accept = |t: f64, y: &[C64]| -> Result<()> {
                let s = TrajectoryState::new(t, y[0], y[1]);
                s.check_disk()?;
                out.push(s);
                Ok(())
            };
            solver.advance(&mut rhs, &mut t, &mut y, t_end, &mut accept)?;
        }
        Sampling::Uniform(n) => {
            let n = n.max(1);
            let mut accept = |t: f64, y: &[C64]| TrajectoryState::new(t, y[0], y[1]).check_disk();
            for i in 1..=n {
                let target = if i == n { t_end } else { initial.t + (t_end - initial.t) * i as f64 / n as f64 };
                solver.advance(&mut rhs, &mut t, &mut y, target, &mut accept)?;
                out.push(TrajectoryState::new(t, y[0], y[1]));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Stable, but within [`MARGINAL_TRACE_TOL`] of the stability boundary.
    pub marginal: bool,
    pub floquet_multipliers: Vec<C64>,
    pub max_abs_multiplier: f64,
}

impl StabilityVerdict {
    fn from_monodromy(u: [C64; 4]) -> Self {
        let tr = u[0] + u[3];
        let det = u[0] * u[3] - u[1] * u[2];
        let disc = (tr * tr - 4.0 * det).sqrt();
        let mu = vec![(tr + disc) / 2.0, (tr - disc) / 2.0];
        let max_abs = mu.iter().map(|m| m.norm()).fold(0.0, f64::max);
        let stable = max_abs <= 1.0 + TOL_FLOQUET;
        Self {
            stable,
            marginal: stable && (tr.norm() - 2.0).abs() <= MARGINAL_TRACE_TOL,
            floquet_multipliers: mu,
            max_abs_multiplier: max_abs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyReport {
    pub axial: StabilityVerdict,
    pub radial: StabilityVerdict,
}

impl MonodromyReport {
    pub fn stable(&self) -> bool {
        self.axial.stable && self.radial.stable
    }

    pub fn max_abs_multiplier(&self) -> f64 {
        self.axial.max_abs_multiplier.max(self.radial.max_abs_multiplier)
    }

    pub fn mode(&self, mode: Mode) -> &StabilityVerdict {
        match mode {
            Mode::Axial => &self.axial,
            Mode::Radial => &self.radial,
        }
    }
}

/// One-period monodromy of the linear SU(1,1) flow whose Moebius action is
/// the harmonic part of the disk dynamics:
/// `U' = -(i/2) [[1+l, l-1], [1-l, -(1+l)]] U`, `l = lambda(tau)`.
/// The generator is conjugate to the `(x, p)` flow of `x'' + lambda x = 0`.
fn mode_monodromy(trap: &ReducedTrap, mode: Mode, period: f64, icfg: &IntegratorConfig) -> Result<[C64; 4]> {
    let mut solver = icfg.solver()?;
    let mut rhs = |tau: f64, u: &[C64], du: &mut [C64]| -> Result<()> {
        let l = trap.lambda(mode, tau);
        let m = [C64::new(0.0, -0.5 * (1.0 + l)), C64::new(0.0, -0.5 * (l - 1.0))];
        // rows of M: [m0, m1], [-m1, -m0]
        for col in 0..2 {
            let (u0, u1) = (u[col], u[2 + col]);
            du[col] = m[0] * u0 + m[1] * u1;
            du[2 + col] = -m[1] * u0 - m[0] * u1;
        }
        Ok(())
    };
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut u = [one, zero, zero, one];
    let mut t = 0.0;
    solver.advance(&mut rhs, &mut t, &mut u, period, &mut |_, _| Ok(()))?;
    Ok(u)
}

/// Floquet analysis of both modes over one RF period (`pi` in scheme units).
pub fn monodromy(cfg: &TrapConfig, scheme: &DimensionlessScheme, icfg: &IntegratorConfig) -> Result<MonodromyReport> {
    monodromy_reduced(&ReducedTrap::new(cfg, scheme), icfg)
}

pub fn monodromy_reduced(trap: &ReducedTrap, icfg: &IntegratorConfig) -> Result<MonodromyReport> {
    let period = trap.rf_period().ok_or(Error::NoRfDrive)?;
    Ok(MonodromyReport {
        axial: StabilityVerdict::from_monodromy(mode_monodromy(trap, Mode::Axial, period, icfg)?),
        radial: StabilityVerdict::from_monodromy(mode_monodromy(trap, Mode::Radial, period, icfg)?),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanCell {
    pub u0: f64,
    pub v0: f64,
    pub mathieu: Option<MathieuParameters>,
    pub report: Option<MonodromyReport>,
    pub error: Option<String>,
}

impl ScanCell {
    pub fn stable(&self) -> Option<bool> {
        self.report.as_ref().map(MonodromyReport::stable)
    }
}

/// Stability verdicts over a `(U0, V0)` grid, row-major in `U0` then `V0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMap {
    pub n_u: usize,
    pub n_v: usize,
    pub cells: Vec<ScanCell>,
}

impl StabilityMap {
    pub fn cell(&self, iu: usize, iv: usize) -> &ScanCell {
        &self.cells[iu * self.n_v + iv]
    }
}

fn grid_point(range: (f64, f64), i: usize, n: usize) -> f64 {
    if i + 1 == n {
        range.1
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}

fn scan_cell(template: &TrapParams, u0: f64, v0: f64, icfg: &IntegratorConfig) -> ScanCell {
    let mut cell = ScanCell { u0, v0, mathieu: None, report: None, error: None };
    let result = TrapConfig::new(TrapParams { u0, v0, ..*template }).and_then(|cfg| {
        let mathieu = mathieu_parameters(&cfg)?;
        let scheme = DimensionlessScheme::for_config(&cfg);
        Ok((mathieu, monodromy(&cfg, &scheme, icfg)?))
    });
    match result {
        Ok((m, r)) => {
            cell.mathieu = Some(m);
            cell.report = Some(r);
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

/// Evaluates [`monodromy`] on every grid point. Cells are independent and
/// run on `threads` workers (0 = rayon default); failures are recorded per
/// cell and never abort the scan.
pub fn stability_scan(
    template: &TrapParams,
    u0_range: (f64, f64),
    v0_range: (f64, f64),
    grid: (usize, usize),
    icfg: &IntegratorConfig,
    threads: usize,
) -> Result<StabilityMap> {
    let (n_u, n_v) = grid;
    if n_u < 2 || n_v < 2 {
        return Err(Error::Config { key: "grid", reason: format!("need at least 2 x 2 cells, got {n_u} x {n_v}") });
    }
    icfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config { key: "threads", reason: e.to_string() })?;
    let cells = pool.install(|| {
        (0..n_u * n_v)
            .into_par_iter()
            .map(|idx| {
                let (iu, iv) = (idx / n_v, idx % n_v);
                scan_cell(template, grid_point(u0_range, iu, n_u), grid_point(v0_range, iv, n_v), icfg)
            })
            .collect()
    });
    Ok(StabilityMap { n_u, n_v, cells })
}
