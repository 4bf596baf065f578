//! Command implementations. Each returns the complete output text so that
//! nothing is written when a run fails.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use trapcs_core::fock::{
    evolve, expectation_real, suggested_truncation, EvolveOptions, FockRep, HamiltonianFamily, ProductOperator,
    ProductVector, PRODUCT_DIM_CAP,
};
use trapcs_core::{
    expect_generators, integrate, mathieu_parameters, stability_scan, CsPoint, Error, HusimiCoefficients, Mode,
    ReducedTrap, Sampling, TdvpModel, TrajectoryState, XiEta,
};

use crate::config::Resolved;
use crate::error::CliError;

pub const TOOL: &str = concat!("trapcs ", env!("CARGO_PKG_VERSION"));

/// Per-invocation settings that are not part of the configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Worker threads for `scan`; 0 picks the number of cores.
    pub threads: usize,
    pub seed: u64,
    /// Unix seconds written to the header.
    pub timestamp: u64,
}

/// Shortest round-trip text for `x`, in exponent form outside `[1e-5, 1e16)`.
/// Negative zero prints as `0`.
pub fn num(x: f64) -> String {
    let x = x + 0.0;
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Commented header: tool, timestamp, resolved configuration and unit scales.
/// Only the timestamp line depends on when the run happened.
pub fn header(command: &str, res: &Resolved, opts: &RunOptions) -> String {
    let s = &res.scheme;
    let trap = ReducedTrap::new(&res.trap, &res.scheme);
    let mut out = format!("# {TOOL} {command}\n");
    out += &format!("# timestamp: {}\n", opts.timestamp);
    out += &format!("# config: {}\n", res.config.to_json());
    out += &format!(
        "# scheme: length_scale_m={} time_scale_s={} energy_scale_j={}\n",
        num(s.length_scale),
        num(s.time_scale),
        num(s.energy_scale)
    );
    out += &format!(
        "# trap: k_a={} k_r={} omega_c_rad_s={} omega_c_scaled={} period_scaled={}\n",
        num(trap.k(Mode::Axial)),
        num(trap.k(Mode::Radial)),
        num(res.trap.omega_c()),
        num(trap.omega_c()),
        num(res.period())
    );
    if let Ok(m) = mathieu_parameters(&res.trap) {
        out += &format!("# mathieu: a_z={} q_z={} a_r={} q_r={}\n", num(m.a_z), num(m.q_z), num(m.a_r), num(m.q_r));
    }
    out += "# units: t in scheme time (t_s = t * time_scale_s), h in units of energy_scale_j\n";
    out
}

fn csv_body(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

/// Integrates the configured trajectory and renders it as CSV.
pub fn simulate(res: &Resolved, opts: &RunOptions) -> Result<String, CliError> {
    let model = TdvpModel::new(&res.trap, &res.spec, &res.scheme);
    let o = &res.config.output;
    let samples = (res.config.duration * o.samples_per_period as f64).ceil().max(1.0) as usize;
    let traj = integrate(
        &model,
        TrajectoryState::new(0.0, res.z_a, res.z_r),
        res.t_end(),
        &res.icfg,
        Sampling::Uniform(samples),
    )?;
    let mut rows = Vec::with_capacity(traj.len() / o.stride + 1);
    for s in traj.iter().step_by(o.stride) {
        let (xa, xr) = (XiEta::from_z(s.z_a)?, XiEta::from_z(s.z_r)?);
        rows.push([s.t, s.z_a.re, s.z_a.im, s.z_r.re, s.z_r.im, xa.xi, xa.eta, xr.xi, xr.eta, model.energy(s)?]);
    }
    let body = csv_body(|w| {
        w.write_record(["t", "re_z_a", "im_z_a", "re_z_r", "im_z_r", "xi_a", "eta_a", "xi_r", "eta_r", "h"])?;
        for r in &rows {
            w.write_record(r.iter().map(|&v| num(v)))?;
        }
        Ok(())
    });
    Ok(header("simulate", res, opts) + &body)
}

/// Stability map over the configured `(U0, V0)` grid, row-major in `U0`.
pub fn scan(res: &Resolved, opts: &RunOptions) -> Result<String, CliError> {
    let grid = res
        .config
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Config { key: "grid".into(), reason: "scan requires a grid block".into() })?;
    if !res.trap.has_rf() {
        return Err(CliError::Config { key: "trap.kind".into(), reason: "scan requires an RF drive".into() });
    }
    let map = stability_scan(
        res.trap.params(),
        (grid.u0[0], grid.u0[1]),
        (grid.v0[0], grid.v0[1]),
        (grid.n_u, grid.n_v),
        &res.icfg,
        opts.threads,
    )?;
    let body = csv_body(|w| {
        w.write_record(["u0", "v0", "a_z", "q_z", "stable_axial", "stable_radial", "max_abs_multiplier", "error"])?;
        for c in &map.cells {
            let (a_z, q_z) = c.mathieu.map(|m| (num(m.a_z), num(m.q_z))).unwrap_or_default();
            let (sa, sr, mu) = c
                .report
                .as_ref()
                .map(|r| (r.axial.stable.to_string(), r.radial.stable.to_string(), num(r.max_abs_multiplier())))
                .unwrap_or_default();
            let err = c.error.clone().unwrap_or_default();
            w.write_record([num(c.u0), num(c.v0), a_z, q_z, sa, sr, mu, err])?;
        }
        Ok(())
    });
    Ok(header("scan", res, opts) + &body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply exactly (anharmonic overlap); residuals are informational.
    Approximate,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Approximate => "approximate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub cases: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn measured(name: &'static str, residual: f64, tolerance: f64, cases: usize) -> Self {
        let status = if residual < tolerance { Status::Pass } else { Status::Fail };
        Self { name, status, residual: Some(residual), tolerance, cases, metrics: BTreeMap::new(), detail: None }
    }

    fn failed(name: &'static str, tolerance: f64, err: &Error) -> Self {
        let detail = match err {
            Error::TruncationInsufficient { suggested, .. } => format!("{err} (rerun with truncation >= {suggested})"),
            _ => err.to_string(),
        };
        Self {
            name,
            status: Status::Fail,
            residual: None,
            tolerance,
            cases: 0,
            metrics: BTreeMap::new(),
            detail: Some(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tool: &'static str,
    pub timestamp: u64,
    pub seed: u64,
    pub config: serde_json::Value,
    pub pass: bool,
    pub checks: Vec<Check>,
}

pub const DEQUANTIZATION_TOL: f64 = 1e-7;
pub const OVERLAP_TOL: f64 = 1e-5;
pub const K0_TOL: f64 = 1e-6;
pub const EHRENFEST_TOL: f64 = 1e-6;
pub const GRADIENT_TOL: f64 = 1e-6;

fn random_disk_point(rng: &mut ChaCha8Rng, max_modulus: f64) -> C64 {
    let r = max_modulus * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

/// `(z_a, z_r)` samples: the configured initial point, then random points.
fn sample_points(res: &Resolved, rng: &mut ChaCha8Rng, n: usize, max_modulus: f64) -> Vec<(C64, C64)> {
    let mut pts = vec![(res.z_a, res.z_r)];
    while pts.len() < n {
        pts.push((random_disk_point(rng, max_modulus), random_disk_point(rng, max_modulus)));
    }
    pts
}

fn product_reps(trap: &ReducedTrap, na: usize, nr: usize) -> Result<(FockRep, FockRep), Error> {
    if na.saturating_mul(nr) > PRODUCT_DIM_CAP {
        return Err(Error::DimensionCap { dim: na.saturating_mul(nr), cap: PRODUCT_DIM_CAP });
    }
    Ok((FockRep::new(trap.k(Mode::Axial), na)?, FockRep::new(trap.k(Mode::Radial), nr)?))
}

fn dequantization_check(res: &Resolved, rng: &mut ChaCha8Rng) -> Check {
    let v = &res.config.verify;
    let trap = ReducedTrap::new(&res.trap, &res.scheme);
    let points = sample_points(res, rng, v.cases, 0.6);
    let mut run = || -> Result<f64, Error> {
        let (rep_a, rep_r) = product_reps(&trap, v.truncation, v.truncation)?;
        let family = HamiltonianFamily::new(trap, &res.spec, &rep_a, &rep_r)?;
        let mut worst: f64 = 0.0;
        for &(z_a, z_r) in &points {
            let tau = rng.random_range(0.0..res.period());
            let psi = ProductVector::coherent(z_a, z_r, &rep_a, &rep_r)?;
            let oracle = expectation_real(&family.at(tau), &psi)?;
            let value = HusimiCoefficients::at(&trap, &res.spec, tau).value(XiEta::from_z(z_a)?, XiEta::from_z(z_r)?);
            worst = worst.max((value - oracle).abs() / (1.0 + value.abs()));
        }
        Ok(worst)
    };
    match run() {
        Ok(r) => Check::measured("dequantization", r, DEQUANTIZATION_TOL, points.len()),
        Err(e) => Check::failed("dequantization", DEQUANTIZATION_TOL, &e),
    }
}

/// Largest truncation needed by the coherent states along the classical path, plus `margin`.
fn truncation_along(model: &TdvpModel, res: &Resolved, t_end: f64, margin: usize) -> Result<(usize, usize), Error> {
    let traj = integrate(model, TrajectoryState::new(0.0, res.z_a, res.z_r), t_end, &res.icfg, Sampling::EveryStep)?;
    let n = |mode: Mode| {
        let k = model.trap().k(mode);
        traj.iter().map(|s| suggested_truncation(s.z(mode), k)).max().unwrap_or(0) + margin
    };
    Ok((n(Mode::Axial), n(Mode::Radial)))
}

fn k0(model: &TdvpModel, mode: Mode, z: C64) -> Result<f64, Error> {
    Ok(expect_generators(&CsPoint::new(z, model.trap().k(mode))?)?.k0)
}

fn overlap_check(res: &Resolved) -> Check {
    const NAME: &str = "quadratic_overlap";
    let v = &res.config.verify;
    let model = TdvpModel::new(&res.trap, &res.spec, &res.scheme);
    let harmonic = res.spec.is_harmonic();
    let t_end = v.overlap_periods * res.period();
    let samples = (v.overlap_periods * 4.0).ceil().max(1.0) as usize;
    let run = || -> Result<(f64, f64), Error> {
        let classical = integrate(
            &model,
            TrajectoryState::new(0.0, res.z_a, res.z_r),
            t_end,
            &res.icfg,
            Sampling::Uniform(samples),
        )?;
        let (na, nr) = truncation_along(&model, res, t_end, if harmonic { 8 } else { 16 })?;
        let (rep_a, rep_r) = product_reps(model.trap(), na, nr)?;
        let family = HamiltonianFamily::new(*model.trap(), &res.spec, &rep_a, &rep_r)?;
        let psi0 = ProductVector::coherent(res.z_a, res.z_r, &rep_a, &rep_r)?;
        let times: Vec<f64> = classical.iter().map(|s| s.t).collect();
        let quantum = evolve(&psi0, &family, &times, &EvolveOptions::default())?;
        let (mut overlap_res, mut k0_res): (f64, f64) = (0.0, 0.0);
        for (s, (_, psi)) in classical.iter().zip(&quantum) {
            let cs = ProductVector::coherent(s.z_a, s.z_r, &rep_a, &rep_r)?;
            overlap_res = overlap_res.max(1.0 - cs.inner(psi).norm());
            for mode in Mode::BOTH {
                let q = expectation_real(&family.k0_of(mode), psi)?;
                k0_res = k0_res.max((q - k0(&model, mode, s.z(mode))?).abs());
            }
        }
        Ok((overlap_res, k0_res))
    };
    match run() {
        Ok((overlap_res, k0_res)) => {
            let mut c = Check::measured(NAME, overlap_res, OVERLAP_TOL, samples + 1);
            if k0_res >= K0_TOL {
                c.status = Status::Fail;
            }
            if !harmonic {
                c.status = Status::Approximate;
                c.detail = Some("anharmonic Hamiltonian: coherent states are not preserved exactly".into());
            }
            c.metrics.insert("k0_residual", k0_res);
            c.metrics.insert("k0_tolerance", K0_TOL);
            c
        }
        Err(e) => Check::failed(NAME, OVERLAP_TOL, &e),
    }
}

/// `d<A>/dt = i <[H, A]> = 2 Im <A psi | H psi>` for real symmetric `A`.
fn quantum_rate(a: &ProductOperator, h: &ProductOperator, psi: &ProductVector) -> f64 {
    let ap = a.apply(&psi.amps);
    let hp = h.apply(&psi.amps);
    2.0 * ap.iter().zip(&hp).map(|(x, y)| x.conj() * y).sum::<C64>().im
}

/// `dK0/dt = 2 Re(dK0/dz dz/dt)` with `dK0/dz = 2 k z* / (1 - |z|^2)^2`.
fn classical_rate(k: f64, z: C64, dz: C64) -> f64 {
    let gap = 1.0 - z.norm_sqr();
    2.0 * (2.0 * k * z.conj() * dz / (gap * gap)).re
}

fn ehrenfest_check(res: &Resolved, rng: &mut ChaCha8Rng) -> Check {
    const NAME: &str = "ehrenfest";
    let model = TdvpModel::new(&res.trap, &res.spec, &res.scheme);
    let trap = *model.trap();
    let points = sample_points(res, rng, res.config.verify.cases, 0.5);
    let run = || -> Result<f64, Error> {
        let mut worst: f64 = 0.0;
        for &(z_a, z_r) in &points {
            let s = TrajectoryState::new(0.0, z_a, z_r);
            let n = |mode: Mode| suggested_truncation(s.z(mode), trap.k(mode)) + 8;
            let (rep_a, rep_r) = product_reps(&trap, n(Mode::Axial), n(Mode::Radial))?;
            let family = HamiltonianFamily::new(trap, &res.spec, &rep_a, &rep_r)?;
            let psi = ProductVector::coherent(z_a, z_r, &rep_a, &rep_r)?;
            let h = family.at(0.0);
            let (dz_a, dz_r) = model.rhs(&s)?;
            for (mode, z, dz) in [(Mode::Axial, z_a, dz_a), (Mode::Radial, z_r, dz_r)] {
                let q = quantum_rate(&family.k0_of(mode), &h, &psi);
                let c = classical_rate(trap.k(mode), z, dz);
                worst = worst.max((q - c).abs() / q.abs().max(1.0));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(r) => Check::measured(NAME, r, EHRENFEST_TOL, points.len()),
        Err(e) => Check::failed(NAME, EHRENFEST_TOL, &e),
    }
}

fn gradient_check(res: &Resolved, rng: &mut ChaCha8Rng) -> Check {
    const NAME: &str = "gradient_fd";
    let trap = ReducedTrap::new(&res.trap, &res.scheme);
    let points = sample_points(res, rng, res.config.verify.cases, 0.8);
    let h = 1e-6;
    let mut run = || -> Result<f64, Error> {
        let mut worst: f64 = 0.0;
        for &(z_a, z_r) in &points {
            let coeffs = HusimiCoefficients::at(&trap, &res.spec, rng.random_range(0.0..res.period()));
            let value =
                |za: C64, zr: C64| -> Result<f64, Error> { Ok(coeffs.value(XiEta::from_z(za)?, XiEta::from_z(zr)?)) };
            // dH/dz* = (d/dx + i d/dy) H / 2
            let fd = |shift: &dyn Fn(C64) -> (C64, C64)| -> Result<C64, Error> {
                let diff = |e: C64| -> Result<f64, Error> {
                    let (p, m) = (shift(e), shift(-e));
                    Ok((value(p.0, p.1)? - value(m.0, m.1)?) / (2.0 * h))
                };
                Ok(C64::new(diff(C64::new(h, 0.0))?, diff(C64::new(0.0, h))?) / 2.0)
            };
            let fd_a = fd(&|e| (z_a + e, z_r))?;
            let fd_r = fd(&|e| (z_a, z_r + e))?;
            let (g_a, g_r) = trapcs_core::husimi_gradient(&coeffs, z_a, z_r)?;
            for (g, f) in [(g_a, fd_a), (g_r, fd_r)] {
                worst = worst.max((g - f).norm() / g.norm().max(1.0));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(r) => Check::measured(NAME, r, GRADIENT_TOL, points.len()),
        Err(e) => Check::failed(NAME, GRADIENT_TOL, &e),
    }
}

/// Runs the oracle checks. The report is returned even when checks fail.
pub fn verify(res: &Resolved, opts: &RunOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks = vec![
        dequantization_check(res, &mut rng),
        overlap_check(res),
        ehrenfest_check(res, &mut rng),
        gradient_check(res, &mut rng),
    ];
    VerifyReport {
        tool: TOOL,
        timestamp: opts.timestamp,
        seed: opts.seed,
        config: serde_json::to_value(&res.config).expect("configuration serializes"),
        pass: checks.iter().all(|c| c.status != Status::Fail),
        checks,
    }
}

pub fn render_report(report: &VerifyReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

/// Coefficient table at `t = 0` with the Husimi value at the initial point
/// and the Fock-oracle expectation.
pub fn dequantize(res: &Resolved, opts: &RunOptions) -> Result<String, CliError> {
    let trap = ReducedTrap::new(&res.trap, &res.scheme);
    let c = HusimiCoefficients::at(&trap, &res.spec, 0.0);
    let value = c.value(XiEta::from_z(res.z_a)?, XiEta::from_z(res.z_r)?);
    let n = res.config.verify.truncation;
    let (rep_a, rep_r) = product_reps(&trap, n, n)?;
    let family = HamiltonianFamily::new(trap, &res.spec, &rep_a, &rep_r)?;
    let psi = ProductVector::coherent(res.z_a, res.z_r, &rep_a, &rep_r)?;
    let oracle = expectation_real(&family.at(0.0), &psi)?;

    let mut out = header("dequantize", res, opts);
    out += &format!(
        "t = 0\nz_a = {} {}\nz_r = {} {}\n",
        num(res.z_a.re),
        num(res.z_a.im),
        num(res.z_r.re),
        num(res.z_r.im)
    );
    out += &format!(
        "l = {}\nomega_c_rad_s = {}\nomega_c_scaled = {}\n",
        trap.l(),
        num(res.trap.omega_c()),
        num(trap.omega_c())
    );
    out += "\ncoefficient value\n";
    for (name, v) in [
        ("a_a", c.a_a),
        ("a_r", c.a_r),
        ("b_a", c.b_a),
        ("b_r", c.b_r),
        ("c20", c.c20),
        ("c11", c.c11),
        ("c02", c.c02),
        ("d30", c.d30),
        ("d21", c.d21),
        ("d12", c.d12),
        ("d03", c.d03),
        ("const_term", c.const_term),
    ] {
        out += &format!("{name} {}\n", num(v));
    }
    out += &format!(
        "\nh_husimi = {}\nh_oracle = {}\ntruncation = {n}\ndifference = {}\n",
        num(value),
        num(oracle),
        num(value - oracle)
    );
    Ok(out)
}
