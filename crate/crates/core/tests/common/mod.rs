#![allow(dead_code)]

pub mod mathieu;

use std::f64::consts::PI;

use rand::Rng;
use trapcs_core::fock::suggested_truncation;
use trapcs_core::trap::voltages_for_mathieu;
use trapcs_core::{
    integrate, AxialSector, Complex64 as C64, DimensionlessScheme, IntegratorConfig, Mode, Sampling, TdvpModel,
    TrajectoryState, TrapConfig, TrapKind, TrapParams,
};

pub const AMU: f64 = 1.660_539_066_60e-27;
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// 40Ca+ in a 1 mm trap driven at 10 MHz.
pub fn calcium(kind: TrapKind) -> TrapParams {
    TrapParams {
        mass: 40.0 * AMU,
        charge: E_CHARGE,
        u0: 0.0,
        v0: 0.0,
        omega_rf: 2.0 * PI * 10e6,
        r0: 1e-3,
        z0: 0.707e-3,
        b0: 0.0,
        l: 0,
        kind,
        axial_sector: AxialSector::Even,
    }
}

pub fn paul_at(a_z: f64, q_z: f64) -> TrapConfig {
    let mut p = calcium(TrapKind::Paul);
    (p.u0, p.v0) = voltages_for_mathieu(&p, a_z, q_z);
    TrapConfig::new(p).unwrap()
}

/// Magnetic field giving a scaled cyclotron frequency `wc = 2 omega_c / Omega`.
pub fn field_for_scaled_cyclotron(p: &TrapParams, wc: f64) -> f64 {
    wc * p.omega_rf / 2.0 * p.mass / p.charge
}

pub fn random_disk_point<R: Rng>(rng: &mut R, max_modulus: f64) -> C64 {
    let r = max_modulus * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random_range(0.0..2.0 * PI))
}

/// Random Paul, combined or Penning configuration with O(1) scaled stiffness.
pub fn random_config<R: Rng>(rng: &mut R) -> TrapConfig {
    let kind = [TrapKind::Paul, TrapKind::Combined, TrapKind::Penning][rng.random_range(0..3)];
    let mut p = calcium(kind);
    p.l = rng.random_range(0..=4);
    p.axial_sector = if rng.random_bool(0.5) { AxialSector::Even } else { AxialSector::Odd };
    match kind {
        TrapKind::Paul | TrapKind::Combined => {
            let (a, q) = (rng.random_range(-0.3..0.3), rng.random_range(0.0..0.9));
            (p.u0, p.v0) = voltages_for_mathieu(&p, a, q);
            if kind == TrapKind::Combined {
                p.b0 = field_for_scaled_cyclotron(&p, rng.random_range(0.0..1.5));
            }
        }
        TrapKind::Penning => {
            p.omega_rf = 0.0;
            p.b0 = rng.random_range(0.5..5.0);
            p.u0 = -rng.random_range(0.01..2.0);
        }
    }
    TrapConfig::new(p).unwrap()
}

pub fn scheme(cfg: &TrapConfig) -> DimensionlessScheme {
    DimensionlessScheme::for_config(cfg)
}

/// Truncations large enough for the coherent states met along the classical
/// trajectory from `(z_a, z_r)` over `[0, t_end]`.
pub fn truncation_along(model: &TdvpModel, z_a: C64, z_r: C64, t_end: f64) -> (usize, usize) {
    let traj =
        integrate(model, TrajectoryState::new(0.0, z_a, z_r), t_end, &IntegratorConfig::default(), Sampling::EveryStep)
            .unwrap();
    let n = |mode: Mode| {
        let k = model.trap().k(mode);
        traj.iter().map(|s| suggested_truncation(s.z(mode), k)).max().unwrap() + 8
    };
    (n(Mode::Axial), n(Mode::Radial))
}

/// Combined trap with Mathieu parameters `(a_z, q_z)` and scaled cyclotron frequency `wc`.
pub fn combined_at(a_z: f64, q_z: f64, wc: f64) -> TrapConfig {
    let mut p = calcium(TrapKind::Combined);
    (p.u0, p.v0) = voltages_for_mathieu(&p, a_z, q_z);
    p.b0 = field_for_scaled_cyclotron(&p, wc);
    TrapConfig::new(p).unwrap()
}
