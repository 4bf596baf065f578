//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use trapcs_core::trap::voltages_for_mathieu;
use trapcs_core::{AxialSector, DimensionlessScheme, TrapConfig, TrapKind, TrapParams};

const AMU: f64 = 1.660_539_066_60e-27;
const E_CHARGE: f64 = 1.602_176_634e-19;

/// 40Ca+ in a 1 mm combined trap at Mathieu point `(a_z, q_z)` with scaled
/// cyclotron frequency `wc = 2 omega_c / Omega`.
pub fn combined_trap(a_z: f64, q_z: f64, wc: f64) -> (TrapConfig, DimensionlessScheme) {
    let mut p = TrapParams {
        mass: 40.0 * AMU,
        charge: E_CHARGE,
        u0: 0.0,
        v0: 0.0,
        omega_rf: 2.0 * PI * 10e6,
        r0: 1e-3,
        z0: 0.707e-3,
        b0: 0.0,
        l: 1,
        kind: TrapKind::Combined,
        axial_sector: AxialSector::Even,
    };
    (p.u0, p.v0) = voltages_for_mathieu(&p, a_z, q_z);
    p.b0 = wc * p.omega_rf / 2.0 * p.mass / p.charge;
    let cfg = TrapConfig::new(p).expect("reference trap is valid");
    let scheme = DimensionlessScheme::for_config(&cfg);
    (cfg, scheme)
}
