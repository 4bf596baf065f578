//! Physical model of the axially symmetric quadrupole trap.
//!
//! Configuration is given in SI units. [`DimensionlessScheme`] fixes the
//! scales that make `hbar = m = 1`, and [`ReducedTrap`] holds the trap in
//! those units for the hot loops in [`crate::husimi`], [`crate::dynamics`]
//! and [`crate::fock`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced Planck constant in J s (CODATA exact value).
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrapKind {
    Paul,
    Penning,
    Combined,
}

/// Parity sector of the axial representation, `k_a = 1/4` (even) or `3/4` (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AxialSector {
    #[default]
    Even,
    Odd,
}

impl AxialSector {
    pub fn bargmann_index(self) -> f64 {
        match self {
            AxialSector::Even => 0.25,
            AxialSector::Odd => 0.75,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Axial,
    Radial,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Axial, Mode::Radial];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Axial => "a",
            Mode::Radial => "r",
        }
    }
}

/// Raw trap and ion parameters, SI units. Validate with [`TrapConfig::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    /// kg
    pub mass: f64,
    /// C, signed
    pub charge: f64,
    /// d.c. voltage, V
    pub u0: f64,
    /// RF amplitude, V
    pub v0: f64,
    /// RF angular frequency, rad/s
    pub omega_rf: f64,
    /// radial semiaxis, m
    pub r0: f64,
    /// axial semiaxis, m
    pub z0: f64,
    /// axial magnetic field, T
    pub b0: f64,
    /// orbital quantum number
    pub l: u32,
    pub kind: TrapKind,
    pub axial_sector: AxialSector,
}

/// Validated trap configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    params: TrapParams,
}

fn require(cond: bool, key: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config { key, reason: reason.into() })
    }
}

impl TrapConfig {
    pub fn new(params: TrapParams) -> Result<Self> {
        let p = &params;
        for (key, v) in [
            ("mass", p.mass),
            ("charge", p.charge),
            ("u0", p.u0),
            ("v0", p.v0),
            ("omega_rf", p.omega_rf),
            ("r0", p.r0),
            ("z0", p.z0),
            ("b0", p.b0),
        ] {
            require(v.is_finite(), key, format!("must be finite, got {v}"))?;
        }
        require(p.mass > 0.0, "mass", format!("must be positive, got {}", p.mass))?;
        require(p.r0 > 0.0, "r0", format!("must be positive, got {}", p.r0))?;
        require(p.z0 > 0.0, "z0", format!("must be positive, got {}", p.z0))?;
        match p.kind {
            TrapKind::Paul => {
                require(p.b0 == 0.0, "b0", "a Paul trap has no magnetic field (B0 = 0)")?;
                require(p.omega_rf > 0.0, "omega_rf", "an RF trap needs a positive drive frequency")?;
            }
            TrapKind::Penning => {
                require(p.v0 == 0.0, "v0", "a Penning trap has no RF voltage (V0 = 0)")?;
                require(
                    p.b0 != 0.0 && p.charge != 0.0,
                    "b0",
                    "a Penning trap needs a nonzero cyclotron frequency q B0 / m",
                )?;
            }
            TrapKind::Combined => {
                require(p.omega_rf > 0.0, "omega_rf", "an RF trap needs a positive drive frequency")?;
            }
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &TrapParams {
        &self.params
    }

    pub fn kind(&self) -> TrapKind {
        self.params.kind
    }

    pub fn has_rf(&self) -> bool {
        self.params.kind != TrapKind::Penning
    }

    /// `r0^2 + 2 z0^2`
    fn geometry(&self) -> f64 {
        self.params.r0 * self.params.r0 + 2.0 * self.params.z0 * self.params.z0
    }

    /// Cyclotron frequency `q B0 / m`, rad/s.
    pub fn omega_c(&self) -> f64 {
        self.params.charge / self.params.mass * self.params.b0
    }

    /// RF period in seconds, `None` for a Penning trap.
    pub fn rf_period(&self) -> Option<f64> {
        self.has_rf().then(|| 2.0 * PI / self.params.omega_rf)
    }
}

/// Length, time and energy scales of the internal units (`hbar = m = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessScheme {
    pub length_scale: f64,
    pub time_scale: f64,
    pub energy_scale: f64,
}

impl DimensionlessScheme {
    /// `time_scale = 2/Omega` for RF traps (so the drive is `cos 2 tau`) and
    /// `1/|omega_c|` for a Penning trap; `length_scale = sqrt(hbar T / m)`.
    pub fn for_config(cfg: &TrapConfig) -> Self {
        let time_scale = match cfg.kind() {
            TrapKind::Penning => 1.0 / cfg.omega_c().abs(),
            _ => 2.0 / cfg.params.omega_rf,
        };
        Self { length_scale: (HBAR * time_scale / cfg.params.mass).sqrt(), time_scale, energy_scale: HBAR / time_scale }
    }

    pub fn to_scaled_time(&self, t: f64) -> f64 {
        t / self.time_scale
    }

    pub fn to_si_time(&self, tau: f64) -> f64 {
        tau * self.time_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessSample {
    pub t: f64,
    pub lambda_a: f64,
    pub lambda_r: f64,
    pub omega_c: f64,
}

/// `A(t) = (U0 + V0 cos(Omega t)) / (r0^2 + 2 z0^2)`, in V/m^2.
pub fn potential_coefficient(cfg: &TrapConfig, t: f64) -> f64 {
    let p = &cfg.params;
    let drive = if cfg.has_rf() { p.v0 * (p.omega_rf * t).cos() } else { 0.0 };
    (p.u0 + drive) / cfg.geometry()
}

/// Axial and radial stiffness (s^-2) and cyclotron frequency at time `t`.
pub fn stiffness(cfg: &TrapConfig, t: f64) -> StiffnessSample {
    let p = &cfg.params;
    let omega_c = cfg.omega_c();
    let lambda_a = -4.0 * p.charge / p.mass * potential_coefficient(cfg, t);
    StiffnessSample { t, lambda_a, lambda_r: (omega_c * omega_c - 2.0 * lambda_a) / 4.0, omega_c }
}

/// Generator coefficients `(alpha_c, beta_c)` of `H_c = alpha K0 + beta K1`
/// in scheme units, at SI time `t`.
pub fn alpha_beta(cfg: &TrapConfig, mode: Mode, t: f64, scheme: &DimensionlessScheme) -> (f64, f64) {
    let s = stiffness(cfg, t);
    let lambda = match mode {
        Mode::Axial => s.lambda_a,
        Mode::Radial => s.lambda_r,
    } * scheme.time_scale
        * scheme.time_scale;
    (lambda + 1.0, lambda - 1.0)
}

/// `(k_a, k_r)` with `k_r = (l+1)/2`.
pub fn bargmann_indices(cfg: &TrapConfig) -> (f64, f64) {
    (cfg.params.axial_sector.bargmann_index(), (cfg.params.l as f64 + 1.0) / 2.0)
}

/// Mathieu coefficients of the harmonic motion in `tau = Omega t / 2`,
/// where each mode obeys `u'' + (a - 2 q cos 2 tau) u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuParameters {
    pub a_z: f64,
    pub q_z: f64,
    pub a_r: f64,
    pub q_r: f64,
}

pub fn mathieu_parameters(cfg: &TrapConfig) -> Result<MathieuParameters> {
    if !cfg.has_rf() {
        return Err(Error::NoRfDrive);
    }
    let p = &cfg.params;
    let denom = p.mass * p.omega_rf * p.omega_rf * cfg.geometry();
    let a_z = -16.0 * p.charge * p.u0 / denom;
    let q_z = 8.0 * p.charge * p.v0 / denom;
    let wc = 2.0 * cfg.omega_c() / p.omega_rf;
    Ok(MathieuParameters { a_z, q_z, a_r: wc * wc / 4.0 - a_z / 2.0, q_r: -q_z / 2.0 })
}

/// Voltages `(U0, V0)` that place an RF trap at the axial point `(a_z, q_z)`.
pub fn voltages_for_mathieu(params: &TrapParams, a_z: f64, q_z: f64) -> (f64, f64) {
    let geometry = params.r0 * params.r0 + 2.0 * params.z0 * params.z0;
    let denom = params.mass * params.omega_rf * params.omega_rf * geometry;
    (-a_z * denom / (16.0 * params.charge), q_z * denom / (8.0 * params.charge))
}

/// The trap in scheme units, ready for repeated evaluation.
///
/// `lambda_a(tau) = static_a + drive_a cos(nu tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTrap {
    static_a: f64,
    drive_a: f64,
    nu: f64,
    omega_c: f64,
    k_a: f64,
    k_r: f64,
    l: u32,
    rf: bool,
}

impl ReducedTrap {
    pub fn new(cfg: &TrapConfig, scheme: &DimensionlessScheme) -> Self {
        let p = cfg.params();
        let t2 = scheme.time_scale * scheme.time_scale;
        let scale = -4.0 * p.charge / p.mass / cfg.geometry() * t2;
        let (k_a, k_r) = bargmann_indices(cfg);
        Self {
            static_a: scale * p.u0,
            drive_a: if cfg.has_rf() { scale * p.v0 } else { 0.0 },
            nu: if cfg.has_rf() { p.omega_rf * scheme.time_scale } else { 0.0 },
            omega_c: cfg.omega_c() * scheme.time_scale,
            k_a,
            k_r,
            l: p.l,
            rf: cfg.has_rf(),
        }
    }

    pub fn lambda_axial(&self, tau: f64) -> f64 {
        if self.drive_a == 0.0 {
            self.static_a
        } else {
            self.static_a + self.drive_a * (self.nu * tau).cos()
        }
    }

    pub fn lambda(&self, mode: Mode, tau: f64) -> f64 {
        let la = self.lambda_axial(tau);
        match mode {
            Mode::Axial => la,
            Mode::Radial => (self.omega_c * self.omega_c - 2.0 * la) / 4.0,
        }
    }

    pub fn alpha_beta(&self, mode: Mode, tau: f64) -> (f64, f64) {
        let lambda = self.lambda(mode, tau);
        (lambda + 1.0, lambda - 1.0)
    }

    /// `q A(t)` in scheme units (energy per squared scheme length).
    pub fn charge_potential(&self, tau: f64) -> f64 {
        -self.lambda_axial(tau) / 4.0
    }

    /// Cyclotron frequency in scheme units.
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn k(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Axial => self.k_a,
            Mode::Radial => self.k_r,
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Constant energy shift `-(omega_c/2) l`.
    pub fn angular_shift(&self) -> f64 {
        -0.5 * self.omega_c * self.l as f64
    }

    pub fn is_autonomous(&self) -> bool {
        self.drive_a == 0.0
    }

    /// Drive period in scheme units: `pi` for RF traps, `None` for Penning.
    pub fn rf_period(&self) -> Option<f64> {
        self.rf.then(|| 2.0 * PI / self.nu)
    }
}
