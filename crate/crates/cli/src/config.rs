//! Run configuration: strict JSON in SI units.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use trapcs_core::{
    AnharmonicSpec, AxialSector, DimensionlessScheme, IntegratorConfig, IntegratorScheme, TrapConfig, TrapKind,
    TrapParams,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Paul,
    Penning,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorName {
    #[default]
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    #[default]
    Rk45,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatName {
    #[default]
    Csv,
}

/// Trap and ion parameters, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub kind: KindName,
    /// kg
    pub mass: f64,
    /// C, signed
    pub charge: f64,
    /// V
    #[serde(default)]
    pub u0: f64,
    /// V
    #[serde(default)]
    pub v0: f64,
    /// rad/s
    #[serde(default)]
    pub omega_rf: f64,
    /// m
    pub r0: f64,
    /// m
    pub z0: f64,
    /// T
    #[serde(default)]
    pub b0: f64,
    #[serde(default)]
    pub l: i64,
    #[serde(default)]
    pub axial_sector: SectorName,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnharmonicSection {
    #[serde(default)]
    pub c2: f64,
    #[serde(default)]
    pub c3: f64,
}

/// Initial disk points as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub z_a: [f64; 2],
    #[serde(default)]
    pub z_r: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "defaults::rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "defaults::abs_tol")]
    pub abs_tol: f64,
    /// Largest step in scheme time; the fixed step for `rk4`.
    #[serde(default = "defaults::max_step")]
    pub max_step: f64,
    #[serde(default)]
    pub scheme: SchemeName,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            rel_tol: defaults::rel_tol(),
            abs_tol: defaults::abs_tol(),
            max_step: defaults::max_step(),
            scheme: SchemeName::Rk45,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: FormatName,
    /// Keep every `stride`-th sample.
    #[serde(default = "defaults::stride")]
    pub stride: usize,
    #[serde(default = "defaults::samples_per_period")]
    pub samples_per_period: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: None,
            format: FormatName::Csv,
            stride: defaults::stride(),
            samples_per_period: defaults::samples_per_period(),
        }
    }
}

/// `(U0, V0)` grid for `scan`, volts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub u0: [f64; 2],
    pub v0: [f64; 2],
    pub n_u: usize,
    pub n_v: usize,
}

/// Oracle settings for `verify` and `dequantize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Fock truncation per mode for the dequantization check.
    #[serde(default = "defaults::truncation")]
    pub truncation: usize,
    /// Random coherent states per sampled check.
    #[serde(default = "defaults::cases")]
    pub cases: usize,
    /// Span of the trajectory overlap check, in drive periods.
    #[serde(default = "defaults::overlap_periods")]
    pub overlap_periods: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            truncation: defaults::truncation(),
            cases: defaults::cases(),
            overlap_periods: defaults::overlap_periods(),
        }
    }
}

mod defaults {
    pub fn rel_tol() -> f64 {
        1e-10
    }
    pub fn abs_tol() -> f64 {
        1e-12
    }
    pub fn max_step() -> f64 {
        0.05
    }
    pub fn stride() -> usize {
        1
    }
    pub fn samples_per_period() -> usize {
        32
    }
    pub fn duration() -> f64 {
        10.0
    }
    pub fn truncation() -> usize {
        400
    }
    pub fn cases() -> usize {
        20
    }
    pub fn overlap_periods() -> f64 {
        2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub trap: TrapSection,
    #[serde(default)]
    pub anharmonic: AnharmonicSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    /// Number of drive periods (RF period, or the cyclotron period for a Penning trap).
    #[serde(default = "defaults::duration")]
    pub duration: f64,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub verify: VerifySection,
}

/// A configuration with every derived quantity resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub trap: TrapConfig,
    pub spec: AnharmonicSpec,
    pub scheme: DimensionlessScheme,
    pub icfg: IntegratorConfig,
    pub z_a: C64,
    pub z_r: C64,
}

impl Resolved {
    /// One drive period in scheme time: `pi` for RF traps, `2 pi` (cyclotron) for Penning.
    pub fn period(&self) -> f64 {
        if self.trap.has_rf() {
            PI
        } else {
            2.0 * PI
        }
    }

    pub fn t_end(&self) -> f64 {
        self.config.duration * self.period()
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config { key: key.to_string(), reason: reason.into() }
}

fn finite(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be finite, got {v}")))
    }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn disk_point(key: &str, p: [f64; 2]) -> Result<C64, CliError> {
    finite(key, p[0])?;
    finite(key, p[1])?;
    let z = C64::new(p[0], p[1]);
    trapcs_core::su11::disk_gap(z).map_err(|e| invalid(key, e.to_string()))?;
    Ok(z)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Compact JSON of the configuration with every default filled in.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    pub fn trap_params(&self) -> Result<TrapParams, CliError> {
        let t = &self.trap;
        if t.l < 0 {
            return Err(invalid("trap.l", format!("orbital quantum number must be >= 0, got {}", t.l)));
        }
        let l = u32::try_from(t.l).map_err(|_| invalid("trap.l", format!("too large: {}", t.l)))?;
        Ok(TrapParams {
            mass: t.mass,
            charge: t.charge,
            u0: t.u0,
            v0: t.v0,
            omega_rf: t.omega_rf,
            r0: t.r0,
            z0: t.z0,
            b0: t.b0,
            l,
            kind: match t.kind {
                KindName::Paul => TrapKind::Paul,
                KindName::Penning => TrapKind::Penning,
                KindName::Combined => TrapKind::Combined,
            },
            axial_sector: match t.axial_sector {
                SectorName::Even => AxialSector::Even,
                SectorName::Odd => AxialSector::Odd,
            },
        })
    }

    /// Validates every section and converts SI input to scheme units.
    pub fn resolve(self) -> Result<Resolved, CliError> {
        let trap = TrapConfig::new(self.trap_params()?).map_err(|e| match e {
            trapcs_core::Error::Config { key, reason } => invalid(&format!("trap.{key}"), reason),
            other => CliError::Core(other),
        })?;
        let a = &self.anharmonic;
        finite("anharmonic.c2", a.c2)?;
        finite("anharmonic.c3", a.c3)?;
        let spec = AnharmonicSpec::new(&[a.c2, a.c3]).map_err(CliError::Core)?;

        let i = &self.integrator;
        positive("integrator.rel_tol", i.rel_tol)?;
        positive("integrator.abs_tol", i.abs_tol)?;
        positive("integrator.max_step", i.max_step)?;
        let icfg = IntegratorConfig {
            rel_tol: i.rel_tol,
            abs_tol: i.abs_tol,
            max_step: i.max_step,
            scheme: match i.scheme {
                SchemeName::Rk45 => IntegratorScheme::AdaptiveRk45,
                SchemeName::Rk4 => IntegratorScheme::FixedRk4,
            },
        };

        let z_a = disk_point("initial.z_a", self.initial.z_a)?;
        let z_r = disk_point("initial.z_r", self.initial.z_r)?;
        positive("duration", self.duration)?;

        let o = &self.output;
        if o.stride == 0 {
            return Err(invalid("output.stride", "must be >= 1"));
        }
        if o.samples_per_period == 0 {
            return Err(invalid("output.samples_per_period", "must be >= 1"));
        }

        if let Some(g) = &self.grid {
            for (key, v) in [("grid.u0", g.u0), ("grid.v0", g.v0)] {
                finite(key, v[0])?;
                finite(key, v[1])?;
            }
            if g.n_u < 2 {
                return Err(invalid("grid.n_u", format!("must be >= 2, got {}", g.n_u)));
            }
            if g.n_v < 2 {
                return Err(invalid("grid.n_v", format!("must be >= 2, got {}", g.n_v)));
            }
        }

        let v = &self.verify;
        if v.truncation < trapcs_core::fock::MIN_TRUNCATION {
            return Err(invalid(
                "verify.truncation",
                format!("must be >= {}, got {}", trapcs_core::fock::MIN_TRUNCATION, v.truncation),
            ));
        }
        if v.cases == 0 {
            return Err(invalid("verify.cases", "must be >= 1"));
        }
        positive("verify.overlap_periods", v.overlap_periods)?;

        let scheme = DimensionlessScheme::for_config(&trap);
        Ok(Resolved { config: self, trap, spec, scheme, icfg, z_a, z_r })
    }
}
