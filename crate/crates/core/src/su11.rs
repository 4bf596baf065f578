//! Single-mode SU(1,1) coherent states on the unit disk.
//!
//! A Perelomov coherent state is labelled by a point `z` of the open unit
//! disk and the Bargmann index `k` of the representation. Everything here is
//! a closed-form function of `(z, k)`; the truncated Fock oracle in
//! [`crate::fock`] reproduces the same numbers by brute force.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Points with `|z| > 1 - DISK_GUARD` are rejected. The exact flow never
/// reaches the boundary, so hitting the guard means the integrator failed or
/// the motion is unstable.
pub const DISK_GUARD: f64 = 1e-12;

/// Returns `1 - |z|^2` after checking that `z` lies inside the guard band.
#[inline]
pub fn disk_gap(z: C64) -> Result<f64> {
    let modulus = z.norm();
    if modulus.is_nan() || modulus > 1.0 - DISK_GUARD {
        return Err(Error::Domain { modulus, guard: DISK_GUARD });
    }
    Ok((1.0 - modulus) * (1.0 + modulus))
}

/// `1 - |z|^2` for any point of the open disk, ignoring the guard band.
/// Used for intermediate integrator stages.
#[inline]
pub(crate) fn open_disk_gap(z: C64) -> Result<f64> {
    let modulus = z.norm();
    if modulus.is_nan() || modulus >= 1.0 {
        return Err(Error::Domain { modulus, guard: 0.0 });
    }
    Ok((1.0 - modulus) * (1.0 + modulus))
}

/// One SU(1,1) coherent state: a disk point plus its Bargmann index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsPoint {
    z: C64,
    k: f64,
}

impl CsPoint {
    pub fn new(z: C64, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config { key: "k", reason: format!("Bargmann index must be positive, got {k}") });
        }
        disk_gap(z)?;
        Ok(Self { z, k })
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// The real variables `xi = |1+z|^2/(1-|z|^2)` and `eta = |1-z|^2/(1-|z|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiEta {
    pub xi: f64,
    pub eta: f64,
}

impl XiEta {
    /// Computes `(xi, eta)` for a raw disk coordinate.
    pub fn from_z(z: C64) -> Result<Self> {
        Ok(Self::with_gap(z, disk_gap(z)?))
    }

    pub(crate) fn from_z_open(z: C64) -> Result<Self> {
        Ok(Self::with_gap(z, open_disk_gap(z)?))
    }

    fn with_gap(z: C64, gap: f64) -> Self {
        Self { xi: (1.0 + z).norm_sqr() / gap, eta: (1.0 - z).norm_sqr() / gap }
    }
}

/// Coherent-state expectation values of `K0`, `K1`, `K2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorExpectations {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
}

impl GeneratorExpectations {
    /// `k0^2 - k1^2 - k2^2`, equal to `k^2` on every coherent-state orbit.
    pub fn casimir(&self) -> f64 {
        self.k0 * self.k0 - self.k1 * self.k1 - self.k2 * self.k2
    }
}

pub fn xi_eta(p: &CsPoint) -> Result<XiEta> {
    XiEta::from_z(p.z)
}

/// Closed-form `<K0>`, `<K1>`, `<K2>` on the coherent state `p`, with
/// `K1 = (K+ + K-)/2` and `K2 = (K+ - K-)/(2i)`.
pub fn expect_generators(p: &CsPoint) -> Result<GeneratorExpectations> {
    let gap = disk_gap(p.z)?;
    let k = p.k;
    Ok(GeneratorExpectations {
        k0: k * (1.0 + p.z.norm_sqr()) / gap,
        k1: 2.0 * k * p.z.re / gap,
        // i k (z - z*) = -2 k Im z
        k2: -2.0 * k * p.z.im / gap,
    })
}

/// Symplectic weight `2k/(1-|z|^2)^2`, the mixed second derivative of
/// `ln <psi(z*)|psi(z)> = -2k ln(1 - z z*)`.
pub fn symplectic_form(p: &CsPoint) -> Result<f64> {
    let gap = disk_gap(p.z)?;
    Ok(2.0 * p.k / (gap * gap))
}

/// Wirtinger derivatives `(df/dz, df/dz*)` of a scalar field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wirtinger {
    pub dz: C64,
    pub dzbar: C64,
}

impl Wirtinger {
    pub fn new(dz: C64, dzbar: C64) -> Self {
        Self { dz, dzbar }
    }

    /// Derivatives of the coordinate function `f(z) = z`.
    pub fn coordinate() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Derivatives of `f(z) = z*`.
    pub fn conjugate_coordinate() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    /// Derivatives of `xi(z)`.
    pub fn xi(z: C64) -> Result<Self> {
        let gap = disk_gap(z)?;
        let g2 = gap * gap;
        Ok(Self::new((1.0 + z.conj()).powi(2) / g2, (1.0 + z).powi(2) / g2))
    }

    /// Derivatives of `eta(z)`.
    pub fn eta(z: C64) -> Result<Self> {
        let gap = disk_gap(z)?;
        let g2 = gap * gap;
        Ok(Self::new(-(1.0 - z.conj()).powi(2) / g2, -(1.0 - z).powi(2) / g2))
    }
}

/// Disk Poisson bracket
/// `{f, g} = (1-|z|^2)^2/(2ik) (df/dz dg/dz* - dg/dz df/dz*)`.
///
/// With `f = z` this yields the equation of motion `dz/dt = {z, H}`.
pub fn poisson_bracket(f: Wirtinger, g: Wirtinger, p: &CsPoint) -> Result<C64> {
    let gap = disk_gap(p.z)?;
    let prefactor = C64::new(0.0, -gap * gap / (2.0 * p.k));
    Ok(prefactor * (f.dz * g.dzbar - g.dz * f.dzbar))
}
