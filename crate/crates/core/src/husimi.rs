//! Classical (Husimi) Hamiltonian: the coherent-state expectation value of
//! the full trap Hamiltonian, written as a polynomial in `xi` and `eta`.
//!
//! The coordinates enter through `z^2 = 2(K0 + K1)` (axial) and
//! `rho^2 = 2(K0 + K1)` (radial). On a coherent state the moments of the
//! null generator `X = K0 + K1` are pure monomials,
//!
//! ```text
//! <z| (2X)^j |z> = (2k)_j xi^j,      (2k)_j = 2k (2k+1) ... (2k+j-1),
//! ```
//!
//! because the displacement maps `X` to `xi` times a rotated copy of itself.
//! The anharmonic terms therefore only feed the quadratic and cubic `xi`
//! coefficients; nothing spills into lower orders.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::su11::{disk_gap, XiEta};
use crate::trap::{DimensionlessScheme, Mode, ReducedTrap, TrapConfig};

/// Anharmonic multipliers `c_2`, `c_3` of `H_4` and `H_6`, in scheme units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnharmonicSpec {
    coefficients: [f64; 2],
}

impl AnharmonicSpec {
    /// Highest supported order of `H_{2k}`.
    pub const MAX_ORDER: usize = 3;

    pub fn harmonic() -> Self {
        Self::default()
    }

    /// Builds a spec from `[c_2]` or `[c_2, c_3]`. Longer lists are rejected.
    pub fn new(coefficients: &[f64]) -> Result<Self> {
        if coefficients.len() > 2 {
            return Err(Error::UnsupportedOrder(coefficients.len() + 1));
        }
        let mut out = [0.0; 2];
        for (slot, &c) in out.iter_mut().zip(coefficients) {
            if !c.is_finite() {
                return Err(Error::Config { key: "anharmonic", reason: format!("coefficient {c} is not finite") });
            }
            *slot = c;
        }
        Ok(Self { coefficients: out })
    }

    pub fn c2(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn c3(&self) -> f64 {
        self.coefficients[1]
    }

    /// Coefficient of `H_{2k}`, for `k` in `{2, 3}`.
    pub fn c(&self, k: usize) -> Result<f64> {
        match k {
            2 | 3 => Ok(self.coefficients[k - 2]),
            _ => Err(Error::UnsupportedOrder(k)),
        }
    }

    pub fn is_harmonic(&self) -> bool {
        self.coefficients == [0.0; 2]
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Coefficient of `rho^{2j} z^{2k-2j}` in `H_{2k}`.
pub fn h2k_term(k: usize, j: usize) -> f64 {
    factorial(2 * k) / (4f64.powi(j as i32) * factorial(2 * k - 2 * j) * factorial(j).powi(2))
}

/// `H_{2k}(rho, z)` evaluated from `rho^2` and `z^2`.
pub fn h2k_polynomial(k: usize, rho2: f64, zz: f64) -> Result<f64> {
    if !(2..=AnharmonicSpec::MAX_ORDER).contains(&k) {
        return Err(Error::UnsupportedOrder(k));
    }
    Ok((0..=k).map(|j| h2k_term(k, j) * rho2.powi(j as i32) * zz.powi((k - j) as i32)).sum())
}

/// Rising factorial `x (x+1) ... (x+n-1)`.
pub fn rising_factorial(x: f64, n: usize) -> f64 {
    (0..n).map(|i| x + i as f64).product()
}

/// `<z| (2 (K0 + K1))^j |z>` for Bargmann index `k`: the coherent-state
/// expectation of `z^{2j}` (axial) or `rho^{2j}` (radial).
pub fn coordinate_moment(k: f64, j: usize, xi: f64) -> f64 {
    rising_factorial(2.0 * k, j) * xi.powi(j as i32)
}

/// Coefficients of
///
/// ```text
/// H = A_r eta_r + A_a eta_a + B_r xi_r + B_a xi_a
///   + C20 xi_r^2 + C11 xi_r xi_a + C02 xi_a^2
///   + D30 xi_r^3 + D21 xi_r^2 xi_a + D12 xi_r xi_a^2 + D03 xi_a^3 + const
/// ```
///
/// The first index of `C`/`D` is the power of `xi_r`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HusimiCoefficients {
    pub a_a: f64,
    pub a_r: f64,
    pub b_a: f64,
    pub b_r: f64,
    pub c20: f64,
    pub c11: f64,
    pub c02: f64,
    pub d30: f64,
    pub d21: f64,
    pub d12: f64,
    pub d03: f64,
    pub const_term: f64,
}

/// First derivatives of the Husimi polynomial in `(xi, eta)` per mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiPartials {
    pub dxi_a: f64,
    pub deta_a: f64,
    pub dxi_r: f64,
    pub deta_r: f64,
}

impl HusimiCoefficients {
    /// Coefficients at scaled time `tau`.
    pub fn at(trap: &ReducedTrap, spec: &AnharmonicSpec, tau: f64) -> Self {
        let mut out = Self { const_term: trap.angular_shift(), ..Self::default() };
        let (k_a, k_r) = (trap.k(Mode::Axial), trap.k(Mode::Radial));

        // alpha K0 + beta K1 with K0 = k (xi + eta)/2, K1 = k (xi - eta)/2
        let (alpha, beta) = trap.alpha_beta(Mode::Axial, tau);
        out.a_a = k_a * (alpha - beta) / 2.0;
        out.b_a = k_a * (alpha + beta) / 2.0;
        let (alpha, beta) = trap.alpha_beta(Mode::Radial, tau);
        out.a_r = k_r * (alpha - beta) / 2.0;
        out.b_r = k_r * (alpha + beta) / 2.0;

        if spec.is_harmonic() {
            return out;
        }
        let qa = trap.charge_potential(tau);
        // rho^{2j} z^{2(k-j)} -> (2k_r)_j (2k_a)_{k-j} xi_r^j xi_a^{k-j}
        let term = |k: usize, j: usize, c: f64| {
            qa * c * h2k_term(k, j) * rising_factorial(2.0 * k_r, j) * rising_factorial(2.0 * k_a, k - j)
        };
        let (c2, c3) = (spec.c2(), spec.c3());
        out.c02 = term(2, 0, c2);
        out.c11 = term(2, 1, c2);
        out.c20 = term(2, 2, c2);
        out.d03 = term(3, 0, c3);
        out.d12 = term(3, 1, c3);
        out.d21 = term(3, 2, c3);
        out.d30 = term(3, 3, c3);
        out
    }

    pub fn value(&self, xe_a: XiEta, xe_r: XiEta) -> f64 {
        let (xa, xr) = (xe_a.xi, xe_r.xi);
        self.a_r * xe_r.eta
            + self.a_a * xe_a.eta
            + self.b_r * xr
            + self.b_a * xa
            + (self.c20 * xr * xr + self.c11 * xr * xa + self.c02 * xa * xa)
            + (self.d30 * xr * xr * xr + self.d21 * xr * xr * xa + self.d12 * xr * xa * xa + self.d03 * xa * xa * xa)
            + self.const_term
    }

    pub fn partials(&self, xe_a: XiEta, xe_r: XiEta) -> HusimiPartials {
        let (xa, xr) = (xe_a.xi, xe_r.xi);
        HusimiPartials {
            dxi_r: self.b_r
                + 2.0 * self.c20 * xr
                + self.c11 * xa
                + 3.0 * self.d30 * xr * xr
                + 2.0 * self.d21 * xr * xa
                + self.d12 * xa * xa,
            dxi_a: self.b_a
                + self.c11 * xr
                + 2.0 * self.c02 * xa
                + self.d21 * xr * xr
                + 2.0 * self.d12 * xr * xa
                + 3.0 * self.d03 * xa * xa,
            deta_a: self.a_a,
            deta_r: self.a_r,
        }
    }

    /// Sum of every coefficient, i.e. the value at `z_a = z_r = 0`.
    pub fn sum(&self) -> f64 {
        self.a_a
            + self.a_r
            + self.b_a
            + self.b_r
            + self.c20
            + self.c11
            + self.c02
            + self.d30
            + self.d21
            + self.d12
            + self.d03
            + self.const_term
    }
}

/// Husimi coefficients of the trap at SI time `t`.
pub fn husimi_coefficients(
    cfg: &TrapConfig,
    t: f64,
    spec: &AnharmonicSpec,
    scheme: &DimensionlessScheme,
) -> HusimiCoefficients {
    HusimiCoefficients::at(&ReducedTrap::new(cfg, scheme), spec, scheme.to_scaled_time(t))
}

pub fn husimi_value(coeffs: &HusimiCoefficients, xe_a: XiEta, xe_r: XiEta) -> f64 {
    coeffs.value(xe_a, xe_r)
}

/// `(dH/dz_a*, dH/dz_r*)`.
pub fn husimi_gradient(coeffs: &HusimiCoefficients, z_a: C64, z_r: C64) -> Result<(C64, C64)> {
    let (gap_a, gap_r) = (disk_gap(z_a)?, disk_gap(z_r)?);
    let p = coeffs.partials(XiEta::from_z(z_a)?, XiEta::from_z(z_r)?);
    // d xi/dz* = (1+z)^2/(1-|z|^2)^2, d eta/dz* = -(1-z)^2/(1-|z|^2)^2
    let grad =
        |dxi: f64, deta: f64, z: C64, gap: f64| (dxi * (1.0 + z).powi(2) - deta * (1.0 - z).powi(2)) / (gap * gap);
    Ok((grad(p.dxi_a, p.deta_a, z_a, gap_a), grad(p.dxi_r, p.deta_r, z_r, gap_r)))
}
