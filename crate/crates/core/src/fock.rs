//! Truncated-Fock reference for the semiclassical model.
//!
//! Each mode carries a discrete-series SU(1,1) irrep truncated to `N` levels:
//! `K0 = diag(k + n)`, `K+ |n> = sqrt((n+1)(n+2k)) |n+1>`, `K- = K+^T`.
//! Two-mode objects live on the product space in axial-major layout: the
//! amplitude of `|n_a> (x) |n_r>` sits at index `n_a * N_r + n_r`.
//!
//! Nothing here uses the closed forms of [`crate::su11`] or
//! [`crate::husimi`]; the two sides check each other.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::husimi::{h2k_term, AnharmonicSpec};
use crate::ode::{Method, Solver};
use crate::su11::disk_gap;
use crate::trap::{DimensionlessScheme, Mode, ReducedTrap, TrapConfig};

/// Smallest truncation accepted by [`FockRep::new`].
pub const MIN_TRUNCATION: usize = 16;
/// Neglected coherent-state weight tolerated by [`cs_vector`].
pub const CS_TAIL_TOL: f64 = 1e-12;
/// Largest dimension [`ProductOperator::to_dense`] will materialize.
pub const DENSE_DIM_CAP: usize = 4096;
/// Largest product dimension a [`HamiltonianFamily`] may span.
pub const PRODUCT_DIM_CAP: usize = 1 << 20;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Real square band matrix, row-major over the band.
#[derive(Debug, Clone, PartialEq)]
pub struct Banded {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, data: vec![0.0; n * (lower + upper + 1)] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self { n: d.len(), lower: 0, upper: 0, data: d.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn cols(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower)..(i + self.upper + 1).min(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.n || j >= self.n || j + self.lower < i || j > i + self.upper {
            0.0
        } else {
            self.data[i * self.width() + j + self.lower - i]
        }
    }

    fn entry(&mut self, i: usize, j: usize) -> &mut f64 {
        let w = self.width();
        &mut self.data[i * w + j + self.lower - i]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n, self.upper, self.lower);
        for i in 0..self.n {
            for j in self.cols(i) {
                *out.entry(j, i) = self.get(i, j);
            }
        }
        out
    }

    pub fn matmul(&self, other: &Banded) -> Self {
        assert_eq!(self.n, other.n, "band matrix dimensions differ");
        let mut out = Self::zeros(self.n, self.lower + other.lower, self.upper + other.upper);
        for i in 0..self.n {
            for m in self.cols(i) {
                let a = self.get(i, m);
                if a == 0.0 {
                    continue;
                }
                for j in other.cols(m) {
                    *out.entry(i, j) += a * other.get(m, j);
                }
            }
        }
        out
    }

    /// `sum_i c_i M_i` over matrices of equal dimension.
    pub fn combine(terms: &[(f64, &Banded)]) -> Self {
        let n = terms.first().map_or(0, |(_, m)| m.n);
        let lower = terms.iter().map(|(_, m)| m.lower).max().unwrap_or(0);
        let upper = terms.iter().map(|(_, m)| m.upper).max().unwrap_or(0);
        let mut out = Self::zeros(n, lower, upper);
        for (c, m) in terms {
            assert_eq!(m.n, n, "band matrix dimensions differ");
            for i in 0..n {
                for j in m.cols(i) {
                    *out.entry(i, j) += c * m.get(i, j);
                }
            }
        }
        out
    }

    /// Leading `m x m` block.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.n);
        let mut out = Self::zeros(m, self.lower, self.upper);
        for i in 0..m {
            for j in self.cols(i).filter(|&j| j < m) {
                *out.entry(i, j) = self.get(i, j);
            }
        }
        out
    }

    /// `y += c A x`
    pub fn apply_add(&self, c: f64, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let row = &self.data[i * self.width()..(i + 1) * self.width()];
            let mut acc = ZERO;
            for j in self.cols(i) {
                acc += row[j + self.lower - i] * x[j];
            }
            *yi += c * acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// `<psi|A|psi> / <psi|psi>`
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        if psi.amps.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: psi.amps.len() });
        }
        let mut y = vec![ZERO; self.n];
        self.apply_add(1.0, &psi.amps, &mut y);
        Ok(inner(&psi.amps, &y) / psi.norm_sqr())
    }
}

/// Truncated irrep `(K0, K+, K-)` of Bargmann index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockRep {
    k: f64,
    n: usize,
    pub k0: Banded,
    pub kplus: Banded,
    pub kminus: Banded,
}

fn raising(k: f64, n: usize) -> Banded {
    let mut m = Banded::zeros(n, 1, 0);
    for i in 0..n.saturating_sub(1) {
        *m.entry(i + 1, i) = (((i + 1) as f64) * (i as f64 + 2.0 * k)).sqrt();
    }
    m
}

fn weight_diagonal(k: f64, n: usize) -> Banded {
    Banded::diagonal(&(0..n).map(|i| k + i as f64).collect::<Vec<_>>())
}

impl FockRep {
    pub fn new(k: f64, n: usize) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config { key: "k", reason: format!("Bargmann index must be positive, got {k}") });
        }
        if n < MIN_TRUNCATION {
            return Err(Error::Config { key: "truncation", reason: format!("N must be >= {MIN_TRUNCATION}, got {n}") });
        }
        let kplus = raising(k, n);
        Ok(Self { k, n, k0: weight_diagonal(k, n), kminus: kplus.transpose(), kplus })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `K1 = (K+ + K-)/2`
    pub fn k1(&self) -> Banded {
        Banded::combine(&[(0.5, &self.kplus), (0.5, &self.kminus)])
    }

    /// `(2 (K0 + K1))^p`, i.e. `z^{2p}` or `rho^{2p}`, with matrix elements of
    /// the untruncated operator (the power is formed `p` levels above `N`).
    pub fn coordinate_power(&self, p: usize) -> Banded {
        let big = self.n + p;
        let kp = raising(self.k, big);
        let km = kp.transpose();
        let x = Banded::combine(&[(2.0, &weight_diagonal(self.k, big)), (1.0, &kp), (1.0, &km)]);
        let mut acc = Banded::identity(big);
        for _ in 0..p {
            acc = acc.matmul(&x);
        }
        acc.truncate(self.n)
    }

    /// `K0^2 - K1^2 - K2^2` from the truncated matrices, with `K2 = (K+ - K-)/(2i)`.
    pub fn casimir(&self) -> Banded {
        let k1 = self.k1();
        let diff = Banded::combine(&[(1.0, &self.kplus), (-1.0, &self.kminus)]);
        // K2^2 = -(K+ - K-)^2 / 4
        Banded::combine(&[(1.0, &self.k0.matmul(&self.k0)), (-1.0, &k1.matmul(&k1)), (0.25, &diff.matmul(&diff))])
    }
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Single-mode state in a truncated irrep.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub k: f64,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amps, &other.amps)
    }
}

/// Squared normalized coherent-state amplitudes `|c_n|^2`, `n = 0, 1, ...`,
/// continued until they are negligible (and at least `min_len` of them).
fn cs_weights(r2: f64, k: f64, min_len: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(min_len.max(64));
    let mut cur = (1.0 - r2).powf(2.0 * k);
    let mut n = 0usize;
    loop {
        w.push(cur);
        // stop once the terms are decreasing and far below the tolerance
        let ratio = r2 * (2.0 * k + n as f64) / (n as f64 + 1.0);
        if w.len() >= min_len && ratio < 1.0 && cur < 1e-40 {
            break;
        }
        if w.len() > 50_000_000 {
            break;
        }
        cur *= ratio;
        n += 1;
    }
    w
}

/// Smallest truncation whose neglected coherent-state weight is below
/// [`CS_TAIL_TOL`], never less than [`MIN_TRUNCATION`].
pub fn suggested_truncation(z: C64, k: f64) -> usize {
    let w = cs_weights(z.norm_sqr(), k, 0);
    let mut tail = 0.0;
    let mut n = w.len();
    for (i, wi) in w.iter().enumerate().rev() {
        if tail + wi >= CS_TAIL_TOL {
            break;
        }
        tail += wi;
        n = i;
    }
    n.max(MIN_TRUNCATION)
}

/// Unnormalized coherent-state amplitudes `sqrt(Gamma(2k+n)/(n! Gamma(2k))) z^n`,
/// so that `<psi(w)|psi(z)> = (1 - w* z)^{-2k}`.
pub fn cs_vector_unnormalized(z: C64, rep: &FockRep) -> StateVector {
    let k = rep.k;
    let mut amps = Vec::with_capacity(rep.n);
    let mut cur = C64::new(1.0, 0.0);
    for n in 0..rep.n {
        amps.push(cur);
        cur *= z * ((2.0 * k + n as f64) / (n as f64 + 1.0)).sqrt();
    }
    StateVector { k, amps }
}

/// Normalized Perelomov coherent state `|z>` in `rep`.
pub fn cs_vector(z: C64, rep: &FockRep) -> Result<StateVector> {
    let gap = disk_gap(z)?;
    let w = cs_weights(z.norm_sqr(), rep.k, rep.n);
    let tail: f64 = w[rep.n..].iter().rev().sum();
    if tail >= CS_TAIL_TOL {
        return Err(Error::TruncationInsufficient { n: rep.n, tail, suggested: suggested_truncation(z, rep.k) });
    }
    let mut psi = cs_vector_unnormalized(z, rep);
    let norm = gap.powf(rep.k);
    for a in psi.amps.iter_mut() {
        *a *= norm;
    }
    Ok(psi)
}

/// State on the product space, axial-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub na: usize,
    pub nr: usize,
    pub amps: Vec<C64>,
}

impl ProductVector {
    pub fn from_factors(axial: &StateVector, radial: &StateVector) -> Self {
        let (na, nr) = (axial.amps.len(), radial.amps.len());
        let mut amps = Vec::with_capacity(na * nr);
        for a in &axial.amps {
            amps.extend(radial.amps.iter().map(|r| a * r));
        }
        Self { na, nr, amps }
    }

    /// Product coherent state `|z_a> (x) |z_r>`.
    pub fn coherent(z_a: C64, z_r: C64, rep_a: &FockRep, rep_r: &FockRep) -> Result<Self> {
        Ok(Self::from_factors(&cs_vector(z_a, rep_a)?, &cs_vector(z_r, rep_r)?))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &ProductVector) -> C64 {
        inner(&self.amps, &other.amps)
    }

    /// Population of the highest retained level of either mode.
    pub fn edge_population(&self) -> f64 {
        let top_a: f64 = self.amps[(self.na - 1) * self.nr..].iter().map(|a| a.norm_sqr()).sum();
        let top_r: f64 = (0..self.na - 1).map(|ia| self.amps[ia * self.nr + self.nr - 1].norm_sqr()).sum();
        top_a + top_r
    }
}

/// One Kronecker term `c A (x) R`; `None` stands for the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct KronTerm {
    pub coef: f64,
    pub axial: Option<Banded>,
    pub radial: Option<Banded>,
}

/// Real symmetric operator on the product space, as a sum of Kronecker terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOperator {
    pub na: usize,
    pub nr: usize,
    pub terms: Vec<KronTerm>,
}

impl ProductOperator {
    pub fn dim(&self) -> usize {
        self.na * self.nr
    }

    /// `y += H x`; `scratch` must have the product dimension.
    pub fn apply_add(&self, x: &[C64], y: &mut [C64], scratch: &mut [C64]) {
        let nr = self.nr;
        for term in &self.terms {
            match (&term.axial, &term.radial) {
                (None, None) => {
                    for (yi, xi) in y.iter_mut().zip(x) {
                        *yi += term.coef * xi;
                    }
                }
                (None, Some(r)) => {
                    for ia in 0..self.na {
                        let rows = ia * nr..(ia + 1) * nr;
                        r.apply_add(term.coef, &x[rows.clone()], &mut y[rows]);
                    }
                }
                (Some(a), radial) => {
                    let src: &[C64] = match radial {
                        Some(r) => {
                            scratch.fill(ZERO);
                            for ia in 0..self.na {
                                let rows = ia * nr..(ia + 1) * nr;
                                r.apply_add(1.0, &x[rows.clone()], &mut scratch[rows]);
                            }
                            scratch
                        }
                        None => x,
                    };
                    for ia in 0..self.na {
                        for ja in a.cols(ia) {
                            let c = term.coef * a.get(ia, ja);
                            if c == 0.0 {
                                continue;
                            }
                            let (dst, from) = (ia * nr, ja * nr);
                            for ir in 0..nr {
                                y[dst + ir] += c * src[from + ir];
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; x.len()];
        let mut scratch = vec![ZERO; x.len()];
        self.apply_add(x, &mut y, &mut scratch);
        y
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        if dim > DENSE_DIM_CAP {
            return Err(Error::DimensionCap { dim, cap: DENSE_DIM_CAP });
        }
        let mut out = DMatrix::zeros(dim, dim);
        let id_a = Banded::identity(self.na);
        let id_r = Banded::identity(self.nr);
        for term in &self.terms {
            let a = term.axial.as_ref().unwrap_or(&id_a);
            let r = term.radial.as_ref().unwrap_or(&id_r);
            for ia in 0..self.na {
                for ja in a.cols(ia) {
                    let av = a.get(ia, ja);
                    for ir in 0..self.nr {
                        for jr in r.cols(ir) {
                            out[(ia * self.nr + ir, ja * self.nr + jr)] += term.coef * av * r.get(ir, jr);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `<psi|Op|psi> / <psi|psi>`
pub fn expectation(op: &ProductOperator, psi: &ProductVector) -> Result<C64> {
    if psi.amps.len() != op.dim() || psi.na != op.na {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: psi.amps.len() });
    }
    Ok(inner(&psi.amps, &op.apply(&psi.amps)) / psi.norm_sqr())
}

/// [`expectation`] for a Hermitian operator; rejects a non-negligible imaginary part.
pub fn expectation_real(op: &ProductOperator, psi: &ProductVector) -> Result<f64> {
    let v = expectation(op, psi)?;
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(Error::NonRealExpectation(v.im));
    }
    Ok(v.re)
}

/// The trap Hamiltonian on a fixed product space, with its time dependence
/// kept symbolic: `H(tau) = sum_c (alpha_c K0_c + beta_c K1_c)
/// + qA(tau) sum_k c_k H_2k(rho^2, z^2) - (omega_c/2) l`.
#[derive(Debug, Clone)]
pub struct HamiltonianFamily {
    trap: ReducedTrap,
    na: usize,
    nr: usize,
    k0: [Banded; 2],
    k1: [Banded; 2],
    // anharmonic part without the qA(tau) prefactor
    anharmonic: Vec<KronTerm>,
}

impl HamiltonianFamily {
    pub fn new(trap: ReducedTrap, spec: &AnharmonicSpec, rep_a: &FockRep, rep_r: &FockRep) -> Result<Self> {
        let (na, nr) = (rep_a.dim(), rep_r.dim());
        if na * nr > PRODUCT_DIM_CAP {
            return Err(Error::DimensionCap { dim: na * nr, cap: PRODUCT_DIM_CAP });
        }
        if (rep_a.k() - trap.k(Mode::Axial)).abs() > 1e-15 || (rep_r.k() - trap.k(Mode::Radial)).abs() > 1e-15 {
            return Err(Error::Config {
                key: "truncation",
                reason: "Fock representations do not match the trap's Bargmann indices".into(),
            });
        }
        let mut anharmonic = Vec::new();
        for k in 2..=AnharmonicSpec::MAX_ORDER {
            let c = spec.c(k)?;
            if c == 0.0 {
                continue;
            }
            // rho^{2j} z^{2(k-j)}
            for j in 0..=k {
                anharmonic.push(KronTerm {
                    coef: c * h2k_term(k, j),
                    axial: (j < k).then(|| rep_a.coordinate_power(k - j)),
                    radial: (j > 0).then(|| rep_r.coordinate_power(j)),
                });
            }
        }
        Ok(Self { trap, na, nr, k0: [rep_a.k0.clone(), rep_r.k0.clone()], k1: [rep_a.k1(), rep_r.k1()], anharmonic })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.na, self.nr)
    }

    pub fn trap(&self) -> &ReducedTrap {
        &self.trap
    }

    /// The operator at scaled time `tau`.
    pub fn at(&self, tau: f64) -> ProductOperator {
        let (aa, ba) = self.trap.alpha_beta(Mode::Axial, tau);
        let (ar, br) = self.trap.alpha_beta(Mode::Radial, tau);
        let mut terms = vec![
            KronTerm { coef: 1.0, axial: Some(Banded::combine(&[(aa, &self.k0[0]), (ba, &self.k1[0])])), radial: None },
            KronTerm { coef: 1.0, axial: None, radial: Some(Banded::combine(&[(ar, &self.k0[1]), (br, &self.k1[1])])) },
        ];
        let shift = self.trap.angular_shift();
        if shift != 0.0 {
            terms.push(KronTerm { coef: shift, axial: None, radial: None });
        }
        let qa = self.trap.charge_potential(tau);
        terms.extend(self.anharmonic.iter().map(|t| KronTerm { coef: qa * t.coef, ..t.clone() }));
        ProductOperator { na: self.na, nr: self.nr, terms }
    }

    /// Generator `K0` of one mode, embedded in the product space.
    pub fn k0_of(&self, mode: Mode) -> ProductOperator {
        self.embed(mode, self.k0[mode as usize].clone())
    }

    pub fn k1_of(&self, mode: Mode) -> ProductOperator {
        self.embed(mode, self.k1[mode as usize].clone())
    }

    fn embed(&self, mode: Mode, m: Banded) -> ProductOperator {
        let term = match mode {
            Mode::Axial => KronTerm { coef: 1.0, axial: Some(m), radial: None },
            Mode::Radial => KronTerm { coef: 1.0, axial: None, radial: Some(m) },
        };
        ProductOperator { na: self.na, nr: self.nr, terms: vec![term] }
    }
}

/// The Hamiltonian at SI time `t` on the product space of `rep_a` and `rep_r`.
pub fn hamiltonian_matrix(
    cfg: &TrapConfig,
    t: f64,
    spec: &AnharmonicSpec,
    scheme: &DimensionlessScheme,
    rep_a: &FockRep,
    rep_r: &FockRep,
) -> Result<ProductOperator> {
    let family = HamiltonianFamily::new(ReducedTrap::new(cfg, scheme), spec, rep_a, rep_r)?;
    Ok(family.at(scheme.to_scaled_time(t)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Allowed `| <psi|psi> - 1 |`.
    pub norm_tol: f64,
    /// Allowed population of the highest retained levels.
    pub leak_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 1e-13, max_step: 0.05, norm_tol: 1e-8, leak_tol: 1e-10 }
    }
}

/// Integrates `i d psi/d tau = H(tau) psi` and returns the state at every
/// entry of `times` (the first entry is the start time). The norm is never
/// renormalized: drift beyond `norm_tol` or leakage into the top levels
/// beyond `leak_tol` aborts with [`Error::EvolutionFailure`].
pub fn evolve(
    psi0: &ProductVector,
    family: &HamiltonianFamily,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<(f64, ProductVector)>> {
    let (na, nr) = family.dims();
    if psi0.na != na || psi0.nr != nr {
        return Err(Error::DimensionMismatch { expected: na * nr, got: psi0.amps.len() });
    }
    let Some(&t0) = times.first() else {
        return Ok(Vec::new());
    };
    let norm0 = psi0.norm_sqr();
    if (norm0 - 1.0).abs() > 1e-12 {
        return Err(Error::EvolutionFailure {
            t: t0,
            reason: format!("initial state not normalized (norm^2 = {norm0})"),
        });
    }
    let check = |t: f64, psi: &ProductVector| -> Result<()> {
        let drift = (psi.norm_sqr() - 1.0).abs();
        if drift > opts.norm_tol {
            return Err(Error::EvolutionFailure { t, reason: format!("norm drift {drift:e}") });
        }
        let edge = psi.edge_population();
        if edge > opts.leak_tol {
            return Err(Error::EvolutionFailure { t, reason: format!("top-level population {edge:e}") });
        }
        Ok(())
    };

    let mut scratch = vec![ZERO; na * nr];
    let mut rhs = |tau: f64, y: &[C64], dy: &mut [C64]| -> Result<()> {
        dy.fill(ZERO);
        family.at(tau).apply_add(y, dy, &mut scratch);
        for d in dy.iter_mut() {
            *d = C64::new(d.im, -d.re);
        }
        Ok(())
    };
    let mut solver = Solver::new(Method::DormandPrince { rel_tol: opts.rel_tol, abs_tol: opts.abs_tol }, opts.max_step);
    let mut psi = psi0.clone();
    let mut tau = t0;
    let mut out = vec![(t0, psi.clone())];
    for &target in &times[1..] {
        let mut accept = |t: f64, y: &[C64]| -> Result<()> {
            let drift = (y.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs();
            if drift > opts.norm_tol {
                return Err(Error::EvolutionFailure { t, reason: format!("norm drift {drift:e}") });
            }
            Ok(())
        };
        solver.advance(&mut rhs, &mut tau, &mut psi.amps, target, &mut accept)?;
        check(tau, &psi)?;
        out.push((tau, psi.clone()));
    }
    Ok(out)
}
