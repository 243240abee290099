//! Hydrogen-like atom in a static field as a pencil over a nodeless Slater-type basis,
//! and the polarizability fit built on its lowest eigenvalue.
//!
//! With `E = -α²/2` the radial problem becomes `A|φ> = λB|φ>` with `A = 1/r + (ℰ/Z) r cos θ`,
//! `B = -∇²/2 + α²/2` and `λ = 1/Z`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::evolver::{run_evolution, EvolutionConfig, DeflatedOperator};
use crate::oracle::{solve_pencil, Pencil};
use crate::pauli::{decompose, DenseHermitian, PauliSum};
use crate::problems::random_theta;

pub const MAX_PADDED_DIM: usize = 1024;

/// Perturbative polarizability of hydrogen in atomic units.
pub const PERTURBATIVE_POLARIZABILITY: f64 = 4.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoConfig {
    /// Ratio of the orbital exponent to `α`.
    pub x: f64,
    pub alpha: f64,
    pub z: f64,
    pub field: f64,
    pub n_max: u32,
}

impl Default for StoConfig {
    fn default() -> Self {
        StoConfig {
            x: 0.9,
            alpha: -1.0,
            z: 1.0,
            field: 0.01,
            n_max: 2,
        }
    }
}

impl StoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x > 0.0) {
            return Err(Error::InvalidArgument(format!("x must be positive, got {}", self.x)));
        }
        if self.alpha == 0.0 || !self.alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite and nonzero".into()));
        }
        if self.z == 0.0 || !self.z.is_finite() {
            return Err(Error::InvalidArgument("Z must be finite and nonzero".into()));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(())
    }

    /// Orbital exponent `ξ = xα`.
    pub fn xi(&self) -> f64 {
        self.x * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n == 0 || l >= n || m.unsigned_abs() > l {
            return Err(Error::InvalidQuantumNumbers { n, l, m });
        }
        Ok(QuantumNumbers { n, l, m })
    }

    fn checked(self) -> Result<Self> {
        Self::new(self.n, self.l, self.m)
    }
}

/// `ln Γ(k)` for a positive integer `k`.
fn ln_gamma_int(k: u32) -> f64 {
    (2..k).map(|i| (i as f64).ln()).sum()
}

/// `Γ(n + n' + shift) / sqrt(Γ(2n' + 1) Γ(2n + 1))`.
fn gamma_ratio(n: u32, np: u32, shift: i32) -> f64 {
    let top = (n + np) as i32 + shift;
    (ln_gamma_int(top as u32) - 0.5 * (ln_gamma_int(2 * np + 1) + ln_gamma_int(2 * n + 1))).exp()
}

/// `<bra|A|ket>`.
pub fn sto_element_a(cfg: &StoConfig, bra: QuantumNumbers, ket: QuantumNumbers) -> Result<f64> {
    let (bra, ket) = (bra.checked()?, ket.checked()?);
    let xi = cfg.xi();
    let (n, np) = (ket.n, bra.n);
    let (l, m) = (ket.l as f64, ket.m as f64);
    let same_m = bra.m == ket.m;

    let mut bracket = 0.0;
    if bra.l == ket.l && same_m {
        bracket += 2.0 * xi;
    }
    if cfg.field != 0.0 && same_m {
        let angular = if bra.l == ket.l + 1 {
            ((l - m + 1.0) * (l + m + 1.0) / ((2.0 * l + 1.0) * (2.0 * l + 3.0))).sqrt()
        } else if ket.l > 0 && bra.l == ket.l - 1 {
            ((l - m) * (l + m) / ((2.0 * l - 1.0) * (2.0 * l + 1.0))).sqrt()
        } else {
            0.0
        };
        let s = (n + np) as f64;
        bracket += cfg.field / cfg.z * (s + 1.0) * s / (2.0 * xi) * angular;
    }
    if bracket == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_ratio(n, np, 0) * bracket)
}

/// `<bra|B|ket>`.
pub fn sto_element_b(cfg: &StoConfig, bra: QuantumNumbers, ket: QuantumNumbers) -> Result<f64> {
    let (bra, ket) = (bra.checked()?, ket.checked()?);
    if bra.l != ket.l || bra.m != ket.m {
        return Ok(0.0);
    }
    let (n, np) = (ket.n as f64, bra.n as f64);
    let l = ket.l as f64;
    let xi = cfg.xi();
    let s = n + np;
    let bracket = xi * xi * (4.0 * l * (l + 1.0) + s - (n - np).powi(2)) + cfg.alpha * cfg.alpha * s * (s - 1.0);
    Ok(gamma_ratio(ket.n, bra.n, -1) / 2.0 * bracket)
}

/// All `(n, l, m)` with `n ≤ n_max`, ordered by `n`, then `l`, then `m`.
pub fn basis(n_max: u32) -> Vec<QuantumNumbers> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for l in 0..n {
            for m in -(l as i32)..=(l as i32) {
                out.push(QuantumNumbers { n, l, m });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoPencil {
    pub config: StoConfig,
    pub basis: Vec<QuantumNumbers>,
    pub a_mat: DenseHermitian,
    pub b_mat: DenseHermitian,
    /// `diag(A, I)` padded to a power-of-two dimension.
    pub padded_a: DenseHermitian,
    pub padded_b: DenseHermitian,
}

impl StoPencil {
    pub fn num_qubits(&self) -> usize {
        self.padded_a.dim().trailing_zeros() as usize
    }

    pub fn pencil(&self) -> Result<Pencil> {
        Pencil::new(self.padded_a.clone(), self.padded_b.clone())
    }

    pub fn unpadded_pencil(&self) -> Result<Pencil> {
        Pencil::new(self.a_mat.clone(), self.b_mat.clone())
    }

    /// Pauli forms of the padded matrices.
    pub fn pauli_operators(&self) -> Result<(PauliSum, PauliSum)> {
        Ok((decompose(&self.padded_a)?, decompose(&self.padded_b)?))
    }
}

fn pad(m: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(dim, dim);
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

pub fn build_pencil(cfg: &StoConfig) -> Result<StoPencil> {
    cfg.validate()?;
    let basis = basis(cfg.n_max);
    let size = basis.len();
    let padded = size.next_power_of_two().max(2);
    if padded > MAX_PADDED_DIM {
        return Err(Error::SizeOverflow(size));
    }
    let mut a = DMatrix::zeros(size, size);
    let mut b = DMatrix::zeros(size, size);
    for (i, &bra) in basis.iter().enumerate() {
        for (j, &ket) in basis.iter().enumerate() {
            a[(i, j)] = sto_element_a(cfg, bra, ket)?;
            b[(i, j)] = sto_element_b(cfg, bra, ket)?;
        }
    }
    Ok(StoPencil {
        config: *cfg,
        padded_a: DenseHermitian::from_real(&pad(&a, padded))?,
        padded_b: DenseHermitian::from_real(&pad(&b, padded))?,
        a_mat: DenseHermitian::from_real(&a)?,
        b_mat: DenseHermitian::from_real(&b)?,
        basis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarizabilityFit {
    pub x: f64,
    pub g1: f64,
    pub g2: f64,
    pub polarizability: f64,
}

/// Solves `λ = g1/α + g2 ℰ²/(Z²α⁵)` for `(g1, g2)` from two `(α, λ)` samples.
pub fn fit_g(x: f64, samples: [(f64, f64); 2], field: f64, z: f64) -> Result<PolarizabilityFit> {
    let row = |alpha: f64| [1.0 / alpha, field * field / (z * z * alpha.powi(5))];
    let [(a1, l1), (a2, l2)] = samples;
    let (r1, r2) = (row(a1), row(a2));
    let det = r1[0] * r2[1] - r1[1] * r2[0];
    let scale = (r1[0] * r2[1]).abs() + (r1[1] * r2[0]).abs();
    if !(det.abs() > 1e-14 * scale) {
        return Err(Error::SingularFit(det));
    }
    let g1 = (l1 * r2[1] - l2 * r1[1]) / det;
    let g2 = (r1[0] * l2 - r2[0] * l1) / det;
    Ok(PolarizabilityFit {
        x,
        g1,
        g2,
        polarizability: 2.0 * g2 / g1.powi(3),
    })
}

/// First-order field response of the hydrogen-like ground level:
/// `(1/α + 9ℰ²/(4Z²α⁵), 9/2)`.
pub fn perturbative_reference(alpha: f64, z: f64, field: f64) -> (f64, f64) {
    (
        1.0 / alpha + 9.0 * field * field / (4.0 * z * z * alpha.powi(5)),
        PERTURBATIVE_POLARIZABILITY,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solver {
    Oracle,
    /// Imaginary-time evolution with a hardware-efficient ansatz started from seeded
    /// random angles.
    Evolver {
        layers: usize,
        config: EvolutionConfig,
        theta_seed: u64,
    },
}

impl Solver {
    pub fn evolver_default() -> Solver {
        Solver::Evolver {
            layers: 1,
            config: EvolutionConfig {
                d_tau: 0.05,
                tau_max: 60.0,
                ..EvolutionConfig::default()
            },
            theta_seed: crate::problems::EXAMPLE3_SEED,
        }
    }
}

/// Lowest eigenvalue of the padded pencil for `cfg`.
pub fn lowest_eigenvalue(cfg: &StoConfig, solver: &Solver) -> Result<f64> {
    let sto = build_pencil(cfg)?;
    match solver {
        Solver::Oracle => solve_pencil(&sto.pencil()?)?
            .pairs
            .first()
            .map(|p| p.lambda)
            .ok_or(Error::DegeneratePencil),
        Solver::Evolver {
            layers,
            config,
            theta_seed,
        } => {
            let (a, b) = sto.pauli_operators()?;
            let ans = Ansatz::hardware_efficient(sto.num_qubits(), *layers)?;
            let theta0 = random_theta(ans.num_params(), *theta_seed);
            let trace = run_evolution(&ans, &DeflatedOperator::from(a), &b, &theta0, config)?;
            Ok(trace.final_lambda())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    /// Lowest eigenvalue at each of the two `α` values.
    pub lambdas: Result<[f64; 2]>,
    pub fit: Result<PolarizabilityFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    /// Grid point with the largest fitted polarizability.
    pub argmax: Option<PolarizabilityFit>,
}

/// Fits the polarizability at every grid point. Failures are recorded per point.
pub fn sweep_x(x_grid: &[f64], template: &StoConfig, alphas: [f64; 2], solver: &Solver) -> Result<Sweep> {
    if x_grid.is_empty() {
        return Err(Error::InvalidArgument("x grid is empty".into()));
    }
    let points: Vec<SweepPoint> = x_grid
        .par_iter()
        .map(|&x| {
            let lam = |alpha| {
                lowest_eigenvalue(
                    &StoConfig {
                        x,
                        alpha,
                        ..*template
                    },
                    solver,
                )
            };
            let lambdas = lam(alphas[0]).and_then(|l0| Ok([l0, lam(alphas[1])?]));
            let fit = lambdas.clone().and_then(|l| {
                fit_g(x, [(alphas[0], l[0]), (alphas[1], l[1])], template.field, template.z)
            });
            SweepPoint { x, lambdas, fit }
        })
        .collect();
    let argmax = points
        .iter()
        .filter_map(|p| p.fit.as_ref().ok())
        .filter(|f| f.polarizability.is_finite())
        .max_by(|a, b| a.polarizability.total_cmp(&b.polarizability))
        .copied();
    Ok(Sweep { points, argmax })
}

/// `0.5, 0.6, …, 1.2`.
pub fn default_grid() -> Vec<f64> {
    (5..=12).map(|k| k as f64 / 10.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qn(n: u32, l: u32, m: i32) -> QuantumNumbers {
        QuantumNumbers::new(n, l, m).unwrap()
    }

    #[test]
    fn basis_order() {
        let b = basis(2);
        assert_eq!(
            b,
            vec![qn(1, 0, 0), qn(2, 0, 0), qn(2, 1, -1), qn(2, 1, 0), qn(2, 1, 1)]
        );
        assert_eq!(basis(3).len(), 14);
    }

    #[test]
    fn invalid_quantum_numbers() {
        assert!(QuantumNumbers::new(1, 1, 0).is_err());
        assert!(QuantumNumbers::new(2, 1, 2).is_err());
        let bad = QuantumNumbers { n: 0, l: 0, m: 0 };
        assert!(sto_element_a(&StoConfig::default(), bad, qn(1, 0, 0)).is_err());
    }

    #[test]
    fn field_free_dipole_vanishes() {
        let cfg = StoConfig {
            field: 0.0,
            ..StoConfig::default()
        };
        assert_eq!(sto_element_a(&cfg, qn(2, 1, 0), qn(1, 0, 0)).unwrap(), 0.0);
        assert_eq!(sto_element_b(&cfg, qn(2, 1, 0), qn(2, 0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn size_overflow() {
        let cfg = StoConfig {
            n_max: 15,
            ..StoConfig::default()
        };
        assert!(matches!(build_pencil(&cfg), Err(Error::SizeOverflow(_))));
    }

    #[test]
    fn fit_round_trip_and_singular() {
        let (g1, g2, e) = (1.0, 2.25, 0.01);
        let lam = |a: f64| g1 / a + g2 * e * e / a.powi(5);
        let f = fit_g(0.9, [(-1.0, lam(-1.0)), (-2.0, lam(-2.0))], e, 1.0).unwrap();
        assert!((f.g1 - 1.0).abs() < 1e-10 && (f.g2 - 2.25).abs() < 1e-6);
        assert!((f.polarizability - 4.5).abs() < 1e-5);
        assert!(matches!(
            fit_g(0.9, [(-1.0, 1.0), (-2.0, 0.5)], 0.0, 1.0),
            Err(Error::SingularFit(_))
        ));
    }

    #[test]
    fn perturbative_values() {
        assert_eq!(perturbative_reference(1.0, 1.0, 0.0), (1.0, 4.5));
        let (l, _) = perturbative_reference(1.0, 1.0, 0.01);
        assert!((l - (1.0 + 2.25e-4)).abs() < 1e-15);
    }
}
