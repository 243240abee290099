//! Variational imaginary-time evolution for the pencil `A|φ> = λB|φ>`.
//!
//! Each step evaluates the generalized Rayleigh quotient `F = <A>/<B>`, assembles the
//! McLachlan system `Γ θ̇ = C` and advances `θ` by one explicit Euler step.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::circuit::{hadamard_test_expectation, overlap_test, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{combine, decompose, DenseHermitian, PauliSum};

/// Condition number above which `Γ + εI` is treated as singular.
pub const MAX_GAMMA_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    /// Every circuit quantity estimated from this many ancilla shots.
    Shots(u64),
}

impl Mode {
    fn shots(self) -> u64 {
        match self {
            Mode::Exact => 0,
            Mode::Shots(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub d_tau: f64,
    pub tau_max: f64,
    pub gamma_regularization: f64,
    /// Deflation strength applied to each lower level, in order. When shorter than the
    /// number of lower levels the last entry is reused.
    pub mu_list: Vec<f64>,
    pub mode: Mode,
    pub convergence_tol: f64,
    pub convergence_window: usize,
    pub b_norm_floor: f64,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            d_tau: 0.01,
            tau_max: 10.0,
            gamma_regularization: 1e-6,
            mu_list: Vec::new(),
            mode: Mode::Exact,
            convergence_tol: 1e-7,
            convergence_window: 10,
            b_norm_floor: 1e-8,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.d_tau > 0.0 && self.d_tau.is_finite()) {
            return bad(format!("d_tau must be positive, got {}", self.d_tau));
        }
        if !(self.tau_max >= self.d_tau) {
            return bad(format!(
                "tau_max ({}) must be at least d_tau ({})",
                self.tau_max, self.d_tau
            ));
        }
        if !(self.gamma_regularization >= 0.0) {
            return bad("gamma_regularization must be nonnegative".into());
        }
        if !(self.b_norm_floor > 0.0) {
            return bad("b_norm_floor must be positive".into());
        }
        if self.convergence_window == 0 {
            return bad("convergence_window must be at least 1".into());
        }
        if self.mode == Mode::Shots(0) {
            return bad("shot mode needs at least one shot".into());
        }
        Ok(())
    }

    /// Deflation strength for the `j`-th lower level.
    pub fn mu_for(&self, j: usize) -> Option<f64> {
        self.mu_list.get(j).or(self.mu_list.last()).copied()
    }
}

/// A deflation term `μ B|g><g|B` with `<g|B|g> = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflationTerm {
    pub mu: f64,
    pub g: StateVector,
    bg: Vec<Complex64>,
}

impl DeflationTerm {
    /// `B|g>`.
    pub fn b_g(&self) -> &[Complex64] {
        &self.bg
    }

    /// Dense `B|g><g|B` without the `μ` factor.
    pub fn projector(&self) -> DMatrix<Complex64> {
        let v = DVector::from_column_slice(&self.bg);
        &v * v.adjoint()
    }

    /// Pauli expansion of `B|g><g|B` for reporting.
    pub fn pauli_expansion(&self) -> Result<PauliSum> {
        decompose(&DenseHermitian::new(self.projector())?)
    }
}

/// `A + Σ_j μ_j B|g_j><g_j|B`, with the rank-one terms kept in dense form.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflatedOperator {
    base: PauliSum,
    terms: Vec<DeflationTerm>,
}

impl From<PauliSum> for DeflatedOperator {
    fn from(base: PauliSum) -> Self {
        DeflatedOperator {
            base,
            terms: Vec::new(),
        }
    }
}

impl DeflatedOperator {
    pub fn base(&self) -> &PauliSum {
        &self.base
    }

    pub fn terms(&self) -> &[DeflationTerm] {
        &self.terms
    }

    pub fn num_qubits(&self) -> usize {
        self.base.num_qubits()
    }

    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.base.apply(amps);
        self.add_deflation(amps, 1.0, &mut out);
        out
    }

    /// `out += scale · Σ μ B|g><g|B |amps>`.
    fn add_deflation(&self, amps: &[Complex64], scale: f64, out: &mut [Complex64]) {
        for t in &self.terms {
            let proj: Complex64 = t.bg.iter().zip(amps).map(|(b, a)| b.conj() * a).sum();
            let w = proj * (t.mu * scale);
            for (o, b) in out.iter_mut().zip(&t.bg) {
                *o += w * b;
            }
        }
    }

    pub fn expectation(&self, amps: &[Complex64]) -> f64 {
        let base = self.base.expectation(amps);
        let defl: f64 = self
            .terms
            .iter()
            .map(|t| {
                let proj: Complex64 = t.bg.iter().zip(amps).map(|(b, a)| b.conj() * a).sum();
                t.mu * proj.norm_sqr()
            })
            .sum();
        base + defl
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let mut m = crate::pauli::reconstruct(&self.base).into_matrix();
        for t in &self.terms {
            m += t.projector() * Complex64::new(t.mu, 0.0);
        }
        m
    }

    /// Pauli expansion of the whole operator, for reporting.
    pub fn pauli_expansion(&self) -> Result<PauliSum> {
        decompose(&DenseHermitian::new(self.dense())?)
    }
}

/// `<g|B|g>` for a raw amplitude vector.
fn b_norm_sqr(b: &PauliSum, amps: &[Complex64]) -> f64 {
    b.expectation(amps)
}

/// Appends `μ B|g><g|B` (after B-normalizing `g`) to `a_eff`.
pub fn deflate(
    a_eff: &DeflatedOperator,
    b: &PauliSum,
    g: &StateVector,
    mu: f64,
    b_norm_floor: f64,
) -> Result<DeflatedOperator> {
    check_qubits(a_eff.num_qubits(), b.num_qubits())?;
    check_qubits(b.num_qubits(), g.num_qubits())?;
    let nb = b_norm_sqr(b, g.amplitudes());
    if !(nb > b_norm_floor) {
        return Err(Error::NotBNormalizable(nb));
    }
    let g = g.scaled(Complex64::new(1.0 / nb.sqrt(), 0.0));
    let bg = b.apply(g.amplitudes());
    let mut out = a_eff.clone();
    out.terms.push(DeflationTerm { mu, g, bg });
    Ok(out)
}

fn check_qubits(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::QubitMismatch { left, right });
    }
    Ok(())
}

/// `F = <ψ|A|ψ> / <ψ|B|ψ>`.
pub fn compute_f(
    state: &StateVector,
    a_eff: &DeflatedOperator,
    b: &PauliSum,
    b_norm_floor: f64,
) -> Result<f64> {
    check_qubits(state.num_qubits(), a_eff.num_qubits())?;
    check_qubits(state.num_qubits(), b.num_qubits())?;
    let den = b.expectation(state.amplitudes());
    if den.abs() < b_norm_floor {
        return Err(Error::SingularBCollapse {
            value: den,
            floor: b_norm_floor,
        });
    }
    Ok(a_eff.expectation(state.amplitudes()) / den)
}

/// Shot-estimated `F`: each Pauli term of `A` and `B` through its own Hadamard test.
/// Deflation terms are evaluated on the exact state.
pub fn compute_f_circuit(
    ansatz: &Ansatz,
    theta: &[f64],
    a_eff: &DeflatedOperator,
    b: &PauliSum,
    b_norm_floor: f64,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    check_qubits(ansatz.num_qubits(), a_eff.num_qubits())?;
    check_qubits(ansatz.num_qubits(), b.num_qubits())?;
    let mut estimate = |s: &PauliSum| -> Result<f64> {
        let mut acc = 0.0;
        for t in s.terms() {
            let r = hadamard_test_expectation(ansatz.gates(), theta, &t.word, shots, rng)?;
            acc += t.coeff * r.estimate;
        }
        Ok(acc)
    };
    let mut num = estimate(a_eff.base())?;
    let den = estimate(b)?;
    if !a_eff.terms().is_empty() {
        let psi = ansatz.prepare(theta)?;
        num += a_eff.expectation(psi.amplitudes()) - a_eff.base().expectation(psi.amplitudes());
    }
    if den.abs() < b_norm_floor {
        return Err(Error::SingularBCollapse {
            value: den,
            floor: b_norm_floor,
        });
    }
    Ok(num / den)
}

/// `Γ_ij = Re <∂_iψ|∂_jψ>` from dense derivative states.
pub fn compute_gamma(ansatz: &Ansatz, theta: &[f64]) -> Result<DMatrix<f64>> {
    let d = ansatz.derivative_states(theta)?;
    let n = d.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = d[i].inner(&d[j]).re;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `Γ` from ancilla overlap circuits: each `Re[f*_k f_l <Ṽ_k|Ṽ_l>]` is measured with the
/// phase `arg(f*_k f_l)` and scaled by `|f_k f_l|`.
pub fn compute_gamma_circuit(
    ansatz: &Ansatz,
    theta: &[f64],
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<DMatrix<f64>> {
    let n = ansatz.num_params();
    let circuits = (0..n)
        .map(|i| ansatz.derivative_circuits(i))
        .collect::<Result<Vec<_>>>()?;
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for dk in &circuits[i] {
                for dl in &circuits[j] {
                    let w = dk.coeff.conj() * dl.coeff;
                    let r = overlap_test(
                        ansatz.num_qubits(),
                        &dk.gates,
                        &dl.gates,
                        theta,
                        w.arg(),
                        None,
                        shots,
                        rng,
                    )?;
                    acc += w.norm() * r.estimate;
                }
            }
            g[(i, j)] = acc;
            g[(j, i)] = acc;
        }
    }
    Ok(g)
}

/// `C_i = -Re <∂_iψ|(A_eff - F B)|ψ>` from dense states.
pub fn compute_c(
    ansatz: &Ansatz,
    theta: &[f64],
    a_eff: &DeflatedOperator,
    b: &PauliSum,
    f: f64,
) -> Result<DVector<f64>> {
    check_qubits(ansatz.num_qubits(), a_eff.num_qubits())?;
    check_qubits(ansatz.num_qubits(), b.num_qubits())?;
    let psi = ansatz.prepare(theta)?;
    let hpsi = shifted_apply(a_eff, b, f, psi.amplitudes());
    let hpsi = StateVector::from_amplitudes(hpsi)?;
    let d = ansatz.derivative_states(theta)?;
    Ok(DVector::from_iterator(
        d.len(),
        d.iter().map(|di| -di.inner(&hpsi).re),
    ))
}

/// `(A_eff - F B)|ψ>`.
fn shifted_apply(a_eff: &DeflatedOperator, b: &PauliSum, f: f64, amps: &[Complex64]) -> Vec<Complex64> {
    let mut out = a_eff.apply(amps);
    for (o, v) in out.iter_mut().zip(b.apply(amps)) {
        *o -= v * f;
    }
    out
}

/// `C` from ancilla circuits over the Pauli expansion `A - F B = Σ Λ_α h_α`. Deflation
/// terms contribute through their dense rank-one form.
pub fn compute_c_circuit(
    ansatz: &Ansatz,
    theta: &[f64],
    a_eff: &DeflatedOperator,
    b: &PauliSum,
    f: f64,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<DVector<f64>> {
    let lambda = combine(a_eff.base(), b, f)?;
    let m = ansatz.num_qubits();
    let n = ansatz.num_params();
    let psi = ansatz.prepare(theta)?;
    let mut defl = vec![Complex64::new(0.0, 0.0); psi.dim()];
    a_eff.add_deflation(psi.amplitudes(), 1.0, &mut defl);
    let defl = StateVector::from_amplitudes(defl)?;
    let zero = StateVector::zero(m);

    let mut c = DVector::zeros(n);
    for i in 0..n {
        let mut acc = 0.0;
        for dk in ansatz.derivative_circuits(i)? {
            let w = dk.coeff.conj();
            for t in lambda.terms() {
                let r = overlap_test(
                    m,
                    &dk.gates,
                    ansatz.gates(),
                    theta,
                    w.arg(),
                    Some(&t.word),
                    shots,
                    rng,
                )?;
                acc += w.norm() * t.coeff * r.estimate;
            }
            if !a_eff.terms().is_empty() {
                let vk = crate::circuit::apply_circuit(&zero, &dk.gates, theta)?;
                acc += (w * vk.inner(&defl)).re;
            }
        }
        c[i] = -acc;
    }
    Ok(c)
}

/// `θ + solve(Γ + εI, C)·δτ`.
pub fn euler_step(
    theta: &[f64],
    gamma: &DMatrix<f64>,
    c: &DVector<f64>,
    d_tau: f64,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let n = theta.len();
    if gamma.nrows() != n || gamma.ncols() != n || c.len() != n {
        return Err(Error::InvalidArgument(format!(
            "Γ is {}x{} and C has {} entries for {} parameters",
            gamma.nrows(),
            gamma.ncols(),
            c.len(),
            n
        )));
    }
    let m = gamma + DMatrix::identity(n, n) * epsilon;
    let ev = m.clone().symmetric_eigenvalues();
    let max = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = ev.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= MAX_GAMMA_CONDITION) {
        return Err(Error::IllConditionedGamma { condition });
    }
    let dot = m
        .lu()
        .solve(c)
        .ok_or(Error::IllConditionedGamma { condition })?;
    Ok(theta
        .iter()
        .zip(dot.iter())
        .map(|(t, d)| t + d * d_tau)
        .collect())
}

/// `‖(A_eff - F B)|ψ>‖ / ‖ψ‖`.
pub fn residual(state: &StateVector, a_eff: &DeflatedOperator, b: &PauliSum, f: f64) -> f64 {
    let r = shifted_apply(a_eff, b, f, state.amplitudes());
    let norm: f64 = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    norm / state.norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub tau: f64,
    pub theta: Vec<f64>,
    pub f: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub rows: Vec<TraceRow>,
    pub converged: bool,
    /// Unit-normalized state at the last row.
    pub final_state: StateVector,
    /// `final_state` rescaled so that `<ψ|B|ψ> = 1`.
    pub b_normalized: Vec<Complex64>,
    pub seed: u64,
    pub config: EvolutionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub final_lambda: f64,
    pub final_residual: f64,
    pub converged: bool,
    pub steps: usize,
    pub seed: u64,
    pub final_theta: Vec<f64>,
    pub config: EvolutionConfig,
}

impl EvolutionTrace {
    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("a trace always holds the initial row")
    }

    pub fn final_lambda(&self) -> f64 {
        self.last().f
    }

    pub fn final_theta(&self) -> &[f64] {
        &self.last().theta
    }

    /// Number of Euler steps taken.
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.theta.len());
        let mut out = String::from("tau,F,residual");
        for i in 0..n {
            let _ = write!(out, ",theta_{i}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{}", r.tau, r.f, r.residual);
            for t in &r.theta {
                let _ = write!(out, ",{t}");
            }
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            final_lambda: self.final_lambda(),
            final_residual: self.last().residual,
            converged: self.converged,
            steps: self.steps(),
            seed: self.seed,
            final_theta: self.final_theta().to_vec(),
            config: self.config.clone(),
        }
    }
}

/// Integrates from `theta0` until `tau_max` or until `|ΔF| < convergence_tol` holds for
/// `convergence_window` consecutive steps.
pub fn run_evolution(
    ansatz: &Ansatz,
    a_eff: &DeflatedOperator,
    b: &PauliSum,
    theta0: &[f64],
    cfg: &EvolutionConfig,
) -> Result<EvolutionTrace> {
    cfg.validate()?;
    check_qubits(ansatz.num_qubits(), a_eff.num_qubits())?;
    check_qubits(ansatz.num_qubits(), b.num_qubits())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shots = cfg.mode.shots();
    let max_steps = ((cfg.tau_max / cfg.d_tau) * (1.0 + 1e-12)).floor() as usize;

    let mut theta = theta0.to_vec();
    let mut rows = Vec::new();
    let mut quiet = 0usize;
    let mut converged = false;
    let mut step = 0usize;
    let state = loop {
        let tau = step as f64 * cfg.d_tau;
        let psi = ansatz.prepare(&theta)?;
        let f = match cfg.mode {
            Mode::Exact => compute_f(&psi, a_eff, b, cfg.b_norm_floor)?,
            Mode::Shots(s) => {
                compute_f_circuit(ansatz, &theta, a_eff, b, cfg.b_norm_floor, s, &mut rng)?
            }
        };
        if !f.is_finite() || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Divergence { tau });
        }
        let res = residual(&psi, a_eff, b, f);
        if let Some(prev) = rows.last().map(|r: &TraceRow| r.f) {
            if (f - prev).abs() < cfg.convergence_tol {
                quiet += 1;
            } else {
                quiet = 0;
            }
        }
        rows.push(TraceRow {
            tau,
            theta: theta.clone(),
            f,
            residual: res,
        });
        if quiet >= cfg.convergence_window {
            converged = true;
            break psi;
        }
        if step >= max_steps {
            break psi;
        }
        let (gamma, c) = match cfg.mode {
            Mode::Exact => (
                compute_gamma(ansatz, &theta)?,
                compute_c(ansatz, &theta, a_eff, b, f)?,
            ),
            Mode::Shots(_) => (
                compute_gamma_circuit(ansatz, &theta, shots, &mut rng)?,
                compute_c_circuit(ansatz, &theta, a_eff, b, f, shots, &mut rng)?,
            ),
        };
        theta = euler_step(&theta, &gamma, &c, cfg.d_tau, cfg.gamma_regularization)?;
        step += 1;
    };

    let nb = b.expectation(state.amplitudes());
    let b_normalized = if nb > 0.0 {
        state.scaled(Complex64::new(1.0 / nb.sqrt(), 0.0)).into_amplitudes()
    } else {
        state.amplitudes().to_vec()
    };
    Ok(EvolutionTrace {
        rows,
        converged,
        final_state: state,
        b_normalized,
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

/// One spectral level: its integration settings and starting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub config: EvolutionConfig,
    pub theta0: Vec<f64>,
}

/// Runs the levels in order; level `l` sees `A` deflated by the final states of levels
/// `0..l` with strengths from its own `mu_list`.
pub fn run_spectrum(
    ansatz: &Ansatz,
    a: &PauliSum,
    b: &PauliSum,
    levels: &[Level],
) -> Result<Vec<EvolutionTrace>> {
    let mut traces: Vec<EvolutionTrace> = Vec::with_capacity(levels.len());
    for (l, level) in levels.iter().enumerate() {
        let mut op = DeflatedOperator::from(a.clone());
        for (j, prev) in traces.iter().enumerate() {
            let mu = level.config.mu_for(j).ok_or_else(|| {
                Error::InvalidArgument(format!("level {l} needs a deflation strength (mu_list is empty)"))
            })?;
            op = deflate(&op, b, &prev.final_state, mu, level.config.b_norm_floor)?;
        }
        traces.push(run_evolution(ansatz, &op, b, &level.theta0, &level.config)?);
    }
    Ok(traces)
}
