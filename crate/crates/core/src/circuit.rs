//! Dense statevector simulation and the ancilla interference circuits used to
//! read out expectation values and overlaps as `P(0) - P(1)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliWord};

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    /// `exp(-i θ σ / 2)`.
    fn rotation(self, theta: f64) -> Mat2 {
        let (s, c) = (theta / 2.0).sin_cos();
        match self {
            Axis::X => [
                [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
            ],
            Axis::Y => [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
            Axis::Z => [
                [Complex64::new(c, -s), ZERO],
                [ZERO, Complex64::new(c, s)],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `exp(-i params[param] σ_axis / 2)` on `target`.
    Rotation { axis: Axis, target: usize, param: usize },
    Cnot { control: usize, target: usize },
    Hadamard(usize),
    Pauli { label: Pauli, target: usize },
    SDagger(usize),
    /// `diag(1, e^{i angle})`.
    Phase { target: usize, angle: f64 },
    /// `gate` applied only where qubit `control` reads `on_one as u8`.
    Controlled {
        control: usize,
        on_one: bool,
        gate: Box<Gate>,
    },
}

impl Gate {
    pub fn controlled(control: usize, on_one: bool, gate: Gate) -> Gate {
        Gate::Controlled {
            control,
            on_one,
            gate: Box::new(gate),
        }
    }

    /// Gates realizing a Pauli word, one per non-identity factor.
    pub fn pauli_word(word: &PauliWord) -> Vec<Gate> {
        word.labels()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(target, &label)| Gate::Pauli { label, target })
            .collect()
    }

    fn check(&self, num_qubits: usize, num_params: usize) -> Result<()> {
        let in_range = |q: usize| {
            if q < num_qubits {
                Ok(())
            } else {
                Err(Error::QubitIndex { index: q, num_qubits })
            }
        };
        match self {
            Gate::Rotation { target, param, .. } => {
                in_range(*target)?;
                if *param >= num_params {
                    return Err(Error::ParamIndex {
                        index: *param,
                        len: num_params,
                    });
                }
                Ok(())
            }
            Gate::Cnot { control, target } => {
                in_range(*control)?;
                in_range(*target)?;
                if control == target {
                    return Err(Error::ControlIsTarget(*control));
                }
                Ok(())
            }
            Gate::Hadamard(t) | Gate::SDagger(t) => in_range(*t),
            Gate::Pauli { target, .. } | Gate::Phase { target, .. } => in_range(*target),
            Gate::Controlled { control, gate, .. } => {
                in_range(*control)?;
                gate.check(num_qubits, num_params)?;
                if gate.touches(*control) {
                    return Err(Error::ControlIsTarget(*control));
                }
                Ok(())
            }
        }
    }

    fn touches(&self, q: usize) -> bool {
        match self {
            Gate::Rotation { target, .. }
            | Gate::Pauli { target, .. }
            | Gate::Phase { target, .. } => *target == q,
            Gate::Hadamard(t) | Gate::SDagger(t) => *t == q,
            Gate::Cnot { control, target } => *control == q || *target == q,
            Gate::Controlled { control, gate, .. } => *control == q || gate.touches(q),
        }
    }
}

/// Dense amplitude vector over `num_qubits` qubits; qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = ONE;
        StateVector { num_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidDimension(len));
        }
        Ok(StateVector {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            num_qubits: self.num_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Applies one gate in place. Parameter indices refer into `params`.
    pub fn apply(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        gate.check(self.num_qubits, params.len())?;
        self.apply_unchecked(gate, params, &mut Vec::new());
        Ok(())
    }

    pub(crate) fn apply_unchecked(
        &mut self,
        gate: &Gate,
        params: &[f64],
        controls: &mut Vec<(usize, bool)>,
    ) {
        let n = self.num_qubits;
        match gate {
            Gate::Rotation {
                axis,
                target,
                param,
            } => apply_1q(&mut self.amps, n, *target, &axis.rotation(params[*param]), controls),
            Gate::Cnot { control, target } => {
                controls.push((*control, true));
                apply_1q(&mut self.amps, n, *target, &Pauli::X.matrix(), controls);
                controls.pop();
            }
            Gate::Hadamard(t) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                apply_1q(&mut self.amps, n, *t, &[[h, h], [h, -h]], controls);
            }
            Gate::Pauli { label, target } => {
                apply_1q(&mut self.amps, n, *target, &label.matrix(), controls)
            }
            Gate::SDagger(t) => {
                apply_1q(&mut self.amps, n, *t, &[[ONE, ZERO], [ZERO, Complex64::new(0.0, -1.0)]], controls)
            }
            Gate::Phase { target, angle } => {
                let p = Complex64::from_polar(1.0, *angle);
                apply_1q(&mut self.amps, n, *target, &[[ONE, ZERO], [ZERO, p]], controls)
            }
            Gate::Controlled {
                control,
                on_one,
                gate,
            } => {
                controls.push((*control, *on_one));
                self.apply_unchecked(gate, params, controls);
                controls.pop();
            }
        }
    }

    /// Embeds this register into one with an extra ancilla qubit (index `num_qubits`) in `|0>`.
    fn with_ancilla(&self) -> StateVector {
        let mut amps = vec![ZERO; self.amps.len() * 2];
        for (j, a) in self.amps.iter().enumerate() {
            amps[j << 1] = *a;
        }
        StateVector {
            num_qubits: self.num_qubits + 1,
            amps,
        }
    }
}

fn apply_1q(amps: &mut [Complex64], n: usize, target: usize, m: &Mat2, controls: &[(usize, bool)]) {
    let tbit = 1usize << (n - 1 - target);
    let (mut cmask, mut cval) = (0usize, 0usize);
    for &(q, on) in controls {
        let b = 1usize << (n - 1 - q);
        cmask |= b;
        if on {
            cval |= b;
        }
    }
    for i0 in 0..amps.len() {
        if i0 & tbit != 0 || i0 & cmask != cval {
            continue;
        }
        let i1 = i0 | tbit;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = m[0][0] * a0 + m[0][1] * a1;
        amps[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
}

/// Applies `gates` left to right (first gate acts first) to a copy of `state`.
pub fn apply_circuit(state: &StateVector, gates: &[Gate], params: &[f64]) -> Result<StateVector> {
    let mut out = state.clone();
    for g in gates {
        out.apply(g, params)?;
    }
    Ok(out)
}

/// `Σ_α c_α <ψ|h_α|ψ>`.
pub fn expectation(state: &StateVector, obs: &crate::pauli::PauliSum) -> Result<f64> {
    if obs.num_qubits() != state.num_qubits() {
        return Err(Error::QubitMismatch {
            left: state.num_qubits(),
            right: obs.num_qubits(),
        });
    }
    Ok(obs.expectation(state.amplitudes()))
}

/// Outcome statistics of a single-ancilla measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub p0: f64,
    pub p1: f64,
    /// Zero in exact mode.
    pub shots: u64,
    /// `p0 - p1`.
    pub estimate: f64,
}

impl MeasurementRecord {
    fn sample<R: Rng + ?Sized>(p0_exact: f64, shots: u64, rng: &mut R) -> MeasurementRecord {
        let p0_exact = p0_exact.clamp(0.0, 1.0);
        if shots == 0 {
            let p1 = 1.0 - p0_exact;
            return MeasurementRecord {
                p0: p0_exact,
                p1,
                shots: 0,
                estimate: p0_exact - p1,
            };
        }
        let zeros = Binomial::new(shots, p0_exact)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        let p0 = zeros as f64 / shots as f64;
        let p1 = (shots - zeros) as f64 / shots as f64;
        MeasurementRecord {
            p0,
            p1,
            shots,
            estimate: p0 - p1,
        }
    }
}

fn ancilla_p0(state: &StateVector) -> f64 {
    // the ancilla is the least significant bit
    state.amps.iter().step_by(2).map(|a| a.norm_sqr()).sum()
}

/// Estimates `<ψ|u|ψ>` for a Pauli word `u` with the single-ancilla interference circuit:
/// H on the ancilla, controlled-`u`, H, measure. `shots == 0` returns the exact
/// outcome probabilities.
pub fn hadamard_test_expectation<R: Rng + ?Sized>(
    psi_circuit: &[Gate],
    params: &[f64],
    u: &PauliWord,
    shots: u64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let m = u.num_qubits();
    let psi = apply_circuit(&StateVector::zero(m), psi_circuit, params)?;
    let mut reg = psi.with_ancilla();
    let anc = m;
    let mut scratch = Vec::new();
    reg.apply_unchecked(&Gate::Hadamard(anc), params, &mut scratch);
    for g in Gate::pauli_word(u) {
        reg.apply_unchecked(&Gate::controlled(anc, true, g), params, &mut scratch);
    }
    reg.apply_unchecked(&Gate::Hadamard(anc), params, &mut scratch);
    Ok(MeasurementRecord::sample(ancilla_p0(&reg), shots, rng))
}

/// Estimates `Re[e^{i phase} <0|L† (h) R|0>]` where `L`/`R` are the left/right circuits and
/// `h` the optional observable word. The ancilla is prepared in
/// `(|0> + e^{i phase}|1>)/√2`, `L` runs controlled on `|0>`, `R` (then `h`) controlled on
/// `|1>`, and the ancilla is read out after a final Hadamard.
#[allow(clippy::too_many_arguments)]
pub fn overlap_test<R: Rng + ?Sized>(
    num_qubits: usize,
    left: &[Gate],
    right: &[Gate],
    params: &[f64],
    phase: f64,
    observable: Option<&PauliWord>,
    shots: u64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    for g in left.iter().chain(right) {
        g.check(num_qubits, params.len())?;
    }
    if let Some(h) = observable {
        if h.num_qubits() != num_qubits {
            return Err(Error::QubitMismatch {
                left: num_qubits,
                right: h.num_qubits(),
            });
        }
    }
    let anc = num_qubits;
    let mut reg = StateVector::zero(num_qubits + 1);
    let mut scratch = Vec::new();
    reg.apply_unchecked(&Gate::Hadamard(anc), params, &mut scratch);
    reg.apply_unchecked(&Gate::Phase { target: anc, angle: phase }, params, &mut scratch);
    scratch.push((anc, false));
    for g in left {
        reg.apply_unchecked(g, params, &mut scratch);
    }
    scratch.clear();
    scratch.push((anc, true));
    for g in right {
        reg.apply_unchecked(g, params, &mut scratch);
    }
    if let Some(h) = observable {
        for g in Gate::pauli_word(h) {
            reg.apply_unchecked(&g, params, &mut scratch);
        }
    }
    scratch.clear();
    reg.apply_unchecked(&Gate::Hadamard(anc), params, &mut scratch);
    Ok(MeasurementRecord::sample(ancilla_p0(&reg), shots, rng))
}
