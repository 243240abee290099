//! Parameterized trial circuits and their analytic derivative circuits.

use num_complex::Complex64;

use crate::circuit::{apply_circuit, Axis, Gate, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{PauliTerm, PauliWord};

/// One term of `∂U/∂θ = f · U σ`: `σ` is inserted right after gate `position`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub coeff: Complex64,
    pub sigma: PauliTerm,
    pub position: usize,
}

/// A concrete derivative circuit `Ṽ_{k,i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeCircuit {
    pub param_index: usize,
    pub gen_index: usize,
    pub coeff: Complex64,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    num_qubits: usize,
    gates: Vec<Gate>,
    num_params: usize,
    generators: Vec<Vec<Generator>>,
}

impl Ansatz {
    /// Builds an ansatz from a gate list, deriving generator metadata from every
    /// top-level rotation. Each parameter in `0..num_params` must be used at least once.
    pub fn from_gates(num_qubits: usize, num_params: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut probe = StateVector::zero(num_qubits);
        let zeros = vec![0.0; num_params];
        let mut generators = vec![Vec::new(); num_params];
        for (pos, g) in gates.iter().enumerate() {
            probe.apply(g, &zeros)?;
            if let Gate::Rotation {
                axis,
                target,
                param,
            } = *g
            {
                generators[param].push(Generator {
                    coeff: Complex64::new(0.0, -0.5),
                    sigma: PauliTerm::new(1.0, PauliWord::single(num_qubits, target, axis.pauli())),
                    position: pos,
                });
            }
        }
        if let Some(i) = generators.iter().position(Vec::is_empty) {
            return Err(Error::InvalidArgument(format!(
                "parameter {i} is not referenced by any rotation"
            )));
        }
        Ok(Ansatz {
            num_qubits,
            gates,
            num_params,
            generators,
        })
    }

    /// `layers` CNOT ladders separating `layers + 1` layers of `Ry` on every qubit.
    pub fn hardware_efficient(num_qubits: usize, layers: usize) -> Result<Self> {
        if num_qubits == 0 || layers == 0 {
            return Err(Error::InvalidArgument(format!(
                "hardware-efficient ansatz needs at least one qubit and one layer (got {num_qubits}, {layers})"
            )));
        }
        let mut gates = Vec::new();
        let mut param = 0;
        for layer in 0..=layers {
            for target in 0..num_qubits {
                gates.push(Gate::Rotation {
                    axis: Axis::Y,
                    target,
                    param,
                });
                param += 1;
            }
            if layer < layers {
                for q in 0..num_qubits.saturating_sub(1) {
                    gates.push(Gate::Cnot {
                        control: q,
                        target: q + 1,
                    });
                }
            }
        }
        Self::from_gates(num_qubits, param, gates)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn generators(&self, i: usize) -> Result<&[Generator]> {
        self.generators
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::ParamIndex {
                index: i,
                len: self.num_params,
            })
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params {
            return Err(Error::InvalidArgument(format!(
                "expected {} parameters, got {}",
                self.num_params,
                theta.len()
            )));
        }
        Ok(())
    }

    /// `V(θ)|0̄>`.
    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector> {
        self.check_theta(theta)?;
        apply_circuit(&StateVector::zero(self.num_qubits), &self.gates, theta)
    }

    pub fn derivative_circuits(&self, i: usize) -> Result<Vec<DerivativeCircuit>> {
        Ok(self
            .generators(i)?
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let mut gates = self.gates[..=g.position].to_vec();
                gates.extend(Gate::pauli_word(&g.sigma.word));
                gates.extend_from_slice(&self.gates[g.position + 1..]);
                DerivativeCircuit {
                    param_index: i,
                    gen_index: k,
                    coeff: g.coeff * g.sigma.coeff,
                    gates,
                }
            })
            .collect())
    }

    /// `∂_i |ψ(θ)> = Σ_k f_{k,i} Ṽ_{k,i}|0̄>`.
    pub fn derivative_state(&self, theta: &[f64], i: usize) -> Result<StateVector> {
        self.check_theta(theta)?;
        let zero = StateVector::zero(self.num_qubits);
        let mut acc = vec![Complex64::new(0.0, 0.0); zero.dim()];
        for dc in self.derivative_circuits(i)? {
            let s = apply_circuit(&zero, &dc.gates, theta)?;
            for (a, v) in acc.iter_mut().zip(s.amplitudes()) {
                *a += dc.coeff * v;
            }
        }
        StateVector::from_amplitudes(acc)
    }

    /// All derivative states, indexed by parameter.
    pub fn derivative_states(&self, theta: &[f64]) -> Result<Vec<StateVector>> {
        (0..self.num_params)
            .map(|i| self.derivative_state(theta, i))
            .collect()
    }
}
