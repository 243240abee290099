//! The worked pencils and the integration schedules used to solve them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::evolver::{EvolutionConfig, Level};
use crate::oracle::Pencil;
use crate::pauli::{reconstruct, PauliSum};

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub a: PauliSum,
    pub b: PauliSum,
}

impl Problem {
    pub fn new(name: &str, a: PauliSum, b: PauliSum) -> Result<Self> {
        if a.num_qubits() != b.num_qubits() {
            return Err(crate::Error::QubitMismatch {
                left: a.num_qubits(),
                right: b.num_qubits(),
            });
        }
        Ok(Problem {
            name: name.to_string(),
            a,
            b,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.a.num_qubits()
    }

    pub fn pencil(&self) -> Result<Pencil> {
        Pencil::new(reconstruct(&self.a), reconstruct(&self.b))
    }
}

fn sum(pairs: &[(f64, &str)]) -> PauliSum {
    PauliSum::from_labels(pairs).expect("built-in operators are well formed")
}

/// Two qubits, positive-definite `B`.
pub fn example1() -> Problem {
    Problem {
        name: "example1".into(),
        a: sum(&[(1.0, "II"), (0.4, "ZI"), (0.4, "IZ"), (0.2, "XX")]),
        b: sum(&[(1.0, "II"), (0.3, "ZI"), (0.4, "IZ"), (0.2, "ZZ")]),
    }
}

/// Two qubits, `B` the rank-one all-ones matrix.
pub fn example2() -> Problem {
    Problem {
        name: "example2".into(),
        a: sum(&[(1.0, "II"), (0.4, "ZI"), (0.4, "IZ"), (0.2, "XX")]),
        b: sum(&[(1.0, "II"), (1.0, "IX"), (1.0, "XI"), (1.0, "XX")]),
    }
}

/// Three qubits.
pub fn example3() -> Problem {
    Problem {
        name: "example3".into(),
        a: sum(&[(1.0, "III"), (0.4, "ZIX"), (0.4, "IZX"), (0.2, "XXI")]),
        b: sum(&[(1.0, "III"), (0.3, "ZIZ"), (0.4, "IZX"), (0.2, "ZZX")]),
    }
}

pub const EXAMPLE1_THETA0: [f64; 4] = [1.5, 0.8, 2.3, 3.1];
pub const DEFAULT_MU: f64 = 10.0;
pub const EXAMPLE3_MU: f64 = 5.0;
/// Seed for the random starting point of the three-qubit runs.
pub const EXAMPLE3_SEED: u64 = 7;

fn level(d_tau: f64, tau_max: f64, mu: f64, theta0: &[f64]) -> Level {
    Level {
        config: EvolutionConfig {
            d_tau,
            tau_max,
            mu_list: vec![mu],
            ..EvolutionConfig::default()
        },
        theta0: theta0.to_vec(),
    }
}

/// Four levels of the two-qubit regular pencil, all started from [`EXAMPLE1_THETA0`].
pub fn example1_levels() -> Vec<Level> {
    [(0.01, 30.0), (0.1, 80.0), (0.01, 2.0), (0.05, 40.0)]
        .iter()
        .map(|&(d, t)| level(d, t, DEFAULT_MU, &EXAMPLE1_THETA0))
        .collect()
}

pub fn example2_levels() -> Vec<Level> {
    vec![level(0.05, 30.0, DEFAULT_MU, &EXAMPLE1_THETA0)]
}

/// Uniform angles in `[0, π)` from a seeded generator.
pub fn random_theta(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0.0..PI)).collect()
}

pub fn example3_levels(seed: u64) -> Vec<Level> {
    let theta0 = random_theta(6, seed);
    vec![
        level(0.05, 30.0, EXAMPLE3_MU, &theta0),
        level(0.05, 100.0, EXAMPLE3_MU, &theta0),
    ]
}
