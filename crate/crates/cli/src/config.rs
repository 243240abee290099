use std::fs;
use std::path::{Path, PathBuf};

use gevp_core::ansatz::Ansatz;
use gevp_core::evolver::{EvolutionConfig, Level, Mode};
use gevp_core::hydrogen::{build_pencil, StoConfig};
use gevp_core::pauli::PauliSum;
use gevp_core::problems::{example1, example2, example3, random_theta, Problem};
use serde::Deserialize;

use crate::error::{io_context, CliError, CliResult};

pub const PRESETS: &[(&str, &str)] = &[
    ("example1", include_str!("../presets/example1.toml")),
    ("example2", include_str!("../presets/example2.toml")),
    ("example3", include_str!("../presets/example3.toml")),
    ("hydrogen", include_str!("../presets/hydrogen.toml")),
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Exit with the convergence code when any level stops at `tau_max`.
    #[serde(default)]
    pub require_convergence: bool,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub ansatz: AnsatzSpec,
    #[serde(default)]
    pub levels: Vec<EvolutionConfig>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemSpec {
    Example1,
    Example2,
    Example3,
    Hydrogen(StoConfig),
    /// Pauli-sum text files, one `<coeff> <word>` per line.
    Custom { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzSpec {
    /// Checked against the problem when given.
    pub qubits: Option<usize>,
    pub layers: usize,
    pub theta0: Option<Vec<f64>>,
    /// Seed for uniform random starting angles when `theta0` is absent.
    pub seed: Option<u64>,
}

impl Default for AnsatzSpec {
    fn default() -> Self {
        AnsatzSpec {
            qubits: None,
            layers: 1,
            theta0: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

/// Command-line settings that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub levels: Option<usize>,
}

pub struct Job {
    pub problem: Problem,
    pub ansatz: Ansatz,
    pub levels: Vec<Level>,
    pub require_convergence: bool,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn preset(name: &str) -> CliResult<Self> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown preset '{name}' (available: {})", names.join(", ")))
        })?;
        Self::parse(text, &format!("preset {name}"))
    }

    pub fn load(path: &Path) -> CliResult<(Self, PathBuf)> {
        let text = io_context(fs::read_to_string(path), format!("reading {}", path.display()))?;
        let cfg = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    /// Builds the problem only; relative paths resolve against `base`.
    pub fn problem(&self, base: &Path) -> CliResult<Problem> {
        Ok(match &self.problem {
            ProblemSpec::Example1 => example1(),
            ProblemSpec::Example2 => example2(),
            ProblemSpec::Example3 => example3(),
            ProblemSpec::Hydrogen(sto) => {
                let pencil = build_pencil(sto)?;
                let (a, b) = pencil.pauli_operators()?;
                Problem::new("hydrogen", a, b)?
            }
            ProblemSpec::Custom { a, b } => {
                let read = |p: &PathBuf| -> CliResult<PauliSum> {
                    let path = base.join(p);
                    let text = io_context(fs::read_to_string(&path), format!("reading {}", path.display()))?;
                    text.parse()
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
                };
                let (a, b) = (read(a)?, read(b)?);
                if a.num_qubits() != b.num_qubits() {
                    return Err(CliError::Config(format!(
                        "A acts on {} qubits but B on {}",
                        a.num_qubits(),
                        b.num_qubits()
                    )));
                }
                Problem::new("custom", a, b)?
            }
        })
    }

    pub fn into_job(self, base: &Path, ov: &Overrides) -> CliResult<Job> {
        let problem = self.problem(base)?;
        let m = problem.num_qubits();
        if let Some(q) = self.ansatz.qubits {
            if q != m {
                return Err(CliError::Config(format!("ansatz.qubits = {q} but the problem has {m} qubits")));
            }
        }
        let ansatz = Ansatz::hardware_efficient(m, self.ansatz.layers)?;
        let n = ansatz.num_params();
        let theta0 = match (&self.ansatz.theta0, self.ansatz.seed) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("ansatz: give either theta0 or seed, not both".into()))
            }
            (Some(t), None) if t.len() != n => {
                return Err(CliError::Config(format!(
                    "ansatz.theta0 has {} entries but the ansatz has {n} parameters",
                    t.len()
                )))
            }
            (Some(t), None) => t.clone(),
            (None, seed) => random_theta(n, ov.seed.or(seed).unwrap_or(0)),
        };

        let mut configs = self.levels;
        if configs.is_empty() {
            return Err(CliError::Config("at least one [[levels]] table is required".into()));
        }
        if let Some(k) = ov.levels {
            if k == 0 || k > configs.len() {
                return Err(CliError::Config(format!(
                    "--levels {k} is out of range; the configuration defines {} level(s)",
                    configs.len()
                )));
            }
            configs.truncate(k);
        }
        for (l, c) in configs.iter_mut().enumerate() {
            if let Some(s) = ov.seed {
                c.seed = s;
            }
            if let Some(s) = ov.shots {
                c.mode = if s == 0 { Mode::Exact } else { Mode::Shots(s) };
            }
            c.validate().map_err(|e| CliError::Config(format!("levels[{l}]: {e}")))?;
            if l > 0 && c.mu_list.is_empty() {
                return Err(CliError::Config(format!("levels[{l}]: mu_list is required above the first level")));
            }
        }
        let levels = configs
            .into_iter()
            .map(|config| Level {
                config,
                theta0: theta0.clone(),
            })
            .collect();
        Ok(Job {
            problem,
            ansatz,
            levels,
            require_convergence: self.require_convergence,
            out_dir: self.output.dir,
        })
    }
}
