//! Hermitian operators as real-weighted sums of Pauli words.
//!
//! Qubit 0 is the leftmost factor of a word and the most significant bit of a
//! basis index, so the word `ZI` is the matrix `Z ⊗ I`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are pruned from a [`PauliSum`].
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Hermiticity tolerance accepted on dense input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Single-qubit Pauli label. The derived order `I < X < Y < Z` is the
/// canonical word order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' | '0' => Some(Pauli::I),
            'X' | 'x' | '1' => Some(Pauli::X),
            'Y' | 'y' | '2' => Some(Pauli::Y),
            'Z' | 'z' | '3' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

/// Tensor product of single-qubit Pauli labels, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord(Vec<Pauli>);

impl PauliWord {
    pub fn new(labels: Vec<Pauli>) -> Self {
        PauliWord(labels)
    }

    pub fn identity(num_qubits: usize) -> Self {
        PauliWord(vec![Pauli::I; num_qubits])
    }

    /// Word with `label` on `qubit` and identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, label: Pauli) -> Self {
        let mut w = vec![Pauli::I; num_qubits];
        w[qubit] = label;
        PauliWord(w)
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// All 4^m words in canonical order.
    pub fn all(num_qubits: usize) -> impl Iterator<Item = PauliWord> {
        (0..1usize << (2 * num_qubits)).map(move |code| {
            PauliWord(
                (0..num_qubits)
                    .map(|q| Pauli::ALL[(code >> (2 * (num_qubits - 1 - q))) & 3])
                    .collect(),
            )
        })
    }

    /// Bit masks describing the word's action `P|j> = i^ny (-1)^{|j & z|} |j ^ x>`.
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let n = self.0.len();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (q, p) in self.0.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
                Pauli::Z => z |= bit,
            }
        }
        (x, z, ny)
    }

    /// Applies the word to an amplitude vector of matching length.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let (x, z, ny) = self.masks();
        let base = i_pow(ny);
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (j, a) in amps.iter().enumerate() {
            let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out[j ^ x] = base * sign * a;
        }
        out
    }

    /// `<u| P |v>`.
    pub fn matrix_element(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let (x, z, ny) = self.masks();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in v.iter().enumerate() {
            let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += u[j ^ x].conj() * a * sign;
        }
        acc * i_pow(ny)
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.0.len();
        let (x, z, ny) = self.masks();
        let base = i_pow(ny);
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(j ^ x, j)] = base * sign;
        }
        m
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("invalid Pauli label '{c}' in word '{s}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if labels.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "empty Pauli word".into(),
            });
        }
        Ok(PauliWord(labels))
    }
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub word: PauliWord,
}

impl PauliTerm {
    pub fn new(coeff: f64, word: PauliWord) -> Self {
        PauliTerm { coeff, word }
    }

    /// Parses a bare word such as `"XZ"` into a unit-coefficient term.
    pub fn unit(word: &str) -> Result<Self> {
        Ok(PauliTerm::new(1.0, word.parse()?))
    }

    pub fn num_qubits(&self) -> usize {
        self.word.num_qubits()
    }
}

/// Real-weighted sum of Pauli words in canonical merged form: words are
/// unique, sorted, and every coefficient is at least `drop_tol` in magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(num_qubits: usize) -> Self {
        PauliSum {
            num_qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms<I>(num_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = PauliTerm>,
    {
        Self::from_terms_with_tol(num_qubits, terms, DEFAULT_DROP_TOL)
    }

    pub fn from_terms_with_tol<I>(num_qubits: usize, terms: I, drop_tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = PauliTerm>,
    {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument("a Pauli sum needs at least one qubit".into()));
        }
        let mut merged: BTreeMap<PauliWord, f64> = BTreeMap::new();
        for t in terms {
            if t.word.num_qubits() != num_qubits {
                return Err(Error::QubitMismatch {
                    left: num_qubits,
                    right: t.word.num_qubits(),
                });
            }
            *merged.entry(t.word).or_insert(0.0) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= drop_tol)
            .map(|(word, coeff)| PauliTerm { coeff, word })
            .collect();
        Ok(PauliSum { num_qubits, terms })
    }

    /// Convenience constructor from `(coeff, "WORD")` pairs.
    pub fn from_labels(pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(c, w)| Ok(PauliTerm::new(c, w.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        let n = terms
            .first()
            .map(PauliTerm::num_qubits)
            .ok_or_else(|| Error::InvalidArgument("no terms given".into()))?;
        PauliSum::from_terms(n, terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `word`, zero when absent.
    pub fn coeff(&self, word: &PauliWord) -> f64 {
        self.terms
            .binary_search_by(|t| t.word.cmp(word))
            .map(|i| self.terms[i].coeff)
            .unwrap_or(0.0)
    }

    pub fn coeff_of(&self, word: &str) -> f64 {
        word.parse::<PauliWord>()
            .map(|w| self.coeff(&w))
            .unwrap_or(0.0)
    }

    pub fn scale(&self, factor: f64) -> PauliSum {
        PauliSum::from_terms(
            self.num_qubits,
            self.terms
                .iter()
                .map(|t| PauliTerm::new(t.coeff * factor, t.word.clone())),
        )
        .expect("qubit count preserved")
    }

    /// `Σ_α c_α P_α |v>`.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for t in &self.terms {
            let (x, z, ny) = t.word.masks();
            let base = i_pow(ny) * t.coeff;
            for (j, a) in amps.iter().enumerate() {
                let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                out[j ^ x] += base * sign * a;
            }
        }
        out
    }

    /// `<v| S |v>` (real part; the imaginary part vanishes for real coefficients).
    pub fn expectation(&self, amps: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.word.matrix_element(amps, amps).re)
            .sum()
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} {}", t.coeff, t.word)?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    /// Parses lines of the form `<coeff> <word>`; blank lines and `#` comments are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut num_qubits = None;
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(c), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected '<coeff> <word>', got '{line}'"),
                });
            };
            let coeff: f64 = c.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid coefficient '{c}'"),
            })?;
            let word: PauliWord = w.parse().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: line_no, msg },
                other => other,
            })?;
            match num_qubits {
                None => num_qubits = Some(word.num_qubits()),
                Some(n) if n != word.num_qubits() => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("word '{word}' has {} qubits, expected {n}", word.num_qubits()),
                    })
                }
                _ => {}
            }
            terms.push(PauliTerm::new(coeff, word));
        }
        let n = num_qubits.ok_or(Error::Parse {
            line: 0,
            msg: "no Pauli terms found".into(),
        })?;
        PauliSum::from_terms(n, terms)
    }
}

/// Dense `2^m x 2^m` Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian(DMatrix<Complex64>);

impl DenseHermitian {
    /// Validates squareness and Hermiticity within [`HERMITIAN_TOL`]. The side need not be a
    /// power of two; [`decompose`] checks that separately.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidDimension(m.nrows()));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitian(dev));
        }
        Ok(DenseHermitian(m))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        DenseHermitian(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseHermitian) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Pauli coefficients `trace(P H) / 2^m` for every word, dropping those below `drop_tol`.
pub fn decompose_with_tol(h: &DenseHermitian, drop_tol: f64) -> Result<PauliSum> {
    let dim = h.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let m = dim.trailing_zeros() as usize;
    let mat = h.matrix();
    let terms = PauliWord::all(m).map(|word| {
        let (x, z, ny) = word.masks();
        // trace(P H) = Σ_k <k ^ x| P |k> H[k, k ^ x]
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..dim {
            let sign = if (k & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += mat[(k, k ^ x)] * sign;
        }
        let coeff = (acc * i_pow(ny)).re / dim as f64;
        PauliTerm::new(coeff, word)
    });
    PauliSum::from_terms_with_tol(m, terms, drop_tol)
}

pub fn decompose(h: &DenseHermitian) -> Result<PauliSum> {
    decompose_with_tol(h, DEFAULT_DROP_TOL)
}

/// `Σ_α c_α dense(P_α)`.
pub fn reconstruct(s: &PauliSum) -> DenseHermitian {
    let dim = s.dim();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for t in s.terms() {
        let (x, z, ny) = t.word.masks();
        let base = i_pow(ny) * t.coeff;
        for j in 0..dim {
            let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(j ^ x, j)] += base * sign;
        }
    }
    DenseHermitian(m)
}

/// `A - f B` in canonical merged form.
pub fn combine(a: &PauliSum, b: &PauliSum, f: f64) -> Result<PauliSum> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::QubitMismatch {
            left: a.num_qubits(),
            right: b.num_qubits(),
        });
    }
    let terms = a.terms().iter().cloned().chain(
        b.terms()
            .iter()
            .map(|t| PauliTerm::new(-f * t.coeff, t.word.clone())),
    );
    PauliSum::from_terms(a.num_qubits(), terms)
}
