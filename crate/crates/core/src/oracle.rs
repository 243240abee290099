//! Dense classical reference solver for Hermitian pencils, including singular `B`.
//!
//! The finite eigenvalues are the roots of `det(A - λB)`. The determinant is sampled at
//! Chebyshev nodes, interpolated, and the resulting polynomial solved through its
//! companion matrix. The roots are refined together by Aberth iteration on the
//! determinant, repeated roots are merged when the null space of `A - λB` confirms the
//! multiplicity, and eigenvectors are read off that null space.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::DenseHermitian;

pub const MAX_DIM: usize = 1024;
/// Roots with a larger imaginary part (relative to `max(1, |λ|)`) are dropped.
pub const IMAG_TOL: f64 = 1e-8;
/// Relative singular-value threshold used for null spaces and ranks.
pub const NULL_TOL: f64 = 1e-8;
const TRIM_TOL: f64 = 1e-10;
const MERGE_STAGES: [f64; 6] = [1e-9, 1e-7, 1e-5, 1e-3, 1e-2, 5e-2];

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    a: DenseHermitian,
    b: DenseHermitian,
}

impl Pencil {
    pub fn new(a: DenseHermitian, b: DenseHermitian) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::InvalidDimension(b.dim()));
        }
        if a.dim() > MAX_DIM {
            return Err(Error::SizeOverflow(a.dim()));
        }
        Ok(Pencil { a, b })
    }

    pub fn from_real(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Self> {
        Self::new(DenseHermitian::from_real(a)?, DenseHermitian::from_real(b)?)
    }

    pub fn a(&self) -> &DenseHermitian {
        &self.a
    }

    pub fn b(&self) -> &DenseHermitian {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `A - λB`.
    pub fn shifted(&self, lambda: Complex64) -> DMatrix<Complex64> {
        self.a.matrix() - self.b.matrix() * lambda
    }

    /// `‖A v - λ B v‖`.
    pub fn residual(&self, lambda: f64, v: &[Complex64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (self.a.matrix() * &v - self.b.matrix() * &v * Complex64::new(lambda, 0.0)).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair {
    pub lambda: f64,
    /// Unit-normalized, largest component real and positive.
    pub vector: Vec<Complex64>,
    /// `v† B v` for the unit vector.
    pub b_norm: f64,
    pub residual: f64,
    /// Size of the eigenvalue cluster this vector belongs to.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenpairSet {
    /// Ascending in `lambda`; repeated eigenvalues appear once per null vector.
    pub pairs: Vec<Eigenpair>,
    pub b_rank: usize,
}

impl EigenpairSet {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }
}

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn numerical_rank(m: &DMatrix<Complex64>) -> usize {
    let s = singular_values(m);
    let cut = NULL_TOL * s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&v| v > cut && v > 0.0).count()
}

fn det_real(m: DMatrix<Complex64>) -> f64 {
    m.lu().determinant().re
}

/// Monomial coefficients (ascending) of `det(A - R t B)` in `t`.
fn char_poly(p: &Pencil, r: f64) -> Result<Vec<f64>> {
    let n = p.dim();
    let nodes = n + 1;
    let xs: Vec<f64> = (0..nodes)
        .map(|k| (PI * (k as f64 + 0.5) / nodes as f64).cos())
        .collect();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| det_real(p.shifted(Complex64::new(r * x, 0.0))))
        .collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = (frobenius(p.a.matrix()) + r * frobenius(p.b.matrix())).powi(n as i32);
    if !(scale > 1e-13 * bound) {
        return Err(Error::DegeneratePencil);
    }

    // Chebyshev coefficients
    let cheb: Vec<f64> = (0..nodes)
        .map(|j| {
            let s: f64 = (0..nodes)
                .map(|k| vals[k] / scale * (PI * j as f64 * (k as f64 + 0.5) / nodes as f64).cos())
                .sum();
            s * if j == 0 { 1.0 } else { 2.0 } / nodes as f64
        })
        .collect();

    // to the monomial basis via the three-term recurrence
    let mut mono = vec![0.0; nodes];
    let mut t_prev = vec![1.0];
    let mut t_cur = vec![0.0, 1.0];
    mono[0] += cheb[0];
    if nodes > 1 {
        mono[1] += cheb[1];
    }
    for c in cheb.iter().skip(2) {
        let mut t_next = vec![0.0; t_cur.len() + 1];
        for (i, v) in t_cur.iter().enumerate() {
            t_next[i + 1] += 2.0 * v;
        }
        for (i, v) in t_prev.iter().enumerate() {
            t_next[i] -= v;
        }
        for (i, v) in t_next.iter().enumerate() {
            mono[i] += c * v;
        }
        t_prev = std::mem::replace(&mut t_cur, t_next);
    }

    let max = mono.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    while mono.len() > 1 && mono.last().is_some_and(|v| v.abs() <= TRIM_TOL * max) {
        mono.pop();
    }
    Ok(mono)
}

fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        comp[(0, j)] = -coeffs[d - 1 - j] / lead;
    }
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Newton on `det(A - λB)` assuming a root of multiplicity `k`:
/// `λ ← λ + k / tr((A - λB)^{-1} B)`.
fn polish(p: &Pencil, mut lambda: Complex64, k: usize) -> Complex64 {
    for _ in 0..30 {
        let lu = p.shifted(lambda).lu();
        let Some(x) = lu.solve(p.b.matrix()) else {
            break;
        };
        let tr = x.trace();
        if tr.norm() == 0.0 || !tr.is_finite() {
            break;
        }
        let step = Complex64::new(k as f64, 0.0) / tr;
        if !step.is_finite() {
            break;
        }
        lambda += step;
        if step.norm() <= 1e-15 * lambda.norm().max(1.0) {
            break;
        }
    }
    lambda
}

/// `-1 / tr((A - λB)^{-1} B)`, the Newton correction `p/p'` of the determinant.
fn newton_ratio(p: &Pencil, lambda: Complex64) -> Option<Complex64> {
    let x = p.shifted(lambda).lu().solve(p.b.matrix())?;
    let tr = x.trace();
    let n = -Complex64::new(1.0, 0.0) / tr;
    n.is_finite().then_some(n)
}

/// Aberth-Ehrlich refinement of all roots at once. The mutual repulsion term keeps
/// nearby roots from collapsing onto the same eigenvalue.
fn aberth(p: &Pencil, mut z: Vec<Complex64>) -> Vec<Complex64> {
    for i in 1..z.len() {
        if z[..i].contains(&z[i]) {
            let nudge = 1e-10 * z[i].norm().max(1.0) * i as f64;
            z[i] += Complex64::new(0.0, nudge);
        }
    }
    // in-place updates break the conjugate symmetry a real polynomial would otherwise keep
    for _ in 0..200 {
        let mut biggest = 0.0f64;
        for i in 0..z.len() {
            let Some(n) = newton_ratio(p, z[i]) else {
                continue;
            };
            let s: Complex64 = (0..z.len())
                .filter(|&j| j != i && z[j] != z[i])
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = n / (Complex64::new(1.0, 0.0) - n * s);
            if w.is_finite() {
                biggest = biggest.max(w.norm() / z[i].norm().max(1.0));
                z[i] -= w;
            }
        }
        if biggest <= 1e-15 {
            break;
        }
    }
    z
}

fn nullity(p: &Pencil, lambda: Complex64) -> usize {
    let s = singular_values(&p.shifted(lambda));
    let cut = NULL_TOL * s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&v| v <= cut).count()
}

#[derive(Clone)]
struct Cluster {
    center: Complex64,
    size: usize,
}

fn merge_clusters(p: &Pencil, mut clusters: Vec<Cluster>) -> Vec<Cluster> {
    for tol in MERGE_STAGES {
        clusters.sort_by(|a, b| a.center.re.total_cmp(&b.center.re));
        let mut out: Vec<Cluster> = Vec::with_capacity(clusters.len());
        let mut used = vec![false; clusters.len()];
        for i in 0..clusters.len() {
            if used[i] {
                continue;
            }
            // single-linkage group around clusters[i]
            let mut group = vec![i];
            used[i] = true;
            let mut grew = true;
            while grew {
                grew = false;
                for j in 0..clusters.len() {
                    if used[j] {
                        continue;
                    }
                    let near = group.iter().any(|&g| {
                        let c = clusters[g].center;
                        (c - clusters[j].center).norm() <= tol * c.norm().max(1.0)
                    });
                    if near {
                        group.push(j);
                        used[j] = true;
                        grew = true;
                    }
                }
            }
            if group.len() == 1 {
                out.push(clusters[i].clone());
                continue;
            }
            let size: usize = group.iter().map(|&g| clusters[g].size).sum();
            let mean = group
                .iter()
                .map(|&g| clusters[g].center * clusters[g].size as f64)
                .sum::<Complex64>()
                / size as f64;
            let center = polish(p, Complex64::new(mean.re, 0.0), size);
            if nullity(p, center) >= size {
                out.push(Cluster { center, size });
            } else {
                out.extend(group.iter().map(|&g| clusters[g].clone()));
            }
        }
        clusters = out;
    }
    clusters
}

/// Unit-normalizes `v` and rotates its phase so the largest component is real positive.
pub fn align_phase(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonzero vector is nonempty");
    let phase = big.conj() / (big.norm() * norm);
    Ok(v.iter().map(|z| z * phase).collect())
}

/// All real finite eigenpairs of the pencil.
pub fn solve_pencil(p: &Pencil) -> Result<EigenpairSet> {
    let b_rank = numerical_rank(p.b.matrix());
    let na = frobenius(p.a.matrix());
    let nb = frobenius(p.b.matrix());
    let r = if nb > 0.0 && na > 0.0 { na / nb } else { 1.0 };

    let coeffs = char_poly(p, r)?;
    let roots: Vec<Complex64> = poly_roots(&coeffs).into_iter().map(|t| t * r).collect();
    let clusters: Vec<Cluster> = aberth(p, roots)
        .into_iter()
        .map(|center| Cluster { center, size: 1 })
        .collect();
    let clusters = merge_clusters(p, clusters);

    let mut pairs = Vec::new();
    for c in clusters {
        if c.center.im.abs() > IMAG_TOL * c.center.norm().max(1.0) {
            continue;
        }
        let lambda = c.center.re;
        let m = p.shifted(Complex64::new(lambda, 0.0));
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        for &idx in order.iter().take(c.size) {
            let raw: Vec<Complex64> = v_t.row(idx).iter().map(|z| z.conj()).collect();
            let vector = align_phase(&raw)?;
            let dv = DVector::from_column_slice(&vector);
            let b_norm = (dv.adjoint() * p.b.matrix() * &dv)[(0, 0)].re;
            pairs.push(Eigenpair {
                lambda,
                residual: p.residual(lambda, &vector),
                vector,
                b_norm,
                multiplicity: c.size,
            });
        }
    }
    pairs.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(EigenpairSet { pairs, b_rank })
}

/// Closed-form eigenpair of the pencil with
/// `A = [[a1,0,0,b],[0,a2,b,0],[0,b,a3,0],[b,0,0,a4]]` and `B` the all-ones 4×4 matrix.
/// The returned vector satisfies `(Σ v)² = v†Bv = 1`.
pub fn example2_closed_form(a1: f64, a2: f64, a3: f64, a4: f64, b: f64) -> Result<(f64, [f64; 4])> {
    let terms = [
        a1 * a2 * a3,
        a1 * a2 * a4,
        a1 * a3 * a4,
        a2 * a3 * a4,
        -2.0 * (a1 * a4 + a2 * a3) * b,
        -(a1 + a2 + a3 + a4) * b * b,
        4.0 * b * b * b,
    ];
    let q: f64 = terms.iter().sum();
    let size: f64 = terms.iter().map(|t| t.abs()).sum();
    if q.abs() <= 1e-13 * size || q == 0.0 {
        return Err(Error::UndefinedClosedForm);
    }
    let d14 = a1 * a4 - b * b;
    let d23 = a2 * a3 - b * b;
    let lambda = d14 * d23 / q;
    let v = [
        (a4 - b) * d23 / q,
        (a3 - b) * d14 / q,
        (a2 - b) * d14 / q,
        (a1 - b) * d23 / q,
    ];
    Ok((lambda, v))
}

/// `|<u|v>|²` after unit-normalizing both.
pub fn fidelity(u: &[Complex64], v: &[Complex64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::InvalidDimension(v.len()));
    }
    let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    Ok(ip.norm_sqr() / (nu * nv))
}

/// `v / sqrt(v† B v)`.
pub fn b_normalize(v: &[Complex64], b: &DenseHermitian) -> Result<Vec<Complex64>> {
    if v.len() != b.dim() {
        return Err(Error::InvalidDimension(v.len()));
    }
    let dv = DVector::from_column_slice(v);
    let nb = (dv.adjoint() * b.matrix() * &dv)[(0, 0)].re;
    if !(nb > 0.0) {
        return Err(Error::NotBNormalizable(nb));
    }
    Ok(v.iter().map(|z| z / nb.sqrt()).collect())
}

pub fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}
