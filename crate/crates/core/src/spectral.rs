//! Spectrum of the walk operator `T = (1/|S|)·A` on a Cayley graph, the
//! spectral gap on mean-zero functions and Cheeger bounds.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};

pub const DENSE_MAX: usize = 5000;
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const ITERATION_CAP: usize = 100_000;
/// `spectral_gap` switches to the iterative solver above this size.
pub const AUTO_DENSE_MAX: usize = 1500;

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterativeConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        Self { max_iterations: ITERATION_CAP, tolerance: RESIDUAL_TOL, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// `‖Tv − λv‖₂` for each reported pair.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    /// `true` when only extremal values on `l₀²` were computed.
    pub restricted: bool,
    pub iterations: usize,
}

impl Spectrum {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,eigenvalue,residual")?;
        for (i, (l, r)) in self.eigenvalues.iter().zip(&self.residuals).enumerate() {
            writeln!(w, "{i},{l:.17e},{r:.3e}")?;
        }
        Ok(())
    }
}

/// `out = T x`, i.e. `out[v] = (1/|S|) Σ_j x[v·s_j]`.
pub fn apply_walk(g: &CayleyGraph, x: &[f64], out: &mut [f64]) {
    let k = g.degree();
    let adj = g.adjacency();
    let scale = 1.0 / k as f64;
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let base = c * CHUNK;
        for (off, o) in chunk.iter_mut().enumerate() {
            let row = &adj[(base + off) * k..(base + off + 1) * k];
            let mut s = 0.0;
            for &w in row {
                s += x[w as usize];
            }
            *o = s * scale;
        }
    });
}

/// Inner product with a fixed reduction order.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn mean(a: &[f64]) -> f64 {
    let partial: Vec<f64> = a.par_chunks(CHUNK).map(|x| x.iter().sum::<f64>()).collect();
    partial.iter().sum::<f64>() / a.len() as f64
}

fn deflate(a: &mut [f64]) {
    let m = mean(a);
    a.par_iter_mut().for_each(|x| *x -= m);
}

fn residual(g: &CayleyGraph, v: &[f64], lambda: f64, scratch: &mut [f64]) -> f64 {
    apply_walk(g, v, scratch);
    let partial: Vec<f64> = scratch
        .par_chunks(CHUNK)
        .zip(v.par_chunks(CHUNK))
        .map(|(t, x)| t.iter().zip(x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>())
        .collect();
    partial.iter().sum::<f64>().sqrt()
}

pub fn walk_matrix(g: &CayleyGraph) -> Result<DMatrix<f64>> {
    let n = g.num_vertices();
    if n > DENSE_MAX {
        return Err(Error::TooLargeForDense(n));
    }
    let scale = 1.0 / g.degree() as f64;
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n {
        for &w in g.neighbors(v) {
            m[(v, w as usize)] += scale;
        }
    }
    Ok(m)
}

pub fn spectrum(g: &CayleyGraph, mode: Mode) -> Result<Spectrum> {
    match mode {
        Mode::Dense => dense_spectrum(g),
        Mode::Iterative => iterative_spectrum(g, &IterativeConfig::default()),
    }
}

fn dense_spectrum(g: &CayleyGraph) -> Result<Spectrum> {
    let n = g.num_vertices();
    let eig = SymmetricEigen::new(walk_matrix(g)?);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut scratch = vec![0.0; n];
    let mut eigenvalues = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &i in &order {
        let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        let lambda = eig.eigenvalues[i];
        let r = residual(g, &v, lambda, &mut scratch);
        if r > RESIDUAL_TOL {
            return Err(Error::Residual { residual: r, tolerance: RESIDUAL_TOL });
        }
        eigenvalues.push(lambda);
        residuals.push(r);
    }
    Ok(Spectrum { eigenvalues, residuals, tolerance: RESIDUAL_TOL, restricted: false, iterations: 0 })
}

/// `λ₂` and `λ_min` of `T` on `l₀²` by Lanczos with the constant vector projected
/// out at every step. Ritz vectors are rebuilt in a second sweep so the true
/// residuals can be checked.
pub fn iterative_spectrum(g: &CayleyGraph, cfg: &IterativeConfig) -> Result<Spectrum> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::Precondition("l₀² is trivial on a one-vertex graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    deflate(&mut start);
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);

    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q_prev = vec![0.0; n];
    let mut q = start.clone();
    let mut w = vec![0.0; n];
    let mut next_check = 8usize;
    let mut last_estimate = f64::INFINITY;
    loop {
        let beta_prev = betas.last().copied().unwrap_or(0.0);
        let alpha = lanczos_step(g, &q_prev, &q, beta_prev, None, &mut w);
        alphas.push(alpha);
        let beta = norm(&w);
        betas.push(beta);
        let m = alphas.len();
        let breakdown = beta <= 1e-13 || m >= n - 1;
        if breakdown || m >= next_check {
            let (top, bottom) = tridiagonal_extremes(&alphas, &betas[..m - 1]);
            let est = (beta * top.1[m - 1]).abs().max((beta * bottom.1[m - 1]).abs());
            last_estimate = est;
            if breakdown || est < cfg.tolerance * 1e-2 {
                let out = ritz_pairs(g, &start, &alphas, &betas, [&top.1, &bottom.1])?;
                let [(l2, r2), (lmin, rmin)] = out;
                if r2 <= cfg.tolerance && rmin <= cfg.tolerance {
                    return Ok(Spectrum {
                        eigenvalues: vec![l2, lmin],
                        residuals: vec![r2, rmin],
                        tolerance: cfg.tolerance,
                        restricted: true,
                        iterations: m,
                    });
                }
                if breakdown {
                    return Err(Error::Residual { residual: r2.max(rmin), tolerance: cfg.tolerance });
                }
                next_check = m + 4;
            } else {
                next_check = m + (m / 4).max(4);
            }
        }
        if m >= cfg.max_iterations {
            return Err(Error::NoConvergence { iterations: m, residual: last_estimate });
        }
        std::mem::swap(&mut q_prev, &mut q);
        let inv = 1.0 / beta;
        q.par_iter_mut().zip(w.par_iter()).for_each(|(a, b)| *a = b * inv);
    }
}

/// `w = T q − β q_prev − α q`, projected to mean zero; returns `α`
/// (recomputed unless given).
fn lanczos_step(g: &CayleyGraph, q_prev: &[f64], q: &[f64], beta_prev: f64, alpha: Option<f64>, w: &mut [f64]) -> f64 {
    apply_walk(g, q, w);
    w.par_iter_mut().zip(q_prev.par_iter()).for_each(|(a, b)| *a -= beta_prev * b);
    let alpha = alpha.unwrap_or_else(|| dot(w, q));
    w.par_iter_mut().zip(q.par_iter()).for_each(|(a, b)| *a -= alpha * b);
    deflate(w);
    alpha
}

type RitzPair = (f64, Vec<f64>);

fn tridiagonal_extremes(alphas: &[f64], off: &[f64]) -> (RitzPair, RitzPair) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = off[i];
            t[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (mut hi, mut lo) = (0, 0);
    for i in 0..m {
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
    }
    let col = |i: usize| eig.eigenvectors.column(i).iter().copied().collect::<Vec<_>>();
    ((eig.eigenvalues[hi], col(hi)), (eig.eigenvalues[lo], col(lo)))
}

/// Replays the recurrence to form `Σ y_j q_j` and returns Rayleigh quotients
/// with true residuals.
fn ritz_pairs(g: &CayleyGraph, start: &[f64], alphas: &[f64], betas: &[f64], ys: [&[f64]; 2]) -> Result<[(f64, f64); 2]> {
    let n = start.len();
    let mut acc = [vec![0.0; n], vec![0.0; n]];
    let mut q_prev = vec![0.0; n];
    let mut q = start.to_vec();
    let mut w = vec![0.0; n];
    for j in 0..alphas.len() {
        for (a, y) in acc.iter_mut().zip(ys) {
            let c = y[j];
            a.par_iter_mut().zip(q.par_iter()).for_each(|(s, x)| *s += c * x);
        }
        if j + 1 == alphas.len() {
            break;
        }
        let beta_prev = if j == 0 { 0.0 } else { betas[j - 1] };
        lanczos_step(g, &q_prev, &q, beta_prev, Some(alphas[j]), &mut w);
        std::mem::swap(&mut q_prev, &mut q);
        let inv = 1.0 / betas[j];
        q.par_iter_mut().zip(w.par_iter()).for_each(|(a, b)| *a = b * inv);
    }
    let mut out = [(0.0, 0.0); 2];
    for (slot, v) in out.iter_mut().zip(acc.iter_mut()) {
        deflate(v);
        let s = norm(v);
        v.iter_mut().for_each(|x| *x /= s);
        apply_walk(g, v, &mut w);
        let rq = dot(&w, v);
        *slot = (rq, residual(g, v, rq, &mut q));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `1 − max |λ|` over eigenvalues on `l₀²`.
    pub gap: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    /// `max(|λ₂|, |λ_min|)`.
    pub lambda_star: f64,
    pub bipartite: bool,
    pub max_residual: f64,
    pub mode: Mode,
}

pub fn spectral_gap(g: &CayleyGraph) -> Result<GapReport> {
    let mode = if g.num_vertices() <= AUTO_DENSE_MAX { Mode::Dense } else { Mode::Iterative };
    spectral_gap_with(g, mode)
}

pub fn spectral_gap_with(g: &CayleyGraph, mode: Mode) -> Result<GapReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::Precondition("l₀² is trivial on a one-vertex graph".into()));
    }
    let sp = spectrum(g, mode)?;
    // On a connected graph the dense top eigenvalue is the constant vector's.
    let (lambda2, lambda_min) = match mode {
        Mode::Dense => (sp.eigenvalues[1], sp.eigenvalues[n - 1]),
        Mode::Iterative => (sp.eigenvalues[0], sp.eigenvalues[1]),
    };
    Ok(gap_from(lambda2, lambda_min, sp.max_residual(), mode))
}

fn gap_from(lambda2: f64, lambda_min: f64, max_residual: f64, mode: Mode) -> GapReport {
    let lambda_star = lambda2.abs().max(lambda_min.abs());
    GapReport {
        gap: 1.0 - lambda_star,
        lambda2,
        lambda_min,
        lambda_star,
        bipartite: (lambda_min + 1.0).abs() <= RESIDUAL_TOL.sqrt(),
        max_residual,
        mode,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheegerBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `|S|(1−λ₂)/2 ≤ h ≤ |S|·sqrt(2(1−λ₂))`.
pub fn cheeger_bounds(degree: usize, lambda2: f64) -> CheegerBounds {
    let d = degree as f64;
    let spread = (1.0 - lambda2).max(0.0);
    CheegerBounds { lower: d * spread / 2.0, upper: d * (2.0 * spread).sqrt() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub vertices: usize,
    pub degree: usize,
    pub gap: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    pub cheeger_lower: f64,
    pub cheeger_upper: f64,
    pub exact_cheeger: Option<String>,
}

pub fn summarize(g: &CayleyGraph, report: &GapReport, exact: Option<num_rational::Ratio<u64>>) -> SpectralSummary {
    let b = cheeger_bounds(g.degree(), report.lambda2);
    SpectralSummary {
        vertices: g.num_vertices(),
        degree: g.degree(),
        gap: report.gap,
        lambda2: report.lambda2,
        lambda_min: report.lambda_min,
        cheeger_lower: b.lower,
        cheeger_upper: b.upper,
        exact_cheeger: exact.map(|h| format!("{}/{}", h.numer(), h.denom())),
    }
}
