//! Pressure, Perron data, Gibbs cylinder measures and `ε_c = P(cf) − cβ(f)`.
//!
//! All `c`-dependent arithmetic stays in the log domain. The Perron vector is found by power
//! iteration on `A + e^γ I` (aperiodic even when `A` is periodic), periodically replacing the
//! iteration operator by its renormalized square. Convergence is certified by the
//! Collatz–Wielandt bounds `min_u (Av)_u / v_u ≤ λ ≤ max_u (Av)_u / v_u` evaluated on `A`
//! itself, so the returned residual bounds the error of `log λ`.

use zetatherm_symbolic::{LocallyConstantPotential, Word};

use crate::ergopt;
use crate::error::{CoreError, Result};
use crate::logspace::{log_sum_exp, log_sum_exp_slice, LogMatrix};
use crate::transfer::{DeBruijnGraph, TransferMatrix};

pub const SPECTRAL_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 100_000;
pub const DERIVATIVE_STEP: f64 = 1e-5;

const SQUARING_PERIOD: usize = 16;
const MAX_SQUARINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PerronOptions {
    fn default() -> Self {
        Self {
            tol: SPECTRAL_TOL,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

/// Perron root and eigenvectors of a nonnegative irreducible matrix, all as logs.
///
/// `Σ right = 1` and `⟨left, right⟩ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronData {
    pub log_lambda: f64,
    pub log_left: Vec<f64>,
    pub log_right: Vec<f64>,
    /// Width of the Collatz–Wielandt bracket on `log λ`.
    pub residual: f64,
    pub iterations: usize,
}

impl PerronData {
    pub fn left(&self) -> Vec<f64> {
        self.log_left.iter().map(|v| v.exp()).collect()
    }

    pub fn right(&self) -> Vec<f64> {
        self.log_right.iter().map(|v| v.exp()).collect()
    }
}

fn collatz_wielandt(matrix: &LogMatrix, v: &[f64]) -> (f64, f64) {
    let image = matrix.apply(v);
    image
        .iter()
        .zip(v)
        .map(|(a, b)| a - b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

fn normalize_max(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.iter_mut().for_each(|x| *x -= max);
}

/// Dominant eigenvector of `matrix` (acting on columns) and its bracket on `log λ`.
fn dominant_vector(matrix: &LogMatrix, options: &PerronOptions) -> Result<(Vec<f64>, f64, f64, usize)> {
    let n = matrix.dim();
    let upper = (0..n)
        .map(|i| log_sum_exp_slice(matrix.row(i)))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut operator = matrix.with_diagonal_shift(upper);
    let mut v = vec![0.0; n];
    let mut squarings = 0;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for iteration in 1..=options.max_iterations {
        v = operator.apply(&v);
        normalize_max(&mut v);
        (lo, hi) = collatz_wielandt(matrix, &v);
        if hi - lo < options.tol {
            return Ok((v, lo, hi, iteration));
        }
        if iteration % SQUARING_PERIOD == 0 && squarings < MAX_SQUARINGS {
            operator = operator.matmul(&operator);
            let max = (0..n)
                .flat_map(|i| operator.row(i).iter().copied())
                .fold(f64::NEG_INFINITY, f64::max);
            for i in 0..n {
                for j in 0..n {
                    operator.set(i, j, operator.get(i, j) - max);
                }
            }
            squarings += 1;
        }
    }
    Err(CoreError::NonConvergence {
        iterations: options.max_iterations,
        residual: hi - lo,
    })
}

/// Perron root and normalized left/right eigenvectors of a log matrix.
pub fn perron(matrix: &LogMatrix, options: &PerronOptions) -> Result<PerronData> {
    if !(options.tol > 0.0) {
        return Err(CoreError::InvalidParameter(format!("tol must be positive, got {}", options.tol)));
    }
    if !matrix.is_irreducible() {
        return Err(CoreError::Reducible);
    }
    let (mut right, lo, hi, it_right) = dominant_vector(matrix, options)?;
    let (mut left, lo_l, hi_l, it_left) = dominant_vector(&matrix.transpose(), options)?;
    let norm_right = log_sum_exp_slice(&right);
    right.iter_mut().for_each(|x| *x -= norm_right);
    let pairing = log_sum_exp(left.iter().zip(&right).map(|(a, b)| a + b));
    left.iter_mut().for_each(|x| *x -= pairing);
    Ok(PerronData {
        log_lambda: 0.5 * (lo + hi),
        log_left: left,
        log_right: right,
        residual: (hi - lo).max(hi_l - lo_l),
        iterations: it_right.max(it_left),
    })
}

/// `P(cf)` together with the Perron data of the transfer matrix of `cf`.
pub fn pressure(f: &LocallyConstantPotential, c: f64, tol: f64) -> Result<PerronData> {
    let tm = TransferMatrix::new(f, c)?;
    perron(
        tm.log_weights(),
        &PerronOptions {
            tol,
            ..PerronOptions::default()
        },
    )
}

/// Log pressure with the default tolerance.
pub fn log_pressure(f: &LocallyConstantPotential, c: f64) -> Result<f64> {
    Ok(pressure(f, c, SPECTRAL_TOL)?.log_lambda)
}

/// Measure of a cylinder, with a flag for inadmissible words (which get measure zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderMeasure {
    pub value: f64,
    pub log_value: f64,
    pub admissible: bool,
}

impl CylinderMeasure {
    pub(crate) fn from_log(log_value: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
            admissible: true,
        }
    }

    pub(crate) fn null() -> Self {
        Self {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            admissible: false,
        }
    }
}

/// The equilibrium state of `cf`, evaluated on cylinders.
#[derive(Debug, Clone)]
pub struct GibbsState {
    f: LocallyConstantPotential,
    tm: TransferMatrix,
    perron: PerronData,
}

impl GibbsState {
    pub fn new(f: &LocallyConstantPotential, c: f64) -> Result<Self> {
        let tm = TransferMatrix::new(f, c)?;
        let perron = perron(tm.log_weights(), &PerronOptions::default())?;
        Ok(Self {
            f: f.clone(),
            tm,
            perron,
        })
    }

    pub fn perron(&self) -> &PerronData {
        &self.perron
    }

    pub fn graph(&self) -> &DeBruijnGraph {
        self.tm.graph()
    }

    /// `μ([w]) = left(u_start) · e^{c·(path sum) − (j−r) log λ} · right(u_end)`, summed over
    /// extensions when `|w| < r`.
    pub fn cylinder(&self, w: &Word) -> CylinderMeasure {
        let graph = self.tm.graph();
        let spec = graph.spec();
        if w.check_alphabet(spec).is_err() || !spec.is_admissible(w.symbols()) {
            return CylinderMeasure::null();
        }
        let p = &self.perron;
        if w.len() < graph.state_len() {
            let log_value = log_sum_exp(
                graph
                    .extensions(w)
                    .into_iter()
                    .map(|u| p.log_left[u] + p.log_right[u]),
            );
            return CylinderMeasure::from_log(log_value);
        }
        let path = graph.state_path(&self.f, w).expect("admissible word");
        let log_value = p.log_left[path.start()] + self.tm.c() * path.value
            - path.edge_count() as f64 * p.log_lambda
            + p.log_right[path.end()];
        CylinderMeasure::from_log(log_value)
    }
}

/// `μ_{cf}([w])`.
pub fn gibbs_cylinder(f: &LocallyConstantPotential, c: f64, w: &Word) -> Result<CylinderMeasure> {
    Ok(GibbsState::new(f, c)?.cylinder(w))
}

/// Central difference `[P(csf + h·1_[k]) − P(csf − h·1_[k])] / 2h`, which approximates
/// `∫ 1_[k] dμ_{csf}`.
pub fn pressure_derivative(
    f: &LocallyConstantPotential,
    c: f64,
    s: f64,
    k: &Word,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(CoreError::InvalidParameter(format!("h must be positive, got {h}")));
    }
    let spec = f.spec();
    k.check_alphabet(spec)?;
    if !spec.is_admissible(k.symbols()) {
        return Err(CoreError::Inadmissible(k.to_text(spec.d())));
    }
    let indicator = LocallyConstantPotential::cylinder_indicator(spec, k)?;
    let up = f.combine(c * s, &indicator, h)?;
    let down = f.combine(c * s, &indicator, -h)?;
    let p_up = pressure(&up, 1.0, SPECTRAL_TOL)?.log_lambda;
    let p_down = pressure(&down, 1.0, SPECTRAL_TOL)?.log_lambda;
    Ok((p_up - p_down) / (2.0 * h))
}

/// `ε_c = P(cf) − c β(f)`.
pub fn epsilon_c(f: &LocallyConstantPotential, c: f64) -> Result<f64> {
    let beta = ergopt::beta(f);
    Ok(log_pressure(f, c)? - c * beta)
}
