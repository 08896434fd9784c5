//! Brute-force reference values computed straight from enumerated periodic points.
//!
//! Nothing here goes through a transfer matrix. Birkhoff sums and cylinder hits are read off
//! cyclic windows of each enumerated point, sums are formed in plain floating point, and the
//! pressure limit is extracted from the sequence `Z_n = Σ_{Fix_n} e^{c f^n}` alone.

use nalgebra::{DMatrix, DVector};
use zetatherm_symbolic::{for_each_fix, LocallyConstantPotential, Result, Symbol, Word};

/// `f^n(x)` for the periodic point with period word `x`, window by window.
pub fn periodic_sum(f: &LocallyConstantPotential, x: &[Symbol]) -> f64 {
    let m = f.range();
    let n = x.len();
    let mut window = Vec::with_capacity(m);
    (0..n)
        .map(|i| {
            window.clear();
            window.extend((0..m).map(|k| x[(i + k) % n]));
            f.value(&window).expect("cyclically admissible point")
        })
        .sum()
}

/// Number of shifts `σ^i x`, `0 ≤ i < n`, that start with `w`.
pub fn hits(w: &[Symbol], x: &[Symbol]) -> usize {
    let n = x.len();
    (0..n)
        .filter(|&i| w.iter().enumerate().all(|(k, &s)| x[(i + k) % n] == s))
        .count()
}

fn log_sum(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `log Σ_{x ∈ Fix_n} e^{c f^n(x)}`.
pub fn log_partition_sum(f: &LocallyConstantPotential, c: f64, n: usize) -> Result<f64> {
    let mut exponents = Vec::new();
    for_each_fix(f.spec(), n, |x| exponents.push(c * periodic_sum(f, x)))?;
    Ok(log_sum(&exponents))
}

/// Brute-force pressure estimates from `Z_1, …, Z_{n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureEstimate {
    /// `(n, (1/n) log Z_n)`.
    pub terms: Vec<(usize, f64)>,
    /// Aitken Δ² applied to the last three finite terms.
    pub aitken: f64,
    /// Dominant root of the linear recurrence fitted to `Z_n`.
    pub extrapolated: f64,
    /// Order of that recurrence.
    pub order: usize,
    pub fit_residual: f64,
}

/// `P(cf)` as the limit of `(1/n) log Z_n`.
///
/// `Z_n` is a power sum `Σ_i λ_i^n`, so it obeys a short linear recurrence; the limit is the
/// log of the largest root of the fitted recurrence, which converges far faster than the raw
/// terms when the second eigenvalue is close to the first.
pub fn pressure_bruteforce(f: &LocallyConstantPotential, c: f64, n_max: usize) -> Result<PressureEstimate> {
    let logs: Vec<f64> = (1..=n_max)
        .map(|n| log_partition_sum(f, c, n))
        .collect::<Result<_>>()?;
    let terms: Vec<(usize, f64)> = logs
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, &v)| (i + 1, v / (i + 1) as f64))
        .collect();
    let aitken = match terms.as_slice() {
        [.., (_, a), (_, b), (_, c)] => {
            let denom = c - 2.0 * b + a;
            if denom.abs() < 1e-300 {
                *c
            } else {
                c - (c - b) * (c - b) / denom
            }
        }
        _ => terms.last().map_or(f64::NAN, |t| t.1),
    };
    let shift = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let z: Vec<f64> = logs
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - (i + 1) as f64 * shift).exp())
        .collect();
    let (order, coeffs, fit_residual) = fit_recurrence(&z);
    let root = dominant_root(&coeffs);
    Ok(PressureEstimate {
        terms,
        aitken,
        extrapolated: shift + root.ln(),
        order,
        fit_residual,
    })
}

/// Least-squares fit `z_{n+k} = Σ_{i<k} a_i z_{n+i}`, taking the smallest order that fits.
fn fit_recurrence(z: &[f64]) -> (usize, Vec<f64>, f64) {
    let max_order = ((z.len().saturating_sub(1)) / 2).clamp(1, 10);
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for k in 1..=max_order {
        let rows = z.len() - k;
        let a = DMatrix::from_fn(rows, k, |r, col| z[r + col]);
        let b = DVector::from_fn(rows, |r, _| z[r + k]);
        let Ok(sol) = a.clone().svd(true, true).solve(&b, 1e-14) else {
            continue;
        };
        let residual = (&a * &sol - &b).norm() / b.norm().max(f64::MIN_POSITIVE);
        let coeffs = sol.iter().copied().collect();
        if residual < 1e-10 {
            return (k, coeffs, residual);
        }
        if best.as_ref().is_none_or(|b| residual < b.2) {
            best = Some((k, coeffs, residual));
        }
    }
    best.expect("order-one fit always exists")
}

/// Largest-modulus root of `λ^k − Σ a_i λ^i`.
fn dominant_root(coeffs: &[f64]) -> f64 {
    let k = coeffs.len();
    let companion = DMatrix::from_fn(k, k, |r, c| {
        if r + 1 == k {
            coeffs[c]
        } else if c == r + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .map(|z| z.re)
        .expect("nonempty companion matrix")
}

/// `max_{n ≤ cap} max_{x ∈ Fix_n} f^n(x)/n`.
pub fn max_mean_bruteforce(f: &LocallyConstantPotential, cap: usize) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for n in 1..=cap {
        for_each_fix(f.spec(), n, |x| best = best.max(periodic_sum(f, x) / n as f64))?;
    }
    Ok(best)
}

/// Which periodic-orbit series to sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesKind {
    /// Weights `e^{cs f^n − n p}` with `p = P(cf)`.
    Zeta { c: f64, s: f64, p: f64 },
    /// Weights `e^{c f^n − n p}` with `p = P(cf)`.
    Pi { c: f64, p: f64 },
    /// Weights `e^{c f^n}`.
    Eta { c: f64 },
}

impl SeriesKind {
    fn exponent(&self, birkhoff: f64, n: usize) -> f64 {
        match *self {
            SeriesKind::Zeta { c, s, p } => c * s * birkhoff - n as f64 * p,
            SeriesKind::Pi { c, p } => c * birkhoff - n as f64 * p,
            SeriesKind::Eta { c } => c * birkhoff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteMeasure {
    pub numerator: f64,
    pub denominator: f64,
    pub value: f64,
}

/// `Σ_{n ≤ n_max} Σ_{Fix_n} e^{…} k^n(x)/n ⁄ Σ_{n ≤ n_max} Σ_{Fix_n} e^{…}` with `k = 1_{[w]}`,
/// summed literally in plain arithmetic.
pub fn measure_bruteforce(f: &LocallyConstantPotential, kind: SeriesKind, n_max: usize, w: &Word) -> Result<BruteMeasure> {
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for n in 1..=n_max {
        for_each_fix(f.spec(), n, |x| {
            let weight = kind.exponent(periodic_sum(f, x), n).exp();
            denominator += weight;
            numerator += weight * hits(w.symbols(), x) as f64 / n as f64;
        })?;
    }
    Ok(BruteMeasure {
        numerator,
        denominator,
        value: numerator / denominator,
    })
}

/// `Σ_{Fix_n} e^{c f^n}` in plain arithmetic.
pub fn trace_bruteforce(f: &LocallyConstantPotential, c: f64, n: usize) -> Result<f64> {
    let mut total = 0.0;
    for_each_fix(f.spec(), n, |x| total += (c * periodic_sum(f, x)).exp())?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zetatherm_symbolic::ShiftSpec;

    fn fa() -> LocallyConstantPotential {
        LocallyConstantPotential::from_symbol_values(&ShiftSpec::full(2).unwrap(), &[1.0, 0.0]).unwrap()
    }

    fn fb() -> LocallyConstantPotential {
        LocallyConstantPotential::from_fn(&ShiftSpec::full(2).unwrap(), 2, |w| {
            if w.symbols()[0] != w.symbols()[1] { 1.0 } else { 0.0 }
        })
        .unwrap()
    }

    #[test]
    fn range_one_sum_is_a_power() {
        for n in 1..=10 {
            let z = trace_bruteforce(&fa(), 1.0, n).unwrap();
            let exact = (1f64.exp() + 1.0).powi(n as i32);
            assert!((z / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn range_two_sum_is_two_powers() {
        let c = 2.0f64;
        for n in 1..=10 {
            let z = trace_bruteforce(&fb(), c, n).unwrap();
            let exact = (c.exp() + 1.0).powi(n as i32) + (1.0 - c.exp()).powi(n as i32);
            assert!((z / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn extrapolated_pressure() {
        for c in [0.5, 1.0, 5.0] {
            let exact = (f64::exp(c) + 1.0).ln();
            let a = pressure_bruteforce(&fa(), c, 12).unwrap();
            assert_eq!(a.order, 1);
            assert!((a.extrapolated - exact).abs() < 1e-12);
            let b = pressure_bruteforce(&fb(), c, 12).unwrap();
            assert!((b.extrapolated - exact).abs() < 1e-9, "c={c}: {}", b.extrapolated);
            // raw terms converge only like ((e^c−1)/(e^c+1))^n
            assert!(b.terms.last().unwrap().1 > exact);
        }
    }

    #[test]
    fn golden_mean_pressure() {
        let spec = ShiftSpec::golden_mean();
        let f = LocallyConstantPotential::constant(&spec, 0.0).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let p = pressure_bruteforce(&f, 1.0, 16).unwrap();
        assert!((p.extrapolated - golden.ln()).abs() < 1e-10);
    }

    #[test]
    fn max_means() {
        assert_eq!(max_mean_bruteforce(&fa(), 6).unwrap(), 1.0);
        assert_eq!(max_mean_bruteforce(&fb(), 6).unwrap(), 1.0);
    }

    #[test]
    fn hits_wrap_around() {
        assert_eq!(hits(&[0, 0], &[0]), 1);
        assert_eq!(hits(&[1, 0], &[0, 1]), 1);
        assert_eq!(hits(&[0, 1, 0], &[0, 1]), 1);
        assert_eq!(hits(&[1, 1], &[0, 1]), 0);
    }

    #[test]
    fn product_measure_levels() {
        let w = Word::parse("1").unwrap();
        let m = measure_bruteforce(&fa(), SeriesKind::Eta { c: 1.0 }, 8, &w).unwrap();
        let e = 1f64.exp();
        assert!((m.value - e / (e + 1.0)).abs() < 1e-12);
    }
}
