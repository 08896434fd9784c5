//! Birkhoff sums along periodic orbits.

use crate::error::{Result, SymbolicError};
use crate::potential::LocallyConstantPotential;
use crate::word::{PeriodicWord, Word};

/// `f^n(x) = f(x) + f(σx) + … + f(σ^{n-1}x)` over one presented period `n = x.n()`.
///
/// Exact: every term is a table lookup on a cyclic window of `repeat(word)`.
pub fn birkhoff_sum(f: &LocallyConstantPotential, x: &PeriodicWord) -> Result<f64> {
    let spec = f.spec();
    x.word().check_alphabet(spec)?;
    if !spec.is_cyclically_admissible(x.symbols()) {
        return Err(SymbolicError::NotCyclic(x.word().to_text(spec.d())));
    }
    Ok((0..x.n()).map(|i| f.eval_periodic(x, i)).sum())
}

/// Birkhoff sum over one period for a raw cyclically admissible window buffer.
#[inline]
pub fn birkhoff_sum_raw(f: &LocallyConstantPotential, symbols: &[u8]) -> f64 {
    let n = symbols.len();
    let d = f.spec().d();
    let m = f.range();
    (0..n)
        .map(|i| {
            let code = (0..m).fold(0usize, |acc, k| acc * d + symbols[(i + k) % n] as usize);
            f.value_at_code(code)
        })
        .sum()
}

/// `k^n(x)` for `k = 1_[w]`: the number of offsets `i < n` where `repeat(x)` shifted by `i`
/// begins with `w`. Windows wrap around as many times as needed.
pub fn cylinder_hits(w: &Word, x: &PeriodicWord) -> usize {
    cylinder_hits_raw(w.symbols(), x.symbols())
}

#[inline]
pub fn cylinder_hits_raw(w: &[u8], x: &[u8]) -> usize {
    let n = x.len();
    (0..n)
        .filter(|&i| w.iter().enumerate().all(|(k, &s)| x[(i + k) % n] == s))
        .count()
}
