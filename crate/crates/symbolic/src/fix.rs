//! Enumeration of `Fix_n`, the points with `σ^n(x) = x`.

use crate::error::{Result, SymbolicError};
use crate::shift::{ShiftSpec, Symbol};
use crate::word::{PeriodicWord, Word};

fn check_cap(spec: &ShiftSpec, n: usize) -> Result<()> {
    if n == 0 {
        return Err(SymbolicError::ZeroPeriod);
    }
    if n > spec.period_cap() {
        return Err(SymbolicError::PeriodCapExceeded {
            n,
            cap: spec.period_cap(),
        });
    }
    Ok(())
}

/// Lexicographic walk over admissible words of length `n`, keeping the cyclically admissible ones.
#[derive(Debug, Clone)]
pub struct FixIter<'a> {
    spec: &'a ShiftSpec,
    buf: Vec<Symbol>,
    next_candidate: Vec<usize>,
    depth: usize,
    done: bool,
}

impl<'a> FixIter<'a> {
    fn new(spec: &'a ShiftSpec, n: usize) -> Self {
        Self {
            spec,
            buf: vec![0; n],
            next_candidate: vec![0; n + 1],
            depth: 0,
            done: false,
        }
    }

    /// Advances to the next cyclically admissible word, leaving it in `buf`.
    fn advance(&mut self) -> bool {
        let n = self.buf.len();
        let d = self.spec.d();
        if self.done {
            return false;
        }
        loop {
            if self.depth == n {
                self.depth -= 1;
                if self.spec.allows(self.buf[n - 1], self.buf[0]) {
                    return true;
                }
                continue;
            }
            let k = self.depth;
            let start = self.next_candidate[k];
            let found = (start..d).find(|&a| k == 0 || self.spec.allows(self.buf[k - 1], a as Symbol));
            match found {
                Some(a) => {
                    self.buf[k] = a as Symbol;
                    self.next_candidate[k] = a + 1;
                    self.depth += 1;
                    self.next_candidate[self.depth] = 0;
                }
                None => {
                    if k == 0 {
                        self.done = true;
                        return false;
                    }
                    self.depth -= 1;
                }
            }
        }
    }
}

impl Iterator for FixIter<'_> {
    type Item = PeriodicWord;

    fn next(&mut self) -> Option<PeriodicWord> {
        if self.advance() {
            let word = Word::new(self.buf.clone()).expect("n >= 1");
            Some(PeriodicWord::new_unchecked(word))
        } else {
            None
        }
    }
}

/// Every point of `Fix_n`, each exactly once, as its generating word of length `n`.
pub fn enumerate_fix(spec: &ShiftSpec, n: usize) -> Result<FixIter<'_>> {
    check_cap(spec, n)?;
    Ok(FixIter::new(spec, n))
}

/// Allocation-free traversal of `Fix_n`; the slice is the generating word.
pub fn for_each_fix<F: FnMut(&[Symbol])>(spec: &ShiftSpec, n: usize, mut visit: F) -> Result<()> {
    check_cap(spec, n)?;
    let mut iter = FixIter::new(spec, n);
    while iter.advance() {
        visit(&iter.buf);
    }
    Ok(())
}

/// One σ-orbit inside `Fix_n`: a primitive necklace (Lyndon word) of length `p | n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClass {
    pub primitive: PeriodicWord,
    /// Number of points of `Fix_n` on this orbit, which is `p`.
    pub orbit_size: usize,
    pub n: usize,
}

impl OrbitClass {
    /// The orbit's Lyndon representative presented with period `n`.
    pub fn presented(&self) -> PeriodicWord {
        PeriodicWord::new_unchecked(self.primitive.word().repeat(self.n / self.orbit_size))
    }
}

/// Lyndon words of length exactly `p` over `d` letters (Duval's generator).
fn lyndon_words(d: usize, p: usize) -> Vec<Vec<Symbol>> {
    let mut out = Vec::new();
    let mut w: Vec<usize> = vec![0];
    while !w.is_empty() {
        if w.len() == p {
            out.push(w.iter().map(|&s| s as Symbol).collect());
        }
        let m = w.len();
        while w.len() < p {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&(d - 1)) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

/// Orbit classes of `Fix_n`. Summing `orbit_size * F(presented)` over the classes equals the
/// sum of `F` over `Fix_n` for any shift-invariant `F`.
pub fn enumerate_orbits(spec: &ShiftSpec, n: usize) -> Result<Vec<OrbitClass>> {
    check_cap(spec, n)?;
    let mut classes = Vec::new();
    for p in (1..=n).filter(|p| n.is_multiple_of(*p)) {
        for word in lyndon_words(spec.d(), p) {
            if spec.is_cyclically_admissible(&word) {
                classes.push(OrbitClass {
                    primitive: PeriodicWord::new_unchecked(Word::new(word)?),
                    orbit_size: p,
                    n,
                });
            }
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(spec: &ShiftSpec, n: usize) -> Vec<String> {
        enumerate_fix(spec, n)
            .unwrap()
            .map(|x| x.word().to_text(spec.d()))
            .collect()
    }

    #[test]
    fn full_shift_counts() {
        let spec = ShiftSpec::full(2).unwrap();
        assert_eq!(texts(&spec, 1), vec!["1", "2"]);
        assert_eq!(texts(&spec, 3).len(), 8);
        let spec3 = ShiftSpec::full(3).unwrap();
        assert_eq!(texts(&spec3, 4).len(), 81);
    }

    #[test]
    fn golden_mean_period_three() {
        let spec = ShiftSpec::golden_mean();
        assert_eq!(texts(&spec, 3), vec!["111", "112", "121", "211"]);
    }

    #[test]
    fn cap_is_a_hard_error() {
        let spec = ShiftSpec::full(2).unwrap().with_period_cap(5);
        assert!(matches!(
            enumerate_fix(&spec, 6),
            Err(SymbolicError::PeriodCapExceeded { n: 6, cap: 5 })
        ));
        assert!(matches!(enumerate_fix(&spec, 0), Err(SymbolicError::ZeroPeriod)));
        assert!(enumerate_orbits(&spec, 6).is_err());
    }

    #[test]
    fn minimal_periods_are_divisors() {
        let spec = ShiftSpec::full(2).unwrap();
        for x in enumerate_fix(&spec, 6).unwrap() {
            assert_eq!(6 % x.n_min(), 0);
        }
    }

    #[test]
    fn orbit_classes_cover_fix_n() {
        for spec in [ShiftSpec::full(2).unwrap(), ShiftSpec::golden_mean(), ShiftSpec::full(3).unwrap()] {
            for n in 1..=8 {
                let total: usize = enumerate_orbits(&spec, n).unwrap().iter().map(|c| c.orbit_size).sum();
                assert_eq!(total as u128, spec.fixed_point_count(n), "n = {n}");
            }
        }
    }
}
