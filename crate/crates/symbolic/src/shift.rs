//! One-sided subshifts of finite type over `{1,…,d}`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SymbolicError};

/// Symbols are stored zero-based; the text format is one-based.
pub type Symbol = u8;

pub const DEFAULT_THETA: f64 = 0.5;

/// Alphabet size plus allowed-transition matrix.
///
/// Construction validates that no symbol is stranded and that the transition
/// graph is strongly connected. The full shift is the all-ones matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpec {
    d: usize,
    allowed: Vec<bool>,
    theta: f64,
    period_cap: usize,
}

#[derive(Serialize, Deserialize)]
struct ShiftSpecFile {
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transitions: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

/// Enumeration cap on the period `n`, chosen so `d^n` stays in the low millions.
pub fn default_period_cap(d: usize) -> usize {
    match d {
        0 | 1 => 0,
        2 => 22,
        3 => 14,
        _ => {
            let budget = (3f64).powi(14).ln();
            (budget / (d as f64).ln()).floor().max(1.0) as usize
        }
    }
}

impl ShiftSpec {
    pub fn full(d: usize) -> Result<Self> {
        Self::new(d, vec![vec![1; d]; d])
    }

    pub fn new(d: usize, transitions: Vec<Vec<u8>>) -> Result<Self> {
        Self::with_theta(d, transitions, DEFAULT_THETA)
    }

    pub fn with_theta(d: usize, transitions: Vec<Vec<u8>>, theta: f64) -> Result<Self> {
        if d < 2 {
            return Err(SymbolicError::AlphabetTooSmall(d));
        }
        if d > Symbol::MAX as usize {
            return Err(SymbolicError::AlphabetTooLarge(d));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(SymbolicError::Theta(theta));
        }
        if transitions.len() != d || transitions.iter().any(|row| row.len() != d) {
            return Err(SymbolicError::TransitionShape { d });
        }
        let mut allowed = Vec::with_capacity(d * d);
        for row in &transitions {
            for &entry in row {
                match entry {
                    0 => allowed.push(false),
                    1 => allowed.push(true),
                    _ => return Err(SymbolicError::TransitionEntry),
                }
            }
        }
        for a in 0..d {
            let has_out = (0..d).any(|b| allowed[a * d + b]);
            let has_in = (0..d).any(|b| allowed[b * d + a]);
            if !has_out || !has_in {
                return Err(SymbolicError::StrandedSymbol(a + 1));
            }
        }
        let spec = Self {
            d,
            allowed,
            theta,
            period_cap: default_period_cap(d),
        };
        if !spec.is_irreducible() {
            return Err(SymbolicError::Reducible);
        }
        Ok(spec)
    }

    /// Golden-mean shift on two symbols: the word `22` (zero-based `11`) is forbidden.
    pub fn golden_mean() -> Self {
        Self::new(2, vec![vec![1, 1], vec![1, 0]]).expect("golden mean shift is valid")
    }

    pub fn with_period_cap(mut self, cap: usize) -> Self {
        self.period_cap = cap;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn period_cap(&self) -> usize {
        self.period_cap
    }

    #[inline]
    pub fn allows(&self, a: Symbol, b: Symbol) -> bool {
        self.allowed[a as usize * self.d + b as usize]
    }

    pub fn is_full(&self) -> bool {
        self.allowed.iter().all(|&x| x)
    }

    pub fn transitions(&self) -> Vec<Vec<u8>> {
        self.allowed
            .chunks(self.d)
            .map(|row| row.iter().map(|&x| x as u8).collect())
            .collect()
    }

    pub fn is_admissible(&self, symbols: &[Symbol]) -> bool {
        symbols.iter().all(|&s| (s as usize) < self.d)
            && symbols.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// Admissible and the wrap-around transition from last to first symbol is allowed.
    pub fn is_cyclically_admissible(&self, symbols: &[Symbol]) -> bool {
        match (symbols.first(), symbols.last()) {
            (Some(&first), Some(&last)) => self.is_admissible(symbols) && self.allows(last, first),
            _ => false,
        }
    }

    /// `trace(A^n)` by exact integer matrix powers.
    pub fn fixed_point_count(&self, n: usize) -> u128 {
        let d = self.d;
        let base: Vec<u128> = self.allowed.iter().map(|&x| x as u128).collect();
        let mut power = vec![0u128; d * d];
        for i in 0..d {
            power[i * d + i] = 1;
        }
        for _ in 0..n {
            let mut next = vec![0u128; d * d];
            for i in 0..d {
                for k in 0..d {
                    let p = power[i * d + k];
                    if p == 0 {
                        continue;
                    }
                    for j in 0..d {
                        next[i * d + j] += p * base[k * d + j];
                    }
                }
            }
            power = next;
        }
        (0..d).map(|i| power[i * d + i]).sum()
    }

    fn is_irreducible(&self) -> bool {
        let reach = |forward: bool| {
            let mut seen = vec![false; self.d];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(a) = stack.pop() {
                for b in 0..self.d {
                    let edge = if forward {
                        self.allowed[a * self.d + b]
                    } else {
                        self.allowed[b * self.d + a]
                    };
                    if edge && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen.into_iter().all(|x| x)
        };
        reach(true) && reach(false)
    }

    pub fn to_json(&self) -> String {
        let file = ShiftSpecFile {
            d: self.d,
            transitions: Some(self.transitions()),
            theta: Some(self.theta),
        };
        serde_json::to_string(&file).expect("shift spec serializes")
    }

    /// Parses `{"d":…, "transitions":[[…]], "theta":…}`; missing transitions mean the full shift.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ShiftSpecFile =
            serde_json::from_str(text).map_err(|e| SymbolicError::Json(e.to_string()))?;
        let transitions = file
            .transitions
            .unwrap_or_else(|| vec![vec![1; file.d]; file.d]);
        Self::with_theta(file.d, transitions, file.theta.unwrap_or(DEFAULT_THETA))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reducible_and_stranded() {
        assert_eq!(
            ShiftSpec::new(2, vec![vec![1, 1], vec![0, 1]]),
            Err(SymbolicError::Reducible)
        );
        assert_eq!(
            ShiftSpec::new(2, vec![vec![1, 0], vec![1, 0]]),
            Err(SymbolicError::StrandedSymbol(2))
        );
        assert_eq!(ShiftSpec::full(1), Err(SymbolicError::AlphabetTooSmall(1)));
        assert!(matches!(
            ShiftSpec::with_theta(2, vec![vec![1, 1], vec![1, 1]], 1.0),
            Err(SymbolicError::Theta(_))
        ));
    }

    #[test]
    fn periodic_shift_is_irreducible() {
        let spec = ShiftSpec::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!spec.is_full());
        assert_eq!(spec.fixed_point_count(1), 0);
        assert_eq!(spec.fixed_point_count(2), 2);
    }

    #[test]
    fn golden_mean_traces() {
        let spec = ShiftSpec::golden_mean();
        let lucas = [2u128, 1, 3, 4, 7, 11, 18, 29];
        for (n, &expected) in lucas.iter().enumerate().skip(1) {
            assert_eq!(spec.fixed_point_count(n), expected);
        }
    }

    #[test]
    fn json_round_trip() {
        let spec = ShiftSpec::golden_mean();
        let back = ShiftSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, back);
        let full = ShiftSpec::from_json(r#"{"d":3}"#).unwrap();
        assert!(full.is_full());
        assert_eq!(full.period_cap(), 14);
    }
}
