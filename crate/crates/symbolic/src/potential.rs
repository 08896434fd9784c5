//! Locally constant potentials: real tables indexed by the admissible words of length `m`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SymbolicError};
use crate::shift::{ShiftSpec, Symbol};
use crate::word::{PeriodicWord, Word};

const MAX_TABLE: usize = 1 << 24;

/// `f(x)` depends only on `x_1 … x_m`.
///
/// Values are keyed by the mixed-radix code of the window, so lookups are a single index.
/// Inadmissible windows hold `NaN` and are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct LocallyConstantPotential {
    spec: ShiftSpec,
    m: usize,
    table: Vec<f64>,
    positive: bool,
}

/// Mixed-radix code of a window: `Σ s_i d^{m-1-i}`.
#[inline]
pub fn word_code(d: usize, symbols: &[Symbol]) -> usize {
    symbols.iter().fold(0usize, |acc, &s| acc * d + s as usize)
}

/// Inverse of [`word_code`] for a fixed length.
pub fn decode_word(d: usize, len: usize, mut code: usize) -> Vec<Symbol> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (code % d) as Symbol;
        code /= d;
    }
    out
}

/// All admissible words of length `len`, in code order.
pub fn admissible_words(spec: &ShiftSpec, len: usize) -> Vec<Vec<Symbol>> {
    let mut out: Vec<Vec<Symbol>> = (0..spec.d()).map(|a| vec![a as Symbol]).collect();
    for _ in 1..len {
        let mut next = Vec::with_capacity(out.len() * spec.d());
        for w in &out {
            let last = *w.last().expect("nonempty");
            for b in 0..spec.d() as Symbol {
                if spec.allows(last, b) {
                    let mut v = w.clone();
                    v.push(b);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

fn table_size(d: usize, m: usize) -> Result<usize> {
    if m == 0 {
        return Err(SymbolicError::ZeroRange);
    }
    let mut size = 1usize;
    for _ in 0..m {
        size = size
            .checked_mul(d)
            .filter(|&s| s <= MAX_TABLE)
            .ok_or(SymbolicError::RangeTooLarge { m, d })?;
    }
    Ok(size)
}

/// A discretized potential together with the sup-norm distance bound to the original.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub potential: LocallyConstantPotential,
    pub error_bound: Option<f64>,
}

/// Point-samples `sampler` on every admissible word of length `m`.
///
/// With a Lipschitz constant `C` for `d_θ`, the sampled potential is within `C θ^m / (1-θ)`
/// of the original in sup norm.
pub fn discretize<F>(
    spec: &ShiftSpec,
    m: usize,
    sampler: F,
    lipschitz: Option<f64>,
) -> Result<Discretization>
where
    F: FnMut(&Word) -> f64,
{
    let potential = LocallyConstantPotential::from_fn(spec, m, sampler)?;
    let theta = spec.theta();
    let error_bound = lipschitz.map(|c| c * theta.powi(m as i32) / (1.0 - theta));
    Ok(Discretization {
        potential,
        error_bound,
    })
}

#[derive(Serialize, Deserialize)]
struct PotentialFile {
    m: usize,
    values: BTreeMap<String, f64>,
}

impl LocallyConstantPotential {
    pub fn from_fn<F>(spec: &ShiftSpec, m: usize, mut sampler: F) -> Result<Self>
    where
        F: FnMut(&Word) -> f64,
    {
        let size = table_size(spec.d(), m)?;
        let mut table = vec![f64::NAN; size];
        for symbols in admissible_words(spec, m) {
            let code = word_code(spec.d(), &symbols);
            let word = Word::new(symbols)?;
            let value = sampler(&word);
            if !value.is_finite() {
                return Err(SymbolicError::NonFinite(word.to_text(spec.d())));
            }
            table[code] = value;
        }
        Ok(Self::from_table(spec.clone(), m, table))
    }

    fn from_table(spec: ShiftSpec, m: usize, table: Vec<f64>) -> Self {
        let positive = table.iter().filter(|v| !v.is_nan()).all(|&v| v > 0.0);
        Self {
            spec,
            m,
            table,
            positive,
        }
    }

    /// Builds from an explicit word → value map that must cover exactly the admissible words.
    pub fn from_values(spec: &ShiftSpec, m: usize, values: &BTreeMap<Word, f64>) -> Result<Self> {
        let size = table_size(spec.d(), m)?;
        let mut table = vec![f64::NAN; size];
        for (word, &value) in values {
            word.check_alphabet(spec)?;
            if word.len() != m || !spec.is_admissible(word.symbols()) {
                return Err(SymbolicError::UnexpectedValue(word.to_text(spec.d())));
            }
            if !value.is_finite() {
                return Err(SymbolicError::NonFinite(word.to_text(spec.d())));
            }
            table[word_code(spec.d(), word.symbols())] = value;
        }
        for symbols in admissible_words(spec, m) {
            if table[word_code(spec.d(), &symbols)].is_nan() {
                return Err(SymbolicError::MissingValue(
                    Word::new(symbols)?.to_text(spec.d()),
                ));
            }
        }
        Ok(Self::from_table(spec.clone(), m, table))
    }

    pub fn constant(spec: &ShiftSpec, value: f64) -> Result<Self> {
        Self::from_fn(spec, 1, |_| value)
    }

    /// Range-one potential `f(x) = values[x_1]`.
    pub fn from_symbol_values(spec: &ShiftSpec, values: &[f64]) -> Result<Self> {
        if values.len() != spec.d() {
            return Err(SymbolicError::TransitionShape { d: spec.d() });
        }
        Self::from_fn(spec, 1, |w| values[w.symbols()[0] as usize])
    }

    /// Indicator of the cylinder `[k]`, with range `|k|`.
    pub fn cylinder_indicator(spec: &ShiftSpec, k: &Word) -> Result<Self> {
        k.check_alphabet(spec)?;
        Self::from_fn(spec, k.len(), |w| if w == k { 1.0 } else { 0.0 })
    }

    pub fn spec(&self) -> &ShiftSpec {
        &self.spec
    }

    pub fn range(&self) -> usize {
        self.m
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// `|f|_-`, the minimum table value.
    pub fn min_value(&self) -> f64 {
        self.values().map(|(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values().map(|(_, v)| v).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `|f|_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.values().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    /// Whether every table value is strictly positive, and the minimum value.
    pub fn check_positive(&self) -> (bool, f64) {
        (self.positive, self.min_value())
    }

    /// Value on the window `symbols[..m]`; `None` if it is shorter than `m` or inadmissible.
    #[inline]
    pub fn value(&self, symbols: &[Symbol]) -> Option<f64> {
        if symbols.len() < self.m || symbols[..self.m].iter().any(|&s| s as usize >= self.spec.d()) {
            return None;
        }
        let v = self.table[word_code(self.spec.d(), &symbols[..self.m])];
        (!v.is_nan()).then_some(v)
    }

    #[inline]
    pub fn value_at_code(&self, code: usize) -> f64 {
        self.table[code]
    }

    /// Admissible windows with their values, in code order.
    pub fn values(&self) -> impl Iterator<Item = (Vec<Symbol>, f64)> + '_ {
        let (d, m) = (self.spec.d(), self.m);
        self.table
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .map(move |(code, &v)| (decode_word(d, m, code), v))
    }

    /// `f(σ^offset x)` for a periodic point.
    pub fn eval_periodic(&self, x: &PeriodicWord, offset: usize) -> f64 {
        let d = self.spec.d();
        let code = (0..self.m).fold(0usize, |acc, k| acc * d + x.at(offset + k) as usize);
        self.table[code]
    }

    /// The same function viewed as a potential of larger range `m2 ≥ m`.
    pub fn lift(&self, m2: usize) -> Result<Self> {
        let m = self.m.min(m2);
        Self::from_fn(&self.spec, m2, |w| {
            self.value(&w.symbols()[..m]).expect("admissible prefix")
        })
    }

    /// `a·f + b·g` on the common refinement.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.spec != other.spec {
            return Err(SymbolicError::ShiftMismatch);
        }
        let m = self.m.max(other.m);
        Self::from_fn(&self.spec, m, |w| {
            let s = w.symbols();
            a * self.value(s).expect("admissible") + b * other.value(s).expect("admissible")
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        let table = self.table.iter().map(|v| v * a).collect();
        Self::from_table(self.spec.clone(), self.m, table)
    }

    pub fn to_json(&self) -> String {
        let d = self.spec.d();
        let values = self
            .values()
            .map(|(w, v)| (Word::new(w).expect("nonempty").to_text(d), v))
            .collect();
        serde_json::to_string_pretty(&PotentialFile { m: self.m, values }).expect("serializable")
    }

    /// Parses `{"m":…, "values":{"<word>":<real>, …}}`.
    ///
    /// Without an explicit shift, the full shift on the largest symbol that appears is used.
    pub fn from_json(text: &str, spec: Option<&ShiftSpec>) -> Result<Self> {
        let file: PotentialFile =
            serde_json::from_str(text).map_err(|e| SymbolicError::Json(e.to_string()))?;
        let mut values = BTreeMap::new();
        for (key, value) in &file.values {
            values.insert(Word::parse(key)?, *value);
        }
        let spec = match spec {
            Some(spec) => spec.clone(),
            None => {
                let d = values
                    .keys()
                    .flat_map(|w| w.symbols().iter().copied())
                    .max()
                    .map(|s| s as usize + 1)
                    .unwrap_or(0);
                ShiftSpec::full(d.max(2))?
            }
        };
        Self::from_values(&spec, file.m, &values)
    }
}
