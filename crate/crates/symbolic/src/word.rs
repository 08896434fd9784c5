//! Finite words, used both as cylinders `[w]` and as periodic points `repeat(w)`.

use std::fmt;

use crate::error::{Result, SymbolicError};
use crate::shift::{ShiftSpec, Symbol};

/// A nonempty word over a zero-based alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(SymbolicError::EmptyWord);
        }
        Ok(Self(symbols))
    }

    /// Builds a word from one-based symbols, as written in the text format.
    pub fn from_one_based(symbols: &[usize]) -> Result<Self> {
        let inner = symbols
            .iter()
            .map(|&s| {
                if s == 0 || s > Symbol::MAX as usize {
                    Err(SymbolicError::Parse(format!("{symbols:?}")))
                } else {
                    Ok((s - 1) as Symbol)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(inner)
    }

    /// Parses `"1211"` (one digit per symbol) or `"10,3,1"` (comma separated).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let err = || SymbolicError::Parse(text.to_string());
        let values: Vec<usize> = if text.contains(',') {
            text.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| err()))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|ch| ch.to_digit(10).map(|v| v as usize).ok_or_else(err))
                .collect::<Result<_>>()?
        };
        Self::from_one_based(&values).map_err(|_| err())
    }

    /// Parses and checks the symbols against the alphabet of `spec`.
    pub fn parse_for(text: &str, spec: &ShiftSpec) -> Result<Self> {
        let word = Self::parse(text)?;
        word.check_alphabet(spec)?;
        Ok(word)
    }

    pub fn check_alphabet(&self, spec: &ShiftSpec) -> Result<()> {
        match self.0.iter().find(|&&s| s as usize >= spec.d()) {
            Some(&s) => Err(SymbolicError::SymbolOutOfRange {
                symbol: s as usize + 1,
                d: spec.d(),
            }),
            None => Ok(()),
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prefix(&self, len: usize) -> Result<Word> {
        Word::new(self.0[..len.min(self.0.len())].to_vec())
    }

    /// The word repeated `k` times.
    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k.max(1)))
    }

    /// Appends one symbol.
    pub fn extended(&self, symbol: Symbol) -> Word {
        let mut v = self.0.clone();
        v.push(symbol);
        Word(v)
    }

    /// Text format: digits for alphabets of size at most 9, comma-separated integers otherwise.
    pub fn to_text(&self, d: usize) -> String {
        if d <= 9 {
            self.0.iter().map(|&s| char::from(b'1' + s)).collect()
        } else {
            self.0
                .iter()
                .map(|&s| (s as usize + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0.iter().map(|&s| s as usize + 1).max().unwrap_or(1);
        f.write_str(&self.to_text(d))
    }
}

impl AsRef<[Symbol]> for Word {
    fn as_ref(&self) -> &[Symbol] {
        &self.0
    }
}

/// Smallest `p` dividing `|w|` with `w = repeat(w[..p])`.
pub fn minimal_period(symbols: &[Symbol]) -> usize {
    let n = symbols.len();
    if n == 0 {
        return 0;
    }
    // KMP failure function; the border length gives the smallest period.
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && symbols[i] != symbols[k] {
            k = fail[k - 1];
        }
        if symbols[i] == symbols[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

/// A periodic point presented by a cyclically admissible generating word of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicWord {
    word: Word,
    n_min: usize,
}

impl PeriodicWord {
    pub fn new(spec: &ShiftSpec, word: Word) -> Result<Self> {
        word.check_alphabet(spec)?;
        if !spec.is_cyclically_admissible(word.symbols()) {
            return Err(SymbolicError::NotCyclic(word.to_text(spec.d())));
        }
        Ok(Self::new_unchecked(word))
    }

    /// Skips the admissibility check; the caller guarantees it.
    pub fn new_unchecked(word: Word) -> Self {
        let n_min = minimal_period(word.symbols());
        Self { word, n_min }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn symbols(&self) -> &[Symbol] {
        self.word.symbols()
    }

    /// Presented period.
    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn n_min(&self) -> usize {
        self.n_min
    }

    pub fn primitive(&self) -> PeriodicWord {
        PeriodicWord {
            word: Word(self.word.0[..self.n_min].to_vec()),
            n_min: self.n_min,
        }
    }

    /// Symbol at position `i` of the infinite sequence `repeat(word)`.
    #[inline]
    pub fn at(&self, i: usize) -> Symbol {
        self.word.0[i % self.word.0.len()]
    }
}
