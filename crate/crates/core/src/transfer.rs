//! The de Bruijn graph of a locally constant potential and its weighted transfer matrix.
//!
//! States are admissible words of length `r = max(m-1, 1)`. For `m ≥ 2` every admissible
//! `m`-word `w` is an edge `w[..r] → w[1..]` carrying `f(w)`. For `m = 1` the states are
//! single symbols and the edge `a → b` carries `f(b)`, the value on the target symbol.
//! With either convention a closed walk of length `n` is exactly one point of `Fix_n` and
//! its edge weights add up to the Birkhoff sum `f^n`.

use zetatherm_symbolic::potential::{admissible_words, word_code};
use zetatherm_symbolic::{LocallyConstantPotential, ShiftSpec, Symbol, Word};

use crate::error::{CoreError, Result};
use crate::logspace::LogMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Value of the potential on the window this edge induces.
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct DeBruijnGraph {
    spec: ShiftSpec,
    m: usize,
    r: usize,
    states: Vec<Vec<Symbol>>,
    index: Vec<Option<usize>>,
    edges: Vec<Edge>,
}

/// The states visited by a cylinder word of length at least `r`, and the edges between them.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePath {
    pub states: Vec<usize>,
    /// Sum of the edge values along the path.
    pub value: f64,
}

impl StatePath {
    pub fn start(&self) -> usize {
        self.states[0]
    }

    pub fn end(&self) -> usize {
        *self.states.last().expect("nonempty path")
    }

    pub fn edge_count(&self) -> usize {
        self.states.len() - 1
    }
}

impl DeBruijnGraph {
    pub fn new(f: &LocallyConstantPotential) -> Self {
        let spec = f.spec().clone();
        let d = spec.d();
        let m = f.range();
        let r = m.saturating_sub(1).max(1);
        let states = admissible_words(&spec, r);
        let mut index = vec![None; d.pow(r as u32)];
        for (i, s) in states.iter().enumerate() {
            index[word_code(d, s)] = Some(i);
        }
        let mut edges = Vec::new();
        if m == 1 {
            for (i, u) in states.iter().enumerate() {
                for (j, v) in states.iter().enumerate() {
                    if spec.allows(u[0], v[0]) {
                        let value = f.value(v).expect("admissible symbol");
                        edges.push(Edge { from: i, to: j, value });
                    }
                }
            }
        } else {
            for (window, value) in f.values() {
                let from = index[word_code(d, &window[..r])].expect("prefix is admissible");
                let to = index[word_code(d, &window[1..])].expect("suffix is admissible");
                edges.push(Edge { from, to, value });
            }
        }
        Self {
            spec,
            m,
            r,
            states,
            index,
            edges,
        }
    }

    pub fn spec(&self) -> &ShiftSpec {
        &self.spec
    }

    pub fn range(&self) -> usize {
        self.m
    }

    /// Length of the state words.
    pub fn state_len(&self) -> usize {
        self.r
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<Symbol>] {
        &self.states
    }

    pub fn state_word(&self, i: usize) -> Word {
        Word::new(self.states[i].clone()).expect("nonempty state")
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn state_index(&self, symbols: &[Symbol]) -> Option<usize> {
        if symbols.len() != self.r || symbols.iter().any(|&s| s as usize >= self.spec.d()) {
            return None;
        }
        self.index[word_code(self.spec.d(), symbols)]
    }

    /// Path of states `w[i..i+r]` through an admissible word with `|w| ≥ r`.
    pub fn state_path(&self, f: &LocallyConstantPotential, w: &Word) -> Result<StatePath> {
        let symbols = w.symbols();
        if symbols.len() < self.r {
            return Err(CoreError::InvalidParameter(format!(
                "word {} shorter than state length {}",
                w.to_text(self.spec.d()),
                self.r
            )));
        }
        if !self.spec.is_admissible(symbols) {
            return Err(CoreError::Inadmissible(w.to_text(self.spec.d())));
        }
        let j = symbols.len();
        let states: Vec<usize> = (0..=j - self.r)
            .map(|i| self.state_index(&symbols[i..i + self.r]).expect("admissible window"))
            .collect();
        // edge i induces the window ending at position i + r
        let value = (0..j - self.r)
            .map(|i| {
                let end = i + self.r + 1;
                f.value(&symbols[end - self.m..end]).expect("admissible window")
            })
            .sum();
        Ok(StatePath { states, value })
    }

    /// Admissible extensions of a short word to state length.
    pub fn extensions(&self, w: &Word) -> Vec<usize> {
        let prefix = w.symbols();
        (0..self.states.len())
            .filter(|&i| self.states[i].starts_with(prefix))
            .collect()
    }

    /// Log matrix with entry `scale·value − shift` on every edge.
    pub fn log_matrix(&self, scale: f64, shift: f64) -> LogMatrix {
        let mut m = LogMatrix::zeros(self.states.len());
        for e in &self.edges {
            m.set(e.from, e.to, scale * e.value - shift);
        }
        m
    }
}

/// The transfer matrix of `c·f`, with entries `e^{c f(window)}` stored as logs.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    graph: DeBruijnGraph,
    c: f64,
    log_weights: LogMatrix,
}

impl TransferMatrix {
    pub fn new(f: &LocallyConstantPotential, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(CoreError::InvalidParameter(format!("c must be finite, got {c}")));
        }
        let graph = DeBruijnGraph::new(f);
        let log_weights = graph.log_matrix(c, 0.0);
        Ok(Self {
            graph,
            c,
            log_weights,
        })
    }

    pub fn graph(&self) -> &DeBruijnGraph {
        &self.graph
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn log_weights(&self) -> &LogMatrix {
        &self.log_weights
    }

    /// `log trace(A^n)`, which equals `log Σ_{Fix_n} e^{c f^n(x)}`.
    pub fn log_trace_power(&self, n: usize) -> f64 {
        let mut power = LogMatrix::identity(self.log_weights.dim());
        for _ in 0..n {
            power = power.matmul(&self.log_weights);
        }
        power.log_trace()
    }
}
