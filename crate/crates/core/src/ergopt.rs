//! Ergodic optimization for locally constant potentials.
//!
//! `β(f)` is the maximum cycle mean of the de Bruijn graph (Karp). The critical graph is the
//! union of maximum-mean cycles, found through vertex potentials for the reduced weights
//! `f − β`. The deviation function `I(x) = n_x β − f^{n_x}(x)` is a cycle weight for the
//! nonnegative-on-cycles costs `β − f`, so cylinder infima are shortest returning paths.

use zetatherm_symbolic::birkhoff::{birkhoff_sum_raw, cylinder_hits_raw};
use zetatherm_symbolic::{for_each_fix, minimal_period, LocallyConstantPotential, PeriodicWord, Word};

use crate::error::{CoreError, Result};
use crate::logspace::{strongly_connected_components, LogMatrix};
use crate::thermo::{perron, PerronOptions};
use crate::transfer::{DeBruijnGraph, Edge};

pub const TIGHT_TOL: f64 = 1e-9;
pub const DEFAULT_BRUTE_CAP: usize = 12;

/// Karp's maximum cycle mean, taken over the strongly connected components.
pub fn max_cycle_mean(num_states: usize, edges: &[Edge]) -> Option<f64> {
    let mut adjacency = vec![Vec::new(); num_states];
    for e in edges {
        adjacency[e.from].push(e.to);
    }
    let mut comp_of = vec![usize::MAX; num_states];
    let components = strongly_connected_components(&adjacency);
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut best: Option<f64> = None;
    for (ci, comp) in components.iter().enumerate() {
        let local: Vec<&Edge> = edges
            .iter()
            .filter(|e| comp_of[e.from] == ci && comp_of[e.to] == ci)
            .collect();
        if local.is_empty() {
            continue;
        }
        let size = comp.len();
        let pos = |v: usize| comp.binary_search(&v).expect("vertex in component");
        // walks[k][v]: heaviest walk with exactly k edges from comp[0] to v
        let mut walks = vec![vec![f64::NEG_INFINITY; size]; size + 1];
        walks[0][0] = 0.0;
        for k in 1..=size {
            for e in &local {
                let (u, v) = (pos(e.from), pos(e.to));
                let cand = walks[k - 1][u] + e.value;
                if cand > walks[k][v] {
                    walks[k][v] = cand;
                }
            }
        }
        let mean = (0..size)
            .filter(|&v| walks[size][v] > f64::NEG_INFINITY)
            .map(|v| {
                (0..size)
                    .filter(|&k| walks[k][v] > f64::NEG_INFINITY)
                    .map(|k| (walks[size][v] - walks[k][v]) / (size - k) as f64)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        best = Some(best.map_or(mean, |b: f64| b.max(mean)));
    }
    best
}

/// `β(f) = sup_ν ∫ f dν`, exact for locally constant `f`.
pub fn beta(f: &LocallyConstantPotential) -> f64 {
    let graph = DeBruijnGraph::new(f);
    max_cycle_mean(graph.num_states(), graph.edges()).expect("irreducible shift has cycles")
}

/// Union of the maximum-mean cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalGraph {
    pub beta: f64,
    /// State words of the full de Bruijn graph, indexed like the vertices below.
    pub states: Vec<Word>,
    pub tight_edges: Vec<(usize, usize)>,
    pub vertices: Vec<usize>,
    /// Nontrivial strongly connected components of the tight subgraph.
    pub components: Vec<Vec<usize>>,
}

impl CriticalGraph {
    pub fn contains_edge(&self, from: usize, to: usize) -> bool {
        self.tight_edges.contains(&(from, to))
    }
}

/// Heaviest-path potentials for `weight(e)` from a virtual source joined to every vertex.
fn longest_path_potentials(num_states: usize, edges: &[Edge], weight: impl Fn(&Edge) -> f64) -> Vec<f64> {
    let mut phi = vec![0.0; num_states];
    for _ in 0..num_states {
        let mut changed = false;
        for e in edges {
            let cand = phi[e.from] + weight(e);
            if cand > phi[e.to] {
                phi[e.to] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    phi
}

pub fn critical_graph(f: &LocallyConstantPotential, tol: f64) -> CriticalGraph {
    let graph = DeBruijnGraph::new(f);
    let beta = max_cycle_mean(graph.num_states(), graph.edges()).expect("irreducible shift has cycles");
    let phi = longest_path_potentials(graph.num_states(), graph.edges(), |e| e.value - beta);
    let tight: Vec<&Edge> = graph
        .edges()
        .iter()
        .filter(|e| phi[e.from] + (e.value - beta) - phi[e.to] >= -tol)
        .collect();
    let mut adjacency = vec![Vec::new(); graph.num_states()];
    for e in &tight {
        adjacency[e.from].push(e.to);
    }
    let sccs = strongly_connected_components(&adjacency);
    let mut comp_of = vec![usize::MAX; graph.num_states()];
    for (ci, comp) in sccs.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut tight_edges: Vec<(usize, usize)> = tight
        .iter()
        .filter(|e| comp_of[e.from] == comp_of[e.to])
        .map(|e| (e.from, e.to))
        .collect();
    tight_edges.sort_unstable();
    let mut components: Vec<Vec<usize>> = sccs
        .into_iter()
        .filter(|comp| tight_edges.iter().any(|&(u, _)| comp.binary_search(&u).is_ok()))
        .collect();
    components.sort();
    let mut vertices: Vec<usize> = components.iter().flatten().copied().collect();
    vertices.sort_unstable();
    CriticalGraph {
        beta,
        states: (0..graph.num_states()).map(|i| graph.state_word(i)).collect(),
        tight_edges,
        vertices,
        components,
    }
}

/// `h_f`: log spectral radius of the critical graph's 0-1 adjacency, maximized over components.
pub fn h_max(critical: &CriticalGraph) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for comp in &critical.components {
        let mut m = LogMatrix::zeros(comp.len());
        for &(u, v) in &critical.tight_edges {
            if let (Ok(i), Ok(j)) = (comp.binary_search(&u), comp.binary_search(&v)) {
                m.set(i, j, 0.0);
            }
        }
        best = best.max(perron(&m, &PerronOptions::default())?.log_lambda);
    }
    Ok(best)
}

/// How cylinder infima of the deviation function are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfMethod {
    /// Shortest returning path in the de Bruijn graph.
    Exact,
    /// Minimum over enumerated periodic points up to the period cap.
    Brute { period_cap: usize },
}

/// Cached `β(f)` and de Bruijn graph for repeated deviation queries.
#[derive(Debug, Clone)]
pub struct DeviationFunction {
    f: LocallyConstantPotential,
    graph: DeBruijnGraph,
    beta: f64,
}

impl DeviationFunction {
    pub fn new(f: &LocallyConstantPotential) -> Self {
        let graph = DeBruijnGraph::new(f);
        let beta = max_cycle_mean(graph.num_states(), graph.edges()).expect("irreducible shift has cycles");
        Self {
            f: f.clone(),
            graph,
            beta,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn deviation_raw(&self, symbols: &[u8]) -> f64 {
        let p = minimal_period(symbols);
        p as f64 * self.beta - birkhoff_sum_raw(&self.f, &symbols[..p])
    }

    /// `I(x) = n_x β(f) − f^{n_x}(x)` with `n_x` the minimal period.
    pub fn deviation(&self, x: &PeriodicWord) -> Result<f64> {
        let spec = self.f.spec();
        x.word().check_alphabet(spec)?;
        if !spec.is_cyclically_admissible(x.symbols()) {
            return Err(CoreError::Inadmissible(x.word().to_text(spec.d())));
        }
        Ok(self.deviation_raw(x.symbols()))
    }

    /// Single-source shortest paths for the costs `β − f(e)`.
    fn shortest_from(&self, source: usize) -> Vec<f64> {
        let n = self.graph.num_states();
        let mut dist = vec![f64::INFINITY; n];
        dist[source] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for e in self.graph.edges() {
                if dist[e.from] == f64::INFINITY {
                    continue;
                }
                let cand = dist[e.from] + (self.beta - e.value);
                if cand < dist[e.to] {
                    dist[e.to] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    fn inf_exact(&self, w: &Word) -> Result<f64> {
        let spec = self.f.spec();
        let text = || w.to_text(spec.d());
        w.check_alphabet(spec)?;
        if !spec.is_admissible(w.symbols()) {
            return Err(CoreError::Inadmissible(text()));
        }
        let r = self.graph.state_len();
        if w.len() < r {
            let mut best = f64::INFINITY;
            for u in self.graph.extensions(w) {
                best = best.min(self.inf_exact(&self.graph.state_word(u))?);
            }
            return Ok(best);
        }
        let path = self.graph.state_path(&self.f, w)?;
        let forced = path.edge_count();
        let forced_cost = forced as f64 * self.beta - path.value;
        let dist = self.shortest_from(path.end());
        let mut best = if forced >= 1 {
            forced_cost + dist[path.start()]
        } else {
            // at least one edge is needed to close a cycle through the start state
            self.graph
                .edges()
                .iter()
                .filter(|e| e.to == path.start())
                .map(|e| dist[e.from] + (self.beta - e.value))
                .fold(f64::INFINITY, f64::min)
        };
        // periods shorter than the forced path: the point is the periodic extension of w
        let symbols = w.symbols();
        for n in 1..forced {
            let periodic = (n..symbols.len()).all(|i| symbols[i] == symbols[i - n]);
            if periodic && spec.is_cyclically_admissible(&symbols[..n]) {
                best = best.min(self.deviation_raw(&symbols[..n]));
            }
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(CoreError::NoReturningCycle(text()))
        }
    }

    fn inf_brute(&self, w: &Word, period_cap: usize) -> Result<f64> {
        let spec = self.f.spec();
        w.check_alphabet(spec)?;
        if !spec.is_admissible(w.symbols()) {
            return Err(CoreError::Inadmissible(w.to_text(spec.d())));
        }
        let mut best = f64::INFINITY;
        for n in 1..=period_cap {
            for_each_fix(spec, n, |x| {
                if cylinder_hits_raw(w.symbols(), x) > 0 {
                    best = best.min(self.deviation_raw(x));
                }
            })?;
        }
        Ok(best)
    }

    /// `inf { I(x) : x ∈ [w] periodic }`. The brute variant is an upper bound that is
    /// `+∞` when no point up to the cap enters the cylinder.
    pub fn inf_cylinder(&self, w: &Word, method: InfMethod) -> Result<f64> {
        match method {
            InfMethod::Exact => self.inf_exact(w),
            InfMethod::Brute { period_cap } => self.inf_brute(w, period_cap),
        }
    }

    /// Cylinder infima along `prefix[..j]` for each `j` in the depth schedule.
    pub fn tilde(&self, prefix: &Word, depths: &[usize]) -> Result<Vec<f64>> {
        depths
            .iter()
            .map(|&j| {
                if j == 0 || j > prefix.len() {
                    return Err(CoreError::InvalidParameter(format!(
                        "depth {j} outside 1..={}",
                        prefix.len()
                    )));
                }
                self.inf_exact(&prefix.prefix(j)?)
            })
            .collect()
    }
}

pub fn deviation_i(f: &LocallyConstantPotential, x: &PeriodicWord) -> Result<f64> {
    DeviationFunction::new(f).deviation(x)
}

pub fn inf_i_cylinder(f: &LocallyConstantPotential, w: &Word, method: InfMethod) -> Result<f64> {
    DeviationFunction::new(f).inf_cylinder(w, method)
}

/// Nested-cylinder approximation of the lower semicontinuous extension `Ĩ`.
pub fn tilde_i(f: &LocallyConstantPotential, prefix: &Word, depths: &[usize]) -> Result<Vec<f64>> {
    DeviationFunction::new(f).tilde(prefix, depths)
}
