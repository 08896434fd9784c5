//! Log-domain arithmetic: log-sum-exp reductions and dense matrices of log-weights.

/// `log(e^a + e^b)` without overflow.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `log Σ e^{x_i}`; `-∞` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    log_sum_exp_slice(&values)
}

pub fn log_sum_exp_slice(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + values.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

/// Running log-sum-exp accumulator, reduced in insertion order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAccumulator(f64);

impl Default for LogAccumulator {
    fn default() -> Self {
        Self(f64::NEG_INFINITY)
    }
}

impl LogAccumulator {
    pub fn add(&mut self, log_value: f64) {
        self.0 = log_add(self.0, log_value);
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Square matrix of log-weights, row major; `-∞` marks a missing edge.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMatrix {
    n: usize,
    data: Vec<f64>,
}

impl LogMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![f64::NEG_INFINITY; n * n],
        }
    }

    /// The identity: 0 on the diagonal, `-∞` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Log of the matrix product.
    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        let mut terms = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                for (k, t) in terms.iter_mut().enumerate() {
                    *t = self.get(i, k) + other.get(k, j);
                }
                out.set(i, j, log_sum_exp_slice(&terms));
            }
        }
        out
    }

    /// Log of `A v` for a log-vector `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut terms = vec![0.0; self.n];
        (0..self.n)
            .map(|i| {
                for (k, t) in terms.iter_mut().enumerate() {
                    *t = self.get(i, k) + v[k];
                }
                log_sum_exp_slice(&terms)
            })
            .collect()
    }

    /// Log of `vᵀ A` for a log-vector `v`.
    pub fn apply_left(&self, v: &[f64]) -> Vec<f64> {
        let mut terms = vec![0.0; self.n];
        (0..self.n)
            .map(|j| {
                for (k, t) in terms.iter_mut().enumerate() {
                    *t = v[k] + self.get(k, j);
                }
                log_sum_exp_slice(&terms)
            })
            .collect()
    }

    /// Log of the trace.
    pub fn log_trace(&self) -> f64 {
        log_sum_exp((0..self.n).map(|i| self.get(i, i)))
    }

    /// Adds `e^shift` to every diagonal entry.
    pub fn with_diagonal_shift(&self, shift: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.set(i, i, log_add(self.get(i, i), shift));
        }
        m
    }

    /// Strongly connected components of the support graph, in Tarjan order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adjacency: Vec<Vec<usize>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| self.get(i, j) > f64::NEG_INFINITY)
                    .collect()
            })
            .collect();
        strongly_connected_components(&adjacency)
    }

    pub fn is_irreducible(&self) -> bool {
        self.n > 0 && self.components().len() == 1 && (0..self.n).any(|i| self.row(i).iter().any(|&v| v > f64::NEG_INFINITY))
    }
}

/// Tarjan's algorithm, iterative.
pub fn strongly_connected_components(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < adjacency[v].len() {
                let w = adjacency[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components
}
