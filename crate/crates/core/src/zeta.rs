//! Zeta measures `μ_{c,s}`, truncated periodic-orbit measures `π_{c,N}` and `η_{c,N}`,
//! large-deviation rates and the Gibbs decomposition of the zeta series.
//!
//! Every series is a sum over levels `n` of
//!
//! ```text
//! L_n(w) = Σ_{x ∈ Fix_n} e^{a f^n(x) − n b} k^n(x)/n = Σ_{x ∈ Fix_n ∩ [w]} e^{a f^n(x) − n b}
//! ```
//!
//! (the second form because σ permutes `Fix_n` and preserves `f^n`). The second form is a
//! weighted count of closed walks through the state path of `w`, so it is read off powers of
//! the transfer matrix in log domain. Direct enumeration of `Fix_n` is kept as a second route
//! for cross-checking at small `n`.

use std::collections::VecDeque;

use zetatherm_symbolic::birkhoff::{birkhoff_sum_raw, cylinder_hits_raw};
use zetatherm_symbolic::{for_each_fix, LocallyConstantPotential, Word};

use crate::ergopt::{self, InfMethod};
use crate::error::{CoreError, Result};
use crate::logspace::{log_sum_exp, LogAccumulator, LogMatrix};
use crate::thermo::{log_pressure, GibbsState};
use crate::transfer::DeBruijnGraph;

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_N_CAP: usize = 5_000_000;
const TAIL_SAFETY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaParams {
    pub c: f64,
    pub s: f64,
    pub rel_tol: f64,
    pub n_cap: usize,
}

impl ZetaParams {
    pub fn new(c: f64, s: f64) -> Result<Self> {
        let params = Self {
            c,
            s,
            rel_tol: DEFAULT_REL_TOL,
            n_cap: DEFAULT_N_CAP,
        };
        params.validate()?;
        Ok(params)
    }

    /// `s = 1 − L/c`.
    pub fn on_schedule(c: f64, l: f64) -> Result<Self> {
        Self::new(c, 1.0 - l / c)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Result<Self> {
        self.rel_tol = rel_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_cap(mut self, n_cap: usize) -> Result<Self> {
        self.n_cap = n_cap;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CoreError::InvalidParameter(msg));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("c must be positive, got {}", self.c));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s must lie in (0,1), got {}", self.s));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return bad(format!("rel_tol must lie in (0, 1e-3], got {}", self.rel_tol));
        }
        if self.n_cap == 0 {
            return bad("n_cap must be at least 1".into());
        }
        Ok(())
    }
}

/// A truncated series ratio with its certified relative tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub log_value: f64,
    pub n_used: usize,
    pub tail_bound: f64,
    /// False when `n_cap` was reached before the tail bound dropped below `rel_tol`.
    pub certified: bool,
}

/// How a level sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelRoute {
    /// Closed walks counted by log-domain transfer-matrix powers.
    Transfer,
    /// Explicit enumeration of `Fix_n` (bounded by the shift's period cap).
    Enumerate,
}

/// Zeta-measure and truncated-measure computations need `f ≥ 0` with `f ≢ 0`, which makes
/// `P(tf)` strictly increasing in `t` and the zeta series convergent for `s < 1`.
fn check_nonnegative(f: &LocallyConstantPotential) -> Result<()> {
    let (min, max) = (f.min_value(), f.max_value());
    if min < 0.0 || max <= 0.0 {
        return Err(CoreError::NotNonnegative { min, max });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Route {
    start: usize,
    end: usize,
    forced: usize,
    log_path: f64,
}

#[derive(Debug, Clone)]
struct CylinderPlan {
    routes: Vec<Route>,
    /// Log weights at periods shorter than the forced path, where the point is determined by `w`.
    short: Vec<f64>,
    admissible: bool,
    len: usize,
}

/// One level of the series.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub n: usize,
    pub log_total: f64,
    pub log_cylinders: Vec<f64>,
}

/// Streams the level sums `L_n(w)` and `L_n(X)` for weights `e^{a·f(window) − b}` per step.
#[derive(Debug, Clone)]
pub struct LevelSeries {
    step: LogMatrix,
    /// `A^n, A^{n-1}, …`: index `k` holds `A^{n-k}`, kept back to the longest forced path.
    powers: VecDeque<LogMatrix>,
    plans: Vec<CylinderPlan>,
    n: usize,
    num_states: usize,
}

impl LevelSeries {
    pub fn new(f: &LocallyConstantPotential, a: f64, b: f64, cylinders: &[Word]) -> Result<Self> {
        let graph = DeBruijnGraph::new(f);
        let spec = f.spec();
        let r = graph.state_len();
        let mut plans = Vec::with_capacity(cylinders.len());
        for w in cylinders {
            w.check_alphabet(spec)?;
            let symbols = w.symbols();
            if !spec.is_admissible(symbols) {
                plans.push(CylinderPlan {
                    routes: Vec::new(),
                    short: Vec::new(),
                    admissible: false,
                    len: w.len(),
                });
                continue;
            }
            let (routes, short) = if w.len() < r {
                let routes = graph
                    .extensions(w)
                    .into_iter()
                    .map(|u| Route {
                        start: u,
                        end: u,
                        forced: 0,
                        log_path: 0.0,
                    })
                    .collect();
                (routes, Vec::new())
            } else {
                let path = graph.state_path(f, w)?;
                let forced = path.edge_count();
                let route = Route {
                    start: path.start(),
                    end: path.end(),
                    forced,
                    log_path: a * path.value - forced as f64 * b,
                };
                let short = (1..forced)
                    .map(|n| {
                        let periodic = (n..symbols.len()).all(|i| symbols[i] == symbols[i - n]);
                        if periodic && spec.is_cyclically_admissible(&symbols[..n]) {
                            a * birkhoff_sum_raw(f, &symbols[..n]) - n as f64 * b
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect();
                (vec![route], short)
            };
            plans.push(CylinderPlan {
                routes,
                short,
                admissible: true,
                len: w.len(),
            });
        }
        let step = graph.log_matrix(a, b);
        let mut powers = VecDeque::new();
        powers.push_front(LogMatrix::identity(graph.num_states()));
        Ok(Self {
            step,
            powers,
            plans,
            n: 0,
            num_states: graph.num_states(),
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Levels after which every admissible cylinder has been reached by some closed walk.
    fn warmup(&self) -> usize {
        self.plans.iter().map(|p| p.len).max().unwrap_or(0) + self.num_states
    }

    pub fn next_level(&mut self) -> Level {
        self.n += 1;
        let n = self.n;
        let next = self.powers[0].matmul(&self.step);
        self.powers.push_front(next);
        let keep = self
            .plans
            .iter()
            .flat_map(|p| p.routes.iter().map(|r| r.forced))
            .max()
            .unwrap_or(0)
            + 1;
        self.powers.truncate(keep);
        let log_total = self.powers[0].log_trace();
        let log_cylinders = self
            .plans
            .iter()
            .map(|plan| {
                if !plan.admissible {
                    return f64::NEG_INFINITY;
                }
                log_sum_exp(plan.routes.iter().map(|route| {
                    if n >= route.forced {
                        route.log_path + self.powers[route.forced].get(route.end, route.start)
                    } else {
                        plan.short[n - 1]
                    }
                }))
            })
            .collect();
        Level {
            n,
            log_total,
            log_cylinders,
        }
    }
}

/// `log Σ_{x ∈ Fix_n} e^{a f^n(x) − n b} k^n(x)/n` by direct enumeration; `w = None` means `k ≡ 1`.
pub fn level_sum_enumerated(
    f: &LocallyConstantPotential,
    a: f64,
    b: f64,
    n: usize,
    w: Option<&Word>,
) -> Result<f64> {
    let mut acc = LogAccumulator::default();
    let log_n = (n as f64).ln();
    for_each_fix(f.spec(), n, |x| {
        let weight = match w {
            None => 0.0,
            Some(w) => {
                let hits = cylinder_hits_raw(w.symbols(), x);
                if hits == 0 {
                    return;
                }
                (hits as f64).ln() - log_n
            }
        };
        acc.add(a * birkhoff_sum_raw(f, x) - n as f64 * b + weight);
    })?;
    Ok(acc.value())
}

fn transfer_level(f: &LocallyConstantPotential, a: f64, b: f64, n: usize, w: Option<&Word>) -> Result<f64> {
    let cylinders: Vec<Word> = w.into_iter().cloned().collect();
    let mut series = LevelSeries::new(f, a, b, &cylinders)?;
    let mut level = series.next_level();
    for _ in 1..n {
        level = series.next_level();
    }
    Ok(match w {
        None => level.log_total,
        Some(_) => level.log_cylinders[0],
    })
}

/// Log of the level-`n` term `Σ_{Fix_n} e^{cs f^n − n P(cf)} k^n/n` of the zeta series.
pub fn zeta_level_sum(
    f: &LocallyConstantPotential,
    c: f64,
    s: f64,
    n: usize,
    w: Option<&Word>,
    route: LevelRoute,
) -> Result<f64> {
    if n == 0 {
        return Err(CoreError::InvalidParameter("level n must be at least 1".into()));
    }
    let p = log_pressure(f, c)?;
    match route {
        LevelRoute::Enumerate => level_sum_enumerated(f, c * s, p, n, w),
        LevelRoute::Transfer => transfer_level(f, c * s, p, n, w),
    }
}

/// Running certificate for one geometric-tailed series.
#[derive(Debug, Clone, Copy)]
struct TailCertificate {
    sum: LogAccumulator,
    /// `max_{n' ≤ n} log L_{n'} − n' log ρ`.
    log_prefactor: f64,
}

impl TailCertificate {
    fn new() -> Self {
        Self {
            sum: LogAccumulator::default(),
            log_prefactor: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, n: usize, log_level: f64, log_rho: f64) {
        self.sum.add(log_level);
        self.log_prefactor = self.log_prefactor.max(log_level - n as f64 * log_rho);
    }

    /// Relative bound `10·C ρ^{n+1} / (1−ρ)` over the current partial sum.
    fn relative_tail(&self, n: usize, log_rho: f64, log_one_minus_rho: f64) -> f64 {
        if self.sum.value() == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        let log_tail = self.log_prefactor + TAIL_SAFETY.ln() + (n + 1) as f64 * log_rho - log_one_minus_rho;
        (log_tail - self.sum.value()).exp()
    }
}

/// Certified sums of the zeta series for `k ≡ 1` and for each cylinder.
#[derive(Debug, Clone)]
pub struct ZetaSums {
    pub log_total: f64,
    pub log_cylinders: Vec<f64>,
    pub total_tail: f64,
    pub cylinder_tails: Vec<f64>,
    pub admissible: Vec<bool>,
    pub n_used: usize,
    pub certified: bool,
    pub log_rho: f64,
}

impl ZetaSums {
    pub fn measure(&self, i: usize) -> SeriesResult {
        let log_value = self.log_cylinders[i] - self.log_total;
        SeriesResult {
            value: log_value.exp(),
            log_value,
            n_used: self.n_used,
            tail_bound: self.total_tail + self.cylinder_tails[i],
            certified: self.certified,
        }
    }
}

/// The zeta measure `μ_{c,s}` for one potential and parameter pair, with `P(cf)` and
/// `P(csf)` computed once.
#[derive(Debug, Clone)]
pub struct ZetaMeasure {
    f: LocallyConstantPotential,
    params: ZetaParams,
    log_p_cf: f64,
    log_p_csf: f64,
}

impl ZetaMeasure {
    pub fn new(f: &LocallyConstantPotential, params: ZetaParams) -> Result<Self> {
        params.validate()?;
        check_nonnegative(f)?;
        let log_p_cf = log_pressure(f, params.c)?;
        let log_p_csf = log_pressure(f, params.c * params.s)?;
        let log_rho = log_p_csf - log_p_cf;
        if !(log_rho < 0.0) {
            return Err(CoreError::RatioNotBelowOne { log_rho });
        }
        Ok(Self {
            f: f.clone(),
            params,
            log_p_cf,
            log_p_csf,
        })
    }

    pub fn params(&self) -> &ZetaParams {
        &self.params
    }

    pub fn log_pressure_cf(&self) -> f64 {
        self.log_p_cf
    }

    pub fn log_pressure_csf(&self) -> f64 {
        self.log_p_csf
    }

    /// `log ρ = P(csf) − P(cf) < 0`.
    pub fn log_rho(&self) -> f64 {
        self.log_p_csf - self.log_p_cf
    }

    /// Sums levels until the denominator and every numerator carry a tail certificate below
    /// `rel_tol` (jointly), or `n_cap` is hit. All series share the truncation level.
    pub fn sums(&self, cylinders: &[Word]) -> Result<ZetaSums> {
        let p = &self.params;
        let log_rho = self.log_rho();
        let log_one_minus_rho = (-log_rho.exp_m1()).ln();
        let mut series = LevelSeries::new(&self.f, p.c * p.s, self.log_p_cf, cylinders)?;
        let admissible: Vec<bool> = series.plans.iter().map(|plan| plan.admissible).collect();
        let warmup = series.warmup();
        let mut total = TailCertificate::new();
        let mut parts = vec![TailCertificate::new(); cylinders.len()];
        let mut n_used = 0;
        let mut certified = false;
        let (mut total_tail, mut cylinder_tails) = (f64::INFINITY, vec![f64::INFINITY; cylinders.len()]);
        while n_used < p.n_cap {
            let level = series.next_level();
            n_used = level.n;
            total.add(n_used, level.log_total, log_rho);
            for (part, &log_level) in parts.iter_mut().zip(&level.log_cylinders) {
                part.add(n_used, log_level, log_rho);
            }
            if n_used < warmup {
                continue;
            }
            total_tail = total.relative_tail(n_used, log_rho, log_one_minus_rho);
            cylinder_tails = parts
                .iter()
                .zip(&admissible)
                .map(|(part, &ok)| if ok { part.relative_tail(n_used, log_rho, log_one_minus_rho) } else { 0.0 })
                .collect();
            let worst = cylinder_tails.iter().copied().fold(0.0, f64::max);
            if total_tail + worst < p.rel_tol {
                certified = true;
                break;
            }
        }
        Ok(ZetaSums {
            log_total: total.sum.value(),
            log_cylinders: parts.iter().map(|part| part.sum.value()).collect(),
            total_tail,
            cylinder_tails,
            admissible,
            n_used,
            certified,
            log_rho,
        })
    }

    pub fn measures(&self, cylinders: &[Word]) -> Result<Vec<SeriesResult>> {
        let sums = self.sums(cylinders)?;
        Ok((0..cylinders.len()).map(|i| sums.measure(i)).collect())
    }

    /// `μ_{c,s}([w])`.
    pub fn measure(&self, w: &Word) -> Result<SeriesResult> {
        Ok(self.measures(std::slice::from_ref(w))?[0])
    }

    /// `∫ g dμ_{c,s}` for a locally constant `g`, as `Σ_w g(w) μ_{c,s}([w])` over its range.
    pub fn integral(&self, g: &LocallyConstantPotential) -> Result<f64> {
        let (words, values): (Vec<Word>, Vec<f64>) = g
            .values()
            .map(|(w, v)| (Word::new(w).expect("nonempty"), v))
            .unzip();
        let measures = self.measures(&words)?;
        Ok(measures.iter().zip(&values).map(|(m, v)| m.value * v).sum())
    }

    /// Splits the zeta series into its Gibbs part `ρ/(1−ρ)·μ_{csf}([w])` and an analytic
    /// remainder, for the cylinder and for `k ≡ 1`.
    pub fn decomposition(&self, w: &Word) -> Result<Decomposition> {
        let sums = self.sums(std::slice::from_ref(w))?;
        let log_rho = sums.log_rho;
        let rho = log_rho.exp();
        let geometric = rho / (-log_rho.exp_m1());
        let gibbs = GibbsState::new(&self.f, self.params.c * self.params.s)?.cylinder(w);
        let zeta_side = sums.log_cylinders[0].exp();
        let gibbs_side = geometric * gibbs.value;
        let total_zeta_side = sums.log_total.exp();
        Ok(Decomposition {
            rho,
            gibbs_measure: gibbs.value,
            zeta_side,
            gibbs_side,
            alpha_remainder: zeta_side - gibbs_side,
            alpha_error: sums.cylinder_tails[0] * zeta_side + 4.0 * f64::EPSILON * (zeta_side + gibbs_side),
            total_zeta_side,
            total_gibbs_side: geometric,
            total_alpha_remainder: total_zeta_side - geometric,
            measure: sums.measure(0),
        })
    }

    /// `(1/c) log Σ_n Σ_{Fix_n} e^{csf^n − nP(cf)}`.
    pub fn log_partition_rate(&self) -> Result<RateResult> {
        let sums = self.sums(&[])?;
        Ok(RateResult {
            rate: sums.log_total / self.params.c,
            log_measure: sums.log_total,
            certified: sums.certified,
            n_used: sums.n_used,
            tail_bound: sums.total_tail,
        })
    }
}

/// Both sides of the zeta/Gibbs split, for a cylinder and for the whole space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub rho: f64,
    /// `μ_{csf}([w])`.
    pub gibbs_measure: f64,
    pub zeta_side: f64,
    pub gibbs_side: f64,
    pub alpha_remainder: f64,
    /// Bound on the error of `alpha_remainder`: the truncated tail of the series plus the
    /// rounding of the two sides it is the difference of.
    pub alpha_error: f64,
    pub total_zeta_side: f64,
    pub total_gibbs_side: f64,
    pub total_alpha_remainder: f64,
    /// `μ_{c,s}([w])` computed directly from the series.
    pub measure: SeriesResult,
}

impl Decomposition {
    /// `μ_{c,s}([w])` rebuilt from the remainders and the Gibbs measure of `csf`:
    /// `[(1−ρ)/ρ·α_w + μ_{csf}([w])] / [(1−ρ)/ρ·α_X + 1]`.
    pub fn reconstructed_measure(&self) -> f64 {
        let q = (1.0 - self.rho) / self.rho;
        (q * self.alpha_remainder + self.gibbs_measure) / (q * self.total_alpha_remainder + 1.0)
    }
}

pub fn zeta_measure(f: &LocallyConstantPotential, params: ZetaParams, w: &Word) -> Result<SeriesResult> {
    ZetaMeasure::new(f, params)?.measure(w)
}

pub fn series_gibbs_decomposition(
    f: &LocallyConstantPotential,
    params: ZetaParams,
    w: &Word,
) -> Result<Decomposition> {
    ZetaMeasure::new(f, params)?.decomposition(w)
}

pub fn log_partition_rate(f: &LocallyConstantPotential, params: ZetaParams) -> Result<RateResult> {
    ZetaMeasure::new(f, params)?.log_partition_rate()
}

/// Which normalization a truncated measure uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncated {
    /// Level weights `e^{c f^n − n P(cf)}`.
    Pi,
    /// Level weights `e^{c f^n}`.
    Eta,
}

/// Finite sums up to level `N` for `π_{c,N}` or `η_{c,N}`.
#[derive(Debug, Clone)]
pub struct TruncatedSums {
    pub log_total: f64,
    pub log_cylinders: Vec<f64>,
    pub n: usize,
}

impl TruncatedSums {
    pub fn log_measure(&self, i: usize) -> f64 {
        self.log_cylinders[i] - self.log_total
    }

    pub fn measure(&self, i: usize) -> f64 {
        self.log_measure(i).exp()
    }
}

/// Level sums `1..=N`; `a` and `b` are the per-step weight and shift.
fn fixed_sums(f: &LocallyConstantPotential, a: f64, b: f64, big_n: usize, cylinders: &[Word]) -> Result<TruncatedSums> {
    let mut series = LevelSeries::new(f, a, b, cylinders)?;
    let mut total = LogAccumulator::default();
    let mut parts = vec![LogAccumulator::default(); cylinders.len()];
    for _ in 0..big_n {
        let level = series.next_level();
        total.add(level.log_total);
        for (part, &v) in parts.iter_mut().zip(&level.log_cylinders) {
            part.add(v);
        }
    }
    Ok(TruncatedSums {
        log_total: total.value(),
        log_cylinders: parts.iter().map(|p| p.value()).collect(),
        n: big_n,
    })
}

pub fn truncated_sums(
    f: &LocallyConstantPotential,
    kind: Truncated,
    c: f64,
    big_n: usize,
    cylinders: &[Word],
) -> Result<TruncatedSums> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(CoreError::InvalidParameter(format!("c must be positive, got {c}")));
    }
    if big_n == 0 {
        return Err(CoreError::InvalidParameter("N must be at least 1".into()));
    }
    check_nonnegative(f)?;
    let shift = match kind {
        Truncated::Pi => log_pressure(f, c)?,
        Truncated::Eta => 0.0,
    };
    fixed_sums(f, c, shift, big_n, cylinders)
}

/// `π_{c,N}([w])`.
pub fn pi_measure(f: &LocallyConstantPotential, c: f64, big_n: usize, w: &Word) -> Result<f64> {
    Ok(truncated_sums(f, Truncated::Pi, c, big_n, std::slice::from_ref(w))?.measure(0))
}

/// `η_{c,N}([w])`.
pub fn eta_measure(f: &LocallyConstantPotential, c: f64, big_n: usize, w: &Word) -> Result<f64> {
    Ok(truncated_sums(f, Truncated::Eta, c, big_n, std::slice::from_ref(w))?.measure(0))
}

/// `μ_{c,s}` truncated at a fixed level, without certification; used to compare against
/// reference sums computed the same way.
pub fn zeta_truncated(
    f: &LocallyConstantPotential,
    c: f64,
    s: f64,
    n_max: usize,
    cylinders: &[Word],
) -> Result<TruncatedSums> {
    check_nonnegative(f)?;
    let p = log_pressure(f, c)?;
    fixed_sums(f, c * s, p, n_max, cylinders)
}

/// Limit regimes for `(1/c) log(measure of [w])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateRegime {
    Zeta(ZetaParams),
    Pi { c: f64, n: usize },
    Eta { c: f64, n: usize },
}

impl RateRegime {
    pub fn c(&self) -> f64 {
        match *self {
            RateRegime::Zeta(p) => p.c,
            RateRegime::Pi { c, .. } | RateRegime::Eta { c, .. } => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub rate: f64,
    pub log_measure: f64,
    pub certified: bool,
    pub n_used: usize,
    pub tail_bound: f64,
}

/// `(1/c) log μ([w])`, formed from log numerator and log denominator.
pub fn ldp_rate(regime: RateRegime, f: &LocallyConstantPotential, w: &Word) -> Result<RateResult> {
    let c = regime.c();
    let (log_measure, certified, n_used, tail_bound) = match regime {
        RateRegime::Zeta(params) => {
            let m = zeta_measure(f, params, w)?;
            (m.log_value, m.certified, m.n_used, m.tail_bound)
        }
        RateRegime::Pi { c, n } => {
            let sums = truncated_sums(f, Truncated::Pi, c, n, std::slice::from_ref(w))?;
            (sums.log_measure(0), true, n, 0.0)
        }
        RateRegime::Eta { c, n } => {
            let sums = truncated_sums(f, Truncated::Eta, c, n, std::slice::from_ref(w))?;
            (sums.log_measure(0), true, n, 0.0)
        }
    };
    Ok(RateResult {
        rate: log_measure / c,
        log_measure,
        certified,
        n_used,
        tail_bound,
    })
}

/// The rate predicted by the deviation function: `−inf_{[w] ∩ PER} I`.
pub fn predicted_rate(f: &LocallyConstantPotential, w: &Word) -> Result<f64> {
    Ok(-ergopt::inf_i_cylinder(f, w, InfMethod::Exact)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zetatherm_symbolic::potential::admissible_words;
    use zetatherm_symbolic::ShiftSpec;

    fn full2() -> ShiftSpec {
        ShiftSpec::full(2).unwrap()
    }

    fn fa() -> LocallyConstantPotential {
        LocallyConstantPotential::from_symbol_values(&full2(), &[1.0, 0.0]).unwrap()
    }

    fn fb() -> LocallyConstantPotential {
        LocallyConstantPotential::from_fn(&full2(), 2, |w| {
            if w.symbols()[0] != w.symbols()[1] { 1.0 } else { 0.0 }
        })
        .unwrap()
    }

    fn w(t: &str) -> Word {
        Word::parse(t).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ZetaParams::new(1.0, 1.0).is_err());
        assert!(ZetaParams::new(0.0, 0.5).is_err());
        assert!(ZetaParams::new(1.0, 0.5).unwrap().with_rel_tol(1e-2).is_err());
        assert!(ZetaParams::new(1.0, 0.5).unwrap().with_n_cap(0).is_err());
        let p = ZetaParams::on_schedule(200.0, 1.0).unwrap();
        assert!((p.s - 0.995).abs() < 1e-15);
    }

    #[test]
    fn constant_levels_closed_form() {
        let spec = full2();
        let a = 0.8;
        let f = LocallyConstantPotential::constant(&spec, a).unwrap();
        let (c, s) = (1.5, 0.6);
        for n in 1..=6 {
            let expected = n as f64 * c * a * (s - 1.0);
            for route in [LevelRoute::Transfer, LevelRoute::Enumerate] {
                let total = zeta_level_sum(&f, c, s, n, None, route).unwrap();
                assert!((total - expected).abs() < 1e-12, "n={n} {route:?}");
                // |Fix_n ∩ [12]| = 2^{n-2} once n ≥ 2, and no fixed point starts with 12
                let cyl = zeta_level_sum(&f, c, s, n, Some(&w("12")), route).unwrap();
                if n == 1 {
                    assert_eq!(cyl, f64::NEG_INFINITY);
                } else {
                    assert!((cyl - (expected - 4f64.ln())).abs() < 1e-12, "n={n} {route:?}");
                }
                // 1^∞ is the only fixed point in [11]
                let ones = zeta_level_sum(&f, c, s, n, Some(&w("11")), route).unwrap();
                let share = if n == 1 { 0.5f64 } else { 0.25 };
                assert!((ones - (expected + share.ln())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_fixed_points_level() {
        let f = fa();
        let p = (1f64.exp() + 1.0).ln();
        let expected = log_sum_exp([0.5 - p, -p]);
        let v = zeta_level_sum(&f, 1.0, 0.5, 1, None, LevelRoute::Transfer).unwrap();
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn transfer_levels_match_enumeration() {
        let golden = ShiftSpec::golden_mean();
        let g = LocallyConstantPotential::from_fn(&golden, 3, |w| {
            0.2 + w.symbols().iter().enumerate().map(|(i, &s)| (s as f64) * 0.4 / (i as f64 + 1.0)).sum::<f64>()
        })
        .unwrap();
        let potentials = [fa(), fb(), g];
        let words = ["1", "2", "11", "12", "21", "121", "1121", "11111", "2121"];
        for f in &potentials {
            for text in words {
                let word = w(text);
                if !f.spec().is_admissible(word.symbols()) {
                    continue;
                }
                let mut series = LevelSeries::new(f, 1.3, 0.4, &[word.clone()]).unwrap();
                for n in 1..=12 {
                    let level = series.next_level();
                    let direct = level_sum_enumerated(f, 1.3, 0.4, n, Some(&word)).unwrap();
                    let total = level_sum_enumerated(f, 1.3, 0.4, n, None).unwrap();
                    assert!((level.log_cylinders[0] - direct).abs() < 1e-11 || level.log_cylinders[0] == direct, "{text} n={n}");
                    assert!((level.log_total - total).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn constant_measure_closed_form() {
        // levels give [12] the share 1/4 from n = 2 on and [11] the share 1/2 at n = 1,
        // so μ([12]) = (1 − q)/(4q)·Σ_{n≥2} q^n = q/4 and μ([11]) = 1/2 − q/4
        let f = LocallyConstantPotential::constant(&full2(), 1.0).unwrap();
        for (c, s) in [(1.0f64, 0.5), (5.0, 0.9), (30.0, 0.99)] {
            let q = (c * (s - 1.0)).exp();
            let zm = ZetaMeasure::new(&f, ZetaParams::new(c, s).unwrap()).unwrap();
            let m = zm.measures(&[w("11"), w("12")]).unwrap();
            assert!((m[0].value - (0.5 - q / 4.0)).abs() < 1e-9, "c={c} s={s}: {}", m[0].value);
            assert!((m[1].value - q / 4.0).abs() < 1e-9, "c={c} s={s}: {}", m[1].value);
            assert!(m[0].certified);
            assert!(m[0].tail_bound <= 1e-10);
        }
    }

    #[test]
    fn zeta_near_one_approaches_gibbs() {
        let m = zeta_measure(&fa(), ZetaParams::new(2.0, 0.999).unwrap(), &w("1")).unwrap();
        let e2 = 2f64.exp();
        assert!((m.value - e2 / (e2 + 1.0)).abs() < 2e-3);
        assert!(m.certified);
    }

    #[test]
    fn zeta_rate_window() {
        let m = zeta_measure(&fa(), ZetaParams::new(50.0, 0.98).unwrap(), &w("2")).unwrap();
        let rate = m.log_value / 50.0;
        assert!((-1.15..=-0.85).contains(&rate), "{rate}");
    }

    #[test]
    fn additivity_and_shift_invariance() {
        for f in [fa(), fb()] {
            let zm = ZetaMeasure::new(&f, ZetaParams::new(3.0, 0.9).unwrap()).unwrap();
            for base in ["1", "2", "12", "21"] {
                let base = w(base);
                let right: Vec<Word> = (0..2).map(|a| base.extended(a)).collect();
                let left: Vec<Word> = (0..2u8)
                    .map(|a| Word::new([vec![a], base.symbols().to_vec()].concat()).unwrap())
                    .collect();
                let mut all = vec![base.clone()];
                all.extend(right);
                all.extend(left);
                let m = zm.measures(&all).unwrap();
                assert!((m[0].value - m[1].value - m[2].value).abs() < 1e-9);
                assert!((m[0].value - m[3].value - m[4].value).abs() < 1e-9);
            }
            let pairs: Vec<Word> = admissible_words(f.spec(), 2).into_iter().map(|v| Word::new(v).unwrap()).collect();
            let total: f64 = zm.measures(&pairs).unwrap().iter().map(|m| m.value).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_negative_potentials() {
        let f = LocallyConstantPotential::from_symbol_values(&full2(), &[1.0, -0.5]).unwrap();
        assert!(matches!(
            ZetaMeasure::new(&f, ZetaParams::new(1.0, 0.5).unwrap()),
            Err(CoreError::NotNonnegative { .. })
        ));
        let zero = LocallyConstantPotential::constant(&full2(), 0.0).unwrap();
        assert!(pi_measure(&zero, 1.0, 5, &w("1")).is_err());
    }

    #[test]
    fn uncertified_when_cap_hit() {
        let params = ZetaParams::new(2.0, 0.999).unwrap().with_n_cap(50).unwrap();
        let m = zeta_measure(&fa(), params, &w("1")).unwrap();
        assert!(!m.certified);
        assert_eq!(m.n_used, 50);
        assert!(m.tail_bound > params.rel_tol);
    }

    #[test]
    fn inadmissible_cylinder_has_zero_measure() {
        let golden = ShiftSpec::golden_mean();
        let f = LocallyConstantPotential::from_symbol_values(&golden, &[1.0, 0.5]).unwrap();
        let m = zeta_measure(&f, ZetaParams::new(1.0, 0.5).unwrap(), &w("22")).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(m.certified);
    }

    #[test]
    fn truncated_constant_and_range_one() {
        let f = LocallyConstantPotential::constant(&full2(), 2.0).unwrap();
        for n in [1usize, 2, 3, 9] {
            // each level has total weight 1 and gives [11] the share 1/2 at n = 1, 1/4 after
            let expected = (0.5 + (n - 1) as f64 * 0.25) / n as f64;
            assert!((pi_measure(&f, 3.0, n, &w("11")).unwrap() - expected).abs() < 1e-12);
            // η weights level n by (2e^6)^n instead of 1
            let weights: Vec<f64> = (1..=n).map(|k| ((k as f64 - n as f64) * (2f64.ln() + 6.0)).exp()).collect();
            let share = |k: usize| if k == 1 { 0.5 } else { 0.25 };
            let eta = weights.iter().enumerate().map(|(i, w)| w * share(i + 1)).sum::<f64>() / weights.iter().sum::<f64>();
            let got = eta_measure(&f, 3.0, n, &w("11")).unwrap();
            assert!((got - eta).abs() < 1e-12, "n={n} {got} {eta}");
        }
        let ratio = 1f64.exp() / (1f64.exp() + 1.0);
        let pi = pi_measure(&fa(), 1.0, 30, &w("1")).unwrap();
        let eta = eta_measure(&fa(), 1.0, 30, &w("1")).unwrap();
        // every level of a range-one potential splits in the product proportions
        assert!((pi - ratio).abs() < 1e-12);
        assert!((pi - eta).abs() < 1e-12);
    }

    #[test]
    fn log_partition_rate_constant() {
        let a = 0.5;
        let f = LocallyConstantPotential::constant(&full2(), a).unwrap();
        let (c, s) = (4.0, 0.7);
        let q = (c * a * (s - 1.0)).exp();
        let r = log_partition_rate(&f, ZetaParams::new(c, s).unwrap()).unwrap();
        assert!((r.rate - (q / (1.0 - q)).ln() / c).abs() < 1e-10);
    }

    #[test]
    fn log_partition_rate_examples() {
        let r = log_partition_rate(&fa(), ZetaParams::on_schedule(200.0, 1.0).unwrap()).unwrap();
        assert!(r.rate.abs() <= 0.05);
        let r = log_partition_rate(&fa(), ZetaParams::new(100.0, 0.5).unwrap()).unwrap();
        assert!(r.rate < -0.4 && r.rate > -0.6, "{}", r.rate);
    }

    #[test]
    fn decomposition_constant_remainder() {
        // the Gibbs part spreads q/(1−q) uniformly; the series puts nothing on [12] at n = 1
        let f = LocallyConstantPotential::constant(&full2(), 1.0).unwrap();
        let d = series_gibbs_decomposition(&f, ZetaParams::new(1.0, 0.7).unwrap(), &w("12")).unwrap();
        let q = (0.7f64 - 1.0).exp();
        assert!((d.gibbs_side - q / (1.0 - q) / 4.0).abs() < 1e-9);
        assert!((d.zeta_side - q * q / (1.0 - q) / 4.0).abs() < 1e-9);
        assert!((d.alpha_remainder + q / 4.0).abs() < 1e-9);
        assert!(d.total_alpha_remainder.abs() < 1e-9);
        assert!((d.reconstructed_measure() - d.measure.value).abs() < 1e-12);
    }

    #[test]
    fn decomposition_reconstructs_measure() {
        for text in ["1", "2"] {
            let d = series_gibbs_decomposition(&fa(), ZetaParams::new(1.0, 0.99).unwrap(), &w(text)).unwrap();
            assert!((d.reconstructed_measure() - d.measure.value).abs() < 1e-8);
        }
    }

    #[test]
    fn ldp_rate_pi_regime() {
        let c = 400.0;
        let n = (c as f64).sqrt().ceil() as usize;
        let r = ldp_rate(RateRegime::Pi { c, n }, &fb(), &w("11")).unwrap();
        assert!((r.rate + 1.0).abs() <= 0.1, "{}", r.rate);
        assert_eq!(predicted_rate(&fb(), &w("11")).unwrap(), -1.0);
    }
}
