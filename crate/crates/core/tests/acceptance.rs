//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Test potentials: `fa` is `(1, 0)` on symbols on the full 2-shift; `fb` has range two with
//! value 1 on the windows 12 and 21 and 0 on 11 and 22.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use zetatherm::ergopt::{critical_graph, h_max, DeviationFunction, InfMethod, TIGHT_TOL};
use zetatherm::logspace::log_sum_exp;
use zetatherm::thermo::{epsilon_c, log_pressure, GibbsState};
use zetatherm::transfer::TransferMatrix;
use zetatherm::zeta::{
    eta_measure, ldp_rate, pi_measure, zeta_truncated, RateRegime, ZetaMeasure, ZetaParams,
};
use zetatherm::{beta, series_gibbs_decomposition};
use zetatherm_oracle::{measure_bruteforce, pressure_bruteforce, trace_bruteforce, SeriesKind};
use zetatherm_symbolic::potential::admissible_words;
use zetatherm_symbolic::{enumerate_fix, LocallyConstantPotential, ShiftSpec, Word};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fa() -> LocallyConstantPotential {
    LocallyConstantPotential::from_symbol_values(&ShiftSpec::full(2).unwrap(), &[1.0, 0.0]).unwrap()
}

fn fb() -> LocallyConstantPotential {
    LocallyConstantPotential::from_fn(&ShiftSpec::full(2).unwrap(), 2, |w| {
        if w.symbols()[0] != w.symbols()[1] { 1.0 } else { 0.0 }
    })
    .unwrap()
}

fn w(text: &str) -> Word {
    Word::parse(text).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn within(elapsed: Duration, limit_s: f64) -> Outcome {
    check(
        elapsed.as_secs_f64() < limit_s,
        format!("runtime {:.2}s (limit {limit_s}s)", elapsed.as_secs_f64()),
    )
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pressure_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst_oracle = 0.0f64;
    let mut worst_closed = 0.0f64;
    for (name, f) in [("fa", fa()), ("fb", fb())] {
        for c in [0.5, 1.0, 2.0, 5.0] {
            let p = log_pressure(&f, c).map_err(err)?;
            let oracle = pressure_bruteforce(&f, c, 16).map_err(err)?;
            let gap = (p - oracle.extrapolated).abs();
            if gap > 1e-6 {
                return Err(format!("{name} c={c}: P={p} oracle={}", oracle.extrapolated));
            }
            worst_oracle = worst_oracle.max(gap);
            if name == "fa" {
                let closed = (f64::exp(c) + 1.0).ln();
                if (p - closed).abs() > 1e-10 {
                    return Err(format!("fa c={c}: P={p} closed form {closed}"));
                }
                worst_closed = worst_closed.max((p - closed).abs());
            }
        }
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "max |P - oracle| = {worst_oracle:.1e}, max |P - log(e^c+1)| = {worst_closed:.1e}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn epsilon_monotone_limit() -> Outcome {
    let mut details = Vec::new();
    for (name, f) in [("fa", fa()), ("fb", fb())] {
        let critical = critical_graph(&f, TIGHT_TOL);
        let h_f = h_max(&critical).map_err(err)?;
        let cs: Vec<f64> = (0..=8).map(|k| 2f64.powi(k)).collect();
        let eps: Vec<f64> = cs.iter().map(|&c| epsilon_c(&f, c)).collect::<Result<_, _>>().map_err(err)?;
        for (i, pair) in eps.windows(2).enumerate() {
            if pair[1] > pair[0] + 1e-9 {
                return Err(format!("{name}: eps increases from c={} to c={}: {:?}", cs[i], cs[i + 1], pair));
            }
        }
        let last = *eps.last().unwrap();
        if (last - h_f).abs() > 5e-3 {
            return Err(format!("{name}: eps_256 = {last}, h_f = {h_f}"));
        }
        details.push(format!("{name}: eps_1={:.4} eps_256={last:.2e} h_f={h_f}", eps[0]));
    }
    Ok(details.join("; "))
}

fn zeta_tends_to_gibbs() -> Outcome {
    let start = Instant::now();
    let f = fa();
    let c = 2.0;
    let cylinders: Vec<Word> = admissible_words(f.spec(), 2).into_iter().map(|v| Word::new(v).unwrap()).collect();
    let gibbs = GibbsState::new(&f, c).map_err(err)?;
    let mut gaps = Vec::new();
    for s in [0.9, 0.99, 0.999, 0.9999] {
        let zm = ZetaMeasure::new(&f, ZetaParams::new(c, s).map_err(err)?).map_err(err)?;
        let measures = zm.measures(&cylinders).map_err(err)?;
        if measures.iter().any(|m| !m.certified) {
            return Err(format!("s={s}: tail not certified"));
        }
        let gap = cylinders
            .iter()
            .zip(&measures)
            .map(|(w, m)| (m.value - gibbs.cylinder(w).value).abs())
            .fold(0.0, f64::max);
        gaps.push(gap);
    }
    let decreasing = gaps.windows(2).all(|p| p[1] < p[0]);
    let detail = format!("gaps {:?}", gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>());
    check(decreasing && gaps[3] <= 2e-3, detail.clone())?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("{detail}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn truncated_tends_to_gibbs() -> Outcome {
    let f = fa();
    let target = 1f64.exp() / (1f64.exp() + 1.0);
    let pi30 = pi_measure(&f, 1.0, 30, &w("1")).map_err(err)?;
    if (pi30 - target).abs() > 1e-3 {
        return Err(format!("pi_30 = {pi30}, target {target}"));
    }
    let mut worst = 0.0f64;
    for n in 1..=30 {
        let pi = pi_measure(&f, 1.0, n, &w("1")).map_err(err)?;
        let eta = eta_measure(&f, 1.0, n, &w("1")).map_err(err)?;
        worst = worst.max((pi - eta).abs());
    }
    check(
        worst <= 1e-9,
        format!("|pi_30 - e/(e+1)| = {:.1e}, max |eta - pi| = {worst:.1e}", (pi30 - target).abs()),
    )
}

fn zero_temperature_mean() -> Outcome {
    let mut details = Vec::new();
    for (name, f) in [("fa", fa()), ("fb", fb())] {
        let b = beta(&f);
        let mut gaps = Vec::new();
        for c in [25.0, 50.0, 100.0, 200.0] {
            let zm = ZetaMeasure::new(&f, ZetaParams::on_schedule(c, 1.0).map_err(err)?).map_err(err)?;
            gaps.push(b - zm.integral(&f).map_err(err)?);
        }
        let last = *gaps.last().unwrap();
        if last > 0.05 {
            return Err(format!("{name}: beta - mean = {gaps:?}"));
        }
        details.push(format!("{name}: beta - mean at c=200 is {last:.2e}"));
    }
    Ok(details.join("; "))
}

fn zeta_large_deviations() -> Outcome {
    let cs = [25.0, 50.0, 100.0, 200.0];
    let rates = |f: &LocallyConstantPotential, word: &Word| -> Result<Vec<f64>, String> {
        cs.iter()
            .map(|&c| {
                let params = ZetaParams::on_schedule(c, 1.0).map_err(err)?;
                let r = ldp_rate(RateRegime::Zeta(params), f, word).map_err(err)?;
                if r.certified { Ok(r.rate) } else { Err(format!("c={c}: uncertified")) }
            })
            .collect()
    };
    let ra = rates(&fa(), &w("2"))?;
    let approach = ra.windows(2).all(|p| (p[1] + 1.0).abs() < (p[0] + 1.0).abs());
    if !approach || (ra[3] + 1.0).abs() > 0.1 {
        return Err(format!("fa [2] rates {ra:?}"));
    }
    let rb = rates(&fb(), &w("11"))?;
    if (rb[3] + 1.0).abs() > 0.1 {
        return Err(format!("fb [11] rates {rb:?}"));
    }
    let mut infs = Vec::new();
    for (f, word) in [(fa(), w("2")), (fb(), w("11"))] {
        let dev = DeviationFunction::new(&f);
        let exact = dev.inf_cylinder(&word, InfMethod::Exact).map_err(err)?;
        let brute = dev.inf_cylinder(&word, InfMethod::Brute { period_cap: 12 }).map_err(err)?;
        if exact != brute || exact != 1.0 {
            return Err(format!("inf I: exact {exact}, brute {brute}"));
        }
        infs.push(exact);
    }
    Ok(format!(
        "fa [2] rates {:?}, fb [11] rate at c=200 {:.4}, inf I = {infs:?}",
        ra.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>(),
        rb[3]
    ))
}

fn truncated_large_deviations() -> Outcome {
    let start = Instant::now();
    let c = 400.0f64;
    let n = c.sqrt().ceil() as usize;
    let r = ldp_rate(RateRegime::Pi { c, n }, &fb(), &w("11")).map_err(err)?;
    check((r.rate + 1.0).abs() <= 0.1, format!("rate {:.4} at N={n}", r.rate))?;
    within(start.elapsed(), 60.0)?;
    Ok(format!("fb [11] rate {:.4} at c=400, N={n}, {:.2}s", r.rate, start.elapsed().as_secs_f64()))
}

fn deviation_attains_zero() -> Outcome {
    let mut details = Vec::new();
    for (name, f) in [("fa", fa()), ("fb", fb())] {
        let dev = DeviationFunction::new(&f);
        let mut min = f64::INFINITY;
        for n in 1..=4 {
            for x in enumerate_fix(f.spec(), n).map_err(err)? {
                let i = dev.deviation(&x).map_err(err)?;
                if i < 0.0 {
                    return Err(format!("{name}: negative deviation {i}"));
                }
                min = min.min(i);
            }
        }
        if min != 0.0 {
            return Err(format!("{name}: min over periods <= 4 is {min}"));
        }
        details.push(format!("{name}: min 0"));
    }
    Ok(details.join("; "))
}

fn cylinder_infima_consistent() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut checked = 0;
    for f in [fa(), fb()] {
        let dev = DeviationFunction::new(&f);
        for _ in 0..20 {
            let len = rng.random_range(1..=4);
            let word = Word::new((0..len).map(|_| rng.random_range(0..2u8)).collect::<Vec<_>>()).unwrap();
            let exact = dev.inf_cylinder(&word, InfMethod::Exact).map_err(err)?;
            let brute = dev.inf_cylinder(&word, InfMethod::Brute { period_cap: 12 }).map_err(err)?;
            if (exact - brute).abs() > 1e-9 {
                return Err(format!("{}: exact {exact}, brute {brute}", word.to_text(2)));
            }
            let depths: Vec<usize> = (1..=len).collect();
            let chain = dev.tilde(&word, &depths).map_err(err)?;
            if chain.windows(2).any(|p| p[1] < p[0] - 1e-12) {
                return Err(format!("{}: depth chain {chain:?} not monotone", word.to_text(2)));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} random cylinders, exact = brute and monotone depth chains"))
}

fn series_decomposition() -> Outcome {
    let f = fa();
    let mut worst_reconstruction = 0.0f64;
    let mut details = Vec::new();
    for text in ["1", "2"] {
        let word = w(text);
        let mut decompositions = Vec::new();
        for s in [0.9, 0.99, 0.999] {
            decompositions.push(series_gibbs_decomposition(&f, ZetaParams::new(1.0, s).map_err(err)?, &word).map_err(err)?);
        }
        for d in &decompositions[..2] {
            let gap = (d.reconstructed_measure() - d.measure.value).abs();
            if gap > 1e-8 {
                return Err(format!("[{text}]: reconstruction off by {gap:e}"));
            }
            worst_reconstruction = worst_reconstruction.max(gap);
        }
        // compare the smallest magnitude consistent with each value to the largest at s = 0.9
        let base = decompositions[0].alpha_remainder.abs() + decompositions[0].alpha_error;
        for d in &decompositions[1..] {
            let magnitude = (d.alpha_remainder.abs() - d.alpha_error).max(0.0);
            if magnitude > 10.0 * base {
                return Err(format!("[{text}]: remainder {} vs {} at s=0.9", d.alpha_remainder, base));
            }
        }
        let sides: Vec<String> = decompositions.iter().map(|d| format!("{:.3e}", d.zeta_side)).collect();
        let remainders: Vec<String> = decompositions.iter().map(|d| format!("{:.1e}", d.alpha_remainder)).collect();
        details.push(format!("[{text}] zeta sides {sides:?} remainders {remainders:?}"));
    }
    Ok(format!("max reconstruction gap {worst_reconstruction:.1e}; {}", details.join("; ")))
}

fn oracle_cross_checks() -> Outcome {
    let golden = ShiftSpec::golden_mean();
    let g = LocallyConstantPotential::from_fn(&golden, 3, |w| {
        0.25 + w.symbols().iter().enumerate().map(|(i, &s)| s as f64 * 0.5 / (i + 1) as f64).sum::<f64>()
    })
    .unwrap();
    let potentials = [("fa", fa()), ("fb", fb()), ("golden", g)];
    let words = ["1", "2", "11", "12", "21", "121", "1112"];
    let mut worst_measure = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut cases = 0;
    for (name, f) in &potentials {
        for n in 1..=14 {
            for c in [0.5, 1.0, 5.0] {
                let transfer = TransferMatrix::new(f, c).map_err(err)?.log_trace_power(n);
                let brute = trace_bruteforce(f, c, n).map_err(err)?.ln();
                let gap = (transfer - brute).abs();
                if gap > 1e-9 {
                    return Err(format!("{name}: trace identity n={n} c={c}: {transfer} vs {brute}"));
                }
                worst_trace = worst_trace.max(gap);
            }
        }
        for c in [0.5, 2.0, 5.0] {
            let p = log_pressure(f, c).map_err(err)?;
            let cylinders: Vec<Word> = words
                .iter()
                .map(|t| w(t))
                .filter(|word| f.spec().is_admissible(word.symbols()))
                .collect();
            for n_max in [1, 5, 14] {
                let kinds = [
                    ("zeta", SeriesKind::Zeta { c, s: 0.7, p }),
                    ("pi", SeriesKind::Pi { c, p }),
                    ("eta", SeriesKind::Eta { c }),
                ];
                let zeta = zeta_truncated(f, c, 0.7, n_max, &cylinders).map_err(err)?;
                for (i, word) in cylinders.iter().enumerate() {
                    for (kind, series) in kinds {
                        let ours = match kind {
                            "zeta" => zeta.measure(i),
                            "pi" => pi_measure(f, c, n_max, word).map_err(err)?,
                            _ => eta_measure(f, c, n_max, word).map_err(err)?,
                        };
                        let brute = measure_bruteforce(f, series, n_max, word).map_err(err)?.value;
                        let gap = (ours - brute).abs();
                        if gap > 1e-8 {
                            return Err(format!("{name} {kind} [{}] c={c} N={n_max}: {ours} vs {brute}", word.to_text(2)));
                        }
                        worst_measure = worst_measure.max(gap);
                        cases += 1;
                    }
                }
            }
        }
    }
    // the log-domain level sum and the literal sum agree for large exponents as well
    let big = log_sum_exp([700.0, 700.0]);
    check(
        (big - (700.0 + 2f64.ln())).abs() < 1e-12,
        format!("{cases} measure cases, max gap {worst_measure:.1e}; max trace gap {worst_trace:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("pressure matches brute-force limit and closed form", pressure_correctness),
        ("eps_c decreases to the residual entropy", epsilon_monotone_limit),
        ("zeta measure tends to the Gibbs state as s -> 1", zeta_tends_to_gibbs),
        ("truncated orbit measures tend to the Gibbs state", truncated_tends_to_gibbs),
        ("zero-temperature zeta mean tends to beta", zero_temperature_mean),
        ("zeta measure large-deviation rates", zeta_large_deviations),
        ("truncated measure large-deviation rate", truncated_large_deviations),
        ("deviation function attains zero on short periods", deviation_attains_zero),
        ("exact and brute cylinder infima agree", cylinder_infima_consistent),
        ("series splits into Gibbs part and bounded remainder", series_decomposition),
        ("log-domain sums agree with brute-force oracle", oracle_cross_checks),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  C{:<2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  C{:<2} {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
