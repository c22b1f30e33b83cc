//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use riskcent::centrality::{default_grid, measure_values, orders_agree, ranking_values, sweep, uniform_grid};
use riskcent::epidemics::{si_exact, si_lee, si_meanfield, SIParams};
use riskcent::experiments::{
    er_ratio_limit_check, ratio_derivative_curve, ratio_study, spearman_table, ExperimentConfig, Ratio,
};
use riskcent::finance::{corporate_pipeline, lda_fit, mst_edges, synthetic_corporate, CorporateOptions};
use riskcent::graph::{generate_complete, generate_er};
use riskcent::interlacement::fixtures::hub_versus_clique;
use riskcent::interlacement::{detect, heuristic_linear};
use riskcent::spectral::decompose;
use riskcent::{Execution, ExpmEngine, Measure};

type Outcome = Result<String, String>;

fn check(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn complete_graph_closed_forms() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut limit_err: f64 = 0.0;
    for n in [3usize, 5, 10] {
        let g = generate_complete(n).unwrap();
        let engine = ExpmEngine::new(&g).unwrap();
        let nf = n as f64;
        for zeta in [0.1, 0.5, 1.0, 5.0] {
            let r_exact = ((nf - 1.0) * zeta).exp();
            let c_exact = (((nf - 1.0) * zeta).exp() + (nf - 1.0) * (-zeta).exp()) / nf;
            let t_exact = r_exact - c_exact;
            for (m, exact) in [(Measure::R, r_exact), (Measure::C, c_exact), (Measure::T, t_exact)] {
                for v in measure_values(&engine, m, zeta).unwrap() {
                    worst = worst.max(rel(v, exact));
                }
            }
        }
        let r = measure_values(&engine, Measure::R, 50.0).unwrap();
        let c = measure_values(&engine, Measure::C, 50.0).unwrap();
        let t = measure_values(&engine, Measure::T, 50.0).unwrap();
        for i in 0..n {
            limit_err = limit_err.max((c[i] / r[i] - 1.0 / nf).abs());
            limit_err = limit_err.max((c[i] / t[i] - 1.0 / (nf - 1.0)).abs());
        }
    }
    let elapsed = start.elapsed();
    let msg = format!(
        "max relative error {worst:.2e}, limit ratio error {limit_err:.2e}, {:.3} s",
        elapsed.as_secs_f64()
    );
    check(
        worst <= 1e-10 && limit_err <= 1e-6 && elapsed < Duration::from_secs(1),
        msg.clone(),
        msg,
    )
}

fn limit_theorems() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let g = generate_er(60, 0.15, 1000 + seed, true).unwrap();
        let engine = ExpmEngine::new(&g).unwrap();
        let degree: Vec<f64> = g.degrees().iter().map(|&k| k as f64).collect();
        let psi = decompose(&g).unwrap().perron();
        for m in Measure::ALL {
            let low = ranking_values(&engine, m, 1e-6).unwrap();
            let high = ranking_values(&engine, m, 50.0).unwrap();
            if !orders_agree(&low, &degree, 0.0) {
                failures.push(format!("seed {seed} {m} vs degree"));
            }
            if !orders_agree(&high, &psi, 1e-9) {
                failures.push(format!("seed {seed} {m} vs eigenvector"));
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && elapsed < Duration::from_secs(30),
        format!("50 graphs x 3 measures agree with both limits, {:.2} s", elapsed.as_secs_f64()),
        format!("{} disagreements {:?}, {:.2} s", failures.len(), failures.first(), elapsed.as_secs_f64()),
    )
}

const TABLE1: [[f64; 5]; 3] = [
    [0.9947, 0.9967, 0.9971, 0.9994, 0.9998],
    [0.9844, 0.9950, 0.9966, 0.9994, 0.9998],
    [0.9813, 0.9950, 0.9966, 0.9994, 0.9998],
];

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::table1();
    let t = spearman_table(&cfg, Execution::Parallel).unwrap();
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, row) in TABLE1.iter().enumerate() {
        for (d, &published) in row.iter().enumerate() {
            let got = t.mean[k][d];
            worst = worst.max((got - published).abs());
            if (got - published).abs() > 0.01 {
                bad.push(format!(
                    "density {} zeta {}: {got:.4} vs {published}",
                    cfg.densities[d], cfg.zetas[k]
                ));
            }
        }
    }
    let rows: Vec<String> = t
        .mean
        .iter()
        .map(|r| r.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" "))
        .collect();
    let detail = format!(
        "max deviation {worst:.4}, min Spearman(R,T) {:.6}, table [{}], {:.1} s",
        t.min_r_t,
        rows.join(" | "),
        start.elapsed().as_secs_f64()
    );
    check(bad.is_empty(), detail.clone(), format!("{}; {detail}", bad.join("; ")))
}

fn distribution_claims() -> Outcome {
    let cfg = ExperimentConfig {
        n: 100,
        densities: vec![0.1],
        zetas: vec![0.1, 1.0],
        replications: 1000,
        seed: 20,
    };
    let rel_r = ratio_study(&cfg, Ratio::RelativeR, Execution::Parallel).unwrap();
    let cr = ratio_study(&cfg, Ratio::CoverR, Execution::Parallel).unwrap();
    let s01 = rel_r[0].summary.std;
    let s1 = rel_r[1].summary.std;
    let q01 = cr[1].summary.quantiles[0];
    let q99 = cr[1].summary.quantiles[4];
    let checks = [
        ("std R/E[R] at 0.1", s01, (s01 - 0.20).abs() <= 0.03, "0.20 +- 0.03"),
        ("std R/E[R] at 1.0", s1, (s1 - 0.37).abs() <= 0.03, "0.37 +- 0.03"),
        ("C/R 1% quantile", q01, rel(q01, 0.0015) <= 0.3, "0.0015 +- 30%"),
        ("C/R 99% quantile", q99, rel(q99, 0.025) <= 0.3, "0.025 +- 30%"),
    ];
    let detail: Vec<String> = checks
        .iter()
        .map(|(name, v, ok, target)| format!("{name} {v:.4} (target {target}) {}", if *ok { "ok" } else { "off" }))
        .collect();
    check(checks.iter().all(|c| c.2), detail.join("; "), detail.join("; "))
}

fn ratio_limit_trend() -> Outcome {
    let t = er_ratio_limit_check(&[50, 100, 200, 400], 0.5, &[0.1, 1.0], 20, 5, Execution::Parallel).unwrap();
    let rows: Vec<String> = t
        .zetas
        .iter()
        .zip(&t.deviation)
        .map(|(z, row)| format!("zeta {z}: {}", row.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(" > ")))
        .collect();
    check(t.decreasing().iter().all(|&b| b), rows.join("; "), rows.join("; "))
}

fn si_bound_chain() -> Outcome {
    let grid = uniform_grid(0.0, 3000.0, 61);
    let mut worst_excess: f64 = f64::NEG_INFINITY;
    let mut geometry = true;
    for seed in 0..20u64 {
        let g = generate_er(100, 0.1, 300 + seed, true).unwrap();
        let kbar = 2.0 * g.edge_count() as f64 / g.n() as f64;
        for gamma in [0.001, 0.002] {
            let p = SIParams::new(gamma, 0.01, grid.clone()).unwrap();
            let ex = si_exact(&g, &p).unwrap();
            let lee = si_lee(&g, &p).unwrap();
            for (re, rl) in ex.x.iter().zip(&lee.x) {
                for (a, b) in re.iter().zip(rl) {
                    worst_excess = worst_excess.max(a - b).max(b - 1.0);
                }
            }
            let mf = si_meanfield(kbar, &p).unwrap();
            geometry &= lee.node_mean().iter().zip(&mf).all(|(l, m)| *l + 1e-12 >= *m);
        }
    }
    let detail = format!("max violation {worst_excess:.2e}, lee mean above mean-field: {geometry}");
    check(worst_excess <= 1e-9 && geometry, detail.clone(), detail)
}

fn interlacement_suite() -> Outcome {
    let grid = default_grid();
    let mut pairs = 0;
    let mut worst_gap: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut problems = Vec::new();
    for m in [6, 7, 8, 10] {
        for delta in [1, 2] {
            for s in [1.5, 2.0, 3.0] {
                let (g, i, j) = hub_versus_clique(m, delta, s).unwrap();
                let d = detect(&g, i, j, Measure::C, &grid).unwrap();
                let Some(e) = d.events.first() else {
                    problems.push(format!("({m},{delta},{s}) no crossing"));
                    continue;
                };
                if !(e.zeta_star > 0.0 && e.zeta_star < 0.5) {
                    problems.push(format!("({m},{delta},{s}) crossing {} outside (0, 0.5)", e.zeta_star));
                }
                let engine = ExpmEngine::new(&g).unwrap();
                let c = measure_values(&engine, Measure::C, e.zeta_star).unwrap();
                worst_residual = worst_residual.max((c[i] - c[j]).abs() / c[i].abs());
                match heuristic_linear(&g, i, j, Measure::C).unwrap() {
                    Some(h) => worst_gap = worst_gap.max((h - e.zeta_star).abs()),
                    None => problems.push(format!("({m},{delta},{s}) no heuristic")),
                }
                pairs += 1;
            }
        }
    }
    let detail = format!(
        "{pairs} weighted pairs, max heuristic gap {worst_gap:.4}, max relative residual {worst_residual:.2e}"
    );
    check(
        problems.is_empty() && pairs >= 20 && worst_gap <= 0.05 && worst_residual < 1e-6,
        detail.clone(),
        format!("{detail}; {}", problems.join("; ")),
    )
}

fn convexity_suite() -> Outcome {
    let grid = default_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_first = f64::INFINITY;
    let mut worst_second = f64::INFINITY;
    for k in 0..100u64 {
        let n = rng.random_range(10..40);
        let p = rng.random_range(0.1..0.6);
        let g = generate_er(n, p, 5000 + k, true).unwrap();
        let prof = sweep(&g, &grid).unwrap();
        for m in [Measure::R, Measure::C] {
            for i in 0..n {
                let col = prof.column(m, i);
                for w in col.windows(2) {
                    worst_first = worst_first.min((w[1] - w[0]) / w[1].abs());
                }
                for w in col.windows(3) {
                    worst_second = worst_second.min((w[2] - 2.0 * w[1] + w[0]) / w[2].abs().max(1.0));
                }
            }
        }
    }
    let detail = format!("min relative first difference {worst_first:.3e}, min second difference {worst_second:.3e}");
    check(worst_first > 0.0 && worst_second >= -1e-9, detail.clone(), detail)
}

/// Minimum over all labelled trees on `n` nodes, enumerated by Prüfer code.
fn brute_force_mst(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut best = f64::INFINITY;
    let mut code = vec![0usize; n - 2];
    for mut c in 0..n.pow(n as u32 - 2) {
        for slot in code.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &v in &code {
            degree[v] += 1;
        }
        let mut w = 0.0;
        for &v in &code {
            let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
            w += d[leaf][v];
            degree[leaf] -= 1;
            degree[v] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
        best = best.min(w + d[rest[0]][rest[1]]);
    }
    best
}

fn mst_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut d = vec![vec![0.0; 8]; 8];
        for i in 0..8 {
            for j in i + 1..8 {
                let v = rng.random_range(0.0..2.0);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        let tree: f64 = mst_edges(&d).unwrap().iter().map(|e| e.2).sum();
        worst = worst.max((tree - brute_force_mst(&d)).abs());
    }
    let detail = format!("50 matrices, max |pipeline - exhaustive| {worst:.2e}");
    check(worst < 1e-12, detail.clone(), detail)
}

fn lda_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst: f64 = 0.0;
    for (mu0, mu1, sd, n0, n1) in [(-1.0, 1.5, 1.0, 60, 40), (0.0, 0.5, 2.0, 100, 150), (3.0, -2.0, 0.7, 30, 30)] {
        let a = Normal::new(mu0, sd).unwrap();
        let b = Normal::new(mu1, sd).unwrap();
        let x0: Vec<f64> = (0..n0).map(|_| a.sample(&mut rng)).collect();
        let x1: Vec<f64> = (0..n1).map(|_| b.sample(&mut rng)).collect();
        let x: Vec<f64> = x0.iter().chain(&x1).copied().collect();
        let y: Vec<i8> = [vec![-1; n0], vec![1; n1]].concat();
        let model = lda_fit(&x, &y).unwrap();
        let m0 = x0.iter().sum::<f64>() / n0 as f64;
        let m1 = x1.iter().sum::<f64>() / n1 as f64;
        let ss: f64 = x0.iter().map(|v| (v - m0).powi(2)).sum::<f64>() + x1.iter().map(|v| (v - m1).powi(2)).sum::<f64>();
        let var = ss / (n0 + n1 - 2) as f64;
        let slope = (m1 - m0) / var;
        let intercept = (n1 as f64 / n0 as f64).ln() - (m1 * m1 - m0 * m0) / (2.0 * var);
        worst = worst.max((model.slope - slope).abs()).max((model.intercept - intercept).abs());
    }
    let (memberships, svc) = synthetic_corporate(12, 60, 150);
    let report = corporate_pipeline(&memberships, &svc, &CorporateOptions::default()).unwrap();
    let consistent = report.model.confusion.total() == report.sample
        && report.companies.iter().filter(|c| c.class.is_some()).count() == report.sample;
    let detail = format!(
        "max coefficient error {worst:.2e}; corporate fixture {} companies, confusion sums to {} of {}",
        report.companies.len(),
        report.model.confusion.total(),
        report.sample
    );
    check(worst <= 1e-10 && consistent, detail.clone(), detail)
}

fn ratio_derivative_sign() -> Outcome {
    let grid = uniform_grid(0.0, 1.0, 1001);
    let mut max_value = f64::NEG_INFINITY;
    for kbar in [1.0, 2.0, 5.0, 10.0] {
        for v in ratio_derivative_curve(kbar, &grid).unwrap() {
            max_value = max_value.max(v);
        }
    }
    let at_origin = ratio_derivative_curve(1.0, &[0.0]).unwrap()[0];
    let detail = format!("max over grid {max_value:.4e}, value at (1, 0) = {at_origin}");
    check(max_value < 0.0 && at_origin == -1.0, detail.clone(), detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("complete-graph closed forms", complete_graph_closed_forms),
        ("limit theorems", limit_theorems),
        ("Spearman table reproduction", table_reproduction),
        ("ratio distribution claims", distribution_claims),
        ("ER ratio-limit trend", ratio_limit_trend),
        ("SI bound chain", si_bound_chain),
        ("interlacement", interlacement_suite),
        ("convexity and monotonicity", convexity_suite),
        ("MST oracle", mst_oracle),
        ("LDA oracle", lda_oracle),
        ("ratio-derivative closed form", ratio_derivative_sign),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let line = match outcome {
            Ok(detail) => format!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                format!("criterion {:>2} FAIL {name}: {detail}", k + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
    }
    writeln!(out, "acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len()).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
