use std::path::{Path, PathBuf};

use clap::Args;

use riskcent::centrality::{default_grid, ranking_sweep_direct, sweep_with, uniform_grid};
use riskcent::config::Config;
use riskcent::epidemics::{si_exact, si_lee, si_linearized, si_meanfield, SIParams, SITrajectory, Solver};
use riskcent::experiments::{
    er_ratio_limit_check, ratio_derivative_curve, ratio_study, spearman_table, write_ratio_csv, ExperimentConfig,
    Ratio,
};
use riskcent::finance::{
    corporate_pipeline, load_svc, market_pipeline, rolling_windows, CorporateOptions, MarketOptions, ReturnsPanel,
    Weighting, WindowSpec,
};
use riskcent::graph::{load_edge_list, load_memberships};
use riskcent::interlacement::{
    detect, heuristic_linear, heuristic_poly, scan_all_pairs, series_coefficients, InterlacementEvent,
};
use riskcent::{Execution, ExpmEngine, Graph, Measure};

use crate::manifest::RunManifest;
use crate::Failure;

const EXEC: Execution = Execution::Parallel;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

/// `start:stop:count` or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || input(format!("cannot parse zeta grid {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || stop < start {
            return Err(bad());
        }
        uniform_grid(start, stop, count)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|z| !(z.is_finite() && *z >= 0.0)) {
        return Err(input(format!("zeta grid {spec:?} must hold finite nonnegative values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(input(format!("zeta grid {spec:?} must be strictly increasing")));
    }
    Ok(grid)
}

fn grid_or_default(spec: Option<&str>) -> Result<Vec<f64>, Failure> {
    spec.map_or_else(|| Ok(default_grid()), parse_grid)
}

fn load_graph(path: &Path, weighted: bool) -> Result<Graph, Failure> {
    Ok(load_edge_list(path, weighted)?)
}

fn load_config(path: Option<&PathBuf>, known: &[&str]) -> Result<Config, Failure> {
    let cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.check_keys(known)?;
    Ok(cfg)
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    /// Edge list: `u v [w]` per line.
    pub graph: PathBuf,
    /// Read a third column as edge weights.
    #[arg(long)]
    pub weighted: bool,
    /// `start:stop:count` or comma list (default 0.01:1:100).
    #[arg(long)]
    pub zeta_grid: Option<String>,
    /// Measure ranked in ranks.csv: R, C or T.
    #[arg(long, default_value = "R")]
    pub measure: Measure,
}

pub fn centrality(a: &CentralityArgs, out: &Path) -> Result<(), Failure> {
    let g = load_graph(&a.graph, a.weighted)?;
    let grid = grid_or_default(a.zeta_grid.as_deref())?;
    let mut m = RunManifest::new("centrality");
    m.input(&a.graph)?
        .set("weighted", a.weighted)
        .set("zeta_grid", a.zeta_grid.as_deref().unwrap_or("0.01:1:100"))
        .set("measure", a.measure);
    for f in ["values_R.csv", "values_C.csv", "values_T.csv", "ranks.csv", "rankstd.csv"] {
        m.output(f);
    }
    m.write(out)?;

    let engine = ExpmEngine::new(&g)?;
    let profile = sweep_with(&engine, &grid, EXEC)?;
    for measure in Measure::ALL {
        profile.write_csv(measure, out.join(format!("values_{measure}.csv")))?;
    }
    let ranks = ranking_sweep_direct(&engine, &grid, a.measure, EXEC)?;
    ranks.write_csv(out.join("ranks.csv"))?;
    ranks.write_std_csv(out.join("rankstd.csv"))?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct EpidemicsArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub weighted: bool,
    /// Initial infection probability of every node.
    #[arg(long)]
    pub beta: f64,
    /// Infection rate.
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub tmax: f64,
    /// Number of time points in `[0, tmax]`.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Comma list of exact-ode, linearized, lee-bound, mean-field.
    #[arg(long, default_value = "exact-ode,linearized,lee-bound,mean-field")]
    pub solvers: String,
}

pub fn epidemics(a: &EpidemicsArgs, out: &Path) -> Result<(), Failure> {
    let solvers: Vec<Solver> = a
        .solvers
        .split(',')
        .map(|s| s.trim().parse::<Solver>())
        .collect::<Result<_, _>>()?;
    if solvers.is_empty() {
        return Err(input("no solvers selected"));
    }
    if !(a.tmax.is_finite() && a.tmax >= 0.0) {
        return Err(input(format!("--tmax must be finite and nonnegative, got {}", a.tmax)));
    }
    if a.steps < 2 && a.tmax > 0.0 {
        return Err(input("--steps must be at least 2"));
    }
    let grid = if a.tmax == 0.0 {
        vec![0.0]
    } else {
        (0..a.steps).map(|k| a.tmax * k as f64 / (a.steps - 1) as f64).collect()
    };
    let params = SIParams::new(a.gamma, a.beta, grid.clone())?;
    let g = load_graph(&a.graph, a.weighted)?;

    let mut m = RunManifest::new("epidemics");
    m.input(&a.graph)?
        .set("weighted", a.weighted)
        .set("beta", a.beta)
        .set("gamma", a.gamma)
        .set("tmax", a.tmax)
        .set("steps", a.steps)
        .set("solvers", &a.solvers);
    for s in &solvers {
        if *s != Solver::MeanField {
            m.output(format!("si_{s}.csv"));
        }
    }
    m.output("mean_curves.csv");
    m.write(out)?;

    let mut means: Vec<(Solver, Vec<f64>)> = Vec::new();
    for &s in &solvers {
        let traj: SITrajectory = match s {
            Solver::ExactOde => si_exact(&g, &params)?,
            Solver::Linearized => si_linearized(&g, &params)?,
            Solver::LeeBound => si_lee(&g, &params)?,
            Solver::MeanField => {
                let kbar = g.strengths().iter().sum::<f64>() / g.n() as f64;
                means.push((s, si_meanfield(kbar, &params)?));
                continue;
            }
        };
        traj.write_csv(g.labels(), out.join(format!("si_{s}.csv")))?;
        means.push((s, traj.node_mean()));
    }
    let mut text = String::from("t");
    for (s, _) in &means {
        text.push_str(&format!(",{s}"));
    }
    text.push('\n');
    for (k, t) in grid.iter().enumerate() {
        text.push_str(&t.to_string());
        for (_, v) in &means {
            text.push_str(&format!(",{}", v[k]));
        }
        text.push('\n');
    }
    write(out.join("mean_curves.csv"), &text)
}

#[derive(Debug, Args)]
pub struct InterlaceArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub weighted: bool,
    /// Node label pairs `a:b,c:d`.
    #[arg(long, conflicts_with = "all_pairs", required_unless_present = "all_pairs")]
    pub pairs: Option<String>,
    /// Scan every unordered pair.
    #[arg(long)]
    pub all_pairs: bool,
    #[arg(long, default_value = "C")]
    pub measure: Measure,
    #[arg(long)]
    pub zeta_grid: Option<String>,
}

fn parse_pairs(g: &Graph, spec: &str) -> Result<Vec<(usize, usize)>, Failure> {
    spec.split(',')
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| input(format!("pair {p:?} is not of the form a:b")))?;
            let find = |l: &str| {
                g.index_of(l.trim())
                    .ok_or_else(|| input(format!("unknown node label {:?}", l.trim())))
            };
            let (i, j) = (find(a)?, find(b)?);
            if i == j {
                return Err(input(format!("pair {p:?} repeats a node")));
            }
            Ok((i, j))
        })
        .collect()
}

/// Root of the `k0 + 3` truncation closest to the refined crossing.
fn poly_estimate(g: &Graph, e: &InterlacementEvent) -> Option<f64> {
    let k0 = series_coefficients(g, e.i, e.j, e.measure, 60).ok()?.k0?;
    let p = heuristic_poly(g, e.i, e.j, e.measure, k0 + 3).ok()?;
    p.roots
        .into_iter()
        .min_by(|a, b| (a - e.zeta_star).abs().total_cmp(&(b - e.zeta_star).abs()))
}

pub fn interlace(a: &InterlaceArgs, out: &Path) -> Result<(), Failure> {
    let g = load_graph(&a.graph, a.weighted)?;
    let grid = grid_or_default(a.zeta_grid.as_deref())?;
    let pairs = match &a.pairs {
        Some(spec) => Some(parse_pairs(&g, spec)?),
        None => None,
    };
    let mut m = RunManifest::new("interlace");
    m.input(&a.graph)?
        .set("weighted", a.weighted)
        .set("measure", a.measure)
        .set("zeta_grid", a.zeta_grid.as_deref().unwrap_or("0.01:1:100"))
        .set("pairs", a.pairs.as_deref().unwrap_or("all"))
        .output("events.csv");
    m.write(out)?;

    let events = match pairs {
        Some(pairs) => {
            let mut ev = Vec::new();
            for (i, j) in pairs {
                ev.extend(detect(&g, i, j, a.measure, &grid)?.events);
            }
            ev
        }
        None => scan_all_pairs(&g, a.measure, &grid, EXEC)?,
    };
    let extra = EXEC.map(&events, |e| {
        let lin = heuristic_linear(&g, e.i, e.j, e.measure).ok().flatten();
        (lin, poly_estimate(&g, e))
    });
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut text = String::from("i,j,measure,method,zeta_star,bracket_lo,bracket_hi,linear_heuristic,poly_heuristic\n");
    for (e, (lin, poly)) in events.iter().zip(extra) {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            g.label(e.i),
            g.label(e.j),
            e.measure,
            e.method,
            e.zeta_star,
            e.bracket.0,
            e.bracket.1,
            opt(lin),
            opt(poly)
        ));
    }
    write(out.join("events.csv"), &text)
}

#[derive(Debug, Args)]
pub struct ExperimentsArgs {
    /// `key = value` file: n, densities, zetas, replications, seed, studies,
    /// limit_ns, limit_p, limit_replications, kbars.
    pub config: PathBuf,
}

const EXPERIMENT_EXTRA: [&str; 5] = ["studies", "limit_ns", "limit_p", "limit_replications", "kbars"];

fn ratio_slug(r: Ratio) -> &'static str {
    match r {
        Ratio::RelativeR => "R_over_mean",
        Ratio::RelativeC => "C_over_mean",
        Ratio::RelativeT => "T_over_mean",
        Ratio::CoverR => "C_over_R",
    }
}

pub fn experiments(a: &ExperimentsArgs, out: &Path) -> Result<(), Failure> {
    let mut known: Vec<&str> = ExperimentConfig::KEYS.to_vec();
    known.extend(EXPERIMENT_EXTRA);
    let cfg = load_config(Some(&a.config), &known)?;
    let ec = ExperimentConfig::from_config(&cfg)?;
    let studies: Vec<String> = cfg
        .get_list::<String>("studies")?
        .unwrap_or_else(|| vec!["table".into()]);
    for s in &studies {
        if !["table", "ratios", "limit", "derivative"].contains(&s.as_str()) {
            return Err(input(format!("unknown study {s:?} (table, ratios, limit, derivative)")));
        }
    }
    let limit_ns: Vec<usize> = cfg.get_list("limit_ns")?.unwrap_or(vec![50, 100, 200, 400]);
    let limit_p: f64 = cfg.get_or("limit_p", 0.5)?;
    let limit_reps: usize = cfg.get_or("limit_replications", 20)?;
    let kbars: Vec<f64> = cfg.get_list("kbars")?.unwrap_or(vec![1.0, 2.0, 5.0, 10.0]);

    let mut m = RunManifest::new("experiments");
    m.input(&a.config)?;
    m.seed = Some(ec.seed);
    for (k, v) in cfg.iter() {
        m.set(k, v);
    }
    let has = |s: &str| studies.iter().any(|x| x == s);
    if has("table") {
        m.output("spearman_table.csv");
    }
    if has("ratios") {
        for r in Ratio::ALL {
            m.output(format!("ratio_{}.csv", ratio_slug(r)));
        }
    }
    if has("limit") {
        m.output("limit_trend.csv");
    }
    if has("derivative") {
        m.output("ratio_derivative.csv");
    }
    m.write(out)?;

    if has("table") {
        spearman_table(&ec, EXEC)?.write_csv(out.join("spearman_table.csv"))?;
    }
    if has("ratios") {
        for r in Ratio::ALL {
            let cells = ratio_study(&ec, r, EXEC)?;
            write_ratio_csv(&cells, r, out.join(format!("ratio_{}.csv", ratio_slug(r))))?;
        }
    }
    if has("limit") {
        er_ratio_limit_check(&limit_ns, limit_p, &ec.zetas, limit_reps, ec.seed, EXEC)?
            .write_csv(out.join("limit_trend.csv"))?;
    }
    if has("derivative") {
        let grid = uniform_grid(0.0, 1.0, 101);
        let curves = kbars
            .iter()
            .map(|&k| ratio_derivative_curve(k, &grid))
            .collect::<Result<Vec<_>, _>>()?;
        let mut text = String::from("zeta");
        for k in &kbars {
            text.push_str(&format!(",kbar_{k}"));
        }
        text.push('\n');
        for (idx, z) in grid.iter().enumerate() {
            text.push_str(&z.to_string());
            for c in &curves {
                text.push_str(&format!(",{}", c[idx]));
            }
            text.push('\n');
        }
        write(out.join("ratio_derivative.csv"), &text)?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct MarketArgs {
    /// Returns CSV: header `date,<asset>...`, ISO dates, empty cells missing.
    pub returns: PathBuf,
    /// `key = value` file: width_months, step_months, min_obs, weighting,
    /// measure, zeta_grid.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn market(a: &MarketArgs, out: &Path) -> Result<(), Failure> {
    let cfg = load_config(
        a.config.as_ref(),
        &["width_months", "step_months", "min_obs", "weighting", "measure", "zeta_grid"],
    )?;
    let d = WindowSpec::default();
    let spec = WindowSpec {
        width_months: cfg.get_or("width_months", d.width_months)?,
        step_months: cfg.get_or("step_months", d.step_months)?,
        min_obs: cfg.get_or("min_obs", d.min_obs)?,
    };
    let opts = MarketOptions {
        zeta_grid: grid_or_default(cfg.get_str("zeta_grid"))?,
        weighting: cfg.get_or("weighting", Weighting::Distance)?,
        measure: cfg.get_or("measure", Measure::R)?,
        execution: EXEC,
    };
    let panel = ReturnsPanel::load(&a.returns)?;
    let windows = rolling_windows(&panel, spec)?;

    let mut m = RunManifest::new("market");
    m.input(&a.returns)?;
    if let Some(c) = &a.config {
        m.input(c)?;
    }
    m.set("width_months", spec.width_months)
        .set("step_months", spec.step_months)
        .set("min_obs", spec.min_obs)
        .set("weighting", format!("{:?}", opts.weighting))
        .set("measure", opts.measure)
        .set("zeta_grid", cfg.get_str("zeta_grid").unwrap_or("0.01:1:100"));
    m.output("windows.csv");
    for w in &windows {
        for f in ["ranks.csv", "rankstd.csv", "mst.json"] {
            m.output(format!("{}/{f}", w.id));
        }
    }
    m.write(out)?;
    market_pipeline(&panel, &windows, &opts, Some(out))?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct CorporateArgs {
    /// `company,director` rows.
    pub memberships: PathBuf,
    /// `company,year,value` rows.
    pub svc: PathBuf,
    /// `key = value` file: zeta_hi, zeta_lo, binary, threshold, zeta_grid.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn corporate(a: &CorporateArgs, out: &Path) -> Result<(), Failure> {
    let cfg = load_config(a.config.as_ref(), &["zeta_hi", "zeta_lo", "binary", "threshold", "zeta_grid"])?;
    let d = CorporateOptions::default();
    let opts = CorporateOptions {
        zeta_grid: grid_or_default(cfg.get_str("zeta_grid"))?,
        zeta_hi: cfg.get_or("zeta_hi", d.zeta_hi)?,
        zeta_lo: cfg.get_or("zeta_lo", d.zeta_lo)?,
        binary: cfg.get_or("binary", d.binary)?,
        threshold: cfg.get_or("threshold", d.threshold)?,
        execution: EXEC,
    };
    let memberships = load_memberships(&a.memberships)?;
    let svc = load_svc(&a.svc)?;

    let mut m = RunManifest::new("corporate");
    m.input(&a.memberships)?.input(&a.svc)?;
    if let Some(c) = &a.config {
        m.input(c)?;
    }
    m.set("zeta_hi", opts.zeta_hi)
        .set("zeta_lo", opts.zeta_lo)
        .set("binary", opts.binary)
        .set("threshold", opts.threshold)
        .set("zeta_grid", cfg.get_str("zeta_grid").unwrap_or("0.01:1:100"))
        .output("lda.json")
        .output("companies.csv");
    m.write(out)?;
    corporate_pipeline(&memberships, &svc, &opts)?.write(out)?;
    Ok(())
}

fn write(path: PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(&path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}
