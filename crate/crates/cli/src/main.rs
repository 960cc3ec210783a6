mod args;

use std::error::Error;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{
    Cli, Command, CompareArgs, ExactArgs, ExperimentArgs, GameArgs, GenArgs, MassArgs, NetArgs,
    RunArgs,
};
use polya_core::engine::UrnState;
use polya_core::graph::{
    barabasi_albert, inner_target_set, load_network, target_set_dense, target_set_layered,
    write_adjacency_matrix, write_edge_list, GraphFormat, LoadOptions, Network,
};
use polya_core::harness::{
    compare_strategies, emit, run_experiment, write_csv, write_json, Comparison, ExperimentConfig,
    OutputFormat, SummarySeries,
};
use polya_core::optimize::{nash_solve, GameConfig};
use polya_core::oracle::{expected_exposure, Enumerator, ExposureOptions, Schedule};
use polya_core::policy::Side;

type Result<T> = std::result::Result<T, Box<dyn Error>>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a),
        Command::Inspect(a) => inspect(cli, a),
        Command::Exact(a) => exact(cli, a),
        Command::InitRun(a) => experiment(cli, a, Side::Init),
        Command::CureRun(a) => experiment(cli, a, Side::Cure),
        Command::Game(a) => game(cli, a),
        Command::Compare(a) => compare(cli, a),
    }
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn write_json_value(cli: &Cli, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_out(cli.out.as_deref(), text.as_bytes())
}

fn open_network(a: &NetArgs) -> Result<Network> {
    let opts = LoadOptions {
        format: None,
        largest_component: a.largest_component,
        allow_disconnected: a.allow_disconnected,
    };
    load_network(&a.net, &opts).map_err(|e| format!("{}: {e}", a.net.display()).into())
}

fn masses(a: &MassArgs, n: usize) -> (Vec<f64>, Vec<f64>) {
    let red = a.red.clone().unwrap_or_else(|| vec![a.red_each; n]);
    let black = a.black.clone().unwrap_or_else(|| vec![a.black_each; n]);
    (red, black)
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<()> {
    let net = barabasi_albert(a.nodes, a.m, cli.seed.unwrap_or(0))?;
    let format = a
        .graph_format
        .or_else(|| cli.out.as_deref().and_then(GraphFormat::from_extension))
        .unwrap_or(GraphFormat::EdgeList);
    let text = match format {
        GraphFormat::AdjacencyMatrix => write_adjacency_matrix(&net),
        GraphFormat::EdgeList => write_edge_list(&net),
    };
    log::info!("{} nodes, {} edges", net.node_count(), net.edge_count());
    write_out(cli.out.as_deref(), text.as_bytes())
}

fn one_based(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().map(|v| v + 1).collect()
}

fn inspect(cli: &Cli, a: &NetArgs) -> Result<()> {
    let net = open_network(a)?;
    let inner = inner_target_set(&net);
    let degree: Vec<usize> = (0..net.node_count()).map(|i| net.degree(i)).collect();
    let value = json!({
        "nodes": net.node_count(),
        "edges": net.edge_count(),
        "outer": one_based(&net.outer_nodes()),
        "inner": inner.one_based(),
        "degree": degree,
        "distance_sums": net.distance_sums()?,
        "closeness": net.closeness_centrality()?,
        "layered_targets": target_set_layered(&net).one_based(),
        "dense_targets": target_set_dense(&net, false)?.one_based(),
        "dense_pruned_targets": target_set_dense(&net, true)?.one_based(),
    });
    write_json_value(cli, &value)
}

fn exact(cli: &Cli, a: &ExactArgs) -> Result<()> {
    let net = open_network(&a.net)?;
    let n = net.node_count();
    let (red, black) = masses(&a.mass, n);
    let schedule = Schedule::constant(n, a.delta_red, a.delta_black);
    let marginals =
        Enumerator::with_cap(a.cap).marginal_infection(&net, &red, &black, &schedule, a.n)?;
    let rate = marginals.iter().sum::<f64>() / n as f64;
    let mut value = json!({
        "n": a.n,
        "infection_rate": rate,
        "marginals": marginals,
    });
    if let (Some(x), Some(y)) = (&a.cure, &a.infect) {
        let state = UrnState::new(&net, &red, &black)?;
        let e = expected_exposure(&state, x, y, &ExposureOptions::default())?;
        value["expected_exposure"] = json!({
            "value": e.value,
            "grad_curing": e.grad_curing,
            "grad_infection": e.grad_infection,
        });
    }
    write_json_value(cli, &value)
}

/// Loads the config file if any, then applies global and command flags.
fn build_config(cli: &Cli, a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            ExperimentConfig::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(net) = &a.net {
        cfg.network = Some(net.clone());
    }
    if a.ba_nodes.is_some() {
        cfg.network = None;
        cfg.ba_nodes = a.ba_nodes;
        cfg.ba_m = a.ba_m;
    }
    cfg.largest_component |= a.largest_component;
    cfg.parallel &= !a.sequential;
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.init_budget, a.init_budget);
    set(&mut cfg.red_budget, a.red_budget);
    set(&mut cfg.cure_budget, a.cure_budget);
    set(&mut cfg.infection_budget, a.infection_budget);
    set(&mut cfg.delta_red, a.delta_red);
    set(&mut cfg.delta_black, a.delta_black);
    if let Some(s) = a.ba_seed {
        cfg.ba_seed = s;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(s) = cli.steps {
        cfg.steps = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn load_config_network(cfg: &ExperimentConfig) -> Result<Network> {
    cfg.load_network().map_err(|e| match &cfg.network {
        Some(path) => format!("{}: {e}", path.display()).into(),
        None => e.into(),
    })
}

fn write_series(cfg: &ExperimentConfig, series: &[SummarySeries]) -> Result<()> {
    match &cfg.out {
        Some(path) => emit(series, cfg.format, path)?,
        None => {
            let mut out = io::stdout().lock();
            match cfg.format {
                OutputFormat::Csv => write_csv(series, &mut out)?,
                OutputFormat::Json => write_json(series, &mut out)?,
            }
        }
    }
    Ok(())
}

fn experiment(cli: &Cli, a: &RunArgs, side: Side) -> Result<()> {
    let mut cfg = build_config(cli, &a.exp)?;
    if let Some(spec) = a.strategy {
        if spec.side != side {
            return Err(format!("--strategy {spec} is not a {side} strategy").into());
        }
        match side {
            Side::Init => cfg.init_strategy = spec,
            Side::Cure => cfg.cure_strategy = Some(spec),
        }
    }
    if side == Side::Cure && cfg.cure_strategy.is_none() {
        return Err(
            "cure-run needs a curing strategy (--strategy cure:<tag> or cure_strategy)".into(),
        );
    }
    cfg.validate()?;
    let net = load_config_network(&cfg)?;
    let series = run_experiment(&cfg, &net)?;
    if let (Some(m), Some(s)) = (series.mean.last(), series.stderr.last()) {
        log::info!("{}: final infection rate {m:.6} ± {s:.6}", series.strategy);
    }
    write_series(&cfg, std::slice::from_ref(&series))
}

fn write_differences(path: &Path, c: &Comparison) -> Result<()> {
    let mut text = String::from("time,a,b,difference,stderr,stderr_paired,z\n");
    for d in &c.differences {
        let z = d.z();
        for t in 0..d.mean.len() {
            text.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t + 1,
                d.a,
                d.b,
                d.mean[t],
                d.stderr[t],
                d.stderr_paired[t],
                z[t]
            ));
        }
    }
    fs::write(path, text)?;
    Ok(())
}

fn compare(cli: &Cli, a: &CompareArgs) -> Result<()> {
    let mut cfg = build_config(cli, &a.exp)?;
    cfg.independent_arms |= a.independent;
    let arms = if a.arms.is_empty() {
        cfg.resolved_arms()
    } else {
        a.arms
            .iter()
            .map(|spec| {
                let mut arm = cfg.base_arm();
                arm.name = spec.to_string();
                match spec.side {
                    Side::Init => arm.init_strategy = *spec,
                    Side::Cure => arm.cure_strategy = Some(*spec),
                }
                arm
            })
            .collect()
    };
    if arms.len() < 2 {
        log::warn!("comparing a single arm");
    }
    cfg.validate()?;
    let net = load_config_network(&cfg)?;
    let c = compare_strategies(&cfg, &net, &arms)?;
    for d in &c.differences {
        if let (Some(m), Some(z)) = (d.mean.last(), d.z().last()) {
            log::info!("{} - {} at n={}: {m:.6} (z = {z:.2})", d.a, d.b, cfg.steps);
        }
    }
    if let Some(path) = &a.diff_out {
        write_differences(path, &c)?;
    }
    write_series(&cfg, &c.series)
}

fn game(cli: &Cli, a: &GameArgs) -> Result<()> {
    let net = open_network(&a.net)?;
    let (red, black) = masses(&a.mass, net.node_count());
    let state = UrnState::new(&net, &red, &black)?;
    let cfg = GameConfig {
        rounds: a.rounds,
        tolerance: a.tolerance,
        ..Default::default()
    };
    let s = nash_solve(&state, a.cure_budget, a.infect_budget, &cfg)?;
    if !s.converged {
        log::warn!(
            "no equilibrium within {} rounds; best exploitability {:.3e}",
            a.rounds,
            s.exploitability
        );
    }
    write_json_value(cli, &serde_json::to_value(&s)?)
}
