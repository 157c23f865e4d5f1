use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use parahyp::classifier::{classify_model_with, classify_submanifold_with, TypeVerdict};
use parahyp::dirichlet::{drifted_capacity_with, log_grid, potential_bvp, AnnulusSpec, ClosedFormPotential};
use parahyp::geometry::ModelSpace;
use parahyp::network::{build_network, convergence_study};
use parahyp::profiles::catalog::{self, CatalogEntry};
use parahyp::profiles::RadialProfile;
use parahyp::stochastic::{simulate_hitting_with_log, write_exit_log, DiffusionSpec, SimConfig, DEFAULT_MAX_STEPS};
use serde::Serialize;

use crate::config::{
    load, relative_to, ClassifyConfig, ClassifyTarget, NetworkConfig, PotentialConfig, PotentialMethod,
    SimulateConfig,
};
use crate::{Cli, Command, Status};

pub fn run(cli: &Cli) -> Result<Status> {
    if !(cli.tolerance > 0.0 && cli.tolerance < 1.0) {
        bail!("--tolerance must lie in (0, 1), got {}", cli.tolerance);
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Classify => classify(cli),
        Command::Capacity => capacity(cli),
        Command::Potential => potential(cli),
        Command::Simulate => simulate(cli),
        Command::Network => network(cli),
        Command::Catalog { name } => show_catalog(cli, name.as_deref()),
    }
}

fn config_path(cli: &Cli) -> Result<&Path> {
    cli.config.as_deref().context("this command needs --config PATH")
}

fn sink(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    let mut out = sink(cli)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn verdict_status(v: &TypeVerdict) -> Status {
    if v.is_definite() {
        Status::Definite
    } else {
        Status::Inconclusive
    }
}

fn classify(cli: &Cli) -> Result<Status> {
    let path = config_path(cli)?;
    let verdict = match load::<ClassifyConfig>(path)?.target()? {
        ClassifyTarget::Catalog(name) => classify_submanifold_with(&catalog::lookup(&name)?.problem, cli.tolerance)?,
        ClassifyTarget::Problem(p) => classify_submanifold_with(&p, cli.tolerance)?,
        ClassifyTarget::Model(m) => {
            let n = m.n_exponent.unwrap_or(m.dimension);
            let model = ModelSpace::new(m.dimension, m.warping)?;
            classify_model_with(&model, n, m.rho, cli.tolerance)?
        }
    };
    emit_json(cli, &verdict)?;
    eprintln!("{:?} via {}", verdict.outcome, verdict.certificate.rule.map_or("no rule", |r| r.name()));
    Ok(verdict_status(&verdict))
}

fn capacity(cli: &Cli) -> Result<Status> {
    let spec: AnnulusSpec = load(config_path(cli)?)?;
    let cap = drifted_capacity_with(&spec, cli.tolerance)?;
    emit_json(cli, &cap)?;
    eprintln!("capacity {} ± {:e}", cap.value, cap.abs_error);
    Ok(Status::Definite)
}

fn potential(cli: &Cli) -> Result<Status> {
    let c: PotentialConfig = load(config_path(cli)?)?;
    let spec = AnnulusSpec::new(c.problem, c.outer_radius)?;
    let solution = match c.method {
        PotentialMethod::ClosedForm => {
            let grid = log_grid(spec.inner_radius(), spec.outer_radius, c.nodes.max(2));
            ClosedFormPotential::new(&spec, cli.tolerance)?.solve_on(&grid)?
        }
        PotentialMethod::FiniteDifference => potential_bvp(&spec, c.nodes)?,
    };
    let mut out = sink(cli)?;
    solution.write_csv(&mut out)?;
    out.flush()?;
    eprintln!("{} nodes on [{}, {}]", solution.grid.len(), spec.inner_radius(), spec.outer_radius);
    Ok(Status::Definite)
}

#[derive(Serialize)]
struct SimulationReport {
    estimate: parahyp::stochastic::HittingEstimate,
    /// `ψ(r₀)` from the weight integral, for comparison.
    closed_form: f64,
    seed: u64,
}

fn simulate(cli: &Cli) -> Result<Status> {
    let path = config_path(cli)?;
    let c: SimulateConfig = load(path)?;
    let seed = cli.seed.unwrap_or(c.seed);
    let sim = SimConfig {
        seed,
        n_paths: c.n_paths,
        dt_max: c.dt_max,
        start: c.start,
        inner: c.problem.rho,
        outer: c.outer_radius,
        max_steps: c.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
    };
    let spec = AnnulusSpec::new(c.problem.clone(), c.outer_radius)?;
    let closed_form = ClosedFormPotential::new(&spec, cli.tolerance)?.eval(c.start)?;
    let (estimate, exits) = simulate_hitting_with_log(&DiffusionSpec::new(c.problem), &sim)?;
    if let Some(log) = &c.exit_log {
        let target = relative_to(path, log);
        let file = File::create(&target).with_context(|| format!("creating {}", target.display()))?;
        write_exit_log(BufWriter::new(file), &exits)?;
    }
    emit_json(
        cli,
        &SimulationReport {
            estimate,
            closed_form,
            seed,
        },
    )?;
    eprintln!(
        "p_hat {} ± {} against {closed_form} ({} step-limited paths)",
        estimate.p_hat, estimate.std_err, estimate.step_limit_hits
    );
    Ok(Status::Definite)
}

fn network(cli: &Cli) -> Result<Status> {
    let path = config_path(cli)?;
    let c: NetworkConfig = load(path)?;
    if c.schedule.is_empty() {
        bail!("network schedule is empty");
    }
    let study = convergence_study(c.dimension, &c.warping, c.inner_radius, c.outer_radius, &c.schedule, cli.tolerance)?;
    if let Some(edges) = &c.edge_list {
        let finest = c.schedule.last().expect("schedule checked non-empty");
        let net = build_network(c.dimension, &c.warping, c.inner_radius, c.outer_radius, finest.radial, finest.angular)?;
        let target = relative_to(path, edges);
        let file = File::create(&target).with_context(|| format!("creating {}", target.display()))?;
        let mut w = BufWriter::new(file);
        net.write_edge_list(&mut w)?;
        w.flush()?;
    }
    emit_json(cli, &study)?;
    let last = study.rows.last().expect("one row per schedule entry");
    eprintln!(
        "conductance {} against capacity {} (gap {:.3e})",
        last.conductance, study.reference.value, last.relative_gap
    );
    Ok(Status::Definite)
}

const PROFILE_RADII: [f64; 10] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

fn sample_profile(p: &RadialProfile) -> Result<Vec<[f64; 2]>> {
    PROFILE_RADII
        .iter()
        .filter(|&&r| r >= p.domain_start())
        .map(|&r| Ok([r, p.value(r)?]))
        .collect()
}

#[derive(Serialize)]
struct CatalogReport<'a> {
    name: &'a str,
    description: &'a str,
    dimension: usize,
    h: Vec<[f64; 2]>,
    g: Option<Vec<[f64; 2]>>,
    verdict: TypeVerdict,
}

fn write_profile_csv(cli: &Cli, entry: &CatalogEntry) -> Result<()> {
    let Some(path) = &cli.out else { return Ok(()) };
    let p = &entry.problem;
    let start = p.h.domain_start().max(p.g.as_ref().map_or(0.0, RadialProfile::domain_start)).max(1e-3);
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["r", "h", "g"])?;
    for i in 0..=90 {
        let r = start * 10f64.powf(i as f64 / 10.0);
        let g = match &p.g {
            Some(g) => g.value(r)?.to_string(),
            None => String::new(),
        };
        w.write_record([r.to_string(), p.h.value(r)?.to_string(), g])?;
    }
    w.flush()?;
    Ok(())
}

fn show_catalog(cli: &Cli, name: Option<&str>) -> Result<Status> {
    let Some(name) = name else {
        for n in catalog::NAMES {
            println!("{n}");
        }
        println!("note: {}", catalog::SCHWARZ_P_NOTE);
        return Ok(Status::Definite);
    };
    let entry = catalog::lookup(name)?;
    let verdict = classify_submanifold_with(&entry.problem, cli.tolerance)?;
    let report = CatalogReport {
        name: &entry.name,
        description: &entry.description,
        dimension: entry.problem.m,
        h: sample_profile(&entry.problem.h)?,
        g: entry.problem.g.as_ref().map(sample_profile).transpose()?,
        verdict,
    };
    let mut out = BufWriter::new(io::stdout().lock());
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    write_profile_csv(cli, &entry)?;
    Ok(verdict_status(&report.verdict))
}
