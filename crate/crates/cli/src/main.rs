use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use pushguide::config::{bundled, BUNDLED_NAMES};
use pushguide::mot_rates::{outgoing_flux, steady_state_number, transfer_efficiency, MotRateParams};
use pushguide::output::{self, McSummary, RatesView};
use pushguide::{figures, run_ensemble, ConfigDocument, RateInputs, RunConfig, Transport};

#[derive(Parser, Debug, Clone)]
#[command(name = "pushguide", version, about = "Pushing-guiding beam transfer between two MOTs")]
struct Cli {
    /// Config file, or a bundled name (cs_paper, rb_paper)
    #[arg(long, global = true)]
    config: Option<String>,
    /// Override one key, e.g. --set beam.power_mW=10 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Directory for output files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Efficiency report and z-profile of one configuration
    Simulate,
    /// Grid sweep over the sweep.axisN keys
    Sweep,
    /// Bounded optimization over the optimize.paramN keys
    Optimize,
    /// Monte Carlo trajectory ensemble
    Mc,
    /// MOT rate-equation bookkeeping from the rates.* keys
    Rates,
    /// Write the figure datasets from the bundled configs
    Figures,
}

#[derive(Debug)]
enum CliError {
    Model(pushguide::Error),
    Io(String),
}

impl From<pushguide::Error> for CliError {
    fn from(e: pushguide::Error) -> Self {
        CliError::Model(e)
    }
}

impl CliError {
    fn report(&self) -> (String, i32) {
        let (kind, message, code) = match self {
            CliError::Model(e) => (e.kind(), e.to_string(), e.exit_code()),
            CliError::Io(m) => ("io", m.clone(), 1),
        };
        (json!({ "error": kind, "message": message, "exit_code": code }).to_string(), code)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Model(pushguide::Error::config(0, e.to_string().trim().to_string()));
            return fail(&err);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let (line, code) = e.report();
    eprintln!("{line}");
    ExitCode::from(code as u8)
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(pushguide::Error::config(0, "--threads must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate => simulate(cli),
        Command::Sweep => sweep(cli),
        Command::Optimize => optimize(cli),
        Command::Mc => mc(cli),
        Command::Rates => rates(cli),
        Command::Figures => write_figures(cli),
    }
}

fn document(cli: &Cli) -> CliResult<ConfigDocument> {
    let text = match &cli.config {
        None => String::new(),
        Some(c) => match (Path::new(c).exists(), bundled(c)) {
            (false, Some(text)) => text.to_string(),
            _ => fs::read_to_string(c).map_err(|e| {
                CliError::Io(format!("cannot read config '{c}': {e} (bundled: {})", BUNDLED_NAMES.join(", ")))
            })?,
        },
    };
    let mut doc = ConfigDocument::parse(&text)?;
    for s in &cli.set {
        doc.set_assignment(s)?;
    }
    Ok(doc)
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    Ok(RunConfig::from_document(&document(cli)?)?)
}

fn write(cli: &Cli, name: &str, contents: &str) -> CliResult<Option<PathBuf>> {
    let Some(dir) = &cli.out else { return Ok(None) };
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create '{}': {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write '{}': {e}", path.display())))?;
    Ok(Some(path))
}

fn transport(cfg: &RunConfig) -> pushguide::Result<Transport> {
    let sc = &cfg.scenario;
    Transport::new(&sc.species, &sc.beam, &sc.geometry, &sc.options)
}

fn simulate(cli: &Cli) -> CliResult<()> {
    let cfg = load(cli)?;
    let t = transport(&cfg)?;
    let report = t.report()?;
    let entries = cfg.effective_entries();
    let json = output::report_json(&entries, &report);
    write(cli, "report.json", &json)?;
    write(cli, "profile.csv", &output::profile_csv(&entries, &t.profile()?))?;
    if cli.json {
        print!("{json}");
    } else {
        print!("{}", output::report_text(&report));
    }
    Ok(())
}

fn sweep(cli: &Cli) -> CliResult<()> {
    let cfg = load(cli)?;
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| pushguide::Error::config(0, "sweep needs at least sweep.axis1"))?;
    let table = pushguide::run_sweep(spec, &cfg.scenario)?;
    let entries = cfg.effective_entries();
    let csv = output::sweep_csv(&entries, &table);
    let written = write(cli, "sweep.csv", &csv)?;
    let best = table.best();
    if cli.json {
        let payload = json!({
            "objective": table.objective.name(),
            "keys": table.keys,
            "rows": table.rows.len(),
            "failed": table.rows.iter().filter(|r| r.error.is_some()).count(),
            "best": best.map(|r| json!({ "coords": r.coords, "objective": r.objective })),
        });
        print!("{}", output::envelope(&entries, "sweep", &payload));
    } else if written.is_none() {
        print!("{csv}");
    } else if let Some(r) = best {
        let coords: Vec<String> = table.keys.iter().zip(&r.coords).map(|(k, v)| format!("{k} = {v}")).collect();
        println!("best {} = {:.6} at {}", table.objective.name(), r.objective.unwrap_or(f64::NAN), coords.join(", "));
    } else {
        println!("no sweep point could be evaluated");
    }
    Ok(())
}

fn optimize(cli: &Cli) -> CliResult<()> {
    let cfg = load(cli)?;
    let spec = cfg
        .optimize
        .as_ref()
        .ok_or_else(|| pushguide::Error::config(0, "optimize needs at least optimize.param1"))?;
    let result = pushguide::optimize(spec, &cfg.scenario)?;
    let json = output::optimize_json(&cfg.effective_entries(), &result);
    write(cli, "optimize.json", &json)?;
    if cli.json {
        print!("{json}");
    } else {
        let coords: Vec<String> = result.keys.iter().zip(&result.best).map(|(k, v)| format!("{k} = {v}")).collect();
        println!(
            "best {} = {:.6} at {} ({} simplex iterations, {})",
            result.objective.name(),
            result.best_objective,
            coords.join(", "),
            result.iterations,
            if result.converged { "converged" } else { "not converged" }
        );
        print!("{}", output::report_text(&result.report));
    }
    Ok(())
}

fn mc(cli: &Cli) -> CliResult<()> {
    let cfg = load(cli)?;
    let t = transport(&cfg)?;
    let sc = &cfg.scenario;
    let mc_config = cfg.mc.to_config(sc);
    let stats = run_ensemble(&mc_config, &sc.beam, &sc.species, t.pumping(), &sc.geometry, t.entrance_velocity())?;
    let entries = cfg.effective_entries();
    let csv = output::mc_csv(&entries, &stats);
    let written = write(cli, "mc.csv", &csv)?;
    let summary = McSummary::from(&stats);
    let v_model = t.velocity(sc.geometry.trap_separation);
    if cli.json {
        let payload = json!({ "ensemble": summary, "model_v_arrival": v_model });
        print!("{}", output::envelope(&entries, "mc", &payload));
    } else if written.is_none() {
        print!("{csv}");
    } else {
        println!(
            "{} of {} atoms arrived; mean v_z(D) = {:.4} ± {:.4} m/s (model {:.4}); captured fraction {:.4}",
            summary.arrived, summary.n_atoms, summary.mean_v_arrival, summary.stderr_v_arrival, v_model, summary.capture_fraction
        );
    }
    Ok(())
}

fn rates(cli: &Cli) -> CliResult<()> {
    let doc = document(cli)?;
    let r = RateInputs::from_document(&doc)?;
    let n1_steady = match (r.loading_rate, r.background_loss) {
        (Some(l), Some(g)) => Some(steady_state_number(&MotRateParams {
            loading_rate: l,
            background_loss: g,
            push_loss: r.push_loss.unwrap_or(0.0),
            two_body_rate: r.two_body_rate.unwrap_or(0.0),
            density: r.density.unwrap_or(0.0),
        })?),
        _ => None,
    };
    let outgoing = match (r.loading_rate, r.background_loss, r.pushed_number) {
        (Some(l), Some(g), Some(n)) => Some(outgoing_flux(l, g, n)?),
        _ => None,
    };
    let transfer = match (r.mot2_loading, outgoing) {
        (Some(l2), Some(out)) => Some(transfer_efficiency(l2, out.flux)?),
        _ => None,
    };
    if n1_steady.is_none() && outgoing.is_none() {
        return Err(pushguide::Error::config(
            0,
            "rates needs rates.L1_per_s and rates.tau_s (or rates.gamma_per_s); add rates.N1_push and rates.L2_per_s for the transfer efficiency",
        )
        .into());
    }
    let view = RatesView { n1_steady, outgoing, transfer };
    let entries: Vec<(String, String)> = doc.entries.iter().map(|e| (e.key.clone(), e.value.clone())).collect();
    let json = output::envelope(&entries, "rates", &view);
    write(cli, "rates.json", &json)?;
    if cli.json {
        print!("{json}");
    } else {
        if let Some(n) = n1_steady {
            println!("steady-state N1      {n:.4e}");
        }
        if let Some(o) = outgoing {
            println!("outgoing flux        {:.4e} atoms/s{}", o.flux, if o.clamped { " (clamped)" } else { "" });
        }
        if let Some(t) = transfer {
            println!("transfer efficiency  {:.4}{}", t.efficiency, if t.inconsistent { " (exceeds 1)" } else { "" });
        }
    }
    Ok(())
}

fn write_figures(cli: &Cli) -> CliResult<()> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let cli = Cli { out: Some(dir), ..cli.clone() };
    let mut paths = Vec::new();
    for fig in figures::all_figures()? {
        let path = write(&cli, fig.file_name, &output::figure_csv(&fig))?.expect("out dir set");
        paths.push(path.display().to_string());
    }
    if cli.json {
        println!("{}", json!({ "written": paths }));
    } else {
        for p in paths {
            println!("wrote {p}");
        }
    }
    Ok(())
}
