use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bullwhip::chart::{frontier_chart, inventory_chart, write_svg};
use bullwhip::config::load_run_config;
use bullwhip::export::{export_reports, Outputs};
use bullwhip::harness::{policy_label, DEFAULT_REPLICATIONS};
use bullwhip::{
    hoarding_demo, run_simulation, scenario_suite, strategic_choice_config,
    strategic_choice_experiment, DisruptionKind, Error, PolicyKind, RunConfig, RunOutcome,
};

const SEED_VAR: &str = "BULLWHIP_SEED";

#[derive(Parser)]
#[command(
    name = "bullwhip",
    version,
    about = "Three-echelon supply-chain simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single simulation run; writes trace.csv, kpi.csv and inventory.svg.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        policy: Option<String>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Every disruption scenario against the benchmark policies; writes suite.csv.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Also run the two vendor-managed variants.
        #[arg(long)]
        include_vmi: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Rates and simulates each retrieved mitigation strategy under a transport
    /// disruption; writes frontier.csv, evaluations.csv, kpi.csv and charts.
    StrategicChoice {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Single run of the hoarding variant; writes trace.csv, kpi.csv and inventory.svg.
    HoardingDemo {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn load(path: Option<&Path>, seed: Option<u64>) -> Result<RunConfig, Failure> {
    let mut config = match path {
        Some(p) => load_run_config(p).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if let Ok(raw) = std::env::var(SEED_VAR) {
        config.seed = raw.trim().parse().map_err(|_| {
            Failure::Config(Error::config(format!("{SEED_VAR}={raw:?} is not a u64")))
        })?;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn config_err(e: Error) -> Failure {
    Failure::Config(e)
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn write_run(
    outcome: &RunOutcome,
    config: &RunConfig,
    title: &str,
    out: &Path,
) -> Result<(), Failure> {
    let files = export_reports(
        &Outputs {
            trace: Some(&outcome.trace),
            kpi: Some(std::slice::from_ref(&outcome.report)),
            ..Outputs::default()
        },
        out,
    )?;
    report_files(&files);
    let window = (config.scenario.kind != DisruptionKind::None).then(|| config.scenario.window());
    let svg_path = out.join("inventory.svg");
    write_svg(&svg_path, &inventory_chart(&outcome.trace, window, title)?)?;
    report_files(&[svg_path]);
    let k = &outcome.report;
    println!(
        "total_cost={:.2} holding={:.2} backorder={:.2} premium={:.2} service={:.2}%",
        k.total_cost, k.holding_cost, k.backorder_cost, k.premium_cost, k.service_level
    );
    Ok(())
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            config,
            seed,
            policy,
            scenario,
            out,
        } => {
            let mut c = load(config.as_deref(), seed)?;
            if let Some(p) = policy {
                c = c.with_policy(p.parse::<PolicyKind>().map_err(config_err)?);
            }
            if let Some(s) = scenario {
                let kind: DisruptionKind = s.parse().map_err(config_err)?;
                c.scenario = bullwhip::DisruptionScenario::new(kind);
            }
            c.validate().map_err(config_err)?;
            let outcome = run_simulation(&c)?;
            let title = format!("{} / {}", policy_label(c.policy), c.scenario.kind.name());
            write_run(&outcome, &c, &title, &out)
        }
        Command::Suite {
            config,
            reps,
            seed,
            include_vmi,
            out,
        } => {
            let c = load(config.as_deref(), seed)?;
            let policies: &[PolicyKind] = if include_vmi {
                &PolicyKind::ALL
            } else {
                &[PolicyKind::StaticBaseline, PolicyKind::SelfishRag]
            };
            let suite = scenario_suite(&c, policies, &DisruptionKind::DISRUPTIVE, reps)?;
            println!(
                "{:<22} {:<30} {:>12} {:>10} {:>9} {:>8}",
                "scenario", "policy", "mean_cost", "std_cost", "service", "std"
            );
            for cell in &suite.cells {
                let s = &cell.stats;
                println!(
                    "{:<22} {:<30} {:>12.1} {:>10.1} {:>8.2}% {:>8.2}",
                    cell.scenario.name(),
                    policy_label(cell.policy),
                    s.mean_cost,
                    s.std_cost,
                    s.mean_service,
                    s.std_service
                );
            }
            let files = export_reports(
                &Outputs {
                    suite: Some(&suite),
                    ..Outputs::default()
                },
                &out,
            )?;
            report_files(&files);
            Ok(())
        }
        Command::StrategicChoice { config, seed, out } => {
            let c = strategic_choice_config(&load(config.as_deref(), seed)?);
            let choice = strategic_choice_experiment(&c)?;
            let kpis: Vec<_> = choice.runs.iter().map(|r| r.report.clone()).collect();
            let files = export_reports(
                &Outputs {
                    kpi: Some(&kpis),
                    frontier: Some(&choice.frontier),
                    evaluations: Some(&choice.evaluations),
                    ..Outputs::default()
                },
                &out,
            )?;
            report_files(&files);
            let mut svgs = vec![(
                out.join("frontier.svg"),
                frontier_chart(&choice.frontier, "Strategy frontier")?,
            )];
            for (doc, run) in choice.portfolio.iter().zip(&choice.runs) {
                svgs.push((
                    out.join(format!("inventory_{}.svg", slug(&doc.name))),
                    inventory_chart(&run.trace, Some(c.scenario.window()), &doc.name)?,
                ));
            }
            for (path, svg) in &svgs {
                write_svg(path, svg)?;
                println!("wrote {}", path.display());
            }
            for p in &choice.frontier {
                println!(
                    "{:<18} cost={:<10.1} service={:>6.2}% rating=({}, {}){}",
                    p.strategy_name,
                    p.total_cost,
                    p.service_level,
                    p.cost_rating.label(),
                    p.speed_rating.label(),
                    if p.dominated { " dominated" } else { "" }
                );
            }
            Ok(())
        }
        Command::HoardingDemo { config, seed, out } => {
            let c = load(config.as_deref(), seed)?.with_policy(PolicyKind::HoardingVmi);
            c.validate().map_err(config_err)?;
            let outcome = hoarding_demo(&c)?;
            write_run(&outcome, &c, &policy_label(c.policy), &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}
