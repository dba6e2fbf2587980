use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use friedrichs_harness::config::DtPolicyArg;
use friedrichs_harness::{exit, report_pole, run_correlation, run_emission, run_selftests, run_survival};
use friedrichs_harness::{HarnessError, RunConfig, ScenarioReport};

#[derive(Parser, Debug)]
#[command(name = "friedrichs", version, about = "Friedrichs-model decay scenarios and self-tests")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Resonance pole, residue and the independent cross-check
    Pole(Common),
    /// Survival amplitude of the discrete level, total vs restricted
    Survival(Common),
    /// Emitted field at fixed time, total vs restricted
    Emission(Common),
    /// Field correlation at fixed time and x2, total vs free + restricted
    Correlation(Common),
    /// Hardy projection and T± invariant suites
    Selftest(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Paper,
}

#[derive(Args, Debug)]
struct Common {
    /// Built-in parameter set (used when no config file is given)
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// TOML run configuration
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Convergence target of the automatic CN4 step selection
    #[arg(long)]
    tolerance: Option<f64>,
    /// `auto` or `fixed:<dt>`
    #[arg(long)]
    dt_policy: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let mut cfg = match (&self.config, self.preset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(Preset::Paper) | None) => RunConfig::paper(),
        };
        if let Some(dir) = &self.out {
            cfg.output_dir = dir.clone();
        }
        if let Some(t) = self.tolerance {
            cfg.evolution.tolerance = t;
        }
        if let Some(p) = &self.dt_policy {
            p.parse::<DtPolicyArg>()?;
            cfg.evolution.dt_policy = p.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn finish(report: &ScenarioReport, dir: &Path) -> Result<i32, HarnessError> {
    report.write_to(dir)?;
    print!("{}", report.summary());
    println!("wrote {}", dir.display());
    Ok(if report.passed() { exit::OK } else { exit::NUMERICAL })
}

fn run(verb: &Verb) -> Result<i32, HarnessError> {
    let (name, common) = match verb {
        Verb::Pole(c) => ("pole", c),
        Verb::Survival(c) => ("survival", c),
        Verb::Emission(c) => ("emission", c),
        Verb::Correlation(c) => ("correlation", c),
        Verb::Selftest(c) => ("selftest", c),
    };
    let cfg = common.resolve()?;
    let dir = cfg.output_dir.join(name);
    match verb {
        Verb::Pole(_) => {
            let rec = report_pole(&cfg)?;
            std::fs::create_dir_all(&dir)?;
            let mut text = String::new();
            for (k, v) in rec.metrics() {
                println!("{k:<28} {v:.15e}");
                text.push_str(&format!("{k} = {v:.14e}\n"));
            }
            std::fs::write(dir.join("config.echo"), cfg.to_toml())?;
            std::fs::write(dir.join("metrics.txt"), text)?;
            Ok(exit::OK)
        }
        Verb::Survival(_) => finish(&run_survival(&cfg)?, &dir),
        Verb::Emission(_) => finish(&run_emission(&cfg)?, &dir),
        Verb::Correlation(_) => finish(&run_correlation(&cfg)?, &dir),
        Verb::Selftest(_) => {
            let summary = run_selftests(&cfg)?;
            let table = summary.table();
            print!("{table}");
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("selftest.txt"), &table)?;
            Ok(if summary.passed() { exit::OK } else { exit::SELFTEST })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    let code = match run(&cli.verb) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
