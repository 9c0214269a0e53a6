use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fedunlearn_core::dataforge::{gen_blobs, write_csv};
use fedunlearn_core::expcli::{
    golden_check, golden_record, results_csv, run_experiment, sweep, sweep_csv, ExpError,
    ExperimentConfig, SweepParam,
};

#[derive(Parser)]
#[command(
    name = "fedunlearn",
    version,
    about = "Federated client unlearning simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured method once and write results under the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ablation of one mixup parameter; writes sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Record or check the golden regression file.
    Golden {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: GoldenMode,
    },
    /// Write a synthetic blobs dataset as CSV.
    GenData {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        c: usize,
        #[arg(long)]
        sep: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    #[value(name = "alpha_mixup")]
    AlphaMixup,
    #[value(name = "p_mixup")]
    PMixup,
}

#[derive(Clone, Copy, ValueEnum)]
enum GoldenMode {
    Record,
    Check,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fedunlearn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cmd: Command) -> Result<(), ExpError> {
    match cmd {
        Command::Run { config, seed, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let outcome = run_experiment(&cfg)?;
            print!("{}", results_csv(&outcome.rows));
            eprintln!("wrote {}", cfg.output_dir.display());
        }
        Command::Sweep {
            config,
            param,
            values,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let param = match param {
                ParamArg::AlphaMixup => SweepParam::AlphaMixup,
                ParamArg::PMixup => SweepParam::PMixup,
            };
            let rows = sweep(&cfg, param, &values)?;
            let csv = sweep_csv(&rows);
            let path = cfg.output_dir.join("sweep.csv");
            std::fs::write(&path, &csv).map_err(|e| ExpError::Runtime(io_error(&path, e)))?;
            print!("{csv}");
        }
        Command::Golden { config, mode } => {
            let cfg = ExperimentConfig::load(&config)?;
            match mode {
                GoldenMode::Record => {
                    let file = golden_record(&cfg)?;
                    eprintln!(
                        "recorded {} rows to {}",
                        file.rows.len(),
                        cfg.golden.path.display()
                    );
                }
                GoldenMode::Check => {
                    let report = golden_check(&cfg)?;
                    for o in &report.orderings {
                        println!(
                            "seed {}: retrain_forgets={} iff_forgets={} iff_closer_than_finetune={} ascent_overforgets={}",
                            o.seed, o.retrain_forgets, o.iff_forgets, o.iff_closer_than_finetune, o.ascent_overforgets
                        );
                    }
                    println!("golden check passed ({} rows)", report.rows.len());
                }
            }
        }
        Command::GenData {
            out,
            n,
            d,
            c,
            sep,
            seed,
        } => {
            let data = gen_blobs::<f64>(seed, n, d, c, sep)?;
            write_csv(&data, &out)?;
        }
    }
    Ok(())
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> fedunlearn_core::Error {
    fedunlearn_core::Error::Io {
        path: path.display().to_string(),
        source: e,
    }
}
