use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ladder::experiments::{self, ExperimentConfig, ExperimentId, OutputFormat, Report};
use ladder::fluctuation::{ladder_sequence, local_time_verbatim, Direction};
use ladder::limit_laws::{kappa_bm, levy_half_cdf, rayleigh_cdf, ReferenceLaw};
use ladder::scaling::{norming_constant, PositivityRule};
use ladder::transforms::tanaka_doney;
use ladder::{Error, IncrementLaw, Result};

#[derive(Parser)]
#[command(name = "ladder", version, about = "Ladder processes, local times at the maximum and conditioned walks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment config (JSON); defaults to the pinned configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated, strictly increasing.
    #[arg(long = "n-grid", global = true, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact certification suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Monte Carlo convergence experiments.
    Converge {
        #[arg(value_enum)]
        experiment: Convergence,
    },
    /// Simulate one path and dump its local time, ladder sequence and transform.
    Simulate {
        /// Increment law as JSON, e.g. '{"kind":"gaussian","mean":0.0,"stddev":1.0}'.
        #[arg(long)]
        law: Option<String>,
        #[arg(long, default_value_t = 1000)]
        length: usize,
    },
    /// Reference-law and norming-constant tables.
    Tables,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Fristedt,
    Reversal,
    Idloc,
    MeanderAc,
    HKernel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convergence {
    Theorem1,
    Localtime,
    Lemma1,
    Meander,
    Harmonic,
}

impl From<Suite> for ExperimentId {
    fn from(s: Suite) -> Self {
        match s {
            Suite::Fristedt => ExperimentId::Fristedt,
            Suite::Reversal => ExperimentId::Reversal,
            Suite::Idloc => ExperimentId::Idloc,
            Suite::MeanderAc => ExperimentId::MeanderAc,
            Suite::HKernel => ExperimentId::HKernel,
        }
    }
}

impl From<Convergence> for ExperimentId {
    fn from(c: Convergence) -> Self {
        match c {
            Convergence::Theorem1 => ExperimentId::Theorem1,
            Convergence::Localtime => ExperimentId::Localtime,
            Convergence::Lemma1 => ExperimentId::Lemma1,
            Convergence::Meander => ExperimentId::Meander,
            Convergence::Harmonic => ExperimentId::Harmonic,
        }
    }
}

fn load_config(id: ExperimentId, g: &Global) -> Result<ExperimentConfig> {
    let mut c = match &g.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default_for(id),
    };
    if c.experiment != id {
        return Err(Error::Config(format!(
            "config is for {}, but {} was requested",
            c.experiment.name(),
            id.name()
        )));
    }
    if let Some(s) = g.seed {
        c.seed = s;
    }
    if let Some(t) = g.trials {
        c.trials = t;
    }
    if let Some(grid) = &g.n_grid {
        c.n_grid = grid.clone();
    }
    c.validate()?;
    Ok(c)
}

fn run_experiment(id: ExperimentId, g: &Global) -> Result<Report> {
    let config = load_config(id, g)?;
    let report = experiments::run(&config)?;
    let format = match g.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    report.write(&g.out, format)?;
    Ok(report)
}

fn simulate(g: &Global, law: Option<&str>, length: usize) -> Result<()> {
    let law: IncrementLaw = match law {
        Some(text) => serde_json::from_str(text).map_err(|e| Error::Input(format!("law: {e}")))?,
        None => IncrementLaw::gaussian(0.0, 1.0)?,
    };
    let seed = g.seed.unwrap_or(experiments::config::DEFAULT_SEED);
    let path = ladder::increments::sample_walk::<f64>(&law, length, seed)?;
    let lt = local_time_verbatim(&path);
    let ladder = ladder_sequence(&path, Direction::Ascending);
    let td = tanaka_doney(&path);
    fs::create_dir_all(&g.out)?;
    match g.format {
        Format::Csv => {
            fs::write(g.out.join("path.csv"), index_value_csv(path.values()))?;
            fs::write(g.out.join("transform.csv"), index_value_csv(td.values()))?;
            fs::write(g.out.join("local_time.csv"), lt.to_csv())?;
            let mut s = String::from("index,epoch,height\n");
            for (i, (e, h)) in ladder.epochs.iter().zip(&ladder.heights).enumerate() {
                s.push_str(&format!("{i},{e},{h}\n"));
            }
            fs::write(g.out.join("ladder.csv"), s)?;
        }
        Format::Json => {
            let summary = serde_json::json!({
                "law": law,
                "seed": seed,
                "length": length,
                "path": path.values(),
                "transform": td.values(),
                "local_time": lt.counts,
                "ladder": ladder.to_json(),
            });
            fs::write(g.out.join("simulation.json"), serde_json::to_string_pretty(&summary)?)?;
        }
    }
    println!("wrote a path of length {length} to {}", g.out.display());
    Ok(())
}

fn index_value_csv(values: &[f64]) -> String {
    let mut s = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{i},{v}\n"));
    }
    s
}

fn tables(out: &FsPath) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut s = String::from("x,levy_half_cdf,rayleigh_cdf\n");
    for i in 1..=400 {
        let x = i as f64 * 0.025;
        s.push_str(&format!("{x},{},{}\n", levy_half_cdf(x)?, rayleigh_cdf(x)?));
    }
    fs::write(out.join("reference_laws.csv"), s)?;
    let mut k = format!("alpha,beta,{}\n", ReferenceLaw::KappaBm.id());
    for a in [0.0, 0.5, 1.0, 2.0] {
        for b in [0.0, 0.5, 1.0, 2.0] {
            k.push_str(&format!("{a},{b},{}\n", kappa_bm(a, b)?));
        }
    }
    fs::write(out.join("kappa.csv"), k)?;
    let mut n = String::from("n,a_n_symmetric_diffuse,a_n_simple_symmetric\n");
    for e in 0..=13 {
        let m = 1usize << e;
        n.push_str(&format!(
            "{m},{},{}\n",
            norming_constant(&PositivityRule::Constant(0.5), m, 1e-9)?,
            norming_constant(&PositivityRule::SimpleSymmetric, m, 1e-9)?
        ));
    }
    fs::write(out.join("norming.csv"), n)?;
    println!("wrote reference_laws.csv, kappa.csv and norming.csv to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let outcome = match cli.command {
        Command::Verify { suite } => run_experiment(suite.into(), g).map(Some),
        Command::Converge { experiment } => run_experiment(experiment.into(), g).map(Some),
        Command::Simulate { law, length } => simulate(g, law.as_deref(), length).map(|_| None),
        Command::Tables => tables(&g.out).map(|_| None),
    };
    match outcome {
        Ok(Some(report)) => {
            for line in report.summary_lines() {
                println!("{line}");
            }
            for note in &report.notes {
                println!("note: {note}");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::HypothesisViolation(_)) { 2 } else { 1 })
        }
    }
}
