use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use rainbow_core::engine::{
    connect_forest_components, max_rainbow_forest_exact, schrijver_suzuki_decide, DriverOutcome,
    TraceEntry,
};
use rainbow_core::experiments::{run_experiment, ExperimentConfig, Mode};
use rainbow_core::random::{build_exposure_stack, flatten};
use rainbow_core::{build_host, ColoredSubgraph, Error, Graph, HostSpec, ModelParams, RandomStream};

/// Rainbow spanning trees in randomly colored percolated graphs.
#[derive(Parser)]
#[command(name = "rainbow", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for experiments (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Exact,
    Schrijver,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaChoice {
    Cuts,
    Straddle,
    Colorhit,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Build a host graph, e.g. `complete:64`, `circulant:256:d128`, `random-regular:100:10`.
    Gen {
        #[arg(long)]
        host: HostSpec,
    },
    /// Sample the colored random model on a host.
    Sample {
        /// Host graph file or spec string.
        #[arg(long)]
        host: String,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Dense-layer coefficient replacing `2 + epsilon/2`.
        #[arg(long)]
        coeff: Option<f64>,
        /// Palette size (default n - 1).
        #[arg(long)]
        palette: Option<u32>,
        /// Emit only the dense layer instead of the union of all layers.
        #[arg(long)]
        dense_only: bool,
    },
    /// Decide whether a colored graph has a rainbow spanning tree.
    Decide {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Oracle::Exact)]
        oracle: Oracle,
    },
    /// Run the component-connecting driver on a sampled instance.
    Pipeline {
        #[arg(long)]
        host: String,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        palette: Option<u32>,
        /// Write one line per driver iteration.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a parameter sweep from a key=value config file.
    Experiment { config: PathBuf },
    /// Monte Carlo checks of the supporting lemmas.
    CheckLemmas {
        #[arg(long, value_enum, default_value_t = LemmaChoice::All)]
        lemma: LemmaChoice,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value = "complete:64")]
        host: HostSpec,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 3.0)]
        omega: f64,
    },
}

fn load_host(arg: &str, seed: u64) -> Result<Graph, Error> {
    if Path::new(arg).is_file() {
        return Graph::read_text(BufReader::new(File::open(arg)?));
    }
    let spec: HostSpec = arg.parse()?;
    build_host(&spec, &mut RandomStream::new(seed, u64::MAX))
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut out = sink(&cli.out)?;
    match cli.command {
        Command::Gen { host } => {
            let g = build_host(&host, &mut RandomStream::new(cli.seed, u64::MAX))?;
            g.write_text(&mut out)?;
        }
        Command::Sample {
            host,
            epsilon,
            coeff,
            palette,
            dense_only,
        } => {
            let g = Arc::new(load_host(&host, cli.seed)?);
            let params = ModelParams::for_host(&g, epsilon, coeff);
            let palette = palette.unwrap_or(g.n() as u32 - 1);
            let stack = build_exposure_stack(g, &params, palette, cli.seed)?;
            let cg = if dense_only {
                stack.p_layer().clone()
            } else {
                flatten(&stack)
            };
            cg.write_text(&mut out)?;
        }
        Command::Decide { file, oracle } => {
            let cg = ColoredSubgraph::read_text(BufReader::new(File::open(file)?))?;
            let max_forest = max_rainbow_forest_exact(&cg).len();
            let exact = cg.n() <= 1 || max_forest == cg.n() - 1;
            let answer = match oracle {
                Oracle::Exact => exact,
                Oracle::Schrijver => schrijver_suzuki_decide(&cg)?,
                Oracle::Both => {
                    let sch = schrijver_suzuki_decide(&cg)?;
                    if sch != exact {
                        return Err(Error::Precondition(format!(
                            "oracles disagree: exact {exact}, schrijver {sch}"
                        )));
                    }
                    exact
                }
            };
            let yn = if answer { "yes" } else { "no" };
            writeln!(out, "RAINBOW_ST: {yn}, max_forest: {max_forest}")?;
        }
        Command::Pipeline {
            host,
            epsilon,
            palette,
            trace,
        } => {
            let g = Arc::new(load_host(&host, cli.seed)?);
            let params = ModelParams::for_host(&g, epsilon, None);
            let palette = palette.unwrap_or(g.n() as u32 - 1);
            let stack = build_exposure_stack(g, &params, palette, cli.seed)?;
            let run = connect_forest_components(&stack);
            if let Some(path) = trace {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "{}", TraceEntry::CSV_HEADER)?;
                for e in &run.trace {
                    writeln!(w, "{}", e.csv_row())?;
                }
                w.flush()?;
            }
            writeln!(
                out,
                "initial_forest: {}, iterations: {}, max_J: {}",
                run.initial_forest_size,
                run.trace.len(),
                run.max_j
            )?;
            match &run.outcome {
                DriverOutcome::Tree(_) => writeln!(out, "RAINBOW_ST: yes")?,
                DriverOutcome::Stuck {
                    forest,
                    diagnostics,
                } => writeln!(
                    out,
                    "RAINBOW_ST: stuck ({}), forest: {}, components: {}, missing_colors: {}",
                    diagnostics.reason,
                    forest.len(),
                    diagnostics.t,
                    diagnostics.missing_colors.len()
                )?,
            }
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::parse(&fs::read_to_string(config)?)?;
            let csv = run_experiment(&cfg, cli.threads)?.csv();
            match (&cli.out, &cfg.output_path) {
                (None, Some(path)) => fs::write(path, csv)?,
                _ => out.write_all(csv.as_bytes())?,
            }
        }
        Command::CheckLemmas {
            lemma,
            trials,
            host,
            epsilon,
            omega,
        } => {
            let lemma_line = match lemma {
                LemmaChoice::Cuts => "lemma=cuts",
                LemmaChoice::Straddle => "lemma=straddle",
                LemmaChoice::Colorhit => "lemma=colorhit",
                LemmaChoice::All => "lemma=all",
            };
            let (family, degree) = match &host {
                HostSpec::Complete { .. } => ("complete", None),
                HostSpec::Circulant { .. } => ("circulant", Some(host.degree())),
                HostSpec::RandomRegular { d, .. } => ("random-regular", Some(*d)),
            };
            let mut text = format!(
                "mode={}\nhost={family}\nn={}\nepsilon={epsilon}\ntrials={trials}\nseed={}\n{lemma_line}\nomega={omega}\n",
                Mode::Lemma,
                host.n(),
                cli.seed
            );
            if let Some(d) = degree {
                text.push_str(&format!("degree={d}\n"));
            }
            let cfg = ExperimentConfig::parse(&text)?;
            out.write_all(run_experiment(&cfg, cli.threads)?.csv().as_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
