//! Command-line surface: solve / oracle / verify / gen / bench.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage error,
//! 3 I/O or instance error.

use clap::{Parser, Subcommand, ValueEnum};
use evroute::fileio;
use evroute::gain::Gain;
use evroute::gen::{self, RandomSpec};
use evroute::oracle;
use evroute::stage1::{EngineConfig, Stage1Engine};
use evroute::stage2;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "evroute", version, about = "All-pairs maximum-final-charge solver for electric-car routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver pipeline and write the alpha_B (or beta_0) table.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// RNG seed; falls back to EVROUTE_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// De-randomize: full vertex sets, every gate fires.
        #[arg(long)]
        exhaustive: bool,
        /// Record witnesses and self-check every table entry.
        #[arg(long)]
        witnesses: bool,
        /// Compute minimum initial charges instead of maximum final charges.
        #[arg(long)]
        beta: bool,
    },
    /// Write the exact alpha_B table computed by the product-graph oracle.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Solve repeatedly and compare against the oracle; exit 1 on any
    /// mismatch.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of independently seeded runs.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long)]
        exhaustive: bool,
    },
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 10)]
        gain_bound: i64,
        #[arg(long, default_value_t = 10)]
        capacity: i64,
        #[arg(long)]
        seed: Option<u64>,
        /// Arc gains for the funnel kind, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gains: Vec<i64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Time the solver on dense random instances and report scaling.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![64usize, 128, 256])]
        sizes: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    Funnel,
    DoubleFunnel,
    TwoPathDemo,
}

fn seed_or_env(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("EVROUTE_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve {
            input,
            output,
            seed,
            exhaustive,
            witnesses,
            beta,
        } => {
            let g = fileio::load_graph(&input).map_err(|e| e.to_string())?;
            let cfg = EngineConfig {
                seed: seed_or_env(seed),
                exhaustive,
                witnesses,
                ..Default::default()
            };
            if beta {
                let table = stage2::min_initial_charge(&g, cfg);
                fileio::save_text(&output, &fileio::format_beta_table(&table))
                    .map_err(|e| e.to_string())?;
                return Ok(ExitCode::SUCCESS);
            }
            let mut engine = Stage1Engine::new(&g, cfg);
            let res = stage2::solve_alpha_with_engine(&g, &mut engine);
            if witnesses {
                if let Err(msg) = engine
                    .verify_shortcut_witnesses(&res.shortcuts, &g)
                    .and_then(|_| engine.verify_store_witnesses(&res.funnels, &g))
                {
                    eprintln!("witness verification failed: {msg}");
                    return Ok(ExitCode::from(1));
                }
            }
            fileio::save_text(&output, &fileio::format_alpha_table(&res.alpha))
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { input, output } => {
            let g = fileio::load_graph(&input).map_err(|e| e.to_string())?;
            let table = oracle::alpha_all_pairs(&g).map_err(|e| e.to_string())?;
            fileio::save_text(&output, &fileio::format_alpha_table(&table))
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            input,
            seed,
            runs,
            exhaustive,
        } => {
            let g = fileio::load_graph(&input).map_err(|e| e.to_string())?;
            let truth = oracle::alpha_all_pairs(&g).map_err(|e| e.to_string())?;
            let base = seed_or_env(seed);
            let mut exact_runs = 0u64;
            let mut unsound = false;
            for run in 0..runs {
                let cfg = EngineConfig {
                    seed: base.wrapping_add(run),
                    exhaustive,
                    ..Default::default()
                };
                let res = stage2::solve_alpha(&g, cfg);
                let mut mismatches = Vec::new();
                for s in 0..g.n() {
                    for t in 0..g.n() {
                        let (p, o) = (res.alpha.at(s, t), truth.at(s, t));
                        if p != o {
                            if p > o {
                                unsound = true;
                            }
                            mismatches.push((s, t, p, o));
                        }
                    }
                }
                if mismatches.is_empty() {
                    println!("run {run} (seed {}): exact", base.wrapping_add(run));
                    exact_runs += 1;
                } else {
                    println!(
                        "run {run} (seed {}): {} mismatched pairs",
                        base.wrapping_add(run),
                        mismatches.len()
                    );
                    for (s, t, p, o) in mismatches {
                        let tag = if p > o { "UNSOUND" } else { "incomplete" };
                        println!("  {tag} ({}, {}): solver {p}, oracle {o}", s + 1, t + 1);
                    }
                }
            }
            println!("{exact_runs}/{runs} runs exact");
            if unsound {
                println!("FAIL: solver exceeded the oracle somewhere (soundness bug)");
            }
            Ok(if exact_runs == runs {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Gen {
            kind,
            n,
            density,
            gain_bound,
            capacity,
            seed,
            gains,
            output,
        } => {
            let g = match kind {
                GenKind::Random => gen::gen_random(&RandomSpec {
                    n,
                    density,
                    gain_bound,
                    capacity,
                    seed: seed_or_env(seed),
                })
                .map_err(|e| e.to_string())?,
                GenKind::Funnel => {
                    gen::gen_funnel_path(&gains, capacity).map_err(|e| e.to_string())?
                }
                GenKind::DoubleFunnel => {
                    gen::gen_double_funnel(n, capacity).map_err(|e| e.to_string())?
                }
                GenKind::TwoPathDemo => gen::two_path_demo(),
            };
            fileio::save_text(&output, &fileio::format_graph(&g)).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { sizes, seed } => {
            let base = seed_or_env(seed);
            let mut rows: Vec<(usize, f64)> = Vec::new();
            for &n in &sizes {
                let g = gen::gen_random(&RandomSpec {
                    n,
                    density: 1.0,
                    gain_bound: 32,
                    capacity: 32,
                    seed: base,
                })
                .map_err(|e| e.to_string())?
                .normalize()
                .map_err(|e| e.to_string())?;
                let start = Instant::now();
                let res = stage2::solve_alpha(&g, EngineConfig::with_seed(base));
                let secs = start.elapsed().as_secs_f64();
                let finite = (0..n)
                    .flat_map(|s| (0..n).map(move |t| (s, t)))
                    .filter(|&(s, t)| res.alpha.at(s, t) != Gain::NegInf)
                    .count();
                println!("n={n} arcs={} finite_pairs={finite} time={secs:.3}s", g.arc_count());
                rows.push((n, secs));
            }
            for pair in rows.windows(2) {
                let (n0, t0) = pair[0];
                let (n1, t1) = pair[1];
                let exp = (t1 / t0).log2() / ((n1 as f64 / n0 as f64)).log2();
                println!("growth {n0} -> {n1}: exponent {exp:.2}");
            }
            if let (Some(&(n0, t0)), Some(&(n1, t1))) = (rows.first(), rows.last()) {
                if rows.len() >= 2 {
                    println!(
                        "ratio t({n1})/t({n0}) = {:.1} (sub-n^4 bound {})",
                        t1 / t0,
                        (n1 as f64 / n0 as f64).powi(4) as u64
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
