use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use riskbench_core::advantage_walk::{occupation_fractions, sign_profile, WalkSchedule};
use riskbench_core::harness::{aggregate, log_checkpoints, run_all};
use riskbench_core::io::{
    emit_config, emit_csv, emit_runs_csv, format_sig, parse_config, parse_distribution, preset,
    preset_ids, render_svg, SvgStyle,
};
use riskbench_core::{Error, Execution, ExperimentConfig, Schedule};

#[derive(Parser)]
#[command(name = "riskbench", version, about = "Risk preferences of epsilon-greedy bandit policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write curves.csv, runs.csv, curves.svg and config.toml.
    Simulate(SimulateArgs),
    /// Simulate the advantage walk and write its sign profile.
    Walk(WalkArgs),
    /// Print the available preset ids.
    ListPresets,
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset id (see `list-presets`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u64>,
    /// Overrides the horizon and resets checkpoints to the log grid.
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Run trajectories on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct WalkArgs {
    /// Increment law as an inline record, e.g. '{kind = "uniform", lo = -1.0, hi = 1.0}'.
    #[arg(long)]
    increments: String,
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 1_000)]
    runs: u64,
    #[arg(long, default_value_t = 1.0)]
    eps_c: f64,
    #[arg(long, default_value_t = 1.0)]
    eps_p: f64,
    /// Constant exploration rate; overrides --eps-c and --eps-p.
    #[arg(long)]
    fixed_eps: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        _ => 1,
    }
}

fn load_config(args: &SimulateArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => parse_config(&fs::read_to_string(path)?)?,
        (None, Some(id)) => preset(id)?,
        (None, None) => unreachable!("clap requires one of --config/--preset"),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(runs) = args.runs {
        cfg.runs = runs;
    }
    if let Some(horizon) = args.horizon {
        cfg.horizon = horizon;
        cfg.checkpoints = log_checkpoints(horizon);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn simulate(args: &SimulateArgs) -> Result<(), Error> {
    let cfg = load_config(args)?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    fs::create_dir_all(&args.out_dir)?;
    let runs = run_all(&cfg, exec);
    let curve = aggregate(&cfg, &runs)?;
    let out = |name: &str| args.out_dir.join(name);
    emit_csv(&curve, &out("curves.csv"))?;
    emit_runs_csv(&runs, cfg.arm_count(), &out("runs.csv"))?;
    fs::write(out("curves.svg"), render_svg(&curve, &SvgStyle::default())?)?;
    fs::write(out("config.toml"), emit_config(&cfg))?;

    let last = curve.final_index();
    println!("{} at t = {} ({} runs)", cfg.label, curve.checkpoints[last], curve.runs);
    for (arm, label) in curve.arm_labels.iter().enumerate() {
        println!(
            "  {label:<32} p_hat {:.3}  90% CI [{:.3}, {:.3}]",
            curve.p_hat[last][arm], curve.ci_lo[last][arm], curve.ci_hi[last][arm]
        );
    }
    Ok(())
}

fn walk(args: &WalkArgs) -> Result<(), Error> {
    let inc = parse_distribution(&args.increments)?;
    if inc.variance() <= 0.0 {
        return Err(Error::Precondition("increments need positive variance".into()));
    }
    if args.horizon == 0 || args.runs == 0 {
        return Err(Error::Precondition("horizon and runs must be ≥ 1".into()));
    }
    let schedule = match args.fixed_eps {
        Some(e) if (0.0..=1.0).contains(&e) => WalkSchedule::Fixed(e),
        Some(e) => return Err(Error::InvalidSchedule(format!("fixed eps must lie in [0, 1], got {e}"))),
        None => WalkSchedule::Decaying(Schedule::new(args.eps_c, args.eps_p, 0.0)?),
    };
    let exec = Execution::Parallel;
    let checkpoints = log_checkpoints(args.horizon);
    let profile = sign_profile(&inc, schedule, &checkpoints, args.runs, args.seed, exec);
    let occ = occupation_fractions(&inc, schedule, args.horizon, args.runs, args.seed, exec);
    write_walk_csv(&args.out, &profile)?;
    println!(
        "occupation over {} steps, {} runs: positive {:.4}, non-positive {:.4}",
        args.horizon, args.runs, occ.fraction_positive, occ.fraction_nonpositive
    );
    Ok(())
}

fn write_walk_csv(path: &Path, rows: &[riskbench_core::advantage_walk::WalkCheckpoint]) -> Result<(), Error> {
    let mut text = String::from("t,p_positive,p_zero,p_negative,mean_tau\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.t,
            format_sig(r.p_positive, 9),
            format_sig(r.p_zero, 9),
            format_sig(r.p_negative, 9),
            format_sig(r.mean_tau, 9)
        ));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Walk(args) => walk(args),
        Command::ListPresets => {
            for id in preset_ids() {
                println!("{id}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
