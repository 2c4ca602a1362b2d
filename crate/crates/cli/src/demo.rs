use std::io::{BufRead, Write};

use clap::Args;
use crashpbo::acquisition::ComparisonMode;
use crashpbo::bench::runner::initial_duel;
use crashpbo::bench::{simulate_dm, GridConfig, ModelConfig, ProblemSpec, TestProblem};
use crashpbo::{seed, DuelFeedback, OptimizerConfig, OptimizerState, Preference};

use crate::CliError;

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Number of duels after the initial one.
    #[arg(long, default_value_t = 8)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::CompareToBest)]
    mode: Mode,
    /// Answer each duel yourself; an empty line accepts the oracle's answer.
    #[arg(long)]
    interactive: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Mode {
    TwoNew,
    CompareToBest,
    CompareToLast,
}

impl From<Mode> for ComparisonMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::TwoNew => ComparisonMode::TwoNew,
            Mode::CompareToBest => ComparisonMode::CompareToBest,
            Mode::CompareToLast => ComparisonMode::CompareToLast,
        }
    }
}

fn outcome_name(fb: &DuelFeedback) -> &'static str {
    match (fb.s_a(), fb.s_b(), fb.pi()) {
        (false, false, _) => "crash_both",
        (false, true, _) => "crash_a",
        (true, false, _) => "crash_b",
        (true, true, Some(Preference::Second)) => "prefer_b",
        (true, true, _) => "prefer_a",
    }
}

fn parse_answer(line: &str, x_a: &[f64], x_b: &[f64]) -> Option<DuelFeedback> {
    let (s_a, s_b, pi) = match line {
        "a" => (true, true, Some(Preference::First)),
        "b" => (true, true, Some(Preference::Second)),
        "ca" => (false, true, None),
        "cb" => (true, false, None),
        "cc" => (false, false, None),
        _ => return None,
    };
    DuelFeedback::new(x_a.to_vec(), x_b.to_vec(), s_a, s_b, pi).ok()
}

fn ask(oracle: DuelFeedback) -> Result<DuelFeedback, CliError> {
    let stdin = std::io::stdin();
    loop {
        print!("  outcome [a, b, ca, cb, cc; empty = {}]: ", outcome_name(&oracle));
        std::io::stdout().flush().map_err(CliError::runtime)?;
        let mut line = String::new();
        if stdin.lock().read_line(&mut line).map_err(CliError::runtime)? == 0 {
            return Ok(oracle);
        }
        let line = line.trim();
        if line.is_empty() {
            return Ok(oracle);
        }
        if let Some(fb) = parse_answer(line, oracle.x_a(), oracle.x_b()) {
            return Ok(fb);
        }
        println!("  unrecognized answer {line:?}");
    }
}

pub fn run(args: DemoArgs) -> Result<(), CliError> {
    if args.budget == 0 {
        return Err(CliError::Usage("--budget must be at least 1".into()));
    }
    let spec = ProblemSpec::GpSample { dim: 1, seed: args.seed, lengthscale: 0.2 };
    let noise = 0.1;
    let problem = TestProblem::from_spec(&spec, noise, &GridConfig::default()).map_err(CliError::runtime)?;
    let (kernel, model_noise) = ModelConfig::default().resolve(&spec, noise);
    let mut config = OptimizerConfig::new(1, args.budget, args.mode.into());
    config.kernel = kernel;
    config.noise = model_noise;
    config.seed = args.seed;

    let mut rng = seed::rng(args.seed, &[0xde70]);
    let (x_a, x_b, _) = initial_duel(&problem, args.seed, 0).map_err(CliError::runtime)?;
    let (first, _) = simulate_dm(&problem, &x_a, &x_b, &mut rng, true).map_err(CliError::runtime)?;
    println!(
        "1-D sample path (seed {}), crash below {:.3}, best value on the grid {:.3}",
        args.seed, problem.threshold, problem.f_max
    );
    println!("  0  x_a={:.4}  x_b={:.4}  {:<10}", x_a[0], x_b[0], outcome_name(&first));
    let mut state = OptimizerState::create(config, first).map_err(CliError::runtime)?;
    let mut crashes = 0;

    while !state.is_finished() {
        let (x_a, x_b) = match state.propose() {
            Ok(duel) => duel,
            Err(e) => {
                eprintln!("model fit failed ({e}); proposing a random duel");
                state.propose_random(&mut rng).map_err(CliError::runtime)?
            }
        };
        let (oracle, _) = simulate_dm(&problem, &x_a, &x_b, &mut rng, true).map_err(CliError::runtime)?;
        let iteration = state.iteration() + 1;
        if args.interactive {
            println!("duel {iteration}: x_a={:.4}  x_b={:.4}", x_a[0], x_b[0]);
        }
        let fb = if args.interactive { ask(oracle)? } else { oracle };
        crashes += usize::from(!fb.s_a()) + usize::from(!fb.s_b());
        let name = outcome_name(&fb);
        let added = state.submit(fb).map_err(CliError::runtime)?;
        let inc = state.incumbent().map_err(CliError::runtime)?;
        println!(
            "{iteration:>3}  x_a={:.4}  x_b={:.4}  {name:<10} +{added:<2} incumbent {:.4} (f={:.3})",
            x_a[0],
            x_b[0],
            inc[0],
            problem.eval(&inc).map_err(CliError::runtime)?
        );
    }
    let inc = state.incumbent().map_err(CliError::runtime)?;
    let f = problem.eval(&inc).map_err(CliError::runtime)?;
    println!(
        "finished: {} duels, {crashes} crashed reports, {} comparisons; incumbent {:.4} with f={f:.3} ({:.0}% of the grid range)",
        state.iteration(),
        state.dataset().len(),
        inc[0],
        100.0 * ((f - problem.f_min) / (problem.f_max - problem.f_min)).clamp(0.0, 1.0)
    );
    Ok(())
}
