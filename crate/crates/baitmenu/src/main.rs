//! Command-line front end: evaluate mechanisms exactly or by Monte Carlo,
//! synthesize bait mechanisms, print pricing-oracle tables, and run the
//! claim-verification suite.
//!
//! Exit codes: 0 success, 1 input error, 2 claim-suite violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use baitmenu::evaluator::{exact_revenue, monte_carlo_revenue, RevenueReport};
use baitmenu::oracles::{greedy_revenue, optimal_spm, optimal_uniform_price, optimal_uspm};
use baitmenu::synthesis::{synthesize, SynthesisParams};
use baitmenu::verify::{run_claim_suite, ClaimSuiteConfig};
use baitmenu::{model, showcase, FiniteDistribution, Mechanism, Supply};

#[derive(Parser)]
#[command(
    name = "baitmenu",
    about = "Revenue analysis of paged posted-price menus for an impatient buyer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact revenue report of a mechanism as JSON.
    Eval {
        mechanism: PathBuf,
        distribution: PathBuf,
        /// Emit a one-row CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Estimate the revenue by seeded Monte Carlo.
    Mc {
        mechanism: PathBuf,
        distribution: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, env = "BAITMENU_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Synthesize an approximately optimal bait mechanism.
    Synthesize(SynthesizeArgs),
    /// Print uniform-pricing and sequential-posted-pricing tables as CSV.
    Oracles {
        distribution: PathBuf,
        /// Largest menu size to tabulate.
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Run the claim-verification suite; exits 2 on any violation.
    Verify {
        #[arg(long, env = "BAITMENU_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the two reference menus and print computed vs reference
    /// revenues.
    Example,
}

#[derive(Args)]
struct SynthesizeArgs {
    distribution: PathBuf,
    /// Page capacity.
    #[arg(long)]
    k: usize,
    /// Per-page search cost.
    #[arg(long)]
    delta: f64,
    /// Item supply: a count or "inf".
    #[arg(long, default_value = "inf")]
    supply: String,
    /// Utility grid step; defaults to delta.
    #[arg(long)]
    grid_step: Option<f64>,
    /// Expensive-price margin; defaults to delta / 10.
    #[arg(long)]
    margin: Option<f64>,
    /// Where to write mechanism.json and candidates.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

struct InputError(String);

fn load_distribution(path: &Path) -> Result<FiniteDistribution, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_mechanism(path: &Path) -> Result<Mechanism, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_pair(
    mech_path: &Path,
    dist_path: &Path,
) -> Result<(Mechanism, FiniteDistribution), InputError> {
    let mech = load_mechanism(mech_path)?;
    let dist = load_distribution(dist_path)?;
    let violations = model::validate(&mech, &dist);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(InputError(format!(
            "{}: invalid mechanism: {}",
            mech_path.display(),
            list.join("; ")
        )));
    }
    Ok((mech, dist))
}

fn parse_supply(text: &str) -> Result<Supply, InputError> {
    if text == "inf" {
        Ok(Supply::Unbounded)
    } else {
        text.parse::<u64>()
            .map(Supply::Finite)
            .map_err(|_| InputError(format!("supply must be a count or \"inf\", got \"{text}\"")))
    }
}

fn run(command: Command) -> Result<u8, InputError> {
    match command {
        Command::Eval {
            mechanism,
            distribution,
            csv,
        } => {
            let (mech, dist) = load_pair(&mechanism, &distribution)?;
            let report = exact_revenue(&mech, &dist);
            if csv {
                println!("{}", RevenueReport::csv_header());
                println!("{}", report.csv_row());
            } else {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            }
            Ok(0)
        }
        Command::Mc {
            mechanism,
            distribution,
            samples,
            seed,
        } => {
            if samples == 0 {
                return Err(InputError("--samples must be at least 1".into()));
            }
            let (mech, dist) = load_pair(&mechanism, &distribution)?;
            let est = monte_carlo_revenue(&mech, &dist, samples, seed);
            println!("{:.6} ± {:.6}", est.mean, est.std_error);
            Ok(0)
        }
        Command::Synthesize(args) => {
            let dist = load_distribution(&args.distribution)?;
            if args.k == 0 {
                return Err(InputError("--k must be at least 1".into()));
            }
            if !(args.delta.is_finite() && args.delta > 0.0) {
                return Err(InputError("--delta must be positive".into()));
            }
            let supply = parse_supply(&args.supply)?;
            let mut params = SynthesisParams::new(args.k, args.delta).with_supply(supply);
            if let Some(step) = args.grid_step {
                if step <= 0.0 {
                    return Err(InputError("--grid-step must be positive".into()));
                }
                params = params.with_grid_step(step);
            }
            if let Some(margin) = args.margin {
                if !(margin > 0.0 && margin < args.delta) {
                    return Err(InputError("--margin must lie in (0, delta)".into()));
                }
                params = params.with_margin(margin);
            }
            let outcome = synthesize(&dist, &params);

            fs::create_dir_all(&args.out_dir)
                .map_err(|e| InputError(format!("{}: {e}", args.out_dir.display())))?;
            let mech_path = args.out_dir.join("mechanism.json");
            let mech_json = serde_json::to_string_pretty(&outcome.best.mechanism)
                .expect("mechanism serializes");
            fs::write(&mech_path, &mech_json)
                .map_err(|e| InputError(format!("{}: {e}", mech_path.display())))?;

            let csv_path = args.out_dir.join("candidates.csv");
            let mut csv = String::from("mechanism_id,pages,revenue,sale_prob,expensive_sale_prob\n");
            for cand in &outcome.candidates {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    cand.id,
                    cand.mechanism.pages.len(),
                    cand.report.expected_revenue,
                    cand.report.sale_probability,
                    cand.report
                        .expensive_sale_probability
                        .map(|p| p.to_string())
                        .unwrap_or_default()
                ));
            }
            fs::write(&csv_path, &csv)
                .map_err(|e| InputError(format!("{}: {e}", csv_path.display())))?;

            println!("{mech_json}");
            eprintln!(
                "best candidate {} with revenue {:.6}; wrote {} and {}",
                outcome.best.id,
                outcome.best.report.expected_revenue,
                mech_path.display(),
                csv_path.display()
            );
            Ok(0)
        }
        Command::Oracles { distribution, n } => {
            if n == 0 {
                return Err(InputError("--n must be at least 1".into()));
            }
            let dist = load_distribution(&distribution)?;
            println!("n,uprice_price,uprice_revenue,spm_revenue,greedy_of_spm_menu,spm_eq_greedy,uspm_eq_uprice");
            for size in 1..=n {
                let (u_price, u_rev) = optimal_uniform_price(size, &dist);
                let (policy, spm_rev) = optimal_spm(size, &dist);
                let greedy = greedy_revenue(&policy.prices, &dist);
                let (uspm_price, uspm_rev) = optimal_uspm(size, &dist);
                let spm_eq = (spm_rev - greedy).abs() <= 1e-9;
                let uspm_eq = uspm_price == u_price && uspm_rev == u_rev;
                println!(
                    "{size},{u_price},{u_rev},{spm_rev},{greedy},{spm_eq},{uspm_eq}"
                );
            }
            Ok(0)
        }
        Command::Verify { seed } => {
            let results = run_claim_suite(&ClaimSuiteConfig { seed });
            println!("claim,instances,violations,worst_slack");
            let mut failed = false;
            for r in &results {
                println!("{}", r.csv_row());
                failed |= !r.passed();
            }
            Ok(if failed { 2 } else { 0 })
        }
        Command::Example => {
            let f = showcase::two_point_prior();
            let uniform = exact_revenue(&showcase::uniform_menu(), &f);
            let staircase = exact_revenue(&showcase::staircase_menu(), &f);
            println!("menu,computed,reference");
            println!("two_page_uniform,{:.6},22.8356", uniform.expected_revenue);
            println!("ten_page_staircase,{:.6},38.3133", staircase.expected_revenue);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
