use std::path::{Path, PathBuf};
use std::process::ExitCode;

use attractor_cli::bundled::bundled_scenarios;
use attractor_cli::emit::{comparison_csv, verdicts_csv, EmitError};
use attractor_cli::run::{check_classes, unmatched_expectations};
use attractor_cli::{emit, load_scenario, run_scenario, Format, RunBundle, Scenario};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 64;
const EXIT_INVALID: u8 = 65;
const EXIT_RUNTIME: u8 = 70;
const EXIT_IO: u8 = 74;
/// Failure counts are clamped below the reserved codes.
const MAX_FAILURE_CODE: usize = 63;

#[derive(Parser)]
#[command(name = "attractor", version, about = "Common attractive point experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the class verifiers and the theorem-condition gate only.
    Check(Common),
    /// Run a full scenario and write its output directory.
    Run(Common),
    /// Race the requested schemes and print the comparison table.
    Compare(Common),
    /// Run every bundled scenario; exit code is the number of failed verdicts.
    Suite(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file; repeatable for `compare`. Defaults to the bundled set
    /// for `compare` and is ignored by `suite`.
    #[arg(long)]
    scenario: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Overrides the sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the stop-rule and comparison residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Invalid(String),
    Runtime(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Runtime(_) => EXIT_RUNTIME,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Runtime(m) | Failure::Io(m) => m,
        }
    }
}

impl From<EmitError> for Failure {
    fn from(e: EmitError) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(failures) => ExitCode::from(failures.min(MAX_FAILURE_CODE) as u8),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn apply_overrides(mut sc: Scenario, args: &Common) -> Result<Scenario, Failure> {
    if let Some(seed) = args.seed {
        sc.sampling.seed = seed;
    }
    if let Some(tol) = args.tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be a finite nonnegative number, got {tol}")));
        }
        sc.stop.tol = tol;
        sc.tolerances.compare = tol;
    }
    Ok(sc)
}

fn one_scenario(args: &Common) -> Result<Scenario, Failure> {
    match args.scenario.as_slice() {
        [path] => {
            let sc = load_scenario(path).map_err(|e| Failure::Invalid(e.to_string()))?;
            apply_overrides(sc, args)
        }
        [] => Err(Failure::Usage("--scenario <path> is required".into())),
        _ => Err(Failure::Usage("exactly one --scenario is expected".into())),
    }
}

fn format_of(args: &Common) -> Format {
    match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn run_one(sc: &Scenario) -> Result<RunBundle, Failure> {
    let bundle = run_scenario(sc).map_err(|e| Failure::Runtime(e.to_string()))?;
    let stray = unmatched_expectations(&bundle);
    if !stray.is_empty() {
        return Err(Failure::Invalid(format!(
            "{}: expectations name no verdict: {}",
            sc.name,
            stray.join(", ")
        )));
    }
    Ok(bundle)
}

fn print_verdicts(bundle: &RunBundle) {
    for v in &bundle.verdicts {
        let mark = if v.pass { "pass" } else { "FAIL" };
        println!(
            "{mark} {}/{} (expected {}, got {})",
            bundle.scenario.name, v.name, v.expected, v.actual
        );
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<usize, Failure> {
    match command {
        Command::Check(args) => {
            let sc = one_scenario(&args)?;
            let (reports, gate) = check_classes(&sc).map_err(|e| Failure::Runtime(e.to_string()))?;
            let mut failures = 0;
            for r in &reports {
                let name = format!("class.{}.{}", r.map, r.report.class.name());
                let expected = sc.expect.get(&name).copied().unwrap_or(true);
                let pass = r.report.holds() == expected;
                failures += usize::from(!pass);
                println!(
                    "{} {}/{name}: {:?} on {} pairs, max violation {:e}",
                    if pass { "pass" } else { "FAIL" },
                    sc.name,
                    r.report.verdict,
                    r.report.pairs_tested,
                    r.report.max_violation
                );
            }
            if let Some(gate) = gate {
                let expected = sc.expect.get("theorem_conditions").copied().unwrap_or(true);
                let pass = gate.holds == expected;
                failures += usize::from(!pass);
                println!(
                    "{} {}/theorem_conditions: {}",
                    if pass { "pass" } else { "FAIL" },
                    sc.name,
                    gate.reason.as_deref().unwrap_or("hold")
                );
            }
            Ok(failures)
        }
        Command::Run(args) => {
            let sc = one_scenario(&args)?;
            let bundle = run_one(&sc)?;
            print_verdicts(&bundle);
            if let Some(out) = &args.out {
                for path in emit(&bundle, format_of(&args), out)? {
                    println!("wrote {}", path.display());
                }
            }
            Ok(bundle.failures())
        }
        Command::Compare(args) => {
            let scenarios = if args.scenario.is_empty() {
                bundled_scenarios().map_err(|e| Failure::Invalid(e.to_string()))?
            } else {
                args.scenario
                    .iter()
                    .map(|p| load_scenario(p).map_err(|e| Failure::Invalid(e.to_string())))
                    .collect::<Result<_, _>>()?
            };
            let mut rows = Vec::new();
            for sc in scenarios {
                let sc = apply_overrides(sc, &args)?;
                rows.extend(run_one(&sc)?.comparison);
            }
            let table = comparison_csv(&rows).map_err(|e| Failure::Io(e.to_string()))?;
            print!("{table}");
            if let Some(out) = &args.out {
                std::fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
                write_file(&out.join("comparison.csv"), &table)?;
            }
            Ok(0)
        }
        Command::Suite(args) => {
            let scenarios = bundled_scenarios().map_err(|e| Failure::Invalid(e.to_string()))?;
            let mut failures = 0;
            let mut rows = Vec::new();
            let mut bundles = Vec::new();
            for sc in scenarios {
                let sc = apply_overrides(sc, &args)?;
                let bundle = run_one(&sc)?;
                print_verdicts(&bundle);
                failures += bundle.failures();
                rows.extend(bundle.comparison.iter().cloned());
                if let Some(out) = &args.out {
                    emit(&bundle, format_of(&args), out)?;
                }
                bundles.push(bundle);
            }
            if let Some(out) = &args.out {
                let table = comparison_csv(&rows).map_err(|e| Failure::Io(e.to_string()))?;
                write_file(&out.join("comparison.csv"), &table)?;
                let lines: Vec<_> = bundles
                    .iter()
                    .flat_map(|b| b.verdicts.iter().map(move |v| (b.scenario.name.clone(), v)))
                    .collect();
                let verdicts = verdicts_csv(&lines).map_err(|e| Failure::Io(e.to_string()))?;
                write_file(&out.join("verdicts.csv"), &verdicts)?;
            }
            println!("{failures} failed verdict(s)");
            Ok(failures)
        }
    }
}
