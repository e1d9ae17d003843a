use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use stringyang::algebra::{IndexedTable, ParamValue};
use stringyang::checks::{check_bialgebra, check_casimir, check_jacobi, CheckReport};
use stringyang::derivation::{derive_fg_epsilon, solve_central, solve_delta_prime, solve_gamma, tensor_a};
use stringyang::dsl::{parse_expression, parse_presentation, Presentation, Profile};
use stringyang::rational::parse_q;
use stringyang::{Algebra, Q};

/// Exact computations in the string algebra and its Virasoro-like bialgebra
/// extension.
#[derive(Parser, Debug)]
#[command(name = "stringyang", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Load a `.lba` presentation instead of a built-in profile.
    #[arg(long, global = true, value_name = "FILE")]
    presentation: Option<PathBuf>,

    /// Built-in presentation.
    #[arg(long, global = true, value_enum, default_value_t = ProfileArg::Example)]
    profile: ProfileArg,

    /// Mode window M: generators with |mode| <= M.
    #[arg(long, global = true, default_value_t = 4)]
    window: u32,

    /// Override a parameter: `name=q` or `name[i]=q` (q an integer or fraction).
    #[arg(long = "param", global = true, value_name = "NAME=Q")]
    params: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for the check suites (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Leave the elapsed time out of reports.
    #[arg(long, global = true)]
    no_timing: bool,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Evaluate an expression such as `comm(b[1], b[-1])`.
    Eval { expr: String },
    /// Run a verification suite over the mode window.
    Check {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Run one of the structure-constant derivations.
    Derive {
        #[arg(value_enum)]
        what: Target,
        /// epsilon_1 squared (fg-epsilon).
        #[arg(long, default_value = "1", value_parser = rational)]
        e1: Q,
        /// epsilon_2 squared (fg-epsilon).
        #[arg(long, default_value = "1", value_parser = rational)]
        e2: Q,
        /// Coefficient of a[0] in F (fg-epsilon).
        #[arg(long, default_value = "0", value_parser = rational)]
        alpha: Q,
        /// Coefficient of a[0] in G (fg-epsilon).
        #[arg(long, default_value = "0", value_parser = rational)]
        beta: Q,
        /// Window N for the n index (gamma); defaults to --window.
        #[arg(long)]
        n: Option<u32>,
        /// Solve delta'(P) = c*A for this c (delta-prime).
        #[arg(long, default_value = "-1", value_parser = rational, allow_hyphen_values = true)]
        multiple: Q,
        /// Maximal degree of P (delta-prime).
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
    /// Validate a `.lba` presentation file.
    Parse { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    Example,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Jacobi,
    Bialgebra,
    Casimir,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Gamma,
    Central,
    FgEpsilon,
    DeltaPrime,
}

fn rational(s: &str) -> Result<Q, String> {
    parse_q(s).ok_or_else(|| format!("`{s}` is not an integer or fraction"))
}

/// A failure that maps to exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn load_presentation(cli: &Cli) -> Result<Presentation, UsageError> {
    match &cli.presentation {
        Some(path) => {
            let source = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            parse_presentation(&source).map_err(|e| UsageError(format!("{}:{e}", path.display())))
        }
        None => Ok(match cli.profile {
            ProfileArg::Example => Profile::Example,
            ProfileArg::General => Profile::General,
        }
        .presentation()),
    }
}

/// Applies `name=q` and `name[i]=q` overrides; names must be declared.
fn apply_overrides(alg: Algebra, overrides: &[String]) -> Result<Algebra, UsageError> {
    let mut params = alg.params().clone();
    for item in overrides {
        let (lhs, value) = item
            .split_once('=')
            .ok_or_else(|| UsageError(format!("--param `{item}`: expected NAME=Q or NAME[I]=Q")))?;
        let value = rational(value).map_err(|e| UsageError(format!("--param `{item}`: {e}")))?;
        let lhs = lhs.trim();
        let (name, index) = match lhs.split_once('[') {
            Some((name, rest)) => {
                let index: i64 = rest
                    .strip_suffix(']')
                    .and_then(|i| i.trim().parse().ok())
                    .ok_or_else(|| UsageError(format!("--param `{item}`: bad index")))?;
                (name.trim(), Some(index))
            }
            None => (lhs, None),
        };
        let current = params
            .get(name)
            .cloned()
            .ok_or_else(|| UsageError(format!("--param `{item}`: unknown parameter `{name}`")))?;
        let updated = match (current, index) {
            (ParamValue::Scalar(_), None) => ParamValue::Scalar(value),
            (ParamValue::Scalar(_), Some(_)) => {
                return Err(UsageError(format!("--param `{item}`: `{name}` is a scalar parameter")))
            }
            (ParamValue::Indexed(_), None) => ParamValue::Indexed(IndexedTable::constant(value)),
            (ParamValue::Indexed(mut table), Some(i)) => {
                table.entries.insert(i.unsigned_abs(), value);
                ParamValue::Indexed(table)
            }
        };
        params.set(name, updated);
    }
    Ok(alg.with_params(params))
}

fn algebra(cli: &Cli) -> Result<Algebra, UsageError> {
    apply_overrides(load_presentation(cli)?.algebra(), &cli.params)
}

fn render(report: &CheckReport, cli: &Cli) -> String {
    let timing = !cli.no_timing;
    match cli.format {
        Format::Json => report.to_json(timing) + "\n",
        Format::Text => report.to_text(timing),
    }
}

/// Returns the text to print and whether the command succeeded.
fn run(cli: &Cli) -> Result<(String, bool), UsageError> {
    match &cli.command {
        Command::Eval { expr } => {
            let alg = algebra(cli)?;
            let value = parse_expression(expr, &alg).map_err(|e| UsageError(format!("expression {e}")))?;
            let text = match cli.format {
                Format::Text => format!("{value}\n"),
                Format::Json => {
                    let doc = json!({"expression": expr, "result": value.to_string()});
                    serde_json::to_string_pretty(&doc)? + "\n"
                }
            };
            Ok((text, true))
        }
        Command::Check { suite } => {
            let alg = algebra(cli)?;
            let report = match suite {
                Suite::Jacobi => check_jacobi(&alg, cli.window)?,
                Suite::Bialgebra => check_bialgebra(&alg, cli.window)?,
                Suite::Casimir => check_casimir(&alg, cli.window)?,
            };
            Ok((render(&report, cli), report.passed()))
        }
        Command::Derive { what, e1, e2, alpha, beta, n, multiple, degree } => {
            let report = match what {
                Target::Gamma => solve_gamma(cli.window, n.unwrap_or(cli.window))?.to_report(),
                Target::Central => solve_central(cli.window)?.to_report(),
                Target::FgEpsilon => {
                    derive_fg_epsilon(e1.clone(), e2.clone(), cli.window, alpha.clone(), beta.clone())?.to_report()
                }
                Target::DeltaPrime => solve_delta_prime(&tensor_a().scale(multiple), *degree)?.to_report(),
            };
            Ok((render(&report, cli), report.passed()))
        }
        Command::Parse { file } => {
            let source = fs::read_to_string(file).map_err(|e| UsageError(format!("{}: {e}", file.display())))?;
            match parse_presentation(&source) {
                Ok(p) => {
                    let alg = p.algebra();
                    let families: Vec<&str> = alg.families().iter().map(|k| k.name()).collect();
                    let central: Vec<String> = alg.central().iter().map(ToString::to_string).collect();
                    let rules: Vec<String> = alg.brackets().rules().map(|r| r.to_string()).collect();
                    let cotails: Vec<String> =
                        alg.cotails().iter().map(|(k, t)| format!("{}: {t}", k.name())).collect();
                    let text = match cli.format {
                        Format::Json => {
                            let doc = json!({
                                "file": file.display().to_string(),
                                "status": "ok",
                                "families": families,
                                "central": central,
                                "brackets": rules,
                                "cotails": cotails,
                            });
                            serde_json::to_string_pretty(&doc)? + "\n"
                        }
                        Format::Text => {
                            let mut out = format!("{}: ok\nfamilies: {}\ncentral: {}\n", file.display(), families.join(", "), central.join(", "));
                            for r in rules {
                                out.push_str(&format!("bracket {r}\n"));
                            }
                            for c in cotails {
                                out.push_str(&format!("cotail {c}\n"));
                            }
                            out
                        }
                    };
                    Ok((text, true))
                }
                Err(e) => Err(UsageError(format!("{}:{e}", file.display()))),
            }
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), UsageError> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = run(&cli).and_then(|(text, ok)| emit(&cli, &text).map(|()| ok));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
