use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use jetorbit::bounds::{displayed, lower_bound, render_table, TableFormat};
use jetorbit::orbit::estimate_invariant_count;
use jetorbit::{Family, JetError, StructureGroupSpec};
use jetorbit_cli::{ledger_append, run_orbit_checks, workload, References, RESOURCE_LIMIT};

const EXIT_VERIFY: u8 = 1;
const EXIT_AMBIGUOUS: u8 = 3;
const EXIT_GUARD: u8 = 4;
const EXIT_IO: u8 = 5;

/// Count differential invariants of G-structures.
#[derive(Parser)]
#[command(name = "jetorbit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form lower bound, or "-" when it is negative.
    Bound {
        #[command(flatten)]
        target: Target,
    },
    /// Render the lower-bound table of a family.
    Table {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        r_max: usize,
        #[arg(long, default_value = "markdown")]
        format: TableFormat,
        /// Write to FILE instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Estimate the number of invariants from the generic orbit dimension.
    Orbit {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, env = "JETORBIT_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Append the report as one JSON line to FILE.
        #[arg(long, value_name = "FILE")]
        ledger: Option<PathBuf>,
        /// Run even when fiber_dim * group_dim exceeds 1e7.
        #[arg(long)]
        force: bool,
    },
    /// Check the reference tables and a fixed set of orbit counts.
    Verify {
        #[arg(long)]
        skip_orbit: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Reference tables to check instead of the embedded ones (JSON).
        #[arg(long, value_name = "FILE", hide = true)]
        reference: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
}

impl Target {
    fn spec(&self) -> StructureGroupSpec {
        StructureGroupSpec::new(self.family, self.n).unwrap_or_else(|e| usage(&e.to_string()))
    }
}

fn usage(msg: &str) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::ValueValidation, msg)
        .exit()
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), ExitCode> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            ExitCode::from(EXIT_IO)
        }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Bound { target } => {
            let b = displayed(lower_bound(&target.spec(), target.r));
            println!("{}", b.map_or("-".to_string(), |v| v.to_string()));
            Ok(())
        }
        Command::Table {
            family,
            n_max,
            r_max,
            format,
            out,
        } => {
            if n_max == 0 || r_max == 0 {
                usage("--n-max and --r-max must be at least 1");
            }
            emit(&render_table(family, n_max, r_max, format), out.as_deref())
        }
        Command::Orbit {
            target,
            samples,
            seed,
            rel_tol,
            out,
            ledger,
            force,
        } => {
            let spec = target.spec();
            let load = workload(&spec, target.r);
            if load > RESOURCE_LIMIT && !force {
                eprintln!(
                    "error: fiber_dim * group_dim = {load} exceeds {RESOURCE_LIMIT}; pass --force to run anyway"
                );
                return Err(ExitCode::from(EXIT_GUARD));
            }
            let report = match estimate_invariant_count(&spec, target.r, samples, seed, rel_tol) {
                Ok(r) => r,
                Err(JetError::Config(msg)) => usage(&msg),
                Err(e) => {
                    eprintln!("error: {e}");
                    return Err(ExitCode::from(EXIT_VERIFY));
                }
            };
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            emit(&json, out.as_deref())?;
            if let Some(path) = ledger {
                if let Err(e) = ledger_append(&report, &path) {
                    eprintln!("error: ledger {}: {e}", path.display());
                    return Err(ExitCode::from(EXIT_IO));
                }
            }
            if report.ambiguous {
                eprintln!("warning: numerical rank is ambiguous");
                return Err(ExitCode::from(EXIT_AMBIGUOUS));
            }
            Ok(())
        }
        Command::Verify {
            skip_orbit,
            out,
            reference,
        } => {
            let refs = match reference {
                None => References::default(),
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| {
                        eprintln!("error: cannot read {}: {e}", path.display());
                        ExitCode::from(EXIT_IO)
                    })?;
                    serde_json::from_str(&text)
                        .unwrap_or_else(|e| usage(&format!("bad reference file: {e}")))
                }
            };
            let tables = refs.verify();
            let mut text = String::new();
            for m in &tables.mismatches {
                text.push_str(&format!("mismatch: {m}\n"));
            }
            let good = tables.cells - tables.mismatches.len();
            let mut passed = tables.passed();
            if skip_orbit {
                text.push_str(&format!("{good}/{} table cells", tables.cells));
            } else {
                let outcomes = run_orbit_checks();
                for o in &outcomes {
                    text.push_str(&o.describe());
                    text.push('\n');
                }
                let ok = outcomes.iter().filter(|o| o.passed()).count();
                passed &= ok == outcomes.len();
                text.push_str(&format!(
                    "{good}/{} table cells, {ok}/{} orbit checks",
                    tables.cells,
                    outcomes.len()
                ));
            }
            text.push_str(if passed { ": PASS\n" } else { ": FAIL\n" });
            emit(&text, out.as_deref())?;
            if passed {
                Ok(())
            } else {
                Err(ExitCode::from(EXIT_VERIFY))
            }
        }
    }
}
