use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nearby_core::cohomology::lefschetz_consistency;
use nearby_core::hermitian::epsilon_of;
use nearby_core::localmodel::check_scale;
use nearby_core::{Error, Result};
use serde_json::{json, Value};

use nearby_cli::commands::{
    jacobi_checks, lefschetz_check, localmodel_artifact, localmodel_checks,
    nearby_cycles_artifacts, nearby_cycles_checks, quadric_checks, FormSpec,
};
use nearby_cli::report::{run_checks, CheckReport, PendingCheck};
use nearby_cli::suites::suites;

#[derive(Parser, Debug)]
#[command(
    name = "nearby",
    version,
    about = "Exact checks for nearby cycles on the ramified unitary local model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    run: RunConfig,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Default directory for reports when --output is not given.
    #[arg(long, global = true, env = "NEARBY_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    /// Run independent checks on this many threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jacobi sums: oracles against the closed form, plus the recursion.
    Jacobi {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Omit to run m = 1..=4.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "convolution")]
        method: Vec<String>,
    },
    /// Projective point counts of a diagonal quadric.
    Quadric {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = "split")]
        form: FormSpec,
        #[arg(long, value_delimiter = ',', default_value = "bruteforce,weil,jacobi")]
        counter: Vec<String>,
    },
    /// Special fiber, its blow-up, strata and point-count identities.
    Localmodel {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = "split")]
        form: FormSpec,
        #[arg(long, default_value = "pruned")]
        enumerator: String,
    },
    /// Spectral pages, stalks, trace and the Lefschetz comparison.
    NearbyCycles {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: Option<usize>,
        /// Extension degree for the Lefschetz comparison.
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = "split")]
        form: FormSpec,
    },
    /// Run a named check grid.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn base_params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn execute(cmd: &Command, jobs: Option<usize>) -> Result<CheckReport> {
    match cmd {
        Command::Jacobi { p, k, m, method } => {
            let ms: Vec<usize> = m.map_or_else(|| (1..=4).collect(), |m| vec![m]);
            let mut pending = Vec::new();
            for m in &ms {
                pending.extend(jacobi_checks(*p, *k, *m, method)?);
            }
            let params = base_params(&[
                ("p", json!(p)),
                ("k", json!(k)),
                ("m", json!(ms)),
                ("method", json!(method)),
            ]);
            run_checks("jacobi", params, pending, jobs)
        }
        Command::Quadric {
            p,
            n,
            k,
            form,
            counter,
        } => {
            let entries = form.datum(*p, *n)?.diagonal();
            let params = base_params(&[
                ("p", json!(p)),
                ("n", json!(entries.len())),
                ("k", json!(k)),
                ("form", json!(form.label())),
                ("entries", json!(entries)),
            ]);
            let pending = quadric_checks(*p, *k, entries, counter)?;
            run_checks("quadric", params, pending, jobs)
        }
        Command::Localmodel {
            p,
            n,
            k,
            form,
            enumerator,
        } => {
            let datum = form.datum(*p, *n)?;
            let params = base_params(&[
                ("p", json!(p)),
                ("n", json!(datum.n())),
                ("k", json!(k)),
                ("form", json!(form.label())),
                ("entries", json!(datum.diagonal())),
                ("enumerator", json!(enumerator)),
            ]);
            let pending = localmodel_checks(&datum, *k, enumerator)?;
            let mut report = run_checks("localmodel", params, pending, jobs)?;
            report.artifacts.insert(
                "summary".into(),
                localmodel_artifact(&datum, *k, enumerator)?,
            );
            Ok(report)
        }
        Command::NearbyCycles { p, n, k, form } => {
            let datum = form.datum(*p, *n)?;
            let eps = epsilon_of(&datum);
            let n = datum.n();
            let params = base_params(&[
                ("p", json!(p)),
                ("n", json!(n)),
                ("k", json!(k)),
                ("form", json!(form.label())),
                ("epsilon", json!(eps)),
            ]);
            let mut pending: Vec<PendingCheck> = nearby_cycles_checks(n, eps, *p)?;
            let feasible = check_scale(*p, n, *k).is_ok();
            if feasible && n >= 3 {
                pending.push(lefschetz_check(&datum, *k)?);
            }
            let mut report = run_checks("nearby-cycles", params, pending, jobs)?;
            report.artifacts = nearby_cycles_artifacts(n, eps, *p)?;
            if feasible && n == 2 {
                // Reported only; see the README on the n = 2 comparison.
                let r = lefschetz_consistency(&datum, *k)?;
                report
                    .artifacts
                    .insert("lefschetz".into(), serde_json::to_value(r).expect("report"));
            }
            Ok(report)
        }
        Command::Verify { suite } => {
            let pending = suites().get(suite)?.checks()?;
            run_checks(
                "verify",
                base_params(&[("suite", json!(suite))]),
                pending,
                jobs,
            )
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Jacobi { .. } => "jacobi",
        Command::Quadric { .. } => "quadric",
        Command::Localmodel { .. } => "localmodel",
        Command::NearbyCycles { .. } => "nearby-cycles",
        Command::Verify { .. } => "verify",
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_scale_refusal() {
        3
    } else if e.is_internal() {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match execute(&cli.command, cli.run.jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let body = match cli.run.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    let target = cli.run.output.clone().or_else(|| {
        cli.run.output_dir.as_ref().map(|d| {
            d.join(format!(
                "{}.{}",
                command_name(&cli.command),
                cli.run.format.ext()
            ))
        })
    });
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            eprintln!(
                "{} -> {}",
                if report.pass { "PASS" } else { "FAIL" },
                path.display()
            );
        }
        None => print!("{body}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
