//! `qfp`: run fingerprinting experiments from the command line.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{EngineArg, SubsetSize};

#[derive(Debug, Parser)]
#[command(
    name = "qfp",
    version,
    about = "Simulate distributed quantum fingerprinting protocols"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sampled runs. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Amplitudes of the fingerprint of a bit string.
    Fingerprint {
        /// Bits such as `0110` or `0^16`.
        #[arg(long)]
        input: String,
    },
    /// Two-party distributed fingerprint construction.
    Protocol1 {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "sqrt")]
        s: SubsetSize,
        /// Alice's input; random when omitted.
        #[arg(long)]
        x: Option<String>,
        /// Bob's input; random when omitted.
        #[arg(long)]
        y: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
    },
    /// Construction for k parties.
    Kparty {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Defaults to round(n^((k-1)/k)).
        #[arg(long)]
        s: Option<SubsetSize>,
        /// Comma-separated inputs, one per party; random when omitted.
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
    },
    /// Four-party sum test over Z_2^k with a linear code.
    Lin4 {
        /// `builtin:<name>` or a generator-matrix file.
        #[arg(long, default_value = "builtin:ext-hamming-8-4")]
        code: String,
        /// x1,x2,x3,x4.
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        s: Option<SubsetSize>,
        /// Construction repetitions per pair.
        #[arg(long, default_value_t = 1)]
        reps: u32,
        /// SWAP tests behind the decision.
        #[arg(long, default_value_t = 3)]
        swap_reps: u32,
        #[arg(long)]
        threshold: Option<f64>,
        /// Use codewords as given, without zero padding.
        #[arg(long)]
        no_balance: bool,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
    },
    /// Four-party sum test in a finite Abelian group.
    GroupLin4 {
        /// Cyclic factors, e.g. `5x7`.
        #[arg(long)]
        group: String,
        /// Number of characters; defaults to c*log2|G|.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 8.0)]
        c: f64,
        /// Four elements written `a:b` (one coordinate per factor).
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        s: Option<SubsetSize>,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        #[arg(long, default_value_t = 3)]
        swap_reps: u32,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
    },
    /// Distribution of the largest fingerprint overlap over seeded draws.
    Overlap {
        #[arg(long)]
        group: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 8.0)]
        c: f64,
        /// Number of character draws.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        /// Sample this many differences instead of enumerating the group.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Success, fidelity and cost against n.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "9,16,25,36")]
        n_list: Vec<usize>,
        #[arg(long, default_value = "sqrt")]
        s: SubsetSize,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
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
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use qfp_core::Error;
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        Some(Error::Invariant(_)) | Some(Error::NotNormalized(_)) => 4,
        Some(_) => 2,
        None => 1,
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        anyhow::ensure!(
            t > 0,
            qfp_core::Error::Range("--threads must be positive".into())
        );
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    let report = pool.install(|| commands::execute(&cli.command, cli.seed))?;
    if let Some(name) = report.non_finite() {
        return Err(
            qfp_core::Error::Invariant(format!("non-finite value in column {name}")).into(),
        );
    }
    let text = match cli.format {
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
