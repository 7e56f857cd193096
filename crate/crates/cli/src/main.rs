//! `extropy` command-line tool.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extropy::chaos::MapKind;
use extropy::data::DiscretizeMode;
use extropy::selection::Method;
use extropy::LogBase;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<extropy::Error> for CliError {
    fn from(e: extropy::Error) -> Self {
        if e.is_numerical() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "extropy",
    version,
    about = "Extropy, extropy rates and extropy-based feature selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; defaults to $EXTROPY_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Output format (tables default to csv, reports to json).
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Delimited input file.
    #[arg(long)]
    pub data: PathBuf,
    /// Field delimiter (single ASCII character).
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// The first row holds data, not column names.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    /// Discretization for real columns: round:D, equal_width:B or quantile:B.
    #[arg(long, default_value = "quantile:10")]
    pub discretize: DiscretizeMode,
    /// Per-column override, COLUMN=MODE; repeatable.
    #[arg(long = "discretize-column", value_name = "COLUMN=MODE")]
    pub discretize_column: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy, extropy and related measures of a probability table.
    Dist {
        /// Table file: index tuple then probability per line, `#` comments.
        #[arg(long)]
        pmf: PathBuf,
        /// Logarithm base: natural, two or ten.
        #[arg(long, default_value = "natural")]
        base: LogBase,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extropy and entropy rates of successive column prefixes.
    Rate {
        #[command(flatten)]
        table: TableArgs,
        /// Column excluded from the profile.
        #[arg(long)]
        target: Option<String>,
        /// Columns to use, in order (comma separated); default all.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[command(flatten)]
        discretize: DiscretizeArgs,
        /// Logarithm base: natural, two or ten.
        #[arg(long, default_value = "two")]
        base: LogBase,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// ApEn, permutation entropy and extropy rate of time series.
    Complexity {
        /// Series as numeric columns of a file; default the six reference series.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
        #[arg(long)]
        no_header: bool,
        /// Length of generated reference series.
        #[arg(long, default_value_t = extropy::complexity::DEFAULT_LENGTH)]
        length: usize,
        /// Seed for the stochastic reference series (default: per-series seeds).
        #[arg(long)]
        seed: Option<u64>,
        /// Decimal places kept before estimating the extropy rate.
        #[arg(long, default_value_t = extropy::complexity::DEFAULT_ROUND_DECIMALS)]
        decimals: u32,
        /// ApEn embedding dimension.
        #[arg(long, default_value_t = 2)]
        apen_m: usize,
        /// ApEn tolerance as a multiple of the sample standard deviation.
        #[arg(long, default_value_t = 0.2)]
        apen_r: f64,
        /// Permutation-entropy order.
        #[arg(long, default_value_t = 3)]
        pe_order: usize,
        #[arg(long, default_value_t = 1)]
        pe_delay: usize,
        /// Report permutation entropy in log-base units instead of [0, 1].
        #[arg(long)]
        pe_raw: bool,
        /// Logarithm base: natural, two or ten.
        #[arg(long, default_value = "two")]
        base: LogBase,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extropy-rate scan of the logistic or Hénon map.
    Bifurcate {
        #[arg(long, default_value = "logistic")]
        map: MapKind,
        /// Scan start (default: lower end of the map's range).
        #[arg(long)]
        from: Option<f64>,
        /// Scan end (default: upper end of the map's range).
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 151)]
        steps: usize,
        #[arg(long, default_value_t = extropy::chaos::DEFAULT_BURN_IN)]
        burn_in: usize,
        /// Orbit points kept after burn-in.
        #[arg(long, default_value_t = extropy::chaos::DEFAULT_ORBIT_LENGTH)]
        length: usize,
        #[arg(long, default_value_t = extropy::chaos::DEFAULT_ROUND_DECIMALS)]
        decimals: u32,
        /// Initial x (default 0.1).
        #[arg(long)]
        x0: Option<f64>,
        /// Initial Hénon y (default 0.1).
        #[arg(long)]
        y0: Option<f64>,
        /// Hénon b.
        #[arg(long, default_value_t = extropy::chaos::HENON_DEFAULT_B)]
        b: f64,
        /// Logarithm base: natural, two or ten.
        #[arg(long, default_value = "two")]
        base: LogBase,
        /// Also write the orbit points (parameter,value) to this CSV file.
        #[arg(long)]
        diagram: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rank features by extropy rate and by target-based baselines.
    Select {
        #[command(flatten)]
        table: TableArgs,
        /// Class column.
        #[arg(long)]
        target: Option<String>,
        /// Number of features to keep.
        #[arg(long, short)]
        k: usize,
        /// Comma separated: extropy, mi, chi2, fscore, random.
        #[arg(long, value_delimiter = ',', default_value = "extropy,mi,chi2,fscore")]
        methods: Vec<Method>,
        /// Seed for random selection.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        discretize: DiscretizeArgs,
        /// Logarithm base: natural, two or ten.
        #[arg(long, default_value = "two")]
        base: LogBase,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Select features per method, train a forest, report test metrics.
    Evaluate {
        #[command(flatten)]
        table: TableArgs,
        /// Class column.
        #[arg(long)]
        target: String,
        /// Number of features to keep.
        #[arg(long, short)]
        k: usize,
        /// Comma separated: extropy, mi, chi2, fscore, random.
        #[arg(long, value_delimiter = ',', default_value = "extropy,mi,chi2,fscore")]
        methods: Vec<Method>,
        /// Seed for the split, random selection and the forest.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Share of each class held out for testing.
        #[arg(long, default_value_t = extropy::eval::DEFAULT_TEST_FRACTION)]
        test_fraction: f64,
        /// Trees in the forest.
        #[arg(long, default_value_t = 50)]
        trees: usize,
        #[arg(long, default_value_t = 10)]
        max_depth: usize,
        /// Smallest node that may be split.
        #[arg(long, default_value_t = 2)]
        min_split: usize,
        /// Features tried per split (default ceil(sqrt(k))).
        #[arg(long)]
        features_per_split: Option<usize>,
        /// Positive class label (default: the largest label).
        #[arg(long)]
        positive: Option<String>,
        #[command(flatten)]
        discretize: DiscretizeArgs,
        /// Logarithm base: natural, two or ten.
        #[arg(long, default_value = "two")]
        base: LogBase,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Dist { pmf, base, output } => commands::dist(&pmf, base, &output),
        Command::Rate {
            table,
            target,
            columns,
            discretize,
            base,
            output,
        } => commands::rate(
            &table,
            target.as_deref(),
            &columns,
            &discretize,
            base,
            &output,
        ),
        Command::Complexity {
            data,
            delimiter,
            no_header,
            length,
            seed,
            decimals,
            apen_m,
            apen_r,
            pe_order,
            pe_delay,
            pe_raw,
            base,
            output,
        } => commands::complexity(
            &commands::ComplexityOpts {
                data,
                delimiter,
                no_header,
                length,
                seed,
                decimals,
                apen_m,
                apen_r,
                pe_order,
                pe_delay,
                pe_normalized: !pe_raw,
                base,
            },
            &output,
        ),
        Command::Bifurcate {
            map,
            from,
            to,
            steps,
            burn_in,
            length,
            decimals,
            x0,
            y0,
            b,
            base,
            diagram,
            output,
        } => commands::bifurcate(
            &commands::BifurcateOpts {
                map,
                from,
                to,
                steps,
                burn_in,
                length,
                decimals,
                x0,
                y0,
                b,
                base,
                diagram,
            },
            &output,
        ),
        Command::Select {
            table,
            target,
            k,
            methods,
            seed,
            discretize,
            base,
            output,
        } => commands::select(
            &table,
            target.as_deref(),
            k,
            &methods,
            seed,
            &discretize,
            base,
            &output,
        ),
        Command::Evaluate {
            table,
            target,
            k,
            methods,
            seed,
            test_fraction,
            trees,
            max_depth,
            min_split,
            features_per_split,
            positive,
            discretize,
            base,
            output,
        } => commands::evaluate(
            &commands::EvaluateOpts {
                target,
                k,
                methods,
                seed,
                test_fraction,
                trees,
                max_depth,
                min_split,
                features_per_split,
                positive,
                base,
            },
            &table,
            &discretize,
            &output,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
