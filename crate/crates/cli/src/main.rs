use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (schema inventory 4.0)");

/// Tools for UniMorph inflection, segmentation and derivation data.
#[derive(Debug, Parser)]
#[command(name = "unimorph", version = VERSION)]
struct Cli {
    /// Worker threads; 0 uses one per core. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Count warnings toward the exit status.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemaArg {
    Flat,
    Hier,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Hier,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Tsv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check inflection files and print diagnostics and lemma/form counts.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = SchemaArg::Auto)]
        schema: SchemaArg,
        /// Reject tags that are not in the inventory.
        #[arg(long)]
        strict_tags: bool,
        /// `surface<TAB>display` stems accepted in segmentation columns.
        #[arg(long)]
        stem_map: Option<PathBuf>,
    },
    /// Convert feature annotations between the flat and hierarchical schemas.
    Convert {
        path: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        profile: PathBuf,
        /// Rows that cannot be converted are written here.
        #[arg(long)]
        rejects: Option<PathBuf>,
    },
    /// Segment forms into morphs with a morpheme table.
    Segment {
        path: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        overrides: Option<PathBuf>,
        #[arg(long)]
        stem_map: Option<PathBuf>,
        /// Emit every parse instead of the preferred one.
        #[arg(long)]
        all_parses: bool,
    },
    /// List the inflection classes compatible with each lemma.
    InferParadigms {
        path: PathBuf,
        #[arg(long)]
        inventory: PathBuf,
        /// Ignore observed cells a class does not define.
        #[arg(long)]
        lenient: bool,
    },
    /// Merge preliminary derivation records into final ones.
    FuseDerivations {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Print per-language lemma/derivation/morpheme counts instead of records.
        #[arg(long)]
        stats: bool,
        /// Write the fused records to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Fill missing affixes that concatenation explains exactly.
        #[arg(long)]
        infer_affixes: bool,
    },
    /// Score an inflection file against a CoNLL-U treebank.
    EvalUd {
        unimorph: PathBuf,
        conllu: PathBuf,
        /// UD to UniMorph mapping profile.
        #[arg(long)]
        profile: PathBuf,
        /// Conversion profile for hierarchical entries.
        #[arg(long)]
        schema_profile: Option<PathBuf>,
        /// Count a match when the dataset features are a subset of the mapped ones.
        #[arg(long)]
        partial: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

/// Error and warning totals of a run.
#[derive(Debug, Default, Clone, Copy)]
pub struct Outcome {
    pub errors: usize,
    pub warnings: usize,
}

impl Outcome {
    fn exit_code(self, strict: bool) -> u8 {
        if self.errors > 0 || (strict && self.warnings > 0) {
            1
        } else {
            0
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("unimorph: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| commands::run(cli.command)) {
        Ok(outcome) => ExitCode::from(outcome.exit_code(cli.strict)),
        Err(e) => {
            eprintln!("unimorph: {e:#}");
            ExitCode::from(2)
        }
    }
}
