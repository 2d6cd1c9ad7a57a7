//! `cloven`: verify the cell complexes of one arity, sweep all arities up to
//! a leaf count, list cells, or print the nerve of cut classes.
//!
//! Exit status is 0 when every requested check passes, 1 when a check
//! fails, and 2 on usage, size or output errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cloven::complex::CellComplex;
use cloven::nerve::{build_nerve, nerve_homology};
use cloven::report::{self, BatchOptions, VerifyOptions};
use cloven::trees::{Arity, RotationSystem, DEFAULT_SIZE_GUARD};
use cloven::Error;

#[derive(Parser, Debug)]
#[command(
    name = "cloven",
    version,
    about = "Exact checks on cell complexes of directed planar trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Largest number of boundary leaves accepted.
    #[arg(long = "max-n", global = true, env = "CLOVEN_MAX_N", default_value_t = DEFAULT_SIZE_GUARD)]
    max_n: usize,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Add wall-clock timings to reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// JSON
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check for one arity.
    Verify(ArityArgs),
    /// Run every check for each arity up to a leaf count, one per rotation class.
    Batch {
        #[arg(long = "max-leaves")]
        max_leaves: usize,
        #[arg(long = "k-min", default_value_t = 2)]
        k_min: usize,
        #[arg(long = "k-max")]
        k_max: Option<usize>,
        /// Recheck rotation invariance on classes with at most this many leaves.
        #[arg(long = "rotation-sample", default_value_t = 6)]
        rotation_sample: usize,
    },
    /// Cell census of the full complex, optionally with every cell.
    Cells {
        #[command(flatten)]
        arity: ArityArgs,
        /// List every cell key with its syzygy degree.
        #[arg(long = "list-keys")]
        list_keys: bool,
        /// Print the coboundary as `degree row_key col_key entry` lines.
        #[arg(long)]
        listing: bool,
    },
    /// Facets and homology of the nerve of jointly realizable cut classes.
    Nerve(ArityArgs),
}

#[derive(Args, Debug)]
struct ArityArgs {
    /// Number of outputs.
    #[arg(long)]
    k: usize,
    /// Input block sizes, comma separated, one per output.
    #[arg(long)]
    inputs: String,
}

impl ArityArgs {
    fn arity(&self) -> Result<Arity, Failure> {
        let arity: Arity = format!("({};{})", self.k, self.inputs)
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?;
        Ok(arity)
    }
}

enum Failure {
    /// A mathematical check failed.
    Check(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut inner = &e;
        while let Error::Stage { source, .. } = inner {
            inner = source;
        }
        match inner {
            Error::NotSquareZero { .. } | Error::NotSubcomplex { .. } => {
                Failure::Check(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Output text and whether every check passed.
struct Outcome {
    text: String,
    pass: bool,
    witnesses: Vec<String>,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn verify(cli: &Cli, args: &ArityArgs) -> Result<Outcome, Failure> {
    let arity = args.arity()?;
    let opts = VerifyOptions {
        guard: cli.max_n,
        timings: cli.timings,
        digests: true,
    };
    let r = report::verify_arity(&arity, &opts)?;
    let witnesses = r
        .checks
        .named()
        .into_iter()
        .filter_map(|(name, c)| {
            c.witness
                .as_ref()
                .map(|w| format!("{}: {name}: {w}", r.arity))
        })
        .collect();
    let text = match cli.format {
        Format::Text => report::render_text(&r),
        Format::Structured => json(&r),
    };
    Ok(Outcome {
        text,
        pass: r.all_pass,
        witnesses,
    })
}

fn batch(
    cli: &Cli,
    max_leaves: usize,
    k_min: usize,
    k_max: Option<usize>,
    sample: usize,
) -> Result<Outcome, Failure> {
    let mut opts = BatchOptions::new(max_leaves);
    opts.k_min = k_min;
    opts.k_max = k_max.unwrap_or(max_leaves);
    opts.rotation_sample_max_leaves = sample;
    opts.verify.guard = cli.max_n;
    opts.verify.timings = cli.timings;
    let b = report::batch(&opts)?;
    let mut witnesses = Vec::new();
    for e in &b.entries {
        if let Some(err) = &e.error {
            witnesses.push(format!("{}: {err}", e.arity));
        }
        if let Some(r) = &e.report {
            for (name, c) in r.checks.named() {
                if let Some(w) = &c.witness {
                    witnesses.push(format!("{}: {name}: {w}", e.arity));
                }
            }
        }
    }
    for c in b.rotation_checks.iter().filter(|c| !c.consistent) {
        witnesses.push(format!(
            "{} ~ {}: {}",
            c.arity,
            c.rotation,
            c.witness.as_deref().unwrap_or("differs")
        ));
    }
    let text = match cli.format {
        Format::Text => report::render_batch_text(&b),
        Format::Structured => json(&b),
    };
    Ok(Outcome {
        text,
        pass: b.all_pass,
        witnesses,
    })
}

#[derive(Serialize)]
struct CellRecord {
    key: String,
    degree: usize,
    record: RotationSystem,
}

#[derive(Serialize)]
struct CellsDoc {
    schema: &'static str,
    arity: String,
    census: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<Vec<CellRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    listing: Option<String>,
}

fn cells(cli: &Cli, args: &ArityArgs, list_keys: bool, listing: bool) -> Result<Outcome, Failure> {
    let arity = args.arity()?;
    let full = CellComplex::build_full(&arity, cli.max_n)?;
    let census = full.census();
    let text = match cli.format {
        Format::Text => {
            let mut out = format!("% cells of {}\n", arity);
            for (s, n) in census.iter().enumerate() {
                out.push_str(&format!("s={s}: {n}\n"));
            }
            if list_keys {
                for s in 0..full.n_degrees() {
                    for c in full.cells(s) {
                        out.push_str(&format!("{s} {}\n", c.key));
                    }
                }
            }
            if listing {
                out.push_str(&full.to_listing());
            }
            out
        }
        Format::Structured => {
            let cells = list_keys.then(|| {
                (0..full.n_degrees())
                    .flat_map(|s| {
                        full.cells(s).map(move |c| CellRecord {
                            key: c.key.to_string(),
                            degree: s,
                            record: c.key.decode(),
                        })
                    })
                    .collect()
            });
            json(&CellsDoc {
                schema: report::SCHEMA,
                arity: arity.to_string(),
                census,
                cells,
                listing: listing.then(|| full.to_listing()),
            })
        }
    };
    Ok(Outcome {
        text,
        pass: true,
        witnesses: Vec::new(),
    })
}

#[derive(Serialize)]
struct NerveDoc {
    schema: &'static str,
    arity: String,
    vertices: Vec<[usize; 2]>,
    f_vector: Vec<usize>,
    facets: Vec<Vec<[usize; 2]>>,
    homology: cloven::homology::HomologySummary,
    dimension_bound: bool,
}

fn nerve(cli: &Cli, args: &ArityArgs) -> Result<Outcome, Failure> {
    let arity = args.arity()?;
    arity.check_guard(cli.max_n)?;
    let n = build_nerve(&arity)?;
    let h = nerve_homology(&n);
    let bound = n.dimension().is_none_or(|d| d + 2 <= arity.k());
    let text = match cli.format {
        Format::Text => format!(
            "{}% homology {}\n",
            n.to_facet_list(),
            report::betti_text(&h)
        ),
        Format::Structured => json(&NerveDoc {
            schema: report::SCHEMA,
            arity: arity.to_string(),
            vertices: n.vertices.iter().map(|&c| c.into()).collect(),
            f_vector: n.f_vector(),
            facets: n
                .facets()
                .into_iter()
                .map(|f| f.into_iter().map(Into::into).collect())
                .collect(),
            homology: h,
            dimension_bound: bound,
        }),
    };
    let witnesses = if bound {
        Vec::new()
    } else {
        vec![format!(
            "{arity}: nerve dimension {:?} exceeds k - 2",
            n.dimension()
        )]
    };
    Ok(Outcome {
        text,
        pass: bound,
        witnesses,
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Verify(a) => verify(cli, a),
        Command::Batch {
            max_leaves,
            k_min,
            k_max,
            rotation_sample,
        } => batch(cli, *max_leaves, *k_min, *k_max, *rotation_sample),
        Command::Cells {
            arity,
            list_keys,
            listing,
        } => cells(cli, arity, *list_keys, *listing),
        Command::Nerve(a) => nerve(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool is configured once");
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &outcome.text),
        None => io::stdout().lock().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        let target = cli
            .out
            .as_ref()
            .map_or("standard output".into(), |p| p.display().to_string());
        eprintln!("error: cannot write {target}: {e}");
        return ExitCode::from(2);
    }
    for w in &outcome.witnesses {
        eprintln!("FAIL {w}");
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
