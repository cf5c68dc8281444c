//! `superstring`: period statistics, ratio tables and cycle-cover assembly
//! for sets of uniform-length reads.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use superstring_core::assembler::{self, AlphaChoice, AssembleOptions, AssemblyStats};
use superstring_core::cover::CoverBackend;
use superstring_core::graph::{GraphBackend, GraphOptions, DEFAULT_INDEXED_THRESHOLD};
use superstring_core::oracle::{exact_ssp, DEFAULT_SSP_LIMIT};
use superstring_core::reads::{dedupe, read_path, Format, LengthPolicy, ParseOptions, Parsed};
use superstring_core::stats::{
    self, histogram, plot_data, ratio_table, select_alpha, CompressionFactor, RatioRow,
};
use superstring_core::strings::Alphabet;
use superstring_core::{ReadSet, SspError};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "superstring", version, about)]
struct Cli {
    /// Worker threads (default: logical cores). Never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Period histogram, ratio table, plot data and the best alpha.
    Analyze(AnalyzeArgs),
    /// Build a superstring with the cycle-cover pipeline.
    Assemble(AssembleArgs),
    /// Check that every read occurs in a superstring.
    Verify(VerifyArgs),
    /// Exact shortest superstring of a small read set.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// fasta, fastq or raw; sniffed from the first byte when omitted.
    #[arg(long)]
    format: Option<String>,
    /// dna, protein or any.
    #[arg(long, default_value = "any")]
    alphabet: String,
    /// strict or filter-to-modal.
    #[arg(long, default_value = "strict")]
    length_policy: String,
}

impl InputArgs {
    fn load(&self) -> Result<Parsed, SspError> {
        let opts = ParseOptions {
            format: self.format.as_deref().map(str::parse::<Format>).transpose()?,
            alphabet: self.alphabet.parse::<Alphabet>()?,
            length_policy: self.length_policy.parse::<LengthPolicy>()?,
        };
        let parsed = read_path(&self.input, opts)?;
        if parsed.dropped > 0 {
            eprintln!("dropped {} reads of non-modal length", parsed.dropped);
        }
        Ok(parsed)
    }
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Compression factor as a fraction.
    #[arg(long, default_value = "38/63")]
    c: String,
    /// Ratio table TSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot data CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// JSON report.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Omit table rows with no reads of that period.
    #[arg(long)]
    suppress_empty: bool,
    /// Count distinct reads only instead of the raw multiset.
    #[arg(long)]
    dedupe: bool,
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TauFormat {
    Fasta,
    Raw,
}

#[derive(Args, Debug)]
struct AssembleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// `auto` or a value in (0, 1].
    #[arg(long, default_value = "auto")]
    alpha: String,
    /// Compression factor of the executed compression step.
    #[arg(long, default_value = "1/2")]
    c: String,
    /// exact or greedy.
    #[arg(long, default_value = "exact")]
    cover: String,
    /// Superstring output (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fasta")]
    out_format: TauFormat,
    /// Stats JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Cycle cover JSON dump.
    #[arg(long)]
    cover_json: Option<PathBuf>,
    /// Prefix graph TSV dump.
    #[arg(long)]
    graph_tsv: Option<PathBuf>,
    /// naive, indexed or auto.
    #[arg(long, default_value = "auto")]
    graph: String,
    /// Largest vertex count the dense graph may hold.
    #[arg(long, default_value_t = superstring_core::graph::DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    /// Largest vertex count for the exact cover.
    #[arg(long, default_value_t = 3_000)]
    exact_max: usize,
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// FASTA or plain text superstring.
    #[arg(long)]
    superstring: PathBuf,
    #[arg(long)]
    reads: PathBuf,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value = "any")]
    alphabet: String,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Maximum substring-free input count.
    #[arg(long, default_value_t = DEFAULT_SSP_LIMIT)]
    limit: usize,
}

/// Distinguishes a failed check (exit 1) from errors (exit 2 or 3).
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Assemble(a) => cmd_assemble(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                SspError::Capacity { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, SspError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), SspError> {
    let text = serde_json::to_string_pretty(value).map_err(io::Error::from)?;
    match path {
        Some(p) => {
            let mut f = create(p)?;
            writeln!(f, "{text}")?;
            f.flush()?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn timestamp(suppress: bool) -> Option<u64> {
    if suppress {
        return None;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

/// Output paths must differ from each other and from the input.
fn check_distinct(input: &Path, outputs: &[Option<&PathBuf>]) -> Result<(), SspError> {
    let mut seen: Vec<&Path> = vec![input];
    for p in outputs.iter().flatten() {
        if seen.contains(&p.as_path()) {
            return Err(SspError::Argument(format!(
                "path {} is used more than once",
                p.display()
            )));
        }
        seen.push(p);
    }
    Ok(())
}

#[derive(Serialize)]
struct HistogramEntry {
    period: usize,
    count: u64,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
    source: &'a str,
    n: u64,
    m: usize,
    deduplicated: bool,
    dropped_reads: usize,
    c: String,
    c_value: f64,
    selected: RatioRow,
    /// `small_term` at `alpha = 1` is at least `c / 2`.
    small_term_floor_holds: bool,
    histogram: Vec<HistogramEntry>,
    rows: Vec<RatioRow>,
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome, SspError> {
    check_distinct(
        &args.input.input,
        &[args.out.as_ref(), args.plot.as_ref(), args.json.as_ref()],
    )?;
    let c: CompressionFactor = args.c.parse()?;
    let parsed = args.input.load()?;
    let reads = if args.dedupe {
        dedupe(&parsed.reads).reads
    } else {
        parsed.reads
    };
    let h = histogram(&reads);
    let table = ratio_table(&h, c);
    let selected = select_alpha(&table)?;
    let last = table.last().expect("m >= 1");
    let floor_holds = last.small_term >= c.value() / 2.0 * (1.0 - 1e-12);
    if !floor_holds {
        eprintln!("warning: small_term at alpha = 1 is below c/2");
    }

    let shown: Vec<RatioRow> = if args.suppress_empty {
        table.iter().copied().filter(|r| r.nbseq > 0).collect()
    } else {
        table.clone()
    };
    match &args.out {
        Some(p) => {
            let mut f = create(p)?;
            stats::write_table_tsv(&shown, &mut f)?;
            f.flush()?;
        }
        None => stats::write_table_tsv(&shown, io::stdout().lock())?,
    }
    if let Some(p) = &args.plot {
        let mut f = create(p)?;
        stats::write_plot_csv(&plot_data(&h, &selected), &mut f)?;
        f.flush()?;
    }
    if let Some(p) = &args.json {
        let report = AnalyzeReport {
            schema_version: SCHEMA_VERSION,
            generated_unix: timestamp(args.no_timestamp),
            source: reads.source(),
            n: h.n(),
            m: h.m(),
            deduplicated: args.dedupe,
            dropped_reads: parsed.dropped,
            c: c.to_string(),
            c_value: c.value(),
            selected,
            small_term_floor_holds: floor_holds,
            histogram: h
                .nonzero()
                .map(|(period, count)| HistogramEntry { period, count })
                .collect(),
            rows: table,
        };
        write_json(&report, Some(p))?;
    }
    println!(
        "selected\tperiod={}\talpha={}\tbeta={}\tn={}\tm={}",
        selected.period,
        stats::format_sig(selected.alpha, 6),
        stats::format_sig(selected.beta, 6),
        h.n(),
        h.m()
    );
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct AssembleReport<'a> {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
    source: &'a str,
    cover: &'a str,
    #[serde(flatten)]
    stats: &'a AssemblyStats,
    verified: bool,
}

fn parse_graph_backend(s: &str) -> Result<GraphBackend, SspError> {
    match s.to_ascii_lowercase().as_str() {
        "naive" => Ok(GraphBackend::Naive),
        "indexed" => Ok(GraphBackend::Indexed),
        "auto" => Ok(GraphBackend::Auto {
            threshold: DEFAULT_INDEXED_THRESHOLD,
        }),
        other => Err(SspError::Argument(format!("unknown graph backend `{other}`"))),
    }
}

fn cmd_assemble(args: &AssembleArgs) -> Result<Outcome, SspError> {
    check_distinct(
        &args.input.input,
        &[
            args.out.as_ref(),
            args.stats.as_ref(),
            args.cover_json.as_ref(),
            args.graph_tsv.as_ref(),
        ],
    )?;
    let opts = AssembleOptions {
        alpha: args.alpha.parse::<AlphaChoice>()?,
        c: args.c.parse()?,
        backend: args.cover.parse::<CoverBackend>()?,
        graph: GraphOptions {
            backend: parse_graph_backend(&args.graph)?,
            max_vertices: args.max_vertices,
        },
        exact_max_vertices: args.exact_max,
    };
    let reads = args.input.load()?.reads;
    let asm = assembler::assemble(&reads, &opts)?;
    if asm.stats.degenerate {
        eprintln!("note: a single distinct read; the superstring is the read itself");
    }
    let report = assembler::verify(asm.tau.as_bytes(), &reads);

    let header = format!("superstring n={} m={} len={}", asm.stats.n, asm.stats.m, asm.tau.len());
    let write_tau = |w: &mut dyn Write| -> Result<(), SspError> {
        match args.out_format {
            TauFormat::Fasta => assembler::write_fasta(&asm.tau, &header, w),
            TauFormat::Raw => assembler::write_raw(&asm.tau, w),
        }
    };
    match &args.out {
        Some(p) => {
            let mut f = create(p)?;
            write_tau(&mut f)?;
            f.flush()?;
        }
        None => write_tau(&mut io::stdout().lock())?,
    }

    let json = AssembleReport {
        schema_version: SCHEMA_VERSION,
        generated_unix: timestamp(args.no_timestamp),
        source: reads.source(),
        cover: &args.cover,
        stats: &asm.stats,
        verified: report.pass,
    };
    match &args.stats {
        Some(p) => write_json(&json, Some(p))?,
        None => eprintln!(
            "tau_len={} w_sigma_len={} wt_C={} alpha={} beta_bound={}",
            asm.stats.tau_len,
            asm.stats.w_sigma_len,
            asm.stats.wt_c,
            stats::format_sig(asm.stats.alpha, 6),
            stats::format_sig(asm.stats.beta_bound, 6)
        ),
    }
    if let (Some(p), Some(cover)) = (&args.cover_json, &asm.cover) {
        write_json(cover, Some(p))?;
    }
    if let Some(p) = &args.graph_tsv {
        let distinct = dedupe(&reads).reads;
        if distinct.n() >= 2 {
            let g = superstring_core::graph::build(&distinct, &opts.graph)?;
            let mut f = create(p)?;
            g.write_tsv(&mut f)?;
            f.flush()?;
        }
    }
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

/// FASTA (headers dropped, lines joined) or plain text (whitespace dropped).
fn load_superstring(path: &Path) -> Result<Vec<u8>, SspError> {
    let text = std::fs::read(path)?;
    let mut out = Vec::with_capacity(text.len());
    for line in text.split(|&b| b == b'\n') {
        if line.first() == Some(&b'>') {
            continue;
        }
        out.extend(line.iter().filter(|b| !b.is_ascii_whitespace()));
    }
    out.make_ascii_uppercase();
    Ok(out)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    schema_version: u32,
    superstring_len: usize,
    #[serde(flatten)]
    report: &'a assembler::VerifyReport,
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, SspError> {
    let tau = load_superstring(&args.superstring)?;
    let opts = ParseOptions {
        format: args.format.as_deref().map(str::parse::<Format>).transpose()?,
        alphabet: args.alphabet.parse()?,
        length_policy: LengthPolicy::Strict,
    };
    let reads: ReadSet = read_path(&args.reads, opts)?.reads;
    let report = assembler::verify(&tau, &reads);
    write_json(
        &VerifyOutput {
            schema_version: SCHEMA_VERSION,
            superstring_len: tau.len(),
            report: &report,
        },
        None,
    )?;
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct OracleOutput {
    schema_version: u32,
    n_distinct: usize,
    value: usize,
    witness: String,
}

fn cmd_oracle(args: &OracleArgs) -> Result<Outcome, SspError> {
    let reads = dedupe(&args.input.load()?.reads).reads;
    let strings: Vec<&[u8]> = reads.reads().iter().map(|r| r.as_bytes()).collect();
    let result = exact_ssp(&strings, args.limit)?;
    write_json(
        &OracleOutput {
            schema_version: SCHEMA_VERSION,
            n_distinct: reads.n(),
            value: result.value,
            witness: String::from_utf8_lossy(&result.witness).into_owned(),
        },
        None,
    )?;
    Ok(Outcome::Pass)
}
