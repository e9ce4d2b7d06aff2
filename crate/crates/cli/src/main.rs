mod error;
mod manifest;

use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use ariel_core::adapter::{serve, ExternalEmbedder, NoiseMode, NoisyChannel, NoisyChannelConfig};
use ariel_core::dataset::{generate_biased, generate_unbiased, read_sentences, split, write_sentences, ObjectCatalog, SplitSpec};
use ariel_core::eval::{
    eval_generalization, eval_generation, eval_reconstruction, Granularity, Table1Row, TABLE1_HEADER,
};
use ariel_core::grammar::DEFAULT_TEMPLATE_CAP;
use ariel_core::model::EmpiricalModel;
use ariel_core::vector::{format_exact, format_sentence, format_vector, parse_exact, parse_sentence, parse_vector};
use ariel_core::{fixtures, ArielEmbedder, Codec, CodecConfig, Embedder, ErrorCode, Grammar, GrammarError, OutputMode, SymbolModel};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use error::CliError;
use manifest::RunManifest;

/// Arithmetic embedding of context-free languages.
#[derive(Debug, Parser)]
#[command(name = "ariel", version)]
struct Cli {
    /// Grammar file, or `builtin:toy|questions|mini`.
    #[arg(long, global = true, env = "ARIEL_GRAMMAR")]
    grammar: Option<String>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Record the wall-clock time in output manifests.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CodecArgs {
    /// Latent dimensions.
    #[arg(long, default_value_t = 16)]
    dims: usize,
    /// `uniform-sentence`, `uniform-branch` or `empirical:<sentence file>`.
    #[arg(long, default_value = "uniform-sentence")]
    model: String,
    /// Mix dimensions with a seeded orthonormal rotation.
    #[arg(long)]
    rotate_seed: Option<u64>,
    /// Exact rational coordinates (`num/den`).
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct EmbedderArgs {
    /// `ariel`, `exec:<command>` or `noisy:<p>` (resampling noise over ariel).
    #[arg(long, default_value = "ariel")]
    embedder: String,
    /// Seconds to wait for each reply from an `exec:` embedder.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
    /// Print a single comparison-table row instead of key-value lines.
    #[arg(long)]
    table1: bool,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Language size, template count and vocabulary size.
    Stats,
    /// Generate a deduplicated dataset and split it into train and test files.
    GenDataset {
        #[arg(long, conflicts_with = "biased")]
        unbiased: bool,
        #[arg(long, requires = "catalog")]
        biased: bool,
        /// Object catalog file, or `builtin`.
        #[arg(long)]
        catalog: Option<String>,
        /// Sentences to generate.
        #[arg(short = 'n', long)]
        count: usize,
        /// Sentences held out for the test file.
        #[arg(long, default_value_t = 0)]
        test: usize,
        /// Cap on training sentences.
        #[arg(long)]
        train: Option<usize>,
        /// Training output; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        test_out: Option<PathBuf>,
    },
    /// Sentences on standard input to latent vectors.
    Encode(CodecArgs),
    /// Latent vectors on standard input to sentences.
    Decode(CodecArgs),
    /// Draw latent points uniformly and decode them.
    Sample {
        #[arg(short = 'n', long)]
        count: usize,
        /// Prefix each sentence with its latent vector and a tab.
        #[arg(long)]
        vectors: bool,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Allowed next words for each prefix on standard input.
    Next,
    /// Answer protocol requests on standard input with the in-process codec.
    Serve(CodecArgs),
    /// Validity, uniqueness and coverage of decoded latent samples.
    EvalGeneration {
        #[arg(short = 'k', long, default_value_t = 10_000)]
        samples: usize,
        /// `rules`, `templates` or `sentences`.
        #[arg(long, default_value_t = Granularity::Rules)]
        granularity: Granularity,
        #[command(flatten)]
        embedder: EmbedderArgs,
    },
    /// Encode-decode accuracy over a test set.
    EvalReconstruction {
        /// Test sentences; drawn uniformly from the language if absent.
        #[arg(long)]
        test_file: Option<PathBuf>,
        /// Size of a drawn test set.
        #[arg(short = 'k', long, default_value_t = 1_000)]
        samples: usize,
        #[command(flatten)]
        embedder: EmbedderArgs,
    },
    /// Reconstruction on biased and unbiased test sets, and their gap.
    EvalGeneralization {
        #[arg(long)]
        biased_file: Option<PathBuf>,
        #[arg(long)]
        unbiased_file: Option<PathBuf>,
        /// Catalog for drawing the biased set, or `builtin`.
        #[arg(long)]
        catalog: Option<String>,
        #[arg(short = 'k', long, default_value_t = 1_000)]
        samples: usize,
        #[command(flatten)]
        embedder: EmbedderArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Stats => "stats",
            Command::GenDataset { .. } => "gen-dataset",
            Command::Encode(_) => "encode",
            Command::Decode(_) => "decode",
            Command::Sample { .. } => "sample",
            Command::Next => "next",
            Command::Serve(_) => "serve",
            Command::EvalGeneration { .. } => "eval-generation",
            Command::EvalReconstruction { .. } => "eval-reconstruction",
            Command::EvalGeneralization { .. } => "eval-generalization",
        }
    }
}

struct Context {
    grammar: Arc<Grammar>,
    manifest: RunManifest,
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error[E_USAGE]: {}", first_line(&e.to_string()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}

fn first_line(s: &str) -> &str {
    s.trim().lines().next().unwrap_or("").trim_start_matches("error: ")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let source = cli
        .grammar
        .clone()
        .ok_or_else(|| CliError::Usage("no grammar given; pass --grammar or set ARIEL_GRAMMAR".into()))?;
    let grammar = Arc::new(Grammar::parse(&load_text(&source, builtin_grammar)?)?);
    let args: Vec<String> = std::env::args().skip(1).collect();
    let manifest = RunManifest::new(cli.command.name(), args, cli.seed, &source, grammar.content_hash(), cli.timestamp);
    let ctx = Context {
        grammar,
        manifest,
        seed: cli.seed,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Stats => stats(&ctx, &mut out)?,
        Command::GenDataset {
            unbiased: _,
            biased,
            catalog,
            count,
            test,
            train,
            out: train_path,
            test_out,
        } => {
            let catalog = if biased { catalog } else { None };
            gen_dataset(&ctx, catalog.as_deref(), count, test, train, train_path.as_deref(), test_out.as_deref(), &mut out)?
        }
        Command::Encode(c) => encode(&ctx, &c, &mut out)?,
        Command::Decode(c) => decode(&ctx, &c, &mut out)?,
        Command::Sample { count, vectors, codec } => sample(&ctx, &codec, count, vectors, &mut out)?,
        Command::Next => next(&ctx, &mut out)?,
        Command::Serve(c) => {
            let mut e = ArielEmbedder::new(build_codec(&ctx, &c)?);
            serve(io::stdin().lock(), &mut out, &mut e, &ctx.grammar)?;
        }
        Command::EvalGeneration {
            samples,
            granularity,
            embedder,
        } => {
            let mut e = build_embedder(&ctx, &embedder)?;
            let r = eval_generation(&mut *e, &ctx.grammar, samples, ctx.seed, granularity)?;
            let row = Table1Row {
                generation: Some(r.clone()),
                ..table_row(&*e)
            };
            report(&ctx, &mut out, embedder.table1, &row, &r.to_kv())?;
        }
        Command::EvalReconstruction {
            test_file,
            samples,
            embedder,
        } => {
            let test = match test_file {
                Some(p) => read_sentences(&read_file(&p)?),
                None => generate_unbiased(&ctx.grammar, samples, ctx.seed)?,
            };
            let mut e = build_embedder(&ctx, &embedder)?;
            let r = eval_reconstruction(&mut *e, &test, &ctx.grammar)?;
            let row = Table1Row {
                reconstruction: Some(r.clone()),
                ..table_row(&*e)
            };
            report(&ctx, &mut out, embedder.table1, &row, &r.to_kv())?;
        }
        Command::EvalGeneralization {
            biased_file,
            unbiased_file,
            catalog,
            samples,
            embedder,
        } => {
            let biased = match biased_file {
                Some(p) => read_sentences(&read_file(&p)?),
                None => {
                    let source = catalog.ok_or_else(|| {
                        CliError::Usage("a biased test set needs --biased-file or --catalog".into())
                    })?;
                    let catalog = load_catalog(&source, &ctx.grammar)?;
                    generate_biased(&ctx.grammar, &catalog, samples, ctx.seed)?
                }
            };
            let unbiased = match unbiased_file {
                Some(p) => read_sentences(&read_file(&p)?),
                None => generate_unbiased(&ctx.grammar, samples, ctx.seed)?,
            };
            let mut e = build_embedder(&ctx, &embedder)?;
            let r = eval_generalization(&mut *e, &biased, &unbiased, &ctx.grammar)?;
            let row = Table1Row {
                generalization: Some(r.clone()),
                ..table_row(&*e)
            };
            report(&ctx, &mut out, embedder.table1, &row, &r.to_kv())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn builtin_grammar(name: &str) -> Option<&'static str> {
    match name {
        "toy" => Some(fixtures::TOY_GRAMMAR),
        "questions" => Some(fixtures::QUESTION_GRAMMAR),
        "mini" => Some(fixtures::MINI_GRAMMAR),
        _ => None,
    }
}

fn builtin_catalog(name: &str) -> Option<&'static str> {
    (name.is_empty() || name == "objects").then_some(fixtures::OBJECT_CATALOG)
}

/// A file path, or `builtin[:name]` resolved through `lookup`.
fn load_text(source: &str, lookup: fn(&str) -> Option<&'static str>) -> Result<String, CliError> {
    if let Some(rest) = source.strip_prefix("builtin") {
        let name = rest.strip_prefix(':').unwrap_or(rest);
        if rest.is_empty() || rest.starts_with(':') {
            return lookup(name)
                .map(str::to_owned)
                .ok_or_else(|| CliError::Usage(format!("no builtin named `{source}`")));
        }
    }
    read_file(Path::new(source))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })
}

fn load_catalog(source: &str, grammar: &Grammar) -> Result<ObjectCatalog, CliError> {
    let catalog = ObjectCatalog::parse(&load_text(source, builtin_catalog)?)?;
    catalog.validate(grammar)?;
    Ok(catalog)
}

fn build_codec(ctx: &Context, args: &CodecArgs) -> Result<Codec, CliError> {
    let model = match args.model.as_str() {
        "uniform-sentence" => SymbolModel::UniformSentence,
        "uniform-branch" => SymbolModel::UniformBranch,
        other => match other.strip_prefix("empirical:") {
            Some(path) => {
                let corpus = read_sentences(&read_file(Path::new(path))?);
                SymbolModel::Empirical(EmpiricalModel::fit_grammatical(&ctx.grammar, &corpus))
            }
            None => return Err(CliError::Usage(format!("unknown symbol model `{other}`"))),
        },
    };
    let mut cfg = CodecConfig::new(args.dims).with_model(model);
    if let Some(seed) = args.rotate_seed {
        cfg = cfg.with_rotation(seed);
    }
    if args.exact {
        cfg = cfg.with_output(OutputMode::ExactRational);
    }
    Ok(Codec::new(ctx.grammar.clone(), cfg)?)
}

fn build_embedder(ctx: &Context, args: &EmbedderArgs) -> Result<Box<dyn Embedder>, CliError> {
    let spec = args.embedder.as_str();
    if spec == "ariel" {
        return Ok(Box::new(ArielEmbedder::new(build_codec(ctx, &args.codec)?)));
    }
    if let Some(cmd) = spec.strip_prefix("exec:") {
        return Ok(Box::new(ExternalEmbedder::spawn(cmd, Duration::from_secs(args.timeout))?));
    }
    if let Some(p) = spec.strip_prefix("noisy:") {
        let p: f64 = p
            .parse()
            .ok()
            .filter(|p| (0.0..=1.0).contains(p))
            .ok_or_else(|| CliError::Usage(format!("noise probability must lie in [0, 1], got `{p}`")))?;
        let base = ArielEmbedder::new(build_codec(ctx, &args.codec)?);
        let cfg = NoisyChannelConfig {
            p,
            mode: NoiseMode::Resample,
            seed: ctx.seed,
        };
        return Ok(Box::new(NoisyChannel::new(base, ctx.grammar.clone(), cfg)));
    }
    Err(CliError::Usage(format!("unknown embedder `{spec}`")))
}

fn table_row(e: &dyn Embedder) -> Table1Row {
    let info = e.info();
    Table1Row {
        model: info.name,
        dims: info.dims,
        ..Table1Row::default()
    }
}

fn report(ctx: &Context, out: &mut impl Write, table1: bool, row: &Table1Row, kv: &str) -> Result<(), CliError> {
    out.write_all(ctx.manifest.render().as_bytes())?;
    if table1 {
        writeln!(out, "{TABLE1_HEADER}")?;
        writeln!(out, "{}", row.render())?;
    } else {
        out.write_all(kv.as_bytes())?;
    }
    Ok(())
}

fn stats(ctx: &Context, out: &mut impl Write) -> Result<(), CliError> {
    let g = &ctx.grammar;
    out.write_all(ctx.manifest.render().as_bytes())?;
    writeln!(out, "sentences\t{}", g.count_language())?;
    match g.enumerate_templates(&g.lexical_categories(), DEFAULT_TEMPLATE_CAP) {
        Ok(t) => writeln!(out, "templates\t{}", t.len())?,
        Err(GrammarError::ExplosionGuard { cap }) => writeln!(out, "templates\t>{cap}")?,
        Err(e) => return Err(e.into()),
    }
    writeln!(out, "vocabulary\t{}", g.vocabulary().len())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen_dataset(
    ctx: &Context,
    catalog: Option<&str>,
    count: usize,
    test: usize,
    train: Option<usize>,
    train_path: Option<&Path>,
    test_path: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    if test > 0 && test_path.is_none() {
        return Err(CliError::Usage("--test needs --test-out".into()));
    }
    let sentences = match catalog {
        Some(source) => {
            let catalog = load_catalog(source, &ctx.grammar)?;
            generate_biased(&ctx.grammar, &catalog, count, ctx.seed)?
        }
        None => generate_unbiased(&ctx.grammar, count, ctx.seed)?,
    };
    let spec = SplitSpec {
        train,
        test,
        seed: ctx.seed,
        dedup: true,
    };
    let (train, held_out) = split(&sentences, &spec)?;
    let header = ctx.manifest.render();
    match train_path {
        Some(p) => write_sentences(create_file(p)?, &header, &train)?,
        None => write_sentences(&mut *out, &header, &train)?,
    }
    if let Some(p) = test_path {
        write_sentences(create_file(p)?, &header, &held_out)?;
    }
    Ok(())
}

/// Non-blank lines of standard input with their 1-based line numbers.
fn input_lines() -> impl Iterator<Item = io::Result<(usize, String)>> {
    io::stdin()
        .lock()
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .filter(|r| r.as_ref().map_or(true, |(_, l)| !l.trim().is_empty()))
}

fn encode(ctx: &Context, args: &CodecArgs, out: &mut impl Write) -> Result<(), CliError> {
    let codec = build_codec(ctx, args)?;
    out.write_all(ctx.manifest.render().as_bytes())?;
    write!(out, "{}", codec.header())?;
    for line in input_lines() {
        let (_, line) = line?;
        if line.trim_start().starts_with('#') {
            continue;
        }
        let tokens = parse_sentence(&line);
        if args.exact {
            writeln!(out, "{}", format_exact(&codec.encode_exact(&tokens)?))?;
        } else {
            writeln!(out, "{}", format_vector(&codec.encode(&tokens)?.0))?;
        }
    }
    Ok(())
}

fn decode(ctx: &Context, args: &CodecArgs, out: &mut impl Write) -> Result<(), CliError> {
    let codec = build_codec(ctx, args)?;
    let header = codec.header();
    out.write_all(ctx.manifest.render().as_bytes())?;
    let mut comments: Vec<String> = Vec::new();
    let mut checked = false;
    for line in input_lines() {
        let (n, line) = line?;
        if line.trim_start().starts_with('#') {
            if !checked {
                comments.push(line);
            }
            continue;
        }
        if !checked {
            header.check(&comments)?;
            checked = true;
        }
        let tokens = if args.exact {
            let v = parse_exact(&line).map_err(|source| CliError::Vector { line: n, source })?;
            codec.decode_exact(&v)?
        } else {
            let v = parse_vector(&line).map_err(|source| CliError::Vector { line: n, source })?;
            codec.decode(&v)?
        };
        writeln!(out, "{}", format_sentence(&tokens))?;
    }
    if !checked {
        header.check(&comments)?;
    }
    Ok(())
}

fn sample(ctx: &Context, args: &CodecArgs, count: usize, vectors: bool, out: &mut impl Write) -> Result<(), CliError> {
    let codec = build_codec(ctx, args)?;
    if count == 0 {
        return Ok(());
    }
    out.write_all(ctx.manifest.render().as_bytes())?;
    if vectors {
        write!(out, "{}", codec.header())?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for _ in 0..count {
        let (v, s) = codec.sample(&mut rng);
        if vectors {
            writeln!(out, "{}\t{}", format_vector(&v.0), format_sentence(&s))?;
        } else {
            writeln!(out, "{}", format_sentence(&s))?;
        }
    }
    Ok(())
}

fn next(ctx: &Context, out: &mut impl Write) -> Result<(), CliError> {
    out.write_all(ctx.manifest.render().as_bytes())?;
    for line in io::stdin().lock().lines() {
        let line = line?;
        if line.trim_start().starts_with('#') {
            continue;
        }
        let c = ctx.grammar.prefix_state(&parse_sentence(&line))?.continuations();
        writeln!(out, "{}\t{}", c.stop, c.words.join(" "))?;
        out.flush()?;
    }
    Ok(())
}
