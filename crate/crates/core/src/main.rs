use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lexireverse::dict::{parse_dictionary, serialize_dictionary, DictFormat, LexicalEntry};
use lexireverse::eval::{self, RatingSheet};
use lexireverse::reversal::{self, Algorithm, ReversalConfig};
use lexireverse::similarity::{self, RelationFlags, SimilarityConfig};
use lexireverse::wordnet::{load_wordnet, Pos, WordnetStore};
use lexireverse::{BilingualDictionary, WORDNET_DIR_ENV};

/// Build reverse bilingual dictionaries with WordNet.
#[derive(Parser)]
#[command(name = "lexireverse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reverse a bilingual dictionary with DR, DRwD or DRwS.
    Reverse(ReverseArgs),
    /// Print per-Pos synset counts and the lemma count of a WordNet database.
    WnStats(WordnetArgs),
    /// Print the distance or simValue between two words or phrases.
    Sim(SimArgs),
    /// Sample common words and reverse-dictionary entries into a blank rating sheet.
    EvalSample(EvalSampleArgs),
    /// Summarize filled-in rating sheets as JSON.
    EvalScore(EvalScoreArgs),
}

#[derive(Args)]
struct WordnetArgs {
    /// WordNet 3.0 database directory (index.* and data.* files).
    #[arg(long, env = WORDNET_DIR_ENV)]
    wordnet: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Tsv,
}

impl From<FormatArg> for DictFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => DictFormat::Jsonl,
            FormatArg::Tsv => DictFormat::Tsv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Dr,
    Drwd,
    Drws,
}

#[derive(Args)]
struct ReverseArgs {
    #[arg(long)]
    input: PathBuf,
    /// Input format; guessed from the extension when omitted. Output uses the same format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[command(flatten)]
    wordnet: WordnetArgs,
    #[arg(long, value_enum, default_value = "dr")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    /// Comma-separated subset of synset,synonyms,hyponyms,hypernyms.
    #[arg(long, default_value = "synset,synonyms,hyponyms,hypernyms")]
    relations: String,
    #[arg(long, default_value_t = 4)]
    max_sense_tokens: usize,
    /// File with one stopword per line.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    /// Where to write the JSON report; standard output when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Worker threads for the pair loops (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimMode {
    Distance,
    Simvalue,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    wordnet: WordnetArgs,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, value_enum, default_value = "distance")]
    mode: SimMode,
    #[arg(long, default_value = "synset,synonyms,hyponyms,hypernyms")]
    relations: String,
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Args)]
struct EvalSampleArgs {
    /// Reverse dictionary to sample from.
    #[arg(long)]
    dict: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Ordered list of common words, one per line.
    #[arg(long)]
    common_words: PathBuf,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = eval::DEFAULT_WORD_SAMPLE)]
    n: usize,
    #[arg(long, default_value_t = eval::DEFAULT_ENTRY_SAMPLE)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_sheet: PathBuf,
}

#[derive(Args)]
struct EvalScoreArgs {
    /// One filled-in sheet per rater; the file stem is the rater id.
    #[arg(long, num_args = 1.., required = true)]
    sheets: Vec<PathBuf>,
    #[arg(long, default_value = "")]
    dict_id: String,
}

/// Usage problems exit with 1, data problems with 2.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
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
    let result = match cli.command {
        Command::Reverse(args) => cmd_reverse(args),
        Command::WnStats(args) => cmd_wn_stats(args),
        Command::Sim(args) => cmd_sim(args),
        Command::EvalSample(args) => cmd_eval_sample(args),
        Command::EvalScore(args) => cmd_eval_score(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn wordnet_dir(args: &WordnetArgs) -> Option<&Path> {
    args.wordnet.as_deref()
}

fn open_wordnet(dir: &Path) -> Result<WordnetStore> {
    eprintln!("loading WordNet from {}", dir.display());
    load_wordnet(dir).with_context(|| format!("loading WordNet from {}", dir.display()))
}

fn resolve_format(explicit: Option<FormatArg>, path: &Path) -> Result<DictFormat, Failure> {
    match explicit {
        Some(f) => Ok(f.into()),
        None => DictFormat::from_path(path).ok_or_else(|| {
            usage(format!(
                "cannot tell the format of {}; pass --format",
                path.display()
            ))
        }),
    }
}

fn read_dictionary(path: &Path, format: DictFormat) -> Result<BilingualDictionary> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_dictionary(io::BufReader::new(file), format)
        .with_context(|| format!("parsing {}", path.display()))
}

fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn cmd_reverse(args: ReverseArgs) -> Result<(), Failure> {
    let format = resolve_format(args.format, &args.input)?;
    let algorithm = match args.algo {
        AlgoArg::Dr => Algorithm::Dr,
        AlgoArg::Drwd => Algorithm::Drwd,
        AlgoArg::Drws => Algorithm::Drws,
    };
    let relations = RelationFlags::parse_list(&args.relations).map_err(usage)?;
    let stopwords: BTreeSet<String> = match &args.stopwords {
        Some(p) => read_word_list(p)?.into_iter().collect(),
        None => BTreeSet::new(),
    };
    let cfg = ReversalConfig {
        algorithm,
        alpha: args.alpha,
        beta: args.beta,
        relations,
        max_sense_tokens: args.max_sense_tokens,
        stopwords,
        ..ReversalConfig::default()
    };
    cfg.validate().map_err(|e| Failure::Usage(e.into()))?;
    let wn_dir = wordnet_dir(&args.wordnet);
    if algorithm != Algorithm::Dr && wn_dir.is_none() {
        return Err(usage(format!(
            "--algo {} needs --wordnet (or {WORDNET_DIR_ENV})",
            algorithm.to_string().to_lowercase()
        )));
    }

    let dict = read_dictionary(&args.input, format)?;
    let store = match (algorithm, wn_dir) {
        (Algorithm::Dr, _) | (_, None) => None,
        (_, Some(dir)) => Some(open_wordnet(dir)?),
    };
    eprintln!("reversing {} entries with {algorithm}", dict.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .context("starting worker threads")?;
    let (out, report) = pool
        .install(|| reversal::reverse(&dict, store.as_ref(), &cfg))
        .context("reversal failed")?;

    write_file(
        &args.output,
        &serialize_dictionary(&out, format).context("serializing output")?,
    )?;
    let mut json = serde_json::to_vec_pretty(&report).context("serializing report")?;
    json.push(b'\n');
    match &args.report {
        Some(p) => write_file(p, &json)?,
        None => io::stdout().write_all(&json).context("writing report")?,
    }
    eprintln!(
        "wrote {} entries ({} pairs) to {}",
        report.output_entry_count,
        report.output_pair_count,
        args.output.display()
    );
    Ok(())
}

fn cmd_wn_stats(args: WordnetArgs) -> Result<(), Failure> {
    let dir = wordnet_dir(&args)
        .ok_or_else(|| usage(format!("--wordnet (or {WORDNET_DIR_ENV}) is required")))?;
    let store = open_wordnet(dir)?;
    let mut out = String::new();
    out.push_str(&format!("version\t{}\n", store.version()));
    for pos in Pos::FAMILIES {
        out.push_str(&format!(
            "{}\t{}\n",
            pos.file_suffix(),
            store.synset_count(pos)
        ));
    }
    let satellites = store
        .iter()
        .filter(|s| s.pos == Pos::AdjectiveSatellite)
        .count();
    out.push_str(&format!("adj_satellite\t{satellites}\n"));
    out.push_str(&format!("total\t{}\n", store.len()));
    out.push_str(&format!("lemmas\t{}\n", store.lemma_count()));
    print!("{out}");
    Ok(())
}

fn cmd_sim(args: SimArgs) -> Result<(), Failure> {
    let dir = wordnet_dir(&args.wordnet)
        .ok_or_else(|| usage(format!("--wordnet (or {WORDNET_DIR_ENV}) is required")))?;
    let relations = RelationFlags::parse_list(&args.relations).map_err(usage)?;
    let stopwords: HashSet<String> = match &args.stopwords {
        Some(p) => read_word_list(p)?.into_iter().collect(),
        None => HashSet::new(),
    };
    let store = open_wordnet(dir)?;
    let cfg = SimilarityConfig {
        relations,
        stopwords,
        ..SimilarityConfig::default()
    };
    let value = match args.mode {
        SimMode::Distance => similarity::phrase_distance(
            &store,
            &similarity::tokenize(&args.a),
            &similarity::tokenize(&args.b),
            &cfg,
        ),
        SimMode::Simvalue => {
            let a = LexicalEntry::new("a", [&args.a]).map_err(|e| Failure::Usage(e.into()))?;
            let b = LexicalEntry::new("b", [&args.b]).map_err(|e| Failure::Usage(e.into()))?;
            let cfg = SimilarityConfig {
                max_phrase_tokens: usize::MAX,
                ..cfg
            };
            similarity::sim_value(&a, &b, &store, &cfg, false)
        }
    };
    println!("{value:.4}");
    Ok(())
}

fn cmd_eval_sample(args: EvalSampleArgs) -> Result<(), Failure> {
    let format = resolve_format(args.format, &args.dict)?;
    let dict = read_dictionary(&args.dict, format)?;
    let common = read_word_list(&args.common_words)?;
    let stopwords: HashSet<String> = match &args.stopwords {
        Some(p) => read_word_list(p)?.into_iter().collect(),
        None => HashSet::new(),
    };
    let words = eval::sample_words(&common, &stopwords, args.n, args.seed)?;
    let entries = eval::sample_entries(&dict, &words, args.k, args.seed)?;
    let dict_id = file_stem(&args.dict);
    let sheet = RatingSheet::blank(&dict_id, "", &entries);
    let mut buf = Vec::new();
    sheet.write_csv(&mut buf)?;
    write_file(&args.out_sheet, &buf)?;
    eprintln!(
        "sampled {} words, {} entries into {}",
        words.len(),
        entries.len(),
        args.out_sheet.display()
    );
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Serialize)]
struct ScoreOutput<'a> {
    #[serde(flatten)]
    summary: &'a eval::EvalSummary,
    raters: Vec<String>,
}

fn cmd_eval_score(args: EvalScoreArgs) -> Result<(), Failure> {
    let mut sheets = Vec::with_capacity(args.sheets.len());
    for path in &args.sheets {
        let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let sheet = RatingSheet::read_csv(file, &args.dict_id, &file_stem(path))
            .with_context(|| format!("reading {}", path.display()))?;
        sheets.push(sheet);
    }
    let summary = eval::score_ratings(&sheets)?;
    let out = ScoreOutput {
        summary: &summary,
        raters: sheets.iter().map(|s| s.rater_id.clone()).collect(),
    };
    println!(
        "{}",
        serde_json::to_string(&out).context("serializing summary")?
    );
    Ok(())
}
