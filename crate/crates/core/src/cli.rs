//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 for usage errors, 2 for runtime failures.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{ingest_dataset, GroundingFact};
use crate::eval::{self, GoldSpec};
use crate::expansion::expand_corpus;
use crate::frames;
use crate::kb::{load_kb, save_kb, semtrans_lines, KnowledgeBase};
use crate::oracle::{CachingInformant, HttpInformant, Informant, MockInformant, Oracle, TranscriptStore};
use crate::parser;
use crate::pipeline::{self, LabelTable, PipelineKind};
use crate::util::write_atomic;

type CliResult<T> = Result<T, String>;

#[derive(Parser, Debug)]
#[command(name = "quantsem", version, about = "Quantity types and influence signs from causal statements")]
struct Cli {
    /// Log at debug level.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow the semantic lexicon over a training corpus.
    Expand(ExpandArgs),
    /// Run one or all pipelines over a corpus and score them.
    Run(RunArgs),
    /// Score a file of logical forms against gold annotations.
    Eval(EvalArgs),
    /// Show the parse or frames for one sentence.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Mock,
    Http,
    Replay,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Where oracle answers come from.
    #[arg(long, value_enum)]
    oracle: Option<OracleKind>,
    /// Mock table (JSON lines) for `--oracle mock`.
    #[arg(long)]
    mock: Option<PathBuf>,
    /// Transcript to replay from, or to record into with mock/http.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Dotted path of the text field in each record.
    #[arg(long, default_value = "text")]
    field: String,
    #[arg(long, default_value = "train")]
    split: String,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    kb: PathBuf,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Where to write the expanded KB.
    #[arg(long)]
    out_kb: PathBuf,
    /// Per-comparative diagnosis report (JSON lines).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Added semtrans entries, one per line.
    #[arg(long)]
    delta: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Pipeline name, or `all`.
    #[arg(long, default_value = "all")]
    pipeline: String,
    #[arg(long)]
    kb: PathBuf,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    gold: Option<PathBuf>,
    /// LLM label to quantity type table.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, default_value_t = eval::DEFAULT_ALPHA)]
    alpha: f64,
    /// Directory for `<pipeline>.report.jsonl` and `<pipeline>.forms`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    /// Logical forms, one per line.
    #[arg(long)]
    forms: PathBuf,
    /// KB supplying the quantity taxonomy.
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = eval::DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InspectWhat {
    Parse,
    Frames,
}

#[derive(Args, Debug)]
struct InspectArgs {
    #[arg(value_enum)]
    what: InspectWhat,
    sentence: String,
    #[arg(long)]
    kb: PathBuf,
    /// Also dump the chart.
    #[arg(long)]
    chart: bool,
}

fn build_oracle(args: &OracleArgs) -> CliResult<Option<Oracle>> {
    let store = |p: &Path, read_only: bool| -> CliResult<Arc<TranscriptStore>> {
        let s = if read_only {
            TranscriptStore::load(p)
        } else {
            TranscriptStore::open(p)
        };
        s.map(Arc::new).map_err(|e| e.to_string())
    };
    let kind = match (args.oracle, &args.transcript) {
        (Some(k), _) => k,
        (None, Some(_)) => OracleKind::Replay,
        (None, None) => return Ok(None),
    };
    let base: Arc<dyn Informant> = match kind {
        OracleKind::Replay => {
            let p = args
                .transcript
                .as_deref()
                .ok_or("--oracle replay needs --transcript")?;
            return Ok(Some(Oracle::new(Arc::new(CachingInformant::replay(store(p, true)?)))));
        }
        OracleKind::Mock => {
            let p = args.mock.as_deref().ok_or("--oracle mock needs --mock")?;
            Arc::new(MockInformant::load(p).map_err(|e| e.to_string())?)
        }
        OracleKind::Http => Arc::new(HttpInformant::from_env().map_err(|e| e.to_string())?),
    };
    let informant: Arc<dyn Informant> = match &args.transcript {
        Some(p) => Arc::new(CachingInformant::recording(base, store(p, false)?)),
        None => base,
    };
    Ok(Some(Oracle::new(informant)))
}

fn load_facts(c: &CorpusArgs) -> CliResult<Vec<GroundingFact>> {
    ingest_dataset(&c.corpus, &c.field, &c.split).map_err(|e| e.to_string())
}

fn kb_from(path: &Path) -> CliResult<KnowledgeBase> {
    load_kb(path).map_err(|e| e.to_string())
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    write_atomic(path, text.as_bytes()).map_err(|e| format!("{}: {e}", path.display()))
}

fn labels_from(path: Option<&Path>) -> CliResult<LabelTable> {
    path.map(LabelTable::load).unwrap_or_else(|| Ok(LabelTable::default()))
}

fn cmd_expand(a: &ExpandArgs) -> CliResult<()> {
    let mut kb = kb_from(&a.kb)?;
    let facts = load_facts(&a.corpus)?;
    let oracle = build_oracle(&a.oracle)?.ok_or("expand needs an oracle (--oracle or --transcript)")?;
    let report = expand_corpus(&facts, &mut kb, &oracle);
    save_kb(&kb, &a.out_kb).map_err(|e| e.to_string())?;
    if let Some(p) = &a.report {
        write(p, &report.to_jsonl())?;
    }
    if let Some(p) = &a.delta {
        write(p, &semtrans_lines(&report.delta))?;
    }
    let t = &report.totals;
    println!(
        "facts {}  comparatives {}  relevant {}  constructed {}  failed {}  added {}  errors {}",
        t.facts, t.comparatives, t.relevant_existing, t.constructed, t.failed, t.entries_added, t.errors
    );
    for e in &report.delta {
        println!("  {e}");
    }
    Ok(())
}

fn cmd_run(a: &RunArgs) -> CliResult<()> {
    let kinds: Vec<PipelineKind> = if a.pipeline == "all" {
        PipelineKind::ALL.to_vec()
    } else {
        vec![a.pipeline.parse()?]
    };
    let kb = kb_from(&a.kb)?;
    let facts = load_facts(&a.corpus)?;
    let golds: Vec<GoldSpec> = match &a.gold {
        Some(p) => eval::load_gold(p).map_err(|e| e.to_string())?,
        None => Vec::new(),
    };
    let labels = labels_from(a.labels.as_deref())?;
    let oracle = build_oracle(&a.oracle)?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let mut reports = Vec::new();
    for kind in kinds {
        let mut cfg = kind.config();
        cfg.alpha = a.alpha;
        if cfg.needs_oracle() && oracle.is_none() {
            return Err(format!("pipeline {kind} needs an oracle (--oracle or --transcript)"));
        }
        let r = pipeline::run_corpus(kind, &cfg, &facts, &kb, oracle.as_ref(), &golds, &labels)
            .map_err(|e| e.to_string())?;
        if let Some(dir) = &a.out {
            write(&dir.join(format!("{kind}.report.jsonl")), &r.to_jsonl())?;
            write(&dir.join(format!("{kind}.forms")), &r.forms())?;
        }
        if r.errors() > 0 {
            log::warn!("{kind}: {} facts failed", r.errors());
        }
        reports.push(r);
    }
    print!("{}", pipeline::score_table(&reports));
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> CliResult<()> {
    let kb = kb_from(&a.kb)?;
    let golds = eval::load_gold(&a.gold).map_err(|e| e.to_string())?;
    let index = eval::gold_index(&golds);
    let labels = labels_from(a.labels.as_deref())?;
    let text = std::fs::read_to_string(&a.forms).map_err(|e| format!("{}: {e}", a.forms.display()))?;
    let mut scores = Vec::new();
    let mut unscored = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (fact, pairs) =
            pipeline::read_form_line(line, &labels).map_err(|e| format!("{}:{}: {e}", a.forms.display(), i + 1))?;
        let Some(gold) = index.get(&crate::normalize_text(&fact)) else {
            unscored += 1;
            continue;
        };
        let m = eval::match_quantities(gold, &pairs, kb.taxonomy(), a.alpha);
        let s = eval::score_fact(gold, &pairs, &m);
        let csa = s.csa.map(|c| format!("{c:.2}")).unwrap_or_else(|| "n/a".into());
        println!("{:.2} {csa} {:.2}  {fact}", s.qc, s.op);
        scores.push(s);
    }
    let agg = eval::aggregate(&scores).map_err(|e| e.to_string())?;
    let csa = agg.csa.map(|c| format!("{c:.2}")).unwrap_or_else(|| "n/a".into());
    println!("QC {:.2}  CSA {csa}  OP {:.2}  ({} scored, {unscored} without gold)", agg.qc, agg.op, agg.facts);
    Ok(())
}

fn cmd_inspect(a: &InspectArgs) -> CliResult<()> {
    let kb = kb_from(&a.kb)?;
    let tokens = parser::tokenize(&a.sentence, &kb);
    if a.chart {
        print!("{}", parser::parse_chart(&tokens));
    }
    let parses = parser::parse(&tokens);
    let Some(tree) = parser::best_parse(&parses) else {
        return Err(format!("no parse for {:?}", a.sentence));
    };
    match a.what {
        InspectWhat::Parse => {
            println!("{} parse(s); best:", parses.len());
            println!("{}", tree.root.render(&tree.tokens));
            println!("kind: {:?}", tree.kind);
            println!("subject: {}", tree.subject.text);
            println!("comparee: {:?}", tree.comparee);
            for e in &tree.elements {
                println!("element: {}", e.describe(&tree.tokens));
            }
        }
        InspectWhat::Frames => {
            let choices = frames::interpret(tree, &kb);
            let fs = frames::build_frames(&choices, tree);
            print!("{}", fs.listing());
            for p in frames::frames_to_pairs(&fs) {
                println!("{p}");
            }
            for u in &fs.unresolved {
                println!(";; unresolved: {u}");
            }
        }
    }
    Ok(())
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = if cli.verbose { "debug" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let result = match &cli.command {
        Command::Expand(a) => cmd_expand(a),
        Command::Run(a) => cmd_run(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Inspect(a) => cmd_inspect(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["quantsem"]), 1);
        assert_eq!(run(["quantsem", "frobnicate"]), 1);
        assert_eq!(run(["quantsem", "inspect", "parse"]), 1);
        assert_eq!(run(["quantsem", "--help"]), 0);
    }

    #[test]
    fn runtime_errors_exit_two() {
        assert_eq!(run(["quantsem", "inspect", "parse", "x", "--kb", "/nonexistent.kb"]), 2);
    }
}
