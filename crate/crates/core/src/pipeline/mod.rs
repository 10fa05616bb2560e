//! The five extraction pipelines and corpus runs over them.

mod forms;

pub use forms::{read_cause_effect, read_form_line, CauseEffect, FormVariant, LabelTable, LogicalForm, Validity};

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::corpus::GroundingFact;
use crate::eval::{self, FactScores, GoldSpec, Matching, PipelineScores};
use crate::frames::{self, merge_pairs, QuantitySign};
use crate::kb::KnowledgeBase;
use crate::normalize_text;
use crate::oracle::{Oracle, OracleError};
use crate::parser;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Symbolic,
    Hybrid,
    LlmOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineKind {
    Symbolic,
    HybridLex,
    HybridRephrase,
    HybridBoth,
    Llm,
}

impl PipelineKind {
    pub const ALL: [PipelineKind; 5] = [
        PipelineKind::Symbolic,
        PipelineKind::HybridLex,
        PipelineKind::HybridRephrase,
        PipelineKind::HybridBoth,
        PipelineKind::Llm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PipelineKind::Symbolic => "symbolic",
            PipelineKind::HybridLex => "hybrid-lex",
            PipelineKind::HybridRephrase => "hybrid-rephrase",
            PipelineKind::HybridBoth => "hybrid-both",
            PipelineKind::Llm => "llm",
        }
    }

    pub fn config(self) -> PipelineConfig {
        let (mode, use_rephrase, use_expanded_kb) = match self {
            PipelineKind::Symbolic => (Mode::Symbolic, false, false),
            PipelineKind::HybridLex => (Mode::Hybrid, false, true),
            PipelineKind::HybridRephrase => (Mode::Hybrid, true, false),
            PipelineKind::HybridBoth => (Mode::Hybrid, true, true),
            PipelineKind::Llm => (Mode::LlmOnly, false, false),
        };
        PipelineConfig {
            mode,
            use_rephrase,
            use_expanded_kb,
            alpha: eval::DEFAULT_ALPHA,
        }
    }
}

impl fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PipelineKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown pipeline `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub use_rephrase: bool,
    pub use_expanded_kb: bool,
    pub alpha: f64,
}

impl PipelineConfig {
    pub fn needs_oracle(&self) -> bool {
        self.mode != Mode::Symbolic
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("{0:?} pipeline needs an oracle")]
    NoOracle(Mode),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// The KB a configuration reads from: the full KB, or the KB with every
/// expansion-minted entry removed.
pub fn select_kb<'a>(config: &PipelineConfig, kb: &'a KnowledgeBase) -> Cow<'a, KnowledgeBase> {
    if config.use_expanded_kb || config.mode == Mode::LlmOnly {
        Cow::Borrowed(kb)
    } else {
        Cow::Owned(kb.without_expansions())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactRun {
    pub form: LogicalForm,
    /// Pairs handed to scoring.
    pub pairs: Vec<QuantitySign>,
    /// Sentences the symbolic reader actually saw.
    pub sentences: Vec<String>,
    pub diagnostics: Vec<String>,
}

fn read_symbolic(sentence: &str, kb: &KnowledgeBase, diag: &mut Vec<String>) -> Vec<QuantitySign> {
    let parses = parser::parse_text(sentence, kb);
    let Some(tree) = parser::best_parse(&parses) else {
        diag.push(format!("no parse: {sentence:?}"));
        return Vec::new();
    };
    let choices = frames::interpret(tree, kb);
    let fs = frames::build_frames(&choices, tree);
    diag.extend(fs.unresolved.iter().cloned());
    let proj = frames::project(&fs);
    diag.extend(proj.conflicts);
    proj.pairs
}

/// Runs one fact. `kb` must already be the configuration's view (see
/// [`select_kb`]).
pub fn run_fact(
    text: &str,
    config: &PipelineConfig,
    kb: &KnowledgeBase,
    oracle: Option<&Oracle>,
    labels: &LabelTable,
) -> Result<FactRun, PipelineError> {
    let mut diagnostics = Vec::new();
    if config.mode == Mode::LlmOnly {
        let oracle = oracle.ok_or(PipelineError::NoOracle(config.mode))?;
        let raw = oracle.extract_logical_form(text)?;
        let (ce, validity) = read_cause_effect(&raw);
        if let Validity::Invalid(r) = &validity {
            diagnostics.push(format!("invalid form: {r}"));
        }
        let mut pairs = Vec::new();
        if let Some(ce) = &ce {
            let (p, unmapped) = labels.flatten(ce);
            pairs = merge_pairs(p).pairs;
            diagnostics.extend(unmapped.into_iter().map(|l| format!("unmapped label: {l}")));
        }
        return Ok(FactRun {
            form: LogicalForm {
                fact: text.to_string(),
                variant: FormVariant::CauseEffect { form: ce },
                validity,
            },
            pairs,
            sentences: Vec::new(),
            diagnostics,
        });
    }

    let mut sentences = Vec::new();
    if config.use_rephrase {
        let oracle = oracle.ok_or(PipelineError::NoOracle(config.mode))?;
        sentences = oracle.rephrase(text, kb)?;
    }
    if sentences.is_empty() {
        sentences.push(text.to_string());
    }
    let all: Vec<QuantitySign> = sentences
        .iter()
        .flat_map(|s| read_symbolic(s, kb, &mut diagnostics))
        .collect();
    let merged = merge_pairs(all);
    diagnostics.extend(merged.conflicts);
    Ok(FactRun {
        form: LogicalForm::pairs(text, merged.pairs.clone()),
        pairs: merged.pairs,
        sentences,
        diagnostics,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactRecord {
    pub fact_id: String,
    pub text: String,
    pub form: String,
    pub pairs: Vec<QuantitySign>,
    pub scores: Option<FactScores>,
    pub matching: Option<Matching>,
    pub unmatched_predictions: usize,
    pub diagnostics: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub pipeline: String,
    pub config: PipelineConfig,
    pub facts: Vec<FactRecord>,
    /// Facts with no gold entry.
    pub unscored: Vec<String>,
    pub scores: Option<PipelineScores>,
    pub oracle_calls: usize,
}

impl RunReport {
    pub fn errors(&self) -> usize {
        self.facts.iter().filter(|f| f.error.is_some()).count()
    }

    /// One JSON object per fact, then a summary row.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            out.push_str(&serde_json::to_string(f).expect("fact record serializes"));
            out.push('\n');
        }
        let summary = json!({
            "summary": {
                "pipeline": self.pipeline,
                "facts": self.facts.len(),
                "scored": self.scores.map(|s| s.facts).unwrap_or(0),
                "unscored": self.unscored,
                "errors": self.errors(),
                "oracle_calls": self.oracle_calls,
                "scores": self.scores,
            }
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }

    /// Logical forms, one per line.
    pub fn forms(&self) -> String {
        self.facts.iter().map(|f| format!("{}\n", f.form)).collect()
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "n/a".into())
}

/// Fixed-width QC / CSA / OP table.
pub fn score_table(reports: &[RunReport]) -> String {
    let mut out = format!("{:<16} {:>7} {:>7} {:>7}\n", "pipeline", "QC", "CSA", "OP");
    for r in reports {
        let s = r.scores;
        out.push_str(&format!(
            "{:<16} {:>7} {:>7} {:>7}\n",
            r.pipeline,
            cell(s.map(|s| s.qc)),
            cell(s.and_then(|s| s.csa)),
            cell(s.map(|s| s.op)),
        ));
    }
    out
}

/// Runs every fact in order. Per-fact failures are recorded and scored as
/// empty predictions; only an empty corpus is an error.
pub fn run_corpus(
    kind: PipelineKind,
    config: &PipelineConfig,
    facts: &[GroundingFact],
    kb: &KnowledgeBase,
    oracle: Option<&Oracle>,
    golds: &[GoldSpec],
    labels: &LabelTable,
) -> Result<RunReport, PipelineError> {
    if facts.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    let view = select_kb(config, kb);
    let index = eval::gold_index(golds);
    let calls_before = oracle.map(|o| o.stats().total()).unwrap_or(0);
    let mut records = Vec::new();
    let mut unscored = Vec::new();
    let mut fact_scores = Vec::new();
    for fact in facts {
        let (run, error) = match run_fact(&fact.text, config, &view, oracle, labels) {
            Ok(r) => (r, None),
            Err(e) => {
                log::warn!("{}: {e}", fact.id);
                let empty = FactRun {
                    form: LogicalForm::pairs(&fact.text, Vec::new()),
                    pairs: Vec::new(),
                    sentences: Vec::new(),
                    diagnostics: Vec::new(),
                };
                (empty, Some(e.to_string()))
            }
        };
        let (scores, matching, unmatched) = match index.get(&normalize_text(&fact.text)) {
            Some(gold) => {
                let m = eval::match_quantities(gold, &run.pairs, view.taxonomy(), config.alpha);
                let s = eval::score_fact(gold, &run.pairs, &m);
                fact_scores.push(s);
                let u = eval::unmatched_predictions(&run.pairs, &m);
                (Some(s), Some(m), u)
            }
            None => {
                unscored.push(fact.id.clone());
                (None, None, run.pairs.len())
            }
        };
        records.push(FactRecord {
            fact_id: fact.id.clone(),
            text: fact.text.clone(),
            form: run.form.render(),
            pairs: run.pairs,
            scores,
            matching,
            unmatched_predictions: unmatched,
            diagnostics: run.diagnostics,
            error,
        });
    }
    let calls_after = oracle.map(|o| o.stats().total()).unwrap_or(0);
    Ok(RunReport {
        pipeline: kind.as_str().to_string(),
        config: *config,
        facts: records,
        unscored,
        scores: eval::aggregate(&fact_scores).ok(),
        oracle_calls: calls_after - calls_before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::Sign;
    use crate::kb::parse_kb;
    use crate::oracle::MockInformant;
    use std::sync::Arc;

    const KB: &str = r#"
(frame-type FN_Temperature)
(frame-type FN_Speed)
(qtype Temperature)
(qtype Speed)
(value-map (low-amount-of Speed) Speed)
(lex particles noun :root particle :degree positive)
(lex air noun :root air :degree positive)
(lex that pronoun :root that :degree positive)
(lex are copula :root be :degree positive)
(lex is copula :root be :degree positive)
(lex than preposition :root than :degree positive)
(lex cooler adjective :root cool :degree comparative)
(lex warmer adjective :root warm :degree comparative)
(lex move verb :root move :degree positive)
(lex slowly adverb :root slowly :degree positive)
(lex more determiner :root much :degree comparative)
(semtrans cooler adjective :frame FN_Temperature :qtype Temperature :reln lessThan)
(semtrans slowly adverb :frame FN_Speed :qtype Speed :reln none :value (low-amount-of Speed))
(semtrans warmer adjective :frame FN_Temperature :qtype Temperature :reln greaterThan :provenance (expanded t-0009 1))
"#;

    const SLOW: &str = "Particles that move more slowly are cooler than particles.";

    fn kb() -> KnowledgeBase {
        parse_kb(KB).unwrap()
    }

    fn oracle(rules: &str) -> Oracle {
        Oracle::new(Arc::new(MockInformant::from_jsonl(rules).unwrap()))
    }

    fn labels() -> LabelTable {
        LabelTable::parse("speed Speed\ntemperature Temperature\n").unwrap()
    }

    #[test]
    fn kinds_round_trip_and_configs() {
        for k in PipelineKind::ALL {
            assert_eq!(k.as_str().parse::<PipelineKind>().unwrap(), k);
        }
        let c = PipelineKind::HybridRephrase.config();
        assert!(c.use_rephrase && !c.use_expanded_kb && c.needs_oracle());
        assert!(!PipelineKind::Symbolic.config().needs_oracle());
        assert!("hybrid".parse::<PipelineKind>().is_err());
    }

    #[test]
    fn symbolic_needs_no_oracle() {
        let kb = kb();
        let cfg = PipelineKind::Symbolic.config();
        let run = run_fact(SLOW, &cfg, &select_kb(&cfg, &kb), None, &labels()).unwrap();
        assert_eq!(
            run.pairs,
            vec![QuantitySign::new("Speed", Sign::Minus), QuantitySign::new("Temperature", Sign::Minus)]
        );
        assert_eq!(run.form.render(), format!("(\"{SLOW}\" (Speed -) (Temperature -))"));
    }

    #[test]
    fn expanded_entries_only_visible_when_enabled() {
        let kb = kb();
        let o = oracle("");
        let text = "Particles are warmer.";
        let sym = PipelineKind::Symbolic.config();
        let lex = PipelineKind::HybridLex.config();
        let a = run_fact(text, &sym, &select_kb(&sym, &kb), None, &labels()).unwrap();
        let b = run_fact(text, &lex, &select_kb(&lex, &kb), Some(&o), &labels()).unwrap();
        assert!(a.pairs.is_empty());
        assert_eq!(b.pairs, vec![QuantitySign::new("Temperature", Sign::Plus)]);
        assert_eq!(o.stats().total(), 0);
    }

    #[test]
    fn rephrasings_are_read_and_merged() {
        let kb = kb();
        let o = oracle(
            r#"{"role":"rephrase","match":{},"reply":"1. Particles that move more slowly are cooler than particles.\n2. Particles are warmer."}"#,
        );
        let cfg = PipelineKind::HybridBoth.config();
        let text = "When particles slow down, things cool off.";
        let run = run_fact(text, &cfg, &select_kb(&cfg, &kb), Some(&o), &labels()).unwrap();
        assert_eq!(run.sentences.len(), 2);
        // cooler (-) and warmer (+) disagree on Temperature
        assert_eq!(
            run.pairs,
            vec![QuantitySign::new("Speed", Sign::Minus), QuantitySign::new("Temperature", Sign::None)]
        );
        assert!(run.diagnostics.iter().any(|d| d.contains("conflicting")));
        assert!(matches!(
            run_fact(text, &cfg, &kb, None, &labels()),
            Err(PipelineError::NoOracle(Mode::Hybrid))
        ));
    }

    #[test]
    fn llm_forms_flatten_through_labels() {
        let o = oracle(
            r#"{"role":"extract","match":{"fact":"A*"},"reply":"((cause speed convection) (effect temperature) (cause-sign - +) (effect-sign -))"}
{"role":"extract","match":{},"reply":"((cause age) (effect depth) (cause-sign +))"}"#,
        );
        let cfg = PipelineKind::Llm.config();
        let kb = kb();
        let run = run_fact("A fact.", &cfg, &kb, Some(&o), &labels()).unwrap();
        assert_eq!(run.form.validity, Validity::Valid);
        assert_eq!(
            run.pairs,
            vec![QuantitySign::new("Speed", Sign::Minus), QuantitySign::new("Temperature", Sign::Minus)]
        );
        assert_eq!(run.diagnostics, vec!["unmapped label: convection"]);
        let run = run_fact("Other fact.", &cfg, &kb, Some(&o), &labels()).unwrap();
        assert_eq!(run.form.validity, Validity::Invalid("missing effect-sign".into()));
        assert!(run.pairs.is_empty());
    }

    #[test]
    fn corpus_run_scores_and_reports() {
        let kb = kb();
        let facts = vec![
            GroundingFact::new("t-0001", SLOW, "test"),
            GroundingFact::new("t-0002", "Particles are warmer.", "test"),
            GroundingFact::new("t-0003", "No gold here.", "test"),
        ];
        let golds = vec![
            GoldSpec::new(SLOW, &[("Speed", Sign::Minus), ("Temperature", Sign::Minus)]),
            GoldSpec::new("Particles are warmer.", &[("Temperature", Sign::Plus), ("Density", Sign::Minus)]),
        ];
        let cfg = PipelineKind::Symbolic.config();
        let r = run_corpus(PipelineKind::Symbolic, &cfg, &facts, &kb, None, &golds, &labels()).unwrap();
        assert_eq!(r.unscored, vec!["t-0003"]);
        let s = r.scores.unwrap();
        assert_eq!(s.facts, 2);
        // fact 1 scores 1/1/1, fact 2 nothing (expansions frozen out)
        assert!((s.qc - 50.0).abs() < 1e-9);
        assert_eq!(s.csa, Some(100.0));
        assert!((s.op - 50.0).abs() < 1e-9);
        let jsonl = r.to_jsonl();
        assert_eq!(jsonl.lines().count(), 4);
        assert!(jsonl.lines().last().unwrap().starts_with("{\"summary\""));
        assert_eq!(r.forms().lines().count(), 3);
        let table = score_table(&[r]);
        assert!(table.contains("symbolic") && table.contains("100.00"));

        assert!(matches!(
            run_corpus(PipelineKind::Symbolic, &cfg, &[], &kb, None, &golds, &labels()),
            Err(PipelineError::EmptyCorpus)
        ));
    }

    #[test]
    fn oracle_failures_are_recorded_per_fact() {
        let kb = kb();
        let store = Arc::new(crate::oracle::TranscriptStore::in_memory());
        let o = Oracle::new(Arc::new(crate::oracle::CachingInformant::replay(store)));
        let facts = vec![GroundingFact::new("t-0001", "Anything.", "test")];
        let cfg = PipelineKind::Llm.config();
        let r = run_corpus(PipelineKind::Llm, &cfg, &facts, &kb, Some(&o), &[], &labels()).unwrap();
        assert!(r.facts[0].error.as_deref().unwrap().contains("no recorded"));
        assert!(r.scores.is_none());
    }
}
