//! Semtrans diagnosis and construction for comparatives the KB cannot yet
//! interpret.
//!
//! Diagnosis keeps existing comparison semtrans the oracle judges relevant to
//! the fact. Failing that, construction harvests value-bearing semtrans from
//! the root form, then from each antonym, then from each antonym's root,
//! stopping at the first stage that yields a relevant frame/quantity pair.
//! Everything runs sequentially so each new entry is visible to the next
//! diagnosis.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::GroundingFact;
use crate::frames::{render_term, Sign};
use crate::kb::{filter_comparison, AddOutcome, KnowledgeBase, Pos, Provenance, Relation, SemtransEntry};
use crate::oracle::{Oracle, OracleError, OracleStats, Role};
use crate::parser::{identify_comparatives, tokenize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "stage", content = "word", rename_all = "kebab-case")]
pub enum CandidateSource {
    Root(String),
    Antonym(String),
    AntonymRoot(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidatePair {
    pub frame_type: String,
    pub quantity_type: String,
    pub source: CandidateSource,
}

/// Why diagnosis fell through to construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trigger {
    NoSemtrans,
    NoComparisonSemtrans,
    NoRelevant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailStage {
    ChainExhausted,
    /// Pairs were found but no sign could be obtained for any of them.
    SignUndetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiagnosisResult {
    RelevantExisting { entries: Vec<String> },
    Constructed { entries: Vec<String>, via: CandidateSource },
    Failed { trigger: Trigger, stage: FailStage },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagnosisOutcome {
    pub fact_id: String,
    pub adjective: String,
    pub result: DiagnosisResult,
    /// Oracle requests issued for this comparative, by role.
    pub calls: BTreeMap<Role, usize>,
}

/// Result of running the construction chain.
#[derive(Clone, Debug, PartialEq)]
pub enum Construction {
    Built {
        entries: Vec<SemtransEntry>,
        via: CandidateSource,
    },
    Failed(FailStage),
}

/// Reading of a comparative: adjective if the lexicon has one, else adverb.
fn comparative_pos(kb: &KnowledgeBase, word: &str) -> Pos {
    if kb.lookup_word(word, Pos::Adjective).is_none() && kb.lookup_word(word, Pos::Adverb).is_some() {
        Pos::Adverb
    } else {
        Pos::Adjective
    }
}

fn root_of(kb: &KnowledgeBase, word: &str) -> Option<String> {
    [Pos::Adjective, Pos::Adverb]
        .iter()
        .filter_map(|&p| kb.lookup_word(word, p))
        .map(|e| e.root.clone())
        .find(|r| r != word)
}

fn delta(before: &OracleStats, after: &OracleStats) -> BTreeMap<Role, usize> {
    after
        .calls
        .iter()
        .filter_map(|(r, n)| {
            let d = n - before.calls.get(r).copied().unwrap_or(0);
            (d > 0).then_some((*r, d))
        })
        .collect()
}

/// Relevant frame/quantity pairs from the value-bearing semtrans of `word`.
/// `comparative` is the adjective under diagnosis, shown to the oracle with
/// the fact so relevance reflects its original use.
pub fn harvest_candidates(
    word: &str,
    comparative: &str,
    fact: &str,
    source: CandidateSource,
    kb: &KnowledgeBase,
    oracle: &Oracle,
) -> Result<Vec<CandidatePair>, OracleError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for pos in [Pos::Adjective, Pos::Adverb] {
        for e in kb.semtrans_for(word, pos) {
            let Some(v) = &e.value else { continue };
            let Some(q) = kb.quantity_type_of_value(v) else { continue };
            let pair = (e.frame_type.clone(), q.to_string());
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    let mut out = Vec::new();
    for (frame, qtype) in pairs {
        let relevant = oracle.judge_relevance(
            &render_term(kb, &frame),
            &render_term(kb, &qtype),
            comparative,
            fact,
        )?;
        if relevant {
            out.push(CandidatePair {
                frame_type: frame,
                quantity_type: qtype,
                source: source.clone(),
            });
        }
    }
    Ok(out)
}

fn next_step(kb: &KnowledgeBase) -> u64 {
    kb.semtrans().iter().filter(|e| e.is_expanded()).count() as u64 + 1
}

/// Runs the construction chain for `adjective` and writes
/// what it builds into `kb`. Nothing is written when the chain fails.
pub fn construct_new_semtrans(
    adjective: &str,
    fact: &GroundingFact,
    kb: &mut KnowledgeBase,
    oracle: &Oracle,
) -> Result<Construction, OracleError> {
    let mut tried: Vec<String> = vec![adjective.to_string()];
    let mut found: Vec<CandidatePair> = Vec::new();

    if let Some(root) = root_of(kb, adjective) {
        found = harvest_candidates(&root, adjective, &fact.text, CandidateSource::Root(root.clone()), kb, oracle)?;
        tried.push(root);
    }
    if found.is_empty() {
        let antonyms = oracle.antonyms(adjective)?;
        for a in &antonyms {
            found = harvest_candidates(a, adjective, &fact.text, CandidateSource::Antonym(a.clone()), kb, oracle)?;
            tried.push(a.clone());
            if !found.is_empty() {
                break;
            }
        }
        if found.is_empty() {
            for a in &antonyms {
                let Some(root) = root_of(kb, a) else { continue };
                if tried.contains(&root) {
                    continue;
                }
                found = harvest_candidates(
                    &root,
                    adjective,
                    &fact.text,
                    CandidateSource::AntonymRoot(root.clone()),
                    kb,
                    oracle,
                )?;
                tried.push(root);
                if !found.is_empty() {
                    break;
                }
            }
        }
    }
    let Some(via) = found.first().map(|c| c.source.clone()) else {
        return Ok(Construction::Failed(FailStage::ChainExhausted));
    };

    let pos = comparative_pos(kb, adjective);
    let mut entries = Vec::new();
    for c in &found {
        let sign = match oracle.influence_sign(&render_term(kb, &c.quantity_type), adjective, &fact.text) {
            Ok(s) => s,
            Err(OracleError::SignUndetermined { .. }) => {
                log::warn!("{adjective}: no sign for {}; pair dropped", c.quantity_type);
                continue;
            }
            Err(e) => return Err(e),
        };
        let relation = match sign {
            Sign::Minus => Relation::LessThan,
            Sign::Plus => Relation::GreaterThan,
            Sign::None => continue,
        };
        let mut entry = SemtransEntry::comparison(adjective, pos, &c.frame_type, &c.quantity_type, relation);
        entry.provenance = Provenance::Expanded {
            fact_id: fact.id.clone(),
            step: next_step(kb),
        };
        let saved = kb.auto_register;
        kb.auto_register = true;
        let added = kb.add_semtrans(entry.clone());
        kb.auto_register = saved;
        match added {
            Ok(AddOutcome::Added) => entries.push(entry),
            Ok(AddOutcome::Duplicate) => {}
            Err(e) => log::warn!("{adjective}: {e}"),
        }
    }
    if entries.is_empty() {
        return Ok(Construction::Failed(FailStage::SignUndetermined));
    }
    Ok(Construction::Built { entries, via })
}

/// Finds relevant existing semtrans for `adjective`, constructing new ones
/// when there are none.
pub fn diagnose(
    adjective: &str,
    fact: &GroundingFact,
    kb: &mut KnowledgeBase,
    oracle: &Oracle,
) -> Result<DiagnosisOutcome, OracleError> {
    let before = oracle.stats();
    let pos = comparative_pos(kb, adjective);
    let existing = kb.semtrans_for(adjective, pos);
    let trigger = if existing.is_empty() {
        Trigger::NoSemtrans
    } else {
        let comparisons: Vec<SemtransEntry> = filter_comparison(&existing).into_iter().cloned().collect();
        if comparisons.is_empty() {
            Trigger::NoComparisonSemtrans
        } else {
            let mut relevant = Vec::new();
            for e in &comparisons {
                let qtype = e.quantity_type.as_deref().unwrap_or_default();
                if oracle.judge_relevance(
                    &render_term(kb, &e.frame_type),
                    &render_term(kb, qtype),
                    adjective,
                    &fact.text,
                )? {
                    relevant.push(e.to_string());
                }
            }
            if !relevant.is_empty() {
                return Ok(DiagnosisOutcome {
                    fact_id: fact.id.clone(),
                    adjective: adjective.to_string(),
                    result: DiagnosisResult::RelevantExisting { entries: relevant },
                    calls: delta(&before, &oracle.stats()),
                });
            }
            Trigger::NoRelevant
        }
    };
    let result = match construct_new_semtrans(adjective, fact, kb, oracle)? {
        Construction::Built { entries, via } => DiagnosisResult::Constructed {
            entries: entries.iter().map(ToString::to_string).collect(),
            via,
        },
        Construction::Failed(stage) => DiagnosisResult::Failed { trigger, stage },
    };
    Ok(DiagnosisOutcome {
        fact_id: fact.id.clone(),
        adjective: adjective.to_string(),
        result,
        calls: delta(&before, &oracle.stats()),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactExpansion {
    pub fact_id: String,
    /// Sentences that were scanned: the rephrasings, or the original text.
    pub sentences: Vec<String>,
    pub outcomes: Vec<DiagnosisOutcome>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExpansionTotals {
    pub facts: usize,
    pub comparatives: usize,
    pub relevant_existing: usize,
    pub constructed: usize,
    pub failed: usize,
    pub entries_added: usize,
    pub errors: usize,
    pub calls: BTreeMap<Role, usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpansionReport {
    pub facts: Vec<FactExpansion>,
    /// Entries added to the KB, in order of addition.
    pub delta: Vec<SemtransEntry>,
    pub totals: ExpansionTotals,
}

impl ExpansionReport {
    /// One JSON record per diagnosis outcome, then per-fact errors, then the
    /// totals.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            for o in &f.outcomes {
                out.push_str(&serde_json::to_string(o).expect("outcome serializes"));
                out.push('\n');
            }
            if let Some(e) = &f.error {
                let rec = serde_json::json!({"fact_id": f.fact_id, "error": e});
                out.push_str(&rec.to_string());
                out.push('\n');
            }
        }
        let totals = serde_json::json!({ "totals": self.totals });
        out.push_str(&totals.to_string());
        out.push('\n');
        out
    }
}

fn expand_fact(
    fact: &GroundingFact,
    kb: &mut KnowledgeBase,
    oracle: &Oracle,
    fe: &mut FactExpansion,
) -> Result<(), OracleError> {
    let mut sentences = oracle.rephrase(&fact.text, kb)?;
    if sentences.is_empty() {
        sentences.push(fact.text.clone());
    }
    fe.sentences = sentences.clone();
    let mut done: Vec<String> = Vec::new();
    for s in &sentences {
        let toks = tokenize(s, kb);
        for i in identify_comparatives(&toks).comparatives {
            let word = toks[i].surface.clone();
            if done.contains(&word) {
                continue;
            }
            done.push(word.clone());
            fe.outcomes.push(diagnose(&word, fact, kb, oracle)?);
        }
    }
    Ok(())
}

/// Processes facts in order, one comparative at a time. Oracle failures are
/// recorded against their fact and the run moves on.
pub fn expand_corpus(facts: &[GroundingFact], kb: &mut KnowledgeBase, oracle: &Oracle) -> ExpansionReport {
    let base = kb.clone();
    let start = oracle.stats();
    let mut report = ExpansionReport::default();
    for fact in facts {
        let mut fe = FactExpansion {
            fact_id: fact.id.clone(),
            ..FactExpansion::default()
        };
        if let Err(e) = expand_fact(fact, kb, oracle, &mut fe) {
            log::warn!("{}: {e}", fact.id);
            fe.error = Some(e.to_string());
        }
        report.facts.push(fe);
    }
    report.delta = kb.semtrans_delta(&base);
    let t = &mut report.totals;
    t.facts = facts.len();
    for f in &report.facts {
        t.errors += usize::from(f.error.is_some());
        for o in &f.outcomes {
            t.comparatives += 1;
            match o.result {
                DiagnosisResult::RelevantExisting { .. } => t.relevant_existing += 1,
                DiagnosisResult::Constructed { .. } => t.constructed += 1,
                DiagnosisResult::Failed { .. } => t.failed += 1,
            }
        }
    }
    t.entries_added = report.delta.len();
    t.calls = delta(&start, &oracle.stats());
    report
}
