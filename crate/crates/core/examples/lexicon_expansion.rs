//! Expand the seed lexicon over the mini corpus from the recorded
//! transcript and print what each comparative went through.
//!
//! ```bash
//! cargo run --example lexicon_expansion
//! ```

use std::sync::Arc;

use quantsem::corpus::ingest_dataset;
use quantsem::expansion::{expand_corpus, DiagnosisResult};
use quantsem::kb::load_kb;
use quantsem::oracle::{CachingInformant, Oracle, TranscriptStore};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini");
    let mut kb = load_kb(format!("{data}/seed.kb"))?;
    let facts = ingest_dataset(format!("{data}/corpus.jsonl").as_ref(), "para", "mini")?;
    let store = TranscriptStore::load(format!("{data}/transcript.jsonl").as_ref())?;
    let oracle = Oracle::new(Arc::new(CachingInformant::replay(Arc::new(store))));

    let report = expand_corpus(&facts, &mut kb, &oracle);
    for f in &report.facts {
        for o in &f.outcomes {
            let what = match &o.result {
                DiagnosisResult::RelevantExisting { .. } => "relevant existing".to_string(),
                DiagnosisResult::Constructed { via, .. } => format!("constructed via {via:?}"),
                DiagnosisResult::Failed { trigger, stage } => format!("failed ({trigger:?}, {stage:?})"),
            };
            println!("{} {:<9} {what}", f.fact_id, o.adjective);
        }
    }
    println!("\n{} entries added:", report.delta.len());
    for e in &report.delta {
        println!("  {e}");
    }
    Ok(())
}
