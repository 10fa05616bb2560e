//! Run all five pipelines over the mini corpus from the recorded
//! transcript and print the score table.
//!
//! ```bash
//! cargo run --example pipelines
//! ```

use std::sync::Arc;

use quantsem::corpus::ingest_dataset;
use quantsem::eval::load_gold;
use quantsem::expansion::expand_corpus;
use quantsem::kb::load_kb;
use quantsem::oracle::{CachingInformant, Oracle, TranscriptStore};
use quantsem::pipeline::{run_corpus, score_table, LabelTable, PipelineKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini");
    let oracle = || -> Result<Oracle, Box<dyn std::error::Error>> {
        let store = TranscriptStore::load(format!("{data}/transcript.jsonl").as_ref())?;
        Ok(Oracle::new(Arc::new(CachingInformant::replay(Arc::new(store)))))
    };
    let facts = ingest_dataset(format!("{data}/corpus.jsonl").as_ref(), "para", "mini")?;
    let golds = load_gold(format!("{data}/gold.sx").as_ref())?;
    let labels = LabelTable::load(format!("{data}/labels.txt").as_ref())?;

    let mut kb = load_kb(format!("{data}/seed.kb"))?;
    expand_corpus(&facts, &mut kb, &oracle()?);

    let mut reports = Vec::new();
    for kind in PipelineKind::ALL {
        let o = oracle()?;
        let r = run_corpus(kind, &kind.config(), &facts, &kb, Some(&o), &golds, &labels)?;
        reports.push(r);
    }
    print!("{}", score_table(&reports));

    let llm = reports.last().unwrap();
    for f in llm.facts.iter().filter(|f| !f.diagnostics.is_empty()) {
        println!("{}: {}", f.fact_id, f.diagnostics.join("; "));
    }
    Ok(())
}
