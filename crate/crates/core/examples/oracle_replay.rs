//! Record oracle answers from a mock table into a transcript, then answer
//! the same requests from the transcript alone.
//!
//! ```bash
//! cargo run --example oracle_replay
//! ```

use std::sync::Arc;

use quantsem::kb::load_kb;
use quantsem::oracle::{CachingInformant, MockInformant, Oracle, OracleError, TranscriptStore};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini");
    let kb = load_kb(format!("{data}/seed.kb"))?;
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("transcript.jsonl");
    let fact = "Bigger stars produce more energy, so their surfaces are hotter.";

    {
        let mock = Arc::new(MockInformant::load(format!("{data}/mock.jsonl").as_ref())?);
        let store = Arc::new(TranscriptStore::open(&path)?);
        let oracle = Oracle::new(Arc::new(CachingInformant::recording(mock, store.clone())));
        println!("rephrase: {:?}", oracle.rephrase(fact, &kb)?);
        println!("antonyms(closer): {:?}", oracle.antonyms("closer")?);
        println!("recorded {} replies", store.len());
    }

    let store = Arc::new(TranscriptStore::load(&path)?);
    let replay = Oracle::new(Arc::new(CachingInformant::replay(store)));
    println!("replayed rephrase: {:?}", replay.rephrase(fact, &kb)?);
    match replay.antonyms("gentler") {
        Err(e @ OracleError::ReplayMiss { .. }) => println!("unrecorded request: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
