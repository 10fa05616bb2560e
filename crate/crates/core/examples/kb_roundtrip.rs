//! Load the seed knowledge base, look a word up, and write it back out.
//!
//! ```bash
//! cargo run --example kb_roundtrip
//! ```

use quantsem::kb::{load_kb, parse_kb, Pos};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini/seed.kb");
    let kb = load_kb(path)?;

    for e in kb.entries_for("cooler") {
        println!("lex: {} {} root={} degree={}", e.surface, e.pos, e.root, e.degree.as_str());
    }
    for s in kb.semtrans_for("strong", Pos::Adjective) {
        println!("semtrans: {s}");
    }
    let t = kb.taxonomy();
    println!("Size ~ SpatialQuantity partial: {}", t.partial("Size", "SpatialQuantity"));

    // canonical text is stable across a reload
    let text = kb.to_canonical_string();
    let again = parse_kb(&text)?;
    assert_eq!(again.to_canonical_string(), text);
    println!("{} bytes, round trip ok", text.len());
    Ok(())
}
