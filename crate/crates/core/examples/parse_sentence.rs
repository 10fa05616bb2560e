//! Tokenize and parse a comparative sentence, then print the chosen tree
//! and its roles.
//!
//! ```bash
//! cargo run --example parse_sentence -- "Gas that is smaller has less space than gas."
//! ```

use quantsem::kb::load_kb;
use quantsem::parser::{best_parse, identify_comparatives, parse, tokenize};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = load_kb(concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini/seed.kb"))?;
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "Particles that move more slowly are cooler than particles.".into());

    let tokens = tokenize(&text, &kb);
    let marks = identify_comparatives(&tokens);
    println!("{} tokens; comparatives {:?}; degree markers {:?}", tokens.len(), marks.comparatives, marks.degree_markers);

    let parses = parse(&tokens);
    let Some(tree) = best_parse(&parses) else {
        println!("no parse");
        return Ok(());
    };
    println!("{}", tree.root.render(&tree.tokens));
    println!("SUBJECT {:?}", tree.subject.text);
    println!("NOUN    {:?}", tree.comparee);
    for e in &tree.elements {
        println!("element {}", e.describe(&tree.tokens));
    }
    Ok(())
}
