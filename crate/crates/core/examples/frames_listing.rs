//! Quantity and ordinal frames for one sentence, and the pairs they
//! project to.
//!
//! ```bash
//! cargo run --example frames_listing
//! ```

use quantsem::frames::{build_frames, interpret, project};
use quantsem::kb::load_kb;
use quantsem::parser::{best_parse, parse_text};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = load_kb(concat!(env!("CARGO_MANIFEST_DIR"), "/data/mini/seed.kb"))?;
    for text in [
        "Particles that move more slowly are cooler than particles.",
        "Fewer trees mean more erosion.",
        // denser has no semtrans in the seed KB
        "Water that is colder is denser than water.",
    ] {
        let parses = parse_text(text, &kb);
        let tree = best_parse(&parses).expect("parses");
        let choices = interpret(tree, &kb);
        let fs = build_frames(&choices, tree);
        println!(";; {text}  [scope {}]", fs.scope);
        print!("{}", fs.listing());
        let p = project(&fs);
        println!(";; pairs: {:?}  unresolved: {:?}\n", p.pairs.iter().map(ToString::to_string).collect::<Vec<_>>(), fs.unresolved);
    }
    Ok(())
}
