mod support;

use quantsem::parser::{best_parse, parse_text, SentenceKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{seed_kb, template_sentence};

#[test]
fn template_sentences_parse_as_comparatives() {
    let kb = seed_kb();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..150 {
        let s = template_sentence(&mut rng);
        let parses = parse_text(&s, &kb);
        let best = best_parse(&parses).unwrap_or_else(|| panic!("no parse: {s}"));
        assert_eq!(best.kind, SentenceKind::Comparative, "{s}");
        assert_eq!(parse_text(&s, &kb), parses, "{s}");
    }
}
