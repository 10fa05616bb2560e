//! Quantity and ordinal frames built from parsed comparatives, and their
//! projection to quantity/sign pairs.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::kb::{filter_comparison, Amount, KnowledgeBase, Pos, QualValue, Relation, SemtransEntry};
use crate::parser::{marker_relation, ComparativeElement, Comparee, ParseTree, SentenceKind};

/// Direction of change attached to a quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "none")]
    None,
}

impl Sign {
    pub fn from_relation(r: Relation) -> Sign {
        match r {
            Relation::LessThan => Sign::Minus,
            Relation::GreaterThan => Sign::Plus,
            Relation::None => Sign::None,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
            Sign::None => Sign::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" => Some(Sign::Plus),
            "-" => Some(Sign::Minus),
            "none" => Some(Sign::None),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantitySign {
    pub quantity_type: String,
    pub sign: Sign,
}

impl QuantitySign {
    pub fn new(qtype: &str, sign: Sign) -> Self {
        Self {
            quantity_type: qtype.to_string(),
            sign,
        }
    }
}

impl fmt::Display for QuantitySign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.quantity_type, self.sign)
    }
}

/// A discourse entity taking part in a comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Entity {
    /// `var` is the minted discourse variable, `text` the noun phrase.
    Var { var: String, text: String },
    /// Elided comparee; `head` is the noun it stands in for.
    Gap { head: String },
}

impl Entity {
    fn term(&self) -> String {
        match self {
            Entity::Var { var, .. } => var.clone(),
            Entity::Gap { .. } => "(GapFn :NOUN)".to_string(),
        }
    }
}

/// One applicable reading of a comparative element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceOption {
    pub word: String,
    pub frame_type: String,
    pub quantity_type: String,
    pub relation: Relation,
    /// Set for value-bearing readings (degree phrases, declaratives).
    pub value: Option<QualValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemanticChoice {
    /// Readable form of the element, e.g. `less energy`.
    pub element: String,
    /// Empty when no semtrans applies.
    pub options: Vec<ChoiceOption>,
    pub subject: Entity,
    /// Absent only for declaratives.
    pub noun: Option<Entity>,
}

impl SemanticChoice {
    pub fn is_resolved(&self) -> bool {
        !self.options.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuantityFrame {
    pub id: String,
    pub entity: Entity,
    pub quantity_type: String,
    pub value: Option<QualValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrdinalFrame {
    pub id: String,
    pub relation: Relation,
    pub quantity1: String,
    pub quantity2: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FrameSet {
    pub sentence: String,
    /// Short hash of the sentence; frame ids are unique within it.
    pub scope: String,
    pub quantity_frames: Vec<QuantityFrame>,
    pub ordinal_frames: Vec<OrdinalFrame>,
    pub unresolved: Vec<String>,
}

fn option_from(e: &SemtransEntry, relation: Relation, qtype: &str) -> ChoiceOption {
    ChoiceOption {
        word: e.word.clone(),
        frame_type: e.frame_type.clone(),
        quantity_type: qtype.to_string(),
        relation,
        value: e.value.clone(),
    }
}

fn comparison_options(kb: &KnowledgeBase, word: &str, pos: Pos) -> Vec<ChoiceOption> {
    filter_comparison(&kb.semtrans_for(word, pos))
        .into_iter()
        .filter_map(|e| Some(option_from(e, e.relation, e.quantity_type.as_deref()?)))
        .collect()
}

/// Value-bearing readings of a base form. The quantity type comes from the
/// value map, falling back to the entry's own quantity type.
fn value_options(kb: &KnowledgeBase, word: &str, pos: Pos) -> Vec<(ChoiceOption, Amount)> {
    kb.semtrans_for(word, pos)
        .into_iter()
        .filter_map(|e| {
            let v = e.value.as_ref()?;
            let q = kb
                .quantity_type_of_value(v)
                .or(e.quantity_type.as_deref())
                .unwrap_or(&v.qtype);
            Some((option_from(e, Relation::None, q), v.amount))
        })
        .collect()
}

fn noun_options(kb: &KnowledgeBase, tree: &ParseTree, head: usize) -> Vec<ChoiceOption> {
    let tok = &tree.tokens[head];
    let lookup = |w: &str| -> Vec<ChoiceOption> {
        kb.semtrans_for(w, Pos::Noun)
            .into_iter()
            .filter_map(|e| Some(option_from(e, Relation::None, e.quantity_type.as_deref()?)))
            .collect()
    };
    let found = lookup(&tok.surface);
    if found.is_empty() {
        lookup(tok.root(Pos::Noun))
    } else {
        found
    }
}

struct EntityMinter(usize);

impl EntityMinter {
    fn mint(&mut self, tree: &ParseTree, head: usize, text: &str) -> Entity {
        self.0 += 1;
        let root = tree.tokens[head].root(Pos::Noun);
        Entity::Var {
            var: format!("{}{}", root, self.0),
            text: text.to_string(),
        }
    }
}

/// Readings for every comparative element of the tree, with roles bound.
pub fn interpret(tree: &ParseTree, kb: &KnowledgeBase) -> Vec<SemanticChoice> {
    let mut minter = EntityMinter(0);
    let subject = minter.mint(tree, tree.subject.head, &tree.subject.text);
    let noun = match &tree.comparee {
        None => None,
        Some(Comparee::Gap { head }) => Some(Entity::Gap {
            head: tree.tokens[*head].surface.clone(),
        }),
        Some(Comparee::Node(p)) => Some(minter.mint(tree, p.head, &p.text)),
    };

    if tree.kind == SentenceKind::Declarative {
        let Some(adj) = tree.predicate else {
            return Vec::new();
        };
        let word = &tree.tokens[adj].surface;
        let options = value_options(kb, word, Pos::Adjective)
            .into_iter()
            .map(|(o, _)| o)
            .collect();
        return vec![SemanticChoice {
            element: word.clone(),
            options,
            subject,
            noun: None,
        }];
    }

    let mut choices = Vec::new();
    for el in &tree.elements {
        let options = match *el {
            ComparativeElement::Adjective { token } => {
                comparison_options(kb, &tree.tokens[token].surface, Pos::Adjective)
            }
            ComparativeElement::Adverb { token } => {
                let w = &tree.tokens[token].surface;
                let found = comparison_options(kb, w, Pos::Adverb);
                if found.is_empty() {
                    comparison_options(kb, w, Pos::Adjective)
                } else {
                    found
                }
            }
            ComparativeElement::Degree {
                marker,
                head,
                head_pos,
            } => {
                let rel = marker_relation(&tree.tokens[marker]);
                match head_pos {
                    Pos::Noun => noun_options(kb, tree, head)
                        .into_iter()
                        .map(|o| ChoiceOption { relation: rel, ..o })
                        .collect(),
                    pos => value_options(kb, &tree.tokens[head].surface, pos)
                        .into_iter()
                        .map(|(o, amount)| ChoiceOption {
                            relation: if amount == Amount::High { rel } else { rel.flipped() },
                            ..o
                        })
                        .collect(),
                }
            }
        };
        choices.push(SemanticChoice {
            element: el.describe(&tree.tokens),
            options,
            subject: subject.clone(),
            noun: noun.clone(),
        });
    }
    choices
}

fn sentence_scope(sentence: &str) -> String {
    let digest = Sha256::digest(sentence.as_bytes());
    hex::encode(&digest[..6])
}

/// Two quantity frames and one ordinal frame per resolved comparison
/// reading; one valued quantity frame for a declarative.
pub fn build_frames(choices: &[SemanticChoice], tree: &ParseTree) -> FrameSet {
    let sentence = tree.sentence();
    let mut fs = FrameSet {
        scope: sentence_scope(&sentence),
        sentence,
        ..FrameSet::default()
    };
    for choice in choices {
        if !choice.is_resolved() {
            fs.unresolved.push(choice.element.clone());
            continue;
        }
        for opt in &choice.options {
            match &choice.noun {
                None => {
                    let id = format!("QuantityFrame{}", fs.quantity_frames.len() + 1);
                    fs.quantity_frames.push(QuantityFrame {
                        id,
                        entity: choice.subject.clone(),
                        quantity_type: opt.quantity_type.clone(),
                        value: opt.value.clone(),
                    });
                }
                Some(noun) => {
                    if !opt.relation.is_comparison() {
                        continue;
                    }
                    let q1 = format!("QuantityFrame{}", fs.quantity_frames.len() + 1);
                    let q2 = format!("QuantityFrame{}", fs.quantity_frames.len() + 2);
                    for (id, entity) in [(&q1, &choice.subject), (&q2, noun)] {
                        fs.quantity_frames.push(QuantityFrame {
                            id: id.clone(),
                            entity: entity.clone(),
                            quantity_type: opt.quantity_type.clone(),
                            value: None,
                        });
                    }
                    fs.ordinal_frames.push(OrdinalFrame {
                        id: format!("OrdinalFrame{}", fs.ordinal_frames.len() + 1),
                        relation: opt.relation,
                        quantity1: q1,
                        quantity2: q2,
                    });
                }
            }
        }
    }
    fs
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Projection {
    pub pairs: Vec<QuantitySign>,
    pub conflicts: Vec<String>,
}

/// Merges pairs by quantity type in first-seen order. Agreeing signs
/// collapse; disagreeing ones become `none`.
pub fn merge_pairs<I: IntoIterator<Item = QuantitySign>>(pairs: I) -> Projection {
    let mut out = Projection::default();
    for p in pairs {
        match out.pairs.iter_mut().find(|q| q.quantity_type == p.quantity_type) {
            None => out.pairs.push(p),
            Some(q) if q.sign == p.sign => {}
            Some(q) => {
                if q.sign != Sign::None || p.sign == Sign::None {
                    let msg = format!("conflicting signs for {}", p.quantity_type);
                    if !out.conflicts.contains(&msg) {
                        out.conflicts.push(msg);
                    }
                }
                q.sign = Sign::None;
            }
        }
    }
    out
}

pub fn project(fs: &FrameSet) -> Projection {
    let pairs = fs.ordinal_frames.iter().filter_map(|o| {
        let q1 = fs.quantity_frames.iter().find(|q| q.id == o.quantity1)?;
        Some(QuantitySign::new(&q1.quantity_type, Sign::from_relation(o.relation)))
    });
    merge_pairs(pairs)
}

/// One pair per quantity type, signed from the subject side.
pub fn frames_to_pairs(fs: &FrameSet) -> Vec<QuantitySign> {
    project(fs).pairs
}

/// Readable rendering of an ontology identifier.
pub fn render_term(kb: &KnowledgeBase, id: &str) -> String {
    if let Some(name) = kb.frame_type_name(id) {
        return name.to_string();
    }
    let bare = id
        .strip_prefix("FN_")
        .or_else(|| id.strip_prefix("Fn_"))
        .unwrap_or(id);
    let mut words: Vec<String> = Vec::new();
    for part in bare.split('_').filter(|p| !p.is_empty()) {
        let mut cur = String::new();
        let mut prev_lower = false;
        for c in part.chars() {
            if c.is_uppercase() && prev_lower {
                words.push(std::mem::take(&mut cur));
            }
            prev_lower = c.is_lowercase() || c.is_ascii_digit();
            cur.extend(c.to_lowercase());
        }
        if !cur.is_empty() {
            words.push(cur);
        }
    }
    words.join(" ")
}

impl FrameSet {
    /// Parenthesized listing; quantity frames grouped by type, then ordinal
    /// frames.
    pub fn listing(&self) -> String {
        let mut s = String::new();
        let mut current: Option<&str> = None;
        for q in &self.quantity_frames {
            if current != Some(q.quantity_type.as_str()) {
                let _ = writeln!(s, ";; Quantity frames for quantity type `{}`", q.quantity_type);
                current = Some(q.quantity_type.as_str());
            }
            let id = &q.id;
            let _ = write!(
                s,
                "({id}\n  (isa {id} QuantityFrame) (quantityType {id} {})\n  (quantityEntity {id} {})",
                q.quantity_type,
                q.entity.term()
            );
            if let Some(v) = &q.value {
                let functor = match v.amount {
                    Amount::High => "HighAmountFn",
                    Amount::Low => "LowAmountFn",
                };
                let _ = write!(s, "\n  (quantityValue {id} ({functor} {}))", v.qtype);
            }
            s.push_str(")\n");
        }
        if !self.ordinal_frames.is_empty() {
            s.push_str(";; Ordinal frames -- interpreted as comparison events\n");
        }
        for o in &self.ordinal_frames {
            let id = &o.id;
            let _ = writeln!(
                s,
                "({id}\n  (isa {id} OrdinalFrame) (OrdinalReln {id} {})\n  (quantity1 {id} {}) (quantity2 {id} {}))",
                o.relation.as_str(),
                o.quantity1,
                o.quantity2
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::parser::{best_parse, parse_text};

    const KB: &str = r#"
(frame-type FN_Temperature)
(frame-type FN_Speed)
(frame-type FN_Energy)
(frame-type FN_Size)
(frame-type FN_Level_of_force_exertion "force exertion level")
(qtype Temperature)
(qtype Speed)
(qtype Energy)
(qtype Volume)
(value-map (high-amount-of Volume) Volume)
(value-map (low-amount-of Speed) Speed)
(lex particles noun :root particle :degree positive)
(lex gas noun :root gas :degree positive)
(lex energy noun :root energy :degree positive)
(lex sun noun :root sun :degree positive)
(lex that pronoun :root that :degree positive)
(lex are copula :root be :degree positive)
(lex is copula :root be :degree positive)
(lex in preposition :root in :degree positive)
(lex than preposition :root than :degree positive)
(lex the determiner :root the :degree positive)
(lex cooler adjective :root cool :degree comparative)
(lex bluxer adjective :root blux :degree comparative)
(lex large adjective :root large :degree positive)
(lex have verb :root have :degree positive)
(lex move verb :root move :degree positive)
(lex slowly adverb :root slowly :degree positive)
(lex more determiner :root much :degree comparative)
(lex less determiner :root little :degree comparative)
(semtrans cooler adjective :frame FN_Temperature :qtype Temperature :reln lessThan)
(semtrans energy noun :frame FN_Energy :qtype Energy :reln none)
(semtrans slowly adverb :frame FN_Speed :qtype Speed :reln none :value (low-amount-of Speed))
(semtrans large adjective :frame FN_Size :qtype Volume :reln none :value (high-amount-of Volume))
"#;

    fn kb() -> KnowledgeBase {
        parse_kb(KB).unwrap()
    }

    fn frames_for(text: &str, kb: &KnowledgeBase) -> (Vec<SemanticChoice>, FrameSet) {
        let parses = parse_text(text, kb);
        let tree = best_parse(&parses).expect("parse");
        let choices = interpret(tree, kb);
        let fs = build_frames(&choices, tree);
        (choices, fs)
    }

    #[test]
    fn adjective_and_degree_noun_choices() {
        let k = kb();
        let (choices, fs) =
            frames_for("Particles that are in cooler gas have less energy than particles.", &k);
        assert_eq!(choices.len(), 2);
        assert_eq!(choices[0].options[0].quantity_type, "Temperature");
        assert_eq!(choices[0].options[0].relation, Relation::LessThan);
        assert_eq!(choices[0].options[0].frame_type, "FN_Temperature");
        assert_eq!(choices[1].options[0].quantity_type, "Energy");
        assert_eq!(choices[1].options[0].relation, Relation::LessThan);
        assert!(matches!(&choices[0].subject, Entity::Var { var, .. } if var == "particle1"));
        assert_eq!(
            frames_to_pairs(&fs),
            vec![
                QuantitySign::new("Temperature", Sign::Minus),
                QuantitySign::new("Energy", Sign::Minus)
            ]
        );
    }

    #[test]
    fn unknown_comparative_is_unresolved() {
        let (choices, fs) = frames_for("Particles are bluxer than particles.", &kb());
        assert!(!choices[0].is_resolved());
        assert_eq!(fs.unresolved, vec!["bluxer"]);
        assert!(fs.ordinal_frames.is_empty());
    }

    #[test]
    fn listing_matches_worked_example() {
        let (_, fs) = frames_for("Particles that move more slowly are cooler than particles.", &kb());
        assert_eq!(fs.quantity_frames.len(), 4);
        assert_eq!(fs.ordinal_frames.len(), 2);
        let expected = "\
;; Quantity frames for quantity type `Speed`
(QuantityFrame1
  (isa QuantityFrame1 QuantityFrame) (quantityType QuantityFrame1 Speed)
  (quantityEntity QuantityFrame1 particle1))
(QuantityFrame2
  (isa QuantityFrame2 QuantityFrame) (quantityType QuantityFrame2 Speed)
  (quantityEntity QuantityFrame2 (GapFn :NOUN)))
;; Quantity frames for quantity type `Temperature`
(QuantityFrame3
  (isa QuantityFrame3 QuantityFrame) (quantityType QuantityFrame3 Temperature)
  (quantityEntity QuantityFrame3 particle1))
(QuantityFrame4
  (isa QuantityFrame4 QuantityFrame) (quantityType QuantityFrame4 Temperature)
  (quantityEntity QuantityFrame4 (GapFn :NOUN)))
;; Ordinal frames -- interpreted as comparison events
(OrdinalFrame1
  (isa OrdinalFrame1 OrdinalFrame) (OrdinalReln OrdinalFrame1 lessThan)
  (quantity1 OrdinalFrame1 QuantityFrame1) (quantity2 OrdinalFrame1 QuantityFrame2))
(OrdinalFrame2
  (isa OrdinalFrame2 OrdinalFrame) (OrdinalReln OrdinalFrame2 lessThan)
  (quantity1 OrdinalFrame2 QuantityFrame3) (quantity2 OrdinalFrame2 QuantityFrame4))
";
        assert_eq!(fs.listing(), expected);
        assert_eq!(
            frames_to_pairs(&fs),
            vec![
                QuantitySign::new("Speed", Sign::Minus),
                QuantitySign::new("Temperature", Sign::Minus)
            ]
        );
    }

    #[test]
    fn declarative_gives_valued_frame() {
        let (_, fs) = frames_for("The Sun is large", &kb());
        assert_eq!(fs.quantity_frames.len(), 1);
        assert!(fs.ordinal_frames.is_empty());
        let q = &fs.quantity_frames[0];
        assert_eq!(q.quantity_type, "Volume");
        assert_eq!(q.value, Some(QualValue::high("Volume")));
        assert!(matches!(&q.entity, Entity::Var { text, .. } if text == "the sun"));
        assert!(fs.listing().contains("(quantityValue QuantityFrame1 (HighAmountFn Volume))"));
        assert!(frames_to_pairs(&fs).is_empty());
    }

    #[test]
    fn conflicting_signs_become_none() {
        let mut fs = FrameSet::default();
        for (i, rel) in [Relation::LessThan, Relation::GreaterThan].into_iter().enumerate() {
            for j in 1..=2 {
                fs.quantity_frames.push(QuantityFrame {
                    id: format!("Q{i}{j}"),
                    entity: Entity::Gap { head: "x".into() },
                    quantity_type: "Temperature".into(),
                    value: None,
                });
            }
            fs.ordinal_frames.push(OrdinalFrame {
                id: format!("O{i}"),
                relation: rel,
                quantity1: format!("Q{i}1"),
                quantity2: format!("Q{i}2"),
            });
        }
        let p = project(&fs);
        assert_eq!(p.pairs, vec![QuantitySign::new("Temperature", Sign::None)]);
        assert_eq!(p.conflicts.len(), 1);
        assert!(frames_to_pairs(&FrameSet::default()).is_empty());
    }

    #[test]
    fn frames_are_deterministic() {
        let k = kb();
        let text = "Particles that are in cooler gas have less energy than particles.";
        assert_eq!(frames_for(text, &k), frames_for(text, &k));
    }

    #[test]
    fn render_terms() {
        let k = kb();
        assert_eq!(render_term(&KnowledgeBase::new(), "FN_Level_of_force_exertion"), "level of force exertion");
        assert_eq!(render_term(&k, "FN_Level_of_force_exertion"), "force exertion level");
        assert_eq!(render_term(&k, "Temperature"), "temperature");
        assert_eq!(render_term(&k, "FN_Gradable_proximity"), "gradable proximity");
        assert_eq!(render_term(&k, "SpatialQuantity"), "spatial quantity");
    }
}
