//! Lexicon, semantic-translation (semtrans) facts, identifier tables and the
//! quantity-type taxonomy.
//!
//! The knowledge base is the only mutable state in the system. Lexicon
//! expansion writes into it through [`KnowledgeBase::add_semtrans`]; every
//! other consumer works on a snapshot.

mod io;
mod taxonomy;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sexpr::Sexpr;

pub use io::{load_kb, parse_kb, save_kb, semtrans_lines};
pub use taxonomy::QuantityTaxonomy;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unresolved {kind} identifier `{id}`")]
    UnresolvedIdentifier { kind: &'static str, id: String },
    #[error("duplicate lexical entry ({0}, {1})")]
    DuplicateLexeme(String, Pos),
    #[error("invalid entry: {0}")]
    InvalidEntry(String),
    #[error("partial edge {0} -> {1} would create a cycle")]
    CyclicPartial(String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Determiner,
    Preposition,
    Copula,
    Conjunction,
    Pronoun,
}

impl Pos {
    pub const ALL: [Pos; 9] = [
        Pos::Noun,
        Pos::Verb,
        Pos::Adjective,
        Pos::Adverb,
        Pos::Determiner,
        Pos::Preposition,
        Pos::Copula,
        Pos::Conjunction,
        Pos::Pronoun,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adjective => "adjective",
            Pos::Adverb => "adverb",
            Pos::Determiner => "determiner",
            Pos::Preposition => "preposition",
            Pos::Copula => "copula",
            Pos::Conjunction => "conjunction",
            Pos::Pronoun => "pronoun",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown part of speech `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Degree {
    Positive,
    Comparative,
    Superlative,
}

impl Degree {
    pub fn as_str(self) -> &'static str {
        match self {
            Degree::Positive => "positive",
            Degree::Comparative => "comparative",
            Degree::Superlative => "superlative",
        }
    }
}

impl FromStr for Degree {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Degree::Positive),
            "comparative" => Ok(Degree::Comparative),
            "superlative" => Ok(Degree::Superlative),
            _ => Err(format!("unknown degree `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexicalEntry {
    pub surface: String,
    pub pos: Pos,
    /// Base form; equal to `surface` for base forms.
    pub root: String,
    pub degree: Degree,
    /// Explicitly marks a graded form that is its own root.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub self_root: bool,
}

impl LexicalEntry {
    pub fn new(surface: &str, pos: Pos, root: &str, degree: Degree) -> Self {
        Self {
            surface: surface.to_string(),
            pos,
            root: root.to_string(),
            degree,
            self_root: false,
        }
    }

    pub fn is_comparative(&self) -> bool {
        self.degree == Degree::Comparative
    }

    fn validate(&self) -> Result<(), KbError> {
        if self.degree != Degree::Positive && self.root == self.surface && !self.self_root {
            return Err(KbError::InvalidEntry(format!(
                "graded form `{}` needs a distinct root or :self-root",
                self.surface
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "lessThan")]
    LessThan,
    #[serde(rename = "greaterThan")]
    GreaterThan,
    #[serde(rename = "none")]
    None,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::LessThan => "lessThan",
            Relation::GreaterThan => "greaterThan",
            Relation::None => "none",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Relation::LessThan => Relation::GreaterThan,
            Relation::GreaterThan => Relation::LessThan,
            Relation::None => Relation::None,
        }
    }

    pub fn is_comparison(self) -> bool {
        self != Relation::None
    }
}

impl FromStr for Relation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lessThan" => Ok(Relation::LessThan),
            "greaterThan" => Ok(Relation::GreaterThan),
            "none" => Ok(Relation::None),
            _ => Err(format!("unknown relation `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Amount {
    High,
    Low,
}

/// `(high-amount-of Q)` / `(low-amount-of Q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QualValue {
    pub amount: Amount,
    pub qtype: String,
}

impl QualValue {
    pub fn high(qtype: &str) -> Self {
        Self {
            amount: Amount::High,
            qtype: qtype.to_string(),
        }
    }

    pub fn low(qtype: &str) -> Self {
        Self {
            amount: Amount::Low,
            qtype: qtype.to_string(),
        }
    }

    pub fn functor(&self) -> &'static str {
        match self.amount {
            Amount::High => "high-amount-of",
            Amount::Low => "low-amount-of",
        }
    }

    pub fn to_sexpr(&self) -> Sexpr {
        Sexpr::list([Sexpr::atom(self.functor()), Sexpr::atom(&self.qtype)])
    }

    pub fn from_sexpr(e: &Sexpr) -> Result<Self, String> {
        let items = e
            .as_list()
            .ok_or_else(|| format!("expected qualitative value list, got `{e}`"))?;
        let (functor, qtype) = match items {
            [Sexpr::Atom(f), Sexpr::Atom(q)] => (f.as_str(), q.as_str()),
            _ => return Err(format!("malformed qualitative value `{e}`")),
        };
        let amount = match functor {
            "high-amount-of" => Amount::High,
            "low-amount-of" => Amount::Low,
            other => return Err(format!("unsupported qualitative value functor `{other}`")),
        };
        Ok(Self {
            amount,
            qtype: qtype.to_string(),
        })
    }
}

impl fmt::Display for QualValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Provenance {
    Builtin,
    /// Minted by lexicon expansion while processing `fact_id`; `step` is the
    /// position of the addition within the run.
    Expanded { fact_id: String, step: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemtransKey {
    pub word: String,
    pub pos: Pos,
    pub frame_type: String,
    pub quantity_type: Option<String>,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemtransEntry {
    pub word: String,
    pub pos: Pos,
    pub frame_type: String,
    pub quantity_type: Option<String>,
    pub relation: Relation,
    /// Role template, e.g. `(comparer :EVENT :SUBJECT)`.
    pub roles: Vec<Sexpr>,
    pub value: Option<QualValue>,
    /// Binding/group-pattern slots, kept verbatim.
    pub binding: Option<Sexpr>,
    pub provenance: Provenance,
}

impl SemtransEntry {
    /// A builtin comparison semtrans with the standard comparer/comparee roles.
    pub fn comparison(word: &str, pos: Pos, frame: &str, qtype: &str, relation: Relation) -> Self {
        Self {
            word: word.to_string(),
            pos,
            frame_type: frame.to_string(),
            quantity_type: Some(qtype.to_string()),
            relation,
            roles: Self::comparison_roles(),
            value: None,
            binding: None,
            provenance: Provenance::Builtin,
        }
    }

    pub fn comparison_roles() -> Vec<Sexpr> {
        vec![
            Sexpr::list([Sexpr::atom("comparer"), Sexpr::atom(":EVENT"), Sexpr::atom(":SUBJECT")]),
            Sexpr::list([Sexpr::atom("comparee"), Sexpr::atom(":EVENT"), Sexpr::atom(":NOUN")]),
        ]
    }

    pub fn key(&self) -> SemtransKey {
        SemtransKey {
            word: self.word.clone(),
            pos: self.pos,
            frame_type: self.frame_type.clone(),
            quantity_type: self.quantity_type.clone(),
            relation: self.relation,
        }
    }

    /// Implies a comparison event.
    pub fn is_comparison(&self) -> bool {
        self.relation.is_comparison()
    }

    pub fn is_expanded(&self) -> bool {
        matches!(self.provenance, Provenance::Expanded { .. })
    }

    fn validate(&self) -> Result<(), KbError> {
        if self.is_comparison() && self.quantity_type.is_none() {
            return Err(KbError::InvalidEntry(format!(
                "comparison semtrans for `{}` lacks a quantity type",
                self.word
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AddOutcome {
    Added,
    Duplicate,
}

#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    lexicon: BTreeMap<(String, Pos), LexicalEntry>,
    semtrans: Vec<SemtransEntry>,
    semtrans_keys: HashSet<SemtransKey>,
    taxonomy: QuantityTaxonomy,
    frame_types: BTreeMap<String, Option<String>>,
    value_map: BTreeMap<QualValue, String>,
    /// Register unseen frame/quantity identifiers on `add_semtrans` instead
    /// of failing. Runtime flag, never persisted.
    pub auto_register: bool,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.lexicon == other.lexicon
            && self.taxonomy == other.taxonomy
            && self.frame_types == other.frame_types
            && self.value_map == other.value_map
            && self.semtrans_sorted() == other.semtrans_sorted()
    }
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_frame_type(&mut self, id: &str, name: Option<&str>) {
        let slot = self.frame_types.entry(id.to_string()).or_insert(None);
        if let Some(n) = name {
            *slot = Some(n.to_string());
        }
    }

    pub fn add_quantity_type(&mut self, id: &str) {
        self.taxonomy.add_node(id);
    }

    pub fn has_frame_type(&self, id: &str) -> bool {
        self.frame_types.contains_key(id)
    }

    pub fn has_quantity_type(&self, id: &str) -> bool {
        self.taxonomy.contains(id)
    }

    pub fn frame_types(&self) -> impl Iterator<Item = (&str, Option<&str>)> {
        self.frame_types
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_deref()))
    }

    /// Human-readable name registered for a frame type, if any.
    pub fn frame_type_name(&self, id: &str) -> Option<&str> {
        self.frame_types.get(id)?.as_deref()
    }

    pub fn taxonomy(&self) -> &QuantityTaxonomy {
        &self.taxonomy
    }

    pub fn taxonomy_mut(&mut self) -> &mut QuantityTaxonomy {
        &mut self.taxonomy
    }

    pub fn add_value_mapping(&mut self, value: QualValue, qtype: &str) -> Result<(), KbError> {
        if !self.has_quantity_type(qtype) {
            return Err(KbError::UnresolvedIdentifier {
                kind: "quantity type",
                id: qtype.to_string(),
            });
        }
        self.value_map.insert(value, qtype.to_string());
        Ok(())
    }

    pub fn value_map(&self) -> impl Iterator<Item = (&QualValue, &str)> {
        self.value_map.iter().map(|(k, v)| (k, v.as_str()))
    }

    pub fn add_lexical_entry(&mut self, entry: LexicalEntry) -> Result<(), KbError> {
        entry.validate()?;
        let key = (entry.surface.clone(), entry.pos);
        if self.lexicon.contains_key(&key) {
            return Err(KbError::DuplicateLexeme(key.0, key.1));
        }
        self.lexicon.insert(key, entry);
        Ok(())
    }

    pub fn lexicon(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.lexicon.values()
    }

    /// The entry for `(surface, pos)`, if any. Unknown words are simply absent.
    pub fn lookup_word(&self, surface: &str, pos: Pos) -> Option<&LexicalEntry> {
        self.lexicon.get(&(surface.to_string(), pos))
    }

    /// All entries for a surface form, in part-of-speech order.
    pub fn entries_for(&self, surface: &str) -> Vec<&LexicalEntry> {
        Pos::ALL
            .iter()
            .filter_map(|&p| self.lookup_word(surface, p))
            .collect()
    }

    /// Semtrans for `(word, pos)` in insertion order.
    pub fn semtrans_for(&self, word: &str, pos: Pos) -> Vec<&SemtransEntry> {
        self.semtrans
            .iter()
            .filter(|e| e.word == word && e.pos == pos)
            .collect()
    }

    pub fn semtrans(&self) -> &[SemtransEntry] {
        &self.semtrans
    }

    fn semtrans_sorted(&self) -> Vec<&SemtransEntry> {
        let mut v: Vec<&SemtransEntry> = self.semtrans.iter().collect();
        v.sort_by_key(|e| e.key());
        v
    }

    fn resolve_or_register(&mut self, kind: &'static str, id: &str) -> Result<(), KbError> {
        let known = match kind {
            "frame type" => self.has_frame_type(id),
            _ => self.has_quantity_type(id),
        };
        if known {
            return Ok(());
        }
        if !self.auto_register {
            return Err(KbError::UnresolvedIdentifier {
                kind,
                id: id.to_string(),
            });
        }
        match kind {
            "frame type" => self.add_frame_type(id, None),
            _ => self.add_quantity_type(id),
        }
        Ok(())
    }

    /// Inserts `entry` unless an entry with the same dedup key exists.
    pub fn add_semtrans(&mut self, entry: SemtransEntry) -> Result<AddOutcome, KbError> {
        entry.validate()?;
        let key = entry.key();
        if self.semtrans_keys.contains(&key) {
            return Ok(AddOutcome::Duplicate);
        }
        // check both before registering either, so a failure leaves no trace
        if !self.auto_register {
            if !self.has_frame_type(&entry.frame_type) {
                return Err(KbError::UnresolvedIdentifier {
                    kind: "frame type",
                    id: entry.frame_type.clone(),
                });
            }
            if let Some(q) = &entry.quantity_type {
                if !self.has_quantity_type(q) {
                    return Err(KbError::UnresolvedIdentifier {
                        kind: "quantity type",
                        id: q.clone(),
                    });
                }
            }
        }
        self.resolve_or_register("frame type", &entry.frame_type)?;
        if let Some(q) = entry.quantity_type.clone() {
            self.resolve_or_register("quantity type", &q)?;
        }
        if let Some(v) = &entry.value {
            if !self.has_quantity_type(&v.qtype) {
                self.resolve_or_register("quantity type", &v.qtype.clone())?;
            }
        }
        self.semtrans_keys.insert(key);
        self.semtrans.push(entry);
        Ok(AddOutcome::Added)
    }

    /// Resolves a qualitative value to its quantity type via the value map.
    pub fn quantity_type_of_value(&self, value: &QualValue) -> Option<&str> {
        self.value_map.get(value).map(String::as_str)
    }

    /// Copy of the KB with every expansion-minted semtrans removed.
    pub fn without_expansions(&self) -> KnowledgeBase {
        let mut kb = self.clone();
        kb.semtrans.retain(|e| !e.is_expanded());
        kb.semtrans_keys = kb.semtrans.iter().map(SemtransEntry::key).collect();
        kb
    }

    /// Semtrans present in `self` but not in `base`, in insertion order.
    pub fn semtrans_delta(&self, base: &KnowledgeBase) -> Vec<SemtransEntry> {
        self.semtrans
            .iter()
            .filter(|e| !base.semtrans_keys.contains(&e.key()))
            .cloned()
            .collect()
    }

    /// Quantity types referenced anywhere, for diagnostics.
    pub fn quantity_types(&self) -> BTreeSet<&str> {
        self.taxonomy.nodes().collect()
    }
}

/// Keeps exactly the entries that imply a comparison event, order preserved.
pub fn filter_comparison<'a>(entries: &[&'a SemtransEntry]) -> Vec<&'a SemtransEntry> {
    entries.iter().copied().filter(|e| e.is_comparison()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn small_kb() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for q in ["Temperature", "Distance", "Density", "Volume"] {
            kb.add_quantity_type(q);
        }
        for f in ["FN_Temperature", "FN_Gradable_proximity", "FN_Misc"] {
            kb.add_frame_type(f, None);
        }
        kb.add_lexical_entry(LexicalEntry::new("cooler", Pos::Adjective, "cool", Degree::Comparative))
            .unwrap();
        kb.add_lexical_entry(LexicalEntry::new("cool", Pos::Adjective, "cool", Degree::Positive))
            .unwrap();
        kb.add_semtrans(SemtransEntry::comparison(
            "cooler",
            Pos::Adjective,
            "FN_Temperature",
            "Temperature",
            Relation::LessThan,
        ))
        .unwrap();
        kb.add_value_mapping(QualValue::high("Density"), "Density").unwrap();
        kb.add_value_mapping(QualValue::high("Volume"), "Volume").unwrap();
        kb
    }

    #[test]
    fn lookup_word_finds_comparative_and_base_forms() {
        let kb = small_kb();
        let cooler = kb.lookup_word("cooler", Pos::Adjective).unwrap();
        assert_eq!(cooler.root, "cool");
        assert_eq!(cooler.degree, Degree::Comparative);
        let cool = kb.lookup_word("cool", Pos::Adjective).unwrap();
        assert_eq!(cool.root, "cool");
        assert_eq!(cool.degree, Degree::Positive);
        assert!(kb.lookup_word("zxqv", Pos::Noun).is_none());
    }

    #[test]
    fn graded_forms_need_a_root() {
        let mut kb = KnowledgeBase::new();
        let bad = LexicalEntry::new("worse", Pos::Adjective, "worse", Degree::Comparative);
        assert!(matches!(kb.add_lexical_entry(bad.clone()), Err(KbError::InvalidEntry(_))));
        let ok = LexicalEntry { self_root: true, ..bad };
        kb.add_lexical_entry(ok).unwrap();
        let dup = LexicalEntry::new("worse", Pos::Adjective, "bad", Degree::Comparative);
        assert!(matches!(kb.add_lexical_entry(dup), Err(KbError::DuplicateLexeme(..))));
    }

    #[test]
    fn semtrans_for_seeded_and_missing_words() {
        let kb = small_kb();
        let hits = kb.semtrans_for("cooler", Pos::Adjective);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].frame_type, "FN_Temperature");
        assert_eq!(hits[0].quantity_type.as_deref(), Some("Temperature"));
        assert_eq!(hits[0].relation, Relation::LessThan);
        assert!(kb.semtrans_for("denser", Pos::Adjective).is_empty());
    }

    #[test]
    fn add_then_read_back() {
        let mut kb = small_kb();
        kb.auto_register = true;
        let e = SemtransEntry::comparison("stronger", Pos::Adjective, "FN_Level_of_force_exertion", "Strength", Relation::GreaterThan);
        assert_eq!(kb.add_semtrans(e.clone()).unwrap(), AddOutcome::Added);
        assert_eq!(kb.semtrans_for("stronger", Pos::Adjective), vec![&e]);
        assert!(kb.has_quantity_type("Strength"));
    }

    #[test]
    fn add_semtrans_is_idempotent_and_checks_identifiers() {
        let mut kb = small_kb();
        let closer = SemtransEntry::comparison(
            "closer",
            Pos::Adjective,
            "FN_Gradable_proximity",
            "Distance",
            Relation::LessThan,
        );
        assert_eq!(kb.add_semtrans(closer.clone()).unwrap(), AddOutcome::Added);
        let snapshot = kb.clone();
        assert_eq!(kb.add_semtrans(closer).unwrap(), AddOutcome::Duplicate);
        assert_eq!(kb, snapshot);
        assert_eq!(kb.semtrans().len(), snapshot.semtrans().len());

        let unknown = SemtransEntry::comparison("odd", Pos::Adjective, "FN_Nope", "Distance", Relation::LessThan);
        assert!(matches!(
            kb.add_semtrans(unknown),
            Err(KbError::UnresolvedIdentifier { kind: "frame type", .. })
        ));
        assert_eq!(kb, snapshot);
    }

    #[test]
    fn comparison_without_quantity_is_invalid() {
        let mut kb = small_kb();
        let mut e = SemtransEntry::comparison("cooler", Pos::Adjective, "FN_Temperature", "Temperature", Relation::GreaterThan);
        e.quantity_type = None;
        assert!(matches!(kb.add_semtrans(e), Err(KbError::InvalidEntry(_))));
    }

    #[test]
    fn filter_comparison_cases() {
        let cooler = SemtransEntry::comparison("cooler", Pos::Adjective, "FN_Temperature", "Temperature", Relation::LessThan);
        let mut cool = cooler.clone();
        cool.word = "cool".into();
        cool.relation = Relation::None;
        assert_eq!(filter_comparison(&[&cooler, &cool]), vec![&cooler]);
        assert!(filter_comparison(&[]).is_empty());
        assert!(filter_comparison(&[&cool]).is_empty());
    }

    #[test]
    fn value_map_resolution() {
        let kb = small_kb();
        assert_eq!(kb.quantity_type_of_value(&QualValue::high("Density")), Some("Density"));
        assert_eq!(kb.quantity_type_of_value(&QualValue::high("Volume")), Some("Volume"));
        assert_eq!(kb.quantity_type_of_value(&QualValue::low("Density")), None);
    }

    #[test]
    fn without_expansions_drops_minted_entries() {
        let mut kb = small_kb();
        let mut e = SemtransEntry::comparison("colder", Pos::Adjective, "FN_Temperature", "Temperature", Relation::LessThan);
        e.provenance = Provenance::Expanded { fact_id: "f1".into(), step: 0 };
        kb.add_semtrans(e.clone()).unwrap();
        let base = kb.without_expansions();
        assert!(base.semtrans_for("colder", Pos::Adjective).is_empty());
        assert_eq!(kb.semtrans_delta(&base), vec![e.clone()]);
        // re-adding after the snapshot works
        let mut base = base;
        assert_eq!(base.add_semtrans(e).unwrap(), AddOutcome::Added);
    }

    fn arb_relation() -> impl Strategy<Value = Relation> {
        prop_oneof![Just(Relation::LessThan), Just(Relation::GreaterThan), Just(Relation::None)]
    }

    proptest! {
        #[test]
        fn add_twice_equals_add_once(word in "[a-z]{1,8}", rel in arb_relation(), frame_idx in 0usize..3, q_idx in 0usize..4) {
            let frames = ["FN_Temperature", "FN_Gradable_proximity", "FN_Misc"];
            let qtypes = ["Temperature", "Distance", "Density", "Volume"];
            let entry = SemtransEntry::comparison(&word, Pos::Adjective, frames[frame_idx], qtypes[q_idx], rel);
            let mut once = small_kb();
            once.add_semtrans(entry.clone()).unwrap();
            let mut twice = once.clone();
            twice.add_semtrans(entry).unwrap();
            prop_assert_eq!(once.semtrans(), twice.semtrans());
        }

        #[test]
        fn filter_is_subset_of_comparisons(rels in prop::collection::vec(arb_relation(), 0..8)) {
            let entries: Vec<SemtransEntry> = rels.iter().enumerate().map(|(i, r)| {
                let mut e = SemtransEntry::comparison(&format!("w{i}"), Pos::Adjective, "FN_Misc", "Density", Relation::LessThan);
                e.relation = *r;
                e
            }).collect();
            let refs: Vec<&SemtransEntry> = entries.iter().collect();
            let kept = filter_comparison(&refs);
            prop_assert!(kept.iter().all(|e| e.relation != Relation::None));
            prop_assert!(kept.iter().all(|e| refs.contains(e)));
            prop_assert_eq!(kept.len(), rels.iter().filter(|r| **r != Relation::None).count());
        }
    }
}
