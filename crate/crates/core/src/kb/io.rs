//! Line-oriented KB file format.
//!
//! One parenthesized record per line, `;;` comments. Record kinds:
//!
//! ```text
//! (frame-type FN_Temperature)                 ; optional "display name" string
//! (qtype Temperature)
//! (qtype-equiv Heat Temperature)
//! (qtype-partial Size SpatialQuantity)
//! (value-map (high-amount-of Density) Density)
//! (lex cooler adjective :root cool :degree comparative)   ; optional :self-root
//! (semtrans cooler adjective :frame FN_Temperature :qtype Temperature :reln lessThan
//!           :roles (...) :value (...) :binding (...) :provenance (expanded f0001 3))
//! ```
//!
//! `save_kb` writes records sorted by kind, then by key.

use std::fmt::Write as _;
use std::path::Path;

use super::{
    Degree, KbError, KnowledgeBase, LexicalEntry, Pos, Provenance, QualValue, Relation,
    SemtransEntry,
};
use crate::sexpr::{self, quote, Sexpr};
use crate::util::write_atomic;

enum Record {
    FrameType(String, Option<String>),
    QType(String),
    Equiv(String, String),
    Partial(String, String),
    ValueMap(QualValue, String),
    Lex(LexicalEntry),
    Semtrans(SemtransEntry),
}

fn atom<'a>(items: &'a [Sexpr], i: usize, what: &str) -> Result<&'a str, String> {
    items
        .get(i)
        .and_then(Sexpr::as_atom)
        .ok_or_else(|| format!("expected {what} at position {i}"))
}

/// Splits `:key value` pairs following the positional prefix.
fn keywords(items: &[Sexpr]) -> Result<Vec<(&str, Option<&Sexpr>)>, String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let key = items[i]
            .as_atom()
            .filter(|a| a.starts_with(':'))
            .ok_or_else(|| format!("expected keyword, found `{}`", items[i]))?;
        // flag keywords have no value
        if key == ":self-root" {
            out.push((key, None));
            i += 1;
            continue;
        }
        let value = items
            .get(i + 1)
            .ok_or_else(|| format!("keyword {key} lacks a value"))?;
        out.push((key, Some(value)));
        i += 2;
    }
    Ok(out)
}

fn parse_provenance(e: &Sexpr) -> Result<Provenance, String> {
    if e.as_atom() == Some("builtin") {
        return Ok(Provenance::Builtin);
    }
    match e.as_list() {
        Some([Sexpr::Atom(h), Sexpr::Atom(id), Sexpr::Atom(step)]) if h == "expanded" => {
            Ok(Provenance::Expanded {
                fact_id: id.clone(),
                step: step
                    .parse()
                    .map_err(|_| format!("bad provenance step `{step}`"))?,
            })
        }
        _ => Err(format!("malformed provenance `{e}`")),
    }
}

fn parse_record(e: &Sexpr) -> Result<Record, String> {
    let items = e.as_list().ok_or("record must be a list")?;
    let kind = atom(items, 0, "record kind")?;
    match kind {
        "frame-type" => {
            let id = atom(items, 1, "frame type")?.to_string();
            let name = match items.get(2) {
                None => None,
                Some(Sexpr::Str(s)) => Some(s.clone()),
                Some(other) => return Err(format!("frame-type name must be a string, got `{other}`")),
            };
            if items.len() > 3 {
                return Err("too many fields in frame-type".into());
            }
            Ok(Record::FrameType(id, name))
        }
        "qtype" => {
            if items.len() != 2 {
                return Err("qtype takes exactly one identifier".into());
            }
            Ok(Record::QType(atom(items, 1, "quantity type")?.to_string()))
        }
        "qtype-equiv" | "qtype-partial" => {
            if items.len() != 3 {
                return Err(format!("{kind} takes exactly two identifiers"));
            }
            let a = atom(items, 1, "quantity type")?.to_string();
            let b = atom(items, 2, "quantity type")?.to_string();
            Ok(if kind == "qtype-equiv" {
                Record::Equiv(a, b)
            } else {
                Record::Partial(a, b)
            })
        }
        "value-map" => {
            if items.len() != 3 {
                return Err("value-map takes a value and a quantity type".into());
            }
            let v = QualValue::from_sexpr(&items[1])?;
            Ok(Record::ValueMap(v, atom(items, 2, "quantity type")?.to_string()))
        }
        "lex" => {
            let surface = atom(items, 1, "surface")?.to_string();
            let pos: Pos = atom(items, 2, "part of speech")?.parse()?;
            let mut root = None;
            let mut degree = Degree::Positive;
            let mut self_root = false;
            for (k, v) in keywords(&items[3..])? {
                match (k, v) {
                    (":root", Some(v)) => {
                        root = Some(v.as_atom().ok_or(":root must be an atom")?.to_string())
                    }
                    (":degree", Some(v)) => {
                        degree = v.as_atom().ok_or(":degree must be an atom")?.parse()?
                    }
                    (":self-root", None) => self_root = true,
                    (k, _) => return Err(format!("unknown lex keyword {k}")),
                }
            }
            let root = root.unwrap_or_else(|| surface.clone());
            Ok(Record::Lex(LexicalEntry {
                surface,
                pos,
                root,
                degree,
                self_root,
            }))
        }
        "semtrans" => {
            let word = atom(items, 1, "word")?.to_string();
            let pos: Pos = atom(items, 2, "part of speech")?.parse()?;
            let mut entry = SemtransEntry {
                word,
                pos,
                frame_type: String::new(),
                quantity_type: None,
                relation: Relation::None,
                roles: Vec::new(),
                value: None,
                binding: None,
                provenance: Provenance::Builtin,
            };
            for (k, v) in keywords(&items[3..])? {
                let v = v.ok_or_else(|| format!("keyword {k} lacks a value"))?;
                match k {
                    ":frame" => entry.frame_type = v.as_atom().ok_or(":frame must be an atom")?.to_string(),
                    ":qtype" => entry.quantity_type = Some(v.as_atom().ok_or(":qtype must be an atom")?.to_string()),
                    ":reln" => entry.relation = v.as_atom().ok_or(":reln must be an atom")?.parse()?,
                    ":roles" => entry.roles = v.as_list().ok_or(":roles must be a list")?.to_vec(),
                    ":value" => entry.value = Some(QualValue::from_sexpr(v)?),
                    ":binding" => entry.binding = Some(v.clone()),
                    ":provenance" => entry.provenance = parse_provenance(v)?,
                    k => return Err(format!("unknown semtrans keyword {k}")),
                }
            }
            if entry.frame_type.is_empty() {
                return Err("semtrans lacks :frame".into());
            }
            Ok(Record::Semtrans(entry))
        }
        other => Err(format!("unknown record kind `{other}`")),
    }
}

/// Parses KB text. Identifier declarations are applied before references,
/// so record order within the file does not matter.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let err = |message: String| KbError::Parse {
            line: lineno,
            message,
        };
        let exprs = sexpr::parse_all(line).map_err(|e| err(e.to_string()))?;
        match exprs.as_slice() {
            [] => continue,
            [e] => records.push((lineno, parse_record(e).map_err(err)?)),
            _ => return Err(err("more than one record on a line".into())),
        }
    }

    let mut kb = KnowledgeBase::new();
    let at = |line: usize| move |e: KbError| match e {
        KbError::Parse { .. } => e,
        other => KbError::Parse {
            line,
            message: other.to_string(),
        },
    };
    for (_, r) in &records {
        match r {
            Record::FrameType(id, name) => kb.add_frame_type(id, name.as_deref()),
            Record::QType(id) => kb.add_quantity_type(id),
            _ => {}
        }
    }
    for (line, r) in records {
        match r {
            Record::FrameType(..) | Record::QType(_) => {}
            Record::Equiv(a, b) => kb.taxonomy_mut().add_equivalence(&a, &b).map_err(at(line))?,
            Record::Partial(a, b) => kb.taxonomy_mut().add_partial(&a, &b).map_err(at(line))?,
            Record::ValueMap(v, q) => kb.add_value_mapping(v, &q).map_err(at(line))?,
            Record::Lex(e) => kb.add_lexical_entry(e).map_err(at(line))?,
            Record::Semtrans(e) => {
                if let Some(v) = &e.value {
                    if !kb.has_quantity_type(&v.qtype) {
                        return Err(at(line)(KbError::UnresolvedIdentifier {
                            kind: "quantity type",
                            id: v.qtype.clone(),
                        }));
                    }
                }
                kb.add_semtrans(e).map_err(at(line))?;
            }
        }
    }
    Ok(kb)
}

pub fn load_kb(path: impl AsRef<Path>) -> Result<KnowledgeBase, KbError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| KbError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_kb(&text)
}

fn semtrans_record(e: &SemtransEntry) -> String {
    let mut s = format!("(semtrans {} {} :frame {}", e.word, e.pos, e.frame_type);
    if let Some(q) = &e.quantity_type {
        let _ = write!(s, " :qtype {q}");
    }
    let _ = write!(s, " :reln {}", e.relation.as_str());
    if !e.roles.is_empty() {
        let _ = write!(s, " :roles {}", Sexpr::List(e.roles.clone()));
    }
    if let Some(v) = &e.value {
        let _ = write!(s, " :value {v}");
    }
    if let Some(b) = &e.binding {
        let _ = write!(s, " :binding {b}");
    }
    if let Provenance::Expanded { fact_id, step } = &e.provenance {
        let _ = write!(s, " :provenance (expanded {fact_id} {step})");
    }
    s.push(')');
    s
}

impl std::fmt::Display for SemtransEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&semtrans_record(self))
    }
}

/// Serializes semtrans entries one per line, in the given order.
pub fn semtrans_lines(entries: &[SemtransEntry]) -> String {
    entries.iter().map(|e| semtrans_record(e) + "\n").collect()
}

impl KnowledgeBase {
    /// Canonical text: records sorted by kind, then key.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::from(";; quantsem knowledge base\n");
        for (id, name) in self.frame_types() {
            match name {
                Some(n) => {
                    let _ = writeln!(out, "(frame-type {id} {})", quote(n));
                }
                None => {
                    let _ = writeln!(out, "(frame-type {id})");
                }
            }
        }
        for q in self.taxonomy().nodes() {
            let _ = writeln!(out, "(qtype {q})");
        }
        for (a, b) in self.taxonomy().equivalences() {
            let _ = writeln!(out, "(qtype-equiv {a} {b})");
        }
        for (a, b) in self.taxonomy().partial_edges() {
            let _ = writeln!(out, "(qtype-partial {a} {b})");
        }
        for (v, q) in self.value_map() {
            let _ = writeln!(out, "(value-map {v} {q})");
        }
        for e in self.lexicon() {
            let _ = write!(
                out,
                "(lex {} {} :root {} :degree {}",
                e.surface,
                e.pos,
                e.root,
                e.degree.as_str()
            );
            if e.self_root {
                out.push_str(" :self-root");
            }
            out.push_str(")\n");
        }
        let mut st: Vec<&SemtransEntry> = self.semtrans().iter().collect();
        st.sort_by_key(|e| e.key());
        for e in st {
            out.push_str(&semtrans_record(e));
            out.push('\n');
        }
        out
    }
}

pub fn save_kb(kb: &KnowledgeBase, path: impl AsRef<Path>) -> Result<(), KbError> {
    let path = path.as_ref();
    write_atomic(path, kb.to_canonical_string().as_bytes()).map_err(|source| KbError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#";; sample
(semtrans cooler adjective :frame FN_Temperature :qtype Temperature :reln lessThan :roles ((comparer :EVENT :SUBJECT) (comparee :EVENT :NOUN)) :binding (TheList))
(frame-type FN_Temperature "temperature")
(frame-type FN_Misc)
(qtype Temperature)
(qtype Density)
(qtype Size)
(qtype SpatialQuantity)
(qtype-partial Size SpatialQuantity)
(value-map (high-amount-of Density) Density)
(lex cooler adjective :root cool :degree comparative)
(lex more determiner :root much :degree comparative)
(semtrans dense adjective :frame FN_Misc :reln none :value (high-amount-of Density))
(semtrans denser adjective :frame FN_Misc :qtype Density :reln greaterThan :provenance (expanded f0005 0))
"#;

    #[test]
    fn parses_sample_and_round_trips() {
        let kb = parse_kb(SAMPLE).unwrap();
        assert_eq!(kb.semtrans().len(), 3);
        assert_eq!(kb.frame_type_name("FN_Temperature"), Some("temperature"));
        assert!(kb.taxonomy().partial("SpatialQuantity", "Size"));
        let text = kb.to_canonical_string();
        let again = parse_kb(&text).unwrap();
        assert_eq!(again, kb);
        assert_eq!(again.to_canonical_string(), text);
    }

    #[test]
    fn malformed_record_names_its_line() {
        let text = "(qtype Temperature)\n\n(lex cooler adjective :root)\n";
        match parse_kb(text) {
            Err(KbError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_kb("(qtype A)\n(semtrans x adjective :frame FN_X :qtype A :reln lessThan)\n") {
            Err(KbError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("FN_X"), "{message}");
            }
            other => panic!("expected unresolved identifier, got {other:?}"),
        }
        assert!(matches!(parse_kb("(qtype A"), Err(KbError::Parse { line: 1, .. })));
    }

    #[test]
    fn save_and_load_through_the_filesystem() {
        let kb = parse_kb(SAMPLE).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.sx");
        save_kb(&kb, &path).unwrap();
        assert_eq!(load_kb(&path).unwrap(), kb);
        assert!(matches!(load_kb(dir.path().join("missing.sx")), Err(KbError::Io { .. })));
    }
}
