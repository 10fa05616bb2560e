//! LLM informant roles behind one interface.
//!
//! [`Oracle`] wraps any [`Informant`] and turns raw text into typed answers,
//! issuing one stricter retry when the reply does not fit the role's output
//! grammar.

mod http;
mod mock;
mod transcript;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::frames::Sign;
use crate::kb::KnowledgeBase;
use crate::parser::is_comparative_sentence;

pub use http::HttpInformant;
pub use mock::{MockInformant, MockRule};
pub use transcript::{CachingInformant, TranscriptRecord, TranscriptStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Rephrase,
    Relevance,
    Antonym,
    Sign,
    Extract,
}

impl Role {
    pub const ALL: [Role; 5] = [
        Role::Rephrase,
        Role::Relevance,
        Role::Antonym,
        Role::Sign,
        Role::Extract,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Rephrase => "rephrase",
            Role::Relevance => "relevance",
            Role::Antonym => "antonym",
            Role::Sign => "sign",
            Role::Extract => "extract",
        }
    }

    fn template(self) -> &'static str {
        match self {
            Role::Rephrase => include_str!("../../prompts/rephrase.txt"),
            Role::Relevance => include_str!("../../prompts/relevance.txt"),
            Role::Antonym => include_str!("../../prompts/antonym.txt"),
            Role::Sign => include_str!("../../prompts/sign.txt"),
            Role::Extract => include_str!("../../prompts/extract.txt"),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown oracle role `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
    #[error("no recorded {role} reply for key {key}")]
    ReplayMiss { role: Role, key: String },
    #[error("request key collision on {0}")]
    KeyCollision(String),
    #[error("sign undetermined for {comparative} / {qtype}")]
    SignUndetermined { qtype: String, comparative: String },
    #[error("{path}: {message}")]
    Store { path: String, message: String },
}

/// A role plus its payload fields. Field order never matters: the payload is
/// a sorted map and the key hashes its canonical JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRequest {
    pub role: Role,
    pub payload: BTreeMap<String, String>,
}

impl OracleRequest {
    pub fn new(role: Role, fields: &[(&str, &str)]) -> Self {
        Self {
            role,
            payload: fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    pub fn canonical_payload(&self) -> String {
        serde_json::to_string(&self.payload).expect("string map serializes")
    }

    pub fn key(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.role.as_str().as_bytes());
        h.update([0u8]);
        h.update(self.canonical_payload().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn is_strict(&self) -> bool {
        self.payload.contains_key("strict")
    }

    /// The same request with the stricter instruction flag set.
    pub fn strict(&self) -> Self {
        let mut r = self.clone();
        r.payload.insert("strict".into(), "1".into());
        r
    }

    /// Prompt text for live models.
    pub fn prompt(&self) -> String {
        let mut text = self.role.template().to_string();
        for (k, v) in &self.payload {
            text = text.replace(&format!("{{{k}}}"), v);
        }
        if self.is_strict() {
            text = format!("{}{}", include_str!("../../prompts/strict.txt"), text);
        }
        text
    }
}

/// Anything that can answer an oracle request with raw text.
pub trait Informant: Send + Sync {
    fn respond(&self, request: &OracleRequest) -> Result<String, OracleError>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub calls: BTreeMap<Role, usize>,
    pub retries: usize,
    pub non_conforming: usize,
}

impl OracleStats {
    pub fn total(&self) -> usize {
        self.calls.values().sum()
    }
}

#[derive(Default)]
struct State {
    stats: OracleStats,
    seen: HashMap<String, String>,
    diagnostics: Vec<String>,
}

/// Typed front end over an informant.
pub struct Oracle {
    informant: Arc<dyn Informant>,
    state: Mutex<State>,
}

/// Lines of a rephrase reply, with list markers removed.
fn reply_lines(raw: &str) -> Vec<String> {
    raw.lines()
        .map(|l| {
            let l = l.trim();
            let l = l.trim_start_matches(['-', '*', '•']).trim_start();
            let digits = l.chars().take_while(char::is_ascii_digit).count();
            let l = if digits > 0 && l[digits..].starts_with(['.', ')']) {
                l[digits + 1..].trim_start()
            } else {
                l
            };
            l.to_string()
        })
        .filter(|l| !l.is_empty())
        .collect()
}

fn parse_yes_no(raw: &str) -> Option<bool> {
    let t = raw.trim().trim_end_matches('.').to_lowercase();
    match t.as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

fn parse_sign(raw: &str) -> Option<Sign> {
    match raw.trim().trim_end_matches('.') {
        "+" => Some(Sign::Plus),
        "-" | "\u{2212}" => Some(Sign::Minus),
        _ => None,
    }
}

fn parse_words(raw: &str) -> Option<Vec<String>> {
    let t = raw.trim().trim_end_matches('.');
    if t.is_empty() || t.eq_ignore_ascii_case("none") {
        return Some(Vec::new());
    }
    let mut out: Vec<String> = Vec::new();
    for w in t.split([',', '\n']) {
        let w = w.trim().to_lowercase();
        if w.is_empty() {
            continue;
        }
        if !w.chars().all(|c| c.is_alphabetic() || c == '-') {
            return None;
        }
        if !out.contains(&w) {
            out.push(w);
        }
    }
    Some(out)
}

impl Oracle {
    pub fn new(informant: Arc<dyn Informant>) -> Self {
        Self {
            informant,
            state: Mutex::new(State::default()),
        }
    }

    pub fn stats(&self) -> OracleStats {
        self.state.lock().unwrap().stats.clone()
    }

    pub fn diagnostics(&self) -> Vec<String> {
        self.state.lock().unwrap().diagnostics.clone()
    }

    fn note(&self, msg: String) {
        log::debug!("{msg}");
        self.state.lock().unwrap().diagnostics.push(msg);
    }

    /// Sends one request, guarding key uniqueness.
    pub fn ask(&self, request: &OracleRequest) -> Result<String, OracleError> {
        let key = request.key();
        let canonical = format!("{}\u{0}{}", request.role, request.canonical_payload());
        {
            let mut st = self.state.lock().unwrap();
            if let Some(prev) = st.seen.get(&key) {
                if *prev != canonical {
                    return Err(OracleError::KeyCollision(key));
                }
            }
            st.seen.insert(key, canonical);
            *st.stats.calls.entry(request.role).or_default() += 1;
            if request.is_strict() {
                st.stats.retries += 1;
            }
        }
        self.informant.respond(request)
    }

    /// Asks, and on a non-conforming reply asks once more in strict mode.
    fn ask_conforming<T>(
        &self,
        request: &OracleRequest,
        read: impl Fn(&str) -> Option<T>,
    ) -> Result<Option<T>, OracleError> {
        for req in [request.clone(), request.strict()] {
            let raw = self.ask(&req)?;
            if let Some(v) = read(&raw) {
                return Ok(Some(v));
            }
            self.state.lock().unwrap().stats.non_conforming += 1;
            self.note(format!("non-conforming {} reply: {:?}", req.role, raw.trim()));
        }
        Ok(None)
    }

    /// Template-conforming rephrasings of `fact`. Empty when the fact already
    /// fits the template (it is used as is) or nothing usable came back.
    pub fn rephrase(&self, fact: &str, kb: &KnowledgeBase) -> Result<Vec<String>, OracleError> {
        if is_comparative_sentence(fact, kb) {
            self.note(format!("pass-through: {fact:?}"));
            return Ok(Vec::new());
        }
        let request = OracleRequest::new(Role::Rephrase, &[("fact", fact)]);
        for req in [request.clone(), request.strict()] {
            let candidates = reply_lines(&self.ask(&req)?);
            if candidates.is_empty() {
                return Ok(Vec::new());
            }
            let mut kept: Vec<String> = Vec::new();
            for c in candidates {
                if !is_comparative_sentence(&c, kb) {
                    self.note(format!("dropped off-template rephrasing: {c:?}"));
                } else if !kept.contains(&c) {
                    kept.push(c);
                }
            }
            if !kept.is_empty() {
                return Ok(kept);
            }
            self.state.lock().unwrap().stats.non_conforming += 1;
        }
        Ok(Vec::new())
    }

    /// Strict yes/no. A reply that never conforms counts as irrelevant.
    pub fn judge_relevance(
        &self,
        frame: &str,
        qtype: &str,
        comparative: &str,
        fact: &str,
    ) -> Result<bool, OracleError> {
        let req = OracleRequest::new(
            Role::Relevance,
            &[
                ("frame", frame),
                ("qtype", qtype),
                ("comparative", comparative),
                ("fact", fact),
            ],
        );
        Ok(self.ask_conforming(&req, parse_yes_no)?.unwrap_or(false))
    }

    pub fn antonyms(&self, word: &str) -> Result<Vec<String>, OracleError> {
        let req = OracleRequest::new(Role::Antonym, &[("word", word)]);
        Ok(self.ask_conforming(&req, parse_words)?.unwrap_or_default())
    }

    pub fn influence_sign(
        &self,
        qtype: &str,
        comparative: &str,
        fact: &str,
    ) -> Result<Sign, OracleError> {
        let req = OracleRequest::new(
            Role::Sign,
            &[("qtype", qtype), ("comparative", comparative), ("fact", fact)],
        );
        self.ask_conforming(&req, parse_sign)?
            .ok_or_else(|| OracleError::SignUndetermined {
                qtype: qtype.to_string(),
                comparative: comparative.to_string(),
            })
    }

    /// Raw logical-form text; the pipeline's reader checks its shape.
    pub fn extract_logical_form(&self, fact: &str) -> Result<String, OracleError> {
        self.ask(&OracleRequest::new(Role::Extract, &[("fact", fact)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    fn oracle(rules: &str) -> Oracle {
        Oracle::new(Arc::new(MockInformant::from_jsonl(rules).unwrap()))
    }

    fn kb() -> KnowledgeBase {
        parse_kb(
            r#"
(lex particles noun :root particle :degree positive)
(lex gas noun :root gas :degree positive)
(lex energy noun :root energy :degree positive)
(lex people noun :root person :degree positive)
(lex resources noun :root resource :degree positive)
(lex that pronoun :root that :degree positive)
(lex are copula :root be :degree positive)
(lex in preposition :root in :degree positive)
(lex than preposition :root than :degree positive)
(lex cooler adjective :root cool :degree comparative)
(lex have verb :root have :degree positive)
(lex need verb :root need :degree positive)
(lex move verb :root move :degree positive)
(lex slowly adverb :root slowly :degree positive)
(lex more determiner :root much :degree comparative)
(lex less determiner :root little :degree comparative)
"#,
        )
        .unwrap()
    }

    #[test]
    fn keys_ignore_field_order_and_separate_roles() {
        let a = OracleRequest::new(Role::Sign, &[("qtype", "t"), ("fact", "f")]);
        let b = OracleRequest::new(Role::Sign, &[("fact", "f"), ("qtype", "t")]);
        assert_eq!(a.key(), b.key());
        let c = OracleRequest::new(Role::Relevance, &[("qtype", "t"), ("fact", "f")]);
        assert_ne!(a.key(), c.key());
        assert_ne!(a.key(), a.strict().key());
        assert_eq!(a.key().len(), 64);
    }

    #[test]
    fn rephrase_keeps_template_sentences() {
        let fact = "If the gas is cooled, the particles will move more slowly, because they will have less energy.";
        let o = oracle(
            r#"{"role":"rephrase","match":{"fact":"If the gas*"},"reply":"1. Particles that are in cooler gas move more slowly than particles.\n2. Particles that are in cooler gas have less energy than particles.\nThis is a note."}"#,
        );
        let out = o.rephrase(fact, &kb()).unwrap();
        assert_eq!(
            out,
            vec![
                "Particles that are in cooler gas move more slowly than particles.",
                "Particles that are in cooler gas have less energy than particles."
            ]
        );
        assert_eq!(o.diagnostics().len(), 1);
    }

    #[test]
    fn rephrase_passes_canonical_input_through() {
        let o = oracle("");
        assert!(o.rephrase("More people need more resources", &kb()).unwrap().is_empty());
        assert!(o.stats().calls.is_empty());
        // no table entry: empty reply, empty result
        assert!(o.rephrase("The wind blew.", &kb()).unwrap().is_empty());
    }

    #[test]
    fn rephrase_retries_once_when_everything_is_off_template() {
        let o = oracle(
            r#"{"role":"rephrase","match":{"strict":"1"},"reply":"Particles that are in cooler gas have less energy than particles."}
{"role":"rephrase","match":{},"reply":"Sure! Here is a rephrasing."}"#,
        );
        let out = o.rephrase("Cool gas has slow particles.", &kb()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(o.stats().retries, 1);
    }

    #[test]
    fn relevance_is_conservative() {
        let o = oracle(
            r#"{"role":"relevance","match":{"frame":"level of force exertion","comparative":"stronger"},"reply":"Yes"}
{"role":"relevance","match":{"frame":"usefulness"},"reply":"no"}
{"role":"relevance","match":{},"reply":"It depends on context."}"#,
        );
        let fact = "A circuit breaker uses stronger electromagnets.";
        assert!(o.judge_relevance("level of force exertion", "strength", "stronger", fact).unwrap());
        assert!(!o.judge_relevance("usefulness", "effectiveness", "stronger", fact).unwrap());
        assert!(!o.judge_relevance("x", "y", "stronger", fact).unwrap());
        assert_eq!(o.stats().non_conforming, 2);
    }

    #[test]
    fn antonyms_are_lowercase_and_deduplicated() {
        let o = oracle(
            r#"{"role":"antonym","match":{"word":"closer"},"reply":"Farther, further, farther"}
{"role":"antonym","match":{"word":"stronger"},"reply":"weaker"}"#,
        );
        assert_eq!(o.antonyms("closer").unwrap(), vec!["farther", "further"]);
        assert_eq!(o.antonyms("stronger").unwrap(), vec!["weaker"]);
        assert!(o.antonyms("glorpier").unwrap().is_empty());
    }

    #[test]
    fn sign_is_never_fabricated() {
        let o = oracle(
            r#"{"role":"sign","match":{"comparative":"cooler"},"reply":"-"}
{"role":"sign","match":{},"reply":"probably up?"}"#,
        );
        assert_eq!(o.influence_sign("temperature", "cooler", "any").unwrap(), Sign::Minus);
        assert!(matches!(
            o.influence_sign("speed", "zippier", "any"),
            Err(OracleError::SignUndetermined { .. })
        ));
    }

    #[test]
    fn prompts_fill_placeholders() {
        let r = OracleRequest::new(Role::Antonym, &[("word", "closer")]);
        assert!(r.prompt().contains("\"closer\""));
        assert!(r.strict().prompt().starts_with("Your previous answer"));
    }
}
