//! Logical forms: quantity/sign pairs from the symbolic side, cause/effect
//! forms from the LLM, and the label table that maps LLM labels onto
//! quantity types for scoring.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::frames::{QuantitySign, Sign};
use crate::sexpr::{self, quote, Sexpr};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CauseEffect {
    pub causes: Vec<String>,
    pub effects: Vec<String>,
    pub cause_signs: Vec<String>,
    pub effect_signs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "reason", rename_all = "lowercase")]
pub enum Validity {
    Valid,
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormVariant {
    Pairs { pairs: Vec<QuantitySign> },
    CauseEffect { form: Option<CauseEffect> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogicalForm {
    pub fact: String,
    pub variant: FormVariant,
    pub validity: Validity,
}

impl LogicalForm {
    pub fn pairs(fact: &str, pairs: Vec<QuantitySign>) -> Self {
        Self {
            fact: fact.to_string(),
            variant: FormVariant::Pairs { pairs },
            validity: Validity::Valid,
        }
    }

    /// One-line parenthesized rendering.
    pub fn render(&self) -> String {
        let mut parts = vec![quote(&self.fact)];
        match &self.variant {
            FormVariant::Pairs { pairs } => parts.extend(pairs.iter().map(ToString::to_string)),
            FormVariant::CauseEffect { form: Some(ce) } => {
                let clause = |head: &str, items: &[String]| {
                    let mut s = format!("({head}");
                    for i in items {
                        s.push(' ');
                        s.push_str(i);
                    }
                    s.push(')');
                    s
                };
                parts.push(clause("cause", &ce.causes));
                parts.push(clause("effect", &ce.effects));
                parts.push(clause("cause-sign", &ce.cause_signs));
                parts.push(clause("effect-sign", &ce.effect_signs));
            }
            FormVariant::CauseEffect { form: None } => {}
        }
        if let Validity::Invalid(reason) = &self.validity {
            parts.push(format!("(invalid {})", quote(reason)));
        }
        format!("({})", parts.join(" "))
    }
}

fn atoms(items: &[Sexpr]) -> Option<Vec<String>> {
    items.iter().map(|e| e.as_atom().map(str::to_string)).collect()
}

/// Finds the clause lists in an LLM reply: either a single list of clauses
/// or clauses at the top level, optionally after a quoted fact.
fn clauses(exprs: &[Sexpr]) -> Vec<&Sexpr> {
    let is_clause = |e: &Sexpr| {
        matches!(
            e.head(),
            Some("cause" | "effect" | "cause-sign" | "effect-sign")
        )
    };
    let mut out: Vec<&Sexpr> = Vec::new();
    for e in exprs {
        if is_clause(e) {
            out.push(e);
        } else if let Some(items) = e.as_list() {
            let nested = clauses(items);
            if !nested.is_empty() {
                return nested;
            }
        }
    }
    out
}

/// Strict reader for cause/effect replies. The form is kept as written; an
/// arity mismatch or a missing clause marks it invalid and nothing is
/// repaired.
pub fn read_cause_effect(raw: &str) -> (Option<CauseEffect>, Validity) {
    let Ok(exprs) = sexpr::parse_all(raw.trim()) else {
        return (None, Validity::Invalid("unreadable reply".into()));
    };
    let found = clauses(&exprs);
    if found.is_empty() {
        return (None, Validity::Invalid("unreadable reply".into()));
    }
    let mut slots: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for c in found {
        let items = c.as_list().unwrap_or_default();
        let head = c.head().unwrap_or_default();
        let Some(vals) = atoms(&items[1..]) else {
            return (None, Validity::Invalid(format!("non-atomic {head} entry")));
        };
        if slots.insert(head, vals).is_some() {
            return (None, Validity::Invalid(format!("repeated {head}")));
        }
    }
    let take = |k: &str, slots: &BTreeMap<&str, Vec<String>>| slots.get(k).cloned();
    let ce = CauseEffect {
        causes: take("cause", &slots).unwrap_or_default(),
        effects: take("effect", &slots).unwrap_or_default(),
        cause_signs: take("cause-sign", &slots).unwrap_or_default(),
        effect_signs: take("effect-sign", &slots).unwrap_or_default(),
    };
    for k in ["cause", "effect", "cause-sign", "effect-sign"] {
        if !slots.contains_key(k) {
            return (Some(ce), Validity::Invalid(format!("missing {k}")));
        }
    }
    let bad = ce
        .cause_signs
        .iter()
        .chain(&ce.effect_signs)
        .find(|s| Sign::parse(s).is_none());
    if let Some(s) = bad {
        let msg = format!("bad sign {s}");
        return (Some(ce), Validity::Invalid(msg));
    }
    let arity = [
        ("cause", ce.causes.len(), ce.cause_signs.len()),
        ("effect", ce.effects.len(), ce.effect_signs.len()),
    ];
    for (what, nq, ns) in arity {
        if nq != ns {
            let msg = format!("{what} arity: {nq} quantities, {ns} signs");
            return (Some(ce), Validity::Invalid(msg));
        }
    }
    (Some(ce), Validity::Valid)
}

/// LLM label to quantity type. Labels not in the table never match.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelTable {
    map: BTreeMap<String, String>,
}

impl LabelTable {
    /// `<label> <QuantityType>` per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(l), Some(q), None) => {
                    map.insert(l.to_lowercase(), q.to_string());
                }
                _ => return Err(format!("line {}: expected `<label> <QuantityType>`", i + 1)),
            }
        }
        Ok(Self { map })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.map.get(&label.to_lowercase()).map(String::as_str)
    }

    /// Pairs for scoring. Labels beyond the sign list get `none`; unmapped
    /// labels are returned separately.
    pub fn flatten(&self, ce: &CauseEffect) -> (Vec<QuantitySign>, Vec<String>) {
        let mut pairs = Vec::new();
        let mut unmapped = Vec::new();
        for (qs, ss) in [(&ce.causes, &ce.cause_signs), (&ce.effects, &ce.effect_signs)] {
            for (i, label) in qs.iter().enumerate() {
                let sign = ss.get(i).and_then(|s| Sign::parse(s)).unwrap_or(Sign::None);
                match self.get(label) {
                    Some(q) => pairs.push(QuantitySign::new(q, sign)),
                    None => unmapped.push(label.clone()),
                }
            }
        }
        (pairs, unmapped)
    }
}

/// Reads one rendered form line back into its fact and scoring pairs.
/// Cause/effect lines go through `labels`; `(invalid ..)` markers are
/// ignored.
pub fn read_form_line(line: &str, labels: &LabelTable) -> Result<(String, Vec<QuantitySign>), String> {
    let e = sexpr::parse_one(line)
        .map_err(|e| e.to_string())?
        .ok_or("empty line")?;
    let items = e.as_list().ok_or("expected a list")?;
    let fact = items
        .first()
        .and_then(Sexpr::as_str)
        .ok_or("form must start with the quoted fact")?;
    let rest: Vec<&Sexpr> = items[1..].iter().filter(|i| i.head() != Some("invalid")).collect();
    let is_ce = rest
        .iter()
        .any(|i| matches!(i.head(), Some("cause" | "effect" | "cause-sign" | "effect-sign")));
    if is_ce {
        let raw: Vec<String> = rest.iter().map(|i| i.to_string()).collect();
        let (ce, _) = read_cause_effect(&format!("({})", raw.join(" ")));
        let pairs = ce.map(|ce| labels.flatten(&ce).0).unwrap_or_default();
        return Ok((fact.to_string(), pairs));
    }
    let mut pairs = Vec::new();
    for i in rest {
        match i.as_list() {
            Some([Sexpr::Atom(q), Sexpr::Atom(s)]) => {
                let sign = Sign::parse(s.as_str()).ok_or_else(|| format!("unknown sign `{s}`"))?;
                pairs.push(QuantitySign::new(q.as_str(), sign));
            }
            _ => return Err(format!("malformed pair `{i}`")),
        }
    }
    Ok((fact.to_string(), pairs))
}
