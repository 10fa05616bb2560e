//! Quantity coverage (QC), conditional sign accuracy (CSA) and overall pair
//! (OP) scores against authored gold specs.
//!
//! For gold quantities Q and a matching with weights w(q) in {1, alpha, 0}:
//!
//! ```text
//! QC  = sum w / |Q|
//! CSA = sum w*[sign right] / sum w        (undefined when sum w = 0)
//! OP  = (sum w + sum w*[sign right]) / (2 |Q|)
//! ```

use std::collections::HashMap;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::frames::{QuantitySign, Sign};
use crate::kb::QuantityTaxonomy;
use crate::normalize_text;
use crate::sexpr::{parse_all, Sexpr};

pub const DEFAULT_ALPHA: f64 = 0.5;

/// Weight sums closer than this are treated as ties.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no scored facts to aggregate")]
    EmptyInput,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("gold record {index}: {message}")]
    Gold { index: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldSpec {
    pub text: String,
    /// One sign per gold quantity type, in file order.
    pub signs: Vec<QuantitySign>,
}

impl GoldSpec {
    pub fn new(text: &str, signs: &[(&str, Sign)]) -> Self {
        Self {
            text: text.to_string(),
            signs: signs.iter().map(|(q, s)| QuantitySign::new(q, *s)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoldMatch {
    pub gold: String,
    /// Index into the prediction list.
    pub pred: Option<usize>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matching {
    pub pairs: Vec<GoldMatch>,
}

impl Matching {
    pub fn total_weight(&self) -> f64 {
        self.pairs.iter().map(|m| m.weight).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FactScores {
    pub qc: f64,
    /// `None` when nothing matched.
    pub csa: Option<f64>,
    pub op: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineScores {
    /// Means times 100.
    pub qc: f64,
    pub csa: Option<f64>,
    pub op: f64,
    pub facts: usize,
    pub csa_defined: usize,
}

pub fn match_weight(gold: &str, pred: &str, taxonomy: &QuantityTaxonomy, alpha: f64) -> f64 {
    if taxonomy.equivalent(gold, pred) {
        1.0
    } else if taxonomy.partial(gold, pred) {
        alpha
    } else {
        0.0
    }
}

struct Search<'a> {
    w: &'a [Vec<f64>],
    n_pred: usize,
    used: Vec<bool>,
    cur: Vec<Option<usize>>,
    best: Option<(f64, usize, Vec<Option<usize>>)>,
}

impl Search<'_> {
    fn better(&self, total: f64, exact: usize) -> bool {
        match &self.best {
            None => true,
            Some((bt, be, _)) => {
                if total > bt + TIE_EPS {
                    true
                } else if total < bt - TIE_EPS {
                    false
                } else if exact != *be {
                    exact > *be
                } else {
                    // earlier prediction indices first, unmatched last
                    let key = |a: &Option<usize>| a.unwrap_or(usize::MAX);
                    let cur: Vec<usize> = self.cur.iter().map(key).collect();
                    let old: Vec<usize> = self.best.as_ref().unwrap().2.iter().map(key).collect();
                    cur < old
                }
            }
        }
    }

    fn run(&mut self, g: usize, total: f64, exact: usize) {
        if g == self.w.len() {
            if self.better(total, exact) {
                self.best = Some((total, exact, self.cur.clone()));
            }
            return;
        }
        if let Some((bt, _, _)) = &self.best {
            // every remaining gold quantity can add at most 1
            let bound = total + (self.w.len() - g) as f64;
            if bound < bt - TIE_EPS {
                return;
            }
        }
        for p in 0..self.n_pred {
            let w = self.w[g][p];
            if self.used[p] || w <= 0.0 {
                continue;
            }
            self.used[p] = true;
            self.cur.push(Some(p));
            self.run(g + 1, total + w, exact + usize::from(w == 1.0));
            self.cur.pop();
            self.used[p] = false;
        }
        self.cur.push(None);
        self.run(g + 1, total, exact);
        self.cur.pop();
    }
}

/// Maximum-weight one-to-one assignment of predictions to gold quantities,
/// found by exhaustive search. Ties prefer more exact matches, then earlier
/// predictions.
pub fn match_quantities(
    gold: &GoldSpec,
    pred: &[QuantitySign],
    taxonomy: &QuantityTaxonomy,
    alpha: f64,
) -> Matching {
    let w: Vec<Vec<f64>> = gold
        .signs
        .iter()
        .map(|g| {
            pred.iter()
                .map(|p| match_weight(&g.quantity_type, &p.quantity_type, taxonomy, alpha))
                .collect()
        })
        .collect();
    let mut s = Search {
        w: &w,
        n_pred: pred.len(),
        used: vec![false; pred.len()],
        cur: Vec::new(),
        best: None,
    };
    s.run(0, 0.0, 0);
    let assignment = s.best.map(|b| b.2).unwrap_or_default();
    Matching {
        pairs: gold
            .signs
            .iter()
            .zip(assignment)
            .enumerate()
            .map(|(i, (g, p))| GoldMatch {
                gold: g.quantity_type.clone(),
                pred: p,
                weight: p.map(|p| w[i][p]).unwrap_or(0.0),
            })
            .collect(),
    }
}

pub fn score_fact(gold: &GoldSpec, pred: &[QuantitySign], matching: &Matching) -> FactScores {
    let n = gold.signs.len() as f64;
    let mut wsum = 0.0;
    let mut right = 0.0;
    for (g, m) in gold.signs.iter().zip(&matching.pairs) {
        let Some(p) = m.pred else { continue };
        wsum += m.weight;
        if pred[p].sign == g.sign {
            right += m.weight;
        }
    }
    if n == 0.0 {
        return FactScores {
            qc: 0.0,
            csa: None,
            op: 0.0,
        };
    }
    let s = FactScores {
        qc: wsum / n,
        csa: (wsum > 0.0).then(|| right / wsum),
        op: (wsum + right) / (2.0 * n),
    };
    if let Some(c) = s.csa {
        debug_assert!((s.op - s.qc * (1.0 + c) / 2.0).abs() <= 1e-12, "OP identity: {s:?}");
    }
    s
}

/// Predictions not matched to any gold quantity. Reported, never scored.
pub fn unmatched_predictions(pred: &[QuantitySign], matching: &Matching) -> usize {
    pred.len() - matching.pairs.iter().filter(|m| m.pred.is_some()).count()
}

pub fn aggregate(scores: &[FactScores]) -> Result<PipelineScores, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = scores.len() as f64;
    let defined: Vec<f64> = scores.iter().filter_map(|s| s.csa).collect();
    Ok(PipelineScores {
        qc: 100.0 * scores.iter().map(|s| s.qc).sum::<f64>() / n,
        csa: (!defined.is_empty()).then(|| 100.0 * defined.iter().sum::<f64>() / defined.len() as f64),
        op: 100.0 * scores.iter().map(|s| s.op).sum::<f64>() / n,
        facts: scores.len(),
        csa_defined: defined.len(),
    })
}

fn gold_record(e: &Sexpr, index: usize) -> Result<GoldSpec, EvalError> {
    let err = |message: String| EvalError::Gold { index, message };
    let items = e.as_list().ok_or_else(|| err("expected a list".into()))?;
    if e.head() != Some("gold") {
        return Err(err(format!("expected `gold`, got `{e}`")));
    }
    let text = items
        .get(1)
        .and_then(Sexpr::as_str)
        .ok_or_else(|| err("missing fact text".into()))?;
    let mut signs: Vec<QuantitySign> = Vec::new();
    for pair in &items[2..] {
        let (q, s) = match pair.as_list() {
            Some([Sexpr::Atom(q), Sexpr::Atom(s)]) => (q, s),
            _ => return Err(err(format!("malformed quantity/sign `{pair}`"))),
        };
        let sign = Sign::parse(s).ok_or_else(|| err(format!("unknown sign `{s}`")))?;
        if signs.iter().any(|x| &x.quantity_type == q) {
            return Err(err(format!("quantity `{q}` listed twice")));
        }
        signs.push(QuantitySign::new(q, sign));
    }
    if signs.is_empty() {
        return Err(err("no gold quantities".into()));
    }
    Ok(GoldSpec {
        text: normalize_text(text),
        signs,
    })
}

/// Parses `(gold "<fact text>" (QType sign) ...)` records.
pub fn parse_gold(text: &str) -> Result<Vec<GoldSpec>, EvalError> {
    let exprs = parse_all(text).map_err(|e| EvalError::Gold {
        index: 0,
        message: e.to_string(),
    })?;
    exprs
        .iter()
        .enumerate()
        .map(|(i, e)| gold_record(e, i + 1))
        .collect()
}

pub fn load_gold(path: &Path) -> Result<Vec<GoldSpec>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_gold(&text)
}

/// Gold specs keyed by normalized fact text.
pub fn gold_index(golds: &[GoldSpec]) -> HashMap<String, &GoldSpec> {
    golds.iter().map(|g| (normalize_text(&g.text), g)).collect()
}
