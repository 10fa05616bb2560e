//! Shared helpers for the integration and acceptance targets. The scoring
//! and matching code here is written from the metric definitions, without
//! calling into the library's matcher.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use quantsem::frames::{QuantitySign, Sign};
use quantsem::kb::{QuantityTaxonomy, KnowledgeBase};
use quantsem::oracle::{CachingInformant, Oracle, TranscriptStore};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini")
}

pub fn seed_kb() -> KnowledgeBase {
    quantsem::kb::load_kb(data_dir().join("seed.kb")).expect("seed KB loads")
}

pub fn replay_oracle() -> Oracle {
    let store = TranscriptStore::load(&data_dir().join("transcript.jsonl")).expect("transcript loads");
    Oracle::new(Arc::new(CachingInformant::replay(Arc::new(store))))
}

/// Compares against a golden file, or rewrites it when QUANTSEM_BLESS=1.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = data_dir().join("expected").join(name);
    if std::env::var("QUANTSEM_BLESS").as_deref() == Ok("1") {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want == actual {
        return Ok(());
    }
    let line = want
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| want.lines().count().min(actual.lines().count()));
    Err(format!("{name} differs from golden at line {}", line + 1))
}

/// A taxonomy given as explicit classes and class-level partial edges.
pub struct RandomTaxonomy {
    pub names: Vec<String>,
    pub class: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl RandomTaxonomy {
    pub fn generate<R: Rng>(rng: &mut R, n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("Q{i}")).collect();
        let n_classes = rng.gen_range(1..=n);
        let class: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_classes)).collect();
        let mut edges = Vec::new();
        for _ in 0..rng.gen_range(0..=n) {
            let a = rng.gen_range(0..n_classes);
            let b = rng.gen_range(0..n_classes);
            // higher class to lower keeps the graph acyclic
            if a > b {
                edges.push((a, b));
            }
        }
        Self { names, class, edges }
    }

    pub fn build(&self) -> QuantityTaxonomy {
        let mut t = QuantityTaxonomy::new();
        for n in &self.names {
            t.add_node(n);
        }
        for i in 0..self.names.len() {
            for j in 0..i {
                if self.class[i] == self.class[j] {
                    t.add_equivalence(&self.names[i], &self.names[j]).unwrap();
                }
            }
        }
        for &(a, b) in &self.edges {
            let x = self.class.iter().position(|&c| c == a);
            let y = self.class.iter().position(|&c| c == b);
            if let (Some(x), Some(y)) = (x, y) {
                t.add_partial(&self.names[x], &self.names[y]).unwrap();
            }
        }
        t
    }

    fn index(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).unwrap()
    }

    /// 1 within a class, alpha across a partial edge (either direction,
    /// only when both classes are populated), else 0.
    pub fn weight(&self, a: &str, b: &str, alpha: f64) -> f64 {
        let (ca, cb) = (self.class[self.index(a)], self.class[self.index(b)]);
        if ca == cb {
            return 1.0;
        }
        let populated = |c: usize| self.class.contains(&c);
        let linked = self
            .edges
            .iter()
            .any(|&(x, y)| populated(x) && populated(y) && ((x, y) == (ca, cb) || (x, y) == (cb, ca)));
        if linked {
            alpha
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OracleScores {
    pub total_weight: f64,
    pub qc: f64,
    pub csa: Option<f64>,
    pub op: f64,
}

/// Exhaustive search over every one-to-one partial assignment. Among
/// assignments of maximal weight, sign-correct weight is not part of the
/// objective, so the caller compares weights and checks the identity.
pub fn brute_force(gold: &[QuantitySign], pred: &[QuantitySign], w: &dyn Fn(&str, &str) -> f64) -> OracleScores {
    fn go(
        g: usize,
        gold: &[QuantitySign],
        pred: &[QuantitySign],
        used: &mut Vec<bool>,
        w: &dyn Fn(&str, &str) -> f64,
        acc: (f64, f64),
        best: &mut (f64, f64),
    ) {
        if g == gold.len() {
            if acc.0 > best.0 + 1e-12 {
                *best = acc;
            }
            return;
        }
        go(g + 1, gold, pred, used, w, acc, best);
        for p in 0..pred.len() {
            if used[p] {
                continue;
            }
            let x = w(&gold[g].quantity_type, &pred[p].quantity_type);
            if x <= 0.0 {
                continue;
            }
            used[p] = true;
            let right = if gold[g].sign == pred[p].sign { x } else { 0.0 };
            go(g + 1, gold, pred, used, w, (acc.0 + x, acc.1 + right), best);
            used[p] = false;
        }
    }
    let mut best = (0.0, 0.0);
    go(0, gold, pred, &mut vec![false; pred.len()], w, (0.0, 0.0), &mut best);
    let n = gold.len() as f64;
    OracleScores {
        total_weight: best.0,
        qc: best.0 / n,
        csa: (best.0 > 0.0).then(|| best.1 / best.0),
        op: (best.0 + best.1) / (2.0 * n),
    }
}

pub fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    *[Sign::Plus, Sign::Minus, Sign::None].choose(rng).unwrap()
}

const NOUNS: &[&str] = &["particles", "gas", "water", "planets", "stars", "layers", "slopes", "air", "ice", "plants"];
const COMP_ADJ: &[&str] = &["cooler", "colder", "hotter", "warmer", "smaller", "bigger", "older", "heavier", "denser", "closer"];
const QTY_NOUNS: &[&str] = &["energy", "space", "current", "erosion", "fertilizer", "resources"];
const VERBS: &[&str] = &["move", "have", "need", "produce"];
const ADVS: &[&str] = &["slowly"];
const ADJS: &[&str] = &["dense", "fast", "deep", "steep", "thick"];

/// A random comparative sentence from a fixed set of templates over the
/// seed lexicon.
pub fn template_sentence<R: Rng>(rng: &mut R) -> String {
    let pick = |rng: &mut R, xs: &[&str]| xs.choose(rng).unwrap().to_string();
    let noun = pick(rng, NOUNS);
    let det = if rng.gen_bool(0.3) { "the " } else { "" };
    let mut subj = format!("{det}{noun}");
    if rng.gen_bool(0.4) {
        subj = format!("{det}{} {noun}", pick(rng, COMP_ADJ));
    }
    if rng.gen_bool(0.5) {
        let rel = match rng.gen_range(0..3) {
            0 => format!("that are {}", pick(rng, COMP_ADJ)),
            1 => format!("that {} more {}", pick(rng, VERBS), pick(rng, QTY_NOUNS)),
            _ => format!("that move more {}", pick(rng, ADVS)),
        };
        subj = format!("{subj} {rel}");
    }
    let pred = match rng.gen_range(0..5) {
        0 => format!("are {}", pick(rng, COMP_ADJ)),
        1 => format!("have {} {}", pick(rng, &["more", "less"]), pick(rng, QTY_NOUNS)),
        2 => format!("move more {}", pick(rng, ADVS)),
        3 => format!("are more {}", pick(rng, ADJS)),
        _ => format!("{} more {}", pick(rng, VERBS), pick(rng, QTY_NOUNS)),
    };
    let than = if rng.gen_bool(0.6) {
        format!(" than {}", pick(rng, NOUNS))
    } else {
        String::new()
    };
    let mut s = format!("{subj} {pred}{than}.");
    s[..1].make_ascii_uppercase();
    s
}
