//! Bottom-up chart parser with dotted rules.
//!
//! Word tokens are consumed left to right. Each complete constituent seeds
//! every rule whose right-hand side starts with its category and extends
//! every active edge waiting for it at its left boundary.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use super::grammar::{Cat, GRAMMAR};

/// Safety valve against pathological ambiguity.
const MAX_EDGES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEdge {
    /// Half-open range over word positions.
    pub span: (usize, usize),
    pub category: Cat,
    /// Complete-edge ids, tiling `span` left to right.
    pub children: Vec<usize>,
    pub complete: bool,
    /// Word position for preterminal edges.
    pub word: Option<usize>,
    rule: Option<usize>,
    dot: usize,
}

#[derive(Debug, Default)]
pub struct Chart {
    n_words: usize,
    complete: Vec<ChartEdge>,
    active: Vec<ChartEdge>,
    truncated: bool,
}

impl Chart {
    /// Runs the parser over per-word category sets.
    pub fn build(word_cats: &[Vec<Cat>]) -> Chart {
        let mut chart = Chart {
            n_words: word_cats.len(),
            ..Chart::default()
        };
        let mut seen: HashSet<(Cat, usize, usize, Vec<usize>)> = HashSet::new();
        // active edges indexed by (end, expected category)
        let mut waiting: HashMap<(usize, Cat), Vec<usize>> = HashMap::new();
        // complete edges indexed by (start, category)
        let mut starting: HashMap<(usize, Cat), Vec<usize>> = HashMap::new();
        let mut agenda: VecDeque<usize> = VecDeque::new();

        for (i, cats) in word_cats.iter().enumerate() {
            for &cat in cats {
                let edge = ChartEdge {
                    span: (i, i + 1),
                    category: cat,
                    children: Vec::new(),
                    complete: true,
                    word: Some(i),
                    rule: None,
                    dot: 0,
                };
                if let Some(id) = chart.add_complete(edge, &mut seen, &mut starting) {
                    agenda.push_back(id);
                }
            }
            while let Some(id) = agenda.pop_front() {
                if chart.complete.len() + chart.active.len() > MAX_EDGES {
                    chart.truncated = true;
                    return chart;
                }
                let edge = chart.complete[id].clone();
                let mut fresh: Vec<ChartEdge> = Vec::new();
                for (r, rule) in GRAMMAR.iter().enumerate() {
                    if rule.rhs[0] == edge.category {
                        fresh.push(ChartEdge {
                            span: edge.span,
                            category: rule.lhs,
                            children: vec![id],
                            complete: false,
                            word: None,
                            rule: Some(r),
                            dot: 1,
                        });
                    }
                }
                if let Some(ids) = waiting.get(&(edge.span.0, edge.category)) {
                    for &a in ids {
                        fresh.push(chart.advance(&chart.active[a], id, edge.span.1));
                    }
                }
                // extend new active edges against complete edges already in the chart
                let mut queue: VecDeque<ChartEdge> = fresh.into();
                while let Some(e) = queue.pop_front() {
                    let rule = &GRAMMAR[e.rule.unwrap()];
                    if e.dot == rule.rhs.len() {
                        let done = ChartEdge {
                            complete: true,
                            ..e
                        };
                        if let Some(new_id) = chart.add_complete(done, &mut seen, &mut starting) {
                            agenda.push_back(new_id);
                        }
                        continue;
                    }
                    let next = rule.rhs[e.dot];
                    if let Some(ids) = starting.get(&(e.span.1, next)) {
                        for &c in ids {
                            let end = chart.complete[c].span.1;
                            queue.push_back(chart.advance(&e, c, end));
                        }
                    }
                    let aid = chart.active.len();
                    waiting.entry((e.span.1, next)).or_default().push(aid);
                    chart.active.push(e);
                }
            }
        }
        chart
    }

    fn advance(&self, active: &ChartEdge, child: usize, end: usize) -> ChartEdge {
        let mut children = active.children.clone();
        children.push(child);
        ChartEdge {
            span: (active.span.0, end),
            category: active.category,
            children,
            complete: false,
            word: None,
            rule: active.rule,
            dot: active.dot + 1,
        }
    }

    fn add_complete(
        &mut self,
        edge: ChartEdge,
        seen: &mut HashSet<(Cat, usize, usize, Vec<usize>)>,
        starting: &mut HashMap<(usize, Cat), Vec<usize>>,
    ) -> Option<usize> {
        let key = (
            edge.category,
            edge.span.0,
            edge.span.1,
            match edge.word {
                Some(w) => vec![usize::MAX - w],
                None => edge.children.clone(),
            },
        );
        if !seen.insert(key) {
            return None;
        }
        let id = self.complete.len();
        starting
            .entry((edge.span.0, edge.category))
            .or_default()
            .push(id);
        self.complete.push(edge);
        Some(id)
    }

    pub fn n_words(&self) -> usize {
        self.n_words
    }

    pub fn edges(&self) -> &[ChartEdge] {
        &self.complete
    }

    pub fn edge(&self, id: usize) -> &ChartEdge {
        &self.complete[id]
    }

    pub fn active_edges(&self) -> &[ChartEdge] {
        &self.active
    }

    /// True when the edge budget ran out before the chart was finished.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Complete sentence edges covering every word, in creation order.
    pub fn spanning(&self) -> Vec<usize> {
        if self.n_words == 0 {
            return Vec::new();
        }
        self.complete
            .iter()
            .enumerate()
            .filter(|(_, e)| e.category.is_sentence() && e.span == (0, self.n_words))
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.complete.iter().enumerate() {
            write!(f, "#{i:<4} {:<20} [{}, {})", e.category.to_string(), e.span.0, e.span.1)?;
            if !e.children.is_empty() {
                let kids: Vec<String> = e.children.iter().map(|c| format!("#{c}")).collect();
                write!(f, " <- {}", kids.join(" "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
