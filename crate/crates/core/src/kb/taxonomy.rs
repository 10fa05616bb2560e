use std::collections::{BTreeMap, BTreeSet};

use super::KbError;

/// Quantity-type taxonomy used for partial-credit matching.
///
/// Equivalences partition the nodes into classes.
/// Partial edges run from a more specific type to a more general one and are
/// kept acyclic (over equivalence classes).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuantityTaxonomy {
    nodes: BTreeSet<String>,
    equivalences: BTreeSet<(String, String)>,
    partial_edges: BTreeSet<(String, String)>,
    class_of: BTreeMap<String, String>,
}

impl QuantityTaxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, qtype: &str) -> bool {
        let added = self.nodes.insert(qtype.to_string());
        if added {
            self.class_of.insert(qtype.to_string(), qtype.to_string());
        }
        added
    }

    pub fn contains(&self, qtype: &str) -> bool {
        self.nodes.contains(qtype)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn equivalences(&self) -> impl Iterator<Item = (&str, &str)> {
        self.equivalences.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn partial_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.partial_edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    /// Declares `a` and `b` ontology-equivalent. Both must be known nodes.
    pub fn add_equivalence(&mut self, a: &str, b: &str) -> Result<(), KbError> {
        self.require(a)?;
        self.require(b)?;
        let pair = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        let before = self.clone();
        self.equivalences.insert(pair);
        self.rebuild_classes();
        if self.has_cycle() {
            *self = before;
            return Err(KbError::CyclicPartial(a.to_string(), b.to_string()));
        }
        Ok(())
    }

    /// Declares `specific` a partial match of `general`.
    pub fn add_partial(&mut self, specific: &str, general: &str) -> Result<(), KbError> {
        self.require(specific)?;
        self.require(general)?;
        if self.equivalent(specific, general) {
            return Err(KbError::CyclicPartial(
                specific.to_string(),
                general.to_string(),
            ));
        }
        self.partial_edges
            .insert((specific.to_string(), general.to_string()));
        if self.has_cycle() {
            self.partial_edges
                .remove(&(specific.to_string(), general.to_string()));
            return Err(KbError::CyclicPartial(
                specific.to_string(),
                general.to_string(),
            ));
        }
        Ok(())
    }

    fn require(&self, qtype: &str) -> Result<(), KbError> {
        if self.contains(qtype) {
            Ok(())
        } else {
            Err(KbError::UnresolvedIdentifier {
                kind: "quantity type",
                id: qtype.to_string(),
            })
        }
    }

    fn class<'a>(&'a self, qtype: &'a str) -> &'a str {
        self.class_of.get(qtype).map(String::as_str).unwrap_or(qtype)
    }

    fn rebuild_classes(&mut self) {
        // Union-find over the declared equivalence pairs; the representative
        // of each class is its lexicographically smallest member.
        let mut parent: BTreeMap<String, String> =
            self.nodes.iter().map(|n| (n.clone(), n.clone())).collect();
        fn find(parent: &mut BTreeMap<String, String>, x: &str) -> String {
            let p = parent[x].clone();
            if p == x {
                return p;
            }
            let root = find(parent, &p);
            parent.insert(x.to_string(), root.clone());
            root
        }
        for (a, b) in &self.equivalences {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent.insert(hi, lo);
            }
        }
        let nodes: Vec<String> = self.nodes.iter().cloned().collect();
        self.class_of = nodes
            .into_iter()
            .map(|n| {
                let r = find(&mut parent, &n);
                (n, r)
            })
            .collect();
    }

    fn has_cycle(&self) -> bool {
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (a, b) in &self.partial_edges {
            let (ca, cb) = (self.class(a), self.class(b));
            if ca == cb {
                return true;
            }
            adj.entry(ca).or_default().push(cb);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<&str, u8> = BTreeMap::new();
        fn visit<'a>(
            n: &'a str,
            adj: &BTreeMap<&'a str, Vec<&'a str>>,
            state: &mut BTreeMap<&'a str, u8>,
        ) -> bool {
            match state.get(n) {
                Some(1) => return true,
                Some(2) => return false,
                _ => {}
            }
            state.insert(n, 1);
            if let Some(next) = adj.get(n) {
                for m in next {
                    if visit(m, adj, state) {
                        return true;
                    }
                }
            }
            state.insert(n, 2);
            false
        }
        let starts: Vec<&str> = adj.keys().copied().collect();
        starts.into_iter().any(|n| visit(n, &adj, &mut state))
    }

    /// Identical or ontology-equivalent.
    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        a == b || self.class(a) == self.class(b)
    }

    /// A partial edge exists between the two types in either direction, and
    /// they are not equivalent.
    pub fn partial(&self, a: &str, b: &str) -> bool {
        if self.equivalent(a, b) {
            return false;
        }
        let (ca, cb) = (self.class(a), self.class(b));
        self.partial_edges.iter().any(|(x, y)| {
            let (cx, cy) = (self.class(x), self.class(y));
            (cx == ca && cy == cb) || (cx == cb && cy == ca)
        })
    }
}
