//! Tokenizer, comparative detection and the template chart parser.

mod chart;
mod grammar;

use serde::Serialize;

use crate::kb::{Degree, KnowledgeBase, LexicalEntry, Pos, Relation};

pub use chart::{Chart, ChartEdge};
pub use grammar::{Cat, Rule, GRAMMAR};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Token {
    /// Lowercased text.
    pub surface: String,
    /// Character offsets into the input, half-open.
    pub span: (usize, usize),
    /// Every lexical entry for the surface form, in part-of-speech order.
    pub lex: Vec<LexicalEntry>,
    pub is_word: bool,
}

impl Token {
    pub fn entry(&self, pos: Pos) -> Option<&LexicalEntry> {
        self.lex.iter().find(|e| e.pos == pos)
    }

    /// Root for the given reading, falling back to the surface form.
    pub fn root(&self, pos: Pos) -> &str {
        self.entry(pos).map(|e| e.root.as_str()).unwrap_or(&self.surface)
    }

    pub fn is_comparative_marker(&self) -> bool {
        self.entry(Pos::Determiner)
            .map(|e| e.degree == Degree::Comparative)
            .unwrap_or(false)
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '-'
}

/// Lowercased word and punctuation tokens, each word annotated with its
/// lexical entries.
pub fn tokenize(text: &str, kb: &KnowledgeBase) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if is_word_char(c) {
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            // trailing hyphens and quotes are punctuation
            while i > start + 1 && matches!(chars[i - 1], '-' | '\'') {
                i -= 1;
            }
        } else {
            i += 1;
        }
        let surface: String = chars[start..i].iter().collect::<String>().to_lowercase();
        let is_word = surface.chars().any(char::is_alphanumeric);
        let lex = if is_word {
            kb.entries_for(&surface).into_iter().cloned().collect()
        } else {
            Vec::new()
        };
        tokens.push(Token {
            surface,
            span: (start, i),
            lex,
            is_word,
        });
    }
    tokens
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Comparatives {
    /// Comparative adjectives and adverbs.
    pub comparatives: Vec<usize>,
    /// more / less / fewer used as degree determiners.
    pub degree_markers: Vec<usize>,
}

pub fn identify_comparatives(tokens: &[Token]) -> Comparatives {
    let mut out = Comparatives::default();
    for (i, t) in tokens.iter().enumerate() {
        let graded = t.lex.iter().any(|e| {
            e.degree == Degree::Comparative && matches!(e.pos, Pos::Adjective | Pos::Adverb)
        });
        if graded {
            out.comparatives.push(i);
        } else if t.is_comparative_marker() {
            out.degree_markers.push(i);
        }
    }
    out
}

/// Relation contributed by a degree marker: more is greaterThan, less and
/// fewer are lessThan.
pub fn marker_relation(token: &Token) -> Relation {
    match token.root(Pos::Determiner) {
        "little" | "few" => Relation::LessThan,
        _ => Relation::GreaterThan,
    }
}

fn categories(tok: &Token) -> Vec<Cat> {
    if tok.lex.is_empty() {
        return vec![Cat::Noun];
    }
    let mut cats = Vec::new();
    for e in &tok.lex {
        let comparative = e.degree == Degree::Comparative;
        let cat = match e.pos {
            Pos::Noun => Some(Cat::Noun),
            Pos::Verb if e.root == "have" => Some(Cat::Have),
            Pos::Verb => Some(Cat::Verb),
            Pos::Adjective if comparative => Some(Cat::CompAdj),
            Pos::Adjective => Some(Cat::Adj),
            Pos::Adverb if comparative => Some(Cat::CompAdv),
            Pos::Adverb => Some(Cat::Adv),
            Pos::Determiner if comparative => Some(Cat::Deg),
            Pos::Determiner => Some(Cat::Det),
            Pos::Preposition if e.surface == "than" => Some(Cat::Than),
            Pos::Preposition => Some(Cat::Prep),
            Pos::Copula => Some(Cat::Cop),
            Pos::Conjunction if e.surface == "and" => Some(Cat::Conj),
            Pos::Conjunction => None,
            Pos::Pronoun if matches!(e.surface.as_str(), "that" | "which" | "who") => {
                Some(Cat::Rel)
            }
            Pos::Pronoun => Some(Cat::Pro),
        };
        if let Some(c) = cat {
            if !cats.contains(&c) {
                cats.push(c);
            }
        }
    }
    cats
}

fn word_positions(tokens: &[Token]) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_word)
        .map(|(i, _)| i)
        .collect()
}

/// Builds the chart over the word tokens. Punctuation is not part of the
/// grammar and is skipped.
pub fn parse_chart(tokens: &[Token]) -> Chart {
    let cats: Vec<Vec<Cat>> = word_positions(tokens)
        .into_iter()
        .map(|i| categories(&tokens[i]))
        .collect();
    Chart::build(&cats)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyntaxNode {
    pub category: Cat,
    /// Token index range, half-open.
    pub span: (usize, usize),
    pub children: Vec<SyntaxNode>,
    /// Token index for preterminals.
    pub token: Option<usize>,
}

impl SyntaxNode {
    fn from_edge(chart: &Chart, id: usize, words: &[usize]) -> SyntaxNode {
        let e = chart.edge(id);
        let tok_span = (words[e.span.0], words[e.span.1 - 1] + 1);
        SyntaxNode {
            category: e.category,
            span: tok_span,
            children: e
                .children
                .iter()
                .map(|&c| SyntaxNode::from_edge(chart, c, words))
                .collect(),
            token: e.word.map(|w| words[w]),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(SyntaxNode::depth).max().unwrap_or(0)
    }

    fn child(&self, cat: Cat) -> Option<&SyntaxNode> {
        self.children.iter().find(|c| c.category == cat)
    }

    /// Head token of a nominal phrase: the last noun of the first nominal
    /// chain, or the pronoun.
    fn head(&self) -> Option<usize> {
        match self.category {
            Cat::Noun | Cat::Pro => self.token,
            Cat::N1 => self.children.last().and_then(SyntaxNode::head),
            Cat::NP | Cat::Subj => self.children.first().and_then(|c| match c.category {
                Cat::Det => self.children.get(1).and_then(SyntaxNode::head),
                _ => c.head(),
            }),
            Cat::Nom | Cat::DegNP => self.children.last().and_then(SyntaxNode::head),
            _ => None,
        }
    }

    /// Bracketed rendering with surfaces at the leaves.
    pub fn render(&self, tokens: &[Token]) -> String {
        match self.token {
            Some(t) => format!("({} {})", self.category, tokens[t].surface),
            None => {
                let inner: Vec<String> = self.children.iter().map(|c| c.render(tokens)).collect();
                format!("({} {})", self.category, inner.join(" "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SentenceKind {
    Comparative,
    Declarative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Phrase {
    pub span: (usize, usize),
    pub head: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Comparee {
    Node(Phrase),
    /// Elided comparee. `head` is the subject head token it stands in for.
    Gap { head: usize },
}

impl Comparee {
    pub fn is_gap(&self) -> bool {
        matches!(self, Comparee::Gap { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ComparativeElement {
    Adjective { token: usize },
    Adverb { token: usize },
    /// Degree marker plus the word it grades.
    Degree {
        marker: usize,
        head: usize,
        head_pos: Pos,
    },
}

impl ComparativeElement {
    /// The comparative-degree token of the element.
    pub fn token(&self) -> usize {
        match *self {
            ComparativeElement::Adjective { token } | ComparativeElement::Adverb { token } => token,
            ComparativeElement::Degree { marker, .. } => marker,
        }
    }

    pub fn describe(&self, tokens: &[Token]) -> String {
        match *self {
            ComparativeElement::Adjective { token } | ComparativeElement::Adverb { token } => {
                tokens[token].surface.clone()
            }
            ComparativeElement::Degree { marker, head, .. } => {
                format!("{} {}", tokens[marker].surface, tokens[head].surface)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseTree {
    pub kind: SentenceKind,
    pub root: SyntaxNode,
    pub tokens: Vec<Token>,
    pub subject: Phrase,
    /// Always set for comparative sentences.
    pub comparee: Option<Comparee>,
    pub elements: Vec<ComparativeElement>,
    /// Predicate adjective of a declarative sentence.
    pub predicate: Option<usize>,
}

impl ParseTree {
    pub fn sentence(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn gap_count(&self) -> usize {
        usize::from(self.comparee.as_ref().map(Comparee::is_gap).unwrap_or(false))
    }
}

fn phrase(node: &SyntaxNode, tokens: &[Token]) -> Option<Phrase> {
    Some(Phrase {
        span: node.span,
        head: node.head()?,
        text: span_text(tokens, node.span),
    })
}

fn span_text(tokens: &[Token], span: (usize, usize)) -> String {
    tokens[span.0..span.1]
        .iter()
        .filter(|t| t.is_word)
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn collect_elements(node: &SyntaxNode, out: &mut Vec<ComparativeElement>) {
    match node.category {
        Cat::CompAdj => out.push(ComparativeElement::Adjective {
            token: node.token.unwrap(),
        }),
        Cat::CompAdv => out.push(ComparativeElement::Adverb {
            token: node.token.unwrap(),
        }),
        Cat::DegNP | Cat::DegAdvP | Cat::DegAdjP => {
            let marker = node.children[0].token.unwrap();
            let graded = &node.children[1];
            let (head, head_pos) = match node.category {
                Cat::DegNP => (graded.head(), Pos::Noun),
                Cat::DegAdvP => (graded.token, Pos::Adverb),
                _ => (graded.token, Pos::Adjective),
            };
            if let Some(head) = head {
                out.push(ComparativeElement::Degree {
                    marker,
                    head,
                    head_pos,
                });
            }
            // adjectives inside the graded nominal still count
            for c in &graded.children {
                collect_elements(c, out);
            }
        }
        _ => {
            for c in &node.children {
                collect_elements(c, out);
            }
        }
    }
}

fn same_head(tokens: &[Token], a: usize, b: usize) -> bool {
    tokens[a].surface == tokens[b].surface || tokens[a].root(Pos::Noun) == tokens[b].root(Pos::Noun)
}

fn tree_from_root(root: SyntaxNode, tokens: &[Token]) -> Option<ParseTree> {
    match root.category {
        Cat::ComparativeSentence => {
            let subj = root.child(Cat::Subj)?;
            let pred = root.child(Cat::Pred)?;
            let subject = phrase(subj, tokens)?;
            let comparee = match root.child(Cat::ThanP) {
                None => Comparee::Gap { head: subject.head },
                Some(than) => {
                    let np = than.child(Cat::NP)?;
                    let np_phrase = phrase(np, tokens)?;
                    let bare = np.span.1 - np.span.0 == 1 && tokens[np_phrase.head].is_word;
                    if bare && same_head(tokens, np_phrase.head, subject.head) {
                        Comparee::Gap { head: subject.head }
                    } else {
                        Comparee::Node(np_phrase)
                    }
                }
            };
            let mut elements = Vec::new();
            collect_elements(subj, &mut elements);
            collect_elements(pred, &mut elements);
            elements.sort_by_key(ComparativeElement::token);
            Some(ParseTree {
                kind: SentenceKind::Comparative,
                subject,
                comparee: Some(comparee),
                elements,
                predicate: None,
                tokens: tokens.to_vec(),
                root,
            })
        }
        Cat::DeclarativeSentence => {
            let subject = phrase(root.child(Cat::NP)?, tokens)?;
            let predicate = root.child(Cat::Adj)?.token;
            Some(ParseTree {
                kind: SentenceKind::Declarative,
                subject,
                comparee: None,
                elements: Vec::new(),
                predicate,
                tokens: tokens.to_vec(),
                root,
            })
        }
        _ => None,
    }
}

/// All spanning parses in chart order. An empty list means the sentence is
/// outside the grammar.
pub fn parse(tokens: &[Token]) -> Vec<ParseTree> {
    let chart = parse_chart(tokens);
    let words = word_positions(tokens);
    chart
        .spanning()
        .into_iter()
        .filter_map(|id| tree_from_root(SyntaxNode::from_edge(&chart, id, &words), tokens))
        .collect()
}

pub fn parse_text(text: &str, kb: &KnowledgeBase) -> Vec<ParseTree> {
    parse(&tokenize(text, kb))
}

/// True when the text has at least one comparative-sentence parse.
pub fn is_comparative_sentence(text: &str, kb: &KnowledgeBase) -> bool {
    parse_text(text, kb)
        .iter()
        .any(|t| t.kind == SentenceKind::Comparative)
}

/// Most elements, then fewest gaps, then shallowest, then earliest.
pub fn best_parse(parses: &[ParseTree]) -> Option<&ParseTree> {
    let mut best: Option<&ParseTree> = None;
    for p in parses {
        let better = match best {
            None => true,
            Some(b) => {
                let kp = (std::cmp::Reverse(p.elements.len()), p.gap_count(), p.depth());
                let kb = (std::cmp::Reverse(b.elements.len()), b.gap_count(), b.depth());
                kp < kb
            }
        };
        if better {
            best = Some(p);
        }
    }
    best
}
