//! Dependency trees and augmented dependency paths.
//!
//! An augmented dependency path is the shortest path between two entity
//! head words in the undirected view of a dependency tree, together with
//! the subtrees hanging off each word on that path.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdpError {
    #[error("invalid span [{start}, {end}] for a sentence of {len} tokens")]
    InvalidSpan { start: usize, end: usize, len: usize },
    #[error("token index {0} is out of range")]
    TokenOutOfRange(usize),
    #[error("no path between tokens {0} and {1}")]
    Disconnected(usize, usize),
    #[error("tree violation: {0}")]
    TreeViolation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: Option<String>,
    pub ner_tag: Option<String>,
    pub wn_hypernym: Option<String>,
}

impl Token {
    pub fn new(index: usize, form: impl Into<String>) -> Self {
        Token {
            index,
            form: form.into(),
            lemma: None,
            ner_tag: None,
            wn_hypernym: None,
        }
    }
}

/// A typed head → dependent arc. `head == 0` marks the root arc.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub head: usize,
    pub dependent: usize,
    pub label: String,
}

impl Arc {
    pub fn new(head: usize, dependent: usize, label: impl Into<String>) -> Self {
        Arc {
            head,
            dependent,
            label: label.into(),
        }
    }
}

/// A single-rooted dependency tree over a token list.
///
/// Tokens without any incoming arc are *inactive*: they stay in the token
/// list (so character alignment still works) but take no part in the tree.
/// Collapsed prepositions are the usual source of inactive tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    tokens: Vec<Token>,
    heads: Vec<Option<(usize, String)>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl DependencyGraph {
    pub fn new(tokens: Vec<Token>, arcs: Vec<Arc>) -> Result<Self, AdpError> {
        let n = tokens.len();
        for (i, tok) in tokens.iter().enumerate() {
            if tok.index != i + 1 {
                return Err(AdpError::TreeViolation(format!(
                    "token at position {} has index {}, expected {}",
                    i + 1,
                    tok.index,
                    i + 1
                )));
            }
        }

        let mut heads: Vec<Option<(usize, String)>> = vec![None; n];
        for arc in arcs {
            if arc.dependent == 0 || arc.dependent > n {
                return Err(AdpError::TokenOutOfRange(arc.dependent));
            }
            if arc.head > n {
                return Err(AdpError::TokenOutOfRange(arc.head));
            }
            if arc.head == arc.dependent {
                return Err(AdpError::TreeViolation(format!(
                    "token {} is its own head",
                    arc.dependent
                )));
            }
            let slot = &mut heads[arc.dependent - 1];
            if slot.is_some() {
                return Err(AdpError::TreeViolation(format!(
                    "token {} has more than one head",
                    arc.dependent
                )));
            }
            *slot = Some((arc.head, arc.label));
        }

        let roots: Vec<usize> = heads
            .iter()
            .enumerate()
            .filter(|(_, h)| matches!(h, Some((0, _))))
            .map(|(i, _)| i + 1)
            .collect();
        if roots.len() != 1 {
            return Err(AdpError::TreeViolation(format!(
                "expected exactly one root arc, found {}",
                roots.len()
            )));
        }
        let root = roots[0];

        let mut children = vec![Vec::new(); n + 1];
        for (i, h) in heads.iter().enumerate() {
            if let Some((head, _)) = h {
                if *head != 0 && heads[head - 1].is_none() {
                    return Err(AdpError::TreeViolation(format!(
                        "token {} is headed by detached token {}",
                        i + 1,
                        head
                    )));
                }
                children[*head].push(i + 1);
            }
        }

        // Every attached token must reach the root within n steps.
        for start in 1..=n {
            if heads[start - 1].is_none() {
                continue;
            }
            let mut cur = start;
            let mut steps = 0;
            while cur != 0 {
                cur = heads[cur - 1].as_ref().map(|(h, _)| *h).unwrap_or(0);
                steps += 1;
                if steps > n {
                    return Err(AdpError::TreeViolation(format!("cycle through token {start}")));
                }
            }
        }

        Ok(DependencyGraph {
            tokens,
            heads,
            children,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn is_active(&self, index: usize) -> bool {
        index >= 1 && index <= self.len() && self.heads[index - 1].is_some()
    }

    /// Head of `index` (0 for the root), `None` for inactive tokens.
    pub fn head(&self, index: usize) -> Option<usize> {
        self.heads.get(index.checked_sub(1)?)?.as_ref().map(|(h, _)| *h)
    }

    pub fn relation(&self, index: usize) -> Option<&str> {
        self.heads.get(index.checked_sub(1)?)?.as_ref().map(|(_, l)| l.as_str())
    }

    /// Dependents of `index` in ascending order; `children(0)` is the root.
    pub fn children(&self, index: usize) -> &[usize] {
        self.children.get(index).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.heads
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.as_ref().map(|(head, label)| Arc::new(*head, i + 1, label.clone())))
    }

    /// Number of arcs between `index` and the root (root has depth 0).
    pub fn depth(&self, index: usize) -> Option<usize> {
        let mut cur = index;
        let mut depth = 0;
        loop {
            let h = self.head(cur)?;
            if h == 0 {
                return Some(depth);
            }
            cur = h;
            depth += 1;
        }
    }

    /// Head word of an entity span: the span token whose head lies outside
    /// the span. Several candidates are resolved by smallest depth, then by
    /// smallest index.
    pub fn find_entity_head(&self, start: usize, end: usize) -> Result<usize, AdpError> {
        let invalid = AdpError::InvalidSpan {
            start,
            end,
            len: self.len(),
        };
        if start == 0 || start > end || end > self.len() {
            return Err(invalid);
        }
        (start..=end)
            .filter_map(|i| {
                let h = self.head(i)?;
                let outside = h == 0 || h < start || h > end;
                outside.then(|| (self.depth(i).unwrap_or(usize::MAX), i))
            })
            .min()
            .map(|(_, i)| i)
            .ok_or(invalid)
    }

    /// Path between `a` and `b` in the undirected tree, found by BFS.
    pub fn shortest_path(&self, a: usize, b: usize) -> Result<DependencyPath, AdpError> {
        for t in [a, b] {
            if t == 0 || t > self.len() {
                return Err(AdpError::TokenOutOfRange(t));
            }
        }
        if !self.is_active(a) || !self.is_active(b) {
            return Err(AdpError::Disconnected(a, b));
        }
        if a == b {
            return Ok(DependencyPath {
                tokens: vec![a],
                relations: Vec::new(),
            });
        }

        let n = self.len();
        let mut prev: Vec<Option<usize>> = vec![None; n + 1];
        let mut seen = vec![false; n + 1];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(cur) = queue.pop_front() {
            if cur == b {
                break;
            }
            let up = self.head(cur).filter(|&h| h != 0);
            for next in up.into_iter().chain(self.children(cur).iter().copied()) {
                if !seen[next] {
                    seen[next] = true;
                    prev[next] = Some(cur);
                    queue.push_back(next);
                }
            }
        }
        if !seen[b] {
            return Err(AdpError::Disconnected(a, b));
        }

        let mut tokens = vec![b];
        let mut cur = b;
        while let Some(p) = prev[cur] {
            tokens.push(p);
            cur = p;
        }
        tokens.reverse();

        let relations = tokens.windows(2).map(|w| self.step_relation(w[0], w[1])).collect();
        Ok(DependencyPath { tokens, relations })
    }

    /// Relation crossed when moving from `from` to the adjacent token `to`.
    fn step_relation(&self, from: usize, to: usize) -> DirectedRelation {
        if self.head(from) == Some(to) {
            DirectedRelation::new(self.relation(from).unwrap_or_default(), Direction::Inverse)
        } else {
            debug_assert_eq!(self.head(to), Some(from));
            DirectedRelation::new(self.relation(to).unwrap_or_default(), Direction::Forward)
        }
    }

    /// Attach to each path word the arcs of its off-path subtree.
    pub fn attach_subtrees(&self, path: DependencyPath) -> AugmentedDependencyPath {
        let mut on_path = vec![false; self.len() + 1];
        for &t in &path.tokens {
            on_path[t] = true;
        }
        let subtrees = path
            .tokens
            .iter()
            .map(|&w| {
                let mut arcs = Vec::new();
                let mut stack: Vec<usize> = vec![w];
                while let Some(node) = stack.pop() {
                    for &c in self.children(node).iter().rev() {
                        if on_path[c] {
                            continue;
                        }
                        arcs.push(Arc::new(node, c, self.relation(c).unwrap_or_default()));
                        stack.push(c);
                    }
                }
                arcs.sort();
                arcs
            })
            .collect();
        AugmentedDependencyPath { path, subtrees }
    }

    /// Shortest path plus attached subtrees between two token indices.
    pub fn augmented_path(&self, a: usize, b: usize) -> Result<AugmentedDependencyPath, AdpError> {
        Ok(self.attach_subtrees(self.shortest_path(a, b)?))
    }

    /// Rewrite `gov -prep-> P -pobj-> obj` as `gov -prep_p-> obj`.
    ///
    /// The preposition token stays in the token list but loses its arc.
    /// A `prep` arc is rewritten only when the preposition has exactly one
    /// dependent and that dependent is a `pobj`; anything else is left as is.
    pub fn collapse_prepositions(&self) -> DependencyGraph {
        let mut heads = self.heads.clone();
        for p in 1..=self.len() {
            let Some((gov, label)) = &self.heads[p - 1] else {
                continue;
            };
            if label != "prep" || *gov == 0 {
                continue;
            }
            let kids = self.children(p);
            if kids.len() != 1 || self.relation(kids[0]) != Some("pobj") {
                continue;
            }
            let object = kids[0];
            let form = self.tokens[p - 1].form.to_lowercase();
            heads[object - 1] = Some((*gov, format!("prep_{form}")));
            heads[p - 1] = None;
        }
        let arcs = heads
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.as_ref().map(|(hd, l)| Arc::new(*hd, i + 1, l.clone())))
            .collect();
        DependencyGraph::new(self.tokens.clone(), arcs).expect("collapsing prepositions preserves the tree property")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Head to dependent.
    Forward,
    /// Dependent to head.
    Inverse,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectedRelation {
    pub label: String,
    pub direction: Direction,
}

impl DirectedRelation {
    pub fn new(label: impl Into<String>, direction: Direction) -> Self {
        DirectedRelation {
            label: label.into(),
            direction,
        }
    }

    /// Vocabulary key: the label, suffixed with `_inv` when inverse.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DirectedRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Forward => f.write_str(&self.label),
            Direction::Inverse => write!(f, "{}_inv", self.label),
        }
    }
}

/// Token sequence from one endpoint to the other; `relations[i]` joins
/// `tokens[i]` and `tokens[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyPath {
    pub tokens: Vec<usize>,
    pub relations: Vec<DirectedRelation>,
}

impl DependencyPath {
    pub fn reversed(&self) -> DependencyPath {
        DependencyPath {
            tokens: self.tokens.iter().rev().copied().collect(),
            relations: self
                .relations
                .iter()
                .rev()
                .map(|r| DirectedRelation::new(r.label.clone(), r.direction.flipped()))
                .collect(),
        }
    }

    pub fn render(&self, graph: &DependencyGraph) -> String {
        let mut out = String::new();
        for (i, &t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
                out.push_str(&self.relations[i - 1].to_string());
                out.push(' ');
            }
            out.push_str(graph.token(t).map(|t| t.form.as_str()).unwrap_or("?"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathElement {
    SentinelStart,
    Word(usize),
    Relation(DirectedRelation),
    SentinelEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedDependencyPath {
    pub path: DependencyPath,
    /// `subtrees[i]` holds the off-path arcs below `path.tokens[i]`, sorted.
    pub subtrees: Vec<Vec<Arc>>,
}

impl AugmentedDependencyPath {
    pub fn words(&self) -> &[usize] {
        &self.path.tokens
    }

    /// `[r_s, w_1, r_1, ..., w_m, r_e]`
    pub fn elements(&self) -> Vec<PathElement> {
        let mut out = Vec::with_capacity(2 * self.path.tokens.len() + 1);
        out.push(PathElement::SentinelStart);
        for (i, &w) in self.path.tokens.iter().enumerate() {
            if i > 0 {
                out.push(PathElement::Relation(self.path.relations[i - 1].clone()));
            }
            out.push(PathElement::Word(w));
        }
        out.push(PathElement::SentinelEnd);
        out
    }

    /// Tokens in the attached subtree of the `i`-th path word, ascending.
    pub fn subtree_tokens(&self, i: usize) -> Vec<usize> {
        let mut toks: Vec<usize> = self.subtrees[i].iter().map(|a| a.dependent).collect();
        toks.sort_unstable();
        toks
    }
}
