use std::collections::HashMap;

use crate::adp::{AugmentedDependencyPath, DependencyGraph};
use crate::corpus::Instance;

pub const UNK: &str = "<unk>";
pub const REL_START: &str = "<s>";
pub const REL_END: &str = "</s>";
pub const DEFAULT_COMPOSE: &str = "<default>";

/// String-to-row table with a fixed fallback row 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    entries: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    /// A table whose first entries are `reserved`; row 0 is the fallback.
    pub fn with_reserved(reserved: &[&str]) -> Self {
        let mut v = Vocab {
            entries: Vec::new(),
            index: HashMap::new(),
        };
        for r in reserved {
            v.insert(r);
        }
        v
    }

    pub fn from_entries(entries: Vec<String>) -> Self {
        let index = entries.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Vocab { entries, index }
    }

    pub fn insert(&mut self, s: &str) -> usize {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        self.entries.push(s.to_string());
        self.index.insert(s.to_string(), self.entries.len() - 1);
        self.entries.len() - 1
    }

    pub fn get(&self, s: &str) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Exact entry, else row 0.
    pub fn row(&self, s: &str) -> usize {
        self.get(s).unwrap_or(0)
    }

    /// Exact entry, then lowercase, then row 0.
    pub fn word_row(&self, s: &str) -> usize {
        self.get(s).or_else(|| self.get(&s.to_lowercase())).unwrap_or(0)
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// All tables a model needs to turn an instance into parameter rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabularies {
    pub words: Vocab,
    /// Directed path relations; rows 1 and 2 are the path sentinels.
    pub relations: Vocab,
    /// Subtree arc labels, one composition matrix each.
    pub compose: Vocab,
    pub ner: Vocab,
    pub wordnet: Vocab,
}

impl Default for Vocabularies {
    fn default() -> Self {
        Vocabularies {
            words: Vocab::with_reserved(&[UNK]),
            relations: Vocab::with_reserved(&[UNK, REL_START, REL_END]),
            compose: Vocab::with_reserved(&[DEFAULT_COMPOSE]),
            ner: Vocab::with_reserved(&[UNK]),
            wordnet: Vocab::with_reserved(&[UNK]),
        }
    }
}

impl Vocabularies {
    /// Collect entries from the ADPs of `instances`. Instances whose ADP
    /// cannot be built contribute nothing.
    pub fn build<'a>(instances: impl IntoIterator<Item = &'a Instance>) -> Self {
        let mut v = Vocabularies::default();
        for inst in instances {
            if let Ok(adp) = inst.adp() {
                v.add_adp(&inst.graph, &adp, inst.e1.head, inst.e2.head);
            }
        }
        v
    }

    pub fn add_adp(&mut self, graph: &DependencyGraph, adp: &AugmentedDependencyPath, e1: usize, e2: usize) {
        for (i, &w) in adp.words().iter().enumerate() {
            self.add_word(graph, w);
            for arc in &adp.subtrees[i] {
                self.add_word(graph, arc.dependent);
                self.compose.insert(&arc.label);
            }
        }
        for r in &adp.path.relations {
            self.relations.insert(&r.key());
        }
        for e in [e1, e2] {
            if let Some(t) = graph.token(e) {
                if let Some(n) = &t.ner_tag {
                    self.ner.insert(n);
                }
                if let Some(w) = &t.wn_hypernym {
                    self.wordnet.insert(w);
                }
            }
        }
    }

    fn add_word(&mut self, graph: &DependencyGraph, index: usize) {
        if let Some(t) = graph.token(index) {
            self.words.insert(&t.form);
        }
    }

    pub fn named(&self) -> [(&'static str, &Vocab); 5] {
        [
            ("words", &self.words),
            ("relations", &self.relations),
            ("compose", &self.compose),
            ("ner", &self.ner),
            ("wordnet", &self.wordnet),
        ]
    }
}
