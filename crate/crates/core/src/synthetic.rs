//! Random trees and small generated corpora for tests, gradient checks and
//! the bundled demo data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adp::{Arc, DependencyGraph, Token};
use crate::corpus::Instance;
use crate::labels::{Label, NUM_LABELS};

const RELATIONS: &[&str] = &["nsubj", "dobj", "amod", "det", "prep_with", "prep_in", "nn", "poss"];
const NER_TAGS: &[&str] = &["O", "PERSON", "LOCATION", "ORGANIZATION"];
const WN_TAGS: &[&str] = &["noun.artifact", "noun.person", "noun.act", "noun.location"];
const NOISE: &[&str] = &["the", "a", "old", "red", "small", "very", "of", "its", "new", "big"];
const ENTITIES: &[&str] = &["box", "man", "city", "tool", "book", "water", "team", "car"];

struct Node {
    form: String,
    head: Option<usize>,
    rel: &'static str,
}

/// Give the nodes random token positions and build the graph.
fn assemble(rng: &mut impl Rng, nodes: &[Node], tag: bool) -> (DependencyGraph, Vec<usize>) {
    let mut perm: Vec<usize> = (1..=nodes.len()).collect();
    perm.shuffle(rng);
    let mut tokens: Vec<Token> = Vec::with_capacity(nodes.len());
    let mut arcs = Vec::with_capacity(nodes.len());
    for (local, node) in nodes.iter().enumerate() {
        let index = perm[local];
        let mut t = Token::new(index, node.form.clone());
        if tag {
            t.ner_tag = Some(NER_TAGS[rng.gen_range(0..NER_TAGS.len())].to_string());
            t.wn_hypernym = Some(WN_TAGS[rng.gen_range(0..WN_TAGS.len())].to_string());
        }
        tokens.push(t);
        let head = node.head.map_or(0, |h| perm[h]);
        let rel = if node.head.is_none() { "root" } else { node.rel };
        arcs.push(Arc::new(head, index, rel));
    }
    tokens.sort_by_key(|t| t.index);
    let graph = DependencyGraph::new(tokens, arcs).expect("generated tree is valid");
    (graph, perm)
}

fn pick<'a>(rng: &mut impl Rng, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

/// Uniform random recursive tree on `n` tokens with shuffled positions.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> DependencyGraph {
    assert!(n > 0);
    let nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            form: format!("w{}", rng.gen_range(0..20)),
            head: (i > 0).then(|| rng.gen_range(0..i)),
            rel: pick(rng, RELATIONS),
        })
        .collect();
    assemble(rng, &nodes, false).0
}

/// A graph together with the two words whose ADP is of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticAdp {
    pub graph: DependencyGraph,
    pub e1: usize,
    pub e2: usize,
}

fn grow_subtree(rng: &mut impl Rng, nodes: &mut Vec<Node>, parent: usize, depth: usize, vocab: &[&str]) {
    if depth == 0 {
        return;
    }
    for _ in 0..rng.gen_range(0..=2) {
        nodes.push(Node {
            form: pick(rng, vocab).to_string(),
            head: Some(parent),
            rel: pick(rng, RELATIONS),
        });
        let child = nodes.len() - 1;
        grow_subtree(rng, nodes, child, depth - 1, vocab);
    }
}

/// Chain `path_forms` into a path whose highest word sits at `top`, then
/// hang random subtrees of depth at most `depth` off every path word.
fn path_nodes(rng: &mut impl Rng, path_forms: &[String], top: usize, depth: usize, vocab: &[&str]) -> Vec<Node> {
    let m = path_forms.len();
    let mut nodes: Vec<Node> = path_forms
        .iter()
        .enumerate()
        .map(|(i, f)| Node {
            form: f.clone(),
            head: match i.cmp(&top) {
                std::cmp::Ordering::Less => Some(i + 1),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(i - 1),
            },
            rel: pick(rng, RELATIONS),
        })
        .collect();
    for w in 0..m {
        grow_subtree(rng, &mut nodes, w, depth, vocab);
    }
    nodes
}

/// Random ADP with a path of 1 to 6 words and subtrees of depth at most 3.
pub fn random_adp(rng: &mut impl Rng) -> SyntheticAdp {
    let m = rng.gen_range(1..=6);
    let forms: Vec<String> = (0..m).map(|_| pick(rng, NOISE).to_string()).collect();
    let top = rng.gen_range(0..m);
    let depth = rng.gen_range(0..=3);
    let nodes = path_nodes(rng, &forms, top, depth, NOISE);
    let (graph, perm) = assemble(rng, &nodes, true);
    SyntheticAdp {
        graph,
        e1: perm[0],
        e2: perm[m - 1],
    }
}

/// Trigger word that identifies a label in the separable corpus.
pub fn trigger_word(label: Label) -> String {
    format!("trigger{}", label.index())
}

/// `n` labelled instances whose middle path word names the label.
/// Labels cycle through all 19 classes.
pub fn separable_corpus(n: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = Label::from_index(i % NUM_LABELS).expect("label index in range");
            let forms = vec![
                pick(&mut rng, ENTITIES).to_string(),
                trigger_word(label),
                pick(&mut rng, ENTITIES).to_string(),
            ];
            let depth = rng.gen_range(0..=2);
            let nodes = path_nodes(&mut rng, &forms, 1, depth, NOISE);
            let (graph, perm) = assemble(&mut rng, &nodes, true);
            let (a, b) = (perm[0], perm[2]);
            Instance::new(i as u64 + 1, graph, (a, a), (b, b), Some(label))
                .expect("single-token spans on distinct words are valid")
        })
        .collect()
}
