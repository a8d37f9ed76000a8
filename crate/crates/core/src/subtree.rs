//! Recursive encoding of the subtree attached to each path word.
//!
//! For a word `w` with attached children `q`:
//!
//! ```text
//! c_w = tanh(Σ_q W_R(w,q) · p_q + b)      (c_w = c_LEAF when w has no children)
//! p_w = [x_w, c_w]
//! ```

use std::collections::BTreeMap;

use crate::adp::Arc;
use crate::numerics::{axpy, gemv_acc, gemv_t_acc, outer_acc, ParamId, ParameterStore};

#[derive(Debug, Clone, Copy)]
pub struct SubtreeParams {
    pub word_embeddings: ParamId,
    pub bias: ParamId,
    pub leaf: ParamId,
    pub dim: usize,
    pub dim_c: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubtreeNode {
    /// Row in the word embedding table.
    pub word: usize,
    /// Composition matrix for the arc to this node's parent; `None` at the
    /// path word.
    pub compose: Option<ParamId>,
    /// Indices of child nodes, in ascending token order.
    pub children: Vec<usize>,
}

/// A path word and its attached subtree in post-order: children precede
/// their parent and the last node is the path word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordTree {
    pub nodes: Vec<SubtreeNode>,
}

impl WordTree {
    pub fn leaf(word: usize) -> Self {
        WordTree {
            nodes: vec![SubtreeNode {
                word,
                compose: None,
                children: Vec::new(),
            }],
        }
    }

    /// Build from the attached-subtree arcs of `root`.
    pub fn from_arcs(
        root: usize,
        arcs: &[Arc],
        word_row: impl Fn(usize) -> usize,
        compose: impl Fn(&str) -> ParamId,
    ) -> Self {
        let mut kids: BTreeMap<usize, Vec<(usize, &str)>> = BTreeMap::new();
        for a in arcs {
            kids.entry(a.head).or_default().push((a.dependent, &a.label));
        }
        for v in kids.values_mut() {
            v.sort_unstable();
        }

        fn visit(
            token: usize,
            label: Option<&str>,
            kids: &BTreeMap<usize, Vec<(usize, &str)>>,
            word_row: &dyn Fn(usize) -> usize,
            compose: &dyn Fn(&str) -> ParamId,
            out: &mut Vec<SubtreeNode>,
        ) -> usize {
            let children = kids
                .get(&token)
                .map(|v| {
                    v.iter()
                        .map(|&(d, l)| visit(d, Some(l), kids, word_row, compose, out))
                        .collect()
                })
                .unwrap_or_default();
            out.push(SubtreeNode {
                word: word_row(token),
                compose: label.map(compose),
                children,
            });
            out.len() - 1
        }

        let mut nodes = Vec::with_capacity(arcs.len() + 1);
        visit(root, None, &kids, &word_row, &compose, &mut nodes);
        WordTree { nodes }
    }

    pub fn root(&self) -> &SubtreeNode {
        self.nodes.last().expect("a word tree has at least its root")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Forward cache for one [`WordTree`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubtreeEncoding {
    /// `p` per node, `dim + dim_c` each.
    pub p: Vec<Vec<f64>>,
    /// Word-embedding rows read while encoding.
    pub word_reads: usize,
}

impl SubtreeEncoding {
    pub fn root(&self) -> &[f64] {
        self.p.last().expect("non-empty encoding")
    }

    /// Subtree part of node `i`'s representation.
    pub fn c(&self, i: usize, dim: usize) -> &[f64] {
        &self.p[i][dim..]
    }
}

/// Representation of a path word with its subtree ignored: `[x_w, c_LEAF]`.
pub fn leaf_representation(params: &SubtreeParams, store: &ParameterStore, word: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(params.dim + params.dim_c);
    p.extend_from_slice(store.row(params.word_embeddings, word));
    p.extend_from_slice(store.value(params.leaf).data());
    p
}

pub fn encode(params: &SubtreeParams, store: &ParameterStore, tree: &WordTree) -> SubtreeEncoding {
    let mut p: Vec<Vec<f64>> = Vec::with_capacity(tree.len());
    for node in &tree.nodes {
        let mut rep = Vec::with_capacity(params.dim + params.dim_c);
        rep.extend_from_slice(store.row(params.word_embeddings, node.word));
        if node.children.is_empty() {
            rep.extend_from_slice(store.value(params.leaf).data());
        } else {
            let mut z = store.value(params.bias).data().to_vec();
            for &ch in &node.children {
                let w = tree.nodes[ch].compose.expect("child nodes carry a relation");
                gemv_acc(&mut z, store.value(w).data(), &p[ch]);
            }
            rep.extend(z.into_iter().map(f64::tanh));
        }
        p.push(rep);
    }
    SubtreeEncoding { word_reads: p.len(), p }
}

/// Backpropagate `upstream` (gradient on the path word's `p`) through the
/// subtree, accumulating into the store's gradient buffers.
pub fn encode_backward(
    params: &SubtreeParams,
    store: &mut ParameterStore,
    tree: &WordTree,
    encoding: &SubtreeEncoding,
    upstream: &[f64],
) {
    let dim = params.dim;
    let n = tree.len();
    let mut dp: Vec<Vec<f64>> = vec![vec![0.0; dim + params.dim_c]; n];
    dp[n - 1].copy_from_slice(upstream);

    for i in (0..n).rev() {
        let node = &tree.nodes[i];
        let g = std::mem::take(&mut dp[i]);
        axpy(store.grad_row_mut(params.word_embeddings, node.word), 1.0, &g[..dim]);
        let dc = &g[dim..];
        if node.children.is_empty() {
            axpy(store.grad_mut(params.leaf), 1.0, dc);
            continue;
        }
        let dz: Vec<f64> = dc
            .iter()
            .zip(encoding.c(i, dim))
            .map(|(d, c)| d * (1.0 - c * c))
            .collect();
        axpy(store.grad_mut(params.bias), 1.0, &dz);
        for &ch in &node.children {
            let w = tree.nodes[ch].compose.expect("child nodes carry a relation");
            gemv_t_acc(&mut dp[ch], store.value(w).data(), &dz);
            outer_acc(store.grad_mut(w), &dz, &encoding.p[ch]);
        }
    }
}
