//! Directional scoring with per-type folding, per-type F1 deltas, and
//! nearest-neighbour search over path representations.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

use crate::classifier::{ClassifierError, Model};
use crate::corpus::Instance;
use crate::labels::{Label, RelationType, NUM_LABELS, NUM_TYPES};
use crate::numerics::cosine;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{gold} gold labels but {pred} predictions")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("instance {0} has a zero path representation")]
    ZeroVector(u64),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TypeScore {
    /// Exact directional matches.
    pub correct: usize,
    /// Predictions of either direction of the type.
    pub predicted: usize,
    /// Gold instances of either direction of the type.
    pub gold: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// `confusion[gold][pred]` over label indices.
    pub confusion: [[usize; NUM_LABELS]; NUM_LABELS],
    pub per_type: [TypeScore; NUM_TYPES],
    /// Mean F1 over the nine types; `Other` is left out.
    pub macro_f1: f64,
    pub accuracy: f64,
    pub total: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn score(gold: &[Label], pred: &[Label]) -> Result<EvaluationReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut confusion = [[0usize; NUM_LABELS]; NUM_LABELS];
    for (g, p) in gold.iter().zip(pred) {
        confusion[g.index()][p.index()] += 1;
    }
    let mut per_type = [TypeScore::default(); NUM_TYPES];
    for (t, s) in RelationType::all().zip(per_type.iter_mut()) {
        let labels: Vec<usize> = Label::all()
            .filter(|l| l.relation_type() == Some(t))
            .map(Label::index)
            .collect();
        for &l in &labels {
            s.correct += confusion[l][l];
            s.gold += confusion[l].iter().sum::<usize>();
            s.predicted += confusion.iter().map(|row| row[l]).sum::<usize>();
        }
        s.precision = ratio(s.correct, s.predicted);
        s.recall = ratio(s.correct, s.gold);
        s.f1 = if s.precision + s.recall == 0.0 {
            0.0
        } else {
            2.0 * s.precision * s.recall / (s.precision + s.recall)
        };
    }
    let correct: usize = (0..NUM_LABELS).map(|i| confusion[i][i]).sum();
    Ok(EvaluationReport {
        confusion,
        macro_f1: per_type.iter().map(|s| s.f1).sum::<f64>() / NUM_TYPES as f64,
        per_type,
        accuracy: ratio(correct, gold.len()),
        total: gold.len(),
    })
}

impl EvaluationReport {
    pub fn type_score(&self, t: RelationType) -> &TypeScore {
        &self.per_type[t.index()]
    }

    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{:<20} {:>7} {:>7} {:>7} {:>9} {:>9} {:>9}\n",
            "relation", "correct", "pred", "gold", "precision", "recall", "f1"
        );
        for t in RelationType::all() {
            let s = self.type_score(t);
            let _ = writeln!(
                out,
                "{:<20} {:>7} {:>7} {:>7} {:>9.4} {:>9.4} {:>9.4}",
                t.name(),
                s.correct,
                s.predicted,
                s.gold,
                s.precision,
                s.recall,
                s.f1
            );
        }
        let _ = writeln!(out, "{:<20} {:>9.4}", "macro-F1 (no Other)", self.macro_f1);
        let _ = writeln!(out, "{:<20} {:>9.4}", "accuracy", self.accuracy);
        let _ = writeln!(out, "{:<20} {:>9}", "instances", self.total);
        out
    }

    /// One `name\tvalue` line per metric.
    pub fn render_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "macro_f1\t{:.6}", self.macro_f1);
        let _ = writeln!(out, "accuracy\t{:.6}", self.accuracy);
        let _ = writeln!(out, "instances\t{}", self.total);
        for t in RelationType::all() {
            let s = self.type_score(t);
            let _ = writeln!(out, "precision.{}\t{:.6}", t.name(), s.precision);
            let _ = writeln!(out, "recall.{}\t{:.6}", t.name(), s.recall);
            let _ = writeln!(out, "f1.{}\t{:.6}", t.name(), s.f1);
        }
        out
    }

    /// Confusion matrix with short label names as headers.
    pub fn render_confusion(&self) -> String {
        let short = |l: Label| match (l.relation_type(), l.order()) {
            (Some(t), Some(o)) => {
                let abbr: String = t.name().split('-').filter_map(|w| w.chars().next()).collect();
                format!(
                    "{abbr}-{}",
                    if o == crate::labels::Order::Forward { "12" } else { "21" }
                )
            }
            _ => "_O".to_string(),
        };
        let mut out = format!("{:>6}", "");
        for l in Label::all() {
            let _ = write!(out, " {:>5}", short(l));
        }
        out.push('\n');
        for g in Label::all() {
            let _ = write!(out, "{:>6}", short(g));
            for p in Label::all() {
                let _ = write!(out, " {:>5}", self.confusion[g.index()][p.index()]);
            }
            out.push('\n');
        }
        out
    }
}

/// Per-type `F1(a) − F1(b)`.
pub fn per_relation_delta(a: &EvaluationReport, b: &EvaluationReport) -> [(RelationType, f64); NUM_TYPES] {
    let mut out = [(RelationType::from_index(0).expect("type 0"), 0.0); NUM_TYPES];
    for (t, slot) in RelationType::all().zip(out.iter_mut()) {
        *slot = (t, a.type_score(t).f1 - b.type_score(t).f1);
    }
    out
}

pub fn render_deltas(deltas: &[(RelationType, f64)]) -> String {
    deltas
        .iter()
        .map(|(t, d)| format!("{}\t{:+.3}\n", t.name(), d))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub id: u64,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Neighbors {
    pub ranked: Vec<Neighbor>,
    /// Candidates left out because their representation is zero.
    pub skipped: Vec<u64>,
}

/// Rank `candidates` by cosine similarity to `query`, highest first; equal
/// similarities are ordered by id.
pub fn rank_by_cosine(
    query: (u64, &[f64]),
    candidates: &[(u64, Vec<f64>)],
    top_n: usize,
) -> Result<Neighbors, EvalError> {
    if query.1.iter().all(|&v| v == 0.0) {
        return Err(EvalError::ZeroVector(query.0));
    }
    let mut out = Neighbors::default();
    for (id, v) in candidates {
        match cosine(query.1, v) {
            Some(similarity) => out.ranked.push(Neighbor { id: *id, similarity }),
            None => out.skipped.push(*id),
        }
    }
    out.ranked.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap_or(Ordering::Equal)
            .then(a.id.cmp(&b.id))
    });
    out.ranked.truncate(top_n);
    Ok(out)
}

/// Nearest candidates to `query` under the model's path representation.
pub fn nearest_paths(
    query: &Instance,
    candidates: &[Instance],
    model: &Model,
    top_n: usize,
) -> Result<Neighbors, EvalError> {
    let q = model.predict(query)?.path_repr;
    let reps = candidates
        .iter()
        .map(|c| Ok((c.id, model.predict(c)?.path_repr)))
        .collect::<Result<Vec<_>, ClassifierError>>()?;
    rank_by_cosine((query.id, &q), &reps, top_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::Order;
    use proptest::prelude::*;

    fn l(s: &str) -> Label {
        s.parse().unwrap()
    }

    #[test]
    fn perfect_and_all_other() {
        let gold: Vec<Label> = Label::all().collect();
        let r = score(&gold, &gold).unwrap();
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.accuracy, 1.0);
        let r = score(&gold, &vec![Label::OTHER; gold.len()]).unwrap();
        assert_eq!(r.macro_f1, 0.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            score(&[Label::OTHER], &[]),
            Err(EvalError::LengthMismatch { gold: 1, pred: 0 })
        ));
    }

    #[test]
    fn direction_flip_costs_precision_and_recall() {
        let gold = [l("Cause-Effect(e1,e2)"), l("Cause-Effect(e1,e2)")];
        let pred = [l("Cause-Effect(e1,e2)"), l("Cause-Effect(e2,e1)")];
        let r = score(&gold, &pred).unwrap();
        let ce = r.type_score(RelationType::from_index(0).unwrap());
        assert_eq!((ce.correct, ce.predicted, ce.gold), (1, 2, 2));
        assert_eq!(ce.precision, 0.5);
        assert_eq!(ce.recall, 0.5);
    }

    #[test]
    fn deltas() {
        let gold = [l("Instrument-Agency(e2,e1)"), l("Product-Producer(e1,e2)")];
        let a = score(&gold, &gold).unwrap();
        let b = score(&gold, &[Label::OTHER, gold[1]]).unwrap();
        let d = per_relation_delta(&a, &b);
        assert!(per_relation_delta(&a, &a).iter().all(|(_, x)| *x == 0.0));
        assert_eq!(d[8].1, 1.0);
        assert_eq!(d[3].1, 0.0);
        let text = render_deltas(&[(d[8].0, 0.031), (d[3].0, 0.025)]);
        assert_eq!(text, "Instrument-Agency\t+0.031\nProduct-Producer\t+0.025\n");
    }

    #[test]
    fn ranking() {
        let q = vec![1.0, 2.0, 0.0];
        let cands = vec![
            (5, vec![-1.0, -2.0, 0.0]),
            (3, q.clone()),
            (2, vec![2.0, 4.0, 0.0]),
            (4, vec![0.0, 0.0, 0.0]),
            (1, vec![0.0, 0.0, 1.0]),
        ];
        let n = rank_by_cosine((9, &q), &cands, 10).unwrap();
        let ids: Vec<u64> = n.ranked.iter().map(|x| x.id).collect();
        assert_eq!(ids, vec![2, 3, 1, 5]);
        assert!((n.ranked[0].similarity - 1.0).abs() < 1e-12);
        assert!((n.ranked[3].similarity + 1.0).abs() < 1e-12);
        assert_eq!(n.skipped, vec![4]);
        assert_eq!(rank_by_cosine((9, &q), &cands, 2).unwrap().ranked.len(), 2);
        assert!(matches!(
            rank_by_cosine((7, &[0.0, 0.0]), &cands, 1),
            Err(EvalError::ZeroVector(7))
        ));
    }

    #[test]
    fn renders() {
        let gold: Vec<Label> = Label::all().collect();
        let r = score(&gold, &gold).unwrap();
        assert!(r.render_text().contains("macro-F1 (no Other)"));
        assert!(r.render_tsv().starts_with("macro_f1\t1.000000\n"));
        assert_eq!(r.render_confusion().lines().count(), 20);
    }

    fn label() -> impl Strategy<Value = Label> {
        (0..NUM_LABELS).prop_map(|i| Label::from_index(i).unwrap())
    }

    proptest! {
        #[test]
        fn joint_permutation_invariance(pairs in prop::collection::vec((label(), label()), 0..60), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let (g, p): (Vec<_>, Vec<_>) = pairs.iter().cloned().unzip();
            let a = score(&g, &p).unwrap();
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let (g2, p2): (Vec<_>, Vec<_>) = shuffled.into_iter().unzip();
            let b = score(&g2, &p2).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.confusion.iter().flatten().sum::<usize>(), pairs.len());
            for s in &a.per_type {
                for v in [s.precision, s.recall, s.f1] {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
        }

        #[test]
        fn flipping_direction_keeps_precision_denominator(n in 1usize..10, t in 0usize..NUM_TYPES) {
            let ty = RelationType::from_index(t).unwrap();
            let gold = vec![ty.label(Order::Forward); n];
            let right = score(&gold, &gold).unwrap();
            let flipped = score(&gold, &vec![ty.label(Order::Backward); n]).unwrap();
            prop_assert_eq!(right.type_score(ty).predicted, flipped.type_score(ty).predicted);
            prop_assert_eq!(flipped.type_score(ty).recall, 0.0);
        }

        #[test]
        fn cosine_scale_and_symmetry(v in prop::collection::vec(-5.0f64..5.0, 1..8), w in prop::collection::vec(-5.0f64..5.0, 8), alpha in 0.01f64..100.0) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-3));
            let scaled: Vec<f64> = v.iter().map(|x| x * alpha).collect();
            prop_assert!((cosine(&v, &scaled).unwrap() - 1.0).abs() < 1e-12);
            let w = &w[..v.len()];
            prop_assert_eq!(cosine(&v, w), cosine(w, &v));
        }
    }
}
