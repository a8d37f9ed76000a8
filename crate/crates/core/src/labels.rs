//! The 19 directed relation labels: 9 relation types in two directions, plus
//! `Other`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const NUM_LABELS: usize = 19;
pub const NUM_TYPES: usize = 9;

/// Relation types, ordered by training-set frequency.
pub const RELATION_TYPES: [&str; NUM_TYPES] = [
    "Cause-Effect",
    "Component-Whole",
    "Entity-Destination",
    "Product-Producer",
    "Entity-Origin",
    "Member-Collection",
    "Message-Topic",
    "Content-Container",
    "Instrument-Agency",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown relation label {0:?}")]
pub struct UnknownLabel(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    /// `(e1,e2)`
    Forward,
    /// `(e2,e1)`
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationType(u8);

impl RelationType {
    pub fn from_index(i: usize) -> Option<Self> {
        (i < NUM_TYPES).then_some(RelationType(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        RELATION_TYPES[self.index()]
    }

    pub fn all() -> impl Iterator<Item = RelationType> {
        (0..NUM_TYPES as u8).map(RelationType)
    }

    pub fn label(self, order: Order) -> Label {
        Label(1 + 2 * self.0 + matches!(order, Order::Backward) as u8)
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the 19 classes. Index 0 is `Other`; type `t` in order `d`
/// sits at `1 + 2t + d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(u8);

impl Label {
    pub const OTHER: Label = Label(0);

    pub fn from_index(i: usize) -> Option<Self> {
        (i < NUM_LABELS).then_some(Label(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_other(self) -> bool {
        self.0 == 0
    }

    pub fn relation_type(self) -> Option<RelationType> {
        (self.0 > 0).then(|| RelationType((self.0 - 1) / 2))
    }

    pub fn order(self) -> Option<Order> {
        (self.0 > 0).then(|| {
            if (self.0 - 1).is_multiple_of(2) {
                Order::Forward
            } else {
                Order::Backward
            }
        })
    }

    pub fn all() -> impl Iterator<Item = Label> {
        (0..NUM_LABELS as u8).map(Label)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.relation_type(), self.order()) {
            (Some(t), Some(Order::Forward)) => write!(f, "{t}(e1,e2)"),
            (Some(t), Some(Order::Backward)) => write!(f, "{t}(e2,e1)"),
            _ => f.write_str("Other"),
        }
    }
}

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "Other" {
            return Ok(Label::OTHER);
        }
        let (name, order) = if let Some(n) = s.strip_suffix("(e1,e2)") {
            (n, Order::Forward)
        } else if let Some(n) = s.strip_suffix("(e2,e1)") {
            (n, Order::Backward)
        } else {
            return Err(UnknownLabel(s.to_string()));
        };
        RELATION_TYPES
            .iter()
            .position(|t| *t == name)
            .map(|i| RelationType(i as u8).label(order))
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// Fixed label ↔ index mapping.
#[derive(Debug, Clone, Copy, Default)]
pub struct LabelSet;

impl LabelSet {
    pub fn len(&self) -> usize {
        NUM_LABELS
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        Label::all()
    }

    pub fn index_of(&self, label: Label) -> usize {
        label.index()
    }

    pub fn label(&self, index: usize) -> Option<Label> {
        Label::from_index(index)
    }
}
