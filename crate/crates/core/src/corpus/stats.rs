use std::fmt;

use crate::labels::{Label, RelationType, NUM_TYPES};

/// Label counts with the two directions of each type folded together.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetStats {
    pub total: usize,
    pub other: usize,
    pub per_type: [usize; NUM_TYPES],
}

pub fn dataset_stats<I: IntoIterator<Item = Label>>(labels: I) -> DatasetStats {
    let mut s = DatasetStats::default();
    for label in labels {
        s.total += 1;
        match label.relation_type() {
            Some(t) => s.per_type[t.index()] += 1,
            None => s.other += 1,
        }
    }
    s
}

impl DatasetStats {
    pub fn count(&self, t: RelationType) -> usize {
        self.per_type[t.index()]
    }

    /// Share of `count` in hundredths of a percent, rounded half up.
    pub fn basis_points(&self, count: usize) -> usize {
        if self.total == 0 {
            return 0;
        }
        (count * 20000 + self.total) / (2 * self.total)
    }

    pub fn percent(&self, count: usize) -> String {
        let bp = self.basis_points(count);
        format!("{}.{:02}%", bp / 100, bp % 100)
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in RelationType::all() {
            let c = self.count(t);
            writeln!(f, "{}\t{} ({})", t.name(), c, self.percent(c))?;
        }
        writeln!(f, "Other\t{} ({})", self.other, self.percent(self.other))?;
        writeln!(f, "Total\t{} ({})", self.total, self.percent(self.total))
    }
}
