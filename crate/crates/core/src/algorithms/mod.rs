//! Clustering algorithms. Divisive ones (random cut, projected random cut,
//! greedy cut) split intervals of sorted 1D data; agglomerative ones
//! (average and single linkage) merge clusters bottom-up.

mod divisive;
mod linkage;
mod monte_carlo;

pub use divisive::{greedy_cut, projected_random_cut, projected_random_cut_traced, random_cut, random_cut_traced};
pub use linkage::{
    agglomerate, agglomerate_naive, average_linkage, merge_progress, single_linkage, Linkage,
    MergeProgress,
};
pub use monte_carlo::{expected_f_plus, Estimate, Randomized};

use serde::{Deserialize, Serialize};

use crate::dendrogram::{Dendrogram, TreeBuilder};
use crate::error::{Error, Result};

/// One agglomerative step. Clusters are named by their smallest point
/// index, so `a < b` and the merged cluster keeps the name `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub a: usize,
    pub b: usize,
    pub size_a: usize,
    pub size_b: usize,
    /// `w_AB`, the total weight between the two clusters.
    pub weight: f64,
    /// F+ gained by this merge, `w_AB * (n - |A| - |B|)`.
    pub score: f64,
}

/// One divisive step: positions `lo..hi` of the sorted order are split into
/// `lo..cut` and `cut..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStep {
    pub lo: usize,
    pub hi: usize,
    pub cut: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Merge(MergeStep),
    Split(SplitStep),
}

/// What an algorithm did, step by step. Replaying it rebuilds the tree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlgorithmTrace {
    pub n: usize,
    pub merges: Vec<MergeStep>,
    /// Splits in preorder (parent before children, left before right).
    pub splits: Vec<SplitStep>,
    /// For divisive runs, the point at each sorted position.
    pub order: Vec<usize>,
}

impl AlgorithmTrace {
    /// Sum of the per-merge scores.
    pub fn total_score(&self) -> f64 {
        self.merges.iter().map(|m| m.score).sum()
    }

    pub fn events(&self) -> impl Iterator<Item = TraceEvent> + '_ {
        self.merges
            .iter()
            .copied()
            .map(TraceEvent::Merge)
            .chain(self.splits.iter().copied().map(TraceEvent::Split))
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for event in self.events() {
            out.push_str(&serde_json::to_string(&event).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }

    /// Rebuilds the tree from the recorded steps alone.
    pub fn replay(&self) -> Result<Dendrogram> {
        if self.n == 1 {
            return Ok(Dendrogram::singleton());
        }
        if !self.merges.is_empty() {
            let mut b = TreeBuilder::with_leaves(self.n);
            let mut node: Vec<usize> = (0..self.n).map(|p| b.leaf(p)).collect();
            for m in &self.merges {
                if m.a >= self.n || m.b >= self.n {
                    return Err(Error::invalid("merge names an unknown cluster"));
                }
                node[m.a] = b.join(node[m.a], node[m.b]);
            }
            return b.build(node[0]);
        }
        if self.order.len() != self.n {
            return Err(Error::invalid("divisive trace without a leaf order"));
        }
        let mut splits = self.splits.iter();
        let (tree, _) = divisive::build_divisive(&self.order, |lo, hi| {
            let s = splits.next().ok_or_else(|| Error::invalid("trace ran out of splits"))?;
            if (s.lo, s.hi) != (lo, hi) {
                return Err(Error::invalid("trace splits are not in preorder"));
            }
            Ok(s.cut)
        })?;
        Ok(tree)
    }

    /// Member lists of the two clusters joined at each merge.
    pub fn merge_members(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut members: Vec<Vec<usize>> = (0..self.n).map(|p| vec![p]).collect();
        let mut out = Vec::with_capacity(self.merges.len());
        for m in &self.merges {
            let b = std::mem::take(&mut members[m.b]);
            out.push((members[m.a].clone(), b.clone()));
            members[m.a].extend(b);
        }
        out
    }
}
