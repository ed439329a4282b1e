//! The F+ / F- objectives and the triple-based upper bounds on F+.
//!
//! Every sum runs over index-ascending pairs (or triples), so results are
//! reproducible bit for bit. Parallel sums reduce per-row partials in row
//! order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dendrogram::{Dendrogram, LcaIndex};
use crate::error::{Error, Result};
use crate::kernels::monotone_1d_check;
use crate::points::is_sorted_ascending;
use crate::similarity::SimilarityView;

fn check_match(tree: &Dendrogram, sim: &SimilarityView<'_>) -> Result<()> {
    if tree.n() != sim.n() {
        return Err(Error::invalid(format!(
            "tree has {} leaves but the similarity covers {} points",
            tree.n(),
            sim.n()
        )));
    }
    Ok(())
}

/// `(F+, F-)` in one O(n^2) pass.
pub fn pair_objectives(tree: &Dendrogram, sim: &SimilarityView<'_>) -> Result<(f64, f64)> {
    check_match(tree, sim)?;
    sim.require_quadratic("objective evaluation")?;
    let n = tree.n();
    let mut sizes = vec![0usize; n];
    let (mut plus, mut minus) = (0.0, 0.0);
    for i in 0..n {
        tree.lca_sizes_from(i, &mut sizes);
        for j in i + 1..n {
            let w = sim.weight(i, j);
            plus += w * (n - sizes[j]) as f64;
            minus += w * sizes[j] as f64;
        }
    }
    Ok((plus, minus))
}

/// `F+(T) = sum_{i<j} w_ij (n - |T(i,j)|)`.
pub fn f_plus(tree: &Dendrogram, sim: &SimilarityView<'_>) -> Result<f64> {
    pair_objectives(tree, sim).map(|(p, _)| p)
}

/// `F-(T) = sum_{i<j} w_ij |T(i,j)|`.
pub fn f_minus(tree: &Dendrogram, sim: &SimilarityView<'_>) -> Result<f64> {
    pair_objectives(tree, sim).map(|(_, m)| m)
}

/// F+ as a sum over triples: each triple scores the weight of the pair that
/// stays together when the third element is split off. O(n^3).
pub fn f_plus_triplewise(tree: &Dendrogram, sim: &SimilarityView<'_>) -> Result<f64> {
    check_match(tree, sim)?;
    sim.require_cubic("f_plus_triplewise")?;
    let n = tree.n();
    let lca = LcaIndex::new(tree);
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in i + 1..n {
                for k in j + 1..n {
                    s += match lca.first_separated(i, j, k) {
                        x if x == k => sim.weight(i, j),
                        x if x == i => sim.weight(j, k),
                        _ => sim.weight(i, k),
                    };
                }
            }
            s
        })
        .collect();
    Ok(rows.iter().sum())
}

/// `MAX-upper = sum_{i<j<k} max(w_ij, w_jk, w_ik)`, an upper bound on F+
/// of every tree. Returns 0 (with a warning) below three points.
pub fn max_upper(sim: &SimilarityView<'_>) -> Result<f64> {
    let n = sim.n();
    if n < 3 {
        log::warn!("MAX-upper on {n} points has no triples; returning 0");
        return Ok(0.0);
    }
    sim.require_cubic("MAX-upper")?;
    let dense;
    let sim = if sim.is_dense() {
        sim
    } else {
        dense = sim.materialize()?;
        &dense
    };
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in i + 1..n {
                let wij = sim.weight(i, j);
                for k in j + 1..n {
                    s += wij.max(sim.weight(j, k)).max(sim.weight(i, k));
                }
            }
            s
        })
        .collect();
    Ok(rows.iter().sum())
}

/// The two one-dimensional bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneDBounds {
    /// `sum_{i<j<k} (w_ij + w_jk)`
    pub sum_upper: f64,
    /// `sum_{i<j<k} max(w_ij, w_jk)`
    pub max_upper: f64,
}

/// 1D-SUM-upper and 1D-MAX-upper in O(n^2) for a view whose index order is
/// the sorted order of 1D data under a monotone distance-based kernel.
///
/// Regrouping by pair: `w_ab` (a < b) is the left edge of `n - 1 - b`
/// triples and the right edge of `a` triples, which gives the sum bound.
/// For the max bound fix the middle index `j`: under monotonicity the left
/// weights `w_ij` increase with `i` and the right weights `w_jk` decrease
/// with `k`, so `sum max(w_ij, w_jk)` over all `(i, k)` is a linear merge of
/// two sorted lists.
pub fn one_d_bounds(sim: &SimilarityView<'_>) -> Result<OneDBounds> {
    if let Some(points) = sim.points() {
        if !is_sorted_ascending(points.coords_1d()?) {
            return Err(Error::invalid("1D bounds need points sorted ascending"));
        }
    }
    if !monotone_1d_check(sim)? {
        return Err(Error::invalid(
            "1D bounds need a monotone distance-based similarity in sorted order",
        ));
    }
    let n = sim.n();
    let mut sum_upper = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            sum_upper += sim.weight(a, b) * ((n - 1 - b) + a) as f64;
        }
    }

    let mut max_upper = 0.0;
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut right_prefix = Vec::with_capacity(n + 1);
    for j in 1..n.saturating_sub(1) {
        left.clear();
        left.extend((0..j).map(|i| sim.weight(i, j)));
        right.clear();
        right.extend((j + 1..n).rev().map(|k| sim.weight(j, k)));
        right_prefix.clear();
        right_prefix.push(0.0);
        let mut acc = 0.0;
        for &b in &right {
            acc += b;
            right_prefix.push(acc);
        }
        let total_right = acc;
        // For each a, right values <= a contribute a, the rest themselves.
        let mut p = 0;
        for &a in &left {
            while p < right.len() && right[p] <= a {
                p += 1;
            }
            max_upper += a * p as f64 + (total_right - right_prefix[p]);
        }
    }
    Ok(OneDBounds {
        sum_upper,
        max_upper,
    })
}

/// The potential of a partition of sorted 1D data into intervals:
/// `sum (w_ij + w_jk)` over triples `i < j < k` lying in three different
/// parts. O(n^2) by the same per-pair regrouping as [`one_d_bounds`].
pub fn potential_phi(partition: &[Vec<usize>], sim: &SimilarityView<'_>) -> Result<f64> {
    let n = sim.n();
    let mut block = vec![usize::MAX; n];
    let mut spans = Vec::with_capacity(partition.len());
    for (b, set) in partition.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::invalid(format!("part {b} is empty")));
        }
        for &x in set {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, n });
            }
            if block[x] != usize::MAX {
                return Err(Error::invalid(format!("index {x} appears in two parts")));
            }
            block[x] = b;
        }
        let lo = *set.iter().min().unwrap();
        let hi = *set.iter().max().unwrap();
        if hi - lo + 1 != set.len() {
            return Err(Error::invalid(format!(
                "part {b} is not an interval of the sorted order"
            )));
        }
        spans.push((lo, hi + 1));
    }
    if let Some(x) = block.iter().position(|&b| b == usize::MAX) {
        return Err(Error::invalid(format!("index {x} is in no part")));
    }
    sim.require_quadratic("potential_phi")?;
    let mut phi = 0.0;
    for a in 0..n {
        let before = spans[block[a]].0;
        for b in a + 1..n {
            if block[a] == block[b] {
                continue;
            }
            let after = n - spans[block[b]].1;
            phi += sim.weight(a, b) * (before + after) as f64;
        }
    }
    Ok(phi)
}

/// Which upper bound a report entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    MaxUpper,
    OneDMaxUpper,
    OneDSumUpper,
}

impl Bound {
    pub fn name(self) -> &'static str {
        match self {
            Bound::MaxUpper => "MAX-upper",
            Bound::OneDMaxUpper => "1D-MAX-upper",
            Bound::OneDSumUpper => "1D-SUM-upper",
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Objective values of one tree together with whichever bounds were
/// computed and F+ divided by each of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveReport {
    pub f_plus: f64,
    pub f_minus: Option<f64>,
    pub bounds: BTreeMap<Bound, f64>,
    pub ratios: BTreeMap<Bound, f64>,
}

impl ObjectiveReport {
    pub fn new(f_plus: f64, f_minus: Option<f64>) -> Self {
        ObjectiveReport {
            f_plus,
            f_minus,
            bounds: BTreeMap::new(),
            ratios: BTreeMap::new(),
        }
    }

    /// Evaluates F+ and F- of `tree`.
    pub fn evaluate(tree: &Dendrogram, sim: &SimilarityView<'_>) -> Result<Self> {
        let (plus, minus) = pair_objectives(tree, sim)?;
        Ok(Self::new(plus, Some(minus)))
    }

    pub fn add_bound(&mut self, bound: Bound, value: f64) {
        self.bounds.insert(bound, value);
        let ratio = if value > 0.0 { self.f_plus / value } else { f64::NAN };
        self.ratios.insert(bound, ratio);
    }

    /// `F+ <= MAX-upper` and `F+ <= 1D-MAX-upper <= 1D-SUM-upper` for the
    /// bounds present, up to relative tolerance `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let le = |a: f64, b: f64| a <= b + tol * b.abs().max(a.abs());
        let get = |b| self.bounds.get(&b).copied();
        let max_ok = get(Bound::MaxUpper).is_none_or(|m| le(self.f_plus, m));
        let one_d_ok = match (get(Bound::OneDMaxUpper), get(Bound::OneDSumUpper)) {
            (Some(m), Some(s)) => le(self.f_plus, m) && le(m, s),
            (Some(m), None) => le(self.f_plus, m),
            (None, Some(s)) => le(self.f_plus, s),
            (None, None) => true,
        };
        max_ok && one_d_ok
    }
}
