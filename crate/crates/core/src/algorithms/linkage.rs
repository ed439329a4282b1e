//! Agglomerative clustering under average and single linkage.
//!
//! Clusters are named by their smallest point index. Each step merges the
//! pair with the highest linkage score; ties go to the lexicographically
//! smallest `(name, name)` pair. The engine keeps, for every cluster, its
//! best partner (highest score, smallest name on ties) and only rescans the
//! rows whose cached partner disappeared, which is O(n^2) per run on typical
//! data and O(n^3) in the worst case. [`agglomerate_naive`] rescans every
//! pair at every step and serves as the reference in tests.

use super::{AlgorithmTrace, MergeStep};
use crate::dendrogram::{Dendrogram, TreeBuilder};
use crate::error::{Error, Result};
use crate::objectives::potential_phi;
use crate::similarity::SimilarityView;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    /// Merge maximising `w_AB / (|A| |B|)`.
    Average,
    /// Merge maximising `max_{i in A, j in B} w_ij`.
    Single,
}

/// Condensed strictly-upper-triangular matrix.
struct Tri {
    n: usize,
    data: Vec<f64>,
}

impl Tri {
    fn from_sim(sim: &SimilarityView<'_>) -> Self {
        let n = sim.n();
        let mut data = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                data.push(sim.weight(i, j));
            }
        }
        Tri { n, data }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }
}

#[derive(Clone, Copy)]
struct Best {
    score: f64,
    partner: usize,
}

struct Engine<'s, 'a> {
    sim: &'s SimilarityView<'a>,
    linkage: Linkage,
    /// Average: total cross weight. Single: largest cross weight.
    link: Tri,
    size: Vec<usize>,
    active: Vec<bool>,
    members: Vec<Vec<usize>>,
    best: Vec<Best>,
}

impl Engine<'_, '_> {
    #[inline]
    fn score(&self, a: usize, c: usize) -> f64 {
        let v = self.link.get(a, c);
        match self.linkage {
            Linkage::Average => v / (self.size[a] as f64 * self.size[c] as f64),
            Linkage::Single => v,
        }
    }

    fn rescan(&mut self, a: usize) {
        let mut best = Best {
            score: f64::NEG_INFINITY,
            partner: usize::MAX,
        };
        for c in 0..self.size.len() {
            if c != a && self.active[c] {
                let s = self.score(a, c);
                if s > best.score {
                    best = Best { score: s, partner: c };
                }
            }
        }
        self.best[a] = best;
    }

    fn cross_weight(&self, a: usize, b: usize) -> f64 {
        match self.linkage {
            Linkage::Average => self.link.get(a, b),
            Linkage::Single => {
                let mut w = 0.0;
                for &i in &self.members[a] {
                    for &j in &self.members[b] {
                        w += self.sim.weight(i, j);
                    }
                }
                w
            }
        }
    }
}

/// Runs the agglomeration; returns the tree and its merge trace.
pub fn agglomerate(
    sim: &SimilarityView<'_>,
    linkage: Linkage,
) -> Result<(Dendrogram, AlgorithmTrace)> {
    let n = sim.n();
    sim.require_quadratic(match linkage {
        Linkage::Average => "average_linkage",
        Linkage::Single => "single_linkage",
    })?;
    if n == 1 {
        return Ok((Dendrogram::singleton(), AlgorithmTrace { n, ..Default::default() }));
    }
    let mut e = Engine {
        sim,
        linkage,
        link: Tri::from_sim(sim),
        size: vec![1; n],
        active: vec![true; n],
        members: match linkage {
            Linkage::Single => (0..n).map(|p| vec![p]).collect(),
            Linkage::Average => Vec::new(),
        },
        best: vec![
            Best {
                score: f64::NEG_INFINITY,
                partner: usize::MAX
            };
            n
        ],
    };
    for a in 0..n {
        e.rescan(a);
    }
    let mut builder = TreeBuilder::with_leaves(n);
    let mut node: Vec<usize> = (0..n).map(|p| builder.leaf(p)).collect();
    let mut trace = AlgorithmTrace {
        n,
        merges: Vec::with_capacity(n - 1),
        ..Default::default()
    };

    for _ in 0..n - 1 {
        // Highest score; ties to the smallest (low, high) name pair.
        let mut pick: Option<(f64, usize, usize)> = None;
        for a in 0..n {
            if !e.active[a] {
                continue;
            }
            let Best { score, partner } = e.best[a];
            let (lo, hi) = (a.min(partner), a.max(partner));
            let better = match pick {
                None => true,
                Some((s, l, h)) => score > s || (score == s && (lo, hi) < (l, h)),
            };
            if better {
                pick = Some((score, lo, hi));
            }
        }
        let (_, a, b) = pick.expect("two or more clusters remain");

        let weight = e.cross_weight(a, b);
        let (size_a, size_b) = (e.size[a], e.size[b]);
        trace.merges.push(MergeStep {
            a,
            b,
            size_a,
            size_b,
            weight,
            score: weight * (n - size_a - size_b) as f64,
        });

        for c in 0..n {
            if c != a && c != b && e.active[c] {
                let (x, y) = (e.link.get(a, c), e.link.get(b, c));
                let merged = match linkage {
                    Linkage::Average => x + y,
                    Linkage::Single => x.max(y),
                };
                e.link.set(a, c, merged);
            }
        }
        e.size[a] += size_b;
        e.active[b] = false;
        if linkage == Linkage::Single {
            let moved = std::mem::take(&mut e.members[b]);
            e.members[a].extend(moved);
        }
        node[a] = builder.join(node[a], node[b]);

        e.rescan(a);
        for c in 0..n {
            if c == a || !e.active[c] {
                continue;
            }
            let partner = e.best[c].partner;
            if partner == a || partner == b {
                e.rescan(c);
            } else {
                let s = e.score(c, a);
                let cur = e.best[c];
                if s > cur.score || (s == cur.score && a < cur.partner) {
                    e.best[c] = Best { score: s, partner: a };
                }
            }
        }
    }
    Ok((builder.build(node[0])?, trace))
}

/// Reference implementation: recomputes every linkage value from the
/// member lists at every step. O(n^3) or worse; for tests and small inputs.
pub fn agglomerate_naive(
    sim: &SimilarityView<'_>,
    linkage: Linkage,
) -> Result<(Dendrogram, AlgorithmTrace)> {
    let n = sim.n();
    let mut clusters: Vec<Option<Vec<usize>>> = (0..n).map(|p| Some(vec![p])).collect();
    let mut builder = TreeBuilder::with_leaves(n);
    let mut node: Vec<usize> = (0..n).map(|p| builder.leaf(p)).collect();
    let mut trace = AlgorithmTrace { n, ..Default::default() };
    for _ in 1..n {
        let mut pick: Option<(f64, usize, usize, f64)> = None;
        for a in 0..n {
            let Some(ca) = &clusters[a] else { continue };
            for b in a + 1..n {
                let Some(cb) = &clusters[b] else { continue };
                let mut total = 0.0;
                let mut strongest = f64::NEG_INFINITY;
                for &i in ca {
                    for &j in cb {
                        let w = sim.weight(i, j);
                        total += w;
                        strongest = strongest.max(w);
                    }
                }
                let score = match linkage {
                    Linkage::Average => total / (ca.len() as f64 * cb.len() as f64),
                    Linkage::Single => strongest,
                };
                // Pairs are visited in increasing (a, b) order, so only a
                // strictly higher score replaces the current pick.
                if pick.is_none_or(|(s, ..)| score > s) {
                    pick = Some((score, a, b, total));
                }
            }
        }
        let (_, a, b, total) = pick.ok_or_else(|| Error::invalid("no pair to merge"))?;
        let cb = clusters[b].take().unwrap();
        let ca = clusters[a].as_mut().unwrap();
        trace.merges.push(MergeStep {
            a,
            b,
            size_a: ca.len(),
            size_b: cb.len(),
            weight: total,
            score: total * (n - ca.len() - cb.len()) as f64,
        });
        ca.extend(cb);
        node[a] = builder.join(node[a], node[b]);
    }
    Ok((builder.build(node[0])?, trace))
}

/// Average linkage with its merge trace.
pub fn average_linkage(sim: &SimilarityView<'_>) -> Result<(Dendrogram, AlgorithmTrace)> {
    agglomerate(sim, Linkage::Average)
}

pub fn single_linkage(sim: &SimilarityView<'_>) -> Result<Dendrogram> {
    agglomerate(sim, Linkage::Single).map(|(t, _)| t)
}

/// Score gained and potential change at one merge of a 1D run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeProgress {
    pub d_score: f64,
    pub d_phi: f64,
    /// Whether the merged clusters were neighbours in sorted order.
    pub adjacent: bool,
}

/// Replays a merge trace over sorted 1D data and evaluates the potential of
/// the cluster partition before and after every merge.
///
/// Fails if some cluster stops being an interval of the sorted order, since
/// the potential is only defined for interval partitions.
pub fn merge_progress(
    trace: &AlgorithmTrace,
    sim: &SimilarityView<'_>,
) -> Result<Vec<MergeProgress>> {
    let n = trace.n;
    if sim.n() != n {
        return Err(Error::invalid("trace and similarity sizes differ"));
    }
    let mut parts: Vec<Option<Vec<usize>>> = (0..n).map(|p| Some(vec![p])).collect();
    let current = |parts: &[Option<Vec<usize>>]| -> Vec<Vec<usize>> {
        parts.iter().flatten().cloned().collect()
    };
    let mut phi = potential_phi(&current(&parts), sim)?;
    let mut out = Vec::with_capacity(trace.merges.len());
    for m in &trace.merges {
        let b = parts[m.b].take().ok_or_else(|| Error::invalid("merge of a dead cluster"))?;
        let a = parts[m.a].as_mut().ok_or_else(|| Error::invalid("merge of a dead cluster"))?;
        let (a_lo, a_hi) = (*a.iter().min().unwrap(), *a.iter().max().unwrap());
        let (b_lo, b_hi) = (*b.iter().min().unwrap(), *b.iter().max().unwrap());
        let adjacent = a_hi + 1 == b_lo || b_hi + 1 == a_lo;
        a.extend(b);
        let next = potential_phi(&current(&parts), sim)?;
        out.push(MergeProgress {
            d_score: m.score,
            d_phi: next - phi,
            adjacent,
        });
        phi = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Kernel;
    use crate::objectives::f_plus;
    use crate::points::PointSet;
    use crate::similarity::WeightMatrix;
    use crate::tree_io::to_newick;
    use crate::Seed;
    use rand::Rng;

    #[test]
    fn two_points() {
        let sim = SimilarityView::dense(WeightMatrix::from_fn(2, |_, _| 0.3));
        let (t, trace) = average_linkage(&sim).unwrap();
        assert_eq!(to_newick(&t), "(0,1);");
        assert_eq!(trace.merges.len(), 1);
        assert_eq!(trace.merges[0].score, 0.0);
        assert_eq!(to_newick(&single_linkage(&sim).unwrap()), "(0,1);");
    }

    #[test]
    fn single_point() {
        let sim = SimilarityView::dense(WeightMatrix::from_fn(1, |_, _| 0.0));
        assert_eq!(average_linkage(&sim).unwrap().0.n(), 1);
    }

    #[test]
    fn ties_merge_the_smallest_pair_first() {
        let sim = SimilarityView::dense(WeightMatrix::from_fn(4, |_, _| 0.5));
        let (t, trace) = average_linkage(&sim).unwrap();
        assert_eq!((trace.merges[0].a, trace.merges[0].b), (0, 1));
        assert_eq!(to_newick(&t), "(((0,1),2),3);");
        assert_eq!(t, agglomerate_naive(&sim, Linkage::Average).unwrap().0);
    }

    #[test]
    fn trace_scores_sum_to_f_plus() {
        let mut rng = Seed(12).rng();
        let sim = SimilarityView::dense(WeightMatrix::from_fn(15, |_, _| rng.random::<f64>()));
        for linkage in [Linkage::Average, Linkage::Single] {
            let (t, trace) = agglomerate(&sim, linkage).unwrap();
            let fp = f_plus(&t, &sim).unwrap();
            assert!((trace.total_score() - fp).abs() <= 1e-12 * fp);
            assert_eq!(trace.replay().unwrap(), t);
            let members = trace.merge_members();
            assert_eq!(members.last().unwrap().0.len() + members.last().unwrap().1.len(), 15);
        }
    }

    #[test]
    fn engine_matches_naive_reference() {
        for seed in 0..30u64 {
            let mut rng = Seed(seed).rng();
            let n = rng.random_range(2..25);
            let d = rng.random_range(1..4);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let pts = PointSet::from_rows(&rows).unwrap();
            let sim = SimilarityView::lazy(&pts, Kernel::gaussian(1.0).unwrap());
            for linkage in [Linkage::Average, Linkage::Single] {
                let (fast, ft) = agglomerate(&sim, linkage).unwrap();
                let (slow, st) = agglomerate_naive(&sim, linkage).unwrap();
                assert_eq!(fast, slow, "seed {seed} {linkage:?}");
                for (x, y) in ft.merges.iter().zip(&st.merges) {
                    assert_eq!((x.a, x.b, x.size_a, x.size_b), (y.a, y.b, y.size_a, y.size_b));
                }
            }
        }
    }

    #[test]
    fn single_linkage_merges_gaps_in_increasing_length() {
        let xs = [0.0, 0.5, 2.0, 2.2, 5.0, 5.9];
        let pts = PointSet::from_1d(&xs).unwrap();
        let sim = SimilarityView::lazy(&pts, Kernel::gaussian(1.0).unwrap());
        let (_, trace) = agglomerate(&sim, Linkage::Single).unwrap();
        // Gaps by length: (2,3)=0.2 (0,1)=0.5 (4,5)=0.9 (1,2)=1.5 (3,4)=2.8.
        let order: Vec<(usize, usize)> = trace.merges.iter().map(|m| (m.a, m.b)).collect();
        assert_eq!(order, vec![(2, 3), (0, 1), (4, 5), (0, 2), (0, 4)]);
    }

    #[test]
    fn refuses_oversize() {
        let pts = PointSet::from_1d(&[0.0, 1.0, 2.0]).unwrap();
        let sim = SimilarityView::lazy(&pts, Kernel::gaussian(1.0).unwrap()).with_limits(crate::Limits {
            materialize: 2,
            ..Default::default()
        });
        assert!(matches!(average_linkage(&sim), Err(Error::Refused { .. })));
        assert!(matches!(single_linkage(&sim), Err(Error::Refused { .. })));
    }
}
