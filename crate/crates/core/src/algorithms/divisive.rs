use rand::Rng;
use rand_distr::StandardNormal;

use super::{AlgorithmTrace, SplitStep};
use crate::dendrogram::{Dendrogram, TreeBuilder};
use crate::error::{Error, Result};
use crate::points::{dot, is_sorted_ascending, PointSet};
use crate::seed::Seed;

/// Top-down construction over sorted positions `0..labels.len()`.
///
/// `choose(lo, hi)` returns the cut for the interval `lo..hi` (with
/// `hi - lo >= 2`); it is called in preorder, left subtree first. Leaf `p`
/// of the result is `labels[p]`.
pub(super) fn build_divisive(
    labels: &[usize],
    mut choose: impl FnMut(usize, usize) -> Result<usize>,
) -> Result<(Dendrogram, Vec<SplitStep>)> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::invalid("cannot cluster zero points"));
    }
    enum Event {
        Leaf(usize),
        Split,
    }
    let mut events = Vec::with_capacity(2 * n - 1);
    let mut splits = Vec::with_capacity(n - 1);
    let mut stack = vec![(0usize, n)];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo == 1 {
            events.push(Event::Leaf(lo));
            continue;
        }
        let cut = choose(lo, hi)?;
        if cut <= lo || cut >= hi {
            return Err(Error::invalid(format!("cut {cut} does not split {lo}..{hi}")));
        }
        events.push(Event::Split);
        splits.push(SplitStep { lo, hi, cut });
        stack.push((cut, hi));
        stack.push((lo, cut));
    }
    // Reverse preorder finishes both subtrees before their parent; the
    // left subtree ends up on top of the stack.
    let mut builder = TreeBuilder::with_leaves(n);
    let mut done = Vec::new();
    for event in events.iter().rev() {
        let id = match *event {
            Event::Leaf(p) => builder.leaf(labels[p]),
            Event::Split => {
                let left = done.pop().expect("left subtree built");
                let right = done.pop().expect("right subtree built");
                builder.join(left, right)
            }
        };
        done.push(id);
    }
    let root = done.pop().expect("root built");
    Ok((builder.build(root)?, splits))
}

/// The cut for `xs[lo..hi]`: `r` uniform on `[xs[lo], xs[hi-1]]`, left part
/// every point `<= r`. If all points in the interval coincide no `r`
/// separates them, and the first point is split off.
fn uniform_cut(xs: &[f64], lo: usize, hi: usize, rng: &mut impl Rng) -> usize {
    let (first, last) = (xs[lo], xs[hi - 1]);
    if first == last {
        return lo + 1;
    }
    let r = first + rng.random::<f64>() * (last - first);
    let m = lo + xs[lo..hi].partition_point(|&x| x <= r);
    // r < last except through rounding.
    m.clamp(lo + 1, hi - 1)
}

fn run_random_cut(
    xs: &[f64],
    labels: &[usize],
    rng: &mut impl Rng,
) -> Result<(Dendrogram, Vec<SplitStep>)> {
    build_divisive(labels, |lo, hi| Ok(uniform_cut(xs, lo, hi, rng)))
}

fn check_sorted(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::invalid("cannot cluster zero points"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("coordinates must be finite"));
    }
    if !is_sorted_ascending(xs) {
        return Err(Error::invalid("coordinates must be sorted ascending"));
    }
    Ok(())
}

/// Random cut of sorted 1D coordinates; leaf `p` is `xs[p]`.
pub fn random_cut(xs: &[f64], seed: Seed) -> Result<Dendrogram> {
    random_cut_traced(xs, seed).map(|(t, _)| t)
}

pub fn random_cut_traced(xs: &[f64], seed: Seed) -> Result<(Dendrogram, AlgorithmTrace)> {
    check_sorted(xs)?;
    let labels: Vec<usize> = (0..xs.len()).collect();
    let (tree, splits) = run_random_cut(xs, &labels, &mut seed.rng())?;
    let trace = AlgorithmTrace {
        n: xs.len(),
        splits,
        order: labels,
        ..Default::default()
    };
    Ok((tree, trace))
}

/// Projects every point on one standard Gaussian direction, sorts the
/// projections (ties by index) and runs a random cut on them.
pub fn projected_random_cut(points: &PointSet, seed: Seed) -> Result<Dendrogram> {
    let mut rng = seed.rng();
    let (xs, order) = project_sorted(points, &mut rng);
    run_random_cut(&xs, &order, &mut rng).map(|(t, _)| t)
}

pub fn projected_random_cut_traced(
    points: &PointSet,
    seed: Seed,
) -> Result<(Dendrogram, AlgorithmTrace)> {
    let mut rng = seed.rng();
    let (xs, order) = project_sorted(points, &mut rng);
    let (tree, splits) = run_random_cut(&xs, &order, &mut rng)?;
    let trace = AlgorithmTrace {
        n: points.len(),
        splits,
        order,
        ..Default::default()
    };
    Ok((tree, trace))
}

/// Sorted projections and the point at each sorted position.
fn project_sorted(points: &PointSet, rng: &mut impl Rng) -> (Vec<f64>, Vec<usize>) {
    let g: Vec<f64> = (0..points.dim()).map(|_| rng.sample(StandardNormal)).collect();
    let mut keyed: Vec<(f64, usize)> = points.rows().map(|v| dot(v, &g)).zip(0..).collect();
    // Equal projections keep index order.
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().unzip()
}

/// Splits at the widest gap (leftmost on ties) and recurses; leaf `p` is
/// `xs[p]`.
pub fn greedy_cut(xs: &[f64]) -> Result<Dendrogram> {
    check_sorted(xs)?;
    let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let widest = WidestGap::new(&gaps);
    let labels: Vec<usize> = (0..xs.len()).collect();
    build_divisive(&labels, |lo, hi| Ok(widest.query(lo, hi - 1) + 1)).map(|(t, _)| t)
}

/// Sparse table answering "leftmost widest gap in `lo..hi`".
struct WidestGap<'a> {
    gaps: &'a [f64],
    table: Vec<Vec<u32>>,
}

impl<'a> WidestGap<'a> {
    fn new(gaps: &'a [f64]) -> Self {
        let mut table = vec![(0..gaps.len() as u32).collect::<Vec<_>>()];
        let mut width = 1;
        while 2 * width <= gaps.len() {
            let prev = table.last().unwrap();
            let next = (0..prev.len() - width)
                .map(|t| Self::better(gaps, prev[t], prev[t + width]))
                .collect();
            table.push(next);
            width *= 2;
        }
        WidestGap { gaps, table }
    }

    fn better(gaps: &[f64], a: u32, b: u32) -> u32 {
        // Wider wins; on equal width the smaller index.
        let (ga, gb) = (gaps[a as usize], gaps[b as usize]);
        if gb > ga || (gb == ga && b < a) {
            b
        } else {
            a
        }
    }

    fn query(&self, lo: usize, hi: usize) -> usize {
        let level = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let row = &self.table[level];
        Self::better(self.gaps, row[lo], row[hi - (1 << level)]) as usize
    }
}
