//! Exact F+ maximisation for tiny instances.
//!
//! F+ of a tree is the sum over its internal nodes of
//! `w(A, B) * (n - |A| - |B|)` for children `A`, `B`, so the best tree on a
//! leaf set `S` splits it into the best trees on `A` and `S \ A`. Dynamic
//! programming over subsets visits every bipartition once: O(3^n) work,
//! covering all `(2n - 3)!!` trees.

use crate::dendrogram::{Dendrogram, NodeId, TreeBuilder};
use crate::error::{Error, Result};
use crate::objectives::f_plus;
use crate::similarity::SimilarityView;

pub const MAX_BRUTEFORCE_POINTS: usize = 10;

/// Number of rooted binary trees with `n` labelled leaves, `(2n - 3)!!`.
pub fn binary_tree_count(n: usize) -> u64 {
    (1..n.max(1)).map(|k| (2 * k - 1) as u64).product()
}

#[derive(Debug, Clone)]
pub struct OptimalTree {
    pub tree: Dendrogram,
    pub value: f64,
    /// Size of the search space, `(2n - 3)!!`.
    pub trees_covered: u64,
}

/// An F+-maximising tree. Equal values (within 1e-12 relative) are broken
/// toward the tree with the smallest canonical Newick string.
pub fn optimal_tree_bruteforce(sim: &SimilarityView<'_>) -> Result<OptimalTree> {
    let n = sim.n();
    if n > MAX_BRUTEFORCE_POINTS {
        return Err(Error::Refused {
            what: "optimal_tree_bruteforce",
            n,
            limit: MAX_BRUTEFORCE_POINTS,
        });
    }
    let full = (1usize << n) - 1;

    // inner[S] = sum of w_ij over pairs inside S.
    let mut inner = vec![0.0f64; full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let mut add = 0.0;
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            add += sim.weight(low, j);
            r &= r - 1;
        }
        inner[s] = inner[rest] + add;
    }

    let mut best = vec![0.0f64; full + 1];
    let mut split = vec![0usize; full + 1];
    let mut label: Vec<String> = vec![String::new(); full + 1];
    let mut by_size: Vec<usize> = (1..=full).collect();
    by_size.sort_by_key(|s| s.count_ones());
    for &s in &by_size {
        let size = s.count_ones() as usize;
        if size == 1 {
            label[s] = (s.trailing_zeros() as usize).to_string();
            continue;
        }
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let factor = (n - size) as f64;
        let mut chosen: Option<(f64, usize, String)> = None;
        // Submasks of `s` that contain its lowest element, excluding `s`.
        let mut sub = rest;
        loop {
            let a = sub | low;
            if a != s {
                let b = s ^ a;
                let value = best[a] + best[b] + (inner[s] - inner[a] - inner[b]) * factor;
                let better = match &chosen {
                    None => true,
                    Some((v, _, _)) if value > *v && !near(value, *v) => true,
                    Some((v, _, text)) if near(value, *v) => {
                        format!("({},{})", label[a], label[b]) < *text
                    }
                    _ => false,
                };
                if better {
                    chosen = Some((value, a, format!("({},{})", label[a], label[b])));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        let (value, a, text) = chosen.expect("a set of two or more has a bipartition");
        best[s] = value;
        split[s] = a;
        label[s] = text;
    }

    let mut builder = TreeBuilder::with_leaves(n);
    let root = build(full, &split, &mut builder);
    let tree = builder.build(root)?;
    let value = f_plus(&tree, sim)?;
    Ok(OptimalTree {
        tree,
        value,
        trees_covered: binary_tree_count(n),
    })
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn build(s: usize, split: &[usize], b: &mut TreeBuilder) -> NodeId {
    if s.count_ones() == 1 {
        return b.leaf(s.trailing_zeros() as usize);
    }
    let a = split[s];
    let l = build(a, split, b);
    let r = build(s ^ a, split, b);
    b.join(l, r)
}
