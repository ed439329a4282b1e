//! Rooted binary trees over point indices.
//!
//! A [`Dendrogram`] is stored as an arena of [`Node`]s. On construction it
//! caches, for every node, its leaf count and, for every pair of leaves that
//! are adjacent in left-to-right order, the leaf count of the node that
//! separates them. The LCA of two leaves at order positions `p < q` is the
//! largest of the separating nodes between them, so
//! `|T(i,j)| = max(split_size[p..q])`. That turns every LCA-size query into a
//! range maximum, which [`LcaIndex`] answers in O(1) after O(n log n) work and
//! [`Dendrogram::lca_sizes_from`] sweeps for a whole row in O(n).

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Leaf(usize),
    Internal { left: NodeId, right: NodeId },
}

/// Incremental construction of a [`Dendrogram`]: create leaves, join
/// subtrees, then validate with [`TreeBuilder::build`].
#[derive(Debug, Default, Clone)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_leaves(n: usize) -> Self {
        TreeBuilder {
            nodes: Vec::with_capacity(2 * n.max(1) - 1),
        }
    }

    pub fn leaf(&mut self, point: usize) -> NodeId {
        self.nodes.push(Node::Leaf(point));
        self.nodes.len() - 1
    }

    pub fn join(&mut self, left: NodeId, right: NodeId) -> NodeId {
        self.nodes.push(Node::Internal { left, right });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Validates the structure rooted at `root` and computes the caches.
    ///
    /// Every node created must be reachable from `root` exactly once and the
    /// leaves must carry a permutation of `0..n`.
    pub fn build(self, root: NodeId) -> Result<Dendrogram> {
        Dendrogram::from_arena(self.nodes, root)
    }
}

#[derive(Clone)]
pub struct Dendrogram {
    nodes: Vec<Node>,
    sizes: Vec<usize>,
    root: NodeId,
    order: Vec<usize>,
    position: Vec<usize>,
    split_size: Vec<usize>,
}

impl Dendrogram {
    /// The one-leaf tree.
    pub fn singleton() -> Self {
        Self::from_arena(vec![Node::Leaf(0)], 0).expect("a single leaf is valid")
    }

    fn from_arena(nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        let m = nodes.len();
        if root >= m {
            return Err(Error::invalid(format!("root {root} is not a node")));
        }
        // Preorder walk, left before right.
        let mut seen = vec![false; m];
        let mut preorder = Vec::with_capacity(m);
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if id >= m {
                return Err(Error::invalid(format!("child {id} is not a node")));
            }
            if std::mem::replace(&mut seen[id], true) {
                return Err(Error::invalid(format!("node {id} has two parents")));
            }
            preorder.push(id);
            if let Node::Internal { left, right } = nodes[id] {
                stack.push(right);
                stack.push(left);
            }
        }
        if preorder.len() != m {
            return Err(Error::invalid(format!(
                "{} nodes are unreachable from the root",
                m - preorder.len()
            )));
        }

        let order: Vec<usize> = preorder
            .iter()
            .filter_map(|&id| match nodes[id] {
                Node::Leaf(p) => Some(p),
                Node::Internal { .. } => None,
            })
            .collect();
        let n = order.len();
        if m != 2 * n - 1 {
            return Err(Error::invalid("tree is not binary"));
        }
        let mut position = vec![usize::MAX; n];
        for (pos, &p) in order.iter().enumerate() {
            if p >= n {
                return Err(Error::IndexOutOfRange { index: p, n });
            }
            if position[p] != usize::MAX {
                return Err(Error::invalid(format!("leaf {p} appears twice")));
            }
            position[p] = pos;
        }

        let mut sizes = vec![0usize; m];
        for &id in preorder.iter().rev() {
            sizes[id] = match nodes[id] {
                Node::Leaf(_) => 1,
                Node::Internal { left, right } => sizes[left] + sizes[right],
            };
        }

        let mut start = vec![0usize; m];
        let mut split_size = vec![0usize; n.saturating_sub(1)];
        for &id in &preorder {
            if let Node::Internal { left, right } = nodes[id] {
                start[left] = start[id];
                start[right] = start[id] + sizes[left];
                split_size[start[right] - 1] = sizes[id];
            }
        }

        Ok(Dendrogram {
            nodes,
            sizes,
            root,
            order,
            position,
            split_size,
        })
    }

    /// Number of leaves.
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Cached leaf count of the subtree at `id`.
    pub fn size(&self, id: NodeId) -> usize {
        self.sizes[id]
    }

    /// Leaves in left-to-right order.
    pub fn leaf_order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, point: usize) -> usize {
        self.position[point]
    }

    /// Leaf count of the node separating the leaves at order positions `p`
    /// and `p + 1`.
    pub fn split_sizes(&self) -> &[usize] {
        &self.split_size
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            })
        } else {
            Ok(())
        }
    }

    /// `|T(i,j)|`: leaf count of the subtree rooted at the LCA of `i` and `j`.
    pub fn lca_subtree_size(&self, i: usize, j: usize) -> Result<usize> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::invalid("LCA size needs two distinct leaves"));
        }
        let (a, b) = ordered(self.position[i], self.position[j]);
        Ok(self.split_size[a..b].iter().copied().max().unwrap_or(0))
    }

    /// Fills `out[j] = |T(i,j)|` for every `j != i` in one O(n) sweep;
    /// `out[i]` is set to 1.
    pub fn lca_sizes_from(&self, i: usize, out: &mut [usize]) {
        let p = self.position[i];
        out[i] = 1;
        let mut best = 0;
        for q in p + 1..self.n() {
            best = best.max(self.split_size[q - 1]);
            out[self.order[q]] = best;
        }
        best = 0;
        for q in (0..p).rev() {
            best = best.max(self.split_size[q]);
            out[self.order[q]] = best;
        }
    }

    /// The element of the triple that is split off first walking down from
    /// the root, i.e. the one outside the deepest LCA pair.
    pub fn first_separated(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        if i == j || j == k || i == k {
            return Err(Error::invalid(format!(
                "triple ({i}, {j}, {k}) is not distinct"
            )));
        }
        let ij = self.lca_subtree_size(i, j)?;
        let jk = self.lca_subtree_size(j, k)?;
        let ik = self.lca_subtree_size(i, k)?;
        Ok(separated_from_sizes(i, j, k, ij, jk, ik))
    }

    /// Recomputes every leaf count from scratch and compares with the cache.
    pub fn sizes_consistent(&self) -> bool {
        self.nodes.iter().enumerate().all(|(id, node)| match *node {
            Node::Leaf(_) => self.sizes[id] == 1,
            Node::Internal { left, right } => {
                self.sizes[id] == self.sizes[left] + self.sizes[right]
            }
        }) && self.sizes[self.root] == self.n()
    }

    /// Same tree up to swapping the children of internal nodes.
    pub fn same_hierarchy(&self, other: &Dendrogram) -> bool {
        self.n() == other.n() && self.canonical_newick() == other.canonical_newick()
    }

    /// Newick string with the children of every node ordered by their
    /// smallest leaf. Equal for trees that differ only in child order.
    pub fn canonical_newick(&self) -> String {
        let mut min_leaf = vec![usize::MAX; self.nodes.len()];
        for &id in self.postorder().iter() {
            min_leaf[id] = match self.nodes[id] {
                Node::Leaf(p) => p,
                Node::Internal { left, right } => min_leaf[left].min(min_leaf[right]),
            };
        }
        crate::tree_io::newick_with(self, |l, r| min_leaf[l] > min_leaf[r])
    }

    /// Node ids, children before parents.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Node::Internal { left, right } = self.nodes[id] {
                stack.push(left);
                stack.push(right);
            }
        }
        out.reverse();
        out
    }

    /// Internal nodes with their children, in arbitrary order.
    pub fn internal_nodes(&self) -> impl Iterator<Item = (NodeId, NodeId, NodeId)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(id, node)| match *node {
            Node::Internal { left, right } => Some((id, left, right)),
            Node::Leaf(_) => None,
        })
    }

    /// The tree that results from relabelling leaf `p` as `labels[p]`.
    pub fn relabel(&self, labels: &[usize]) -> Result<Dendrogram> {
        if labels.len() != self.n() {
            return Err(Error::invalid(format!(
                "{} labels for a tree with {} leaves",
                labels.len(),
                self.n()
            )));
        }
        let nodes = self
            .nodes
            .iter()
            .map(|node| match *node {
                Node::Leaf(p) => Node::Leaf(labels[p]),
                other => other,
            })
            .collect();
        Self::from_arena(nodes, self.root)
    }
}

pub(crate) fn separated_from_sizes(
    i: usize,
    j: usize,
    k: usize,
    ij: usize,
    jk: usize,
    ik: usize,
) -> usize {
    // The pair with the strictly smallest LCA stays together; the other two
    // pairs share the higher LCA.
    if ij < jk && ij < ik {
        k
    } else if jk < ij && jk < ik {
        i
    } else {
        j
    }
}

#[inline]
fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl PartialEq for Dendrogram {
    /// Ordered structural equality: same shape, same left/right children,
    /// same leaf labels. Node ids may differ.
    fn eq(&self, other: &Self) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            match (self.nodes[a], other.nodes[b]) {
                (Node::Leaf(p), Node::Leaf(q)) if p == q => {}
                (
                    Node::Internal { left: al, right: ar },
                    Node::Internal { left: bl, right: br },
                ) => {
                    stack.push((al, bl));
                    stack.push((ar, br));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Dendrogram {}

impl fmt::Debug for Dendrogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dendrogram({})", crate::tree_io::to_newick(self))
    }
}

/// O(1) LCA-size queries after O(n log n) preprocessing: a sparse table of
/// range maxima over [`Dendrogram::split_sizes`].
#[derive(Debug, Clone)]
pub struct LcaIndex {
    position: Vec<usize>,
    table: Vec<Vec<u32>>,
}

impl LcaIndex {
    pub fn new(tree: &Dendrogram) -> Self {
        let base: Vec<u32> = tree.split_size.iter().map(|&s| s as u32).collect();
        let mut table = vec![base];
        let mut width = 1;
        while 2 * width <= table[0].len() {
            let prev = table.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - width)
                .map(|t| prev[t].max(prev[t + width]))
                .collect();
            table.push(next);
            width *= 2;
        }
        LcaIndex {
            position: tree.position.clone(),
            table,
        }
    }

    pub fn n(&self) -> usize {
        self.position.len()
    }

    /// `|T(i,j)|` for `i != j`; both must be valid leaves.
    #[inline]
    pub fn size(&self, i: usize, j: usize) -> usize {
        let (a, b) = ordered(self.position[i], self.position[j]);
        debug_assert!(a < b, "LCA query on a single leaf");
        let len = b - a;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.table[level];
        row[a].max(row[b - (1 << level)]) as usize
    }

    pub fn first_separated(&self, i: usize, j: usize, k: usize) -> usize {
        separated_from_sizes(i, j, k, self.size(i, j), self.size(j, k), self.size(i, k))
    }
}

/// Orders trees by their canonical Newick string; used to pick a
/// deterministic winner among equally good trees.
pub fn canonical_cmp(a: &Dendrogram, b: &Dendrogram) -> Ordering {
    a.canonical_newick().cmp(&b.canonical_newick())
}
