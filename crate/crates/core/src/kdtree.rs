//! Median-split k-d tree for exact nearest-neighbour queries on small dense
//! point sets.

use alloc::vec::Vec;

use crate::data::sq_euclidean;

/// Largest dimension for which the tree is used. Above it the detector
/// falls back to brute force.
pub const MAX_TREE_DIM: usize = 30;

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

/// A k-d tree over dense points. Each point carries the caller's object id so
/// that queries can exclude the query object itself.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    ids: Vec<usize>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl KdTree {
    /// Builds the tree from `(id, point)` pairs. All points must have length
    /// `dim`.
    pub fn build<'a>(dim: usize, points: impl IntoIterator<Item = (usize, &'a [f64])>) -> Self {
        let mut coords = Vec::new();
        let mut ids = Vec::new();
        for (id, p) in points {
            debug_assert_eq!(p.len(), dim);
            coords.extend_from_slice(p);
            ids.push(id);
        }
        let mut tree = Self {
            dim,
            coords,
            ids,
            nodes: Vec::new(),
            root: None,
        };
        let mut order: Vec<usize> = (0..tree.ids.len()).collect();
        tree.root = tree.build_node(&mut order);
        tree
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn point(&self, p: usize) -> &[f64] {
        &self.coords[p * self.dim..(p + 1) * self.dim]
    }

    fn build_node(&mut self, items: &mut [usize]) -> Option<usize> {
        if items.is_empty() {
            return None;
        }
        // split on the axis of largest spread
        let mut axis = 0;
        let mut best_spread = f64::NEG_INFINITY;
        for a in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &p in items.iter() {
                let v = self.coords[p * self.dim + a];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > best_spread {
                best_spread = hi - lo;
                axis = a;
            }
        }
        let dim = self.dim;
        let coords = &self.coords;
        items.sort_by(|&x, &y| {
            coords[x * dim + axis]
                .partial_cmp(&coords[y * dim + axis])
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(x.cmp(&y))
        });
        let mid = items.len() / 2;
        let point = items[mid];
        let (left_items, rest) = items.split_at_mut(mid);
        let right_items = &mut rest[1..];
        let left = self.build_node(left_items);
        let right = self.build_node(right_items);
        self.nodes.push(Node {
            point,
            axis,
            left,
            right,
        });
        Some(self.nodes.len() - 1)
    }

    /// Nearest point to `query` ignoring any point whose id equals
    /// `exclude`. Returns `(id, squared distance)`, or `None` if no point is
    /// eligible.
    pub fn nearest(&self, query: &[f64], exclude: Option<usize>) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        if let Some(root) = self.root {
            self.search(root, query, exclude, &mut best);
        }
        best.map(|(p, d)| (self.ids[p], d))
    }

    fn search(&self, node: usize, query: &[f64], exclude: Option<usize>, best: &mut Option<(usize, f64)>) {
        let n = &self.nodes[node];
        if exclude != Some(self.ids[n.point]) {
            let d = sq_euclidean(query, self.point(n.point));
            if best.is_none_or(|(_, b)| d < b) {
                *best = Some((n.point, d));
            }
        }
        let diff = query[n.axis] - self.coords[n.point * self.dim + n.axis];
        let (near, far) = if diff < 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        if let Some(c) = near {
            self.search(c, query, exclude, best);
        }
        if let Some(c) = far {
            if best.is_none_or(|(_, b)| diff * diff <= b) {
                self.search(c, query, exclude, best);
            }
        }
    }
}
