//! Adaptive KD-tree over the observation history.
//!
//! A node holding more than `m_t` observations is split on the coordinate
//! with the largest sample variance, at the median of its members' values.
//! Points on a split plane belong to the lower child.

use serde::Serialize;

use crate::domain::{Bounds, History};
use crate::error::{Error, Result};

/// Leaf capacity after `t` evaluations: `m0 + floor(lambda * ln(1 + t))`.
pub fn leaf_threshold(t: usize, m0: usize, lambda: f64) -> usize {
    m0 + (lambda * (1.0 + t as f64).ln()).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Split {
    pub dim: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionNode {
    pub bounds: Bounds,
    /// Indices into the history (or point list) the tree was built from.
    pub members: Vec<usize>,
    pub split: Option<Split>,
    pub children: Option<Box<[PartitionNode; 2]>>,
}

impl PartitionNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> LeafSet<'_> {
        let mut out = Vec::new();
        collect_leaves(self, &mut out);
        LeafSet { leaves: out }
    }

    /// The unique leaf whose region holds `x`.
    pub fn locate(&self, x: &[f64]) -> Result<&PartitionNode> {
        if !self.bounds.contains(x) {
            return Err(Error::OutOfDomain { point: x.to_vec() });
        }
        let mut node = self;
        while let (Some(split), Some(children)) = (node.split, node.children.as_deref()) {
            node = if x[split.dim] <= split.threshold {
                &children[0]
            } else {
                &children[1]
            };
        }
        Ok(node)
    }

    pub fn depth(&self) -> usize {
        match self.children.as_deref() {
            None => 0,
            Some([l, r]) => 1 + l.depth().max(r.depth()),
        }
    }
}

fn collect_leaves<'a>(node: &'a PartitionNode, out: &mut Vec<&'a PartitionNode>) {
    match node.children.as_deref() {
        None => out.push(node),
        Some([l, r]) => {
            collect_leaves(l, out);
            collect_leaves(r, out);
        }
    }
}

/// The disjoint leaf regions of a tree.
#[derive(Debug, Clone)]
pub struct LeafSet<'a> {
    pub leaves: Vec<&'a PartitionNode>,
}

impl<'a> LeafSet<'a> {
    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a PartitionNode> + '_ {
        self.leaves.iter().copied()
    }

    pub fn summaries(&self) -> Vec<LeafSummary> {
        self.leaves
            .iter()
            .map(|l| LeafSummary {
                lower: l.bounds.lower.clone(),
                upper: l.bounds.upper.clone(),
                members: l.members.len(),
            })
            .collect()
    }
}

/// Flat record of a leaf for run logs and partition plots.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct LeafSummary {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub members: usize,
}

pub fn build_tree(history: &History, domain: &Bounds, m_t: usize) -> Result<PartitionNode> {
    let points: Vec<&[f64]> = history.iter().map(|o| &o.x[..]).collect();
    build_tree_from_points(&points, domain, m_t)
}

pub fn build_tree_from_points<P: AsRef<[f64]>>(
    points: &[P],
    domain: &Bounds,
    m_t: usize,
) -> Result<PartitionNode> {
    for p in points {
        if !domain.contains(p.as_ref()) {
            return Err(Error::OutOfDomain {
                point: p.as_ref().to_vec(),
            });
        }
    }
    let members: Vec<usize> = (0..points.len()).collect();
    Ok(grow(points, domain.clone(), members, m_t.max(1)))
}

fn grow<P: AsRef<[f64]>>(
    points: &[P],
    bounds: Bounds,
    members: Vec<usize>,
    m_t: usize,
) -> PartitionNode {
    let split = if members.len() > m_t {
        choose_split(points, &members)
    } else {
        None
    };
    let Some(split) = split else {
        return PartitionNode {
            bounds,
            members,
            split: None,
            children: None,
        };
    };
    let (left, right): (Vec<usize>, Vec<usize>) = members
        .iter()
        .partition(|&&i| points[i].as_ref()[split.dim] <= split.threshold);
    let mut lower_bounds = bounds.clone();
    lower_bounds.upper[split.dim] = split.threshold;
    let mut upper_bounds = bounds.clone();
    upper_bounds.lower[split.dim] = split.threshold;
    let children = Box::new([
        grow(points, lower_bounds, left, m_t),
        grow(points, upper_bounds, right, m_t),
    ]);
    PartitionNode {
        bounds,
        members,
        split: Some(split),
        children: Some(children),
    }
}

/// Highest-variance coordinate (lowest index on ties) whose median leaves
/// both sides non-empty; `None` for unsplittable nodes.
fn choose_split<P: AsRef<[f64]>>(points: &[P], members: &[usize]) -> Option<Split> {
    let d = points[members[0]].as_ref().len();
    let n = members.len() as f64;
    let mut by_variance: Vec<(usize, f64)> = (0..d)
        .map(|k| {
            let mean = members.iter().map(|&i| points[i].as_ref()[k]).sum::<f64>() / n;
            let var = members
                .iter()
                .map(|&i| (points[i].as_ref()[k] - mean).powi(2))
                .sum::<f64>()
                / n;
            (k, var)
        })
        .filter(|&(_, var)| var > 0.0)
        .collect();
    by_variance.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    by_variance.into_iter().find_map(|(dim, _)| {
        let mut values: Vec<f64> = members.iter().map(|&i| points[i].as_ref()[dim]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let threshold = median(&values);
        let max = *values.last().unwrap();
        (threshold < max).then_some(Split { dim, threshold })
    })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}
