//! Nested angle intervals, the Cheung sum and limit directions.

use crate::census::ConstantsProfile;
use crate::error::{Error, Result};
use crate::interval::{AngleInterval, NestingReport};
use crate::vector::PlanarVector;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderSummary {
    /// Circumference `|beta|` on the source surface.
    pub length: f64,
    /// Angle of the core line with the horizontal, in `[0, pi)`.
    pub theta: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub core_holonomy: PlanarVector,
    /// Core holonomy in the base chart of the source surface.
    pub base_core: PlanarVector,
    pub area_fraction: f64,
}

/// Checks run when a child is admitted, measured on the source surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChildChecks {
    /// `t |beta| <= |s_t| <= (t + 1) |beta|`.
    pub twist_length: bool,
    /// `|beta| log|beta| <= |beta'| <= M |beta| log|beta|`.
    pub child_length: bool,
    /// `c / (|beta| |s_t|) <= sin(beta, s_t) <= 1 / (|beta| |s_t|)`.
    pub area_sine: bool,
    /// `I_child` inside `I_parent`.
    pub nested: bool,
    pub s_t_length: f64,
    pub sin_beta_s_t: f64,
}

impl ChildChecks {
    pub fn all(&self) -> bool {
        self.twist_length && self.child_length && self.area_sine && self.nested
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub t: f64,
    pub reason: String,
    pub child_length: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorNode {
    pub id: usize,
    pub parent_id: Option<usize>,
    pub depth: usize,
    pub cylinder: CylinderSummary,
    pub interval: AngleInterval,
    /// Center relative to the parent's center, computed from an exact cross
    /// product so that it stays meaningful below the resolution of absolute
    /// angles.
    pub offset: f64,
    /// Twist parameter of the protochild this node came from.
    pub t_index: Option<f64>,
    /// Twisted cross curve `s_t` of the parent, source coordinates.
    pub s_t: Option<PlanarVector>,
    /// The same vector in the base chart.
    pub s_t_base: Option<PlanarVector>,
    pub checks: Option<ChildChecks>,
    /// Children ordered by angle.
    pub children: Vec<usize>,
    pub rejections: Vec<Rejection>,
    pub nesting: Option<NestingReport>,
    /// Why a node above the target depth has no children.
    pub leaf_reason: Option<String>,
    /// Good twist indices found for this node, when it was expanded.
    pub good_indices: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorTree {
    pub nodes: Vec<CantorNode>,
    pub root: usize,
    pub constants: ConstantsProfile,
    /// Depth the tree was grown to.
    pub depth: usize,
}

impl CantorTree {
    pub fn node(&self, id: usize) -> &CantorNode {
        &self.nodes[id]
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = &CantorNode> {
        self.nodes.iter().filter(|n| !n.children.is_empty())
    }

    /// Copy restricted to nodes of depth at most `depth`.
    pub fn truncated(&self, depth: usize) -> CantorTree {
        let mut t = self.clone();
        t.nodes.retain(|n| n.depth <= depth);
        let mut map = vec![usize::MAX; self.nodes.len()];
        for (i, n) in t.nodes.iter().enumerate() {
            map[n.id] = i;
        }
        for n in t.nodes.iter_mut() {
            n.id = map[n.id];
            n.parent_id = n.parent_id.map(|p| map[p]);
            n.children = n.children.iter().filter(|&&c| map[c] != usize::MAX).map(|&c| map[c]).collect();
        }
        t.root = map[self.root];
        t.depth = depth.min(self.depth);
        t
    }

    /// Node ids from the root along first children.
    pub fn leftmost_path(&self) -> Vec<usize> {
        let mut path = vec![self.root];
        while let Some(&c) = self.nodes[*path.last().unwrap()].children.first() {
            path.push(c);
        }
        path
    }

    /// Copy without branches that die before `self.depth`; dropping a child
    /// never raises the dimension bound.
    pub fn pruned(&self) -> CantorTree {
        let mut alive = vec![false; self.nodes.len()];
        // children always have larger ids than parents
        for n in self.nodes.iter().rev() {
            alive[n.id] = n.depth == self.depth || n.children.iter().any(|&c| alive[c]);
        }
        if !alive[self.root] {
            let mut t = self.clone();
            t.nodes.truncate(1);
            t.nodes[0].children.clear();
            t.depth = 0;
            return t;
        }
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for n in &self.nodes {
            if alive[n.id] {
                map[n.id] = nodes.len();
                nodes.push(n.clone());
            }
        }
        for n in nodes.iter_mut() {
            n.id = map[n.id];
            n.parent_id = n.parent_id.map(|p| map[p]);
            n.children = n.children.iter().filter(|&&c| alive[c]).map(|&c| map[c]).collect();
        }
        CantorTree { nodes, root: map[self.root], constants: self.constants, depth: self.depth }
    }

    /// Check that every child lies in its parent's interval.
    pub fn verify_nesting(&self) -> Result<()> {
        for n in &self.nodes {
            if let Some(p) = n.parent_id {
                let pi = &self.nodes[p].interval;
                if n.offset.abs() + n.interval.radius > pi.radius {
                    return Err(Error::BrokenNesting(n.id));
                }
            }
        }
        Ok(())
    }
}

/// `(rho' |I'|)^s / (rho |I|)^s` summed over the children of `node`.
pub fn cheung_sum(tree: &CantorTree, node: usize, s: f64) -> Result<f64> {
    let n = &tree.nodes[node];
    if n.children.is_empty() {
        return Err(Error::LeafNode(node));
    }
    let w = n.interval.weight();
    Ok(n.children.iter().map(|&c| (tree.nodes[c].interval.weight() / w).powf(s)).sum())
}

/// The `s = 1/2` sum written through lengths: `sum N |beta| / (N' |beta'|)`.
pub fn half_identity_sum(tree: &CantorTree, node: usize) -> Result<f64> {
    let n = &tree.nodes[node];
    if n.children.is_empty() {
        return Err(Error::LeafNode(node));
    }
    let a = n.interval.n * n.cylinder.length;
    Ok(n.children
        .iter()
        .map(|&c| {
            let ch = &tree.nodes[c];
            a / (ch.interval.n * ch.cylinder.length)
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub s_lower: f64,
    /// Smallest Cheung sum at `s = 1/2` among internal nodes of each depth.
    pub min_sum_by_depth: Vec<f64>,
    /// Internal node with the smallest sum at `s_lower`.
    pub worst_node: Option<usize>,
    /// Depth to which the bound is certified.
    pub depth: usize,
    pub internal_nodes: usize,
}

fn min_sum(tree: &CantorTree, internal: &[usize], s: f64) -> (f64, usize) {
    let mut best = (f64::INFINITY, usize::MAX);
    for &i in internal {
        let v = cheung_sum(tree, i, s).expect("internal node");
        if v < best.0 {
            best = (v, i);
        }
    }
    best
}

/// Largest `s` in `[0, 1]` at which every internal node has Cheung sum
/// above one, to within `1e-6`.
pub fn dimension_lower_bound(tree: &CantorTree) -> Result<DimensionReport> {
    let depth = tree.max_depth();
    for n in &tree.nodes {
        if n.children.is_empty() && n.depth < depth {
            return Err(Error::DegenerateTree(n.id));
        }
    }
    let internal: Vec<usize> = tree.internal_nodes().map(|n| n.id).collect();
    let mut min_by_depth = vec![f64::INFINITY; depth];
    for &i in &internal {
        let d = tree.nodes[i].depth;
        let v = cheung_sum(tree, i, 0.5)?;
        if v < min_by_depth[d] {
            min_by_depth[d] = v;
        }
    }
    if internal.is_empty() {
        return Ok(DimensionReport { s_lower: 0.0, min_sum_by_depth: Vec::new(), worst_node: None, depth, internal_nodes: 0 });
    }
    let ok = |s: f64| min_sum(tree, &internal, s).0 > 1.0;
    let s_lower = if ok(1.0) {
        1.0
    } else if !ok(1e-9) {
        0.0
    } else {
        let (mut lo, mut hi) = (1e-9, 1.0);
        while hi - lo > 1e-7 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let worst = min_sum(tree, &internal, s_lower).1;
    Ok(DimensionReport { s_lower, min_sum_by_depth: min_by_depth, worst_node: Some(worst), depth, internal_nodes: internal.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PathPolicy {
    Leftmost,
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub angle: f64,
    pub radius: f64,
    /// Node ids from the root.
    pub path: Vec<usize>,
}

/// Follow a path of nested intervals and return its deepest center.
pub fn extract_direction(tree: &CantorTree, policy: &PathPolicy) -> Result<Direction> {
    let mut path = vec![tree.root];
    let mut cur = tree.root;
    let mut step = 0;
    loop {
        let n = &tree.nodes[cur];
        let next = match policy {
            PathPolicy::Leftmost => n.children.first().copied(),
            PathPolicy::Explicit(ix) => match ix.get(step) {
                Some(&k) => Some(*n.children.get(k).ok_or_else(|| Error::InvalidSpec(format!("node {cur} has no child {k}")))?),
                None => None,
            },
        };
        let Some(c) = next else { break };
        let ch = &tree.nodes[c];
        if ch.offset.abs() + ch.interval.radius > n.interval.radius || ch.interval.radius >= n.interval.radius {
            return Err(Error::BrokenNesting(c));
        }
        path.push(c);
        cur = c;
        step += 1;
    }
    let last = &tree.nodes[cur];
    Ok(Direction { angle: last.interval.center, radius: last.interval.radius, path })
}

/// Build a synthetic tree with the given branching and weight ratio per
/// level; intervals are laid out evenly inside their parents.
pub fn synthetic_tree(branching: usize, ratio: f64, depth: usize) -> CantorTree {
    let constants = ConstantsProfile::default_h2();
    let mut nodes = Vec::new();
    let root_iv = AngleInterval { center: 0.5, radius: 0.1, rho: 0.5, n: 1.0 };
    nodes.push(blank_node(0, None, 0, root_iv, 0.0));
    let mut frontier = vec![0usize];
    for d in 0..depth {
        let mut next = Vec::new();
        for &p in &frontier {
            let piv = nodes[p].interval;
            // keep rho fixed and scale the radius so that rho |I| scales by `ratio`
            let r = piv.radius * ratio;
            for k in 0..branching {
                let off = if branching == 1 { 0.0 } else { piv.radius * (-0.5 + k as f64 / (branching - 1) as f64) };
                let iv = AngleInterval { center: piv.center + off, radius: r, rho: piv.rho, n: 1.0 };
                let id = nodes.len();
                nodes.push(blank_node(id, Some(p), d + 1, iv, off));
                nodes[p].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    CantorTree { nodes, root: 0, constants, depth }
}

fn blank_node(id: usize, parent: Option<usize>, depth: usize, interval: AngleInterval, offset: f64) -> CantorNode {
    CantorNode {
        id,
        parent_id: parent,
        depth,
        cylinder: CylinderSummary {
            length: 0.0,
            theta: interval.center,
            n: interval.n,
            core_holonomy: PlanarVector::ZERO,
            base_core: PlanarVector::ZERO,
            area_fraction: 0.0,
        },
        interval,
        offset,
        t_index: None,
        s_t: None,
        s_t_base: None,
        checks: None,
        children: Vec::new(),
        rejections: Vec::new(),
        nesting: None,
        leaf_reason: None,
        good_indices: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_quarter_is_half() {
        let t = synthetic_tree(2, 0.25, 5);
        let r = dimension_lower_bound(&t).unwrap();
        assert!((r.s_lower - 0.5).abs() < 1e-5, "{}", r.s_lower);
    }

    #[test]
    fn single_chain_is_zero() {
        let t = synthetic_tree(1, 0.5, 4);
        assert_eq!(dimension_lower_bound(&t).unwrap().s_lower, 0.0);
    }

    #[test]
    fn sums() {
        let t = synthetic_tree(4, 0.25, 1);
        assert!((cheung_sum(&t, 0, 0.5).unwrap() - 2.0).abs() < 1e-12);
        let t = synthetic_tree(1, 1.0, 1);
        assert!((cheung_sum(&t, 0, 0.7).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(cheung_sum(&t, 1, 0.5), Err(Error::LeafNode(1))));
    }

    #[test]
    fn direction_of_root_only() {
        let t = synthetic_tree(2, 0.25, 0);
        let d = extract_direction(&t, &PathPolicy::Leftmost).unwrap();
        assert_eq!((d.angle, d.radius), (0.5, 0.1));
    }
}
