//! Synthetic graphs with planted structural roles, plus small random-graph
//! helpers used by tests and benchmarks.
//!
//! A role graph is a cycle with copies of one small shape attached to evenly
//! spaced anchor nodes. Every shape is attached through its own symmetry
//! axis (the roof of a house, the center of a star, the apex of a fan), so in
//! the noiseless case nodes in the same shape position are automorphic.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Role id shared by every cycle node that is not an anchor.
pub const ROLE_CYCLE: usize = 0;
/// Role id of the cycle nodes that shapes hang from.
pub const ROLE_ANCHOR: usize = 1;

/// Leaves in a star or fan.
const SHAPE_LEAVES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Square base with a triangular roof; attached by the roof.
    House,
    /// Apex joined to a path of five leaves; attached by the apex.
    Fan,
    /// `K_{1,5}`; attached by the center.
    Star,
}

impl Shape {
    pub fn from_name(name: &str) -> Option<Shape> {
        match name {
            "house" => Some(Shape::House),
            "fan" => Some(Shape::Fan),
            "star" => Some(Shape::Star),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::House => "house",
            Shape::Fan => "fan",
            Shape::Star => "star",
        }
    }

    /// Local edges, and the role of each local node. Local node 0 is the one
    /// attached to the anchor.
    fn gadget(self) -> (Vec<(usize, usize)>, Vec<usize>) {
        match self {
            // 0 roof, 1-2 mids, 3-4 bases.
            Shape::House => (
                vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (3, 4)],
                vec![2, 3, 3, 4, 4],
            ),
            // 0 apex, leaves 1..=5 in a path; orbits {1,5}, {2,4}, {3}.
            Shape::Fan => {
                let mut edges: Vec<_> = (1..=SHAPE_LEAVES).map(|i| (0, i)).collect();
                edges.extend((1..SHAPE_LEAVES).map(|i| (i, i + 1)));
                (edges, vec![2, 3, 4, 5, 4, 3])
            }
            Shape::Star => (
                (1..=SHAPE_LEAVES).map(|i| (0, i)).collect(),
                vec![2, 3, 3, 3, 3, 3],
            ),
        }
    }

    pub fn role_names(self) -> &'static [&'static str] {
        match self {
            Shape::House => &["cycle", "anchor", "roof", "mid", "base"],
            Shape::Fan => &["cycle", "anchor", "apex", "end-leaf", "inner-leaf", "middle-leaf"],
            Shape::Star => &["cycle", "anchor", "center", "leaf"],
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoleGraph {
    pub graph: Graph,
    /// One role id per node.
    pub roles: Vec<usize>,
    /// Exact automorphism classes, when the construction guarantees them
    /// (no noise and `cycle_len` divisible by `n_shapes`). Refines `roles`:
    /// plain cycle nodes are split by their distance to the nearest anchor.
    pub orbits: Option<Vec<usize>>,
    pub shape: Shape,
}

impl RoleGraph {
    pub fn role_count(&self) -> usize {
        self.roles.iter().copied().collect::<HashSet<_>>().len()
    }
}

/// Cycle of `cycle_len` nodes with `n_shapes` copies of `shape` hung from
/// anchors at positions `floor(i * cycle_len / n_shapes)`, then
/// `floor(noise_fraction * |E|)` random non-edges added.
pub fn generate_role_graph(
    shape: Shape,
    n_shapes: usize,
    cycle_len: usize,
    noise_fraction: f64,
    seed: u64,
) -> Result<RoleGraph> {
    if n_shapes < 1 {
        return Err(Error::InvalidParameter("need at least one shape".into()));
    }
    if cycle_len < 3 || cycle_len < n_shapes {
        return Err(Error::InvalidParameter(format!(
            "cycle of length {cycle_len} cannot hold {n_shapes} shapes"
        )));
    }
    if !(0.0..1.0).contains(&noise_fraction) {
        return Err(Error::InvalidParameter(format!(
            "noise fraction must lie in [0, 1), got {noise_fraction}"
        )));
    }

    let (local_edges, local_roles) = shape.gadget();
    let shape_size = local_roles.len();
    let n = cycle_len + n_shapes * shape_size;
    let mut edges: Vec<(usize, usize)> = (0..cycle_len).map(|i| (i, (i + 1) % cycle_len)).collect();
    let mut roles = vec![ROLE_CYCLE; n];
    let anchors: Vec<usize> = (0..n_shapes).map(|i| i * cycle_len / n_shapes).collect();
    for (i, &anchor) in anchors.iter().enumerate() {
        roles[anchor] = ROLE_ANCHOR;
        let base = cycle_len + i * shape_size;
        edges.push((anchor, base));
        edges.extend(local_edges.iter().map(|&(u, v)| (base + u, base + v)));
        roles[base..base + shape_size].copy_from_slice(&local_roles);
    }

    let orbits = if noise_fraction == 0.0 && cycle_len % n_shapes == 0 {
        let spacing = cycle_len / n_shapes;
        let offset_base = shape.role_names().len();
        let mut orbits = roles.clone();
        for (pos, orbit) in orbits.iter_mut().enumerate().take(cycle_len) {
            let offset = pos % spacing;
            if offset != 0 {
                *orbit = offset_base + offset.min(spacing - offset) - 1;
            }
        }
        Some(orbits)
    } else {
        None
    };

    let base_edges = edges.len();
    let extra = (noise_fraction * base_edges as f64).floor() as usize;
    if extra > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        add_random_edges(&mut edges, n, extra, &mut rng)?;
    }

    Ok(RoleGraph {
        graph: Graph::new(n, &edges)?,
        roles,
        orbits,
        shape,
    })
}

/// Adds `count` distinct uniformly random non-edges.
fn add_random_edges<R: Rng>(
    edges: &mut Vec<(usize, usize)>,
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<()> {
    let mut present: HashSet<(usize, usize)> =
        edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let capacity = n * (n - 1) / 2;
    if present.len() + count > capacity {
        return Err(Error::InvalidParameter(format!(
            "cannot add {count} edges to a graph with {} of {capacity} possible",
            present.len()
        )));
    }
    let mut added = 0;
    while added < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            edges.push(key);
            added += 1;
        }
    }
    Ok(())
}

/// Erdos-Renyi `G(n, p)`.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, &edges).expect("G(n, p) edges are valid")
}

/// Random spanning tree plus independent extra edges with probability `p`;
/// always connected.
pub fn connected_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (u, v) = (order[i], order[j]);
        edges.insert((u.min(v), u.max(v)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.insert((i, j));
            }
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    Graph::new(n, &edges).expect("tree plus extra edges are valid")
}

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Two families of small graphs with different local cycle structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    /// Triangles glued at shared nodes.
    Triangles,
    /// Stars whose centers form a path (a tree, so bipartite before noise).
    Stars,
}

/// One member of `family` with 3 to 6 building blocks and one or two random
/// extra edges.
pub fn family_graph<R: Rng>(family: GraphFamily, rng: &mut R) -> Graph {
    let blocks = rng.random_range(3..=6);
    let mut edges = Vec::new();
    let mut n;
    match family {
        GraphFamily::Triangles => {
            edges.extend([(0, 1), (1, 2), (0, 2)]);
            n = 3;
            for _ in 1..blocks {
                let host = rng.random_range(0..n);
                edges.extend([(host, n), (host, n + 1), (n, n + 1)]);
                n += 2;
            }
        }
        GraphFamily::Stars => {
            n = 0;
            let mut prev_center = None;
            for _ in 0..blocks {
                let center = n;
                let leaves = rng.random_range(3..=5);
                edges.extend((1..=leaves).map(|i| (center, center + i)));
                if let Some(p) = prev_center {
                    edges.push((p, center));
                }
                prev_center = Some(center);
                n += leaves + 1;
            }
        }
    }
    let extra = rng.random_range(1..=2);
    add_random_edges(&mut edges, n, extra, rng).expect("family graphs are sparse");
    Graph::new(n, &edges).expect("family edges are valid")
}
