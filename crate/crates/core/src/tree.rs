//! Spanning-tree machinery: random spanning trees of the interaction graph
//! and exact sampling from tree-structured spin distributions by
//! sum-product message passing (with the exact log normaliser, which the
//! hot-coupling SMC sequence needs for its first target).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::GraphStructure;
use crate::log_add_exp;
use crate::state::SpinState;

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        true
    }
}

/// Random spanning tree of `g` (randomised Kruskal over a uniformly
/// shuffled edge list) plus the non-tree edges in uniformly shuffled
/// order. The shuffled remainder is the edge-addition order of a
/// hot-coupling target sequence.
pub fn spanning_tree_and_order(
    g: &GraphStructure,
    rng: &mut impl Rng,
) -> Result<(Vec<(u32, u32)>, Vec<(u32, u32)>)> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut edges: Vec<(u32, u32)> = g.edges().to_vec();
    edges.shuffle(rng);
    let mut uf = UnionFind::new(g.node_count());
    let mut tree = Vec::with_capacity(g.node_count() - 1);
    let mut rest = Vec::with_capacity(edges.len() + 1 - g.node_count());
    for (i, j) in edges {
        if uf.union(i, j) {
            tree.push((i, j));
        } else {
            rest.push((i, j));
        }
    }
    rest.shuffle(rng);
    Ok((tree, rest))
}

/// Exact sample and log normaliser of the tree-structured distribution
/// over spins proportional to
/// `exp(theta_x * sum_tree x_i x_j + sum_k unary_k(x_k))`,
/// where `unaries[k] = [log potential at -1, log potential at +1]`.
///
/// Messages pass leaves-to-root, then the state is sampled root-to-leaves.
/// `tree_edges` must form a spanning tree of `0..node_count`.
pub fn tree_sample_and_log_z(
    node_count: usize,
    tree_edges: &[(u32, u32)],
    theta_x: f64,
    unaries: &[[f64; 2]],
    rng: &mut impl Rng,
) -> Result<(SpinState, f64)> {
    if unaries.len() != node_count {
        return Err(Error::ShapeMismatch {
            context: "tree unaries",
            expected: node_count,
            got: unaries.len(),
        });
    }
    if tree_edges.len() + 1 != node_count {
        return Err(Error::NotATree(format!(
            "{} edges for {} nodes",
            tree_edges.len(),
            node_count
        )));
    }
    let mut uf = UnionFind::new(node_count);
    let mut adj = vec![Vec::new(); node_count];
    for &(i, j) in tree_edges {
        if i as usize >= node_count || j as usize >= node_count {
            return Err(Error::NotATree(format!("edge ({i},{j}) out of range")));
        }
        if !uf.union(i, j) {
            return Err(Error::NotATree(format!("cycle through edge ({i},{j})")));
        }
        adj[i as usize].push(j as usize);
        adj[j as usize].push(i as usize);
    }

    // BFS from node 0: parents, plus an order where parents precede children.
    let mut parent = vec![usize::MAX; node_count];
    let mut order = Vec::with_capacity(node_count);
    let mut queue = std::collections::VecDeque::from([0usize]);
    parent[0] = 0;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    debug_assert_eq!(order.len(), node_count);

    // Upward pass: belief[v][s] = unary_v(s) + sum of child messages at s;
    // message to the parent folds in the pairwise coupling.
    let spin = |s: usize| if s == 1 { 1.0 } else { -1.0 };
    let mut belief: Vec<[f64; 2]> = unaries.to_vec();
    let mut msg_to_parent = vec![[0.0f64; 2]; node_count];
    for &v in order.iter().rev() {
        if v == 0 {
            continue;
        }
        for sp in 0..2 {
            let m = log_add_exp(
                theta_x * spin(0) * spin(sp) + belief[v][0],
                theta_x * spin(1) * spin(sp) + belief[v][1],
            );
            msg_to_parent[v][sp] = m;
        }
        let p = parent[v];
        belief[p][0] += msg_to_parent[v][0];
        belief[p][1] += msg_to_parent[v][1];
    }
    let log_z = log_add_exp(belief[0][0], belief[0][1]);

    // Downward pass: sample the root marginal, then each child conditional.
    let mut values = vec![0i8; node_count];
    for &v in &order {
        let (w0, w1) = if v == 0 {
            (belief[0][0], belief[0][1])
        } else {
            // conditional on the sampled parent spin: pairwise coupling
            // plus the belief accumulated from v's own subtree
            let sp = usize::from(values[parent[v]] == 1);
            (
                theta_x * spin(0) * spin(sp) + belief[v][0],
                theta_x * spin(1) * spin(sp) + belief[v][1],
            )
        };
        let p_hi = 1.0 / (1.0 + (w0 - w1).exp());
        values[v] = if rng.random::<f64>() < p_hi { 1 } else { -1 };
    }
    Ok((SpinState { values }, log_z))
}
