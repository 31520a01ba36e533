//! The quotient tree `T_g = S^1 / ~_g` of a Dyck contour.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coding::Coding;
use crate::error::{Error, Result};
use crate::excursion::DiscreteExcursion;
use crate::rng::{self, tags};

const NO_PARENT: usize = usize::MAX;

/// Plane tree coded by a Dyck path, with the contour-time classes of its
/// vertices.
///
/// Vertex ids are assigned in preorder, so the root is `0` and every parent
/// id is smaller than its children's.
#[derive(Clone, Debug)]
pub struct CircleTree {
    n: usize,
    class_id: Vec<usize>,
    vertex_height: Vec<i64>,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    visits: Vec<Vec<usize>>,
}

/// Builds the tree with a single stack pass over the contour: an up-step
/// creates a child of the vertex on top, a down-step pops it.
pub fn build_circle_tree(e: &DiscreteExcursion) -> CircleTree {
    let steps = e.steps();
    let n = e.n();
    let mut class_id = Vec::with_capacity(steps.len() + 1);
    let mut vertex_height = vec![0i64];
    let mut parent = vec![NO_PARENT];
    let mut children = vec![Vec::new()];
    let mut visits = vec![vec![0usize]];
    let mut stack = vec![0usize];
    class_id.push(0);
    for (i, &s) in steps.iter().enumerate() {
        let top = *stack.last().unwrap();
        let v = if s > 0 {
            let v = parent.len();
            parent.push(top);
            vertex_height.push(vertex_height[top] + 1);
            children.push(Vec::new());
            visits.push(Vec::new());
            children[top].push(v);
            stack.push(v);
            v
        } else {
            stack.pop();
            *stack
                .last()
                .expect("validated excursion never pops the root")
        };
        visits[v].push(i + 1);
        class_id.push(v);
    }
    CircleTree {
        n,
        class_id,
        vertex_height,
        parent,
        children,
        visits,
    }
}

impl CircleTree {
    /// Half-length of the coding excursion.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        2 * self.n
    }

    pub fn n_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn n_edges(&self) -> usize {
        self.parent.len() - 1
    }

    /// Vertex visited at contour time `t` (`0..=2n`).
    pub fn class_of(&self, t: usize) -> usize {
        self.class_id[t]
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_id
    }

    pub fn height(&self, v: usize) -> i64 {
        self.vertex_height[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NO_PARENT).then_some(self.parent[v])
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Contour times at which `v` is visited, increasing, in `0..=2n`.
    pub fn visits(&self, v: usize) -> &[usize] {
        &self.visits[v]
    }

    /// Visits as circle points: time `2n` is dropped since it is time `0`.
    pub fn circle_visits(&self, v: usize) -> &[usize] {
        let vs = &self.visits[v];
        if v == 0 {
            &vs[..vs.len() - 1]
        } else {
            vs
        }
    }

    /// Parent array with `-1` for the root.
    pub fn parent_array(&self) -> Vec<i64> {
        self.parent
            .iter()
            .map(|&p| if p == NO_PARENT { -1 } else { p as i64 })
            .collect()
    }

    pub fn lca_index(&self) -> LcaIndex {
        LcaIndex::new(self)
    }
}

/// Binary-lifting ancestor table; answers tree distances by climbing parent
/// pointers, independently of the contour minima.
#[derive(Clone, Debug)]
pub struct LcaIndex {
    up: Vec<Vec<usize>>,
    depth: Vec<i64>,
}

impl LcaIndex {
    pub fn new(tree: &CircleTree) -> Self {
        let nv = tree.n_vertices();
        let root_parent = |v: usize| tree.parent(v).unwrap_or(0);
        let mut up = vec![(0..nv).map(root_parent).collect::<Vec<_>>()];
        let levels = (usize::BITS - nv.leading_zeros()) as usize;
        for k in 1..levels.max(1) {
            let prev = &up[k - 1];
            let next = (0..nv).map(|v| prev[prev[v]]).collect();
            up.push(next);
        }
        LcaIndex {
            up,
            depth: tree.vertex_height.clone(),
        }
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth[u] < self.depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let mut diff = self.depth[u] - self.depth[v];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                u = self.up[k][u];
            }
            diff >>= 1;
            k += 1;
        }
        if u == v {
            return u;
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][u] != self.up[k][v] {
                u = self.up[k][u];
                v = self.up[k][v];
            }
        }
        self.up[0][u]
    }

    pub fn distance(&self, u: usize, v: usize) -> i64 {
        let w = self.lca(u, v);
        self.depth[u] + self.depth[v] - 2 * self.depth[w]
    }
}

/// A rooted plane tree in depth-first order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneTree {
    /// `parent[v]` for `v >= 1`; `parent[0]` is `None`.
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl PlaneTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Same shape as `tree` as rooted plane trees: simultaneous DFS
    /// comparing ordered child counts.
    pub fn isomorphic_to(&self, tree: &CircleTree) -> bool {
        if self.len() != tree.n_vertices() {
            return false;
        }
        let mut stack = vec![(0usize, 0usize)];
        while let Some((a, b)) = stack.pop() {
            let (ca, cb) = (&self.children[a], tree.children(b));
            if ca.len() != cb.len() {
                return false;
            }
            stack.extend(ca.iter().copied().zip(cb.iter().copied()));
        }
        true
    }
}

/// Independent Dyck-word parser: push on `+1`, pop on `-1`.
pub fn plane_tree_oracle(steps: &[i8]) -> Result<PlaneTree> {
    let mut parent = vec![None];
    let mut children = vec![Vec::new()];
    let mut path = vec![0usize];
    for (i, &s) in steps.iter().enumerate() {
        match s {
            1 => {
                let v = parent.len();
                let top = *path.last().unwrap();
                parent.push(Some(top));
                children.push(Vec::new());
                children[top].push(v);
                path.push(v);
            }
            -1 => {
                if path.len() == 1 {
                    return Err(Error::InvalidExcursion(format!(
                        "unbalanced: pop below root at step {i}"
                    )));
                }
                path.pop();
            }
            other => return Err(Error::InvalidExcursion(format!("step {i} is {other}"))),
        }
    }
    if path.len() != 1 {
        return Err(Error::InvalidExcursion(format!(
            "unbalanced: {} unmatched up-steps",
            path.len() - 1
        )));
    }
    Ok(PlaneTree { parent, children })
}

/// Histogram `class size -> number of classes`, sizes counted in contour
/// times `0..=2n` (the root owns both `0` and `2n`).
pub fn class_histogram(tree: &CircleTree) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for v in 0..tree.n_vertices() {
        *hist.entry(tree.visits(v).len()).or_insert(0) += 1;
    }
    hist
}

/// Number of macroscopically separated visits of every class: circle visits
/// are merged whenever the cyclic gap between consecutive ones is below
/// `min_gap`.
pub fn separated_class_sizes(tree: &CircleTree, min_gap: usize) -> Vec<usize> {
    let period = tree.period();
    (0..tree.n_vertices())
        .map(|v| {
            let vs = tree.circle_visits(v);
            let gaps = (0..vs.len())
                .filter(|&i| {
                    let next = if i + 1 < vs.len() {
                        vs[i + 1]
                    } else {
                        vs[0] + period
                    };
                    next - vs[i] >= min_gap
                })
                .count();
            gaps.max(1)
        })
        .collect()
}

/// Fraction of classes with at least 4 separated visits among those with at
/// least 2, at separation `eps * n`.
pub fn large_class_fraction(tree: &CircleTree, eps: f64) -> f64 {
    let min_gap = ((eps * tree.n() as f64).ceil() as usize).max(1);
    let sizes = separated_class_sizes(tree, min_gap);
    let nontrivial = sizes.iter().filter(|&&s| s >= 2).count();
    if nontrivial == 0 {
        return 0.0;
    }
    sizes.iter().filter(|&&s| s >= 4).count() as f64 / nontrivial as f64
}

/// First failing pseudo-metric axiom, with the times involved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MetricViolation {
    Diagonal {
        a: usize,
        d: i64,
    },
    Negative {
        a: usize,
        b: usize,
        d: i64,
    },
    Asymmetric {
        a: usize,
        b: usize,
        ab: i64,
        ba: i64,
    },
    Triangle {
        a: usize,
        b: usize,
        c: usize,
        ac: i64,
        ab: i64,
        bc: i64,
    },
}

/// Checks nonnegativity, symmetry, the zero diagonal and the triangle
/// inequality of `d` on `trials` random triples of times.
pub fn verify_pseudometric<C: Coding>(
    coding: &C,
    trials: usize,
    seed: u64,
) -> Result<(), MetricViolation> {
    let mut rng = rng::stream(seed, tags::TRIALS);
    let top = coding.period();
    for _ in 0..trials {
        let a = rng.gen_range(0..=top);
        let b = rng.gen_range(0..=top);
        let c = rng.gen_range(0..=top);
        let daa = coding.d(a, a);
        if daa != 0 {
            return Err(MetricViolation::Diagonal { a, d: daa });
        }
        let (ab, ba, bc, ac) = (
            coding.d(a, b),
            coding.d(b, a),
            coding.d(b, c),
            coding.d(a, c),
        );
        if ab < 0 {
            return Err(MetricViolation::Negative { a, b, d: ab });
        }
        if ab != ba {
            return Err(MetricViolation::Asymmetric { a, b, ab, ba });
        }
        if ac > ab + bc {
            return Err(MetricViolation::Triangle {
                a,
                b,
                c,
                ac,
                ab,
                bc,
            });
        }
    }
    Ok(())
}

/// Tree export: parent array plus the class map indexed by time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeFile {
    pub n: usize,
    pub parent: Vec<i64>,
    pub class_id: Vec<usize>,
}

impl From<&CircleTree> for TreeFile {
    fn from(t: &CircleTree) -> Self {
        TreeFile {
            n: t.n(),
            parent: t.parent_array(),
            class_id: t.class_ids().to_vec(),
        }
    }
}
