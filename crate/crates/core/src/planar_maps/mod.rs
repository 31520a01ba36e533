//! Rooted planar maps as rotation systems, with uniform samplers for
//! quadrangulations and 2k-angulations, BFS kernels and the short-cycle
//! bottleneck scan.
//!
//! Half-edges (darts) are `0..2E`. `opp` is the edge involution, `next` the
//! counterclockwise successor around the tail vertex, and the face to the
//! left of a dart is traced by `d -> next[opp[d]]`.

mod bijection;
mod bottleneck;

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::least_squares;

pub use bijection::{
    corner_successor_map, cvs_distance_audit, sample_2k_angulation, sample_mobile,
    sample_quadrangulation, DistanceMismatch, LabeledMap, LabeledTree,
};
pub use bottleneck::{
    bottleneck_scan, cycle_sides, glue_along_faces, injective_cycles, Bottleneck,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarMap {
    next: Vec<usize>,
    opp: Vec<usize>,
    vertex_of: Vec<usize>,
    root: usize,
    k: usize,
    n_faces: usize,
    n_vertices: usize,
}

/// On-disk form of a map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub k: usize,
    pub n_faces: usize,
    pub root: usize,
    pub next: Vec<usize>,
    pub opp: Vec<usize>,
}

impl PlanarMap {
    /// Builds and validates a map: `next` and `opp` permutations, `opp` a
    /// fixed-point-free involution, connected, genus zero, every face of
    /// degree `2k`.
    pub fn new(next: Vec<usize>, opp: Vec<usize>, root: usize, k: usize) -> Result<Self> {
        let darts = next.len();
        if darts == 0 || opp.len() != darts || !darts.is_multiple_of(2) {
            return Err(Error::InvalidMap(format!(
                "{} next / {} opp entries",
                darts,
                opp.len()
            )));
        }
        if k < 1 {
            return Err(Error::UnsupportedK(k));
        }
        if root >= darts {
            return Err(Error::OutOfRange {
                index: root,
                max: darts - 1,
            });
        }
        if !is_permutation(&next) || !is_permutation(&opp) {
            return Err(Error::InvalidMap(
                "next and opp must be permutations".into(),
            ));
        }
        if (0..darts).any(|d| opp[d] == d || opp[opp[d]] != d) {
            return Err(Error::InvalidMap(
                "opp must be a fixed-point-free involution".into(),
            ));
        }
        let (vertex_of, n_vertices) = cycles(&next);
        let mut map = PlanarMap {
            next,
            opp,
            vertex_of,
            root,
            k,
            n_faces: 0,
            n_vertices,
        };
        let faces = map.faces();
        if let Some(f) = faces.iter().find(|f| f.len() != 2 * k) {
            return Err(Error::InvalidMap(format!(
                "face of degree {} in a {}-angulation",
                f.len(),
                2 * k
            )));
        }
        map.n_faces = faces.len();
        if !map.is_connected() {
            return Err(Error::InvalidMap("map is not connected".into()));
        }
        let euler = map.n_vertices as i64 - map.n_edges() as i64 + map.n_faces as i64;
        if euler != 2 {
            return Err(Error::InvalidMap(format!("V - E + F = {euler}")));
        }
        Ok(map)
    }

    pub fn from_file(file: MapFile) -> Result<Self> {
        let map = Self::new(file.next, file.opp, file.root, file.k)?;
        if map.n_faces != file.n_faces {
            return Err(Error::InvalidMap(format!(
                "{} faces, file says {}",
                map.n_faces, file.n_faces
            )));
        }
        Ok(map)
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            k: self.k,
            n_faces: self.n_faces,
            root: self.root,
            next: self.next.clone(),
            opp: self.opp.clone(),
        }
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_file(serde_json::from_str(&text)?)
    }

    pub fn n_darts(&self) -> usize {
        self.next.len()
    }

    pub fn n_edges(&self) -> usize {
        self.next.len() / 2
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_faces(&self) -> usize {
        self.n_faces
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_vertex(&self) -> usize {
        self.vertex_of[self.root]
    }

    pub fn next(&self, d: usize) -> usize {
        self.next[d]
    }

    pub fn opp(&self, d: usize) -> usize {
        self.opp[d]
    }

    /// Tail vertex of a dart.
    pub fn tail(&self, d: usize) -> usize {
        self.vertex_of[d]
    }

    pub fn head(&self, d: usize) -> usize {
        self.vertex_of[self.opp[d]]
    }

    /// Next dart along the face on the left of `d`.
    pub fn face_next(&self, d: usize) -> usize {
        self.next[self.opp[d]]
    }

    pub fn vertex_of(&self) -> &[usize] {
        &self.vertex_of
    }

    /// Dart cycles of `face_next`, each starting at its smallest dart.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_darts()];
        let mut faces = Vec::new();
        for d0 in 0..self.n_darts() {
            if seen[d0] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = d0;
            while !seen[d] {
                seen[d] = true;
                face.push(d);
                d = self.face_next(d);
            }
            faces.push(face);
        }
        faces
    }

    /// Outgoing darts per vertex in counterclockwise order.
    pub fn rotations(&self) -> Vec<Vec<usize>> {
        let mut first = vec![usize::MAX; self.n_vertices];
        for d in (0..self.n_darts()).rev() {
            first[self.vertex_of[d]] = d;
        }
        first
            .iter()
            .map(|&d0| {
                let mut rot = vec![d0];
                let mut d = self.next[d0];
                while d != d0 {
                    rot.push(d);
                    d = self.next[d];
                }
                rot
            })
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertex_of.iter().filter(|&&u| u == v).count()
    }

    fn is_connected(&self) -> bool {
        bfs_distances(self, 0).iter().all(|&d| d != UNREACHED)
    }

    /// Two-colouring of the vertices if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let dist = bfs_distances(self, 0);
        let ok = (0..self.n_darts()).all(|d| (dist[self.tail(d)] + dist[self.head(d)]) % 2 == 1);
        ok.then(|| dist.iter().map(|&x| x % 2 == 1).collect())
    }

    /// The same map rooted at another dart.
    pub fn rerooted(&self, root: usize) -> Self {
        assert!(root < self.n_darts());
        PlanarMap {
            root,
            ..self.clone()
        }
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// Cycle index of every element under `p`, and the number of cycles.
fn cycles(p: &[usize]) -> (Vec<usize>, usize) {
    let mut id = vec![usize::MAX; p.len()];
    let mut count = 0;
    for s in 0..p.len() {
        if id[s] != usize::MAX {
            continue;
        }
        let mut x = s;
        while id[x] == usize::MAX {
            id[x] = count;
            x = p[x];
        }
        count += 1;
    }
    (id, count)
}

pub const UNREACHED: u32 = u32::MAX;

/// Graph distances from `source` to every vertex.
pub fn bfs_distances(map: &PlanarMap, source: usize) -> Vec<u32> {
    let adj = Adjacency::new(map);
    adj.bfs(source)
}

/// Compressed vertex adjacency of a map, in rotation order.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    pub fn new(map: &PlanarMap) -> Self {
        let rot = map.rotations();
        let mut offsets = Vec::with_capacity(rot.len() + 1);
        let mut targets = Vec::with_capacity(map.n_darts());
        offsets.push(0);
        for r in &rot {
            targets.extend(r.iter().map(|&d| map.head(d)));
            offsets.push(targets.len());
        }
        Adjacency { offsets, targets }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.n_vertices()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if dist[w] == UNREACHED {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallGrowth {
    pub radii: Vec<u32>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `log |B_r|` against `log r` over
    /// `n^(1/8) <= r <= n^(1/4)`; `NaN` when fewer than two radii fall there.
    pub exponent: f64,
}

/// Ball sizes `|B_r(center)|` for the given radii, from one BFS.
pub fn ball_growth_profile(map: &PlanarMap, center: usize, radii: &[u32]) -> Result<BallGrowth> {
    if center >= map.n_vertices() {
        return Err(Error::OutOfRange {
            index: center,
            max: map.n_vertices() - 1,
        });
    }
    let dist = bfs_distances(map, center);
    let ecc = *dist.iter().max().unwrap() as usize;
    let mut layer = vec![0usize; ecc + 1];
    for &d in &dist {
        layer[d as usize] += 1;
    }
    let mut cumulative = layer.clone();
    for i in 1..cumulative.len() {
        cumulative[i] += cumulative[i - 1];
    }
    let counts: Vec<usize> = radii
        .iter()
        .map(|&r| cumulative[(r as usize).min(ecc)])
        .collect();
    let n = map.n_faces() as f64;
    let (lo, hi) = (n.powf(0.125), n.powf(0.25));
    let (x, y): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(&counts)
        .filter(|(&r, _)| r >= 1 && r as f64 >= lo && r as f64 <= hi)
        .map(|(&r, &c)| ((r as f64).ln(), (c as f64).ln()))
        .unzip();
    let exponent = if x.len() >= 2 {
        least_squares(&x, &y).slope
    } else {
        f64::NAN
    };
    Ok(BallGrowth {
        radii: radii.to_vec(),
        counts,
        exponent,
    })
}

/// Every integer radius in the fit window `[n^(1/8), n^(1/4)]`.
pub fn growth_window(n_faces: usize) -> Vec<u32> {
    let n = n_faces as f64;
    let lo = n.powf(0.125).ceil().max(1.0) as u32;
    let hi = n.powf(0.25).floor() as u32;
    (lo..=hi).collect()
}

/// Canonical code of the rooted map: darts relabelled in breadth-first order
/// from the root along `next` and `opp`, then the two permutations listed in
/// the new labels. Two rooted maps are isomorphic iff their codes agree.
pub fn canonical_code(map: &PlanarMap) -> Vec<u32> {
    let darts = map.n_darts();
    let mut label = vec![u32::MAX; darts];
    let mut order = Vec::with_capacity(darts);
    label[map.root] = 0;
    order.push(map.root);
    let mut head = 0;
    while head < order.len() {
        let d = order[head];
        head += 1;
        for e in [map.next[d], map.opp[d]] {
            if label[e] == u32::MAX {
                label[e] = order.len() as u32;
                order.push(e);
            }
        }
    }
    let mut code = Vec::with_capacity(2 * darts);
    for &d in &order {
        code.push(label[map.next[d]]);
        code.push(label[map.opp[d]]);
    }
    code
}
