//! Labelled trees and mobiles, and the corner-successor construction that
//! turns them into pointed rooted 2k-angulations.
//!
//! Each white corner is joined to the next corner in contour order whose
//! label is one less, or to an extra vertex `v*` when no such corner exists.
//! Tree edges are then forgotten. Graph distances from `v*` are
//! `label - min label + 1`.

use rand::seq::index;
use rand::Rng as _;

use super::PlanarMap;
use crate::circle_tree::{build_circle_tree, CircleTree};
use crate::error::{Error, Result};
use crate::excursion::sample_dyck_excursion;
use crate::rng::{self, tags};
use crate::snake::{sample_labels, IncrementLaw, LabelFunction};

/// White corners of a labelled tree or mobile in contour order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTree {
    pub k: usize,
    pub n_faces: usize,
    pub labels: Vec<i64>,
    pub corner_vertex: Vec<usize>,
}

impl LabeledTree {
    /// The plane tree of a contour with its snake labels; one corner per
    /// contour time `0..2n`.
    pub fn from_contour(tree: &CircleTree, z: &LabelFunction) -> Result<Self> {
        if tree.n_edges() == 0 {
            return Err(Error::Empty("tree has no edges"));
        }
        let labels = z.vertex_labels().to_vec();
        if labels.len() != tree.n_vertices() {
            return Err(Error::InvalidLabels("one label per vertex expected".into()));
        }
        for v in 1..tree.n_vertices() {
            if (labels[v] - labels[tree.parent(v).unwrap()]).abs() > 1 {
                return Err(Error::InvalidLabels(format!(
                    "increment out of {{-1, 0, 1}} at vertex {v}"
                )));
            }
        }
        Ok(LabeledTree {
            k: 2,
            n_faces: tree.n(),
            labels,
            corner_vertex: tree.class_ids()[..tree.period()].to_vec(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn corner_label(&self, c: usize) -> i64 {
        self.labels[self.corner_vertex[c]]
    }
}

/// Uniform labelled mobile with `n` black vertices of degree `k`: white
/// vertices carry labels, and around each black vertex the labels of its
/// white neighbours, read in contour order, drop by at most one per step.
pub fn sample_mobile(n: usize, k: usize, seed: u64) -> Result<LabeledTree> {
    if k < 2 {
        return Err(Error::UnsupportedK(k));
    }
    if n == 0 {
        return Err(Error::InvalidSize(
            "a mobile needs at least one black vertex".into(),
        ));
    }
    let mut rng = rng::stream(seed, tags::MOBILE);
    let whites = (k - 1) * n + 1;

    // black-child counts: uniform weak composition of n into `whites` parts
    let mut bars: Vec<usize> = index::sample(&mut rng, n + whites - 1, whites - 1).into_vec();
    bars.sort_unstable();
    let mut counts = Vec::with_capacity(whites);
    let mut prev = 0usize;
    for (i, &b) in bars.iter().enumerate() {
        counts.push(b - i - prev);
        prev = b - i;
    }
    counts.push(n - prev);

    // cycle lemma on the steps c (k - 1) - 1
    let mut sum = 0i64;
    let mut best = i64::MAX;
    let mut cut = 0;
    for (i, &c) in counts.iter().enumerate() {
        sum += (c * (k - 1)) as i64 - 1;
        if sum < best {
            best = sum;
            cut = i + 1;
        }
    }
    counts.rotate_left(cut % whites);

    // preorder decoding: blacks[w][j] lists the white children of the j-th
    // black child of w
    let mut blacks: Vec<Vec<Vec<usize>>> = counts
        .iter()
        .map(|&c| vec![Vec::with_capacity(k - 1); c])
        .collect();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (w, &c) in counts.iter().enumerate() {
        if w > 0 {
            let top = stack.last_mut().expect("Lukasiewicz word decodes");
            let (p, used) = *top;
            blacks[p][used / (k - 1)].push(w);
            top.1 += 1;
            if top.1 == counts[p] * (k - 1) {
                stack.pop();
            }
        }
        if c > 0 {
            stack.push((w, 0));
        }
    }
    debug_assert!(stack.is_empty());

    // labels: increments around each black are a uniform weak composition
    // of k into k parts, shifted by -1
    let mut labels = vec![0i64; whites];
    for w in 0..whites {
        for j in 0..blacks[w].len() {
            let mut cuts: Vec<usize> = index::sample(&mut rng, 2 * k - 1, k - 1).into_vec();
            cuts.sort_unstable();
            let mut label = labels[w];
            let mut prev = 0usize;
            for (i, &u) in blacks[w][j].iter().enumerate() {
                let y = cuts[i] - i - prev;
                prev = cuts[i] - i;
                label += y as i64 - 1;
                labels[u] = label;
            }
        }
    }

    // contour of white corners
    let mut corner_vertex = Vec::with_capacity(k * n);
    let mut frames: Vec<(usize, usize, usize)> = vec![(0, 0, 0)];
    corner_vertex.push(0);
    while let Some(&(w, j, i)) = frames.last() {
        if j == blacks[w].len() {
            frames.pop();
            if let Some(parent) = frames.last_mut() {
                parent.2 += 1;
                if parent.2 == k - 1 {
                    parent.1 += 1;
                    parent.2 = 0;
                    let (pw, pj) = (parent.0, parent.1);
                    if !(pw == 0 && pj == blacks[pw].len()) {
                        corner_vertex.push(pw);
                    }
                }
            }
            continue;
        }
        let u = blacks[w][j][i];
        frames.push((u, 0, 0));
        corner_vertex.push(u);
    }
    debug_assert_eq!(corner_vertex.len(), k * n);
    Ok(LabeledTree {
        k,
        n_faces: n,
        labels,
        corner_vertex,
    })
}

/// A pointed rooted map with the labels it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledMap {
    pub map: PlanarMap,
    /// Label per map vertex; the pointed vertex carries `min - 1`.
    pub labels: Vec<i64>,
    pub pointed: usize,
}

/// The corner-successor construction. The root is the edge from corner 0,
/// leaving the tree when `positive` and entering it otherwise.
pub fn corner_successor_map(tree: &LabeledTree, positive: bool) -> Result<LabeledMap> {
    let m = tree.corner_vertex.len();
    let nv = tree.n_vertices();
    if m == 0 {
        return Err(Error::Empty("tree has no corners"));
    }
    let label = |c: usize| tree.corner_label(c);
    let lmin = (0..m).map(label).min().unwrap();
    let lmax = (0..m).map(label).max().unwrap();
    let slot = |l: i64| (l - lmin + 1) as usize;

    // succ[i]: next corner with label one less, within one lap
    let mut succ = vec![usize::MAX; m];
    let mut last_seen = vec![usize::MAX; (lmax - lmin + 2) as usize];
    for j in (0..2 * m).rev() {
        let p = j % m;
        if j < m {
            let s = last_seen[slot(label(p) - 1)];
            if s != usize::MAX {
                succ[p] = s % m;
            }
        }
        last_seen[slot(label(p))] = j;
    }

    let mut corners_of: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for c in 0..m {
        corners_of[tree.corner_vertex[c]].push(c);
    }
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut to_star = Vec::new();
    for j in 0..m {
        match succ[j] {
            usize::MAX => to_star.push(2 * j + 1),
            s => incoming[s].push(j),
        }
    }
    for (i, inc) in incoming.iter_mut().enumerate() {
        inc.sort_unstable_by_key(|&j| std::cmp::Reverse((i + m - j) % m));
    }

    let mut next = vec![usize::MAX; 2 * m];
    let mut link = |rot: &[usize]| {
        for (t, &d) in rot.iter().enumerate() {
            next[d] = rot[(t + 1) % rot.len()];
        }
    };
    let mut rot = Vec::new();
    for corners in &corners_of {
        rot.clear();
        for &c in corners.iter().rev() {
            rot.push(2 * c);
            rot.extend(incoming[c].iter().map(|&j| 2 * j + 1));
        }
        link(&rot);
    }
    link(&to_star);
    let opp: Vec<usize> = (0..2 * m).map(|d| d ^ 1).collect();
    let map = PlanarMap::new(next, opp, usize::from(!positive), tree.k)?;

    let mut labels = vec![0i64; map.n_vertices()];
    for c in 0..m {
        labels[map.tail(2 * c)] = label(c);
    }
    let pointed = map.tail(to_star[0]);
    labels[pointed] = lmin - 1;
    Ok(LabeledMap {
        map,
        labels,
        pointed,
    })
}

/// Uniform rooted quadrangulation with `n` faces (pointed at `v*`).
pub fn sample_quadrangulation(n: usize, seed: u64) -> Result<LabeledMap> {
    let e = sample_dyck_excursion(n, seed)?;
    let tree = build_circle_tree(&e);
    let z = sample_labels(&tree, IncrementLaw::Uniform3, seed)?;
    let lt = LabeledTree::from_contour(&tree, &z)?;
    corner_successor_map(&lt, rng::stream(seed, tags::ROOT_SIGN).gen())
}

/// Uniform rooted 2k-angulation with `n` faces (pointed at `v*`).
pub fn sample_2k_angulation(n: usize, k: usize, seed: u64) -> Result<LabeledMap> {
    let mobile = sample_mobile(n, k, seed)?;
    corner_successor_map(&mobile, rng::stream(seed, tags::ROOT_SIGN).gen())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMismatch {
    pub vertex: usize,
    pub bfs: u32,
    pub expected: i64,
}

/// BFS distance from the pointed vertex equals `label - min label + 1`
/// for every other vertex, the minimum taken over those vertices.
pub fn cvs_distance_audit(
    map: &PlanarMap,
    labels: &[i64],
    pointed: usize,
) -> Result<(), DistanceMismatch> {
    let dist = super::bfs_distances(map, pointed);
    let min = labels
        .iter()
        .enumerate()
        .filter(|&(v, _)| v != pointed)
        .map(|(_, &l)| l)
        .min()
        .unwrap_or(0);
    for (v, &d) in dist.iter().enumerate() {
        let expected = if v == pointed { 0 } else { labels[v] - min + 1 };
        if i64::from(d) != expected {
            return Err(DistanceMismatch {
                vertex: v,
                bfs: d,
                expected,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar_maps::bfs_distances;

    fn audit(lm: &LabeledMap) {
        assert_eq!(cvs_distance_audit(&lm.map, &lm.labels, lm.pointed), Ok(()));
    }

    #[test]
    fn one_face_quadrangulations() {
        for seed in 0..20 {
            let lm = sample_quadrangulation(1, seed).unwrap();
            let m = &lm.map;
            assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (3, 2, 1));
            audit(&lm);
        }
    }

    #[test]
    fn hexangulation_with_one_face() {
        let lm = sample_2k_angulation(1, 3, 0).unwrap();
        let m = &lm.map;
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (4, 3, 1));
        assert_eq!(m.faces()[0].len(), 6);
    }

    #[test]
    fn sampled_maps_are_valid() {
        for k in 2..=5 {
            for seed in 0..30 {
                let n = 1 + (seed as usize * 13) % 200;
                let lm = sample_2k_angulation(n, k, seed).unwrap();
                let m = &lm.map;
                assert_eq!(m.n_vertices(), (k - 1) * n + 2);
                assert_eq!(m.n_faces(), n);
                assert!(m.faces().iter().all(|f| f.len() == 2 * k));
                assert!(m.bipartition().is_some());
                audit(&lm);
            }
        }
        for seed in 0..30 {
            let lm = sample_quadrangulation(500 + seed as usize, seed).unwrap();
            assert_eq!(lm.map.n_vertices(), 502 + seed as usize);
            audit(&lm);
        }
    }

    #[test]
    fn mobile_label_constraints() {
        for seed in 0..50 {
            let t = sample_mobile(40, 3, seed).unwrap();
            assert_eq!(t.n_vertices(), 81);
            assert_eq!(t.corner_vertex.len(), 120);
            assert_eq!(t.labels[0], 0);
        }
    }

    #[test]
    fn corrupted_labels_fail_the_audit() {
        let lm = sample_quadrangulation(200, 3).unwrap();
        let mut labels = lm.labels.clone();
        let v = (lm.pointed + 1) % labels.len();
        labels[v] += 1;
        let err = cvs_distance_audit(&lm.map, &labels, lm.pointed).unwrap_err();
        assert_eq!(err.vertex, v);
    }

    #[test]
    fn distances_symmetric() {
        let m = sample_quadrangulation(300, 9).unwrap().map;
        let rows: Vec<Vec<u32>> = (0..20).map(|v| bfs_distances(&m, v)).collect();
        for u in 0..20 {
            assert_eq!(rows[u][u], 0);
            for v in 0..20 {
                assert_eq!(rows[u][v], rows[v][u]);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            sample_2k_angulation(5, 1, 0),
            Err(Error::UnsupportedK(1))
        ));
        assert!(sample_2k_angulation(0, 2, 0).is_err());
        assert!(sample_quadrangulation(0, 0).is_err());
    }

    #[test]
    fn root_orientation_follows_sign() {
        let t = sample_mobile(10, 2, 4).unwrap();
        let a = corner_successor_map(&t, true).unwrap();
        let b = corner_successor_map(&t, false).unwrap();
        assert_eq!(a.map.root(), b.map.opp(b.map.root()));
    }
}
