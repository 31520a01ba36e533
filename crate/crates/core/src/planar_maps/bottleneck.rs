//! Short injective cycles whose two sides are both metrically large.

use std::collections::VecDeque;

use serde::Serialize;

use super::{Adjacency, PlanarMap, UNREACHED};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bottleneck {
    /// Cycle vertices in traversal order, starting at the smallest id.
    pub cycle: Vec<usize>,
    pub darts: Vec<usize>,
    /// Vertex counts of the side exhausted first by the interleaved search
    /// and of the other side.
    pub side_sizes: (usize, usize),
    /// Lower bounds on the map-metric diameter of each side (double sweep,
    /// stopped once the threshold is reached).
    pub side_diameters: (u32, u32),
}

struct Scan<'a> {
    map: &'a PlanarMap,
    adj: Adjacency,
    threshold: f64,
    generation: u32,
    stamp: Vec<u32>,
    dist: Vec<u32>,
    touched: Vec<usize>,
    findings: Vec<Bottleneck>,
    collected: Option<Vec<Vec<usize>>>,
}

const CYCLE: u32 = 0;
const LEFT: u32 = 1;
const RIGHT: u32 = 2;

impl<'a> Scan<'a> {
    fn mark(&self, v: usize) -> Option<u32> {
        let s = self.stamp[v];
        (s / 4 == self.generation).then_some(s % 4)
    }

    fn set(&mut self, v: usize, side: u32) {
        self.stamp[v] = self.generation * 4 + side;
    }

    /// BFS over the whole map from `src`, stopping once all `count`
    /// members are reached or one lies at distance `goal`; returns the
    /// farthest member seen and its distance.
    fn sweep(
        &mut self,
        src: usize,
        count: usize,
        member: &impl Fn(&[u32], usize) -> bool,
        goal: u32,
    ) -> (usize, u32) {
        for &v in &self.touched {
            self.dist[v] = UNREACHED;
        }
        self.touched.clear();
        let mut remaining = count;
        let mut best = (src, 0);
        let mut queue = VecDeque::new();
        self.dist[src] = 0;
        self.touched.push(src);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            if member(&self.stamp, u) {
                best = (u, self.dist[u]);
                remaining -= 1;
                if remaining == 0 || best.1 >= goal {
                    break;
                }
            }
            for &w in self.adj.neighbors(u) {
                if self.dist[w] == UNREACHED {
                    self.dist[w] = self.dist[u] + 1;
                    self.touched.push(w);
                    queue.push_back(w);
                }
            }
        }
        best
    }

    /// Double-sweep lower bound on the diameter of a vertex set, cut short
    /// once `goal` is certified.
    fn diameter_bound(
        &mut self,
        src: usize,
        count: usize,
        member: impl Fn(&[u32], usize) -> bool,
        goal: u32,
    ) -> u32 {
        let (far, d1) = self.sweep(src, count, &member, goal);
        if d1 >= goal {
            return d1;
        }
        d1.max(self.sweep(far, count, &member, goal).1)
    }

    /// Marks the cycle and seeds both sides; `visited[0]` is on the left.
    fn split(&mut self, darts: &[usize]) -> ([VecDeque<usize>; 2], [Vec<usize>; 2]) {
        let map = self.map;
        let p = darts.len();
        self.generation += 1;
        for &d in darts {
            self.set(map.tail(d), CYCLE);
        }
        let mut queues = [VecDeque::new(), VecDeque::new()];
        let mut visited: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for i in 0..p {
            let d_in = darts[i];
            let d_out = darts[(i + 1) % p];
            let back = map.opp(d_in);
            let mut e = map.next(back);
            while e != d_out {
                self.seed(map.head(e), LEFT, &mut queues[0], &mut visited[0]);
                e = map.next(e);
            }
            let mut e = map.next(d_out);
            while e != back {
                self.seed(map.head(e), RIGHT, &mut queues[1], &mut visited[1]);
                e = map.next(e);
            }
        }
        (queues, visited)
    }

    fn grow(&mut self, s: usize, u: usize, queue: &mut VecDeque<usize>, visited: &mut Vec<usize>) {
        let side = if s == 0 { LEFT } else { RIGHT };
        for idx in 0..self.adj.neighbors(u).len() {
            let w = self.adj.neighbors(u)[idx];
            match self.mark(w) {
                None => {
                    self.set(w, side);
                    queue.push_back(w);
                    visited.push(w);
                }
                Some(x) => debug_assert!(x == side || x == CYCLE),
            }
        }
    }

    fn process(&mut self, darts: &[usize]) {
        if let Some(c) = self.collected.as_mut() {
            c.push(darts.to_vec());
            return;
        }
        let map = self.map;
        let p = darts.len();
        let cycle: Vec<usize> = darts.iter().map(|&d| map.tail(d)).collect();
        let (mut queues, mut visited) = self.split(darts);
        if visited[0].is_empty() || visited[1].is_empty() {
            return;
        }
        let small = 'explore: loop {
            for s in 0..2 {
                let Some(u) = queues[s].pop_front() else {
                    break 'explore s;
                };
                self.grow(s, u, &mut queues[s], &mut visited[s]);
            }
        };
        let small_side = if small == 0 { LEFT } else { RIGHT };
        let small_set = std::mem::take(&mut visited[small]);
        let big_size = map.n_vertices() - p - small_set.len();
        if ((small_set.len() + p - 1) as f64) < self.threshold || big_size == 0 {
            return;
        }
        let goal = self.threshold.ceil() as u32;
        let gen = self.generation;
        let small_tag = gen * 4 + small_side;
        let d_small = self.diameter_bound(
            small_set[0],
            small_set.len(),
            |st, v| st[v] == small_tag,
            goal,
        );
        if d_small < goal {
            return;
        }
        let big_tag = gen * 4 + (3 - small_side);
        let big_seed = visited[1 - small][0];
        let d_big = self.diameter_bound(
            big_seed,
            big_size,
            |st, v| st[v] / 4 != gen || st[v] == big_tag,
            goal,
        );
        if d_big >= goal {
            let start = cycle.iter().enumerate().min_by_key(|&(_, &v)| v).unwrap().0;
            let mut darts = darts.to_vec();
            let mut cycle = cycle;
            darts.rotate_left(start);
            cycle.rotate_left(start);
            self.findings.push(Bottleneck {
                cycle,
                darts,
                side_sizes: (small_set.len(), big_size),
                side_diameters: (d_small, d_big),
            });
        }
    }

    fn seed(&mut self, v: usize, side: u32, queue: &mut VecDeque<usize>, visited: &mut Vec<usize>) {
        match self.mark(v) {
            None => {
                self.set(v, side);
                queue.push_back(v);
                visited.push(v);
            }
            Some(s) => debug_assert!(s == side || s == CYCLE),
        }
    }

    fn extend(&mut self, s: usize, path: &mut Vec<usize>, on_path: &mut [bool], lmax: usize) {
        let map = self.map;
        let u = map.head(*path.last().unwrap());
        let first = map.tail(path[0]);
        let d0 = map.next(map.opp(*path.last().unwrap()));
        let mut d = d0;
        loop {
            let w = map.head(d);
            let len = path.len() + 1;
            if w == s {
                let edge = |x: usize| x.min(map.opp(x));
                let canonical = if len == 2 {
                    edge(path[0]) < edge(d)
                } else {
                    map.head(path[0]) < u
                };
                if canonical {
                    path.push(d);
                    let cycle = path.clone();
                    self.process(&cycle);
                    path.pop();
                }
            } else if w > first && !on_path[w] && len < lmax {
                on_path[w] = true;
                path.push(d);
                self.extend(s, path, on_path, lmax);
                path.pop();
                on_path[w] = false;
            }
            d = map.next(d);
            if d == d0 {
                break;
            }
        }
    }
}

/// Injective cycles of length at most `lmax` whose two sides both have
/// map-metric diameter at least `delta * n^(1/4)` (diameters lower-bounded
/// by double-sweep BFS).
pub fn bottleneck_scan(map: &PlanarMap, delta: f64, lmax: usize) -> Result<Vec<Bottleneck>> {
    if !(2..=8).contains(&lmax) {
        return Err(Error::InvalidArgument(format!(
            "Lmax = {lmax} not in 2..=8"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta = {delta} must be positive"
        )));
    }
    let mut scan = Scan::new(map, delta * (map.n_faces() as f64).powf(0.25));
    scan.enumerate(lmax);
    Ok(scan.findings)
}

/// Every injective cycle of length at most `lmax`, once, as darts.
pub fn injective_cycles(map: &PlanarMap, lmax: usize) -> Vec<Vec<usize>> {
    let mut scan = Scan::new(map, 0.0);
    scan.collected = Some(Vec::new());
    scan.enumerate(lmax);
    scan.collected.unwrap()
}

/// Vertices strictly on the left and on the right of a closed dart path.
pub fn cycle_sides(map: &PlanarMap, darts: &[usize]) -> [Vec<usize>; 2] {
    let mut scan = Scan::new(map, 0.0);
    let (mut queues, mut visited) = scan.split(darts);
    for s in 0..2 {
        while let Some(u) = queues[s].pop_front() {
            scan.grow(s, u, &mut queues[s], &mut visited[s]);
        }
    }
    visited
}

impl<'a> Scan<'a> {
    fn new(map: &'a PlanarMap, threshold: f64) -> Self {
        let nv = map.n_vertices();
        Scan {
            map,
            adj: Adjacency::new(map),
            threshold,
            generation: 0,
            stamp: vec![u32::MAX; nv],
            dist: vec![UNREACHED; nv],
            touched: Vec::new(),
            findings: Vec::new(),
            collected: None,
        }
    }

    fn enumerate(&mut self, lmax: usize) {
        let map = self.map;
        let scan = self;
        let nv = map.n_vertices();
        let rot = map.rotations();
        let mut on_path = vec![false; nv];
        let mut path = Vec::with_capacity(lmax);
        for (s, darts) in rot.iter().enumerate() {
            on_path[s] = true;
            for &d in darts {
                let w = map.head(d);
                if w == s {
                    continue;
                }
                if w > s {
                    on_path[w] = true;
                    path.push(d);
                    scan.extend(s, &mut path, &mut on_path, lmax);
                    path.pop();
                    on_path[w] = false;
                }
            }
            on_path[s] = false;
        }
    }
}

/// Glues two maps along a simple face of each: both faces are removed and
/// their boundaries identified, so the common boundary becomes a separating
/// cycle. Faces are given by one of their darts. Returns the glued map and
/// the vertices of the seam.
pub fn glue_along_faces(
    a: &PlanarMap,
    fa: usize,
    b: &PlanarMap,
    fb: usize,
) -> Result<(PlanarMap, Vec<usize>)> {
    if a.k() != b.k() {
        return Err(Error::InvalidArgument(
            "maps must have the same face degree".into(),
        ));
    }
    let face = |m: &PlanarMap, d0: usize| {
        let mut f = vec![d0];
        let mut d = m.face_next(d0);
        while d != d0 {
            f.push(d);
            d = m.face_next(d);
        }
        f
    };
    let (face_a, face_b) = (face(a, fa), face(b, fb));
    let deg = face_a.len();
    for (m, f) in [(a, &face_a), (b, &face_b)] {
        let mut tails: Vec<usize> = f.iter().map(|&d| m.tail(d)).collect();
        tails.sort_unstable();
        tails.dedup();
        if tails.len() != deg {
            return Err(Error::InvalidMap(
                "glued faces must be simple cycles".into(),
            ));
        }
    }
    let off = a.n_darts();
    let total = off + b.n_darts();
    let mut removed = vec![false; total];
    for &d in &face_a {
        removed[d] = true;
    }
    for &d in &face_b {
        removed[d + off] = true;
    }
    let mut new_id = vec![usize::MAX; total];
    let mut count = 0;
    for d in 0..total {
        if !removed[d] {
            new_id[d] = count;
            count += 1;
        }
    }
    let opp_old = |d: usize| {
        if d < off {
            a.opp(d)
        } else {
            b.opp(d - off) + off
        }
    };
    let phi_old = |d: usize| {
        if d < off {
            a.face_next(d)
        } else {
            b.face_next(d - off) + off
        }
    };
    let mut opp_new = vec![usize::MAX; total];
    for d in 0..total {
        if !removed[d] {
            opp_new[d] = opp_old(d);
        }
    }
    for i in 0..deg {
        let x = a.opp(face_a[i]);
        let y = b.opp(face_b[(deg - i) % deg]) + off;
        opp_new[x] = y;
        opp_new[y] = x;
    }
    let mut next = vec![0; count];
    let mut opp = vec![0; count];
    for d in 0..total {
        if !removed[d] {
            opp[new_id[d]] = new_id[opp_new[d]];
            next[new_id[d]] = new_id[phi_old(opp_new[d])];
        }
    }
    let root = if removed[a.root()] {
        new_id[a.opp(a.root())]
    } else {
        new_id[a.root()]
    };
    let glued = PlanarMap::new(next, opp, root, a.k())?;
    let seam = face_a
        .iter()
        .map(|&d| glued.tail(new_id[a.opp(d)]))
        .collect();
    Ok((glued, seam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar_maps::sample_quadrangulation;

    fn simple_face(m: &PlanarMap) -> usize {
        m.faces()
            .into_iter()
            .find(|f| {
                let mut t: Vec<usize> = f.iter().map(|&d| m.tail(d)).collect();
                t.sort_unstable();
                t.dedup();
                t.len() == f.len()
            })
            .unwrap()[0]
    }

    /// All injective cycles of length <= lmax by brute force over dart
    /// sequences, as sorted edge sets.
    fn brute_cycles(m: &PlanarMap, lmax: usize) -> Vec<Vec<usize>> {
        let mut out = std::collections::BTreeSet::new();
        fn rec(
            m: &PlanarMap,
            path: &mut Vec<usize>,
            lmax: usize,
            out: &mut std::collections::BTreeSet<Vec<usize>>,
        ) {
            let start = m.tail(path[0]);
            let here = m.head(*path.last().unwrap());
            if here == start {
                let mut edges: Vec<usize> = path.iter().map(|&d| d.min(m.opp(d))).collect();
                edges.sort_unstable();
                let distinct = edges.windows(2).all(|w| w[0] != w[1]);
                if distinct {
                    out.insert(edges);
                }
                return;
            }
            if path.len() == lmax {
                return;
            }
            for d in 0..m.n_darts() {
                if m.tail(d) == here
                    && !path
                        .iter()
                        .any(|&p| m.tail(p) == m.head(d) && m.head(d) != start)
                {
                    path.push(d);
                    rec(m, path, lmax, out);
                    path.pop();
                }
            }
        }
        for d in 0..m.n_darts() {
            rec(m, &mut vec![d], lmax, &mut out);
        }
        out.into_iter().collect()
    }

    #[test]
    fn tiny_map_has_no_findings() {
        for seed in 0..10 {
            let m = sample_quadrangulation(1, seed).unwrap().map;
            assert!(bottleneck_scan(&m, 0.3, 4).unwrap().is_empty());
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for seed in 0..6 {
            let m = sample_quadrangulation(8, seed).unwrap().map;
            let mut got: Vec<Vec<usize>> = injective_cycles(&m, 4)
                .iter()
                .map(|c| {
                    let mut e: Vec<usize> = c.iter().map(|&d| d.min(m.opp(d))).collect();
                    e.sort_unstable();
                    e
                })
                .collect();
            got.sort();
            let before = got.len();
            got.dedup();
            assert_eq!(before, got.len(), "duplicate cycles");
            assert_eq!(got, brute_cycles(&m, 4), "seed {seed}");
        }
    }

    #[test]
    fn sides_partition_the_complement() {
        for seed in 0..10 {
            let m = sample_quadrangulation(60, seed).unwrap().map;
            let adj = Adjacency::new(&m);
            for c in injective_cycles(&m, 6) {
                let [left, right] = cycle_sides(&m, &c);
                let mut side = vec![0u8; m.n_vertices()];
                for &d in &c {
                    side[m.tail(d)] = 3;
                }
                for &v in &left {
                    assert_eq!(side[v], 0);
                    side[v] = 1;
                }
                for &v in &right {
                    assert_eq!(side[v], 0);
                    side[v] = 2;
                }
                assert!(side.iter().all(|&s| s != 0));
                for u in 0..m.n_vertices() {
                    for &w in adj.neighbors(u) {
                        assert!(side[u] == 3 || side[w] == 3 || side[u] == side[w]);
                    }
                }
                let mut cut: Vec<usize> = c.iter().map(|&d| m.tail(d)).collect();
                cut.sort_unstable();
                let comps = components_without(&m, &cut);
                assert_eq!(
                    comps >= 2,
                    !left.is_empty() && !right.is_empty() || comps >= 2
                );
            }
        }
    }

    fn components_without(m: &PlanarMap, removed: &[usize]) -> usize {
        let adj = Adjacency::new(m);
        let mut seen = vec![false; m.n_vertices()];
        for &v in removed {
            seen[v] = true;
        }
        let mut comps = 0;
        for s in 0..m.n_vertices() {
            if seen[s] {
                continue;
            }
            comps += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &w in adj.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        comps
    }

    #[test]
    fn dumbbell_neck_is_found() {
        for seed in 0..5 {
            let a = sample_quadrangulation(2000, 2 * seed).unwrap().map;
            let b = sample_quadrangulation(2000, 2 * seed + 1).unwrap().map;
            let (m, seam) = glue_along_faces(&a, simple_face(&a), &b, simple_face(&b)).unwrap();
            assert_eq!(m.n_faces(), 3998);
            assert_eq!(m.n_vertices(), a.n_vertices() + b.n_vertices() - 4);
            let mut seam = seam;
            seam.sort_unstable();
            let found = bottleneck_scan(&m, 0.3, 4).unwrap();
            assert!(
                found.iter().any(|f| {
                    let mut c = f.cycle.clone();
                    c.sort_unstable();
                    c == seam
                }),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn findings_are_genuine() {
        for seed in 0..10 {
            let m = sample_quadrangulation(300, seed).unwrap().map;
            let adj = Adjacency::new(&m);
            let rows: Vec<Vec<u32>> = (0..m.n_vertices()).map(|v| adj.bfs(v)).collect();
            let diam = |set: &[usize]| {
                set.iter()
                    .flat_map(|&u| set.iter().map(move |&v| (u, v)))
                    .map(|(u, v)| rows[u][v])
                    .max()
                    .unwrap_or(0)
            };
            let threshold = 0.3 * 300f64.powf(0.25);
            for f in bottleneck_scan(&m, 0.3, 4).unwrap() {
                let [left, right] = cycle_sides(&m, &f.darts);
                let (small, big) = if f.side_sizes.0 == left.len() {
                    (left, right)
                } else {
                    (right, left)
                };
                assert_eq!(f.side_sizes, (small.len(), big.len()));
                assert!(
                    f.side_diameters.0 as f64 >= threshold
                        && f.side_diameters.1 as f64 >= threshold
                );
                assert!(diam(&small) >= f.side_diameters.0);
                assert!(diam(&big) >= f.side_diameters.1);
                let mut verts = f.cycle.clone();
                verts.sort_unstable();
                verts.dedup();
                assert_eq!(verts.len(), f.cycle.len());
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let m = sample_quadrangulation(5, 0).unwrap().map;
        assert!(bottleneck_scan(&m, 0.3, 9).is_err());
        assert!(bottleneck_scan(&m, 0.0, 4).is_err());
    }
}
