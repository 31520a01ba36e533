//! Geodesic laminations of the disk generated by the classes of a coding
//! function, as finite non-crossing chord diagrams.

mod svg;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circle_tree::CircleTree;
use crate::coding::Coding;
use crate::rmq::SparseTable;
use crate::rng::{self, tags};

pub use svg::{render_svg, svg_string};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiskModel {
    /// Geodesics are straight chords.
    #[default]
    Klein,
    /// Geodesics are circular arcs orthogonal to the unit circle.
    Poincare,
}

/// Which relation generated the chords.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// Classes of the contour (`~_g`).
    Contour,
    /// Classes of the labels (`~_Z`).
    Label,
}

/// How a class with `m` circle points becomes chords.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChordRule {
    /// `t_1 t_2, t_2 t_3, ..., t_m t_1`: the boundary of the inscribed polygon.
    #[default]
    Consecutive,
    /// Every pair of class points; adds the polygon's diagonals.
    AllPairs,
}

/// Chord between the circle points of two contour times `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Chord {
    pub a: usize,
    pub b: usize,
    pub class: usize,
}

impl Chord {
    pub fn new(a: usize, b: usize, class: usize) -> Self {
        assert_ne!(a, b, "chord endpoints must differ");
        Chord {
            a: a.min(b),
            b: a.max(b),
            class,
        }
    }

    /// Endpoint angles in radians on a circle of `period` points.
    pub fn angles(&self, period: usize) -> (f64, f64) {
        let f = std::f64::consts::TAU / period as f64;
        (self.a as f64 * f, self.b as f64 * f)
    }

    /// The open chords cross: endpoints strictly interleave.
    pub fn crosses(&self, other: &Chord) -> bool {
        let inside = |t: usize| self.a < t && t < self.b;
        let outside = |t: usize| t < self.a || t > self.b;
        (inside(other.a) && outside(other.b)) || (outside(other.a) && inside(other.b))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lamination {
    /// Number of circle points; chord endpoints lie in `0..period`.
    pub period: usize,
    pub chords: Vec<Chord>,
    pub model: DiskModel,
    pub relation: Relation,
    pub seed: u64,
}

impl Lamination {
    pub fn empty(period: usize) -> Self {
        Lamination {
            period,
            chords: Vec::new(),
            model: DiskModel::Klein,
            relation: Relation::Contour,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    /// Chord list as CSV rows `a_deg,b_deg,class_id`.
    pub fn to_csv(&self) -> String {
        let deg = 360.0 / self.period as f64;
        let mut out = String::from("a_deg,b_deg,class_id\n");
        for c in &self.chords {
            out.push_str(&format!(
                "{:.6},{:.6},{}\n",
                c.a as f64 * deg,
                c.b as f64 * deg,
                c.class
            ));
        }
        out
    }
}

/// Chords for a family of classes given as sorted circle points.
pub fn chords_from_classes<'a>(
    classes: impl IntoIterator<Item = (usize, &'a [usize])>,
    rule: ChordRule,
) -> Vec<Chord> {
    let mut chords = Vec::new();
    for (id, pts) in classes {
        let m = pts.len();
        if m < 2 {
            continue;
        }
        match rule {
            ChordRule::Consecutive if m == 2 => chords.push(Chord::new(pts[0], pts[1], id)),
            ChordRule::Consecutive => {
                for i in 0..m {
                    chords.push(Chord::new(pts[i], pts[(i + 1) % m], id));
                }
            }
            ChordRule::AllPairs => {
                for i in 0..m {
                    for j in i + 1..m {
                        chords.push(Chord::new(pts[i], pts[j], id));
                    }
                }
            }
        }
    }
    chords.sort_unstable();
    chords
}

/// The lamination of the contour classes of `tree` (consecutive rule).
pub fn build_lamination(tree: &CircleTree) -> Lamination {
    build_lamination_with(tree, ChordRule::Consecutive)
}

pub fn build_lamination_with(tree: &CircleTree, rule: ChordRule) -> Lamination {
    let classes = (0..tree.n_vertices()).map(|v| (v, tree.circle_visits(v)));
    Lamination {
        period: tree.period(),
        chords: chords_from_classes(classes, rule),
        model: DiskModel::Klein,
        relation: Relation::Contour,
        seed: 0,
    }
}

/// Class id of every circle point `0..N` for the relation `d_g = 0` of an
/// integer coding `g[0..=N]` (with `g[N] == g[0]`).
///
/// After rotating to a global minimum, two points are equivalent exactly when
/// they have the same value and nothing lower lies between them, which a
/// monotone stack decides in one pass.
pub fn coding_classes(values: &[i64]) -> Vec<usize> {
    let period = values.len() - 1;
    let start = (0..period).min_by_key(|&t| (values[t], t)).unwrap();
    let mut class = vec![usize::MAX; period];
    let mut stack: Vec<(i64, usize)> = Vec::new();
    let mut next_id = 0;
    for k in 0..period {
        let t = (start + k) % period;
        let v = values[t];
        while stack.last().is_some_and(|&(w, _)| w > v) {
            stack.pop();
        }
        let id = match stack.last() {
            Some(&(w, id)) if w == v => id,
            _ => {
                stack.push((v, next_id));
                next_id += 1;
                next_id - 1
            }
        };
        class[t] = id;
    }
    class
}

/// Lamination of the relation coded by an arbitrary integer function on the
/// circle (labels, re-rooted labels, contours).
pub fn lamination_from_coding(values: &[i64], rule: ChordRule, relation: Relation) -> Lamination {
    let class = coding_classes(values);
    let n_classes = class.iter().max().map_or(0, |&c| c + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (t, &c) in class.iter().enumerate() {
        members[c].push(t);
    }
    let classes = members.iter().enumerate().map(|(id, m)| (id, m.as_slice()));
    Lamination {
        period: values.len() - 1,
        chords: chords_from_classes(classes, rule),
        model: DiskModel::Klein,
        relation,
        seed: 0,
    }
}

/// Exact sweep: chords sorted by left endpoint, a stack of open chords that
/// must stay nested. Returns a crossing pair if there is one.
pub fn check_noncrossing(lam: &Lamination) -> Result<(), (Chord, Chord)> {
    let mut chords = lam.chords.clone();
    chords.sort_by(|x, y| x.a.cmp(&y.a).then(y.b.cmp(&x.b)));
    let mut open: Vec<Chord> = Vec::new();
    for c in chords {
        while open.last().is_some_and(|top| top.b <= c.a) {
            open.pop();
        }
        if let Some(top) = open.last() {
            if top.b < c.b {
                return Err((*top, c));
            }
        }
        open.push(c);
    }
    Ok(())
}

/// Answers "does the straight chord `ab` cross the lamination?" in `O(1)`.
///
/// A chord crosses `ab` exactly when one of its endpoints lies strictly
/// inside `]a, b[` and the other strictly outside `[a, b]`.
pub struct CrossingIndex {
    min_partner: SparseTable<usize>,
    max_partner: SparseTable<usize>,
}

impl CrossingIndex {
    pub fn new(lam: &Lamination) -> Self {
        let mut lo: Vec<usize> = (0..lam.period).collect();
        let mut hi = lo.clone();
        for c in &lam.chords {
            lo[c.a] = lo[c.a].min(c.b);
            hi[c.a] = hi[c.a].max(c.b);
            lo[c.b] = lo[c.b].min(c.a);
            hi[c.b] = hi[c.b].max(c.a);
        }
        CrossingIndex {
            min_partner: SparseTable::new(&lo, std::cmp::min),
            max_partner: SparseTable::new(&hi, std::cmp::max),
        }
    }

    pub fn crosses(&self, a: usize, b: usize) -> bool {
        let (a, b) = (a.min(b), a.max(b));
        if b - a < 2 {
            return false;
        }
        self.min_partner.query(a + 1, b - 1) < a || self.max_partner.query(a + 1, b - 1) > b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaximalityReport {
    pub trials: usize,
    /// Pairs with `a == b`, skipped.
    pub degenerate: usize,
    /// Pairs whose chord crosses no lamination chord.
    pub crossing_free: usize,
    /// Crossing-free pairs with `d_g(a, b) > tol`.
    pub violations: usize,
    /// `violations / crossing_free`, or 0 when nothing was crossing-free.
    pub fraction: f64,
}

/// Random chords `ab`; for each one crossing no leaf, test `d_g(a, b) <= tol`.
/// A maximal lamination forces every such pair to be identified.
pub fn maximality_probe<C: Coding>(
    lam: &Lamination,
    coding: &C,
    trials: usize,
    tol: i64,
    seed: u64,
) -> MaximalityReport {
    let index = CrossingIndex::new(lam);
    let mut rng = rng::stream(seed, tags::TRIALS);
    let mut report = MaximalityReport {
        trials,
        degenerate: 0,
        crossing_free: 0,
        violations: 0,
        fraction: 0.0,
    };
    for _ in 0..trials {
        let a = rng.gen_range(0..lam.period);
        let b = rng.gen_range(0..lam.period);
        if a == b {
            report.degenerate += 1;
            continue;
        }
        if index.crosses(a, b) {
            continue;
        }
        report.crossing_free += 1;
        if coding.d(a, b) > tol {
            report.violations += 1;
        }
    }
    if report.crossing_free > 0 {
        report.fraction = report.violations as f64 / report.crossing_free as f64;
    }
    report
}

/// Faces of the chord diagram inside the closed disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceCensus {
    pub chords: usize,
    /// Distinct chord endpoints on the circle.
    pub vertices: usize,
    /// Faces inside the disk, found by tracing the planar embedding.
    pub faces: usize,
    /// Faces keyed by their number of chord sides.
    pub chord_sides: BTreeMap<usize, usize>,
    /// Faces bounded only by chords (inscribed polygons).
    pub polygons: usize,
}

impl FaceCensus {
    /// Euler on the disk with the boundary arcs as edges:
    /// `V - (K + V) + (F + 1) = 2`, i.e. `F = K + 1`.
    pub fn euler_holds(&self) -> bool {
        self.faces == self.chords + 1
    }
}

/// Traces every face of the planar graph made of the chords and the circle
/// arcs between consecutive endpoints.
pub fn face_census(lam: &Lamination) -> FaceCensus {
    let k = lam.chords.len();
    let mut pts: Vec<usize> = lam.chords.iter().flat_map(|c| [c.a, c.b]).collect();
    pts.sort_unstable();
    pts.dedup();
    let v = pts.len();
    if v == 0 {
        return FaceCensus {
            chords: 0,
            vertices: 0,
            faces: 1,
            chord_sides: BTreeMap::from([(0, 1)]),
            polygons: 0,
        };
    }
    let vid = |t: usize| pts.binary_search(&t).unwrap();

    // edges: chords first, then arc i from pts[i] to pts[i+1] (ccw)
    let mut ends: Vec<(usize, usize)> = lam.chords.iter().map(|c| (vid(c.a), vid(c.b))).collect();
    ends.extend((0..v).map(|i| (i, (i + 1) % v)));
    let is_chord = |e: usize| e < k;

    // darts: 2e leaves ends.0, 2e+1 leaves ends.1
    let tail = |d: usize| {
        if d.is_multiple_of(2) {
            ends[d / 2].0
        } else {
            ends[d / 2].1
        }
    };
    let head = |d: usize| {
        if d.is_multiple_of(2) {
            ends[d / 2].1
        } else {
            ends[d / 2].0
        }
    };
    let period = lam.period;
    let mut rotation: Vec<Vec<(usize, u8, usize)>> = vec![Vec::new(); v];
    for d in 0..2 * ends.len() {
        let (p, q) = (tail(d), head(d));
        let offset = (pts[q] + period - pts[p]) % period;
        let tie = if is_chord(d / 2) {
            1
        } else if d % 2 == 0 {
            0 // boundary arc leaving counterclockwise
        } else {
            2
        };
        let offset = if offset == 0 { period } else { offset };
        rotation[p].push((offset, tie, d));
    }
    let mut position = vec![(0usize, 0usize); 2 * ends.len()];
    for (p, rot) in rotation.iter_mut().enumerate() {
        rot.sort_unstable();
        for (i, &(_, _, d)) in rot.iter().enumerate() {
            position[d] = (p, i);
        }
    }
    let next_in_face = |d: usize| {
        let rev = d ^ 1;
        let (p, i) = position[rev];
        let rot = &rotation[p];
        rot[(i + 1) % rot.len()].2
    };

    let mut seen = vec![false; 2 * ends.len()];
    let mut chord_sides = BTreeMap::new();
    let mut faces = 0;
    let mut polygons = 0;
    for start in 0..2 * ends.len() {
        if seen[start] {
            continue;
        }
        let (mut chords_here, mut arcs_ccw, mut arcs_cw) = (0, 0, 0);
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            if is_chord(d / 2) {
                chords_here += 1;
            } else if d % 2 == 0 {
                arcs_ccw += 1;
            } else {
                arcs_cw += 1;
            }
            d = next_in_face(d);
        }
        // the face outside the disk runs along every boundary arc
        if chords_here == 0 && arcs_cw == 0 && arcs_ccw == v {
            continue;
        }
        faces += 1;
        *chord_sides.entry(chords_here).or_insert(0) += 1;
        if arcs_ccw == 0 && arcs_cw == 0 {
            polygons += 1;
        }
    }
    FaceCensus {
        chords: k,
        vertices: v,
        faces,
        chord_sides,
        polygons,
    }
}
