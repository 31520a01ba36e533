//! Snake-head labels on a contour, re-rooting at the label minimum, and the
//! finite-resolution genericity probes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circle_tree::CircleTree;
use crate::coding::IndexedCoding;
use crate::error::{Error, Result};
use crate::excursion::{local_minima_report, DiscreteExcursion, LocalMinimaReport};
use crate::rmq::RmqIndex;
use crate::rng::{self, tags};

/// Law of the i.i.d. label increment carried by each tree edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncrementLaw {
    /// Uniform on `{-1, 0, +1}`.
    #[default]
    #[serde(rename = "u3")]
    Uniform3,
    /// Uniform on `{-1, +1}`.
    #[serde(rename = "pm1")]
    PlusMinus,
}

impl IncrementLaw {
    pub fn variance(self) -> f64 {
        match self {
            IncrementLaw::Uniform3 => 2.0 / 3.0,
            IncrementLaw::PlusMinus => 1.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> i64 {
        match self {
            IncrementLaw::Uniform3 => rng.gen_range(-1..=1),
            IncrementLaw::PlusMinus => {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// Labels `Z_t` read along the contour, `t = 0..=2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelFunction {
    values: Vec<i64>,
    vertex_labels: Vec<i64>,
    law: IncrementLaw,
    seed: u64,
}

impl LabelFunction {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Label of every tree vertex, indexed by vertex id.
    pub fn vertex_labels(&self) -> &[i64] {
        &self.vertex_labels
    }

    pub fn law(&self) -> IncrementLaw {
        self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> RmqIndex {
        RmqIndex::new(&self.values)
    }

    pub fn coding<'a>(&'a self, index: &'a RmqIndex) -> IndexedCoding<'a> {
        IndexedCoding::new(&self.values, index)
    }

    /// `true` when every label is equal (the trivial law).
    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&z| z == self.values[0])
    }

    /// Labels rescaled by `(2n)^(1/4)`, sampled at the `2n` circle points.
    pub fn rescaled(&self) -> Vec<f64> {
        let period = self.values.len() - 1;
        let scale = (period as f64).powf(0.25);
        self.values[..period]
            .iter()
            .map(|&z| z as f64 / scale)
            .collect()
    }
}

/// Labels from explicit per-edge increments: `increments[v]` is carried by
/// the edge from `v` to its parent (`increments[0]` is ignored).
pub fn labels_from_increments(
    tree: &CircleTree,
    increments: &[i64],
    law: IncrementLaw,
    seed: u64,
) -> Result<LabelFunction> {
    if increments.len() != tree.n_vertices() {
        return Err(Error::InvalidLabels(format!(
            "{} increments for {} vertices",
            increments.len(),
            tree.n_vertices()
        )));
    }
    let mut vertex_labels = vec![0i64; tree.n_vertices()];
    // preorder ids: parents come first
    for v in 1..tree.n_vertices() {
        vertex_labels[v] = vertex_labels[tree.parent(v).unwrap()] + increments[v];
    }
    let values = tree.class_ids().iter().map(|&v| vertex_labels[v]).collect();
    Ok(LabelFunction {
        values,
        vertex_labels,
        law,
        seed,
    })
}

/// Root label 0, i.i.d. increments from `law` on every edge.
pub fn sample_labels(tree: &CircleTree, law: IncrementLaw, seed: u64) -> Result<LabelFunction> {
    if tree.n_edges() == 0 {
        return Err(Error::Empty("tree has no edges"));
    }
    let mut rng = rng::stream(seed, tags::LABELS);
    let mut increments = vec![0i64; tree.n_vertices()];
    for inc in increments.iter_mut().skip(1) {
        *inc = law.sample(&mut rng);
    }
    labels_from_increments(tree, &increments, law, seed)
}

/// JSON label file: `{"seed": uint64, "law": "u3"|"pm1", "values": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelFile {
    pub seed: u64,
    pub law: IncrementLaw,
    pub values: Vec<i64>,
}

impl From<&LabelFunction> for LabelFile {
    fn from(z: &LabelFunction) -> Self {
        LabelFile {
            seed: z.seed,
            law: z.law,
            values: z.values.clone(),
        }
    }
}

impl LabelFile {
    /// Validates the file against the excursion it is aligned with: length,
    /// zero boundary values, class constancy and the law's increments.
    pub fn into_labels(self, tree: &CircleTree) -> Result<LabelFunction> {
        if self.values.len() != tree.period() + 1 {
            return Err(Error::InvalidLabels(format!(
                "{} values for an excursion with n = {}",
                self.values.len(),
                tree.n()
            )));
        }
        let mut vertex_labels = vec![None; tree.n_vertices()];
        for (t, &z) in self.values.iter().enumerate() {
            let v = tree.class_of(t);
            match vertex_labels[v] {
                None => vertex_labels[v] = Some(z),
                Some(prev) if prev != z => {
                    return Err(Error::InvalidLabels(format!(
                        "vertex {v} has labels {prev} and {z}"
                    )))
                }
                Some(_) => {}
            }
        }
        let vertex_labels: Vec<i64> = vertex_labels.into_iter().map(Option::unwrap).collect();
        if vertex_labels[0] != 0 {
            return Err(Error::InvalidLabels("root label must be 0".into()));
        }
        for v in 1..tree.n_vertices() {
            let inc = vertex_labels[v] - vertex_labels[tree.parent(v).unwrap()];
            let ok = match self.law {
                IncrementLaw::Uniform3 => inc.abs() <= 1,
                IncrementLaw::PlusMinus => inc.abs() == 1,
            };
            if !ok {
                return Err(Error::InvalidLabels(format!(
                    "increment {inc} into vertex {v}"
                )));
            }
        }
        Ok(LabelFunction {
            values: self.values,
            vertex_labels,
            law: self.law,
            seed: self.seed,
        })
    }
}

/// Monte Carlo estimate of `E[Z_s Z_t | tree]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovarianceEstimate {
    pub covariance: f64,
    pub stderr: f64,
    pub replicates: usize,
}

/// Resamples the increments on the root paths of `s` and `t` `replicates`
/// times. Paths are found by walking parent pointers; edges off both paths
/// do not affect `Z_s Z_t`.
pub fn covariance_estimate(
    tree: &CircleTree,
    law: IncrementLaw,
    s: usize,
    t: usize,
    replicates: usize,
    seed: u64,
) -> Result<CovarianceEstimate> {
    if s > tree.period() || t > tree.period() {
        return Err(Error::OutOfRange {
            index: s.max(t),
            max: tree.period(),
        });
    }
    if replicates < 2 {
        return Err(Error::InvalidArgument(
            "need at least two replicates".into(),
        ));
    }
    let path = |mut v: usize| {
        let mut p = Vec::new();
        while let Some(u) = tree.parent(v) {
            p.push(v);
            v = u;
        }
        p
    };
    let ps = path(tree.class_of(s));
    let pt = path(tree.class_of(t));
    let on_t: std::collections::HashSet<usize> = pt.iter().copied().collect();
    let shared = ps.iter().filter(|v| on_t.contains(v)).count();
    let only_s = ps.len() - shared;
    let only_t = pt.len() - shared;

    let mut rng = rng::stream(seed, tags::COVARIANCE);
    let mut draw = |k: usize| (0..k).map(|_| law.sample(&mut rng)).sum::<i64>();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..replicates {
        let common = draw(shared);
        let zs = common + draw(only_s);
        let zt = common + draw(only_t);
        let prod = (zs * zt) as f64;
        sum += prod;
        sum_sq += prod * prod;
    }
    let m = replicates as f64;
    let mean = sum / m;
    let var = (sum_sq - m * mean * mean) / (m - 1.0);
    Ok(CovarianceEstimate {
        covariance: mean,
        stderr: (var / m).sqrt(),
        replicates,
    })
}

/// The pair `(e, Z)` re-rooted at the first time the labels are minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rerooted {
    pub s_star: usize,
    pub e_bar: Vec<i64>,
    pub z_bar: Vec<i64>,
    pub underline_z: i64,
}

impl Rerooted {
    pub fn excursion(&self) -> DiscreteExcursion {
        DiscreteExcursion::from_heights(&self.e_bar).expect("re-rooted contour is a Dyck path")
    }

    /// `s ⊕ s_*` on the circle of `2n` points (with `2n` mapped to `0` first).
    pub fn shift(&self, t: usize) -> usize {
        let period = self.e_bar.len() - 1;
        (t % period + self.s_star) % period
    }
}

/// Re-roots at `s_*`, the smallest time where `Z` is minimal:
///
/// ```text
/// ē_t = e(s_*) + e(s_* ⊕ t) - 2 min{ e_r : r between s_* and s_* ⊕ t }
/// Z̄_t = Z(s_* ⊕ t) - Z(s_*)
/// ```
pub fn reroot(e: &DiscreteExcursion, z: &LabelFunction) -> Result<Rerooted> {
    let period = e.period();
    if z.values.len() != period + 1 {
        return Err(Error::InvalidLabels(format!(
            "{} labels for an excursion of length {}",
            z.values.len(),
            period
        )));
    }
    let zv = &z.values;
    let (s_star, underline_z) = zv[..period].iter().enumerate().fold(
        (0, zv[0]),
        |best, (i, &v)| if v < best.1 { (i, v) } else { best },
    );
    let idx = e.index();
    let h = e.heights();
    let mut e_bar = Vec::with_capacity(period + 1);
    let mut z_bar = Vec::with_capacity(period + 1);
    for t in 0..=period {
        let u = (s_star + t) % period;
        let (lo, hi) = (s_star.min(u), s_star.max(u));
        e_bar.push(h[s_star] + h[u] - 2 * idx.range_min(lo, hi));
        z_bar.push(zv[u] - underline_z);
    }
    Ok(Rerooted {
        s_star,
        e_bar,
        z_bar,
        underline_z,
    })
}

/// The contour and labels read backwards: `(e_{2n-t}, Z_{2n-t})`.
pub fn time_reversed(e: &DiscreteExcursion, z: &LabelFunction) -> (DiscreteExcursion, Vec<i64>) {
    let mut h = e.heights().to_vec();
    h.reverse();
    let mut zr = z.values.clone();
    zr.reverse();
    (
        DiscreteExcursion::from_heights(&h).expect("reversed Dyck path"),
        zr,
    )
}

/// `(max Z - min Z) / (2n)^(1/4)`.
pub fn label_range_statistic(values: &[i64]) -> f64 {
    let max = values.iter().max().unwrap();
    let min = values.iter().min().unwrap();
    (max - min) as f64 / ((values.len() - 1) as f64).powf(0.25)
}

/// Local-minima report for a label-like function sampled on the circle at
/// `resolution` (a fraction of the full turn; `0` keeps every sample).
pub fn hypothesis_check_hz(f: &[f64], resolution: f64) -> Result<LocalMinimaReport> {
    if !(0.0..1.0).contains(&resolution) {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} not in [0, 1)"
        )));
    }
    let stride = ((resolution * f.len() as f64).round() as usize).max(1);
    let sampled: Vec<f64> = f.iter().step_by(stride).copied().collect();
    local_minima_report(&sampled, 0.0)
}

/// Result of the double-identification probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HPrimeReport {
    /// Times `a` with a far `~_e` partner and a far `~_Z` partner.
    pub count: usize,
    pub fraction: f64,
    /// Labels are constant, so `~_Z` identifies everything.
    pub degenerate: bool,
}

/// Counts times `a` admitting `b` with `d_e(a, b) = 0` and `c` with
/// `d_Z(a, c) = 0`, both at cyclic distance at least `separation` from `a`.
pub fn hypothesis_check_hprime(
    tree: &CircleTree,
    z: &LabelFunction,
    separation: usize,
) -> Result<HPrimeReport> {
    let period = tree.period();
    if separation == 0 {
        return Err(Error::InvalidArgument("separation must be >= 1".into()));
    }
    if z.values.len() != period + 1 {
        return Err(Error::InvalidLabels(
            "labels not aligned with the tree".into(),
        ));
    }
    let degenerate = z.is_constant();
    if 2 * separation > period {
        return Ok(HPrimeReport {
            count: 0,
            fraction: 0.0,
            degenerate,
        });
    }
    // offsets in [separation, period - separation] are "far"
    let far = |a: usize, c: usize| {
        let off = (c + period - a) % period;
        off >= separation && off <= period - separation
    };

    let mut e_far = vec![false; period];
    for v in 0..tree.n_vertices() {
        let vs = tree.circle_visits(v);
        if vs.len() < 2 {
            continue;
        }
        for &a in vs {
            // visits are sorted; a far partner exists unless all lie in the
            // window (a - separation, a + separation)
            e_far[a] = vs.iter().any(|&b| far(a, b));
        }
    }

    let zc = &z.values[..period];
    let next = next_smaller_cyclic(zc);
    let prev = {
        let mut rev = zc.to_vec();
        rev.reverse();
        let mut p = next_smaller_cyclic(&rev);
        p.reverse();
        p
    };
    // positions of each label value, sorted
    let min_label = *zc.iter().min().unwrap();
    let max_label = *zc.iter().max().unwrap();
    let mut by_value: Vec<Vec<usize>> = vec![Vec::new(); (max_label - min_label + 1) as usize];
    for (t, &v) in zc.iter().enumerate() {
        by_value[(v - min_label) as usize].push(t);
    }
    // any position of `list` with ccw offset from `a` inside [lo, hi]
    let any_in = |list: &[usize], a: usize, lo: usize, hi: usize| -> bool {
        if lo > hi {
            return false;
        }
        let (s, e) = (a + lo, a + hi);
        let probe = |x: usize, y: usize| {
            let i = list.partition_point(|&p| p < x);
            i < list.len() && list[i] <= y
        };
        if e < period {
            probe(s, e)
        } else if s >= period {
            probe(s - period, e - period)
        } else {
            probe(s, period - 1) || probe(0, e - period)
        }
    };

    let mut count = 0;
    for a in 0..period {
        if !e_far[a] {
            continue;
        }
        let list = &by_value[(zc[a] - min_label) as usize];
        // ccw reach: offsets 1..reach_fwd stay >= Z_a
        let reach_fwd = next[a].unwrap_or(period);
        let reach_bwd = prev[a].unwrap_or(period);
        let hi_fwd = (reach_fwd - 1).min(period - separation);
        let lo_bwd = (period + 1 - reach_bwd).max(separation);
        let z_far =
            any_in(list, a, separation, hi_fwd) || any_in(list, a, lo_bwd, period - separation);
        if z_far {
            count += 1;
        }
    }
    Ok(HPrimeReport {
        count,
        fraction: count as f64 / period as f64,
        degenerate,
    })
}

/// For each `i`, the smallest cyclic offset `k >= 1` with `f[i + k] < f[i]`.
fn next_smaller_cyclic(f: &[i64]) -> Vec<Option<usize>> {
    let n = f.len();
    let mut out = vec![None; n];
    let mut stack: Vec<usize> = Vec::new();
    for j in 0..2 * n {
        let v = f[j % n];
        while let Some(&i) = stack.last() {
            if f[i % n] > v {
                stack.pop();
                if i < n && out[i].is_none() {
                    out[i] = Some(j - i);
                }
            } else {
                break;
            }
        }
        stack.push(j);
    }
    out
}
