//! The pseudo-metrics `D°` and `D*` on a re-rooted labelled contour.
//!
//! ```text
//! D°(a, b) = Z̄_a + Z̄_b - 2 max(min over [a, b] of Z̄, min over [b, a] of Z̄)
//! D*(a, b) = min over chains a = a_0, ..., a_p = b of Σ D°(a_{i-1}, a_i)
//! ```
//!
//! Chains are restricted to the sampled times, so `D*` here is the shortest
//! path metric of the complete graph on the sample weighted by `D°`.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::coding::{Coding, IndexedCoding};
use crate::error::{Error, Result};
use crate::excursion::DiscreteExcursion;
use crate::rmq::RmqIndex;
use crate::rng::{self, tags};
use crate::snake::{reroot, LabelFunction};

#[derive(Clone, Debug)]
pub struct MapMetricSample {
    times: Vec<usize>,
    zbar: Vec<i64>,
    zbar_rmq: RmqIndex,
    rows: HashMap<usize, Vec<i64>>,
}

impl MapMetricSample {
    /// Sample made of the given contour times of `Z̄` (sorted, deduplicated,
    /// with `2n` folded onto `0`).
    pub fn new(zbar: Vec<i64>, times: &[usize]) -> Result<Self> {
        if zbar.len() < 2 {
            return Err(Error::InvalidSize("Z̄ needs at least two values".into()));
        }
        let period = zbar.len() - 1;
        if zbar[0] != zbar[period] {
            return Err(Error::InvalidLabels("Z̄ must close up on the circle".into()));
        }
        if let Some(&t) = times.iter().find(|&&t| t > period) {
            return Err(Error::OutOfRange {
                index: t,
                max: period,
            });
        }
        let mut times: Vec<usize> = times.iter().map(|&t| t % period).collect();
        times.sort_unstable();
        times.dedup();
        if times.is_empty() {
            return Err(Error::Empty("sample has no times"));
        }
        let zbar_rmq = RmqIndex::new(&zbar);
        Ok(MapMetricSample {
            times,
            zbar,
            zbar_rmq,
            rows: HashMap::new(),
        })
    }

    /// Every contour time `0..2n`.
    pub fn full(zbar: Vec<i64>) -> Result<Self> {
        let period = zbar.len().saturating_sub(1);
        let times: Vec<usize> = (0..period).collect();
        Self::new(zbar, &times)
    }

    /// One uniform time in each of `size` equal strata of the circle.
    pub fn stratified(zbar: Vec<i64>, size: usize, seed: u64) -> Result<Self> {
        let period = zbar.len().saturating_sub(1);
        if size == 0 || size > period {
            return Err(Error::InvalidSize(format!(
                "sample size {size} not in 1..={period}"
            )));
        }
        let mut rng = rng::stream(seed, tags::SUBSAMPLE);
        let times: Vec<usize> = (0..size)
            .map(|i| {
                let lo = i * period / size;
                let hi = (i + 1) * period / size;
                rng.gen_range(lo..hi)
            })
            .collect();
        Self::new(zbar, &times)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[usize] {
        &self.times
    }

    pub fn zbar(&self) -> &[i64] {
        &self.zbar
    }

    pub fn coding(&self) -> IndexedCoding<'_> {
        IndexedCoding::new(&self.zbar, &self.zbar_rmq)
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.times.len() {
            Err(Error::OutOfRange {
                index: i,
                max: self.times.len() - 1,
            })
        } else {
            Ok(())
        }
    }

    fn weight(&self, i: usize, j: usize) -> i64 {
        self.coding().d(self.times[i], self.times[j])
    }

    /// `D°` between sample indices `i` and `j`.
    pub fn d_circ(&self, i: usize, j: usize) -> Result<i64> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.weight(i, j))
    }

    /// `D*(source, ·)` over the sample, cached per source.
    pub fn d_star_from(&mut self, source: usize) -> Result<&[i64]> {
        self.check(source)?;
        if !self.rows.contains_key(&source) {
            let row = dense_dijkstra(self.len(), source, |i, j| self.weight(i, j));
            self.rows.insert(source, row);
        }
        Ok(&self.rows[&source])
    }

    /// `D*(source, ·)` without touching the cache.
    pub fn d_star_row(&self, source: usize) -> Result<Vec<i64>> {
        self.check(source)?;
        Ok(dense_dijkstra(self.len(), source, |i, j| self.weight(i, j)))
    }
}

/// Single-source shortest paths on the complete graph on `0..n` with
/// nonnegative weights evaluated on demand.
pub fn dense_dijkstra<W: Fn(usize, usize) -> i64>(n: usize, source: usize, w: W) -> Vec<i64> {
    let mut dist = vec![i64::MAX; n];
    let mut done = vec![false; n];
    dist[source] = 0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = i64::MAX;
        for (v, &d) in dist.iter().enumerate() {
            if !done[v] && d < best {
                best = d;
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for v in 0..n {
            if !done[v] {
                let cand = best + w(u, v);
                if cand < dist[v] {
                    dist[v] = cand;
                }
            }
        }
    }
    dist
}

/// Witness that `{D* = 0}` and `{D° = 0}` differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroClassWitness {
    /// `w(i, j) = 0` but `w(j, i) != 0`.
    Asymmetric { i: usize, j: usize },
    /// A zero chain joins `i` and `j` but `w(i, j) != 0`.
    ChainWithoutEdge { i: usize, j: usize, weight: i64 },
}

/// Compares the closure of the zero-weight relation with the relation
/// itself for an arbitrary weight function on `0..n`.
pub fn zero_class_check_with<W: Fn(usize, usize) -> i64>(
    n: usize,
    w: W,
) -> Result<(), ZeroClassWitness> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (w(i, j), w(j, i));
            if (a == 0) != (b == 0) {
                let (i, j) = if a == 0 { (i, j) } else { (j, i) };
                return Err(ZeroClassWitness::Asymmetric { i, j });
            }
            if a == 0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if find(&mut parent, i) == find(&mut parent, j) {
                let weight = w(i, j);
                if weight != 0 {
                    return Err(ZeroClassWitness::ChainWithoutEdge { i, j, weight });
                }
            }
        }
    }
    Ok(())
}

/// `{D* = 0} = {D° = 0}` on the sample.
pub fn zero_class_check(s: &MapMetricSample) -> Result<(), ZeroClassWitness> {
    zero_class_check_with(s.len(), |i, j| s.weight(i, j))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsometryWitness {
    Distance {
        a: usize,
        b: usize,
        rerooted: i64,
        original: i64,
    },
    Label {
        a: usize,
        rerooted: i64,
        original: i64,
    },
}

/// Checks `d_ē(a, b) = d_e(a ⊕ s_*, b ⊕ s_*)` and `Z̄_a = Z_{a ⊕ s_*} - min Z`
/// on `trials` uniform pairs of times in `0..=2n`.
pub fn reroot_isometry_check(
    e: &DiscreteExcursion,
    z: &LabelFunction,
    trials: usize,
    seed: u64,
) -> Result<Result<(), IsometryWitness>> {
    let r = reroot(e, z)?;
    let period = e.period();
    let e_idx = e.index();
    let de = e.coding(&e_idx);
    let bar_idx = RmqIndex::new(&r.e_bar);
    let dbar = IndexedCoding::new(&r.e_bar, &bar_idx);
    let zv = z.values();
    let check_pair = |a: usize, b: usize| -> Result<(), IsometryWitness> {
        let rerooted = dbar.d(a, b);
        let original = de.d(r.shift(a), r.shift(b));
        if rerooted != original {
            return Err(IsometryWitness::Distance {
                a,
                b,
                rerooted,
                original,
            });
        }
        let original = zv[r.shift(a)] - r.underline_z;
        if r.z_bar[a] != original {
            return Err(IsometryWitness::Label {
                a,
                rerooted: r.z_bar[a],
                original,
            });
        }
        Ok(())
    };
    let mut rng = rng::stream(seed, tags::TRIALS);
    for _ in 0..trials {
        let a = rng.gen_range(0..=period);
        let b = rng.gen_range(0..=period);
        if let Err(w) = check_pair(a, b) {
            return Ok(Err(w));
        }
    }
    Ok(Ok(()))
}

/// Sidecar describing a binary distance row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSidecar {
    pub source: usize,
    #[serde(rename = "N")]
    pub sample_size: usize,
    pub n: usize,
    pub seed: u64,
    pub dtype: String,
    pub times: Vec<usize>,
}

/// Writes `row` as little-endian `i64` values.
pub fn write_row(path: &Path, row: &[i64]) -> Result<()> {
    let bytes: Vec<u8> = row.iter().flat_map(|v| v.to_le_bytes()).collect();
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// `path` with `.json` appended.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

pub fn read_row(path: &Path) -> Result<Vec<i64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::InvalidSize(format!(
            "{} bytes is not a whole number of i64",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Random subset of `size` sample indices, for subsampling checks.
pub fn random_subset(len: usize, size: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(seed, tags::SUBSAMPLE);
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(&mut rng);
    idx.truncate(size);
    idx.sort_unstable();
    idx
}
