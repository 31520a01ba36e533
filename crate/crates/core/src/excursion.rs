//! Discrete excursions: the contour functions every other module is built on.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::coding::{Coding, IndexedCoding};
use crate::error::{Error, Result};
use crate::rmq::RmqIndex;
use crate::rng::{self, tags};

/// A Dyck path of half-length `n`, read as a nonnegative function on the
/// circle of `2n` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteExcursion {
    n: usize,
    seed: u64,
    steps: Vec<i8>,
    heights: Vec<i64>,
}

impl DiscreteExcursion {
    /// Validates a step sequence and computes its heights.
    pub fn from_steps(steps: Vec<i8>, seed: u64) -> Result<Self> {
        if steps.is_empty() || !steps.len().is_multiple_of(2) {
            return Err(Error::InvalidExcursion(format!(
                "step count must be even and positive, got {}",
                steps.len()
            )));
        }
        let mut heights = Vec::with_capacity(steps.len() + 1);
        heights.push(0i64);
        for (i, &s) in steps.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(Error::InvalidExcursion(format!(
                    "step {i} is {s}, expected +1 or -1"
                )));
            }
            let h = heights[i] + i64::from(s);
            if h < 0 {
                return Err(Error::InvalidExcursion(format!(
                    "height negative after step {i}"
                )));
            }
            heights.push(h);
        }
        if *heights.last().unwrap() != 0 {
            return Err(Error::InvalidExcursion("path does not return to 0".into()));
        }
        Ok(DiscreteExcursion {
            n: steps.len() / 2,
            seed,
            steps,
            heights,
        })
    }

    /// Builds an excursion from its height sequence `h[0..=2n]`.
    pub fn from_heights(heights: &[i64]) -> Result<Self> {
        if heights.first() != Some(&0) {
            return Err(Error::InvalidExcursion("heights must start at 0".into()));
        }
        let steps = heights
            .windows(2)
            .map(|w| match w[1] - w[0] {
                1 => Ok(1),
                -1 => Ok(-1),
                d => Err(Error::InvalidExcursion(format!("height jump {d}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::from_steps(steps, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of circle points, `2n`.
    pub fn period(&self) -> usize {
        2 * self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn index(&self) -> RmqIndex {
        RmqIndex::new(&self.heights)
    }

    pub fn coding<'a>(&'a self, index: &'a RmqIndex) -> IndexedCoding<'a> {
        IndexedCoding::new(&self.heights, index)
    }

    /// Heights rescaled by `sqrt(2n)`, sampled at the `2n` circle points.
    pub fn rescaled(&self) -> Vec<f64> {
        let scale = (self.period() as f64).sqrt();
        self.heights[..self.period()]
            .iter()
            .map(|&h| h as f64 / scale)
            .collect()
    }
}

/// Uniform Dyck path of half-length `n`.
///
/// Shuffles `n` up-steps and `n + 1` down-steps, rotates to start just after
/// the first global minimum of the partial sums (cycle lemma), and drops the
/// final down-step.
pub fn sample_dyck_excursion(n: usize, seed: u64) -> Result<DiscreteExcursion> {
    if n == 0 {
        return Err(Error::InvalidSize(
            "excursion half-length must be >= 1".into(),
        ));
    }
    let mut rng = rng::stream(seed, tags::EXCURSION);
    let mut word: Vec<i8> = std::iter::repeat_n(1, n)
        .chain(std::iter::repeat_n(-1, n + 1))
        .collect();
    word.shuffle(&mut rng);

    let mut sum = 0i64;
    let mut best = 0i64;
    let mut cut = 0usize;
    for (i, &s) in word.iter().enumerate() {
        sum += i64::from(s);
        if sum < best {
            best = sum;
            cut = i + 1;
        }
    }
    let len = word.len();
    word.rotate_left(cut % len);
    word.pop();
    DiscreteExcursion::from_steps(word, seed)
}

/// Minimum over the counterclockwise arc `[a, b]`.
pub fn arc_min(e: &DiscreteExcursion, idx: &RmqIndex, a: usize, b: usize) -> Result<i64> {
    e.coding(idx).checked_arc_min(a, b)
}

/// `m_g(a, b)`: the larger of the two arc minima between `a` and `b`.
pub fn m_g(e: &DiscreteExcursion, idx: &RmqIndex, a: usize, b: usize) -> Result<i64> {
    e.coding(idx).checked_m(a, b)
}

/// `d_g(a, b) = g(a) + g(b) - 2 m_g(a, b)`.
pub fn tree_pseudo_distance(
    e: &DiscreteExcursion,
    idx: &RmqIndex,
    a: usize,
    b: usize,
) -> Result<i64> {
    e.coding(idx).checked_d(a, b)
}

/// JSON form: `{"n": int, "seed": uint64, "steps": [1,-1,...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExcursionFile {
    pub n: usize,
    pub seed: u64,
    pub steps: Vec<i8>,
}

impl From<&DiscreteExcursion> for ExcursionFile {
    fn from(e: &DiscreteExcursion) -> Self {
        ExcursionFile {
            n: e.n,
            seed: e.seed,
            steps: e.steps.clone(),
        }
    }
}

impl TryFrom<ExcursionFile> for DiscreteExcursion {
    type Error = Error;

    fn try_from(f: ExcursionFile) -> Result<Self> {
        if f.steps.len() != 2 * f.n {
            return Err(Error::InvalidExcursion(format!(
                "n = {} but {} steps given",
                f.n,
                f.steps.len()
            )));
        }
        DiscreteExcursion::from_steps(f.steps, f.seed)
    }
}

/// Strict local minima of a sampled function on the circle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalMinimaReport {
    /// `(position, value)`; a plateau is reported at its first sample.
    pub minima: Vec<(usize, f64)>,
    /// Smallest value gap between two distinct local minima, if there are
    /// at least two.
    pub min_gap: Option<f64>,
    /// Pairs of local minima whose values differ by at most `tol`.
    pub ties: usize,
    /// The function is constant: no local minima are defined.
    pub degenerate: bool,
}

impl LocalMinimaReport {
    /// Local minima are pairwise distinct at the tested resolution.
    pub fn distinct(&self) -> bool {
        !self.degenerate && self.ties == 0
    }
}

/// Finds every local minimum of `f` (indices cyclic) and the smallest gap
/// between their values.
///
/// Runs of equal samples are treated as one plateau; a plateau is a local
/// minimum when both neighbouring runs are strictly higher.
pub fn local_minima_report(f: &[f64], tol: f64) -> Result<LocalMinimaReport> {
    if f.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 samples, got {}",
            f.len()
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be >= 0, got {tol}"
        )));
    }
    // rotate so that index 0 starts a run
    let len = f.len();
    let Some(start) = (0..len).find(|&i| f[i] != f[(i + len - 1) % len]) else {
        return Ok(LocalMinimaReport {
            minima: Vec::new(),
            min_gap: None,
            ties: 0,
            degenerate: true,
        });
    };
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for k in 0..len {
        let i = (start + k) % len;
        if runs.last().is_none_or(|&(_, v)| v != f[i]) {
            runs.push((i, f[i]));
        }
    }
    let r = runs.len();
    let minima: Vec<(usize, f64)> = (0..r)
        .filter(|&j| {
            let v = runs[j].1;
            runs[(j + r - 1) % r].1 > v && runs[(j + 1) % r].1 > v
        })
        .map(|j| runs[j])
        .collect();

    let mut values: Vec<f64> = minima.iter().map(|&(_, v)| v).collect();
    values.sort_by(f64::total_cmp);
    let min_gap = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .min_by(f64::total_cmp);
    let mut ties = 0;
    for i in 0..values.len() {
        ties += values[i + 1..]
            .iter()
            .take_while(|&&v| v - values[i] <= tol)
            .count();
    }
    Ok(LocalMinimaReport {
        minima,
        min_gap,
        ties,
        degenerate: false,
    })
}
