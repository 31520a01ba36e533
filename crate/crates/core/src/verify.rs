//! The invariant suite behind `verify`: every structural identity of the
//! crate checked on a range of seeds, one pass/fail row per invariant.

use std::fmt;
use std::ops::RangeInclusive;

use rand::Rng as _;
use serde::Serialize;

use crate::brownian_map::{
    dense_dijkstra, reroot_isometry_check, zero_class_check, MapMetricSample,
};
use crate::circle_tree::{build_circle_tree, plane_tree_oracle, verify_pseudometric};
use crate::coding::{Coding, NaiveCoding};
use crate::error::Result;
use crate::excursion::{sample_dyck_excursion, DiscreteExcursion};
use crate::lamination::{build_lamination, check_noncrossing, face_census};
use crate::planar_maps::{
    cvs_distance_audit, sample_2k_angulation, sample_quadrangulation, LabeledMap,
};
use crate::rmq::RmqIndex;
use crate::rng::{self, tags};
use crate::snake::{reroot, sample_labels, IncrementLaw};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// First failure, if any.
    pub witness: Option<String>,
}

impl CheckRow {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub seeds: (u64, u64),
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(CheckRow::ok)
    }

    pub fn first_failure(&self) -> Option<&CheckRow> {
        self.rows.iter().find(|r| !r.ok())
    }

    fn record(&mut self, name: &'static str, seed: u64, outcome: std::result::Result<(), String>) {
        let row = match self.rows.iter_mut().find(|r| r.name == name) {
            Some(r) => r,
            None => {
                self.rows.push(CheckRow {
                    name,
                    passed: 0,
                    failed: 0,
                    witness: None,
                });
                self.rows.last_mut().unwrap()
            }
        };
        match outcome {
            Ok(()) => row.passed += 1,
            Err(w) => {
                row.failed += 1;
                row.witness.get_or_insert(format!("seed {seed}: {w}"));
            }
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>6} {:>6}  result", "invariant", "pass", "fail")?;
        for r in &self.rows {
            write!(
                f,
                "{:<28} {:>6} {:>6}  {}",
                r.name,
                r.passed,
                r.failed,
                if r.ok() { "PASS" } else { "FAIL" }
            )?;
            if let Some(w) = &r.witness {
                write!(f, "  ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check(cond: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

pub(crate) fn map_invariants(
    lm: &LabeledMap,
    n: usize,
    k: usize,
) -> std::result::Result<(), String> {
    let m = &lm.map;
    check(m.n_faces() == n, || format!("{} faces", m.n_faces()))?;
    check(m.n_vertices() == (k - 1) * n + 2, || {
        format!("{} vertices", m.n_vertices())
    })?;
    check(m.faces().iter().all(|f| f.len() == 2 * k), || {
        "face degree".into()
    })?;
    check(m.bipartition().is_some(), || "not bipartite".into())?;
    cvs_distance_audit(m, &lm.labels, lm.pointed).map_err(|w| format!("{w:?}"))
}

/// Runs every invariant for contours of half-length `n` on each seed.
pub fn run_suite(n: usize, seeds: RangeInclusive<u64>) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        n,
        seeds: (*seeds.start(), *seeds.end()),
        rows: Vec::new(),
    };
    for seed in seeds {
        let e = sample_dyck_excursion(n, seed)?;
        let idx = e.index();
        let g = e.coding(&idx);
        let mut rng = rng::stream(seed, tags::TRIALS);

        let round_trip = DiscreteExcursion::from_steps(e.steps().to_vec(), seed).map(|x| x == e);
        report.record(
            "excursion round trip",
            seed,
            check(matches!(round_trip, Ok(true)), || "mismatch".into()),
        );

        let period = e.period();
        let naive = NaiveCoding(e.heights());
        let rmq = (0..1000).find_map(|_| {
            let (a, b) = (rng.gen_range(0..=period), rng.gen_range(0..=period));
            (g.arc_min(a, b) != naive.arc_min(a, b)).then(|| format!("arc [{a}, {b}]"))
        });
        report.record("arc minima = scan", seed, rmq.map_or(Ok(()), Err));

        let lin = RmqIndex::new(e.heights());
        let rmq_lin = (0..1000).find_map(|_| {
            let a = rng.gen_range(0..=period);
            let b = rng.gen_range(a..=period);
            let scan = *e.heights()[a..=b].iter().min().unwrap();
            (lin.range_min(a, b) != scan).then(|| format!("range [{a}, {b}]"))
        });
        report.record("sparse table = scan", seed, rmq_lin.map_or(Ok(()), Err));

        report.record(
            "d_g pseudometric",
            seed,
            verify_pseudometric(&g, 2000, seed).map_err(|v| format!("{v:?}")),
        );

        let tree = build_circle_tree(&e);
        let oracle = plane_tree_oracle(e.steps())?;
        report.record(
            "tree = parser",
            seed,
            check(oracle.isomorphic_to(&tree), || "shape differs".into()),
        );
        let classes = (0..1000).find_map(|_| {
            let (a, b) = (rng.gen_range(0..period), rng.gen_range(0..period));
            ((tree.class_of(a) == tree.class_of(b)) != (g.d(a, b) == 0))
                .then(|| format!("times {a}, {b}"))
        });
        report.record("classes = {d_g = 0}", seed, classes.map_or(Ok(()), Err));

        let lam = build_lamination(&tree);
        report.record(
            "lamination non-crossing",
            seed,
            check_noncrossing(&lam).map_err(|(a, b)| format!("{a:?} x {b:?}")),
        );
        let census = face_census(&lam);
        report.record(
            "lamination faces = K + 1",
            seed,
            check(census.euler_holds(), || {
                format!("{} faces, {} chords", census.faces, census.chords)
            }),
        );

        let z = sample_labels(&tree, IncrementLaw::Uniform3, seed)?;
        let steps_ok = z.values()[0] == 0
            && (1..tree.n_vertices()).all(|v| {
                (z.vertex_labels()[v] - z.vertex_labels()[tree.parent(v).unwrap()]).abs() <= 1
            });
        report.record(
            "labels rooted, steps <= 1",
            seed,
            check(steps_ok, || "bad increment".into()),
        );

        report.record(
            "reroot isometry",
            seed,
            reroot_isometry_check(&e, &z, 2000, seed)?.map_err(|w| format!("{w:?}")),
        );

        let r = reroot(&e, &z)?;
        let sample = MapMetricSample::stratified(r.z_bar.clone(), period.min(200), seed)?;
        report.record(
            "{D* = 0} = {D° = 0}",
            seed,
            zero_class_check(&sample).map_err(|w| format!("{w:?}")),
        );

        let small = MapMetricSample::stratified(r.z_bar.clone(), period.min(12), seed)?;
        let m = small.len();
        let mut fw: Vec<Vec<i64>> = (0..m)
            .map(|i| (0..m).map(|j| small.d_circ(i, j).unwrap()).collect())
            .collect();
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    fw[i][j] = fw[i][j].min(fw[i][k] + fw[k][j]);
                }
            }
        }
        let dj =
            (0..m).find(|&s| dense_dijkstra(m, s, |i, j| small.d_circ(i, j).unwrap()) != fw[s]);
        report.record(
            "Dijkstra = Floyd-Warshall",
            seed,
            dj.map_or(Ok(()), |s| Err(format!("source {s}"))),
        );

        let q = sample_quadrangulation(n, seed)?;
        report.record("quadrangulation invariants", seed, map_invariants(&q, n, 2));
        let h = sample_2k_angulation(n, 3, seed)?;
        report.record("hexangulation invariants", seed, map_invariants(&h, n, 3));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_small_inputs() {
        let report = run_suite(64, 0..=3).unwrap();
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.rows.len(), 14);
        assert!(report.rows.iter().all(|r| r.passed == 4));
        let table = report.to_string();
        assert_eq!(table.lines().count(), 15);
    }

    #[test]
    fn failures_keep_the_first_witness() {
        let mut r = VerifyReport {
            n: 1,
            seeds: (0, 1),
            rows: Vec::new(),
        };
        r.record("x", 0, Err("first".into()));
        r.record("x", 1, Err("second".into()));
        assert_eq!(
            r.first_failure().unwrap().witness.as_deref(),
            Some("seed 0: first")
        );
        assert!(!r.all_passed());
    }
}
