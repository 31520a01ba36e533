//! Box-counting (Minkowski) dimension estimates for chord families in the
//! disk and for point sets on the circle.
//!
//! Scales are dyadic box sides `eps = 2^-k`; the slope of
//! `log2 N(eps)` against `log2 (1/eps)` is fitted over a middle window that
//! drops the two coarsest and two finest levels when enough levels remain.

use std::collections::HashSet;

use serde::Serialize;

use crate::circle_tree::CircleTree;
use crate::error::{Error, Result};
use crate::excursion::DiscreteExcursion;
use crate::lamination::Lamination;
use crate::stats::least_squares;

/// A straight segment in the plane.
pub type Segment = [(f64, f64); 2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// Box sides, coarsest first.
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    pub slope: f64,
    pub stderr: f64,
    /// Inclusive index range into `scales` used by the fit.
    pub window: (usize, usize),
}

impl DimensionEstimate {
    fn fit(scales: Vec<f64>, counts: Vec<u64>) -> Self {
        let len = scales.len();
        let window = if len >= 6 { (2, len - 3) } else { (0, len - 1) };
        let (lo, hi) = window;
        let x: Vec<f64> = scales[lo..=hi].iter().map(|s| -s.log2()).collect();
        let y: Vec<f64> = counts[lo..=hi]
            .iter()
            .map(|&c| (c.max(1) as f64).log2())
            .collect();
        let fit = least_squares(&x, &y);
        DimensionEstimate {
            scales,
            counts,
            slope: fit.slope,
            stderr: fit.stderr,
            window,
        }
    }

    /// `scale,count` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,count\n");
        for (s, c) in self.scales.iter().zip(&self.counts) {
            out.push_str(&format!("{s},{c}\n"));
        }
        out
    }
}

/// Box sides `2^-k` for `k` in `levels`, coarsest first.
pub fn dyadic_scales(levels: std::ops::RangeInclusive<u32>) -> Vec<f64> {
    levels.map(|k| 0.5f64.powi(k as i32)).collect()
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.len() < 2 {
        return Err(Error::InvalidArgument("need at least two scales".into()));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) || scales.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidArgument(
            "scales must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Cells of side `eps` (grid origin at `(-1 - shift, -1 - shift)`) met by
/// the segment, by exact grid traversal.
fn rasterize(seg: &Segment, eps: f64, shift: f64, cells: &mut HashSet<(i64, i64)>) {
    let to_grid = |(x, y): (f64, f64)| ((x + 1.0 + shift) / eps, (y + 1.0 + shift) / eps);
    let (x0, y0) = to_grid(seg[0]);
    let (x1, y1) = to_grid(seg[1]);
    let (mut cx, mut cy) = (x0.floor() as i64, y0.floor() as i64);
    let (ex, ey) = (x1.floor() as i64, y1.floor() as i64);
    cells.insert((cx, cy));
    let (dx, dy) = (x1 - x0, y1 - y0);
    let step_x = if dx > 0.0 { 1 } else { -1 };
    let step_y = if dy > 0.0 { 1 } else { -1 };
    let t_delta_x = if dx != 0.0 {
        (1.0 / dx).abs()
    } else {
        f64::INFINITY
    };
    let t_delta_y = if dy != 0.0 {
        (1.0 / dy).abs()
    } else {
        f64::INFINITY
    };
    let mut t_max_x = if dx > 0.0 {
        ((cx + 1) as f64 - x0) / dx
    } else if dx < 0.0 {
        (cx as f64 - x0) / dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy > 0.0 {
        ((cy + 1) as f64 - y0) / dy
    } else if dy < 0.0 {
        (cy as f64 - y0) / dy
    } else {
        f64::INFINITY
    };
    let budget = (ex - cx).abs() + (ey - cy).abs();
    for _ in 0..budget {
        if t_max_x < t_max_y {
            cx += step_x;
            t_max_x += t_delta_x;
        } else {
            cy += step_y;
            t_max_y += t_delta_y;
        }
        cells.insert((cx, cy));
    }
}

/// Number of boxes of side `eps` met by the segments, with the grid shifted
/// by `shift` along both axes.
pub fn count_boxes(segments: &[Segment], eps: f64, shift: f64) -> u64 {
    let mut cells = HashSet::new();
    for seg in segments {
        rasterize(seg, eps, shift, &mut cells);
    }
    cells.len() as u64
}

/// Box-counting estimate for a family of segments inside the unit disk.
pub fn box_count_segments(segments: &[Segment], scales: &[f64]) -> Result<DimensionEstimate> {
    if segments.is_empty() {
        return Err(Error::Empty("no segments"));
    }
    check_scales(scales)?;
    let counts = scales
        .iter()
        .map(|&eps| count_boxes(segments, eps, 0.0))
        .collect();
    Ok(DimensionEstimate::fit(scales.to_vec(), counts))
}

/// Klein-model chords of a lamination as straight segments.
pub fn lamination_segments(lam: &Lamination) -> Vec<Segment> {
    lam.chords
        .iter()
        .map(|c| {
            let (a, b) = c.angles(lam.period);
            [(a.cos(), a.sin()), (b.cos(), b.sin())]
        })
        .collect()
}

/// The unit circle as an inscribed `m`-gon.
pub fn circle_polyline(m: usize) -> Vec<Segment> {
    let p = |i: usize| {
        let t = std::f64::consts::TAU * i as f64 / m as f64;
        (t.cos(), t.sin())
    };
    (0..m).map(|i| [p(i), p(i + 1)]).collect()
}

/// Circle points, as fractions of a turn in `[0, 1)`, of every contour time
/// whose class is not a singleton.
pub fn endpoint_set(tree: &CircleTree) -> Vec<f64> {
    let period = tree.period() as f64;
    let mut pts: Vec<f64> = (0..tree.n_vertices())
        .filter(|&v| tree.visits(v).len() >= 2)
        .flat_map(|v| {
            tree.circle_visits(v)
                .iter()
                .map(move |&t| t as f64 / period)
        })
        .collect();
    pts.sort_by(f64::total_cmp);
    pts
}

/// Times `t` in `]a, 2n]` where the contour reaches a new running minimum
/// since `a`, as fractions of a turn. Every such time returns to an ancestor
/// of the vertex visited at `a`, so the set lies inside [`endpoint_set`].
pub fn ladder_set(e: &DiscreteExcursion, a: usize) -> Vec<f64> {
    let h = e.heights();
    let period = e.period() as f64;
    let mut running = h[a];
    let mut pts = Vec::new();
    for (t, &v) in h.iter().enumerate().skip(a + 1) {
        if v <= running {
            running = v;
            pts.push((t % e.period()) as f64 / period);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Number of arcs of length `eps` (turn fractions, grid shifted by `shift`)
/// containing at least one point.
pub fn count_arcs(points: &[f64], eps: f64, shift: f64) -> u64 {
    let mut boxes: Vec<i64> = points
        .iter()
        .map(|&x| ((x + shift) / eps).floor() as i64)
        .collect();
    boxes.sort_unstable();
    boxes.dedup();
    boxes.len() as u64
}

/// One-dimensional box counting on the circle.
pub fn box_count_points(points: &[f64], scales: &[f64]) -> Result<DimensionEstimate> {
    if points.is_empty() {
        return Err(Error::Empty("no points"));
    }
    check_scales(scales)?;
    let counts = scales
        .iter()
        .map(|&eps| count_arcs(points, eps, 0.0))
        .collect();
    Ok(DimensionEstimate::fit(scales.to_vec(), counts))
}

/// `slope(L) >= 1 + slope(A) - tol`.
pub fn dim_lower_bound_check(
    lamination: &DimensionEstimate,
    endpoints: &DimensionEstimate,
    tol: f64,
) -> bool {
    lamination.slope >= 1.0 + endpoints.slope - tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_tree::build_circle_tree;
    use crate::lamination::build_lamination;

    fn staircase(n: usize) -> DiscreteExcursion {
        let h: Vec<i64> = (0..=n as i64).chain((0..n as i64).rev()).collect();
        DiscreteExcursion::from_heights(&h).unwrap()
    }

    #[test]
    fn diameter_has_dimension_one() {
        let est = box_count_segments(&[[(-1.0, 0.0), (1.0, 0.0)]], &dyadic_scales(3..=9)).unwrap();
        assert!((est.slope - 1.0).abs() < 0.05, "{est:?}");
        assert_eq!(est.window, (2, 4));
        let tilted =
            box_count_segments(&[[(-0.6, -0.8), (0.8, 0.6)]], &dyadic_scales(3..=9)).unwrap();
        assert!((tilted.slope - 1.0).abs() < 0.05, "{tilted:?}");
    }

    #[test]
    fn circle_has_dimension_one() {
        let est = box_count_segments(&circle_polyline(8192), &dyadic_scales(3..=9)).unwrap();
        assert!((est.slope - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn counts_nonincreasing_in_scale() {
        let e = crate::excursion::sample_dyck_excursion(4096, 1).unwrap();
        let segs = lamination_segments(&build_lamination(&build_circle_tree(&e)));
        let est = box_count_segments(&segs, &dyadic_scales(2..=9)).unwrap();
        assert!(est.counts.windows(2).all(|w| w[0] <= w[1]));
        assert!(est.slope.is_finite());
    }

    #[test]
    fn shifted_grid_within_factor_four() {
        let e = crate::excursion::sample_dyck_excursion(4096, 2).unwrap();
        let segs = lamination_segments(&build_lamination(&build_circle_tree(&e)));
        for eps in dyadic_scales(3..=9) {
            let a = count_boxes(&segs, eps, 0.0) as f64;
            let b = count_boxes(&segs, eps, eps / 2.0) as f64;
            assert!(a / b <= 4.0 && b / a <= 4.0, "eps {eps}: {a} vs {b}");
        }
    }

    #[test]
    fn rasterizer_supercover_matches_brute_force() {
        // every cell whose closed square meets the segment, by dense sampling
        let segs = [
            [(-0.9, -0.3), (0.7, 0.55)],
            [(0.1, 0.9), (0.1, -0.9)],
            [(-0.5, 0.5), (0.5, 0.5)],
        ];
        for seg in &segs {
            let eps = 0.125;
            let mut fast = HashSet::new();
            rasterize(seg, eps, 0.0, &mut fast);
            let mut dense = HashSet::new();
            for i in 0..=100_000 {
                let t = i as f64 / 100_000.0;
                let x = seg[0].0 + t * (seg[1].0 - seg[0].0);
                let y = seg[0].1 + t * (seg[1].1 - seg[0].1);
                dense.insert((
                    ((x + 1.0) / eps).floor() as i64,
                    ((y + 1.0) / eps).floor() as i64,
                ));
            }
            assert_eq!(fast, dense, "{seg:?}");
        }
    }

    #[test]
    fn cantor_calibration() {
        // left endpoints of the depth-14 middle-thirds construction
        let mut pts = vec![0.0f64];
        let mut len = 1.0;
        for _ in 0..14 {
            len /= 3.0;
            pts = pts.iter().flat_map(|&x| [x, x + 2.0 * len]).collect();
        }
        let est = box_count_points(&pts, &dyadic_scales(3..=14)).unwrap();
        let target = 2f64.ln() / 3f64.ln();
        assert!(
            (est.slope - target).abs() < 0.05,
            "{} vs {target}",
            est.slope
        );
    }

    #[test]
    fn single_edge_endpoints() {
        let e = DiscreteExcursion::from_heights(&[0, 1, 0]).unwrap();
        assert_eq!(endpoint_set(&build_circle_tree(&e)), vec![0.0]);
    }

    #[test]
    fn staircase_endpoints_fill_the_circle() {
        let e = staircase(2048);
        let t = build_circle_tree(&e);
        let a = endpoint_set(&t);
        assert_eq!(a.len(), 4095);
        let est = box_count_points(&a, &dyadic_scales(3..=9)).unwrap();
        assert!((est.slope - 1.0).abs() < 0.05);

        let l = box_count_segments(
            &lamination_segments(&build_lamination(&t)),
            &dyadic_scales(3..=9),
        )
        .unwrap();
        assert!((l.slope - 2.0).abs() < 0.1, "{l:?}");
        assert!(dim_lower_bound_check(&l, &est, 0.1));
    }

    #[test]
    fn single_chord_bound_is_tight() {
        let l = box_count_segments(&[[(-1.0, 0.0), (1.0, 0.0)]], &dyadic_scales(3..=9)).unwrap();
        let a = box_count_points(&[0.0, 0.5], &dyadic_scales(3..=9)).unwrap();
        assert_eq!(a.slope, 0.0);
        assert!(dim_lower_bound_check(&l, &a, 0.05));
    }

    #[test]
    fn ladder_set_is_inside_endpoints() {
        let e = crate::excursion::sample_dyck_excursion(2000, 5).unwrap();
        let t = build_circle_tree(&e);
        let a: HashSet<u64> = endpoint_set(&t).iter().map(|x| x.to_bits()).collect();
        let h = ladder_set(&e, 1000);
        assert!(!h.is_empty());
        assert!(h.iter().all(|x| a.contains(&x.to_bits())));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(box_count_segments(&[], &dyadic_scales(1..=4)).is_err());
        assert!(box_count_points(&[0.5], &[0.5]).is_err());
        assert!(box_count_points(&[0.5], &[0.25, 0.5]).is_err());
    }

    #[test]
    fn csv_rows() {
        let est = box_count_points(&[0.1, 0.6], &dyadic_scales(1..=3)).unwrap();
        assert_eq!(est.to_csv(), "scale,count\n0.5,2\n0.25,2\n0.125,2\n");
    }
}
