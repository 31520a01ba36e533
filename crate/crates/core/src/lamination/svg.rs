use std::fmt::Write as _;
use std::path::Path;

use super::{Chord, DiskModel, Lamination};
use crate::error::{Error, Result};

/// SVG 1.1 drawing of the lamination inside the unit circle. Output is a
/// pure function of the inputs.
pub fn svg_string(lam: &Lamination, model: DiskModel, width_px: u32) -> String {
    let w = f64::from(width_px);
    let c = w / 2.0;
    let r = w / 2.0 - 2.0;
    let px = |x: f64, y: f64| (c + r * x, c - r * y);

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width_px}" height="{width_px}" viewBox="0 0 {width_px} {width_px}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<circle cx="{c:.4}" cy="{c:.4}" r="{r:.4}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .unwrap();
    writeln!(out, r#"<g fill="none" stroke="black" stroke-width="0.5">"#).unwrap();
    for chord in &lam.chords {
        let (ta, tb) = chord.angles(lam.period);
        let (x1, y1) = px(ta.cos(), ta.sin());
        let (x2, y2) = px(tb.cos(), tb.sin());
        match model {
            DiskModel::Poincare if !is_diameter(chord, lam.period) => {
                // geodesic: circle orthogonal to the boundary, centred at
                // sec(half-angle) along the bisector, radius tan(half-angle)
                let mut delta = tb - ta;
                if delta > std::f64::consts::PI {
                    delta = std::f64::consts::TAU - delta;
                }
                let half = delta / 2.0;
                let radius = r * half.tan();
                // sweep so the arc bends towards the disk centre
                let mid = {
                    let (sx, sy) = (ta.cos() + tb.cos(), ta.sin() + tb.sin());
                    sy.atan2(sx)
                };
                let (ccx, ccy) = px(mid.cos() / half.cos(), mid.sin() / half.cos());
                let cross = (x1 - ccx) * (y2 - ccy) - (y1 - ccy) * (x2 - ccx);
                let sweep = u8::from(cross > 0.0);
                writeln!(
                    out,
                    r#"<path d="M {x1:.4} {y1:.4} A {radius:.4} {radius:.4} 0 0 {sweep} {x2:.4} {y2:.4}"/>"#
                )
                .unwrap();
            }
            _ => {
                writeln!(out, r#"<path d="M {x1:.4} {y1:.4} L {x2:.4} {y2:.4}"/>"#).unwrap();
            }
        }
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}

fn is_diameter(chord: &Chord, period: usize) -> bool {
    2 * (chord.b - chord.a) == period
}

/// Writes [`svg_string`] to `path`.
pub fn render_svg(
    lam: &Lamination,
    model: DiskModel,
    path: impl AsRef<Path>,
    width_px: u32,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, svg_string(lam, model, width_px)).map_err(|e| Error::io(path, e))
}
