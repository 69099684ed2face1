//! Minimal SVG output for curves and point sets (debug / artifact plots).

use std::io::{self, Write};
use std::path::Path;

/// One plotted element: a polyline (optionally closed) or, when `points` has
/// length 1, a dot.
pub struct SvgLayer {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
    pub color: String,
}

impl SvgLayer {
    pub fn line(points: Vec<[f64; 2]>, color: &str) -> Self {
        Self {
            points,
            closed: false,
            color: color.to_string(),
        }
    }

    pub fn loop_(points: Vec<[f64; 2]>, color: &str) -> Self {
        Self {
            points,
            closed: true,
            color: color.to_string(),
        }
    }
}

/// Writes layers into a standalone SVG with an auto-fitted viewBox.
/// The y axis is flipped so the plot matches mathematical orientation.
pub fn write_svg(path: &Path, layers: &[SvgLayer]) -> io::Result<()> {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for layer in layers {
        for p in &layer.points {
            for c in 0..2 {
                min[c] = min[c].min(p[c]);
                max[c] = max[c].max(p[c]);
            }
        }
    }
    if !min[0].is_finite() {
        min = [0.0, 0.0];
        max = [1.0, 1.0];
    }
    let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
    let pad = 0.05 * span;
    let (x0, y0) = (min[0] - pad, min[1] - pad);
    let (w, h) = (max[0] - min[0] + 2.0 * pad, max[1] - min[1] + 2.0 * pad);
    let stroke = 0.004 * span;

    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0} {} {w} {h}\">",
        -(y0 + h)
    )?;
    for layer in layers {
        if layer.points.len() == 1 {
            let p = layer.points[0];
            writeln!(
                f,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
                p[0],
                -p[1],
                3.0 * stroke,
                layer.color
            )?;
            continue;
        }
        let tag = if layer.closed { "polygon" } else { "polyline" };
        let pts: Vec<String> = layer
            .points
            .iter()
            .map(|p| format!("{},{}", p[0], -p[1]))
            .collect();
        writeln!(
            f,
            "  <{tag} points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{stroke}\"/>",
            pts.join(" "),
            layer.color
        )?;
    }
    writeln!(f, "</svg>")?;
    Ok(())
}
