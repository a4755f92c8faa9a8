//! Minimal standalone SVG figures.

use std::fmt::Write;

use shrinker_core::CoverageRaster;

const SIZE: f64 = 600.0;
const PAD: f64 = 40.0;

fn open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">\n\
         <title>{title}</title>\n<rect width=\"{w}\" height=\"{w}\" fill=\"white\"/>\n",
        w = SIZE + 2.0 * PAD
    )
}

/// Affine map of `[lo, hi]²` onto the drawing square, `y` pointing up.
struct Square {
    lo: f64,
    hi: f64,
}

impl Square {
    fn x(&self, v: f64) -> f64 {
        PAD + (v - self.lo) / (self.hi - self.lo) * SIZE
    }

    fn y(&self, v: f64) -> f64 {
        PAD + (self.hi - v) / (self.hi - self.lo) * SIZE
    }

    fn len(&self, v: f64) -> f64 {
        v / (self.hi - self.lo) * SIZE
    }
}

/// Planar curve with dashed reference circles about the origin.
pub fn curve_trace(title: &str, points: &[[f64; 2]], circles: &[f64]) -> String {
    let reach = points
        .iter()
        .flat_map(|p| [p[0].abs(), p[1].abs()])
        .chain(circles.iter().copied())
        .filter(|v| v.is_finite())
        .fold(1e-9f64, f64::max)
        * 1.05;
    let sq = Square { lo: -reach, hi: reach };
    let mut s = open(title);
    for r in circles {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>",
            sq.x(0.0),
            sq.y(0.0),
            sq.len(*r)
        );
    }
    s.push_str("<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"");
    for p in points.iter().filter(|p| p[0].abs() <= reach && p[1].abs() <= reach) {
        let _ = write!(s, "{:.3},{:.3} ", sq.x(p[0]), sq.y(p[1]));
    }
    s.push_str("\"/>\n</svg>\n");
    s
}

const SHADES: [&str; 8] = [
    "#fff7bc", "#fee391", "#fec44f", "#fe9929", "#ec7014", "#cc4c02", "#993404", "#662506",
];

/// Covered cells grey, uncovered cells shaded by distance to the nearest sampled plane.
/// Three-dimensional rasters are drawn through their middle slice.
pub fn heat_map(title: &str, raster: &CoverageRaster) -> String {
    let b = &raster.raster_box;
    let (nx, ny) = (b.cells[0], b.cells[1]);
    let nz = b.cells.get(2).copied().unwrap_or(1);
    let index = |i: usize, j: usize| (i * ny + j) * nz + nz / 2;
    let far = (0..nx * ny)
        .map(|k| index(k / ny, k % ny))
        .filter(|&k| !raster.covered[k])
        .map(|k| raster.min_dist[k])
        .fold(0.0f64, f64::max);
    let class = |k: usize| -> usize {
        if raster.covered[k] || far <= 0.0 {
            SHADES.len()
        } else {
            ((raster.min_dist[k] / far) * (SHADES.len() - 1) as f64).round() as usize
        }
    };
    let (w, h) = (b.hi[0] - b.lo[0], b.hi[1] - b.lo[1]);
    let scale = SIZE / w.max(h);
    let (cw, ch) = (w / nx as f64 * scale, h / ny as f64 * scale);
    let mut s = open(title).replacen("<svg ", "<svg shape-rendering=\"crispEdges\" ", 1);
    for j in 0..ny {
        let y = PAD + (ny - 1 - j) as f64 * ch;
        let mut i = 0;
        while i < nx {
            let c = class(index(i, j));
            let start = i;
            while i < nx && class(index(i, j)) == c {
                i += 1;
            }
            let fill = SHADES.get(c).copied().unwrap_or("#bdbdbd");
            let _ = writeln!(
                s,
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{fill}\"/>",
                PAD + start as f64 * cw,
                y,
                (i - start) as f64 * cw,
                ch
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Log-log plot of `(h, residual)` series, one polyline per series.
pub fn log_log(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, p)| p.iter().copied())
        .filter(|&(h, r)| h > 0.0 && r > 0.0)
        .map(|(h, r)| (h.log10(), r.log10()))
        .collect();
    let mut s = open(title);
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |v: f64| PAD + (v - x0) / (x1 - x0) * SIZE;
    let py = |v: f64| PAD + (y1 - v) / (y1 - y0) * SIZE;
    let _ = writeln!(
        s,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"none\" stroke=\"black\"/>"
    );
    for d in x0 as i32..=x1 as i32 {
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"11\" text-anchor=\"middle\">1e{d}</text>",
            px(d as f64),
            PAD + SIZE + 15.0
        );
    }
    for d in y0 as i32..=y1 as i32 {
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"11\" text-anchor=\"end\">1e{d}</text>",
            PAD - 4.0,
            py(d as f64) + 4.0
        );
    }
    for (k, (name, points)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut line = String::new();
        for &(h, r) in points.iter().filter(|&&(h, r)| h > 0.0 && r > 0.0) {
            let (x, y) = (px(h.log10()), py(r.log10()));
            let _ = write!(line, "{x:.3},{y:.3} ");
            let _ = writeln!(s, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"{color}\"/>");
        }
        let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{color}\" points=\"{}\"/>", line.trim_end());
        let _ = writeln!(
            s,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" fill=\"{color}\">{name}</text>",
            PAD + 8.0,
            PAD + 16.0 * (k + 1) as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
