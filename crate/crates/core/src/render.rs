//! Heat maps of rewards and abstractions (binary PPM) and frontier curves (SVG).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::domains::{Domain, Layout};
use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::frontier::{rows_csv, FrontierRow};
use crate::metrics;

/// Side of one heat-map cell in pixels.
pub const CELL_PX: usize = 40;
/// Width of the line drawn between cells of different clusters.
pub const BOUNDARY_PX: usize = 2;
/// Fill for chart slots that hold no chip.
pub const EMPTY_RGB: [u8; 3] = [128, 128, 128];

/// Diverging scale: -1 blue, 0 white, +1 red, linear in each half. Values
/// outside `[-1, 1]` are clamped.
pub fn diverging_rgb(value: f64) -> [u8; 3] {
    let v = value.clamp(-1.0, 1.0);
    let fade = |t: f64| (255.0 * (1.0 - t)).round() as u8;
    if v < 0.0 {
        let c = fade(-v);
        [c, c, 255]
    } else {
        let c = fade(v);
        [255, c, c]
    }
}

/// Values laid out on a `rows × cols` lattice, top row first. Slots are
/// `None` where a chart has no chip.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    rows: usize,
    cols: usize,
    values: Vec<Option<f64>>,
    clusters: Option<Vec<Option<usize>>>,
}

impl Heatmap {
    /// Arranges per-item `values` by `layout`. Grid cell `(x, y)` sits in
    /// column `x`, with `y = 0` on the bottom row. Chart chips fill rows of
    /// `ceil(sqrt(n))` columns in id order.
    pub fn new(layout: &Layout, values: &[f64], clusters: Option<&[usize]>) -> Result<Self> {
        let n = layout.n_items();
        if values.len() != n {
            return Err(Error::mismatch(format!(
                "heat map of {} needs {n} values, got {}",
                layout.signature(),
                values.len()
            )));
        }
        if let Some(c) = clusters {
            if c.len() != n {
                return Err(Error::mismatch(format!(
                    "heat map of {} needs {n} cluster labels, got {}",
                    layout.signature(),
                    c.len()
                )));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("heat map value for item {i} is not finite")));
        }
        let (rows, cols, slot_item): (usize, usize, Box<dyn Fn(usize, usize) -> Option<usize>>) = match layout {
            Layout::Grid { width, height } => {
                let (w, h) = (*width, *height);
                (h, w, Box::new(move |r, c| Some((h - 1 - r) * w + c)))
            }
            Layout::Chart { .. } => {
                let cols = (n as f64).sqrt().ceil() as usize;
                let rows = n.div_ceil(cols);
                (rows, cols, Box::new(move |r, c| Some(r * cols + c).filter(|&i| i < n)))
            }
        };
        let mut slots = Vec::with_capacity(rows * cols);
        let mut labels = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let item = slot_item(r, c);
                slots.push(item.map(|i| values[i]));
                labels.push(item.and_then(|i| clusters.map(|cl| cl[i])));
            }
        }
        Ok(Self {
            rows,
            cols,
            values: slots,
            clusters: clusters.map(|_| labels),
        })
    }

    /// The domain's own reward table.
    pub fn true_reward(domain: &Domain) -> Result<Self> {
        Self::new(&domain.layout, domain.rewards.values(), None)
    }

    /// Each item colored by its cluster's mean reward under `domain`, with
    /// cluster boundaries drawn.
    pub fn cluster_mean(domain: &Domain, encoder: &Encoder) -> Result<Self> {
        let means = metrics::cluster_means(encoder, &domain.rewards)?;
        let values: Vec<f64> = encoder.assignments().iter().map(|&z| means[z]).collect();
        Self::new(&domain.layout, &values, Some(encoder.assignments()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Value in row `r` (from the top) and column `c`.
    pub fn value(&self, r: usize, c: usize) -> Option<f64> {
        self.values[r * self.cols + c]
    }

    fn cluster(&self, r: usize, c: usize) -> Option<usize> {
        self.clusters.as_ref().and_then(|cl| cl[r * self.cols + c])
    }

    /// Whether a boundary separates this slot from the neighbor at `(r2, c2)`.
    fn split(&self, r: usize, c: usize, r2: usize, c2: usize) -> bool {
        match (self.cluster(r, c), self.cluster(r2, c2)) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        }
    }

    pub fn rasterize(&self) -> Raster {
        let (width, height) = (self.cols * CELL_PX, self.rows * CELL_PX);
        let mut raster = Raster::filled(width, height, EMPTY_RGB);
        let half = BOUNDARY_PX / 2;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let Some(v) = self.value(r, c) else { continue };
                let fill = diverging_rgb(v);
                let top = r > 0 && self.split(r, c, r - 1, c);
                let bottom = r + 1 < self.rows && self.split(r, c, r + 1, c);
                let left = c > 0 && self.split(r, c, r, c - 1);
                let right = c + 1 < self.cols && self.split(r, c, r, c + 1);
                for dy in 0..CELL_PX {
                    for dx in 0..CELL_PX {
                        let edge = (top && dy < half)
                            || (bottom && dy >= CELL_PX - half)
                            || (left && dx < half)
                            || (right && dx >= CELL_PX - half);
                        let rgb = if edge { [0, 0, 0] } else { fill };
                        raster.set(c * CELL_PX + dx, r * CELL_PX + dy, rgb);
                    }
                }
            }
        }
        raster
    }
}

/// RGB image, rows top first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Raster {
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            pixels: rgb.repeat(width * height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Raw RGB bytes.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Binary PPM (P6) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// RGBA bytes with full opacity.
    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels.chunks_exact(3).flat_map(|p| [p[0], p[1], p[2], 255]).collect()
    }
}

/// Writes `heatmap` to `out` as binary PPM.
pub fn render_heatmap(heatmap: &Heatmap, out: &Path) -> Result<()> {
    write_bytes(out, &heatmap.rasterize().to_ppm())
}

/// One labeled curve of a frontier plot.
#[derive(Debug, Clone, Copy)]
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [FrontierRow],
}

const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// SVG plot of distortion against complexity, one polyline per non-empty
/// series. Empty series are skipped; at least one must have points.
pub fn frontier_svg(series: &[Series]) -> Result<String> {
    let drawn: Vec<&Series> = series.iter().filter(|s| !s.points.is_empty()).collect();
    if drawn.is_empty() {
        return Err(Error::validation("frontier plot needs at least one non-empty series"));
    }
    let all = || drawn.iter().flat_map(|s| s.points.iter());
    let x_max = nice_ceiling(all().map(|p| p.complexity_bits).fold(0.0, f64::max));
    let y_max = nice_ceiling(all().map(|p| p.distortion_mse).fold(0.0, f64::max));
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |c: f64| MARGIN_LEFT + plot_w * c / x_max;
    let py = |d: f64| MARGIN_TOP + plot_h * (1.0 - d / y_max);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (px(0.0), py(0.0), px(x_max), py(y_max));
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (cx, dy) = (x_max * t, y_max * t);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(cx),
            y0 + 16.0,
            crate::fmt::sig(cx, 3)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            py(dy) + 4.0,
            crate::fmt::sig(dy, 3)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">complexity (bits)</text>"#,
        (x0 + x1) / 2.0,
        SVG_HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">distortion (MSE)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for (i, s) in drawn.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.complexity_bits), py(p.distortion_mse)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-label="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            xml_escape(s.label),
            coords.join(" ")
        );
        let ly = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        let lx = x1 + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            xml_escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes the SVG to `out` and one frontier CSV per non-empty series next
/// to it, named `<stem>.<label>.csv`. Returns the CSV paths.
pub fn render_frontier(series: &[Series], out: &Path) -> Result<Vec<PathBuf>> {
    let svg = frontier_svg(series)?;
    write_bytes(out, svg.as_bytes())?;
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let dir = out.parent().unwrap_or(Path::new(""));
    let mut written = Vec::new();
    for s in series.iter().filter(|s| !s.points.is_empty()) {
        let path = dir.join(format!("{stem}.{}.csv", file_safe(s.label)));
        write_bytes(&path, rows_csv(s.points).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Smallest value of the form `m · 10^k` with `m` in {1, 1.5, 2, 2.5, 3, 4, 5, 6, 8, 10}
/// that is at least `v`; 1 for non-positive input.
fn nice_ceiling(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let base = 10f64.powf(v.log10().floor());
    [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0]
        .iter()
        .map(|m| m * base)
        .find(|&c| c >= v)
        .unwrap_or(10.0 * base)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn file_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
