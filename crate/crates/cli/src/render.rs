//! Deterministic SVG rendering of selections and overlap heatmaps.
//!
//! All geometry is dyadic, and dyadic rationals have finite decimal
//! expansions, so every coordinate is written exactly and the output is
//! byte-identical across runs and platforms.

use anyhow::{bail, Result};
use std::fmt::Write as _;

use dirmax_core::{overlap_at, Dyadic, Parallelogram, Selection};

/// Exact decimal expansion of a dyadic rational.
pub fn dec(d: Dyadic) -> String {
    let e = d.exponent();
    if e >= 0 {
        return (d.mantissa() << e).to_string();
    }
    let k = (-e) as u32;
    if k > 40 {
        // Beyond pragmatic precision for rendering; round in f64.
        return format!("{:.12}", d.to_f64());
    }
    // m / 2^k = m * 5^k / 10^k.
    let digits = d.mantissa().unsigned_abs() * 5u128.pow(k);
    let sign = if d.is_negative() { "-" } else { "" };
    let s = format!("{digits:0>width$}", width = k as usize + 1);
    let (int, frac) = s.split_at(s.len() - k as usize);
    format!("{sign}{int}.{frac}")
}

pub struct RenderOpts {
    pub dilates: bool,
    pub element_cap: usize,
}

impl Default for RenderOpts {
    fn default() -> RenderOpts {
        RenderOpts { dilates: false, element_cap: 20_000 }
    }
}

struct Canvas {
    min_x: Dyadic,
    max_y: Dyadic,
    body: String,
}

impl Canvas {
    fn x(&self, x: Dyadic) -> String {
        dec(x - self.min_x)
    }

    fn y(&self, y: Dyadic) -> String {
        dec(self.max_y - y)
    }

    fn polygon(&mut self, pts: &[(Dyadic, Dyadic)], style: &str) {
        let coords: Vec<String> =
            pts.iter().map(|(x, y)| format!("{},{}", self.x(*x), self.y(*y))).collect();
        writeln!(self.body, "  <polygon points=\"{}\" {}/>", coords.join(" "), style).unwrap();
    }
}

fn corners(band: &dirmax_core::Band) -> [(Dyadic, Dyadic); 4] {
    let l0 = band.lower_at(band.x_lo);
    let l1 = band.lower_at(band.x_hi);
    [
        (band.x_lo, l0),
        (band.x_hi, l1),
        (band.x_hi, l1 + band.thickness),
        (band.x_lo, l0 + band.thickness),
    ]
}

fn bounds(rects: impl Iterator<Item = [(Dyadic, Dyadic); 4]>) -> (Dyadic, Dyadic, Dyadic, Dyadic) {
    let mut min_x = Dyadic::ZERO;
    let mut max_x = Dyadic::ONE;
    let mut min_y = Dyadic::ZERO;
    let mut max_y = Dyadic::ONE;
    for quad in rects {
        for (x, y) in quad {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    let pad = Dyadic::new(1, -4);
    (min_x - pad, max_x + pad, min_y - pad, max_y + pad)
}

fn svg_document(min_x: Dyadic, max_x: Dyadic, min_y: Dyadic, max_y: Dyadic) -> (Canvas, String) {
    let width = dec(max_x - min_x);
    let height = dec(max_y - min_y);
    let header = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {width} {height}\" width=\"640\" height=\"640\">\n\
         <defs>\n  <pattern id=\"hatch\" width=\"0.03125\" height=\"0.03125\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\n    <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"0.03125\" stroke=\"#888888\" stroke-width=\"0.008\"/>\n  </pattern>\n</defs>\n"
    );
    (Canvas { min_x, max_y, body: String::new() }, header)
}

fn unit_square(canvas: &mut Canvas) {
    let pts = [
        (Dyadic::ZERO, Dyadic::ZERO),
        (Dyadic::ONE, Dyadic::ZERO),
        (Dyadic::ONE, Dyadic::ONE),
        (Dyadic::ZERO, Dyadic::ONE),
    ];
    canvas.polygon(&pts, "fill=\"none\" stroke=\"#000000\" stroke-width=\"0.004\"");
}

/// Renders a selection: `r1` outlined, `r2` hatched, dilates optionally
/// dashed. Output is byte-identical for identical input.
pub fn render_selection_svg(sel: &Selection, opts: &RenderOpts) -> Result<String> {
    let elements = sel.r1.len() + sel.r2.len();
    if elements > opts.element_cap {
        bail!("selection has {elements} elements, above the render cap {}", opts.element_cap);
    }
    let all = sel
        .r1
        .iter()
        .map(|r| corners(&r.band()))
        .chain(sel.r2.iter().map(|e| corners(&e.rect.band())));
    let (min_x, max_x, min_y, max_y) = bounds(all);
    let (mut canvas, header) = svg_document(min_x, max_x, min_y, max_y);
    unit_square(&mut canvas);
    for e in &sel.r2 {
        canvas.polygon(
            &corners(&e.rect.band()),
            "fill=\"url(#hatch)\" stroke=\"#bbbbbb\" stroke-width=\"0.001\"",
        );
    }
    if opts.dilates {
        for r in &sel.r1 {
            canvas.polygon(
                &corners(&r.dilate5()),
                "fill=\"none\" stroke=\"#777777\" stroke-width=\"0.002\" stroke-dasharray=\"0.02,0.01\"",
            );
        }
    }
    for r in &sel.r1 {
        canvas.polygon(
            &corners(&r.band()),
            "fill=\"none\" stroke=\"#c62828\" stroke-width=\"0.003\"",
        );
    }
    Ok(format!("{header}{}</svg>\n", canvas.body))
}

const HEAT_PALETTE: [&str; 9] = [
    "#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c",
    "#08306b",
];

/// Overlap heatmap of the `r1` members: the count `sum chi_R` sampled at the
/// centers of a `2^raster x 2^raster` grid over the content box, with a
/// value-labeled legend.
pub fn render_heatmap_svg(
    r1: &[Parallelogram],
    raster: u32,
    element_cap: usize,
) -> Result<String> {
    if r1.len() > element_cap {
        bail!("family has {} elements, above the render cap {element_cap}", r1.len());
    }
    let (min_x, max_x, min_y, max_y) = bounds(r1.iter().map(|r| corners(&r.band())));
    let (mut canvas, header) = svg_document(min_x, max_x, min_y, max_y);
    let cells = 1i128 << raster;
    let step_x = (max_x - min_x).mul_pow2(-(raster as i32));
    let step_y = (max_y - min_y).mul_pow2(-(raster as i32));
    let mut max_count = 0usize;
    for i in 0..cells {
        for j in 0..cells {
            let x0 = min_x + step_x.mul_int(i);
            let y0 = min_y + step_y.mul_int(j);
            let cx = (x0 + step_x.half()).to_rat();
            let cy = (y0 + step_y.half()).to_rat();
            let count = overlap_at(r1, &cx, &cy);
            max_count = max_count.max(count);
            if count == 0 {
                continue;
            }
            let color = HEAT_PALETTE[count.min(HEAT_PALETTE.len() - 1)];
            let pts = [
                (x0, y0),
                (x0 + step_x, y0),
                (x0 + step_x, y0 + step_y),
                (x0, y0 + step_y),
            ];
            canvas.polygon(&pts, &format!("fill=\"{color}\" stroke=\"none\""));
        }
    }
    unit_square(&mut canvas);
    // Legend: one labeled swatch per occurring count.
    let mut legend = String::new();
    for (row, count) in (1..=max_count.min(HEAT_PALETTE.len() - 1)).enumerate() {
        let y = Dyadic::new(row as i128 + 1, -5);
        writeln!(
            legend,
            "  <rect x=\"{}\" y=\"{}\" width=\"0.03\" height=\"0.03\" fill=\"{}\"/>\n  <text x=\"{}\" y=\"{}\" font-size=\"0.03\">{}</text>",
            dec(max_x - min_x + Dyadic::new(1, -5) - Dyadic::new(1, -4)),
            dec(y),
            HEAT_PALETTE[count.min(HEAT_PALETTE.len() - 1)],
            dec(max_x - min_x + Dyadic::new(1, -5) - Dyadic::new(1, -4) + Dyadic::new(5, -7)),
            dec(y + Dyadic::new(3, -7)),
            count
        )
        .unwrap();
    }
    Ok(format!("{header}{}{legend}</svg>\n", canvas.body))
}
