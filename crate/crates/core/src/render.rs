//! Deterministic SVG 1.1 pictures of a window.
//!
//! Coordinates are computed exactly and printed with 12 significant digits.

use std::fmt::Write as _;

use crate::cantor;
use crate::error::{FanError, Result};
use crate::fanmodel::FanApprox;
use crate::rat::Rat;
use crate::seqindex::{SeqIndex, TruncationBounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderMode {
    /// Bars for `I_s`, one row per depth, with ticks at `x_s`.
    Intervals,
    /// A vertical segment of height `φ(x_s)` at `x_s`.
    Fan,
}

impl std::str::FromStr for RenderMode {
    type Err = FanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "intervals" => Ok(RenderMode::Intervals),
            "fan" => Ok(RenderMode::Fan),
            other => Err(FanError::Invalid(format!("unknown render mode `{other}` (expected intervals or fan)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
    pub margin: u32,
    pub stroke: Rat,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas { width: 800, height: 400, margin: 20, stroke: Rat::one() }
    }
}

/// `v` with 12 significant digits, trailing zeros removed.
pub fn coord(v: &Rat) -> String {
    let f = v.to_f64();
    if f == 0.0 {
        return "0".into();
    }
    let mag = f.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let mut s = format!("{f:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

struct Frame<'a> {
    canvas: &'a Canvas,
}

impl Frame<'_> {
    fn plot_w(&self) -> Rat {
        Rat::from_int(i64::from(self.canvas.width - 2 * self.canvas.margin))
    }

    fn plot_h(&self) -> Rat {
        Rat::from_int(i64::from(self.canvas.height - 2 * self.canvas.margin))
    }

    fn x(&self, t: &Rat) -> Rat {
        &Rat::from_int(i64::from(self.canvas.margin)) + &(t * &self.plot_w())
    }

    /// Page coordinate of height `y ∈ [0,1]` (0 at the bottom).
    fn y(&self, t: &Rat) -> Rat {
        &Rat::from_int(i64::from(self.canvas.height - self.canvas.margin)) - &(t * &self.plot_h())
    }
}

fn header(out: &mut String, canvas: &Canvas, title: &str) {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = canvas.width,
        h = canvas.height
    )
    .unwrap();
    writeln!(out, "<title>{title}</title>").unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, canvas.width, canvas.height).unwrap();
}

fn line(out: &mut String, x1: &Rat, y1: &Rat, x2: &Rat, y2: &Rat, stroke: &Rat) {
    writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{}"/>"#,
        coord(x1),
        coord(y1),
        coord(x2),
        coord(y2),
        coord(stroke)
    )
    .unwrap();
}

/// Intervals `I_s` and points `x_s` for every index of the window.
pub fn render_intervals(bounds: &TruncationBounds, canvas: &Canvas) -> String {
    let frame = Frame { canvas };
    let mut out = String::new();
    header(&mut out, canvas, &format!("intervals, depth {}, breadth {}", bounds.depth, bounds.breadth));
    let rows = Rat::from_int(bounds.depth as i64 + 1);
    let tick = &frame.plot_h() / &(&rows * &Rat::from_int(4));
    let mut window: Vec<SeqIndex> = bounds.enumerate();
    window.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.entries().cmp(b.entries())));
    for s in &window {
        let it = cantor::interval(s);
        let level = &Rat::from_int(s.len() as i64 + 1) / &(&rows + &Rat::one());
        let y = frame.y(&(&Rat::one() - &level));
        line(&mut out, &frame.x(&it.lo), &y, &frame.x(&it.hi), &y, &canvas.stroke);
        let x = frame.x(&it.lo);
        line(&mut out, &x, &(&y - &tick), &x, &(&y + &tick), &canvas.stroke);
    }
    out.push_str("</svg>\n");
    out
}

/// The hypograph skeleton: a segment of height `φ(x_s)` at `x_s`.
pub fn render_fan(fan: &FanApprox, canvas: &Canvas) -> String {
    let frame = Frame { canvas };
    let mut out = String::new();
    let b = fan.bounds();
    header(
        &mut out,
        canvas,
        &format!("variant {} fan, depth {}, breadth {}", fan.variant(), b.depth, b.breadth),
    );
    let base = frame.y(&Rat::zero());
    line(&mut out, &frame.x(&Rat::zero()), &base, &frame.x(&Rat::one()), &base, &canvas.stroke);
    let mut entries: Vec<_> = fan.entries().iter().collect();
    entries.sort_by(|a, b| a.x().cmp(b.x()));
    for e in entries {
        let x = frame.x(e.x());
        line(&mut out, &x, &base, &x, &frame.y(&e.phi), &canvas.stroke);
    }
    out.push_str("</svg>\n");
    out
}

/// Page coordinates `(x, top)` of the segment drawn for `s`.
pub fn fan_segment(fan: &FanApprox, s: &SeqIndex, canvas: &Canvas) -> Option<(String, String)> {
    let frame = Frame { canvas };
    let e = fan.get(s)?;
    Some((coord(&frame.x(e.x())), coord(&frame.y(&e.phi))))
}

/// Page coordinates `(x1, x2)` of the bar drawn for `I_s`.
pub fn interval_bar(s: &SeqIndex, canvas: &Canvas) -> (String, String) {
    let frame = Frame { canvas };
    let it = cantor::interval(s);
    (coord(&frame.x(&it.lo)), coord(&frame.x(&it.hi)))
}
