//! SVG charts.

use plotters::prelude::*;
use re100::{Error, Result};

const SIZE: (u32, u32) = (720, 540);
const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(255, 127, 14),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Style {
    Line,
    Markers,
    LineMarkers,
    Dots,
    Steps,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Self {
            label: label.into(),
            points,
            style,
        }
    }
}

fn err<E: std::fmt::Display>(e: E) -> Error {
    Error::Io(format!("plot: {e}"))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo {
        0.05 * (hi - lo)
    } else {
        0.5 * lo.abs().max(1.0)
    };
    (lo - pad, hi + pad)
}

/// Line and scatter chart; axis ranges cover all points.
pub fn chart(title: &str, x_desc: &str, y_desc: &str, series: &[Series]) -> Result<String> {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = range(all().map(|p| p.0));
    let (y0, y1) = range(all().map(|p| p.1));
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(x0..x1, y0..y1)
            .map_err(err)?;
        chart
            .configure_mesh()
            .x_desc(x_desc)
            .y_desc(y_desc)
            .draw()
            .map_err(err)?;
        for (i, s) in series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .copied()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .collect();
            let legend = |c: RGBColor| {
                move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], c.stroke_width(2))
            };
            match s.style {
                Style::Line | Style::LineMarkers | Style::Steps => {
                    let path = if s.style == Style::Steps {
                        let mut out = Vec::with_capacity(2 * pts.len());
                        for w in pts.windows(2) {
                            out.push(w[0]);
                            out.push((w[1].0, w[0].1));
                        }
                        out.extend(pts.last());
                        out
                    } else {
                        pts.clone()
                    };
                    chart
                        .draw_series(LineSeries::new(path, color.stroke_width(2)))
                        .map_err(err)?
                        .label(s.label.clone())
                        .legend(legend(color));
                    if s.style == Style::LineMarkers {
                        chart
                            .draw_series(pts.iter().map(|&p| Circle::new(p, 4, color.filled())))
                            .map_err(err)?;
                    }
                }
                Style::Markers => {
                    chart
                        .draw_series(pts.iter().map(|&p| Circle::new(p, 4, color.filled())))
                        .map_err(err)?
                        .label(s.label.clone())
                        .legend(legend(color));
                }
                Style::Dots => {
                    let grey = RGBColor(150, 150, 150);
                    chart
                        .draw_series(pts.iter().map(|&p| Circle::new(p, 1, grey.filled())))
                        .map_err(err)?
                        .label(s.label.clone())
                        .legend(legend(grey));
                }
            }
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(err)?;
        root.present().map_err(err)?;
    }
    Ok(svg)
}

/// Grouped bar chart: one group per label, one bar per series entry.
pub fn bars(
    title: &str,
    y_desc: &str,
    groups: &[String],
    series: &[String],
    values: &[Vec<f64>],
) -> Result<String> {
    let top = values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max)
        * 1.1;
    let top = if top > 0.0 { top } else { 1.0 };
    let n = groups.len().max(1);
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(0.0..n as f64, 0.0..top)
            .map_err(err)?;
        let names = groups.to_vec();
        chart
            .configure_mesh()
            .disable_x_mesh()
            .x_labels(n)
            .x_label_formatter(&move |x: &f64| {
                let k = x.floor() as usize;
                if (x - k as f64 - 0.5).abs() < 1e-9 {
                    names.get(k).cloned().unwrap_or_default()
                } else {
                    String::new()
                }
            })
            .y_desc(y_desc)
            .draw()
            .map_err(err)?;
        let width = 0.8 / series.len().max(1) as f64;
        for (j, name) in series.iter().enumerate() {
            let color = PALETTE[j % PALETTE.len()];
            let rects: Vec<_> = values
                .iter()
                .enumerate()
                .filter(|(_, row)| row[j].is_finite())
                .map(|(g, row)| {
                    let x = g as f64 + 0.1 + j as f64 * width;
                    Rectangle::new([(x, 0.0), (x + width, row[j])], color.filled())
                })
                .collect();
            chart
                .draw_series(rects)
                .map_err(err)?
                .label(name.clone())
                .legend(move |(x, y)| {
                    Rectangle::new([(x, y - 5), (x + 12, y + 5)], color.filled())
                });
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(err)?;
        root.present().map_err(err)?;
    }
    Ok(svg)
}
