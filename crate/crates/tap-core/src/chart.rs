//! Grouped bar charts from quantitative TAP frames.
//!
//! Values plot against one compared-content role; shared content becomes the
//! title. Rendering is a fixed-size static SVG with deterministic output.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::TapFrame;
use crate::graph::{RoleInventory, RoleLabel, Sentence, Vertex};

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("no numeric literal in {0:?}")]
    NoNumberFound(String),
    #[error("analogous values mix units {0:?} and {1:?}")]
    UnitMismatchWithinSeries(String, String),
    #[error("no compared-content role usable as an x axis")]
    NoComparedRole,
}

/// A magnitude with its unit, extracted from a VALUE span's surface text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityValue {
    pub magnitude: f64,
    pub unit: String,
    pub raw: String,
}

fn number_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"-?\d{1,3}(?:,\d{3})+(?:\.\d+)?|-?\d+(?:\.\d+)?").unwrap()
    })
}

const CURRENCY: [char; 4] = ['$', '£', '€', '¥'];

/// Extract the first numeric literal and its unit from a span's text.
///
/// Digit-grouping commas and decimals are handled. Unit precedence: currency
/// symbol prefix, then a percent suffix, then the next alphabetic token.
pub fn parse_value(text: &str) -> Result<QuantityValue, ChartError> {
    let m = number_pattern()
        .find(text)
        .ok_or_else(|| ChartError::NoNumberFound(text.to_string()))?;
    let magnitude: f64 = m
        .as_str()
        .replace(',', "")
        .parse()
        .map_err(|_| ChartError::NoNumberFound(text.to_string()))?;

    let before = text[..m.start()].trim_end();
    let after = text[m.end()..].trim_start();
    let unit = if let Some(sym) = before.chars().last().filter(|c| CURRENCY.contains(c)) {
        sym.to_string()
    } else if after.starts_with('%') {
        "%".to_string()
    } else {
        after
            .split_whitespace()
            .next()
            .filter(|w| w.chars().all(|c| c.is_alphabetic()))
            .unwrap_or("")
            .to_string()
    };
    Ok(QuantityValue {
        magnitude,
        unit,
        raw: text.to_string(),
    })
}

/// One bar series: a unit and one magnitude (or gap) per category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub unit: String,
    pub values: Vec<Option<f64>>,
}

/// Declarative description of a grouped bar chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub title: String,
    pub x_role: RoleLabel,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
}

fn span_text(sentence: &Sentence, v: &Vertex) -> String {
    sentence.span_text(v.start, v.end)
}

/// Map one frame to a single-series chart.
///
/// The x axis is the requested compared role, or with `None` the compared
/// entry with the most filled slots (ties to inventory order). Facts whose
/// slot for that role is empty cannot be placed and are omitted; at least
/// two placed facts are required. All values of the frame must share a unit.
pub fn frame_to_chart(
    frame: &TapFrame,
    sentence: &Sentence,
    inventory: &RoleInventory,
    x_role: Option<&RoleLabel>,
) -> Result<ChartSpec, ChartError> {
    let candidates: Vec<&crate::frames::ComparedEntry> = frame
        .compared
        .iter()
        .filter(|c| !inventory.is_value(&c.role))
        .collect();
    let entry = match x_role {
        Some(role) => candidates
            .iter()
            .find(|c| c.role == *role)
            .copied()
            .ok_or(ChartError::NoComparedRole)?,
        None => {
            let rank = |r: &RoleLabel| inventory.index_of(r).unwrap_or(usize::MAX);
            candidates
                .iter()
                .max_by(|a, b| {
                    let fa = a.slots.iter().filter(|s| !s.is_empty()).count();
                    let fb = b.slots.iter().filter(|s| !s.is_empty()).count();
                    fa.cmp(&fb).then(rank(&b.role).cmp(&rank(&a.role)))
                })
                .copied()
                .ok_or(ChartError::NoComparedRole)?
        }
    };

    let mut categories = Vec::new();
    let mut magnitudes = Vec::new();
    let mut unit: Option<String> = None;
    for (fact, slot) in frame.facts.iter().zip(&entry.slots) {
        let Some(first) = slot.first() else {
            continue; // fact not covered by the x role
        };
        let q = parse_value(&span_text(sentence, &fact.value))?;
        match &unit {
            None => unit = Some(q.unit.clone()),
            Some(u) if *u != q.unit => {
                return Err(ChartError::UnitMismatchWithinSeries(u.clone(), q.unit))
            }
            _ => {}
        }
        categories.push(span_text(sentence, first));
        magnitudes.push(Some(q.magnitude));
    }
    if categories.len() < 2 {
        return Err(ChartError::NoComparedRole);
    }

    let rank = |r: &RoleLabel| inventory.index_of(r).unwrap_or(usize::MAX);
    let mut shared = frame.shared.clone();
    shared.sort_by_key(|s| (rank(&s.role), s.cluster.first().cloned()));
    let title = shared
        .iter()
        .filter_map(|s| s.cluster.first().map(|v| span_text(sentence, v)))
        .collect::<Vec<_>>()
        .join(" — ");

    Ok(ChartSpec {
        title,
        x_role: entry.role.clone(),
        categories,
        series: vec![Series {
            unit: unit.unwrap_or_default(),
            values: magnitudes,
        }],
    })
}

/// Merge charts that share an x role and categories into multi-series
/// charts; order is preserved and titles join with a separator.
pub fn merge_compatible(charts: Vec<ChartSpec>) -> Vec<ChartSpec> {
    let mut out: Vec<ChartSpec> = Vec::new();
    let mut index: BTreeMap<(String, Vec<String>), usize> = BTreeMap::new();
    for chart in charts {
        let key = (chart.x_role.as_str().to_string(), chart.categories.clone());
        match index.get(&key) {
            Some(&i) => {
                let target = &mut out[i];
                target.series.extend(chart.series);
                if !chart.title.is_empty() && !target.title.contains(&chart.title) {
                    if target.title.is_empty() {
                        target.title = chart.title;
                    } else {
                        target.title = format!("{} — {}", target.title, chart.title);
                    }
                }
            }
            None => {
                index.insert(key, out.len());
                out.push(chart);
            }
        }
    }
    out
}

/// Emit the chart as a single JSON line with sorted keys.
pub fn emit_chart_json(chart: &ChartSpec) -> Vec<u8> {
    let value = serde_json::to_value(chart).expect("chart serialization cannot fail");
    let mut bytes = serde_json::to_vec(&value).expect("value serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#4e79a7", "#e15759", "#59a14f", "#f28e2b", "#76b7b2", "#edc948",
];

fn fmt(x: f64) -> String {
    format!("{:.2}", x)
}

/// Render a deterministic grouped bar chart: fixed 640x400 viewbox, one
/// color per series, linear y axis from zero (or the minimum when negative
/// values are present) with 10% headroom, bars below the baseline for
/// negative values.
pub fn emit_svg(chart: &ChartSpec) -> Vec<u8> {
    let values: Vec<f64> = chart
        .series
        .iter()
        .flat_map(|s| s.values.iter().flatten().copied())
        .collect();
    let data_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let data_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_min = if data_min < 0.0 { data_min } else { 0.0 };
    let mut y_max = data_max.max(0.0);
    let span = (y_max - y_min).max(1e-9);
    y_max += 0.1 * span;
    let y_span = y_max - y_min;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y_pix = |v: f64| MARGIN_TOP + (y_max - v) / y_span * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" \
         font-family=\"sans-serif\">\n",
        WIDTH as u32, HEIGHT as u32
    ));
    if !chart.title.is_empty() {
        svg.push_str(&format!(
            "  <text class=\"title\" x=\"{}\" y=\"24\" text-anchor=\"middle\" \
             font-size=\"14\">{}</text>\n",
            fmt(WIDTH / 2.0),
            escape(&chart.title)
        ));
    }

    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{x}\" y1=\"{t}\" x2=\"{x}\" y2=\"{b}\" stroke=\"#333\"/>\n",
        x = fmt(MARGIN_LEFT),
        t = fmt(MARGIN_TOP),
        b = fmt(MARGIN_TOP + plot_h)
    ));
    let baseline = y_pix(0.0f64.max(y_min));
    svg.push_str(&format!(
        "  <line x1=\"{l}\" y1=\"{y}\" x2=\"{r}\" y2=\"{y}\" stroke=\"#333\"/>\n",
        l = fmt(MARGIN_LEFT),
        r = fmt(MARGIN_LEFT + plot_w),
        y = fmt(baseline)
    ));
    svg.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" text-anchor=\"end\" font-size=\"10\">{v}</text>\n",
        x = fmt(MARGIN_LEFT - 4.0),
        y = fmt(y_pix(y_max) + 4.0),
        v = fmt(y_max)
    ));
    svg.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" text-anchor=\"end\" font-size=\"10\">{v}</text>\n",
        x = fmt(MARGIN_LEFT - 4.0),
        y = fmt(y_pix(y_min) + 4.0),
        v = fmt(y_min)
    ));

    // Bars, grouped per category.
    let n_cats = chart.categories.len().max(1);
    let n_series = chart.series.len().max(1);
    let slot_w = plot_w / n_cats as f64;
    let bar_w = slot_w * 0.8 / n_series as f64;
    for (si, series) in chart.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        for (ci, value) in series.values.iter().enumerate() {
            let Some(v) = value else { continue };
            let x = MARGIN_LEFT + ci as f64 * slot_w + slot_w * 0.1 + si as f64 * bar_w;
            let y_v = y_pix(*v);
            let y0 = y_pix(0.0f64.max(y_min));
            let (y, h) = if y_v <= y0 {
                (y_v, y0 - y_v)
            } else {
                (y0, y_v - y0)
            };
            svg.push_str(&format!(
                "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                fmt(x),
                fmt(y),
                fmt(bar_w),
                fmt(h),
                color
            ));
        }
    }

    // Category labels.
    for (ci, cat) in chart.categories.iter().enumerate() {
        let x = MARGIN_LEFT + (ci as f64 + 0.5) * slot_w;
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            fmt(x),
            fmt(MARGIN_TOP + plot_h + 16.0),
            escape(cat)
        ));
    }

    // Legend: one swatch per series.
    for (si, series) in chart.series.iter().enumerate() {
        let y = MARGIN_TOP + 4.0 + si as f64 * 16.0;
        let label = if series.unit.is_empty() {
            format!("series {}", si + 1)
        } else {
            series.unit.clone()
        };
        svg.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            fmt(WIDTH - MARGIN_RIGHT - 90.0),
            fmt(y),
            PALETTE[si % PALETTE.len()]
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n",
            fmt(WIDTH - MARGIN_RIGHT - 76.0),
            fmt(y + 9.0),
            escape(&label)
        ));
    }

    svg.push_str("</svg>\n");
    svg.into_bytes()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
