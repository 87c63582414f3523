//! SVG plots derived purely from the persisted CSV files.

use std::ops::Range;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use sqg_core::littlewood_paley::{ratio_from_parts, Orientation};

use crate::error::{Error, Result};
use crate::store::{self, Table};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotSummary {
    pub files: Vec<PathBuf>,
    /// Set when nothing was drawn.
    pub message: Option<String>,
    /// First probe time where the dynamic-cutoff ratio exceeds c_*.
    pub crossing: Option<f64>,
}

type Series = (String, Vec<(f64, f64)>);

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Plot(e.to_string())
}

fn span(values: impl Iterator<Item = f64>) -> Range<f64> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return 0.0..1.0;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad)..(hi + pad)
}

/// Draws line-and-point series with optional horizontal reference lines.
fn line_chart(path: &Path, title: &str, x_label: &str, series: &[Series], hlines: &[(String, f64)]) -> Result<()> {
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (900, 560)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let xs = span(series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)));
        let ys = span(
            series
                .iter()
                .flat_map(|(_, p)| p.iter().map(|q| q.1))
                .chain(hlines.iter().map(|h| h.1)),
        );
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 22))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(xs.clone(), ys)
            .map_err(plot_err)?;
        chart.configure_mesh().x_desc(x_label).draw().map_err(plot_err)?;
        for (i, (name, pts)) in series.iter().enumerate() {
            let colour = Palette99::pick(i).to_rgba();
            let finite: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.1.is_finite()).collect();
            chart
                .draw_series(LineSeries::new(finite.clone(), colour.stroke_width(2)))
                .map_err(plot_err)?
                .label(name.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], colour));
            chart
                .draw_series(finite.into_iter().map(|p| Circle::new(p, 3, colour.filled())))
                .map_err(plot_err)?;
        }
        for (name, y) in hlines {
            chart
                .draw_series(LineSeries::new(vec![(xs.start, *y), (xs.end, *y)], BLACK.stroke_width(1)))
                .map_err(plot_err)?
                .label(name.as_str())
                .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], BLACK));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    store::write_file(path, svg.as_bytes())
}

/// Writes every plot whose source CSV exists under `dir/plots/`.
pub fn emit_plots(dir: &Path) -> Result<PlotSummary> {
    let mut summary = PlotSummary::default();
    let out = dir.join("plots");
    let trajectory = dir.join(store::TRAJECTORY);
    let twin = dir.join(store::TWIN);
    if !trajectory.exists() && !twin.exists() {
        return Err(Error::file(&trajectory, std::io::ErrorKind::NotFound.into()));
    }
    if trajectory.exists() {
        let table = Table::read(&trajectory)?;
        if table.rows.is_empty() {
            summary.message = Some(format!("{}: no probes, nothing to plot", trajectory.display()));
        } else {
            norm_plot(&table, &out, &mut summary)?;
            shell_plot(&dir.join(store::SHELLS), &out, &mut summary)?;
        }
    }
    if twin.exists() {
        let table = Table::read(&twin)?;
        if table.rows.is_empty() {
            summary.message = Some(format!("{}: no probes, nothing to plot", twin.display()));
        } else {
            let cstar = store::load_config(dir)?.constants.cstar.value;
            ratio_plot(&table, cstar, &out, &mut summary)?;
        }
    }
    Ok(summary)
}

fn norm_plot(table: &Table, out: &Path, summary: &mut PlotSummary) -> Result<()> {
    let time = table.column("time")?;
    table.require(&["hs"])?;
    let series: Vec<Series> = table
        .header
        .iter()
        .filter(|h| h.as_str() == "hs" || h.starts_with("lp:") || h.starts_with("hs:") || h.starts_with("besov:"))
        .map(|h| Ok((h.clone(), time.iter().copied().zip(table.column(h)?).collect())))
        .collect::<Result<_>>()?;
    let path = out.join("norms.svg");
    line_chart(&path, "norms against time", "t", &series, &[])?;
    summary.files.push(path);
    Ok(())
}

fn shell_plot(path: &Path, out: &Path, summary: &mut PlotSummary) -> Result<()> {
    let table = Table::read(path)?;
    let c = table.require(&["time", "j", "l2"])?;
    let mut series: Vec<Series> = Vec::new();
    for r in 0..table.rows.len() {
        let t = table.number(r, c[0])?;
        let j = table.number(r, c[1])?;
        let v = table.number(r, c[2])?;
        let name = format!("t = {t}");
        if series.last().map(|s| &s.0) != Some(&name) {
            series.push((name, Vec::new()));
        }
        if v > 0.0 {
            series.last_mut().unwrap().1.push((j, v.log10()));
        }
    }
    // at most a dozen curves keep the waterfall legible
    let stride = series.len().div_ceil(12).max(1);
    let picked: Vec<Series> = series.into_iter().step_by(stride).collect();
    let file = out.join("shells.svg");
    line_chart(&file, "log10 ||Δ_jθ||₂ by shell", "j", &picked, &[])?;
    summary.files.push(file);
    Ok(())
}

fn ratio_plot(table: &Table, cstar: f64, out: &Path, summary: &mut PlotSummary) -> Result<()> {
    let c = table.require(&["time", "thm4_low", "thm4_high", "thm5_low", "thm5_high"])?;
    let mut fixed = Vec::new();
    let mut dynamic = Vec::new();
    for r in 0..table.rows.len() {
        let t = table.number(r, c[0])?;
        let ratio = |lo: usize, hi: usize, o: Orientation| -> Result<f64> {
            let (l, h) = (table.number(r, lo)?, table.number(r, hi)?);
            if l == 0.0 && h == 0.0 {
                Ok(f64::NAN)
            } else {
                Ok(ratio_from_parts(l, h, o)?)
            }
        };
        fixed.push((t, ratio(c[1], c[2], Orientation::HighOverLow)?));
        let d = ratio(c[3], c[4], Orientation::LowOverHigh)?;
        if summary.crossing.is_none() && d > cstar {
            summary.crossing = Some(t);
        }
        dynamic.push((t, d));
    }
    let series = vec![
        ("fixed J: high/low".to_string(), fixed),
        ("dynamic J(t): low/high".to_string(), dynamic),
    ];
    let file = out.join("ratios.svg");
    line_chart(&file, "L^p ratios of w", "t", &series, &[("c_*".to_string(), cstar)])?;
    summary.files.push(file);
    Ok(())
}
