//! Per-density line charts of the per-run mean error.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context};
use rail_core::experiment::Algorithm;
use serde::Deserialize;

use crate::output::Staged;
use crate::svg::Svg;
use crate::Failure;

#[derive(Debug, Deserialize)]
struct RunRow {
    algorithm: String,
    density: usize,
    run_index: usize,
    #[allow(dead_code)]
    seed: u64,
    run_mean_error_m: f64,
}

pub type Series = BTreeMap<Algorithm, Vec<(usize, f64)>>;

/// Groups runs.csv rows by density, then by algorithm, sorted by run index.
pub fn read_runs(path: &Path) -> anyhow::Result<BTreeMap<usize, Series>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut by_density: BTreeMap<usize, Series> = BTreeMap::new();
    for (i, row) in reader.deserialize::<RunRow>().enumerate() {
        let row = row.with_context(|| format!("{}: malformed row {}", path.display(), i + 1))?;
        let alg = Algorithm::from_label(&row.algorithm)
            .ok_or_else(|| anyhow!("{}: unknown algorithm {:?}", path.display(), row.algorithm))?;
        if !row.run_mean_error_m.is_finite() {
            return Err(anyhow!(
                "{}: non-finite error in row {}",
                path.display(),
                i + 1
            ));
        }
        by_density
            .entry(row.density)
            .or_default()
            .entry(alg)
            .or_default()
            .push((row.run_index, row.run_mean_error_m));
    }
    if by_density.is_empty() {
        return Err(anyhow!("{} contains no runs", path.display()));
    }
    for series in by_density.values_mut().flat_map(|s| s.values_mut()) {
        series.sort_by_key(|&(run, _)| run);
    }
    Ok(by_density)
}

pub fn cmd_plot(runs: &Path, out: &Path, stdout: &mut dyn std::io::Write) -> Result<(), Failure> {
    let data = read_runs(runs).map_err(Failure::input)?;
    let mut staged = Staged::new(out).map_err(Failure::input)?;
    for (density, series) in &data {
        staged.add(format!("runs_{density}.svg"), chart(*density, series));
    }
    for path in staged.commit().map_err(Failure::input)? {
        writeln!(stdout, "{}", path.display()).map_err(Failure::input)?;
    }
    Ok(())
}

fn color(alg: Algorithm) -> &'static str {
    match alg {
        Algorithm::MinMax => "#1f77b4",
        Algorithm::RssiDvHop => "#ff7f0e",
        Algorithm::Rail => "#2ca02c",
    }
}

/// Rounds up to 1, 2 or 5 times a power of ten.
fn nice_ceiling(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&c| c >= v)
        .unwrap_or(10.0 * mag)
}

pub fn chart(density: usize, series: &Series) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    let (left, right, top, bottom) = (60.0, 140.0, 40.0, 50.0);
    let (pw, ph) = (W - left - right, H - top - bottom);

    let runs = series.values().flatten().map(|&(r, _)| r);
    let (mut x_lo, mut x_hi) = (
        runs.clone().min().unwrap_or(0) as f64,
        runs.max().unwrap_or(0) as f64,
    );
    if x_hi <= x_lo {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_max = nice_ceiling(
        series
            .values()
            .flatten()
            .map(|&(_, e)| e)
            .fold(0.0, f64::max)
            * 1.05,
    );
    let px = |run: usize, err: f64| {
        (
            left + (run as f64 - x_lo) / (x_hi - x_lo) * pw,
            top + ph - err / y_max * ph,
        )
    };

    let mut svg = Svg::new(W, H);
    svg.text(
        (left + pw / 2.0, 24.0),
        "middle",
        15,
        &format!("Per-run mean error, {density} nodes"),
    );
    svg.line("axis", (left, top + ph), (left + pw, top + ph), "#000", 1.0);
    svg.line("axis", (left, top), (left, top + ph), "#000", 1.0);
    for i in 0..=5 {
        let v = y_max * i as f64 / 5.0;
        let y = top + ph - ph * i as f64 / 5.0;
        svg.line("tick", (left - 4.0, y), (left, y), "#000", 1.0);
        svg.text((left - 7.0, y + 4.0), "end", 11, &format!("{v:.1}"));
    }
    let span = (x_hi - x_lo).max(1.0);
    let step = (span / 5.0).ceil().max(1.0) as usize;
    let mut run = x_lo.ceil().max(0.0) as usize;
    while run as f64 <= x_hi {
        let (x, _) = px(run, 0.0);
        svg.line("tick", (x, top + ph), (x, top + ph + 4.0), "#000", 1.0);
        svg.text((x, top + ph + 17.0), "middle", 11, &run.to_string());
        run += step;
    }
    svg.text((left + pw / 2.0, H - 10.0), "middle", 12, "run index");
    svg.text((16.0, top - 10.0), "start", 12, "error (m)");

    for (i, (alg, points)) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = points.iter().map(|&(r, e)| px(r, e)).collect();
        if pts.len() == 1 {
            svg.circle("marker", pts[0], 3.5, color(*alg));
        } else {
            svg.polyline("series", &pts, color(*alg));
        }
        let ly = top + 10.0 + 20.0 * i as f64;
        svg.line(
            "legend",
            (W - right + 15.0, ly),
            (W - right + 40.0, ly),
            color(*alg),
            2.0,
        );
        svg.text((W - right + 46.0, ly + 4.0), "start", 12, alg.label());
    }
    svg.finish()
}
