//! Single-deployment scene: every node's RAIL diagnostics as JSON and a
//! drawing of one target's bounding box, rays and estimate.

use std::path::Path;

use anyhow::anyhow;
use rail_core::network::{build_graph, generate_deployment, Deployment, NetworkError, NodeId};
use rail_core::rail::{localize_all, RailOutcome};
use rail_core::rng::{stream, Stream};
use rail_core::{Point, Ray};
use serde::Serialize;

use crate::output::Staged;
use crate::svg::Svg;
use crate::{load_config, Failure};

const SCALE: f64 = 12.0;
const MARGIN: f64 = 30.0;

/// Contents of `scene.json`. The deployment fields sit at the top level so
/// the file loads directly as a [`Deployment`].
#[derive(Debug, Serialize)]
pub struct Scene<'a> {
    #[serde(flatten)]
    pub deployment: &'a Deployment,
    pub seed: u64,
    pub selected_target: NodeId,
    pub outcomes: &'a [RailOutcome],
}

pub fn cmd_demo(
    config: &Path,
    seed: u64,
    target: Option<NodeId>,
    out: &Path,
    stdout: &mut dyn std::io::Write,
) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let density = cfg.densities[0];
    let dep = generate_deployment(&cfg.deployment_config(density), seed).map_err(|e| match e {
        NetworkError::GenerationFailed { .. } => Failure::generation(e),
        other => Failure::input(other),
    })?;
    let model = cfg.model().map_err(Failure::input)?;
    let g = build_graph(&dep, &model, &mut stream(seed, Stream::Noise));
    let outcomes = localize_all(&dep, &g).map_err(Failure::input)?;

    let target = target.unwrap_or(outcomes[0].target_id);
    let Some(selected) = outcomes.iter().find(|o| o.target_id == target) else {
        return Err(Failure::input(anyhow!(
            "--target {target} is not an unknown node of this {}-node deployment",
            dep.node_count()
        )));
    };
    log::info!(
        "demo: {} nodes, seed {seed}, target {target} via {:?}",
        dep.node_count(),
        selected.diagnostics.case_fired
    );

    let scene = Scene {
        deployment: &dep,
        seed,
        selected_target: target,
        outcomes: &outcomes,
    };
    let json = serde_json::to_string_pretty(&scene).map_err(Failure::input)?;
    let mut staged = Staged::new(out).map_err(Failure::input)?;
    staged.add("scene.json", json);
    staged.add("scene.svg", render(&dep, selected));
    staged.commit().map_err(Failure::input)?;

    let err = selected.estimate.distance(&dep.nodes[target]);
    writeln!(
        stdout,
        "target {target}: true ({:.2}, {:.2}), estimate ({:.2}, {:.2}), error {err:.4} m, case {:?}",
        dep.nodes[target].x,
        dep.nodes[target].y,
        selected.estimate.x,
        selected.estimate.y,
        selected.diagnostics.case_fired
    )
    .map_err(Failure::input)?;
    Ok(())
}

/// Distance along `ray` until it leaves the deployment area.
fn exit_length(ray: &Ray, width: f64, height: f64) -> f64 {
    let axis = |o: f64, d: f64, hi: f64| {
        if d > 0.0 {
            (hi - o) / d
        } else if d < 0.0 {
            -o / d
        } else {
            f64::INFINITY
        }
    };
    axis(ray.origin.x, ray.dx, width)
        .min(axis(ray.origin.y, ray.dy, height))
        .max(0.0)
}

pub fn render(dep: &Deployment, outcome: &RailOutcome) -> String {
    let px = |p: Point| (MARGIN + p.x * SCALE, MARGIN + (dep.height - p.y) * SCALE);
    let mut svg = Svg::new(
        dep.width * SCALE + 2.0 * MARGIN,
        dep.height * SCALE + 2.0 * MARGIN + 20.0,
    );
    svg.rect(
        "area",
        px(Point::new(0.0, dep.height)),
        dep.width * SCALE,
        dep.height * SCALE,
        "#999",
        "none",
    );

    for id in dep.unknown_ids() {
        svg.circle("node", px(dep.nodes[id]), 2.0, "#777");
    }
    for &a in &dep.anchor_ids {
        svg.circle("anchor", px(dep.nodes[a]), 5.0, "#d62728");
    }

    let diag = &outcome.diagnostics;
    let b = diag.bbox;
    svg.rect(
        "bbox",
        px(Point::new(b.x_min, b.y_max)),
        b.width() * SCALE,
        b.height() * SCALE,
        "#1f77b4",
        "rgba(31,119,180,0.08)",
    );
    for ray in &diag.rays {
        let end = ray.at(exit_length(ray, dep.width, dep.height));
        svg.line("ray", px(ray.origin), px(end), "#ff7f0e", 1.2);
    }
    for &p in &diag.intersections {
        svg.circle("intersection", px(p), 3.0, "#9467bd");
    }
    let truth = dep.nodes[outcome.target_id];
    svg.circle("truth", px(truth), 4.0, "#2ca02c");
    svg.circle("estimate", px(outcome.estimate), 4.0, "#000");

    let caption = format!(
        "target {}: {:?}, error {:.2} m (green: true, black: estimate)",
        outcome.target_id,
        diag.case_fired,
        outcome.estimate.distance(&truth)
    );
    svg.text(
        (MARGIN, dep.height * SCALE + 2.0 * MARGIN + 5.0),
        "start",
        12,
        &caption,
    );
    svg.finish()
}
