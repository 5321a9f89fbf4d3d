//! RSSI angle-inferred localization.
//!
//! For each unknown node the pipeline runs in four steps:
//!
//! 1. **Bounding box.** Every anchor `i` bounds the target to the square
//!    `[x_i ± SD_i] × [y_i ± SD_i]`, where `SD_i` is the shortest multi-hop
//!    distance. With noise-free ranging `SD_i` never underestimates the true
//!    distance, so the intersection of the three squares always holds the
//!    target.
//! 2. **Per-hop error.** Anchor-to-anchor multi-hop distances are compared
//!    with the known anchor separations; the excess divided by the total hop
//!    count is the average error contributed by one hop.
//! 3. **Angle inference.** At anchor `A_i` the shortest paths towards
//!    another anchor and towards the target form triangles: for hop index `k`
//!    the sides are the distance along each path to its `k`-th node and the
//!    distance between those two nodes. Sides spanning two or more hops are
//!    shortened by the per-hop error before the law of cosines is applied,
//!    and the angles of up to three triangles are averaged. The angle to the
//!    third anchor decides on which side of `A_i A_j` the target lies, which
//!    turns every anchor into a directed ray.
//! 4. **Precise location.** Pairwise forward intersections of the three rays
//!    are tested against the bounding box, see [`LocationCase`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, AABox, Point, Ray, DEFAULT_TOL};
use crate::network::{
    shortest_between, AnchorRanging, Deployment, NetworkError, NetworkGraph, NodeId, RangingResult,
    ShortestPathTree,
};

/// Smallest length a corrected triangle side may take, meters.
pub const MIN_SIDE: f64 = 0.01;
/// Number of hop-indexed triangles averaged per angle.
pub const ANGLE_SAMPLES: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RailError {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("anchor pair {0}-{1} has a zero hop count")]
    ZeroHops(NodeId, NodeId),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// The three anchors used for one target, with everything known about
/// their mutual geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorTriple {
    pub ids: [NodeId; 3],
    pub positions: [Point; 3],
    /// True separations for the pairs (0,1), (0,2), (1,2).
    pub pairwise_true_distances: [f64; 3],
    /// Multi-hop ranging for the pairs (0,1), (0,2), (1,2).
    pub pairwise_ranging: [RangingResult; 3],
}

pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

impl AnchorTriple {
    pub fn new(
        dep: &Deployment,
        ranging: &AnchorRanging,
        ids: [NodeId; 3],
    ) -> Result<Self, RailError> {
        let positions = ids.map(|id| dep.nodes[id]);
        let pairwise_true_distances = PAIRS.map(|(i, j)| positions[i].distance(&positions[j]));
        let [r01, r02, r12] = PAIRS.map(|(i, j)| ranging.ranging(ids[i], ids[j]));
        Ok(Self {
            ids,
            positions,
            pairwise_true_distances,
            pairwise_ranging: [r01?, r02?, r12?],
        })
    }

    pub fn per_hop_error(&self) -> Result<f64, RailError> {
        for (r, (i, j)) in self.pairwise_ranging.iter().zip(PAIRS) {
            if r.hop_count == 0 {
                return Err(RailError::ZeroHops(self.ids[i], self.ids[j]));
            }
        }
        let sd = self
            .pairwise_ranging
            .each_ref()
            .map(|r| r.shortest_distance);
        let hops = self.pairwise_ranging.each_ref().map(|r| r.hop_count);
        per_hop_error(&sd, &self.pairwise_true_distances, &hops)
    }
}

/// Average excess of multi-hop over true distance, per hop, floored at zero.
pub fn per_hop_error(
    shortest: &[f64; 3],
    true_distances: &[f64; 3],
    hops: &[usize; 3],
) -> Result<f64, RailError> {
    if hops.contains(&0) {
        return Err(RailError::DegenerateGeometry("anchor pair with zero hops"));
    }
    let excess: f64 = shortest.iter().sum::<f64>() - true_distances.iter().sum::<f64>();
    let total_hops: usize = hops.iter().sum();
    Ok((excess / total_hops as f64).max(0.0))
}

/// Intersection of the per-anchor squares of half-width `distances[i]`.
pub fn bounding_box(anchors: &[Point], distances: &[f64]) -> Option<AABox> {
    let squares: Vec<AABox> = anchors
        .iter()
        .zip(distances)
        .map(|(&p, &d)| AABox::around(p, d))
        .collect();
    geometry::intersect_boxes(&squares)
}

/// A triangle side measured over the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub length: f64,
    pub hops: usize,
}

impl Side {
    pub fn new(length: f64, hops: usize) -> Self {
        Self { length, hops }
    }

    /// Length after removing the per-hop error of multi-hop sides.
    pub fn corrected(&self, per_hop_error: f64) -> f64 {
        let len = if self.hops >= 2 {
            self.length - per_hop_error * self.hops as f64
        } else {
            self.length
        };
        if len.is_nan() {
            MIN_SIDE
        } else {
            len.max(MIN_SIDE)
        }
    }
}

/// Angle opposite side `c` by the law of cosines, on corrected sides.
///
/// Always in `[0, π]`: side lengths are floored and the cosine is clamped,
/// so triangle-inequality violations map to `0` or `π`.
pub fn triangle_angle(a: Side, b: Side, c: Side, per_hop_error: f64) -> f64 {
    let (a, b, c) = (
        a.corrected(per_hop_error),
        b.corrected(per_hop_error),
        c.corrected(per_hop_error),
    );
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    if cos.is_nan() {
        return PI / 2.0;
    }
    cos.clamp(-1.0, 1.0).acos()
}

/// Angle at one anchor between the direction to a reference anchor and the
/// direction to the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleEstimate {
    pub at_anchor: NodeId,
    pub reference_anchor: NodeId,
    /// Radians in `[0, π]`.
    pub theta: f64,
    pub samples_used: usize,
}

/// Triangle sides of hop-index `k` (1-based) for two paths leaving the same
/// anchor.
pub fn hop_triangle(
    g: &NetworkGraph,
    to_reference: &RangingResult,
    to_target: &RangingResult,
    k: usize,
) -> Result<(Side, Side, Side), RailError> {
    let a = Side::new(to_reference.distance_to_hop(g, k), k);
    let b = Side::new(to_target.distance_to_hop(g, k), k);
    let (u, v) = (to_reference.path[k], to_target.path[k]);
    let c = if u == v {
        Side::new(0.0, 0)
    } else if let Some(w) = g.edge(u, v) {
        Side::new(w, 1)
    } else {
        let r = shortest_between(g, u, v)?;
        Side::new(r.shortest_distance, r.hop_count)
    };
    Ok((a, b, c))
}

/// Averages the hop-indexed triangle angles along two shortest paths that
/// start at the same anchor.
pub fn estimate_angle_from_paths(
    g: &NetworkGraph,
    per_hop_error: f64,
    to_reference: &RangingResult,
    to_target: &RangingResult,
) -> Result<AngleEstimate, RailError> {
    if to_reference.anchor_id != to_target.anchor_id {
        return Err(RailError::DegenerateGeometry(
            "paths start at different anchors",
        ));
    }
    if to_target.target_id == to_target.anchor_id || to_target.target_id == to_reference.target_id {
        return Err(RailError::DegenerateGeometry(
            "target coincides with an anchor",
        ));
    }
    let k_max = ANGLE_SAMPLES
        .min(to_reference.hop_count)
        .min(to_target.hop_count);
    if k_max == 0 {
        return Err(RailError::DegenerateGeometry(
            "no hop-indexed triangle available",
        ));
    }
    // Triangles whose hop-k nodes coincide carry no angular information; they
    // are only used when the paths have not diverged within the sampled hops.
    let mut diverged = Vec::with_capacity(k_max);
    let mut coincident = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (a, b, c) = hop_triangle(g, to_reference, to_target, k)?;
        let theta = triangle_angle(a, b, c, per_hop_error);
        if !theta.is_finite() {
            continue;
        }
        if c.hops == 0 {
            coincident.push(theta);
        } else {
            diverged.push(theta);
        }
    }
    let samples = if diverged.is_empty() {
        coincident
    } else {
        diverged
    };
    let used = samples.len();
    let sum: f64 = samples.iter().sum();
    if used == 0 {
        return Err(RailError::DegenerateGeometry("no valid angle sample"));
    }
    Ok(AngleEstimate {
        at_anchor: to_target.anchor_id,
        reference_anchor: to_reference.target_id,
        theta: (sum / used as f64).clamp(0.0, PI),
        samples_used: used,
    })
}

/// Estimates the angle at anchor `at` between `reference` and `target`.
pub fn estimate_angle(
    g: &NetworkGraph,
    per_hop_error: f64,
    at: NodeId,
    reference: NodeId,
    target: NodeId,
) -> Result<AngleEstimate, RailError> {
    if target == at || target == reference {
        return Err(RailError::DegenerateGeometry(
            "target coincides with an anchor",
        ));
    }
    let tree = ShortestPathTree::new(g, at)?;
    estimate_angle_from_paths(
        g,
        per_hop_error,
        &tree.ranging(reference)?,
        &tree.ranging(target)?,
    )
}

fn unit_angle_between(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let dot = ax * bx + ay * by;
    let cross = ax * by - ay * bx;
    cross.atan2(dot).abs()
}

/// Turns per-anchor angles into directed rays.
///
/// `theta[i][j]` is the angle at anchor `i` between the direction to anchor
/// `j` and the direction to the target. Of the two other anchors, the one
/// with the smaller angle is the reference `j` (the cyclic successor on
/// ties): anchor `i` rotates its heading towards `j` by `theta[i][j]` either
/// way and keeps the candidate whose angle to the remaining anchor `k` best
/// matches `theta[i][k]`. A small reference angle keeps the two mirror
/// candidates close, so a wrong side costs at most `2 * theta[i][j]`.
/// Exact ties between the candidates go counterclockwise.
pub fn build_rays(positions: &[Point; 3], theta: &[[f64; 3]; 3]) -> [Ray; 3] {
    std::array::from_fn(|i| {
        let (mut j, mut k) = ((i + 1) % 3, (i + 2) % 3);
        if theta[i][k] < theta[i][j] {
            std::mem::swap(&mut j, &mut k);
        }
        let origin = positions[i];
        let base = (positions[j].y - origin.y).atan2(positions[j].x - origin.x);
        let (kx, ky) = (positions[k].x - origin.x, positions[k].y - origin.y);
        let ccw = Ray::from_angle(origin, base + theta[i][j]);
        let cw = Ray::from_angle(origin, base - theta[i][j]);
        let miss = |r: &Ray| (unit_angle_between(r.dx, r.dy, kx, ky) - theta[i][k]).abs();
        if miss(&cw) < miss(&ccw) {
            cw
        } else {
            ccw
        }
    })
}

/// Which rule produced the final estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocationCase {
    /// Two or three ray intersections inside (or on) the box: their centroid.
    MultiIntersection,
    /// Exactly one intersection inside the box: that point.
    SingleIntersection,
    /// Intersections exist but all fall outside: the one closest to the box,
    /// projected onto its boundary.
    AllOutside,
    /// No forward intersections at all: the box center.
    NoIntersection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RailDiagnostics {
    pub case_fired: LocationCase,
    #[serde(rename = "box")]
    pub bbox: AABox,
    /// Set when the anchor squares did not overlap and the square of the
    /// closest anchor was used instead.
    pub box_was_empty: bool,
    pub rays: [Ray; 3],
    pub intersections: Vec<Point>,
}

/// Final position from the bounding box and the three rays.
pub fn precise_location(bbox: &AABox, rays: &[Ray; 3]) -> (Point, RailDiagnostics) {
    let intersections: Vec<Point> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .filter_map(|&(i, j)| geometry::ray_pair_intersection(&rays[i], &rays[j], DEFAULT_TOL))
        .collect();
    let inside: Vec<Point> = intersections
        .iter()
        .copied()
        .filter(|p| bbox.contains(*p, DEFAULT_TOL))
        .collect();

    let (estimate, case_fired) = match inside.len() {
        0 if intersections.is_empty() => (bbox.center(), LocationCase::NoIntersection),
        0 => {
            let nearest = intersections
                .iter()
                .copied()
                .min_by(|a, b| bbox.distance_to(*a).total_cmp(&bbox.distance_to(*b)))
                .expect("non-empty");
            let projected = Point::new(
                nearest.x.clamp(bbox.x_min, bbox.x_max),
                nearest.y.clamp(bbox.y_min, bbox.y_max),
            );
            (projected, LocationCase::AllOutside)
        }
        1 => (inside[0], LocationCase::SingleIntersection),
        _ => (
            geometry::centroid(&inside).expect("non-empty"),
            LocationCase::MultiIntersection,
        ),
    };
    let diagnostics = RailDiagnostics {
        case_fired,
        bbox: *bbox,
        box_was_empty: false,
        rays: *rays,
        intersections,
    };
    (estimate, diagnostics)
}

/// Estimate for one unknown node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RailOutcome {
    pub target_id: NodeId,
    pub estimate: Point,
    pub anchor_ids: [NodeId; 3],
    pub diagnostics: RailDiagnostics,
}

/// Per-deployment localization state: anchor shortest-path trees plus the
/// per-hop error of the full anchor triple.
pub struct RailLocalizer<'a> {
    dep: &'a Deployment,
    g: &'a NetworkGraph,
    ranging: &'a AnchorRanging,
}

impl<'a> RailLocalizer<'a> {
    pub fn new(dep: &'a Deployment, g: &'a NetworkGraph, ranging: &'a AnchorRanging) -> Self {
        Self { dep, g, ranging }
    }

    /// The three anchors closest to `target` by multi-hop distance.
    pub fn anchors_for(&self, target: NodeId) -> Result<[NodeId; 3], RailError> {
        let ids = self.ranging.nearest(target, 3)?;
        ids.try_into()
            .map_err(|_| RailError::DegenerateGeometry("fewer than three anchors"))
    }

    pub fn localize(&self, target: NodeId) -> Result<RailOutcome, RailError> {
        if self.dep.is_anchor(target) {
            return Err(RailError::DegenerateGeometry("target is an anchor"));
        }
        let ids = self.anchors_for(target)?;
        let triple = AnchorTriple::new(self.dep, self.ranging, ids)?;
        let e = triple.per_hop_error()?;

        let to_target = ids.map(|a| self.ranging.ranging(a, target));
        let to_target: [RangingResult; 3] = [
            to_target[0].clone()?,
            to_target[1].clone()?,
            to_target[2].clone()?,
        ];
        let sds = to_target.each_ref().map(|r| r.shortest_distance);

        let (bbox, box_was_empty) = match bounding_box(&triple.positions, &sds) {
            Some(b) => (b, false),
            None => {
                let closest = (0..3)
                    .min_by(|&a, &b| sds[a].total_cmp(&sds[b]))
                    .expect("three anchors");
                (AABox::around(triple.positions[closest], sds[closest]), true)
            }
        };

        let mut theta = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let to_reference = self.ranging.ranging(ids[i], ids[j])?;
                theta[i][j] =
                    estimate_angle_from_paths(self.g, e, &to_reference, &to_target[i])?.theta;
            }
        }
        let rays = build_rays(&triple.positions, &theta);
        let (estimate, mut diagnostics) = precise_location(&bbox, &rays);
        diagnostics.box_was_empty = box_was_empty;
        Ok(RailOutcome {
            target_id: target,
            estimate,
            anchor_ids: ids,
            diagnostics,
        })
    }
}

/// Localizes every unknown node of the deployment, in ascending id order.
pub fn localize_all(dep: &Deployment, g: &NetworkGraph) -> Result<Vec<RailOutcome>, RailError> {
    let ranging = AnchorRanging::new(g, &dep.anchor_ids)?;
    let localizer = RailLocalizer::new(dep, g, &ranging);
    dep.unknown_ids()
        .into_iter()
        .map(|t| localizer.localize(t))
        .collect()
}
