//! Comparison algorithms: Min-Max and RSSI-based DV-hop.

use serde::{Deserialize, Serialize};

use crate::geometry::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineAlgorithm {
    MinMax,
    RssiDvHop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineEstimate {
    pub algorithm: BaselineAlgorithm,
    pub position: Point,
    /// Min-Max: the anchor rectangles did not overlap.
    /// DV-hop: the linear system was singular and the anchor centroid was used.
    pub degenerate: bool,
}

/// Min-Max over hop-count squares.
///
/// Anchor `i` with `h_i` hops bounds the node to `[x_i ± h_i R] × [y_i ± h_i R]`.
/// The estimate is the center of the rectangle spanned by the largest lower
/// and smallest upper bounds, even when that rectangle is inverted.
pub fn min_max(anchors: &[(Point, usize)], comm_range: f64) -> BaselineEstimate {
    let mut x_lo = f64::NEG_INFINITY;
    let mut x_hi = f64::INFINITY;
    let mut y_lo = f64::NEG_INFINITY;
    let mut y_hi = f64::INFINITY;
    for &(p, hops) in anchors {
        let reach = hops as f64 * comm_range;
        x_lo = x_lo.max(p.x - reach);
        x_hi = x_hi.min(p.x + reach);
        y_lo = y_lo.max(p.y - reach);
        y_hi = y_hi.min(p.y + reach);
    }
    BaselineEstimate {
        algorithm: BaselineAlgorithm::MinMax,
        position: Point::new((x_lo + x_hi) / 2.0, (y_lo + y_hi) / 2.0),
        degenerate: x_lo > x_hi || y_lo > y_hi,
    }
}

/// Below this determinant the three anchors are treated as collinear.
pub const SINGULAR_DET: f64 = 1e-9;

/// Trilateration from accumulated multi-hop RSSI distances.
///
/// Subtracting the third circle equation from the first two leaves a 2×2
/// linear system, which is the exact least-squares solution for three
/// anchors.
pub fn rssi_dv_hop(anchors: &[(Point, f64); 3]) -> BaselineEstimate {
    let [(p1, d1), (p2, d2), (p3, d3)] = *anchors;
    let a11 = 2.0 * (p1.x - p3.x);
    let a12 = 2.0 * (p1.y - p3.y);
    let a21 = 2.0 * (p2.x - p3.x);
    let a22 = 2.0 * (p2.y - p3.y);
    let norm3 = p3.x * p3.x + p3.y * p3.y;
    let b1 = p1.x * p1.x + p1.y * p1.y - norm3 - d1 * d1 + d3 * d3;
    let b2 = p2.x * p2.x + p2.y * p2.y - norm3 - d2 * d2 + d3 * d3;
    let det = a11 * a22 - a12 * a21;
    if det.abs() < SINGULAR_DET {
        return BaselineEstimate {
            algorithm: BaselineAlgorithm::RssiDvHop,
            position: geometry::centroid(&[p1, p2, p3]).expect("three points"),
            degenerate: true,
        };
    }
    BaselineEstimate {
        algorithm: BaselineAlgorithm::RssiDvHop,
        position: Point::new((b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det),
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_max_unit_hops() {
        let est = min_max(
            &[
                (Point::new(0.0, 0.0), 1),
                (Point::new(10.0, 0.0), 1),
                (Point::new(0.0, 10.0), 1),
            ],
            10.0,
        );
        assert_eq!(est.position, Point::new(5.0, 5.0));
        assert!(!est.degenerate);
    }

    #[test]
    fn min_max_single_anchor() {
        let est = min_max(&[(Point::new(0.0, 0.0), 2)], 10.0);
        assert_eq!(est.position, Point::new(0.0, 0.0));
    }

    #[test]
    fn min_max_inverted_rectangle_still_centered() {
        let est = min_max(
            &[(Point::new(0.0, 0.0), 1), (Point::new(30.0, 0.0), 1)],
            10.0,
        );
        assert!(est.degenerate);
        assert_eq!(est.position, Point::new(15.0, 0.0));
    }

    #[test]
    fn min_max_ignores_anchor_order() {
        let a = [
            (Point::new(3.0, 1.0), 2),
            (Point::new(17.0, 4.0), 1),
            (Point::new(8.0, 20.0), 3),
        ];
        let b = [a[2], a[0], a[1]];
        assert_eq!(min_max(&a, 10.0), min_max(&b, 10.0));
    }

    #[test]
    fn dv_hop_recovers_planted_point() {
        let truth = Point::new(3.0, 4.0);
        let anchors = [
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(0.0, 10.0),
        ];
        let est = rssi_dv_hop(&anchors.map(|a| (a, a.distance(&truth))));
        assert_eq!(anchors[1].distance(&truth), 65f64.sqrt());
        assert!(!est.degenerate);
        assert!(est.position.distance(&Point::new(3.0, 4.0)) < 1e-6);
    }

    #[test]
    fn dv_hop_collinear_falls_back_to_centroid() {
        let est = rssi_dv_hop(&[
            (Point::new(0.0, 0.0), 5.0),
            (Point::new(10.0, 0.0), 5.0),
            (Point::new(20.0, 0.0), 5.0),
        ]);
        assert!(est.degenerate);
        assert_eq!(est.position, Point::new(10.0, 0.0));
    }

    #[test]
    fn dv_hop_equal_distances_give_circumcenter() {
        let h = 3f64.sqrt() / 2.0 * 10.0;
        let est = rssi_dv_hop(&[
            (Point::new(0.0, 0.0), 7.0),
            (Point::new(10.0, 0.0), 7.0),
            (Point::new(5.0, h), 7.0),
        ]);
        assert!(est.position.distance(&Point::new(5.0, h / 3.0)) < 1e-9);
    }
}
