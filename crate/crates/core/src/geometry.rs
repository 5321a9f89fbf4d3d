//! Planar primitives used by the localization pipeline: points, axis-aligned
//! boxes and directed rays.
//!
//! An empty box intersection is an ordinary value (`None`) rather than an
//! error, since noisy ranging can legitimately produce disjoint constraints.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance for containment and ray-parameter checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("inverted box: [{x_min}, {x_max}] x [{y_min}, {y_max}]")]
    InvertedBox {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    #[error("ray direction has zero length")]
    ZeroDirection,
    #[error("point ({x}, {y}) lies strictly inside the box")]
    PointInsideBox { x: f64, y: f64 },
    #[error("no points given")]
    NoPoints,
}

/// A position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.4}, {:.4})", self.x, self.y)
    }
}

/// Axis-aligned rectangle, `x_min <= x_max` and `y_min <= y_max`.
///
/// Degenerate boxes (a segment or a single point) are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AABox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl AABox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, GeometryError> {
        if ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::NonFinite("box"));
        }
        if x_min > x_max || y_min > y_max {
            return Err(GeometryError::InvertedBox {
                x_min,
                x_max,
                y_min,
                y_max,
            });
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Square of half-width `half` centred on `center`.
    pub fn around(center: Point, half: f64) -> Self {
        let half = half.abs();
        Self {
            x_min: center.x - half,
            x_max: center.x + half,
            y_min: center.y - half,
            y_max: center.y + half,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// Crossing point of the diagonals.
    pub fn center(&self) -> Point {
        Point::new(
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }

    /// Inclusive containment, each face widened by `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.x_min - tol
            && p.x <= self.x_max + tol
            && p.y >= self.y_min - tol
            && p.y <= self.y_max + tol
    }

    fn strictly_contains(&self, p: Point) -> bool {
        p.x > self.x_min && p.x < self.x_max && p.y > self.y_min && p.y < self.y_max
    }

    /// Euclidean distance from `p` to the closed box; zero inside.
    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = (self.x_min - p.x).max(0.0).max(p.x - self.x_max);
        let dy = (self.y_min - p.y).max(0.0).max(p.y - self.y_max);
        dx.hypot(dy)
    }

    /// Nearest point of the box boundary to an outside point.
    ///
    /// Points already on the boundary are returned unchanged.
    pub fn project(&self, p: Point) -> Result<Point, GeometryError> {
        if !p.is_finite() {
            return Err(GeometryError::NonFinite("point"));
        }
        if self.strictly_contains(p) {
            return Err(GeometryError::PointInsideBox { x: p.x, y: p.y });
        }
        Ok(Point::new(
            p.x.clamp(self.x_min, self.x_max),
            p.y.clamp(self.y_min, self.y_max),
        ))
    }

    /// Intersection of two boxes, `None` when they are disjoint.
    pub fn intersect(&self, other: &AABox) -> Option<AABox> {
        let x_min = self.x_min.max(other.x_min);
        let x_max = self.x_max.min(other.x_max);
        let y_min = self.y_min.max(other.y_min);
        let y_max = self.y_max.min(other.y_max);
        (x_min <= x_max && y_min <= y_max).then_some(AABox {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }
}

/// Intersect every box in `boxes`. An empty slice yields `None`.
pub fn intersect_boxes(boxes: &[AABox]) -> Option<AABox> {
    let (first, rest) = boxes.split_first()?;
    rest.iter().try_fold(*first, |acc, b| acc.intersect(b))
}

/// Half-line from `origin` along a unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point,
    pub dx: f64,
    pub dy: f64,
}

impl Ray {
    /// Builds a ray, normalising the direction vector.
    pub fn new(origin: Point, dx: f64, dy: f64) -> Result<Self, GeometryError> {
        if !origin.is_finite() || !dx.is_finite() || !dy.is_finite() {
            return Err(GeometryError::NonFinite("ray"));
        }
        let len = dx.hypot(dy);
        if len <= f64::EPSILON {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Self {
            origin,
            dx: dx / len,
            dy: dy / len,
        })
    }

    /// Ray whose direction makes angle `theta` (radians, counterclockwise)
    /// with the +x axis.
    pub fn from_angle(origin: Point, theta: f64) -> Self {
        let (dy, dx) = theta.sin_cos();
        Self { origin, dx, dy }
    }

    pub fn at(&self, t: f64) -> Point {
        Point::new(self.origin.x + t * self.dx, self.origin.y + t * self.dy)
    }

    pub fn heading(&self) -> f64 {
        self.dy.atan2(self.dx)
    }
}

fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

/// Forward intersection of two rays.
///
/// Returns `None` when the rays are (nearly) parallel, `|det| <= tol`, or
/// when the crossing lies behind either origin by more than `tol`.
pub fn ray_pair_intersection(r1: &Ray, r2: &Ray, tol: f64) -> Option<Point> {
    let det = cross(r1.dx, r1.dy, r2.dx, r2.dy);
    if det.abs() <= tol {
        return None;
    }
    let wx = r2.origin.x - r1.origin.x;
    let wy = r2.origin.y - r1.origin.y;
    let t = cross(wx, wy, r2.dx, r2.dy) / det;
    let s = cross(wx, wy, r1.dx, r1.dy) / det;
    if t < -tol || s < -tol {
        return None;
    }
    // Average the two parametrisations so the result is symmetric in (r1, r2).
    let p1 = r1.at(t);
    let p2 = r2.at(s);
    Some(Point::new((p1.x + p2.x) / 2.0, (p1.y + p2.y) / 2.0))
}

/// Arithmetic mean of the points: the midpoint for two, the triangle
/// centroid for three.
pub fn centroid(points: &[Point]) -> Result<Point, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::NoPoints);
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Ok(Point::new(sx / n, sy / n))
}
