//! Node localization for two-dimensional wireless sensor networks from
//! received signal strength alone.
//!
//! The crate contains a deterministic simulator (random deployments, a
//! log-distance radio model and a one-hop connectivity graph), the RAIL
//! angle-inferred localization algorithm, the Min-Max and RSSI-based DV-hop
//! baselines, and a seeded experiment harness that compares them.
//!
//! ```
//! use rail_core::network::{build_graph, generate_deployment, DeploymentConfig};
//! use rail_core::radio::PathLossModel;
//! use rail_core::rail::localize_all;
//! use rail_core::rng::{stream, Stream};
//!
//! let cfg = DeploymentConfig::new(50.0, 50.0, 100, 3, 10.0);
//! let dep = generate_deployment(&cfg, 7).unwrap();
//! let g = build_graph(&dep, &PathLossModel::default(), &mut stream(7, Stream::Noise));
//! let outcomes = localize_all(&dep, &g).unwrap();
//! assert_eq!(outcomes.len(), 100);
//! ```
//!
//! A longer walk-through lives in the `book/` directory of the repository.

pub mod baselines;
pub mod experiment;
pub mod geometry;
pub mod network;
pub mod radio;
pub mod rail;
pub mod rng;

pub use geometry::{AABox, Point, Ray};

// The guide's code blocks run as doc-tests so they cannot drift from the API.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/radio.md")]
    mod radio {}
    #[doc = include_str!("../../../book/src/network.md")]
    mod network {}
    #[doc = include_str!("../../../book/src/bounding-box.md")]
    mod bounding_box {}
    #[doc = include_str!("../../../book/src/angles.md")]
    mod angles {}
    #[doc = include_str!("../../../book/src/precise-location.md")]
    mod precise_location {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
