//! End-to-end properties of the localization algorithms on generated
//! deployments.

use std::f64::consts::PI;

use rail_core::baselines::{min_max, rssi_dv_hop};
use rail_core::network::{
    build_graph, generate_deployment, AnchorRanging, Deployment, DeploymentConfig, NetworkGraph,
};
use rail_core::radio::PathLossModel;
use rail_core::rail::{
    bounding_box, build_rays, precise_location, triangle_angle, LocationCase, Side,
};
use rail_core::rng::{stream, Stream};
use rail_core::{AABox, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn world(n: usize, seed: u64, sigma: f64) -> (Deployment, NetworkGraph) {
    let dep = generate_deployment(&DeploymentConfig::new(50.0, 50.0, n, 3, 10.0), seed).unwrap();
    let model = PathLossModel::default().with_sigma(sigma);
    let g = build_graph(&dep, &model, &mut stream(seed, Stream::Noise));
    (dep, g)
}

#[test]
fn noise_free_graph_is_the_unit_disk_graph() {
    for seed in 0..10 {
        let (dep, g) = world(100, seed, 0.0);
        for u in 0..dep.node_count() {
            for v in 0..dep.node_count() {
                if u == v {
                    continue;
                }
                let d = dep.nodes[u].distance(&dep.nodes[v]);
                assert_eq!(g.edge(u, v).is_some(), d <= dep.comm_range);
                assert_eq!(g.edge(u, v), g.edge(v, u));
                if let Some(w) = g.edge(u, v) {
                    assert!((w - d).abs() < 1e-9 * d.max(1.0));
                }
            }
        }
    }
}

#[test]
fn multi_hop_distance_never_undershoots_truth() {
    for seed in 0..10 {
        let (dep, g) = world(200, seed, 0.0);
        let ranging = AnchorRanging::new(&g, &dep.anchor_ids).unwrap();
        for &a in &dep.anchor_ids {
            for t in 0..dep.node_count() {
                let sd = ranging.ranging(a, t).unwrap().shortest_distance;
                assert!(sd >= dep.nodes[a].distance(&dep.nodes[t]) - 1e-9);
            }
        }
    }
}

#[test]
fn bounding_box_contains_every_true_position() {
    for seed in 0..50 {
        let (dep, g) = world(100, 1000 + seed, 0.0);
        let ranging = AnchorRanging::new(&g, &dep.anchor_ids).unwrap();
        for t in dep.unknown_ids() {
            let sds: Vec<f64> = dep
                .anchor_ids
                .iter()
                .map(|&a| ranging.ranging(a, t).unwrap().shortest_distance)
                .collect();
            let b =
                bounding_box(&dep.anchor_positions(), &sds).expect("noise-free box is non-empty");
            assert!(b.contains(dep.nodes[t], 1e-9), "seed {seed} node {t}");
        }
    }
}

#[test]
fn triangle_angle_fuzz_stays_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10_000 {
        let mut side = || Side::new(rng.random_range(0.0..40.0), rng.random_range(0..6));
        let (a, b, c) = (side(), side(), side());
        let theta = triangle_angle(a, b, c, rng.random_range(0.0..3.0));
        assert!((0.0..=PI).contains(&theta));
    }
}

#[test]
fn rays_are_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..1000 {
        let pos: [Point; 3] = std::array::from_fn(|_| {
            Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0))
        });
        let theta: [[f64; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(0.0..PI)));
        let s = rng.random_range(0.1..10.0);
        let scaled = pos.map(|p| Point::new(p.x * s, p.y * s));
        for (r, q) in build_rays(&pos, &theta)
            .iter()
            .zip(build_rays(&scaled, &theta).iter())
        {
            assert!((r.dx - q.dx).abs() < 1e-9 && (r.dy - q.dy).abs() < 1e-9);
        }
    }
}

#[test]
fn estimate_stays_in_box_unless_single_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..5000 {
        let (x, y) = (rng.random_range(0.0..40.0), rng.random_range(0.0..40.0));
        let b = AABox::new(
            x,
            x + rng.random_range(1.0..10.0),
            y,
            y + rng.random_range(1.0..10.0),
        )
        .unwrap();
        let rays: [rail_core::Ray; 3] = std::array::from_fn(|_| {
            rail_core::Ray::from_angle(
                Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)),
                rng.random_range(-PI..PI),
            )
        });
        let (p, diag) = precise_location(&b, &rays);
        seen.insert(diag.case_fired);
        assert!(b.contains(p, 1e-9), "{:?}", diag.case_fired);
    }
    assert!(seen.contains(&LocationCase::AllOutside));
    assert!(seen.contains(&LocationCase::NoIntersection));
}

#[test]
fn dv_hop_recovers_planted_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut done = 0;
    while done < 1000 {
        let anchors: [Point; 3] = std::array::from_fn(|_| {
            Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0))
        });
        let area = ((anchors[1].x - anchors[0].x) * (anchors[2].y - anchors[0].y)
            - (anchors[2].x - anchors[0].x) * (anchors[1].y - anchors[0].y))
            .abs()
            / 2.0;
        if area <= 25.0 {
            continue;
        }
        let truth = Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0));
        let est = rssi_dv_hop(&anchors.map(|a| (a, a.distance(&truth))));
        assert!(est.position.distance(&truth) < 1e-6);
        done += 1;
    }
}

#[test]
fn min_max_ignores_anchor_labels() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..1000 {
        let a: Vec<(Point, usize)> = (0..3)
            .map(|_| {
                (
                    Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)),
                    rng.random_range(1..6),
                )
            })
            .collect();
        let rotated = vec![a[1], a[2], a[0]];
        let swapped = vec![a[2], a[1], a[0]];
        let base = min_max(&a, 10.0);
        assert_eq!(base, min_max(&rotated, 10.0));
        assert_eq!(base, min_max(&swapped, 10.0));
    }
}

#[test]
fn node_next_to_all_anchors_is_located_closely() {
    // Anchors on a small triangle, target in the middle, all within range.
    let nodes = vec![
        Point::new(20.0, 20.0),
        Point::new(28.0, 20.0),
        Point::new(24.0, 27.0),
        Point::new(24.0, 22.5),
        Point::new(15.0, 15.0),
        Point::new(33.0, 16.0),
        Point::new(24.0, 34.0),
    ];
    let dep = Deployment {
        width: 50.0,
        height: 50.0,
        nodes,
        anchor_ids: vec![0, 1, 2],
        comm_range: 10.0,
    };
    let g = build_graph(
        &dep,
        &PathLossModel::default(),
        &mut stream(0, Stream::Noise),
    );
    let outcomes = rail_core::rail::localize_all(&dep, &g).unwrap();
    let hit = outcomes.iter().find(|o| o.target_id == 3).unwrap();
    assert!(hit.estimate.distance(&dep.nodes[3]) < 0.5, "{:?}", hit);
}

#[test]
fn noisy_ranging_completes() {
    let mut empty_boxes = 0;
    for seed in 0..20 {
        let (dep, g) = world(200, seed, 2.0);
        for o in rail_core::rail::localize_all(&dep, &g).unwrap() {
            assert!(o.estimate.is_finite());
            empty_boxes += o.diagnostics.box_was_empty as usize;
        }
    }
    assert!(
        empty_boxes > 0,
        "noise should sometimes empty the anchor box"
    );
}
