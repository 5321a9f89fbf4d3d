use rail_core::geometry::{ray_pair_intersection, AABox, Point, Ray};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_box(rng: &mut ChaCha8Rng) -> AABox {
    let (x0, y0) = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
    AABox::new(
        x0,
        x0 + rng.random_range(0.1..30.0),
        y0,
        y0 + rng.random_range(0.1..30.0),
    )
    .unwrap()
}

#[test]
fn projection_is_nearest_boundary_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut tested = 0;
    while tested < 1000 {
        let b = random_box(&mut rng);
        let p = Point::new(
            rng.random_range(-100.0..100.0),
            rng.random_range(-100.0..100.0),
        );
        if b.contains(p, 0.0) {
            continue;
        }
        tested += 1;
        let q = b.project(p).unwrap();
        let d = p.distance(&q);
        let perimeter = 2.0 * (b.width() + b.height());
        for i in 0..10_000 {
            let s = perimeter * i as f64 / 10_000.0;
            let sample = if s < b.width() {
                Point::new(b.x_min + s, b.y_min)
            } else if s < b.width() + b.height() {
                Point::new(b.x_max, b.y_min + s - b.width())
            } else if s < 2.0 * b.width() + b.height() {
                Point::new(b.x_max - (s - b.width() - b.height()), b.y_max)
            } else {
                Point::new(b.x_min, b.y_max - (s - 2.0 * b.width() - b.height()))
            };
            assert!(d <= p.distance(&sample) + 1e-9);
        }
    }
}

#[test]
fn intersection_lies_on_both_rays() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5000 {
        let r1 = Ray::from_angle(
            Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)),
            rng.random_range(-3.2..3.2),
        );
        let r2 = Ray::from_angle(
            Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)),
            rng.random_range(-3.2..3.2),
        );
        if let Some(p) = ray_pair_intersection(&r1, &r2, 1e-9) {
            for r in [&r1, &r2] {
                let (vx, vy) = (p.x - r.origin.x, p.y - r.origin.y);
                let along = vx * r.dx + vy * r.dy;
                let across = vx * r.dy - vy * r.dx;
                assert!(along >= -1e-6);
                assert!(across.abs() < 1e-6 * (1.0 + along.abs()));
            }
        }
    }
}
