use chardyn::periodic::{find_periodic, seeds, PointKind, SearchOptions, SeedPlan};
use chardyn::{Automorphism, GroupWord, SurfaceParams, C64};

fn w(s: &str) -> GroupWord {
    s.parse().unwrap()
}

fn cases() -> Vec<(SurfaceParams, &'static str, usize)> {
    vec![
        (SurfaceParams::pt_real(5.0), "xyz", 3),
        (SurfaceParams::pt_real(2.0), "xyz", 2),
        (SurfaceParams::fam_real(0.5, -0.3, 0.2, 1.0), "xyxz", 2),
        (SurfaceParams::pt(C64::new(3.0, 0.7)), "xyz", 2),
    ]
}

#[test]
fn multipliers_multiply_to_one_and_periods_are_minimal() {
    let plan = SeedPlan {
        real_grid: 30,
        complex: 600,
        ..SeedPlan::default()
    };
    for (params, word, n_max) in cases() {
        let f = Automorphism::hyperbolic(&params, &w(word)).unwrap();
        let pts = seeds(&params, &plan);
        let mut found = 0;
        for n in 1..=n_max {
            let search =
                find_periodic(&params, &w(word), n, &pts, &SearchOptions::default()).unwrap();
            found += search.len();
            for orbit in &search.orbits {
                let period = orbit[0].period;
                assert_eq!(orbit.len(), period);
                assert_eq!(n % period, 0);
                for p in orbit {
                    let q = p.point;
                    let scale = 1e-7 * (1.0 + q.norm());
                    assert!(
                        f.power(period).apply(&q).max_dist(&q) < scale,
                        "{q} is not period {period}"
                    );
                    for k in (1..period).filter(|k| period % k == 0) {
                        assert!(
                            f.power(k).apply(&q).max_dist(&q) > 1e-6,
                            "{q} has period {k} < {period}"
                        );
                    }
                    if !p.singular {
                        let prod = (p.multipliers[0] * p.multipliers[1]).norm();
                        assert!((prod - 1.0).abs() < 1e-6, "{q}: |μu μs| = {prod}");
                    }
                }
            }
        }
        assert!(found > 0, "{params} {word}");
    }
}

#[test]
fn periodic_points_on_a_connected_surface_are_saddles() {
    let params = SurfaceParams::pt_real(5.0);
    let plan = SeedPlan {
        real_grid: 40,
        complex: 800,
        ..SeedPlan::default()
    };
    let pts = seeds(&params, &plan);
    for word in ["xyz", "xyxz"] {
        for n in 1..=3 {
            let search =
                find_periodic(&params, &w(word), n, &pts, &SearchOptions::default()).unwrap();
            for p in search.points() {
                assert!(p.is_real, "{word} n={n}: {}", p.point);
                assert_eq!(p.kind, PointKind::Saddle, "{word} n={n}: {}", p.point);
            }
        }
    }
}
