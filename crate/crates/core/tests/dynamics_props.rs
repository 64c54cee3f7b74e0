use chardyn::dynamics::{
    apply_word, nielsen_action, sample_real_seeds, Automorphism, OrbitOptions,
};
use chardyn::surfaces::residual;
use chardyn::{ClassMatrix, GroupWord, SurfaceParams, SurfacePoint, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(s: &str) -> GroupWord {
    s.parse().unwrap()
}

/// A point of the PT surface with given x, y, solving for z.
fn pt_point(d: C64, x: C64, y: C64) -> SurfacePoint {
    // z² − xy·z + (x² + y² − D) = 0
    let b = -x * y;
    let c = x * x + y * y - d;
    let z = (-b + (b * b - 4.0 * c).sqrt()) / 2.0;
    SurfacePoint::new(x, y, z)
}

fn random_pt_points(d: f64, n: usize, seed: u64) -> Vec<SurfacePoint> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut c = || C64::new(r.gen_range(-2.0..2.0), r.gen_range(-1.0..1.0));
    (0..n)
        .map(|_| pt_point(C64::new(d, 0.0), c(), c()))
        .collect()
}

#[test]
fn bounded_orbits_stay_on_the_surface() {
    let params = SurfaceParams::pt_real(2.0);
    let f = Automorphism::from_word(&params, &w("xyz")).unwrap();
    let seeds = sample_real_seeds(&params, &w("xyz"), 400, 2.0, 100, 1e4, 5).unwrap();
    let mut tested = 0;
    for s in seeds.iter().filter(|s| s.escape_time.is_none()) {
        let p = SurfacePoint::real(s.x, s.y, s.z);
        let rec = f.orbit(
            &p,
            &OrbitOptions {
                max_iter: 100,
                keep_samples: true,
                ..OrbitOptions::default()
            },
        );
        for q in rec.samples.unwrap() {
            assert!(residual(&params, &q).norm() < 1e-6 * (1.0 + q.norm().powi(2)));
        }
        tested += 1;
    }
    assert!(tested > 50, "{tested}");
}

#[test]
fn words_and_inverses_cancel() {
    let params = SurfaceParams::pt_real(3.0);
    for word in ["xyz", "xyxz", "zyxzy", "xzyzxy"] {
        let g = w(word);
        for p in random_pt_points(3.0, 50, 1) {
            let m = apply_word(&params, &g.inverse(), &p);
            let q = apply_word(&params, &g, &m);
            let err = q.max_dist(&p);
            // The involutions cancel large terms, so accuracy degrades like eps·|m|².
            let tol = if m.norm() <= 1e3 {
                1e-9 * (1.0 + p.norm())
            } else {
                1e-13 * m.norm().powi(2)
            };
            assert!(err < tol, "{word}: {p} via {m} -> {q}");
        }
    }
}

#[test]
fn green_function_scales_by_lambda() {
    let params = SurfaceParams::pt_real(5.0);
    let f = Automorphism::hyperbolic(&params, &w("xyz")).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut tested = 0;
    while tested < 100 {
        let p = pt_point(
            C64::new(5.0, 0.0),
            C64::new(r.gen_range(-6.0..6.0), r.gen_range(-3.0..3.0)),
            C64::new(r.gen_range(-6.0..6.0), 0.0),
        );
        let g = f.green(&p, 80).value;
        if g < 1e-3 {
            continue;
        }
        let g1 = f.green(&f.apply(&p), 80).value;
        assert!(
            (g1 - f.lambda * g).abs() / (f.lambda * g) < 1e-2,
            "{p}: {g} {g1}"
        );
        tested += 1;
    }
}

fn random_matrix(r: &mut ChaCha8Rng) -> ClassMatrix {
    let gens = [
        ClassMatrix::new(1, 1, 0, 1),
        ClassMatrix::new(1, 0, 1, 1),
        ClassMatrix::new(1, -1, 0, 1),
        ClassMatrix::new(1, 0, -1, 1),
        ClassMatrix::new(0, 1, 1, 0),
    ];
    let mut m = ClassMatrix::IDENTITY;
    for _ in 0..r.gen_range(1..8) {
        let next = m * gens[r.gen_range(0..gens.len())];
        if next.max_abs() > 10 {
            break;
        }
        m = next;
    }
    m
}

#[test]
fn nielsen_action_is_a_homomorphism_preserving_the_surface() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let d = 1.7;
    let params = SurfaceParams::pt_real(d);
    let pts = random_pt_points(d, 100, 4);
    for _ in 0..20 {
        let (m, n) = (random_matrix(&mut r), random_matrix(&mut r));
        let (fm, fn_, fmn) = (
            nielsen_action(&m).unwrap(),
            nielsen_action(&n).unwrap(),
            nielsen_action(&(m * n)).unwrap(),
        );
        for p in &pts {
            let a = fmn.apply(p);
            let b = fm.apply(&fn_.apply(p));
            assert!(
                a.max_dist(&b) < 1e-9 * (1.0 + a.norm()),
                "{m} {n} at {p}: {a} vs {b}"
            );
            assert!(residual(&params, &a).norm() < 1e-9 * (1.0 + a.norm().powi(3)));
        }
    }
}

#[test]
fn area_is_preserved() {
    let params = SurfaceParams::pt_real(2.5);
    for word in ["xyz", "xy", "xyzxzy"] {
        let f = Automorphism::from_word(&params, &w(word)).unwrap();
        for p in random_pt_points(2.5, 100, 6) {
            let a = f.area_ratio(&p).unwrap();
            assert!((a - 1.0).abs() < 1e-8, "{word} at {p}: {a}");
        }
    }
}
