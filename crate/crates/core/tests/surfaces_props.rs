use chardyn::dynamics::apply_generator;
use chardyn::surfaces::{
    cayley_letter_matrix, cayley_params, cayley_project, classify_real_topology, monomial_apply,
    params_from_traces, residual, CayleyCoord, TopologyLabel,
};
use chardyn::{ClassMatrix, Letter, SurfaceParams, SurfacePoint, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(2024)
}

fn random_coord(r: &mut ChaCha8Rng, torus: bool) -> CayleyCoord {
    if torus {
        CayleyCoord::from_angles(r.gen(), r.gen())
    } else {
        let z = |r: &mut ChaCha8Rng| {
            C64::from_polar(
                r.gen_range(0.3..3.0),
                r.gen_range(0.0..std::f64::consts::TAU),
            )
        };
        CayleyCoord::new(z(r), z(r)).unwrap()
    }
}

#[test]
fn cayley_projection_lies_on_the_cubic() {
    let mut r = rng();
    let params = cayley_params();
    for k in 0..10_000 {
        let p = cayley_project(&random_coord(&mut r, k % 2 == 0));
        assert!(
            residual(&params, &p).norm() < 1e-9 * (1.0 + p.norm().powi(2)),
            "{p}"
        );
    }
}

fn semiconjugates(l: Letter, m: &ClassMatrix, pts: &[CayleyCoord]) -> bool {
    let params = cayley_params();
    pts.iter().all(|c| {
        let lhs = apply_generator(&params, l, &cayley_project(c));
        let img = monomial_apply(m, c);
        let tol = 1e-9 * (1.0 + lhs.norm());
        lhs.max_dist(&cayley_project(&img)) < tol || lhs.max_dist(&cayley_project(&img.eta())) < tol
    })
}

/// Searching small integer matrices finds exactly the frozen lifts, up to η = −I.
#[test]
fn monomial_lifts_are_found_by_search_and_frozen() {
    let mut r = rng();
    let pts: Vec<CayleyCoord> = (0..1000)
        .map(|k| random_coord(&mut r, k % 2 == 0))
        .collect();
    for l in [Letter::X, Letter::Y, Letter::Z] {
        let mut found = Vec::new();
        for a in -2..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    for d in -2..=2 {
                        let m = ClassMatrix::new(a, b, c, d);
                        if m.det().abs() == 1 && semiconjugates(l, &m, &pts[..20]) {
                            found.push(m);
                        }
                    }
                }
            }
        }
        let frozen = cayley_letter_matrix(l);
        assert!(found.contains(&frozen), "{l:?}: {found:?}");
        assert!(
            found.iter().all(|m| *m == frozen || *m == -frozen),
            "{l:?}: {found:?}"
        );
        assert!(semiconjugates(l, &frozen, &pts));
    }
    assert_eq!(
        cayley_letter_matrix(Letter::X),
        ClassMatrix::new(1, 2, 0, -1)
    );
    assert_eq!(
        cayley_letter_matrix(Letter::Y),
        ClassMatrix::new(-1, 0, 2, 1)
    );
    assert_eq!(
        cayley_letter_matrix(Letter::Z),
        ClassMatrix::new(1, 0, 0, -1)
    );
}

#[test]
fn real_topologies_along_the_pt_family() {
    let label = |d: f64| {
        classify_real_topology(&SurfaceParams::pt_real(d))
            .unwrap()
            .label
    };
    assert_eq!(label(-1.0), TopologyLabel::FourDisks);
    assert_eq!(label(0.0), TopologyLabel::FourDisksAndPoint);
    assert_eq!(label(2.0), TopologyLabel::FourDisksAndSphere);
    assert_eq!(label(4.0), TopologyLabel::CayleySingular);
    assert_eq!(label(5.0), TopologyLabel::ConnectedFourPunctured);
}

type M2 = [[C64; 2]; 2];

fn mul(p: &M2, q: &M2) -> M2 {
    let mut r = [[C64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
        }
    }
    r
}

fn tr(m: &M2) -> C64 {
    m[0][0] + m[1][1]
}

fn inv(m: &M2) -> M2 {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

fn random_sl2(r: &mut ChaCha8Rng) -> M2 {
    let z = |r: &mut ChaCha8Rng| C64::new(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
    let (a, b, c) = (z(r), z(r), z(r));
    let a = if a.norm() < 0.2 { a + 1.0 } else { a };
    // d fixed by ad − bc = 1.
    [[a, b], [c, (C64::new(1.0, 0.0) + b * c) / a]]
}

#[test]
fn character_variety_traces_satisfy_the_quartic() {
    let mut r = rng();
    for _ in 0..100 {
        let (ma, mb, mc) = (random_sl2(&mut r), random_sl2(&mut r), random_sl2(&mut r));
        let md = inv(&mul(&mul(&ma, &mb), &mc));
        let params = params_from_traces(tr(&ma), tr(&mb), tr(&mc), tr(&md));
        let p = SurfacePoint::new(tr(&mul(&ma, &mb)), tr(&mul(&mb, &mc)), tr(&mul(&mc, &ma)));
        let scale = 1.0 + p.norm().powi(3) + params.d.norm();
        assert!(
            residual(&params, &p).norm() < 1e-9 * scale,
            "{}",
            residual(&params, &p)
        );
    }
}
