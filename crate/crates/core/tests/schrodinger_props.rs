use chardyn::schrodinger::{
    curve_params, edge_weight, fibonacci, fixed_word_prefix, letter_matrix, mat_mul,
    oracle_eigenvector, schrodinger_curve, spectrum_estimate, substituted_traces, trace, trace_map,
    transfer_matrix, tridiagonal_oracle, SchrodingerConfig, Substitution,
};
use chardyn::surfaces::residual;
use chardyn::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_kappa_e(r: &mut ChaCha8Rng) -> (C64, C64) {
    let kappa = if r.gen_bool(0.5) {
        C64::new(r.gen_range(-3.0..3.0), 0.0)
    } else {
        C64::new(r.gen_range(-3.0..3.0), r.gen_range(-2.0..2.0))
    };
    let e = C64::new(
        r.gen_range(-4.0..4.0),
        if r.gen_bool(0.3) {
            r.gen_range(-1.0..1.0)
        } else {
            0.0
        },
    );
    (kappa, e)
}

#[test]
fn fricke_identity() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let (kappa, e) = random_kappa_e(&mut r);
        let p = schrodinger_curve(kappa, e);
        let res = residual(&curve_params(kappa), &p).norm();
        assert!(
            res < 1e-12 * (1.0 + p.norm().powi(3)),
            "κ={kappa} E={e}: {res}"
        );
        let t = |w: &str| trace(&transfer_matrix(kappa, e, w));
        assert!(
            p.max_dist(&chardyn::SurfacePoint::new(t("a"), t("b"), t("ab")))
                < 1e-12 * (1.0 + p.norm())
        );
    }
}

/// Column Gram–Schmidt: m = q·r with r upper triangular, positive diagonal.
fn gram_schmidt(m: &[[C64; 2]; 2]) -> ([[C64; 2]; 2], f64, f64) {
    let (c0, c1) = ([m[0][0], m[1][0]], [m[0][1], m[1][1]]);
    let r11 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
    let u = [c0[0] / r11, c0[1] / r11];
    let r12 = u[0].conj() * c1[0] + u[1].conj() * c1[1];
    let v = [c1[0] - u[0] * r12, c1[1] - u[1] * r12];
    let r22 = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    ([[u[0], v[0] / r22], [u[1], v[1] / r22]], r11, r22)
}

#[test]
fn transfer_matrices_are_unimodular() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (kappa, e) = random_kappa_e(&mut r);
        let len = r.gen_range(1..=1000);
        let word: String = (0..len)
            .map(|_| if r.gen_bool(0.5) { 'a' } else { 'b' })
            .collect();
        // Keep the running product as Q·R with Q unitary; det = det(Q)·Π r₁₁r₂₂.
        let mut q = transfer_matrix(kappa, e, "");
        let mut log_det = 0.0;
        for c in word.chars() {
            let (q_next, r11, r22) = gram_schmidt(&mat_mul(&letter_matrix(kappa, e, c), &q));
            q = q_next;
            log_det += r11.ln() + r22.ln();
        }
        let det = (q[0][0] * q[1][1] - q[0][1] * q[1][0]) * log_det.exp();
        assert!((det - 1.0).norm() < 1e-12, "{len} letters: det {det}");
    }
}

#[test]
fn trace_map_matches_substituted_traces() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for sub in [
        fibonacci(),
        Substitution::parse("ab,a").unwrap(),
        Substitution::parse("aab,ab").unwrap(),
    ] {
        for _ in 0..1000 {
            let (kappa, e) = random_kappa_e(&mut r);
            let f = trace_map(&sub, kappa).unwrap();
            let a = f.apply(&schrodinger_curve(kappa, e));
            let b = substituted_traces(&sub, kappa, e);
            assert!(
                a.max_dist(&b) < 1e-9 * (1.0 + b.norm()),
                "{sub} κ={kappa} E={e}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn raising_the_budget_never_adds_bounded_energies() {
    let sub = fibonacci();
    let mut prev: Option<Vec<bool>> = None;
    for budget in [20, 50, 200, 1000] {
        let config = SchrodingerConfig {
            kappa: 1.5,
            window: (-3.0, 4.5),
            grid: 4001,
            budget,
            ..SchrodingerConfig::default()
        };
        let flags = spectrum_estimate(&sub, &config)
            .unwrap()
            .bounded_at_budget();
        if let Some(p) = &prev {
            assert!(
                flags.iter().zip(p).all(|(&now, &before)| !now || before),
                "budget {budget}"
            );
        }
        prev = Some(flags);
    }
}

#[test]
fn fixed_word_is_a_prefix_of_its_image() {
    let sub = fibonacci();
    let w = fixed_word_prefix(&sub, 500).unwrap();
    assert!(sub.image(&w).starts_with(&w));
}

#[test]
fn oracle_eigenvalues_lie_near_bounded_energies() {
    let sub = fibonacci();
    for kappa in [0.5, 1.0, 2.0] {
        let window = (-2.5, 2.5 + kappa);
        let config = SchrodingerConfig {
            kappa,
            window,
            grid: 10_000,
            budget: 1000,
            ..SchrodingerConfig::default()
        };
        let est = spectrum_estimate(&sub, &config).unwrap();
        let bounded: Vec<f64> = est.bounded_energies().collect();
        let eig = tridiagonal_oracle(&sub, kappa, 987).unwrap();
        // Truncation adds states localised at the two ends; they sit in gaps of the infinite operator.
        for x in eig
            .iter()
            .copied()
            .filter(|&x| bounded.iter().all(|&e| (e - x).abs() > 0.05))
        {
            let v = oracle_eigenvector(&sub, kappa, 987, x).unwrap();
            assert!(
                edge_weight(&v, 40) > 0.5,
                "κ={kappa}: bulk eigenvalue {x} far from the estimate"
            );
        }
    }
}
