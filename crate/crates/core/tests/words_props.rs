use chardyn::words::{
    classify, cyclic_reduce, matrix_to_word, reduce, stability_data, word_to_matrix,
};
use chardyn::{ClassMatrix, GroupWord};
use proptest::prelude::*;

fn word() -> impl Strategy<Value = GroupWord> {
    prop::collection::vec(prop::sample::select(vec!['x', 'y', 'z']), 0..14)
        .prop_map(|v| v.into_iter().collect::<String>().parse().unwrap())
}

fn conjugator() -> impl Strategy<Value = ClassMatrix> {
    // Products of elementary GL(2,Z) generators.
    let gens = vec![
        ClassMatrix::new(1, 1, 0, 1),
        ClassMatrix::new(1, 0, 1, 1),
        ClassMatrix::new(0, 1, 1, 0),
        ClassMatrix::new(1, -1, 0, 1),
    ];
    prop::collection::vec(prop::sample::select(gens), 0..6)
        .prop_map(|v| v.into_iter().fold(ClassMatrix::IDENTITY, |a, b| a * b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matrices_multiply(a in word(), b in word()) {
        prop_assert_eq!(word_to_matrix(&reduce(&a.concat(&b))), word_to_matrix(&a) * word_to_matrix(&b));
    }

    #[test]
    fn matrix_words_round_trip(w in word()) {
        let m = word_to_matrix(&w);
        let back = word_to_matrix(&matrix_to_word(&m).unwrap());
        prop_assert!(back == m || back == -m);
    }

    #[test]
    fn determinant_is_unit(w in word()) {
        let m = word_to_matrix(&w);
        prop_assert_eq!(m.det(), if w.reverses_orientation() { -1 } else { 1 });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn classification_is_a_conjugacy_invariant(w in word(), p in conjugator()) {
        let m = word_to_matrix(&w);
        let c = classify(&m);
        let d = classify(&m.conjugate_by(&p).unwrap());
        prop_assert_eq!(c.kind, d.kind);
        prop_assert!((c.lambda - d.lambda).abs() <= 1e-9 * c.lambda);
    }

    #[test]
    fn lambda_of_inverse_and_powers(w in word()) {
        let lam = classify(&word_to_matrix(&w)).lambda;
        prop_assert!((classify(&word_to_matrix(&w.inverse())).lambda - lam).abs() <= 1e-9 * lam);
        for n in 2..=5u32 {
            let ln = classify(&word_to_matrix(&w.pow(n as usize))).lambda;
            prop_assert!((ln - lam.powi(n as i32)).abs() <= 1e-9 * ln.max(1.0));
        }
    }

    #[test]
    fn reduced_hyperbolic_words_with_all_letters_are_stable(w in word()) {
        let (core, _) = cyclic_reduce(&w);
        if core.contains_all_letters() && classify(&word_to_matrix(&core)).kind == chardyn::IsometryKind::Hyperbolic {
            let s = stability_data(&core).unwrap();
            prop_assert!(s.stable);
            prop_assert_ne!(s.ind_f, s.ind_finv);
        }
    }
}
