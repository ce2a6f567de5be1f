use nearby_core::cohomology::{
    cohomology_p1_bundle, cohomology_projective_space, cohomology_quadric, kramer_ss_trace,
    lefschetz_consistency, nearby_cycles_stalks, predicted_point_count,
};
use nearby_core::ffield::make_field;
use nearby_core::hermitian::{epsilon_of, quadric_epsilon, residual_quadric_over, HermitianDatum};
use nearby_core::localmodel::{fiber_enumerators, summarize};
use nearby_core::quadric::{
    classify_diagonal_form, count_points_jacobi, count_points_weil,
    count_projective_points_bruteforce,
};

fn forms(p: u64, n: usize) -> [HermitianDatum; 2] {
    [
        HermitianDatum::split(p, n).unwrap(),
        HermitianDatum::nonsplit(p, n).unwrap(),
    ]
}

#[test]
fn quadric_counts_agree_with_weil_and_cohomology() {
    for p in [3u64, 5, 7] {
        let f = make_field(p, 1).unwrap();
        for n in 2..=6 {
            for d in forms(p, n) {
                let form = residual_quadric_over(&d, &f).unwrap();
                let eps = classify_diagonal_form(&form).epsilon();
                let brute = count_projective_points_bruteforce(&form).unwrap() as i128;
                assert_eq!(brute, count_points_weil(n, eps, &f).unwrap(), "p={p} n={n}");
                assert_eq!(brute, count_points_jacobi(&form).unwrap());
                let table = cohomology_quadric(n, eps, p).unwrap();
                assert_eq!(brute, predicted_point_count(&table, 1));
                if p == 3 && n <= 4 {
                    let f9 = make_field(3, 2).unwrap();
                    let up = form.base_change(&f9).unwrap();
                    let brute9 = count_projective_points_bruteforce(&up).unwrap() as i128;
                    assert_eq!(brute9, predicted_point_count(&table, 2));
                    let eps9 = classify_diagonal_form(&up).epsilon();
                    assert_eq!(eps9, eps.map(|e| e * e));
                    assert_eq!(brute9, count_points_weil(n, eps9, &f9).unwrap());
                }
            }
        }
    }
}

#[test]
fn localmodel_grid_identities() {
    let pruned = fiber_enumerators().get("pruned").unwrap();
    for (n, p) in [(2usize, 3u64), (2, 5), (3, 3), (3, 5), (4, 3)] {
        let f = make_field(p, 1).unwrap();
        for d in forms(p, n) {
            let s = summarize(&d, &f, pruned.as_ref()).unwrap();
            assert_eq!(s.singular_points, 1);
            assert!(s.singular_is_image_of_j);
            if n >= 3 {
                assert!(s.blowdown_holds());
            }
            assert!(s.inclusion_exclusion_holds());
            assert!(s.bundle_holds());
            let nq = count_projective_points_bruteforce(&residual_quadric_over(&d, &f).unwrap())
                .unwrap();
            assert_eq!(s.points as u64, 1 + p * nq);
            let eps = quadric_epsilon(&d);
            let q_table = cohomology_quadric(n, eps, p).unwrap();
            assert_eq!(s.strata.q_count as i128, predicted_point_count(&q_table, 1));
            assert_eq!(
                s.strata.z2_count as i128,
                predicted_point_count(&cohomology_p1_bundle(&q_table), 1)
            );
            assert_eq!(
                s.strata.z1_count as i128,
                predicted_point_count(&cohomology_projective_space(n as u32 - 1, p), 1)
            );
        }
    }
}

#[test]
fn worked_point_counts() {
    let pruned = fiber_enumerators().get("pruned").unwrap();
    let f = make_field(3, 1).unwrap();
    let cases = [
        (HermitianDatum::split(3, 3).unwrap(), 13, 25),
        (HermitianDatum::split(3, 4).unwrap(), 49, 88),
        (HermitianDatum::nonsplit(3, 4).unwrap(), 31, 70),
    ];
    for (d, points, pairs) in cases {
        let s = summarize(&d, &f, pruned.as_ref()).unwrap();
        assert_eq!((s.points, s.blowup_pairs), (points, pairs));
    }
}

#[test]
fn weighted_counts_over_quadratic_extension() {
    let pruned = fiber_enumerators().get("pruned").unwrap();
    let f9 = make_field(3, 2).unwrap();
    for (n, p) in [(2usize, 3u64), (3, 3)] {
        for d in forms(p, n) {
            let s = summarize(&d, &f9, pruned.as_ref()).unwrap();
            let q_table = cohomology_quadric(n, quadric_epsilon(&d), p).unwrap();
            assert_eq!(s.strata.q_count as i128, predicted_point_count(&q_table, 2));
            assert!(s.bundle_holds() && s.inclusion_exclusion_holds());
            assert_eq!(s.singular_points, 1);
        }
    }
}

#[test]
fn stalks_and_traces_on_the_grid() {
    for p in [3u64, 5, 7] {
        for n in 2..=10usize {
            let eps: Vec<Option<i8>> = match n {
                2 => vec![Some(1)],
                _ if n % 2 == 1 => vec![None],
                _ => vec![Some(1), Some(-1)],
            };
            for e in eps {
                let stalks = nearby_cycles_stalks(n, e, p).unwrap();
                assert_eq!(stalks[&0][0].eigenvalue(p), 1);
                let expected = match e {
                    None => 1,
                    Some(e) => 1 - e as i128 * (p as i128).pow(n as u32 / 2),
                };
                assert_eq!(kramer_ss_trace(n, e, p).unwrap(), expected);
                let top = if n == 2 { 1 } else { n as i64 - 1 };
                assert_eq!(stalks.len(), if e.is_some() { 2 } else { 1 });
                if e.is_some() {
                    assert_eq!(stalks[&top].len(), 1);
                }
            }
        }
    }
}

#[test]
fn lefschetz_grid() {
    for (n, p, k) in [(3usize, 3u64, 1u32), (3, 3, 2), (3, 5, 1), (4, 3, 1)] {
        for d in forms(p, n) {
            let r = lefschetz_consistency(&d, k).unwrap();
            assert_eq!(r.epsilon, epsilon_of(&d));
            assert!(r.equal, "{r:?}");
        }
    }
}
