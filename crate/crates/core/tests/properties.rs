use nearby_core::charsum::{char_convolution_power, jacobi_sum_bruteforce, jacobi_sum_closed};
use nearby_core::cohomology::{build_e1_z1, compute_e2_z1, compute_e2_z1_unchecked};
use nearby_core::ffield::{make_field, FieldDesc};
use nearby_core::hermitian::{classify_hermitian, HermitianDatum};
use nearby_core::localmodel::matrix::Matrix;
use nearby_core::localmodel::{
    blowup_over, enumerate_special_fiber, find_singular_locus, stratify_blowup, SpecialFiberAmbient,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_fields() -> impl Strategy<Value = FieldDesc> {
    prop::sample::select(vec![
        (3u64, 1i64),
        (5, 1),
        (7, 1),
        (11, 1),
        (3, 2),
        (5, 2),
        (3, 3),
        (7, 2),
    ])
    .prop_map(|(p, k)| make_field(p, k).unwrap())
}

fn field_and_triple() -> impl Strategy<Value = (FieldDesc, u32, u32, u32)> {
    small_fields().prop_flat_map(|f| {
        let q = f.order() as u32;
        (Just(f), 0..q, 0..q, 0..q)
    })
}

proptest! {
    #[test]
    fn field_axioms((f, a, b, c) in field_and_triple()) {
        let (a, b, c) = (f.from_index(a), f.from_index(b), f.from_index(c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            prop_assert_eq!(f.pow(a, f.order() - 1), f.one());
        } else {
            prop_assert!(f.inv(a).is_none());
        }
    }

    #[test]
    fn character_is_multiplicative((f, a, b, _c) in field_and_triple()) {
        let (a, b) = (f.from_index(a), f.from_index(b));
        prop_assert_eq!(f.quad_char(f.mul(a, b)), f.quad_char(a) * f.quad_char(b));
        prop_assert_eq!(f.quad_char(a) == 0, a.is_zero());
    }

    #[test]
    fn character_orthogonality_and_sign_of_minus_one(f in small_fields()) {
        let total: i64 = f.elements().map(|x| f.quad_char(x) as i64).sum();
        prop_assert_eq!(total, 0);
        let expected = if f.order() % 4 == 1 { 1 } else { -1 };
        prop_assert_eq!(f.quad_char(f.neg(f.one())), expected);
    }

    #[test]
    fn odd_convolution_powers_vanish_at_zero(f in small_fields(), j in 0usize..3) {
        let c = char_convolution_power(&f, 2 * j + 1).unwrap();
        prop_assert_eq!(c.get(f.zero()).clone(), 0.into());
    }

    #[test]
    fn jacobi_oracle_matches_closed_form(f in small_fields(), m in 1usize..5) {
        prop_assert_eq!(jacobi_sum_bruteforce(&f, m).unwrap(), jacobi_sum_closed(&f, m));
    }

    #[test]
    fn hermitian_class_is_invariant_under_even_rescaling(
        p in prop::sample::select(vec![3u64, 5, 7, 11, 13]),
        n in 2usize..7,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diag: Vec<i64> = (0..n).map(|_| rng.gen_range(1..p as i64)).collect();
        let d = HermitianDatum::from_units(p, &diag).unwrap();
        // Scaling every entry by a square unit, or any unit when n is even,
        // changes the determinant by a square.
        let c = rng.gen_range(1..p as i64);
        let c = if n % 2 == 0 { c } else { c * c % p as i64 };
        let scaled: Vec<i64> = diag.iter().map(|&a| a * c).collect();
        let s = HermitianDatum::from_units(p, &scaled).unwrap();
        prop_assert_eq!(classify_hermitian(&d), classify_hermitian(&s));
    }
}

fn random_invertible(f: &FieldDesc, dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let rows: Vec<Vec<_>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| f.from_index(rng.gen_range(0..f.order() as u32)))
                    .collect()
            })
            .collect();
        let m = Matrix::from_rows(&rows);
        if m.inverse(f).is_some() {
            return m;
        }
    }
}

fn counts(ambient: &SpecialFiberAmbient) -> (usize, usize, usize, u64, u64, u64) {
    let points = enumerate_special_fiber(ambient).unwrap();
    let singular = find_singular_locus(&points, ambient);
    let pairs = blowup_over(ambient, &points);
    let s = stratify_blowup(&pairs, ambient);
    (
        points.len(),
        singular.len(),
        pairs.len(),
        s.z1_count,
        s.z2_count,
        s.q_count,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn localmodel_counts_are_invariant_under_change_of_basis(
        (p, n) in prop::sample::select(vec![(3u64, 2usize), (5, 2), (3, 3)]),
        split in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let f = make_field(p, 1).unwrap();
        let d = if split { HermitianDatum::split(p, n) } else { HermitianDatum::nonsplit(p, n) }.unwrap();
        let ambient = SpecialFiberAmbient::build(&d, &f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_invertible(&f, 2 * n, &mut rng);
        let moved = ambient.conjugate(&g).unwrap();
        prop_assert_eq!(counts(&ambient), counts(&moved));
    }
}

#[test]
fn e2_closed_form_on_the_grid() {
    for p in [3u64, 5, 7] {
        for n in 3..=10usize {
            let eps: Vec<Option<i8>> = if n % 2 == 1 {
                vec![None]
            } else {
                vec![Some(1), Some(-1)]
            };
            for e in eps {
                let page = build_e1_z1(n, e, p).unwrap();
                let e2 = compute_e2_z1(&page).unwrap();
                assert_eq!(e2, compute_e2_z1_unchecked(&page).unwrap());
                let expected = 1 + usize::from(e.is_some());
                assert_eq!(e2.entries.values().map(Vec::len).sum::<usize>(), expected);
                if let Some(e) = e {
                    let w = e2.entries[&(-1, n as i32)][0];
                    assert_eq!(w.eigenvalue(p), e as i128 * (p as i128).pow(n as u32 / 2));
                }
            }
        }
    }
}
