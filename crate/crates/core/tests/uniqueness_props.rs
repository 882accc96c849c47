use critbase::uniqueness::{
    binary_membership_via_fg, hutchinson_dim, is_unique, pair_certificate, Certificate, Status,
};
use critbase::words::{EpWord, FiniteWord};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ep_word(max_pre: usize, max_per: usize) -> impl Strategy<Value = EpWord> {
    (
        prop::collection::vec(0u8..2, 0..=max_pre),
        prop::collection::vec(0u8..2, 1..=max_per),
    )
        .prop_map(|(pre, per)| EpWord::new(pre, per).unwrap())
}

fn leading_one() -> impl Strategy<Value = EpWord> {
    ep_word(5, 6)
        .prop_map(|u| u.prepend(&[1]))
        .prop_filter("two ones, not 1(0)", |u| u.at_least_two(1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn prepending_zero_keeps_the_verdict(u in ep_word(5, 6), m in 1.01f64..=2.0, t in 0.0f64..1.0) {
        let beta = 1.0 + 1e-3 + t * (m - 1e-3);
        let a = is_unique(&u, beta, m).unwrap().status;
        let b = is_unique(&u.prepend(&[0]), beta, m).unwrap().status;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn uniqueness_persists_for_larger_bases(u in leading_one(), m in 1.01f64..=2.0,
                                           t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let b1 = 1.0 + 1e-3 + lo * (m - 1e-3);
        let b2 = 1.0 + 1e-3 + hi * (m - 1e-3);
        let v1 = binary_membership_via_fg(&u, b1, m, 1e-9).unwrap().status;
        let v2 = binary_membership_via_fg(&u, b2, m, 1e-9).unwrap().status;
        if v1 == Status::Unique {
            prop_assert_ne!(v2, Status::NotUnique);
        }
    }

    #[test]
    fn oracles_agree_above_two(u in leading_one(), m in 1.01f64..=2.0, t in 0.0f64..1.0) {
        let beta = 2.0 + 1e-6 + t * (m - 1.0 - 2e-6);
        let a = is_unique(&u, beta, m).unwrap().status;
        let b = binary_membership_via_fg(&u, beta, m, 1e-9).unwrap().status;
        prop_assume!(a != Status::Boundary && b != Status::Boundary);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn moran_root_is_positive_with_small_residual(a in 1usize..20, b in 1usize..20, beta in 1.05f64..3.0) {
        let r = hutchinson_dim(a, b, beta).unwrap();
        prop_assert!(r > 0.0);
        let residual = beta.powf(-(a as f64) * r) + beta.powf(-(b as f64) * r) - 1.0;
        prop_assert!(residual.abs() <= 1e-12);
    }
}

#[test]
fn certified_pairs_only_produce_unique_words() {
    let cases = [
        ("001", "00101", 2.32, 1.35),
        ("001", "00101", 2.37, 1.45),
        ("11010", "1101010", 2.50, 1.53),
        ("011", "0111", 2.7, 2.0),
    ];
    let mut rng = StdRng::seed_from_u64(17);
    for (v, w, beta, m) in cases {
        let (fv, fw): (FiniteWord, FiniteWord) = (v.parse().unwrap(), w.parse().unwrap());
        assert_eq!(pair_certificate(&fv, &fw, beta, m, 256).unwrap(), Certificate::Certified, "{v}/{w}");
        for _ in 0..50 {
            let pick = |rng: &mut StdRng| if rng.gen_bool(0.5) { fv.letters() } else { fw.letters() };
            let pre: Vec<u8> = (0..rng.gen_range(0..4)).flat_map(|_| pick(&mut rng).to_vec()).collect();
            let per: Vec<u8> = (0..rng.gen_range(1..5)).flat_map(|_| pick(&mut rng).to_vec()).collect();
            let u = EpWord::new(pre, per).unwrap();
            assert_eq!(is_unique(&u, beta, m).unwrap().status, Status::Unique, "{u} at β = {beta}");
        }
    }
}
