mod common;

use common::gen;
use diffinv_core::poly::Q;
use diffinv_core::transvect::{
    binary_transvectant, self_transvectant_j, transvectant, transvectant_by_nabla, NAryForm,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

/// `n` forms in `n` variables with degrees `1..=max_deg`.
fn forms(rng: &mut ChaCha20Rng, n: usize, max_deg: u32) -> Vec<NAryForm> {
    (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=max_deg);
            gen::int_form(rng, n, d, 4)
        })
        .collect()
}

fn setup(seed: u64, max_deg: u32) -> (ChaCha20Rng, usize, Vec<NAryForm>, u32) {
    let mut rng = gen::rng(seed);
    let n = rng.gen_range(2..=3usize);
    let fs = forms(&mut rng, n, max_deg);
    let top = fs.iter().map(|f| f.degree()).min().unwrap();
    let l = rng.gen_range(0..=top.min(5));
    (rng, n, fs, l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn degree_law(seed in any::<u64>()) {
        let (_, n, fs, l) = setup(seed, 5);
        let t = transvectant(&fs, l).unwrap();
        let total: u32 = fs.iter().map(|f| f.degree()).sum();
        prop_assert_eq!(t.degree(), total - n as u32 * l);
    }

    #[test]
    fn swapping_two_slots_multiplies_by_minus_one_to_the_l(seed in any::<u64>()) {
        let (mut rng, n, fs, l) = setup(seed, 4);
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let mut swapped = fs.clone();
        swapped.swap(i, j);
        let sign = if l % 2 == 0 { Q::one() } else { -Q::one() };
        prop_assert_eq!(transvectant(&swapped, l).unwrap(), transvectant(&fs, l).unwrap().scale(&sign));
    }

    #[test]
    fn multilinear_in_each_slot(seed in any::<u64>()) {
        let (mut rng, n, fs, l) = setup(seed, 4);
        let i = rng.gen_range(0..n);
        let g = gen::int_form(&mut rng, n, fs[i].degree(), 4);
        let c = gen::nonzero_q(&mut rng);
        let mut mixed = fs.clone();
        mixed[i] = fs[i].add(&g.scale(&c)).unwrap();
        let mut only_g = fs.clone();
        only_g[i] = g;
        let expected = transvectant(&fs, l)
            .unwrap()
            .add(&transvectant(&only_g, l).unwrap().scale(&c))
            .unwrap();
        prop_assert_eq!(transvectant(&mixed, l).unwrap(), expected);
    }

    #[test]
    fn equivariant_under_linear_substitution(seed in any::<u64>()) {
        let (mut rng, n, fs, l) = setup(seed, 3);
        let g = if rng.gen_bool(0.5) { gen::sl_matrix(&mut rng, n) } else { gen::invertible_matrix(&mut rng, n) };
        let det = gen::q_det(&g);
        let moved: Vec<NAryForm> = fs.iter().map(|f| f.compose_linear(&g).unwrap()).collect();
        let mut factor = Q::one();
        for _ in 0..l {
            factor *= &det;
        }
        let expected = transvectant(&fs, l).unwrap().compose_linear(&g).unwrap().scale(&factor);
        prop_assert_eq!(transvectant(&moved, l).unwrap(), expected);
    }

    #[test]
    fn expanded_route_matches_literal_route(seed in any::<u64>()) {
        let (_, _, fs, l) = setup(seed, 3);
        prop_assert_eq!(transvectant(&fs, l).unwrap(), transvectant_by_nabla(&fs, l).unwrap());
    }

    #[test]
    fn odd_degree_self_transvectant_vanishes(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(2..=3usize);
        let d = [1u32, 3, 5][rng.gen_range(0..if n == 2 { 3 } else { 2 })];
        let f = gen::int_form(&mut rng, n, d, 5);
        prop_assert!(self_transvectant_j(&f).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn binary_formula_matches_general(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let (a, b) = (rng.gen_range(0..=6u32), rng.gen_range(0..=6u32));
        let f = gen::int_form(&mut rng, 2, a, 9);
        let g = gen::int_form(&mut rng, 2, b, 9);
        let l = rng.gen_range(0..=6u32);
        prop_assert_eq!(
            binary_transvectant(&f, &g, l).unwrap(),
            transvectant(&[f.clone(), g.clone()], l).unwrap()
        );
    }
}
