use std::collections::HashMap;

use kv_core::lyndon::lyndon_basis;
use kv_core::rational::{q, Rational};
use kv_core::{random, Alphabet, CyclicSeries, LieSeries, TensorSeries, Word};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Word-by-word concatenation product, independent of the library's multiplication.
fn naive_product(a: &TensorSeries, b: &TensorSeries) -> HashMap<Vec<u8>, Rational> {
    let alphabet = a.alphabet();
    let mut out: HashMap<Vec<u8>, Rational> = HashMap::new();
    for (u, c) in a.terms() {
        for (v, d) in b.terms() {
            let w: Vec<u8> = u.iter().chain(v.iter()).copied().collect();
            if alphabet.word_weight(&Word::from_slice(&w)) <= a.cut() {
                *out.entry(w).or_insert_with(Rational::zero) += c * d;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn as_map(t: &TensorSeries) -> HashMap<Vec<u8>, Rational> {
    t.terms()
        .iter()
        .map(|(w, c)| (w.to_vec(), c.clone()))
        .collect()
}

fn gens(a: Alphabet, cut: u32) -> Vec<LieSeries> {
    a.letters()
        .map(|l| LieSeries::generator(a, cut, l))
        .collect()
}

#[test]
fn product_examples() {
    let a = Alphabet::new(1, 0);
    let one = TensorSeries::one(a, 4);
    let x = TensorSeries::letter(a, 4, 0);
    let y = TensorSeries::letter(a, 4, 1);
    let lhs = &(&one + &x) * &(&one + &y);
    let xy = TensorSeries::from_terms(a, 4, [(Word::from_slice(&[0, 1]), q(1, 1))]);
    assert_eq!(lhs, &(&(&one + &x) + &y) + &xy);
    assert_eq!(&x * &one, x);
}

#[test]
fn jacobi_and_alternation_on_basis_triples() {
    let cut = 6;
    let a = Alphabet::new(1, 1);
    let basis: Vec<LieSeries> = (1..=cut)
        .flat_map(|m| lyndon_basis(a, m).iter().cloned().collect::<Vec<_>>())
        .map(|w| LieSeries::from_coeffs(a, cut, [(w, q(1, 1))]).unwrap())
        .collect();
    for p in &basis {
        assert!(p.bracket(p).unwrap().is_zero());
    }
    for p in &basis {
        for r in &basis {
            for s in &basis {
                let weight = |e: &LieSeries| e.min_weight().unwrap();
                if weight(p) + weight(r) + weight(s) > cut {
                    continue;
                }
                let j = &(&p.bracket(&r.bracket(s).unwrap()).unwrap()
                    + &r.bracket(&s.bracket(p).unwrap()).unwrap())
                    + &s.bracket(&p.bracket(r).unwrap()).unwrap();
                assert!(j.is_zero());
            }
        }
    }
}

#[test]
fn jacobi_of_generators_at_cut_eight() {
    let a = Alphabet::new(1, 1);
    let g = gens(a, 8);
    let (x, y, z) = (&g[0], &g[1], &g[2]);
    let j = &(&x.bracket(&y.bracket(z).unwrap()).unwrap()
        + &y.bracket(&z.bracket(x).unwrap()).unwrap())
        + &z.bracket(&x.bracket(y).unwrap()).unwrap();
    assert!(j.is_zero());
    assert_eq!(
        x.bracket(y).unwrap().coeffs().iter().collect::<Vec<_>>(),
        vec![(&Word::from_slice(&[0, 1]), &q(1, 1))]
    );
}

#[test]
fn exp_log_examples() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 4);
    let (x, y) = (&g[0], &g[1]);
    assert_eq!(&LieSeries::log(&x.exp()).unwrap(), x);
    assert_eq!(x.exp().coeff(&[0, 0]), q(1, 2));
    let prod = &(&(&x.exp() * &y.exp()) * &(-x).exp()) * &(-y).exp();
    let l = LieSeries::log(&prod).unwrap();
    assert_eq!(l.min_weight(), Some(2));
    assert_eq!(l.weight_component(2), x.bracket(y).unwrap());
    assert!(LieSeries::log(&TensorSeries::letter(a, 4, 0)).is_err());
    let not_lie = TensorSeries::from_terms(
        a,
        4,
        [
            (Word::empty(), q(1, 1)),
            (Word::from_slice(&[0, 1]), q(1, 1)),
        ],
    );
    assert!(LieSeries::log(&not_lie).is_err());
}

#[test]
fn bch_examples() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 3);
    let (x, y) = (&g[0], &g[1]);
    assert_eq!(&x.bch(&LieSeries::zero(a, 3)).unwrap(), x);
    assert!(x.bch(&-x).unwrap().is_zero());
    let xy = x.bracket(y).unwrap();
    let expected = &(&(x + y) + &xy.scale(&q(1, 2)))
        + &(&x.bracket(&xy).unwrap().scale(&q(1, 12)) - &y.bracket(&xy).unwrap().scale(&q(1, 12)));
    assert_eq!(x.bch(y).unwrap(), expected);
}

#[test]
fn dynkin_examples() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 6);
    let xy = g[0].bracket(&g[1]).unwrap();
    assert_eq!(LieSeries::dynkin_project(xy.to_tensor()).unwrap(), xy);
    let word = TensorSeries::from_terms(a, 6, [(Word::from_slice(&[0, 1]), q(1, 1))]);
    assert_eq!(
        LieSeries::dynkin_project(&word).unwrap(),
        xy.scale(&q(1, 2))
    );
    assert!(LieSeries::dynkin_project(&TensorSeries::zero(a, 6))
        .unwrap()
        .is_zero());
    assert!(LieSeries::dynkin_project(&TensorSeries::one(a, 6)).is_err());
}

#[test]
fn substitution_examples() {
    let a = Alphabet::new(0, 2);
    let z = gens(a, 6);
    assert_eq!(z[0].substitute(&z).unwrap(), z[0]);
    let b = Alphabet::new(1, 0);
    let h = gens(b, 3);
    let (x, y) = (&h[0], &h[1]);
    let bracket = z[0].bracket(&z[1]).unwrap();
    assert!(bracket.substitute(&[y.clone(), -y]).unwrap().is_zero());
    let psi = x.exp_ad(y).unwrap();
    let xy = x.bracket(y).unwrap();
    let expected = &(y + &xy) + &x.bracket(&xy).unwrap().scale(&q(1, 2));
    assert_eq!(z[0].substitute(&[psi, -y]).unwrap(), expected);
    let with_constant = TensorSeries::one(b, 3);
    assert!(TensorSeries::letter(a, 6, 0)
        .substitute(&[with_constant.clone(), with_constant])
        .is_err());
}

#[test]
fn trace_examples() {
    let a = Alphabet::new(1, 0);
    let xy = TensorSeries::from_terms(a, 4, [(Word::from_slice(&[0, 1]), q(1, 1))]);
    let yx = TensorSeries::from_terms(a, 4, [(Word::from_slice(&[1, 0]), q(1, 1))]);
    assert_eq!(CyclicSeries::tr_project(&xy), CyclicSeries::tr_project(&yx));
    assert!(CyclicSeries::tr_project(&(&xy - &yx)).is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_matches_word_oracle_and_associates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let (x, y, z) = (
            random::tensor_series(&mut r, a, 6, 8),
            random::tensor_series(&mut r, a, 6, 8),
            random::tensor_series(&mut r, a, 6, 8),
        );
        prop_assert_eq!(as_map(&(&x * &y)), naive_product(&x, &y));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn bch_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let x = random::lie_series(&mut r, a, 6, 1, 5);
        let y = random::lie_series(&mut r, a, 6, 1, 5);
        let z = random::lie_series(&mut r, a, 6, 1, 5);
        prop_assert_eq!(
            x.bch(&y).unwrap().bch(&z).unwrap(),
            x.bch(&y.bch(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn exp_and_log_are_inverse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 2);
        let x = random::lie_series(&mut r, a, 6, 1, 8);
        let e = x.exp();
        prop_assert_eq!(&LieSeries::log(&e).unwrap(), &x);
        prop_assert_eq!(LieSeries::log(&e).unwrap().exp(), e);
    }

    #[test]
    fn trace_kills_commutators(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(2, 1);
        let x = random::tensor_series(&mut r, a, 6, 10);
        let y = random::tensor_series(&mut r, a, 6, 10);
        prop_assert!(CyclicSeries::tr_project(&(&(&x * &y) - &(&y * &x))).is_zero());
    }

    #[test]
    fn trace_is_rotation_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let x = random::tensor_series(&mut r, a, 6, 12);
        let scrambled = TensorSeries::from_terms(
            a,
            6,
            x.terms().iter().enumerate().map(|(i, (w, c))| {
                let k = if w.is_empty() { 0 } else { i % w.len() };
                (w.rotate(k), c.clone())
            }),
        );
        prop_assert_eq!(CyclicSeries::tr_project(&x), CyclicSeries::tr_project(&scrambled));
    }

    #[test]
    fn dynkin_fixes_lie_and_is_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let x = random::lie_series(&mut r, a, 6, 1, 8);
        prop_assert_eq!(&LieSeries::dynkin_project(x.to_tensor()).unwrap(), &x);
        let mut t = random::tensor_series(&mut r, a, 6, 8);
        t = &t - &TensorSeries::from_terms(a, 6, [(Word::empty(), t.constant_term())]);
        let p = LieSeries::dynkin_project(&t).unwrap();
        prop_assert_eq!(LieSeries::dynkin_project(p.to_tensor()).unwrap(), p);
    }

    #[test]
    fn substitution_is_a_morphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let images: Vec<LieSeries> =
            a.letters().map(|l| {
                let g = LieSeries::generator(a, 6, l);
                &g + &random::lie_series(&mut r, a, 6, 2, 3)
            }).collect();
        let x = random::lie_series(&mut r, a, 6, 1, 4);
        let y = random::lie_series(&mut r, a, 6, 1, 4);
        let lhs = x.bracket(&y).unwrap().substitute(&images).unwrap();
        let rhs = x.substitute(&images).unwrap().bracket(&y.substitute(&images).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);

        let tensors: Vec<TensorSeries> = images.iter().map(|i| i.to_tensor().clone()).collect();
        let s = random::tensor_series(&mut r, a, 6, 6);
        let t = random::tensor_series(&mut r, a, 6, 6);
        prop_assert_eq!(
            (&s * &t).substitute(&tensors).unwrap(),
            &s.substitute(&tensors).unwrap() * &t.substitute(&tensors).unwrap()
        );

        let second: Vec<LieSeries> = a.letters().map(|l| {
            let g = LieSeries::generator(a, 6, l);
            &g + &random::lie_series(&mut r, a, 6, 2, 3)
        }).collect();
        let composed: Vec<LieSeries> =
            images.iter().map(|i| i.substitute(&second).unwrap()).collect();
        prop_assert_eq!(
            x.substitute(&images).unwrap().substitute(&second).unwrap(),
            x.substitute(&composed).unwrap()
        );
    }
}
