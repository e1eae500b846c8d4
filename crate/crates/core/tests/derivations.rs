use kv_core::automorphism::make_phi_aut;
use kv_core::derivation::{make_delta_2n, make_t};
use kv_core::divergence::{div, j, j_of_exp, partial_derivative, r_element, tr_h};
use kv_core::rational::{inv_factorial, q};
use kv_core::{
    random, Alphabet, Automorphism, CyclicSeries, LieSeries, ScalarSeries, TangentialDerivation,
    TensorSeries, Word,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CONTEXTS: [(usize, usize); 5] = [(0, 2), (0, 3), (1, 0), (1, 1), (2, 0)];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gens(a: Alphabet, cut: u32) -> Vec<LieSeries> {
    a.letters()
        .map(|l| LieSeries::generator(a, cut, l))
        .collect()
}

/// `z_j` images re-derived from the tangential data.
fn is_tangential_images(a: Alphabet, images: &[LieSeries], data: &[LieSeries], conj: bool) -> bool {
    (0..a.boundary()).all(|jx| {
        let z = LieSeries::generator(a, images[0].cut(), a.z(jx));
        let expected = if conj {
            (-&data[jx]).exp_ad(&z).unwrap()
        } else {
            z.bracket(&data[jx]).unwrap()
        };
        images[a.z(jx) as usize] == expected && data[jx].coeff(&[a.z(jx)]) == q(0, 1)
    })
}

#[test]
fn leibniz_examples() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 5);
    let u = TangentialDerivation::from_parts(
        a,
        5,
        vec![g[1].bracket(&g[0]).unwrap(), LieSeries::zero(a, 5)],
        vec![],
    )
    .unwrap();
    assert!(TangentialDerivation::zero(a, 5)
        .apply_lie(&g[0].bracket(&g[1]).unwrap())
        .unwrap()
        .is_zero());
    // u(x) = [y, x], u(y) = 0: u([x,y]) = [[y,x],y]
    let expected = g[1].bracket(&g[0]).unwrap().bracket(&g[1]).unwrap();
    assert_eq!(
        u.apply_lie(&g[0].bracket(&g[1]).unwrap()).unwrap(),
        expected
    );
}

#[test]
fn exp_series_on_generators() {
    let mut r = rng(3);
    let a = Alphabet::new(1, 1);
    let u = random::tangential_derivation(&mut r, a, 6, 3);
    let f = u.exp().unwrap();
    for l in a.letters() {
        let mut acc = LieSeries::generator(a, 6, l);
        let mut term = acc.clone();
        for k in 1..=6 {
            term = u.apply_lie(&term).unwrap();
            acc = &acc + &term.scale(&inv_factorial(k));
        }
        assert_eq!(f.image(l), &acc);
    }
    assert!(TangentialDerivation::zero(a, 6)
        .exp()
        .unwrap()
        .is_identity());
    assert!(Automorphism::identity(a, 6).log().unwrap().is_zero());
}

#[test]
fn t_examples() {
    let a = Alphabet::new(0, 2);
    let t = make_t(a, 6).unwrap();
    let z = gens(a, 6);
    assert_eq!(t.apply_lie(&z[0]).unwrap(), z[0].bracket(&z[1]).unwrap());
    assert!(t.apply_lie(&(&z[0] + &z[1])).unwrap().is_zero());
    assert!(div(&t).is_zero());
    assert!(make_t(Alphabet::new(1, 1), 6).is_err());
}

#[test]
fn delta_examples() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 8);
    let (x, y) = (&g[0], &g[1]);
    for n in 1..=3 {
        let d = make_delta_2n(a, 8, n).unwrap();
        let mut ad = y.clone();
        for _ in 0..2 * n {
            ad = x.bracket(&ad).unwrap();
        }
        assert_eq!(d.image(0), &ad);
        assert!(d.apply_lie(&x.bracket(y).unwrap()).unwrap().is_zero());
    }
    assert!(make_delta_2n(a, 5, 2).is_err());
    assert!(make_delta_2n(Alphabet::new(1, 1), 8, 1).is_err());
}

#[test]
fn phi_aut_examples() {
    let a = Alphabet::new(1, 0);
    let phi = make_phi_aut(a, 5).unwrap();
    let g = gens(a, 5);
    let (x, y) = (&g[0], &g[1]);
    assert_eq!(phi.image(0), x);
    let xy = x.bracket(y).unwrap();
    let low = &(y + &xy.scale(&q(1, 2))) + &x.bracket(&xy).unwrap().scale(&q(1, 6));
    assert_eq!(phi.image(1).truncated(3), low.truncated(3));
    assert!(phi.compose(&phi.inverse().unwrap()).unwrap().is_identity());
    assert!(make_phi_aut(Alphabet::new(0, 2), 5).is_err());
}

#[test]
fn partial_derivative_examples() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 4);
    let xy = g[0].bracket(&g[1]).unwrap();
    assert_eq!(partial_derivative(0, &g[0]), TensorSeries::one(a, 4));
    assert_eq!(partial_derivative(1, &xy), TensorSeries::letter(a, 4, 0));
    assert_eq!(partial_derivative(0, &xy), -&TensorSeries::letter(a, 4, 1));
}

#[test]
fn divergence_and_j_examples() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 4);
    let u = TangentialDerivation::from_parts(
        a,
        4,
        vec![g[0].bracket(&g[1]).unwrap(), LieSeries::zero(a, 4)],
        vec![],
    )
    .unwrap();
    assert_eq!(
        div(&u),
        CyclicSeries::from_terms(a, 3, [(Word::letter(1), q(-1, 1))])
    );
    assert!(j(&Automorphism::identity(a, 4)).unwrap().is_zero());
    let lead = div(&u);
    let diff = j(&u.exp().unwrap()).unwrap().try_sub(&lead).unwrap();
    assert!(diff
        .min_weight()
        .is_none_or(|w| w > lead.min_weight().unwrap()));
}

#[test]
fn r_and_tr_h_examples() {
    let a = Alphabet::new(1, 0);
    assert_eq!(r_element(a, 5).coeff(&[0]), q(-1, 2));
    assert!(r_element(Alphabet::new(0, 2), 5).is_zero());
    assert_eq!(ScalarSeries::r_series(4).coeff(1), q(-1, 2));
    // Weight-2k components of tr h([x,y]) come from c_k alone.
    let g = gens(a, 8);
    let xy = g[0].bracket(&g[1]).unwrap();
    for k in 1..=4usize {
        let mut coeffs = vec![q(0, 1); 4];
        coeffs[k - 1] = q(1, 1);
        let only = tr_h(&ScalarSeries::from_coeffs(coeffs), &xy, 8);
        for (w, _) in only.weight_profile() {
            assert_eq!(w as usize, 2 * k);
        }
    }
}

/// Drop the one-letter `z_j` terms from the `x_i`, `y_i` images. These derivations form a
/// subalgebra on which normalizing the tangential data commutes with the bracket.
fn without_linear_z(u: &TangentialDerivation) -> TangentialDerivation {
    let a = u.alphabet();
    let xy = u
        .xy_images()
        .iter()
        .map(|img| {
            let kept = img
                .coeffs()
                .iter()
                .filter(|(w, _)| !(w.len() == 1 && a.is_z(w[0])));
            LieSeries::from_coeffs(a, u.cut(), kept.map(|(w, c)| (w.clone(), c.clone()))).unwrap()
        })
        .collect();
    TangentialDerivation::from_parts(a, u.cut(), xy, u.tangential().to_vec()).unwrap()
}

#[test]
fn normalization_breaks_the_cocycle_with_linear_z_images() {
    // u: y ↦ z, v: z ↦ [z, y]. The bracket's raw data u(y) = z is dropped by the
    // normalization, which shifts its divergence by -tr(z).
    let a = Alphabet::new(1, 1);
    let g = gens(a, 5);
    let u = TangentialDerivation::from_parts(
        a,
        5,
        vec![LieSeries::zero(a, 5), g[2].clone()],
        vec![LieSeries::zero(a, 5)],
    )
    .unwrap();
    let v =
        TangentialDerivation::from_parts(a, 5, vec![LieSeries::zero(a, 5); 2], vec![g[1].clone()])
            .unwrap();
    let uv = u.bracket(&v).unwrap();
    assert!(uv.tangential()[0].is_zero());
    assert_eq!(uv.image(1), &g[1].bracket(&g[2]).unwrap());
    let rhs = u
        .apply_cyclic(&div(&v))
        .unwrap()
        .try_sub(&v.apply_cyclic(&div(&u)).unwrap())
        .unwrap();
    assert!(rhs.is_zero());
    assert_eq!(
        div(&uv),
        CyclicSeries::from_terms(a, 4, [(Word::letter(2), q(-1, 1))])
    );
}

fn check_cocycles(g: usize, n: usize, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let a = Alphabet::new(g, n);
    let u = without_linear_z(&random::tangential_derivation(&mut r, a, 5, 3));
    let v = without_linear_z(&random::tangential_derivation(&mut r, a, 5, 3));
    let lhs = div(&u.bracket(&v).unwrap());
    let rhs = u
        .apply_cyclic(&div(&v))
        .unwrap()
        .try_sub(&v.apply_cyclic(&div(&u)).unwrap())
        .unwrap();
    prop_assert_eq!(lhs, rhs, "div cocycle in ({},{})", g, n);
    let f = without_linear_z(&random::tangential_derivation(&mut r, a, 5, 3))
        .exp()
        .unwrap();
    let h = without_linear_z(&random::tangential_derivation(&mut r, a, 5, 3))
        .exp()
        .unwrap();
    let lhs = j(&f.compose(&h).unwrap()).unwrap();
    let rhs = j(&f)
        .unwrap()
        .try_add(&f.apply_cyclic(&j(&h).unwrap()).unwrap())
        .unwrap();
    prop_assert_eq!(lhs, rhs, "j cocycle in ({},{})", g, n);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn divergence_and_j_are_cocycles(seed in any::<u64>()) {
        for (g, n) in CONTEXTS {
            check_cocycles(g, n, seed)?;
        }
    }

    #[test]
    fn bracket_is_tangential_and_satisfies_jacobi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 2);
        let u = random::tangential_derivation(&mut r, a, 5, 3);
        let v = random::tangential_derivation(&mut r, a, 5, 3);
        let w = random::tangential_derivation(&mut r, a, 5, 3);
        let uv = u.bracket(&v).unwrap();
        prop_assert!(is_tangential_images(a, uv.images(), uv.tangential(), false));
        // [u,v] agrees with the commutator of the actions on every generator.
        for l in a.letters() {
            let gl = LieSeries::generator(a, 5, l);
            let direct = u.apply_lie(&v.apply_lie(&gl).unwrap()).unwrap()
                .try_sub(&v.apply_lie(&u.apply_lie(&gl).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(uv.image(l), &direct);
        }
        prop_assert!(u.bracket(&u).unwrap().is_zero());
        let jac = u.bracket(&v.bracket(&w).unwrap()).unwrap()
            .try_add(&v.bracket(&w.bracket(&u).unwrap()).unwrap()).unwrap()
            .try_add(&w.bracket(&u.bracket(&v).unwrap()).unwrap()).unwrap();
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn actions_on_traces(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let u = random::tangential_derivation(&mut r, a, 5, 3);
        let v = random::tangential_derivation(&mut r, a, 5, 3);
        let x = random::tensor_series(&mut r, a, 5, 6);
        let y = random::tensor_series(&mut r, a, 5, 6);
        let tr = |t: &TensorSeries| CyclicSeries::tr_project(t);
        let lhs = u.apply_cyclic(&tr(&(&x * &y))).unwrap();
        let rhs = &tr(&(&u.apply_tensor(&x).unwrap() * &y)) + &tr(&(&x * &u.apply_tensor(&y).unwrap()));
        prop_assert_eq!(lhs, rhs);
        let c = tr(&x);
        let bracket_action = u.bracket(&v).unwrap().apply_cyclic(&c).unwrap();
        let nested = u.apply_cyclic(&v.apply_cyclic(&c).unwrap()).unwrap()
            .try_sub(&v.apply_cyclic(&u.apply_cyclic(&c).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(bracket_action, nested);
        let f = u.exp().unwrap();
        let g = v.exp().unwrap();
        prop_assert_eq!(
            f.compose(&g).unwrap().apply_cyclic(&c).unwrap(),
            f.apply_cyclic(&g.apply_cyclic(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn group_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let f = random::automorphism(&mut r, a, 5, 3).unwrap();
        let g = random::automorphism(&mut r, a, 5, 3).unwrap();
        let h = random::automorphism(&mut r, a, 5, 3).unwrap();
        let fg = f.compose(&g).unwrap();
        prop_assert!(is_tangential_images(a, fg.images(), fg.tangential(), true));
        let inv = f.inverse().unwrap();
        prop_assert!(is_tangential_images(a, inv.images(), inv.tangential(), true));
        prop_assert!(f.compose(&inv).unwrap().is_identity());
        prop_assert_eq!(fg.compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
        // Tangential data compose as F_j · F(G_j).
        for jx in 0..a.boundary() {
            let expected = f.tangential()[jx]
                .bch(&f.apply_lie(&g.tangential()[jx]).unwrap())
                .unwrap();
            let z = LieSeries::generator(a, 5, a.z(jx));
            prop_assert_eq!((-&expected).exp_ad(&z).unwrap(), fg.image(a.z(jx)).clone());
        }
    }

    #[test]
    fn exp_and_log_roundtrip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let u = random::tangential_derivation(&mut r, a, 6, 3);
        let f = u.exp().unwrap();
        prop_assert!(is_tangential_images(a, f.images(), f.tangential(), true));
        prop_assert_eq!(&f.log().unwrap(), &u);
        let g = random::automorphism(&mut r, a, 6, 3).unwrap();
        prop_assert_eq!(g.log().unwrap().exp().unwrap(), g);
    }

    #[test]
    fn j_integrates_div(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = Alphabet::new(1, 1);
        let u = random::tangential_derivation(&mut r, a, 5, 3);
        let mut expected = div(&u);
        let mut term = div(&u);
        for k in 1..=6 {
            term = u.apply_cyclic(&term).unwrap();
            expected = expected.try_add(&term.scale(&inv_factorial(k + 1))).unwrap();
        }
        prop_assert_eq!(&j_of_exp(&u).unwrap(), &expected);
        prop_assert_eq!(j(&u.exp().unwrap()).unwrap(), expected);
        let scaled = u.scale(&q(-3, 2));
        prop_assert_eq!(div(&scaled), div(&u).scale(&q(-3, 2)));
    }
}
