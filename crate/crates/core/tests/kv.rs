use std::collections::BTreeMap;

use kv_core::derivation::make_delta_2n;
use kv_core::kv::{krv_basis, phi_element, xi_element};
use kv_core::linalg::AffineSystem;
use kv_core::rational::q;
use kv_core::{
    solve_kv, Alphabet, Automorphism, KVInstance, LieSeries, PivotOrder, Rational, ScalarSeries,
    Strategy, TangentialDerivation, Word,
};

fn gens(a: Alphabet, cut: u32) -> Vec<LieSeries> {
    a.letters()
        .map(|l| LieSeries::generator(a, cut, l))
        .collect()
}

/// Whether `target` lies in the span of `basis`, compared image by image.
fn in_span(basis: &[TangentialDerivation], target: &TangentialDerivation) -> bool {
    let mut rows: BTreeMap<(usize, Word), (BTreeMap<usize, Rational>, Rational)> = BTreeMap::new();
    for (col, u) in basis.iter().enumerate() {
        for (l, img) in u.images().iter().enumerate() {
            for (w, c) in img.coeffs() {
                rows.entry((l, w.clone()))
                    .or_default()
                    .0
                    .insert(col, c.clone());
            }
        }
    }
    for (l, img) in target.images().iter().enumerate() {
        for (w, c) in img.coeffs() {
            rows.entry((l, w.clone())).or_default().1 = c.clone();
        }
    }
    let mut sys = AffineSystem::new(basis.len());
    for (_, (row, rhs)) in rows {
        sys.push_row(row, rhs);
    }
    sys.solve(PivotOrder::Natural).is_consistent()
}

#[test]
fn instance_elements() {
    let a = Alphabet::new(1, 1);
    let g = gens(a, 6);
    let inst = KVInstance::new(1, 1, 6);
    assert_eq!(inst.phi(), &(&g[0].bracket(&g[1]).unwrap() + &g[2]));
    assert_eq!(inst.phi(), &phi_element(a, 6));
    assert_eq!(inst.xi(), &xi_element(a, 6));
    // log(e^x e^y e^-x e^-y) = [x,y] + ½[x,[x,y]] + ½[y,[x,y]] + ...
    let g1 = KVInstance::new(1, 0, 6);
    let gg = gens(g1.alphabet(), 6);
    let xy = gg[0].bracket(&gg[1]).unwrap();
    let lead1 =
        &xy + &(&gg[0].bracket(&xy).unwrap() + &gg[1].bracket(&xy).unwrap()).scale(&q(1, 2));
    assert_eq!(g1.xi().truncated(3), lead1.truncated(3));
    assert_eq!(KVInstance::new(0, 2, 8).trace_cut(), 8);
    assert_eq!(KVInstance::new(1, 0, 8).trace_cut(), 7);
    assert_eq!(KVInstance::new(1, 0, 8).duflo_degree(), 3);
}

#[test]
fn identity_residuals() {
    let inst = KVInstance::new(0, 2, 6);
    let id = Automorphism::identity(inst.alphabet(), 6);
    let report = inst.residuals(&id, &ScalarSeries::zero(3)).unwrap();
    assert!(!report.pass);
    assert_eq!(report.kv1.coeff(&[0, 1]), q(-1, 2));
    assert_eq!(report.kv1_profile.keys().next(), Some(&4));
    assert!(report.kv2.is_zero());
}

#[test]
fn kv2_has_no_duflo_function_for_a_bad_automorphism() {
    let a = Alphabet::new(1, 0);
    let g = gens(a, 4);
    let u = TangentialDerivation::from_parts(
        a,
        4,
        vec![g[0].bracket(&g[1]).unwrap(), LieSeries::zero(a, 4)],
        vec![],
    )
    .unwrap();
    let inst = KVInstance::new(1, 0, 4);
    assert!(inst.kv2_solve_h(&u.exp().unwrap()).is_err());
}

#[test]
fn krv_membership() {
    let inst = KVInstance::new(1, 0, 8);
    let a = inst.alphabet();
    assert!(
        inst.krv_check(&TangentialDerivation::zero(a, 8))
            .unwrap()
            .pass
    );
    for n in 1..=3 {
        let report = inst.krv_check(&make_delta_2n(a, 8, n).unwrap()).unwrap();
        assert!(report.pass, "δ_{}", 2 * n);
        assert!(report.phi_defect.is_zero());
    }
    let g = gens(a, 8);
    let xy = g[0].bracket(&g[1]).unwrap();
    let bad =
        TangentialDerivation::from_parts(a, 8, vec![xy.clone(), LieSeries::zero(a, 8)], vec![])
            .unwrap();
    let report = inst.krv_check(&bad).unwrap();
    assert!(!report.pass);
    assert_eq!(report.phi_defect, xy.bracket(&g[1]).unwrap());
    assert!(report.duflo.is_none());
}

#[test]
fn krv_basis_contains_delta() {
    let inst = KVInstance::new(1, 0, 6);
    let basis = krv_basis(&inst, 2).unwrap();
    assert!(!basis.is_empty());
    for u in &basis {
        assert!(inst.krv_check(u).unwrap().pass);
    }
    let d2 = make_delta_2n(inst.alphabet(), 6, 1)
        .unwrap()
        .degree_component(2);
    assert!(in_span(&basis, &d2));
    assert!(krv_basis(&inst, 1).unwrap().is_empty());
}

#[test]
fn solve_two_boundaries() {
    let inst = KVInstance::new(0, 2, 6);
    let mut solutions = Vec::new();
    for strategy in [Strategy::Joint, Strategy::Kv1ThenCorrect] {
        for pivot in [PivotOrder::Natural, PivotOrder::Reversed] {
            let sol = solve_kv(&inst, strategy, pivot).unwrap();
            assert!(sol.residuals().unwrap().pass);
            assert_eq!(sol.duflo.coeff(1), q(0, 1));
            assert_eq!(sol.duflo.coeff(2), q(1, 48));
            solutions.push(sol);
        }
    }
    let first = &solutions[0];
    for other in &solutions[1..] {
        assert_eq!(other.duflo.even_part(2), first.duflo.even_part(2));
        let g = first.aut.inverse().unwrap().compose(&other.aut).unwrap();
        let hg = inst.stabilizer_check(&g).unwrap();
        assert_eq!(first.duflo.add(&hg), other.duflo);
    }
}

#[test]
fn solve_genus_one() {
    let inst = KVInstance::new(1, 0, 4);
    let sol = solve_kv(&inst, Strategy::Joint, PivotOrder::Natural).unwrap();
    assert!(sol.residuals().unwrap().pass);
    // φ alone rewrites φ as ξ only to lowest order.
    let phi = kv_core::automorphism::make_phi_aut(inst.alphabet(), 4).unwrap();
    assert!(!inst.residuals(&phi, &sol.duflo).unwrap().pass);
}

#[test]
fn torsor_action() {
    let inst = KVInstance::new(0, 2, 5);
    let sol = solve_kv(&inst, Strategy::Joint, PivotOrder::Natural).unwrap();
    let same = sol
        .torsor_act(&Automorphism::identity(inst.alphabet(), 5))
        .unwrap();
    assert_eq!(same.aut, sol.aut);
    let t = kv_core::derivation::make_t(inst.alphabet(), 5).unwrap();
    let moved = sol.torsor_act(&t.scale(&q(3, 1)).exp().unwrap()).unwrap();
    assert!(moved.residuals().unwrap().pass);
    assert_ne!(moved.aut, sol.aut);
}
