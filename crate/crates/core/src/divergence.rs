//! The maps `∂_w`, the divergence on tangential derivations and its group cocycle `j`.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_traits::Zero;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automorphism::Automorphism;
use crate::cyclic::CyclicSeries;
use crate::derivation::TangentialDerivation;
use crate::error::Result;
use crate::lie::LieSeries;
use crate::lyndon::{expansion, standard_factorization};
use crate::rational::{self, Rational};
use crate::scalar::ScalarSeries;
use crate::tensor::{accumulate, into_sorted, TensorSeries};

/// Highest weight at which divergences are determined by data stored through `cut`.
///
/// The `x`/`y` part of `div(u)` in weight `m` reads generator images of weight `m + 1`,
/// so with genus at least one the trace is known one weight below the cut.
pub fn trace_cut(alphabet: Alphabet, cut: u32) -> u32 {
    if alphabet.genus() == 0 {
        cut
    } else {
        cut.saturating_sub(1)
    }
}

type PartialKey = (Letter, Word);
/// Integer-coefficient expansion of a partial derivative.
type Partial = Arc<Vec<(Word, i64)>>;

static PARTIALS: LazyLock<Mutex<HashMap<PartialKey, Partial>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// `∂_l P_w` for a Lyndon word `w`, from `∂_l [a, b] = a ∂_l b - b ∂_l a`.
fn partial_of_basis(l: Letter, w: &[Letter]) -> Partial {
    let key = (l, Word::from_slice(w));
    if let Some(v) = PARTIALS.lock().unwrap().get(&key) {
        return v.clone();
    }
    let value = match standard_factorization(w) {
        None => {
            if w == [l] {
                vec![(Word::empty(), 1)]
            } else {
                Vec::new()
            }
        }
        Some((a, b)) => {
            let mut acc: HashMap<Word, i64> = HashMap::new();
            let (pa, pb) = (expansion(a), expansion(b));
            for (da, ca) in partial_of_basis(l, b).iter() {
                for (wa, ka) in pa.iter() {
                    *acc.entry(wa.concat(da)).or_insert(0) += ka * ca;
                }
            }
            for (db, cb) in partial_of_basis(l, a).iter() {
                for (wb, kb) in pb.iter() {
                    *acc.entry(wb.concat(db)).or_insert(0) -= kb * cb;
                }
            }
            let mut v: Vec<(Word, i64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
            v.sort();
            v
        }
    };
    let value = Arc::new(value);
    PARTIALS.lock().unwrap().insert(key, value.clone());
    value
}

fn add_partial(acc: &mut HashMap<Word, Rational>, l: Letter, a: &LieSeries, prefix: &[Letter]) {
    for (w, c) in a.coeffs() {
        for (v, k) in partial_of_basis(l, w).iter() {
            accumulate(acc, Word::concat3(prefix, v, &[]), c * rational::int(*k));
        }
    }
}

/// `∂_l a`: the element of `U(L)` with `a(l + εξ) = a + ε ad(∂_l a)(ξ) + O(ε²)`.
pub fn partial_derivative(l: Letter, a: &LieSeries) -> TensorSeries {
    let mut acc = HashMap::new();
    add_partial(&mut acc, l, a, &[]);
    TensorSeries::from_terms(a.alphabet(), a.cut(), into_sorted(acc))
}

/// `div(u) = Σ tr(∂_{x_i} u(x_i)) + tr(∂_{y_i} u(y_i)) + Σ tr(z_j ∂_{z_j} u_j)`, through
/// the trace cut.
pub fn div(u: &TangentialDerivation) -> CyclicSeries {
    let a = u.alphabet();
    let mut acc = HashMap::new();
    for l in 0..2 * a.genus() as Letter {
        add_partial(&mut acc, l, u.image(l), &[]);
    }
    for (j, uj) in u.tangential().iter().enumerate() {
        let z = a.z(j);
        add_partial(&mut acc, z, uj, &[z]);
    }
    CyclicSeries::from_terms(a, trace_cut(a, u.cut()), acc)
}

/// `j(exp(u)) = Σ_{k≥0} u^k(div(u)) / (k+1)!`.
pub fn j_of_exp(u: &TangentialDerivation) -> Result<CyclicSeries> {
    let d = div(u);
    let mut acc = d.clone();
    let mut term = d;
    let mut k = 0u32;
    loop {
        k += 1;
        term = u.apply_cyclic(&term)?;
        if term.is_zero() {
            break;
        }
        acc = &acc + &term.scale(&rational::inv_factorial(k + 1));
    }
    Ok(acc)
}

/// The group cocycle integrating `div`.
pub fn j(f: &Automorphism) -> Result<CyclicSeries> {
    j_of_exp(&f.log()?)
}

/// `Σ_i tr(r(x_i)) + tr(r(y_i))` with `r(s) = log(s / (e^s - 1))`.
pub fn r_element(alphabet: Alphabet, cut: u32) -> CyclicSeries {
    let r = ScalarSeries::r_series(cut as usize);
    let mut terms = Vec::new();
    for l in 0..2 * alphabet.genus() as Letter {
        for (k, c) in r.terms() {
            terms.push((std::iter::repeat_n(l, k).collect::<Word>(), c.clone()));
        }
    }
    CyclicSeries::from_terms(alphabet, cut, terms)
}

/// `tr h(a) = Σ_k c_k tr(a^k)` through `cut`.
pub fn tr_h(h: &ScalarSeries, a: &LieSeries, cut: u32) -> CyclicSeries {
    let base = a.to_tensor().truncated(cut);
    let mut acc = TensorSeries::zero(a.alphabet(), cut);
    let mut power = TensorSeries::one(a.alphabet(), cut);
    for k in 1..=h.max_degree() {
        power = &power * &base;
        if power.is_zero() {
            break;
        }
        let c = h.coeff(k);
        if !c.is_zero() {
            acc = &acc + &power.scale(&c);
        }
    }
    CyclicSeries::tr_project(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::make_t;
    use crate::rational::q;

    /// Words of a Lie element ending in `l`, with that letter removed.
    fn strip_oracle(l: Letter, a: &LieSeries) -> TensorSeries {
        TensorSeries::from_terms(
            a.alphabet(),
            a.cut(),
            a.to_tensor()
                .terms()
                .iter()
                .filter(|(w, _)| w.last() == Some(&l))
                .map(|(w, c)| (Word::from_slice(&w[..w.len() - 1]), c.clone())),
        )
    }

    #[test]
    fn partials_of_small_brackets() {
        let a = Alphabet::new(1, 0);
        let x = LieSeries::generator(a, 5, 0);
        let y = LieSeries::generator(a, 5, 1);
        assert_eq!(partial_derivative(0, &x), TensorSeries::one(a, 5));
        let xy = x.bracket(&y).unwrap();
        assert_eq!(partial_derivative(1, &xy), TensorSeries::letter(a, 5, 0));
        assert_eq!(partial_derivative(0, &xy), -&TensorSeries::letter(a, 5, 1));
    }

    #[test]
    fn partials_match_word_stripping() {
        let a = Alphabet::new(1, 1);
        for w in crate::lyndon::lyndon_words(3, 5) {
            if a.word_weight(&w) > 7 {
                continue;
            }
            let p = LieSeries::from_coeffs(a, 7, [(w.clone(), q(1, 1))]).unwrap();
            for l in a.letters() {
                assert_eq!(partial_derivative(l, &p), strip_oracle(l, &p), "{w:?} {l}");
            }
        }
    }

    #[test]
    fn divergence_examples() {
        let a = Alphabet::new(1, 0);
        let x = LieSeries::generator(a, 4, 0);
        let y = LieSeries::generator(a, 4, 1);
        let u = TangentialDerivation::from_parts(
            a,
            4,
            vec![x.bracket(&y).unwrap(), LieSeries::zero(a, 4)],
            vec![],
        )
        .unwrap();
        let d = div(&u);
        assert_eq!(d.cut(), 3);
        assert_eq!(
            d,
            CyclicSeries::from_terms(a, 3, [(Word::letter(1), q(-1, 1))])
        );
        assert!(div(&TangentialDerivation::zero(a, 4)).is_zero());
        let b = Alphabet::new(0, 2);
        assert!(div(&make_t(b, 6).unwrap()).is_zero());
    }

    #[test]
    fn r_element_leading_terms() {
        let a = Alphabet::new(1, 0);
        let r = r_element(a, 4);
        assert_eq!(r.coeff(&[0]), q(-1, 2));
        assert_eq!(r.coeff(&[1, 1]), q(-1, 24));
        assert!(r_element(Alphabet::new(0, 3), 4).is_zero());
    }

    #[test]
    fn tr_h_basic() {
        let a = Alphabet::new(1, 1);
        let z = LieSeries::generator(a, 6, 2);
        let x = LieSeries::generator(a, 6, 0);
        let s = ScalarSeries::from_coeffs(vec![q(1, 1)]);
        assert_eq!(
            tr_h(&s, &z, 6),
            CyclicSeries::from_terms(a, 6, [(Word::letter(2), q(1, 1))])
        );
        let s2 = ScalarSeries::from_coeffs(vec![q(0, 1), q(1, 1)]);
        assert_eq!(
            tr_h(&s2, &x, 6),
            CyclicSeries::from_terms(a, 6, [(Word::from_slice(&[0, 0]), q(1, 1))])
        );
    }
}
