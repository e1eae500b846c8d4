//! Seeded random elements for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automorphism::Automorphism;
use crate::derivation::TangentialDerivation;
use crate::error::Result;
use crate::lie::LieSeries;
use crate::lyndon::lyndon_basis;
use crate::rational::{self, Rational};
use crate::tensor::TensorSeries;

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let mut num = rng.gen_range(-4i64..=4);
    if num == 0 {
        num = 1;
    }
    rational::q(num, rng.gen_range(1i64..=3))
}

/// Sparse Lie series with about `terms` basis elements of weight in `min_weight..=cut`.
pub fn lie_series<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    cut: u32,
    min_weight: u32,
    terms: usize,
) -> LieSeries {
    let keys: Vec<Word> = (min_weight.max(1)..=cut)
        .flat_map(|m| {
            lyndon_basis(alphabet, m)
                .iter()
                .cloned()
                .collect::<Vec<_>>()
        })
        .collect();
    let chosen: Vec<(Word, Rational)> = keys
        .choose_multiple(rng, terms.min(keys.len()))
        .cloned()
        .collect::<Vec<_>>()
        .into_iter()
        .map(|w| (w, small_rational(rng)))
        .collect();
    LieSeries::from_coeffs(alphabet, cut, chosen).expect("Lyndon keys")
}

/// Sparse tensor series with about `terms` words of weight in `1..=cut`.
pub fn tensor_series<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    cut: u32,
    terms: usize,
) -> TensorSeries {
    let letters: Vec<Letter> = alphabet.letters().collect();
    let mut out = Vec::new();
    if letters.is_empty() {
        return TensorSeries::zero(alphabet, cut);
    }
    for _ in 0..terms {
        let target = rng.gen_range(1..=cut);
        let mut w = Word::empty();
        while alphabet.word_weight(&w) < target {
            w.push(*letters.choose(rng).unwrap());
        }
        out.push((w, small_rational(rng)));
    }
    TensorSeries::from_terms(alphabet, cut, out)
}

/// Random tangential derivation with sparse images and tangential data.
pub fn tangential_derivation<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    cut: u32,
    terms: usize,
) -> TangentialDerivation {
    let xy = (0..2 * alphabet.genus())
        .map(|_| lie_series(rng, alphabet, cut, 2, terms))
        .collect();
    let data = (0..alphabet.boundary())
        .map(|_| lie_series(rng, alphabet, cut, 1, terms))
        .collect();
    TangentialDerivation::from_parts(alphabet, cut, xy, data).expect("positive by construction")
}

/// `exp` of a random tangential derivation.
pub fn automorphism<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    cut: u32,
    terms: usize,
) -> Result<Automorphism> {
    tangential_derivation(rng, alphabet, cut, terms).exp()
}
