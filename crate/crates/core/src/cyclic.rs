//! Series in cyclic words: the trace space `tr`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{AlgebraError, Result};
use crate::rational::Rational;
use crate::tensor::{accumulate, into_sorted, TensorSeries};

/// Lexicographically least rotation.
pub fn canonical_rotation(w: &[Letter]) -> Word {
    let n = w.len();
    let mut best = 0;
    for k in 1..n {
        let better = (0..n)
            .map(|i| (w[(k + i) % n], w[(best + i) % n]))
            .find(|(a, b)| a != b)
            .is_some_and(|(a, b)| a < b);
        if better {
            best = k;
        }
    }
    Word::from_slice(w).rotate(best)
}

/// Rotation class of a nonempty word, stored by its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn new(w: &[Letter]) -> Option<Self> {
        (!w.is_empty()).then(|| CyclicWord(canonical_rotation(w)))
    }

    pub fn representative(&self) -> &Word {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicSeries {
    alphabet: Alphabet,
    cut: u32,
    terms: BTreeMap<CyclicWord, Rational>,
}

impl CyclicSeries {
    pub fn zero(alphabet: Alphabet, cut: u32) -> Self {
        CyclicSeries {
            alphabet,
            cut,
            terms: BTreeMap::new(),
        }
    }

    /// Linear projection `tr`: words to rotation classes, constant term dropped.
    pub fn tr_project(t: &TensorSeries) -> Self {
        Self::project_terms(t.alphabet(), t.cut(), t.terms().iter())
    }

    fn project_terms<'a>(
        alphabet: Alphabet,
        cut: u32,
        terms: impl Iterator<Item = (&'a Word, &'a Rational)>,
    ) -> Self {
        let mut acc = HashMap::new();
        for (w, c) in terms {
            if w.is_empty() || alphabet.word_weight(w) > cut {
                continue;
            }
            accumulate(&mut acc, canonical_rotation(w), c.clone());
        }
        CyclicSeries {
            alphabet,
            cut,
            terms: into_sorted(acc)
                .into_iter()
                .map(|(w, c)| (CyclicWord(w), c))
                .collect(),
        }
    }

    pub fn from_terms<I>(alphabet: Alphabet, cut: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, Rational)>,
    {
        let v: Vec<(Word, Rational)> = terms.into_iter().collect();
        Self::project_terms(alphabet, cut, v.iter().map(|(w, c)| (w, c)))
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    pub fn terms(&self) -> &BTreeMap<CyclicWord, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &[Letter]) -> Rational {
        CyclicWord::new(w)
            .and_then(|c| self.terms.get(&c).cloned())
            .unwrap_or_else(Rational::zero)
    }

    pub fn weight_of(&self, c: &CyclicWord) -> u32 {
        self.alphabet.word_weight(&c.0)
    }

    pub fn weight_component(&self, m: u32) -> Self {
        self.filtered(|w| w == m, self.cut)
    }

    pub fn truncated(&self, cut: u32) -> Self {
        self.filtered(|w| w <= cut, cut)
    }

    fn filtered(&self, keep: impl Fn(u32) -> bool, cut: u32) -> Self {
        CyclicSeries {
            alphabet: self.alphabet,
            cut,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(self.weight_of(w)))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Weights carrying nonzero coefficients, with the number of terms at each.
    pub fn weight_profile(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for w in self.terms.keys() {
            *out.entry(self.weight_of(w)).or_insert(0) += 1;
        }
        out
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|w| self.weight_of(w)).min()
    }

    pub fn check_context(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet || self.cut != other.cut {
            return Err(AlgebraError::ContextMismatch(format!(
                "cyclic series over {:?} cut {} vs {:?} cut {}",
                self.alphabet, self.cut, other.alphabet, other.cut
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.alphabet, self.cut);
        }
        CyclicSeries {
            alphabet: self.alphabet,
            cut: self.cut,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let e = terms.entry(w.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(w);
            }
        }
        Ok(CyclicSeries {
            alphabet: self.alphabet,
            cut: self.cut,
            terms,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Apply a map on representative words and project the result back to `tr`.
    ///
    /// `f` must be well defined on rotation classes after projection (true for algebra
    /// endomorphisms and derivations).
    pub fn map_words(&self, cut: u32, f: impl Fn(&Word) -> TensorSeries) -> Self {
        let mut acc = HashMap::new();
        for (w, c) in &self.terms {
            for (v, d) in f(&w.0).terms() {
                if v.is_empty() || self.alphabet.word_weight(v) > cut {
                    continue;
                }
                accumulate(&mut acc, canonical_rotation(v), c * d);
            }
        }
        CyclicSeries {
            alphabet: self.alphabet,
            cut,
            terms: into_sorted(acc)
                .into_iter()
                .map(|(w, c)| (CyclicWord(w), c))
                .collect(),
        }
    }
}

impl Add for &CyclicSeries {
    type Output = CyclicSeries;

    fn add(self, rhs: &CyclicSeries) -> CyclicSeries {
        self.try_add(rhs).expect("cyclic addition")
    }
}

impl Sub for &CyclicSeries {
    type Output = CyclicSeries;

    fn sub(self, rhs: &CyclicSeries) -> CyclicSeries {
        self.try_sub(rhs).expect("cyclic subtraction")
    }
}

impl Neg for &CyclicSeries {
    type Output = CyclicSeries;

    fn neg(self) -> CyclicSeries {
        CyclicSeries {
            alphabet: self.alphabet,
            cut: self.cut,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}
