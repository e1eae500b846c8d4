//! Truncated series in the completed free associative algebra `U(L)`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{AlgebraError, Result};
use crate::rational::{self, Rational};

/// A series `Σ c_w w` over words of weight at most `cut`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSeries {
    alphabet: Alphabet,
    cut: u32,
    terms: BTreeMap<Word, Rational>,
}

pub(crate) fn accumulate(map: &mut HashMap<Word, Rational>, word: Word, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(word) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

pub(crate) fn into_sorted(map: HashMap<Word, Rational>) -> BTreeMap<Word, Rational> {
    map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl TensorSeries {
    pub fn zero(alphabet: Alphabet, cut: u32) -> Self {
        TensorSeries {
            alphabet,
            cut,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alphabet: Alphabet, cut: u32) -> Self {
        Self::from_terms(alphabet, cut, [(Word::empty(), rational::one())])
    }

    pub fn letter(alphabet: Alphabet, cut: u32, l: Letter) -> Self {
        Self::from_terms(alphabet, cut, [(Word::letter(l), rational::one())])
    }

    /// Build from arbitrary terms; repeated words are summed, heavy words dropped.
    pub fn from_terms<I>(alphabet: Alphabet, cut: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, Rational)>,
    {
        let mut map = HashMap::new();
        for (w, c) in terms {
            if alphabet.word_weight(&w) <= cut {
                accumulate(&mut map, w, c);
            }
        }
        TensorSeries {
            alphabet,
            cut,
            terms: into_sorted(map),
        }
    }

    pub(crate) fn from_sorted_unchecked(
        alphabet: Alphabet,
        cut: u32,
        terms: BTreeMap<Word, Rational>,
    ) -> Self {
        TensorSeries {
            alphabet,
            cut,
            terms,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, word: &[Letter]) -> Rational {
        self.terms
            .get(&Word::from_slice(word))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&[])
    }

    pub fn weight_of(&self, w: &Word) -> u32 {
        self.alphabet.word_weight(w)
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|w| self.weight_of(w)).min()
    }

    pub fn weight_component(&self, m: u32) -> Self {
        self.filter_weights(|w| w == m)
    }

    pub fn truncated(&self, cut: u32) -> Self {
        let mut t = self.filter_weights(|w| w <= cut);
        t.cut = cut;
        t
    }

    /// Same terms with a larger or smaller cut.
    pub fn with_cut(&self, cut: u32) -> Self {
        self.truncated(cut)
    }

    fn filter_weights(&self, keep: impl Fn(u32) -> bool) -> Self {
        TensorSeries {
            alphabet: self.alphabet,
            cut: self.cut,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(self.alphabet.word_weight(w)))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn check_context(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet || self.cut != other.cut {
            return Err(AlgebraError::ContextMismatch(format!(
                "tensor series over {:?} cut {} vs {:?} cut {}",
                self.alphabet, self.cut, other.alphabet, other.cut
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.alphabet, self.cut);
        }
        TensorSeries {
            alphabet: self.alphabet,
            cut: self.cut,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let entry = terms.entry(w.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(w);
            }
        }
        Ok(TensorSeries {
            alphabet: self.alphabet,
            cut: self.cut,
            terms,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Concatenation product truncated at the cut.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let cut = self.cut;
        let buckets = weight_buckets(other);
        let mut acc = HashMap::new();
        for (wa, ca) in &self.terms {
            let weight_a = self.weight_of(wa);
            for (weight_b, bucket) in buckets.iter().enumerate() {
                if weight_a + weight_b as u32 > cut {
                    break;
                }
                for (wb, cb) in bucket {
                    accumulate(&mut acc, wa.concat(wb), ca * *cb);
                }
            }
        }
        Ok(TensorSeries {
            alphabet: self.alphabet,
            cut,
            terms: into_sorted(acc),
        })
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.alphabet, self.cut);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `exp(a) = Σ a^k / k!`; requires a zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(AlgebraError::ConstantTerm(
                self.constant_term().to_string(),
                "0".into(),
            ));
        }
        let mut acc = Self::one(self.alphabet, self.cut);
        let mut power = Self::one(self.alphabet, self.cut);
        let mut k = 0u32;
        loop {
            k += 1;
            power = &power * self;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power.scale(&rational::inv_factorial(k));
        }
        Ok(acc)
    }

    /// `log(1 + b) = Σ (-1)^{k+1} b^k / k`; requires constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(AlgebraError::ConstantTerm(
                self.constant_term().to_string(),
                "1".into(),
            ));
        }
        let b = self - &Self::one(self.alphabet, self.cut);
        let mut acc = Self::zero(self.alphabet, self.cut);
        let mut power = Self::one(self.alphabet, self.cut);
        let mut k = 0i64;
        loop {
            k += 1;
            power = &power * &b;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = &acc + &power.scale(&rational::q(sign, k));
        }
        Ok(acc)
    }

    /// Same coefficients read in another alphabet through a letter map.
    pub fn relabel(&self, target: Alphabet, map: &[Letter], cut: u32) -> Self {
        Self::from_terms(
            target,
            cut,
            self.terms
                .iter()
                .map(|(w, c)| (w.iter().map(|&l| map[l as usize]).collect(), c.clone())),
        )
    }

    /// Image under the algebra endomorphism sending letter `l` to `images[l]`.
    ///
    /// Images may live in another alphabet; all images must share the target context
    /// and have zero constant term.
    pub fn substitute(&self, images: &[TensorSeries]) -> Result<Self> {
        let Some(first) = images.first() else {
            // empty alphabet: only the constant term survives
            return Ok(self.clone());
        };
        let (target, cut) = (first.alphabet, first.cut);
        for (l, img) in images.iter().enumerate() {
            img.check_context(first)?;
            if !img.constant_term().is_zero() {
                return Err(AlgebraError::WeightZeroImage(
                    self.alphabet.name(l as Letter),
                ));
            }
        }
        let mut memo: HashMap<Word, TensorSeries> = HashMap::new();
        memo.insert(Word::empty(), TensorSeries::one(target, cut));
        let mut acc = HashMap::new();
        for (w, c) in &self.terms {
            let img = prefix_image(w, images, &mut memo);
            for (v, d) in &img.terms {
                accumulate(&mut acc, v.clone(), c * d);
            }
        }
        Ok(TensorSeries::from_sorted_unchecked(
            target,
            cut,
            into_sorted(acc),
        ))
    }
}

fn prefix_image(
    w: &[Letter],
    images: &[TensorSeries],
    memo: &mut HashMap<Word, TensorSeries>,
) -> TensorSeries {
    let key = Word::from_slice(w);
    if let Some(t) = memo.get(&key) {
        return t.clone();
    }
    let (last, prefix) = w.split_last().expect("empty word is memoised");
    let head = prefix_image(prefix, images, memo);
    let t = if head.is_zero() {
        head
    } else {
        &head * &images[*last as usize]
    };
    memo.insert(key, t.clone());
    t
}

fn weight_buckets(t: &TensorSeries) -> Vec<Vec<(&Word, &Rational)>> {
    let mut buckets: Vec<Vec<(&Word, &Rational)>> = vec![Vec::new(); t.cut as usize + 1];
    for (w, c) in &t.terms {
        buckets[t.weight_of(w) as usize].push((w, c));
    }
    buckets
}

impl Add for &TensorSeries {
    type Output = TensorSeries;

    fn add(self, rhs: &TensorSeries) -> TensorSeries {
        self.try_add(rhs).expect("tensor addition")
    }
}

impl Sub for &TensorSeries {
    type Output = TensorSeries;

    fn sub(self, rhs: &TensorSeries) -> TensorSeries {
        self.try_sub(rhs).expect("tensor subtraction")
    }
}

impl Mul for &TensorSeries {
    type Output = TensorSeries;

    fn mul(self, rhs: &TensorSeries) -> TensorSeries {
        self.try_mul(rhs).expect("tensor product")
    }
}

impl Neg for &TensorSeries {
    type Output = TensorSeries;

    fn neg(self) -> TensorSeries {
        TensorSeries {
            alphabet: self.alphabet,
            cut: self.cut,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}
