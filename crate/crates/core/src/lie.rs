//! Truncated elements of the completed free Lie algebra on the Lyndon basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_traits::Zero;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::error::{AlgebraError, Result};
use crate::lyndon::{self, is_lyndon};
use crate::rational::{self, Rational};
use crate::tensor::{accumulate, into_sorted, TensorSeries};

/// `Σ c_w P_w` where `P_w` is the standard bracketing of the Lyndon word `w`.
#[derive(Clone)]
pub struct LieSeries {
    alphabet: Alphabet,
    cut: u32,
    coeffs: BTreeMap<Word, Rational>,
    tensor: OnceLock<TensorSeries>,
}

impl PartialEq for LieSeries {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.cut == other.cut && self.coeffs == other.coeffs
    }
}

impl Eq for LieSeries {}

impl fmt::Debug for LieSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieSeries(cut {}; ", self.cut)?;
        let mut first = true;
        for (w, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}·[{}]", c, self.alphabet.format_word(w))?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl LieSeries {
    fn build(alphabet: Alphabet, cut: u32, coeffs: BTreeMap<Word, Rational>) -> Self {
        LieSeries {
            alphabet,
            cut,
            coeffs,
            tensor: OnceLock::new(),
        }
    }

    pub fn zero(alphabet: Alphabet, cut: u32) -> Self {
        Self::build(alphabet, cut, BTreeMap::new())
    }

    pub fn generator(alphabet: Alphabet, cut: u32, l: Letter) -> Self {
        Self::from_coeffs(alphabet, cut, [(Word::letter(l), rational::one())])
            .expect("single letters are Lyndon")
    }

    /// Build from Lyndon-keyed coefficients. Keys heavier than the cut are dropped.
    pub fn from_coeffs<I>(alphabet: Alphabet, cut: u32, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, Rational)>,
    {
        let mut map: BTreeMap<Word, Rational> = BTreeMap::new();
        for (w, c) in coeffs {
            if !is_lyndon(&w) || w.iter().any(|&l| l as usize >= alphabet.len()) {
                return Err(AlgebraError::NotLie(alphabet.format_word(&w)));
            }
            if alphabet.word_weight(&w) > cut {
                continue;
            }
            *map.entry(w).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self::build(alphabet, cut, map))
    }

    /// Lyndon coordinates of a Lie element given in the tensor algebra.
    ///
    /// Uses that `P_w` is `w` plus larger words: the smallest surviving word of a Lie
    /// element is always Lyndon. Fails if the input is not a Lie element.
    pub fn from_tensor(t: &TensorSeries) -> Result<Self> {
        let alphabet = t.alphabet();
        if !t.constant_term().is_zero() {
            return Err(AlgebraError::NotLie("(empty word)".into()));
        }
        let mut rem: BTreeMap<Word, Rational> = t.terms().clone();
        let mut coeffs = BTreeMap::new();
        while let Some((w, c)) = rem.pop_first() {
            if !is_lyndon(&w) {
                return Err(AlgebraError::NotLie(alphabet.format_word(&w)));
            }
            for (v, k) in lyndon::expansion(&w).iter() {
                if *v == w {
                    continue;
                }
                let entry = rem.entry(v.clone()).or_insert_with(Rational::zero);
                *entry -= &c * rational::int(*k);
                if entry.is_zero() {
                    rem.remove(v);
                }
            }
            coeffs.insert(w, c);
        }
        let out = Self::build(alphabet, t.cut(), coeffs);
        let _ = out.tensor.set(t.clone());
        Ok(out)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, key: &[Letter]) -> Rational {
        self.coeffs
            .get(&Word::from_slice(key))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn weight_of(&self, w: &Word) -> u32 {
        self.alphabet.word_weight(w)
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.coeffs.keys().map(|w| self.weight_of(w)).min()
    }

    pub fn weight_component(&self, m: u32) -> Self {
        self.filtered(|w| w == m, self.cut)
    }

    /// Components of weight strictly above `m`.
    pub fn above_weight(&self, m: u32) -> Self {
        self.filtered(|w| w > m, self.cut)
    }

    pub fn truncated(&self, cut: u32) -> Self {
        self.filtered(|w| w <= cut, cut)
    }

    fn filtered(&self, keep: impl Fn(u32) -> bool, cut: u32) -> Self {
        Self::build(
            self.alphabet,
            cut,
            self.coeffs
                .iter()
                .filter(|(w, _)| keep(self.weight_of(w)))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        )
    }

    /// Embedding into the tensor algebra (cached).
    pub fn to_tensor(&self) -> &TensorSeries {
        self.tensor.get_or_init(|| {
            let mut acc = HashMap::new();
            for (w, c) in &self.coeffs {
                lyndon::add_expansion(&mut acc, w, c);
            }
            TensorSeries::from_terms(self.alphabet, self.cut, into_sorted(acc))
        })
    }

    pub fn check_context(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet || self.cut != other.cut {
            return Err(AlgebraError::ContextMismatch(format!(
                "Lie series over {:?} cut {} vs {:?} cut {}",
                self.alphabet, self.cut, other.alphabet, other.cut
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.alphabet, self.cut);
        }
        Self::build(
            self.alphabet,
            self.cut,
            self.coeffs
                .iter()
                .map(|(w, v)| (w.clone(), v * c))
                .collect(),
        )
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let mut coeffs = self.coeffs.clone();
        for (w, c) in &other.coeffs {
            let e = coeffs.entry(w.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                coeffs.remove(w);
            }
        }
        Ok(Self::build(self.alphabet, self.cut, coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// `[a, b] = ab - ba`, re-expressed on the Lyndon basis.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let t = self.to_tensor().commutator(other.to_tensor())?;
        Self::from_tensor(&t)
    }

    /// `exp(a)` in the tensor algebra.
    pub fn exp(&self) -> TensorSeries {
        self.to_tensor()
            .exp()
            .expect("Lie series have no constant term")
    }

    /// Logarithm of a group-like series. Fails if the constant term is not 1 or the
    /// logarithm is not a Lie element.
    pub fn log(a: &TensorSeries) -> Result<Self> {
        Self::from_tensor(&a.log()?)
    }

    /// `log(exp(a) exp(b))`, by the bracket recursion
    /// `(n+1) Z_{n+1} = ½[a - b, Z_n] + Σ_p b_{2p} Σ_{k_1+…+k_{2p}=n} [Z_{k_1}, […, [Z_{k_{2p}}, a + b]]]`
    /// with `Z_1 = a + b` and `b_k` the coefficients of `s / (e^s - 1)`.
    ///
    /// `Z_n` is homogeneous of degree `n` in `(a, b)`, hence of weight at least `n`.
    pub fn bch(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let cut = self.cut as usize;
        let zero = Self::zero(self.alphabet, self.cut);
        let b = rational::bernoulli_series(cut);
        let sum = self + other;
        let half_diff = (self - other).scale(&rational::q(1, 2));
        // nested[j][m] = Σ_{k_1+…+k_j=m} [Z_{k_1}, […, [Z_{k_j}, a + b]]]
        let mut nested: Vec<Vec<Self>> = vec![vec![sum.clone()]];
        let mut z = vec![zero.clone(), sum.clone()];
        let mut acc = sum;
        for n in 1..cut {
            for j in 1..=n {
                if nested.len() <= j {
                    nested.push(vec![zero.clone(); j]);
                }
                let mut entry = zero.clone();
                for k in 1..=n + 1 - j {
                    let inner = &nested[j - 1][n - k];
                    if !inner.is_zero() && !z[k].is_zero() {
                        entry = &entry + &z[k].bracket(inner)?;
                    }
                }
                nested[j].push(entry);
            }
            nested[0].push(zero.clone());
            let mut next = half_diff.bracket(&z[n])?;
            for p in (2..=n).step_by(2) {
                if !b[p].is_zero() {
                    next = &next + &nested[p][n].scale(&b[p]);
                }
            }
            let next = next.scale(&rational::q(1, n as i64 + 1));
            acc = &acc + &next;
            z.push(next);
        }
        Ok(acc)
    }

    /// `bch` folded over a list, left to right.
    pub fn bch_all(items: &[LieSeries], alphabet: Alphabet, cut: u32) -> Result<Self> {
        let mut acc = TensorSeries::one(alphabet, cut);
        for it in items {
            acc = acc.try_mul(&it.exp())?;
        }
        Self::log(&acc)
    }

    /// `e^{ad a}(b) = Σ ad_a^k(b) / k!`.
    pub fn exp_ad(&self, b: &Self) -> Result<Self> {
        let mut acc = b.clone();
        let mut term = b.clone();
        let mut k = 0u32;
        loop {
            k += 1;
            term = self.bracket(&term)?;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term.scale(&rational::inv_factorial(k));
        }
        Ok(acc)
    }

    /// Image under the Lie morphism sending generator `l` to `images[l]`.
    pub fn substitute(&self, images: &[LieSeries]) -> Result<Self> {
        if images.len() != self.alphabet.len() {
            return Err(AlgebraError::InvalidParameters(format!(
                "substitution needs {} images, got {}",
                self.alphabet.len(),
                images.len()
            )));
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        let tensors: Vec<TensorSeries> = images.iter().map(|i| i.to_tensor().clone()).collect();
        let out = self.to_tensor().substitute(&tensors)?;
        let mut lie = Self::from_tensor(&out)?;
        lie.cut = first.cut;
        Ok(lie)
    }

    /// Image under an injective letter map into another alphabet.
    pub fn relabel(&self, target: Alphabet, map: &[Letter], cut: u32) -> Result<Self> {
        let t = self.to_tensor().relabel(target, map, cut);
        Self::from_tensor(&t)
    }

    /// The unique `X` with `[letter, X] = r` and zero coefficient on `letter` itself.
    ///
    /// Computed in closed form on words: writing `r = zX - Xz`, the coefficient of `X`
    /// at `w` is a sum of coefficients of `r` along the chain `w → z·w[..len-1]` while
    /// the current word ends in `z`.
    pub fn ad_inverse(letter: Letter, r: &LieSeries) -> Result<Self> {
        let alphabet = r.alphabet;
        let t = r.to_tensor();
        let mut candidates: Vec<Word> = Vec::new();
        for w in t.terms().keys() {
            if w.first() != Some(&letter) {
                continue;
            }
            let rest = &w[1..];
            let lead = rest.iter().take_while(|&&l| l == letter).count();
            for i in 0..=lead {
                let mut cand = Word::from_slice(&rest[i..]);
                for _ in 0..i {
                    cand.push(letter);
                }
                candidates.push(cand);
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut acc = HashMap::new();
        for w in candidates {
            if w.is_empty() || w.iter().all(|&l| l == letter) {
                continue;
            }
            let mut value = Rational::zero();
            let mut cur = w.clone();
            loop {
                value += t.coeff(&Word::concat3(&[letter], &cur, &[]));
                if cur.last() == Some(&letter) {
                    cur = Word::concat3(&[letter], &cur[..cur.len() - 1], &[]);
                } else {
                    break;
                }
            }
            accumulate(&mut acc, w, value);
        }
        let x = TensorSeries::from_terms(alphabet, r.cut, into_sorted(acc));
        let name = alphabet.name(letter);
        let min_w = r.min_weight().unwrap_or(0);
        let x =
            Self::from_tensor(&x).map_err(|_| AlgebraError::NotInAdImage(name.clone(), min_w))?;
        let check = Self::generator(alphabet, r.cut, letter).bracket(&x)?;
        if check != r.truncated(r.cut) {
            let bad = (&check - r).min_weight().unwrap_or(0);
            return Err(AlgebraError::NotInAdImage(name, bad));
        }
        Ok(x)
    }

    /// Dynkin projector: each word `a_1…a_d` goes to `[…[[a_1,a_2],a_3]…,a_d] / d`.
    /// Fixes every Lie element.
    pub fn dynkin_project(t: &TensorSeries) -> Result<Self> {
        if !t.constant_term().is_zero() {
            return Err(AlgebraError::ConstantTerm(
                t.constant_term().to_string(),
                "0".into(),
            ));
        }
        let alphabet = t.alphabet();
        let mut acc = HashMap::new();
        for (w, c) in t.terms() {
            let d = w.len() as i64;
            let mut nested: Vec<(Word, Rational)> = vec![(Word::letter(w[0]), rational::one())];
            for &l in &w[1..] {
                let mut next = Vec::with_capacity(nested.len() * 2);
                for (v, k) in &nested {
                    next.push((v.concat(&[l]), k.clone()));
                    next.push((Word::concat3(&[l], v, &[]), -k.clone()));
                }
                nested = next;
            }
            let scale = c * rational::q(1, d);
            for (v, k) in nested {
                accumulate(&mut acc, v, &scale * k);
            }
        }
        Self::from_tensor(&TensorSeries::from_terms(
            alphabet,
            t.cut(),
            into_sorted(acc),
        ))
    }
}

impl Add for &LieSeries {
    type Output = LieSeries;

    fn add(self, rhs: &LieSeries) -> LieSeries {
        self.try_add(rhs).expect("Lie addition")
    }
}

impl Sub for &LieSeries {
    type Output = LieSeries;

    fn sub(self, rhs: &LieSeries) -> LieSeries {
        self.try_sub(rhs).expect("Lie subtraction")
    }
}

impl Neg for &LieSeries {
    type Output = LieSeries;

    fn neg(self) -> LieSeries {
        LieSeries::build(
            self.alphabet,
            self.cut,
            self.coeffs.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        )
    }
}
