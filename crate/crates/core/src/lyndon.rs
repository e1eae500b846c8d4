//! Lyndon words, their standard factorisation and the bracketed basis of the free Lie algebra.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use crate::alphabet::{Alphabet, Letter, Word};
use crate::tensor::accumulate;

/// `w` is Lyndon iff it is strictly smaller than each of its proper suffixes.
pub fn is_lyndon(w: &[Letter]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Standard factorisation `w = u v` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[Letter]) -> Option<(&[Letter], &[Letter])> {
    if w.len() < 2 {
        return None;
    }
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .map(|i| (&w[..i], &w[i..]))
}

/// All Lyndon words over `k` letters of length at most `max_len`, in lexicographic order
/// (Duval's generation algorithm).
pub fn lyndon_words(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if k == 0 || max_len == 0 {
        return out;
    }
    let top = (k - 1) as Letter;
    let mut w: Vec<Letter> = vec![0];
    while !w.is_empty() {
        out.push(Word::from_slice(&w));
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

type BasisCache = Mutex<HashMap<(Alphabet, u32), Arc<Vec<Word>>>>;

static BASIS: LazyLock<BasisCache> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// Lyndon words of weight exactly `weight`, ordered by (length, lex).
pub fn lyndon_basis(alphabet: Alphabet, weight: u32) -> Arc<Vec<Word>> {
    if let Some(b) = BASIS.lock().unwrap().get(&(alphabet, weight)) {
        return b.clone();
    }
    let mut words: Vec<Word> = lyndon_words(alphabet.len(), weight as usize)
        .into_iter()
        .filter(|w| alphabet.word_weight(w) == weight)
        .collect();
    words.sort();
    let words = Arc::new(words);
    BASIS
        .lock()
        .unwrap()
        .insert((alphabet, weight), words.clone());
    words
}

/// Dimension of the weight-`weight` part of the free Lie algebra.
pub fn lie_dimension(alphabet: Alphabet, weight: u32) -> usize {
    lyndon_basis(alphabet, weight).len()
}

pub type Expansion = Arc<Vec<(Word, i64)>>;

static EXPANSIONS: LazyLock<Mutex<HashMap<Word, Expansion>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Expansion of the standard bracketing `P_w` as an integer combination of words.
///
/// `P_w` equals `w` plus words that are lexicographically larger and have the same letters.
pub fn expansion(w: &[Letter]) -> Expansion {
    let key = Word::from_slice(w);
    if let Some(e) = EXPANSIONS.lock().unwrap().get(&key) {
        return e.clone();
    }
    let e = match standard_factorization(w) {
        None => Arc::new(vec![(key.clone(), 1)]),
        Some((u, v)) => {
            let (pu, pv) = (expansion(u), expansion(v));
            let mut acc: HashMap<Word, i64> = HashMap::new();
            for (a, ca) in pu.iter() {
                for (b, cb) in pv.iter() {
                    *acc.entry(a.concat(b)).or_insert(0) += ca * cb;
                    *acc.entry(b.concat(a)).or_insert(0) -= ca * cb;
                }
            }
            let mut terms: Vec<(Word, i64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
            terms.sort();
            Arc::new(terms)
        }
    };
    EXPANSIONS.lock().unwrap().insert(key, e.clone());
    e
}

/// Rational expansion helper for callers that accumulate into rational maps.
pub(crate) fn add_expansion(
    acc: &mut HashMap<Word, crate::rational::Rational>,
    w: &[Letter],
    c: &crate::rational::Rational,
) {
    for (v, k) in expansion(w).iter() {
        accumulate(acc, v.clone(), c * crate::rational::int(*k));
    }
}
