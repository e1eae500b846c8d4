//! Weighted generator systems and words over them.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::AlgebraError;

/// Index of a generator inside an [`Alphabet`].
pub type Letter = u8;

/// The generator system `x_1..x_g, y_1..y_g, z_1..z_n`.
///
/// Letters are numbered in the fixed order `x_1 < … < x_g < y_1 < … < y_g < z_1 < … < z_n`.
/// The `x` and `y` letters have weight 1 and the `z` letters weight 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    g: usize,
    n: usize,
}

impl Alphabet {
    pub fn new(g: usize, n: usize) -> Self {
        assert!(2 * g + n <= Letter::MAX as usize, "alphabet too large");
        Alphabet { g, n }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// Number of `z` generators (boundary components minus one).
    pub fn boundary(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        2 * self.g + self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.len() as Letter
    }

    pub fn x(&self, i: usize) -> Letter {
        assert!(i < self.g);
        i as Letter
    }

    pub fn y(&self, i: usize) -> Letter {
        assert!(i < self.g);
        (self.g + i) as Letter
    }

    pub fn z(&self, j: usize) -> Letter {
        assert!(j < self.n);
        (2 * self.g + j) as Letter
    }

    pub fn is_z(&self, letter: Letter) -> bool {
        letter as usize >= 2 * self.g
    }

    /// Position `j` of a `z` letter, if it is one.
    pub fn z_index(&self, letter: Letter) -> Option<usize> {
        let l = letter as usize;
        (l >= 2 * self.g && l < self.len()).then(|| l - 2 * self.g)
    }

    pub fn weight(&self, letter: Letter) -> u32 {
        if self.is_z(letter) {
            2
        } else {
            1
        }
    }

    pub fn word_weight(&self, word: &[Letter]) -> u32 {
        word.iter().map(|&l| self.weight(l)).sum()
    }

    pub fn name(&self, letter: Letter) -> String {
        let l = letter as usize;
        if l < self.g {
            format!("x{}", l + 1)
        } else if l < 2 * self.g {
            format!("y{}", l - self.g + 1)
        } else {
            format!("z{}", l - 2 * self.g + 1)
        }
    }

    pub fn parse_letter(&self, name: &str) -> Result<Letter, AlgebraError> {
        let bad = || AlgebraError::Parse(format!("unknown generator `{name}`"));
        let (head, idx) = name.split_at(1.min(name.len()));
        let idx: usize = idx.parse().map_err(|_| bad())?;
        if idx == 0 {
            return Err(bad());
        }
        let i = idx - 1;
        match head {
            "x" if i < self.g => Ok(self.x(i)),
            "y" if i < self.g => Ok(self.y(i)),
            "z" if i < self.n => Ok(self.z(i)),
            _ => Err(bad()),
        }
    }

    /// Space separated generator names.
    pub fn format_word(&self, word: &Word) -> String {
        word.iter()
            .map(|&l| self.name(l))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, AlgebraError> {
        text.split_whitespace()
            .map(|t| self.parse_letter(t))
            .collect::<Result<Word, _>>()
    }

    /// Label `(g, n+1)` used when talking about the surface.
    pub fn surface_label(&self) -> String {
        format!("({},{})", self.g, self.n + 1)
    }
}

/// A finite sequence of letters.
///
/// Words are ordered first by length, then lexicographically. Within one length
/// this is the usual lexicographic order used for Lyndon words.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(SmallVec<[Letter; 16]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn letter(l: Letter) -> Self {
        let mut v = SmallVec::new();
        v.push(l);
        Word(v)
    }

    pub fn from_slice(letters: &[Letter]) -> Self {
        Word(SmallVec::from_slice(letters))
    }

    pub fn concat(&self, other: &[Letter]) -> Self {
        let mut v = SmallVec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn concat3(a: &[Letter], b: &[Letter], c: &[Letter]) -> Self {
        let mut v = SmallVec::with_capacity(a.len() + b.len() + c.len());
        v.extend_from_slice(a);
        v.extend_from_slice(b);
        v.extend_from_slice(c);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn rotate(&self, k: usize) -> Self {
        let n = self.0.len();
        if n == 0 {
            return self.clone();
        }
        let k = k % n;
        Word::concat3(&self.0[k..], &self.0[..k], &[])
    }
}

impl std::ops::Deref for Word {
    type Target = [Letter];

    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_layout_and_weights() {
        let a = Alphabet::new(2, 1);
        assert_eq!(a.len(), 5);
        assert_eq!(a.x(1), 1);
        assert_eq!(a.y(0), 2);
        assert_eq!(a.z(0), 4);
        assert_eq!(a.weight(a.x(0)), 1);
        assert_eq!(a.weight(a.y(1)), 1);
        assert_eq!(a.weight(a.z(0)), 2);
        assert_eq!(a.word_weight(&[0, 4, 4]), 5);
    }

    #[test]
    fn names_roundtrip() {
        let a = Alphabet::new(2, 3);
        for l in a.letters() {
            assert_eq!(a.parse_letter(&a.name(l)).unwrap(), l);
        }
        assert!(a.parse_letter("x3").is_err());
        assert!(a.parse_letter("z0").is_err());
        assert!(a.parse_letter("w1").is_err());
        let w = a.parse_word("x1 z3 y2").unwrap();
        assert_eq!(a.format_word(&w), "x1 z3 y2");
    }

    #[test]
    fn word_order_is_length_then_lex() {
        let short = Word::from_slice(&[3]);
        let long = Word::from_slice(&[0, 0]);
        assert!(short < long);
        assert!(Word::from_slice(&[0, 1]) < Word::from_slice(&[1, 0]));
        assert_eq!(
            Word::from_slice(&[0, 1, 2]).rotate(1),
            Word::from_slice(&[1, 2, 0])
        );
    }
}
