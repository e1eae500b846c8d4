//! The group-like expansion `θ^exp` of the fundamental group: `α_i ↦ e^{x_i}`,
//! `β_i ↦ e^{y_i}`, `γ_j ↦ e^{z_j}`.

use std::fmt;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{AlgebraError, Result};
use crate::lie::LieSeries;
use crate::tensor::TensorSeries;

/// A free generator of `π_1` or its inverse, written `a1`, `b1`, `c1` (`a1^-1` for inverses).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopLetter {
    /// The generator `x_i`, `y_i` or `z_j` it expands to.
    pub generator: Letter,
    pub inverse: bool,
}

impl LoopLetter {
    pub fn parse(alphabet: Alphabet, token: &str) -> Result<Self> {
        let bad = || AlgebraError::Parse(format!("unknown loop letter `{token}`"));
        let (base, inverse) = match token.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let head = base.get(..1).ok_or_else(bad)?;
        let generator_head = match head {
            "a" => "x",
            "b" => "y",
            "c" => "z",
            _ => return Err(bad()),
        };
        let generator = alphabet
            .parse_letter(&format!("{generator_head}{}", &base[1..]))
            .map_err(|_| bad())?;
        Ok(LoopLetter { generator, inverse })
    }

    pub fn display(&self, alphabet: Alphabet) -> impl fmt::Display {
        let name = alphabet.name(self.generator);
        let head = match &name[..1] {
            "x" => "a",
            "y" => "b",
            _ => "c",
        };
        format!(
            "{head}{}{}",
            &name[1..],
            if self.inverse { "^-1" } else { "" }
        )
    }
}

/// Parse a whitespace-separated loop word.
pub fn parse_loop_word(alphabet: Alphabet, s: &str) -> Result<Vec<LoopLetter>> {
    s.split_whitespace()
        .map(|t| LoopLetter::parse(alphabet, t))
        .collect()
}

/// `Π_i [α_i, β_i] Π_j γ_j` with `[α, β] = α β α^{-1} β^{-1}`.
pub fn boundary_word(alphabet: Alphabet) -> Vec<LoopLetter> {
    let mut w = Vec::new();
    let step = |generator, inverse| LoopLetter { generator, inverse };
    for i in 0..alphabet.genus() {
        let (x, y) = (alphabet.x(i), alphabet.y(i));
        w.extend([step(x, false), step(y, false), step(x, true), step(y, true)]);
    }
    w.extend((0..alphabet.boundary()).map(|j| step(alphabet.z(j), false)));
    w
}

/// `θ^exp` of a loop word, through `cut`.
pub fn theta_exp(alphabet: Alphabet, cut: u32, word: &[LoopLetter]) -> TensorSeries {
    word.iter()
        .fold(TensorSeries::one(alphabet, cut), |acc, l| {
            let g = LieSeries::generator(alphabet, cut, l.generator);
            let g = if l.inverse { -&g } else { g };
            &acc * &g.exp()
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_letters_and_cancellation() {
        let a = Alphabet::new(1, 1);
        let alpha = parse_loop_word(a, "a1").unwrap();
        assert_eq!(
            theta_exp(a, 5, &alpha),
            LieSeries::generator(a, 5, a.x(0)).exp()
        );
        let w = parse_loop_word(a, "a1 a1^-1").unwrap();
        assert_eq!(theta_exp(a, 5, &w), TensorSeries::one(a, 5));
        assert!(parse_loop_word(a, "a2").is_err());
        assert!(parse_loop_word(a, "d1").is_err());
        assert!(parse_loop_word(a, "c2").is_err());
    }

    #[test]
    fn boundary_word_text() {
        let a = Alphabet::new(1, 2);
        let text: Vec<String> = boundary_word(a)
            .iter()
            .map(|l| l.display(a).to_string())
            .collect();
        assert_eq!(text.join(" "), "a1 b1 a1^-1 b1^-1 c1 c2");
        assert_eq!(
            parse_loop_word(a, &text.join(" ")).unwrap(),
            boundary_word(a)
        );
    }

    #[test]
    fn boundary_relation_matches_xi() {
        for (g, n) in [(1, 0), (0, 2), (1, 1), (2, 0)] {
            let a = Alphabet::new(g, n);
            let log = LieSeries::log(&theta_exp(a, 6, &boundary_word(a))).unwrap();
            assert_eq!(log, crate::kv::xi_element(a, 6), "({g},{n})");
        }
    }
}
