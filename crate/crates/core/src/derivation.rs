//! Positive-degree derivations of the free Lie algebra and tangential derivations.

use std::collections::HashMap;

use num_traits::Zero;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::cyclic::CyclicSeries;
use crate::error::{AlgebraError, Result};
use crate::lie::LieSeries;
use crate::linalg::{AffineSolution, AffineSystem, PivotOrder};
use crate::lyndon::lyndon_basis;
use crate::rational::{self, Rational};
use crate::tensor::{accumulate, into_sorted, TensorSeries};

/// A derivation given by the images of the generators.
///
/// Every image raises weight by at least one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    alphabet: Alphabet,
    cut: u32,
    images: Vec<LieSeries>,
}

impl Derivation {
    pub fn new(alphabet: Alphabet, cut: u32, images: Vec<LieSeries>) -> Result<Self> {
        if images.len() != alphabet.len() {
            return Err(AlgebraError::InvalidParameters(format!(
                "derivation needs {} images, got {}",
                alphabet.len(),
                images.len()
            )));
        }
        for (l, img) in alphabet.letters().zip(&images) {
            if img.alphabet() != alphabet || img.cut() != cut {
                return Err(AlgebraError::ContextMismatch(format!(
                    "image of {} has the wrong context",
                    alphabet.name(l)
                )));
            }
            if img.min_weight().is_some_and(|m| m <= alphabet.weight(l)) {
                return Err(AlgebraError::Positivity(format!(
                    "image of {} has a component of weight {}",
                    alphabet.name(l),
                    img.min_weight().unwrap()
                )));
            }
        }
        Ok(Derivation {
            alphabet,
            cut,
            images,
        })
    }

    pub fn zero(alphabet: Alphabet, cut: u32) -> Self {
        Derivation {
            alphabet,
            cut,
            images: alphabet
                .letters()
                .map(|_| LieSeries::zero(alphabet, cut))
                .collect(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    pub fn images(&self) -> &[LieSeries] {
        &self.images
    }

    pub fn image(&self, l: Letter) -> &LieSeries {
        &self.images[l as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(LieSeries::is_zero)
    }

    fn check_alphabet(&self, alphabet: Alphabet, cut: u32) -> Result<()> {
        if alphabet != self.alphabet || cut > self.cut {
            return Err(AlgebraError::ContextMismatch(format!(
                "derivation over {:?} cut {} applied to series over {:?} cut {}",
                self.alphabet, self.cut, alphabet, cut
            )));
        }
        Ok(())
    }

    /// Leibniz rule on words, keeping words of weight at most `cut`.
    fn apply_words<'a>(
        &self,
        cut: u32,
        terms: impl Iterator<Item = (&'a Word, &'a Rational)>,
    ) -> HashMap<Word, Rational> {
        let alphabet = self.alphabet;
        let mut acc = HashMap::new();
        for (w, c) in terms {
            let weight = alphabet.word_weight(w);
            for (i, &l) in w.iter().enumerate() {
                let rest = weight - alphabet.weight(l);
                for (v, d) in self.images[l as usize].to_tensor().terms() {
                    if rest + alphabet.word_weight(v) > cut {
                        continue;
                    }
                    accumulate(&mut acc, Word::concat3(&w[..i], v, &w[i + 1..]), c * d);
                }
            }
        }
        acc
    }

    pub fn apply_tensor(&self, t: &TensorSeries) -> Result<TensorSeries> {
        self.check_alphabet(t.alphabet(), t.cut())?;
        let acc = self.apply_words(t.cut(), t.terms().iter());
        Ok(TensorSeries::from_terms(
            t.alphabet(),
            t.cut(),
            into_sorted(acc),
        ))
    }

    pub fn apply_lie(&self, a: &LieSeries) -> Result<LieSeries> {
        LieSeries::from_tensor(&self.apply_tensor(a.to_tensor())?)
    }

    /// Action on `tr`, computed on representatives and projected back.
    pub fn apply_cyclic(&self, c: &CyclicSeries) -> Result<CyclicSeries> {
        self.check_alphabet(c.alphabet(), c.cut())?;
        let reps: Vec<(&Word, &Rational)> = c
            .terms()
            .iter()
            .map(|(w, v)| (w.representative(), v))
            .collect();
        let acc = self.apply_words(c.cut(), reps.into_iter());
        Ok(CyclicSeries::from_terms(c.alphabet(), c.cut(), acc))
    }

    fn combine(&self, other: &Self, f: impl Fn(&LieSeries, &LieSeries) -> LieSeries) -> Self {
        Derivation {
            alphabet: self.alphabet,
            cut: self.cut,
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

/// A derivation `u` with `u(z_j) = [z_j, u_j]` for every `z` generator.
///
/// The tangential data `u_j` never contains the one-letter word `z_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentialDerivation {
    derivation: Derivation,
    tangential: Vec<LieSeries>,
}

/// Drop the `z_j` coefficient of tangential data of a derivation.
pub(crate) fn normalize_data(alphabet: Alphabet, j: usize, u: &LieSeries) -> LieSeries {
    let z = alphabet.z(j);
    let c = u.coeff(&[z]);
    if c.is_zero() {
        return u.clone();
    }
    u - &LieSeries::generator(alphabet, u.cut(), z).scale(&c)
}

impl TangentialDerivation {
    /// Validate images against the tangential data; the data are normalised first.
    pub fn new(
        alphabet: Alphabet,
        cut: u32,
        images: Vec<LieSeries>,
        tangential: Vec<LieSeries>,
    ) -> Result<Self> {
        let derivation = Derivation::new(alphabet, cut, images)?;
        let tangential = Self::check_data(alphabet, cut, tangential)?;
        for (j, u) in tangential.iter().enumerate() {
            let z = LieSeries::generator(alphabet, cut, alphabet.z(j));
            let expected = z.bracket(u)?;
            if &expected != derivation.image(alphabet.z(j)) {
                let bad = (&expected - derivation.image(alphabet.z(j)))
                    .min_weight()
                    .unwrap_or(0);
                return Err(AlgebraError::NotTangential(
                    j + 1,
                    format!("image differs from [z, u_j] at weight {bad}"),
                ));
            }
        }
        Ok(TangentialDerivation {
            derivation,
            tangential,
        })
    }

    /// Build from the images of the `x`, `y` generators and the tangential data; the `z`
    /// images are `[z_j, u_j]`.
    pub fn from_parts(
        alphabet: Alphabet,
        cut: u32,
        xy_images: Vec<LieSeries>,
        tangential: Vec<LieSeries>,
    ) -> Result<Self> {
        if xy_images.len() != 2 * alphabet.genus() {
            return Err(AlgebraError::InvalidParameters(format!(
                "expected {} x/y images, got {}",
                2 * alphabet.genus(),
                xy_images.len()
            )));
        }
        let tangential = Self::check_data(alphabet, cut, tangential)?;
        let mut images = xy_images;
        for (j, u) in tangential.iter().enumerate() {
            let z = LieSeries::generator(alphabet, cut, alphabet.z(j));
            images.push(z.bracket(u)?);
        }
        Ok(TangentialDerivation {
            derivation: Derivation::new(alphabet, cut, images)?,
            tangential,
        })
    }

    fn check_data(alphabet: Alphabet, cut: u32, data: Vec<LieSeries>) -> Result<Vec<LieSeries>> {
        if data.len() != alphabet.boundary() {
            return Err(AlgebraError::InvalidParameters(format!(
                "expected {} tangential components, got {}",
                alphabet.boundary(),
                data.len()
            )));
        }
        data.into_iter()
            .enumerate()
            .map(|(j, u)| {
                if u.alphabet() != alphabet || u.cut() != cut {
                    return Err(AlgebraError::ContextMismatch(format!(
                        "tangential component {} has the wrong context",
                        j + 1
                    )));
                }
                Ok(normalize_data(alphabet, j, &u))
            })
            .collect()
    }

    pub fn zero(alphabet: Alphabet, cut: u32) -> Self {
        TangentialDerivation {
            derivation: Derivation::zero(alphabet, cut),
            tangential: (0..alphabet.boundary())
                .map(|_| LieSeries::zero(alphabet, cut))
                .collect(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.derivation.alphabet
    }

    pub fn cut(&self) -> u32 {
        self.derivation.cut
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn images(&self) -> &[LieSeries] {
        &self.derivation.images
    }

    pub fn image(&self, l: Letter) -> &LieSeries {
        self.derivation.image(l)
    }

    pub fn tangential(&self) -> &[LieSeries] {
        &self.tangential
    }

    /// Images of the `x` and `y` generators.
    pub fn xy_images(&self) -> &[LieSeries] {
        &self.derivation.images[..2 * self.alphabet().genus()]
    }

    pub fn is_zero(&self) -> bool {
        self.derivation.is_zero() && self.tangential.iter().all(LieSeries::is_zero)
    }

    pub fn apply_tensor(&self, t: &TensorSeries) -> Result<TensorSeries> {
        self.derivation.apply_tensor(t)
    }

    pub fn apply_lie(&self, a: &LieSeries) -> Result<LieSeries> {
        self.derivation.apply_lie(a)
    }

    pub fn apply_cyclic(&self, c: &CyclicSeries) -> Result<CyclicSeries> {
        self.derivation.apply_cyclic(c)
    }

    pub fn check_context(&self, other: &Self) -> Result<()> {
        if self.alphabet() != other.alphabet() || self.cut() != other.cut() {
            return Err(AlgebraError::ContextMismatch(format!(
                "derivations over {:?} cut {} and {:?} cut {}",
                self.alphabet(),
                self.cut(),
                other.alphabet(),
                other.cut()
            )));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, f: impl Fn(&LieSeries, &LieSeries) -> LieSeries) -> Self {
        TangentialDerivation {
            derivation: self.derivation.combine(&other.derivation, &f),
            tangential: self
                .tangential
                .iter()
                .zip(&other.tangential)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Ok(self.combine(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Ok(self.combine(other, |a, b| a - b))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.combine(self, |a, _| a.scale(c))
    }

    /// Components of degree exactly `m`: generator images raised by `m` and tangential
    /// data of weight `m`.
    pub fn degree_component(&self, m: u32) -> Self {
        let a = self.alphabet();
        TangentialDerivation {
            derivation: Derivation {
                alphabet: a,
                cut: self.cut(),
                images: a
                    .letters()
                    .map(|l| self.image(l).weight_component(a.weight(l) + m))
                    .collect(),
            },
            tangential: self
                .tangential
                .iter()
                .map(|u| u.weight_component(m))
                .collect(),
        }
    }

    /// Same derivation read at a smaller cut.
    pub fn truncated(&self, cut: u32) -> Self {
        TangentialDerivation {
            derivation: Derivation {
                alphabet: self.alphabet(),
                cut,
                images: self.images().iter().map(|i| i.truncated(cut)).collect(),
            },
            tangential: self.tangential.iter().map(|u| u.truncated(cut)).collect(),
        }
    }

    /// Commutator `u∘v - v∘u`, with tangential data `u(v_j) - v(u_j) + [u_j, v_j]`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let a = self.alphabet();
        let images = a
            .letters()
            .map(|l| {
                let uv = self.apply_lie(other.image(l))?;
                let vu = other.apply_lie(self.image(l))?;
                uv.try_sub(&vu)
            })
            .collect::<Result<Vec<_>>>()?;
        let tangential = self
            .tangential
            .iter()
            .zip(&other.tangential)
            .map(|(uj, vj)| {
                let s = self.apply_lie(vj)?.try_sub(&other.apply_lie(uj)?)?;
                s.try_add(&uj.bracket(vj)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let tangential = Self::check_data(a, self.cut(), tangential)?;
        Ok(TangentialDerivation {
            derivation: Derivation::new(a, self.cut(), images)?,
            tangential,
        })
    }
}

/// The derivation `t` of the two-`z` alphabet: `z_1 ↦ [z_1, z_2]`, `z_2 ↦ [z_2, z_1]`.
pub fn make_t(alphabet: Alphabet, cut: u32) -> Result<TangentialDerivation> {
    if alphabet.genus() != 0 || alphabet.boundary() != 2 {
        return Err(AlgebraError::InvalidParameters(format!(
            "t lives on (0,3), not {}",
            alphabet.surface_label()
        )));
    }
    let z1 = LieSeries::generator(alphabet, cut, alphabet.z(0));
    let z2 = LieSeries::generator(alphabet, cut, alphabet.z(1));
    TangentialDerivation::from_parts(alphabet, cut, Vec::new(), vec![z2, z1])
}

/// `δ_{2n}`: `x ↦ ad_x^{2n}(y)` and `y` sent to the solution of
/// `[δ(x), y] + [x, δ(y)] = 0`, found by exact elimination.
pub fn make_delta_2n(alphabet: Alphabet, cut: u32, n: u32) -> Result<TangentialDerivation> {
    if alphabet.genus() != 1 || alphabet.boundary() != 0 {
        return Err(AlgebraError::InvalidParameters(format!(
            "δ_2n lives on (1,1), not {}",
            alphabet.surface_label()
        )));
    }
    if n == 0 || cut < 2 * n + 2 {
        return Err(AlgebraError::InvalidParameters(format!(
            "δ_{} needs a positive index and cut at least {}",
            2 * n,
            2 * n + 2
        )));
    }
    let x = LieSeries::generator(alphabet, cut, alphabet.x(0));
    let y = LieSeries::generator(alphabet, cut, alphabet.y(0));
    let mut dx = y.clone();
    for _ in 0..2 * n {
        dx = x.bracket(&dx)?;
    }
    // [x, δ(y)] = [y, δ(x)] in weight 2n+2
    let rhs = y.bracket(&dx)?;
    let weight = 2 * n + 1;
    let basis = lyndon_basis(alphabet, weight);
    let columns: Vec<TensorSeries> = basis
        .iter()
        .map(|w| {
            let p = LieSeries::from_coeffs(alphabet, cut, [(w.clone(), rational::one())])?;
            Ok(x.bracket(&p)?.to_tensor().clone())
        })
        .collect::<Result<_>>()?;
    let dy = solve_linear_lie(alphabet, cut, &basis, &columns, rhs.to_tensor(), weight + 1)?;
    TangentialDerivation::from_parts(alphabet, cut, vec![dx, dy], Vec::new())
}

/// Solve `Σ t_k columns[k] = rhs` over words and return `Σ t_k P_{basis[k]}`.
fn solve_linear_lie(
    alphabet: Alphabet,
    cut: u32,
    basis: &[Word],
    columns: &[TensorSeries],
    rhs: &TensorSeries,
    weight: u32,
) -> Result<LieSeries> {
    let mut rows: std::collections::BTreeMap<Word, usize> = std::collections::BTreeMap::new();
    for t in columns.iter().chain([rhs]) {
        for w in t.terms().keys() {
            let next = rows.len();
            rows.entry(w.clone()).or_insert(next);
        }
    }
    let mut matrix = vec![std::collections::BTreeMap::new(); rows.len()];
    for (k, t) in columns.iter().enumerate() {
        for (w, c) in t.terms() {
            matrix[rows[w]].insert(k, c.clone());
        }
    }
    let mut sys = AffineSystem::new(basis.len());
    let mut rhs_vec = vec![Rational::zero(); rows.len()];
    for (w, c) in rhs.terms() {
        rhs_vec[rows[w]] = c.clone();
    }
    for (row, b) in matrix.into_iter().zip(rhs_vec) {
        sys.push_row(row, b);
    }
    match sys.solve(PivotOrder::Natural) {
        AffineSolution::Consistent { particular, .. } => {
            LieSeries::from_coeffs(alphabet, cut, basis.iter().cloned().zip(particular))
        }
        AffineSolution::Inconsistent { rhs, .. } => Err(AlgebraError::Inconsistent {
            weight,
            detail: format!("reduced row 0 = {rhs}"),
        }),
    }
}
