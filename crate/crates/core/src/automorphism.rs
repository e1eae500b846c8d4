//! Tangential automorphisms: filtered automorphisms with identity associated graded that
//! conjugate every `z_j`.

use num_traits::Zero;

use crate::alphabet::{Alphabet, Letter};
use crate::cyclic::CyclicSeries;
use crate::derivation::TangentialDerivation;
use crate::error::{AlgebraError, Result};
use crate::lie::LieSeries;
use crate::rational;
use crate::tensor::TensorSeries;

/// `F` with images of the generators and tangential data `f_j`, where
/// `F(z_j) = e^{-ad f_j}(z_j)`, i.e. `F_j^{-1} z_j F_j` with `F_j = exp(f_j)`.
///
/// The tangential data never contain the one-letter word `z_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    alphabet: Alphabet,
    cut: u32,
    images: Vec<LieSeries>,
    tangential: Vec<LieSeries>,
}

/// Remove the `z_j` coefficient of `f` by left multiplication with a power of `e^{z_j}`,
/// which does not change the conjugate of `z_j`.
fn normalize_group(alphabet: Alphabet, j: usize, f: &LieSeries) -> Result<LieSeries> {
    let z = alphabet.z(j);
    let c = f.coeff(&[z]);
    if c.is_zero() {
        return Ok(f.clone());
    }
    LieSeries::generator(alphabet, f.cut(), z).scale(&-c).bch(f)
}

impl Automorphism {
    pub fn new(
        alphabet: Alphabet,
        cut: u32,
        images: Vec<LieSeries>,
        tangential: Vec<LieSeries>,
    ) -> Result<Self> {
        if images.len() != alphabet.len() || tangential.len() != alphabet.boundary() {
            return Err(AlgebraError::InvalidParameters(format!(
                "automorphism of {} needs {} images and {} tangential components",
                alphabet.surface_label(),
                alphabet.len(),
                alphabet.boundary()
            )));
        }
        for (l, img) in alphabet.letters().zip(&images) {
            if img.alphabet() != alphabet || img.cut() != cut {
                return Err(AlgebraError::ContextMismatch(format!(
                    "image of {} has the wrong context",
                    alphabet.name(l)
                )));
            }
            let generator = LieSeries::generator(alphabet, cut, l);
            let rest = img - &generator;
            if rest.min_weight().is_some_and(|m| m <= alphabet.weight(l)) {
                return Err(AlgebraError::Positivity(format!(
                    "image of {} is not {} plus higher weight",
                    alphabet.name(l),
                    alphabet.name(l)
                )));
            }
        }
        let tangential = tangential
            .iter()
            .enumerate()
            .map(|(j, f)| {
                if f.alphabet() != alphabet || f.cut() != cut {
                    return Err(AlgebraError::ContextMismatch(format!(
                        "tangential component {} has the wrong context",
                        j + 1
                    )));
                }
                normalize_group(alphabet, j, f)
            })
            .collect::<Result<Vec<_>>>()?;
        for (j, f) in tangential.iter().enumerate() {
            let z = LieSeries::generator(alphabet, cut, alphabet.z(j));
            let conj = (-f).exp_ad(&z)?;
            if conj != images[alphabet.z(j) as usize] {
                let bad = (&conj - &images[alphabet.z(j) as usize])
                    .min_weight()
                    .unwrap_or(0);
                return Err(AlgebraError::NotTangential(
                    j + 1,
                    format!("image differs from the conjugate of z at weight {bad}"),
                ));
            }
        }
        Ok(Automorphism {
            alphabet,
            cut,
            images,
            tangential,
        })
    }

    /// Build from images of `x`, `y` and tangential data; `z` images are the conjugates.
    pub fn from_parts(
        alphabet: Alphabet,
        cut: u32,
        xy_images: Vec<LieSeries>,
        tangential: Vec<LieSeries>,
    ) -> Result<Self> {
        if tangential.len() != alphabet.boundary() {
            return Err(AlgebraError::InvalidParameters(format!(
                "expected {} tangential components, got {}",
                alphabet.boundary(),
                tangential.len()
            )));
        }
        let mut images = xy_images;
        for (j, f) in tangential.iter().enumerate() {
            let z = LieSeries::generator(alphabet, cut, alphabet.z(j));
            images.push((-f).exp_ad(&z)?);
        }
        Self::new(alphabet, cut, images, tangential)
    }

    pub fn identity(alphabet: Alphabet, cut: u32) -> Self {
        Automorphism {
            alphabet,
            cut,
            images: alphabet
                .letters()
                .map(|l| LieSeries::generator(alphabet, cut, l))
                .collect(),
            tangential: (0..alphabet.boundary())
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

    pub fn tangential(&self) -> &[LieSeries] {
        &self.tangential
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.alphabet, self.cut)
    }

    pub fn check_context(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet || self.cut != other.cut {
            return Err(AlgebraError::ContextMismatch(format!(
                "automorphisms over {:?} cut {} and {:?} cut {}",
                self.alphabet, self.cut, other.alphabet, other.cut
            )));
        }
        Ok(())
    }

    fn tensor_images(&self, cut: u32) -> Vec<TensorSeries> {
        self.images
            .iter()
            .map(|i| i.to_tensor().truncated(cut))
            .collect()
    }

    pub fn apply_lie(&self, a: &LieSeries) -> Result<LieSeries> {
        if a.alphabet() != self.alphabet || a.cut() != self.cut {
            return Err(AlgebraError::ContextMismatch(
                "automorphism applied to a series of another context".into(),
            ));
        }
        a.substitute(&self.images)
    }

    pub fn apply_tensor(&self, t: &TensorSeries) -> Result<TensorSeries> {
        if t.alphabet() != self.alphabet || t.cut() > self.cut {
            return Err(AlgebraError::ContextMismatch(
                "automorphism applied to a series of another context".into(),
            ));
        }
        t.substitute(&self.tensor_images(t.cut()))
    }

    /// Action on `tr` through representatives.
    pub fn apply_cyclic(&self, c: &CyclicSeries) -> Result<CyclicSeries> {
        if c.alphabet() != self.alphabet || c.cut() > self.cut {
            return Err(AlgebraError::ContextMismatch(
                "automorphism applied to a cyclic series of another context".into(),
            ));
        }
        let reps = TensorSeries::from_terms(
            c.alphabet(),
            c.cut(),
            c.terms()
                .iter()
                .map(|(w, v)| (w.representative().clone(), v.clone())),
        );
        Ok(CyclicSeries::tr_project(
            &reps.substitute(&self.tensor_images(c.cut()))?,
        ))
    }

    /// `(F∘G)(a) = F(G(a))`, with tangential data `bch(f_j, F(g_j))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let images = other
            .images
            .iter()
            .map(|g| self.apply_lie(g))
            .collect::<Result<Vec<_>>>()?;
        let tangential = self
            .tangential
            .iter()
            .zip(&other.tangential)
            .enumerate()
            .map(|(j, (f, g))| normalize_group(self.alphabet, j, &f.bch(&self.apply_lie(g)?)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Automorphism {
            alphabet: self.alphabet,
            cut: self.cut,
            images,
            tangential,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        self.log()?.scale(&rational::int(-1)).exp()
    }

    /// The tangential derivation `u` with `exp(u) = F`.
    pub fn log(&self) -> Result<TangentialDerivation> {
        let a = self.alphabet;
        let cut = self.cut;
        // u(w) = Σ (-1)^{k+1}/k (F - id)^k (w)
        let mut xy_images = Vec::with_capacity(2 * a.genus());
        for l in 0..2 * a.genus() as Letter {
            let mut term = LieSeries::generator(a, cut, l);
            let mut acc = LieSeries::zero(a, cut);
            let mut k = 0i64;
            loop {
                k += 1;
                term = self.apply_lie(&term)?.try_sub(&term)?;
                if term.is_zero() {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc = &acc + &term.scale(&rational::q(sign, k));
            }
            xy_images.push(acc);
        }
        // Tangential data: fixed point of u_j ↦ u_j + f_j - data(exp(u))_j. Each round
        // fixes at least one more weight.
        let mut data: Vec<LieSeries> = self.tangential.clone();
        let mut u = TangentialDerivation::from_parts(a, cut, xy_images.clone(), data.clone())?;
        for _ in 0..=cut {
            let current = tangential_data_of_exp(&u)?;
            let mut changed = false;
            for (j, (target, got)) in self.tangential.iter().zip(&current).enumerate() {
                let diff = target - got;
                if !diff.is_zero() {
                    changed = true;
                    data[j] = &data[j] + &diff;
                }
            }
            if !changed {
                break;
            }
            u = TangentialDerivation::from_parts(a, cut, xy_images.clone(), data.clone())?;
        }
        Ok(u)
    }
}

/// Tangential data `f_j` of `exp(u)`.
///
/// `G(t) = exp(f_j(t))` for `exp(tu)` solves `G' = G · exp(tu)(u_j)`; with
/// `G = Σ g_k t^k` this gives `(k+1) g_{k+1} = Σ_{a+l=k} g_a u^l(u_j) / l!`.
fn tangential_data_of_exp(u: &TangentialDerivation) -> Result<Vec<LieSeries>> {
    let a = u.alphabet();
    let cut = u.cut();
    u.tangential()
        .iter()
        .enumerate()
        .map(|(j, uj)| {
            let mut flows: Vec<TensorSeries> = Vec::new();
            let mut term = uj.to_tensor().clone();
            let mut l = 0u32;
            while !term.is_zero() {
                flows.push(term.scale(&rational::inv_factorial(l)));
                term = u.apply_tensor(&term)?;
                l += 1;
            }
            let mut gs = vec![TensorSeries::one(a, cut)];
            let mut total = TensorSeries::one(a, cut);
            for k in 0.. {
                let mut next = TensorSeries::zero(a, cut);
                for (l, flow) in flows.iter().enumerate().take(k + 1) {
                    next = &next + &(&gs[k - l] * flow);
                }
                if next.is_zero() {
                    break;
                }
                let next = next.scale(&rational::q(1, k as i64 + 1));
                total = &total + &next;
                gs.push(next);
            }
            normalize_group(a, j, &LieSeries::log(&total)?)
        })
        .collect()
}

impl TangentialDerivation {
    /// `exp(u)`: images `Σ u^k(w)/k!`.
    pub fn exp(&self) -> Result<Automorphism> {
        let a = self.alphabet();
        let cut = self.cut();
        let images = a
            .letters()
            .map(|l| {
                let mut acc = LieSeries::generator(a, cut, l);
                let mut term = acc.clone();
                let mut k = 0u32;
                loop {
                    k += 1;
                    term = self.apply_lie(&term)?.scale(&rational::q(1, k as i64));
                    if term.is_zero() {
                        break;
                    }
                    acc = &acc + &term;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Automorphism {
            alphabet: a,
            cut,
            images,
            tangential: tangential_data_of_exp(self)?,
        })
    }
}

/// `φ(x) = x`, `φ(y) = Σ ad_x^k(y)/(k+1)!` on the genus-one alphabet without `z`.
pub fn make_phi_aut(alphabet: Alphabet, cut: u32) -> Result<Automorphism> {
    if alphabet.genus() != 1 || alphabet.boundary() != 0 {
        return Err(AlgebraError::InvalidParameters(format!(
            "φ lives on (1,1), not {}",
            alphabet.surface_label()
        )));
    }
    let x = LieSeries::generator(alphabet, cut, alphabet.x(0));
    let y = LieSeries::generator(alphabet, cut, alphabet.y(0));
    let mut acc = y.clone();
    let mut term = y;
    for k in 1..cut {
        term = x.bracket(&term)?;
        if term.is_zero() {
            break;
        }
        acc = &acc + &term.scale(&rational::inv_factorial(k + 1));
    }
    Automorphism::new(alphabet, cut, vec![x, acc], Vec::new())
}
