//! KV problem instances, their residuals, Duflo functions and the stabilizer `krv`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::alphabet::{Alphabet, Letter};
use crate::automorphism::Automorphism;
use crate::cyclic::{CyclicSeries, CyclicWord};
use crate::derivation::TangentialDerivation;
use crate::divergence::{self, trace_cut};
use crate::error::{AlgebraError, Result};
use crate::lie::LieSeries;
use crate::linalg::{AffineSolution, AffineSystem, PivotOrder};
use crate::rational::{self, Rational};
use crate::scalar::ScalarSeries;

/// `φ = Σ [x_i, y_i] + Σ z_j`.
pub fn phi_element(alphabet: Alphabet, cut: u32) -> LieSeries {
    let mut acc = LieSeries::zero(alphabet, cut);
    for i in 0..alphabet.genus() {
        let x = LieSeries::generator(alphabet, cut, alphabet.x(i));
        let y = LieSeries::generator(alphabet, cut, alphabet.y(i));
        acc = &acc + &x.bracket(&y).expect("same context");
    }
    for j in 0..alphabet.boundary() {
        acc = &acc + &LieSeries::generator(alphabet, cut, alphabet.z(j));
    }
    acc
}

/// `ξ = log(Π_i e^{x_i} e^{y_i} e^{-x_i} e^{-y_i} · Π_j e^{z_j})`, folded with pairwise BCH.
pub fn xi_element(alphabet: Alphabet, cut: u32) -> LieSeries {
    let mut acc = LieSeries::zero(alphabet, cut);
    let gen = |l: Letter| LieSeries::generator(alphabet, cut, l);
    for i in 0..alphabet.genus() {
        let (x, y) = (gen(alphabet.x(i)), gen(alphabet.y(i)));
        for factor in [x.clone(), y.clone(), -&x, -&y] {
            acc = acc.bch(&factor).expect("same context");
        }
    }
    for j in 0..alphabet.boundary() {
        acc = acc.bch(&gen(alphabet.z(j))).expect("same context");
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KVInstance {
    alphabet: Alphabet,
    cut: u32,
    phi: LieSeries,
    xi: LieSeries,
}

impl KVInstance {
    pub fn new(g: usize, n: usize, cut: u32) -> Self {
        let alphabet = Alphabet::new(g, n);
        KVInstance {
            alphabet,
            cut,
            phi: phi_element(alphabet, cut),
            xi: xi_element(alphabet, cut),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    /// Highest weight at which the KVII equation is checked.
    pub fn trace_cut(&self) -> u32 {
        trace_cut(self.alphabet, self.cut)
    }

    /// Number of Duflo coefficients that can enter below the trace cut.
    pub fn duflo_degree(&self) -> usize {
        (self.trace_cut() / 2) as usize
    }

    pub fn phi(&self) -> &LieSeries {
        &self.phi
    }

    pub fn xi(&self) -> &LieSeries {
        &self.xi
    }

    fn check(&self, alphabet: Alphabet, cut: u32) -> Result<()> {
        if alphabet != self.alphabet || cut != self.cut {
            return Err(AlgebraError::ContextMismatch(format!(
                "instance {} cut {} used with {} cut {}",
                self.alphabet.surface_label(),
                self.cut,
                alphabet.surface_label(),
                cut
            )));
        }
        Ok(())
    }

    /// `Σ_j tr(z_j^k) - tr(arg^k)` through the trace cut.
    pub fn duflo_direction(&self, arg: &LieSeries, k: usize) -> CyclicSeries {
        let mut h = ScalarSeries::zero(k);
        h.set_coeff(k, rational::one()).expect("k ≥ 1");
        self.duflo_rhs(&h, arg)
    }

    /// `Σ_j tr h(z_j) - tr h(arg)` through the trace cut.
    pub fn duflo_rhs(&self, h: &ScalarSeries, arg: &LieSeries) -> CyclicSeries {
        let t = self.trace_cut();
        let mut acc = -&divergence::tr_h(h, arg, t);
        for j in 0..self.alphabet.boundary() {
            let z = LieSeries::generator(self.alphabet, self.cut, self.alphabet.z(j));
            acc = &acc + &divergence::tr_h(h, &z, t);
        }
        acc
    }

    /// `F(φ) - ξ`.
    pub fn kv1_residual(&self, f: &Automorphism) -> Result<LieSeries> {
        self.check(f.alphabet(), f.cut())?;
        f.apply_lie(&self.phi)?.try_sub(&self.xi)
    }

    /// `j(F) - (Σ tr h(z_j) - tr h(ξ) - r)`.
    pub fn kv2_residual(&self, f: &Automorphism, h: &ScalarSeries) -> Result<CyclicSeries> {
        self.check(f.alphabet(), f.cut())?;
        self.kv2_residual_from_j(&divergence::j(f)?, h)
    }

    pub(crate) fn kv2_residual_from_j(
        &self,
        jf: &CyclicSeries,
        h: &ScalarSeries,
    ) -> Result<CyclicSeries> {
        let r = divergence::r_element(self.alphabet, self.trace_cut());
        let rhs = self.duflo_rhs(h, &self.xi).try_sub(&r)?;
        jf.try_sub(&rhs)
    }

    pub fn residuals(&self, f: &Automorphism, h: &ScalarSeries) -> Result<ResidualReport> {
        Ok(ResidualReport::new(
            self.kv1_residual(f)?,
            self.kv2_residual(f, h)?,
        ))
    }

    /// Duflo function making KVII hold for `F`, if one exists.
    pub fn kv2_solve_h(&self, f: &Automorphism) -> Result<ScalarSeries> {
        self.check(f.alphabet(), f.cut())?;
        let r = divergence::r_element(self.alphabet, self.trace_cut());
        let target = divergence::j(f)?.try_add(&r)?;
        let h = self.solve_duflo(&target, &self.xi, PivotOrder::Natural)?;
        let residual = self.kv2_residual(f, &h)?;
        if !residual.is_zero() {
            return Err(AlgebraError::Certification(format!(
                "KVII residual nonzero in weights {:?}",
                residual.weight_profile().keys().collect::<Vec<_>>()
            )));
        }
        Ok(h)
    }

    /// Solve `target = Σ_k c_k (Σ_j tr(z_j^k) - tr(arg^k))` for the coefficients `c_k`.
    pub fn solve_duflo(
        &self,
        target: &CyclicSeries,
        arg: &LieSeries,
        order: PivotOrder,
    ) -> Result<ScalarSeries> {
        let k_max = self.duflo_degree();
        let directions: Vec<CyclicSeries> =
            (1..=k_max).map(|k| self.duflo_direction(arg, k)).collect();
        let mut rows: BTreeMap<CyclicWord, usize> = BTreeMap::new();
        for s in directions.iter().chain([target]) {
            for w in s.terms().keys() {
                let next = rows.len();
                rows.entry(w.clone()).or_insert(next);
            }
        }
        let mut matrix = vec![BTreeMap::new(); rows.len()];
        for (k, d) in directions.iter().enumerate() {
            for (w, c) in d.terms() {
                matrix[rows[w]].insert(k, c.clone());
            }
        }
        let mut rhs = vec![Rational::zero(); rows.len()];
        for (w, c) in target.terms() {
            rhs[rows[w]] = c.clone();
        }
        let mut sys = AffineSystem::new(k_max);
        for (row, b) in matrix.into_iter().zip(rhs) {
            sys.push_row(row, b);
        }
        match sys.solve(order) {
            AffineSolution::Consistent { particular, .. } => {
                Ok(ScalarSeries::from_coeffs(particular))
            }
            AffineSolution::Inconsistent { row, rhs } => {
                let word = rows.iter().find(|(_, &i)| i == row).map(|(w, _)| w.clone());
                let weight = word
                    .as_ref()
                    .map(|w| target.weight_of(w))
                    .unwrap_or_default();
                Err(AlgebraError::Inconsistent {
                    weight,
                    detail: format!(
                        "no Duflo function: trace of {} left with {rhs}",
                        word.map(|w| self.alphabet.format_word(w.representative()))
                            .unwrap_or_default()
                    ),
                })
            }
        }
    }

    /// Check `u(φ) = 0` and `div(u) = Σ tr h(z_j) - tr h(φ)` for some `h`.
    pub fn krv_check(&self, u: &TangentialDerivation) -> Result<KrvReport> {
        self.check(u.alphabet(), u.cut())?;
        let phi_defect = u.apply_lie(&self.phi)?;
        let div = divergence::div(u);
        let h = self.solve_duflo(&div, &self.phi, PivotOrder::Natural).ok();
        Ok(KrvReport {
            pass: phi_defect.is_zero() && h.is_some(),
            phi_defect,
            div,
            duflo: h,
        })
    }

    /// Group version of [`Self::krv_check`]: `G(φ) = φ` and `j(G)` of Duflo form.
    /// Returns the Duflo function of `G`.
    pub fn stabilizer_check(&self, g: &Automorphism) -> Result<ScalarSeries> {
        self.check(g.alphabet(), g.cut())?;
        let defect = g.apply_lie(&self.phi)?.try_sub(&self.phi)?;
        if !defect.is_zero() {
            return Err(AlgebraError::Certification(format!(
                "G(φ) ≠ φ from weight {}",
                defect.min_weight().unwrap_or(0)
            )));
        }
        self.solve_duflo(&divergence::j(g)?, &self.phi, PivotOrder::Natural)
    }
}

/// Residuals of a KV candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualReport {
    pub kv1: LieSeries,
    pub kv2: CyclicSeries,
    /// Number of nonzero coefficients per weight.
    pub kv1_profile: BTreeMap<u32, usize>,
    pub kv2_profile: BTreeMap<u32, usize>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(kv1: LieSeries, kv2: CyclicSeries) -> Self {
        let mut kv1_profile = BTreeMap::new();
        for w in kv1.coeffs().keys() {
            *kv1_profile.entry(kv1.weight_of(w)).or_insert(0) += 1;
        }
        let kv2_profile = kv2.weight_profile();
        ResidualReport {
            pass: kv1.is_zero() && kv2.is_zero(),
            kv1,
            kv2,
            kv1_profile,
            kv2_profile,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrvReport {
    pub pass: bool,
    pub phi_defect: LieSeries,
    pub div: CyclicSeries,
    pub duflo: Option<ScalarSeries>,
}

/// A KV solution candidate: an automorphism with its Duflo function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KVSolution {
    pub instance: KVInstance,
    pub aut: Automorphism,
    pub duflo: ScalarSeries,
}

impl KVSolution {
    pub fn residuals(&self) -> Result<ResidualReport> {
        self.instance.residuals(&self.aut, &self.duflo)
    }

    /// Wrap a candidate after checking that both residuals vanish.
    pub fn certified(instance: KVInstance, aut: Automorphism, duflo: ScalarSeries) -> Result<Self> {
        let report = instance.residuals(&aut, &duflo)?;
        if !report.pass {
            return Err(AlgebraError::Certification(format!(
                "residual weights KVI {:?}, KVII {:?}",
                report.kv1_profile.keys().collect::<Vec<_>>(),
                report.kv2_profile.keys().collect::<Vec<_>>()
            )));
        }
        Ok(KVSolution {
            instance,
            aut,
            duflo,
        })
    }

    /// `F ∘ G` for `G` in the stabilizer, with Duflo function `h + h_G`.
    pub fn torsor_act(&self, g: &Automorphism) -> Result<Self> {
        let hg = self.instance.stabilizer_check(g)?;
        let aut = self.aut.compose(g)?;
        Self::certified(self.instance.clone(), aut, self.duflo.add(&hg))
    }
}

/// Basis of the degree-`m` part of `krv`: tangential derivations raising weight by `m`
/// with `u(φ) = 0` and divergence of Duflo form.
pub fn krv_basis(inst: &KVInstance, m: u32) -> Result<Vec<TangentialDerivation>> {
    let layout = crate::solver::DegreeLayout::new(inst, m, true);
    let sys = layout.homogeneous_system(inst)?;
    let AffineSolution::Consistent { nullspace, .. } = sys.solve(PivotOrder::Natural) else {
        unreachable!("homogeneous systems are consistent")
    };
    let mut out = Vec::new();
    for v in nullspace {
        let (u, _) = layout.assemble(inst, &v)?;
        if !u.is_zero() {
            out.push(u);
        }
    }
    Ok(out)
}
