//! Gluing of solutions along the pair of pants and the elliptic lift of genus-zero
//! solutions to genus one.

use num_traits::Zero;

use crate::alphabet::{Alphabet, Letter};
use crate::automorphism::{make_phi_aut, Automorphism};
use crate::derivation::{make_t, TangentialDerivation};
use crate::error::{AlgebraError, Result};
use crate::kv::{KVInstance, KVSolution};
use crate::lie::LieSeries;
use crate::rational::{self, Rational};
use crate::scalar::ScalarSeries;

/// Placement of two surfaces `(g_1, n_1)` and `(g_2, n_2)` inside `(g_1+g_2, n_1+n_2)`.
///
/// Blocks are stored in product order: the first block's boundary factors precede the
/// second block's inside `ξ`, which requires `n_first = 0` or `g_second = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluePlan {
    blocks: [Alphabet; 2],
    /// `true` when the right input occupies the first block.
    swapped: bool,
    target: Alphabet,
    maps: [Vec<Letter>; 2],
}

impl GluePlan {
    pub fn new(left: Alphabet, right: Alphabet) -> Result<Self> {
        let fits = |a: Alphabet, b: Alphabet| a.boundary() == 0 || b.genus() == 0;
        let swapped = if fits(left, right) {
            false
        } else if fits(right, left) {
            true
        } else {
            return Err(AlgebraError::InvalidParameters(format!(
                "cannot glue {} and {}: need n_1 = n_2 = 0, g_1 = 0 or g_2 = 0",
                left.surface_label(),
                right.surface_label()
            )));
        };
        let blocks = if swapped {
            [right, left]
        } else {
            [left, right]
        };
        let target = Alphabet::new(
            left.genus() + right.genus(),
            left.boundary() + right.boundary(),
        );
        let (g0, n0) = (blocks[0].genus(), blocks[0].boundary());
        let map = |block: Alphabet, g_off: usize, n_off: usize| -> Vec<Letter> {
            let mut m = Vec::with_capacity(block.len());
            for i in 0..block.genus() {
                m.push(target.x(g_off + i));
            }
            for i in 0..block.genus() {
                m.push(target.y(g_off + i));
            }
            for j in 0..block.boundary() {
                m.push(target.z(n_off + j));
            }
            m
        };
        let maps = [map(blocks[0], 0, 0), map(blocks[1], g0, n0)];
        Ok(GluePlan {
            blocks,
            swapped,
            target,
            maps,
        })
    }

    pub fn target(&self) -> Alphabet {
        self.target
    }

    pub fn is_swapped(&self) -> bool {
        self.swapped
    }

    /// Target letters of the block's generators, in the block's own letter order.
    pub fn block_map(&self, block: usize) -> &[Letter] {
        &self.maps[block]
    }

    fn block_of(&self, l: Letter) -> usize {
        usize::from(!self.maps[0].contains(&l))
    }

    /// `φ_k = Σ [x^k_i, y^k_i] + Σ z^k_j` inside the target.
    pub fn block_phi(&self, block: usize, cut: u32) -> LieSeries {
        crate::kv::phi_element(self.blocks[block], cut)
            .relabel(self.target, &self.maps[block], cut)
            .expect("relabelling preserves Lie elements")
    }

    fn block_substitution(&self, cut: u32) -> [LieSeries; 2] {
        [self.block_phi(0, cut), self.block_phi(1, cut)]
    }

    /// The product `F_left × F_right` acting blockwise.
    pub fn product(&self, left: &Automorphism, right: &Automorphism) -> Result<Automorphism> {
        let factors = if self.swapped {
            [right, left]
        } else {
            [left, right]
        };
        let cut = left.cut();
        if right.cut() != cut {
            return Err(AlgebraError::ContextMismatch(
                "factors have different cuts".into(),
            ));
        }
        let mut images = vec![LieSeries::zero(self.target, cut); self.target.len()];
        let mut tangential = vec![LieSeries::zero(self.target, cut); self.target.boundary()];
        for (k, f) in factors.iter().enumerate() {
            if f.alphabet() != self.blocks[k] {
                return Err(AlgebraError::ContextMismatch(format!(
                    "factor over {} in a block of type {}",
                    f.alphabet().surface_label(),
                    self.blocks[k].surface_label()
                )));
            }
            for (l, img) in f.alphabet().letters().zip(f.images()) {
                images[self.maps[k][l as usize] as usize] =
                    img.relabel(self.target, &self.maps[k], cut)?;
            }
            for (j, t) in f.tangential().iter().enumerate() {
                let z = self.maps[k][f.alphabet().z(j) as usize];
                tangential[self.target.z_index(z).unwrap()] =
                    t.relabel(self.target, &self.maps[k], cut)?;
            }
        }
        Automorphism::new(self.target, cut, images, tangential)
    }
}

fn check_pants(a: Alphabet) -> Result<()> {
    if a.genus() != 0 || a.boundary() != 2 {
        return Err(AlgebraError::InvalidParameters(format!(
            "expected an element over (0,3), got {}",
            a.surface_label()
        )));
    }
    Ok(())
}

/// `P(u)`: a block-`k` generator `w` goes to `[w, u_k(φ_1, φ_2)]`.
pub fn glue_der(u: &TangentialDerivation, plan: &GluePlan) -> Result<TangentialDerivation> {
    check_pants(u.alphabet())?;
    let cut = u.cut();
    let subs = plan.block_substitution(cut);
    let lifted: Vec<LieSeries> = u
        .tangential()
        .iter()
        .map(|uk| uk.substitute(&subs))
        .collect::<Result<_>>()?;
    let target = plan.target;
    let images = target
        .letters()
        .map(|l| LieSeries::generator(target, cut, l).bracket(&lifted[plan.block_of(l)]))
        .collect::<Result<Vec<_>>>()?;
    let tangential = (0..target.boundary())
        .map(|j| lifted[plan.block_of(target.z(j))].clone())
        .collect();
    TangentialDerivation::new(target, cut, images, tangential)
}

/// `P(F)`: a block-`k` generator `w` goes to `e^{-ad f_k(φ_1, φ_2)}(w)`.
pub fn glue_aut(f: &Automorphism, plan: &GluePlan) -> Result<Automorphism> {
    check_pants(f.alphabet())?;
    let cut = f.cut();
    let subs = plan.block_substitution(cut);
    let lifted: Vec<LieSeries> = f
        .tangential()
        .iter()
        .map(|fk| fk.substitute(&subs))
        .collect::<Result<_>>()?;
    let target = plan.target;
    let images = target
        .letters()
        .map(|l| (-&lifted[plan.block_of(l)]).exp_ad(&LieSeries::generator(target, cut, l)))
        .collect::<Result<Vec<_>>>()?;
    let tangential = (0..target.boundary())
        .map(|j| lifted[plan.block_of(target.z(j))].clone())
        .collect();
    Automorphism::new(target, cut, images, tangential)
}

/// How the KVII residual of a one-parameter family depends on `λ` at the first weight
/// where it depends on `λ` at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaReport {
    pub lambda: Rational,
    /// `None` when the residual does not depend on `λ`.
    pub critical_weight: Option<u32>,
    /// Nonzero coordinates of the slope at the critical weight.
    pub slope_terms: usize,
}

/// Duflo coefficients visible below the trace cut of `inst`.
fn visible_duflo(h: &ScalarSeries, inst: &KVInstance) -> ScalarSeries {
    h.truncated(inst.duflo_degree())
}

/// Glue two solutions with a genus-zero solution `F`: `(F_1 × F_2) ∘ P(F e^{λt})`, with
/// `λ` fixed by the first weight of the KVII residual that depends on it.
pub fn combine_solutions(
    left: &KVSolution,
    right: &KVSolution,
    pants: &KVSolution,
    plan: &GluePlan,
) -> Result<(KVSolution, LambdaReport)> {
    check_pants(pants.aut.alphabet())?;
    let cut = pants.aut.cut();
    if left.aut.cut() != cut || right.aut.cut() != cut {
        return Err(AlgebraError::ContextMismatch(
            "all three solutions must share the cut".into(),
        ));
    }
    let target = plan.target();
    let inst = KVInstance::new(target.genus(), target.boundary(), cut);
    let h = visible_duflo(&pants.duflo, &inst);
    for (name, other) in [("left", left), ("right", right)] {
        let hk = visible_duflo(&h, &other.instance);
        if !other.instance.residuals(&other.aut, &hk)?.pass {
            return Err(AlgebraError::InvalidParameters(format!(
                "the {name} solution does not solve KV with the genus-zero Duflo function"
            )));
        }
    }
    let product = plan.product(&left.aut, &right.aut)?;
    let t = make_t(pants.aut.alphabet(), cut)?;
    let candidate = |lambda: &Rational| -> Result<Automorphism> {
        let flam = pants.aut.compose(&t.scale(lambda).exp()?)?;
        product.compose(&glue_aut(&flam, plan)?)
    };
    let r0 = inst.kv2_residual(&candidate(&rational::zero())?, &h)?;
    let r1 = inst.kv2_residual(&candidate(&rational::one())?, &h)?;
    let slope = r1.try_sub(&r0)?;
    let report = match slope.min_weight() {
        None => LambdaReport {
            lambda: rational::zero(),
            critical_weight: None,
            slope_terms: 0,
        },
        Some(w) => {
            let s = slope.weight_component(w);
            let r = r0.weight_component(w);
            let (key, c) = s.terms().iter().next().expect("nonzero component");
            let lambda = -r.terms().get(key).cloned().unwrap_or_else(Rational::zero) / c;
            if r.try_add(&s.scale(&lambda))? != crate::cyclic::CyclicSeries::zero(target, r.cut()) {
                return Err(AlgebraError::Inconsistent {
                    weight: w,
                    detail: "no λ cancels the KVII residual".into(),
                });
            }
            LambdaReport {
                lambda,
                critical_weight: Some(w),
                slope_terms: s.num_terms(),
            }
        }
    };
    let aut = candidate(&report.lambda)?;
    Ok((KVSolution::certified(inst, aut, h)?, report))
}

/// `ψ_1 = e^{ad x}(y)` and `ψ_2 = -y` in the genus-one alphabet.
pub fn elliptic_psi(cut: u32) -> [LieSeries; 2] {
    let a = Alphabet::new(1, 0);
    let x = LieSeries::generator(a, cut, a.x(0));
    let y = LieSeries::generator(a, cut, a.y(0));
    [x.exp_ad(&y).expect("same context"), -&y]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerReport {
    pub pass: bool,
    /// Component of `F(z_1 - z_2) - (z_1 - z_2)` quadratic in the `z`'s.
    pub quadratic_defect: LieSeries,
}

/// Whether `F` fixes `z_1 - z_2` up to terms of weight above 4.
pub fn elliptic_stab_check(f: &Automorphism) -> Result<StabilizerReport> {
    check_pants(f.alphabet())?;
    let a = f.alphabet();
    let cut = f.cut();
    let diff = &LieSeries::generator(a, cut, a.z(0)) - &LieSeries::generator(a, cut, a.z(1));
    let defect = f.apply_lie(&diff)?.try_sub(&diff)?;
    let low = &defect.weight_component(2) + &defect.weight_component(4);
    Ok(StabilizerReport {
        pass: low.is_zero(),
        quadratic_defect: low,
    })
}

/// Source cut needed to lift to genus one through `cut`: a Lie word in `k ≥ 2` letters
/// of `ψ_1, ψ_2` starts in weight `k + 1`.
pub fn elliptic_source_cut(cut: u32) -> u32 {
    2 * cut.saturating_sub(1).max(1)
}

/// `F^ell`: `e^x ↦ F_1(ψ)^{-1} e^x F_2(ψ)` and `e^y ↦ F_2(ψ)^{-1} e^y F_2(ψ)`.
pub fn elliptic_lift(f: &Automorphism, cut: u32) -> Result<Automorphism> {
    let stab = elliptic_stab_check(f)?;
    if !stab.pass {
        return Err(AlgebraError::Positivity(format!(
            "F does not fix z1 - z2 up to quadratic terms: defect {:?}",
            stab.quadratic_defect
        )));
    }
    if f.cut() < elliptic_source_cut(cut) {
        return Err(AlgebraError::InvalidParameters(format!(
            "lifting through weight {cut} needs the genus-zero element through weight {}",
            elliptic_source_cut(cut)
        )));
    }
    let a = Alphabet::new(1, 0);
    let psi = elliptic_psi(cut);
    let s: Vec<LieSeries> = f
        .tangential()
        .iter()
        .map(|fk| fk.substitute(&psi))
        .collect::<Result<_>>()?;
    let x = LieSeries::generator(a, cut, a.x(0));
    let y = LieSeries::generator(a, cut, a.y(0));
    let x_img = LieSeries::bch_all(&[-&s[0], x, s[1].clone()], a, cut)?;
    let y_img = LieSeries::bch_all(&[-&s[1], y, s[1].clone()], a, cut)?;
    Automorphism::new(a, cut, vec![x_img, y_img], Vec::new())
}

/// `Σ_k c_k ad_x^k(a)`.
fn ad_series(coeffs: &[Rational], x: &LieSeries, a: &LieSeries) -> Result<LieSeries> {
    let mut acc = LieSeries::zero(a.alphabet(), a.cut());
    let mut term = a.clone();
    for c in coeffs {
        if term.is_zero() {
            break;
        }
        acc = &acc + &term.scale(c);
        term = x.bracket(&term)?;
    }
    Ok(acc)
}

/// Derivative of the lift at the identity: `x ↦ B(-ad_x)(U_2) - B(ad_x)(U_1)` and
/// `y ↦ [y, U_2]`, with `U_k = u_k(ψ_1, ψ_2)` and `B(s) = s / (e^s - 1)`.
pub fn elliptic_lift_der(u: &TangentialDerivation, cut: u32) -> Result<TangentialDerivation> {
    check_pants(u.alphabet())?;
    if u.cut() < elliptic_source_cut(cut) {
        return Err(AlgebraError::InvalidParameters(format!(
            "lifting through weight {cut} needs the genus-zero element through weight {}",
            elliptic_source_cut(cut)
        )));
    }
    let a = Alphabet::new(1, 0);
    let psi = elliptic_psi(cut);
    let lifted: Vec<LieSeries> = u
        .tangential()
        .iter()
        .map(|uk| uk.substitute(&psi))
        .collect::<Result<_>>()?;
    let x = LieSeries::generator(a, cut, a.x(0));
    let y = LieSeries::generator(a, cut, a.y(0));
    let b = rational::bernoulli_series(cut as usize);
    let b_neg: Vec<Rational> = b
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
        .collect();
    let x_img = ad_series(&b_neg, &x, &lifted[1])?.try_sub(&ad_series(&b, &x, &lifted[0])?)?;
    let y_img = y.bracket(&lifted[1])?;
    TangentialDerivation::from_parts(a, cut, vec![x_img, y_img], Vec::new())
}

/// The quadratic stabilizer defect of `F e^{λt}` as an affine function of `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerFit {
    /// The unique root.
    pub lambda: Rational,
    pub defect_at_zero: LieSeries,
    pub defect_slope: LieSeries,
}

/// The unique `λ` for which `F e^{λt}` fixes `z_1 - z_2` up to quadratic terms.
pub fn stabilizing_lambda(f: &Automorphism) -> Result<StabilizerFit> {
    check_pants(f.alphabet())?;
    let t = make_t(f.alphabet(), f.cut())?;
    let defect = |lambda: Rational| -> Result<LieSeries> {
        Ok(elliptic_stab_check(&f.compose(&t.scale(&lambda).exp()?)?)?.quadratic_defect)
    };
    let d0 = defect(rational::zero())?;
    let slope = defect(rational::one())?.try_sub(&d0)?;
    if defect(rational::int(2))? != &d0 + &slope.scale(&rational::int(2)) {
        return Err(AlgebraError::Inconsistent {
            weight: 4,
            detail: "stabilizer defect is not affine in λ".into(),
        });
    }
    let Some((key, c)) = slope.coeffs().iter().next() else {
        return Err(AlgebraError::Inconsistent {
            weight: 4,
            detail: "stabilizer defect does not depend on λ".into(),
        });
    };
    let lambda = -d0.coeff(key) / c;
    if !(&d0 + &slope.scale(&lambda)).is_zero() {
        return Err(AlgebraError::Inconsistent {
            weight: 4,
            detail: "no λ cancels the stabilizer defect".into(),
        });
    }
    Ok(StabilizerFit {
        lambda,
        defect_at_zero: d0,
        defect_slope: slope,
    })
}

/// `F e^{λt}` for the stabilizing `λ`.
pub fn into_stabilizer(f: &Automorphism) -> Result<(StabilizerFit, Automorphism)> {
    let fit = stabilizing_lambda(f)?;
    let t = make_t(f.alphabet(), f.cut())?;
    let g = f.compose(&t.scale(&fit.lambda).exp()?)?;
    Ok((fit, g))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticResult {
    pub fit: StabilizerFit,
    pub solution: KVSolution,
}

/// `(F e^{λt})^ell ∘ φ` with the unique `λ` putting `F e^{λt}` in the stabilizer,
/// certified as a genus-one solution through `cut`.
pub fn elliptic_solve(pants: &KVSolution, cut: u32) -> Result<EllipticResult> {
    let (fit, stable) = into_stabilizer(&pants.aut)?;
    let lifted = elliptic_lift(&stable, cut)?;
    let aut = lifted.compose(&make_phi_aut(Alphabet::new(1, 0), cut)?)?;
    let inst = KVInstance::new(1, 0, cut);
    let h = inst.kv2_solve_h(&aut)?;
    Ok(EllipticResult {
        fit,
        solution: KVSolution::certified(inst, aut, h)?,
    })
}
