//! Degree-by-degree solver for the KV equations.
//!
//! A tangential derivation of degree `m` (generator images raised by `m`, tangential data
//! of weight `m`) enters `F(φ)` first in weight `m + 2` through `v(φ)` and `j(F)` first in
//! weight `m` through `div(v)`. The Duflo coefficient `c_k` enters KVII first in weight
//! `2k`. Each degree is therefore an affine system in the degree-`m` coordinates.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::alphabet::{Letter, Word};
use crate::automorphism::Automorphism;
use crate::cyclic::{CyclicSeries, CyclicWord};
use crate::derivation::TangentialDerivation;
use crate::divergence::{self, j_of_exp};
use crate::error::{AlgebraError, Result};
use crate::kv::{KVInstance, KVSolution};
use crate::lie::LieSeries;
use crate::linalg::{AffineSolution, AffineSystem, PivotOrder};
use crate::lyndon::lyndon_basis;
use crate::rational::{self, Rational};
use crate::scalar::ScalarSeries;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// KVI and KVII solved together at each degree.
    #[default]
    Joint,
    /// KVI solved first, then KVII repaired by composing with `φ`-stabilising exponentials.
    Kv1ThenCorrect,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "joint" => Ok(Strategy::Joint),
            "kv1-then-correct" => Ok(Strategy::Kv1ThenCorrect),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Joint => "joint",
            Strategy::Kv1ThenCorrect => "kv1-then-correct",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Image(Letter),
    Data(usize),
}

/// Row labels: Lyndon coordinates of a KVI defect or cyclic words of a KVII defect.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum RowKey {
    Lie(Word),
    Trace(CyclicWord),
}

/// Unknown coordinates of a degree-`m` tangential derivation, plus optionally the Duflo
/// coefficient entering at weight `m`.
pub(crate) struct DegreeLayout {
    m: u32,
    slots: Vec<(Slot, Word)>,
    duflo: Option<usize>,
}

impl DegreeLayout {
    pub(crate) fn new(inst: &KVInstance, m: u32, with_duflo: bool) -> Self {
        let a = inst.alphabet();
        let cut = inst.cut();
        let mut slots = Vec::new();
        if m < cut {
            for l in 0..2 * a.genus() as Letter {
                for w in lyndon_basis(a, m + 1).iter() {
                    slots.push((Slot::Image(l), w.clone()));
                }
            }
        }
        if m <= cut {
            for j in 0..a.boundary() {
                for w in lyndon_basis(a, m).iter() {
                    if **w != [a.z(j)] {
                        slots.push((Slot::Data(j), w.clone()));
                    }
                }
            }
        }
        let duflo = (with_duflo && m.is_multiple_of(2) && m >= 2 && m <= inst.trace_cut())
            .then_some(m as usize / 2);
        DegreeLayout { m, slots, duflo }
    }

    fn ncols(&self) -> usize {
        self.slots.len() + usize::from(self.duflo.is_some())
    }

    /// The derivation and Duflo increment encoded by a coordinate vector.
    pub(crate) fn assemble(
        &self,
        inst: &KVInstance,
        coords: &[Rational],
    ) -> Result<(TangentialDerivation, Option<Rational>)> {
        let a = inst.alphabet();
        let cut = inst.cut();
        let mut xy: Vec<BTreeMap<Word, Rational>> = vec![BTreeMap::new(); 2 * a.genus()];
        let mut data: Vec<BTreeMap<Word, Rational>> = vec![BTreeMap::new(); a.boundary()];
        for ((slot, w), c) in self.slots.iter().zip(coords) {
            if c.is_zero() {
                continue;
            }
            match slot {
                Slot::Image(l) => xy[*l as usize].insert(w.clone(), c.clone()),
                Slot::Data(j) => data[*j].insert(w.clone(), c.clone()),
            };
        }
        let to_lie = |m: BTreeMap<Word, Rational>| LieSeries::from_coeffs(a, cut, m);
        let u = TangentialDerivation::from_parts(
            a,
            cut,
            xy.into_iter().map(to_lie).collect::<Result<_>>()?,
            data.into_iter().map(to_lie).collect::<Result<_>>()?,
        )?;
        let c = self.duflo.map(|_| coords[self.slots.len()].clone());
        Ok((u, c))
    }

    fn kv1_active(&self, inst: &KVInstance) -> bool {
        self.m + 2 <= inst.cut()
    }

    fn kv2_active(&self, inst: &KVInstance) -> bool {
        self.m <= inst.trace_cut()
    }

    /// Linear part: `v ↦ (v(φ) in weight m+2, div(v) in weight m)` and `c ↦ -D_k`.
    fn columns(&self, inst: &KVInstance, kv2: bool) -> Result<Vec<BTreeMap<RowKey, Rational>>> {
        let mut cols = Vec::with_capacity(self.ncols());
        for i in 0..self.slots.len() {
            let mut e = vec![Rational::zero(); self.ncols()];
            e[i] = rational::one();
            let (v, _) = self.assemble(inst, &e)?;
            let mut col = BTreeMap::new();
            if self.kv1_active(inst) {
                lie_rows(&mut col, &v.apply_lie(inst.phi())?, self.m + 2);
            }
            if kv2 && self.kv2_active(inst) {
                trace_rows(&mut col, &divergence::div(&v), self.m);
            }
            cols.push(col);
        }
        if let Some(k) = self.duflo {
            let mut col = BTreeMap::new();
            if kv2 {
                trace_rows(&mut col, &-&inst.duflo_direction(inst.phi(), k), self.m);
            }
            cols.push(col);
        }
        Ok(cols)
    }

    /// System of the degree-`m` krv conditions.
    pub(crate) fn homogeneous_system(&self, inst: &KVInstance) -> Result<AffineSystem> {
        let cols = self.columns(inst, true)?;
        Ok(build_system(&cols, &[], &BTreeMap::new()).0)
    }
}

fn lie_rows(col: &mut BTreeMap<RowKey, Rational>, s: &LieSeries, weight: u32) {
    for (w, c) in s.weight_component(weight).coeffs() {
        col.insert(RowKey::Lie(w.clone()), c.clone());
    }
}

fn trace_rows(col: &mut BTreeMap<RowKey, Rational>, s: &CyclicSeries, weight: u32) {
    for (w, c) in s.weight_component(weight).terms() {
        col.insert(RowKey::Trace(w.clone()), c.clone());
    }
}

/// `Σ cols[i] t_i + Σ extra[k] s_k = -rhs`; returns the system and the row labels.
fn build_system(
    cols: &[BTreeMap<RowKey, Rational>],
    extra: &[BTreeMap<RowKey, Rational>],
    rhs: &BTreeMap<RowKey, Rational>,
) -> (AffineSystem, Vec<RowKey>) {
    let mut keys: Vec<RowKey> = cols
        .iter()
        .chain(extra)
        .chain([rhs])
        .flat_map(|c| c.keys().cloned())
        .collect();
    keys.sort();
    keys.dedup();
    let index: BTreeMap<&RowKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut rows = vec![BTreeMap::new(); keys.len()];
    for (i, c) in cols.iter().chain(extra).enumerate() {
        for (k, v) in c {
            rows[index[k]].insert(i, v.clone());
        }
    }
    let mut sys = AffineSystem::new(cols.len() + extra.len());
    for (i, row) in rows.into_iter().enumerate() {
        let b = rhs.get(&keys[i]).map(|v| -v).unwrap_or_else(Rational::zero);
        sys.push_row(row, b);
    }
    (sys, keys)
}

/// `exp(u)(a) = Σ u^k(a)/k!`.
fn exp_apply(u: &TangentialDerivation, a: &LieSeries) -> Result<LieSeries> {
    let mut acc = a.clone();
    let mut term = a.clone();
    let mut k = 0i64;
    loop {
        k += 1;
        term = u.apply_lie(&term)?.scale(&rational::q(1, k));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = &acc + &term;
    }
}

/// State of the joint solver: `F = exp(u)` with Duflo function `h`.
struct JointState<'a> {
    inst: &'a KVInstance,
    u: TangentialDerivation,
    h: ScalarSeries,
}

impl JointState<'_> {
    /// Residual rows entering the degree-`m` system.
    fn residual_rows(
        &self,
        layout: &DegreeLayout,
        kv2: bool,
    ) -> Result<BTreeMap<RowKey, Rational>> {
        let inst = self.inst;
        let mut rows = BTreeMap::new();
        if layout.kv1_active(inst) {
            let r1 = exp_apply(&self.u, inst.phi())?.try_sub(inst.xi())?;
            lie_rows(&mut rows, &r1, layout.m + 2);
        }
        if kv2 && layout.kv2_active(inst) {
            let r2 = inst.kv2_residual_from_j(&j_of_exp(&self.u)?, &self.h)?;
            trace_rows(&mut rows, &r2, layout.m);
        }
        Ok(rows)
    }

    fn shift(&mut self, layout: &DegreeLayout, coords: &[Rational]) -> Result<()> {
        let (v, c) = layout.assemble(self.inst, coords)?;
        self.u = self.u.try_add(&v)?;
        if let (Some(k), Some(c)) = (layout.duflo, c) {
            let old = self.h.coeff(k);
            self.h.set_coeff(k, old + c)?;
        }
        Ok(())
    }
}

struct Step {
    layout: DegreeLayout,
    nullspace: Vec<Vec<Rational>>,
}

fn inconsistency(
    m: u32,
    keys: &[RowKey],
    row: usize,
    rhs: &Rational,
    inst: &KVInstance,
) -> AlgebraError {
    let a = inst.alphabet();
    let detail = match &keys[row] {
        RowKey::Lie(w) => format!("KVI coordinate [{}] left with {rhs}", a.format_word(w)),
        RowKey::Trace(w) => format!(
            "KVII trace of {} left with {rhs}",
            a.format_word(w.representative())
        ),
    };
    AlgebraError::Inconsistent { weight: m, detail }
}

/// Solve the truncated KV equations degree by degree and certify the result.
pub fn solve_kv(inst: &KVInstance, strategy: Strategy, order: PivotOrder) -> Result<KVSolution> {
    if inst.cut() < 2 {
        return Err(AlgebraError::InvalidParameters(
            "the cut must be at least 2".into(),
        ));
    }
    let (aut, h) = match strategy {
        Strategy::Joint => solve_joint(inst, order)?,
        Strategy::Kv1ThenCorrect => solve_kv1_then_correct(inst, order)?,
    };
    KVSolution::certified(inst.clone(), aut, h)
}

fn top_degree(inst: &KVInstance) -> u32 {
    (inst.cut() - 2).max(inst.trace_cut())
}

fn solve_joint(inst: &KVInstance, order: PivotOrder) -> Result<(Automorphism, ScalarSeries)> {
    let mut state = JointState {
        inst,
        u: TangentialDerivation::zero(inst.alphabet(), inst.cut()),
        h: ScalarSeries::zero(inst.duflo_degree()),
    };
    let mut previous: Option<Step> = None;
    for m in 1..=top_degree(inst) {
        let layout = DegreeLayout::new(inst, m, true);
        let cols = layout.columns(inst, true)?;
        let rhs = state.residual_rows(&layout, true)?;
        let (sys, keys) = build_system(&cols, &[], &rhs);
        let step = match sys.solve(order) {
            AffineSolution::Consistent {
                particular,
                nullspace,
                ..
            } => {
                state.shift(&layout, &particular)?;
                Step { layout, nullspace }
            }
            AffineSolution::Inconsistent { row, rhs: bad } => {
                let Some(prev) = previous.take() else {
                    return Err(inconsistency(m, &keys, row, &bad, inst));
                };
                backtrack(&mut state, &prev, layout, &cols, &rhs, order)
                    .map_err(|_| inconsistency(m, &keys, row, &bad, inst))?
            }
        };
        previous = Some(step);
    }
    Ok((state.u.exp()?, state.h))
}

/// Re-open the previous degree: its free directions become extra unknowns whose effect
/// on the current residual is measured by finite differences, then the step is re-run
/// and re-verified.
fn backtrack(
    state: &mut JointState<'_>,
    prev: &Step,
    layout: DegreeLayout,
    cols: &[BTreeMap<RowKey, Rational>],
    rhs: &BTreeMap<RowKey, Rational>,
    order: PivotOrder,
) -> Result<Step> {
    let mut extra = Vec::with_capacity(prev.nullspace.len());
    for n in &prev.nullspace {
        let saved = (state.u.clone(), state.h.clone());
        state.shift(&prev.layout, n)?;
        let moved = state.residual_rows(&layout, true)?;
        (state.u, state.h) = saved;
        let mut diff = moved;
        for (k, v) in rhs {
            let e = diff.entry(k.clone()).or_insert_with(Rational::zero);
            *e -= v;
        }
        diff.retain(|_, v| !v.is_zero());
        extra.push(diff);
    }
    let (sys, _) = build_system(cols, &extra, rhs);
    let AffineSolution::Consistent {
        particular,
        nullspace,
        ..
    } = sys.solve(order)
    else {
        return Err(AlgebraError::Inconsistent {
            weight: layout.m,
            detail: "still inconsistent after backtracking".into(),
        });
    };
    let n_cur = cols.len();
    let mut prev_shift = vec![Rational::zero(); prev.layout.ncols()];
    for (s, n) in particular[n_cur..].iter().zip(&prev.nullspace) {
        for (p, v) in prev_shift.iter_mut().zip(n) {
            *p += s * v;
        }
    }
    state.shift(&prev.layout, &prev_shift)?;
    state.shift(&layout, &particular[..n_cur])?;
    if !state.residual_rows(&layout, true)?.is_empty() {
        return Err(AlgebraError::Inconsistent {
            weight: layout.m,
            detail: "backtracking step is not affine".into(),
        });
    }
    let nullspace = nullspace.into_iter().map(|v| v[..n_cur].to_vec()).collect();
    Ok(Step { layout, nullspace })
}

fn solve_kv1_then_correct(
    inst: &KVInstance,
    order: PivotOrder,
) -> Result<(Automorphism, ScalarSeries)> {
    let a = inst.alphabet();
    let cut = inst.cut();
    let mut state = JointState {
        inst,
        u: TangentialDerivation::zero(a, cut),
        h: ScalarSeries::zero(inst.duflo_degree()),
    };
    for m in 1..=cut - 2 {
        let layout = DegreeLayout::new(inst, m, false);
        let cols = layout.columns(inst, false)?;
        let rhs = state.residual_rows(&layout, false)?;
        let (sys, keys) = build_system(&cols, &[], &rhs);
        match sys.solve(order) {
            AffineSolution::Consistent { particular, .. } => state.shift(&layout, &particular)?,
            AffineSolution::Inconsistent { row, rhs } => {
                return Err(inconsistency(m, &keys, row, &rhs, inst))
            }
        }
    }
    let mut aut = state.u.exp()?;
    let mut h = state.h;
    for m in 1..=inst.trace_cut() {
        let layout = DegreeLayout::new(inst, m, true);
        let cols = layout.columns(inst, true)?;
        let r2 = inst.kv2_residual_from_j(&divergence::j(&aut)?, &h)?;
        let mut rhs = BTreeMap::new();
        trace_rows(&mut rhs, &r2, m);
        if rhs.is_empty() {
            continue;
        }
        let (sys, keys) = build_system(&cols, &[], &rhs);
        match sys.solve(order) {
            AffineSolution::Consistent { particular, .. } => {
                let (v, c) = layout.assemble(inst, &particular)?;
                aut = aut.compose(&v.exp()?)?;
                if let (Some(k), Some(c)) = (layout.duflo, c) {
                    let old = h.coeff(k);
                    h.set_coeff(k, old + c)?;
                }
            }
            AffineSolution::Inconsistent { row, rhs } => {
                return Err(inconsistency(m, &keys, row, &rhs, inst))
            }
        }
    }
    Ok((aut, h))
}
