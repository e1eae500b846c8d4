//! Exact rational linear algebra: sparse reduced row echelon form, particular solutions
//! and nullspace bases.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

/// Order in which columns are offered as pivots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PivotOrder {
    /// First nonzero column in the natural variable order.
    #[default]
    Natural,
    /// First nonzero column scanning the variables from the last one.
    Reversed,
}

impl std::str::FromStr for PivotOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "natural" => Ok(PivotOrder::Natural),
            "reversed" => Ok(PivotOrder::Reversed),
            other => Err(format!("unknown pivot order `{other}`")),
        }
    }
}

/// `A t = b` with sparse rows.
#[derive(Clone, Debug, Default)]
pub struct AffineSystem {
    ncols: usize,
    rows: Vec<SparseRow>,
    rhs: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Consistent {
        /// Free variables set to zero.
        particular: Vec<Rational>,
        nullspace: Vec<Vec<Rational>>,
        pivot_columns: Vec<usize>,
    },
    /// A reduced row `0 = rhs` with `rhs != 0`; `row` indexes the input rows.
    Inconsistent { row: usize, rhs: Rational },
}

impl AffineSolution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, AffineSolution::Consistent { .. })
    }
}

impl AffineSystem {
    pub fn new(ncols: usize) -> Self {
        AffineSystem {
            ncols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, row: SparseRow, rhs: Rational) {
        debug_assert!(row.keys().all(|&c| c < self.ncols));
        let row = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn push_dense(&mut self, row: &[Rational], rhs: Rational) {
        let sparse = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        self.push_row(sparse, rhs);
    }

    /// `A t - b`, one entry per row.
    pub fn residual(&self, t: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let mut s = -b.clone();
                for (c, v) in row {
                    s += v * &t[*c];
                }
                s
            })
            .collect()
    }

    pub fn solve(&self, order: PivotOrder) -> AffineSolution {
        let columns: Vec<usize> = match order {
            PivotOrder::Natural => (0..self.ncols).collect(),
            PivotOrder::Reversed => (0..self.ncols).rev().collect(),
        };
        let mut rows: Vec<(SparseRow, Rational, usize)> = self
            .rows
            .iter()
            .cloned()
            .zip(self.rhs.iter().cloned())
            .enumerate()
            .map(|(i, (r, b))| (r, b, i))
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (column, row position)
        let mut next = 0;
        for &col in &columns {
            // The reduced form only depends on the column order, so any row with a
            // nonzero entry may serve as pivot; the sparsest one limits fill-in.
            let Some(found) = (next..rows.len())
                .filter(|&i| rows[i].0.contains_key(&col))
                .min_by_key(|&i| rows[i].0.len())
            else {
                continue;
            };
            rows.swap(next, found);
            let inv = Rational::one() / &rows[next].0[&col];
            if !inv.is_one() {
                let (r, b, _) = &mut rows[next];
                for v in r.values_mut() {
                    *v *= &inv;
                }
                *b *= &inv;
            }
            let (pivot_row, pivot_rhs, _) = rows[next].clone();
            for (i, (r, b, _)) in rows.iter_mut().enumerate() {
                if i == next {
                    continue;
                }
                let Some(f) = r.get(&col).cloned() else {
                    continue;
                };
                for (c, v) in &pivot_row {
                    let e = r.entry(*c).or_insert_with(Rational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        r.remove(c);
                    }
                }
                *b -= &f * &pivot_rhs;
            }
            pivots.push((col, next));
            next += 1;
        }
        if let Some((_, b, orig)) = rows[next..].iter().find(|(_, b, _)| !b.is_zero()) {
            return AffineSolution::Inconsistent {
                row: *orig,
                rhs: b.clone(),
            };
        }
        let mut particular = vec![Rational::zero(); self.ncols];
        let mut is_pivot = vec![false; self.ncols];
        for &(col, pos) in &pivots {
            particular[col] = rows[pos].1.clone();
            is_pivot[col] = true;
        }
        let mut nullspace = Vec::new();
        for &free in &columns {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![Rational::zero(); self.ncols];
            v[free] = Rational::one();
            for &(col, pos) in &pivots {
                if let Some(a) = rows[pos].0.get(&free) {
                    v[col] = -a.clone();
                }
            }
            nullspace.push(v);
        }
        AffineSolution::Consistent {
            particular,
            nullspace,
            pivot_columns: pivots.iter().map(|(c, _)| *c).collect(),
        }
    }
}
