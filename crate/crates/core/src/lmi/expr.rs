//! Matrices affine in scalar decision variables.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::linalg::{symmetrize, Mat};

/// Index of a scalar decision variable. Indices are dense from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub id: VarId,
    pub label: String,
}

/// `constant + Σ x_i · coeff_i`, all terms of the same shape.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineExpr {
    pub constant: Mat,
    pub terms: BTreeMap<VarId, Mat>,
}

impl AffineExpr {
    pub fn constant(m: Mat) -> Self {
        AffineExpr {
            constant: m,
            terms: BTreeMap::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(Mat::zeros(rows, cols))
    }

    pub fn term(id: VarId, coeff: Mat) -> Self {
        let mut e = Self::zeros(coeff.nrows(), coeff.ncols());
        e.terms.insert(id, coeff);
        e
    }

    pub fn nrows(&self) -> usize {
        self.constant.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.constant.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.constant.shape()
    }

    fn map(&self, f: impl Fn(&Mat) -> Mat) -> Self {
        AffineExpr {
            constant: f(&self.constant),
            terms: self.terms.iter().map(|(k, v)| (*k, f(v))).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        self.map(|m| m.transpose())
    }

    /// `m · self`.
    pub fn lmul(&self, m: &Mat) -> Self {
        self.map(|x| m * x)
    }

    /// `self · m`.
    pub fn rmul(&self, m: &Mat) -> Self {
        self.map(|x| x * m)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| x * s)
    }

    /// `self + selfᵀ`.
    pub fn he(&self) -> Self {
        self + &self.transpose()
    }

    /// For a `1×1` expression `s`, the matrix expression `s · m`.
    pub fn scalar_times(&self, m: &Mat) -> Self {
        assert_eq!(self.shape(), (1, 1), "scalar_times needs a 1x1 expression");
        AffineExpr {
            constant: m * self.constant[(0, 0)],
            terms: self.terms.iter().map(|(k, v)| (*k, m * v[(0, 0)])).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Mat {
        let mut out = self.constant.clone();
        for (id, c) in &self.terms {
            out += c * x[id.0];
        }
        out
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.terms.keys().copied()
    }

    fn add_scaled(&mut self, other: &AffineExpr, s: f64) {
        assert_eq!(self.shape(), other.shape(), "affine shapes differ");
        self.constant += &other.constant * s;
        for (id, c) in &other.terms {
            self.terms
                .entry(*id)
                .and_modify(|m| *m += c * s)
                .or_insert_with(|| c * s);
        }
    }

    /// Block matrix; `None` entries are zero blocks.
    pub fn block(grid: &[Vec<Option<AffineExpr>>], rows: &[usize], cols: &[usize]) -> Self {
        let tr: usize = rows.iter().sum();
        let tc: usize = cols.iter().sum();
        let mut out = AffineExpr::zeros(tr, tc);
        let mut r0 = 0;
        for (bi, row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (bj, entry) in row.iter().enumerate() {
                if let Some(e) = entry {
                    assert_eq!(e.shape(), (rows[bi], cols[bj]), "block ({bi},{bj}) has wrong shape");
                    out.constant.view_mut((r0, c0), e.shape()).copy_from(&e.constant);
                    for (id, c) in &e.terms {
                        let slot = out.terms.entry(*id).or_insert_with(|| Mat::zeros(tr, tc));
                        slot.view_mut((r0, c0), c.shape()).copy_from(c);
                    }
                }
                c0 += cols[bj];
            }
            r0 += rows[bi];
        }
        out
    }

    /// Symmetric block matrix from the upper triangle; `upper[i][j - i]` is block `(i, j)`.
    pub fn sym_block(upper: &[Vec<Option<AffineExpr>>], sizes: &[usize]) -> Self {
        let k = sizes.len();
        let mut grid: Vec<Vec<Option<AffineExpr>>> = vec![vec![None; k]; k];
        for i in 0..k {
            for j in i..k {
                if let Some(e) = upper[i].get(j - i).cloned().flatten() {
                    if i != j {
                        grid[j][i] = Some(e.transpose());
                    }
                    grid[i][j] = Some(e);
                }
            }
        }
        Self::block(&grid, sizes, sizes)
    }
}

impl From<Mat> for AffineExpr {
    fn from(m: Mat) -> Self {
        AffineExpr::constant(m)
    }
}

impl Add<&AffineExpr> for &AffineExpr {
    type Output = AffineExpr;
    fn add(self, rhs: &AffineExpr) -> AffineExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub<&AffineExpr> for &AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: &AffineExpr) -> AffineExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Add for AffineExpr {
    type Output = AffineExpr;
    fn add(mut self, rhs: AffineExpr) -> AffineExpr {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

impl Sub for AffineExpr {
    type Output = AffineExpr;
    fn sub(mut self, rhs: AffineExpr) -> AffineExpr {
        self.add_scaled(&rhs, -1.0);
        self
    }
}

impl Add<&Mat> for AffineExpr {
    type Output = AffineExpr;
    fn add(mut self, rhs: &Mat) -> AffineExpr {
        self.constant += rhs;
        self
    }
}

impl Sub<&Mat> for AffineExpr {
    type Output = AffineExpr;
    fn sub(mut self, rhs: &Mat) -> AffineExpr {
        self.constant -= rhs;
        self
    }
}

impl Neg for &AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        self.scale(-1.0)
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &AffineExpr {
    type Output = AffineExpr;
    fn mul(self, s: f64) -> AffineExpr {
        self.scale(s)
    }
}

impl Mul<f64> for AffineExpr {
    type Output = AffineExpr;
    fn mul(self, s: f64) -> AffineExpr {
        self.scale(s)
    }
}

/// A square affine matrix with symmetric constant and coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSymMatrix {
    pub dim: usize,
    pub constant: Mat,
    pub terms: Vec<(VarId, Mat)>,
}

impl AffineSymMatrix {
    /// Symmetrises every part of a square expression and drops zero terms.
    pub fn from_expr(e: &AffineExpr) -> Self {
        assert_eq!(e.nrows(), e.ncols(), "constraint expression must be square");
        AffineSymMatrix {
            dim: e.nrows(),
            constant: symmetrize(&e.constant),
            terms: e
                .terms
                .iter()
                .filter(|(_, c)| c.iter().any(|v| *v != 0.0))
                .map(|(k, c)| (*k, symmetrize(c)))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Mat {
        let mut out = self.constant.clone();
        for (id, c) in &self.terms {
            out += c * x[id.0];
        }
        out
    }

    pub fn to_expr(&self) -> AffineExpr {
        AffineExpr {
            constant: self.constant.clone(),
            terms: self.terms.iter().cloned().collect(),
        }
    }
}
