use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{eye, max_abs, min_eig, Mat};
use crate::lmi::expr::{AffineExpr, AffineSymMatrix, VarId, Variable};
use crate::model::DesignMethod;

/// Margin factor for nonstrict `⪯ 0` conditions.
pub const NONSTRICT_MARGIN: f64 = 1e-9;
/// Margin factor for strict `≺ 0` conditions.
pub const STRICT_MARGIN: f64 = 1e-7;
/// Lower eigenvalue bound imposed on Lyapunov matrices.
pub const PD_MARGIN: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    NonStrict,
    Strict,
}

impl Strictness {
    /// Absolute margin for a constraint whose constant part is `constant`.
    pub fn margin(self, constant: &Mat) -> f64 {
        let base = match self {
            Strictness::NonStrict => NONSTRICT_MARGIN,
            Strictness::Strict => STRICT_MARGIN,
        };
        base * (1.0 + max_abs(constant))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorollaryVariant {
    /// Performance rows and columns removed.
    NoGamma,
    /// Zero decay rate with a fixed gain level.
    NoLambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Verification,
    Design(DesignMethod),
    Existence,
    Corollary(CorollaryVariant),
    Imported,
    Custom,
}

/// Parameters a problem was built with.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemMeta {
    pub kind: ProblemKind,
    pub delta: Option<f64>,
    pub t2: Option<f64>,
    pub lambda_t: Option<f64>,
    pub fixed_gamma: Option<f64>,
}

impl ProblemMeta {
    pub fn custom() -> Self {
        ProblemMeta {
            kind: ProblemKind::Custom,
            delta: None,
            t2: None,
            lambda_t: None,
            fixed_gamma: None,
        }
    }
}

/// `matrix ⪯ 0`; any margin is already folded into the constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub matrix: AffineSymMatrix,
}

/// `matrix ⪰ margin · I` for a symmetric matrix variable.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdBlock {
    pub name: String,
    pub matrix: AffineSymMatrix,
    pub margin: f64,
}

impl PsdBlock {
    pub fn dim(&self) -> usize {
        self.matrix.dim
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmiProblem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub psd_variables: Vec<PsdBlock>,
    /// Linear objective to minimise; `None` for pure feasibility.
    pub objective: Option<BTreeMap<VarId, f64>>,
    pub named: BTreeMap<String, AffineExpr>,
    pub meta: ProblemMeta,
}

impl LmiProblem {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Every condition written as `F(x) ⪯ 0`: constraints first, then
    /// `−P + margin I` for each positive-definite block.
    pub fn nsd_blocks(&self) -> Vec<AffineSymMatrix> {
        let mut out: Vec<AffineSymMatrix> = self.constraints.iter().map(|c| c.matrix.clone()).collect();
        for p in &self.psd_variables {
            out.push(AffineSymMatrix {
                dim: p.dim(),
                constant: -&p.matrix.constant + eye(p.dim()) * p.margin,
                terms: p.matrix.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            });
        }
        out
    }

    pub fn block_names(&self) -> Vec<String> {
        self.constraints
            .iter()
            .map(|c| c.name.clone())
            .chain(self.psd_variables.iter().map(|p| format!("{} > 0", p.name)))
            .collect()
    }

    /// Value of a named matrix at a point.
    pub fn matrix(&self, name: &str, x: &[f64]) -> Option<Mat> {
        self.named.get(name).map(|e| e.eval(x))
    }

    pub fn scalar(&self, name: &str, x: &[f64]) -> Option<f64> {
        self.matrix(name, x).map(|m| m[(0, 0)])
    }

    pub fn objective_value(&self, x: &[f64]) -> Option<f64> {
        self.objective
            .as_ref()
            .map(|c| c.iter().map(|(k, v)| v * x[k.0]).sum())
    }

    pub fn var_by_label(&self, label: &str) -> Option<VarId> {
        self.variables.iter().find(|v| v.label == label).map(|v| v.id)
    }

    /// Checks that variable ids are dense, labels unique, and that every
    /// block refers only to declared variables.
    pub fn check_well_formed(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (k, v) in self.variables.iter().enumerate() {
            if v.id.0 != k {
                return Err(Error::InvalidArgument {
                    name: "variables",
                    reason: format!("variable {} has id {}", k, v.id.0),
                });
            }
            if !seen.insert(v.label.as_str()) {
                return Err(Error::InvalidArgument {
                    name: "variables",
                    reason: format!("duplicate label {}", v.label),
                });
            }
        }
        let n = self.num_vars();
        for b in self.nsd_blocks() {
            for (id, c) in &b.terms {
                if id.0 >= n || c.shape() != (b.dim, b.dim) {
                    return Err(Error::InvalidArgument {
                        name: "constraints",
                        reason: format!("term for variable {} is out of range or misshapen", id.0),
                    });
                }
            }
        }
        if let Some(obj) = &self.objective {
            if obj.keys().any(|id| id.0 >= n) {
                return Err(Error::InvalidArgument {
                    name: "objective",
                    reason: "objective refers to an undeclared variable".into(),
                });
            }
        }
        Ok(())
    }
}

/// Incrementally declares variables and constraints.
#[derive(Debug, Default)]
pub struct ProblemBuilder {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    psd: Vec<PsdBlock>,
    named: BTreeMap<String, AffineExpr>,
    objective: Option<BTreeMap<VarId, f64>>,
}

impl ProblemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn new_var(&mut self, label: String) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(Variable { id, label });
        id
    }

    pub fn scalar(&mut self, name: &str) -> AffineExpr {
        let id = self.new_var(name.to_string());
        let e = AffineExpr::term(id, Mat::identity(1, 1));
        self.named.insert(name.to_string(), e.clone());
        e
    }

    /// Symmetric `n×n` matrix variable; one scalar per upper-triangle entry.
    pub fn sym_matrix(&mut self, name: &str, n: usize) -> AffineExpr {
        let mut e = AffineExpr::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let id = self.new_var(format!("{name}[{i}][{j}]"));
                let mut c = Mat::zeros(n, n);
                c[(i, j)] = 1.0;
                c[(j, i)] = 1.0;
                e.terms.insert(id, c);
            }
        }
        self.named.insert(name.to_string(), e.clone());
        e
    }

    /// Unstructured `r×c` matrix variable.
    pub fn full_matrix(&mut self, name: &str, r: usize, c: usize) -> AffineExpr {
        let mut e = AffineExpr::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                let id = self.new_var(format!("{name}[{i}][{j}]"));
                let mut m = Mat::zeros(r, c);
                m[(i, j)] = 1.0;
                e.terms.insert(id, m);
            }
        }
        self.named.insert(name.to_string(), e.clone());
        e
    }

    /// Records an expression so its value can be read back from a solution.
    pub fn name(&mut self, name: &str, e: AffineExpr) {
        self.named.insert(name.to_string(), e);
    }

    /// `expr ⪯ −margin · I`.
    pub fn nsd(&mut self, name: &str, expr: &AffineExpr, strictness: Strictness) {
        let mut m = AffineSymMatrix::from_expr(expr);
        let margin = strictness.margin(&m.constant);
        m.constant -= eye(m.dim) * margin;
        self.constraints.push(Constraint {
            name: name.to_string(),
            matrix: m,
        });
    }

    /// `expr ⪯ 0` exactly as given.
    pub fn nsd_raw(&mut self, name: &str, m: AffineSymMatrix) {
        self.constraints.push(Constraint {
            name: name.to_string(),
            matrix: m,
        });
    }

    /// `expr ⪰ PD_MARGIN · I`.
    pub fn positive_definite(&mut self, name: &str, expr: &AffineExpr) {
        self.psd.push(PsdBlock {
            name: name.to_string(),
            matrix: AffineSymMatrix::from_expr(expr),
            margin: PD_MARGIN,
        });
    }

    pub fn minimize(&mut self, expr: &AffineExpr) {
        assert_eq!(expr.shape(), (1, 1), "objective must be scalar");
        self.objective = Some(expr.terms.iter().map(|(k, v)| (*k, v[(0, 0)])).collect());
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn finish(self, meta: ProblemMeta) -> LmiProblem {
        LmiProblem {
            variables: self.variables,
            constraints: self.constraints,
            psd_variables: self.psd,
            objective: self.objective,
            named: self.named,
            meta,
        }
    }
}

/// Lyapunov and performance data for the hybrid error system.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub p1: Mat,
    pub p2: Mat,
    pub delta: f64,
    pub chi: f64,
    pub lambda_t: f64,
    pub gamma: f64,
    pub t2: f64,
}

impl Certificate {
    pub fn check(&self, linear: bool) -> Result<()> {
        let bad = |reason: String| Error::InvalidArgument {
            name: "certificate",
            reason,
        };
        if min_eig(&self.p1) <= 0.0 || min_eig(&self.p2) <= 0.0 {
            return Err(bad("P1 and P2 must be positive definite".into()));
        }
        if self.chi < 0.0 || (!linear && self.chi == 0.0) {
            return Err(bad(format!("chi = {} not allowed", self.chi)));
        }
        if !(self.delta > 0.0 && self.t2 > 0.0 && self.gamma >= 0.0 && self.lambda_t >= 0.0) {
            return Err(bad("delta, T2 must be positive and gamma, lambda_t nonnegative".into()));
        }
        Ok(())
    }
}
