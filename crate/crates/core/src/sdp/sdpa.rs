//! SDPA sparse format (`.dat-s`).
//!
//! A block `C + Σ x_i A_i ⪯ 0` is written as `F_0 = C`, `F_i = −A_i`, so
//! that `Σ F_i x_i − F_0 ⪰ 0` holds in the SDPA sense. Values use Rust's
//! shortest round-trip formatting.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::lmi::{AffineSymMatrix, Constraint, LmiProblem, ProblemKind, ProblemMeta, VarId, Variable};

fn is_diagonal(m: &Mat) -> bool {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && m[(i, j)] != 0.0 {
                return false;
            }
        }
    }
    true
}

pub fn export_sdpa(problem: &LmiProblem) -> Result<String> {
    problem.check_well_formed()?;
    let blocks = problem.nsd_blocks();
    if blocks.is_empty() {
        return Err(Error::EmptyProblem);
    }
    let m = problem.num_vars();
    let mut out = String::new();
    writeln!(out, "{m}").unwrap();
    writeln!(out, "{}", blocks.len()).unwrap();
    let sizes: Vec<String> = blocks
        .iter()
        .map(|b| {
            let diag = is_diagonal(&b.constant) && b.terms.iter().all(|(_, c)| is_diagonal(c));
            if diag {
                format!("-{}", b.dim)
            } else {
                format!("{}", b.dim)
            }
        })
        .collect();
    writeln!(out, "{}", sizes.join(" ")).unwrap();
    let mut c = vec![0.0; m];
    if let Some(obj) = &problem.objective {
        for (k, v) in obj {
            c[k.0] += v;
        }
    }
    let cs: Vec<String> = c.iter().map(|v| format!("{v:e}")).collect();
    writeln!(out, "{}", cs.join(" ")).unwrap();
    let mut emit = |var: usize, blk: usize, mat: &Mat, negate: bool| {
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                let v = mat[(i, j)];
                if v != 0.0 {
                    let v = if negate { -v } else { v };
                    writeln!(out, "{var} {blk} {} {} {v:e}", i + 1, j + 1).unwrap();
                }
            }
        }
    };
    for (bk, b) in blocks.iter().enumerate() {
        emit(0, bk + 1, &b.constant, false);
    }
    for (bk, b) in blocks.iter().enumerate() {
        for (id, coeff) in &b.terms {
            emit(id.0 + 1, bk + 1, coeff, true);
        }
    }
    Ok(out)
}

fn clean(line: &str) -> String {
    line.chars()
        .map(|ch| if matches!(ch, ',' | '{' | '}' | '(' | ')') { ' ' } else { ch })
        .collect()
}

/// Parses an SDPA sparse file into an [`LmiProblem`] whose blocks are all
/// plain constraints named `block1`, `block2`, …
pub fn import_sdpa(text: &str) -> Result<LmiProblem> {
    let perr = |line: usize, reason: String| Error::SdpaParse { line, reason };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('*') && !l.starts_with('"'));
    let mut header = |what: &str| -> Result<(usize, Vec<String>)> {
        let (no, l) = lines.next().ok_or_else(|| perr(0, format!("missing {what}")))?;
        Ok((no, clean(l).split_whitespace().map(str::to_string).collect()))
    };
    let (no, toks) = header("variable count")?;
    let m: usize = toks
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(no, "bad variable count".into()))?;
    let (no, toks) = header("block count")?;
    let nb: usize = toks
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(no, "bad block count".into()))?;
    if nb == 0 {
        return Err(Error::EmptyProblem);
    }
    let (no, toks) = header("block sizes")?;
    if toks.len() < nb {
        return Err(perr(no, format!("expected {nb} block sizes")));
    }
    let mut sizes = Vec::with_capacity(nb);
    for t in &toks[..nb] {
        let s: i64 = t.parse().map_err(|_| perr(no, format!("bad block size {t}")))?;
        if s == 0 {
            return Err(perr(no, "zero block size".into()));
        }
        sizes.push((s.unsigned_abs() as usize, s < 0));
    }
    let (no, toks) = header("objective")?;
    if toks.len() < m {
        return Err(perr(no, format!("expected {m} objective entries")));
    }
    let mut c = Vec::with_capacity(m);
    for t in &toks[..m] {
        c.push(t.parse::<f64>().map_err(|_| perr(no, format!("bad objective entry {t}")))?);
    }
    let mut consts: Vec<Mat> = sizes.iter().map(|(d, _)| Mat::zeros(*d, *d)).collect();
    let mut terms: Vec<BTreeMap<usize, Mat>> = vec![BTreeMap::new(); nb];
    for (no, l) in lines {
        let toks: Vec<String> = clean(l).split_whitespace().map(str::to_string).collect();
        if toks.len() != 5 {
            return Err(perr(no, "entry lines need 5 fields".into()));
        }
        let ints: Vec<usize> = toks[..4]
            .iter()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| perr(no, "bad index".into()))?;
        let v: f64 = toks[4].parse().map_err(|_| perr(no, "bad value".into()))?;
        let (var, blk, i, j) = (ints[0], ints[1], ints[2], ints[3]);
        if var > m || blk == 0 || blk > nb {
            return Err(perr(no, "variable or block index out of range".into()));
        }
        let (dim, diag) = sizes[blk - 1];
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(perr(no, "entry index out of range".into()));
        }
        if diag && i != j {
            return Err(perr(no, "off-diagonal entry in a diagonal block".into()));
        }
        let target = if var == 0 {
            &mut consts[blk - 1]
        } else {
            terms[blk - 1].entry(var - 1).or_insert_with(|| Mat::zeros(dim, dim))
        };
        let v = if var == 0 { v } else { -v };
        target[(i - 1, j - 1)] = v;
        target[(j - 1, i - 1)] = v;
    }
    let variables = (0..m)
        .map(|k| Variable {
            id: VarId(k),
            label: format!("x{}", k + 1),
        })
        .collect();
    let constraints = consts
        .into_iter()
        .zip(terms)
        .zip(&sizes)
        .enumerate()
        .map(|(k, ((constant, t), (dim, _)))| Constraint {
            name: format!("block{}", k + 1),
            matrix: AffineSymMatrix {
                dim: *dim,
                constant,
                terms: t.into_iter().map(|(i, c)| (VarId(i), c)).collect(),
            },
        })
        .collect();
    let objective = if c.iter().any(|v| *v != 0.0) {
        Some(
            c.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(k, v)| (VarId(k), *v))
                .collect(),
        )
    } else {
        None
    };
    Ok(LmiProblem {
        variables,
        constraints,
        psd_variables: Vec::new(),
        objective,
        named: BTreeMap::new(),
        meta: ProblemMeta {
            kind: ProblemKind::Imported,
            ..ProblemMeta::custom()
        },
    })
}

/// Reads whitespace-separated `label value` lines into a point for `problem`.
/// Blank lines and lines starting with `#` are ignored; every variable must
/// be given exactly once.
pub fn import_solution(problem: &LmiProblem, text: &str) -> Result<Vec<f64>> {
    let index: HashMap<&str, usize> = problem
        .variables
        .iter()
        .map(|v| (v.label.as_str(), v.id.0))
        .collect();
    let mut point = vec![f64::NAN; problem.num_vars()];
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::SolutionParse { line: k + 1, reason };
        let mut parts = line.split_whitespace();
        let (Some(label), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `label value`".into()));
        };
        let &id = index.get(label).ok_or_else(|| err(format!("unknown variable {label}")))?;
        let v: f64 = value.parse().map_err(|_| err(format!("bad value {value}")))?;
        if !point[id].is_nan() {
            return Err(err(format!("variable {label} given twice")));
        }
        point[id] = v;
    }
    if let Some(k) = point.iter().position(|v| v.is_nan()) {
        return Err(Error::SolutionParse {
            line: 0,
            reason: format!("no value for {}", problem.variables[k].label),
        });
    }
    Ok(point)
}
