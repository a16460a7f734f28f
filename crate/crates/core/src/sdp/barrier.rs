//! Dense primal log-det barrier path following with a slack phase 1.

use nalgebra::Cholesky;

use crate::linalg::{eye, max_abs, min_eig, Mat, Vector};
use crate::lmi::LmiProblem;
use crate::sdp::{residual, SdpSolution, SolveStatus, SolverOptions};

/// `G(x) = g0 + Σ x_i g_i ⪰ 0` (optionally `+ s I` in phase 1).
struct Block {
    dim: usize,
    g0: Mat,
    terms: Vec<(usize, Mat)>,
}

struct Barrier<'a> {
    blocks: &'a [Block],
    n: usize,
    /// Index of the phase-1 slack, which enters every block as `+ s I`.
    slack: Option<usize>,
    box_bound: f64,
    /// Number of variables under the box barrier.
    boxed: usize,
}

struct Local {
    value: f64,
    grad: Vector,
    hess: Mat,
}

impl Barrier<'_> {
    fn degree(&self) -> f64 {
        (self.blocks.iter().map(|b| b.dim).sum::<usize>() + 2 * self.boxed) as f64
    }

    fn g(&self, b: &Block, x: &[f64]) -> Mat {
        let mut g = b.g0.clone();
        for (i, gi) in &b.terms {
            if x[*i] != 0.0 {
                g += gi * x[*i];
            }
        }
        if let Some(s) = self.slack {
            for k in 0..b.dim {
                g[(k, k)] += x[s];
            }
        }
        g
    }

    fn inside_box(&self, x: &[f64]) -> bool {
        x[..self.boxed].iter().all(|v| v.abs() < self.box_bound)
    }

    /// Barrier value only; `None` outside the domain.
    fn value(&self, x: &[f64]) -> Option<f64> {
        if !self.inside_box(x) {
            return None;
        }
        let mut v = 0.0;
        for b in self.blocks {
            let chol = Cholesky::new(self.g(b, x))?;
            v -= 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        }
        for xi in &x[..self.boxed] {
            v -= (self.box_bound - xi).ln() + (self.box_bound + xi).ln();
        }
        Some(v)
    }

    /// Value, gradient, and Hessian of the barrier.
    fn local(&self, x: &[f64]) -> Option<Local> {
        if !self.inside_box(x) {
            return None;
        }
        let mut value = 0.0;
        let mut grad = Vector::zeros(self.n);
        let mut hess = Mat::zeros(self.n, self.n);
        for b in self.blocks {
            let chol = Cholesky::new(self.g(b, x))?;
            let l = chol.l();
            value -= 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
            let m = b.dim;
            let mut idx: Vec<usize> = b.terms.iter().map(|(i, _)| *i).collect();
            let mut coeffs: Vec<&Mat> = b.terms.iter().map(|(_, c)| c).collect();
            let id = eye(m);
            if let Some(s) = self.slack {
                idx.push(s);
                coeffs.push(&id);
            }
            let mut k = Mat::zeros(idx.len(), m * m);
            for (r, c) in coeffs.iter().enumerate() {
                let y = l.solve_lower_triangular(c)?;
                let w = l.solve_lower_triangular(&y.transpose())?;
                grad[idx[r]] -= w.trace();
                k.row_mut(r).copy_from_slice(w.as_slice());
            }
            let kk = &k * k.transpose();
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    hess[(i, j)] += kk[(r, c)];
                }
            }
        }
        for (i, xi) in x[..self.boxed].iter().enumerate() {
            let (u, d) = (self.box_bound - xi, self.box_bound + xi);
            value -= u.ln() + d.ln();
            grad[i] += 1.0 / u - 1.0 / d;
            hess[(i, i)] += 1.0 / (u * u) + 1.0 / (d * d);
        }
        Some(Local { value, grad, hess })
    }
}

fn solve_spd(h: &Mat, rhs: &Vector) -> Option<Vector> {
    let d: Vector = h.diagonal().map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 });
    let mut hs = h.clone();
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            hs[(i, j)] *= d[i] * d[j];
        }
    }
    let rs = rhs.component_mul(&d);
    let mut reg = 0.0;
    for _ in 0..12 {
        let mut hr = hs.clone();
        for k in 0..h.nrows() {
            hr[(k, k)] += reg;
        }
        if let Some(c) = Cholesky::new(hr) {
            return Some(c.solve(&rs).component_mul(&d));
        }
        reg = if reg == 0.0 { 1e-14 } else { reg * 100.0 };
    }
    None
}

enum Centering {
    Converged,
    Stalled,
    Failed,
}

/// Damped Newton on `t cᵀx + φ(x)`; `on_step` sees every accepted iterate.
fn center(
    bar: &Barrier<'_>,
    c: &Vector,
    t: f64,
    x: &mut Vec<f64>,
    newton_steps: &mut usize,
    mut on_step: impl FnMut(&[f64]) -> bool,
) -> Centering {
    const MAX_STEPS: usize = 100;
    for _ in 0..MAX_STEPS {
        let Some(loc) = bar.local(x) else {
            return Centering::Failed;
        };
        let xv = Vector::from_column_slice(x);
        let grad = c * t + &loc.grad;
        let Some(dx) = solve_spd(&loc.hess, &(-&grad)) else {
            return Centering::Failed;
        };
        let dec2 = -grad.dot(&dx);
        if !dec2.is_finite() {
            return Centering::Failed;
        }
        if dec2 <= 1e-10 {
            return Centering::Converged;
        }
        let f0 = t * c.dot(&xv) + loc.value;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = (&xv + &dx * alpha).iter().copied().collect();
            if let Some(v) = bar.value(&trial) {
                let f1 = t * c.dot(&Vector::from_column_slice(&trial)) + v;
                if f1 <= f0 - 0.25 * alpha * dec2 {
                    *x = trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        *newton_steps += 1;
        if !accepted {
            return Centering::Stalled;
        }
        if on_step(x) {
            return Centering::Converged;
        }
    }
    Centering::Stalled
}

pub(crate) fn solve_impl(problem: &LmiProblem, opts: &SolverOptions) -> SdpSolution {
    let n = problem.num_vars();
    let nsd = problem.nsd_blocks();
    let mut blocks: Vec<Block> = Vec::with_capacity(nsd.len());
    for b in &nsd {
        let s = if opts.scaling {
            let m = max_abs(&b.constant);
            if m > 0.0 {
                m
            } else {
                b.terms.iter().map(|(_, c)| max_abs(c)).fold(0.0, f64::max).max(1.0)
            }
        } else {
            1.0
        };
        blocks.push(Block {
            dim: b.dim,
            g0: -&b.constant / s,
            terms: b.terms.iter().map(|(id, c)| (id.0, -c / s)).collect(),
        });
    }
    let obj = {
        let mut c = Vector::zeros(n);
        if let Some(o) = &problem.objective {
            for (k, v) in o {
                c[k.0] += v;
            }
        }
        c
    };
    let has_objective = obj.iter().any(|v| *v != 0.0);
    let mut sol = SdpSolution::empty(n);

    // phase 1
    let mut x = vec![0.0; n];
    let worst = blocks
        .iter()
        .map(|b| if b.dim == 0 { f64::INFINITY } else { min_eig(&b.g0) })
        .fold(f64::INFINITY, f64::min);
    let target = if has_objective { 0.0 } else { -opts.feasibility_target };
    let mut stages = 0;
    let mut newton_steps = 0;
    if !(worst > -target) {
        let bar = Barrier {
            blocks: &blocks,
            n: n + 1,
            slack: Some(n),
            box_bound: opts.box_bound,
            boxed: n,
        };
        let mut xs = x.clone();
        xs.push(-worst + 1.0);
        let mut c1 = Vector::zeros(n + 1);
        c1[n] = 1.0;
        let theta = bar.degree();
        let mut t = 1.0;
        let mut best = xs[n];
        sol.phase1_history.push(best);
        let reached;
        loop {
            stages += 1;
            let history = &mut sol.phase1_history;
            let status = center(&bar, &c1, t, &mut xs, &mut newton_steps, |p| {
                best = best.min(p[n]);
                history.push(best);
                p[n] < target
            });
            if xs[n] < target {
                reached = true;
                break;
            }
            if let Centering::Failed = status {
                sol.status = SolveStatus::NumericalFailure;
                sol.message = "phase 1 left the barrier domain".into();
                sol.iterations = stages;
                sol.phase1_slack = Some(best);
                return sol;
            }
            let lower = xs[n] - theta / t;
            if lower > 0.0 || theta / t <= opts.tolerance * (1.0 + xs[n].abs()) {
                reached = false;
                break;
            }
            if stages >= opts.max_iterations {
                sol.status = SolveStatus::NumericalFailure;
                sol.message = "phase 1 iteration limit".into();
                sol.iterations = stages;
                sol.phase1_slack = Some(best);
                return sol;
            }
            t /= opts.barrier_reduction;
        }
        sol.phase1_slack = Some(best);
        if !reached {
            sol.status = SolveStatus::Infeasible;
            sol.iterations = stages;
            sol.point = xs[..n].to_vec();
            sol.message = format!("phase 1 slack bottomed out at {best:e}");
            finish_residuals(problem, &mut sol);
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
        xs.truncate(n);
        x = xs;
    } else {
        sol.phase1_slack = Some(-worst);
        sol.phase1_history.push(-worst);
    }

    // phase 2
    if has_objective {
        let bar = Barrier {
            blocks: &blocks,
            n,
            slack: None,
            box_bound: opts.box_bound,
            boxed: n,
        };
        let theta = bar.degree();
        let mut t = 1.0;
        let mut last_good = x.clone();
        loop {
            stages += 1;
            let status = center(&bar, &obj, t, &mut x, &mut newton_steps, |_| false);
            match status {
                Centering::Failed => {
                    x = last_good.clone();
                    sol.message = "stopped early: barrier domain lost".into();
                    break;
                }
                Centering::Converged | Centering::Stalled => last_good = x.clone(),
            }
            let objv = obj.dot(&Vector::from_column_slice(&x));
            if theta / t <= opts.tolerance * (1.0 + objv.abs()) {
                break;
            }
            if stages >= opts.max_iterations {
                sol.message = "iteration limit in phase 2".into();
                break;
            }
            t /= opts.barrier_reduction;
        }
    }
    sol.point = x;
    sol.iterations = stages;
    sol.newton_steps = newton_steps;
    sol.status = SolveStatus::Feasible;
    finish_residuals(problem, &mut sol);
    sol
}

fn finish_residuals(problem: &LmiProblem, sol: &mut SdpSolution) {
    let res = residual(problem, &sol.point);
    let scales = crate::sdp::block_scales(problem);
    let worst = res
        .iter()
        .zip(&scales)
        .map(|(r, s)| r / s)
        .fold(f64::NEG_INFINITY, f64::max);
    sol.max_constraint_eig = worst;
    sol.objective_value = problem.objective_value(&sol.point);
    if sol.status == SolveStatus::Feasible && !(worst <= crate::sdp::FEASIBILITY_TOL) {
        sol.status = SolveStatus::NumericalFailure;
        sol.message = format!("residual check failed: {worst:e}");
    }
}
