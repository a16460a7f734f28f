//! Grid and bisection drivers over the builders and the solver.
//!
//! `δ` is never a decision variable; each driver fans out over a `δ` grid
//! (in parallel), keeps the feasible points whose recovered gains pass the
//! independent eigenvalue check, and selects the smallest `γ` (ties go to
//! the smaller `δ`).

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::benchmarks::log_grid;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, Mat};
use crate::lmi::{
    build_design_problem_with, build_verification_problem, Certificate, DesignOptions, LmiProblem,
};
use crate::model::{DesignMethod, GainTag, ObserverGains, PlantModel, SamplingSpec};
use crate::report::sig12;
use crate::sdp::{solve, SdpSolution, SolverOptions};
use crate::verify::{certificate_from, verify_certificate, VerificationReport};

/// Largest condition estimate accepted when inverting during gain recovery.
pub const MAX_RECOVERY_CONDITION: f64 = 1e12;

/// `50` log-spaced points in `[1e−2, 1e3]`.
pub fn default_delta_grid() -> Vec<f64> {
    log_grid(1e-2, 1e3, 50)
}

/// What the solver is asked for at each grid point.
#[derive(Clone, Debug)]
pub enum Mode {
    /// Synthesise gains with one of the design relaxations.
    Design(DesignMethod),
    /// Keep the gains fixed and search only for the certificate.
    Verify(ObserverGains),
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::Design(m) => m.name().to_string(),
            Mode::Verify(_) => "verify".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DesignRequest {
    pub plant: PlantModel,
    pub mode: Mode,
    pub lambda_t: f64,
    pub t1: f64,
    pub t2: f64,
    pub delta_grid: Vec<f64>,
    /// Fixed `γ`; `None` minimises it.
    pub fixed_gamma: Option<f64>,
    /// Bound on the auxiliary gain variable `J`.
    pub gain_cap: Option<f64>,
    /// Forces `H = −CL` in the cancelling design.
    pub predictor: bool,
    pub solver: SolverOptions,
}

impl DesignRequest {
    pub fn new(plant: PlantModel, mode: Mode, lambda_t: f64, sampling: SamplingSpec) -> Self {
        DesignRequest {
            plant,
            mode,
            lambda_t,
            t1: sampling.t1,
            t2: sampling.t2,
            delta_grid: default_delta_grid(),
            fixed_gamma: None,
            gain_cap: None,
            predictor: false,
            solver: SolverOptions::default(),
        }
    }

    pub fn with_delta_grid(mut self, grid: Vec<f64>) -> Self {
        self.delta_grid = grid;
        self
    }

    pub fn with_t2(mut self, t2: f64) -> Self {
        self.t2 = t2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.plant.ensure_valid()?;
        let bad = |name: &'static str, reason: String| Err(Error::InvalidArgument { name, reason });
        if self.delta_grid.is_empty() {
            return bad("delta_grid", "must not be empty".into());
        }
        if self.delta_grid.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return bad("delta_grid", "entries must be positive and finite".into());
        }
        if self.delta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("delta_grid", "must be strictly ascending".into());
        }
        if !(self.t1 > 0.0 && self.t1 <= self.t2) {
            return bad("sampling", format!("need 0 < T1 <= T2, got T1 = {}, T2 = {}", self.t1, self.t2));
        }
        if !(self.lambda_t >= 0.0) {
            return bad("lambda_t", format!("must be nonnegative, got {}", self.lambda_t));
        }
        if let Mode::Verify(g) = &self.mode {
            crate::model::check_gain_dims(&self.plant, &g.l, &g.h)?;
        }
        Ok(())
    }

    fn options(&self) -> DesignOptions {
        DesignOptions {
            predictor: self.predictor,
            gain_cap: self.gain_cap,
            ..DesignOptions::default()
        }
    }

    fn build(&self, delta: f64, t2: f64) -> Result<LmiProblem> {
        match &self.mode {
            Mode::Design(m) => build_design_problem_with(
                &self.plant,
                *m,
                self.lambda_t,
                delta,
                t2,
                self.fixed_gamma,
                &self.options(),
            ),
            Mode::Verify(g) => build_verification_problem(&self.plant, g, self.lambda_t, delta, t2, self.fixed_gamma),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DesignResult {
    pub gains: ObserverGains,
    pub certificate: Certificate,
    pub solution: SdpSolution,
    pub delta_selected: f64,
    pub report: VerificationReport,
    pub problem: LmiProblem,
}

impl DesignResult {
    pub fn gamma(&self) -> f64 {
        self.certificate.gamma
    }
}

fn checked_inverse(m: &Mat, name: &'static str) -> Result<Mat> {
    let cond = condition_number(m);
    if !(cond <= MAX_RECOVERY_CONDITION) {
        return Err(Error::IllConditionedRecovery { matrix: name, condition: cond });
    }
    m.clone()
        .try_inverse()
        .ok_or(Error::IllConditionedRecovery { matrix: name, condition: f64::INFINITY })
}

/// Gains of a solved design problem:
/// cancelling `L = P1⁻¹J`, `H = P2⁻¹Yᵀ − CL`;
/// slack designs `L = X⁻ᵀJ`, `H = U⁻ᵀW` (zero-order hold: `H = 0`).
pub fn recover_gains(method: DesignMethod, problem: &LmiProblem, solution: &SdpSolution, plant: &PlantModel) -> Result<ObserverGains> {
    let x = &solution.point;
    let get = |name: &str| {
        problem
            .matrix(name, x)
            .ok_or_else(|| Error::Reconstruction(format!("solution has no matrix {name}")))
    };
    let j = get("J")?;
    let (l, h) = match method {
        DesignMethod::PropPred => {
            let l = checked_inverse(&get("P1")?, "P1")? * j;
            let y = get("Y")?;
            let h = checked_inverse(&get("P2")?, "P2")? * y.transpose() - &plant.c * &l;
            (l, h)
        }
        DesignMethod::PropX80 | DesignMethod::PropX8X6 => {
            let l = checked_inverse(&get("X")?.transpose(), "X")? * j;
            let h = checked_inverse(&get("U")?.transpose(), "U")? * get("W")?;
            (l, h)
        }
        DesignMethod::Zoh => {
            let l = checked_inverse(&get("X")?.transpose(), "X")? * j;
            (l, Mat::zeros(plant.ny(), plant.ny()))
        }
    };
    ObserverGains::new(l, h, GainTag::Designed(method))
}

enum Outcome {
    Found(Box<DesignResult>),
    Infeasible(f64),
    Rejected,
}

fn attempt(req: &DesignRequest, delta: f64, t2: f64) -> Outcome {
    let Ok(problem) = req.build(delta, t2) else {
        return Outcome::Rejected;
    };
    let Ok(solution) = solve(&problem, &req.solver) else {
        return Outcome::Rejected;
    };
    if !solution.is_feasible() {
        return Outcome::Infeasible(solution.phase1_slack.unwrap_or(f64::INFINITY));
    }
    let gains = match &req.mode {
        Mode::Design(m) => match recover_gains(*m, &problem, &solution, &req.plant) {
            Ok(g) => g,
            Err(_) => return Outcome::Rejected,
        },
        Mode::Verify(g) => g.clone(),
    };
    let Ok(certificate) = certificate_from(&problem, &solution.point, delta, t2, req.lambda_t) else {
        return Outcome::Rejected;
    };
    match verify_certificate(&req.plant, &gains, &certificate) {
        Ok(report) if report.pass => Outcome::Found(Box::new(DesignResult {
            gains,
            certificate,
            solution,
            delta_selected: delta,
            report,
            problem,
        })),
        _ => Outcome::Rejected,
    }
}

fn best_of(outcomes: Vec<Outcome>) -> Result<DesignResult> {
    let mut best: Option<Box<DesignResult>> = None;
    let mut best_slack = f64::INFINITY;
    for o in outcomes {
        match o {
            Outcome::Found(r) => {
                let better = best.as_ref().is_none_or(|b| {
                    r.gamma() < b.gamma() || (r.gamma() == b.gamma() && r.delta_selected < b.delta_selected)
                });
                if better {
                    best = Some(r);
                }
            }
            Outcome::Infeasible(s) => best_slack = best_slack.min(s),
            Outcome::Rejected => {}
        }
    }
    best.map(|b| *b).ok_or(Error::AllInfeasible { best_slack })
}

fn min_gamma_at(req: &DesignRequest, t2: f64) -> Result<DesignResult> {
    let outcomes: Vec<Outcome> = req.delta_grid.par_iter().map(|&d| attempt(req, d, t2)).collect();
    best_of(outcomes)
}

/// Solves the γ-minimisation at every `δ` of the grid and keeps the best
/// verified point.
pub fn design_min_gamma(req: &DesignRequest) -> Result<DesignResult> {
    req.validate()?;
    min_gamma_at(req, req.t2)
}

/// First verified feasible point of the grid at `t2`, if any.
fn feasible_at(req: &DesignRequest, t2: f64) -> bool {
    req.delta_grid
        .par_iter()
        .find_map_first(|&d| match attempt(req, d, t2) {
            Outcome::Found(_) => Some(()),
            _ => None,
        })
        .is_some()
}

#[derive(Clone, Debug)]
pub struct T2Search {
    pub t2_star: f64,
    /// Smallest-`γ` result at `t2_star`.
    pub result: DesignResult,
    /// Smallest probed infeasible `T2`, or the range cap.
    pub upper: f64,
    /// The range cap itself was feasible.
    pub hit_cap: bool,
    pub probes: Vec<(f64, bool)>,
}

/// Bisection on `T2 ∈ [lo, hi]` until the bracket is narrower than
/// `1e−4 · hi`. Every infeasibility verdict has tried the whole `δ` grid.
pub fn maximize_t2(req: &DesignRequest, lo: f64, hi: f64) -> Result<T2Search> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidArgument {
            name: "T2 range",
            reason: format!("need 0 < lo <= hi, got [{lo}, {hi}]"),
        });
    }
    req.clone().with_t2(hi.max(req.t1)).validate()?;
    let mut probes = Vec::new();
    let ok = feasible_at(req, lo);
    probes.push((lo, ok));
    if !ok {
        return Err(Error::InfeasibleAtLowerBound { lower: lo });
    }
    let (mut a, mut b) = (lo, hi);
    let mut hit_cap = false;
    if hi > lo {
        let ok = feasible_at(req, hi);
        probes.push((hi, ok));
        if ok {
            a = hi;
            hit_cap = true;
        } else {
            while b - a >= 1e-4 * hi {
                let mid = 0.5 * (a + b);
                let ok = feasible_at(req, mid);
                probes.push((mid, ok));
                if ok {
                    a = mid;
                } else {
                    b = mid;
                }
            }
        }
    } else {
        hit_cap = true;
    }
    let result = min_gamma_at(req, a)?;
    Ok(T2Search {
        t2_star: a,
        result,
        upper: b,
        hit_cap,
        probes,
    })
}

#[derive(Clone, Debug)]
pub struct TradeoffPoint {
    pub t2: f64,
    pub gamma: f64,
    pub delta: f64,
    pub result: DesignResult,
}

#[derive(Clone, Debug)]
pub struct TradeoffCurve {
    pub label: String,
    pub points: Vec<TradeoffPoint>,
    /// Grid values with no verified feasible `δ`.
    pub infeasible: Vec<f64>,
}

impl TradeoffCurve {
    /// `T2,gamma,delta,method`, one row per feasible point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T2,gamma,delta,method\n");
        for p in &self.points {
            writeln!(out, "{},{},{},{}", sig12(p.t2), sig12(p.gamma), sig12(p.delta), self.label).unwrap();
        }
        out
    }
}

/// One γ-minimisation per `T2` of the grid.
pub fn pareto_sweep(req: &DesignRequest, t2_grid: &[f64]) -> Result<TradeoffCurve> {
    if t2_grid.is_empty() {
        return Err(Error::InvalidArgument {
            name: "T2 grid",
            reason: "must not be empty".into(),
        });
    }
    let mut grid = t2_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut curve = TradeoffCurve {
        label: req.mode.label(),
        points: Vec::new(),
        infeasible: Vec::new(),
    };
    for t2 in grid {
        let r = req.clone().with_t2(t2);
        r.validate()?;
        match min_gamma_at(&r, t2) {
            Ok(result) => curve.points.push(TradeoffPoint {
                t2,
                gamma: result.gamma(),
                delta: result.delta_selected,
                result,
            }),
            Err(Error::AllInfeasible { .. }) => curve.infeasible.push(t2),
            Err(e) => return Err(e),
        }
    }
    Ok(curve)
}

/// Fixed-gain re-analysis over `(δ, T2)`: the largest feasible `T2` of the
/// grid and the smallest `γ` found there.
pub fn two_stage_refine(
    plant: &PlantModel,
    gains: &ObserverGains,
    delta_grid: &[f64],
    t2_grid: &[f64],
    lambda_t: f64,
    solver: &SolverOptions,
) -> Result<DesignResult> {
    let mut grid = t2_grid.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    let t1 = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best_slack = f64::INFINITY;
    for t2 in grid {
        let req = DesignRequest {
            plant: plant.clone(),
            mode: Mode::Verify(gains.clone()),
            lambda_t,
            t1,
            t2,
            delta_grid: delta_grid.to_vec(),
            fixed_gamma: None,
            gain_cap: None,
            predictor: false,
            solver: solver.clone(),
        };
        req.validate()?;
        match min_gamma_at(&req, t2) {
            Ok(r) => return Ok(r),
            Err(Error::AllInfeasible { best_slack: s }) => best_slack = best_slack.min(s),
            Err(e) => return Err(e),
        }
    }
    Err(Error::AllInfeasible { best_slack })
}
