//! Independent re-checks of certificates, trajectories, and time domains.
//!
//! Nothing here calls the SDP solver; every decision is an eigenvalue or a
//! direct evaluation along a simulated arc.

use serde::Serialize;

use crate::benchmarks::lin_grid;
use crate::error::{Error, Result};
use crate::linalg::{eye, he, max_abs, max_eig, min_eig, sym_block, Mat, Vector};
use crate::lmi::{eval_m_with, hinf_necessary, Certificate, LmiProblem, ProblemKind};
use crate::model::{DesignMethod, GainTag, ObserverGains, PlantModel};
use crate::sdp::SdpSolution;
use crate::sim::{eval_v, simulate, HybridArc, HybridState, HybridTimeDomain, Horizon, JitterSequence, SignalSpec};

/// Number of `τ` points used by every grid check.
pub const TAU_GRID: usize = 100;

/// Relative eigenvalue tolerance of the certificate checks.
pub const EIG_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub eig_at_0: f64,
    pub eig_at_t2: f64,
    pub grid_max_eig: f64,
    /// Largest entry magnitude of `M(0)` and `M(T2)`.
    pub scale: f64,
    /// `EIG_TOL · (1 + scale)`.
    pub tolerance: f64,
    pub hinf_lower_bound: f64,
    pub gamma: f64,
    /// `tolerance − grid_max_eig`; negative on failure.
    pub eig_margin: f64,
    /// `γ − hinf_lower_bound`; negative on failure.
    pub gamma_margin: f64,
    pub pass: bool,
    /// Flow-time decay rate when the certificate has `λt = 0`.
    pub cor2_rate: Option<f64>,
}

fn grid_eigs(plant: &PlantModel, gains: &ObserverGains, cert: &Certificate, lambda_t: f64, with_w: bool) -> Result<(f64, f64, f64, f64)> {
    let m0 = eval_m_with(plant, gains, cert, lambda_t, 0.0, with_w)?;
    let mt = eval_m_with(plant, gains, cert, lambda_t, cert.t2, with_w)?;
    let scale = max_abs(&m0).max(max_abs(&mt));
    let mut grid_max = f64::NEG_INFINITY;
    for tau in lin_grid(0.0, cert.t2, TAU_GRID) {
        let m = eval_m_with(plant, gains, cert, lambda_t, tau, with_w)?;
        grid_max = grid_max.max(max_eig(&m));
    }
    Ok((max_eig(&m0), max_eig(&mt), grid_max, scale))
}

/// Eigenvalue check of `M(τ) ⪯ 0` at both ends and on a `τ` grid, plus the
/// H∞ necessary condition `γ ≥ ‖Cp(sI − (A − LC + λt I))⁻¹N‖∞`.
pub fn verify_certificate(plant: &PlantModel, gains: &ObserverGains, cert: &Certificate) -> Result<VerificationReport> {
    cert.check(plant.is_linear())?;
    let (e0, et, gmax, scale) = grid_eigs(plant, gains, cert, cert.lambda_t, true)?;
    let tolerance = EIG_TOL * (1.0 + scale);
    let hinf = hinf_necessary(plant, &gains.l, cert.lambda_t);
    let eig_margin = tolerance - e0.max(et).max(gmax);
    let gamma_margin = cert.gamma - hinf;
    let cor2_rate = if cert.lambda_t == 0.0 {
        cor2_decay_rate(plant, gains, cert).ok().map(|c| c.rate)
    } else {
        None
    };
    Ok(VerificationReport {
        eig_at_0: e0,
        eig_at_t2: et,
        grid_max_eig: gmax,
        scale,
        tolerance,
        hinf_lower_bound: hinf,
        gamma: cert.gamma,
        eig_margin,
        gamma_margin,
        pass: eig_margin >= 0.0 && gamma_margin >= 0.0,
        cor2_rate,
    })
}

/// Decay data attached to a certificate solved with `λt = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cor2Rate {
    /// `−max_τ λmax(M(τ))` over the `τ` grid.
    pub beta: f64,
    /// Same quantity from the two endpoints only.
    pub beta_endpoints: f64,
    pub rho2: f64,
    /// `β / (2ρ2)`.
    pub rate: f64,
}

pub fn cor2_decay_rate(plant: &PlantModel, gains: &ObserverGains, cert: &Certificate) -> Result<Cor2Rate> {
    let (e0, et, gmax, _) = grid_eigs(plant, gains, cert, 0.0, true)?;
    let beta = -gmax;
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta { beta });
    }
    let rho2 = max_eig(&cert.p1).max(max_eig(&cert.p2) * (cert.delta * cert.t2).exp());
    Ok(Cor2Rate {
        beta,
        beta_endpoints: -e0.max(et),
        rho2,
        rate: beta / (2.0 * rho2),
    })
}

/// Constants of the exponential ISS bound
/// `|φ(t, j)| ≤ max(κ e^{−λ(t+j)} |φ(0, 0)|, noise_gain · ‖u‖)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IssConstants {
    pub rho1: f64,
    pub rho2: f64,
    pub lambda: f64,
    pub omega: f64,
    pub kappa: f64,
    /// `λmax(P2) e^{δ T2}`.
    pub omega2: f64,
    pub noise_gain: f64,
}

pub fn iss_constants(cert: &Certificate, t1: f64) -> Result<IssConstants> {
    if !(t1 > 0.0) {
        return Err(Error::InvalidArgument {
            name: "T1",
            reason: format!("must be positive, got {t1}"),
        });
    }
    if !(cert.lambda_t > 0.0) {
        return Err(Error::InvalidArgument {
            name: "lambda_t",
            reason: "the ISS constants need a positive decay rate".into(),
        });
    }
    let lt = cert.lambda_t;
    let edt = (cert.delta * cert.t2).exp();
    let rho1 = min_eig(&cert.p1).min(min_eig(&cert.p2));
    let omega2 = max_eig(&cert.p2) * edt;
    let rho2 = max_eig(&cert.p1).max(omega2);
    let lambda = lt * t1 / (1.0 + t1);
    let omega = lambda;
    let kappa = 2.0 * (rho2 / rho1).sqrt() * omega.exp();
    let sum_bound = (4.0 * lt * t1).exp() / ((2.0 * lt * t1).exp() - 1.0);
    let noise_gain = 2.0 * (cert.gamma / (2.0 * lt * rho1).sqrt()).max((omega2 * sum_bound / rho1).sqrt());
    Ok(IssConstants {
        rho1,
        rho2,
        lambda,
        omega,
        kappa,
        omega2,
        noise_gain,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub pass: bool,
    /// Largest `lhs − rhs` seen; at most the tolerance on a pass.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub samples: usize,
}

/// Checks the exponential ISS bound at every sample of `arc`.
pub fn check_iss_bound(arc: &HybridArc, constants: &IssConstants, input_sup_norm: f64) -> BoundCheck {
    let d0 = crate::sim::distance_to_a(arc.initial());
    let tolerance = 1e-9 * (1.0 + d0);
    let floor = constants.noise_gain * input_sup_norm;
    let mut worst = f64::NEG_INFINITY;
    for s in &arc.samples {
        let decay = constants.kappa * (-constants.lambda * (s.t + s.j as f64)).exp() * d0;
        worst = worst.max(crate::sim::distance_to_a(&s.state) - decay.max(floor));
    }
    BoundCheck {
        pass: worst <= tolerance,
        worst_margin: worst,
        tolerance,
        samples: arc.samples.len(),
    }
}

/// `V(t) ≤ e^{−2λt t} V(0) (1 + rel)` along a zero-input arc.
pub fn check_v_decay(arc: &HybridArc, cert: &Certificate, rel: f64) -> BoundCheck {
    let v0 = eval_v(cert, arc.initial());
    let mut worst = f64::NEG_INFINITY;
    for s in &arc.samples {
        let bound = (-2.0 * cert.lambda_t * s.t).exp() * v0 * (1.0 + rel);
        worst = worst.max(eval_v(cert, &s.state) - bound);
    }
    BoundCheck {
        pass: worst <= 0.0,
        worst_margin: worst,
        tolerance: 0.0,
        samples: arc.samples.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DissipationCheck {
    /// Largest `dV/dt − (−2λt V − |Cp ε|² + γ²|w|²)` over checked samples.
    pub max_violation: f64,
    pub slack: f64,
    pub pass: bool,
    pub checked: usize,
}

fn derivative(v: &[f64], k: usize, h: f64) -> f64 {
    let n = v.len();
    if n >= 5 {
        if k >= 2 && k + 2 < n {
            return (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / (12.0 * h);
        }
        let fwd = |f: &dyn Fn(usize) -> f64, at: usize| match at {
            0 => (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h),
            _ => (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h),
        };
        return if k < 2 {
            fwd(&|i| v[i], k)
        } else {
            -fwd(&|i| v[n - 1 - i], n - 1 - k)
        };
    }
    if n >= 3 && k > 0 && k + 1 < n {
        (v[k + 1] - v[k - 1]) / (2.0 * h)
    } else if k + 1 < n {
        (v[k + 1] - v[k]) / h
    } else {
        (v[k] - v[k - 1]) / h
    }
}

fn stencil(n: usize, k: usize) -> std::ops::Range<usize> {
    if n >= 5 {
        if k >= 2 && k + 2 < n {
            k - 2..k + 3
        } else if k < 2 {
            0..5
        } else {
            n - 5..n
        }
    } else {
        0..n
    }
}

/// Finite-difference check of `V̇ ≤ −2λt V − |Cp ε|² + γ²|w|²` on every flow
/// interval with slack `1e−4 · scale · h`. Samples whose stencil straddles a
/// kink or jump of `w` are skipped.
pub fn check_flow_dissipation(arc: &HybridArc, plant: &PlantModel, cert: &Certificate) -> DissipationCheck {
    let g2 = cert.gamma * cert.gamma;
    let mut scale: f64 = 1.0;
    for s in &arc.samples {
        scale = scale.max(1.0 + eval_v(cert, &s.state) + g2 * s.w.norm_squared());
    }
    let mut max_violation = f64::NEG_INFINITY;
    let mut checked = 0;
    let mut h_seen: f64 = 0.0;
    for seg in arc.intervals() {
        let n = seg.len();
        if n < 2 {
            continue;
        }
        let h = (seg[n - 1].t - seg[0].t) / (n - 1) as f64;
        if !(h > 0.0) {
            continue;
        }
        h_seen = h_seen.max(h);
        let v: Vec<f64> = seg.iter().map(|s| eval_v(cert, &s.state)).collect();
        let wmax = seg.iter().map(|s| s.w.amax()).fold(0.0, f64::max);
        let kink_tol = 1e-2 * (1.0 + wmax);
        for k in 0..n {
            let r = stencil(n, k);
            let smooth = (r.start + 1..r.end - 1).all(|i| {
                (&seg[i + 1].w - &seg[i].w * 2.0 + &seg[i - 1].w).amax() <= kink_tol
            });
            if !smooth {
                continue;
            }
            let s = &seg[k];
            let yp = &plant.cp * &s.state.eps;
            let rhs = -2.0 * cert.lambda_t * v[k] - yp.norm_squared() + g2 * s.w.norm_squared();
            max_violation = max_violation.max(derivative(&v, k, h) - rhs);
            checked += 1;
        }
    }
    let slack = 1e-4 * scale * h_seen.max(arc.h_max);
    DissipationCheck {
        max_violation,
        slack,
        pass: max_violation <= slack,
        checked,
    }
}

/// `√∫|y_p|² / √∫|w|²` along an arc (trapezoidal rule in ordinary time).
pub fn l2_ratio(plant: &PlantModel, arc: &HybridArc) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for pair in arc.samples.windows(2) {
        let dt = pair[1].t - pair[0].t;
        if dt <= 0.0 {
            continue;
        }
        let yp0 = (&plant.cp * &pair[0].state.eps).norm_squared();
        let yp1 = (&plant.cp * &pair[1].state.eps).norm_squared();
        num += 0.5 * dt * (yp0 + yp1);
        den += 0.5 * dt * (pair[0].w.norm_squared() + pair[1].w.norm_squared());
    }
    if den <= 0.0 {
        return Err(Error::ZeroEnergyInput);
    }
    Ok((num / den).sqrt())
}

/// Simulates from zero error (`z = 0`, `τ = T2`) with `η ≡ 0` and returns
/// the empirical `L2` ratio.
pub fn estimate_l2_gain(
    plant: &PlantModel,
    gains: &ObserverGains,
    jitter: &JitterSequence,
    w: &SignalSpec,
    horizon: Horizon,
) -> Result<f64> {
    let (nz, ny) = (plant.nz(), plant.ny());
    let init = HybridState::new(Vector::zeros(nz), Vector::zeros(nz), Vector::zeros(ny), jitter.t2);
    let signals = w.clone().with_zero_eta(ny);
    let arc = simulate(plant, gains, &init, &signals, jitter, horizon)?;
    l2_ratio(plant, &arc)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainCheck {
    pub pass: bool,
    /// Largest `λ(t + j) − λt t − ω` over the domain.
    pub lemma1_margin: f64,
    /// Largest `Σ e^{−2λt (t − t_i)}` minus its bound.
    pub sum_margin: f64,
    /// Largest `j − t/T1 − 1`.
    pub count_margin: f64,
}

/// Checks `−λt t ≤ ω − λ(t + j)`, the jump-sum bound, and `j ≤ t/T1 + 1`
/// at the start and end of every interval (the worst points of each).
pub fn domain_bounds_check(domain: &HybridTimeDomain, lambda_t: f64, t1: f64, lambda: f64, omega: f64) -> DomainCheck {
    let jumps = domain.jump_times();
    let sum_bound = (4.0 * lambda_t * t1).exp() / ((2.0 * lambda_t * t1).exp() - 1.0);
    let mut l1 = f64::NEG_INFINITY;
    let mut sm = f64::NEG_INFINITY;
    let mut cm = f64::NEG_INFINITY;
    for iv in &domain.intervals {
        let j = iv.j as f64;
        for t in [iv.start, iv.end] {
            l1 = l1.max(lambda * (t + j) - lambda_t * t - omega);
            cm = cm.max(j - t / t1 - 1.0);
        }
        let s: f64 = jumps[..iv.j].iter().map(|ti| (-2.0 * lambda_t * (iv.start - ti)).exp()).sum();
        sm = sm.max(s - sum_bound);
    }
    let tol = 1e-12 * (1.0 + domain.end().0 + domain.end().1 as f64);
    DomainCheck {
        pass: l1 <= tol && sm <= tol * sum_bound && cm <= tol,
        lemma1_margin: l1,
        sum_margin: sm,
        count_margin: cm,
    }
}

/// One value of a signal on a hybrid time domain.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridSignalSample {
    pub t: f64,
    pub j: usize,
    /// True for values attached to a jump rather than to a flow.
    pub at_jump: bool,
    pub value: Vector,
}

/// `max(sup over flow samples, sup over jump samples)` of `|u|`.
pub fn hybrid_sup_norm(samples: &[HybridSignalSample]) -> f64 {
    let flow = samples.iter().filter(|s| !s.at_jump).map(|s| s.value.norm()).fold(0.0, f64::max);
    let jump = samples.iter().filter(|s| s.at_jump).map(|s| s.value.norm()).fold(0.0, f64::max);
    flow.max(jump)
}

/// Input `u = (w, η)` of an arc as hybrid samples: `w` on flows, `η` at jumps.
pub fn arc_input_samples(arc: &HybridArc) -> Vec<HybridSignalSample> {
    let mut out: Vec<HybridSignalSample> = arc
        .samples
        .iter()
        .map(|s| HybridSignalSample {
            t: s.t,
            j: s.j,
            at_jump: false,
            value: s.w.clone(),
        })
        .collect();
    out.extend(arc.jumps.iter().map(|jr| HybridSignalSample {
        t: jr.t,
        j: jr.j,
        at_jump: true,
        value: jr.eta.clone(),
    }));
    out
}

/// Slack matrices `(X1, …, X8)` of the projected condition.
pub type SlackSet = [Mat; 8];

/// Numeric projected matrix
/// `[[He(S1), S2 + P, S3, S4], [•, 𝒩 + He(S5), S6, S7], [•, •, −γ²I, 0], [•, •, •, −χI]]`
/// built from general slack matrices and explicit gains.
pub fn projected_matrix(plant: &PlantModel, gains: &ObserverGains, cert: &Certificate, xs: &SlackSet, tau: f64) -> Mat {
    let (a, b, c, n) = (&plant.a, &plant.b, &plant.c, &plant.n);
    let (l, h) = (&gains.l, &gains.h);
    let (nz, ny) = (plant.nz(), plant.ny());
    let [x1, x2, x3, x4, x5, x6, x7, x8] = xs;
    let ct = c.transpose();
    let acl = a - l * c;
    let hc = h * c;
    let sq = |m: [[Mat; 2]; 2]| -> Mat {
        let [[m11, m12], [m21, m22]] = m;
        crate::linalg::block(&[vec![Some(m11), Some(m12)], vec![Some(m21), Some(m22)]], &[nz, ny], &[nz, ny])
    };
    let col = |top: Mat, bot: Mat| -> Mat {
        let cols = top.ncols();
        crate::linalg::block(&[vec![Some(top)], vec![Some(bot)]], &[nz, ny], &[cols])
    };
    let s1 = sq([[-x1 + &ct * x5, -x2 + &ct * x6], [-x5, -x6]]);
    let s2 = sq([
        [x1.transpose() * &acl - x5.transpose() * &hc - x3 + &ct * x7, -x4 + &ct * x8 + x1.transpose() * l + x5.transpose() * h],
        [x2.transpose() * &acl - x6.transpose() * &hc - x7, -x8 + x2.transpose() * l + x6.transpose() * h],
    ]);
    let s3 = col(x1.transpose() * n, x2.transpose() * n);
    let s4 = col(x1.transpose() * b, x2.transpose() * b);
    let s5 = sq([
        [acl.transpose() * x3 - hc.transpose() * x7, acl.transpose() * x4 - hc.transpose() * x8],
        [l.transpose() * x3 + h.transpose() * x7, l.transpose() * x4 + h.transpose() * x8],
    ]);
    let s6 = col(x3.transpose() * n, x4.transpose() * n);
    let s7 = col(x3.transpose() * b, x4.transpose() * b);
    let e = (cert.delta * tau).exp();
    let linear = plant.is_linear();
    let chi = if linear { 0.0 } else { cert.chi };
    let zero_zy = Mat::zeros(nz, ny);
    let pp = sq([[cert.p1.clone(), zero_zy.clone()], [zero_zy.transpose(), &cert.p2 * e]]);
    let n11 = &cert.p1 * (2.0 * cert.lambda_t)
        + plant.cp.transpose() * &plant.cp
        + plant.s.transpose() * &plant.s * (chi * plant.lipschitz.powi(2));
    let nn = sq([[n11, zero_zy.clone()], [zero_zy.transpose(), &cert.p2 * (e * (2.0 * cert.lambda_t - cert.delta))]]);
    let nx = nz + ny;
    let mut sizes = vec![nx, nx, plant.nw()];
    let mut rows = vec![
        vec![Some(he(&s1)), Some(s2 + pp), Some(s3)],
        vec![Some(nn + he(&s5)), Some(s6)],
        vec![Some(eye(plant.nw()) * -(cert.gamma * cert.gamma))],
    ];
    if !linear {
        sizes.push(plant.ns());
        rows[0].push(Some(s4));
        rows[1].push(Some(s7));
        rows[2].push(None);
        rows.push(vec![Some(eye(plant.ns()) * -chi)]);
    }
    sym_block(&rows, &sizes)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub method: DesignMethod,
    pub pass: bool,
    /// `λmax` of the projected matrix with `X` at `τ = 0` and `Y` at `T2`.
    pub psi_eigs: [f64; 2],
    /// `λmax(M(0))`, `λmax(M(T2))` after gain recovery.
    pub m_eigs: [f64; 2],
    /// `X4 = X8 = 0` and `Y4 = Y8 = 0` in the reconstruction.
    pub x4_x8_zero: bool,
}

fn named(problem: &LmiProblem, name: &str, x: &[f64]) -> Result<Mat> {
    problem
        .matrix(name, x)
        .ok_or_else(|| Error::Reconstruction(format!("solution has no matrix {name}")))
}

fn invert(m: &Mat, what: &str) -> Result<Mat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Reconstruction(format!("{what} is singular")))
}

/// Rebuilds the full slack matrices of a projection-based design, checks
/// the projected inequalities with the general block formulas, recovers the
/// gains, and checks `M(0) ≺ 0`, `M(T2) ≺ 0`.
pub fn projection_roundtrip(plant: &PlantModel, problem: &LmiProblem, solution: &SdpSolution) -> Result<RoundtripReport> {
    let method = match problem.meta.kind {
        ProblemKind::Design(m) if m != DesignMethod::PropPred => m,
        other => return Err(Error::Reconstruction(format!("not a projection design: {other:?}"))),
    };
    let x = &solution.point;
    if x.len() != problem.num_vars() {
        return Err(Error::Reconstruction("point length differs from the variable count".into()));
    }
    let (nz, ny) = (plant.nz(), plant.ny());
    let delta = problem.meta.delta.ok_or_else(|| Error::Reconstruction("missing delta".into()))?;
    let t2 = problem.meta.t2.ok_or_else(|| Error::Reconstruction("missing T2".into()))?;
    let lambda_t = problem.meta.lambda_t.unwrap_or(0.0);
    let xm = named(problem, "X", x)?;
    let jm = named(problem, "J", x)?;
    let l = invert(&xm.transpose(), "X")? * &jm;
    let zz = |r, c| Mat::zeros(r, c);
    let (h, xs, ys) = match method {
        DesignMethod::PropX80 | DesignMethod::PropX8X6 => {
            let u = named(problem, "U", x)?;
            let w = named(problem, "W", x)?;
            let h = invert(&u.transpose(), "U")? * w;
            let x8 = if method == DesignMethod::PropX80 { zz(ny, ny) } else { u.clone() };
            let s: SlackSet = [xm.clone(), zz(nz, ny), xm.clone(), zz(nz, ny), zz(ny, nz), u, zz(ny, nz), x8];
            (h, s.clone(), s)
        }
        DesignMethod::Zoh => {
            let pick = |p: char| -> Result<SlackSet> {
                Ok([
                    xm.clone(),
                    zz(nz, ny),
                    xm.clone(),
                    zz(nz, ny),
                    named(problem, &format!("{p}5"), x)?,
                    named(problem, &format!("{p}6"), x)?,
                    named(problem, &format!("{p}7"), x)?,
                    named(problem, &format!("{p}8"), x)?,
                ])
            };
            (zz(ny, ny), pick('X')?, pick('Y')?)
        }
        DesignMethod::PropPred => unreachable!(),
    };
    let cert = certificate_from(problem, x, delta, t2, lambda_t)?;
    let gains = ObserverGains::new(l, h, GainTag::Designed(method))?;
    let psi0 = max_eig(&projected_matrix(plant, &gains, &cert, &xs, 0.0));
    let psit = max_eig(&projected_matrix(plant, &gains, &cert, &ys, t2));
    let m0 = max_eig(&eval_m_with(plant, &gains, &cert, lambda_t, 0.0, true)?);
    let mt = max_eig(&eval_m_with(plant, &gains, &cert, lambda_t, t2, true)?);
    let zero = |s: &SlackSet| s[3].iter().all(|v| *v == 0.0) && s[7].iter().all(|v| *v == 0.0);
    Ok(RoundtripReport {
        method,
        pass: psi0 < 0.0 && psit < 0.0 && m0 < 0.0 && mt < 0.0,
        psi_eigs: [psi0, psit],
        m_eigs: [m0, mt],
        x4_x8_zero: zero(&xs) && zero(&ys),
    })
}

/// Reads `(P1, P2, χ, γ)` out of a solved problem. `γ` comes from `μ`
/// when free and from the metadata when fixed.
pub fn certificate_from(problem: &LmiProblem, x: &[f64], delta: f64, t2: f64, lambda_t: f64) -> Result<Certificate> {
    let p1 = named(problem, "P1", x)?;
    let p2 = named(problem, "P2", x)?;
    let chi = problem.scalar("chi", x).unwrap_or(0.0);
    let gamma = match (problem.scalar("mu", x), problem.meta.fixed_gamma) {
        (_, Some(g)) => g,
        (Some(mu), None) => mu.max(0.0).sqrt(),
        (None, None) => 0.0,
    };
    Ok(Certificate {
        p1,
        p2,
        delta,
        chi,
        lambda_t,
        gamma,
        t2,
    })
}
