//! Hybrid closed-loop simulation.
//!
//! The state is `(z, ε, θ̃, τ)`. During flows `τ̇ = −1`; a sample arrives when
//! `τ` reaches zero, at which point `θ̃⁺ = −η` and `τ⁺` is drawn from a
//! jitter sequence in `[T1, T2]`. Since the timer decreases at unit rate,
//! every jump time is the previous jump time plus the reset value and no
//! event location is needed.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::linalg::{Mat, Vector};
use crate::lmi::Certificate;
use crate::model::{assemble_error_matrices, check_gain_dims, ObserverGains, PlantModel};
use crate::report::sig12;

type WFn = Arc<dyn Fn(f64) -> Vector + Send + Sync>;
type EtaFn = Arc<dyn Fn(f64, usize) -> Vector + Send + Sync>;

/// Disturbance `w(t)` and jump-indexed measurement noise `η(t_j, j)`.
#[derive(Clone)]
pub struct SignalSpec {
    pub w: WFn,
    pub eta: EtaFn,
}

impl std::fmt::Debug for SignalSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SignalSpec { .. }")
    }
}

impl SignalSpec {
    pub fn zero(nw: usize, ny: usize) -> Self {
        SignalSpec {
            w: Arc::new(move |_| Vector::zeros(nw)),
            eta: Arc::new(move |_, _| Vector::zeros(ny)),
        }
    }

    /// `w = f(t)`, `η ≡ 0`.
    pub fn from_fn(nw: usize, ny: usize, f: impl Fn(f64) -> Vector + Send + Sync + 'static) -> Self {
        Self::zero(nw, ny).with_w(f)
    }

    /// Scalar piecewise-constant `w`: `segments[k] = (end, value)` covers
    /// `(previous end, end]` (the first segment starts at 0, inclusive);
    /// after the last end the signal equals `tail`. `η ≡ 0`, `n_y = 1`.
    pub fn piecewise_scalar(segments: &[(f64, f64)], tail: f64) -> Self {
        Self::from_fn(1, 1, piecewise(segments, tail))
    }

    pub fn with_w(mut self, f: impl Fn(f64) -> Vector + Send + Sync + 'static) -> Self {
        self.w = Arc::new(f);
        self
    }

    pub fn with_eta(mut self, f: impl Fn(f64, usize) -> Vector + Send + Sync + 'static) -> Self {
        self.eta = Arc::new(f);
        self
    }

    /// Same `w`, noise output resized to `ny` zeros.
    pub fn with_zero_eta(self, ny: usize) -> Self {
        self.with_eta(move |_, _| Vector::zeros(ny))
    }
}

/// Scalar piecewise-constant function, see [`SignalSpec::piecewise_scalar`].
pub fn piecewise(segments: &[(f64, f64)], tail: f64) -> impl Fn(f64) -> Vector + Send + Sync + 'static {
    let segs = segments.to_vec();
    move |t| {
        let v = segs.iter().find(|(end, _)| t <= *end).map_or(tail, |(_, v)| *v);
        Vector::from_element(1, v)
    }
}

/// How each post-jump timer value is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum JitterKind {
    /// `((T2 − T1)/2) sin(10 t_j) + (T2 + T1)/2`.
    Deterministic,
    /// Uniform on `[T1, T2]` from a seeded generator.
    UniformRandom(u64),
    Constant(f64),
}

#[derive(Clone, Debug)]
pub struct JitterSequence {
    pub kind: JitterKind,
    pub t1: f64,
    pub t2: f64,
    rng: Option<ChaCha8Rng>,
}

impl JitterSequence {
    pub fn new(kind: JitterKind, t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0 && t1 <= t2 && t2.is_finite()) {
            return Err(Error::InvalidArgument {
                name: "jitter",
                reason: format!("need 0 < T1 <= T2, got T1 = {t1}, T2 = {t2}"),
            });
        }
        if let JitterKind::Constant(v) = kind {
            if !(t1..=t2).contains(&v) {
                return Err(Error::InvalidArgument {
                    name: "jitter",
                    reason: format!("constant reset {v} outside [{t1}, {t2}]"),
                });
            }
        }
        let rng = match kind {
            JitterKind::UniformRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Ok(JitterSequence { kind, t1, t2, rng })
    }

    /// Timer value after a jump at time `jump_time`.
    pub fn next_reset(&mut self, jump_time: f64) -> f64 {
        let (t1, t2) = (self.t1, self.t2);
        let v = match self.kind {
            JitterKind::Deterministic => 0.5 * (t2 - t1) * (10.0 * jump_time).sin() + 0.5 * (t2 + t1),
            JitterKind::UniformRandom(_) => self.rng.as_mut().expect("seeded").random_range(t1..=t2),
            JitterKind::Constant(v) => v,
        };
        v.clamp(t1, t2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Horizon {
    pub t_max: f64,
    pub j_max: usize,
}

impl Horizon {
    pub fn time(t_max: f64) -> Self {
        Horizon {
            t_max,
            j_max: usize::MAX,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    pub z: Vector,
    pub eps: Vector,
    pub theta_tilde: Vector,
    pub tau: f64,
}

impl HybridState {
    pub fn new(z: Vector, eps: Vector, theta_tilde: Vector, tau: f64) -> Self {
        HybridState {
            z,
            eps,
            theta_tilde,
            tau,
        }
    }
}

/// `|(ε, θ̃)|`.
pub fn distance_to_a(state: &HybridState) -> f64 {
    (state.eps.norm_squared() + state.theta_tilde.norm_squared()).sqrt()
}

/// `εᵀP1ε + e^{δτ} θ̃ᵀP2θ̃`.
pub fn eval_v(cert: &Certificate, state: &HybridState) -> f64 {
    let v1 = state.eps.dot(&(&cert.p1 * &state.eps));
    v1 + v2(cert, &state.theta_tilde, state.tau)
}

/// `e^{δτ} θ̃ᵀP2θ̃`.
pub fn v2(cert: &Certificate, theta_tilde: &Vector, tau: f64) -> f64 {
    (cert.delta * tau).exp() * theta_tilde.dot(&(&cert.p2 * theta_tilde))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Flow,
    PreJump,
    PostJump,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Flow => "flow",
            Side::PreJump => "pre-jump",
            Side::PostJump => "post-jump",
        }
    }
}

/// One interval `[start, end] × {j}` of a hybrid time domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainInterval {
    pub start: f64,
    pub end: f64,
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct HybridTimeDomain {
    pub intervals: Vec<DomainInterval>,
}

impl HybridTimeDomain {
    /// Builds a domain from `t_0 = 0`, the jump times, and the final time.
    pub fn from_jumps(jump_times: &[f64], t_end: f64) -> Self {
        let mut intervals = Vec::with_capacity(jump_times.len() + 1);
        let mut start = 0.0;
        for (j, &t) in jump_times.iter().enumerate() {
            intervals.push(DomainInterval { start, end: t, j });
            start = t;
        }
        intervals.push(DomainInterval {
            start,
            end: t_end.max(start),
            j: jump_times.len(),
        });
        HybridTimeDomain { intervals }
    }

    pub fn jump_times(&self) -> Vec<f64> {
        self.intervals.iter().rev().skip(1).rev().map(|i| i.end).collect()
    }

    pub fn jumps(&self) -> usize {
        self.intervals.len().saturating_sub(1)
    }

    pub fn end(&self) -> (f64, usize) {
        self.intervals.last().map_or((0.0, 0), |i| (i.end, i.j))
    }

    /// `0 ≤ t_1 ≤ T2` and `T1 ≤ t_{j+1} − t_j ≤ T2` between jumps; the
    /// trailing interval only needs to be at most `T2` long.
    pub fn is_legal(&self, t1: f64, t2: f64) -> bool {
        let tol = 1e-12 * (1.0 + t2);
        let n = self.intervals.len();
        let mut prev_end = 0.0;
        for (k, iv) in self.intervals.iter().enumerate() {
            if iv.j != k || iv.start != prev_end || iv.end < iv.start {
                return false;
            }
            let len = iv.end - iv.start;
            if len > t2 + tol {
                return false;
            }
            if k > 0 && k + 1 < n && len < t1 - tol {
                return false;
            }
            prev_end = iv.end;
        }
        self.intervals.first().is_none_or(|i| i.start == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcSample {
    pub t: f64,
    pub j: usize,
    pub side: Side,
    pub state: HybridState,
    /// Disturbance value at `t`.
    pub w: Vector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpRecord {
    pub t: f64,
    /// Jump counter before the jump.
    pub j: usize,
    pub pre: HybridState,
    pub post: HybridState,
    pub eta: Vector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridArc {
    pub domain: HybridTimeDomain,
    pub samples: Vec<ArcSample>,
    pub jumps: Vec<JumpRecord>,
    /// Integration step bound used for the flows.
    pub h_max: f64,
}

impl HybridArc {
    /// Samples grouped by jump counter; each group runs from the post-jump
    /// (or initial) sample to the pre-jump (or final) sample.
    pub fn intervals(&self) -> Vec<&[ArcSample]> {
        self.samples.chunk_by(|a, b| a.j == b.j).collect()
    }

    pub fn initial(&self) -> &HybridState {
        &self.samples[0].state
    }

    pub fn last(&self) -> &HybridState {
        &self.samples[self.samples.len() - 1].state
    }

    /// Arc as CSV with columns `t,j,side,z…,eps…,theta_tilde…,tau,dist_A,V`.
    /// `V` is left empty without a certificate.
    pub fn to_csv(&self, cert: Option<&Certificate>) -> String {
        let mut out = String::new();
        let first = &self.samples[0].state;
        let mut header = vec!["t".to_string(), "j".into(), "side".into()];
        header.extend((1..=first.z.len()).map(|k| format!("z{k}")));
        header.extend((1..=first.eps.len()).map(|k| format!("eps{k}")));
        header.extend((1..=first.theta_tilde.len()).map(|k| format!("theta_tilde{k}")));
        header.extend(["tau".into(), "dist_A".into(), "V".into()]);
        writeln!(out, "{}", header.join(",")).unwrap();
        for s in &self.samples {
            let st = &s.state;
            let mut row = vec![sig12(s.t), s.j.to_string(), s.side.as_str().to_string()];
            row.extend(st.z.iter().chain(st.eps.iter()).chain(st.theta_tilde.iter()).map(|v| sig12(*v)));
            row.push(sig12(st.tau));
            row.push(sig12(distance_to_a(st)));
            row.push(cert.map_or(String::new(), |c| sig12(eval_v(c, st))));
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }
}

/// Raw trajectory produced by the shared integrator.
struct Raw {
    times: Vec<(f64, usize, Side)>,
    states: Vec<Vector>,
    taus: Vec<f64>,
    jumps: Vec<(f64, usize, Vector, Vector, f64, f64, Vector)>,
    jump_times: Vec<f64>,
    t_end: f64,
}

fn rk4(f: &impl Fn(f64, &Vector) -> Vector, t: f64, x: &Vector, h: f64) -> Vector {
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * h, &(x + &k1 * (0.5 * h)));
    let k3 = f(t + 0.5 * h, &(x + &k2 * (0.5 * h)));
    let k4 = f(t + h, &(x + &k3 * h));
    x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

/// Flows with fixed-step RK4 (uniform steps of at most `h_max` per
/// interval, the last one ending on the jump time) and applies `jump`
/// whenever the timer hits zero.
fn integrate(
    x0: Vector,
    tau0: f64,
    flow: impl Fn(f64, &Vector) -> Vector,
    jump: impl Fn(f64, usize, &Vector) -> (Vector, Vector),
    jitter: &mut JitterSequence,
    horizon: Horizon,
    h_max: f64,
) -> Result<Raw> {
    let mut raw = Raw {
        times: vec![(0.0, 0, Side::Flow)],
        states: vec![x0.clone()],
        taus: vec![tau0],
        jumps: Vec::new(),
        jump_times: Vec::new(),
        t_end: 0.0,
    };
    let (mut t, mut j, mut x, mut tau) = (0.0_f64, 0_usize, x0, tau0);
    loop {
        if tau <= 0.0 {
            if j >= horizon.j_max || t > horizon.t_max {
                break;
            }
            if let Some(last) = raw.times.last_mut() {
                last.2 = Side::PreJump;
            }
            let (xp, eta) = jump(t, j, &x);
            let reset = jitter.next_reset(t);
            raw.jumps.push((t, j, x.clone(), xp.clone(), tau, reset, eta));
            raw.jump_times.push(t);
            j += 1;
            x = xp;
            tau = reset;
            raw.times.push((t, j, Side::PostJump));
            raw.states.push(x.clone());
            raw.taus.push(tau);
            continue;
        }
        if t >= horizon.t_max {
            break;
        }
        let t_jump = t + tau;
        let (t_stop, hits_jump) = if t_jump <= horizon.t_max {
            (t_jump, true)
        } else {
            (horizon.t_max, false)
        };
        let steps = ((t_stop - t) / h_max).ceil().max(1.0) as usize;
        let h = (t_stop - t) / steps as f64;
        let t_start = t;
        for k in 1..=steps {
            x = rk4(&flow, t, &x, h);
            t = if k == steps { t_stop } else { t_start + k as f64 * h };
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteState { t, j });
            }
            raw.times.push((t, j, Side::Flow));
            raw.states.push(x.clone());
            raw.taus.push(if hits_jump && k == steps { 0.0 } else { t_jump - t });
        }
        tau = if hits_jump { 0.0 } else { t_jump - t };
    }
    raw.t_end = t;
    Ok(raw)
}

fn check_sim_inputs(plant: &PlantModel, gains: &ObserverGains, signals: &SignalSpec) -> Result<()> {
    plant.ensure_valid()?;
    check_gain_dims(plant, &gains.l, &gains.h)?;
    let w0 = (signals.w)(0.0);
    if w0.len() != plant.nw() {
        return Err(dim_err("disturbance w", plant.nw(), w0.len()));
    }
    let e0 = (signals.eta)(0.0, 0);
    if e0.len() != plant.ny() {
        return Err(dim_err("noise eta", plant.ny(), e0.len()));
    }
    Ok(())
}

/// Integrates the closed loop in error coordinates from `init`.
pub fn simulate(
    plant: &PlantModel,
    gains: &ObserverGains,
    init: &HybridState,
    signals: &SignalSpec,
    jitter: &JitterSequence,
    horizon: Horizon,
) -> Result<HybridArc> {
    simulate_with_step(plant, gains, init, signals, jitter, horizon, jitter.t1 / 50.0)
}

/// [`simulate`] with an explicit step bound.
pub fn simulate_with_step(
    plant: &PlantModel,
    gains: &ObserverGains,
    init: &HybridState,
    signals: &SignalSpec,
    jitter: &JitterSequence,
    horizon: Horizon,
    h_max: f64,
) -> Result<HybridArc> {
    check_sim_inputs(plant, gains, signals)?;
    let (nz, ny) = (plant.nz(), plant.ny());
    if init.z.len() != nz || init.eps.len() != nz || init.theta_tilde.len() != ny {
        return Err(dim_err("initial state", format!("z, eps in R^{nz}, theta_tilde in R^{ny}"), "other"));
    }
    if !(0.0..=jitter.t2).contains(&init.tau) {
        return Err(Error::TauOutOfRange {
            tau: init.tau,
            t2: jitter.t2,
        });
    }
    if !(h_max > 0.0) {
        return Err(Error::InvalidArgument {
            name: "h_max",
            reason: format!("must be positive, got {h_max}"),
        });
    }
    let em = assemble_error_matrices(plant, gains)?;
    let n_e = nz + ny;
    let mut x0 = Vector::zeros(nz + n_e);
    x0.rows_mut(0, nz).copy_from(&init.z);
    x0.rows_mut(nz, nz).copy_from(&init.eps);
    x0.rows_mut(2 * nz, ny).copy_from(&init.theta_tilde);

    let w = signals.w.clone();
    let flow = |t: f64, x: &Vector| -> Vector {
        let z = x.rows(0, nz).into_owned();
        let e = x.rows(nz, n_e).into_owned();
        let eps = x.rows(nz, nz).into_owned();
        let wt = w(t);
        let mut dx = Vector::zeros(nz + n_e);
        let dz = &plant.a * &z + &plant.b * plant.psi_of_state(&z) + &plant.n * &wt;
        let de = &em.f * &e + &em.q * plant.zeta(&z, &eps) + &em.t * &wt;
        dx.rows_mut(0, nz).copy_from(&dz);
        dx.rows_mut(nz, n_e).copy_from(&de);
        dx
    };
    let eta = signals.eta.clone();
    let jump = |t: f64, j: usize, x: &Vector| -> (Vector, Vector) {
        let e = x.rows(nz, n_e).into_owned();
        let et = eta(t, j);
        let ep = &em.g_jump * &e + &em.n_jump * &et;
        let mut xp = x.clone();
        xp.rows_mut(nz, n_e).copy_from(&ep);
        (xp, et)
    };
    let mut jit = jitter.clone();
    let raw = integrate(x0, init.tau, flow, jump, &mut jit, horizon, h_max)?;
    let split = |x: &Vector, tau: f64| HybridState {
        z: x.rows(0, nz).into_owned(),
        eps: x.rows(nz, nz).into_owned(),
        theta_tilde: x.rows(2 * nz, ny).into_owned(),
        tau,
    };
    let samples = raw
        .times
        .iter()
        .zip(&raw.states)
        .zip(&raw.taus)
        .map(|((&(t, j, side), x), &tau)| ArcSample {
            t,
            j,
            side,
            state: split(x, tau),
            w: (signals.w)(t),
        })
        .collect();
    let jumps = raw
        .jumps
        .iter()
        .map(|(t, j, pre, post, tau_pre, tau_post, eta)| JumpRecord {
            t: *t,
            j: *j,
            pre: split(pre, *tau_pre),
            post: split(post, *tau_post),
            eta: eta.clone(),
        })
        .collect();
    Ok(HybridArc {
        domain: HybridTimeDomain::from_jumps(&raw.jump_times, raw.t_end),
        samples,
        jumps,
        h_max,
    })
}

/// Plant and observer states `(z, ẑ, θ)` at one hybrid time.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverSample {
    pub t: f64,
    pub j: usize,
    pub side: Side,
    pub z: Vector,
    pub zhat: Vector,
    pub theta: Vector,
    pub tau: f64,
}

impl ObserverSample {
    /// `(z − ẑ, C(z − ẑ) − θ)`.
    pub fn error_coordinates(&self, c: &Mat) -> (Vector, Vector) {
        let eps = &self.z - &self.zhat;
        let tt = c * &eps - &self.theta;
        (eps, tt)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObserverArc {
    pub domain: HybridTimeDomain,
    pub samples: Vec<ObserverSample>,
}

/// Integrates the plant and the observer with jumps directly:
/// `θ̇ = Hθ` between samples and `θ⁺ = y − Cẑ` at samples.
#[allow(clippy::too_many_arguments)]
pub fn simulate_observer_coordinates(
    plant: &PlantModel,
    gains: &ObserverGains,
    z0: &Vector,
    zhat0: &Vector,
    theta0: &Vector,
    tau0: f64,
    signals: &SignalSpec,
    jitter: &JitterSequence,
    horizon: Horizon,
) -> Result<ObserverArc> {
    check_sim_inputs(plant, gains, signals)?;
    let (nz, ny) = (plant.nz(), plant.ny());
    if z0.len() != nz || zhat0.len() != nz || theta0.len() != ny {
        return Err(dim_err("initial observer state", format!("z, zhat in R^{nz}, theta in R^{ny}"), "other"));
    }
    if !(0.0..=jitter.t2).contains(&tau0) {
        return Err(Error::TauOutOfRange { tau: tau0, t2: jitter.t2 });
    }
    let mut x0 = Vector::zeros(2 * nz + ny);
    x0.rows_mut(0, nz).copy_from(z0);
    x0.rows_mut(nz, nz).copy_from(zhat0);
    x0.rows_mut(2 * nz, ny).copy_from(theta0);
    let w = signals.w.clone();
    let flow = |t: f64, x: &Vector| -> Vector {
        let z = x.rows(0, nz).into_owned();
        let zh = x.rows(nz, nz).into_owned();
        let th = x.rows(2 * nz, ny).into_owned();
        let mut dx = Vector::zeros(x.len());
        let dz = &plant.a * &z + &plant.b * plant.psi_of_state(&z) + &plant.n * w(t);
        let dzh = &plant.a * &zh + &plant.b * plant.psi_of_state(&zh) + &gains.l * &th;
        dx.rows_mut(0, nz).copy_from(&dz);
        dx.rows_mut(nz, nz).copy_from(&dzh);
        dx.rows_mut(2 * nz, ny).copy_from(&(&gains.h * &th));
        dx
    };
    let eta = signals.eta.clone();
    let jump = |t: f64, j: usize, x: &Vector| -> (Vector, Vector) {
        let z = x.rows(0, nz).into_owned();
        let zh = x.rows(nz, nz).into_owned();
        let et = eta(t, j);
        let y = &plant.c * &z + &et;
        let mut xp = x.clone();
        xp.rows_mut(2 * nz, ny).copy_from(&(y - &plant.c * &zh));
        (xp, et)
    };
    let mut jit = jitter.clone();
    let h_max = jitter.t1 / 50.0;
    let raw = integrate(x0, tau0, flow, jump, &mut jit, horizon, h_max)?;
    let samples = raw
        .times
        .iter()
        .zip(&raw.states)
        .zip(&raw.taus)
        .map(|((&(t, j, side), x), &tau)| ObserverSample {
            t,
            j,
            side,
            z: x.rows(0, nz).into_owned(),
            zhat: x.rows(nz, nz).into_owned(),
            theta: x.rows(2 * nz, ny).into_owned(),
            tau,
        })
        .collect();
    Ok(ObserverArc {
        domain: HybridTimeDomain::from_jumps(&raw.jump_times, raw.t_end),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{oscillator, oscillator_initial, oscillator_tuned_gains};

    fn osc_init(tau: f64) -> HybridState {
        let (z, e, t) = oscillator_initial();
        HybridState::new(z, e, t, tau)
    }

    #[test]
    fn deterministic_reset_at_zero() {
        let mut j = JitterSequence::new(JitterKind::Deterministic, 0.205, 0.41).unwrap();
        assert!((j.next_reset(0.0) - 0.3075).abs() < 1e-15);
        let mut c = JitterSequence::new(JitterKind::Constant(0.41), 0.205, 0.41).unwrap();
        assert_eq!(c.next_reset(3.0), 0.41);
    }

    #[test]
    fn seeded_jitter_repeats() {
        let draw = || {
            let mut j = JitterSequence::new(JitterKind::UniformRandom(11), 0.1, 0.3).unwrap();
            (0..20).map(|k| j.next_reset(k as f64)).collect::<Vec<_>>()
        };
        let a = draw();
        assert_eq!(a, draw());
        assert!(a.iter().all(|v| (0.1..=0.3).contains(v)));
    }

    #[test]
    fn first_jump_at_initial_timer() {
        let jit = JitterSequence::new(JitterKind::Constant(0.41), 0.205, 0.41).unwrap();
        let arc = simulate(
            &oscillator(),
            &oscillator_tuned_gains(),
            &osc_init(0.41),
            &SignalSpec::zero(1, 1),
            &jit,
            Horizon { t_max: 1.0, j_max: 1 },
        )
        .unwrap();
        assert_eq!(arc.jumps.len(), 1);
        assert_eq!(arc.jumps[0].t, 0.41);
        assert_eq!(arc.jumps[0].post.theta_tilde[0], 0.0);
        assert!(arc.domain.is_legal(0.205, 0.41));
    }

    #[test]
    fn zero_error_stays_zero() {
        let jit = JitterSequence::new(JitterKind::Deterministic, 0.205, 0.41).unwrap();
        let init = HybridState::new(Vector::from_vec(vec![1.0, -1.0]), Vector::zeros(2), Vector::zeros(1), 0.2);
        let arc = simulate(
            &oscillator(),
            &oscillator_tuned_gains(),
            &init,
            &SignalSpec::zero(1, 1),
            &jit,
            Horizon::time(5.0),
        )
        .unwrap();
        assert!(arc.samples.iter().all(|s| distance_to_a(&s.state) == 0.0));
        assert!(arc.last().z.norm() > 0.5);
    }

    #[test]
    fn piecewise_segments_are_right_closed() {
        let f = piecewise(&[(5.0, -1.0), (10.0, 1.0)], 0.0);
        assert_eq!(f(0.0)[0], -1.0);
        assert_eq!(f(5.0)[0], -1.0);
        assert_eq!(f(5.0001)[0], 1.0);
        assert_eq!(f(10.5)[0], 0.0);
    }

    #[test]
    fn distance_and_v() {
        let s = HybridState::new(Vector::zeros(2), Vector::from_vec(vec![3.0, 4.0]), Vector::zeros(1), 0.0);
        assert_eq!(distance_to_a(&s), 5.0);
        let cert = Certificate {
            p1: Mat::identity(2, 2),
            p2: Mat::identity(1, 1) * 2.0,
            delta: 1.0,
            chi: 0.0,
            lambda_t: 0.1,
            gamma: 1.0,
            t2: 0.5,
        };
        let mut s2 = s.clone();
        s2.theta_tilde[0] = 1.0;
        assert!((eval_v(&cert, &s2) - 27.0).abs() < 1e-12);
        s2.tau = 0.5;
        assert!((eval_v(&cert, &s2) - (25.0 + 2.0 * 0.5f64.exp())).abs() < 1e-12);
    }

    #[test]
    fn csv_has_expected_columns() {
        let jit = JitterSequence::new(JitterKind::Constant(0.3), 0.2, 0.3).unwrap();
        let arc = simulate(
            &oscillator(),
            &oscillator_tuned_gains(),
            &osc_init(0.1),
            &SignalSpec::zero(1, 1),
            &jit,
            Horizon::time(0.2),
        )
        .unwrap();
        let csv = arc.to_csv(None);
        let head = csv.lines().next().unwrap();
        assert_eq!(head, "t,j,side,z1,z2,eps1,eps2,theta_tilde1,tau,dist_A,V");
        assert!(csv.contains(",pre-jump,"));
        assert!(csv.contains(",post-jump,"));
    }
}
