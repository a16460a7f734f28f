//! Builders for the verification, design, existence, and corollary problems.

use crate::error::{Error, Result};
use crate::linalg::{eye, Mat};
use crate::lmi::expr::AffineExpr;
use crate::lmi::problem::{
    CorollaryVariant, LmiProblem, ProblemBuilder, ProblemKind, ProblemMeta, Strictness,
};
use crate::model::{check_gain_dims, DesignMethod, ObserverGains, PlantModel};

/// How the performance level enters the problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Performance {
    /// `μ = γ²` is a decision variable and is minimised.
    Free,
    /// `γ` is fixed.
    Fixed(f64),
    /// The disturbance rows and columns are removed.
    Dropped,
}

/// Corollary variants with their scalar parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Corollary {
    NoGamma { lambda_t: f64 },
    NoLambda { gamma: f64 },
}

impl Corollary {
    pub fn variant(self) -> CorollaryVariant {
        match self {
            Corollary::NoGamma { .. } => CorollaryVariant::NoGamma,
            Corollary::NoLambda { .. } => CorollaryVariant::NoLambda,
        }
    }
}

/// What the corollary constraints are imposed on.
#[derive(Clone, Copy, Debug)]
pub enum CorollaryBase<'a> {
    Gains(&'a ObserverGains),
    Design(DesignMethod),
}

/// Extra switches for design problems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignOptions {
    /// Forces `Y = 0` in the cancelling design, giving `H = −CL`.
    pub predictor: bool,
    /// Adds `X + Xᵀ ≻ 0` to the zero-order-hold design.
    pub zoh_nonsingular: bool,
    /// Bound `‖J‖ ≤ cap` through `[[cap I, J], [Jᵀ, cap I]] ⪰ 0`, together
    /// with `P1 ⪰ I` (or `He(X)/2 ⪰ I`), which gives `‖L‖ ≤ cap`.
    pub gain_cap: Option<f64>,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            predictor: false,
            zoh_nonsingular: true,
            gain_cap: None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Params {
    lambda_t: f64,
    delta: f64,
    t2: f64,
    perf: Performance,
    strictness: Strictness,
}

impl Params {
    fn check(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidArgument {
                name: "delta",
                reason: format!("must be positive, got {}", self.delta),
            });
        }
        if !(self.t2 > 0.0 && self.t2.is_finite()) {
            return Err(Error::InvalidArgument {
                name: "T2",
                reason: format!("must be positive, got {}", self.t2),
            });
        }
        if !(self.lambda_t >= 0.0 && self.lambda_t.is_finite()) {
            return Err(Error::InvalidArgument {
                name: "lambda_t",
                reason: format!("must be nonnegative, got {}", self.lambda_t),
            });
        }
        if let Performance::Fixed(g) = self.perf {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidArgument {
                    name: "gamma",
                    reason: format!("must be positive, got {g}"),
                });
            }
        }
        Ok(())
    }

    fn meta(&self, kind: ProblemKind) -> ProblemMeta {
        ProblemMeta {
            kind,
            delta: Some(self.delta),
            t2: Some(self.t2),
            lambda_t: Some(self.lambda_t),
            fixed_gamma: match self.perf {
                Performance::Fixed(g) => Some(g),
                _ => None,
            },
        }
    }
}

/// Lyapunov data shared by every builder.
struct Common {
    p1: AffineExpr,
    p2: AffineExpr,
    chi: Option<AffineExpr>,
    perf: Option<AffineExpr>,
}

fn declare_lyapunov(b: &mut ProblemBuilder, plant: &PlantModel) -> (AffineExpr, AffineExpr) {
    let p1 = b.sym_matrix("P1", plant.nz());
    let p2 = b.sym_matrix("P2", plant.ny());
    (p1, p2)
}

/// Declares `χ` (nonlinear plants only) and the performance block, then
/// records the objective and the `γ` readout.
fn declare_tail(b: &mut ProblemBuilder, plant: &PlantModel, p1: AffineExpr, p2: AffineExpr, perf: Performance) -> Common {
    let chi = if plant.is_linear() { None } else { Some(b.scalar("chi")) };
    let nw = plant.nw();
    let perf_block = match perf {
        Performance::Free => {
            let mu = b.scalar("mu");
            b.minimize(&mu);
            Some(-mu.scalar_times(&eye(nw)))
        }
        Performance::Fixed(g) => Some(AffineExpr::constant(eye(nw) * -(g * g))),
        Performance::Dropped => None,
    };
    if let Some(c) = &chi {
        b.positive_definite("chi", c);
    }
    b.positive_definite("P1", &p1);
    b.positive_definite("P2", &p2);
    Common {
        p1,
        p2,
        chi,
        perf: perf_block,
    }
}

fn cst(m: Mat) -> AffineExpr {
    AffineExpr::constant(m)
}

/// Assembles the symmetric matrix with rows `(x-blocks..., w, ζ)` where
/// the `w` and `ζ` parts are present only when requested.
fn assemble(
    plant: &PlantModel,
    core_sizes: &[usize],
    mut upper: Vec<Vec<Option<AffineExpr>>>,
    w_col: Vec<AffineExpr>,
    z_col: Vec<AffineExpr>,
    common: &Common,
) -> AffineExpr {
    let mut sizes = core_sizes.to_vec();
    let k = core_sizes.len();
    if let Some(perf) = &common.perf {
        sizes.push(plant.nw());
        for (i, e) in w_col.into_iter().enumerate() {
            upper[i].push(Some(e));
        }
        upper.push(vec![Some(perf.clone())]);
    }
    if let Some(chi) = &common.chi {
        sizes.push(plant.ns());
        for (i, e) in z_col.into_iter().enumerate() {
            upper[i].push(Some(e));
        }
        if common.perf.is_some() {
            upper[k].push(None);
        }
        upper.push(vec![Some(-chi.scalar_times(&eye(plant.ns())))]);
    }
    AffineExpr::sym_block(&upper, &sizes)
}

/// `CpᵀCp + χℓ²SᵀS + 2λt P1`.
fn n11(plant: &PlantModel, common: &Common, lambda_t: f64) -> AffineExpr {
    let mut e = common.p1.scale(2.0 * lambda_t) + &(plant.cp.transpose() * &plant.cp);
    if let Some(chi) = &common.chi {
        let ell2 = plant.lipschitz * plant.lipschitz;
        e = e + chi.scalar_times(&(plant.s.transpose() * &plant.s * ell2));
    }
    e
}

fn m_fixed_gains(plant: &PlantModel, gains: &ObserverGains, common: &Common, p: &Params, tau: f64) -> AffineExpr {
    let (a, c, l, h) = (&plant.a, &plant.c, &gains.l, &gains.h);
    let e = (p.delta * tau).exp();
    let (p1, p2) = (&common.p1, &common.p2);
    let acl = a - l * c;
    let f21 = c * a - c * l * c - h * c;
    let f22 = c * l + h;
    let m11 = p1.rmul(&acl).he() + n11(plant, common, p.lambda_t);
    let m12 = p1.rmul(l) + p2.lmul(&f21.transpose()).scale(e);
    let m22 = (p2.rmul(&f22).he() + p2.scale(2.0 * p.lambda_t - p.delta)).scale(e);
    assemble(
        plant,
        &[plant.nz(), plant.ny()],
        vec![vec![Some(m11), Some(m12)], vec![Some(m22)]],
        vec![p1.rmul(&plant.n), p2.rmul(&(c * &plant.n)).scale(e)],
        vec![p1.rmul(&plant.b), p2.rmul(&(c * &plant.b)).scale(e)],
        common,
    )
}

fn build_fixed(plant: &PlantModel, gains: &ObserverGains, p: Params, kind: ProblemKind) -> Result<LmiProblem> {
    plant.ensure_valid()?;
    check_gain_dims(plant, &gains.l, &gains.h)?;
    p.check()?;
    let mut b = ProblemBuilder::new();
    let (p1, p2) = declare_lyapunov(&mut b, plant);
    let common = declare_tail(&mut b, plant, p1, p2, p.perf);
    let m0 = m_fixed_gains(plant, gains, &common, &p, 0.0);
    let mt = m_fixed_gains(plant, gains, &common, &p, p.t2);
    b.nsd("M(0)", &m0, p.strictness);
    b.nsd("M(T2)", &mt, p.strictness);
    Ok(b.finish(p.meta(kind)))
}

/// `M(0) ⪯ 0`, `M(T2) ⪯ 0` in `(P1, P2, χ, μ)` for fixed gains.
pub fn build_verification_problem(
    plant: &PlantModel,
    gains: &ObserverGains,
    lambda_t: f64,
    delta: f64,
    t2: f64,
    fixed_gamma: Option<f64>,
) -> Result<LmiProblem> {
    let perf = fixed_gamma.map_or(Performance::Free, Performance::Fixed);
    build_fixed(
        plant,
        gains,
        Params {
            lambda_t,
            delta,
            t2,
            perf,
            strictness: Strictness::NonStrict,
        },
        ProblemKind::Verification,
    )
}

pub fn build_design_problem(
    plant: &PlantModel,
    method: DesignMethod,
    lambda_t: f64,
    delta: f64,
    t2: f64,
    fixed_gamma: Option<f64>,
) -> Result<LmiProblem> {
    build_design_problem_with(plant, method, lambda_t, delta, t2, fixed_gamma, &DesignOptions::default())
}

pub fn build_design_problem_with(
    plant: &PlantModel,
    method: DesignMethod,
    lambda_t: f64,
    delta: f64,
    t2: f64,
    fixed_gamma: Option<f64>,
    opts: &DesignOptions,
) -> Result<LmiProblem> {
    let perf = fixed_gamma.map_or(Performance::Free, Performance::Fixed);
    let strictness = match method {
        DesignMethod::PropPred => Strictness::NonStrict,
        _ => Strictness::Strict,
    };
    build_design(
        plant,
        method,
        Params {
            lambda_t,
            delta,
            t2,
            perf,
            strictness,
        },
        opts,
        ProblemKind::Design(method),
    )
}

fn build_design(
    plant: &PlantModel,
    method: DesignMethod,
    p: Params,
    opts: &DesignOptions,
    kind: ProblemKind,
) -> Result<LmiProblem> {
    plant.ensure_valid()?;
    p.check()?;
    if method == DesignMethod::PropX80 && p.delta <= 2.0 * p.lambda_t {
        return Err(Error::DeltaRange {
            delta: p.delta,
            bound: 2.0 * p.lambda_t,
        });
    }
    let mut b = ProblemBuilder::new();
    let (p1, p2) = declare_lyapunov(&mut b, plant);
    let (nz, ny) = (plant.nz(), plant.ny());
    let j_var;
    // L is recovered through this matrix; its symmetric part is floored at I
    // when a cap is set so that ‖L‖ ≤ ‖J‖.
    let recovery;
    match method {
        DesignMethod::PropPred => {
            recovery = p1.clone();
            let j = b.full_matrix("J", nz, ny);
            let y = if opts.predictor {
                let y = AffineExpr::zeros(ny, ny);
                b.name("Y", y.clone());
                y
            } else {
                b.full_matrix("Y", ny, ny)
            };
            let common = declare_tail(&mut b, plant, p1, p2, p.perf);
            for (name, tau) in [("M(0)", 0.0), ("M(T2)", p.t2)] {
                let m = m_cancelling(plant, &common, &j, &y, &p, tau);
                b.nsd(name, &m, p.strictness);
            }
            j_var = j;
        }
        DesignMethod::PropX80 | DesignMethod::PropX8X6 => {
            let x = b.full_matrix("X", nz, nz);
            recovery = x.he().scale(0.5);
            let u = b.full_matrix("U", ny, ny);
            let j = b.full_matrix("J", nz, ny);
            let w = b.full_matrix("W", ny, ny);
            let common = declare_tail(&mut b, plant, p1, p2, p.perf);
            let blocks = if method == DesignMethod::PropX80 {
                slack_blocks_x80(plant, &x, &u, &j, &w)
            } else {
                slack_blocks_x8x6(plant, &x, &u, &j, &w)
            };
            for (name, tau) in [("Psi(0)", 0.0), ("Psi(T2)", p.t2)] {
                let m = projected(plant, &common, &blocks, &p, tau);
                b.nsd(name, &m, p.strictness);
            }
            j_var = j;
        }
        DesignMethod::Zoh => {
            let x = b.full_matrix("X", nz, nz);
            recovery = x.he().scale(0.5);
            let xs = [
                b.full_matrix("X5", ny, nz),
                b.full_matrix("X6", ny, ny),
                b.full_matrix("X7", ny, nz),
                b.full_matrix("X8", ny, ny),
            ];
            let ys = [
                b.full_matrix("Y5", ny, nz),
                b.full_matrix("Y6", ny, ny),
                b.full_matrix("Y7", ny, nz),
                b.full_matrix("Y8", ny, ny),
            ];
            let j = b.full_matrix("J", nz, ny);
            let common = declare_tail(&mut b, plant, p1, p2, p.perf);
            for (name, tau, s) in [("Psi(0)", 0.0, &xs), ("Psi(T2)", p.t2, &ys)] {
                let blocks = slack_blocks_zoh(plant, &x, &j, s);
                let m = projected(plant, &common, &blocks, &p, tau);
                b.nsd(name, &m, p.strictness);
            }
            if opts.zoh_nonsingular {
                b.nsd("X + X' > 0", &(-x.he()), Strictness::Strict);
            }
            j_var = j;
        }
    }
    if let Some(cap) = opts.gain_cap {
        if !(cap > 0.0) {
            return Err(Error::InvalidArgument {
                name: "gain_cap",
                reason: format!("must be positive, got {cap}"),
            });
        }
        let capm = AffineExpr::sym_block(
            &[
                vec![Some(cst(eye(nz) * cap)), Some(j_var)],
                vec![Some(cst(eye(ny) * cap))],
            ],
            &[nz, ny],
        );
        b.nsd("gain cap", &(-capm), Strictness::NonStrict);
        b.nsd("recovery floor", &(cst(eye(nz)) - recovery), Strictness::NonStrict);
    }
    Ok(b.finish(p.meta(kind)))
}

/// Cancelling design with `J = P1 L`, `Y = (H + CL)ᵀ P2`.
fn m_cancelling(plant: &PlantModel, common: &Common, j: &AffineExpr, y: &AffineExpr, p: &Params, tau: f64) -> AffineExpr {
    let (a, c) = (&plant.a, &plant.c);
    let e = (p.delta * tau).exp();
    let (p1, p2) = (&common.p1, &common.p2);
    let m11 = (p1.rmul(a) - j.rmul(c)).he() + n11(plant, common, p.lambda_t);
    let m12 = j + &(p2.lmul(&(a.transpose() * c.transpose())) - y.lmul(&c.transpose())).scale(e);
    let m22 = (y.he() + p2.scale(2.0 * p.lambda_t - p.delta)).scale(e);
    assemble(
        plant,
        &[plant.nz(), plant.ny()],
        vec![vec![Some(m11), Some(m12)], vec![Some(m22)]],
        vec![p1.rmul(&plant.n), p2.rmul(&(c * &plant.n)).scale(e)],
        vec![p1.rmul(&plant.b), p2.rmul(&(c * &plant.b)).scale(e)],
        common,
    )
}

/// Slack blocks `(S1, S2, S3, S4, S5, S6, S7)` of the projected condition.
struct SlackBlocks {
    s1: AffineExpr,
    s2: AffineExpr,
    s3: AffineExpr,
    s4: AffineExpr,
    s5: AffineExpr,
    s6: AffineExpr,
    s7: AffineExpr,
}

fn grid2(plant: &PlantModel, a: AffineExpr, b: AffineExpr, c: AffineExpr, d: AffineExpr) -> AffineExpr {
    let s = [plant.nz(), plant.ny()];
    AffineExpr::block(&[vec![Some(a), Some(b)], vec![Some(c), Some(d)]], &s, &s)
}

fn col2(plant: &PlantModel, top: AffineExpr, cols: usize) -> AffineExpr {
    AffineExpr::block(
        &[vec![Some(top)], vec![None]],
        &[plant.nz(), plant.ny()],
        &[cols],
    )
}

fn z(r: usize, c: usize) -> AffineExpr {
    AffineExpr::zeros(r, c)
}

/// `−X + XᵀA − JC`, `AᵀX − CᵀJᵀ`, `[XᵀN; 0]`, `[XᵀB; 0]`.
fn shared_slack_parts(plant: &PlantModel, x: &AffineExpr, j: &AffineExpr) -> (AffineExpr, AffineExpr, AffineExpr, AffineExpr) {
    let (a, c) = (&plant.a, &plant.c);
    let xt = x.transpose();
    let top = &(-x) + &(xt.rmul(a) - j.rmul(c));
    let left = x.lmul(&a.transpose()) - j.transpose().lmul(&c.transpose());
    let xn = col2(plant, xt.rmul(&plant.n), plant.nw());
    let xb = col2(plant, xt.rmul(&plant.b), plant.ns());
    (top, left, xn, xb)
}

fn slack_blocks_x80(plant: &PlantModel, x: &AffineExpr, u: &AffineExpr, j: &AffineExpr, w: &AffineExpr) -> SlackBlocks {
    let (nz, ny) = (plant.nz(), plant.ny());
    let c = &plant.c;
    let (top, left, xn, xb) = shared_slack_parts(plant, x, j);
    SlackBlocks {
        s1: grid2(plant, -x, u.lmul(&c.transpose()), z(ny, nz), -u),
        s2: grid2(plant, top, j.clone(), -w.rmul(c), w.clone()),
        s3: xn.clone(),
        s4: xb.clone(),
        s5: grid2(plant, left, z(nz, ny), j.transpose(), z(ny, ny)),
        s6: xn,
        s7: xb,
    }
}

fn slack_blocks_x8x6(plant: &PlantModel, x: &AffineExpr, u: &AffineExpr, j: &AffineExpr, w: &AffineExpr) -> SlackBlocks {
    let (nz, ny) = (plant.nz(), plant.ny());
    let c = &plant.c;
    let (top, left, xn, xb) = shared_slack_parts(plant, x, j);
    SlackBlocks {
        s1: grid2(plant, -x, u.lmul(&c.transpose()), z(ny, nz), -u),
        s2: grid2(plant, top, j + &u.lmul(&c.transpose()), -w.rmul(c), w - u),
        s3: xn.clone(),
        s4: xb.clone(),
        s5: grid2(plant, left, -w.transpose().lmul(&c.transpose()), j.transpose(), w.transpose()),
        s6: xn,
        s7: xb,
    }
}

/// `s = [X5, X6, X7, X8]` (or the `Y` counterparts).
fn slack_blocks_zoh(plant: &PlantModel, x: &AffineExpr, j: &AffineExpr, s: &[AffineExpr; 4]) -> SlackBlocks {
    let (nz, ny) = (plant.nz(), plant.ny());
    let ct = plant.c.transpose();
    let (top, left, xn, xb) = shared_slack_parts(plant, x, j);
    SlackBlocks {
        s1: grid2(plant, &(-x) + &s[0].lmul(&ct), s[1].lmul(&ct), -&s[0], -&s[1]),
        s2: grid2(plant, top + s[2].lmul(&ct), j + &s[3].lmul(&ct), -&s[2], -&s[3]),
        s3: xn.clone(),
        s4: xb.clone(),
        s5: grid2(plant, left, z(nz, ny), j.transpose(), z(ny, ny)),
        s6: xn,
        s7: xb,
    }
}

fn diag2(plant: &PlantModel, a: AffineExpr, d: AffineExpr) -> AffineExpr {
    let s = [plant.nz(), plant.ny()];
    AffineExpr::block(&[vec![Some(a), None], vec![None, Some(d)]], &s, &s)
}

/// `[[He(S1), S2 + P, S3, S4], [•, 𝒩 + He(S5), S6, S7], [•, •, −μI, 0], [•, •, •, −χI]]`
/// with `P = P1 ⊕ e^{δτ}P2` and `𝒩 = (2λtP1 + CpᵀCp + χℓ²SᵀS) ⊕ e^{δτ}(2λt − δ)P2`.
fn projected(plant: &PlantModel, common: &Common, s: &SlackBlocks, p: &Params, tau: f64) -> AffineExpr {
    let e = (p.delta * tau).exp();
    let nx = plant.nz() + plant.ny();
    let pp = diag2(plant, common.p1.clone(), common.p2.scale(e));
    let nn = diag2(
        plant,
        n11(plant, common, p.lambda_t),
        common.p2.scale(e * (2.0 * p.lambda_t - p.delta)),
    );
    assemble(
        plant,
        &[nx, nx],
        vec![
            vec![Some(s.s1.he()), Some(&s.s2 + &pp)],
            vec![Some(nn + s.s5.he())],
        ],
        vec![s.s3.clone(), s.s6.clone()],
        vec![s.s4.clone(), s.s7.clone()],
        common,
    )
}

/// Strict existence condition in `(P1, J, χ, μ̂)`:
/// `[[He(P1A − JC) + CpᵀCp + χℓ²SᵀS, P1N, P1B], [•, −μ̂I, 0], [•, •, −χI]] ≺ 0`.
pub fn build_existence_problem(plant: &PlantModel) -> Result<LmiProblem> {
    plant.ensure_valid()?;
    let mut b = ProblemBuilder::new();
    let (nz, ny) = (plant.nz(), plant.ny());
    let p1 = b.sym_matrix("P1", nz);
    let j = b.full_matrix("J", nz, ny);
    let chi = if plant.is_linear() { None } else { Some(b.scalar("chi")) };
    let mu = b.scalar("mu_hat");
    b.minimize(&mu);
    let mut m11 = (p1.rmul(&plant.a) - j.rmul(&plant.c)).he() + &(plant.cp.transpose() * &plant.cp);
    if let Some(chi) = &chi {
        m11 = m11 + chi.scalar_times(&(plant.s.transpose() * &plant.s * plant.lipschitz.powi(2)));
    }
    let mut sizes = vec![nz, plant.nw()];
    let mut upper = vec![
        vec![Some(m11), Some(p1.rmul(&plant.n))],
        vec![Some(-mu.scalar_times(&eye(plant.nw())))],
    ];
    if let Some(chi) = &chi {
        sizes.push(plant.ns());
        upper[0].push(Some(p1.rmul(&plant.b)));
        upper[1].push(None);
        upper.push(vec![Some(-chi.scalar_times(&eye(plant.ns())))]);
        b.positive_definite("chi", chi);
    }
    b.positive_definite("P1", &p1);
    let m = AffineExpr::sym_block(&upper, &sizes);
    b.nsd("existence", &m, Strictness::Strict);
    Ok(b.finish(ProblemMeta {
        kind: ProblemKind::Existence,
        delta: None,
        t2: None,
        lambda_t: None,
        fixed_gamma: None,
    }))
}

/// Strict corollary conditions on fixed gains or on a design relaxation.
pub fn build_corollary_problem(
    plant: &PlantModel,
    corollary: Corollary,
    base: CorollaryBase<'_>,
    delta: f64,
    t2: f64,
) -> Result<LmiProblem> {
    let (lambda_t, perf) = match corollary {
        Corollary::NoGamma { lambda_t } => {
            if !(lambda_t > 0.0) {
                return Err(Error::InvalidArgument {
                    name: "lambda_t",
                    reason: format!("must be positive, got {lambda_t}"),
                });
            }
            (lambda_t, Performance::Dropped)
        }
        Corollary::NoLambda { gamma } => (0.0, Performance::Fixed(gamma)),
    };
    let p = Params {
        lambda_t,
        delta,
        t2,
        perf,
        strictness: Strictness::Strict,
    };
    let kind = ProblemKind::Corollary(corollary.variant());
    match base {
        CorollaryBase::Gains(g) => build_fixed(plant, g, p, kind),
        CorollaryBase::Design(m) => build_design(plant, m, p, &DesignOptions::default(), kind),
    }
}

/// Closed-form scalar variable count of each design on a linear plant
/// with free `μ`.
pub fn count_scalar_variables(method: DesignMethod, nz: usize, ny: usize) -> Result<usize> {
    if nz == 0 || ny == 0 {
        return Err(Error::InvalidArgument {
            name: "dimensions",
            reason: format!("n_z and n_y must be at least 1, got {nz}, {ny}"),
        });
    }
    let base = nz * (nz + 1) / 2 + ny * (ny + 1) / 2;
    Ok(match method {
        DesignMethod::PropPred => base + ny * ny + nz * ny + 1,
        DesignMethod::PropX80 | DesignMethod::PropX8X6 => base + 2 * ny * ny + nz * nz + nz * ny + 1,
        DesignMethod::Zoh => base + 4 * ny * ny + nz * nz + 5 * nz * ny + 1,
    })
}
