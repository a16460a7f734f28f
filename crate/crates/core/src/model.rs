//! Plant, sampling, and observer data plus the closed-loop error matrices.
//!
//! The plant is `ż = Az + Bψ(Sz) + Nw`, `y = Cz + η`, with performance
//! output `y_p = Cp (z − ẑ)`. The observer keeps an intersample injection
//! `θ` that flows as `θ̇ = Hθ` and is reset to `y − Cẑ` whenever a sample
//! arrives. In error coordinates `ε = z − ẑ`, `θ̃ = Cε − θ` the flow is
//! `(ε̇, θ̃̇) = F(ε, θ̃) + Qζ + Tw` and a sample applies
//! `(ε, θ̃)⁺ = G(ε, θ̃) + Nη`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::linalg::{eye, Mat, Vector};

/// Static nonlinearity `ψ: R^{n_q} → R^{n_s}`.
#[derive(Clone)]
pub enum Nonlinearity {
    /// `ψ ≡ 0`; used for linear plants.
    Zero,
    /// Componentwise `ψ(v)_i = amplitude · sin(v_i)`; requires `n_q == n_s`.
    Sin { amplitude: f64 },
    /// Arbitrary callable. Only the simulator evaluates it.
    Custom(Arc<dyn Fn(&Vector) -> Vector + Send + Sync>),
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Zero => write!(f, "Zero"),
            Nonlinearity::Sin { amplitude } => write!(f, "Sin {{ amplitude: {amplitude} }}"),
            Nonlinearity::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Nonlinearity {
    pub fn eval(&self, v: &Vector, n_s: usize) -> Vector {
        match self {
            Nonlinearity::Zero => Vector::zeros(n_s),
            Nonlinearity::Sin { amplitude } => v.map(|x| amplitude * x.sin()),
            Nonlinearity::Custom(f) => f(v),
        }
    }
}

/// Lipschitz plant data.
#[derive(Clone, Debug)]
pub struct PlantModel {
    pub a: Mat,
    pub b: Mat,
    pub s: Mat,
    pub n: Mat,
    pub c: Mat,
    pub cp: Mat,
    pub lipschitz: f64,
    pub psi: Nonlinearity,
}

impl PlantModel {
    /// A linear plant: `B = 0` (with `n_s = n_q = 1`), `ψ ≡ 0`, `ℓ = 1`.
    pub fn linear(a: Mat, n: Mat, c: Mat, cp: Mat) -> Self {
        let nz = a.nrows();
        PlantModel {
            b: Mat::zeros(nz, 1),
            s: Mat::zeros(1, nz),
            a,
            n,
            c,
            cp,
            lipschitz: 1.0,
            psi: Nonlinearity::Zero,
        }
    }

    pub fn nz(&self) -> usize {
        self.a.nrows()
    }
    pub fn ny(&self) -> usize {
        self.c.nrows()
    }
    pub fn nw(&self) -> usize {
        self.n.ncols()
    }
    pub fn ns(&self) -> usize {
        self.b.ncols()
    }
    pub fn nq(&self) -> usize {
        self.s.nrows()
    }
    pub fn nyp(&self) -> usize {
        self.cp.nrows()
    }

    /// True when `B` is identically zero; ψ is then ignored everywhere.
    pub fn is_linear(&self) -> bool {
        self.b.iter().all(|v| *v == 0.0)
    }

    /// `ψ(Sv)`, or zero for linear plants.
    pub fn psi_of_state(&self, v: &Vector) -> Vector {
        if self.is_linear() {
            return Vector::zeros(self.ns());
        }
        self.psi.eval(&(&self.s * v), self.ns())
    }

    /// Mismatch `ζ(v1, v2) = ψ(S v1) − ψ(S (v1 − v2))`.
    pub fn zeta(&self, v1: &Vector, v2: &Vector) -> Vector {
        if self.is_linear() {
            return Vector::zeros(self.ns());
        }
        self.psi_of_state(v1) - self.psi_of_state(&(v1 - v2))
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_plant(self);
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidPlant(report.to_string()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

/// Outcome of [`validate_plant`]. Lipschitz spot-check findings are
/// reported as warnings since sampling cannot prove or refute the bound.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: &'static str, message: impl Into<String>) {
        self.violations.push(Violation {
            field,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.field, v.message))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks dimensions, finiteness, and `ℓ > 0`; spot-checks the Lipschitz
/// bound of ψ on seeded random probe pairs.
pub fn validate_plant(plant: &PlantModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let nz = plant.a.nrows();
    if nz == 0 {
        report.push("a", "state dimension must be at least 1");
    }
    if plant.a.ncols() != nz {
        report.push("a", format!("must be square, got {}x{}", nz, plant.a.ncols()));
    }
    let checks: [(&'static str, &Mat, Option<usize>, Option<usize>); 5] = [
        ("b", &plant.b, Some(nz), None),
        ("s", &plant.s, None, Some(nz)),
        ("n", &plant.n, Some(nz), None),
        ("c", &plant.c, None, Some(nz)),
        ("cp", &plant.cp, None, Some(nz)),
    ];
    for (field, m, rows, cols) in checks {
        if let Some(r) = rows {
            if m.nrows() != r {
                report.push(field, format!("expected {} rows, got {}", r, m.nrows()));
            }
        }
        if let Some(c) = cols {
            if m.ncols() != c {
                report.push(field, format!("expected {} columns, got {}", c, m.ncols()));
            }
        }
    }
    if plant.c.nrows() == 0 {
        report.push("c", "output dimension must be at least 1");
    }
    for (field, m) in [
        ("a", &plant.a),
        ("b", &plant.b),
        ("s", &plant.s),
        ("n", &plant.n),
        ("c", &plant.c),
        ("cp", &plant.cp),
    ] {
        if m.iter().any(|v| !v.is_finite()) {
            report.push(field, "contains non-finite entries");
        }
    }
    if !(plant.lipschitz > 0.0 && plant.lipschitz.is_finite()) {
        report.push("lipschitz", format!("must be positive and finite, got {}", plant.lipschitz));
    }
    if !plant.is_linear() {
        if let Nonlinearity::Sin { .. } = plant.psi {
            if plant.nq() != plant.ns() {
                report.push("psi", "componentwise sin needs n_q == n_s");
            }
        }
        if report.is_ok() {
            if let Some(ratio) = lipschitz_spot_check(plant, 256, 7) {
                if ratio > plant.lipschitz * (1.0 + 1e-12) {
                    report.warnings.push(Violation {
                        field: "psi",
                        message: format!(
                            "probe pair with difference quotient {ratio:.6} exceeds lipschitz {}",
                            plant.lipschitz
                        ),
                    });
                }
            }
        }
    }
    report
}

/// Largest observed `|ψ(v1) − ψ(v2)| / |v1 − v2|` over seeded probe pairs.
pub fn lipschitz_spot_check(plant: &PlantModel, probes: usize, seed: u64) -> Option<f64> {
    let nq = plant.nq();
    if nq == 0 || plant.is_linear() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for k in 0..probes {
        let v1 = Vector::from_fn(nq, |_, _| rng.random_range(-4.0..4.0));
        // alternate far and near pairs; near pairs probe the local slope
        let spread = if k % 2 == 0 { 2.0 } else { 1e-3 };
        let v2 = &v1 + Vector::from_fn(nq, |_, _| rng.random_range(-spread..spread));
        let dv = (&v1 - &v2).norm();
        if dv == 0.0 {
            continue;
        }
        let dpsi = (plant.psi.eval(&v1, plant.ns()) - plant.psi.eval(&v2, plant.ns())).norm();
        worst = worst.max(dpsi / dv);
    }
    Some(worst)
}

/// Output sampling window `T1 ≤ t_{k+1} − t_k ≤ T2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub t1: f64,
    pub t2: f64,
}

impl SamplingSpec {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1 > 0.0 && t1 <= t2 && t2.is_finite()) {
            return Err(Error::InvalidArgument {
                name: "sampling",
                reason: format!("need 0 < T1 <= T2, got T1 = {t1}, T2 = {t2}"),
            });
        }
        Ok(SamplingSpec { t1, t2 })
    }
}

/// LMI relaxation used to synthesise the gains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DesignMethod {
    /// Cancelling substitution `J = P1 L`, `Y = (H + CL)ᵀ P2`.
    PropPred,
    /// Slack-variable relaxation with the lower-right slack blocks set to zero.
    PropX80,
    /// Slack-variable relaxation reusing `U` in the lower-right slack blocks.
    PropX8X6,
    /// Zero-order hold, `H = 0`.
    #[serde(rename = "ZOH")]
    Zoh,
}

impl DesignMethod {
    pub const ALL: [DesignMethod; 4] = [
        DesignMethod::PropPred,
        DesignMethod::PropX80,
        DesignMethod::PropX8X6,
        DesignMethod::Zoh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DesignMethod::PropPred => "PropPred",
            DesignMethod::PropX80 => "PropX80",
            DesignMethod::PropX8X6 => "PropX8X6",
            DesignMethod::Zoh => "ZOH",
        }
    }
}

impl fmt::Display for DesignMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DesignMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "proppred" | "pred" => Ok(DesignMethod::PropPred),
            "propx80" | "x80" => Ok(DesignMethod::PropX80),
            "propx8x6" | "x8x6" => Ok(DesignMethod::PropX8X6),
            "zoh" => Ok(DesignMethod::Zoh),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

/// Where a gain pair came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GainTag {
    Designed(DesignMethod),
    #[serde(rename = "manual")]
    Manual,
}

impl fmt::Display for GainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GainTag::Designed(m) => write!(f, "{m}"),
            GainTag::Manual => f.write_str("manual"),
        }
    }
}

/// Observer gains `(L, H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverGains {
    pub l: Mat,
    pub h: Mat,
    pub tag: GainTag,
}

impl ObserverGains {
    pub fn new(l: Mat, h: Mat, tag: GainTag) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(dim_err("H", "square", format!("{}x{}", h.nrows(), h.ncols())));
        }
        if l.ncols() != h.nrows() {
            return Err(dim_err("L columns", h.nrows(), l.ncols()));
        }
        if tag == GainTag::Designed(DesignMethod::Zoh) && h.iter().any(|v| *v != 0.0) {
            return Err(Error::InvalidArgument {
                name: "H",
                reason: "zero-order-hold gains must have H = 0".into(),
            });
        }
        Ok(ObserverGains { l, h, tag })
    }

    pub fn manual(l: Mat, h: Mat) -> Result<Self> {
        Self::new(l, h, GainTag::Manual)
    }

    /// Predictor-style injection `H = −CL`.
    pub fn predictor(plant: &PlantModel, l: Mat) -> Result<Self> {
        check_gain_dims(plant, &l, &Mat::zeros(plant.ny(), plant.ny()))?;
        let h = -(&plant.c * &l);
        Self::new(l, h, GainTag::Manual)
    }

    pub fn is_predictor(&self, plant: &PlantModel, tol: f64) -> bool {
        (&self.h + &plant.c * &self.l).iter().all(|v| v.abs() <= tol)
    }
}

pub(crate) fn check_gain_dims(plant: &PlantModel, l: &Mat, h: &Mat) -> Result<()> {
    let (nz, ny) = (plant.nz(), plant.ny());
    if l.shape() != (nz, ny) {
        return Err(dim_err("L", format!("{nz}x{ny}"), format!("{}x{}", l.nrows(), l.ncols())));
    }
    if h.shape() != (ny, ny) {
        return Err(dim_err("H", format!("{ny}x{ny}"), format!("{}x{}", h.nrows(), h.ncols())));
    }
    Ok(())
}

/// Closed-loop matrices of the `(ε, θ̃)` error dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSystemMatrices {
    pub f: Mat,
    pub q: Mat,
    pub t: Mat,
    pub g_jump: Mat,
    pub n_jump: Mat,
}

pub fn assemble_error_matrices(plant: &PlantModel, gains: &ObserverGains) -> Result<ErrorSystemMatrices> {
    plant.ensure_valid()?;
    check_gain_dims(plant, &gains.l, &gains.h)?;
    let (nz, ny) = (plant.nz(), plant.ny());
    let (a, c, l, h) = (&plant.a, &plant.c, &gains.l, &gains.h);
    let cl = c * l;
    let mut f = Mat::zeros(nz + ny, nz + ny);
    f.view_mut((0, 0), (nz, nz)).copy_from(&(a - l * c));
    f.view_mut((0, nz), (nz, ny)).copy_from(l);
    f.view_mut((nz, 0), (ny, nz)).copy_from(&(c * a - &cl * c - h * c));
    f.view_mut((nz, nz), (ny, ny)).copy_from(&(&cl + h));

    let mut q = Mat::zeros(nz + ny, plant.ns());
    q.view_mut((0, 0), (nz, plant.ns())).copy_from(&plant.b);
    q.view_mut((nz, 0), (ny, plant.ns())).copy_from(&(c * &plant.b));

    let mut t = Mat::zeros(nz + ny, plant.nw());
    t.view_mut((0, 0), (nz, plant.nw())).copy_from(&plant.n);
    t.view_mut((nz, 0), (ny, plant.nw())).copy_from(&(c * &plant.n));

    let mut g_jump = Mat::zeros(nz + ny, nz + ny);
    g_jump.view_mut((0, 0), (nz, nz)).copy_from(&eye(nz));
    let mut n_jump = Mat::zeros(nz + ny, ny);
    n_jump.view_mut((nz, 0), (ny, ny)).copy_from(&(-eye(ny)));

    Ok(ErrorSystemMatrices { f, q, t, g_jump, n_jump })
}

/// `F = F_l F_r` with `F_l = [[I, 0], [C, I]]` and `F_r = [[A − LC, L], [−HC, H]]`.
pub fn factorize_f(plant: &PlantModel, gains: &ObserverGains) -> Result<(Mat, Mat)> {
    plant.ensure_valid()?;
    check_gain_dims(plant, &gains.l, &gains.h)?;
    let (nz, ny) = (plant.nz(), plant.ny());
    let mut fl = eye(nz + ny);
    fl.view_mut((nz, 0), (ny, nz)).copy_from(&plant.c);
    let mut fr = Mat::zeros(nz + ny, nz + ny);
    fr.view_mut((0, 0), (nz, nz)).copy_from(&(&plant.a - &gains.l * &plant.c));
    fr.view_mut((0, nz), (nz, ny)).copy_from(&gains.l);
    fr.view_mut((nz, 0), (ny, nz)).copy_from(&(-(&gains.h * &plant.c)));
    fr.view_mut((nz, nz), (ny, ny)).copy_from(&gains.h);
    Ok((fl, fr))
}
