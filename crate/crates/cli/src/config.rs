//! JSON scenario files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sporadic_observer::benchmarks::{lin_grid, log_grid};
use sporadic_observer::design::default_delta_grid;
use sporadic_observer::model::{validate_plant, GainTag, Nonlinearity};
use sporadic_observer::sim::{piecewise, JitterKind, SignalSpec};
use sporadic_observer::{DesignMethod, Mat, ObserverGains, PlantModel, SamplingSpec, Vector};

use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub plant: PlantBlock,
    pub sampling: SamplingBlock,
    pub design: DesignBlock,
    #[serde(default)]
    pub simulate: Option<SimulateBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

pub type Rows = Vec<Vec<f64>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantBlock {
    pub a: Rows,
    #[serde(default)]
    pub b: Option<Rows>,
    #[serde(default)]
    pub s: Option<Rows>,
    pub n: Rows,
    pub c: Rows,
    pub cp: Rows,
    #[serde(default)]
    pub lipschitz: f64,
    #[serde(default)]
    pub nonlinearity: NonlinearitySel,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NonlinearitySel {
    #[default]
    Zero,
    Sin { amplitude: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingBlock {
    pub t1: f64,
    pub t2: f64,
    /// `[lo, hi]` for pareto sweeps.
    #[serde(default)]
    pub t2_range: Option<[f64; 2]>,
    #[serde(default = "default_t2_points")]
    pub t2_points: usize,
}

fn default_t2_points() -> usize {
    5
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBlock {
    #[serde(default)]
    pub method: Option<String>,
    pub lambda_t: f64,
    /// Fixed performance level; free when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub delta_grid: Option<GridSpec>,
    /// Single `δ` used by export-sdpa; defaults to the first grid point.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub gain_cap: Option<f64>,
    /// Given gains for verify, simulate and export-sdpa.
    #[serde(default)]
    pub gains: Option<GainsFile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub spacing: Spacing,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Lin,
}

impl GridSpec {
    /// Parses `"lo,hi,n,log|lin"`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("--delta-grid expects \"lo,hi,n,log|lin\", got {s:?}"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lo, hi, n, sp] = parts.as_slice() else {
            return Err(bad());
        };
        let spacing = match *sp {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            _ => return Err(bad()),
        };
        Ok(GridSpec {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            n: n.parse().map_err(|_| bad())?,
            spacing,
        })
    }

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let ok = self.n > 0 && self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite();
        if !ok {
            return Err(CliError::Usage(format!("bad delta grid {self:?}")));
        }
        Ok(match self.spacing {
            Spacing::Log => log_grid(self.lo, self.hi, self.n),
            Spacing::Lin => lin_grid(self.lo, self.hi, self.n),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsFile {
    pub l: Rows,
    pub h: Rows,
    #[serde(default = "manual_tag")]
    pub tag: GainTag,
}

fn manual_tag() -> GainTag {
    GainTag::Manual
}

impl GainsFile {
    pub fn from_gains(g: &ObserverGains) -> Self {
        GainsFile {
            l: to_rows(&g.l),
            h: to_rows(&g.h),
            tag: g.tag,
        }
    }

    pub fn to_gains(&self) -> Result<ObserverGains, CliError> {
        Ok(ObserverGains::new(matrix("L", &self.l)?, matrix("H", &self.h)?, self.tag)?)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub initial: InitialBlock,
    #[serde(default)]
    pub w: SignalSel,
    #[serde(default)]
    pub eta: SignalSel,
    #[serde(default)]
    pub jitter: JitterSel,
    #[serde(default)]
    pub seed: u64,
    pub t_max: f64,
    #[serde(default)]
    pub j_max: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    pub z: Vec<f64>,
    pub eps: Vec<f64>,
    pub theta_tilde: Vec<f64>,
    /// Defaults to `T2`.
    #[serde(default)]
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SignalSel {
    #[default]
    Zero,
    Constant {
        value: Vec<f64>,
    },
    /// Scalar signal; segment `(end, v)` holds `v` up to `end`.
    Piecewise {
        segments: Vec<[f64; 2]>,
        #[serde(default)]
        tail: f64,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum JitterSel {
    #[default]
    Deterministic,
    Uniform,
    Constant {
        value: f64,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub dir: Option<String>,
}

pub fn to_rows(m: &Mat) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn matrix(name: &str, rows: &Rows) -> Result<Mat, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Config(format!("matrix {name} has ragged rows")));
    }
    Ok(Mat::from_fn(r, c, |i, j| rows[i][j]))
}

impl ScenarioConfig {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn plant(&self) -> Result<PlantModel, CliError> {
        let p = &self.plant;
        let (a, n, c, cp) = (matrix("A", &p.a)?, matrix("N", &p.n)?, matrix("C", &p.c)?, matrix("Cp", &p.cp)?);
        let plant = match (&p.b, &p.s, &p.nonlinearity) {
            (None, None, NonlinearitySel::Zero) => PlantModel::linear(a, n, c, cp),
            (Some(b), Some(s), sel) => PlantModel {
                a,
                b: matrix("B", b)?,
                s: matrix("S", s)?,
                n,
                c,
                cp,
                lipschitz: p.lipschitz,
                psi: match *sel {
                    NonlinearitySel::Zero => Nonlinearity::Zero,
                    NonlinearitySel::Sin { amplitude } => Nonlinearity::Sin { amplitude },
                },
            },
            _ => return Err(CliError::Config("nonlinear plants need both b and s".into())),
        };
        let report = validate_plant(&plant);
        if !report.is_ok() {
            return Err(CliError::Config(format!("plant: {report}")));
        }
        for w in &report.warnings {
            eprintln!("warning: plant {}: {}", w.field, w.message);
        }
        Ok(plant)
    }

    pub fn sampling(&self) -> Result<SamplingSpec, CliError> {
        Ok(SamplingSpec::new(self.sampling.t1, self.sampling.t2)?)
    }

    pub fn method(&self, flag: Option<&str>) -> Result<DesignMethod, CliError> {
        let name = flag.or(self.design.method.as_deref()).unwrap_or("PropPred");
        Ok(name.parse()?)
    }

    pub fn delta_grid(&self, flag: Option<&GridSpec>) -> Result<Vec<f64>, CliError> {
        match flag.or(self.design.delta_grid.as_ref()) {
            Some(g) => g.points(),
            None => Ok(default_delta_grid()),
        }
    }

    pub fn t2_grid(&self) -> Result<Vec<f64>, CliError> {
        let [lo, hi] = self
            .sampling
            .t2_range
            .ok_or_else(|| CliError::Config("pareto needs sampling.t2_range".into()))?;
        if !(lo > 0.0 && hi >= lo) || self.sampling.t2_points == 0 {
            return Err(CliError::Config(format!("bad T2 range [{lo}, {hi}]")));
        }
        Ok(lin_grid(lo, hi, self.sampling.t2_points))
    }
}

pub fn signal(sel: &SignalSel, dim: usize, what: &str) -> Result<Box<dyn Fn(f64) -> Vector + Send + Sync>, CliError> {
    match sel {
        SignalSel::Zero => Ok(Box::new(move |_| Vector::zeros(dim))),
        SignalSel::Constant { value } => {
            if value.len() != dim {
                return Err(CliError::Config(format!("{what} constant needs {dim} entries")));
            }
            let v = Vector::from_column_slice(value);
            Ok(Box::new(move |_| v.clone()))
        }
        SignalSel::Piecewise { segments, tail } => {
            if dim != 1 {
                return Err(CliError::Config(format!("{what} piecewise signals are scalar")));
            }
            let segs: Vec<(f64, f64)> = segments.iter().map(|s| (s[0], s[1])).collect();
            Ok(Box::new(piecewise(&segs, *tail)))
        }
    }
}

pub fn signals(sim: &SimulateBlock, plant: &PlantModel) -> Result<SignalSpec, CliError> {
    let w = signal(&sim.w, plant.nw(), "w")?;
    let eta = signal(&sim.eta, plant.ny(), "eta")?;
    Ok(SignalSpec::zero(plant.nw(), plant.ny())
        .with_w(w)
        .with_eta(move |t, _| eta(t)))
}

pub fn jitter_kind(sel: &JitterSel, seed: u64) -> JitterKind {
    match sel {
        JitterSel::Deterministic => JitterKind::Deterministic,
        JitterSel::Uniform => JitterKind::UniformRandom(seed),
        JitterSel::Constant { value } => JitterKind::Constant(*value),
    }
}
