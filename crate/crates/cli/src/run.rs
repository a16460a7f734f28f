use std::path::{Path, PathBuf};

use serde::Serialize;
use sporadic_observer::design::{design_min_gamma, pareto_sweep, two_stage_refine, DesignRequest, DesignResult, Mode};
use sporadic_observer::lmi::{build_design_problem_with, build_verification_problem, DesignOptions};
use sporadic_observer::sdp::export_sdpa;
use sporadic_observer::sim::{simulate, Horizon, HybridState, JitterSequence};
use sporadic_observer::verify::VerificationReport;
use sporadic_observer::{Certificate, Error, ObserverGains, PlantModel, Vector};

use crate::config::{self, to_rows, GainsFile, GridSpec, Rows, ScenarioConfig};
use crate::svg::{line_plot, Series};
use crate::{Cli, CliError, Command};

struct Ctx<'a> {
    cli: &'a Cli,
    cfg: ScenarioConfig,
    plant: PlantModel,
    out: PathBuf,
    grid: Vec<f64>,
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let cfg = ScenarioConfig::read(path)?;
    let flag_grid = cli.delta_grid.as_deref().map(GridSpec::parse).transpose()?;
    let grid = cfg.delta_grid(flag_grid.as_ref())?;
    let plant = cfg.plant()?;
    cfg.sampling()?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(out.display().to_string(), e))?;
    let ctx = Ctx {
        cli,
        cfg,
        plant,
        out,
        grid,
    };
    match cli.command {
        Command::Design => design(&ctx),
        Command::Verify => verify(&ctx),
        Command::Simulate => sim(&ctx),
        Command::Pareto => pareto(&ctx),
        Command::ExportSdpa => export(&ctx),
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    write(path, &(text + "\n"))
}

#[derive(Serialize)]
struct CertificateJson {
    p1: Rows,
    p2: Rows,
    delta: f64,
    chi: f64,
    lambda_t: f64,
    gamma: f64,
    t2: f64,
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        CertificateJson {
            p1: to_rows(&c.p1),
            p2: to_rows(&c.p2),
            delta: c.delta,
            chi: c.chi,
            lambda_t: c.lambda_t,
            gamma: c.gamma,
            t2: c.t2,
        }
    }
}

#[derive(Serialize)]
struct ResultJson<'a> {
    mode: String,
    gamma: f64,
    delta: f64,
    t1: f64,
    t2: f64,
    lambda_t: f64,
    gains: GainsFile,
    certificate: CertificateJson,
    report: &'a VerificationReport,
}

impl Ctx<'_> {
    fn request(&self, mode: Mode) -> Result<DesignRequest, CliError> {
        let d = &self.cfg.design;
        let mut req = DesignRequest::new(self.plant.clone(), mode, d.lambda_t, self.cfg.sampling()?).with_delta_grid(self.grid.clone());
        req.fixed_gamma = d.gamma;
        req.gain_cap = d.gain_cap;
        Ok(req)
    }

    fn given_gains(&self) -> Result<Option<ObserverGains>, CliError> {
        if let Some(p) = &self.cli.gains {
            return GainsFile::read(p)?.to_gains().map(Some);
        }
        self.cfg.design.gains.as_ref().map(GainsFile::to_gains).transpose()
    }

    fn result_json<'a>(&self, mode: &Mode, r: &'a DesignResult) -> ResultJson<'a> {
        ResultJson {
            mode: mode.label(),
            gamma: r.gamma(),
            delta: r.delta_selected,
            t1: self.cfg.sampling.t1,
            t2: r.certificate.t2,
            lambda_t: r.certificate.lambda_t,
            gains: GainsFile::from_gains(&r.gains),
            certificate: (&r.certificate).into(),
            report: &r.report,
        }
    }

    fn refine(&self, gains: &ObserverGains) -> Result<DesignResult, CliError> {
        let req = self.request(Mode::Verify(gains.clone()))?;
        Ok(two_stage_refine(
            &self.plant,
            gains,
            &self.grid,
            &[self.cfg.sampling.t2],
            req.lambda_t,
            &req.solver,
        )?)
    }
}

fn design(ctx: &Ctx) -> Result<String, CliError> {
    let method = ctx.cfg.method(ctx.cli.method.as_deref())?;
    let mode = Mode::Design(method);
    let r = design_min_gamma(&ctx.request(mode.clone())?)?;
    write_json(&ctx.out.join("design.json"), &ctx.result_json(&mode, &r))?;
    write_json(&ctx.out.join("gains.json"), &GainsFile::from_gains(&r.gains))?;
    Ok(format!(
        "{method}: gamma {} at delta {} (T2 = {})",
        r.gamma(),
        r.delta_selected,
        r.certificate.t2
    ))
}

#[derive(Serialize)]
struct InfeasibleJson {
    pass: bool,
    reason: String,
}

fn verify(ctx: &Ctx) -> Result<String, CliError> {
    let gains = ctx
        .given_gains()?
        .ok_or_else(|| CliError::Usage("verify needs --gains or design.gains".into()))?;
    let path = ctx.out.join("verify.json");
    match ctx.refine(&gains) {
        Ok(r) => {
            let mode = Mode::Verify(gains);
            write_json(&path, &ctx.result_json(&mode, &r))?;
            if r.report.pass {
                Ok(format!("certificate found: gamma {} at delta {}", r.gamma(), r.delta_selected))
            } else {
                Err(CliError::Failed("certificate failed the eigenvalue check".into()))
            }
        }
        Err(CliError::Core(e @ Error::AllInfeasible { .. })) => {
            write_json(
                &path,
                &InfeasibleJson {
                    pass: false,
                    reason: e.to_string(),
                },
            )?;
            Err(CliError::Core(e))
        }
        Err(e) => Err(e),
    }
}

fn sim(ctx: &Ctx) -> Result<String, CliError> {
    let sc = ctx
        .cfg
        .simulate
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a simulate block".into()))?;
    let (gains, cert) = match ctx.given_gains()? {
        Some(g) => {
            let cert = ctx.refine(&g).ok().map(|r| r.certificate);
            (g, cert)
        }
        None => {
            let method = ctx.cfg.method(ctx.cli.method.as_deref())?;
            let r = design_min_gamma(&ctx.request(Mode::Design(method))?)?;
            (r.gains, Some(r.certificate))
        }
    };
    let spec = ctx.cfg.sampling()?;
    let init = HybridState::new(
        Vector::from_column_slice(&sc.initial.z),
        Vector::from_column_slice(&sc.initial.eps),
        Vector::from_column_slice(&sc.initial.theta_tilde),
        sc.initial.tau.unwrap_or(spec.t2),
    );
    let signals = config::signals(sc, &ctx.plant)?;
    let seed = ctx.cli.seed.unwrap_or(sc.seed);
    let jitter = JitterSequence::new(config::jitter_kind(&sc.jitter, seed), spec.t1, spec.t2)?;
    let mut horizon = Horizon::time(sc.t_max);
    if let Some(j) = sc.j_max {
        horizon.j_max = j;
    }
    let arc = simulate(&ctx.plant, &gains, &init, &signals, &jitter, horizon)?;
    write(&ctx.out.join("arc.csv"), &arc.to_csv(cert.as_ref()))?;
    if ctx.cli.plot {
        let dist = arc
            .samples
            .iter()
            .map(|s| (s.t, sporadic_observer::sim::distance_to_a(&s.state)))
            .collect();
        let mut series = vec![Series {
            label: "|x|_A".into(),
            points: dist,
        }];
        if let Some(c) = &cert {
            series.push(Series {
                label: "V".into(),
                points: arc
                    .samples
                    .iter()
                    .map(|s| (s.t, sporadic_observer::sim::eval_v(c, &s.state)))
                    .collect(),
            });
        }
        write(&ctx.out.join("arc.svg"), &line_plot("error trajectory", "t", "", &series))?;
    }
    Ok(format!(
        "{} samples, {} jumps, t_end {}",
        arc.samples.len(),
        arc.jumps.len(),
        arc.domain.end().0
    ))
}

fn pareto(ctx: &Ctx) -> Result<String, CliError> {
    let method = ctx.cfg.method(ctx.cli.method.as_deref())?;
    let t2_grid = ctx.cfg.t2_grid()?;
    let curve = pareto_sweep(&ctx.request(Mode::Design(method))?, &t2_grid)?;
    write(&ctx.out.join("pareto.csv"), &curve.to_csv())?;
    if ctx.cli.plot {
        let series = [Series {
            label: curve.label.clone(),
            points: curve.points.iter().map(|p| (p.t2, p.gamma)).collect(),
        }];
        write(&ctx.out.join("pareto.svg"), &line_plot("tradeoff", "T2", "gamma", &series))?;
    }
    if curve.points.is_empty() {
        return Err(CliError::Failed(format!("{method}: no feasible point on the T2 grid")));
    }
    Ok(format!(
        "{method}: {} feasible of {} T2 points",
        curve.points.len(),
        t2_grid.len()
    ))
}

fn export(ctx: &Ctx) -> Result<String, CliError> {
    let d = &ctx.cfg.design;
    let delta = d.delta.unwrap_or(ctx.grid[0]);
    let t2 = ctx.cfg.sampling.t2;
    let problem = match (ctx.cli.method.as_ref(), ctx.given_gains()?) {
        (None, Some(g)) => build_verification_problem(&ctx.plant, &g, d.lambda_t, delta, t2, d.gamma)?,
        _ => {
            let method = ctx.cfg.method(ctx.cli.method.as_deref())?;
            let opts = DesignOptions {
                gain_cap: d.gain_cap,
                ..DesignOptions::default()
            };
            build_design_problem_with(&ctx.plant, method, d.lambda_t, delta, t2, d.gamma, &opts)?
        }
    };
    let path = ctx.out.join("problem.dat-s");
    write(&path, &export_sdpa(&problem)?)?;
    Ok(format!(
        "{} variables, {} blocks written to {}",
        problem.num_vars(),
        problem.nsd_blocks().len(),
        path.display()
    ))
}
