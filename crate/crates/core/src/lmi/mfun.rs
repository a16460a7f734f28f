//! Numeric evaluation of the flow-dissipation matrix `M(τ)`.
//!
//! Kept independent of the affine builders so the two can cross-check.

use crate::error::{Error, Result};
use crate::linalg::{eye, he, sym_block, Mat};
use crate::lmi::problem::Certificate;
use crate::model::{check_gain_dims, ObserverGains, PlantModel};

/// `M(τ)` in block order `(ε, θ̃, w, ζ)`. Linear plants omit the `ζ` block
/// and ignore `χ`.
pub fn eval_m(plant: &PlantModel, gains: &ObserverGains, cert: &Certificate, tau: f64) -> Result<Mat> {
    eval_m_with(plant, gains, cert, cert.lambda_t, tau, true)
}

/// `M(τ)` with an explicit decay rate; `with_w = false` drops the `w` block.
pub fn eval_m_with(
    plant: &PlantModel,
    gains: &ObserverGains,
    cert: &Certificate,
    lambda_t: f64,
    tau: f64,
    with_w: bool,
) -> Result<Mat> {
    if !(0.0..=cert.t2).contains(&tau) {
        return Err(Error::TauOutOfRange { tau, t2: cert.t2 });
    }
    check_gain_dims(plant, &gains.l, &gains.h)?;
    let (a, b, c, n, s, cp) = (&plant.a, &plant.b, &plant.c, &plant.n, &plant.s, &plant.cp);
    let (l, h) = (&gains.l, &gains.h);
    let (p1, p2) = (&cert.p1, &cert.p2);
    let (nz, ny) = (plant.nz(), plant.ny());
    if p1.shape() != (nz, nz) || p2.shape() != (ny, ny) {
        return Err(Error::Dimension {
            what: "certificate".into(),
            expected: format!("P1 {nz}x{nz}, P2 {ny}x{ny}"),
            got: format!("P1 {:?}, P2 {:?}", p1.shape(), p2.shape()),
        });
    }
    let linear = plant.is_linear();
    let e = (cert.delta * tau).exp();
    let ell2 = plant.lipschitz * plant.lipschitz;
    let chi = if linear { 0.0 } else { cert.chi };

    let acl = a - l * c;
    let f21 = c * a - c * l * c - h * c;
    let f22 = c * l + h;

    let m11 = he(&(p1 * &acl)) + p1 * (2.0 * lambda_t) + cp.transpose() * cp + s.transpose() * s * (chi * ell2);
    let m12 = p1 * l + f21.transpose() * p2 * e;
    let m22 = (he(&(p2 * &f22)) + p2 * (2.0 * lambda_t - cert.delta)) * e;

    let mut sizes = vec![nz, ny];
    let mut rows: Vec<Vec<Option<Mat>>> = vec![vec![Some(m11), Some(m12)], vec![Some(m22)]];
    if with_w {
        sizes.push(plant.nw());
        rows[0].push(Some(p1 * n));
        rows[1].push(Some(p2 * c * n * e));
        rows.push(vec![Some(eye(plant.nw()) * -(cert.gamma * cert.gamma))]);
    }
    if !linear {
        sizes.push(plant.ns());
        let k = rows.len();
        rows[0].push(Some(p1 * b));
        rows[1].push(Some(p2 * c * b * e));
        if with_w {
            rows[2].push(Some(Mat::zeros(plant.nw(), plant.ns())));
        }
        rows.push(vec![Some(eye(plant.ns()) * -chi)]);
        debug_assert_eq!(rows.len(), k + 1);
    }
    Ok(sym_block(&rows, &sizes))
}

/// Weights `(λ1, λ2)` with `M(τ) = λ1 M(0) + λ2 M(T2)`.
pub fn convex_decomposition(delta: f64, t2: f64, tau: f64) -> (f64, f64) {
    let ed = (delta * t2).exp();
    let et = (delta * tau).exp();
    let l1 = (et - ed) / (1.0 - ed);
    let l2 = (1.0 - et) / (1.0 - ed);
    (l1, l2)
}
