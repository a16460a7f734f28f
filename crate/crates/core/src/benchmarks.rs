//! Reference plants used throughout the tests, examples, and bundled scenarios.

use crate::linalg::{from_rows, Mat, Vector};
use crate::model::{Nonlinearity, ObserverGains, PlantModel, SamplingSpec};
use crate::sim::SignalSpec;

/// Undamped oscillator `ż1 = z2`, `ż2 = −4 z1`, position measured.
pub fn oscillator() -> PlantModel {
    PlantModel::linear(
        from_rows(&[&[0.0, 1.0], &[-4.0, 0.0]]),
        from_rows(&[&[1.0], &[0.0]]),
        from_rows(&[&[1.0, 0.0]]),
        Mat::identity(2, 2),
    )
}

pub const OSCILLATOR_LAMBDA_T: f64 = 0.05;

pub fn oscillator_sampling() -> SamplingSpec {
    SamplingSpec { t1: 0.205, t2: 0.41 }
}

/// Predictor gains known to work for small decay rates.
pub fn oscillator_legacy_gains() -> ObserverGains {
    ObserverGains::manual(from_rows(&[&[0.3648], &[-0.4655]]), from_rows(&[&[-0.3648]])).unwrap()
}

/// Gains obtained by the cancelling design at `T2 = 0.41` under a gain cap.
pub fn oscillator_tuned_gains() -> ObserverGains {
    ObserverGains::manual(from_rows(&[&[2.067], &[-3.0]]), from_rows(&[&[-1.384]])).unwrap()
}

/// Initial hybrid state `(z, ε, θ̃, τ)` without the timer.
pub fn oscillator_initial() -> (Vector, Vector, Vector) {
    (
        Vector::from_vec(vec![1.0, 1.0]),
        Vector::from_vec(vec![3.0, 3.0]),
        Vector::from_vec(vec![-2.0]),
    )
}

/// `−1` on `[0, 5]`, `1` on `(5, 10]`, `−1` on `(10, 15]`, then zero.
pub fn oscillator_disturbance() -> SignalSpec {
    SignalSpec::piecewise_scalar(&[(5.0, -1.0), (10.0, 1.0), (15.0, -1.0)], 0.0)
}

/// Linearised path-following unicycle; `z1` and `z3` are measured and the
/// heading `z2` is the performance output.
pub fn unicycle() -> PlantModel {
    PlantModel::linear(
        from_rows(&[&[0.0, 1.0, 0.0], &[0.0, -0.01, 0.0], &[1.0, 0.0, 0.0]]),
        from_rows(&[&[0.0], &[1.0], &[0.0]]),
        from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
        from_rows(&[&[0.0, 1.0, 0.0]]),
    )
}

pub const UNICYCLE_LAMBDA_T: f64 = 0.2;

pub fn unicycle_sampling() -> SamplingSpec {
    SamplingSpec { t1: 0.1714, t2: 0.3 }
}

/// Published zero-order-hold gain at `T2 = 0.3`.
pub fn unicycle_reference_gain() -> Mat {
    from_rows(&[&[3.7, -2.194], &[2.908, -2.075], &[1.637, 0.1545]])
}

/// `1` on `[0, 2]`, `0` on `(2, 6]`, `−1` on `(6, 8]`, then zero.
pub fn unicycle_disturbance() -> SignalSpec {
    SignalSpec::piecewise_scalar(&[(2.0, 1.0), (6.0, 0.0), (8.0, -1.0)], 0.0)
}

/// Flexible one-link manipulator with the `−3.33 sin(z3)` coupling written
/// as `B ψ(S z)`, `B = −e4`, `ψ = 3.33 sin`, `S = e3ᵀ`.
pub fn flexible_link() -> PlantModel {
    PlantModel {
        a: from_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[-48.6, -1.25, 48.6, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[19.5, 0.0, -19.5, 0.0],
        ]),
        b: from_rows(&[&[0.0], &[0.0], &[0.0], &[-1.0]]),
        s: from_rows(&[&[0.0, 0.0, 1.0, 0.0]]),
        n: from_rows(&[&[0.0], &[2.0], &[0.0], &[0.0]]),
        c: from_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]),
        cp: from_rows(&[&[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]),
        lipschitz: 3.3,
        psi: Nonlinearity::Sin { amplitude: 3.33 },
    }
}

pub const FLEXIBLE_LINK_LAMBDA_T: f64 = 0.01;

/// Predictor gain from the emulation literature; pair it with `H = −CL`.
pub fn flexible_link_predictor_gain() -> Mat {
    from_rows(&[
        &[9.328, 1.0],
        &[-48.78, 22.11],
        &[-0.0524, 3.199],
        &[19.41, -0.9032],
    ])
}

/// `sin(2t)` on `[0, 20]`, then zero.
pub fn flexible_link_disturbance() -> SignalSpec {
    SignalSpec::from_fn(1, 1, |t| {
        Vector::from_element(1, if t <= 20.0 { (2.0 * t).sin() } else { 0.0 })
    })
}

/// Linearly spaced grid including both ends.
pub fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Logarithmically spaced grid including both ends.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    lin_grid(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}
