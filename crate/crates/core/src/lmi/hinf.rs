//! Necessary lower bound on the certified gain.

use crate::linalg::{eye, max_abs, Mat};
use crate::model::PlantModel;
use nalgebra::{Complex, DMatrix};

/// H∞ norm of `Cp (sI − (A − LC + λt I))⁻¹ N` by bisection on the
/// Hamiltonian imaginary-axis test, to relative accuracy `1e−6`.
///
/// Returns the lower end of the final bracket, `+∞` when the shifted
/// matrix is not Hurwitz, and `0` when `N` or `Cp` vanishes.
pub fn hinf_necessary(plant: &PlantModel, l: &Mat, lambda_t: f64) -> f64 {
    let nz = plant.nz();
    let a_s = &plant.a - l * &plant.c + eye(nz) * lambda_t;
    if spectral_abscissa(&a_s) >= 0.0 {
        return f64::INFINITY;
    }
    if max_abs(&plant.n) == 0.0 || max_abs(&plant.cp) == 0.0 {
        return 0.0;
    }
    let bb = &plant.n * plant.n.transpose();
    let cc = plant.cp.transpose() * &plant.cp;
    let crosses = |gamma: f64| -> bool {
        let mut h = Mat::zeros(2 * nz, 2 * nz);
        h.view_mut((0, 0), (nz, nz)).copy_from(&a_s);
        h.view_mut((0, nz), (nz, nz)).copy_from(&(&bb / (gamma * gamma)));
        h.view_mut((nz, 0), (nz, nz)).copy_from(&(-&cc));
        h.view_mut((nz, nz), (nz, nz)).copy_from(&(-a_s.transpose()));
        let tol = 1e-6 * (1.0 + max_abs(&h));
        h.complex_eigenvalues()
            .iter()
            .filter(|ev| ev.re.abs() <= tol)
            .any(|ev| gain_at(plant, &a_s, ev.im.abs()) >= gamma * (1.0 - 1e-9))
    };
    // the DC gain is a valid lower bound
    let dc = dc_gain(plant, &a_s);
    let mut lo = dc;
    let mut hi = (2.0 * dc).max(1e-12);
    while crosses(hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if crosses(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn spectral_abscissa(m: &Mat) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn gain_at(plant: &PlantModel, a_s: &Mat, w: f64) -> f64 {
    let nz = a_s.nrows();
    let m = DMatrix::<Complex<f64>>::from_fn(nz, nz, |i, j| {
        let d = if i == j { Complex::new(0.0, w) } else { Complex::new(0.0, 0.0) };
        d - Complex::new(a_s[(i, j)], 0.0)
    });
    match m.lu().solve(&plant.n.map(|v| Complex::new(v, 0.0))) {
        Some(x) => (plant.cp.map(|v| Complex::new(v, 0.0)) * x)
            .svd(false, false)
            .singular_values
            .max(),
        None => f64::INFINITY,
    }
}

fn dc_gain(plant: &PlantModel, a_s: &Mat) -> f64 {
    match a_s.clone().try_inverse() {
        Some(inv) => {
            let g = -(&plant.cp * inv * &plant.n);
            g.svd(false, false).singular_values.max()
        }
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;

    /// Dense frequency sweep with complex SVD, refined around the peak.
    fn sweep(plant: &PlantModel, l: &Mat, lambda_t: f64) -> f64 {
        let nz = plant.nz();
        let a_s = &plant.a - l * &plant.c + eye(nz) * lambda_t;
        let gain = |w: f64| -> f64 {
            let m = DMatrix::<Complex<f64>>::from_fn(nz, nz, |i, j| {
                let d = if i == j { Complex::new(0.0, w) } else { Complex::new(0.0, 0.0) };
                d - Complex::new(a_s[(i, j)], 0.0)
            });
            let inv = m.try_inverse().unwrap();
            let cp = plant.cp.map(|v| Complex::new(v, 0.0));
            let n = plant.n.map(|v| Complex::new(v, 0.0));
            (cp * inv * n).svd(false, false).singular_values.max()
        };
        let mut best = (0.0, 0.0);
        for k in 0..=200_000 {
            let w = 1e-3 * (1e7_f64).powf(k as f64 / 200_000.0) - 1e-3;
            let g = gain(w);
            if g > best.1 {
                best = (w, g);
            }
        }
        let (mut a, mut b) = ((best.0 * 0.99 - 1e-6).max(0.0), best.0 * 1.01 + 1e-6);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if gain(m1) < gain(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        best.1.max(gain(0.5 * (a + b)))
    }

    #[test]
    fn matches_frequency_sweep_on_oscillator() {
        let plant = benchmarks::oscillator();
        for g in [benchmarks::oscillator_tuned_gains(), benchmarks::oscillator_legacy_gains()] {
            let h = hinf_necessary(&plant, &g.l, 0.05);
            let s = sweep(&plant, &g.l, 0.05);
            assert!((h - s).abs() <= 1e-4 * s, "bisection {h} sweep {s}");
        }
    }

    #[test]
    fn zero_disturbance_gives_zero() {
        let mut plant = benchmarks::oscillator();
        plant.n = Mat::zeros(2, 1);
        assert_eq!(hinf_necessary(&plant, &benchmarks::oscillator_tuned_gains().l, 0.05), 0.0);
    }

    #[test]
    fn unstable_shift_gives_infinity() {
        let plant = benchmarks::oscillator();
        assert_eq!(hinf_necessary(&plant, &Mat::zeros(2, 1), 0.05), f64::INFINITY);
    }
}
