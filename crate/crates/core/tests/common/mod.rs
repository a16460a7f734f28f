#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sporadic_observer::model::Nonlinearity;
use sporadic_observer::{Certificate, Mat, ObserverGains, PlantModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mat(rng: &mut impl Rng, r: usize, c: usize, scale: f64) -> Mat {
    Mat::from_fn(r, c, |_, _| rng.random_range(-scale..scale))
}

/// `GᵀG + floor·I`.
pub fn random_spd(rng: &mut impl Rng, n: usize, floor: f64) -> Mat {
    let g = random_mat(rng, n, n, 1.0);
    g.transpose() * &g + Mat::identity(n, n) * floor
}

pub fn random_sym(rng: &mut impl Rng, n: usize, scale: f64) -> Mat {
    let g = random_mat(rng, n, n, scale);
    (&g + g.transpose()) * 0.5
}

/// Random plant; half of the draws carry a scalar sine nonlinearity.
pub fn random_plant(rng: &mut impl Rng, nz: usize, ny: usize) -> PlantModel {
    let nw = rng.random_range(1..=2);
    let a = random_mat(rng, nz, nz, 2.0);
    let n = random_mat(rng, nz, nw, 1.0);
    let c = random_mat(rng, ny, nz, 1.0);
    let nyp = rng.random_range(1..=nz);
    let cp = random_mat(rng, nyp, nz, 1.0);
    if rng.random_bool(0.5) {
        return PlantModel::linear(a, n, c, cp);
    }
    let amp = rng.random_range(0.1..2.0);
    PlantModel {
        a,
        b: random_mat(rng, nz, 1, 1.0),
        s: random_mat(rng, 1, nz, 1.0),
        n,
        c,
        cp,
        lipschitz: amp,
        psi: Nonlinearity::Sin { amplitude: amp },
    }
}

pub fn random_gains(rng: &mut impl Rng, plant: &PlantModel) -> ObserverGains {
    let l = random_mat(rng, plant.nz(), plant.ny(), 3.0);
    let h = random_mat(rng, plant.ny(), plant.ny(), 3.0);
    ObserverGains::manual(l, h).unwrap()
}

pub fn random_certificate(rng: &mut impl Rng, plant: &PlantModel) -> Certificate {
    Certificate {
        p1: random_spd(rng, plant.nz(), 0.1),
        p2: random_spd(rng, plant.ny(), 0.1),
        delta: rng.random_range(0.1..10.0),
        chi: rng.random_range(0.1..5.0),
        lambda_t: rng.random_range(0.0..1.0),
        gamma: rng.random_range(0.1..50.0),
        t2: rng.random_range(0.01..0.5),
    }
}
