mod common;

use proptest::prelude::*;
use sporadic_observer::benchmarks::{oscillator, oscillator_sampling, oscillator_tuned_gains};
use sporadic_observer::linalg::{max_abs, max_eig};
use sporadic_observer::lmi::{
    build_design_problem, build_verification_problem, convex_decomposition, count_scalar_variables, eval_m, hinf_necessary,
    AffineExpr, ProblemBuilder, ProblemMeta, Strictness,
};
use sporadic_observer::model::{assemble_error_matrices, factorize_f};
use sporadic_observer::sdp::{block_scales, export_sdpa, import_sdpa, residual, solve, SolverOptions, FEASIBILITY_TOL};
use sporadic_observer::sim::{
    eval_v, simulate, simulate_with_step, v2, Horizon, HybridState, HybridTimeDomain, JitterKind, JitterSequence, SignalSpec,
};
use sporadic_observer::verify::{certificate_from, check_iss_bound, domain_bounds_check, iss_constants};
use sporadic_observer::{Certificate, DesignMethod, Mat, ObserverGains, PlantModel, Vector};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=4).prop_flat_map(|nz| (Just(nz), 1..=nz.min(3)))
}

fn scaled(cert: &Certificate, c: f64) -> Certificate {
    Certificate {
        p1: &cert.p1 * c,
        p2: &cert.p2 * c,
        ..cert.clone()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_factorization_reconstructs(seed in any::<u64>(), (nz, ny) in dims()) {
        let mut rng = common::rng(seed);
        let plant = common::random_plant(&mut rng, nz, ny);
        let gains = common::random_gains(&mut rng, &plant);
        let em = assemble_error_matrices(&plant, &gains).unwrap();
        let (fl, fr) = factorize_f(&plant, &gains).unwrap();
        prop_assert!(max_abs(&(&fl * &fr - &em.f)) <= 1e-12 * (1.0 + max_abs(&em.f)));
        prop_assert_eq!(&em.g_jump * &em.g_jump, em.g_jump.clone());
    }

    #[test]
    fn mismatch_vanishes_and_is_bounded(seed in any::<u64>(), nz in 1usize..=4) {
        let mut rng = common::rng(seed);
        let plant = common::random_plant(&mut rng, nz, 1);
        for _ in 0..20 {
            let v1 = common::random_mat(&mut rng, nz, 1, 5.0).column(0).into_owned();
            let v2 = common::random_mat(&mut rng, nz, 1, 5.0).column(0).into_owned();
            prop_assert_eq!(plant.zeta(&v1, &Vector::zeros(nz)).norm(), 0.0);
            let bound = plant.lipschitz * (&plant.s * &v2).norm();
            prop_assert!(plant.zeta(&v1, &v2).norm() <= bound * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn decomposition_weights_are_convex(delta in 1e-3..50.0f64, t2 in 1e-3..1.0f64, u in 0.0..=1.0f64) {
        let (l1, l2) = convex_decomposition(delta, t2, u * t2);
        prop_assert!(l1 >= -1e-12 && l2 >= -1e-12);
        prop_assert!((l1 + l2 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn endpoint_negativity_covers_the_window(seed in any::<u64>(), (nz, ny) in dims()) {
        let mut rng = common::rng(seed);
        let plant = common::random_plant(&mut rng, nz, ny);
        let gains = common::random_gains(&mut rng, &plant);
        let cert = common::random_certificate(&mut rng, &plant);
        let m0 = eval_m(&plant, &gains, &cert, 0.0).unwrap();
        let mt = eval_m(&plant, &gains, &cert, cert.t2).unwrap();
        // Shift both endpoints to be negative semidefinite; the shift is
        // τ-independent, so the shifted family stays affine in e^{δτ}.
        let shift = max_eig(&m0).max(max_eig(&mt));
        let n = m0.nrows();
        for k in 0..100 {
            let tau = (cert.t2 * k as f64 / 99.0).min(cert.t2);
            let m = eval_m(&plant, &gains, &cert, tau).unwrap() - Mat::identity(n, n) * shift;
            prop_assert!(max_eig(&m) <= 1e-8 * (1.0 + max_abs(&m0)));
        }
    }

    #[test]
    fn census_matches_emitted_variables(seed in any::<u64>(), nz in 1usize..=6, ny_raw in 1usize..=3, m in 0usize..4) {
        let ny = ny_raw.min(nz);
        let method = DesignMethod::ALL[m];
        let mut rng = common::rng(seed);
        let plant = PlantModel::linear(
            common::random_mat(&mut rng, nz, nz, 1.0),
            common::random_mat(&mut rng, nz, 1, 1.0),
            common::random_mat(&mut rng, ny, nz, 1.0),
            Mat::identity(nz, nz),
        );
        let p = build_design_problem(&plant, method, 0.05, 3.0, 0.2, None).unwrap();
        prop_assert_eq!(p.num_vars(), count_scalar_variables(method, nz, ny).unwrap());
    }

    #[test]
    fn sdpa_round_trip_is_exact(seed in any::<u64>(), (nz, ny) in dims(), m in 0usize..4) {
        let mut rng = common::rng(seed);
        let plant = common::random_plant(&mut rng, nz, ny);
        let p = build_design_problem(&plant, DesignMethod::ALL[m], 0.01, 5.0, 0.1, None).unwrap();
        let text = export_sdpa(&p).unwrap();
        let q = import_sdpa(&text).unwrap();
        prop_assert_eq!(q.nsd_blocks(), p.nsd_blocks());
        prop_assert_eq!(export_sdpa(&q).unwrap(), text);
    }

    #[test]
    fn legal_domains_meet_the_count_and_sum_bounds(
        t1 in 0.01..1.0f64,
        ratio in 1.0..3.0f64,
        lambda_t in 1e-3..2.0f64,
        gaps in prop::collection::vec(0.0..=1.0f64, 0..200),
        first in 0.0..=1.0f64,
        tail in 0.0..=1.0f64,
    ) {
        let t2 = t1 * ratio;
        let mut jumps = Vec::with_capacity(gaps.len() + 1);
        let mut t = first * t2;
        jumps.push(t);
        for g in gaps {
            t += t1 + g * (t2 - t1);
            jumps.push(t);
        }
        let domain = HybridTimeDomain::from_jumps(&jumps, t + tail * t2);
        prop_assert!(domain.is_legal(t1, t2));
        let lambda = lambda_t * t1 / (1.0 + t1);
        let check = domain_bounds_check(&domain, lambda_t, t1, lambda, lambda);
        prop_assert!(check.pass, "{:?}", check);
    }

    #[test]
    fn solver_agrees_with_eigenvalue_oracle(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = common::rng(seed);
        let m = common::random_sym(&mut rng, n, 10.0);
        let mut b = ProblemBuilder::new();
        let t = b.scalar("t");
        let lhs = &t.scalar_times(&-Mat::identity(n, n)) + &AffineExpr::constant(m.clone());
        b.nsd("tI - M", &lhs, Strictness::NonStrict);
        b.minimize(&t);
        let p = b.finish(ProblemMeta::custom());
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        prop_assert!(sol.is_feasible());
        let oracle = max_eig(&m);
        prop_assert!((sol.objective_value.unwrap() - oracle).abs() <= 1e-5 * oracle.abs().max(1.0));
        for w in sol.phase1_history.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        let res = residual(&p, &sol.point);
        for (r, s) in res.iter().zip(block_scales(&p)) {
            prop_assert!(*r <= FEASIBILITY_TOL * s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulated_domains_are_legal_and_jumps_exact(
        t1 in 0.05..0.3f64,
        ratio in 1.0..2.5f64,
        u in 0.0..=1.0f64,
        kind_seed in any::<u64>(),
        pick in 0usize..3,
    ) {
        let t2 = t1 * ratio;
        let kind = match pick {
            0 => JitterKind::Deterministic,
            1 => JitterKind::UniformRandom(kind_seed),
            _ => JitterKind::Constant(t1 + u * (t2 - t1)),
        };
        let plant = oscillator();
        let jitter = JitterSequence::new(kind, t1, t2).unwrap();
        let init = HybridState::new(Vector::from_vec(vec![1.0, 0.0]), Vector::from_vec(vec![1.0, -1.0]), Vector::from_vec(vec![0.5]), u * t2);
        let arc = simulate(&plant, &oscillator_tuned_gains(), &init, &SignalSpec::zero(1, 1), &jitter, Horizon::time(5.0)).unwrap();
        prop_assert!(arc.domain.is_legal(t1, t2));
        prop_assert_eq!(arc.jumps.first().map(|j| j.t), Some(u * t2).filter(|&t| t <= 5.0));
        for w in arc.jumps.windows(2) {
            prop_assert_eq!(w[1].t, w[0].t + w[0].post.tau);
            prop_assert!((w[1].t - w[0].t - w[0].post.tau).abs() <= f64::EPSILON * w[1].t);
        }
    }

    #[test]
    fn noiseless_jumps_do_not_raise_v(seed in any::<u64>(), u in 0.0..=1.0f64) {
        let mut rng = common::rng(seed);
        let plant = oscillator();
        let cert = common::random_certificate(&mut rng, &plant);
        let s = oscillator_sampling();
        let jitter = JitterSequence::new(JitterKind::UniformRandom(seed), s.t1, s.t2).unwrap();
        let init = HybridState::new(Vector::from_vec(vec![0.3, 0.1]), Vector::from_vec(vec![2.0, -1.0]), Vector::from_vec(vec![1.0]), u * s.t2);
        let arc = simulate(&plant, &oscillator_tuned_gains(), &init, &SignalSpec::zero(1, 1), &jitter, Horizon::time(3.0)).unwrap();
        let cert = Certificate { t2: s.t2, ..cert };
        for j in &arc.jumps {
            prop_assert_eq!(v2(&cert, &j.post.theta_tilde, j.post.tau), 0.0);
            prop_assert!(eval_v(&cert, &j.post) <= eval_v(&cert, &j.pre));
        }
    }

    #[test]
    fn iss_constants_are_scale_invariant(seed in any::<u64>(), c in 1e-3..1e3f64) {
        let mut rng = common::rng(seed);
        let plant = oscillator();
        let mut cert = common::random_certificate(&mut rng, &plant);
        cert.lambda_t = cert.lambda_t.max(0.01);
        let s = oscillator_sampling();
        let a = iss_constants(&cert, s.t1).unwrap();
        let b = iss_constants(&scaled(&cert, c), s.t1).unwrap();
        prop_assert!((a.kappa - b.kappa).abs() <= 1e-9 * a.kappa);
        prop_assert_eq!(a.lambda, b.lambda);
        let jitter = JitterSequence::new(JitterKind::UniformRandom(seed), s.t1, s.t2).unwrap();
        let init = HybridState::new(Vector::zeros(2), Vector::from_vec(vec![1.0, 2.0]), Vector::from_vec(vec![-1.0]), s.t2);
        let arc = simulate(&plant, &oscillator_tuned_gains(), &init, &SignalSpec::zero(1, 1), &jitter, Horizon::time(5.0)).unwrap();
        prop_assert_eq!(check_iss_bound(&arc, &a, 0.0).pass, check_iss_bound(&arc, &b, 0.0).pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn feasible_certificates_dominate_the_hinf_bound(l1 in 0.5..4.0f64, l2 in -4.0..0.0f64, h in -3.0..-0.5f64, delta in 1.0..5.0f64) {
        let plant = oscillator();
        let gains = ObserverGains::manual(Mat::from_column_slice(2, 1, &[l1, l2]), Mat::from_element(1, 1, h)).unwrap();
        let p = build_verification_problem(&plant, &gains, 0.01, delta, 0.3, None).unwrap();
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        if sol.is_feasible() {
            let gamma = certificate_from(&p, &sol.point, delta, 0.3, 0.01).unwrap().gamma;
            prop_assert!(gamma >= hinf_necessary(&plant, &gains.l, 0.01) * (1.0 - 1e-6));
        }
    }
}

fn terminal(h: f64) -> Vector {
    let plant = oscillator();
    let s = oscillator_sampling();
    let jitter = JitterSequence::new(JitterKind::Deterministic, s.t1, s.t2).unwrap();
    let init = HybridState::new(Vector::from_vec(vec![1.0, 1.0]), Vector::from_vec(vec![3.0, 3.0]), Vector::from_vec(vec![-2.0]), s.t2);
    let w = SignalSpec::from_fn(1, 1, |t| Vector::from_element(1, (3.0 * t).sin()));
    let arc = simulate_with_step(&plant, &oscillator_tuned_gains(), &init, &w, &jitter, Horizon::time(0.4), h).unwrap();
    assert!(arc.jumps.is_empty());
    let last = arc.last();
    Vector::from_iterator(5, last.z.iter().chain(&last.eps).chain(&last.theta_tilde).copied())
}

#[test]
fn rk4_converges_at_fourth_order() {
    let (a, b, c) = (terminal(0.1), terminal(0.05), terminal(0.025));
    let order = ((&a - &b).norm() / (&b - &c).norm()).log2();
    assert!(order >= 3.5, "observed order {order}");
}
