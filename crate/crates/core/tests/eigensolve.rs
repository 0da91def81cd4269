mod common;

use common::{random_instance, random_nonconstant, rng};
use rand::Rng;
use rba::eigensolve::{dense_spectrum, lanczos_lowest, slice, slice_schedule, SolverConfig, SpectrumSlice};
use rba::hamiltonian::{BoundMode, Operator, ProblemHamiltonian};
use rba::instance::{brute_force, SatInstance};
use rba::linalg::{dot, norm};

fn problem(inst: &SatInstance) -> Option<ProblemHamiltonian> {
    ProblemHamiltonian::new(inst, BoundMode::Ideal).ok()
}

fn check_basis<O: Operator>(op: &O, e: f64, vectors: &[Vec<f64>]) {
    let mut y = vec![0.0; op.dim()];
    for (i, v) in vectors.iter().enumerate() {
        for (j, u) in vectors.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((dot(u, v) - want).abs() < 1e-10);
        }
        op.apply(v, &mut y);
        let r: Vec<f64> = y.iter().zip(v).map(|(a, b)| a - e * b).collect();
        assert!(norm(&r) < 1e-8, "residual {}", norm(&r));
    }
}

#[test]
fn lanczos_matches_dense_on_random_weights() {
    let mut rng = rng(201);
    let mut checked = 0;
    while checked < 25 {
        let inst = random_instance(&mut rng, 3..=8);
        let Some(h) = problem(&inst) else { continue };
        let w: f64 = rng.random_range(0.01..0.99);
        let op = h.at(w).unwrap();
        let cfg = SolverConfig::new(inst.seed());
        let got = lanczos_lowest(&op, 3, &cfg.at(w)).unwrap();
        let want = SpectrumSlice::from_dense(w, &dense_spectrum(&op).unwrap()).unwrap();
        assert!((got.e0 - want.e0).abs() < 1e-8);
        assert!((got.e1 - want.e1).abs() < 1e-8);
        match (got.e2, want.e2) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-8),
            (a, b) => assert_eq!(a.is_some(), b.is_some()),
        }
        assert_eq!(got.deg0(), want.deg0());
        assert_eq!(got.deg1(), want.deg1());
        check_basis(&op, got.e0, &got.ground.dense_vectors());
        check_basis(&op, got.e1, &got.first_excited.dense_vectors());
        checked += 1;
    }
}

#[test]
fn problem_endpoint_degeneracy_is_brute_force_count() {
    let mut rng = rng(202);
    for _ in 0..20 {
        let inst = random_instance(&mut rng, 3..=10);
        let Some(h) = problem(&inst) else { continue };
        let s = slice(&h, 1.0, &SolverConfig::new(0)).unwrap();
        assert_eq!(s.deg0(), brute_force(&inst).unwrap().ground_degeneracy());
        assert_eq!(s.e0, 0.0);
    }
}

#[test]
fn mixer_ground_state_is_uniform() {
    let mut rng = rng(203);
    for n in 2..=8 {
        let inst = random_instance(&mut rng, n..=n);
        let Some(h) = problem(&inst) else { continue };
        let s = slice(&h, 0.0, &SolverConfig::new(0)).unwrap();
        assert_eq!(s.deg0(), 1);
        assert_eq!(s.deg1(), n);
        let v = &s.ground.dense_vectors()[0];
        let amp = (h.dim() as f64).sqrt().recip();
        assert!(v.iter().all(|x| (x.abs() - amp).abs() < 1e-8));
        // the Lanczos path near w = 0 agrees with the closed form
        let near = lanczos_lowest(&h.at(1e-12).unwrap(), 3, &SolverConfig::new(1).at(1e-12)).unwrap();
        assert!((near.e0 - s.e0).abs() < 1e-8);
        assert_eq!(near.deg1(), n);
    }
}

#[test]
fn lanczos_resolves_degenerate_problem_levels() {
    // just below w = 1 the clause-level degeneracies are nearly intact
    let mut rng = rng(204);
    let mut seen = 0;
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 4..=8);
        let Some(h) = problem(&inst) else { continue };
        let exact = slice(&h, 1.0, &SolverConfig::new(0)).unwrap();
        if exact.deg1() < 2 {
            continue;
        }
        let w = 1.0 - 1e-7;
        let op = h.at(w).unwrap();
        let got = lanczos_lowest(&op, 3, &SolverConfig::new(inst.seed()).at(w)).unwrap();
        let want = SpectrumSlice::from_dense(w, &dense_spectrum(&op).unwrap()).unwrap();
        assert!((got.e1 - want.e1).abs() < 1e-8);
        assert_eq!(got.deg0(), want.deg0());
        assert_eq!(got.deg1(), want.deg1());
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn slice_schedule_examples() {
    let mut rng = rng(205);
    let inst = random_nonconstant(&mut rng, 6..=6);
    let h = problem(&inst).unwrap();
    let cfg = SolverConfig::new(inst.seed());
    assert!(slice_schedule(&h, &[], &cfg).unwrap().is_empty());
    let two = slice_schedule(&h, &[0.5, 0.5], &cfg).unwrap();
    assert_eq!(two[0].e0, two[1].e0);
    assert_eq!(two[0].e2, two[1].e2);
    assert_eq!(two[0].ground.dense_vectors(), two[1].ground.dense_vectors());
    let one = slice_schedule(&h, &[1.0], &cfg).unwrap();
    let bf = brute_force(&inst).unwrap();
    assert_eq!(one[0].deg0(), bf.ground_degeneracy());
    assert!(slice_schedule(&h, &[0.5, 0.0], &cfg).is_err());
}

#[test]
fn gap02_exceeds_gap01() {
    let mut rng = rng(206);
    for _ in 0..20 {
        let inst = random_instance(&mut rng, 3..=8);
        let Some(h) = problem(&inst) else { continue };
        let w: f64 = rng.random_range(0.0..=1.0);
        let s = slice(&h, w, &SolverConfig::new(inst.seed())).unwrap();
        assert!(s.gap01() > 0.0);
        if let Some(g2) = s.gap02() {
            assert!(g2 > s.gap01());
        }
    }
}
