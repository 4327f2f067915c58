use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::dynamics::{integrate, Flow, HamiltonianField, HamiltonianSystem, IntegratorConfig, Trajectory};

fn explicit(n: usize, text: &str, flow: Flow) -> MorseFamilySystem {
    MorseFamilySystem::explicit(&HamiltonianSystem::new(n, text).unwrap(), flow)
}

fn box_samples(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

#[test]
fn linear_pair() {
    let sys = explicit(1, "p1", Flow::Contact);
    let w = CharacteristicFn::expr(1, "1.7*q1").unwrap();
    assert_eq!(reduced_vf(&sys, &w, &[0.3, -0.4], &[]).unwrap(), vec![1.0, 0.0]);
    let r = hj_residual(&sys, &w, &[0.3, -0.4], &[], 1e-12).unwrap();
    assert!(r.verdict && r.residual == vec![0.0]);
    assert_eq!(
        gamma_related_check(&sys, &w, &[vec![0.3, -0.4]], &[], &[]).unwrap(),
        0.0
    );
}

#[test]
fn reduced_field_examples() {
    let sys = explicit(1, "q1^2 + z", Flow::Contact);
    let w = CharacteristicFn::expr(1, "q1^3").unwrap();
    assert_eq!(reduced_vf(&sys, &w, &[0.5, 0.1], &[]).unwrap()[0], 0.0);
    let sys = explicit(1, "p1^2/2 + q1^2/2 + 0.2*z", Flow::Contact);
    let v = reduced_vf(&sys, &w, &[0.5, 0.1], &[]).unwrap();
    assert!((v[0] - 0.75).abs() < 1e-15);
}

#[test]
fn zero_w_on_oscillator_mismatch_is_q() {
    let sys = explicit(1, "p1^2/2 + q1^2/2 + 0.2*z", Flow::Contact);
    let w = CharacteristicFn::expr(1, "0").unwrap();
    for s in [[0.3, 0.0], [-0.8, 0.5]] {
        let m = gamma_mismatch(&sys, &w, &s, &[]).unwrap();
        let worst = m.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!((worst - s[0].abs()).abs() < 1e-15);
        assert_eq!(hj_residual(&sys, &w, &s, &[], 1e-10).unwrap().residual, vec![s[0]]);
    }
}

#[test]
fn mismatch_slot_equals_residual_and_dz_cancels() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..20 {
        let a: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = format!(
            "p1^2/2 + {}*p2^2 + {}*q1*p2 + {}*sin(q2)*z + {}*z^2 + {}*p1*z",
            1.0 + a[0].abs(),
            a[1],
            a[2],
            a[3],
            a[4]
        );
        let w_text = format!("{}*q1^2 + cos(q2)*q1 + {}*q2^3", a[5], a[0]);
        let flow = if trial % 2 == 0 { Flow::Contact } else { Flow::Evolution };
        let sys = explicit(2, &h, flow);
        let w = CharacteristicFn::expr(2, &w_text).unwrap();
        let samples = box_samples(&mut rng, reduced_dim(&sys), 10);
        let sweep = hj_sweep(&sys, &w, &samples, &[], &[]).unwrap();
        assert!(sweep.dz_cancellation <= 1e-13, "{}", sweep.dz_cancellation);
        assert!(sweep.slot_gap <= 1e-12, "{}", sweep.slot_gap);
        for (r, m) in sweep.residual.iter().zip(&sweep.mismatch) {
            assert!((r - m).abs() <= 1e-12);
        }
    }
}

/// `(system, W, multiplier start)` pairs that solve their HJ problem exactly.
fn solved_cases() -> Vec<(MorseFamilySystem, CharacteristicFn, Vec<f64>)> {
    let w = |t: &str| CharacteristicFn::expr(1, t).unwrap();
    vec![
        (explicit(1, "p1", Flow::Contact), w("1.3*q1"), vec![]),
        (
            explicit(1, "p1^2/2 + 0.2*z", Flow::Contact),
            w("-0.1*q1^2 + 0.7*q1"),
            vec![],
        ),
        (
            explicit(1, "p1^2/2 + q1^2/2 + 2.5*z", Flow::Contact),
            w("-q1^2/4"),
            vec![],
        ),
        (
            explicit(1, "p1^2/2 + 0.5*z", Flow::Evolution),
            w("3/0.5 - 0.5*(q1 - 0.2)^2/2"),
            vec![],
        ),
        (
            MorseFamilySystem::herglotz(1, "qd1^2/2 - 0.2*z", Flow::Contact).unwrap(),
            w("-0.1*q1^2 + 0.7*q1"),
            vec![0.0],
        ),
        (
            MorseFamilySystem::herglotz(1, "qd1^2/2 - 0.5*z", Flow::Evolution).unwrap(),
            w("3/0.5 - 0.5*(q1 - 0.2)^2/2"),
            vec![0.0],
        ),
        (
            MorseFamilySystem::new(1, Variant::Symplectic, "p1^2/2 + l1*(p1 - 0.6) - l1^2/2", &["l1"]).unwrap(),
            w("0.6*q1"),
            vec![0.0],
        ),
        (
            MorseFamilySystem::new(1, Variant::Symplectic, "p1^2/2 + q1", &[] as &[&str]).unwrap(),
            w("-(2*(2 - q1))^1.5/3"),
            vec![],
        ),
    ]
}

#[test]
fn closed_form_pairs_pass_both_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (sys, w, l0) in solved_cases() {
        let samples = box_samples(&mut rng, reduced_dim(&sys), 50);
        let sweep = hj_sweep(&sys, &w, &samples, &l0, &[]).unwrap();
        assert!(
            sweep.residual_sup() <= 1e-12,
            "{}: {}",
            sweep.variant,
            sweep.residual_sup()
        );
        assert!(
            sweep.mismatch_sup() <= 1e-12,
            "{}: {}",
            sweep.variant,
            sweep.mismatch_sup()
        );
        assert!(sweep.verdicts_agree(1e-10) && sweep.verdicts_agree(1e-6));
    }
}

#[test]
fn perturbed_pairs_fail_both_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for (sys, w, l0) in solved_cases() {
        let CharacteristicFn::Expr(e) = &w else { unreachable!() };
        let bent = CharacteristicFn::expr(1, &format!("{} + 0.3*q1^3", e.source())).unwrap();
        let samples = box_samples(&mut rng, reduced_dim(&sys), 50);
        let sweep = hj_sweep(&sys, &bent, &samples, &l0, &[]).unwrap();
        assert!(sweep.residual_sup() > 1e-3);
        assert!(sweep.verdicts_agree(1e-10) && sweep.verdicts_agree(1e-6));
    }
}

#[test]
fn z_free_contact_residual_is_classical() {
    let text = "p1^2/2 + p2^2/2 + q1^2*q2 + sin(p1*q2)";
    let contact = explicit(2, text, Flow::Contact);
    let symp = MorseFamilySystem::new(2, Variant::Symplectic, text, &[] as &[&str]).unwrap();
    let w = CharacteristicFn::expr(2, "q1*q2 + exp(q1)/3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in box_samples(&mut rng, 3, 30) {
        let a = hj_residual(&contact, &w, &s, &[], 0.0).unwrap();
        let b = hj_residual(&symp, &w, &s[..2], &[], 0.0).unwrap();
        for (x, y) in a.residual.iter().zip(&b.residual) {
            assert!((x - y).abs() <= 1e-14);
        }
    }
}

#[test]
fn constraint_violation_is_refused() {
    let sys = MorseFamilySystem::herglotz(1, "qd1^2/2", Flow::Contact).unwrap();
    let w = CharacteristicFn::expr(1, "q1").unwrap();
    assert!(matches!(
        reduced_vf(&sys, &w, &[0.0, 0.0], &[0.5]),
        Err(Error::ConstraintViolated { .. })
    ));
    let r = hj_residual(&sys, &w, &[0.0, 0.0], &[0.5], 1e-10).unwrap();
    assert!(!r.verdict && (r.constraint_residual[0] - 0.5).abs() < 1e-15);
}

#[test]
fn lift_of_linear_pair() {
    let sys = explicit(1, "p1", Flow::Contact);
    let w = CharacteristicFn::expr(1, "1.3*q1").unwrap();
    let cfg = IntegratorConfig::new(1e-2, 2.0);
    let red = integrate_reduced(&sys, &w, &[0.2, 0.7], &cfg, &[], &[]).unwrap();
    let lift = lift_solution(&w, &red, &sys, &[], &[]).unwrap();
    assert!(lift.max_residual <= 1e-10);
    let last = lift.full.states.last().unwrap();
    assert!((last[0] - 2.2).abs() < 1e-12 && last[1] == 1.3 && (last[2] - 0.7).abs() < 1e-12);
}

#[test]
fn lift_rejects_mismatch_and_non_solutions() {
    let sys = explicit(1, "p1", Flow::Contact);
    let w = CharacteristicFn::expr(1, "1.3*q1").unwrap();
    let mut red = integrate_reduced(&sys, &w, &[0.2, 0.7], &IntegratorConfig::new(1e-2, 1.0), &[], &[]).unwrap();
    let bad = Trajectory {
        states: red.states.iter().map(|s| vec![s[0]]).collect(),
        ..red.clone()
    };
    assert!(matches!(
        lift_solution(&w, &bad, &sys, &[], &[]),
        Err(Error::Schema { .. })
    ));
    for s in red.states.iter_mut() {
        s[1] += s[0];
    }
    assert!(matches!(
        lift_solution(&w, &red, &sys, &[], &[]),
        Err(Error::ReducedNotASolution { .. })
    ));
}

#[test]
fn lift_of_a_non_solution_shows_its_defect() {
    let sys = explicit(1, "p1^2/2 + q1^2/2 + 0.2*z", Flow::Contact);
    let w = CharacteristicFn::expr(1, "0.5*q1").unwrap();
    let red = integrate_reduced(&sys, &w, &[0.1, 0.0], &IntegratorConfig::new(1e-3, 1.0), &[], &[]).unwrap();
    let lift = lift_solution(&w, &red, &sys, &[], &[]).unwrap();
    // HJ defect is |q + 0.1| here, at least 0.2 along the run
    assert!(lift.max_residual >= 0.2);
}

#[test]
fn solved_evolution_w_lifts_to_a_trajectory() {
    let hsys = HamiltonianSystem::new(1, "p1^2/2 + q1^2/2 + 0.2*z").unwrap();
    let sol = solve_evolution_hj_1d(&hsys, 1.0, &uniform_grid(-1.0, 1.0, 2001), 0.0, Branch::Plus).unwrap();
    assert!(sol.max_residual() <= 1e-10);
    let sys = MorseFamilySystem::explicit(&hsys, Flow::Evolution);
    let w = CharacteristicFn::Table(sol.table);
    // gradient residual at the nodes
    for i in (0..2001).step_by(37) {
        let q = -1.0 + i as f64 * 1e-3;
        assert!(hj_residual(&sys, &w, &[q], &[], 1e-8).unwrap().verdict);
    }
    let cfg = IntegratorConfig::new(1e-3, 1.5);
    let red = integrate_reduced(&sys, &w, &[-1.0], &cfg, &[], &[]).unwrap();
    let lift = lift_solution(&w, &red, &sys, &[], &[]).unwrap();
    assert!(lift.max_residual <= 1e-5, "{}", lift.max_residual);
    let h_dev = lift.full.diagnostics["E"]
        .iter()
        .fold(0.0f64, |m, e| m.max((e - 1.0).abs()));
    assert!(h_dev <= 1e-6);
    let x0 = lift.full.states[0].clone();
    let direct = integrate(
        &mut HamiltonianField {
            sys: &hsys,
            flow: Flow::Evolution,
        },
        &x0,
        &cfg,
    )
    .unwrap();
    let gap = direct
        .states
        .iter()
        .zip(&lift.full.states)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    assert!(gap <= 1e-4, "{gap}");
}
