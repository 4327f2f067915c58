//! End-to-end acceptance: one PASS/FAIL line per criterion, nonzero exit if
//! any fails. Runs without the libtest harness so the lines always print.

use std::time::Instant;

use contactor::checks::{box_samples, CheckOptions, Checker};
use contactor::dynamics::{
    cartan_residual, field_from_derivatives, integrate, Flow, HamiltonianField, HamiltonianSystem,
};
use contactor::expr::ScalarExpr;
use contactor::hj::{hj_sweep, reduced_dim, CharacteristicFn};
use contactor::implicit::{dae_integrate, MorseFamilySystem, Variant};
use contactor::systems::{catalog, catalog_entry, SystemConfig};
use contactor::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn entry(name: &str) -> SystemConfig {
    catalog_entry(name).unwrap_or_else(|| panic!("no catalog entry `{name}`"))
}

fn check(cfg: &SystemConfig, name: &str, samples: usize) -> Result<(f64, bool)> {
    let mut opts = CheckOptions::for_config(cfg);
    opts.samples = samples;
    let r = Checker::new(cfg, opts).run(name)?;
    Ok((r.value, r.pass))
}

fn structural() -> Result<Outcome> {
    let (mut contact, mut evo, mut cartan) = (0.0f64, 0.0f64, 0.0f64);
    let mut skipped = Vec::new();
    let mut count = 0;
    for cfg in catalog() {
        let Some(sys) = cfg.hamiltonian_view()? else {
            skipped.push(cfg.name.clone());
            continue;
        };
        count += 1;
        let n = cfg.n;
        for x in box_samples(SEED, 2 * n + 1, 100) {
            let (h, g) = sys.derivatives(&x)?;
            let eta = |v: &[f64]| v[2 * n] - (0..n).map(|i| x[n + i] * v[i]).sum::<f64>();
            let xh = field_from_derivatives(&x[n..2 * n], h, &g, Flow::Contact);
            let eh = field_from_derivatives(&x[n..2 * n], h, &g, Flow::Evolution);
            contact = contact.max((eta(&xh) + h).abs());
            evo = evo.max(eta(&eh).abs());
            for r in cartan_residual(&sys, &x)? {
                cartan = cartan.max(r.abs());
            }
        }
    }
    outcome(
        contact <= 1e-12 && evo <= 1e-12 && cartan <= 1e-10,
        format!(
            "{count} systems; |η(X_H)+H| {contact:.1e}, |η(ε_H)| {evo:.1e}, Cartan {cartan:.1e} (no Hamiltonian: {})",
            skipped.join(", ")
        ),
    )
}

fn dissipation() -> Result<Outcome> {
    let (diss, ok1) = check(&entry("dho"), "run_dissipation", 0)?;
    let (drift, ok2) = check(&entry("evolution-dho"), "run_drift", 0)?;
    outcome(
        ok1 && ok2 && diss <= 1e-5 && drift <= 1e-8,
        format!("contact |dH/dt + H_z H| {diss:.1e}, evolution |H(t)−H(0)| {drift:.1e}"),
    )
}

fn closed_form() -> Result<Outcome> {
    let (err, _) = check(&entry("dho"), "closed_form", 0)?;
    outcome(err <= 1e-7, format!("max |q − q_exact| on [0,10] {err:.1e}"))
}

fn submanifolds() -> Result<Outcome> {
    let (c, _) = check(&entry("dho"), "legendrian_image", 100)?;
    let (e, _) = check(&entry("evolution-dho"), "legendrian_image", 100)?;
    outcome(
        c <= 1e-10 && e <= 1e-10,
        format!("η_T on im(X_H, R(H)) {c:.1e}, ω_η on im(ε_H, R(H)) {e:.1e}"),
    )
}

fn beta_maps() -> Result<Outcome> {
    let (c, _) = check(&entry("dho"), "beta_compat", 100)?;
    let (e, _) = check(&entry("evolution-dho"), "beta_compat", 100)?;
    let (p, _) = check(&entry("dho"), "beta_pullback", 100)?;
    outcome(
        c <= 1e-12 && e <= 1e-12 && p <= 1e-13,
        format!("β^c {c:.1e}, β^0 {e:.1e}, pullbacks {p:.1e}"),
    )
}

fn phi_equivalence() -> Result<Outcome> {
    let (d, _) = check(&entry("phi-cubic"), "phi_equivalence", 200)?;
    outcome(d <= 1e-8, format!("two-sided discrepancy over 200 samples {d:.1e}"))
}

fn implicit_explicit() -> Result<Outcome> {
    let (c, _) = check(&entry("herglotz-regular"), "legendre_dual", 0)?;
    let (e, _) = check(&entry("herglotz-evolution"), "legendre_dual", 0)?;
    let (dual, _) = check(&entry("herglotz-regular"), "implicit_explicit", 0)?;
    // k = 0: the DAE path must reproduce the explicit run step by step
    let dho = entry("dho");
    let sys = HamiltonianSystem::new(1, dho.hamiltonian.as_deref().unwrap())?;
    let fam = MorseFamilySystem::explicit(&sys, Flow::Contact);
    let x0 = dho.initial_explicit()?;
    let ic = dho.integrator()?;
    let a = dae_integrate(&fam, &x0, &[], &ic, &[])?;
    let b = integrate(
        &mut HamiltonianField {
            sys: &sys,
            flow: Flow::Contact,
        },
        &x0,
        &ic,
    )?;
    let step = a
        .states
        .iter()
        .zip(&b.states)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max);
    outcome(
        c <= 1e-6 && e <= 1e-6 && dual <= 1e-6 && step <= 1e-14 && a.len() == b.len(),
        format!("contact {c:.1e}, evolution {e:.1e}, Herglotz field {dual:.1e}, k=0 per step {step:.1e}"),
    )
}

fn gauge() -> Result<Outcome> {
    let cfg = entry("gauge-herglotz");
    let (gap, _) = check(&cfg, "gauge_reduction", 0)?;
    let (unpinned, _) = check(&cfg, "gauge_unpinned_fails", 0)?;
    outcome(
        gap <= 1e-10 && unpinned == 0.0,
        format!(
            "pinned vs 1-dof {gap:.1e}; unpinned {}",
            if unpinned == 0.0 {
                "fails with SingularConstraintJacobian"
            } else {
                "did not fail as required"
            }
        ),
    )
}

fn hj_equivalence() -> Result<Outcome> {
    let explicit = |h: &str, flow| -> Result<MorseFamilySystem> {
        Ok(MorseFamilySystem::explicit(&HamiltonianSystem::new(1, h)?, flow))
    };
    let morse = |v, text: &str| MorseFamilySystem::new(1, v, text, &["l1"]);
    let cases: Vec<(&str, MorseFamilySystem, Vec<&str>)> = vec![
        ("contact", explicit("p1", Flow::Contact)?, vec!["1.3*q1", "q1^2"]),
        (
            "contact dho",
            explicit("p1^2/2 + q1^2/2 + 0.2*z", Flow::Contact)?,
            vec!["0", "sin(q1)"],
        ),
        (
            "evolution",
            explicit("p1 + z", Flow::Evolution)?,
            vec!["exp(-q1)", "q1^2"],
        ),
        (
            "implicit contact",
            entry("herglotz-friction").family()?,
            vec!["-0.1*q1^2 + 0.7*q1", "q1^3"],
        ),
        (
            "implicit evolution",
            morse(Variant::Evolution, "l1*p1 - l1^2/2 + z")?,
            vec!["-q1^2/2", "q1"],
        ),
        (
            "symplectic",
            entry("symplectic-gravity").family()?,
            vec!["-(2*(2 - q1))^1.5/3", "q1"],
        ),
        (
            "implicit symplectic",
            morse(Variant::Symplectic, "p1^2/2 + q1^2/2 + l1*(p1 - q1) - l1^2/2")?,
            vec!["q1/2", "0"],
        ),
    ];
    let mut agree = true;
    let mut dz = 0.0f64;
    let mut lines = Vec::new();
    for (label, sys, ws) in &cases {
        for w in ws {
            let wf = CharacteristicFn::expr(1, w)?;
            let samples = box_samples(SEED, reduced_dim(sys), 100);
            let sweep = hj_sweep(sys, &wf, &samples, &vec![0.0; sys.k()], &[])?;
            let ok = sweep.verdicts_agree(1e-10) && sweep.verdicts_agree(1e-6);
            agree &= ok;
            dz = dz.max(sweep.dz_cancellation);
            lines.push(format!(
                "{label}[{w}] {:.0e}{}",
                sweep.residual_sup(),
                if ok { "" } else { " DISAGREE" }
            ));
        }
    }
    outcome(
        agree && dz <= 1e-13,
        format!(
            "verdicts agree at 1e-10 and 1e-6; dz {dz:.1e}; residuals: {}",
            lines.join(", ")
        ),
    )
}

fn hj_solve_lift() -> Result<Outcome> {
    let cfg = entry("evolution-dho");
    let mut checker = Checker::new(&cfg, CheckOptions::for_config(&cfg));
    let solve = checker.run("hj_solve")?.value;
    let lift = checker.run("lift")?.value;
    let energy = checker.run("lift_H")?.value;
    outcome(
        solve <= 1e-10 && lift <= 1e-5 && energy <= 1e-6,
        format!("|H(q,W',W)−c| {solve:.1e}, lift defect {lift:.1e}, |H−c| along lift {energy:.1e}"),
    )
}

fn constraint_maintenance() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for cfg in catalog() {
        if !(cfg.kind.is_herglotz() || cfg.kind.is_morse()) {
            continue;
        }
        let traj = Checker::new(&cfg, CheckOptions::for_config(&cfg)).dae_run()?;
        worst = worst.max(traj.diag_max("constraint_residual").unwrap_or(f64::NAN));
        names.push(cfg.name);
    }
    outcome(
        worst <= 1e-8,
        format!("max ‖∇_λ E‖∞ {worst:.1e} over {}", names.join(", ")),
    )
}

/// A random smooth expression in `q1, p1, z`.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    const VARS: [&str; 3] = ["q1", "p1", "z"];
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) {
            VARS[rng.gen_range(0..3)].to_string()
        } else {
            format!("{:.3}", rng.gen_range(-2.0..2.0))
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 => format!("({a} + {})", random_expr(rng, depth - 1)),
        1 => format!("({a} - {})", random_expr(rng, depth - 1)),
        2 => format!("({a} * {})", random_expr(rng, depth - 1)),
        3 => format!("({a})^{}", rng.gen_range(2..4)),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(0.5*tanh({a}))"),
        _ => format!("({a}) / (2 + cos({}))", random_expr(rng, depth - 1)),
    }
}

fn ad_correctness() -> Result<Outcome> {
    let vars = ["q1", "p1", "z"];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut grad_err, mut hess_err) = (0.0f64, 0.0f64);
    let h = 1e-5;
    let rel = |exact: f64, approx: f64| (exact - approx).abs() / exact.abs().max(1.0);
    for _ in 0..100 {
        let e = ScalarExpr::parse(&random_expr(&mut rng, 4), &vars)?;
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, g) = e.full_grad_at(&x)?;
        let hs = e.full_hess_at(&x)?;
        for i in 0..3 {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[i] += h;
            b[i] -= h;
            grad_err = grad_err.max(rel(g[i], (e.value_at(&a)? - e.value_at(&b)?) / (2.0 * h)));
            let (_, ga) = e.full_grad_at(&a)?;
            let (_, gb) = e.full_grad_at(&b)?;
            for j in 0..3 {
                hess_err = hess_err.max(rel(hs[(i, j)], (ga[j] - gb[j]) / (2.0 * h)));
            }
        }
    }
    outcome(
        grad_err <= 1e-6 && hess_err <= 1e-6,
        format!("100 expressions; gradient {grad_err:.1e}, Hessian {hess_err:.1e} relative to central differences"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("structural identities", structural),
        ("dissipation and conservation", dissipation),
        ("damped oscillator closed form", closed_form),
        ("isotropy of the dynamics' images", submanifolds),
        ("β-map identities", beta_maps),
        ("Φ generator vs Morse family", phi_equivalence),
        ("implicit vs explicit", implicit_explicit),
        ("gauge pinning", gauge),
        ("HJ condition equivalence", hj_equivalence),
        ("HJ solve and lift", hj_solve_lift),
        ("constraint maintenance", constraint_maintenance),
        ("AD vs finite differences", ad_correctness),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {title}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
