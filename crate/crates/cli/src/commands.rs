use std::path::Path;

use contactor::checks::{closed_form_error, CheckOptions, CheckResult, Checker};
use contactor::csv::{parse_csv, trajectory_from_table, trajectory_to_csv, Table};
use contactor::dynamics::{integrate, Aborted, HamiltonianField, HerglotzField, SymplecticField, Trajectory};
use contactor::hj::{
    integrate_reduced, lift_solution, reduced_layout, Branch, CharacteristicFn, HjSolve1d, TabulatedW,
};
use contactor::implicit::dae_integrate;
use contactor::systems::{HjSpec, Kind, Model, SystemConfig};
use contactor::{Error, Result};
use serde_json::json;

use crate::report::{Outcome, Report};
use crate::Common;

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(c: &Common) -> Result<(SystemConfig, Vec<u8>)> {
    let bytes = read(&c.config)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Io(format!("{}: {e}", c.config.display())))?;
    let cfg = SystemConfig::from_json_str(&text)?;
    std::fs::create_dir_all(&c.out).map_err(|e| Error::Io(format!("{}: {e}", c.out.display())))?;
    log::info!("loaded `{}` ({}, n = {})", cfg.name, cfg.kind.as_str(), cfg.n);
    Ok((cfg, bytes))
}

fn options(c: &Common, cfg: &SystemConfig) -> CheckOptions {
    CheckOptions {
        samples: c.samples,
        seed: c.seed.unwrap_or_else(|| cfg.seed()),
        overrides: c.tol.iter().cloned().collect(),
    }
}

fn report(command: &'static str, bytes: &[u8], cfg: &SystemConfig, opts: &CheckOptions) -> Report {
    Report::new(command, bytes, &cfg.name, opts.seed)
}

/// Writes what a failed run produced before propagating its error.
fn keep_partial(r: std::result::Result<Trajectory, Box<Aborted>>, out: &Path, rep: &mut Report) -> Result<Trajectory> {
    r.or_else(|a| {
        if !a.partial.is_empty() {
            rep.write_output(out, "trajectory.partial.csv", &trajectory_to_csv(&a.partial))?;
        }
        Err(a.error)
    })
}

fn diag_check(checker: &Checker, rep: &mut Report, traj: &Trajectory, name: &str, diag: &str) {
    if let Some(v) = traj.diag_max(diag) {
        rep.check(CheckResult::new(name, v, checker.tolerance(name)));
    }
}

pub fn simulate(c: &Common) -> Result<Outcome> {
    let (cfg, bytes) = load(c)?;
    if cfg.kind.is_morse() || cfg.kind == Kind::Phi {
        return Err(Error::Schema {
            pointer: "/kind".into(),
            message: format!("`{}` has no explicit flow; use implicit-simulate", cfg.kind.as_str()),
        });
    }
    let opts = options(c, &cfg);
    let mut rep = report("simulate", &bytes, &cfg, &opts);
    let checker = Checker::new(&cfg, opts);
    let ic = cfg.integrator()?;
    let x0 = cfg.initial_explicit()?;
    let run = match cfg.model()? {
        Model::Hamiltonian { sys, flow } => integrate(&mut HamiltonianField { sys: &sys, flow }, &x0, &ic),
        Model::Symplectic { f, n } => integrate(&mut SymplecticField { f: &f, n }, &x0, &ic),
        Model::Herglotz { sys, flow } => integrate(&mut HerglotzField { sys: &sys, flow }, &x0, &ic),
        Model::Morse(_) | Model::Phi(_) => unreachable!("rejected above"),
    };
    let traj = keep_partial(run, &c.out, &mut rep)?;
    rep.write_output(&c.out, "trajectory.csv", &trajectory_to_csv(&traj))?;
    diag_check(&checker, &mut rep, &traj, "run_dissipation", "dissipation");
    for key in ["H_drift", "F_drift"] {
        diag_check(&checker, &mut rep, &traj, "run_drift", key);
    }
    if let Some(err) = closed_form_error(&cfg, &traj) {
        rep.check(CheckResult::new("closed_form", err, checker.tolerance("closed_form")));
    }
    rep.finish(&c.out)
}

pub fn implicit_simulate(c: &Common) -> Result<Outcome> {
    let (cfg, bytes) = load(c)?;
    let opts = options(c, &cfg);
    let mut rep = report("implicit-simulate", &bytes, &cfg, &opts);
    let checker = Checker::new(&cfg, opts);
    let fam = cfg.family()?;
    let (x0, l0) = cfg.initial_implicit()?;
    let run = dae_integrate(&fam, &x0, &l0, &cfg.integrator()?, &cfg.pinned());
    let traj = keep_partial(run, &c.out, &mut rep)?;
    rep.write_output(&c.out, "trajectory.csv", &trajectory_to_csv(&traj))?;
    diag_check(
        &checker,
        &mut rep,
        &traj,
        "constraint_maintenance",
        "constraint_residual",
    );
    diag_check(&checker, &mut rep, &traj, "run_drift", "E_drift");
    rep.finish(&c.out)
}

fn with_w(mut cfg: SystemConfig, w: Option<&str>) -> Result<SystemConfig> {
    if let Some(w) = w {
        cfg.w = Some(w.to_string());
        cfg.validate()?;
    }
    Ok(cfg)
}

pub fn hj_check(c: &Common, w: Option<&str>) -> Result<Outcome> {
    let (cfg, bytes) = load(c)?;
    let cfg = with_w(cfg, w)?;
    let opts = options(c, &cfg);
    let mut rep = report("hj-check", &bytes, &cfg, &opts);
    let mut checker = Checker::new(&cfg, opts);
    for name in ["hj_residual", "gamma_related", "dz_cancellation", "verdict_agreement"] {
        rep.check(checker.run(name)?);
    }
    // one row per sample: reduced point, residual, mismatch, constraint residual
    let hj = &checker.details["hj"];
    let mut header = reduced_layout(&cfg.family()?);
    header.extend(["residual", "mismatch", "constraint_residual"].map(String::from));
    let col = |k: &str| -> Vec<f64> {
        hj[k]
            .as_array()
            .map(|a| a.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect())
            .unwrap_or_default()
    };
    let (res, mis, con) = (col("residual"), col("mismatch"), col("constraint_residual"));
    let rows = hj["samples"]
        .as_array()
        .map(|a| {
            a.iter()
                .enumerate()
                .map(|(i, s)| {
                    let mut row: Vec<f64> = s.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
                    row.extend([res[i], mis[i], con[i]]);
                    row
                })
                .collect()
        })
        .unwrap_or_default();
    rep.write_output(&c.out, "hj_samples.csv", &Table { header, rows }.to_csv())?;
    rep.details(checker.details.clone());
    rep.finish(&c.out)
}

fn table_csv(s: &HjSolve1d) -> String {
    let t = &s.table;
    Table {
        header: ["q", "W", "dW", "ddW", "residual"].map(String::from).to_vec(),
        rows: (0..t.q.len())
            .map(|i| vec![t.q[i], t.w[i], t.dw[i], t.ddw[i], s.residual[i]])
            .collect(),
    }
    .to_csv()
}

pub fn hj_solve1d(
    c: &Common,
    level: Option<f64>,
    grid: Option<(f64, f64, usize)>,
    branch: Option<Branch>,
    w0: Option<f64>,
) -> Result<Outcome> {
    let (mut cfg, bytes) = load(c)?;
    let base = cfg.hj.clone();
    let missing = |what: &str| {
        Error::schema(
            "/hj",
            format!("no `{what}` in the config's hj block or on the command line"),
        )
    };
    let (q_min, q_max, nodes) = match (grid, &base) {
        (Some(g), _) => g,
        (None, Some(h)) => (h.q_min, h.q_max, h.nodes),
        _ => return Err(missing("grid")),
    };
    cfg.hj = Some(HjSpec {
        c: level.or(base.as_ref().map(|h| h.c)).ok_or_else(|| missing("c"))?,
        q_min,
        q_max,
        nodes,
        branch: branch
            .or(base.as_ref().map(|h| h.branch))
            .ok_or_else(|| missing("branch"))?,
        w0: w0.or(base.as_ref().map(|h| h.w0)).unwrap_or(0.0),
        horizon: base.and_then(|h| h.horizon),
    });
    cfg.validate()?;
    let opts = options(c, &cfg);
    let mut rep = report("hj-solve1d", &bytes, &cfg, &opts);
    let mut checker = Checker::new(&cfg, opts);
    let solved = checker.hj_solution()?;
    rep.write_output(&c.out, "W.csv", &table_csv(&solved))?;
    rep.check(checker.run("hj_solve")?);
    rep.detail("hj", json!(cfg.hj));
    rep.finish(&c.out)
}

fn read_table_w(path: &Path) -> Result<TabulatedW> {
    let text = String::from_utf8(read(path)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let t = parse_csv(&text)?;
    let col = |name: &str| {
        t.column(name)
            .ok_or_else(|| Error::schema(format!("/{name}"), format!("{} has no `{name}` column", path.display())))
    };
    TabulatedW::new(col("q")?, col("W")?, col("dW")?, col("ddW")?)
}

fn read_reduced(path: &Path, layout: &[String], multipliers: &[String]) -> Result<Trajectory> {
    let text = String::from_utf8(read(path)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let table = parse_csv(&text)?;
    for h in &table.header {
        let known = h == "t" || h.starts_with("diag:") || layout.contains(h) || multipliers.contains(h);
        if !known {
            return Err(Error::schema(
                "/reduced",
                format!(
                    "column `{h}` does not belong to the reduced layout {}",
                    layout.join(",")
                ),
            ));
        }
    }
    trajectory_from_table(&table, layout).map_err(|e| match e {
        Error::Schema { message, .. } => Error::schema("/reduced", message),
        other => other,
    })
}

pub fn lift(c: &Common, table: Option<&Path>, w: Option<&str>, reduced: Option<&Path>) -> Result<Outcome> {
    let (cfg, bytes) = load(c)?;
    let cfg = with_w(cfg, w)?;
    let opts = options(c, &cfg);
    let mut rep = report("lift", &bytes, &cfg, &opts);
    let mut checker = Checker::new(&cfg, opts);
    let fam = cfg.family()?;
    let l0 = vec![0.0; fam.k()];
    let pinned = cfg.pinned();

    let explicit_w = match (table, w) {
        (Some(p), _) => Some(CharacteristicFn::Table(read_table_w(p)?)),
        (None, Some(_)) => cfg.characteristic()?,
        _ => None,
    };
    let (w, red) = match reduced {
        Some(path) => {
            let w = match explicit_w {
                Some(w) => w,
                None => checker.lift_setup()?.0,
            };
            (w, read_reduced(path, &reduced_layout(&fam), &fam.multipliers)?)
        }
        None => {
            let (default_w, s0, ic) = checker.lift_setup()?;
            let w = explicit_w.unwrap_or(default_w);
            let red = keep_partial(integrate_reduced(&fam, &w, &s0, &ic, &l0, &pinned), &c.out, &mut rep)?;
            rep.write_output(&c.out, "reduced.csv", &trajectory_to_csv(&red))?;
            (w, red)
        }
    };
    let lift = lift_solution(&w, &red, &fam, &l0, &pinned)?;
    rep.write_output(&c.out, "lifted.csv", &trajectory_to_csv(&lift.full))?;
    rep.check(CheckResult::new("lift", lift.max_residual, checker.tolerance("lift")));
    if let Some(spec) = &cfg.hj {
        let drift = lift.full.diagnostics["E"]
            .iter()
            .fold(0.0, |m: f64, e| m.max((e - spec.c).abs()));
        rep.check(CheckResult::new("lift_H", drift, checker.tolerance("lift_H")));
    }
    rep.detail("reduced_defect", json!(lift.reduced_defect));
    rep.finish(&c.out)
}

fn run_candidates(command: &'static str, c: &Common, names: &[&str]) -> Result<Outcome> {
    let (cfg, bytes) = load(c)?;
    let opts = options(c, &cfg);
    let mut rep = report(command, &bytes, &cfg, &opts);
    let mut checker = Checker::new(&cfg, opts);
    let mut skipped = Vec::new();
    for name in names {
        match checker.run_applicable(name)? {
            Some(r) => rep.check(r),
            None => skipped.push(*name),
        }
    }
    log::info!("not applicable to `{}`: {}", cfg.kind.as_str(), skipped.join(", "));
    rep.detail("not_applicable", json!(skipped));
    rep.details(checker.details.clone());
    rep.finish(&c.out)
}

pub fn geometry_check(c: &Common) -> Result<Outcome> {
    run_candidates(
        "geometry-check",
        c,
        &[
            "eta_contraction",
            "cartan",
            "dissipation",
            "conservation",
            "legendrian_image",
            "beta_compat",
            "beta_pullback",
        ],
    )
}

pub fn legendrian_check(c: &Common) -> Result<Outcome> {
    run_candidates(
        "legendrian-check",
        c,
        &[
            "legendrian_image",
            "morse_rank",
            "beta_compat",
            "phi_equivalence",
            "phi_isotropy",
        ],
    )
}
