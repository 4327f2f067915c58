use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use contactor::checks::CheckResult;
use contactor::{Error, Result};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub struct Outcome {
    pub pass: bool,
}

pub struct Report {
    command: &'static str,
    digest: String,
    config_name: String,
    seed: u64,
    started: Instant,
    checks: Vec<CheckResult>,
    outputs: Vec<PathBuf>,
    details: BTreeMap<String, Value>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: &'static str, config_bytes: &[u8], config_name: &str, seed: u64) -> Self {
        Report {
            command,
            digest: digest(config_bytes),
            config_name: config_name.to_string(),
            seed,
            started: Instant::now(),
            checks: Vec::new(),
            outputs: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, r: CheckResult) {
        log::info!(
            "{} = {:e} (tol {:e}) {}",
            r.name,
            r.value,
            r.tolerance,
            if r.pass { "pass" } else { "FAIL" }
        );
        self.checks.push(r);
    }

    pub fn detail(&mut self, key: impl Into<String>, v: Value) {
        self.details.insert(key.into(), v);
    }

    pub fn details(&mut self, map: BTreeMap<String, Value>) {
        self.details.extend(map);
    }

    /// Writes `contents` into `dir/name` and records the path.
    pub fn write_output(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.outputs.push(path);
        Ok(())
    }

    pub fn finish(self, dir: &Path) -> Result<Outcome> {
        let pass = self.checks.iter().all(|c| c.pass);
        let mut checks = Map::new();
        for c in &self.checks {
            checks.insert(
                c.name.clone(),
                json!({ "value": c.value, "tolerance": c.tolerance, "pass": c.pass }),
            );
        }
        let path = dir.join("report.json");
        let mut outputs: Vec<String> = self.outputs.iter().map(|p| p.display().to_string()).collect();
        outputs.push(path.display().to_string());
        let body = json!({
            "command": self.command,
            "config": self.config_name,
            "config_digest": self.digest,
            "seed": self.seed,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "pass": pass,
            "checks": checks,
            "outputs": outputs,
            "details": self.details,
        });
        let text = serde_json::to_string_pretty(&body).expect("report serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(Outcome { pass })
    }
}

pub fn error_json(e: &Error) -> String {
    let mut body = json!({ "kind": e.kind(), "message": e.to_string() });
    let mut inner = e;
    while let Error::Field { pointer, source } = inner {
        body["pointer"] = pointer.clone().into();
        inner = source;
    }
    if let Error::Schema { pointer, .. } = inner {
        body["pointer"] = pointer.clone().into();
    }
    body.to_string()
}
