//! JSON system configurations and the built-in catalog.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{lagrangian_vars, Flow, HamiltonianSystem, IntegratorConfig, LagrangianSystem};
use crate::error::{Error, Result};
use crate::expr::{indexed, ScalarExpr};
use crate::hj::{Branch, CharacteristicFn};
use crate::implicit::{MorseFamilySystem, PhiGenerator, Variant};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Contact,
    Evolution,
    /// `F(q, p)` on `T*Q`, integrated with `z` held fixed.
    Symplectic,
    HerglotzContact,
    HerglotzEvolution,
    MorseContact,
    MorseEvolution,
    MorseSymplectic,
    Phi,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Contact => "contact",
            Kind::Evolution => "evolution",
            Kind::Symplectic => "symplectic",
            Kind::HerglotzContact => "herglotz-contact",
            Kind::HerglotzEvolution => "herglotz-evolution",
            Kind::MorseContact => "morse-contact",
            Kind::MorseEvolution => "morse-evolution",
            Kind::MorseSymplectic => "morse-symplectic",
            Kind::Phi => "phi",
        }
    }

    /// The config field holding the generating expression.
    fn expression_field(self) -> &'static str {
        match self {
            Kind::Contact | Kind::Evolution | Kind::Symplectic => "hamiltonian",
            Kind::HerglotzContact | Kind::HerglotzEvolution => "lagrangian",
            Kind::MorseContact | Kind::MorseEvolution | Kind::MorseSymplectic => "morse",
            Kind::Phi => "phi",
        }
    }

    pub fn is_herglotz(self) -> bool {
        matches!(self, Kind::HerglotzContact | Kind::HerglotzEvolution)
    }

    pub fn is_morse(self) -> bool {
        matches!(self, Kind::MorseContact | Kind::MorseEvolution | Kind::MorseSymplectic)
    }

    pub fn flow(self) -> Option<Flow> {
        match self {
            Kind::Contact | Kind::HerglotzContact | Kind::MorseContact => Some(Flow::Contact),
            Kind::Evolution | Kind::HerglotzEvolution | Kind::MorseEvolution => Some(Flow::Evolution),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<f64>,
    #[serde(default)]
    pub z: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qd: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multipliers: Vec<f64>,
}

/// Defaults for the one-dimensional evolution HJ solve and its lift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HjSpec {
    pub c: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub nodes: usize,
    pub branch: Branch,
    #[serde(rename = "W0", default)]
    pub w0: f64,
    /// Time span of the reduced run that gets lifted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub schema_version: u32,
    pub name: String,
    pub n: usize,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lagrangian: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morse: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multipliers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    /// Per multiplier: a fixed value or `null` for solved.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pinned: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hj: Option<HjSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The object a config describes, ready to integrate or check.
#[derive(Debug, Clone)]
pub enum Model {
    Hamiltonian { sys: HamiltonianSystem, flow: Flow },
    Symplectic { f: ScalarExpr, n: usize },
    Herglotz { sys: LagrangianSystem, flow: Flow },
    Morse(MorseFamilySystem),
    Phi(PhiGenerator),
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl SystemConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SystemConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = pointer_of(e.path());
            Error::schema(pointer, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// A tolerance from the config, or `default`.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    fn k(&self) -> usize {
        match self.kind {
            Kind::HerglotzContact | Kind::HerglotzEvolution => self.n,
            Kind::MorseContact | Kind::MorseEvolution | Kind::MorseSymplectic => self.multipliers.len(),
            _ => 0,
        }
    }

    /// Structural checks beyond the JSON schema: which fields a kind uses,
    /// dimensions, positivity, and that every expression parses.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::schema(
                "/schema_version",
                format!(
                    "unsupported schema version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        if self.n == 0 {
            return Err(Error::schema("/n", "n must be at least 1"));
        }
        let wanted = self.kind.expression_field();
        let present = [
            ("hamiltonian", self.hamiltonian.is_some()),
            ("lagrangian", self.lagrangian.is_some()),
            ("morse", self.morse.is_some()),
            ("phi", self.phi.is_some()),
        ];
        for (field, is_set) in present {
            if field == wanted && !is_set {
                return Err(Error::schema(
                    format!("/{field}"),
                    format!("kind `{}` needs a `{field}` field", self.kind.as_str()),
                ));
            }
            if field != wanted && is_set {
                return Err(Error::schema(
                    format!("/{field}"),
                    format!("`{field}` is not used by kind `{}`", self.kind.as_str()),
                ));
            }
        }
        if !self.kind.is_morse() && !self.multipliers.is_empty() {
            return Err(Error::schema("/multipliers", "multipliers belong to morse-* kinds"));
        }
        let k = self.k();
        if !self.pinned.is_empty() && self.pinned.len() != k {
            return Err(Error::schema(
                "/pinned",
                format!("{} entries given, the system has {k} multipliers", self.pinned.len()),
            ));
        }
        if let Some(ic) = &self.integrator {
            if !(ic.h > 0.0 && ic.h.is_finite()) {
                return Err(Error::schema(
                    "/integrator/h",
                    format!("step must be positive, got {}", ic.h),
                ));
            }
            if !(ic.t_final > 0.0 && ic.t_final.is_finite()) {
                return Err(Error::schema(
                    "/integrator/T",
                    format!("horizon must be positive, got {}", ic.t_final),
                ));
            }
            ic.validate().map_err(|e| e.at("/integrator"))?;
        }
        if let Some(init) = &self.initial {
            self.check_initial(init)?;
        }
        if self.w.is_some() && self.kind == Kind::Phi {
            return Err(Error::schema("/W", "phi configs carry no dynamics to test W against"));
        }
        if let Some(hj) = &self.hj {
            if self.n != 1 || !matches!(self.kind, Kind::Contact | Kind::Evolution) {
                return Err(Error::schema(
                    "/hj",
                    "the 1-D solve needs an explicit Hamiltonian with n = 1",
                ));
            }
            if !(hj.q_max > hj.q_min) || hj.nodes < 2 {
                return Err(Error::schema("/hj", "grid needs q_max > q_min and at least two nodes"));
            }
        }
        for (name, v) in &self.tolerances {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(Error::schema(
                    format!("/tolerances/{name}"),
                    "tolerances must be positive",
                ));
            }
        }
        self.model()?;
        self.characteristic()?;
        Ok(())
    }

    fn check_initial(&self, init: &InitialState) -> Result<()> {
        let n = self.n;
        let len = |field: &str, v: &[f64], want: usize| {
            if v.len() == want {
                Ok(())
            } else {
                Err(Error::schema(
                    format!("/initial/{field}"),
                    format!("{} values given, expected {want}", v.len()),
                ))
            }
        };
        len("q", &init.q, n)?;
        if self.kind.is_herglotz() {
            len("qd", &init.qd, n)?;
            len("p", &init.p, 0)?;
        } else {
            len("p", &init.p, n)?;
            len("qd", &init.qd, 0)?;
        }
        if self.kind.is_morse() && !init.multipliers.is_empty() {
            len("multipliers", &init.multipliers, self.k())?;
        } else if !self.kind.is_morse() {
            len("multipliers", &init.multipliers, 0)?;
        }
        Ok(())
    }

    pub fn model(&self) -> Result<Model> {
        let n = self.n;
        let field = self.kind.expression_field();
        let at = |e: Error| e.at(format!("/{field}"));
        Ok(match self.kind {
            Kind::Contact | Kind::Evolution => Model::Hamiltonian {
                sys: HamiltonianSystem::new(n, self.hamiltonian.as_deref().unwrap_or_default()).map_err(at)?,
                flow: self.kind.flow().expect("contact-type kind"),
            },
            Kind::Symplectic => {
                let mut vars = indexed("q", n);
                vars.extend(indexed("p", n));
                Model::Symplectic {
                    f: ScalarExpr::parse(self.hamiltonian.as_deref().unwrap_or_default(), &vars).map_err(at)?,
                    n,
                }
            }
            Kind::HerglotzContact | Kind::HerglotzEvolution => Model::Herglotz {
                sys: LagrangianSystem::new(n, self.lagrangian.as_deref().unwrap_or_default()).map_err(at)?,
                flow: self.kind.flow().expect("contact-type kind"),
            },
            Kind::MorseContact | Kind::MorseEvolution | Kind::MorseSymplectic => {
                let variant = match self.kind {
                    Kind::MorseContact => Variant::Contact,
                    Kind::MorseEvolution => Variant::Evolution,
                    _ => Variant::Symplectic,
                };
                Model::Morse(
                    MorseFamilySystem::new(n, variant, self.morse.as_deref().unwrap_or_default(), &self.multipliers)
                        .map_err(at)?,
                )
            }
            Kind::Phi => {
                let phi = self.phi.as_ref().expect("validated");
                Model::Phi(PhiGenerator::new(n, phi.a.clone(), phi.b.clone(), &phi.expr).map_err(at)?)
            }
        })
    }

    /// The system seen as a Morse family: explicit Hamiltonians have no
    /// multipliers, Herglotz Lagrangians get `E = q̇·p − L`.
    pub fn family(&self) -> Result<MorseFamilySystem> {
        Ok(match self.model()? {
            Model::Hamiltonian { sys, flow } => MorseFamilySystem::explicit(&sys, flow),
            Model::Symplectic { n, .. } => MorseFamilySystem::new(
                n,
                Variant::Symplectic,
                self.hamiltonian.as_deref().unwrap_or_default(),
                &[] as &[&str],
            )
            .map_err(|e| e.at("/hamiltonian"))?,
            Model::Herglotz { flow, .. } => {
                MorseFamilySystem::herglotz(self.n, self.lagrangian.as_deref().unwrap_or_default(), flow)
                    .map_err(|e| e.at("/lagrangian"))?
            }
            Model::Morse(m) => m,
            Model::Phi(g) => g.to_morse()?,
        })
    }

    pub fn pinned(&self) -> Vec<Option<f64>> {
        self.pinned.clone()
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        self.integrator
            .ok_or_else(|| Error::schema("/integrator", "this command needs an `integrator` block"))
    }

    fn initial_or_err(&self) -> Result<&InitialState> {
        self.initial
            .as_ref()
            .ok_or_else(|| Error::schema("/initial", "this command needs an `initial` block"))
    }

    /// Initial state in the layout of the explicit run: `(q, qd, z)` for
    /// Herglotz kinds, `(q, p, z)` otherwise.
    pub fn initial_explicit(&self) -> Result<Vec<f64>> {
        let init = self.initial_or_err()?;
        let mut x = init.q.clone();
        x.extend(if self.kind.is_herglotz() { &init.qd } else { &init.p });
        x.push(init.z);
        Ok(x)
    }

    /// Initial `(q, p, z)` and multiplier start for the implicit run. Herglotz
    /// momenta come from `p = ∂L/∂q̇`, with `λ = q̇`.
    pub fn initial_implicit(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let init = self.initial_or_err()?;
        let n = self.n;
        match self.model()? {
            Model::Herglotz { sys, .. } => {
                let s = self.initial_explicit()?;
                let idx: Vec<usize> = (n..2 * n).collect();
                let (_, p) = sys.l.grad_at(&s, &idx)?;
                let mut x = init.q.clone();
                x.extend(p);
                x.push(init.z);
                Ok((x, init.qd.clone()))
            }
            Model::Phi(_) => Err(Error::schema("/kind", "phi configs carry no dynamics")),
            _ => {
                let k = self.k();
                let lambda = if init.multipliers.is_empty() {
                    vec![0.0; k]
                } else {
                    init.multipliers.clone()
                };
                Ok((self.initial_explicit()?, lambda))
            }
        }
    }

    pub fn characteristic(&self) -> Result<Option<CharacteristicFn>> {
        self.w
            .as_deref()
            .map(|t| CharacteristicFn::expr(self.n, t).map_err(|e| e.at("/W")))
            .transpose()
    }

    /// A Hamiltonian on `(q, p, z)` describing the same flow: the config's own
    /// for explicit kinds, otherwise `metadata.hamiltonian_view` if present.
    pub fn hamiltonian_view(&self) -> Result<Option<HamiltonianSystem>> {
        let text = match self.kind {
            Kind::Contact | Kind::Evolution | Kind::Symplectic => self.hamiltonian.clone(),
            _ => self
                .metadata
                .get("hamiltonian_view")
                .and_then(|v| v.as_str())
                .map(String::from),
        };
        text.map(|t| HamiltonianSystem::new(self.n, &t).map_err(|e| e.at("/metadata/hamiltonian_view")))
            .transpose()
    }

    /// Check names this entry is expected to pass.
    pub fn listed_invariants(&self) -> Vec<String> {
        self.metadata
            .get("invariants")
            .and_then(|v| v.as_array())
            .map(|a| a.iter().filter_map(|s| s.as_str().map(String::from)).collect())
            .unwrap_or_default()
    }
}

/// Variable names of the Lagrangian state, for CSV headers.
pub fn herglotz_layout(n: usize) -> Vec<String> {
    lagrangian_vars(n)
}

const FIXTURES: &[(&str, &str)] = &[
    ("dho", include_str!("../../fixtures/dho.json")),
    ("free-particle", include_str!("../../fixtures/free-particle.json")),
    ("linear-p", include_str!("../../fixtures/linear-p.json")),
    ("evolution-dho", include_str!("../../fixtures/evolution-dho.json")),
    ("herglotz-regular", include_str!("../../fixtures/herglotz-regular.json")),
    (
        "herglotz-evolution",
        include_str!("../../fixtures/herglotz-evolution.json"),
    ),
    (
        "herglotz-friction",
        include_str!("../../fixtures/herglotz-friction.json"),
    ),
    ("gauge-herglotz", include_str!("../../fixtures/gauge-herglotz.json")),
    (
        "symplectic-baseline",
        include_str!("../../fixtures/symplectic-baseline.json"),
    ),
    (
        "symplectic-gravity",
        include_str!("../../fixtures/symplectic-gravity.json"),
    ),
    ("phi-cubic", include_str!("../../fixtures/phi-cubic.json")),
];

/// Every shipped configuration, parsed and validated.
pub fn catalog() -> Vec<SystemConfig> {
    FIXTURES
        .iter()
        .map(|(name, text)| SystemConfig::from_json_str(text).unwrap_or_else(|e| panic!("fixture {name}: {e}")))
        .collect()
}

pub fn catalog_entry(name: &str) -> Option<SystemConfig> {
    catalog().into_iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests;
