use super::*;

fn dho_json() -> serde_json::Value {
    serde_json::from_str(FIXTURES[0].1).unwrap()
}

fn pointer(e: &Error) -> String {
    match e {
        Error::Schema { pointer, .. } | Error::Field { pointer, .. } => pointer.clone(),
        other => panic!("expected a located error, got {other:?}"),
    }
}

#[test]
fn catalog_parses() {
    let all = catalog();
    assert!(all.len() >= 8);
    let dho = catalog_entry("dho").unwrap();
    assert_eq!(dho.n, 1);
    assert_eq!(dho.kind, Kind::Contact);
    for c in &all {
        assert!(!c.listed_invariants().is_empty(), "{}", c.name);
    }
}

#[test]
fn round_trip() {
    for c in catalog() {
        let back = SystemConfig::from_json_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), c.to_json());
    }
}

#[test]
fn lagrangian_on_contact_kind() {
    let mut v = dho_json();
    v["lagrangian"] = "qd1^2/2".into();
    let e = SystemConfig::from_json_str(&v.to_string()).unwrap_err();
    assert_eq!(e.kind(), "SchemaError");
    assert_eq!(pointer(&e), "/lagrangian");
}

#[test]
fn zero_step() {
    let mut v = dho_json();
    v["integrator"]["h"] = 0.0.into();
    let e = SystemConfig::from_json_str(&v.to_string()).unwrap_err();
    assert_eq!(pointer(&e), "/integrator/h");
}

#[test]
fn wrong_schema_version() {
    let mut v = dho_json();
    v["schema_version"] = 2.into();
    let e = SystemConfig::from_json_str(&v.to_string()).unwrap_err();
    assert_eq!(pointer(&e), "/schema_version");
}

#[test]
fn unknown_field_and_bad_type() {
    let mut v = dho_json();
    v["colour"] = "red".into();
    assert!(SystemConfig::from_json_str(&v.to_string()).unwrap_err().is_usage());
    let mut v = dho_json();
    v["initial"]["q"] = "one".into();
    let e = SystemConfig::from_json_str(&v.to_string()).unwrap_err();
    assert_eq!(pointer(&e), "/initial/q");
}

#[test]
fn expression_errors_name_the_field() {
    let mut v = dho_json();
    v["hamiltonian"] = "p1^2 + r".into();
    let e = SystemConfig::from_json_str(&v.to_string()).unwrap_err();
    assert_eq!(pointer(&e), "/hamiltonian");
    assert_eq!(e.kind(), "UnknownIdentifier");
    assert!(e.is_usage());
}

#[test]
fn initial_dimensions() {
    let mut v = dho_json();
    v["initial"]["p"] = serde_json::json!([0.0, 1.0]);
    let e = SystemConfig::from_json_str(&v.to_string()).unwrap_err();
    assert_eq!(pointer(&e), "/initial/p");
}

#[test]
fn herglotz_initial_momenta() {
    let c = catalog_entry("herglotz-friction").unwrap();
    let (x, l) = c.initial_implicit().unwrap();
    let s = c.initial_explicit().unwrap();
    // L = qd²/2 − 0.2 z, so p = qd
    assert_eq!(x[1], s[1]);
    assert_eq!(l, vec![s[1]]);
}

#[test]
fn parse_is_deterministic() {
    let a = SystemConfig::from_json_str(FIXTURES[3].1).unwrap();
    let b = SystemConfig::from_json_str(FIXTURES[3].1).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seed(), DEFAULT_SEED);
}
