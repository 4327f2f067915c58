//! Plain CSV for trajectories: one header row, comma separated, LF endings,
//! numbers printed like C's `%.17g` so they round-trip exactly.

use std::fmt::Write as _;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Columns: `t`, the state layout, multipliers, then `diag:<name>`.
pub fn trajectory_header(traj: &Trajectory) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend(traj.layout.iter().cloned());
    if traj.multipliers.is_some() {
        cols.extend(traj.multiplier_names.iter().cloned());
    }
    cols.extend(traj.diagnostics.keys().map(|k| format!("diag:{k}")));
    cols
}

pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let mut out = trajectory_header(traj).join(",");
    out.push('\n');
    for i in 0..traj.len() {
        let mut row = vec![traj.times[i]];
        row.extend(&traj.states[i]);
        if let Some(m) = &traj.multipliers {
            row.extend(&m[i]);
        }
        row.extend(traj.diagnostics.values().map(|d| d.get(i).copied().unwrap_or(f64::NAN)));
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_g17(*v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(|v| fmt_g17(*v)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

pub fn parse_csv(text: &str) -> Result<Table> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::schema("/", "empty CSV"))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::schema(format!("/{}", i + 1), format!("row {}: {e}", i + 2)))?;
        if row.len() != header.len() {
            return Err(Error::schema(
                format!("/{}", i + 1),
                format!("row {} has {} fields, header has {}", i + 2, row.len(), header.len()),
            ));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Rebuilds a trajectory from CSV, taking `layout` as the state columns.
pub fn trajectory_from_table(table: &Table, layout: &[String]) -> Result<Trajectory> {
    let t = table
        .column("t")
        .ok_or_else(|| Error::schema("/t", "CSV has no `t` column"))?;
    let idx = layout
        .iter()
        .map(|name| {
            table
                .header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::schema(format!("/{name}"), format!("CSV has no `{name}` column")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: t,
        states: table.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
        layout: layout.to_vec(),
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_c() {
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        assert_eq!(fmt_g17(f64::NAN), "nan");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn table_round_trip() {
        let t = Table {
            header: vec!["t".into(), "q1".into()],
            rows: vec![vec![0.0, 1.0 / 3.0], vec![0.1, -2e-9]],
        };
        assert_eq!(parse_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(parse_csv("t,q1\n0,1,2\n").is_err());
    }
}
