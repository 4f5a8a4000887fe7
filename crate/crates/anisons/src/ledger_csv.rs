//! Ledger CSV, schema `ledger-v1`.
//!
//! Comment lines first (`#schema=ledger-v1`, then `#grid=`, `#cutoff_hash=`,
//! `#config_hash=`), a header row starting with `t`, then one row per ledger
//! time. Columns keep the order in which the run first recorded them. Values
//! use the shortest exponent form that reads back to the same `f64`; missing
//! entries are empty.

use std::fmt::Write as _;

use anisons_core::ledger::NormLedger;

pub const SCHEMA: &str = "ledger-v1";

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:e}")
    }
}

pub fn to_csv(ledger: &NormLedger, config_hash: &str) -> String {
    let g = ledger.grid();
    let mut s = String::new();
    let _ = writeln!(s, "#schema={SCHEMA}");
    let _ = writeln!(s, "#grid=n_h={},n_v={},l_h={},l_v={}", g.n_h, g.n_v, num(g.l_h), num(g.l_v));
    let _ = writeln!(s, "#cutoff_hash={}", ledger.cutoff_hash());
    let _ = writeln!(s, "#config_hash={config_hash}");
    s.push('t');
    for c in ledger.columns() {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for r in ledger.rows() {
        s.push_str(&num(r.t));
        for v in &r.values {
            s.push(',');
            s.push_str(&num(*v));
        }
        s.push('\n');
    }
    s
}

/// A parsed ledger CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerTable {
    /// `(key, value)` pairs from the comment lines, in file order.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    /// Each row starts with `t`; missing entries are `NaN`.
    pub rows: Vec<Vec<f64>>,
}

impl LedgerTable {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `(t, value)` pairs of a column, skipping missing entries.
    pub fn column(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().filter(|r| !r[i].is_nan()).map(|r| (r[0], r[i])).collect())
    }
}

pub fn parse(text: &str) -> Result<LedgerTable, String> {
    let mut lines = text.lines().enumerate();
    let mut meta = Vec::new();
    let header = loop {
        let (i, line) = lines.next().ok_or("no header row")?;
        match line.strip_prefix('#') {
            Some(m) => {
                let (k, v) = m.split_once('=').ok_or_else(|| format!("line {}: comment is not key=value", i + 1))?;
                meta.push((k.to_string(), v.to_string()));
            }
            None => break line,
        }
    };
    match meta.first() {
        Some((k, v)) if k == "schema" && v == SCHEMA => {}
        _ => return Err(format!("first line must be #schema={SCHEMA}")),
    }
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    if columns.first().map(String::as_str) != Some("t") {
        return Err("header must start with t".into());
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let row: Result<Vec<f64>, String> = line
            .split(',')
            .map(|x| if x.is_empty() { Ok(f64::NAN) } else { x.parse().map_err(|e| format!("line {}: {e}", i + 1)) })
            .collect();
        let row = row?;
        if row.len() != columns.len() {
            return Err(format!("line {}: {} fields, header has {}", i + 1, row.len(), columns.len()));
        }
        rows.push(row);
    }
    Ok(LedgerTable { meta, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use anisons_core::Grid;

    #[test]
    fn roundtrip_with_gaps() {
        let g = Grid::new(8, 8).unwrap();
        let mut l = NormLedger::new(&g, "abc");
        l.record(0.0, &[("energy", 1.0), ("x", 0.1)]).unwrap();
        l.record(0.5, &[("energy", 0.25)]).unwrap();
        l.record(1.0, &[("energy", 1.0 / 3.0), ("y", 7e-300)]).unwrap();
        let s = to_csv(&l, "cfg");
        assert!(s.starts_with("#schema=ledger-v1\n#grid=n_h=8,n_v=8,"));
        let t = parse(&s).unwrap();
        assert_eq!(t.meta("cutoff_hash"), Some("abc"));
        assert_eq!(t.meta("config_hash"), Some("cfg"));
        assert_eq!(t.columns, ["t", "energy", "x", "y"]);
        assert_eq!(t.column("energy").unwrap(), [(0.0, 1.0), (0.5, 0.25), (1.0, 1.0 / 3.0)]);
        assert_eq!(t.column("x").unwrap(), [(0.0, 0.1)]);
        assert_eq!(t.column("y").unwrap(), [(1.0, 7e-300)]);
        assert!(s.contains("\n5e-1,2.5e-1,,\n"));
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(parse("t,a\n0,1\n").is_err());
        assert!(parse("#schema=ledger-v0\nt,a\n").is_err());
        assert!(parse("#schema=ledger-v1\nt,a\n0,1,2\n").is_err());
        assert!(parse("#schema=ledger-v1\nx,a\n").is_err());
    }
}
