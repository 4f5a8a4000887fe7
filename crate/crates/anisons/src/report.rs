//! JSON and JUnit XML renderings of verifier reports.

use std::fmt::Write as _;

use anisons_core::verify::{Report, Witness};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyBundle {
    pub config_hash: String,
    pub cutoff_hash: String,
    pub passed: bool,
    pub failures: usize,
    pub reports: Vec<Report>,
}

impl VerifyBundle {
    pub fn new(config_hash: &str, cutoff_hash: &str, reports: Vec<Report>) -> Self {
        let failures = reports.iter().map(|r| r.failures().count()).sum();
        Self {
            config_hash: config_hash.to_string(),
            cutoff_hash: cutoff_hash.to_string(),
            passed: failures == 0,
            failures,
            reports,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_junit(&self) -> String {
        let tests: usize = self.reports.iter().map(|r| r.checks.len() + r.profiles.len()).sum();
        let mut x = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(x, "<testsuites name=\"anisons verify\" tests=\"{tests}\" failures=\"{}\">", self.failures);
        for r in &self.reports {
            let fails = r.failures().count();
            let _ = writeln!(
                x,
                "  <testsuite name=\"{}\" tests=\"{}\" failures=\"{fails}\">",
                esc(&r.suite),
                r.checks.len() + r.profiles.len()
            );
            x.push_str("    <properties>\n");
            let mut props = vec![("config_hash", self.config_hash.clone()), ("cutoff_hash", r.cutoff_hash.clone())];
            if let Some((h, v)) = r.grid {
                props.push(("grid", format!("{h}x{h}x{v}")));
            }
            if let Some(s) = r.seed {
                props.push(("seed", s.to_string()));
            }
            props.extend(r.notes.iter().map(|n| ("note", n.clone())));
            for (k, v) in props {
                let _ = writeln!(x, "      <property name=\"{k}\" value=\"{}\"/>", esc(&v));
            }
            x.push_str("    </properties>\n");
            for c in &r.checks {
                let _ = write!(x, "    <testcase classname=\"{}\" name=\"{}\">", esc(&r.suite), esc(&c.name));
                let detail = format!("value={:e} bound={:e}{}", c.value, c.bound, witness(&c.witness));
                if c.pass {
                    let _ = write!(x, "<system-out>{}</system-out>", esc(&detail));
                } else {
                    let _ = write!(
                        x,
                        "<failure message=\"{}\">{}</failure>",
                        esc(&format!("{:e} exceeds {:e}", c.value, c.bound)),
                        esc(&detail)
                    );
                }
                x.push_str("</testcase>\n");
            }
            for p in &r.profiles {
                let detail = format!("samples={} max={:e} mean={:e}{}", p.samples, p.max, p.mean, witness(&p.witness));
                let _ = writeln!(
                    x,
                    "    <testcase classname=\"{}.profile\" name=\"{}\"><system-out>{}</system-out></testcase>",
                    esc(&r.suite),
                    esc(&p.name),
                    esc(&detail)
                );
            }
            x.push_str("  </testsuite>\n");
        }
        x.push_str("</testsuites>\n");
        x
    }
}

fn witness(w: &Witness) -> String {
    let mut s = String::new();
    if let Some(v) = w.seed {
        let _ = write!(s, " seed={v}");
    }
    if let Some(v) = w.shell {
        let _ = write!(s, " shell={v}");
    }
    if let Some([a, b, c]) = w.mode {
        let _ = write!(s, " mode=({a},{b},{c})");
    }
    if let Some(v) = w.at {
        let _ = write!(s, " at={v:e}");
    }
    if let Some(v) = w.layer {
        let _ = write!(s, " layer={v}");
    }
    s
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use anisons_core::lp::{CutoffPair, CutoffProfile};
    use anisons_core::verify::verify_partition;

    #[test]
    fn junit_counts_and_escapes() {
        let good = verify_partition(&CutoffPair::standard(), 1000).unwrap();
        let bad =
            verify_partition(&CutoffPair::new(CutoffProfile { phi_scale: 0.99, ..Default::default() }).unwrap(), 1000)
                .unwrap();
        let n_bad = bad.failures().count();
        assert!(n_bad > 0);
        let b = VerifyBundle::new("cfg", "cut", vec![good.clone(), bad]);
        assert!(!b.passed);
        assert_eq!(b.failures, n_bad);
        let x = b.to_junit();
        assert_eq!(x.matches("<failure ").count(), n_bad);
        assert!(x.contains("<property name=\"config_hash\" value=\"cfg\"/>"));
        assert_eq!(x.matches("<testsuite ").count(), 2);
        assert_eq!(esc("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
        let j: serde_json::Value = serde_json::from_str(&b.to_json()).unwrap();
        assert_eq!(j["config_hash"], "cfg");
        assert_eq!(j["reports"][0]["suite"], good.suite);
    }
}
