//! Text and JSON-lines reports. Both are deterministic; timing goes to stderr.

use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Jsonl,
}

#[derive(Default)]
pub struct Report {
    records: Vec<Value>,
    text: Vec<String>,
    failed: bool,
}

fn table_json(t: &BTreeMap<i64, usize>) -> Value {
    Value::Object(t.iter().map(|(d, b)| (d.to_string(), json!(b))).collect::<Map<_, _>>())
}

pub fn table_text(t: &BTreeMap<i64, usize>) -> String {
    let parts: Vec<String> = t.iter().map(|(d, b)| format!("{d}:{b}")).collect();
    format!("{{{}}}", parts.join(", "))
}

impl Report {
    pub fn meta(&mut self, command: &str, fields: Vec<(&str, Value)>) {
        let mut m = Map::new();
        m.insert("record".into(), json!("meta"));
        m.insert("command".into(), json!(command));
        let mut line = format!("command {command}");
        for (k, v) in fields {
            let shown = match &v {
                Value::String(s) => s.clone(),
                Value::Array(a) if a.len() == 2 => format!("{}..{}", a[0], a[1]),
                other => other.to_string(),
            };
            line.push_str(&format!("  {k} {shown}"));
            m.insert(k.into(), v);
        }
        self.records.push(Value::Object(m));
        self.text.push(line);
    }

    pub fn betti(&mut self, table: &str, t: &BTreeMap<i64, usize>) {
        self.text.push(format!("betti {table}:"));
        if t.is_empty() {
            self.text.push("  (zero on the window)".into());
        }
        for (d, b) in t {
            self.text.push(format!("  deg {d:>3}: {b}"));
            self.records.push(json!({"record": "betti", "table": table, "degree": d, "dim": b}));
        }
    }

    pub fn verdict(&mut self, name: &str, ok: bool, failing: &[i64]) {
        self.failed |= !ok;
        let mark = if ok { "PASS" } else { "FAIL" };
        let tail = if failing.is_empty() { String::new() } else { format!(" (failing degrees {failing:?})") };
        self.text.push(format!("verdict {name}: {mark}{tail}"));
        self.records.push(json!({"record": "verdict", "name": name, "ok": ok, "failing": failing}));
    }

    pub fn stage(&mut self, table: &str, p: i64, betti: &BTreeMap<i64, usize>, map_rank: &BTreeMap<i64, usize>) {
        self.text.push(format!("  stage p={p}: betti {} map rank {}", table_text(betti), table_text(map_rank)));
        self.records.push(json!({
            "record": "stage", "table": table, "p": p, "betti": table_json(betti), "map_rank": table_json(map_rank)
        }));
    }

    pub fn stabilization(&mut self, table: &str, p: i64, agree: bool, composite_rank: &BTreeMap<i64, usize>) {
        let rel = if agree { "=" } else { "!=" };
        self.text.push(format!(
            "stabilization {table}: p = {p}, rank M_{p} {rel} rank M_{q} {rel} rank M_{q}M_{p} = {}",
            table_text(composite_rank),
            q = p + 1
        ));
        self.records.push(json!({
            "record": "stabilization", "table": table, "p": p, "next": p + 1, "agree": agree,
            "composite_rank": table_json(composite_rank)
        }));
    }

    pub fn note(&mut self, key: &str, v: Value) {
        let shown = match &v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        self.text.push(format!("{key}: {shown}"));
        self.records.push(json!({"record": "note", "key": key, "value": v}));
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn render(&self, format: Format, code: i32) -> String {
        let mut s = String::new();
        match format {
            Format::Text => {
                for l in &self.text {
                    s.push_str(l);
                    s.push('\n');
                }
                s.push_str(&format!("exit {code}\n"));
            }
            Format::Jsonl => {
                for r in &self.records {
                    s.push_str(&r.to_string());
                    s.push('\n');
                }
                s.push_str(&json!({"record": "exit", "code": code}).to_string());
                s.push('\n');
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_record_per_degree() {
        let mut r = Report::default();
        r.betti("H", &BTreeMap::from([(1, 1)]));
        let out = r.render(Format::Jsonl, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], r#"{"degree":1,"dim":1,"record":"betti","table":"H"}"#);
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn failing_verdict_lists_degrees() {
        let mut r = Report::default();
        r.verdict("quasi-iso", false, &[2]);
        assert!(r.failed());
        assert!(r.render(Format::Jsonl, 1).contains(r#""failing":[2]"#));
    }
}
