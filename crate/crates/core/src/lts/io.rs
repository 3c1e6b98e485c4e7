use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{LabelSet, LtsError, Presheaf};

/// On-disk form: `{"labels":[...],"states":[...],"edges":{"a":[{"id":..,"src":..,"tgt":..}]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafFile {
    pub labels: Vec<String>,
    pub states: Vec<String>,
    pub edges: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeEntry {
    id: String,
    src: String,
    tgt: String,
}

pub fn to_json_value(x: &Presheaf) -> serde_json::Value {
    let labels = x.labels();
    let mut edges = serde_json::Map::new();
    for l in labels.iter() {
        let list: Vec<serde_json::Value> = x
            .edges_with_label(l)
            .iter()
            .map(|&e| {
                let d = x.edge(e);
                serde_json::json!({"id": d.id, "src": x.state_name(d.src), "tgt": x.state_name(d.tgt)})
            })
            .collect();
        edges.insert(labels.name(l).to_string(), serde_json::Value::Array(list));
    }
    serde_json::json!({
        "labels": labels.names(),
        "states": x.state_names(),
        "edges": edges,
    })
}

/// One presheaf as a single JSON line (no trailing newline).
pub fn to_json(x: &Presheaf) -> String {
    serde_json::to_string(&to_json_value(x)).expect("presheaf serializes")
}

pub fn from_json(text: &str) -> Result<Presheaf, LtsError> {
    let file: PresheafFile = serde_json::from_str(text).map_err(|e| LtsError::Format(e.to_string()))?;
    let labels = Arc::new(LabelSet::new(file.labels)?);
    from_file(labels, file.states, file.edges)
}

/// Reads a presheaf over an existing label set; the file must list the
/// same labels in the same order.
pub fn from_json_with_labels(labels: Arc<LabelSet>, text: &str) -> Result<Presheaf, LtsError> {
    let file: PresheafFile = serde_json::from_str(text).map_err(|e| LtsError::Format(e.to_string()))?;
    if file.labels != labels.names() {
        return Err(LtsError::Format(format!("labels {:?} differ from {:?}", file.labels, labels.names())));
    }
    from_file(labels, file.states, file.edges)
}

/// Reads one presheaf per non-empty line.
pub fn from_json_lines(text: &str) -> Result<Vec<Presheaf>, LtsError> {
    text.lines().filter(|l| !l.trim().is_empty()).map(from_json).collect()
}

pub(crate) fn from_file(
    labels: Arc<LabelSet>,
    states: Vec<String>,
    edges: serde_json::Map<String, serde_json::Value>,
) -> Result<Presheaf, LtsError> {
    let mut b = Presheaf::builder(labels);
    for s in states {
        b.add_state(s);
    }
    for (label, list) in edges {
        let list: Vec<EdgeEntry> = serde_json::from_value(list).map_err(|e| LtsError::Format(e.to_string()))?;
        for e in list {
            b.add_edge(label.clone(), e.id, e.src, e.tgt);
        }
    }
    b.build()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: states as nodes, edges labelled `id:a`.
pub fn to_dot(x: &Presheaf) -> String {
    let mut out = String::from("digraph lts {\n");
    for s in x.state_names() {
        let _ = writeln!(out, "  \"{}\";", dot_escape(s));
    }
    for d in x.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            dot_escape(x.state_name(d.src)),
            dot_escape(x.state_name(d.tgt)),
            dot_escape(&format!("{}:{}", d.id, x.labels().name(d.label)))
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_label_order() {
        let labels = Arc::new(LabelSet::new(["tau", "a"]).unwrap());
        let x = Presheaf::builder(labels)
            .state("x")
            .state("y")
            .edge("a", "g", "y", "y")
            .edge("tau", "e", "x", "y")
            .build()
            .unwrap();
        let line = to_json(&x);
        assert!(!line.contains('\n'));
        assert!(line.starts_with("{\"labels\":[\"tau\",\"a\"]"));
        assert_eq!(from_json(&line).unwrap(), x);
        let two = format!("{line}\n\n{line}\n");
        assert_eq!(from_json_lines(&two).unwrap().len(), 2);
    }

    #[test]
    fn malformed_input_is_a_format_error() {
        assert!(matches!(from_json("{\"labels\":[\"a\"]}"), Err(LtsError::Format(_))));
        let dangling = r#"{"labels":["a"],"states":["x"],"edges":{"a":[{"id":"e","src":"x","tgt":"y"}]}}"#;
        assert_eq!(from_json(dangling).unwrap_err(), LtsError::DanglingEdge("e".into()));
    }

    #[test]
    fn dot_lists_nodes_and_labelled_edges() {
        let labels = Arc::new(LabelSet::new(["a"]).unwrap());
        let x = Presheaf::builder(labels).state("x").edge("a", "e", "x", "x").build().unwrap();
        let dot = to_dot(&x);
        assert!(dot.contains("\"x\" -> \"x\" [label=\"e:a\"]"));
    }
}
