use std::fmt::Write;

use super::ProcessGraph;

const BPMN_NS: &str = "http://www.omg.org/spec/BPMN/20100524/MODEL";

/// Canonical BPMN serialization of a graph.
///
/// Nodes are emitted sorted by id, followed by flows sorted by id, with
/// two-space indentation. Parsing the output yields an equivalent graph.
pub fn serialize_bpmn(graph: &ProcessGraph) -> String {
    let mut nodes: Vec<_> = graph.nodes().iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let mut flows: Vec<_> = graph.flows().iter().collect();
    flows.sort_by(|a, b| a.id.cmp(&b.id));

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<definitions xmlns=\"{BPMN_NS}\" id=\"definitions\">");
    let _ = writeln!(out, "  <process id=\"{}\">", escape(graph.id()));
    for node in nodes {
        let _ = write!(
            out,
            "    <{} id=\"{}\"",
            node.kind.element_name(),
            escape(&node.id)
        );
        if !node.label.is_empty() {
            let _ = write!(out, " name=\"{}\"", escape(&node.label));
        }
        out.push_str("/>\n");
    }
    for flow in flows {
        let _ = writeln!(
            out,
            "    <sequenceFlow id=\"{}\" sourceRef=\"{}\" targetRef=\"{}\"/>",
            escape(&flow.id),
            escape(&flow.source),
            escape(&flow.target)
        );
    }
    out.push_str("  </process>\n</definitions>\n");
    out
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // Attribute-value normalization would turn these into spaces.
            '\t' => out.push_str("&#x9;"),
            '\n' => out.push_str("&#xA;"),
            '\r' => out.push_str("&#xD;"),
            c => out.push(c),
        }
    }
    out
}
