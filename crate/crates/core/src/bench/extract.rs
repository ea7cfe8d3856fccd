//! Pull a BPMN document out of free-form model output.

use crate::bpmn_model::{parse_bpmn, ModelError, ProcessGraph};

/// First well-formed XML document in `text` that parses as a supported
/// BPMN model. Prose and markdown fences around it are ignored. Returns
/// the last parse error when nothing qualifies.
pub fn extract_xml_document(text: &str) -> Result<ProcessGraph, ModelError> {
    let mut last_error = ModelError::MalformedXml("output contains no XML document".into());
    for (start, _) in text.match_indices('<') {
        let rest = &text[start..];
        let Some(root) = root_name(rest) else {
            continue;
        };
        for candidate in closing_positions(rest, root) {
            match parse_bpmn(&rest[..candidate]) {
                Ok(graph) => return Ok(graph),
                Err(e) => last_error = e,
            }
        }
    }
    Err(last_error)
}

/// Name of the root element of a document starting at `s`. A leading
/// XML declaration is skipped; only `definitions` and `process` roots count.
fn root_name(s: &str) -> Option<&str> {
    let body = if s.starts_with("<?xml") {
        let after = s.find("?>")? + 2;
        let lt = s[after..].find('<')? + after;
        &s[lt..]
    } else {
        s
    };
    let name_end = body[1..]
        .find(|c: char| c.is_whitespace() || c == '>' || c == '/')
        .map(|i| i + 1)?;
    let name = &body[1..name_end];
    let local = name.rsplit(':').next().unwrap_or(name);
    matches!(local, "definitions" | "process").then_some(name)
}

/// Candidate end offsets: just after each `</root>` closing tag, plus the
/// first tag end when the root is self-closing.
fn closing_positions(s: &str, root: &str) -> Vec<usize> {
    let mut ends = Vec::new();
    let close = format!("</{root}");
    for (i, _) in s.match_indices(&close) {
        if let Some(gt) = s[i..].find('>') {
            ends.push(i + gt + 1);
        }
    }
    let open = format!("<{root}");
    if let Some(o) = s.find(&open) {
        if let Some(gt) = s[o..].find('>') {
            if s[o..o + gt].ends_with('/') {
                ends.push(o + gt + 1);
            }
        }
    }
    ends.sort_unstable();
    ends.dedup();
    ends
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"><process id="p">
<startEvent id="s"/><endEvent id="e"/><sequenceFlow id="f" sourceRef="s" targetRef="e"/>
</process></definitions>"#;

    #[test]
    fn bare_document() {
        assert_eq!(extract_xml_document(DOC).unwrap().node_count(), 2);
    }

    #[test]
    fn wrapped_in_prose_and_fences() {
        let text = format!("Sure! Here is the model:\n```xml\n{DOC}\n```\nLet me know if <b>anything</b> else.");
        assert_eq!(extract_xml_document(&text).unwrap().id(), "p");
    }

    #[test]
    fn skips_broken_first_attempt() {
        let text = format!("<process id=\"x\"><task id=\"t\"></process>\n{DOC}");
        assert_eq!(extract_xml_document(&text).unwrap().id(), "p");
    }

    #[test]
    fn prefixed_root() {
        let text = r#"out: <bpmn:process xmlns:bpmn="http://www.omg.org/spec/BPMN/20100524/MODEL" id="q"><bpmn:startEvent id="s"/></bpmn:process> trailing"#;
        assert_eq!(extract_xml_document(text).unwrap().id(), "q");
    }

    #[test]
    fn nothing_usable() {
        assert!(extract_xml_document("I cannot help with that.").is_err());
        assert!(extract_xml_document("<process id=\"p\"><task").is_err());
    }
}
