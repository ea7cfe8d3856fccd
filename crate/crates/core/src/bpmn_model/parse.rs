use roxmltree::{Document, Node as XmlNode};

use super::{ModelError, Node, NodeKind, ProcessGraph, SequenceFlow};

/// Children that carry no control-flow meaning and are skipped wherever they appear.
const IGNORED: &[&str] = &["documentation", "extensionElements"];

/// Parse a BPMN 2.0 document restricted to the supported control-flow subset.
///
/// Elements are matched by local name, so any namespace prefix is accepted.
/// Diagram interchange sections (`BPMNDiagram`) are skipped. Everything else
/// outside the subset is rejected with [`ModelError::UnsupportedElement`].
pub fn parse_bpmn(xml_text: &str) -> Result<ProcessGraph, ModelError> {
    let doc = Document::parse(xml_text).map_err(|e| ModelError::MalformedXml(e.to_string()))?;
    let root = doc.root_element();
    let process = match root.tag_name().name() {
        "process" => root,
        "definitions" => find_process(root)?,
        other => return Err(ModelError::UnsupportedElement(other.to_string())),
    };

    let mut nodes = Vec::new();
    let mut flows = Vec::new();
    for child in process.children().filter(XmlNode::is_element) {
        let name = child.tag_name().name();
        if let Some(kind) = NodeKind::from_element_name(name) {
            check_children(child, &["incoming", "outgoing"])?;
            nodes.push(Node::new(
                required(child, "id")?,
                kind,
                child.attribute("name").unwrap_or_default(),
            ));
        } else if name == "sequenceFlow" {
            check_children(child, &["conditionExpression"])?;
            flows.push(SequenceFlow::new(
                required(child, "id")?,
                required(child, "sourceRef")?,
                required(child, "targetRef")?,
            ));
        } else if !IGNORED.contains(&name) {
            return Err(ModelError::UnsupportedElement(name.to_string()));
        }
    }
    ProcessGraph::new(process.attribute("id").unwrap_or_default(), nodes, flows)
}

fn find_process<'a, 'i>(definitions: XmlNode<'a, 'i>) -> Result<XmlNode<'a, 'i>, ModelError> {
    let mut found = None;
    for child in definitions.children().filter(XmlNode::is_element) {
        match child.tag_name().name() {
            "process" => {
                if found.replace(child).is_some() {
                    // Several processes imply a collaboration, which is outside the subset.
                    return Err(ModelError::UnsupportedElement("process".to_string()));
                }
            }
            "BPMNDiagram" => {}
            name if IGNORED.contains(&name) => {}
            name => return Err(ModelError::UnsupportedElement(name.to_string())),
        }
    }
    found.ok_or_else(|| ModelError::MalformedXml("document contains no process element".into()))
}

fn check_children(element: XmlNode<'_, '_>, allowed: &[&str]) -> Result<(), ModelError> {
    for child in element.children().filter(XmlNode::is_element) {
        let name = child.tag_name().name();
        if !allowed.contains(&name) && !IGNORED.contains(&name) {
            return Err(ModelError::UnsupportedElement(name.to_string()));
        }
    }
    Ok(())
}

fn required(element: XmlNode<'_, '_>, attribute: &str) -> Result<String, ModelError> {
    match element.attribute(attribute) {
        Some(v) if !v.is_empty() => Ok(v.to_string()),
        _ => Err(ModelError::MissingAttribute {
            element: element.tag_name().name().to_string(),
            attribute: attribute.to_string(),
        }),
    }
}
