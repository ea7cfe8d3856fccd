//! In-memory process graphs for a control-flow subset of BPMN 2.0.
//!
//! A [`ProcessGraph`] holds the nodes (events, tasks, gateways) and the
//! sequence flows of a single `process` element. Graphs are built by
//! [`parse_bpmn`] or programmatically through [`ProcessGraph::new`], which
//! enforces the same structural invariants as the parser.

mod label;
mod parse;
mod serialize;
mod syntax;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use label::normalize_label;
pub use parse::parse_bpmn;
pub use serialize::serialize_bpmn;
pub use syntax::{validate_syntax, SyntaxReport, Violation, ViolationKind};

/// The supported node kinds. Anything else in a BPMN file is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    StartEvent,
    EndEvent,
    Task,
    ExclusiveGateway,
    ParallelGateway,
}

impl NodeKind {
    /// Local XML element name used by BPMN 2.0 for this kind.
    pub fn element_name(self) -> &'static str {
        match self {
            NodeKind::StartEvent => "startEvent",
            NodeKind::EndEvent => "endEvent",
            NodeKind::Task => "task",
            NodeKind::ExclusiveGateway => "exclusiveGateway",
            NodeKind::ParallelGateway => "parallelGateway",
        }
    }

    pub fn from_element_name(name: &str) -> Option<Self> {
        Some(match name {
            "startEvent" => NodeKind::StartEvent,
            "endEvent" => NodeKind::EndEvent,
            "task" => NodeKind::Task,
            "exclusiveGateway" => NodeKind::ExclusiveGateway,
            "parallelGateway" => NodeKind::ParallelGateway,
            _ => return None,
        })
    }

    pub fn is_gateway(self) -> bool {
        matches!(self, NodeKind::ExclusiveGateway | NodeKind::ParallelGateway)
    }

    pub fn is_event(self) -> bool {
        matches!(self, NodeKind::StartEvent | NodeKind::EndEvent)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.element_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Raw label as written in the model; may be empty.
    pub label: String,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind,
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFlow {
    pub id: String,
    pub source: String,
    pub target: String,
}

impl SequenceFlow {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            source: source.into(),
            target: target.into(),
        }
    }
}

/// Errors raised while building or parsing a process graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("unsupported BPMN element `{0}`")]
    UnsupportedElement(String),
    #[error("sequence flow `{flow}` references unknown node `{missing}`")]
    DanglingReference { flow: String, missing: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("element `{element}` is missing required attribute `{attribute}`")]
    MissingAttribute { element: String, attribute: String },
}

/// A directed attributed graph of BPMN nodes and sequence flows.
///
/// Node ids are unique, flow ids are unique and every flow endpoint names an
/// existing node. Document order is preserved in `nodes` and `flows`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessGraph {
    id: String,
    nodes: Vec<Node>,
    flows: Vec<SequenceFlow>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl ProcessGraph {
    pub fn new(
        id: impl Into<String>,
        nodes: Vec<Node>,
        flows: Vec<SequenceFlow>,
    ) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node.id.is_empty() {
                return Err(ModelError::MissingAttribute {
                    element: node.kind.element_name().to_string(),
                    attribute: "id".to_string(),
                });
            }
            if index.insert(node.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateId(node.id.clone()));
            }
        }
        let mut flow_ids = HashSet::with_capacity(flows.len());
        for flow in &flows {
            if flow.id.is_empty() {
                return Err(ModelError::MissingAttribute {
                    element: "sequenceFlow".to_string(),
                    attribute: "id".to_string(),
                });
            }
            // Flow ids share the XML id space with nodes.
            if index.contains_key(&flow.id) || !flow_ids.insert(flow.id.as_str()) {
                return Err(ModelError::DuplicateId(flow.id.clone()));
            }
            for endpoint in [&flow.source, &flow.target] {
                if !index.contains_key(endpoint) {
                    return Err(ModelError::DanglingReference {
                        flow: flow.id.clone(),
                        missing: endpoint.clone(),
                    });
                }
            }
        }
        Ok(Self {
            id: id.into(),
            nodes,
            flows,
            index,
        })
    }

    /// A graph with no nodes and no flows.
    pub fn empty(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            nodes: Vec::new(),
            flows: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn flows(&self) -> &[SequenceFlow] {
        &self.flows
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    /// Position of a node in `nodes()`.
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Flows as `(source index, target index)` pairs, in document order.
    pub fn edge_indices(&self) -> Vec<(usize, usize)> {
        self.flows
            .iter()
            .map(|f| (self.index[&f.source], self.index[&f.target]))
            .collect()
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }
}

impl<'de> Deserialize<'de> for ProcessGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            id: String,
            nodes: Vec<Node>,
            flows: Vec<SequenceFlow>,
        }
        let raw = Raw::deserialize(deserializer)?;
        ProcessGraph::new(raw.id, raw.nodes, raw.flows).map_err(serde::de::Error::custom)
    }
}
