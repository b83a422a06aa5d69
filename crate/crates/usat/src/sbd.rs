//! System-breakdown tree of the system configuration.
//!
//! Components and subsystems are arranged as a single-rooted tree. The walk
//! order everywhere (listing, DOT export, coverage) is depth-first from the
//! root with children in input order, so all derived text is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    System,
    Subsystem,
    Component,
}

impl NodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeKind::System => "system",
            NodeKind::Subsystem => "subsystem",
            NodeKind::Component => "component",
        }
    }

    pub fn parse(text: &str) -> Option<NodeKind> {
        match text {
            "system" => Some(NodeKind::System),
            "subsystem" => Some(NodeKind::Subsystem),
            "component" => Some(NodeKind::Component),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One component or subsystem in the breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct SbdNode {
    pub id: String,
    pub name: String,
    pub description: String,
    pub parent: Option<String>,
    pub kind: NodeKind,
}

/// A validated breakdown tree. Construct via [`build_sbd`].
#[derive(Debug, Clone, PartialEq)]
pub struct SystemBreakdown {
    nodes: Vec<SbdNode>,
    root: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SbdError {
    #[error("breakdown requires at least one node")]
    NoNodes,
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("multiple root nodes: `{0}` and `{1}`")]
    MultipleRoots(String, String),
    #[error("node `{node}` references missing parent `{parent}`")]
    DanglingParent { node: String, parent: String },
    #[error("cycle detected involving node `{0}`")]
    CycleDetected(String),
    #[error("root node `{0}` must have kind `system`")]
    RootNotSystem(String),
    #[error("unknown node id `{0}`")]
    UnknownId(String),
}

/// Validates `nodes` as a tree, preserving the given child order.
pub fn build_sbd(nodes: Vec<SbdNode>) -> Result<SystemBreakdown, SbdError> {
    if nodes.is_empty() {
        return Err(SbdError::NoNodes);
    }

    let mut seen = BTreeSet::new();
    for node in &nodes {
        if !seen.insert(node.id.as_str()) {
            return Err(SbdError::DuplicateId(node.id.clone()));
        }
    }

    let mut root: Option<&SbdNode> = None;
    for node in &nodes {
        match &node.parent {
            None => {
                if let Some(existing) = root {
                    return Err(SbdError::MultipleRoots(
                        existing.id.clone(),
                        node.id.clone(),
                    ));
                }
                root = Some(node);
            }
            Some(parent) => {
                if !seen.contains(parent.as_str()) {
                    return Err(SbdError::DanglingParent {
                        node: node.id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
    }

    // With unique ids and resolving parents, a missing root means every node
    // sits on a parent chain that loops.
    let root = match root {
        Some(node) => node.id.clone(),
        None => return Err(SbdError::CycleDetected(nodes[0].id.clone())),
    };

    let breakdown = SystemBreakdown { nodes, root };
    let reachable: BTreeSet<&str> = breakdown.tree_order().iter().map(|n| n.id.as_str()).collect();
    if let Some(stray) = breakdown
        .nodes
        .iter()
        .find(|n| !reachable.contains(n.id.as_str()))
    {
        return Err(SbdError::CycleDetected(stray.id.clone()));
    }
    let root_node = breakdown.node(&breakdown.root).expect("root exists");
    if root_node.kind != NodeKind::System {
        return Err(SbdError::RootNotSystem(breakdown.root));
    }
    Ok(breakdown)
}

impl SystemBreakdown {
    pub fn root(&self) -> &str {
        &self.root
    }

    /// Nodes in their original input order.
    pub fn nodes(&self) -> &[SbdNode] {
        &self.nodes
    }

    /// Discards the tree structure, yielding the nodes that rebuild it.
    pub fn flatten(self) -> Vec<SbdNode> {
        self.nodes
    }

    pub fn contains(&self, id: &str) -> bool {
        self.node(id).is_some()
    }

    pub fn node(&self, id: &str) -> Option<&SbdNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn children(&self, id: &str) -> Vec<&SbdNode> {
        self.nodes
            .iter()
            .filter(|n| n.parent.as_deref() == Some(id))
            .collect()
    }

    pub fn is_leaf(&self, id: &str) -> bool {
        !self.nodes.iter().any(|n| n.parent.as_deref() == Some(id))
    }

    /// Depth-first preorder from the root, children in input order.
    pub fn tree_order(&self) -> Vec<&SbdNode> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root.as_str()];
        while let Some(id) = stack.pop() {
            if let Some(node) = self.node(id) {
                out.push(node);
                let children = self.children(id);
                for child in children.iter().rev() {
                    stack.push(child.id.as_str());
                }
            }
        }
        out
    }

    /// Node depth from the root (root is 0).
    pub fn depth(&self, id: &str) -> usize {
        let mut depth = 0;
        let mut current = self.node(id).and_then(|n| n.parent.as_deref());
        while let Some(parent) = current {
            depth += 1;
            current = self.node(parent).and_then(|n| n.parent.as_deref());
        }
        depth
    }
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the tree as deterministic DOT text: one node statement per node
/// labeled `<id>\n<name>` in input order, then one edge per parent-child link
/// in input order.
pub fn to_dot(sbd: &SystemBreakdown) -> String {
    let mut out = String::from("digraph sbd {\n    node [shape=box];\n");
    for node in sbd.nodes() {
        out.push_str(&format!(
            "    \"{}\" [label=\"{}\\n{}\"];\n",
            dot_escape(&node.id),
            dot_escape(&node.id),
            dot_escape(&node.name)
        ));
    }
    for node in sbd.nodes() {
        if let Some(parent) = &node.parent {
            out.push_str(&format!(
                "    \"{}\" -> \"{}\";\n",
                dot_escape(parent),
                dot_escape(&node.id)
            ));
        }
    }
    out.push_str("}\n");
    out
}

/// Returns the leaf nodes no parameter points at, in tree order. These are
/// the components the factor walk has not covered yet. Interior nodes are
/// organizational and not reported.
///
/// `component_refs` are the `component_ref` values of the document's
/// parameters; each must resolve to a node.
pub fn coverage_check<'a>(
    sbd: &SystemBreakdown,
    component_refs: impl IntoIterator<Item = &'a str>,
) -> Result<Vec<String>, SbdError> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for reference in component_refs {
        if !sbd.contains(reference) {
            return Err(SbdError::UnknownId(reference.to_string()));
        }
        *counts.entry(reference).or_default() += 1;
    }
    Ok(sbd
        .tree_order()
        .into_iter()
        .filter(|n| sbd.is_leaf(&n.id) && !counts.contains_key(n.id.as_str()))
        .map(|n| n.id.clone())
        .collect())
}
