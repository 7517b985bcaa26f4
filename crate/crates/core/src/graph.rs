//! View-model for the ontology visualization pane.
//!
//! [`GraphState`] is a plain value: every operation takes a state and returns
//! its successor without touching the input. Visibility is tracked through
//! provenance: each non-root node remembers which expanded nodes introduced
//! it, and disappears once all of them have been collapsed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{Direction, InstanceId, Ontology, OntologyError, Relation};

pub const DEFAULT_TREE_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("node `{0}` is not visible")]
    NodeNotVisible(String),
    #[error("invalid graph state: {0}")]
    InvalidState(String),
}

impl From<OntologyError> for GraphError {
    fn from(e: OntologyError) -> Self {
        match e {
            OntologyError::UnknownInstance(id) => GraphError::UnknownInstance(id),
            other => GraphError::InvalidState(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeDirection {
    Under,
    Above,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", content = "node", rename_all = "snake_case")]
pub enum Layout {
    #[default]
    Radial,
    TreeUnder(InstanceId),
    TreeAbove(InstanceId),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphState {
    pub visible: BTreeSet<InstanceId>,
    /// Induced subgraph: every stored relation with both endpoints visible.
    pub edges: BTreeSet<Relation>,
    pub roots: Vec<InstanceId>,
    pub expanded: BTreeSet<InstanceId>,
    /// Expansion sources of every visible non-root node.
    pub provenance: BTreeMap<InstanceId, BTreeSet<InstanceId>>,
    pub focus: Option<InstanceId>,
    pub layout: Layout,
}

fn induced_edges(o: &Ontology, visible: &BTreeSet<InstanceId>) -> BTreeSet<Relation> {
    let mut edges = BTreeSet::new();
    for id in visible {
        if let Ok(out) = o.neighbors(id.as_str(), Direction::Out) {
            for n in out.into_iter().filter(|n| visible.contains(&n.instance.id)) {
                edges.insert(Relation::new(
                    id.clone(),
                    n.predicate,
                    n.instance.id.clone(),
                ));
            }
        }
    }
    edges
}

/// Terms plus their direct neighbors, each term expanded and the first one
/// focused.
pub fn initial_graph(o: &Ontology, terms: &[InstanceId]) -> Result<GraphState, GraphError> {
    let mut state = GraphState::default();
    for t in terms {
        o.require_instance(t.as_str())?;
        if !state.roots.contains(t) {
            state.roots.push(t.clone());
            state.visible.insert(t.clone());
        }
    }
    for t in state.roots.clone() {
        state.expand(o, &t)?;
    }
    state.focus = state.roots.first().cloned();
    state.edges = induced_edges(o, &state.visible);
    Ok(state)
}

impl GraphState {
    pub fn is_root(&self, id: &InstanceId) -> bool {
        self.roots.contains(id)
    }

    fn require_visible(&self, node: &str) -> Result<InstanceId, GraphError> {
        self.visible
            .get(node)
            .cloned()
            .ok_or_else(|| GraphError::NodeNotVisible(node.to_string()))
    }

    fn expand(&mut self, o: &Ontology, node: &InstanceId) -> Result<(), GraphError> {
        for n in o.adjacent(node.as_str())? {
            let id = &n.id;
            self.visible.insert(id.clone());
            if id != node && !self.is_root(id) {
                self.provenance
                    .entry(id.clone())
                    .or_default()
                    .insert(node.clone());
            }
        }
        self.expanded.insert(node.clone());
        Ok(())
    }

    fn collapse(&mut self, node: &InstanceId) {
        self.expanded.remove(node);
        let mut withdrawn = vec![node.clone()];
        while let Some(source) = withdrawn.pop() {
            let orphaned: Vec<InstanceId> = self
                .provenance
                .iter_mut()
                .filter_map(|(id, sources)| {
                    (sources.remove(&source) && sources.is_empty()).then(|| id.clone())
                })
                .collect();
            for id in orphaned {
                self.provenance.remove(&id);
                self.visible.remove(&id);
                // an orphan that was expanded withdraws its own contributions
                if self.expanded.remove(&id) {
                    withdrawn.push(id.clone());
                }
                if self.focus.as_ref() == Some(&id) {
                    self.focus = Some(node.clone());
                }
            }
        }
    }

    /// Expands `node` if collapsed, collapses it otherwise.
    pub fn toggle(&self, o: &Ontology, node: &str) -> Result<GraphState, GraphError> {
        let node = self.require_visible(node)?;
        let mut next = self.clone();
        if next.expanded.contains(&node) {
            next.collapse(&node);
        } else {
            next.expand(o, &node)?;
        }
        next.edges = induced_edges(o, &next.visible);
        Ok(next)
    }

    /// Focuses `node` and switches back to the radial layout.
    pub fn center(&self, node: &str) -> Result<GraphState, GraphError> {
        let node = self.require_visible(node)?;
        Ok(GraphState {
            focus: Some(node),
            layout: Layout::Radial,
            ..self.clone()
        })
    }

    /// Replaces the view with the nodes reachable from `node` over outgoing
    /// (`Under`) or incoming (`Above`) relations, breadth first, at most
    /// `depth` hops away.
    pub fn tree(
        &self,
        o: &Ontology,
        node: &str,
        direction: TreeDirection,
        depth: usize,
    ) -> Result<GraphState, GraphError> {
        let node = self.require_visible(node)?;
        let dir = match direction {
            TreeDirection::Under => Direction::Out,
            TreeDirection::Above => Direction::In,
        };

        let mut level: BTreeMap<InstanceId, usize> = BTreeMap::from([(node.clone(), 0)]);
        let mut provenance: BTreeMap<InstanceId, BTreeSet<InstanceId>> = BTreeMap::new();
        let mut expanded = BTreeSet::new();
        let mut queue = VecDeque::from([node.clone()]);
        while let Some(cur) = queue.pop_front() {
            let d = level[&cur];
            if d >= depth {
                continue;
            }
            expanded.insert(cur.clone());
            for n in o.neighbors(cur.as_str(), dir)? {
                let id = &n.instance.id;
                match level.get(id) {
                    None => {
                        level.insert(id.clone(), d + 1);
                        provenance
                            .entry(id.clone())
                            .or_default()
                            .insert(cur.clone());
                        queue.push_back(id.clone());
                    }
                    // every parent on the previous BFS level counts
                    Some(&dn) if dn == d + 1 => {
                        provenance
                            .entry(id.clone())
                            .or_default()
                            .insert(cur.clone());
                    }
                    Some(_) => {}
                }
            }
        }

        let visible: BTreeSet<InstanceId> = level.into_keys().collect();
        Ok(GraphState {
            edges: induced_edges(o, &visible),
            visible,
            roots: vec![node.clone()],
            expanded,
            provenance,
            focus: Some(node.clone()),
            layout: match direction {
                TreeDirection::Under => Layout::TreeUnder(node),
                TreeDirection::Above => Layout::TreeAbove(node),
            },
        })
    }

    /// Checks every structural invariant, including that `edges` is exactly
    /// the subgraph of `o` induced by the visible nodes.
    pub fn validate(&self, o: &Ontology) -> Result<(), GraphError> {
        let bad = |m: String| Err(GraphError::InvalidState(m));
        for id in &self.visible {
            if o.instance(id.as_str()).is_none() {
                return Err(GraphError::UnknownInstance(id.to_string()));
            }
        }
        if let Some(r) = self.roots.iter().find(|r| !self.visible.contains(*r)) {
            return bad(format!("root `{r}` is not visible"));
        }
        let distinct: BTreeSet<_> = self.roots.iter().collect();
        if distinct.len() != self.roots.len() {
            return bad("duplicate roots".into());
        }
        if let Some(e) = self.expanded.iter().find(|e| !self.visible.contains(*e)) {
            return bad(format!("expanded node `{e}` is not visible"));
        }
        if let Some(f) = self.focus.as_ref().filter(|f| !self.visible.contains(*f)) {
            return bad(format!("focus `{f}` is not visible"));
        }
        for id in self.visible.iter().filter(|id| !self.is_root(id)) {
            match self.provenance.get(id) {
                Some(sources) if !sources.is_empty() => {}
                _ => return bad(format!("node `{id}` has no provenance")),
            }
        }
        for (id, sources) in &self.provenance {
            if !self.visible.contains(id) || self.is_root(id) {
                return bad(format!(
                    "provenance recorded for `{id}`, which is not a visible non-root"
                ));
            }
            if let Some(s) = sources.iter().find(|s| !self.expanded.contains(*s)) {
                return bad(format!(
                    "provenance source `{s}` of `{id}` is not an expanded node"
                ));
            }
        }
        if self.edges != induced_edges(o, &self.visible) {
            return bad("edges are not the induced subgraph of the visible nodes".into());
        }
        Ok(())
    }

    pub fn to_document(&self, o: &Ontology) -> GraphDocument {
        GraphDocument {
            nodes: self
                .visible
                .iter()
                .map(|id| {
                    let inst = o.instance(id.as_str());
                    NodeDoc {
                        id: id.clone(),
                        label: inst.map(|i| i.label.clone()),
                        concept: inst.map(|i| i.concept.to_string()),
                    }
                })
                .collect(),
            edges: self.edges.iter().cloned().collect(),
            roots: self.roots.clone(),
            expanded: self.expanded.iter().cloned().collect(),
            provenance: self
                .provenance
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
                .collect(),
            focus: self.focus.clone(),
            layout: self.layout.clone(),
        }
    }

    /// Rebuilds a state from its JSON form and validates it against `o`.
    /// Node labels and concepts in the document are display-only and ignored.
    pub fn from_document(doc: GraphDocument, o: &Ontology) -> Result<GraphState, GraphError> {
        let state = GraphState {
            visible: doc.nodes.into_iter().map(|n| n.id).collect(),
            edges: doc.edges.into_iter().collect(),
            roots: doc.roots,
            expanded: doc.expanded.into_iter().collect(),
            provenance: doc
                .provenance
                .into_iter()
                .map(|(k, v)| (k, v.into_iter().collect()))
                .collect(),
            focus: doc.focus,
            layout: doc.layout,
        };
        state.validate(o)?;
        Ok(state)
    }
}

/// JSON form of [`GraphState`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<Relation>,
    pub roots: Vec<InstanceId>,
    pub expanded: Vec<InstanceId>,
    pub provenance: BTreeMap<InstanceId, Vec<InstanceId>>,
    pub focus: Option<InstanceId>,
    pub layout: Layout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: InstanceId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept: Option<String>,
}
