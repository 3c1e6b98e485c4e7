use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{Label, LabelSet, LtsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIx(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeIx(pub usize);

/// An object of the base category: the state object `*` or a transition object `[a]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    Star,
    Arrow(Label),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeData {
    pub id: String,
    pub label: Label,
    pub src: StateIx,
    pub tgt: StateIx,
}

/// A finite generalized labelled transition system: a presheaf over the
/// category with one state object and, per label, one transition object with
/// source and target arrows.
///
/// States keep declaration order. Edges are stored label-major (label order of
/// the [`LabelSet`], then declaration order); this is the ordering used by
/// every deterministic search in this module.
#[derive(Clone)]
pub struct Presheaf {
    labels: Arc<LabelSet>,
    states: Vec<String>,
    edges: Vec<EdgeData>,
    state_index: HashMap<String, StateIx>,
    edge_index: HashMap<String, EdgeIx>,
    by_label: Vec<Vec<EdgeIx>>,
    outgoing: Vec<Vec<EdgeIx>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.states == other.states && self.edges == other.edges
    }
}

impl Eq for Presheaf {}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presheaf")
            .field("states", &self.states)
            .field(
                "edges",
                &self
                    .edges
                    .iter()
                    .map(|e| {
                        format!(
                            "{}:{} {}->{}",
                            e.id,
                            self.labels.name(e.label),
                            self.states[e.src.0],
                            self.states[e.tgt.0]
                        )
                    })
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// Incremental construction of a [`Presheaf`] by names.
#[derive(Debug, Clone)]
pub struct PresheafBuilder {
    labels: Arc<LabelSet>,
    states: Vec<String>,
    edges: Vec<(String, String, String, String)>,
}

impl PresheafBuilder {
    pub fn new(labels: Arc<LabelSet>) -> Self {
        PresheafBuilder { labels, states: Vec::new(), edges: Vec::new() }
    }

    pub fn state(mut self, id: impl Into<String>) -> Self {
        self.states.push(id.into());
        self
    }

    pub fn add_state(&mut self, id: impl Into<String>) {
        self.states.push(id.into());
    }

    pub fn edge(
        mut self,
        label: impl Into<String>,
        id: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
    ) -> Self {
        self.add_edge(label, id, src, tgt);
        self
    }

    pub fn add_edge(
        &mut self,
        label: impl Into<String>,
        id: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
    ) {
        self.edges.push((label.into(), id.into(), src.into(), tgt.into()));
    }

    pub fn build(self) -> Result<Presheaf, LtsError> {
        let mut state_index = HashMap::with_capacity(self.states.len());
        for (i, s) in self.states.iter().enumerate() {
            if state_index.insert(s.clone(), StateIx(i)).is_some() {
                return Err(LtsError::DuplicateId(s.clone()));
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (label, id, src, tgt) in self.edges {
            let label = self
                .labels
                .lookup(&label)
                .ok_or_else(|| LtsError::UnknownLabel(label.clone()))?;
            let src = *state_index.get(&src).ok_or_else(|| LtsError::DanglingEdge(id.clone()))?;
            let tgt = *state_index.get(&tgt).ok_or_else(|| LtsError::DanglingEdge(id.clone()))?;
            edges.push(EdgeData { id, label, src, tgt });
        }
        Presheaf::from_parts(self.labels, self.states, edges, state_index)
    }
}

impl Presheaf {
    fn from_parts(
        labels: Arc<LabelSet>,
        states: Vec<String>,
        mut edges: Vec<EdgeData>,
        state_index: HashMap<String, StateIx>,
    ) -> Result<Self, LtsError> {
        edges.sort_by_key(|e| e.label);
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut by_label = vec![Vec::new(); labels.len()];
        let mut outgoing = vec![Vec::new(); states.len()];
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), EdgeIx(i)).is_some() {
                return Err(LtsError::DuplicateId(e.id.clone()));
            }
            if e.src.0 >= states.len() || e.tgt.0 >= states.len() {
                return Err(LtsError::DanglingEdge(e.id.clone()));
            }
            by_label[e.label.0].push(EdgeIx(i));
            outgoing[e.src.0].push(EdgeIx(i));
        }
        Ok(Presheaf { labels, states, edges, state_index, edge_index, by_label, outgoing })
    }

    /// Builds a presheaf from already-indexed data.
    pub fn from_indexed(
        labels: Arc<LabelSet>,
        states: Vec<String>,
        edges: Vec<EdgeData>,
    ) -> Result<Self, LtsError> {
        let mut state_index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if state_index.insert(s.clone(), StateIx(i)).is_some() {
                return Err(LtsError::DuplicateId(s.clone()));
            }
        }
        for e in &edges {
            if e.label.0 >= labels.len() {
                return Err(LtsError::UnknownLabel(format!("#{}", e.label.0)));
            }
        }
        Presheaf::from_parts(labels, states, edges, state_index)
    }

    pub fn builder(labels: Arc<LabelSet>) -> PresheafBuilder {
        PresheafBuilder::new(labels)
    }

    /// The initial presheaf `0`.
    pub fn empty(labels: Arc<LabelSet>) -> Self {
        Presheaf::from_parts(labels, Vec::new(), Vec::new(), HashMap::new()).expect("empty presheaf")
    }

    /// The terminal presheaf `1`: one state `*` and one loop per label, named
    /// after the label.
    pub fn terminal(labels: Arc<LabelSet>) -> Self {
        let mut b = PresheafBuilder::new(labels.clone()).state("*");
        for l in labels.iter() {
            b.add_edge(labels.name(l), labels.name(l), "*", "*");
        }
        b.build().expect("terminal presheaf")
    }

    /// The representable presheaf on an object: `y_*` is one state `*`,
    /// `y_[a]` is states `s`, `t` with one `a`-edge `e` between them.
    pub fn representable(labels: Arc<LabelSet>, object: Object) -> Result<Self, LtsError> {
        match object {
            Object::Star => Ok(PresheafBuilder::new(labels).state("*").build()?),
            Object::Arrow(a) => {
                if a.0 >= labels.len() {
                    return Err(LtsError::UnknownLabel(format!("#{}", a.0)));
                }
                let name = labels.name(a).to_string();
                PresheafBuilder::new(labels).state("s").state("t").edge(name, "e", "s", "t").build()
            }
        }
    }

    /// `representable` by label name; fails with `UnknownLabel` for undeclared names.
    pub fn representable_named(labels: Arc<LabelSet>, label: &str) -> Result<Self, LtsError> {
        let a = labels.lookup(label).ok_or_else(|| LtsError::UnknownLabel(label.to_string()))?;
        Presheaf::representable(labels, Object::Arrow(a))
    }

    pub fn labels(&self) -> &Arc<LabelSet> {
        &self.labels
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateIx> {
        (0..self.states.len()).map(StateIx)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeIx> {
        (0..self.edges.len()).map(EdgeIx)
    }

    pub fn state_name(&self, s: StateIx) -> &str {
        &self.states[s.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn edge(&self, e: EdgeIx) -> &EdgeData {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[EdgeData] {
        &self.edges
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateIx> {
        self.state_index.get(name).copied()
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeIx> {
        self.edge_index.get(name).copied()
    }

    pub fn edges_with_label(&self, a: Label) -> &[EdgeIx] {
        &self.by_label[a.0]
    }

    pub fn outgoing(&self, s: StateIx) -> &[EdgeIx] {
        &self.outgoing[s.0]
    }

    /// Number of cells at an object of the base category.
    pub fn cells_at(&self, object: Object) -> usize {
        match object {
            Object::Star => self.states.len(),
            Object::Arrow(a) => self.by_label[a.0].len(),
        }
    }

    /// All objects of the base category, state object first.
    pub fn objects(&self) -> Vec<Object> {
        std::iter::once(Object::Star).chain(self.labels.iter().map(Object::Arrow)).collect()
    }

    /// Equality up to reordering: the same named states and the same named
    /// edges with the same labels and endpoint names.
    pub fn same_cells(&self, other: &Presheaf) -> bool {
        if self.labels != other.labels
            || self.states.len() != other.states.len()
            || self.edges.len() != other.edges.len()
        {
            return false;
        }
        if !self.states.iter().all(|s| other.state_index.contains_key(s)) {
            return false;
        }
        self.edges.iter().all(|e| match other.edge_by_name(&e.id) {
            Some(o) => {
                let o = other.edge(o);
                o.label == e.label
                    && other.state_name(o.src) == self.state_name(e.src)
                    && other.state_name(o.tgt) == self.state_name(e.tgt)
            }
            None => false,
        })
    }

    /// Copy with every state and edge renamed.
    pub fn renamed(
        &self,
        state_name: impl Fn(&str) -> String,
        edge_name: impl Fn(&str) -> String,
    ) -> Result<Presheaf, LtsError> {
        let states = self.states.iter().map(|s| state_name(s)).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeData { id: edge_name(&e.id), label: e.label, src: e.src, tgt: e.tgt })
            .collect();
        Presheaf::from_indexed(self.labels.clone(), states, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ccs_labels() -> Arc<LabelSet> {
        Arc::new(LabelSet::new(["a_bar", "b", "a"]).unwrap())
    }

    #[test]
    fn worked_example_system_is_valid() {
        let x = Presheaf::builder(ccs_labels())
            .state("x")
            .state("y")
            .state("z")
            .edge("a_bar", "e", "y", "x")
            .edge("b", "f", "y", "z")
            .edge("b", "f'", "y", "z")
            .edge("a", "g", "z", "z")
            .build()
            .unwrap();
        assert_eq!(x.num_states(), 3);
        assert_eq!(x.num_edges(), 4);
        let b = x.labels().lookup("b").unwrap();
        assert_eq!(x.edges_with_label(b).len(), 2);
        let y = x.state_by_name("y").unwrap();
        assert_eq!(x.outgoing(y).len(), 3);
    }

    #[test]
    fn empty_is_initial_shape() {
        let z = Presheaf::builder(ccs_labels()).build().unwrap();
        assert_eq!(z, Presheaf::empty(ccs_labels()));
        assert_eq!(z.num_states() + z.num_edges(), 0);
    }

    #[test]
    fn dangling_and_duplicate_rejected() {
        let err = Presheaf::builder(ccs_labels())
            .state("x")
            .edge("a", "e", "x", "nowhere")
            .build()
            .unwrap_err();
        assert_eq!(err, LtsError::DanglingEdge("e".into()));
        let err = Presheaf::builder(ccs_labels()).state("x").state("x").build().unwrap_err();
        assert_eq!(err, LtsError::DuplicateId("x".into()));
        let err = Presheaf::builder(ccs_labels())
            .state("x")
            .edge("a", "e", "x", "x")
            .edge("b", "e", "x", "x")
            .build()
            .unwrap_err();
        assert_eq!(err, LtsError::DuplicateId("e".into()));
    }

    #[test]
    fn representables() {
        let l = ccs_labels();
        let star = Presheaf::representable(l.clone(), Object::Star).unwrap();
        assert_eq!((star.num_states(), star.num_edges()), (1, 0));
        let ya = Presheaf::representable_named(l.clone(), "a").unwrap();
        assert_eq!((ya.num_states(), ya.num_edges()), (2, 1));
        assert_ne!(ya.edge(EdgeIx(0)).src, ya.edge(EdgeIx(0)).tgt);
        assert_eq!(
            Presheaf::representable_named(l, "c").unwrap_err(),
            LtsError::UnknownLabel("c".into())
        );
    }
}
