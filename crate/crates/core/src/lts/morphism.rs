use std::fmt;
use std::sync::Arc;

use super::{EdgeIx, Label, LabelSet, LtsError, Presheaf, StateIx};

/// A natural transformation between finite presheaves: a state map and an
/// edge map commuting with source and target.
#[derive(Clone, PartialEq, Eq)]
pub struct Morphism {
    dom: Arc<Presheaf>,
    cod: Arc<Presheaf>,
    states: Vec<StateIx>,
    edges: Vec<EdgeIx>,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for s in self.dom.state_ids() {
            m.entry(&self.dom.state_name(s), &self.cod.state_name(self.states[s.0]));
        }
        for e in self.dom.edge_ids() {
            m.entry(&self.dom.edge(e).id, &self.cod.edge(self.edges[e.0]).id);
        }
        m.finish()
    }
}

fn same(a: &Arc<Presheaf>, b: &Arc<Presheaf>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Morphism {
    pub fn new(
        dom: Arc<Presheaf>,
        cod: Arc<Presheaf>,
        states: Vec<StateIx>,
        edges: Vec<EdgeIx>,
    ) -> Result<Self, LtsError> {
        if dom.labels() != cod.labels() {
            return Err(LtsError::LabelMismatch);
        }
        if states.len() != dom.num_states() || edges.len() != dom.num_edges() {
            return Err(LtsError::NotNatural("map is not total".into()));
        }
        if states.iter().any(|s| s.0 >= cod.num_states()) || edges.iter().any(|e| e.0 >= cod.num_edges()) {
            return Err(LtsError::NotNatural("image outside codomain".into()));
        }
        for e in dom.edge_ids() {
            let d = dom.edge(e);
            let c = cod.edge(edges[e.0]);
            if d.label != c.label {
                return Err(LtsError::NotNatural(format!("edge `{}` changes label", d.id)));
            }
            if states[d.src.0] != c.src || states[d.tgt.0] != c.tgt {
                return Err(LtsError::NotNatural(format!("edge `{}` breaks src/tgt", d.id)));
            }
        }
        Ok(Morphism { dom, cod, states, edges })
    }

    /// Builds a morphism from name pairs; every domain cell must be listed.
    pub fn from_names<'a>(
        dom: Arc<Presheaf>,
        cod: Arc<Presheaf>,
        states: impl IntoIterator<Item = (&'a str, &'a str)>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, LtsError> {
        let mut smap = vec![None; dom.num_states()];
        for (a, b) in states {
            let a = dom.state_by_name(a).ok_or_else(|| LtsError::NotNatural(format!("no state `{a}`")))?;
            let b = cod.state_by_name(b).ok_or_else(|| LtsError::NotNatural(format!("no state `{b}`")))?;
            smap[a.0] = Some(b);
        }
        let mut emap = vec![None; dom.num_edges()];
        for (a, b) in edges {
            let a = dom.edge_by_name(a).ok_or_else(|| LtsError::NotNatural(format!("no edge `{a}`")))?;
            let b = cod.edge_by_name(b).ok_or_else(|| LtsError::NotNatural(format!("no edge `{b}`")))?;
            emap[a.0] = Some(b);
        }
        let states = smap
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| LtsError::NotNatural("state map is not total".into()))?;
        let edges = emap
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| LtsError::NotNatural("edge map is not total".into()))?;
        Morphism::new(dom, cod, states, edges)
    }

    pub fn identity(x: Arc<Presheaf>) -> Self {
        let states = x.state_ids().collect();
        let edges = x.edge_ids().collect();
        Morphism { dom: x.clone(), cod: x, states, edges }
    }

    /// The unique map out of the initial presheaf.
    pub fn from_empty(cod: Arc<Presheaf>) -> Self {
        Morphism { dom: Arc::new(Presheaf::empty(cod.labels().clone())), cod, states: vec![], edges: vec![] }
    }

    /// The unique map into the terminal presheaf.
    pub fn to_terminal(dom: Arc<Presheaf>, terminal: Arc<Presheaf>) -> Result<Self, LtsError> {
        if terminal.num_states() != 1 || terminal.num_edges() != terminal.labels().len() {
            return Err(LtsError::NotNatural("codomain is not terminal".into()));
        }
        let states = vec![StateIx(0); dom.num_states()];
        let edges = dom.edge_ids().map(|e| terminal.edges_with_label(dom.edge(e).label)[0]).collect();
        Morphism::new(dom, terminal, states, edges)
    }

    /// The source inclusion `s^a: y_* -> y_[a]`.
    pub fn source_map(labels: Arc<LabelSet>, a: Label) -> Result<Self, LtsError> {
        Self::endpoint_map(labels, a, "s")
    }

    /// The target inclusion `t^a: y_* -> y_[a]`.
    pub fn target_map(labels: Arc<LabelSet>, a: Label) -> Result<Self, LtsError> {
        Self::endpoint_map(labels, a, "t")
    }

    fn endpoint_map(labels: Arc<LabelSet>, a: Label, end: &str) -> Result<Self, LtsError> {
        use super::Object;
        let star = Arc::new(Presheaf::representable(labels.clone(), Object::Star)?);
        let arrow = Arc::new(Presheaf::representable(labels, Object::Arrow(a))?);
        Morphism::from_names(star, arrow, [("*", end)], [])
    }

    /// The map `y_* -> X` picking a state.
    pub fn pick_state(x: Arc<Presheaf>, s: StateIx) -> Self {
        use super::Object;
        let star = Arc::new(Presheaf::representable(x.labels().clone(), Object::Star).expect("y_*"));
        Morphism { dom: star, cod: x, states: vec![s], edges: vec![] }
    }

    /// The map `y_[a] -> X` picking an edge.
    pub fn pick_edge(x: Arc<Presheaf>, e: EdgeIx) -> Self {
        use super::Object;
        let d = x.edge(e).clone();
        let arrow = Arc::new(Presheaf::representable(x.labels().clone(), Object::Arrow(d.label)).expect("y_[a]"));
        Morphism { dom: arrow, cod: x, states: vec![d.src, d.tgt], edges: vec![e] }
    }

    pub fn domain(&self) -> &Arc<Presheaf> {
        &self.dom
    }

    pub fn codomain(&self) -> &Arc<Presheaf> {
        &self.cod
    }

    pub fn state(&self, s: StateIx) -> StateIx {
        self.states[s.0]
    }

    pub fn edge(&self, e: EdgeIx) -> EdgeIx {
        self.edges[e.0]
    }

    pub fn state_map(&self) -> &[StateIx] {
        &self.states
    }

    pub fn edge_map(&self) -> &[EdgeIx] {
        &self.edges
    }

    /// Image of a state given by name, as a name.
    pub fn state_by_name(&self, name: &str) -> Option<&str> {
        self.dom.state_by_name(name).map(|s| self.cod.state_name(self.states[s.0]))
    }

    pub fn edge_by_name(&self, name: &str) -> Option<&str> {
        self.dom.edge_by_name(name).map(|e| self.cod.edge(self.edges[e.0]).id.as_str())
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Morphism) -> Result<Morphism, LtsError> {
        if !same(&first.cod, &self.dom) {
            return Err(LtsError::NotComposable);
        }
        Ok(Morphism {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            states: first.states.iter().map(|s| self.states[s.0]).collect(),
            edges: first.edges.iter().map(|e| self.edges[e.0]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        same(&self.dom, &self.cod)
            && self.states.iter().enumerate().all(|(i, s)| s.0 == i)
            && self.edges.iter().enumerate().all(|(i, e)| e.0 == i)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen_s = vec![false; self.cod.num_states()];
        let mut seen_e = vec![false; self.cod.num_edges()];
        self.states.iter().all(|s| !std::mem::replace(&mut seen_s[s.0], true))
            && self.edges.iter().all(|e| !std::mem::replace(&mut seen_e[e.0], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen_s = vec![false; self.cod.num_states()];
        let mut seen_e = vec![false; self.cod.num_edges()];
        self.states.iter().for_each(|s| seen_s[s.0] = true);
        self.edges.iter().for_each(|e| seen_e[e.0] = true);
        seen_s.into_iter().all(|b| b) && seen_e.into_iter().all(|b| b)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Equality as name maps, with domains and codomains compared up to
    /// reordering of their cells (see [`Presheaf::same_cells`]).
    pub fn same_under_names(&self, other: &Morphism) -> bool {
        if !self.dom.same_cells(&other.dom) || !self.cod.same_cells(&other.cod) {
            return false;
        }
        self.dom.state_ids().all(|s| {
            let n = self.dom.state_name(s);
            other.state_by_name(n) == Some(self.cod.state_name(self.states[s.0]))
        }) && self.dom.edge_ids().all(|e| {
            let n = &self.dom.edge(e).id;
            other.edge_by_name(n) == Some(self.cod.edge(self.edges[e.0]).id.as_str())
        })
    }
}

/// A square of morphisms
///
/// ```text
///   A --top--> X
///   |          |
/// left       right
///   v          v
///   B --bot--> Y
/// ```
#[derive(Debug, Clone)]
pub struct Square {
    pub left: Morphism,
    pub right: Morphism,
    pub top: Morphism,
    pub bottom: Morphism,
}

impl Square {
    pub fn commutes(&self) -> bool {
        match (self.right.after(&self.top), self.bottom.after(&self.left)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    pub fn check(&self) -> Result<(), LtsError> {
        if self.commutes() {
            Ok(())
        } else {
            Err(LtsError::NonCommutingSquare)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::Object;

    fn labels() -> Arc<LabelSet> {
        Arc::new(LabelSet::new(["a", "b"]).unwrap())
    }

    #[test]
    fn naturality_is_checked() {
        let l = labels();
        let ya = Arc::new(Presheaf::representable(l.clone(), Object::Arrow(Label(0))).unwrap());
        let x = Arc::new(
            Presheaf::builder(l.clone()).state("p").state("q").edge("a", "e", "p", "q").build().unwrap(),
        );
        assert!(Morphism::from_names(ya.clone(), x.clone(), [("s", "p"), ("t", "q")], [("e", "e")]).is_ok());
        assert!(matches!(
            Morphism::from_names(ya, x, [("s", "q"), ("t", "q")], [("e", "e")]),
            Err(LtsError::NotNatural(_))
        ));
    }

    #[test]
    fn composition_and_identity() {
        let l = labels();
        let s = Morphism::source_map(l.clone(), Label(1)).unwrap();
        let id = Morphism::identity(s.codomain().clone());
        assert_eq!(id.after(&s).unwrap(), s);
        assert!(s.after(&id).is_err());
        assert!(s.is_injective() && !s.is_surjective());
    }
}
