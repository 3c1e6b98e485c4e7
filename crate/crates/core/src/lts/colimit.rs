use std::collections::HashMap;
use std::sync::Arc;

use super::{EdgeData, EdgeIx, LabelSet, LtsError, Morphism, Presheaf, StateIx};

/// The finite diagram shapes the arity construction needs.
///
/// Every diagram object carries a tag; a cell `c` of that object appears in
/// the colimit as `tag/c`, or as plain `c` when the tag is empty.
#[derive(Debug, Clone)]
pub enum Diagram {
    Coproduct { labels: Arc<LabelSet>, parts: Vec<(String, Arc<Presheaf>)> },
    /// A star of morphisms out of a common apex. A class of identified cells
    /// is named after its first member in leg order; the apex only names
    /// cells when there are no legs.
    WidePushout { apex: Arc<Presheaf>, legs: Vec<(String, Morphism)> },
}

impl Diagram {
    pub fn coproduct(labels: Arc<LabelSet>, parts: Vec<Arc<Presheaf>>) -> Self {
        let parts = parts.into_iter().enumerate().map(|(i, p)| (format!("inj{i}"), p)).collect();
        Diagram::Coproduct { labels, parts }
    }

    pub fn pushout(f: Morphism, g: Morphism) -> Result<Self, LtsError> {
        if f.domain() != g.domain() {
            return Err(LtsError::ShapeUnsupported("pushout legs have different domains".into()));
        }
        Ok(Diagram::WidePushout {
            apex: f.domain().clone(),
            legs: vec![("inj0".into(), f), ("inj1".into(), g)],
        })
    }

    /// Classifies a general finite diagram given as objects plus arrows
    /// `(from, to, morphism)`. Only discrete diagrams and stars out of a
    /// single apex are accepted.
    pub fn from_arrows(
        labels: Arc<LabelSet>,
        objects: Vec<Arc<Presheaf>>,
        arrows: Vec<(usize, usize, Morphism)>,
    ) -> Result<Self, LtsError> {
        if arrows.is_empty() {
            return Ok(Diagram::coproduct(labels, objects));
        }
        let apex = arrows[0].0;
        if arrows.iter().any(|(from, _, _)| *from != apex) {
            return Err(LtsError::ShapeUnsupported("arrows do not share a source".into()));
        }
        let mut targets: Vec<usize> = arrows.iter().map(|(_, to, _)| *to).collect();
        targets.sort_unstable();
        let n = targets.len();
        targets.dedup();
        if targets.len() != n || targets.contains(&apex) {
            return Err(LtsError::ShapeUnsupported("parallel arrows or loops".into()));
        }
        if targets.len() + 1 != objects.len() {
            return Err(LtsError::ShapeUnsupported("objects outside the star".into()));
        }
        for (from, to, m) in &arrows {
            if objects.get(*from) != Some(m.domain()) || objects.get(*to) != Some(m.codomain()) {
                return Err(LtsError::ShapeUnsupported("arrow endpoints do not match objects".into()));
            }
        }
        Ok(Diagram::WidePushout {
            apex: objects[apex].clone(),
            legs: arrows.into_iter().map(|(_, to, m)| (format!("inj{to}"), m)).collect(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Colimit {
    pub object: Arc<Presheaf>,
    /// One injection per coproduct part, or per leg codomain.
    pub injections: Vec<Morphism>,
    /// For wide pushouts, the injection of the apex.
    pub apex_injection: Option<Morphism>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            // keep the smaller index as root so the first member stays representative
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi] = lo;
        }
    }
}

fn prefixed(tag: &str, name: &str) -> String {
    if tag.is_empty() {
        name.to_string()
    } else {
        format!("{tag}/{name}")
    }
}

/// Pointwise colimit of a coproduct or wide-pushout diagram.
pub fn colimit(diagram: &Diagram) -> Result<Colimit, LtsError> {
    // Objects in naming-priority order; for wide pushouts the apex goes last.
    let (labels, objects, tags, apex_legs): (Arc<LabelSet>, Vec<Arc<Presheaf>>, Vec<String>, Option<&[(String, Morphism)]>) =
        match diagram {
            Diagram::Coproduct { labels, parts } => {
                for (_, p) in parts {
                    if p.labels() != labels {
                        return Err(LtsError::LabelMismatch);
                    }
                }
                (
                    labels.clone(),
                    parts.iter().map(|(_, p)| p.clone()).collect(),
                    parts.iter().map(|(t, _)| t.clone()).collect(),
                    None,
                )
            }
            Diagram::WidePushout { apex, legs } => {
                for (_, m) in legs {
                    if m.domain() != apex {
                        return Err(LtsError::ShapeUnsupported("leg does not start at the apex".into()));
                    }
                }
                let mut objects: Vec<Arc<Presheaf>> = legs.iter().map(|(_, m)| m.codomain().clone()).collect();
                let mut tags: Vec<String> = legs.iter().map(|(t, _)| t.clone()).collect();
                objects.push(apex.clone());
                tags.push(String::new());
                (apex.labels().clone(), objects, tags, Some(legs.as_slice()))
            }
        };

    let mut state_off = Vec::with_capacity(objects.len());
    let mut edge_off = Vec::with_capacity(objects.len());
    let (mut ns, mut ne) = (0, 0);
    for o in &objects {
        state_off.push(ns);
        edge_off.push(ne);
        ns += o.num_states();
        ne += o.num_edges();
    }
    let mut us = UnionFind::new(ns);
    let mut ue = UnionFind::new(ne);
    if let Some(legs) = apex_legs {
        let apex_ix = objects.len() - 1;
        for (li, (_, m)) in legs.iter().enumerate() {
            for s in m.domain().state_ids() {
                us.union(state_off[li] + m.state(s).0, state_off[apex_ix] + s.0);
            }
            for e in m.domain().edge_ids() {
                ue.union(edge_off[li] + m.edge(e).0, edge_off[apex_ix] + e.0);
            }
        }
    }

    // Assign colimit cells in first-occurrence order.
    let mut state_class: HashMap<usize, StateIx> = HashMap::new();
    let mut states = Vec::new();
    let mut state_of = vec![StateIx(0); ns];
    for (oi, o) in objects.iter().enumerate() {
        for s in o.state_ids() {
            let flat = state_off[oi] + s.0;
            let root = us.find(flat);
            let ix = *state_class.entry(root).or_insert_with(|| {
                states.push(prefixed(&tags[oi], o.state_name(s)));
                StateIx(states.len() - 1)
            });
            state_of[flat] = ix;
        }
    }
    let mut edge_class: HashMap<usize, EdgeIx> = HashMap::new();
    let mut edges = Vec::new();
    let mut edge_of = vec![EdgeIx(0); ne];
    for (oi, o) in objects.iter().enumerate() {
        for e in o.edge_ids() {
            let flat = edge_off[oi] + e.0;
            let root = ue.find(flat);
            let d = o.edge(e);
            let src = state_of[state_off[oi] + d.src.0];
            let tgt = state_of[state_off[oi] + d.tgt.0];
            let ix = *edge_class.entry(root).or_insert_with(|| {
                edges.push(EdgeData { id: prefixed(&tags[oi], &d.id), label: d.label, src, tgt });
                EdgeIx(edges.len() - 1)
            });
            edge_of[flat] = ix;
        }
    }
    // Edge ordering inside the presheaf is label-major; remap.
    let object = Arc::new(Presheaf::from_indexed(labels, states, edges.clone())?);
    let remap: Vec<EdgeIx> = edges.iter().map(|e| object.edge_by_name(&e.id).expect("edge")).collect();

    let injection = |oi: usize| -> Morphism {
        let o = &objects[oi];
        let s = o.state_ids().map(|s| state_of[state_off[oi] + s.0]).collect();
        let e = o.edge_ids().map(|e| remap[edge_of[edge_off[oi] + e.0].0]).collect();
        Morphism::new(o.clone(), object.clone(), s, e).expect("colimit injection is natural")
    };
    let (injections, apex_injection) = match apex_legs {
        None => ((0..objects.len()).map(injection).collect(), None),
        Some(_) => {
            let n = objects.len() - 1;
            ((0..n).map(injection).collect(), Some(injection(n)))
        }
    };
    Ok(Colimit { object, injections, apex_injection })
}

impl Colimit {
    /// The map out of the colimit induced by a cocone (one morphism per
    /// injection, with a common codomain).
    pub fn induced(&self, cocone: &[Morphism]) -> Result<Morphism, LtsError> {
        if cocone.len() != self.injections.len() {
            return Err(LtsError::NotACocone("wrong number of components".into()));
        }
        let cod = cocone
            .first()
            .map(|c| c.codomain().clone())
            .ok_or_else(|| LtsError::NotACocone("empty cocone".into()))?;
        let mut states: Vec<Option<StateIx>> = vec![None; self.object.num_states()];
        let mut edges: Vec<Option<EdgeIx>> = vec![None; self.object.num_edges()];
        for (inj, c) in self.injections.iter().zip(cocone) {
            if c.domain() != inj.domain() || **c.codomain() != *cod {
                return Err(LtsError::NotACocone("component has the wrong domain or codomain".into()));
            }
            for s in inj.domain().state_ids() {
                let slot = &mut states[inj.state(s).0];
                match slot {
                    Some(v) if *v != c.state(s) => {
                        return Err(LtsError::NotACocone(format!(
                            "components disagree on `{}`",
                            self.object.state_name(inj.state(s))
                        )))
                    }
                    _ => *slot = Some(c.state(s)),
                }
            }
            for e in inj.domain().edge_ids() {
                let slot = &mut edges[inj.edge(e).0];
                match slot {
                    Some(v) if *v != c.edge(e) => {
                        return Err(LtsError::NotACocone(format!(
                            "components disagree on `{}`",
                            self.object.edge(inj.edge(e)).id
                        )))
                    }
                    _ => *slot = Some(c.edge(e)),
                }
            }
        }
        let states = states.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| {
            LtsError::NotACocone("injections are not jointly surjective".into())
        })?;
        let edges = edges.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| {
            LtsError::NotACocone("injections are not jointly surjective".into())
        })?;
        Morphism::new(self.object.clone(), cod, states, edges)
    }
}
